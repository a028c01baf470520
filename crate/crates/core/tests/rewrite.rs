use consfree::analysis::{compute_b, is_b_safe};
use consfree::corpus;
use consfree::rewrite::{
    accepts, accepts_ordered, one_step, one_step_reducts, render_trace, replay_trace,
    search_data_normal_forms, search_ordered, true_term, SearchBudget, SearchOrder, Verdict,
};
use consfree::syntax::parse_term;
use consfree::{Afs, Term, TermKind};
use proptest::prelude::*;

fn t(afs: &Afs, src: &str) -> Term {
    parse_term(src, afs.signature(), &[]).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// `x1(x2(...(|>)))` in file syntax.
fn enc(word: &str) -> String {
    let mut s = String::new();
    for c in word.chars() {
        match c {
            '#' => s.push_str("'#'("),
            '?' => s.push_str("'?'("),
            c => {
                s.push(c);
                s.push('(');
            }
        }
    }
    s.push_str("|>");
    s.push_str(&")".repeat(word.chars().count()));
    s
}

#[test]
fn one_step_examples() {
    let count = corpus::load("count");
    assert_eq!(
        one_step_reducts(&count, &t(&count, "succ(1(0(1(|>))))")),
        vec![t(&count, "0(succ(0(1(|>))))")]
    );
    let sat = corpus::load("sat");
    assert!(one_step_reducts(&sat, &t(&sat, "true")).is_empty());
    let r = one_step_reducts(&sat, &t(&sat, "either(|>, 0(|>))"));
    assert_eq!(r, vec![t(&sat, "|>"), t(&sat, "0(|>)")]);
}

#[test]
fn steps_record_positions_and_rules() {
    let sat = corpus::load("sat");
    let s = one_step(&sat, &t(&sat, "main(either(|>, |>), |>, '?'(|>))"));
    // main(s,t,?(xs)) at the root, then the two either rules at position 0
    assert_eq!(s.len(), 3);
    assert_eq!(s[0].position, Vec::<usize>::new());
    assert_eq!(s[1].position, vec![0]);
    assert_eq!(s[1].result, s[2].result);
    assert_eq!(
        one_step_reducts(&sat, &t(&sat, "main(either(|>, |>), |>, '?'(|>))")).len(),
        2
    );
}

#[test]
fn beta_steps_inside_arguments() {
    let hc = corpus::load("hocount");
    let one = t(&hc, "(\\x. succ(\\y. false, x)) |>");
    let r = one_step_reducts(&hc, &one);
    assert_eq!(r, vec![t(&hc, "succ(\\y:string. false, |>)")]);
    let r = one_step_reducts(&hc, &t(&hc, "not((\\y:string. false) |>)"));
    assert!(r.contains(&t(&hc, "not(false)")));
    assert!(r.contains(&t(&hc, "ite((\\y:string. false) |>, false, true)")));
}

#[test]
fn search_examples() {
    let hc = corpus::load("hocount");
    let res = search_data_normal_forms(
        &hc,
        &t(&hc, "(\\x. succ(\\y. false, x)) |>"),
        SearchBudget::default(),
    );
    assert!(res.exhausted);
    assert!(res.data_normal_forms.contains(&t(&hc, "true")));

    let pal = corpus::load("palindrome");
    let res = search_data_normal_forms(&pal, &t(&pal, "true"), SearchBudget::default());
    assert_eq!(res.data_normal_forms, vec![t(&pal, "true")]);
    assert!(res.exhausted);
    assert_eq!(res.visited, 1);

    let res = search_data_normal_forms(
        &pal,
        &t(&pal, &format!("decide({})", enc("0110"))),
        SearchBudget::default(),
    );
    assert!(res.exhausted);
    assert_eq!(res.data_normal_forms, vec![t(&pal, "true")]);
}

#[test]
fn tight_budgets_are_not_exhaustive() {
    let pal = corpus::load("palindrome");
    let start = t(&pal, &format!("decide({})", enc("0110")));
    let res = search_data_normal_forms(&pal, &start, SearchBudget::new(3, 10_000));
    assert!(!res.exhausted);
    assert!(res.visited <= 3);
    let res = search_data_normal_forms(&pal, &start, SearchBudget::new(1_000_000, 2));
    assert!(!res.exhausted);
}

#[test]
fn sat_acceptance_examples() {
    let sat = corpus::load("sat");
    let (v, res) = accepts(&sat, "10?#?10#", SearchBudget::default()).unwrap();
    assert_eq!(v, Verdict::Accepted);
    let trace = res.trace(&true_term(&sat).unwrap()).unwrap();
    replay_trace(&sat, &render_trace(&trace)).unwrap();

    let (v, _) = accepts(&sat, "1#0#", SearchBudget::default()).unwrap();
    assert_eq!(v, Verdict::Refuted);
}

#[test]
fn smallest_first_reaches_the_simulator_witness() {
    let afs = corpus::load("nonlinear_tm");
    let budget = SearchBudget::new(200_000, 10_000);
    let (v, res) = accepts_ordered(&afs, "1", budget, SearchOrder::SmallestFirst).unwrap();
    assert_eq!(v, Verdict::Accepted);
    let trace = res.trace(&true_term(&afs).unwrap()).unwrap();
    assert_eq!(replay_trace(&afs, &render_trace(&trace)).unwrap(), trace);
    let (v, _) = accepts_ordered(
        &afs,
        "1",
        SearchBudget::new(20_000, 10_000),
        SearchOrder::BreadthFirst,
    )
    .unwrap();
    assert_eq!(v, Verdict::Unknown);
}

#[test]
fn long_sat_derivation_replays() {
    let sat = corpus::load("sat");
    let l = "11?#000#?11#";
    let x2 = format!("either({}, |>)", enc("1?#000#?11#"));
    let x31 = format!("either({}, either({}, |>))", enc("?#000#?11#"), enc(l));
    let m = |rest: &str| format!("main({x2}, {x31}, {rest})");
    let tst = |rest: &str, a: &str, b: &str| format!("test({x2}, {x31}, {}, {a}, {b})", enc(rest));
    let eq = |a: &str, b: &str| format!("eq({}, {})", enc(a), enc(b));
    let eqx = |x: &str, b: &str| format!("eq({x}, {})", enc(b));
    let e = enc;
    // (term, reached in exactly one step from the previous term)
    let steps: Vec<(String, bool)> = vec![
        (format!("decide({})", e(l)), true),
        (format!("assign({}, |>, |>, {})", e(l), e(l)), true),
        (
            format!(
                "assign({}, |>, either({}, |>), {})",
                e("1?#000#?11#"),
                e(l),
                e(l)
            ),
            true,
        ),
        (
            format!(
                "assign({}, {x2}, either({}, |>), {})",
                e("?#000#?11#"),
                e(l),
                e(l)
            ),
            true,
        ),
        (
            format!("assign({}, {x2}, {x31}, {})", e("#000#?11#"), e(l)),
            true,
        ),
        (m(&e(l)), true),
        (tst("1?#000#?11#", &eqx(&x2, l), &eqx(&x31, l)), true),
        (tst("1?#000#?11#", &eqx(&x2, l), &eq(l, l)), false),
        (
            tst(
                "1?#000#?11#",
                &eqx(&x2, l),
                &eq("1?#000#?11#", "1?#000#?11#"),
            ),
            true,
        ),
        (
            tst("1?#000#?11#", &eqx(&x2, l), &eq("?#000#?11#", "?#000#?11#")),
            true,
        ),
        (
            tst("1?#000#?11#", &eqx(&x2, l), &eq("#000#?11#", "#000#?11#")),
            true,
        ),
        (tst("1?#000#?11#", &eqx(&x2, l), "true"), true),
        (m(&e("1?#000#?11#")), true),
        (
            tst(
                "?#000#?11#",
                &eqx(&x2, "1?#000#?11#"),
                &eqx(&x31, "1?#000#?11#"),
            ),
            true,
        ),
        (
            tst(
                "?#000#?11#",
                &eq("1?#000#?11#", "1?#000#?11#"),
                &eqx(&x31, "1?#000#?11#"),
            ),
            false,
        ),
        (
            tst(
                "?#000#?11#",
                &eq("?#000#?11#", "?#000#?11#"),
                &eqx(&x31, "1?#000#?11#"),
            ),
            true,
        ),
        (
            tst(
                "?#000#?11#",
                &eq("#000#?11#", "#000#?11#"),
                &eqx(&x31, "1?#000#?11#"),
            ),
            true,
        ),
        (tst("?#000#?11#", "true", &eqx(&x31, "1?#000#?11#")), true),
        (m(&format!("skip({})", e("?#000#?11#"))), true),
        (m(&format!("skip({})", e("#000#?11#"))), true),
        (m(&e("000#?11#")), true),
        (
            tst("00#?11#", &eqx(&x31, "000#?11#"), &eqx(&x2, "000#?11#")),
            true,
        ),
        (
            tst("00#?11#", &eq(l, "000#?11#"), &eqx(&x2, "000#?11#")),
            false,
        ),
        (
            tst(
                "00#?11#",
                &eq("1?#000#?11#", "00#?11#"),
                &eqx(&x2, "000#?11#"),
            ),
            true,
        ),
        (
            tst(
                "00#?11#",
                &eq("?#000#?11#", "0#?11#"),
                &eqx(&x2, "000#?11#"),
            ),
            true,
        ),
        (
            tst("00#?11#", &eq("#000#?11#", "#?11#"), &eqx(&x2, "000#?11#")),
            true,
        ),
        (tst("00#?11#", "true", &eqx(&x2, "000#?11#")), true),
        (m(&format!("skip({})", e("00#?11#"))), true),
        (m(&format!("skip({})", e("0#?11#"))), true),
        (m(&format!("skip({})", e("#?11#"))), true),
        (m(&e("?11#")), true),
        (m(&e("11#")), true),
        (tst("1#", &eqx(&x2, "11#"), &eqx(&x31, "11#")), true),
        (
            tst("1#", &eq("1?#000#?11#", "11#"), &eqx(&x31, "11#")),
            true,
        ),
        (tst("1#", &eq("?#000#?11#", "1#"), &eqx(&x31, "11#")), true),
        (tst("1#", &eq("#000#?11#", "#"), &eqx(&x31, "11#")), true),
        (tst("1#", "true", &eqx(&x31, "11#")), true),
        (m(&format!("skip({})", e("1#"))), true),
        (m(&format!("skip({})", e("#"))), true),
        (m("|>"), true),
        ("true".to_string(), true),
    ];
    let mut prev: Option<Term> = None;
    for (i, (src, single)) in steps.iter().enumerate() {
        let cur = t(&sat, src);
        if let Some(p) = &prev {
            if *single {
                assert!(
                    one_step_reducts(&sat, p).contains(&cur),
                    "step {i} is not a single step"
                );
            } else {
                let res = consfree::rewrite::search_until(
                    &sat,
                    p,
                    SearchBudget::new(200_000, 10),
                    |_| false,
                );
                assert!(res.trace(&cur).is_some(), "step {i} is not reachable");
            }
        }
        prev = Some(cur);
    }
}

#[test]
fn replay_rejects_non_steps() {
    let count = corpus::load("count");
    assert!(replay_trace(&count, "succ(1(|>))\n0(succ(|>))\n0(1(|>))\n").is_ok());
    assert!(replay_trace(&count, "succ(1(|>))\n0(1(|>))\n").is_err());
    assert!(replay_trace(&count, "succ(1(|>))\nsucc(2)\n").is_err());
}

/// Independent enumeration: every position, every rule, plus beta.
fn naive_reducts(afs: &Afs, t: &Term) -> Vec<Term> {
    fn positions(t: &Term, pos: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(pos.clone());
        for i in 0..t.children().len() {
            pos.push(i);
            positions(&t.children()[i], pos, out);
            pos.pop();
        }
    }
    let mut ps = Vec::new();
    positions(t, &mut Vec::new(), &mut ps);
    let mut out: Vec<Term> = Vec::new();
    for p in ps {
        let s = t.subterm_at(&p).unwrap();
        for r in afs.rules() {
            if let Some(g) = consfree::match_pattern(&r.lhs, s) {
                out.push(t.replace_at(&p, r.rhs.subst(&g)));
            }
        }
        if let TermKind::App([f, a]) = s.kind() {
            if let Some(b) = f.instantiate_abs(a) {
                out.push(t.replace_at(&p, b));
            }
        }
    }
    out
}

fn random_walk(afs: &Afs, start: Term, choices: &[usize]) -> Vec<Term> {
    let mut path = vec![start];
    for c in choices {
        let r = one_step_reducts(afs, path.last().unwrap());
        if r.is_empty() {
            break;
        }
        path.push(r[c % r.len()].clone());
    }
    path
}

fn word(alphabet: &'static [char], max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(alphabet), 0..=max)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reducts_match_naive_enumeration(w in word(&['0', '1', '#', '?'], 6), choices in prop::collection::vec(0usize..100, 0..15)) {
        let sat = corpus::load("sat");
        let start = consfree::rewrite::decide_term(&sat, &w).unwrap();
        for t in random_walk(&sat, start, &choices) {
            prop_assume!(t.size() <= 50);
            let fast = one_step_reducts(&sat, &t);
            let slow = naive_reducts(&sat, &t);
            for u in &fast {
                prop_assert!(slow.contains(u));
            }
            for u in &slow {
                prop_assert!(fast.contains(u));
            }
        }
    }

    #[test]
    fn higher_order_reducts_match_naive(w in word(&['0', '1'], 4), choices in prop::collection::vec(0usize..100, 0..20)) {
        let hc = corpus::load("hocount");
        let start = t(&hc, &format!("succ(\\y. false, {})", enc(&w)));
        for t in random_walk(&hc, start, &choices) {
            let fast = one_step_reducts(&hc, &t);
            let slow = naive_reducts(&hc, &t);
            prop_assert_eq!(fast.len(), { let mut s = slow.clone(); s.dedup_by(|a, b| a == b); let mut u: Vec<Term> = Vec::new(); for x in s { if !u.contains(&x) { u.push(x) } } u.len() });
            for u in &fast {
                prop_assert!(slow.contains(u));
            }
        }
    }

    #[test]
    fn data_normal_forms_are_data_and_normal(w in word(&['0', '1'], 4)) {
        let pal = corpus::load("palindrome");
        let start = consfree::rewrite::decide_term(&pal, &w).unwrap();
        let res = search_data_normal_forms(&pal, &start, SearchBudget::default());
        prop_assert!(res.exhausted);
        for d in &res.data_normal_forms {
            prop_assert!(pal.is_data(d));
            prop_assert!(one_step_reducts(&pal, d).is_empty());
        }
    }

    #[test]
    fn larger_budgets_never_lose_normal_forms(w in word(&['0', '1', '#', '?'], 5), small in 1usize..200) {
        let sat = corpus::load("sat");
        let start = consfree::rewrite::decide_term(&sat, &w).unwrap();
        let a = search_data_normal_forms(&sat, &start, SearchBudget::new(small, 10_000));
        let b = search_data_normal_forms(&sat, &start, SearchBudget::new(small * 10, 10_000));
        for d in &a.data_normal_forms {
            prop_assert!(b.data_normal_forms.contains(d));
        }
        let c = search_data_normal_forms(&sat, &start, SearchBudget::new(small, 10_000));
        prop_assert_eq!(a.data_normal_forms, c.data_normal_forms);
        prop_assert_eq!(a.visited, c.visited);
    }

    #[test]
    fn orders_agree_when_exhausted(w in word(&['0', '1', '#', '?'], 5)) {
        let sat = corpus::load("sat");
        let start = consfree::rewrite::decide_term(&sat, &w).unwrap();
        let budget = SearchBudget::new(50_000, 10_000);
        let a = search_ordered(&sat, &start, budget, SearchOrder::BreadthFirst, |_| false);
        let b = search_ordered(&sat, &start, budget, SearchOrder::SmallestFirst, |_| false);
        prop_assume!(a.exhausted);
        prop_assert!(b.exhausted);
        prop_assert_eq!(a.visited, b.visited);
        let mut x: Vec<String> = a.data_normal_forms.iter().map(|t| t.to_string()).collect();
        let mut y: Vec<String> = b.data_normal_forms.iter().map(|t| t.to_string()).collect();
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn reduction_preserves_b_safety(w in word(&['0', '1', '#', '?'], 6), choices in prop::collection::vec(0usize..1000, 0..20)) {
        let sat = corpus::load("sat");
        let start = consfree::rewrite::decide_term(&sat, &w).unwrap();
        let b = compute_b(&sat, &start).unwrap();
        for t in random_walk(&sat, start, &choices) {
            prop_assert!(is_b_safe(&sat, &t, &b), "{}", t);
        }
    }
}
