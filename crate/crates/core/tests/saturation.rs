use consfree::analysis::compute_b;
use consfree::corpus;
use consfree::rewrite::{decide_term, search_data_normal_forms, SearchBudget};
use consfree::saturation::{
    decide_by_saturation, enumerate_domain, saturate, Engine, Model, SaturationError,
    SaturationOptions, Value,
};
use consfree::syntax::{parse_afs, parse_term, parse_type};
use consfree::{Afs, Sort, Term, Type};
use proptest::prelude::*;

fn t(afs: &Afs, src: &str) -> Term {
    parse_term(src, afs.signature(), &[]).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn opts(engine: Engine) -> SaturationOptions {
    SaturationOptions {
        engine,
        ..Default::default()
    }
}

/// Even number of 1s, through a functional accumulator.
const HO_PARITY: &str = "
sort string, bool;
cons true, false : bool;
cons 0, 1 : [string] => string;
cons |> : string;
def decide : [string] => bool;
def not : [bool] => bool;
def iter : [(bool -> bool) x string x bool] => bool;
def twice : [(bool -> bool) x bool] => bool;
rule not(true) -> false;
rule not(false) -> true;
rule decide(cs) -> iter(\\b. not(b), cs, true);
rule iter(F, |>, b) -> b;
rule iter(F, 0(xs), b) -> iter(\\c. F twice(F, c), xs, b);
rule iter(F, 1(xs), b) -> F iter(F, xs, b);
rule twice(F, b) -> F (F b);
";

#[test]
fn palindrome_example_numbers() {
    let pal = corpus::load("palindrome");
    let start = t(&pal, "decide(1(0(|>)))");
    let sat = saturate(&pal, &start, &opts(Engine::Dense)).unwrap();
    let st = &sat.stats;
    assert_eq!(st.engine, Engine::Dense);
    assert_eq!(st.data_size, 5);
    let card = |name: &str| st.types.iter().find(|x| x.ty == Type::sort(name)).unwrap();
    assert_eq!(card("bool").enumerated, Some(4));
    assert_eq!(card("string").enumerated, Some(8));
    assert_eq!(st.statements, Some(432));
    assert_eq!(sat.normal_forms, vec![t(&pal, "false")]);
    assert!(st.truth_counts.windows(2).all(|w| w[0] <= w[1]));
    assert!(st.iterations as u128 <= 432 + 2);
    assert!(st.types.iter().all(|x| x.within_bound == Some(true)));
}

#[test]
fn first_iteration_confirms_chk1() {
    let pal = corpus::load("palindrome");
    let start = t(&pal, "decide(1(0(|>)))");
    let b = compute_b(&pal, &start).unwrap();
    let mut m = Model::new(&pal, b, 1 << 20).unwrap();
    let u = m.universe_mut();
    let a = u
        .set_of(&Sort::new("string"), &[t(&pal, "1(0(|>))")])
        .unwrap();
    let bb = u
        .set_of(&Sort::new("string"), &[t(&pal, "0(|>)"), t(&pal, "|>")])
        .unwrap();
    let one = u.singleton(u.data().index_of(&t(&pal, "1(0(|>))")).unwrap());
    m.prepare(Engine::Dense, "decide", &[one], None).unwrap();
    let tt = t(&pal, "true");
    let holds = |m: &Model| {
        m.universe()
            .members(m.confirmed("chk1", &[a, bb]).unwrap())
            .unwrap()
            .contains(&tt)
    };
    assert!(!holds(&m));
    // level 0: nothing confirmed, so the first rule's recursive call contributes nothing
    let rec = t(&pal, "chk1(0(|>), |>)");
    let e = m.nf_eval(&rec, &[]).unwrap();
    assert_eq!(m.universe().members(e).unwrap(), vec![]);
    assert!(m.step().unwrap());
    assert_eq!(m.level(), 1);
    assert!(holds(&m));
}

#[test]
fn nf_eval_cases() {
    let hc = corpus::load("hocount");
    let start = t(&hc, "not(true)");
    let b = compute_b(&hc, &start).unwrap();
    let mut m = Model::new(&hc, b, 1 << 20).unwrap();
    let e = m.nf_eval(&t(&hc, "true"), &[]).unwrap();
    assert_eq!(m.universe().value(e), Value::Set(vec![t(&hc, "true")]));
    let e = m.nf_eval(&t(&hc, "\\x:string. false"), &[]).unwrap();
    match m.universe().value(e) {
        Value::Fun(images) => {
            assert_eq!(images.len(), 2); // B has only |> at sort string
            assert!(images
                .iter()
                .all(|v| *v == Value::Set(vec![t(&hc, "false")])));
        }
        v => panic!("{v}"),
    }
    let x = consfree::Var::new("x", Type::sort("bool"));
    let xs = m
        .universe_mut()
        .set_of(&Sort::new("bool"), &[t(&hc, "true"), t(&hc, "false")])
        .unwrap();
    let e = m
        .nf_eval(&Term::var(x.clone()), &[(x.clone(), xs)])
        .unwrap();
    assert_eq!(e, xs);
    assert!(matches!(
        m.nf_eval(&Term::var(x), &[]),
        Err(SaturationError::UnboundVariable(_))
    ));
    assert!(matches!(
        m.nf_eval(&t(&hc, "0(0(|>))"), &[]),
        Err(SaturationError::NotBSafe(_))
    ));
}

#[test]
fn domain_enumeration() {
    let pal = corpus::load("palindrome");
    let b = compute_b(&pal, &t(&pal, "decide(1(0(|>)))")).unwrap();
    let bools = enumerate_domain(&Type::sort("bool"), &b, 1 << 20).unwrap();
    assert_eq!(bools.len(), 4);
    let sets: Vec<Vec<String>> = bools
        .iter()
        .map(|v| match v {
            Value::Set(ts) => {
                let mut s: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                s.sort();
                s
            }
            v => panic!("{v}"),
        })
        .collect();
    for want in [vec![], vec!["true"], vec!["false"], vec!["false", "true"]] {
        assert!(sets.contains(&want.iter().map(|s| s.to_string()).collect()));
    }
    assert_eq!(
        enumerate_domain(&Type::sort("string"), &b, 1 << 20)
            .unwrap()
            .len(),
        8
    );
    let f = parse_type("string -> bool").unwrap();
    assert_eq!(
        enumerate_domain(&f, &b, 1 << 20).unwrap().len(),
        4usize.pow(8)
    );
    let g = parse_type("(string -> bool) -> bool").unwrap();
    assert!(matches!(
        enumerate_domain(&g, &b, 1 << 20),
        Err(SaturationError::DomainTooLarge { .. })
    ));
    assert!(matches!(
        enumerate_domain(&Type::sort("string"), &b, 7),
        Err(SaturationError::DomainTooLarge { .. })
    ));
}

#[test]
fn cap_is_enforced_in_dense_runs() {
    let pal = corpus::load("palindrome");
    let start = t(&pal, "decide(1(0(|>)))");
    let o = SaturationOptions {
        cap: 4,
        engine: Engine::Dense,
        order_seed: None,
    };
    assert!(matches!(
        saturate(&pal, &start, &o),
        Err(SaturationError::DomainTooLarge { .. })
    ));
    // first-order demand-driven runs never enumerate a domain
    let o = SaturationOptions {
        cap: 4,
        engine: Engine::Demand,
        order_seed: None,
    };
    assert_eq!(
        saturate(&pal, &start, &o).unwrap().normal_forms,
        vec![t(&pal, "false")]
    );
}

#[test]
fn decide_examples() {
    let sat = corpus::load("sat");
    let o = SaturationOptions::default();
    assert!(decide_by_saturation(&sat, "11?#000#?11#", &o).unwrap());
    assert!(decide_by_saturation(&sat, "10?#?10#", &o).unwrap());
    assert!(!decide_by_saturation(&sat, "1#0#", &o).unwrap());
    let pal = corpus::load("palindrome");
    assert!(decide_by_saturation(&pal, "11", &o).unwrap());
    assert!(!decide_by_saturation(&pal, "10", &o).unwrap());
}

#[test]
fn rejects_systems_that_are_not_cons_free() {
    let count = corpus::load("count");
    let start = t(&count, "succ(1(|>))");
    assert!(matches!(
        saturate(&count, &start, &SaturationOptions::default()),
        Err(SaturationError::NotConsFree(_))
    ));
    let pal = corpus::load("palindrome");
    assert!(matches!(
        saturate(
            &pal,
            &t(&pal, "and(and(true, true), true)"),
            &SaturationOptions::default()
        ),
        Err(SaturationError::NotBasic(_))
    ));
}

#[test]
fn symbols_without_rules_have_no_normal_forms() {
    let afs = parse_afs("sort s; cons c : s; def f : [s] => s;").unwrap();
    let sat = saturate(&afs, &t(&afs, "f(c)"), &SaturationOptions::default()).unwrap();
    assert!(sat.normal_forms.is_empty());
}

#[test]
fn higher_order_agrees_with_search() {
    let afs = parse_afs(HO_PARITY).unwrap();
    for w in ["", "1", "0", "11", "10", "011", "0110", "1011"] {
        let ones = w.chars().filter(|&c| c == '1').count();
        assert_eq!(
            decide_by_saturation(&afs, w, &SaturationOptions::default()).unwrap(),
            ones % 2 == 0
        );
    }
    for w in ["", "1", "0", "11", "10", "011"] {
        let start = decide_term(&afs, w).unwrap();
        let res = search_data_normal_forms(&afs, &start, SearchBudget::default());
        assert!(res.exhausted, "{w}");
        for engine in [Engine::Dense, Engine::Demand] {
            let sat = saturate(&afs, &start, &opts(engine)).unwrap();
            let mut got = sat.normal_forms.clone();
            let mut want = res.data_normal_forms.clone();
            got.sort_by_key(|t| t.to_string());
            want.sort_by_key(|t| t.to_string());
            assert_eq!(got, want, "{w} {engine}");
            assert!(
                sat.stats.types.iter().all(|x| x.within_bound == Some(true)),
                "{}",
                sat.stats
            );
        }
    }
}

#[test]
fn stats_render() {
    let pal = corpus::load("palindrome");
    let sat = saturate(
        &pal,
        &t(&pal, "decide(0(|>))"),
        &SaturationOptions::default(),
    )
    .unwrap();
    let text = sat.stats.to_string();
    assert!(text.contains("|B| = 4"), "{text}");
    assert!(text.contains("statements:"));
    assert!(text.contains("iterations:"));
}

fn sorted(mut v: Vec<Term>) -> Vec<String> {
    let mut s: Vec<String> = v.drain(..).map(|t| t.to_string()).collect();
    s.sort();
    s
}

fn bits(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(&['0', '1'][..]), 0..=max)
        .prop_map(|v| v.into_iter().collect())
}

fn sat_word() -> impl Strategy<Value = String> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(&['0', '1', '?'][..]), n),
            m,
        )
        .prop_map(|cs| {
            cs.into_iter()
                .map(|c| c.into_iter().collect::<String>() + "#")
                .collect::<String>()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engines_agree_with_search(w in bits(4)) {
        let pal = corpus::load("palindrome");
        let start = decide_term(&pal, &w).unwrap();
        let res = search_data_normal_forms(&pal, &start, SearchBudget::default());
        prop_assert!(res.exhausted);
        let dense = saturate(&pal, &start, &opts(Engine::Dense)).unwrap();
        let demand = saturate(&pal, &start, &opts(Engine::Demand)).unwrap();
        prop_assert_eq!(sorted(dense.normal_forms.clone()), sorted(res.data_normal_forms.clone()));
        prop_assert_eq!(sorted(demand.normal_forms.clone()), sorted(res.data_normal_forms));
        let c = &dense.stats.truth_counts;
        prop_assert!(c.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(dense.stats.iterations as u128 <= dense.stats.statements.unwrap() + 2);
    }

    #[test]
    fn sat_saturation_contains_search_results(w in sat_word()) {
        let sat = corpus::load("sat");
        let start = decide_term(&sat, &w).unwrap();
        let res = search_data_normal_forms(&sat, &start, SearchBudget::new(3_000, 10_000));
        let s = saturate(&sat, &start, &SaturationOptions::default()).unwrap();
        for d in &res.data_normal_forms {
            prop_assert!(s.normal_forms.contains(d));
        }
        if res.exhausted {
            prop_assert_eq!(sorted(s.normal_forms), sorted(res.data_normal_forms));
        }
    }

    #[test]
    fn evaluation_order_is_irrelevant(w in bits(3), seed in any::<u64>()) {
        let afs = parse_afs(HO_PARITY).unwrap();
        let start = decide_term(&afs, &w).unwrap();
        for engine in [Engine::Dense, Engine::Demand] {
            let a = saturate(&afs, &start, &opts(engine)).unwrap();
            let o = SaturationOptions { order_seed: Some(seed), ..opts(engine) };
            let b = saturate(&afs, &start, &o).unwrap();
            prop_assert_eq!(sorted(a.normal_forms), sorted(b.normal_forms));
            prop_assert_eq!(a.stats.truth_counts, b.stats.truth_counts);
        }
    }
}
