use consfree::analysis::{
    compute_b, is_b_safe, prune_functional_constructors, validate, DataSet, Status,
};
use consfree::corpus;
use consfree::syntax::{parse_afs, parse_term};
use consfree::{Afs, Term};
use proptest::prelude::*;

fn t(afs: &Afs, src: &str) -> Term {
    parse_term(src, afs.signature(), &[]).unwrap()
}

fn printed(b: &DataSet) -> Vec<String> {
    let mut v: Vec<String> = b.terms().iter().map(|t| t.to_string()).collect();
    v.sort();
    v
}

fn sorted(xs: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
    v.sort();
    v
}

#[test]
fn count_is_not_cons_free_due_to_b_and_c() {
    let r = validate(&corpus::load("count"));
    assert_eq!(r.constructor_system.status, Status::Pass);
    assert_eq!(r.left_linear.status, Status::Pass);
    assert_eq!(r.cons_free.status, Status::Fail);
    let w: Vec<(usize, &str)> = r
        .cons_free
        .witnesses
        .iter()
        .map(|w| (w.rule_index, w.subterm.as_str()))
        .collect();
    assert_eq!(w, vec![(1, "1(xs)"), (2, "0(succ(xs))")]);
}

#[test]
fn constructor_headed_rule_breaks_constructor_system() {
    let afs = corpus::load("count_bad");
    let r = validate(&afs);
    assert_eq!(r.constructor_system.status, Status::Fail);
    assert_eq!(r.constructor_system.witnesses[0].subterm, "0(xs)");
    assert_eq!(r.cons_free.status, Status::NotApplicable);
    assert!(r.notes.iter().any(|n| n.contains("symbol 0 heads a rule")));
}

#[test]
fn cons_free_corpus_passes() {
    for name in ["palindrome", "sat", "hocount"] {
        let r = validate(&corpus::load(name));
        assert!(r.is_cons_free_system(), "{name}: {}", r.render());
    }
}

#[test]
fn nonlinear_simulator_fails_left_linearity() {
    let r = validate(&corpus::load("nonlinear_tm"));
    assert_eq!(r.constructor_system.status, Status::Pass);
    assert_eq!(r.left_linear.status, Status::Fail);
    assert!(r
        .left_linear
        .witnesses
        .iter()
        .any(|w| w.subterm == "equal(xl, xl)"));
    assert!(r
        .left_linear
        .witnesses
        .iter()
        .any(|w| w.subterm.starts_with("shift1(")));
    assert_eq!(r.cons_free.status, Status::NotApplicable);
}

#[test]
fn binders_are_not_lhs_subterms() {
    // λx.0(x) mentions a bound x, not the lhs variable x
    let afs = parse_afs(
        "sort s, b; cons 0 : [s] => s; cons e : s; def f : [s x (s -> s)] => b;
         def g : [s] => b; rule g(0(x)) -> f(x, \\x. 0(x));",
    )
    .unwrap();
    let r = validate(&afs);
    assert_eq!(r.cons_free.status, Status::Fail);
    assert_eq!(r.cons_free.witnesses[0].subterm, "0(x')");
}

#[test]
fn validation_is_deterministic_and_renders() {
    let afs = corpus::load("count");
    let a = validate(&afs);
    let b = validate(&afs);
    assert_eq!(a, b);
    assert_eq!(a.render(), b.render());
    let recs = a.render_records();
    assert_eq!(recs.lines().count(), 3 + 2);
    for line in recs.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("check").is_some());
    }
}

#[test]
fn compute_b_examples() {
    let pal = corpus::load("palindrome");
    let b = compute_b(&pal, &t(&pal, "decide(1(0(|>)))")).unwrap();
    assert_eq!(
        printed(&b),
        sorted(&["1(0(|>))", "0(|>)", "|>", "true", "false"])
    );

    let sat = corpus::load("sat");
    let b = compute_b(&sat, &t(&sat, "decide(1('#'(|>)))")).unwrap();
    assert_eq!(
        printed(&b),
        sorted(&["1('#'(|>))", "'#'(|>)", "|>", "true", "false"])
    );

    let plain =
        parse_afs("sort string; cons |> : string; def f : [string] => string; rule f(x) -> x;")
            .unwrap();
    let b = compute_b(&plain, &t(&plain, "f(|>)")).unwrap();
    assert_eq!(printed(&b), sorted(&["|>"]));

    assert!(compute_b(&pal, &t(&pal, "1(|>)")).is_err());
    assert!(compute_b(&pal, &t(&pal, "and(and(true, true), true)")).is_err());
}

#[test]
fn canonical_order_is_sort_then_size() {
    let pal = corpus::load("palindrome");
    let b = compute_b(&pal, &t(&pal, "decide(1(0(|>)))")).unwrap();
    let names: Vec<String> = b.terms().iter().map(|t| t.to_string()).collect();
    assert!(names[..2].iter().all(|n| n == "true" || n == "false"));
    assert_eq!(names[2..], ["|>", "0(|>)", "1(0(|>))"]);
}

#[test]
fn b_safety_examples() {
    let pal = corpus::load("palindrome");
    let b = compute_b(&pal, &t(&pal, "decide(1(0(|>)))")).unwrap();
    assert!(is_b_safe(&pal, &t(&pal, "true"), &b));
    assert!(!is_b_safe(&pal, &t(&pal, "0(1(|>))"), &b));

    let sat = corpus::load("sat");
    let b = compute_b(&sat, &t(&sat, "decide(1('?'('#'(|>))))")).unwrap();
    assert!(is_b_safe(
        &sat,
        &t(&sat, "main(either(1('?'('#'(|>))), |>), |>, '?'('#'(|>)))"),
        &b
    ));
    assert!(!is_b_safe(
        &sat,
        &t(&sat, "main(either(0('?'('#'(|>))), |>), |>, '?'('#'(|>)))"),
        &b
    ));
}

#[test]
fn prune_examples() {
    let afs = parse_afs(
        "sort string, bool; cons true, false : bool; cons |> : string;
         cons wrap : [bool -> bool] => string; def f : [string] => string; def g : [string] => bool;
         rule f(x) -> wrap(\\y. y); rule g(x) -> true;",
    )
    .unwrap();
    let (pruned, removed) = prune_functional_constructors(&afs);
    assert_eq!(removed, vec!["wrap".to_string()]);
    assert!(pruned.symbol("wrap").is_none());
    assert_eq!(pruned.rules().len(), 1);
    assert_eq!(pruned.rules()[0].to_string(), "g(x) -> true");

    for name in ["palindrome", "sat"] {
        let afs = corpus::load(name);
        let (p, removed) = prune_functional_constructors(&afs);
        assert!(removed.is_empty());
        assert_eq!(p.rules().len(), afs.rules().len());
    }
}

fn bits(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::bool::ANY, 0..=max)
        .prop_map(|v| v.iter().map(|b| if *b { '1' } else { '0' }).collect())
}

proptest! {
    #[test]
    fn b_is_subterm_closed_and_linear(word in bits(8)) {
        let pal = corpus::load("palindrome");
        let s = Term::fun(pal.decide_symbol().unwrap(), vec![pal.encode_input(&word).unwrap()]).unwrap();
        let b = compute_b(&pal, &s).unwrap();
        for d in b.terms() {
            prop_assert!(pal.is_data(d));
            for u in d.subterms() {
                prop_assert!(b.contains(&u));
            }
        }
        // the input's suffixes plus the two booleans
        prop_assert_eq!(b.len(), word.len() + 1 + 2);
        prop_assert!(b.len() as u32 <= s.size() + 2);
    }
}
