use consfree::analysis::{validate, Status};
use consfree::compiler::{
    apply_op, base_module, compile, data_normal_forms, exp_module, numinterpret_oracle,
    power_module, product_module, representation, seed_terms, zero_term, BoundExpr, CountingModule,
    Op, OracleBudget,
};
use consfree::corpus;
use consfree::rewrite::{search_data_normal_forms, SearchBudget};
use consfree::saturation::{decide_by_saturation, SaturationOptions};
use consfree::syntax::{parse_afs, parse_term_as};
use consfree::tm::{tm_run, Outcome, TuringMachine};
use consfree::{Afs, Term};

fn standalone(m: &CountingModule) -> Afs {
    parse_afs(&m.standalone_source()).unwrap_or_else(|e| panic!("{e}\n{}", m.standalone_source()))
}

fn cs(afs: &Afs, w: &str) -> Term {
    afs.encode_input(w).unwrap()
}

fn words(max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=max {
        for bits in 0..1u32 << n {
            out.push(
                (0..n)
                    .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
                    .collect(),
            );
        }
    }
    out
}

#[test]
fn modules_are_cons_free() {
    let b = base_module();
    for m in [
        b.clone(),
        product_module(b.clone(), b.clone()),
        exp_module(b.clone()),
        power_module(2, 2),
    ] {
        let afs = standalone(&m);
        let r = validate(&afs);
        assert!(r.is_cons_free_system(), "{}", r.render());
        assert_eq!(afs.order(), m.order(), "{}", m.bound());
    }
}

#[test]
fn bounds() {
    assert_eq!(power_module(1, 1), base_module());
    assert_eq!(power_module(1, 1).bound(), BoundExpr::Base);
    for n in 1..5 {
        assert_eq!(power_module(1, 2).bound().eval(n), Some(1 << (2 * (n + 1))));
        assert_eq!(
            power_module(2, 1).bound().eval(n),
            Some(1 << (1 << (n + 1)))
        );
    }
    assert_eq!(power_module(2, 1).order(), 2);
    assert_eq!(power_module(3, 1).bound().eval(1), Some(1 << 16));
    assert_eq!(power_module(3, 1).bound().eval(3), None);
}

#[test]
fn product_names_are_disjoint() {
    let m = product_module(base_module(), base_module());
    let names: Vec<String> = m.decls().into_iter().map(|(n, _)| n).collect();
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), names.len());
    assert!(names.contains(&"zero@e_l".to_string()) && names.contains(&"zero@e_r".to_string()));
    assert_eq!(m.zero(), "zero@p");
}

fn seed(afs: &Afs, m: &CountingModule, w: &str) -> Vec<Term> {
    let tys = m.types();
    let cst = cs(afs, w).to_string();
    (1..=tys.len())
        .map(|i| {
            let (taus, _) = tys[i - 1].uncurry();
            let ys: Vec<String> = (0..taus.len()).map(|j| format!("y{j}")).collect();
            let mut args = vec![cst.clone()];
            args.extend(ys.iter().cloned());
            let body = format!("{}({})", m.seed(i), args.join(", "));
            let src = ys.iter().rev().fold(body, |b, y| format!("\\{y}. {b}"));
            parse_term_as(&src, afs.signature(), &[], &tys[i - 1]).unwrap()
        })
        .collect()
}

#[test]
fn base_examples() {
    let m = base_module();
    let afs = standalone(&m);
    let b = OracleBudget::default();
    let c = cs(&afs, "10");
    assert_eq!(
        numinterpret_oracle(&afs, &m, &c, &seed(&afs, &m, "10"), b),
        Some(7)
    );
    let bot: Term = parse_term_as("bot@e", afs.signature(), &[], &m.types()[0]).unwrap();
    let ones = representation(&afs, &m, &c, 7).unwrap();
    assert_eq!(
        numinterpret_oracle(&afs, &m, &c, &[bot.clone(), ones[0].clone()], b),
        Some(0)
    );
    assert_eq!(
        numinterpret_oracle(&afs, &m, &c, &[bot.clone(), bot], b),
        None
    );

    let zero = parse_term_as(
        "zero@e(1(0(|>)), seed1@e(1(0(|>))), seed2@e(1(0(|>))))",
        afs.signature(),
        &[],
        &"bool".parse_type(),
    )
    .unwrap();
    let nfs = search_data_normal_forms(&afs, &zero, SearchBudget::default());
    assert!(nfs.exhausted);
    assert_eq!(
        nfs.data_normal_forms
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>(),
        vec!["false"]
    );
}

trait ParseType {
    fn parse_type(&self) -> consfree::Type;
}

impl ParseType for str {
    fn parse_type(&self) -> consfree::Type {
        consfree::syntax::parse_type(self).unwrap()
    }
}

#[test]
fn compiled_parity_validates() {
    let tm = TuringMachine::parse(corpus::PARITY_TM).unwrap();
    let c = compile(&tm, &power_module(1, 1)).unwrap();
    let r = validate(&c.afs);
    assert!(r.is_cons_free_system(), "{}", r.render());
    assert_eq!(r.cons_free.status, Status::Pass);
    assert_eq!(c.afs.order(), 1);
    assert_eq!(c.tuple_arity, 2);
}

#[test]
fn compiled_parity_agrees_with_the_machine() {
    let tm = TuringMachine::parse(corpus::PARITY_TM).unwrap();
    let c = compile(&tm, &power_module(1, 1)).unwrap();
    for w in words(3) {
        let expect = tm_run(&tm, &w, 100).unwrap().outcome == Outcome::Accept;
        let got = decide_by_saturation(&c.afs, &w, &SaturationOptions::default()).unwrap();
        assert_eq!(got, expect, "{w}");
    }
}

fn zero_value(afs: &Afs, m: &CountingModule, c: &Term, t: &Term, b: OracleBudget) -> Option<bool> {
    let names: Vec<String> = data_normal_forms(afs, m, c, t, b)?
        .iter()
        .map(|t| t.to_string())
        .collect();
    match names.as_slice() {
        [b] if b == "true" => Some(true),
        [b] if b == "false" => Some(false),
        _ => None,
    }
}

/// Checks every operation on every representable number; returns the
/// first violated law.
fn check_laws(m: &CountingModule, w: &str, b: OracleBudget) -> Result<(), String> {
    let afs = standalone(m);
    let c = cs(&afs, w);
    let p = m.bound().eval(w.len() as u32).unwrap();
    let read = |xs: &[Term]| numinterpret_oracle(&afs, m, &c, xs, b);
    let seed = seed_terms(&afs, m, &c).unwrap();
    if read(&seed) != Some(p - 1) {
        return Err(format!("seed reads {:?}", read(&seed)));
    }
    for v in 0..p {
        let x = representation(&afs, m, &c, v).unwrap();
        if read(&x) != Some(v) {
            return Err(format!("representation of {v} reads {:?}", read(&x)));
        }
        for (op, want) in [
            (Op::Pred, v.saturating_sub(1)),
            (Op::Suc, (v + 1).min(p - 1)),
            (Op::Inv, p - 1 - v),
        ] {
            let y = apply_op(&afs, m, op, &c, &x).unwrap();
            if read(&y) != Some(want) {
                return Err(format!("{op:?} {v} reads {:?}, want {want}", read(&y)));
            }
        }
        let z = zero_term(&afs, m, &c, &x).unwrap();
        if zero_value(&afs, m, &c, &z, b) != Some(v == 0) {
            return Err(format!(
                "zero {v} gives {:?}",
                zero_value(&afs, m, &c, &z, b)
            ));
        }
    }
    Ok(())
}

#[test]
fn base_laws() {
    for w in words(2) {
        check_laws(&base_module(), &w, OracleBudget::default()).unwrap();
    }
}

/// Where plain reduction search finishes, it reads the same values as the
/// saturation-backed oracle.
#[test]
fn oracle_routes_agree() {
    let m = base_module();
    let afs = standalone(&m);
    let mut compared = 0;
    for w in words(1) {
        let c = cs(&afs, &w);
        for v in 0..m.bound().eval(1).unwrap() {
            let x = representation(&afs, &m, &c, v).unwrap();
            for op in [Op::Pred, Op::Suc, Op::Inv] {
                let y = apply_op(&afs, &m, op, &c, &x).unwrap();
                let small = OracleBudget {
                    search: SearchBudget::new(100_000, 10_000),
                    ..OracleBudget::search()
                };
                if let Some(by_search) = numinterpret_oracle(&afs, &m, &c, &y, small) {
                    assert_eq!(
                        Some(by_search),
                        numinterpret_oracle(&afs, &m, &c, &y, OracleBudget::default()),
                        "{w} {op:?} {v}"
                    );
                    compared += 1;
                }
            }
        }
    }
    assert!(compared >= 8, "{compared}");
}

#[test]
fn product_laws() {
    let b = base_module();
    check_laws(&product_module(b.clone(), b), "1", OracleBudget::default()).unwrap();
}

#[test]
fn exp_laws() {
    check_laws(&exp_module(base_module()), "1", OracleBudget::default()).unwrap();
}
