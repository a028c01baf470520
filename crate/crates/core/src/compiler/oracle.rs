//! Reads the number a tuple stands for from the data normal forms of
//! base-type queries.

use super::{CountingModule, Fresh, Shape};
use crate::afs::Afs;
use crate::rewrite::{search_data_normal_forms, SearchBudget};
use crate::saturation::{saturate_all, SaturationOptions};
use crate::syntax::{parse_afs, parse_term_as};
use crate::term::{quote_name, Term};

/// How the oracle finds the data normal forms of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluator {
    /// Breadth-first search over all reducts. Exact but exponential in the
    /// number of independent redexes.
    Search,
    /// Saturation of a one-rule wrapper `probe(cs) -> t` over the module.
    Saturation,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub evaluator: Evaluator,
    pub search: SearchBudget,
}

impl Default for OracleBudget {
    fn default() -> OracleBudget {
        OracleBudget {
            evaluator: Evaluator::Saturation,
            search: SearchBudget::new(2_000_000, 10_000),
        }
    }
}

impl OracleBudget {
    pub fn search() -> OracleBudget {
        OracleBudget {
            evaluator: Evaluator::Search,
            ..OracleBudget::default()
        }
    }
}

/// Data normal forms of the base-type term `t`, or `None` when the
/// evaluator gives up.
pub fn data_normal_forms(
    afs: &Afs,
    module: &CountingModule,
    cs: &Term,
    t: &Term,
    budget: OracleBudget,
) -> Option<Vec<Term>> {
    data_normal_forms_all(afs, module, cs, std::slice::from_ref(t), budget)?.pop()
}

/// [`data_normal_forms`] of several terms; the saturation evaluator shares
/// one table between them.
pub fn data_normal_forms_all(
    afs: &Afs,
    module: &CountingModule,
    cs: &Term,
    ts: &[Term],
    budget: OracleBudget,
) -> Option<Vec<Vec<Term>>> {
    match budget.evaluator {
        Evaluator::Search => ts
            .iter()
            .map(|t| {
                let r = search_data_normal_forms(afs, t, budget.search);
                r.exhausted.then_some(r.data_normal_forms)
            })
            .collect(),
        Evaluator::Saturation => {
            let (probe, starts) = probe_system(module, cs, ts)?;
            let forms = saturate_all(&probe, &starts, &SaturationOptions::default()).ok()?;
            forms
                .iter()
                .zip(ts)
                .map(|(ds, t)| {
                    ds.iter()
                        .map(|d| parse_term_as(&d.to_string(), afs.signature(), &[], t.ty()).ok())
                        .collect()
                })
                .collect()
        }
    }
}

/// The module extended with one rule `probe@o{j}(cs) -> t_j` per base-type
/// term, and the start terms `probe@o{j}(cs)`.
pub fn probe_system(module: &CountingModule, cs: &Term, ts: &[Term]) -> Option<(Afs, Vec<Term>)> {
    let cst = cs_text(cs);
    let mut src = module.standalone_source();
    for (j, t) in ts.iter().enumerate() {
        let t = t.beta_normalize();
        let (taus, out) = t.ty().uncurry();
        if !taus.is_empty() {
            return None;
        }
        src.push_str(&format!(
            "def probe@o{j} : [string] => {out};\nrule probe@o{j}({cst}) -> {t};\n"
        ));
    }
    let probe = parse_afs(&src).ok()?;
    let starts = ts
        .iter()
        .enumerate()
        .map(|(j, t)| {
            parse_term_as(
                &format!("probe@o{j}({cst})"),
                probe.signature(),
                &[],
                t.ty(),
            )
            .ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((probe, starts))
}

/// `cs, ..., |>`: the suffixes of the input, longest first.
fn suffixes(cs: &Term) -> Vec<Term> {
    let mut out = vec![cs.clone()];
    while let Some(c) = out.last().unwrap().children().first().cloned() {
        out.push(c);
    }
    out
}

fn input_length(cs: &Term) -> u32 {
    suffixes(cs).len() as u32 - 1
}

/// The value of `tuple` for input `cs` in `module`, whose rules are part of
/// `afs`; `None` when the tuple is not a representation of any number or
/// the reduction does not finish within budget.
pub fn numinterpret_oracle(
    afs: &Afs,
    module: &CountingModule,
    cs: &Term,
    tuple: &[Term],
    budget: OracleBudget,
) -> Option<u128> {
    interpret(afs, module, module, cs, tuple, budget)
}

fn interpret(
    afs: &Afs,
    root: &CountingModule,
    module: &CountingModule,
    cs: &Term,
    tuple: &[Term],
    budget: OracleBudget,
) -> Option<u128> {
    let qs = queries(afs, module, cs, tuple)?;
    let forms = data_normal_forms_all(afs, root, cs, &qs, budget)?;
    let mut forms = forms.into_iter();
    let value = decode(afs, module, cs, &mut forms)?;
    forms.next().is_none().then_some(value)
}

/// The base-type terms whose normal forms determine the value of `tuple`.
fn queries(afs: &Afs, module: &CountingModule, cs: &Term, tuple: &[Term]) -> Option<Vec<Term>> {
    if tuple.len() != module.arity() {
        return None;
    }
    match &module.shape {
        Shape::Base => Some(tuple.to_vec()),
        Shape::Product(l, r) => {
            let (u, v) = tuple.split_at(l.arity());
            let mut out = queries(afs, l, cs, u)?;
            out.extend(queries(afs, r, cs, v)?);
            Some(out)
        }
        Shape::Exp(c) => {
            let p = c.bound().eval(input_length(cs))?;
            (0..p)
                .map(|i| {
                    let ks = representation(afs, c, cs, i)?;
                    Term::apps(tuple[0].clone(), ks).ok()
                })
                .collect()
        }
    }
}

/// Reads the value from the normal forms of [`queries`], in order.
fn decode(
    afs: &Afs,
    module: &CountingModule,
    cs: &Term,
    forms: &mut impl Iterator<Item = Vec<Term>>,
) -> Option<u128> {
    match &module.shape {
        Shape::Base => {
            let spine = suffixes(cs);
            let (s, t) = (forms.next()?, forms.next()?);
            if s.iter().chain(&t).any(|q| !spine.contains(q)) {
                return None;
            }
            let mut value = 0u128;
            for (j, q) in spine.iter().enumerate() {
                match (s.contains(q), t.contains(q)) {
                    (true, false) => value |= 1 << j,
                    (false, true) => {}
                    _ => return None,
                }
            }
            Some(value)
        }
        Shape::Product(l, r) => {
            let q = r.bound().eval(input_length(cs))?;
            let hi = decode(afs, l, cs, forms)?;
            let lo = decode(afs, r, cs, forms)?;
            hi.checked_mul(q)?.checked_add(lo)
        }
        Shape::Exp(c) => {
            let p = c.bound().eval(input_length(cs))?;
            let (tt, ff) = (afs.symbol("true")?, afs.symbol("false")?);
            let (tt, ff) = (Term::constant(tt).ok()?, Term::constant(ff).ok()?);
            let mut value = 0u128;
            for i in 0..p {
                let nfs = forms.next()?;
                match (nfs.contains(&tt), nfs.contains(&ff)) {
                    (true, false) => value |= 1u128.checked_shl(u32::try_from(p - 1 - i).ok()?)?,
                    (false, true) => {}
                    _ => return None,
                }
            }
            Some(value)
        }
    }
}

/// Source text of the input term.
fn cs_text(cs: &Term) -> String {
    let spine = suffixes(cs);
    let mut out = "|>".to_string();
    for t in spine.iter().rev().skip(1) {
        out = format!(
            "{}({out})",
            quote_name(t.as_fun().expect("string constructor").0.name())
        );
    }
    out
}

fn rep_text(module: &CountingModule, fresh: &mut Fresh, cs: &Term, m: u128) -> Option<Vec<String>> {
    let n = input_length(cs);
    match &module.shape {
        Shape::Base => {
            let spine = suffixes(cs);
            let set = |bit: bool| {
                let mut t = module.name("bot");
                for (j, q) in spine.iter().enumerate() {
                    if (m >> j & 1 == 1) == bit {
                        t = format!("{}({}, {t})", module.name("either"), cs_text(q));
                    }
                }
                t
            };
            Some(vec![set(true), set(false)])
        }
        Shape::Product(l, r) => {
            let q = r.bound().eval(n)?;
            let mut out = rep_text(l, fresh, cs, m / q)?;
            out.extend(rep_text(r, fresh, cs, m % q)?);
            Some(out)
        }
        Shape::Exp(c) => {
            // Start from the all-zero vector and flip the set bits.
            let p = c.bound().eval(n)?;
            let cst = cs_text(cs);
            let seed = module.seed_tuple(fresh, &cst);
            let sig = module.types()[0].clone();
            let mut f =
                super::bracket(fresh, &module.inv(1), &[cst.clone(), seed[0].clone()], &sig);
            for i in 0..p {
                if m >> (p - 1 - i) & 1 == 1 {
                    let mut args = vec![cst.clone(), f];
                    args.extend(rep_text(c, fresh, cs, i)?);
                    f = super::bracket(fresh, &module.name("flip"), &args, &sig);
                }
            }
            Some(vec![f])
        }
    }
}

/// A small representation of `m` in `module` for input `cs`: explicit
/// subterm sets at the base, bit flips of the zero vector above it.
pub fn representation(afs: &Afs, module: &CountingModule, cs: &Term, m: u128) -> Option<Vec<Term>> {
    let texts = rep_text(module, &mut Fresh::default(), cs, m)?;
    texts
        .iter()
        .zip(module.types())
        .map(|(src, ty)| parse_term_as(src, afs.signature(), &[], &ty).ok())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Pred,
    Suc,
    Inv,
}

/// `f_i[cs, args]` for every component `i`, eta-expanded to the component type.
fn bracketed(
    afs: &Afs,
    module: &CountingModule,
    name: impl Fn(usize) -> String,
    cs: &Term,
    args: &[Term],
) -> Option<Vec<Term>> {
    module
        .types()
        .iter()
        .enumerate()
        .map(|(k, ty)| {
            let sym = afs.symbol(&name(k + 1))?;
            let (taus, _) = ty.uncurry();
            let ys: Vec<crate::term::Var> = taus
                .into_iter()
                .enumerate()
                .map(|(j, t)| crate::term::Var::new(&format!("y{}", j + 1), t))
                .collect();
            let mut all = vec![cs.clone()];
            all.extend(args.iter().cloned());
            all.extend(ys.iter().cloned().map(Term::var));
            Some(Term::lambdas(&ys, &Term::fun(sym, all).ok()?))
        })
        .collect()
}

/// The seed tuple of `module` for input `cs`, as terms.
pub fn seed_terms(afs: &Afs, module: &CountingModule, cs: &Term) -> Option<Vec<Term>> {
    bracketed(afs, module, |i| module.seed(i), cs, &[])
}

/// `op⃗[cs, xs]` as terms.
pub fn apply_op(
    afs: &Afs,
    module: &CountingModule,
    op: Op,
    cs: &Term,
    xs: &[Term],
) -> Option<Vec<Term>> {
    if xs.len() != module.arity() {
        return None;
    }
    let name = |i| match op {
        Op::Pred => module.pred(i),
        Op::Suc => module.suc(i),
        Op::Inv => module.inv(i),
    };
    bracketed(afs, module, name, cs, xs)
}

/// `zero[cs, xs]` as a term.
pub fn zero_term(afs: &Afs, module: &CountingModule, cs: &Term, xs: &[Term]) -> Option<Term> {
    let mut all = vec![cs.clone()];
    all.extend(xs.iter().cloned());
    Term::fun(afs.symbol(&module.zero())?, all).ok()
}
