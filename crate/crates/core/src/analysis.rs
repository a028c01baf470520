//! Static checks on an AFS and the data-term set `B` of a start term.

use std::cmp::Ordering;
use std::fmt;

use indexmap::IndexSet;
use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::afs::Afs;
use crate::term::{Term, TermKind};
use crate::types::{Name, Sort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::NotApplicable => "not applicable",
        })
    }
}

/// One offending rule and subterm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rule_index: usize,
    pub rule: String,
    pub subterm: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub status: Status,
    pub witnesses: Vec<Witness>,
}

impl Check {
    fn from_witnesses(witnesses: Vec<Witness>) -> Check {
        let status = if witnesses.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
        Check { status, witnesses }
    }

    fn not_applicable() -> Check {
        Check {
            status: Status::NotApplicable,
            witnesses: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub constructor_system: Check,
    pub left_linear: Check,
    pub cons_free: Check,
    /// Constructors that take a functional argument; removable without
    /// changing the data normal forms of basic terms.
    pub prunable_constructors: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_cons_free_system(&self) -> bool {
        self.constructor_system.status == Status::Pass
            && self.left_linear.status == Status::Pass
            && self.cons_free.status == Status::Pass
    }

    /// Human-readable report, one line per check plus one per witness.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, c) in self.checks() {
            out.push_str(&format!("{name}: {}\n", c.status));
            for w in &c.witnesses {
                out.push_str(&format!(
                    "  rule {} `{}`: {} ({})\n",
                    w.rule_index, w.rule, w.subterm, w.reason
                ));
            }
        }
        if !self.prunable_constructors.is_empty() {
            out.push_str(&format!(
                "prunable constructors: {}\n",
                self.prunable_constructors.join(", ")
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }

    /// One JSON object per line: a record per check and a record per finding.
    pub fn render_records(&self) -> String {
        let mut out = String::new();
        for (name, c) in self.checks() {
            let rec = serde_json::json!({ "check": name, "status": c.status });
            out.push_str(&rec.to_string());
            out.push('\n');
            for w in &c.witnesses {
                let rec = serde_json::json!({
                    "check": name, "rule_index": w.rule_index, "rule": w.rule,
                    "subterm": w.subterm, "reason": w.reason,
                });
                out.push_str(&rec.to_string());
                out.push('\n');
            }
        }
        for n in &self.notes {
            out.push_str(&serde_json::json!({ "note": n }).to_string());
            out.push('\n');
        }
        out
    }

    fn checks(&self) -> [(&'static str, &Check); 3] {
        [
            ("constructor_system", &self.constructor_system),
            ("left_linear", &self.left_linear),
            ("cons_free", &self.cons_free),
        ]
    }
}

/// A constructor term without application or abstraction.
fn is_proper_constructor_term(afs: &Afs, t: &Term) -> bool {
    match t.kind() {
        TermKind::Var(_) => true,
        TermKind::Fun(f, args) => {
            afs.is_constructor(f) && args.iter().all(|a| is_proper_constructor_term(afs, a))
        }
        _ => false,
    }
}

/// Checks the constructor-system, left-linearity and cons-freeness conditions.
/// Cons-freeness is only evaluated when the first two hold.
pub fn validate(afs: &Afs) -> ValidationReport {
    let mut cs = Vec::new();
    let mut ll = Vec::new();
    let mut notes = afs.notes.clone();
    for (i, r) in afs.rules().iter().enumerate() {
        let (_, args) = r.lhs.as_fun().expect("rule lhs is a function application");
        for a in args.iter() {
            if !is_proper_constructor_term(afs, a) {
                cs.push(Witness {
                    rule_index: i,
                    rule: r.to_string(),
                    subterm: a.to_string(),
                    reason: "left-hand side argument is not a constructor term".into(),
                });
            }
            for s in a.subterms() {
                if let Some((f, xs)) = s.as_fun() {
                    if afs.is_constructor(f)
                        && xs
                            .iter()
                            .any(|x| x.as_var().is_some_and(|v| !v.ty.is_sort()))
                    {
                        notes.push(format!(
                            "rule {i}: functional variable below constructor in {s}; the rule never applies to data"
                        ));
                    }
                }
            }
        }
        let mut seen = Vec::new();
        for s in r.lhs.subterms() {
            if let Some(v) = s.as_var() {
                if seen.contains(v) {
                    ll.push(Witness {
                        rule_index: i,
                        rule: r.to_string(),
                        subterm: r.lhs.to_string(),
                        reason: format!("variable {} occurs more than once", v.name),
                    });
                } else {
                    seen.push(v.clone());
                }
            }
        }
    }
    ll.dedup_by(|a, b| a.rule_index == b.rule_index && a.reason == b.reason);
    let constructor_system = Check::from_witnesses(cs);
    let left_linear = Check::from_witnesses(ll);
    let cons_free =
        if constructor_system.status == Status::Pass && left_linear.status == Status::Pass {
            Check::from_witnesses(cons_free_witnesses(afs))
        } else {
            Check::not_applicable()
        };
    notes.dedup();
    ValidationReport {
        constructor_system,
        left_linear,
        cons_free,
        prunable_constructors: functional_constructors(afs)
            .iter()
            .map(|n| n.to_string())
            .collect(),
        notes,
    }
}

fn cons_free_witnesses(afs: &Afs) -> Vec<Witness> {
    let mut out = Vec::new();
    for (i, r) in afs.rules().iter().enumerate() {
        let lhs_subs: Vec<Term> = r.lhs.subterms().into_iter().skip(1).collect();
        let avoid: Vec<Name> = r.lhs.free_vars().into_iter().map(|v| v.name).collect();
        let mut rhs_subs = Vec::new();
        opened_subterms(&r.rhs, &avoid, &mut rhs_subs);
        for s in rhs_subs {
            let Some(f) = s.head_symbol() else { continue };
            if !afs.is_constructor(f) {
                continue;
            }
            if afs.is_data(&s) || lhs_subs.contains(&s) {
                continue;
            }
            out.push(Witness {
                rule_index: i,
                rule: r.to_string(),
                subterm: s.to_string(),
                reason:
                    "constructor term on the right is neither data nor a strict subterm of the left"
                        .into(),
            });
        }
    }
    out
}

/// Subterms in pre-order, with each binder replaced by a fresh free variable
/// whose name avoids `avoid`.
fn opened_subterms(t: &Term, avoid: &[Name], out: &mut Vec<Term>) {
    out.push(t.clone());
    if let Some((_, body)) = t.open_abs(avoid) {
        opened_subterms(&body, avoid, out);
    } else {
        for c in t.children() {
            opened_subterms(c, avoid, out);
        }
    }
}

fn functional_constructors(afs: &Afs) -> Vec<Name> {
    afs.signature()
        .constructors()
        .filter(|c| c.decl().args.iter().any(|t| !t.is_sort()))
        .map(|c| c.name_rc().clone())
        .collect()
}

/// Removes constructors with a functional argument type and every rule using them.
pub fn prune_functional_constructors(afs: &Afs) -> (Afs, Vec<String>) {
    let names = functional_constructors(afs);
    if names.is_empty() {
        return (afs.clone(), Vec::new());
    }
    let pruned = afs.without_symbols(&names);
    (pruned, names.iter().map(|n| n.to_string()).collect())
}

// ---------------------------------------------------------------------------
// the data set B

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasicTermError {
    #[error("{0} is not a basic term f(d1,...,dn) with f defined and each di data")]
    NotBasic(String),
}

/// A finite set of data terms in canonical order: by sort name, then term
/// size, then structural hash.
#[derive(Clone, Debug)]
pub struct DataSet {
    terms: Vec<Term>,
    index: FxHashMap<Term, usize>,
    by_sort: Vec<(Sort, Vec<usize>)>,
    position: Vec<usize>,
}

fn canonical_cmp(a: &Term, b: &Term) -> Ordering {
    let sa = a.ty().output_sort();
    let sb = b.ty().output_sort();
    sa.cmp(sb)
        .then(a.size().cmp(&b.size()))
        .then(a.structural_hash().cmp(&b.structural_hash()))
        .then_with(|| a.to_string().cmp(&b.to_string()))
}

impl DataSet {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> DataSet {
        let set: IndexSet<Term> = terms.into_iter().collect();
        let mut terms: Vec<Term> = set.into_iter().collect();
        terms.sort_by(canonical_cmp);
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let mut by_sort: Vec<(Sort, Vec<usize>)> = Vec::new();
        let mut position = vec![0; terms.len()];
        for (i, t) in terms.iter().enumerate() {
            let s = t.ty().output_sort();
            match by_sort.last_mut() {
                Some((last, v)) if last == s => {
                    position[i] = v.len();
                    v.push(i)
                }
                _ => by_sort.push((s.clone(), vec![i])),
            }
        }
        DataSet {
            terms,
            index,
            by_sort,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Position of element `i` within its sort slice.
    pub fn position_in_sort(&self, i: usize) -> usize {
        self.position[i]
    }

    /// Indices (into [`DataSet::terms`]) of the elements of sort `s`.
    pub fn of_sort(&self, s: &Sort) -> &[usize] {
        self.by_sort
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.by_sort.iter().map(|(s, _)| s)
    }
}

impl fmt::Display for DataSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&t.unicode())?;
        }
        f.write_str("}")
    }
}

/// Checks that `s` is `f(d1,...,dn)` with `f` defined and every `di` data.
pub fn check_basic(afs: &Afs, s: &Term) -> Result<(), BasicTermError> {
    match s.as_fun() {
        Some((f, args)) if afs.is_defined(f) && args.iter().all(|a| afs.is_data(a)) => Ok(()),
        _ => Err(BasicTermError::NotBasic(s.to_string())),
    }
}

/// Data subterms of `s` together with the data subterms of every right-hand side.
pub fn compute_b(afs: &Afs, s: &Term) -> Result<DataSet, BasicTermError> {
    check_basic(afs, s)?;
    let mut found = Vec::new();
    let mut collect = |t: &Term| {
        for u in t.subterms() {
            if afs.is_data(&u) {
                found.push(u);
            }
        }
    };
    collect(s);
    for r in afs.rules() {
        collect(&r.rhs);
    }
    Ok(DataSet::new(found))
}

/// Every constructor-headed subterm of `t` lies in `b`.
pub fn is_b_safe(afs: &Afs, t: &Term, b: &DataSet) -> bool {
    t.subterms()
        .iter()
        .all(|u| !u.head_symbol().is_some_and(|f| afs.is_constructor(f)) || b.contains(u))
}
