//! Finite semantic domains and the saturation procedure, which computes the
//! data normal forms of a basic term as a least fixpoint over statements
//! `f(A1,...,An) ≈ t`.
//!
//! Statements sharing `f(A1,...,An)` are grouped into one *goal* whose value
//! is the set of confirmed `t`. Every round reads only the table of the
//! previous round, so round `i` produces exactly the level-`i` table. Goals
//! are only re-evaluated when a goal they read has changed.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};
use thiserror::Error;

use crate::afs::Afs;
use crate::analysis::{
    compute_b, prune_functional_constructors, validate, BasicTermError, DataSet,
};
use crate::rewrite::{decide_term, AcceptError};
use crate::term::{Term, TermKind, Var};
use crate::types::{Name, Sort, Type};

/// Largest domain enumerated by default.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// [`Engine::Auto`] runs the dense engine up to this many statements.
pub const DENSE_STATEMENT_LIMIT: u128 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaturationError {
    #[error("the system is not a cons-free constructor system:\n{0}")]
    NotConsFree(String),
    #[error(transparent)]
    NotBasic(#[from] BasicTermError),
    #[error(transparent)]
    Accept(#[from] AcceptError),
    #[error("domain of {ty} has about 2^{log2_size:.1} elements, above the cap of {cap}")]
    DomainTooLarge { ty: Type, log2_size: f64, cap: u64 },
    #[error("no defined symbol {0}")]
    UnknownSymbol(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("{0} is constructor-headed but not in the data set")]
    NotBSafe(String),
    #[error("{0} is not a set of data terms of one sort")]
    NotASet(String),
}

/// Interned semantic value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Elem {
    Set { sort: u32, bits: Box<[u64]> },
    Fun { ty: u32, table: Box<[ElemId]> },
}

/// A decoded semantic value: a set of data terms, or the images of a
/// function in domain order.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Set(Vec<Term>),
    Fun(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, close, items): (&str, &str, Vec<String>) = match self {
            Value::Set(ts) => ("{", "}", ts.iter().map(Term::unicode).collect()),
            Value::Fun(vs) => ("[", "]", vs.iter().map(Value::to_string).collect()),
        };
        write!(f, "{open}{}{close}", items.join(", "))
    }
}

/// Size of a possibly astronomical number `x`, as `log2 x` and `log2 log2 x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Magnitude {
    pub log2: f64,
    pub log2_log2: f64,
}

/// Relative slack when comparing magnitudes computed in floating point.
pub const MAGNITUDE_TOLERANCE: f64 = 1e-9;

impl Magnitude {
    /// The number `2^bits`.
    pub fn pow2(bits: f64) -> Magnitude {
        Magnitude {
            log2: bits,
            log2_log2: bits.log2(),
        }
    }

    /// `exp2^height(x)`, so that `tower(1, x) = 2^x`.
    pub fn tower(height: u32, x: f64) -> Magnitude {
        let iterate = |h: i64| -> f64 {
            let mut v = x;
            if h < 0 {
                return x.log2();
            }
            for _ in 0..h {
                v = v.exp2();
            }
            v
        };
        Magnitude {
            log2: iterate(height as i64 - 1),
            log2_log2: iterate(height as i64 - 2),
        }
    }

    /// `self <= other`, or `None` when neither representation is finite.
    pub fn le(&self, other: &Magnitude) -> Option<bool> {
        let close = |a: f64, b: f64| a <= b + MAGNITUDE_TOLERANCE * b.abs().max(1.0);
        if self.log2.is_finite() && other.log2.is_finite() {
            Some(close(self.log2, other.log2))
        } else if other.log2 == f64::INFINITY && self.log2.is_finite() {
            Some(true)
        } else if self.log2_log2.is_finite() && other.log2_log2.is_finite() {
            Some(close(self.log2_log2, other.log2_log2))
        } else if other.log2_log2 == f64::INFINITY && self.log2_log2.is_finite() {
            Some(true)
        } else {
            None
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2.is_finite() {
            write!(f, "2^{:.2}", self.log2)
        } else {
            write!(f, "2^2^{:.2}", self.log2_log2)
        }
    }
}

/// Length `n+1` of the longest arrow sequence `σ1 ⇒ … ⇒ σn ⇒ ι` in `ty`.
pub fn longest_sequence(ty: &Type) -> u32 {
    let (args, _) = ty.uncurry();
    let inner = args.iter().map(longest_sequence).max().unwrap_or(0);
    (args.len() as u32 + 1).max(inner)
}

/// `exp2^{k+1}(i^e · n)` for a type of order `k` and longest sequence `i`.
pub fn cardinality_bound(ty: &Type, data_size: usize, exponent: u32) -> Magnitude {
    let k = ty.order();
    let i = longest_sequence(ty) as f64;
    Magnitude::tower(k + 1, i.powi(exponent as i32) * data_size as f64)
}

/// The canonically ordered elements of `⟦σ⟧`.
#[derive(Debug)]
pub struct Domain {
    ty: Type,
    elements: Vec<ElemId>,
    index: FxHashMap<ElemId, u32>,
}

impl Domain {
    pub fn ty(&self) -> &Type {
        &self.ty
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ElemId] {
        &self.elements
    }

    pub fn ordinal(&self, e: ElemId) -> Option<usize> {
        self.index.get(&e).map(|&i| i as usize)
    }
}

/// The data set `B` and every semantic value built over it.
pub struct Universe {
    b: DataSet,
    sorts: Vec<Sort>,
    sort_ix: FxHashMap<Sort, u32>,
    slice: Vec<Vec<usize>>,
    elems: Vec<Elem>,
    index: FxHashMap<Elem, ElemId>,
    types: Vec<Type>,
    type_ix: FxHashMap<Type, u32>,
    domains: FxHashMap<u32, Arc<Domain>>,
    singletons: Vec<ElemId>,
    empties: Vec<ElemId>,
    /// Head constructor id and child indices of each element of `B`.
    b_head: Vec<u32>,
    b_children: Vec<Vec<u32>>,
    heads: FxHashMap<Name, u32>,
    cap: u64,
}

impl Universe {
    pub fn new(sorts: impl IntoIterator<Item = Sort>, b: DataSet, cap: u64) -> Universe {
        assert!(cap > 0, "domain cap is positive");
        let mut u = Universe {
            b,
            sorts: Vec::new(),
            sort_ix: FxHashMap::default(),
            slice: Vec::new(),
            elems: Vec::new(),
            index: FxHashMap::default(),
            types: Vec::new(),
            type_ix: FxHashMap::default(),
            domains: FxHashMap::default(),
            singletons: Vec::new(),
            empties: Vec::new(),
            b_head: Vec::new(),
            b_children: Vec::new(),
            heads: FxHashMap::default(),
            cap,
        };
        for t in u.b.terms() {
            let (f, args) = t.as_fun().expect("data terms are constructor applications");
            let n = u.heads.len() as u32;
            u.b_head
                .push(*u.heads.entry(f.name_rc().clone()).or_insert(n));
            u.b_children.push(
                args.iter()
                    .map(|a| {
                        u.b.index_of(a)
                            .expect("data sets are closed under subterms")
                            as u32
                    })
                    .collect(),
            );
        }
        let from_b: Vec<Sort> = u.b.sorts().cloned().collect();
        for s in sorts.into_iter().chain(from_b) {
            if !u.sort_ix.contains_key(&s) {
                u.sort_ix.insert(s.clone(), u.sorts.len() as u32);
                u.slice.push(u.b.of_sort(&s).to_vec());
                u.sorts.push(s);
            }
        }
        for s in 0..u.sorts.len() {
            let bits = vec![0u64; u.words(s as u32)].into_boxed_slice();
            let e = u.intern(Elem::Set {
                sort: s as u32,
                bits,
            });
            u.empties.push(e);
        }
        for i in 0..u.b.len() {
            let s = u.sort_ix[u.b.terms()[i].ty().output_sort()];
            let mut bits = vec![0u64; u.words(s)];
            let p = u.b.position_in_sort(i);
            bits[p / 64] |= 1 << (p % 64);
            let e = u.intern(Elem::Set {
                sort: s,
                bits: bits.into_boxed_slice(),
            });
            u.singletons.push(e);
        }
        u
    }

    pub fn data(&self) -> &DataSet {
        &self.b
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Number of interned values so far.
    pub fn interned(&self) -> usize {
        self.elems.len()
    }

    fn words(&self, sort: u32) -> usize {
        self.slice[sort as usize].len().div_ceil(64).max(1)
    }

    fn sort_id(&self, s: &Sort) -> Result<u32, SaturationError> {
        self.sort_ix
            .get(s)
            .copied()
            .ok_or_else(|| SaturationError::NotASet(s.to_string()))
    }

    fn intern(&mut self, e: Elem) -> ElemId {
        if let Some(&id) = self.index.get(&e) {
            return id;
        }
        let id = ElemId(self.elems.len() as u32);
        self.elems.push(e.clone());
        self.index.insert(e, id);
        id
    }

    fn type_id(&mut self, ty: &Type) -> u32 {
        if let Some(&i) = self.type_ix.get(ty) {
            return i;
        }
        let i = self.types.len() as u32;
        self.types.push(ty.clone());
        self.type_ix.insert(ty.clone(), i);
        i
    }

    /// `{t}` for the data term with index `i` in `B`.
    pub fn singleton(&self, i: usize) -> ElemId {
        self.singletons[i]
    }

    pub fn empty(&self, s: &Sort) -> Result<ElemId, SaturationError> {
        Ok(self.empties[self.sort_id(s)? as usize])
    }

    /// The set of the given data terms, which must share sort `s` and lie in `B`.
    pub fn set_of(&mut self, s: &Sort, terms: &[Term]) -> Result<ElemId, SaturationError> {
        let sort = self.sort_id(s)?;
        let mut bits = vec![0u64; self.words(sort)];
        for t in terms {
            let i = self
                .b
                .index_of(t)
                .ok_or_else(|| SaturationError::NotBSafe(t.to_string()))?;
            if t.ty().output_sort() != s {
                return Err(SaturationError::NotASet(t.to_string()));
            }
            let p = self.b.position_in_sort(i);
            bits[p / 64] |= 1 << (p % 64);
        }
        Ok(self.intern(Elem::Set {
            sort,
            bits: bits.into_boxed_slice(),
        }))
    }

    fn bits(&self, e: ElemId) -> (u32, &[u64]) {
        match &self.elems[e.0 as usize] {
            Elem::Set { sort, bits } => (*sort, bits),
            Elem::Fun { .. } => panic!("value {e:?} is a function, not a set"),
        }
    }

    fn members_idx(&self, e: ElemId) -> impl Iterator<Item = usize> + '_ {
        let (sort, bits) = self.bits(e);
        let slice = &self.slice[sort as usize];
        bits.iter().enumerate().flat_map(move |(w, &word)| {
            (0..64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| slice[w * 64 + b])
        })
    }

    /// Members of a set value, in `B` order; `None` for a function.
    pub fn members(&self, e: ElemId) -> Option<Vec<Term>> {
        match &self.elems[e.0 as usize] {
            Elem::Set { .. } => Some(
                self.members_idx(e)
                    .map(|i| self.b.terms()[i].clone())
                    .collect(),
            ),
            Elem::Fun { .. } => None,
        }
    }

    pub fn value(&self, e: ElemId) -> Value {
        match &self.elems[e.0 as usize] {
            Elem::Set { .. } => Value::Set(self.members(e).expect("set")),
            Elem::Fun { table, .. } => Value::Fun(table.iter().map(|&x| self.value(x)).collect()),
        }
    }

    /// Image of a function value at the domain element with ordinal `i`.
    pub fn apply_ordinal(&self, f: ElemId, i: usize) -> Option<ElemId> {
        match &self.elems[f.0 as usize] {
            Elem::Fun { table, .. } => table.get(i).copied(),
            Elem::Set { .. } => None,
        }
    }

    fn slice_len(&self, s: &Sort) -> usize {
        self.sort_ix
            .get(s)
            .map_or(0, |&i| self.slice[i as usize].len())
    }

    /// Closed-form `card(⟦ty⟧)`, exactly when it fits in a `u128`.
    pub fn cardinality(&self, ty: &Type) -> (Option<u128>, Magnitude) {
        match ty.as_arrow() {
            None => {
                let n = self.slice_len(ty.output_sort());
                let exact = if n < 128 { Some(1u128 << n) } else { None };
                (exact, Magnitude::pow2(n as f64))
            }
            Some((from, to)) => {
                let (ef, mf) = self.cardinality(from);
                let (et, mt) = self.cardinality(to);
                let exact = match (ef, et) {
                    (Some(f), Some(t)) => u32::try_from(f).ok().and_then(|f| t.checked_pow(f)),
                    _ => None,
                };
                // |to|^|from| = 2^(|from| · log2 |to|)
                let log2 = mf.log2.exp2() * mt.log2;
                let log2_log2 = mf.log2 + mt.log2_log2;
                (exact, Magnitude { log2, log2_log2 })
            }
        }
    }

    /// Domains enumerated so far.
    pub fn enumerated(&self) -> Vec<Arc<Domain>> {
        let mut ds: Vec<_> = self.domains.values().cloned().collect();
        ds.sort_by_key(|d| d.ty.to_string());
        ds
    }

    /// Enumerates `⟦ty⟧` in canonical order: subsets by their bit pattern,
    /// function tables lexicographically with the first argument most
    /// significant.
    pub fn domain(&mut self, ty: &Type) -> Result<Arc<Domain>, SaturationError> {
        let tid = self.type_id(ty);
        if let Some(d) = self.domains.get(&tid) {
            return Ok(d.clone());
        }
        let (exact, mag) = self.cardinality(ty);
        let size = match exact {
            Some(n) if n <= self.cap as u128 && n <= u32::MAX as u128 => n as usize,
            _ => {
                return Err(SaturationError::DomainTooLarge {
                    ty: ty.clone(),
                    log2_size: mag.log2,
                    cap: self.cap,
                })
            }
        };
        let mut elements = Vec::with_capacity(size);
        match ty.as_arrow() {
            None => {
                let sort = self.sort_id(ty.output_sort())?;
                let words = self.words(sort);
                for k in 0..size as u64 {
                    let mut bits = vec![0u64; words];
                    bits[0] = k;
                    elements.push(self.intern(Elem::Set {
                        sort,
                        bits: bits.into_boxed_slice(),
                    }));
                }
            }
            Some((from, to)) => {
                let from_len = self.domain(from)?.len();
                let to_dom = self.domain(to)?;
                let mut digits = vec![0usize; from_len];
                for _ in 0..size {
                    let table: Box<[ElemId]> = digits.iter().map(|&d| to_dom.elements[d]).collect();
                    elements.push(self.intern(Elem::Fun { ty: tid, table }));
                    for d in digits.iter_mut().rev() {
                        *d += 1;
                        if *d < to_dom.len() {
                            break;
                        }
                        *d = 0;
                    }
                }
            }
        }
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();
        let d = Arc::new(Domain {
            ty: ty.clone(),
            elements,
            index,
        });
        self.domains.insert(tid, d.clone());
        Ok(d)
    }

    fn ordinal(&mut self, ty: &Type, e: ElemId) -> Result<usize, SaturationError> {
        if ty.is_sort() {
            let (sort, bits) = self.bits(e);
            if self.slice[sort as usize].len() >= 64 || bits.len() > 1 {
                let (_, mag) = self.cardinality(ty);
                return Err(SaturationError::DomainTooLarge {
                    ty: ty.clone(),
                    log2_size: mag.log2,
                    cap: self.cap,
                });
            }
            return Ok(bits[0] as usize);
        }
        let d = self.domain(ty)?;
        Ok(d.ordinal(e)
            .expect("function values of a type lie in its domain"))
    }
}

/// Decoded elements of `⟦ty⟧` over the data set `b`.
pub fn enumerate_domain(ty: &Type, b: &DataSet, cap: u64) -> Result<Vec<Value>, SaturationError> {
    let mut sorts = Vec::new();
    ty.sorts(&mut sorts);
    let mut u = Universe::new(sorts, b.clone(), cap);
    let d = u.domain(ty)?;
    Ok(d.elements().iter().map(|&e| u.value(e)).collect())
}

// ---------------------------------------------------------------------------
// compiled rules

#[derive(Debug)]
enum Pat {
    Var(u32),
    Con { sym: u32, slot: u32, args: Vec<Pat> },
}

#[derive(Debug)]
enum Ir {
    Const(ElemId),
    /// Singleton of the data term matched by a left-hand side subterm.
    Slot(u32),
    /// A variable argument of the left-hand side (or a free variable).
    Arg(u32),
    Local(u32),
    Call(u32, Box<[Ir]>),
    Apply(Box<Ir>, Box<Ir>, Type),
    Lam {
        id: u32,
        /// How many enclosing locals the body refers to; only those key the
        /// cached table.
        captures: u32,
        arg: Type,
        ty: Type,
        body: Box<Ir>,
    },
}

impl Ir {
    /// `max(i - depth + 1)` over the locals `i` that escape `depth` binders.
    fn escaping(&self, depth: u32) -> u32 {
        match self {
            Ir::Local(i) if *i >= depth => i - depth + 1,
            Ir::Const(_) | Ir::Slot(_) | Ir::Arg(_) | Ir::Local(_) => 0,
            Ir::Call(_, args) => args.iter().map(|a| a.escaping(depth)).max().unwrap_or(0),
            Ir::Apply(u, v, _) => u.escaping(depth).max(v.escaping(depth)),
            Ir::Lam { captures, .. } => captures.saturating_sub(depth),
        }
    }

    fn lam(id: u32, arg: Type, ty: Type, body: Ir) -> Ir {
        Ir::Lam {
            id,
            captures: body.escaping(1),
            arg,
            ty,
            body: Box::new(body),
        }
    }
}

#[derive(Debug)]
struct CompiledRule {
    /// `None` for a variable argument.
    pats: Vec<Option<Pat>>,
    slots: usize,
    rhs: Ir,
}

struct FnInfo {
    arg_types: Vec<Type>,
    out_sort: u32,
    rules: Vec<CompiledRule>,
}

struct Compiler<'a> {
    uni: &'a Universe,
    fn_ix: &'a FxHashMap<Name, u32>,
    /// Variable arguments by position.
    args: Vec<Option<Var>>,
    /// Left-hand side subterms below constructors, by slot.
    slots: Vec<Term>,
    next_lam: &'a mut u32,
    afs: &'a Afs,
}

impl Compiler<'_> {
    fn pattern(&mut self, t: &Term) -> Pat {
        let slot = self.slots.len() as u32;
        self.slots.push(t.clone());
        match t.kind() {
            TermKind::Fun(f, args) => {
                // a constructor absent from B never matches
                let sym = self.uni.heads.get(f.name()).copied().unwrap_or(u32::MAX);
                Pat::Con {
                    sym,
                    slot,
                    args: args.iter().map(|a| self.pattern(a)).collect(),
                }
            }
            _ => Pat::Var(slot),
        }
    }

    fn term(&mut self, t: &Term) -> Result<Ir, SaturationError> {
        Ok(match t.kind() {
            TermKind::Var(v) => {
                if let Some(j) = self.args.iter().position(|a| a.as_ref() == Some(v)) {
                    Ir::Arg(j as u32)
                } else if let Some(k) = self.slots.iter().position(|s| s == t) {
                    Ir::Slot(k as u32)
                } else {
                    return Err(SaturationError::UnboundVariable(v.name.to_string()));
                }
            }
            TermKind::Bound(i) => Ir::Local(*i),
            TermKind::App([f, a]) => Ir::Apply(
                Box::new(self.term(f)?),
                Box::new(self.term(a)?),
                a.ty().clone(),
            ),
            TermKind::Abs(_, arg, body) => {
                let id = *self.next_lam;
                *self.next_lam += 1;
                Ir::lam(id, arg.clone(), t.ty().clone(), self.term(body)?)
            }
            TermKind::Fun(f, args) => {
                if let Some(&fid) = self.fn_ix.get(f.name()).filter(|_| self.afs.is_defined(f)) {
                    let args = args
                        .iter()
                        .map(|a| self.term(a))
                        .collect::<Result<_, _>>()?;
                    Ir::Call(fid, args)
                } else if let Some(i) = self.uni.b.index_of(t) {
                    Ir::Const(self.uni.singletons[i])
                } else if let Some(k) = self.slots.iter().position(|s| s == t) {
                    Ir::Slot(k as u32)
                } else {
                    return Err(SaturationError::NotBSafe(t.to_string()));
                }
            }
        })
    }
}

// ---------------------------------------------------------------------------
// evaluation

type GoalMap = IndexMap<Box<[u32]>, (), FxBuildHasher>;

struct Env<'a> {
    args: &'a [ElemId],
    slots: &'a [u32],
    locals: Vec<ElemId>,
}

struct Eval<'a> {
    fns: &'a [FnInfo],
    uni: &'a mut Universe,
    goals: &'a mut GoalMap,
    prev: &'a [ElemId],
    /// Register unseen goals (demand-driven) instead of reading them as empty.
    register: bool,
    reads: Vec<u32>,
    lam_cache: FxHashMap<Box<[u32]>, (ElemId, Vec<u32>)>,
}

impl Eval<'_> {
    fn goal_value(&mut self, key: Vec<u32>) -> ElemId {
        let out = self.fns[key[0] as usize].out_sort;
        let id = match self.goals.get_index_of(key.as_slice()) {
            Some(id) => id,
            None if self.register => self.goals.insert_full(key.into_boxed_slice(), ()).0,
            None => return self.uni.empties[out as usize],
        };
        self.reads.push(id as u32);
        self.prev
            .get(id)
            .copied()
            .unwrap_or(self.uni.empties[out as usize])
    }

    fn eval(&mut self, ir: &Ir, env: &mut Env<'_>) -> Result<ElemId, SaturationError> {
        Ok(match ir {
            Ir::Const(e) => *e,
            Ir::Slot(k) => self.uni.singletons[env.slots[*k as usize] as usize],
            Ir::Arg(j) => env.args[*j as usize],
            Ir::Local(i) => env.locals[env.locals.len() - 1 - *i as usize],
            Ir::Call(f, args) => {
                let mut key = Vec::with_capacity(args.len() + 1);
                key.push(*f);
                for a in args.iter() {
                    key.push(self.eval(a, env)?.0);
                }
                self.goal_value(key)
            }
            Ir::Apply(u, v, arg_ty) => {
                let f = self.eval(u, env)?;
                let a = self.eval(v, env)?;
                let i = self.uni.ordinal(arg_ty, a)?;
                self.uni
                    .apply_ordinal(f, i)
                    .expect("application of a function value inside its domain")
            }
            Ir::Lam {
                id,
                captures,
                arg,
                ty,
                body,
            } => {
                let mut key: Vec<u32> = vec![*id];
                key.extend(env.args.iter().map(|e| e.0));
                key.extend_from_slice(env.slots);
                let outer = env.locals.len() - *captures as usize;
                key.extend(env.locals[outer..].iter().map(|e| e.0));
                if let Some((e, reads)) = self.lam_cache.get(key.as_slice()) {
                    let e = *e;
                    self.reads.extend_from_slice(reads);
                    return Ok(e);
                }
                let dom = self.uni.domain(arg)?;
                let start = self.reads.len();
                let mut table = Vec::with_capacity(dom.len());
                for &a in dom.elements() {
                    env.locals.push(a);
                    let r = self.eval(body, env);
                    env.locals.pop();
                    table.push(r?);
                }
                let tid = self.uni.type_id(ty);
                let e = self.uni.intern(Elem::Fun {
                    ty: tid,
                    table: table.into_boxed_slice(),
                });
                // nested tables would otherwise repeat their reads once per
                // enclosing entry
                let mut reads = self.reads.split_off(start);
                reads.sort_unstable();
                reads.dedup();
                self.reads.extend_from_slice(&reads);
                self.lam_cache.insert(key.into_boxed_slice(), (e, reads));
                e
            }
        })
    }

    /// All `t` confirmed for the goal by one rule application round, joined
    /// with its previous value.
    fn goal(
        &mut self,
        key: &[u32],
        current: ElemId,
        order: Option<&mut StdRng>,
    ) -> Result<ElemId, SaturationError> {
        let info = &self.fns[key[0] as usize];
        let args: Vec<ElemId> = key[1..].iter().map(|&e| ElemId(e)).collect();
        let mut acc: Vec<u64> = self.uni.bits(current).1.to_vec();
        let mut rules: Vec<&CompiledRule> = info.rules.iter().collect();
        if let Some(rng) = order {
            rules.shuffle(rng);
        }
        for rule in rules {
            // candidates for each non-variable argument
            let mut cands: Vec<Vec<usize>> = Vec::with_capacity(rule.pats.len());
            let mut slots = vec![0u32; rule.slots];
            let mut viable = true;
            for (j, p) in rule.pats.iter().enumerate() {
                let Some(p) = p else {
                    cands.push(Vec::new());
                    continue;
                };
                let ds: Vec<usize> = self
                    .uni
                    .members_idx(args[j])
                    .filter(|&d| match_pat(self.uni, p, d, &mut slots))
                    .collect();
                viable &= !ds.is_empty();
                cands.push(ds);
            }
            if !viable {
                continue;
            }
            self.product(rule, &args, &cands, 0, &mut slots, &mut acc)?;
        }
        let sort = info.out_sort;
        Ok(self.uni.intern(Elem::Set {
            sort,
            bits: acc.into_boxed_slice(),
        }))
    }

    fn product(
        &mut self,
        rule: &CompiledRule,
        args: &[ElemId],
        cands: &[Vec<usize>],
        j: usize,
        slots: &mut Vec<u32>,
        acc: &mut [u64],
    ) -> Result<(), SaturationError> {
        if j == rule.pats.len() {
            let mut env = Env {
                args,
                slots,
                locals: Vec::new(),
            };
            let r = self.eval(&rule.rhs, &mut env)?;
            for (a, b) in acc.iter_mut().zip(self.uni.bits(r).1) {
                *a |= b;
            }
            return Ok(());
        }
        match &rule.pats[j] {
            None => self.product(rule, args, cands, j + 1, slots, acc),
            Some(p) => {
                for &d in &cands[j] {
                    match_pat(self.uni, p, d, slots);
                    self.product(rule, args, cands, j + 1, slots, acc)?;
                }
                Ok(())
            }
        }
    }
}

fn match_pat(uni: &Universe, p: &Pat, d: usize, slots: &mut [u32]) -> bool {
    match p {
        Pat::Var(s) => {
            slots[*s as usize] = d as u32;
            true
        }
        Pat::Con { sym, slot, args } => {
            if uni.b_head[d] != *sym {
                return false;
            }
            slots[*slot as usize] = d as u32;
            args.iter()
                .zip(&uni.b_children[d])
                .all(|(p, &c)| match_pat(uni, p, c as usize, slots))
        }
    }
}

// ---------------------------------------------------------------------------
// the fixpoint

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Dense when the statement space is small, demand-driven otherwise.
    #[default]
    Auto,
    /// Every statement over every domain, as in the textbook procedure.
    Dense,
    /// Only goals reachable from the start goal.
    Demand,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Dense => "dense",
            Engine::Demand => "demand",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SaturationOptions {
    pub cap: u64,
    pub engine: Engine,
    /// Shuffles goal and rule order with this seed; results do not change.
    pub order_seed: Option<u64>,
}

impl Default for SaturationOptions {
    fn default() -> SaturationOptions {
        SaturationOptions {
            cap: DEFAULT_CAP,
            engine: Engine::Auto,
            order_seed: None,
        }
    }
}

/// Compiled rules, semantic values and the current confirmation table.
pub struct Model {
    uni: Universe,
    fns: Vec<FnInfo>,
    fn_ix: FxHashMap<Name, u32>,
    goals: GoalMap,
    values: Vec<ElemId>,
    rdeps: Vec<FxHashSet<u32>>,
    next_lam: u32,
    truth_counts: Vec<u64>,
    order: u32,
    dense: bool,
    dirty: Vec<u32>,
    rng: Option<StdRng>,
}

impl Model {
    /// Compiles the rules of a cons-free constructor system over `b`. The
    /// table starts with nothing confirmed.
    pub fn new(afs: &Afs, b: DataSet, cap: u64) -> Result<Model, SaturationError> {
        let uni = Universe::new(afs.signature().sorts().cloned(), b, cap);
        let defined: Vec<_> = afs.signature().defined().cloned().collect();
        let fn_ix: FxHashMap<Name, u32> = defined
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name_rc().clone(), i as u32))
            .collect();
        let mut next_lam = 0;
        let mut fns = Vec::with_capacity(defined.len());
        for f in &defined {
            let mut rules = Vec::new();
            for &index in afs.rule_indices_for(f.name()) {
                let r = &afs.rules()[index];
                let mut c = Compiler {
                    uni: &uni,
                    fn_ix: &fn_ix,
                    args: Vec::new(),
                    slots: Vec::new(),
                    next_lam: &mut next_lam,
                    afs,
                };
                let (_, largs) = r.lhs.as_fun().expect("rule lhs is a function application");
                let mut pats = Vec::with_capacity(largs.len());
                for a in largs {
                    match a.as_var() {
                        Some(v) => {
                            c.args.push(Some(v.clone()));
                            pats.push(None);
                        }
                        None => {
                            c.args.push(None);
                            pats.push(Some(c.pattern(a)));
                        }
                    }
                }
                let rhs = c.term(&r.rhs)?;
                rules.push(CompiledRule {
                    pats,
                    slots: c.slots.len(),
                    rhs,
                });
            }
            let out_sort = uni.sort_id(&f.decl().output)?;
            fns.push(FnInfo {
                arg_types: f.decl().args.clone(),
                out_sort,
                rules,
            });
        }
        Ok(Model {
            uni,
            fns,
            fn_ix,
            goals: GoalMap::default(),
            values: Vec::new(),
            rdeps: Vec::new(),
            next_lam,
            truth_counts: vec![0],
            order: afs.order(),
            dense: false,
            dirty: Vec::new(),
            rng: None,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.uni
    }

    pub fn universe_mut(&mut self) -> &mut Universe {
        &mut self.uni
    }

    /// Number of confirmed statements at each level computed so far.
    pub fn truth_counts(&self) -> &[u64] {
        &self.truth_counts
    }

    /// Iterations run, so the table is `Confirmed^level`.
    pub fn level(&self) -> usize {
        self.truth_counts.len() - 1
    }

    /// Goals materialized in the table.
    pub fn goals(&self) -> usize {
        self.goals.len()
    }

    /// Closed-form number of statements `f(A1,...,An) ≈ t` over all domains.
    pub fn statement_count(&self) -> (Option<u128>, f64) {
        let mut exact = Some(0u128);
        let mut logs = Vec::new();
        for f in &self.fns {
            let out = self.uni.slice[f.out_sort as usize].len();
            let mut e = Some(out as u128);
            let mut l = (out as f64).log2();
            for a in &f.arg_types {
                let (ea, ma) = self.uni.cardinality(a);
                e = e.zip(ea).and_then(|(x, y)| x.checked_mul(y));
                l += ma.log2;
            }
            exact = exact.zip(e).and_then(|(x, y)| x.checked_add(y));
            logs.push(l);
        }
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log2 = if max.is_finite() {
            max + logs.iter().map(|l| (l - max).exp2()).sum::<f64>().log2()
        } else {
            max
        };
        (exact, log2)
    }

    fn fn_id(&self, f: &str) -> Option<u32> {
        self.fn_ix.get(f).copied()
    }

    /// `{t | Confirmed[f(args) ≈ t]}` in the current table.
    pub fn confirmed(&self, f: &str, args: &[ElemId]) -> Option<ElemId> {
        let fid = self.fn_id(f)?;
        let mut key = vec![fid];
        key.extend(args.iter().map(|e| e.0));
        let empty = self.uni.empties[self.fns[fid as usize].out_sort as usize];
        Some(
            self.goals
                .get_index_of(key.as_slice())
                .and_then(|i| self.values.get(i).copied())
                .unwrap_or(empty),
        )
    }

    /// Evaluates a term against the current table, binding its free
    /// variables through `eta`.
    pub fn nf_eval(&mut self, t: &Term, eta: &[(Var, ElemId)]) -> Result<ElemId, SaturationError> {
        let args = eta.iter().map(|(v, _)| Some(v.clone())).collect();
        let ir = {
            let mut c = NfCompiler {
                uni: &self.uni,
                fn_ix: &self.fn_ix,
                args,
                next_lam: &mut self.next_lam,
            };
            c.term(t)?
        };
        let elems: Vec<ElemId> = eta.iter().map(|(_, e)| *e).collect();
        let mut ev = Eval {
            fns: &self.fns,
            uni: &mut self.uni,
            goals: &mut self.goals,
            prev: &self.values,
            register: false,
            reads: Vec::new(),
            lam_cache: FxHashMap::default(),
        };
        let mut env = Env {
            args: &elems,
            slots: &[],
            locals: Vec::new(),
        };
        ev.eval(&ir, &mut env)
    }

    fn enumerate_goals(&mut self) -> Result<(), SaturationError> {
        for fid in 0..self.fns.len() {
            let doms = self.fns[fid]
                .arg_types
                .clone()
                .iter()
                .map(|a| self.uni.domain(a))
                .collect::<Result<Vec<_>, _>>()?;
            if doms.iter().any(|d| d.is_empty()) {
                continue;
            }
            let mut digits = vec![0usize; doms.len()];
            loop {
                let mut key = vec![fid as u32];
                key.extend(digits.iter().zip(&doms).map(|(&i, d)| d.elements()[i].0));
                self.goals.insert(key.into_boxed_slice(), ());
                let mut carry = true;
                for (d, dom) in digits.iter_mut().zip(&doms).rev() {
                    *d += 1;
                    if *d < dom.len() {
                        carry = false;
                        break;
                    }
                    *d = 0;
                }
                if carry {
                    break;
                }
            }
        }
        Ok(())
    }

    fn sync_values(&mut self) {
        while self.values.len() < self.goals.len() {
            let f = self.goals.get_index(self.values.len()).expect("goal").0[0];
            self.values
                .push(self.uni.empties[self.fns[f as usize].out_sort as usize]);
            self.rdeps.push(FxHashSet::default());
        }
    }

    /// Seeds the table: dense runs materialize every statement, demand-driven
    /// runs start from the goal `f(args)` and add goals as they are read.
    pub fn prepare(
        &mut self,
        engine: Engine,
        f: &str,
        args: &[ElemId],
        seed: Option<u64>,
    ) -> Result<(), SaturationError> {
        let fid = self
            .fn_id(f)
            .ok_or_else(|| SaturationError::UnknownSymbol(f.to_string()))?;
        self.dense = engine != Engine::Demand;
        if self.dense {
            self.enumerate_goals()?;
        }
        let mut key = vec![fid];
        key.extend(args.iter().map(|e| e.0));
        self.goals.insert(key.into_boxed_slice(), ());
        self.rng = seed.map(StdRng::seed_from_u64);
        self.dirty
            .extend(self.values.len() as u32..self.goals.len() as u32);
        self.sync_values();
        Ok(())
    }

    /// Computes the next level of the table. Returns `false` once the table
    /// no longer changes.
    pub fn step(&mut self) -> Result<bool, SaturationError> {
        let mut dirty = std::mem::take(&mut self.dirty);
        match self.rng.as_mut() {
            Some(r) => dirty.shuffle(r),
            None => dirty.sort_unstable(),
        }
        let mut truth = *self.truth_counts.last().expect("level 0");
        let known = self.goals.len();
        let prev = std::mem::take(&mut self.values);
        let mut next = prev.clone();
        let mut changed = Vec::new();
        {
            let mut ev = Eval {
                fns: &self.fns,
                uni: &mut self.uni,
                goals: &mut self.goals,
                prev: &prev,
                register: !self.dense,
                reads: Vec::new(),
                lam_cache: FxHashMap::default(),
            };
            for &g in &dirty {
                let key = ev.goals.get_index(g as usize).expect("goal").0.clone();
                let cur = prev[g as usize];
                ev.reads.clear();
                let v = ev.goal(&key, cur, self.rng.as_mut());
                let v = match v {
                    Ok(v) => v,
                    Err(e) => {
                        self.values = prev;
                        return Err(e);
                    }
                };
                ev.reads.sort_unstable();
                ev.reads.dedup();
                for &h in &ev.reads {
                    if self.rdeps.len() <= h as usize {
                        self.rdeps.resize_with(h as usize + 1, FxHashSet::default);
                    }
                    self.rdeps[h as usize].insert(g);
                }
                if v != cur {
                    truth += popcount(ev.uni.bits(v).1) - popcount(ev.uni.bits(cur).1);
                    next[g as usize] = v;
                    changed.push(g);
                }
            }
        }
        self.values = next;
        self.sync_values();
        self.truth_counts.push(truth);
        let fresh = self.goals.len() - known;
        let mut mark = FxHashSet::default();
        dirty.clear();
        for g in &changed {
            for &h in &self.rdeps[*g as usize] {
                if mark.insert(h) {
                    dirty.push(h);
                }
            }
        }
        dirty.extend(known as u32..self.goals.len() as u32);
        self.dirty = dirty;
        Ok(!changed.is_empty() || fresh > 0)
    }

    /// Steps until the table is stable.
    pub fn run(&mut self) -> Result<(), SaturationError> {
        while self.step()? {}
        Ok(())
    }
}

fn popcount(bits: &[u64]) -> u64 {
    bits.iter().map(|w| w.count_ones() as u64).sum()
}

/// Compiles a free-standing term: free variables become arguments.
struct NfCompiler<'a> {
    uni: &'a Universe,
    fn_ix: &'a FxHashMap<Name, u32>,
    args: Vec<Option<Var>>,
    next_lam: &'a mut u32,
}

impl NfCompiler<'_> {
    fn term(&mut self, t: &Term) -> Result<Ir, SaturationError> {
        Ok(match t.kind() {
            TermKind::Var(v) => match self.args.iter().position(|a| a.as_ref() == Some(v)) {
                Some(j) => Ir::Arg(j as u32),
                None => return Err(SaturationError::UnboundVariable(v.name.to_string())),
            },
            TermKind::Bound(i) => Ir::Local(*i),
            TermKind::App([f, a]) => Ir::Apply(
                Box::new(self.term(f)?),
                Box::new(self.term(a)?),
                a.ty().clone(),
            ),
            TermKind::Abs(_, arg, body) => {
                let id = *self.next_lam;
                *self.next_lam += 1;
                Ir::lam(id, arg.clone(), t.ty().clone(), self.term(body)?)
            }
            TermKind::Fun(f, args) => {
                if let Some(i) = self.uni.b.index_of(t) {
                    Ir::Const(self.uni.singletons[i])
                } else if let Some(&fid) = self.fn_ix.get(f.name()) {
                    Ir::Call(
                        fid,
                        args.iter()
                            .map(|a| self.term(a))
                            .collect::<Result<_, _>>()?,
                    )
                } else {
                    return Err(SaturationError::NotBSafe(t.to_string()));
                }
            }
        })
    }
}

/// Per-type accounting for one run.
#[derive(Clone, Debug)]
pub struct TypeStat {
    pub ty: Type,
    pub cardinality: Option<u128>,
    pub magnitude: Magnitude,
    /// Size of the enumerated domain, when the run enumerated it.
    pub enumerated: Option<usize>,
    pub order: u32,
    pub sequence: u32,
    /// `exp2^{k+1}(i^{k+1} · |B|)`.
    pub bound: Magnitude,
    /// `exp2^{k+1}(i^k · |B|)`.
    pub bound_tight: Magnitude,
    /// Both the closed form and the enumerated size respect `bound`.
    pub within_bound: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SaturationStats {
    pub engine: Engine,
    pub data_size: usize,
    pub order: u32,
    pub pruned: Vec<String>,
    pub types: Vec<TypeStat>,
    pub statements: Option<u128>,
    pub statements_log2: f64,
    pub goals: usize,
    pub iterations: usize,
    pub truth_counts: Vec<u64>,
    pub elapsed: Duration,
}

impl SaturationStats {
    fn collect(
        model: &Model,
        engine: Engine,
        pruned: Vec<String>,
        elapsed: Duration,
    ) -> SaturationStats {
        let mut types: IndexMap<Type, (), FxBuildHasher> = IndexMap::default();
        fn add(ty: &Type, types: &mut IndexMap<Type, (), FxBuildHasher>) {
            if let Some((a, b)) = ty.as_arrow() {
                add(a, types);
                add(b, types);
            }
            types.insert(ty.clone(), ());
        }
        for f in &model.fns {
            for a in &f.arg_types {
                add(a, &mut types);
            }
            add(
                &Type::of_sort(&model.uni.sorts[f.out_sort as usize]),
                &mut types,
            );
        }
        for d in model.uni.enumerated() {
            add(d.ty(), &mut types);
        }
        let n = model.uni.b.len();
        let types = types
            .into_keys()
            .map(|ty| {
                let (cardinality, magnitude) = model.uni.cardinality(&ty);
                let enumerated = model
                    .uni
                    .type_ix
                    .get(&ty)
                    .and_then(|t| model.uni.domains.get(t))
                    .map(|d| d.len());
                let k = ty.order();
                let bound = cardinality_bound(&ty, n, k + 1);
                let bound_tight = cardinality_bound(&ty, n, k);
                let enumerated_ok = enumerated.map_or(Some(true), |e| {
                    Magnitude::pow2((e as f64).log2()).le(&bound)
                });
                let within_bound = magnitude.le(&bound).zip(enumerated_ok).map(|(a, b)| a && b);
                TypeStat {
                    order: k,
                    sequence: longest_sequence(&ty),
                    ty,
                    cardinality,
                    magnitude,
                    enumerated,
                    bound,
                    bound_tight,
                    within_bound,
                }
            })
            .collect();
        let (statements, statements_log2) = model.statement_count();
        SaturationStats {
            engine,
            data_size: n,
            order: model.order,
            pruned,
            types,
            statements,
            statements_log2,
            goals: model.goals(),
            iterations: model.level(),
            truth_counts: model.truth_counts().to_vec(),
            elapsed,
        }
    }
}

impl fmt::Display for SaturationStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "engine: {}", self.engine)?;
        writeln!(f, "|B| = {}", self.data_size)?;
        writeln!(f, "order: {}", self.order)?;
        if !self.pruned.is_empty() {
            writeln!(f, "pruned constructors: {}", self.pruned.join(", "))?;
        }
        for t in &self.types {
            let size = t
                .cardinality
                .map_or_else(|| t.magnitude.to_string(), |c| c.to_string());
            let enumerated = t
                .enumerated
                .map_or_else(|| "-".to_string(), |e| e.to_string());
            let within = match t.within_bound {
                Some(true) => "ok",
                Some(false) => "VIOLATED",
                None => "unknown",
            };
            writeln!(
                f,
                "type {}: card {size}, enumerated {enumerated}, k={} i={}, bound {} (i^k: {}) {within}",
                t.ty, t.order, t.sequence, t.bound, t.bound_tight
            )?;
        }
        match self.statements {
            Some(s) => writeln!(f, "statements: {s}")?,
            None => writeln!(f, "statements: about 2^{:.1}", self.statements_log2)?,
        }
        writeln!(f, "goals materialized: {}", self.goals)?;
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "confirmed per level: {:?}", self.truth_counts)?;
        write!(f, "time: {:.3?}", self.elapsed)
    }
}

/// Outcome of [`saturate`]: the data normal forms of the start term.
pub struct Saturation {
    pub normal_forms: Vec<Term>,
    pub stats: SaturationStats,
    pub model: Model,
}

/// Computes the set of data normal forms of the basic term `start`.
pub fn saturate(
    afs: &Afs,
    start: &Term,
    opts: &SaturationOptions,
) -> Result<Saturation, SaturationError> {
    let t0 = Instant::now();
    let (model, engine, pruned, mut forms) =
        saturate_starts(afs, std::slice::from_ref(start), opts)?;
    let stats = SaturationStats::collect(&model, engine, pruned, t0.elapsed());
    Ok(Saturation {
        normal_forms: forms.pop().expect("one start"),
        stats,
        model,
    })
}

/// Data normal forms of several basic terms whose arguments share one data
/// set, computed against a single table.
pub fn saturate_all(
    afs: &Afs,
    starts: &[Term],
    opts: &SaturationOptions,
) -> Result<Vec<Vec<Term>>, SaturationError> {
    Ok(saturate_starts(afs, starts, opts)?.3)
}

#[allow(clippy::type_complexity)]
fn saturate_starts(
    afs: &Afs,
    starts: &[Term],
    opts: &SaturationOptions,
) -> Result<(Model, Engine, Vec<String>, Vec<Vec<Term>>), SaturationError> {
    let report = validate(afs);
    if !report.is_cons_free_system() {
        return Err(SaturationError::NotConsFree(report.render()));
    }
    let (afs, pruned) = prune_functional_constructors(afs);
    let first = starts
        .first()
        .ok_or_else(|| SaturationError::UnknownSymbol(String::new()))?;
    let b = compute_b(&afs, first)?;
    let mut model = Model::new(&afs, b, opts.cap)?;
    let mut goals = Vec::with_capacity(starts.len());
    for start in starts {
        let (f, args) = start
            .as_fun()
            .expect("basic terms are function applications");
        let args: Vec<ElemId> = args
            .iter()
            .map(|a| {
                model
                    .uni
                    .b
                    .index_of(a)
                    .map(|i| model.uni.singleton(i))
                    .ok_or_else(|| SaturationError::NotBSafe(a.to_string()))
            })
            .collect::<Result<_, _>>()?;
        goals.push((f.name().to_string(), args));
    }
    let engine = match opts.engine {
        Engine::Auto => {
            let small = model
                .statement_count()
                .0
                .is_some_and(|n| n <= DENSE_STATEMENT_LIMIT);
            let enumerable = model.fns.iter().flat_map(|f| &f.arg_types).all(|a| {
                model
                    .uni
                    .cardinality(a)
                    .0
                    .is_some_and(|c| c <= opts.cap as u128)
            });
            if small && enumerable {
                Engine::Dense
            } else {
                Engine::Demand
            }
        }
        e => e,
    };
    for (f, args) in &goals {
        model.prepare(engine, f, args, opts.order_seed)?;
    }
    model.run()?;
    let forms = goals
        .iter()
        .map(|(f, args)| {
            let value = model.confirmed(f, args).expect("start symbol");
            model.uni.members(value).expect("base-type goal")
        })
        .collect();
    Ok((model, engine, pruned, forms))
}

/// Whether `decide(⌜input⌝)` has `true` among its data normal forms.
pub fn decide_by_saturation(
    afs: &Afs,
    input: &str,
    opts: &SaturationOptions,
) -> Result<bool, SaturationError> {
    let start = decide_term(afs, input)?;
    let sat = saturate(afs, &start, opts)?;
    Ok(sat.normal_forms.iter().any(|t| {
        t.as_fun()
            .is_some_and(|(f, a)| f.name() == "true" && a.is_empty())
    }))
}
