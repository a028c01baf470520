//! Hash-consed, intrinsically typed terms.
//!
//! Bound variables are de Bruijn indices and free variables are named, so
//! substitution never captures and alpha-equivalent terms are structurally
//! equal up to binder name hints. Nodes are interned: building the same node
//! twice returns the same allocation.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use rustc_hash::{FxHashMap, FxHasher};
use thiserror::Error;

use crate::types::{Name, Symbol, Type};

/// A free variable. Two variables are equal when name and type agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Name,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, ty: Type) -> Var {
        Var {
            name: Name::from(name),
            ty,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: Type,
        found: Type,
    },
    #[error("cannot apply a term of base type {0}")]
    NotAFunction(Type),
    #[error("symbol {symbol} expects {expected} arguments, got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
}

pub enum TermKind {
    Var(Var),
    Bound(u32),
    /// Function and argument.
    App([Term; 2]),
    /// Binder name hint (printing only), binder type, body.
    Abs(Name, Type, Term),
    Fun(Symbol, Box<[Term]>),
}

pub struct Node {
    kind: TermKind,
    ty: Type,
    hash: u64,
    loose: u32,
    has_fv: bool,
    has_app: bool,
    size: u32,
    sym_mask: u64,
}

/// A typed term. Equality and hashing are modulo alpha-conversion.
#[derive(Clone)]
pub struct Term(Arc<Node>);

// ---------------------------------------------------------------------------
// interning

const SHARDS: usize = 64;

struct Shard {
    map: FxHashMap<u64, Vec<Weak<Node>>>,
    dead_hint: usize,
    purge_at: usize,
}

fn shards() -> &'static [Mutex<Shard>] {
    static TABLE: OnceLock<Vec<Mutex<Shard>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..SHARDS)
            .map(|_| {
                Mutex::new(Shard {
                    map: FxHashMap::default(),
                    dead_hint: 0,
                    purge_at: 4096,
                })
            })
            .collect()
    })
}

fn shallow_hash(kind: &TermKind, ty: &Type) -> u64 {
    let mut h = FxHasher::default();
    match kind {
        TermKind::Var(v) => (0u8, v).hash(&mut h),
        TermKind::Bound(i) => (1u8, i, ty).hash(&mut h),
        TermKind::App([a, b]) => {
            (2u8, Arc::as_ptr(&a.0) as usize, Arc::as_ptr(&b.0) as usize).hash(&mut h)
        }
        TermKind::Abs(n, t, b) => (3u8, n, t, Arc::as_ptr(&b.0) as usize).hash(&mut h),
        TermKind::Fun(f, args) => {
            (4u8, f.name()).hash(&mut h);
            for a in args.iter() {
                (Arc::as_ptr(&a.0) as usize).hash(&mut h);
            }
        }
    }
    h.finish()
}

fn shallow_eq(a: &Node, kind: &TermKind, ty: &Type) -> bool {
    match (&a.kind, kind) {
        (TermKind::Var(x), TermKind::Var(y)) => x == y,
        (TermKind::Bound(i), TermKind::Bound(j)) => i == j && &a.ty == ty,
        (TermKind::App([f, x]), TermKind::App([g, y])) => {
            Arc::ptr_eq(&f.0, &g.0) && Arc::ptr_eq(&x.0, &y.0)
        }
        (TermKind::Abs(n, t, b), TermKind::Abs(m, u, c)) => {
            n == m && t == u && Arc::ptr_eq(&b.0, &c.0)
        }
        (TermKind::Fun(f, xs), TermKind::Fun(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys.iter())
                    .all(|(x, y)| Arc::ptr_eq(&x.0, &y.0))
        }
        _ => false,
    }
}

fn alpha_hash(kind: &TermKind, ty: &Type) -> u64 {
    let mut h = FxHasher::default();
    match kind {
        TermKind::Var(v) => (0u8, v).hash(&mut h),
        TermKind::Bound(i) => (1u8, i, ty).hash(&mut h),
        TermKind::App([a, b]) => (2u8, a.0.hash, b.0.hash).hash(&mut h),
        TermKind::Abs(_, t, b) => (3u8, t, b.0.hash).hash(&mut h),
        TermKind::Fun(f, args) => {
            (4u8, f.name()).hash(&mut h);
            for a in args.iter() {
                a.0.hash.hash(&mut h);
            }
        }
    }
    h.finish()
}

fn kind_children(kind: &TermKind) -> &[Term] {
    match kind {
        TermKind::Var(_) | TermKind::Bound(_) => &[],
        TermKind::App(pair) => pair,
        TermKind::Abs(_, _, b) => std::slice::from_ref(b),
        TermKind::Fun(_, args) => args,
    }
}

/// Bit of a symbol name in [`Term::symbol_mask`].
pub fn symbol_bit(name: &str) -> u64 {
    let mut h = FxHasher::default();
    name.hash(&mut h);
    1u64 << (h.finish() >> 58)
}

fn intern(kind: TermKind, ty: Type) -> Term {
    let key = shallow_hash(&kind, &ty);
    let shard = &shards()[(key as usize) % SHARDS];
    let mut guard = shard.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(bucket) = guard.map.get_mut(&key) {
        let mut dead = 0;
        for w in bucket.iter() {
            match w.upgrade() {
                Some(node) if shallow_eq(&node, &kind, &ty) => return Term(node),
                Some(_) => {}
                None => dead += 1,
            }
        }
        if dead > 0 {
            bucket.retain(|w| w.strong_count() > 0);
        }
    }
    let (loose, has_fv, size) = match &kind {
        TermKind::Var(_) => (0, true, 1),
        TermKind::Bound(i) => (i + 1, false, 1),
        TermKind::App([a, b]) => (
            a.0.loose.max(b.0.loose),
            a.0.has_fv || b.0.has_fv,
            1 + a.0.size.saturating_add(b.0.size),
        ),
        TermKind::Abs(_, _, b) => (
            b.0.loose.saturating_sub(1),
            b.0.has_fv,
            b.0.size.saturating_add(1),
        ),
        TermKind::Fun(_, args) => (
            args.iter().map(|a| a.0.loose).max().unwrap_or(0),
            args.iter().any(|a| a.0.has_fv),
            args.iter().fold(1u32, |s, a| s.saturating_add(a.0.size)),
        ),
    };
    let own = match &kind {
        TermKind::Fun(f, _) => symbol_bit(f.name()),
        _ => 0,
    };
    let sym_mask = own | kind_children(&kind).iter().fold(0, |m, c| m | c.0.sym_mask);
    let has_app =
        matches!(kind, TermKind::App(_)) || kind_children(&kind).iter().any(|c| c.0.has_app);
    let hash = alpha_hash(&kind, &ty);
    let node = Arc::new(Node {
        kind,
        ty,
        hash,
        loose,
        has_fv,
        has_app,
        size,
        sym_mask,
    });
    guard
        .map
        .entry(key)
        .or_default()
        .push(Arc::downgrade(&node));
    guard.dead_hint += 1;
    if guard.dead_hint >= guard.purge_at {
        guard.map.retain(|_, b| {
            b.retain(|w| w.strong_count() > 0);
            !b.is_empty()
        });
        guard.dead_hint = 0;
        guard.purge_at = (guard.map.len() * 2).max(4096);
    }
    Term(node)
}

// ---------------------------------------------------------------------------
// construction

impl Term {
    pub fn var(v: Var) -> Term {
        let ty = v.ty.clone();
        intern(TermKind::Var(v), ty)
    }

    pub fn var_named(name: &str, ty: Type) -> Term {
        Term::var(Var::new(name, ty))
    }

    pub(crate) fn bound(index: u32, ty: Type) -> Term {
        intern(TermKind::Bound(index), ty)
    }

    pub fn app(f: Term, a: Term) -> Result<Term, TermError> {
        let (dom, cod) = match f.ty().as_arrow() {
            Some((d, c)) => (d.clone(), c.clone()),
            None => return Err(TermError::NotAFunction(f.ty().clone())),
        };
        if a.ty() != &dom {
            return Err(TermError::TypeMismatch {
                context: "application".into(),
                expected: dom,
                found: a.ty().clone(),
            });
        }
        Ok(intern(TermKind::App([f, a]), cod))
    }

    /// `f · a1 · ... · an`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        args.into_iter().try_fold(f, Term::app)
    }

    /// `λv. body`, binding every free occurrence of `v`.
    pub fn lambda(v: &Var, body: &Term) -> Term {
        Term::lambda_hinted(v, &v.name, body)
    }

    /// `λv. body`, printing the binder as `hint`.
    pub fn lambda_hinted(v: &Var, hint: &str, body: &Term) -> Term {
        let b = abstract_var(body, v, 0);
        let ty = Type::arrow(v.ty.clone(), body.ty().clone());
        intern(TermKind::Abs(Name::from(hint), v.ty.clone(), b), ty)
    }

    /// `λv1...λvn. body`.
    pub fn lambdas(vs: &[Var], body: &Term) -> Term {
        vs.iter()
            .rev()
            .fold(body.clone(), |acc, v| Term::lambda(v, &acc))
    }

    pub fn fun(f: &Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        let decl = f.decl();
        if decl.args.len() != args.len() {
            return Err(TermError::Arity {
                symbol: f.name().to_string(),
                expected: decl.args.len(),
                found: args.len(),
            });
        }
        for (i, (a, t)) in args.iter().zip(decl.args.iter()).enumerate() {
            if a.ty() != t {
                return Err(TermError::TypeMismatch {
                    context: format!("argument {} of {}", i + 1, f.name()),
                    expected: t.clone(),
                    found: a.ty().clone(),
                });
            }
        }
        Ok(intern(
            TermKind::Fun(f.clone(), args.into_boxed_slice()),
            decl.output_type(),
        ))
    }

    pub fn constant(f: &Symbol) -> Result<Term, TermError> {
        Term::fun(f, Vec::new())
    }

    /// Rebuilds a node of the same shape with new children. Children must keep their types.
    pub(crate) fn with_children(&self, children: Vec<Term>) -> Term {
        match &self.0.kind {
            TermKind::Var(_) | TermKind::Bound(_) => self.clone(),
            TermKind::App(..) => {
                let mut it = children.into_iter();
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                intern(TermKind::App([a, b]), self.0.ty.clone())
            }
            TermKind::Abs(n, t, _) => {
                let b = children.into_iter().next().unwrap();
                intern(TermKind::Abs(n.clone(), t.clone(), b), self.0.ty.clone())
            }
            TermKind::Fun(f, _) => intern(
                TermKind::Fun(f.clone(), children.into_boxed_slice()),
                self.0.ty.clone(),
            ),
        }
    }

    fn with_child(&self, idx: usize, child: Term) -> Term {
        let mut cs = self.children().to_vec();
        cs[idx] = child;
        self.with_children(cs)
    }
}

// ---------------------------------------------------------------------------
// inspection

impl Term {
    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn size(&self) -> u32 {
        self.0.size
    }

    /// Alpha-invariant structural hash; deterministic across runs.
    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    /// True when no free variables and no dangling bound indices occur.
    pub fn is_closed(&self) -> bool {
        !self.0.has_fv && self.0.loose == 0
    }

    pub fn has_free_vars(&self) -> bool {
        self.0.has_fv
    }

    /// 1 + the largest dangling de Bruijn index (0 if none).
    pub fn loose_bound(&self) -> u32 {
        self.0.loose
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.kind {
            TermKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_fun(&self) -> Option<(&Symbol, &[Term])> {
        match &self.0.kind {
            TermKind::Fun(f, args) => Some((f, args)),
            _ => None,
        }
    }

    pub fn head_symbol(&self) -> Option<&Symbol> {
        self.as_fun().map(|(f, _)| f)
    }

    pub fn children(&self) -> &[Term] {
        kind_children(&self.0.kind)
    }

    /// Union of [`symbol_bit`] over the symbols occurring in the term; a
    /// symbol whose bit is absent does not occur.
    pub fn symbol_mask(&self) -> u64 {
        self.0.sym_mask
    }

    /// True if an application occurs in the term.
    pub fn has_app(&self) -> bool {
        self.0.has_app
    }

    /// All subterms in pre-order, including `self`. Subterms below binders may
    /// contain dangling bound indices.
    pub fn subterms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            for c in t.children().iter().rev() {
                stack.push(c.clone());
            }
            out.push(t);
        }
        out
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<Var>) {
            if !t.0.has_fv {
                return;
            }
            if let TermKind::Var(v) = &t.0.kind {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            for c in t.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn subterm_at(&self, pos: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in pos {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Replaces the subterm at `pos`; the replacement must have the same type.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Term {
        match pos.split_first() {
            None => new,
            Some((&i, rest)) => {
                let child = self.children()[i].replace_at(rest, new);
                self.with_child(i, child)
            }
        }
    }
}

/// Applies `f` to every child; returns `t` itself when nothing changed.
fn map_children(t: &Term, mut f: impl FnMut(&Term) -> Term) -> Term {
    let cs = t.children();
    let mut out: Option<Vec<Term>> = None;
    for (i, c) in cs.iter().enumerate() {
        let n = f(c);
        if let Some(v) = out.as_mut() {
            v.push(n);
        } else if !n.ptr_eq(c) {
            let mut v = cs[..i].to_vec();
            v.push(n);
            out = Some(v);
        }
    }
    match out {
        Some(v) => t.with_children(v),
        None => t.clone(),
    }
}

// ---------------------------------------------------------------------------
// de Bruijn operations

fn abstract_var(t: &Term, v: &Var, depth: u32) -> Term {
    if !t.0.has_fv {
        return t.clone();
    }
    match &t.0.kind {
        TermKind::Var(w) if w == v => Term::bound(depth, v.ty.clone()),
        TermKind::Var(_) => t.clone(),
        TermKind::Abs(..) => map_children(t, |c| abstract_var(c, v, depth + 1)),
        _ => map_children(t, |c| abstract_var(c, v, depth)),
    }
}

/// Adds `d` to every bound index `>= cutoff`.
fn shift_up(t: &Term, d: u32, cutoff: u32) -> Term {
    if d == 0 || t.0.loose <= cutoff {
        return t.clone();
    }
    match &t.0.kind {
        TermKind::Bound(i) => Term::bound(i + d, t.0.ty.clone()),
        TermKind::Abs(..) => map_children(t, |c| shift_up(c, d, cutoff + 1)),
        _ => map_children(t, |c| shift_up(c, d, cutoff)),
    }
}

/// Subtracts `d` from every bound index; all dangling indices must be `>= d`.
fn shift_down(t: &Term, d: u32, cutoff: u32) -> Term {
    if d == 0 || t.0.loose <= cutoff {
        return t.clone();
    }
    match &t.0.kind {
        TermKind::Bound(i) => Term::bound(i - d, t.0.ty.clone()),
        TermKind::Abs(..) => map_children(t, |c| shift_down(c, d, cutoff + 1)),
        _ => map_children(t, |c| shift_down(c, d, cutoff)),
    }
}

/// True if some dangling index (relative to `cutoff`) is below `cutoff + d`.
fn refers_below(t: &Term, d: u32, cutoff: u32) -> bool {
    if t.0.loose <= cutoff {
        return false;
    }
    match &t.0.kind {
        TermKind::Bound(i) => *i < cutoff + d,
        TermKind::Abs(_, _, b) => refers_below(b, d, cutoff + 1),
        _ => t.children().iter().any(|c| refers_below(c, d, cutoff)),
    }
}

/// `body[0 := arg]` where `body` sits under one binder.
fn instantiate(body: &Term, arg: &Term, depth: u32) -> Term {
    if body.0.loose <= depth {
        return body.clone();
    }
    match &body.0.kind {
        TermKind::Bound(i) if *i == depth => shift_up(arg, depth, 0),
        TermKind::Bound(i) => Term::bound(i - 1, body.0.ty.clone()),
        TermKind::Abs(..) => map_children(body, |c| instantiate(c, arg, depth + 1)),
        _ => map_children(body, |c| instantiate(c, arg, depth)),
    }
}

fn subst_rec(t: &Term, s: &Subst, depth: u32) -> Term {
    if !t.0.has_fv {
        return t.clone();
    }
    match &t.0.kind {
        TermKind::Var(v) => match s.get(v) {
            Some(img) => shift_up(img, depth, 0),
            None => t.clone(),
        },
        TermKind::Abs(..) => map_children(t, |c| subst_rec(c, s, depth + 1)),
        _ => map_children(t, |c| subst_rec(c, s, depth)),
    }
}

fn beta_nf(t: &Term) -> Term {
    match &t.0.kind {
        TermKind::App([f, a]) => {
            let f = beta_nf(f);
            let a = beta_nf(a);
            if let TermKind::Abs(_, _, body) = &f.0.kind {
                beta_nf(&instantiate(body, &a, 0))
            } else {
                t.with_children(vec![f, a])
            }
        }
        TermKind::Var(_) | TermKind::Bound(_) => t.clone(),
        _ => map_children(t, beta_nf),
    }
}

impl Term {
    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn subst(&self, s: &Subst) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        subst_rec(self, s, 0)
    }

    /// For `λx.s`, returns `s[x := arg]`.
    pub fn instantiate_abs(&self, arg: &Term) -> Option<Term> {
        match &self.0.kind {
            TermKind::Abs(_, ty, body) if ty == arg.ty() => Some(instantiate(body, arg, 0)),
            _ => None,
        }
    }

    /// For `λx.s`, returns `(v, s[x := v])` with `v` named by the binder hint
    /// (primed until it avoids `avoid` and the free variables of `s`).
    pub fn open_abs(&self, avoid: &[Name]) -> Option<(Var, Term)> {
        match &self.0.kind {
            TermKind::Abs(hint, ty, body) => {
                let fv: Vec<Name> = body.free_vars().into_iter().map(|v| v.name).collect();
                let mut name = hint.to_string();
                while avoid.iter().any(|a| **a == *name) || fv.iter().any(|a| **a == *name) {
                    name.push('\'');
                }
                let v = Var::new(&name, ty.clone());
                Some((v.clone(), instantiate(body, &Term::var(v), 0)))
            }
            _ => None,
        }
    }

    /// Contracts beta-redexes until none remain.
    pub fn beta_normalize(&self) -> Term {
        beta_nf(self)
    }

    pub fn is_beta_normal(&self) -> bool {
        match &self.0.kind {
            TermKind::App([f, _]) if matches!(f.0.kind, TermKind::Abs(..)) => false,
            _ => self.children().iter().all(Term::is_beta_normal),
        }
    }
}

/// Applies a substitution; see [`Term::subst`].
pub fn apply_substitution(t: &Term, s: &Subst) -> Term {
    t.subst(s)
}

// ---------------------------------------------------------------------------
// substitutions and matching

/// A finite map from variables to terms of the same type.
#[derive(Clone, Default, PartialEq)]
pub struct Subst(Vec<(Var, Term)>);

impl Subst {
    pub fn new() -> Subst {
        Subst(Vec::new())
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.iter().find(|(w, _)| w == v).map(|(_, t)| t)
    }

    /// Binds `v`; fails on a type mismatch.
    pub fn insert(&mut self, v: Var, t: Term) -> Result<(), TermError> {
        if v.ty != *t.ty() {
            return Err(TermError::TypeMismatch {
                context: format!("substitution for {}", v.name),
                expected: v.ty,
                found: t.ty().clone(),
            });
        }
        match self.0.iter_mut().find(|(w, _)| *w == v) {
            Some(slot) => slot.1 = t,
            None => self.0.push((v, t)),
        }
        Ok(())
    }

    pub fn with(mut self, v: Var, t: Term) -> Result<Subst, TermError> {
        self.insert(v, t)?;
        Ok(self)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter().map(|(v, t)| (v, t))
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:={}", v.name, t)?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Syntactic matching: returns `γ` with `pattern γ` alpha-equal to `subject`.
/// Repeated pattern variables must bind alpha-equal subterms.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

/// Extends `s` so that `pattern s` equals `subject`; leaves `s` partially
/// extended on failure.
pub fn match_into(pattern: &Term, subject: &Term, s: &mut Subst) -> bool {
    match_rec(pattern, subject, 0, s)
}

fn match_rec(p: &Term, t: &Term, depth: u32, s: &mut Subst) -> bool {
    if p.ty() != t.ty() {
        return false;
    }
    match (&p.0.kind, &t.0.kind) {
        (TermKind::Var(v), _) => {
            if refers_below(t, depth, 0) {
                return false;
            }
            let t = shift_down(t, depth, 0);
            match s.get(v) {
                Some(prev) => *prev == t,
                None => {
                    s.0.push((v.clone(), t));
                    true
                }
            }
        }
        (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
        (TermKind::App([f, a]), TermKind::App([g, b])) => {
            match_rec(f, g, depth, s) && match_rec(a, b, depth, s)
        }
        (TermKind::Abs(_, x, b), TermKind::Abs(_, y, c)) => x == y && match_rec(b, c, depth + 1, s),
        (TermKind::Fun(f, xs), TermKind::Fun(g, ys)) => {
            f == g
                && xs
                    .iter()
                    .zip(ys.iter())
                    .all(|(x, y)| match_rec(x, y, depth, s))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// alpha-equivalence

fn alpha_eq(a: &Term, b: &Term) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    if a.0.hash != b.0.hash || a.0.ty != b.0.ty || a.0.size != b.0.size {
        return false;
    }
    match (&a.0.kind, &b.0.kind) {
        (TermKind::Var(x), TermKind::Var(y)) => x == y,
        (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
        (TermKind::App([f, x]), TermKind::App([g, y])) => alpha_eq(f, g) && alpha_eq(x, y),
        (TermKind::Abs(_, s, x), TermKind::Abs(_, t, y)) => s == t && alpha_eq(x, y),
        (TermKind::Fun(f, xs), TermKind::Fun(g, ys)) => {
            f == g && xs.iter().zip(ys.iter()).all(|(x, y)| alpha_eq(x, y))
        }
        _ => false,
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

/// Alpha-equivalence; the same relation as `==`.
pub fn alpha_equal(a: &Term, b: &Term) -> bool {
    alpha_eq(a, b)
}

// ---------------------------------------------------------------------------
// printing

/// Name of the empty-string constructor.
pub const EMPTY: &str = "▷";

pub(crate) fn is_plain_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphanumeric() || c == '_' || c == '@' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '@' | '\''))
}

pub(crate) fn write_name(out: &mut String, name: &str, unicode: bool) {
    if name == EMPTY {
        out.push_str(if unicode { EMPTY } else { "|>" });
    } else if is_plain_ident(name) {
        out.push_str(name);
    } else {
        out.push('\'');
        out.push_str(name);
        out.push('\'');
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    AppFun,
    AppArg,
}

fn collect_names(t: &Term, out: &mut Vec<Name>) {
    match &t.0.kind {
        TermKind::Var(v) => out.push(v.name.clone()),
        TermKind::Fun(f, _) => out.push(f.name_rc().clone()),
        _ => {}
    }
    for c in t.children() {
        collect_names(c, out);
    }
}

fn print_term(t: &Term, names: &mut Vec<Name>, out: &mut String, unicode: bool, ctx: Ctx) {
    match &t.0.kind {
        TermKind::Var(v) => write_name(out, &v.name, unicode),
        TermKind::Bound(i) => match names.len().checked_sub(*i as usize + 1) {
            Some(k) => {
                let n = names[k].clone();
                write_name(out, &n, unicode)
            }
            None => {
                out.push('^');
                out.push_str(&(*i as usize - names.len()).to_string());
            }
        },
        TermKind::Fun(f, args) => {
            write_name(out, f.name(), unicode);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    print_term(a, names, out, unicode, Ctx::Top);
                }
                out.push(')');
            }
        }
        TermKind::App([f, a]) => {
            let paren = ctx == Ctx::AppArg;
            if paren {
                out.push('(');
            }
            print_term(f, names, out, unicode, Ctx::AppFun);
            out.push_str(if unicode { " · " } else { " " });
            print_term(a, names, out, unicode, Ctx::AppArg);
            if paren {
                out.push(')');
            }
        }
        TermKind::Abs(hint, ty, body) => {
            let paren = ctx != Ctx::Top;
            if paren {
                out.push('(');
            }
            let mut avoid = Vec::new();
            collect_names(body, &mut avoid);
            let mut name = hint.to_string();
            while avoid.iter().chain(names.iter()).any(|a| **a == *name) {
                name.push('\'');
            }
            out.push_str(if unicode { "λ" } else { "\\" });
            write_name(out, &name, unicode);
            out.push(':');
            if ty.is_sort() {
                out.push_str(&ty.to_string());
            } else {
                out.push('(');
                out.push_str(&ty.to_string());
                out.push(')');
            }
            out.push_str(". ");
            names.push(Name::from(name.as_str()));
            print_term(body, names, out, unicode, Ctx::Top);
            names.pop();
            if paren {
                out.push(')');
            }
        }
    }
}

impl Term {
    /// Surface syntax; `unicode` selects `▷`, `λ` and `·` over the ASCII forms.
    pub fn render(&self, unicode: bool) -> String {
        let mut out = String::new();
        print_term(self, &mut Vec::new(), &mut out, unicode, Ctx::Top);
        out
    }

    pub fn unicode(&self) -> String {
        self.render(true)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

/// `name` as it must be written in source text, quoted when it is not a plain identifier.
pub fn quote_name(name: &str) -> String {
    let mut out = String::new();
    write_name(&mut out, name, false);
    out
}
