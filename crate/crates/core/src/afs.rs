//! Signatures, rules and AFS containers.

use std::fmt;

use indexmap::{IndexMap, IndexSet};
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::term::{Term, TermKind, EMPTY};
use crate::types::{Name, Sort, Symbol, Type, TypeDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Constructor,
    Defined,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AfsError {
    #[error("unknown sort {0}")]
    UnknownSort(String),
    #[error("symbol {0} declared twice")]
    DuplicateSymbol(String),
    #[error("rule {rule}: left-hand side must be a function symbol application")]
    LhsNotFunApp { rule: String },
    #[error("rule {rule}: sides have types {lhs} and {rhs}")]
    RuleType { rule: String, lhs: Type, rhs: Type },
    #[error("rule {rule}: right-hand side variable {var} does not occur on the left")]
    UnboundRhsVar { rule: String, var: String },
    #[error("rule {rule}: left-hand side must have base type")]
    LhsNotBase { rule: String },
}

/// Sorts plus function symbols, each a constructor or a defined symbol.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    sorts: IndexSet<Sort>,
    symbols: IndexMap<Name, (Symbol, Role)>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, s: Sort) {
        self.sorts.insert(s);
    }

    pub fn has_sort(&self, s: &Sort) -> bool {
        self.sorts.contains(s)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sorts.iter()
    }

    pub fn add_symbol(&mut self, sym: Symbol, role: Role) -> Result<(), AfsError> {
        let mut sorts = Vec::new();
        for a in &sym.decl().args {
            a.sorts(&mut sorts);
        }
        sorts.push(sym.decl().output.clone());
        if let Some(s) = sorts.iter().find(|s| !self.sorts.contains(*s)) {
            return Err(AfsError::UnknownSort(s.to_string()));
        }
        if self.symbols.contains_key(sym.name()) {
            return Err(AfsError::DuplicateSymbol(sym.name().to_string()));
        }
        self.symbols.insert(sym.name_rc().clone(), (sym, role));
        Ok(())
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name).map(|(s, _)| s)
    }

    pub fn role(&self, name: &str) -> Option<Role> {
        self.symbols.get(name).map(|(_, r)| *r)
    }

    pub(crate) fn set_role(&mut self, name: &str, role: Role) {
        if let Some(entry) = self.symbols.get_mut(name) {
            entry.1 = role;
        }
    }

    pub(crate) fn remove_symbol(&mut self, name: &str) {
        self.symbols.shift_remove(name);
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, Role)> {
        self.symbols.values().map(|(s, r)| (s, *r))
    }

    pub fn constructors(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols()
            .filter(|(_, r)| *r == Role::Constructor)
            .map(|(s, _)| s)
    }

    pub fn defined(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols()
            .filter(|(_, r)| *r == Role::Defined)
            .map(|(s, _)| s)
    }

    pub fn is_constructor(&self, f: &Symbol) -> bool {
        matches!(self.symbols.get(f.name()), Some((g, Role::Constructor)) if g == f)
    }

    pub fn is_defined(&self, f: &Symbol) -> bool {
        matches!(self.symbols.get(f.name()), Some((g, Role::Defined)) if g == f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn head(&self) -> &Symbol {
        self.lhs
            .head_symbol()
            .expect("rule lhs is a function application")
    }

    pub fn render(&self, unicode: bool) -> String {
        format!(
            "{} {} {}",
            self.lhs.render(unicode),
            if unicode { "→" } else { "->" },
            self.rhs.render(unicode)
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// An algebraic functional system: a signature and a set of rules.
#[derive(Clone, Debug)]
pub struct Afs {
    sig: Signature,
    rules: Vec<Rule>,
    by_head: FxHashMap<Name, Vec<usize>>,
    /// Remarks produced while loading (reclassified symbols, normalized rules).
    pub notes: Vec<String>,
}

impl Afs {
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rules_for(&self, f: &Symbol) -> impl Iterator<Item = &Rule> {
        self.by_head
            .get(f.name())
            .into_iter()
            .flatten()
            .map(|&i| &self.rules[i])
    }

    pub fn rule_indices_for(&self, name: &str) -> &[usize] {
        self.by_head.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.sig.symbol(name)
    }

    pub fn is_constructor(&self, f: &Symbol) -> bool {
        self.sig.is_constructor(f)
    }

    pub fn is_defined(&self, f: &Symbol) -> bool {
        self.sig.is_defined(f)
    }

    /// Closed term built from constructors only.
    pub fn is_data(&self, t: &Term) -> bool {
        match t.kind() {
            TermKind::Fun(f, args) => {
                self.is_constructor(f) && args.iter().all(|a| self.is_data(a))
            }
            _ => false,
        }
    }

    /// Order of the system: the maximal order of a symbol declaration.
    pub fn order(&self) -> u32 {
        self.sig
            .symbols()
            .map(|(s, _)| s.decl().order())
            .max()
            .unwrap_or(0)
    }

    /// Encodes a word as `x1(x2(...xn(▷)))` using the constructors named by its characters.
    pub fn encode_input(&self, word: &str) -> Result<Term, EncodeError> {
        let string = Sort::new("string");
        let empty = self
            .sig
            .symbol(EMPTY)
            .filter(|s| self.is_constructor(s) && s.decl() == &TypeDecl::constant(string.clone()))
            .ok_or(EncodeError::MissingEmpty)?;
        let mut t = Term::constant(empty).expect("constant");
        let step = TypeDecl::new(vec![Type::of_sort(&string)], string);
        for c in word.chars().rev() {
            let name = c.to_string();
            let sym = self
                .sig
                .symbol(&name)
                .filter(|s| self.is_constructor(s) && s.decl() == &step)
                .ok_or(EncodeError::UnknownChar(c))?;
            t = Term::fun(sym, vec![t]).expect("well-typed");
        }
        Ok(t)
    }

    /// The symbol `decide : [string] ⇒ bool`, if present.
    pub fn decide_symbol(&self) -> Option<&Symbol> {
        self.sig.symbol("decide").filter(|s| {
            self.is_defined(s)
                && s.decl() == &TypeDecl::new(vec![Type::sort("string")], Sort::new("bool"))
        })
    }

    /// Drops the given symbols and every rule mentioning one of them.
    pub(crate) fn without_symbols(&self, names: &[Name]) -> Afs {
        let mut sig = self.sig.clone();
        for n in names {
            sig.remove_symbol(n);
        }
        let mentions = |t: &Term| {
            t.subterms()
                .iter()
                .any(|s| s.head_symbol().is_some_and(|f| names.contains(f.name_rc())))
        };
        let rules = self
            .rules
            .iter()
            .filter(|r| !mentions(&r.lhs) && !mentions(&r.rhs))
            .cloned()
            .collect();
        Afs::assemble(sig, rules, self.notes.clone())
    }

    fn assemble(sig: Signature, rules: Vec<Rule>, notes: Vec<String>) -> Afs {
        let mut by_head: FxHashMap<Name, Vec<usize>> = FxHashMap::default();
        for (i, r) in rules.iter().enumerate() {
            by_head
                .entry(r.head().name_rc().clone())
                .or_default()
                .push(i);
        }
        Afs {
            sig,
            rules,
            by_head,
            notes,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("no constructor {} : string", EMPTY)]
    MissingEmpty,
    #[error("no constructor {0} : [string] => string for input character")]
    UnknownChar(char),
}

/// Incremental construction of an [`Afs`].
#[derive(Default)]
pub struct AfsBuilder {
    sig: Signature,
    rules: Vec<Rule>,
    notes: Vec<String>,
}

impl AfsBuilder {
    pub fn new() -> AfsBuilder {
        AfsBuilder::default()
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn sort(&mut self, name: &str) -> Sort {
        let s = Sort::new(name);
        self.sig.add_sort(s.clone());
        s
    }

    pub fn symbol(&mut self, name: &str, decl: TypeDecl, role: Role) -> Result<Symbol, AfsError> {
        let sym = Symbol::new(name, decl);
        self.sig.add_symbol(sym.clone(), role)?;
        Ok(sym)
    }

    pub fn constructor(&mut self, name: &str, decl: TypeDecl) -> Result<Symbol, AfsError> {
        self.symbol(name, decl, Role::Constructor)
    }

    pub fn defined(&mut self, name: &str, decl: TypeDecl) -> Result<Symbol, AfsError> {
        self.symbol(name, decl, Role::Defined)
    }

    /// Adds `lhs → rhs`. The right-hand side is beta-normalized.
    pub fn rule(&mut self, lhs: Term, rhs: Term) -> Result<(), AfsError> {
        let text = format!("{lhs} -> {rhs}");
        if lhs.as_fun().is_none() {
            return Err(AfsError::LhsNotFunApp { rule: text });
        }
        if !lhs.ty().is_sort() {
            return Err(AfsError::LhsNotBase { rule: text });
        }
        if lhs.ty() != rhs.ty() {
            return Err(AfsError::RuleType {
                rule: text,
                lhs: lhs.ty().clone(),
                rhs: rhs.ty().clone(),
            });
        }
        let lv = lhs.free_vars();
        if let Some(v) = rhs.free_vars().into_iter().find(|v| !lv.contains(v)) {
            return Err(AfsError::UnboundRhsVar {
                rule: text,
                var: v.name.to_string(),
            });
        }
        let rhs = if rhs.is_beta_normal() {
            rhs
        } else {
            let n = rhs.beta_normalize();
            let note = format!("right-hand side of {text} beta-normalized to {n}");
            log::warn!("{note}");
            self.notes.push(note);
            n
        };
        self.rules.push(Rule { lhs, rhs });
        Ok(())
    }

    /// Finishes construction. Symbols declared as constructors that head a
    /// rule are reclassified as defined.
    pub fn build(mut self) -> Afs {
        let heads: IndexSet<Name> = self
            .rules
            .iter()
            .map(|r| r.head().name_rc().clone())
            .collect();
        for h in heads {
            if self.sig.role(&h) == Some(Role::Constructor) {
                self.notes
                    .push(format!("symbol {h} heads a rule; treated as defined"));
                self.sig.set_role(&h, Role::Defined);
            }
        }
        Afs::assemble(self.sig, self.rules, self.notes)
    }
}
