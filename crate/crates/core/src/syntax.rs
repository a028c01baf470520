//! Surface syntax for types, terms and AFS files.
//!
//! ```text
//! sort string;
//! cons 0, 1 : [string] => string;
//! cons |> : string;
//! def decide : [string] => bool;
//! forall a in {0, 1}: rule all(a(xs), q) -> all(xs, either(a(xs), q));
//! ```
//!
//! `f(t1,...,tn)` applies a symbol, juxtaposition (or `·`) is application,
//! `\x:type. t` (or `λ`) is abstraction. `|>` spells `▷`; other names that
//! are not identifiers are quoted, as in `'#'`. Inside `forall` rules a token
//! equal to a metavariable is replaced by its value, and `{v}` is replaced
//! inside longer identifiers.

use std::fmt;

use thiserror::Error;

use crate::afs::{Afs, AfsBuilder, Role, Signature};
use crate::term::{write_name, Term, Var, EMPTY};
use crate::types::{Sort, Type, TypeDecl};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    start: usize,
    end: usize,
}

const PUNCT: &[(&str, &str)] = &[
    ("->", "->"),
    ("=>", "=>"),
    ("!=", "!="),
    ("→", "->"),
    ("⇒", "=>"),
    ("≠", "!="),
    ("(", "("),
    (")", ")"),
    (",", ","),
    (";", ";"),
    (":", ":"),
    (".", "."),
    ("[", "["),
    ("]", "]"),
    ("{", "{"),
    ("}", "}"),
    ("=", "="),
    ("\\", "\\"),
    ("λ", "\\"),
    ("·", "·"),
    ("×", "x"),
];

fn ident_start(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '@'
}

fn ident_cont(c: char) -> bool {
    ident_start(c) || c == '\''
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    let bytes = src;
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < bytes.len() {
        let rest = &bytes[i..];
        let c = rest.chars().next().unwrap();
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            col += 1;
            continue;
        }
        if rest.starts_with("//") {
            let n = rest.find('\n').unwrap_or(rest.len());
            i += n;
            continue;
        }
        let (start, l0, c0) = (i, line, col);
        let mut push = |tok, len: usize, width: usize, i: &mut usize, col: &mut usize| {
            toks.push(Token {
                tok,
                line: l0,
                col: c0,
                start,
                end: start + len,
            });
            *i += len;
            *col += width;
        };
        if rest.starts_with("|>") {
            push(Tok::Ident(EMPTY.into()), 2, 2, &mut i, &mut col);
            continue;
        }
        if c == '▷' {
            push(Tok::Ident(EMPTY.into()), c.len_utf8(), 1, &mut i, &mut col);
            continue;
        }
        if c == '\'' {
            let close = rest[1..]
                .find('\'')
                .ok_or_else(|| err(l0, c0, "unterminated quoted name".into()))?;
            let name = &rest[1..1 + close];
            if name.is_empty() || name.contains('\n') {
                return Err(err(l0, c0, "bad quoted name".into()));
            }
            push(
                Tok::Ident(name.into()),
                close + 2,
                name.chars().count() + 2,
                &mut i,
                &mut col,
            );
            continue;
        }
        if let Some((p, canon)) = PUNCT.iter().find(|(p, _)| rest.starts_with(p)) {
            push(
                Tok::Punct(canon),
                p.len(),
                p.chars().count(),
                &mut i,
                &mut col,
            );
            continue;
        }
        if ident_start(c) {
            let mut len = 0;
            let mut chars = rest.char_indices().peekable();
            while let Some(&(k, ch)) = chars.peek() {
                if ident_cont(ch) {
                    chars.next();
                    len = k + ch.len_utf8();
                } else if ch == '{' && k > 0 {
                    // metavariable interpolation `{v}`
                    let close = rest[k..]
                        .find('}')
                        .ok_or_else(|| err(l0, c0, "unterminated {".into()))?;
                    len = k + close + 1;
                    while chars.peek().is_some_and(|&(j, _)| j < len) {
                        chars.next();
                    }
                } else {
                    break;
                }
            }
            let text = &rest[..len];
            push(
                Tok::Ident(text.into()),
                len,
                text.chars().count(),
                &mut i,
                &mut col,
            );
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character {c:?}")));
    }
    toks.push(Token {
        tok: Tok::Eof,
        line,
        col,
        start: src.len(),
        end: src.len(),
    });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// raw syntax

#[derive(Clone, Debug)]
enum Raw {
    Ident {
        name: String,
        at: (usize, usize),
    },
    Call {
        name: String,
        args: Vec<Raw>,
        at: (usize, usize),
    },
    App(Box<Raw>, Box<Raw>),
    Abs {
        name: String,
        ty: Option<Type>,
        body: Box<Raw>,
        at: (usize, usize),
    },
}

impl Raw {
    fn at(&self) -> (usize, usize) {
        match self {
            Raw::Ident { at, .. } | Raw::Call { at, .. } | Raw::Abs { at, .. } => *at,
            Raw::App(f, _) => f.at(),
        }
    }
}

struct Parser<'t> {
    toks: &'t [Token],
    i: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.i].line, self.toks[self.i].col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let a = if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            t
        } else {
            Type::sort(&self.ident()?)
        };
        if self.eat("->") {
            Ok(Type::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn decl(&mut self) -> Result<TypeDecl, ParseError> {
        if self.eat("[") {
            let mut args = vec![self.ty()?];
            while self.eat("x")
                || self.is_keyword("x") && {
                    self.bump();
                    true
                }
            {
                args.push(self.ty()?);
            }
            self.expect("]")?;
            self.expect("=>")?;
            Ok(TypeDecl::new(args, Sort::new(&self.ident()?)))
        } else {
            Ok(TypeDecl::constant(Sort::new(&self.ident()?)))
        }
    }

    fn term(&mut self) -> Result<Raw, ParseError> {
        if self.is_punct("\\") {
            return self.abs();
        }
        let mut t = self.atom()?;
        loop {
            self.eat("·");
            if self.is_punct("\\") {
                let a = self.abs()?;
                t = Raw::App(Box::new(t), Box::new(a));
                break;
            }
            if matches!(self.peek(), Tok::Ident(_)) || self.is_punct("(") {
                let a = self.atom()?;
                t = Raw::App(Box::new(t), Box::new(a));
            } else {
                break;
            }
        }
        Ok(t)
    }

    fn abs(&mut self) -> Result<Raw, ParseError> {
        let at = self.here();
        self.expect("\\")?;
        let name = self.ident()?;
        let ty = if self.eat(":") {
            Some(self.ty()?)
        } else {
            None
        };
        self.expect(".")?;
        let body = self.term()?;
        Ok(Raw::Abs {
            name,
            ty,
            body: Box::new(body),
            at,
        })
    }

    fn atom(&mut self) -> Result<Raw, ParseError> {
        let at = self.here();
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        let tok = self.toks[self.i].clone();
        let name = self.ident()?;
        let next = &self.toks[self.i];
        if matches!(next.tok, Tok::Punct("(")) && next.start == tok.end {
            self.bump();
            let mut args = vec![self.term()?];
            while self.eat(",") {
                args.push(self.term()?);
            }
            self.expect(")")?;
            Ok(Raw::Call { name, args, at })
        } else {
            Ok(Raw::Ident { name, at })
        }
    }
}

// ---------------------------------------------------------------------------
// elaboration

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Lhs,
    Rhs,
}

struct Elab<'a> {
    sig: &'a Signature,
    mode: Mode,
    vars: Vec<Var>,
    locals: Vec<(String, Var)>,
    fresh: u32,
}

fn perr<T>(at: (usize, usize), msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: at.0,
        col: at.1,
        msg: msg.into(),
    })
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, mode: Mode, vars: Vec<Var>) -> Elab<'a> {
        Elab {
            sig,
            mode,
            vars,
            locals: Vec::new(),
            fresh: 0,
        }
    }

    fn check_type(&self, ty: &Type, at: (usize, usize)) -> Result<(), ParseError> {
        let mut sorts = Vec::new();
        ty.sorts(&mut sorts);
        match sorts.iter().find(|s| !self.sig.has_sort(s)) {
            Some(s) => perr(at, format!("unknown sort {s}")),
            None => Ok(()),
        }
    }

    fn expect_ty(t: Term, expected: Option<&Type>, at: (usize, usize)) -> Result<Term, ParseError> {
        match expected {
            Some(e) if e != t.ty() => perr(at, format!("`{t}` has type {}, expected {e}", t.ty())),
            _ => Ok(t),
        }
    }

    fn ident(
        &mut self,
        name: &str,
        expected: Option<&Type>,
        at: (usize, usize),
    ) -> Result<Term, ParseError> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Self::expect_ty(Term::var(v.clone()), expected, at);
        }
        if let Some(sym) = self.sig.symbol(name) {
            if sym.arity() > 0 {
                return perr(
                    at,
                    format!("symbol {name} expects {} arguments", sym.arity()),
                );
            }
            return Self::expect_ty(Term::constant(sym).expect("constant"), expected, at);
        }
        if let Some(v) = self.vars.iter().find(|v| &*v.name == name) {
            return Self::expect_ty(Term::var(v.clone()), expected, at);
        }
        match (self.mode, expected) {
            (Mode::Lhs, Some(ty)) => {
                let v = Var::new(name, ty.clone());
                self.vars.push(v.clone());
                Ok(Term::var(v))
            }
            (Mode::Lhs, None) => perr(at, format!("cannot infer the type of variable {name}")),
            (Mode::Rhs, _) => perr(at, format!("unknown identifier {name}")),
        }
    }

    fn elab(&mut self, r: &Raw, expected: Option<&Type>) -> Result<Term, ParseError> {
        match r {
            Raw::Ident { name, at } => self.ident(name, expected, *at),
            Raw::Call { name, args, at } => {
                let is_local = self.locals.iter().any(|(n, _)| n == name);
                match self.sig.symbol(name) {
                    Some(sym) if !is_local => {
                        let sym = sym.clone();
                        if sym.arity() != args.len() {
                            return perr(
                                *at,
                                format!(
                                    "symbol {name} expects {} arguments, got {}",
                                    sym.arity(),
                                    args.len()
                                ),
                            );
                        }
                        let mut ts = Vec::with_capacity(args.len());
                        for (a, ty) in args.iter().zip(sym.decl().args.iter()) {
                            ts.push(self.elab(a, Some(ty))?);
                        }
                        let t = Term::fun(&sym, ts).map_err(|e| ParseError {
                            line: at.0,
                            col: at.1,
                            msg: e.to_string(),
                        })?;
                        Self::expect_ty(t, expected, *at)
                    }
                    _ => {
                        let mut t = self.ident(name, None, *at)?;
                        for a in args {
                            t = self.apply(t, a)?;
                        }
                        Self::expect_ty(t, expected, *at)
                    }
                }
            }
            Raw::App(f, a) => {
                let t = if let Raw::Abs { ty: None, .. } = &**f {
                    let ta = self.elab(a, None)?;
                    let tf = self.abs(f, Some(ta.ty()), None)?;
                    Term::app(tf, ta).map_err(|e| ParseError {
                        line: r.at().0,
                        col: r.at().1,
                        msg: e.to_string(),
                    })?
                } else {
                    let tf = self.elab(f, None)?;
                    self.apply(tf, a)?
                };
                Self::expect_ty(t, expected, r.at())
            }
            Raw::Abs { .. } => {
                let (dom, cod) = match expected.and_then(Type::as_arrow) {
                    Some((d, c)) => (Some(d.clone()), Some(c.clone())),
                    None => (None, None),
                };
                let t = self.abs(r, dom.as_ref(), cod.as_ref())?;
                Self::expect_ty(t, expected, r.at())
            }
        }
    }

    fn apply(&mut self, f: Term, a: &Raw) -> Result<Term, ParseError> {
        let at = a.at();
        let dom = match f.ty().as_arrow() {
            Some((d, _)) => d.clone(),
            None => {
                return perr(
                    at,
                    format!("`{f}` of type {} is applied to an argument", f.ty()),
                )
            }
        };
        let ta = self.elab(a, Some(&dom))?;
        Term::app(f, ta).map_err(|e| ParseError {
            line: at.0,
            col: at.1,
            msg: e.to_string(),
        })
    }

    fn abs(&mut self, r: &Raw, dom: Option<&Type>, cod: Option<&Type>) -> Result<Term, ParseError> {
        let Raw::Abs { name, ty, body, at } = r else {
            unreachable!()
        };
        let bty = match (ty, dom) {
            (Some(t), _) => {
                self.check_type(t, *at)?;
                t.clone()
            }
            (None, Some(d)) => d.clone(),
            (None, None) => return perr(*at, format!("cannot infer the type of binder {name}")),
        };
        self.fresh += 1;
        let v = Var::new(&format!("{name}%{}", self.fresh), bty);
        self.locals.push((name.clone(), v.clone()));
        let b = self.elab(body, cod);
        self.locals.pop();
        Ok(Term::lambda_hinted(&v, name, &b?))
    }
}

// ---------------------------------------------------------------------------
// entry points

fn parse_raw_term(src: &str) -> Result<Raw, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", p.describe()));
    }
    Ok(t)
}

/// Parses a term over `sig`; identifiers that are not symbols must be among `env`.
pub fn parse_term(src: &str, sig: &Signature, env: &[Var]) -> Result<Term, ParseError> {
    let raw = parse_raw_term(src)?;
    Elab::new(sig, Mode::Rhs, env.to_vec()).elab(&raw, None)
}

/// Parses a term against an expected type (lets binder annotations be omitted).
pub fn parse_term_as(
    src: &str,
    sig: &Signature,
    env: &[Var],
    ty: &Type,
) -> Result<Term, ParseError> {
    let raw = parse_raw_term(src)?;
    Elab::new(sig, Mode::Rhs, env.to_vec()).elab(&raw, Some(ty))
}

/// The type of a term in surface syntax, under a typing environment for its free variables.
pub fn infer_type(src: &str, sig: &Signature, env: &[Var]) -> Result<Type, ParseError> {
    parse_term(src, sig, env).map(|t| t.ty().clone())
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", p.describe()));
    }
    Ok(t)
}

pub fn parse_decl(src: &str) -> Result<TypeDecl, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let d = p.decl()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", p.describe()));
    }
    Ok(d)
}

/// Parses a rule `lhs -> rhs` over `sig`.
pub fn parse_rule(src: &str, sig: &Signature) -> Result<(Term, Term), ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let (l, r) = parse_rule_raw(&mut p)?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", p.describe()));
    }
    elab_rule(sig, &l, &r)
}

fn parse_rule_raw(p: &mut Parser) -> Result<(Raw, Raw), ParseError> {
    let l = p.term()?;
    p.expect("->")?;
    let r = p.term()?;
    Ok((l, r))
}

fn elab_rule(sig: &Signature, l: &Raw, r: &Raw) -> Result<(Term, Term), ParseError> {
    let mut e = Elab::new(sig, Mode::Lhs, Vec::new());
    let lhs = e.elab(l, None)?;
    let vars = std::mem::take(&mut e.vars);
    let mut e = Elab::new(sig, Mode::Rhs, vars);
    let rhs = e.elab(r, Some(lhs.ty()))?;
    Ok((lhs, rhs))
}

struct Forall {
    vars: Vec<(String, Vec<String>)>,
    constraints: Vec<(String, bool, String)>,
}

fn parse_forall(p: &mut Parser) -> Result<Forall, ParseError> {
    let mut vars = Vec::new();
    let mut constraints = Vec::new();
    loop {
        let v = p.ident()?;
        if !p.is_keyword("in") {
            return p.err("expected `in`");
        }
        p.bump();
        p.expect("{")?;
        let mut vals = Vec::new();
        if !p.is_punct("}") {
            vals.push(p.ident()?);
            while p.eat(",") {
                vals.push(p.ident()?);
            }
        }
        p.expect("}")?;
        vars.push((v, vals));
        if !p.eat(",") {
            break;
        }
    }
    if p.is_keyword("where") {
        p.bump();
        loop {
            let a = p.ident()?;
            let eq = if p.eat("=") {
                true
            } else {
                p.expect("!=")?;
                false
            };
            let b = p.ident()?;
            constraints.push((a, eq, b));
            if !p.eat(",") {
                break;
            }
        }
    }
    p.expect(":")?;
    Ok(Forall { vars, constraints })
}

fn instances(f: &Forall) -> Vec<Vec<(String, String)>> {
    let mut out: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (v, vals) in &f.vars {
        out = out
            .into_iter()
            .flat_map(|asg| {
                vals.iter().map(move |x| {
                    let mut a = asg.clone();
                    a.push((v.clone(), x.clone()));
                    a
                })
            })
            .collect();
    }
    let lookup = |asg: &[(String, String)], s: &str| -> String {
        asg.iter()
            .find(|(v, _)| v == s)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(|| s.to_string())
    };
    out.retain(|asg| {
        f.constraints
            .iter()
            .all(|(a, eq, b)| (lookup(asg, a) == lookup(asg, b)) == *eq)
    });
    out
}

fn substitute_tokens(toks: &[Token], asg: &[(String, String)]) -> Vec<Token> {
    toks.iter()
        .map(|t| match &t.tok {
            Tok::Ident(s) => {
                let mut s2 = match asg.iter().find(|(v, _)| v == s) {
                    Some((_, x)) => x.clone(),
                    None => s.clone(),
                };
                for (v, x) in asg {
                    s2 = s2.replace(&format!("{{{v}}}"), x);
                }
                Token {
                    tok: Tok::Ident(s2),
                    ..t.clone()
                }
            }
            _ => t.clone(),
        })
        .collect()
}

/// Parses an AFS file. Declarations may appear in any order relative to rules.
pub fn parse_afs(src: &str) -> Result<Afs, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let mut b = AfsBuilder::new();
    let mut pending: Vec<(Vec<Token>, (usize, usize))> = Vec::new();
    while *p.peek() != Tok::Eof {
        let at = p.here();
        let kw = p.ident()?;
        match kw.as_str() {
            "sort" => {
                loop {
                    let s = p.ident()?;
                    b.sort(&s);
                    if !p.eat(",") {
                        break;
                    }
                }
                p.expect(";")?;
            }
            "cons" | "def" => {
                let mut names = vec![p.ident()?];
                while p.eat(",") {
                    names.push(p.ident()?);
                }
                p.expect(":")?;
                let decl = p.decl()?;
                p.expect(";")?;
                let role = if kw == "cons" {
                    Role::Constructor
                } else {
                    Role::Defined
                };
                for n in names {
                    b.symbol(&n, decl.clone(), role).map_err(|e| ParseError {
                        line: at.0,
                        col: at.1,
                        msg: e.to_string(),
                    })?;
                }
            }
            "rule" | "forall" => {
                let start = p.i - 1;
                while !p.is_punct(";") {
                    if *p.peek() == Tok::Eof {
                        return p.err("missing `;` after rule");
                    }
                    p.bump();
                }
                let mut stmt = toks[start..p.i].to_vec();
                stmt.push(Token {
                    tok: Tok::Eof,
                    ..toks[p.i].clone()
                });
                p.bump();
                pending.push((stmt, at));
            }
            other => return perr(at, format!("unknown statement `{other}`")),
        }
    }
    for (stmt, at) in pending {
        let mut q = Parser { toks: &stmt, i: 0 };
        let kw = q.ident()?;
        let bodies = if kw == "forall" {
            let f = parse_forall(&mut q)?;
            let body = &stmt[q.i..];
            instances(&f)
                .into_iter()
                .map(|asg| substitute_tokens(body, &asg))
                .collect()
        } else {
            vec![stmt[q.i - 1..].to_vec()]
        };
        for body in bodies {
            let mut r = Parser { toks: &body, i: 0 };
            if !r.is_keyword("rule") {
                return r.err("expected `rule`");
            }
            r.bump();
            let (l, rr) = parse_rule_raw(&mut r)?;
            if *r.peek() != Tok::Eof {
                return r.err(format!("unexpected {}", r.describe()));
            }
            let (lhs, rhs) = elab_rule(b.signature(), &l, &rr)?;
            b.rule(lhs, rhs).map_err(|e| ParseError {
                line: at.0,
                col: at.1,
                msg: e.to_string(),
            })?;
        }
    }
    Ok(b.build())
}

/// Prints an AFS in the file format accepted by [`parse_afs`].
pub fn print_afs(afs: &Afs) -> String {
    let mut out = String::new();
    let sig = afs.signature();
    for s in sig.sorts() {
        out.push_str(&format!("sort {s};\n"));
    }
    for (sym, role) in sig.symbols() {
        let kw = if role == Role::Constructor {
            "cons"
        } else {
            "def"
        };
        let mut name = String::new();
        write_name(&mut name, sym.name(), false);
        out.push_str(&format!("{kw} {name} : {};\n", sym.decl()));
    }
    for r in afs.rules() {
        out.push_str(&format!("rule {r};\n"));
    }
    out
}

/// Display adapter printing an AFS in file format.
pub struct AfsDisplay<'a>(pub &'a Afs);

impl fmt::Display for AfsDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_afs(self.0))
    }
}
