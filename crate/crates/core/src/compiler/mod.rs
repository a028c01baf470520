//! Counting modules and the compilation of Turing machines into cons-free
//! systems.
//!
//! A module is kept as a tree (base, product, exponential) and rendered to
//! source text on demand. Symbol names carry a tag naming the construction
//! (`@e` base, `@p` product, `@x` exponential) followed by the path from
//! the root module (`_l`, `_r` for product factors, `_c` for the argument
//! of an exponential), so every module in a composition has its own names.

mod oracle;
mod scaffold;

use std::fmt;

use crate::types::{Sort, Type, TypeDecl};

pub use oracle::{
    apply_op, data_normal_forms, data_normal_forms_all, numinterpret_oracle, probe_system,
    representation, seed_terms, zero_term, Evaluator, Op, OracleBudget,
};
pub use scaffold::{compile, CompileError, CompiledAfs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundExpr {
    /// `2^(n+1)`.
    Base,
    Mul(Box<BoundExpr>, Box<BoundExpr>),
    Exp2(Box<BoundExpr>),
}

impl BoundExpr {
    /// Value at input length `n`, or `None` on overflow.
    pub fn eval(&self, n: u32) -> Option<u128> {
        match self {
            BoundExpr::Base => 1u128.checked_shl(n + 1),
            BoundExpr::Mul(a, b) => a.eval(n)?.checked_mul(b.eval(n)?),
            BoundExpr::Exp2(a) => 1u128.checked_shl(u32::try_from(a.eval(n)?).ok()?),
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundExpr::Base => f.write_str("2^(n+1)"),
            BoundExpr::Mul(a, b) => write!(f, "({a})*({b})"),
            BoundExpr::Exp2(a) => write!(f, "2^({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Base,
    Product(Box<CountingModule>, Box<CountingModule>),
    Exp(Box<CountingModule>),
}

/// A counting module over an input alphabet, placed at `path` inside a
/// composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingModule {
    pub alphabet: Vec<String>,
    pub shape: Shape,
    pub path: String,
}

fn string() -> Type {
    Type::sort("string")
}

fn bool_() -> Type {
    Type::sort("bool")
}

fn join(xs: &[String]) -> String {
    xs.join(", ")
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn cat(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// Hands out binder names for bracket abstractions within one rule.
#[derive(Default)]
pub(crate) struct Fresh(usize);

impl Fresh {
    fn names(&mut self, n: usize) -> Vec<String> {
        (0..n)
            .map(|_| {
                self.0 += 1;
                format!("y{}", self.0)
            })
            .collect()
    }
}

/// `f[args]`: `\y1. ... \ym. f(args, y1, ..., ym)` for a symbol of type `ty`.
pub(crate) fn bracket(fresh: &mut Fresh, f: &str, args: &[String], ty: &Type) -> String {
    let (taus, _) = ty.uncurry();
    let ys = fresh.names(taus.len());
    let call = format!("{f}({})", join(&cat(&[args, &ys])));
    if ys.is_empty() {
        return call;
    }
    let binders: String = ys.iter().map(|y| format!("\\{y}. ")).collect();
    format!("({binders}{call})")
}

/// `x z1 ... zm`, parenthesized.
fn apply(x: &str, zs: &[String]) -> String {
    if zs.is_empty() {
        x.to_string()
    } else {
        format!("({x} {})", zs.join(" "))
    }
}

struct Out {
    decls: Vec<(String, TypeDecl)>,
    rules: Vec<String>,
}

impl Out {
    fn def(&mut self, name: String, args: Vec<Type>, out: &str) {
        self.decls.push((name, TypeDecl::new(args, Sort::new(out))));
    }

    fn rule(&mut self, lhs: String, rhs: String) {
        self.rules.push(format!("rule {lhs} -> {rhs};"));
    }
}

impl CountingModule {
    fn with_path(mut self, path: &str) -> CountingModule {
        self.path = path.to_string();
        self.shape = match self.shape {
            Shape::Base => Shape::Base,
            Shape::Product(l, r) => Shape::Product(
                Box::new(l.with_path(&format!("{path}_l"))),
                Box::new(r.with_path(&format!("{path}_r"))),
            ),
            Shape::Exp(c) => Shape::Exp(Box::new(c.with_path(&format!("{path}_c")))),
        };
        self
    }

    fn tag(&self) -> String {
        let t = match self.shape {
            Shape::Base => "@e",
            Shape::Product(..) => "@p",
            Shape::Exp(_) => "@x",
        };
        format!("{t}{}", self.path)
    }

    fn name(&self, base: &str) -> String {
        format!("{base}{}", self.tag())
    }

    pub fn zero(&self) -> String {
        self.name("zero")
    }

    pub fn pred(&self, i: usize) -> String {
        self.name(&format!("pred{i}"))
    }

    pub fn suc(&self, i: usize) -> String {
        self.name(&format!("suc{i}"))
    }

    pub fn inv(&self, i: usize) -> String {
        self.name(&format!("inv{i}"))
    }

    pub fn seed(&self, i: usize) -> String {
        self.name(&format!("seed{i}"))
    }

    /// The type vector σ1 × ... × σa.
    pub fn types(&self) -> Vec<Type> {
        match &self.shape {
            Shape::Base => vec![string(), string()],
            Shape::Product(l, r) => cat2(l.types(), r.types()),
            Shape::Exp(c) => vec![Type::curried(&c.types(), bool_())],
        }
    }

    pub fn arity(&self) -> usize {
        self.types().len()
    }

    pub fn order(&self) -> u32 {
        match &self.shape {
            Shape::Base => 1,
            Shape::Product(l, r) => l.order().max(r.order()),
            Shape::Exp(c) => c.order() + 1,
        }
    }

    pub fn bound(&self) -> BoundExpr {
        match &self.shape {
            Shape::Base => BoundExpr::Base,
            Shape::Product(l, r) => BoundExpr::Mul(Box::new(l.bound()), Box::new(r.bound())),
            Shape::Exp(c) => BoundExpr::Exp2(Box::new(c.bound())),
        }
    }

    /// `(seed1[cs], ..., seeda[cs])` as source terms.
    pub(crate) fn seed_tuple(&self, fresh: &mut Fresh, cs: &str) -> Vec<String> {
        let tys = self.types();
        (1..=tys.len())
            .map(|i| bracket(fresh, &self.seed(i), &[cs.to_string()], &tys[i - 1]))
            .collect()
    }

    /// `(f1[cs, xs], ..., fa[cs, xs])` for `f` one of pred, suc, inv.
    pub(crate) fn op_tuple(
        &self,
        fresh: &mut Fresh,
        op: fn(&CountingModule, usize) -> String,
        cs: &str,
        xs: &[String],
    ) -> Vec<String> {
        let tys = self.types();
        let args = cat(&[&[cs.to_string()], xs]);
        (1..=tys.len())
            .map(|i| bracket(fresh, &op(self, i), &args, &tys[i - 1]))
            .collect()
    }

    /// Symbol declarations of this module and the modules it is built from.
    pub fn decls(&self) -> Vec<(String, TypeDecl)> {
        self.render().decls
    }

    /// Rule source lines, `forall` schemas included.
    pub fn rules(&self) -> Vec<String> {
        self.render().rules
    }

    fn render(&self) -> Out {
        let mut out = Out {
            decls: Vec::new(),
            rules: Vec::new(),
        };
        match &self.shape {
            Shape::Base => self.render_base(&mut out),
            Shape::Product(l, r) => {
                let (a, b) = (l.render(), r.render());
                out.decls.extend(a.decls);
                out.decls.extend(b.decls);
                out.rules.extend(a.rules);
                out.rules.extend(b.rules);
                self.render_product(l, r, &mut out);
            }
            Shape::Exp(c) => {
                let a = c.render();
                out.decls.extend(a.decls);
                out.rules.extend(a.rules);
                self.render_exp(c, &mut out);
            }
        }
        out
    }

    /// Sets of subterms of the input as pairs of bit sequences, one bit per
    /// suffix of `cs`, the whole input being least significant.
    fn render_base(&self, o: &mut Out) {
        let n = |s: &str| self.name(s);
        let (s, b) = (|| string(), || bool_());
        let forall_a = format!(
            "forall a in {{{}}}: ",
            self.alphabet
                .iter()
                .map(|a| crate::term::quote_name(a))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let forall_ab = format!(
            "forall a in {{{0}}}, b in {{{0}}}: ",
            self.alphabet
                .iter()
                .map(|a| crate::term::quote_name(a))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let (either, bot, all) = (n("either"), n("bot"), n("all"));
        let (eqlen, bitset, test, zo) = (n("eqLen"), n("bitset"), n("test"), n("zo"));
        let (copy, maybeadd, empty, tl) = (n("copy"), n("maybeadd"), n("empty"), n("tl"));
        let zero = self.zero();

        o.def(either.clone(), vec![s(), s()], "string");
        o.def(bot.clone(), vec![], "string");
        o.def(all.clone(), vec![s(), s()], "string");
        for i in 1..=2 {
            o.def(self.seed(i), vec![s()], "string");
            o.def(self.inv(i), vec![s(), s(), s()], "string");
            o.def(self.pred(i), vec![s(), s(), s()], "string");
            o.def(self.suc(i), vec![s(), s(), s()], "string");
            o.def(n(&format!("pz{i}")), vec![s(), s(), s(), b()], "string");
            o.def(n(&format!("pmain{i}")), vec![s(), s(), s(), b()], "string");
        }
        o.def(eqlen.clone(), vec![s(), s()], "bool");
        o.def(bitset.clone(), vec![s(), s(), s()], "bool");
        o.def(test.clone(), vec![b(), b()], "bool");
        o.def(zero.clone(), vec![s(), s(), s()], "bool");
        o.def(zo.clone(), vec![s(), s(), s(), b()], "bool");
        o.def(copy.clone(), vec![s(), s(), s(), b()], "string");
        o.def(maybeadd.clone(), vec![s(), b(), s()], "string");
        o.def(empty.clone(), vec![s()], "bool");
        o.def(tl.clone(), vec![s()], "string");

        o.rule(format!("{either}(x, y)"), "x".into());
        o.rule(format!("{either}(x, y)"), "y".into());
        o.rule(bot.clone(), bot.clone());
        o.rule(format!("{}(cs)", self.seed(1)), format!("{all}(cs, {bot})"));
        o.rule(format!("{}(cs)", self.seed(2)), bot.clone());
        o.rule(format!("{all}(|>, q)"), format!("{either}(|>, q)"));
        o.rules.push(format!(
            "{forall_a}rule {all}(a(xs), q) -> {all}(xs, {either}(a(xs), q));"
        ));
        o.rule(format!("{}(cs, s, t)", self.inv(1)), "t".into());
        o.rule(format!("{}(cs, s, t)", self.inv(2)), "s".into());
        o.rule(format!("{eqlen}(|>, |>)"), "true".into());
        o.rules
            .push(format!("{forall_a}rule {eqlen}(|>, a(ys)) -> false;"));
        o.rules.push(format!(
            "{forall_ab}rule {eqlen}(a(xs), b(ys)) -> {eqlen}(xs, ys);"
        ));
        o.rules
            .push(format!("{forall_a}rule {eqlen}(a(xs), |>) -> false;"));
        o.rule(
            format!("{bitset}(xs, s, t)"),
            format!("{test}({eqlen}(xs, s), {eqlen}(xs, t))"),
        );
        o.rule(format!("{test}(true, x)"), "true".into());
        o.rule(format!("{test}(x, true)"), "false".into());
        o.rule(
            format!("{zero}(xs, s, t)"),
            format!("{zo}(xs, s, t, {bitset}(xs, s, t))"),
        );
        o.rule(format!("{zo}(xs, s, t, true)"), "false".into());
        o.rules.push(format!(
            "{forall_a}rule {zo}(a(xs), s, t, false) -> {zero}(xs, s, t);"
        ));
        o.rule(format!("{zo}(|>, s, t, false)"), "true".into());
        o.rule(
            format!("{copy}(xs, s, t, false)"),
            format!("{maybeadd}(xs, {bitset}(xs, s, t), {copy}({tl}(xs), s, t, {empty}(xs)))"),
        );
        o.rule(format!("{copy}(xs, s, t, true)"), bot.clone());
        o.rule(
            format!("{maybeadd}(xs, true, q)"),
            format!("{either}(xs, q)"),
        );
        o.rule(format!("{maybeadd}(xs, false, q)"), "q".into());
        o.rule(format!("{empty}(|>)"), "true".into());
        o.rules
            .push(format!("{forall_a}rule {empty}(a(x)) -> false;"));
        o.rule(format!("{tl}(|>)"), "|>".into());
        o.rules.push(format!("{forall_a}rule {tl}(a(x)) -> x;"));
        for (i, keep) in [(1, "s"), (2, "t")] {
            let pz = n(&format!("pz{i}"));
            let pmain = n(&format!("pmain{i}"));
            o.rule(
                format!("{}(cs, s, t)", self.pred(i)),
                format!("{pz}(cs, s, t, {zero}(cs, s, t))"),
            );
            o.rule(format!("{pz}(cs, s, t, true)"), keep.into());
            o.rule(
                format!("{pz}(cs, s, t, false)"),
                format!("{pmain}(cs, s, t, {bitset}(cs, s, t))"),
            );
        }
        let (pm1, pm2) = (n("pmain1"), n("pmain2"));
        o.rule(
            format!("{pm1}(xs, s, t, true)"),
            format!("{copy}({tl}(xs), s, t, {empty}(xs))"),
        );
        o.rule(
            format!("{pm2}(xs, s, t, true)"),
            format!("{either}(xs, {copy}({tl}(xs), t, s, {empty}(xs)))"),
        );
        o.rule(
            format!("{pm1}(xs, s, t, false)"),
            format!("{either}(xs, {pm1}({tl}(xs), s, t, {bitset}({tl}(xs), s, t)))"),
        );
        o.rule(
            format!("{pm2}(xs, s, t, false)"),
            format!("{pm2}({tl}(xs), s, t, {bitset}({tl}(xs), s, t))"),
        );
        o.rule(
            format!("{}(cs, s, t)", self.suc(1)),
            format!("{}(cs, t, s)", self.pred(2)),
        );
        o.rule(
            format!("{}(cs, s, t)", self.suc(2)),
            format!("{}(cs, t, s)", self.pred(1)),
        );
    }

    /// Pairs `(i, j)` read as `i * Q + j`.
    fn render_product(&self, l: &CountingModule, r: &CountingModule, o: &mut Out) {
        let n = |s: &str| self.name(s);
        let tys = self.types();
        let (a, b) = (l.arity(), r.arity());
        let u = numbered("u", a);
        let v = numbered("v", b);
        let cs = vec!["cs".to_string()];
        let sigma = tys.clone();
        let and = n("and");
        o.def(and.clone(), vec![bool_(), bool_()], "bool");
        o.rule(format!("{and}(true, x)"), "x".into());
        o.rule(format!("{and}(false, y)"), "false".into());
        o.def(self.zero(), cat2(vec![string()], sigma.clone()), "bool");
        o.rule(
            format!("{}({})", self.zero(), join(&cat(&[&cs, &u, &v]))),
            format!(
                "{and}({}({}), {}({}))",
                l.zero(),
                join(&cat(&[&cs, &u])),
                r.zero(),
                join(&cat(&[&cs, &v]))
            ),
        );
        let rtys = r.types();
        for j in 1..=b {
            let (taus, out) = rtys[j - 1].uncurry();
            let z = numbered("z", taus.len());
            let nul = n(&format!("nul{j}"));
            o.def(nul.clone(), cat2(vec![string()], taus.clone()), out.name());
            let mut fresh = Fresh::default();
            let seeds = r.seed_tuple(&mut fresh, "cs");
            o.rule(
                format!("{nul}({})", join(&cat(&[&cs, &z]))),
                format!("{}({})", r.inv(j), join(&cat(&[&cs, &seeds, &z]))),
            );
        }
        for i in 1..=a + b {
            let (taus, out) = tys[i - 1].uncurry();
            let z = numbered("z", taus.len());
            let all = cat(&[&cs, &u, &v, &z]);
            let with_z = |m: &CountingModule,
                          xs: &[String],
                          k: usize,
                          op: fn(&CountingModule, usize) -> String| {
                format!("{}({})", op(m, k), join(&cat(&[&cs, xs, &z])))
            };
            let head = |f: &str, flags: &[&str]| {
                let flags: Vec<String> = flags.iter().map(|s| s.to_string()).collect();
                format!("{f}({})", join(&cat(&[&flags, &all])))
            };
            let targs = |k: usize| {
                cat2(
                    vec![bool_(); k],
                    cat2(vec![string()], cat2(sigma.clone(), taus.clone())),
                )
            };

            o.def(self.seed(i), cat2(vec![string()], taus.clone()), out.name());
            o.def(
                self.inv(i),
                cat2(vec![string()], cat2(sigma.clone(), taus.clone())),
                out.name(),
            );
            o.def(
                self.pred(i),
                cat2(vec![string()], cat2(sigma.clone(), taus.clone())),
                out.name(),
            );
            o.def(
                self.suc(i),
                cat2(vec![string()], cat2(sigma.clone(), taus.clone())),
                out.name(),
            );
            let ptest = n(&format!("ptest{i}"));
            let suctest = n(&format!("suctest{i}"));
            let sz = format!("({})", join(&cat(&[&cs, &z])));
            let mut fresh = Fresh::default();
            let rinv = r.op_tuple(&mut fresh, CountingModule::inv, "cs", &v);
            let linv = l.op_tuple(&mut fresh, CountingModule::inv, "cs", &u);
            let zero_v = format!("{}({})", r.zero(), join(&cat(&[&cs, &v])));
            let zero_u = format!("{}({})", l.zero(), join(&cat(&[&cs, &u])));
            let top_v = format!("{}({})", r.zero(), join(&cat(&[&cs, &rinv])));
            let top_u = format!("{}({})", l.zero(), join(&cat(&[&cs, &linv])));
            if i <= a {
                o.rule(
                    format!("{}{sz}", self.seed(i)),
                    format!("{}{sz}", l.seed(i)),
                );
                o.rule(
                    head(&self.inv(i), &[]),
                    with_z(l, &u, i, CountingModule::inv),
                );
                o.def(ptest.clone(), targs(1), out.name());
                o.rule(head(&self.pred(i), &[]), head(&ptest, &[&zero_v]));
                o.rule(head(&ptest, &["false"]), apply(&u[i - 1], &z));
                o.rule(
                    head(&ptest, &["true"]),
                    with_z(l, &u, i, CountingModule::pred),
                );
                o.def(suctest.clone(), targs(1), out.name());
                o.rule(head(&self.suc(i), &[]), head(&suctest, &[&top_v]));
                o.rule(head(&suctest, &["false"]), apply(&u[i - 1], &z));
                o.rule(
                    head(&suctest, &["true"]),
                    with_z(l, &u, i, CountingModule::suc),
                );
            } else {
                let j = i - a;
                o.rule(
                    format!("{}{sz}", self.seed(i)),
                    format!("{}{sz}", r.seed(j)),
                );
                o.rule(
                    head(&self.inv(i), &[]),
                    with_z(r, &v, j, CountingModule::inv),
                );
                // (0, 0) has no predecessor and (max, max) no successor; the
                // second flag keeps the low half in place there.
                o.def(ptest.clone(), targs(2), out.name());
                o.rule(head(&self.pred(i), &[]), head(&ptest, &[&zero_v, &zero_u]));
                o.rule(
                    head(&ptest, &["false", "w"]),
                    with_z(r, &v, j, CountingModule::pred),
                );
                o.rule(
                    head(&ptest, &["true", "false"]),
                    format!("{}{sz}", r.seed(j)),
                );
                o.rule(head(&ptest, &["true", "true"]), apply(&v[j - 1], &z));
                o.def(suctest.clone(), targs(2), out.name());
                o.rule(head(&self.suc(i), &[]), head(&suctest, &[&top_v, &top_u]));
                o.rule(
                    head(&suctest, &["false", "w"]),
                    with_z(r, &v, j, CountingModule::suc),
                );
                o.rule(
                    head(&suctest, &["true", "false"]),
                    format!("{}{sz}", n(&format!("nul{j}"))),
                );
                o.rule(head(&suctest, &["true", "true"]), apply(&v[j - 1], &z));
            }
        }
    }

    /// Bit vectors indexed by the numbers of the argument module; index
    /// `P - 1` is least significant.
    fn render_exp(&self, c: &CountingModule, o: &mut Out) {
        let n = |s: &str| self.name(s);
        let sig = self.types()[0].clone();
        let ks = c.types();
        let a = ks.len();
        let k = numbered("k", a);
        let z = numbered("z", a);
        let cs = vec!["cs".to_string()];
        let f = vec!["F".to_string()];
        let s = || vec![string()];
        let b = || vec![bool_()];
        let sv = || vec![sig.clone()];
        let (not, zerop, ztest) = (n("not"), n("zero'"), n("ztest"));
        let (flip, flipcheck, equal, eqtest) = (n("flip"), n("flipcheck"), n("equal"), n("eqtest"));
        let (predp, predtest) = (n("pred'"), n("predtest"));
        let (seed, inv, pred, suc, zero) = (
            self.seed(1),
            self.inv(1),
            self.pred(1),
            self.suc(1),
            self.zero(),
        );
        let call = |g: &str, parts: &[&[String]]| format!("{g}({})", join(&cat(parts)));

        o.def(not.clone(), b(), "bool");
        o.rule(format!("{not}(true)"), "false".into());
        o.rule(format!("{not}(false)"), "true".into());

        o.def(seed.clone(), cat2(s(), ks.clone()), "bool");
        o.rule(call(&seed, &[&cs, &k]), "true".into());

        o.def(inv.clone(), cat2(cat2(s(), sv()), ks.clone()), "bool");
        o.rule(
            call(&inv, &[&cs, &f, &k]),
            format!("{not}({})", apply("F", &k)),
        );

        let mut fresh = Fresh::default();
        o.def(zero.clone(), cat2(s(), sv()), "bool");
        o.def(zerop.clone(), cat2(cat2(s(), ks.clone()), sv()), "bool");
        o.def(
            ztest.clone(),
            cat2(cat2(cat2(b(), b()), cat2(s(), ks.clone())), sv()),
            "bool",
        );
        o.rule(
            call(&zero, &[&cs, &f]),
            call(&zerop, &[&cs, &c.seed_tuple(&mut fresh, "cs"), &f]),
        );
        o.rule(
            call(&zerop, &[&cs, &k, &f]),
            call(
                &ztest,
                &[&[apply("F", &k), call(&c.zero(), &[&cs, &k])], &cs, &k, &f],
            ),
        );
        let flag = |x: &str, y: &str| vec![x.to_string(), y.to_string()];
        o.rule(
            call(&ztest, &[&flag("true", "w"), &cs, &k, &f]),
            "false".into(),
        );
        o.rule(
            call(&ztest, &[&flag("false", "true"), &cs, &k, &f]),
            "true".into(),
        );
        let mut fresh = Fresh::default();
        o.rule(
            call(&ztest, &[&flag("false", "false"), &cs, &k, &f]),
            call(
                &zerop,
                &[
                    &cs,
                    &c.op_tuple(&mut fresh, CountingModule::pred, "cs", &k),
                    &f,
                ],
            ),
        );

        o.def(
            flip.clone(),
            cat2(cat2(cat2(s(), sv()), ks.clone()), ks.clone()),
            "bool",
        );
        o.def(flipcheck.clone(), cat2(cat2(sv(), ks.clone()), b()), "bool");
        o.def(
            equal.clone(),
            cat2(cat2(s(), ks.clone()), ks.clone()),
            "bool",
        );
        o.def(
            eqtest.clone(),
            cat2(cat2(cat2(b(), b()), cat2(s(), ks.clone())), ks.clone()),
            "bool",
        );
        o.rule(
            call(&flip, &[&cs, &f, &k, &z]),
            call(&flipcheck, &[&f, &z, &[call(&equal, &[&cs, &k, &z])]]),
        );
        o.rule(
            call(&flipcheck, &[&f, &z, &["false".into()]]),
            apply("F", &z),
        );
        o.rule(
            call(&flipcheck, &[&f, &z, &["true".into()]]),
            format!("{not}({})", apply("F", &z)),
        );
        o.rule(
            call(&equal, &[&cs, &k, &z]),
            call(
                &eqtest,
                &[
                    &[call(&c.zero(), &[&cs, &k]), call(&c.zero(), &[&cs, &z])],
                    &cs,
                    &k,
                    &z,
                ],
            ),
        );
        o.rule(
            call(&eqtest, &[&flag("true", "w"), &cs, &k, &z]),
            "w".into(),
        );
        o.rule(
            call(&eqtest, &[&flag("false", "true"), &cs, &k, &z]),
            "false".into(),
        );
        let mut fresh = Fresh::default();
        let pk = c.op_tuple(&mut fresh, CountingModule::pred, "cs", &k);
        let pz = c.op_tuple(&mut fresh, CountingModule::pred, "cs", &z);
        o.rule(
            call(&eqtest, &[&flag("false", "false"), &cs, &k, &z]),
            call(&equal, &[&cs, &pk, &pz]),
        );

        o.def(pred.clone(), cat2(cat2(s(), sv()), ks.clone()), "bool");
        o.def(
            predp.clone(),
            cat2(cat2(cat2(s(), ks.clone()), sv()), ks.clone()),
            "bool",
        );
        o.def(
            predtest.clone(),
            cat2(
                cat2(cat2(cat2(b(), b()), cat2(s(), ks.clone())), sv()),
                ks.clone(),
            ),
            "bool",
        );
        let mut fresh = Fresh::default();
        o.rule(
            call(&pred, &[&cs, &f, &z]),
            call(&predp, &[&cs, &c.seed_tuple(&mut fresh, "cs"), &f, &z]),
        );
        let mut fresh = Fresh::default();
        let flipped = bracket(&mut fresh, &flip, &cat(&[&cs, &f, &k]), &sig);
        o.rule(
            call(&predp, &[&cs, &k, &f, &z]),
            call(
                &predtest,
                &[
                    &[apply("F", &k), call(&c.zero(), &[&cs, &k])],
                    &cs,
                    &k,
                    &[flipped],
                    &z,
                ],
            ),
        );
        o.rule(
            call(&predtest, &[&flag("true", "w"), &cs, &k, &f, &z]),
            apply("F", &z),
        );
        o.rule(
            call(&predtest, &[&flag("false", "true"), &cs, &k, &f, &z]),
            format!("{not}({})", apply("F", &z)),
        );
        let mut fresh = Fresh::default();
        o.rule(
            call(&predtest, &[&flag("false", "false"), &cs, &k, &f, &z]),
            call(
                &predp,
                &[
                    &cs,
                    &c.op_tuple(&mut fresh, CountingModule::pred, "cs", &k),
                    &f,
                    &z,
                ],
            ),
        );

        o.def(suc.clone(), cat2(cat2(s(), sv()), ks.clone()), "bool");
        let mut fresh = Fresh::default();
        let inner = bracket(&mut fresh, &inv, &cat(&[&cs, &f]), &sig);
        let middle = bracket(&mut fresh, &pred, &cat(&[&cs, &[inner]]), &sig);
        o.rule(
            call(&suc, &[&cs, &f, &z]),
            call(&inv, &[&cs, &[middle], &z]),
        );
    }

    /// Declarations and rules as AFS source, without sorts or constructors.
    pub fn source(&self) -> String {
        let out = self.render();
        let mut s = String::new();
        for (name, decl) in &out.decls {
            s.push_str(&format!(
                "def {} : {decl};\n",
                crate::term::quote_name(name)
            ));
        }
        for r in &out.rules {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    /// The module with the sorts and constructors it needs, as a standalone system.
    pub fn standalone_source(&self) -> String {
        let syms: Vec<String> = self
            .alphabet
            .iter()
            .map(|a| crate::term::quote_name(a))
            .collect();
        format!(
            "sort string, bool;\ncons true, false : bool;\ncons |> : string;\ncons {} : [string] => string;\n{}",
            syms.join(", "),
            self.source()
        )
    }
}

fn cat2(mut a: Vec<Type>, b: Vec<Type>) -> Vec<Type> {
    a.extend(b);
    a
}

/// First-order `2^(n+1)`-counting module over `alphabet`.
pub fn base_module_over(alphabet: &[String]) -> CountingModule {
    CountingModule {
        alphabet: alphabet.to_vec(),
        shape: Shape::Base,
        path: String::new(),
    }
}

/// [`base_module_over`] the alphabet `{0, 1}`.
pub fn base_module() -> CountingModule {
    base_module_over(&["0".to_string(), "1".to_string()])
}

/// Counts to `P(n) * Q(n)` with `pi` counting to `P` and `rho` to `Q`.
pub fn product_module(pi: CountingModule, rho: CountingModule) -> CountingModule {
    assert_eq!(
        pi.alphabet, rho.alphabet,
        "factors count over the same input alphabet"
    );
    CountingModule {
        alphabet: pi.alphabet.clone(),
        shape: Shape::Product(Box::new(pi), Box::new(rho)),
        path: String::new(),
    }
    .with_path("")
}

/// Counts to `2^P(n)` with `pi` counting to `P`, one order higher.
pub fn exp_module(pi: CountingModule) -> CountingModule {
    CountingModule {
        alphabet: pi.alphabet.clone(),
        shape: Shape::Exp(Box::new(pi)),
        path: String::new(),
    }
    .with_path("")
}

/// `exp2^k(a * (n + 1))`-counting module of order `k` over `alphabet`.
pub fn power_module_over(k: u32, a: u32, alphabet: &[String]) -> CountingModule {
    assert!(k >= 1 && a >= 1, "order and factor are positive");
    let mut m = base_module_over(alphabet);
    for _ in 1..a {
        m = product_module(m, base_module_over(alphabet));
    }
    for _ in 1..k {
        m = exp_module(m);
    }
    m
}

pub fn power_module(k: u32, a: u32) -> CountingModule {
    power_module_over(k, a, &["0".to_string(), "1".to_string()])
}
