//! The machine simulation: `tape(cs, n, p)` is the symbol at position `p`
//! before step `n`, `state(cs, n, p)` the state at step `n` if the head is
//! at `p` and `fail` otherwise. Every number is a tuple of module terms.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{join, CountingModule, Fresh};
use crate::afs::Afs;
use crate::syntax::{parse_afs, ParseError};
use crate::term::quote_name;
use crate::tm::{Direction, TuringMachine, ACCEPT, REJECT, START};
use crate::types::{Sort, Type, TypeDecl};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("tape symbol {0} clashes with a symbol of the simulation")]
    Clash(String),
    #[error("the module counts over {module:?} but the machine reads {machine:?}")]
    Alphabet {
        module: Vec<String>,
        machine: Vec<String>,
    },
    #[error("emitted system does not parse: {0}")]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug)]
pub struct CompiledAfs {
    pub afs: Afs,
    pub module: CountingModule,
    /// Each number is passed as this many arguments.
    pub tuple_arity: usize,
    pub source: String,
}

const SCAFFOLD: &[&str] = &[
    "true",
    "false",
    "fail",
    "L",
    "R",
    "action",
    "end",
    "NA",
    "ifelse_string",
    "ifelse_state",
    "ifelse_trans",
    "get",
    "inputtape",
    "tape",
    "tapex",
    "tapey",
    "state",
    "state0",
    "statex",
    "statey",
    "left",
    "transition",
    "transitionhelp",
    "decide",
    "findanswer",
    "test",
    "string",
    "bool",
    "trans",
    "dir",
];

struct Num<'a> {
    m: &'a CountingModule,
    tys: Vec<Type>,
}

impl Num<'_> {
    fn vars(&self, x: &str) -> Vec<String> {
        (1..=self.tys.len()).map(|i| format!("{x}{i}")).collect()
    }

    fn zero(&self, x: &str) -> String {
        format!("{}(cs, {})", self.m.zero(), join(&self.vars(x)))
    }

    fn pred(&self, fresh: &mut Fresh, x: &str) -> Vec<String> {
        self.m
            .op_tuple(fresh, CountingModule::pred, "cs", &self.vars(x))
    }

    fn suc(&self, fresh: &mut Fresh, x: &str) -> Vec<String> {
        self.m
            .op_tuple(fresh, CountingModule::suc, "cs", &self.vars(x))
    }
}

/// Emits the simulation of `tm` over `module`. The simulation runs for
/// `P(|cs|) - 1` steps on positions `0 .. P(|cs|) - 1`, so the machine
/// must halt within that many steps.
pub fn compile(tm: &TuringMachine, module: &CountingModule) -> Result<CompiledAfs, CompileError> {
    if module.alphabet != tm.input {
        return Err(CompileError::Alphabet {
            module: module.alphabet.clone(),
            machine: tm.input.clone(),
        });
    }
    let mut taken: BTreeSet<String> = SCAFFOLD.iter().map(|s| s.to_string()).collect();
    taken.extend(module.decls().into_iter().map(|(n, _)| n));
    for a in &tm.alphabet {
        if !taken.insert(a.clone()) {
            return Err(CompileError::Clash(a.clone()));
        }
    }
    // States clashing with another name get a suffix.
    let state_name = |s: &str| {
        if taken.contains(s) || tm.alphabet.iter().any(|a| a == s) {
            format!("{s}_st")
        } else {
            s.to_string()
        }
    };
    let st = |s: &str| quote_name(&state_name(s));
    let sym = |a: &str| quote_name(a);

    let num = Num {
        m: module,
        tys: module.types(),
    };
    let a = num.tys.len();
    let s = || Type::sort("string");
    let sv = || num.tys.clone();
    let decl = |args: Vec<Vec<Type>>, out: &str| TypeDecl::new(args.concat(), Sort::new(out));
    let (n, p, i) = (
        join(&num.vars("n")),
        join(&num.vars("p")),
        join(&num.vars("i")),
    );

    let mut src = String::new();
    src.push_str("sort string, bool, state, trans, dir;\n");
    src.push_str("cons true, false : bool;\ncons |> : string;\n");
    let syms: Vec<String> = tm.alphabet.iter().map(|a| sym(a)).collect();
    src.push_str(&format!("cons {} : [string] => string;\n", syms.join(", ")));
    let mut states: Vec<String> = tm.states.iter().map(|s| st(s)).collect();
    states.push("fail".to_string());
    src.push_str(&format!("cons {} : state;\n", states.join(", ")));
    src.push_str("cons L, R : dir;\ncons action : [string x dir x state] => trans;\ncons end : [state] => trans;\ncons NA : trans;\n");

    let defs: Vec<(&str, TypeDecl)> = vec![
        (
            "ifelse_string",
            decl(vec![vec![Type::sort("bool"), s(), s()]], "string"),
        ),
        (
            "ifelse_state",
            decl(
                vec![vec![
                    Type::sort("bool"),
                    Type::sort("state"),
                    Type::sort("state"),
                ]],
                "state",
            ),
        ),
        (
            "ifelse_trans",
            decl(
                vec![vec![
                    Type::sort("bool"),
                    Type::sort("trans"),
                    Type::sort("trans"),
                ]],
                "trans",
            ),
        ),
        ("get", decl(vec![vec![s(), s()], sv(), vec![s()]], "string")),
        ("inputtape", decl(vec![vec![s()], sv()], "string")),
        ("tape", decl(vec![vec![s()], sv(), sv()], "string")),
        ("tapex", decl(vec![vec![s()], sv(), sv()], "string")),
        (
            "tapey",
            decl(
                vec![vec![s()], sv(), sv(), vec![Type::sort("trans")]],
                "string",
            ),
        ),
        ("state", decl(vec![vec![s()], sv(), sv()], "state")),
        ("state0", decl(vec![vec![s()], sv()], "state")),
        ("statex", decl(vec![vec![s()], sv(), sv()], "state")),
        ("statey", decl(vec![vec![Type::sort("trans"); 3]], "state")),
        ("left", decl(vec![vec![s()], sv(), sv()], "trans")),
        ("transition", decl(vec![vec![s()], sv(), sv()], "trans")),
        (
            "transitionhelp",
            decl(vec![vec![Type::sort("state"), s()]], "trans"),
        ),
        ("decide", decl(vec![vec![s()]], "bool")),
        ("findanswer", decl(vec![vec![s()], sv(), sv()], "bool")),
        (
            "test",
            decl(vec![vec![Type::sort("state"), s()], sv(), sv()], "bool"),
        ),
    ];
    for (name, d) in &defs {
        src.push_str(&format!("def {name} : {d};\n"));
    }
    src.push_str(&module.source());

    let mut rule = |l: String, r: String| src.push_str(&format!("rule {l} -> {r};\n"));
    for sort in ["string", "state", "trans"] {
        rule(format!("ifelse_{sort}(true, y, z)"), "y".into());
        rule(format!("ifelse_{sort}(false, y, z)"), "z".into());
    }
    let blank = format!("{}(|>)", sym(&tm.blank));
    let mut f = Fresh::default();
    rule(format!("get(cs, |>, {i}, q)"), "q".into());
    for c in &tm.input {
        let c = sym(c);
        rule(
            format!("get(cs, {c}(xs), {i}, q)"),
            format!(
                "ifelse_string({}, {c}(|>), get(cs, xs, {}, q))",
                num.zero("i"),
                join(&num.pred(&mut f, "i"))
            ),
        );
    }
    rule(
        format!("inputtape(cs, {p})"),
        format!(
            "ifelse_string({}, {blank}, get(cs, cs, {}, {blank}))",
            num.zero("p"),
            join(&num.pred(&mut f, "p"))
        ),
    );
    rule(
        format!("tape(cs, {n}, {p})"),
        format!(
            "ifelse_string({}, inputtape(cs, {p}), tapex(cs, {}, {p}))",
            num.zero("n"),
            join(&num.pred(&mut f, "n"))
        ),
    );
    rule(
        format!("tapex(cs, {n}, {p})"),
        format!("tapey(cs, {n}, {p}, transition(cs, {n}, {p}))"),
    );
    rule(format!("tapey(cs, {n}, {p}, action(q, d, s))"), "q".into());
    rule(
        format!("tapey(cs, {n}, {p}, NA)"),
        format!("tape(cs, {n}, {p})"),
    );
    rule(
        format!("tapey(cs, {n}, {p}, end(s))"),
        format!("tape(cs, {n}, {p})"),
    );
    rule(
        format!("state(cs, {n}, {p})"),
        format!(
            "ifelse_state({}, state0(cs, {p}), statex(cs, {}, {p}))",
            num.zero("n"),
            join(&num.pred(&mut f, "n"))
        ),
    );
    let fail = "fail".to_string();
    rule(
        format!("state0(cs, {p})"),
        format!("ifelse_state({}, {}, {fail})", num.zero("p"), st(START)),
    );
    // The left neighbour of position 0 does not exist; without this guard
    // p - 1 would clamp to 0 and read the head's own transition.
    rule(
        format!("statex(cs, {n}, {p})"),
        format!(
            "statey(left(cs, {n}, {p}), transition(cs, {n}, {p}), transition(cs, {n}, {}))",
            join(&num.suc(&mut f, "p"))
        ),
    );
    rule(
        format!("left(cs, {n}, {p})"),
        format!(
            "ifelse_trans({}, NA, transition(cs, {n}, {}))",
            num.zero("p"),
            join(&num.pred(&mut f, "p"))
        ),
    );
    rule("statey(action(q, R, s), y, z)".into(), "s".into());
    rule("statey(action(q, L, s), y, z)".into(), fail.clone());
    rule("statey(end(s), y, z)".into(), fail.clone());
    rule("statey(NA, end(s), z)".into(), "s".into());
    rule("statey(NA, action(q, d, s), z)".into(), fail.clone());
    rule("statey(NA, NA, action(q, L, s))".into(), "s".into());
    rule("statey(NA, NA, action(q, R, s))".into(), fail.clone());
    rule("statey(NA, NA, end(s))".into(), fail.clone());
    rule("statey(NA, NA, NA)".into(), fail.clone());
    rule(
        format!("transition(cs, {n}, {p})"),
        format!("transitionhelp(state(cs, {n}, {p}), tape(cs, {n}, {p}))"),
    );
    rule(format!("transitionhelp({fail}, q)"), "NA".into());
    for t in &tm.transitions {
        let d = match t.dir {
            Direction::L => "L",
            Direction::R => "R",
        };
        rule(
            format!("transitionhelp({}, {}(|>))", st(&t.state), sym(&t.read)),
            format!("action({}(|>), {d}, {})", sym(&t.write), st(&t.next)),
        );
    }
    for h in [ACCEPT, REJECT] {
        rule(
            format!("transitionhelp({}, q)", st(h)),
            format!("end({})", st(h)),
        );
    }
    let seeds = join(&module.seed_tuple(&mut f, "cs"));
    rule(
        "decide(cs)".into(),
        format!("findanswer(cs, {seeds}, {seeds})"),
    );
    rule(
        format!("findanswer(cs, {n}, {p})"),
        format!("test(state(cs, {n}, {p}), cs, {n}, {p})"),
    );
    rule(
        format!("test({fail}, cs, {n}, {p})"),
        format!("findanswer(cs, {n}, {})", join(&num.pred(&mut f, "p"))),
    );
    rule(format!("test({}, cs, {n}, {p})", st(ACCEPT)), "true".into());
    rule(
        format!("test({}, cs, {n}, {p})", st(REJECT)),
        "false".into(),
    );

    let afs = parse_afs(&src)?;
    Ok(CompiledAfs {
        afs,
        module: module.clone(),
        tuple_arity: a,
        source: src,
    })
}
