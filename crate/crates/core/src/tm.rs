//! Deterministic single-tape Turing machines on a right-infinite tape.
//!
//! Text format, one item per line, `//` comments:
//!
//! ```text
//! alphabet 0, 1, B;
//! input 0, 1;
//! states start, even, odd, accept, reject;
//! blank B;
//! even 1 -> 1 R odd
//! ```
//!
//! Items may share a line when separated by `;`. `blank` may be omitted when exactly one tape symbol is not an input symbol.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

pub const START: &str = "start";
pub const ACCEPT: &str = "accept";
pub const REJECT: &str = "reject";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    L,
    R,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::L => "L",
            Direction::R => "R",
        })
    }
}

/// `state read -> write dir next`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub state: String,
    pub read: String,
    pub write: String,
    pub dir: Direction,
    pub next: String,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} -> {} {} {}",
            self.state, self.read, self.write, self.dir, self.next
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub alphabet: Vec<String>,
    pub input: Vec<String>,
    pub blank: String,
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct TmParseError {
    pub line: usize,
    pub msg: String,
}

fn list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

impl TuringMachine {
    pub fn parse(src: &str) -> Result<TuringMachine, TmParseError> {
        let mut alphabet = None;
        let mut input = None;
        let mut states = None;
        let mut blank = None;
        let mut transitions = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let code = raw.split("//").next().unwrap_or("");
            for line in code.split(';').map(str::trim).filter(|l| !l.is_empty()) {
                let err = |msg: &str| TmParseError {
                    line: i + 1,
                    msg: msg.to_string(),
                };
                let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
                match word {
                    "alphabet" => alphabet = Some(list(rest)),
                    "input" => input = Some(list(rest)),
                    "states" => states = Some(list(rest)),
                    "blank" => {
                        let b = list(rest);
                        if b.len() != 1 {
                            return Err(err("blank takes exactly one symbol"));
                        }
                        blank = b.into_iter().next();
                    }
                    _ => {
                        let (lhs, rhs) = line
                            .split_once("->")
                            .ok_or_else(|| err("expected `state read -> write L|R state`"))?;
                        let l: Vec<&str> = lhs.split_whitespace().collect();
                        let r: Vec<&str> = rhs.split_whitespace().collect();
                        if l.len() != 2 || r.len() != 3 {
                            return Err(err("expected `state read -> write L|R state`"));
                        }
                        let dir = match r[1] {
                            "L" => Direction::L,
                            "R" => Direction::R,
                            d => return Err(err(&format!("direction must be L or R, found {d}"))),
                        };
                        transitions.push(Transition {
                            state: l[0].to_string(),
                            read: l[1].to_string(),
                            write: r[0].to_string(),
                            dir,
                            next: r[2].to_string(),
                        });
                    }
                }
            }
        }
        let end = src.lines().count().max(1);
        let missing = |what: &str| TmParseError {
            line: end,
            msg: format!("missing `{what}` declaration"),
        };
        let alphabet = alphabet.ok_or_else(|| missing("alphabet"))?;
        let input = input.ok_or_else(|| missing("input"))?;
        let states = states.ok_or_else(|| missing("states"))?;
        let blank = match blank {
            Some(b) => b,
            None => {
                let extra: Vec<&String> = alphabet.iter().filter(|a| !input.contains(a)).collect();
                match extra.as_slice() {
                    [b] => (*b).clone(),
                    _ => return Err(missing("blank")),
                }
            }
        };
        Ok(TuringMachine {
            alphabet,
            input,
            blank,
            states,
            transitions,
        })
    }

    /// The transition for `(state, read)`, the first one if there are several.
    pub fn transition(&self, state: &str, read: &str) -> Option<&Transition> {
        self.transitions
            .iter()
            .find(|t| t.state == state && t.read == read)
    }

    pub fn is_halting(state: &str) -> bool {
        state == ACCEPT || state == REJECT
    }
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {};", self.alphabet.join(", "))?;
        writeln!(f, "input {};", self.input.join(", "))?;
        writeln!(f, "states {};", self.states.join(", "))?;
        writeln!(f, "blank {};", self.blank)?;
        for t in &self.transitions {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Problems found by [`validate_tm`]; empty when the machine is usable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TmReport {
    pub errors: Vec<String>,
}

impl TmReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for TmReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.errors.is_empty() {
            return f.write_str("ok");
        }
        f.write_str(&self.errors.join("\n"))
    }
}

/// Checks alphabets, determinism and totality, and rejects machines that
/// may move left from position 0.
///
/// The left-move check over-approximates what can be at position 0: the
/// head starts there in `start` reading the blank, and returns there only
/// through a left move, reading whatever was written when it left.
pub fn validate_tm(tm: &TuringMachine) -> TmReport {
    let mut errors = Vec::new();
    let syms: BTreeSet<&str> = tm.alphabet.iter().map(String::as_str).collect();
    let states: BTreeSet<&str> = tm.states.iter().map(String::as_str).collect();
    for s in [START, ACCEPT, REJECT] {
        if !states.contains(s) {
            errors.push(format!("missing state {s}"));
        }
    }
    if !syms.contains(tm.blank.as_str()) {
        errors.push(format!("blank {} is not a tape symbol", tm.blank));
    }
    if tm.input.contains(&tm.blank) {
        errors.push(format!("blank {} is an input symbol", tm.blank));
    }
    for b in ["0", "1"] {
        if !tm.input.iter().any(|i| i == b) {
            errors.push(format!("input alphabet lacks {b}"));
        }
    }
    for i in &tm.input {
        if !syms.contains(i.as_str()) {
            errors.push(format!("input symbol {i} is not a tape symbol"));
        }
        if i.chars().count() != 1 {
            errors.push(format!("input symbol {i} is not a single character"));
        }
    }
    let mut seen: IndexMap<(&str, &str), usize> = IndexMap::new();
    for t in &tm.transitions {
        for (what, s) in [("state", &t.state), ("state", &t.next)] {
            if !states.contains(s.as_str()) {
                errors.push(format!("{t}: unknown {what} {s}"));
            }
        }
        for s in [&t.read, &t.write] {
            if !syms.contains(s.as_str()) {
                errors.push(format!("{t}: unknown symbol {s}"));
            }
        }
        if TuringMachine::is_halting(&t.state) {
            errors.push(format!("{t}: transition out of a halting state"));
        }
        *seen.entry((t.state.as_str(), t.read.as_str())).or_default() += 1;
    }
    for ((q, r), n) in &seen {
        if *n > 1 {
            errors.push(format!("{n} transitions for state {q} reading {r}"));
        }
    }
    for q in &tm.states {
        if TuringMachine::is_halting(q) {
            continue;
        }
        for r in &tm.alphabet {
            if !seen.contains_key(&(q.as_str(), r.as_str())) {
                errors.push(format!("no transition for state {q} reading {r}"));
            }
        }
    }
    // Pairs (state, symbol under the head) possible at position 0. Leaving
    // position 0 with write w may come back in any state entered by a left move.
    let returns: BTreeSet<&str> = tm
        .transitions
        .iter()
        .filter(|t| t.dir == Direction::L)
        .map(|t| t.next.as_str())
        .collect();
    let mut at0: BTreeSet<(&str, &str)> = BTreeSet::from([(START, tm.blank.as_str())]);
    let mut work: Vec<(&str, &str)> = at0.iter().copied().collect();
    let mut flagged = BTreeSet::new();
    while let Some((q, s)) = work.pop() {
        for (i, t) in tm.transitions.iter().enumerate() {
            if t.state != q || t.read != s {
                continue;
            }
            if t.dir == Direction::L {
                flagged.insert(i);
                continue;
            }
            for &r in &returns {
                if at0.insert((r, t.write.as_str())) {
                    work.push((r, t.write.as_str()));
                }
            }
        }
    }
    for i in flagged {
        errors.push(format!(
            "{}: may move left from position 0",
            tm.transitions[i]
        ));
    }
    TmReport { errors }
}

/// Tape contents (absent cells are blank), head position and state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub tape: BTreeMap<usize, String>,
    pub head: usize,
    pub state: String,
}

impl Configuration {
    /// `(␣ x1 … xn ␣ …, 0, start)`.
    pub fn initial(tm: &TuringMachine, input: &str) -> Result<Configuration, TmError> {
        let mut tape = BTreeMap::new();
        for (i, c) in input.chars().enumerate() {
            let s = c.to_string();
            if !tm.input.contains(&s) {
                return Err(TmError::UnknownInput(c));
            }
            tape.insert(i + 1, s);
        }
        Ok(Configuration {
            tape,
            head: 0,
            state: START.to_string(),
        })
    }

    pub fn read<'a>(&'a self, tm: &'a TuringMachine) -> &'a str {
        self.tape
            .get(&self.head)
            .map_or(tm.blank.as_str(), String::as_str)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmError {
    #[error("configuration is halted in {0}")]
    Halted(String),
    #[error("no transition for state {state} reading {read}")]
    Stuck { state: String, read: String },
    #[error("left move from position 0 in state {0}")]
    LeftUnderflow(String),
    #[error("input character {0} is not an input symbol")]
    UnknownInput(char),
}

/// Applies one transition: write, move, change state.
pub fn tm_step(tm: &TuringMachine, c: &Configuration) -> Result<Configuration, TmError> {
    if TuringMachine::is_halting(&c.state) {
        return Err(TmError::Halted(c.state.clone()));
    }
    let read = c.read(tm);
    let t = tm
        .transition(&c.state, read)
        .ok_or_else(|| TmError::Stuck {
            state: c.state.clone(),
            read: read.to_string(),
        })?;
    let mut tape = c.tape.clone();
    if t.write == tm.blank {
        tape.remove(&c.head);
    } else {
        tape.insert(c.head, t.write.clone());
    }
    let head = match t.dir {
        Direction::R => c.head + 1,
        Direction::L => c
            .head
            .checked_sub(1)
            .ok_or_else(|| TmError::LeftUnderflow(c.state.clone()))?,
    };
    Ok(Configuration {
        tape,
        head,
        state: t.next.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject,
    Timeout,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Accept => "accept",
            Outcome::Reject => "reject",
            Outcome::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub outcome: Outcome,
    pub steps: usize,
    pub last: Configuration,
}

/// Runs from the initial configuration for at most `fuel` steps.
pub fn tm_run(tm: &TuringMachine, input: &str, fuel: usize) -> Result<Run, TmError> {
    let mut c = Configuration::initial(tm, input)?;
    let mut steps = 0;
    loop {
        match c.state.as_str() {
            ACCEPT => {
                return Ok(Run {
                    outcome: Outcome::Accept,
                    steps,
                    last: c,
                })
            }
            REJECT => {
                return Ok(Run {
                    outcome: Outcome::Reject,
                    steps,
                    last: c,
                })
            }
            _ if steps == fuel => {
                return Ok(Run {
                    outcome: Outcome::Timeout,
                    steps,
                    last: c,
                })
            }
            _ => {}
        }
        c = tm_step(tm, &c)?;
        steps += 1;
    }
}
