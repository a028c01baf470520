//! Built-in example systems and machines.

use std::fmt;

use crate::afs::Afs;
use crate::analysis::validate;
use crate::compiler::{base_module_over, compile};
use crate::rewrite::{accepts_ordered, SearchBudget, SearchOrder, Verdict};
use crate::saturation::{decide_by_saturation, SaturationOptions};
use crate::syntax::{parse_afs, ParseError};
use crate::tm::{tm_run, Outcome, TuringMachine};

pub const COUNT: &str = include_str!("../corpus/count.afs");
pub const COUNT_BAD: &str = include_str!("../corpus/count_bad.afs");
pub const HOCOUNT: &str = include_str!("../corpus/hocount.afs");
pub const PALINDROME: &str = include_str!("../corpus/palindrome.afs");
pub const SAT: &str = include_str!("../corpus/sat.afs");
pub const NONLINEAR_TM: &str = include_str!("../corpus/nonlinear_tm.afs");
pub const PARITY_TM: &str = include_str!("../corpus/parity.tm");
pub const HAS_ZERO_TM: &str = include_str!("../corpus/has_zero.tm");
pub const FIRST_ONE_TM: &str = include_str!("../corpus/first_one.tm");

/// Built-in AFS sources by name.
pub const AFS_SOURCES: &[(&str, &str)] = &[
    ("count", COUNT),
    ("count_bad", COUNT_BAD),
    ("hocount", HOCOUNT),
    ("palindrome", PALINDROME),
    ("sat", SAT),
    ("nonlinear_tm", NONLINEAR_TM),
];

/// Built-in machine sources by name.
pub const TM_SOURCES: &[(&str, &str)] = &[
    ("parity", PARITY_TM),
    ("has_zero", HAS_ZERO_TM),
    ("first_one", FIRST_ONE_TM),
];

pub fn afs_source(name: &str) -> Option<&'static str> {
    AFS_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
}

pub fn tm_source(name: &str) -> Option<&'static str> {
    TM_SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a built-in AFS. Panics on unknown names; the sources are fixed.
pub fn load(name: &str) -> Afs {
    try_load(name).unwrap_or_else(|e| panic!("built-in {name}: {e}"))
}

pub fn try_load(name: &str) -> Result<Afs, ParseError> {
    let src = afs_source(name).ok_or_else(|| ParseError {
        line: 0,
        col: 0,
        msg: format!("no built-in system {name}"),
    })?;
    parse_afs(src)
}

/// How an acceptance vector is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Saturation decides; bounded engine search must not contradict it.
    Saturation,
    /// Smallest-first engine search only, for systems saturation does not
    /// apply to.
    Engine,
}

#[derive(Clone, Debug)]
pub struct Vector {
    pub input: String,
    pub accepted: bool,
    pub route: Route,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub source: String,
    /// The exact rendered validation report.
    pub expected_validation: String,
    pub vectors: Vec<Vector>,
}

const PASS_REPORT: &str = include_str!("../corpus/pass.report");

fn vectors(route: Route, vs: &[(&str, bool)]) -> Vec<Vector> {
    vs.iter()
        .map(|&(input, accepted)| Vector {
            input: input.to_string(),
            accepted,
            route,
        })
        .collect()
}

fn entry(name: &str, source: &str, report: &str, vs: Vec<Vector>) -> CorpusEntry {
    CorpusEntry {
        name: name.to_string(),
        source: source.to_string(),
        expected_validation: report.to_string(),
        vectors: vs,
    }
}

/// Every built-in system with its expected report and acceptance vectors,
/// plus each built-in machine compiled over the base counting module with
/// vectors taken from running the machine.
pub fn entries() -> Vec<CorpusEntry> {
    use Route::*;
    let mut out = vec![
        entry(
            "count",
            COUNT,
            include_str!("../corpus/count.report"),
            Vec::new(),
        ),
        entry(
            "count_bad",
            COUNT_BAD,
            include_str!("../corpus/count_bad.report"),
            Vec::new(),
        ),
        entry("hocount", HOCOUNT, PASS_REPORT, Vec::new()),
        entry(
            "palindrome",
            PALINDROME,
            PASS_REPORT,
            vectors(
                Saturation,
                &[
                    ("0110", true),
                    ("10", false),
                    ("1", true),
                    ("010", true),
                    ("011", false),
                ],
            ),
        ),
        entry(
            "sat",
            SAT,
            PASS_REPORT,
            vectors(
                Saturation,
                &[
                    ("10?#?10#", true),
                    ("1#0#", false),
                    ("11?#000#?11#", true),
                    ("1#", true),
                ],
            ),
        ),
    ];
    // Search cannot refute for this system, so only the accepted words are
    // vectors.
    let first_one = TuringMachine::parse(FIRST_ONE_TM).expect("built-in first_one");
    let accepted = (1..=2)
        .flat_map(|n| words(&first_one.input, n))
        .filter(|w| tm_run(&first_one, w, 1 << 10).is_ok_and(|r| r.outcome == Outcome::Accept))
        .map(|input| Vector {
            input,
            accepted: true,
            route: Engine,
        })
        .collect();
    out.push(entry(
        "nonlinear_tm",
        NONLINEAR_TM,
        include_str!("../corpus/nonlinear_tm.report"),
        accepted,
    ));
    for (name, src) in TM_SOURCES {
        let tm = TuringMachine::parse(src).unwrap_or_else(|e| panic!("built-in {name}: {e}"));
        let module = base_module_over(&tm.input);
        let compiled = compile(&tm, &module).unwrap_or_else(|e| panic!("built-in {name}: {e}"));
        let mut vs = Vec::new();
        for n in 1..=2 {
            for w in words(&tm.input, n) {
                let run = tm_run(&tm, &w, 1 << 10).unwrap_or_else(|e| panic!("{name} on {w}: {e}"));
                vs.push(Vector {
                    input: w,
                    accepted: run.outcome == Outcome::Accept,
                    route: Saturation,
                });
            }
        }
        out.push(entry(
            &format!("{name}_compiled"),
            &compiled.source,
            PASS_REPORT,
            vs,
        ));
    }
    out
}

fn words(alphabet: &[String], n: usize) -> Vec<String> {
    if n == 0 {
        return vec![String::new()];
    }
    words(alphabet, n - 1)
        .into_iter()
        .flat_map(|w| alphabet.iter().map(move |a| format!("{w}{a}")))
        .collect()
}

#[derive(Clone, Debug)]
pub struct VectorResult {
    pub input: String,
    pub expected: bool,
    pub saturation: Option<Result<bool, String>>,
    pub engine: Verdict,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct EntryResult {
    pub name: String,
    /// `None` when the report matches, the actual report otherwise.
    pub validation_mismatch: Option<String>,
    pub parse_error: Option<String>,
    pub vectors: Vec<VectorResult>,
}

impl EntryResult {
    pub fn pass(&self) -> bool {
        self.parse_error.is_none()
            && self.validation_mismatch.is_none()
            && self.vectors.iter().all(|v| v.pass)
    }
}

#[derive(Clone, Debug)]
pub struct CorpusSummary {
    pub entries: Vec<EntryResult>,
}

impl CorpusSummary {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(EntryResult::pass)
    }
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {}", if e.pass() { "PASS" } else { "FAIL" }, e.name)?;
            if let Some(err) = &e.parse_error {
                writeln!(f, "  parse error: {err}")?;
            }
            match &e.validation_mismatch {
                Some(actual) => writeln!(f, "  validation: mismatch, got\n{}", actual.trim_end())?,
                None => writeln!(f, "  validation: as expected")?,
            }
            for v in &e.vectors {
                let sat = match &v.saturation {
                    None => "-".to_string(),
                    Some(Ok(b)) => b.to_string(),
                    Some(Err(e)) => format!("error ({e})"),
                };
                writeln!(
                    f,
                    "  {} {:?} expected {} saturation {} engine {}",
                    if v.pass { "pass" } else { "FAIL" },
                    v.input,
                    v.expected,
                    sat,
                    v.engine
                )?;
            }
        }
        let passed = self.entries.iter().filter(|e| e.pass()).count();
        write!(f, "{passed}/{} entries pass", self.entries.len())
    }
}

/// Engine budget for acceptance vectors; an exhausted budget is `unknown`,
/// which only fails engine-routed vectors.
pub const VECTOR_BUDGET: SearchBudget = SearchBudget {
    max_visited: 200_000,
    max_depth: 10_000,
};

pub fn run_entry(e: &CorpusEntry) -> EntryResult {
    let afs = match parse_afs(&e.source) {
        Ok(a) => a,
        Err(err) => {
            return EntryResult {
                name: e.name.clone(),
                validation_mismatch: None,
                parse_error: Some(err.to_string()),
                vectors: Vec::new(),
            }
        }
    };
    let report = validate(&afs).render();
    let validation_mismatch = (report != e.expected_validation).then_some(report);
    let vectors = e
        .vectors
        .iter()
        .map(|v| {
            let order = match v.route {
                Route::Saturation => SearchOrder::BreadthFirst,
                Route::Engine => SearchOrder::SmallestFirst,
            };
            let engine = accepts_ordered(&afs, &v.input, VECTOR_BUDGET, order)
                .map(|(verdict, _)| verdict)
                .unwrap_or(Verdict::Unknown);
            let agrees = |verdict: Verdict| match verdict {
                Verdict::Accepted => v.accepted,
                Verdict::Refuted => !v.accepted,
                Verdict::Unknown => true,
            };
            let (saturation, pass) = match v.route {
                Route::Saturation => {
                    let s = decide_by_saturation(&afs, &v.input, &SaturationOptions::default())
                        .map_err(|e| e.to_string());
                    let pass = s == Ok(v.accepted) && agrees(engine);
                    (Some(s), pass)
                }
                Route::Engine => (None, engine != Verdict::Unknown && agrees(engine)),
            };
            VectorResult {
                input: v.input.clone(),
                expected: v.accepted,
                saturation,
                engine,
                pass,
            }
        })
        .collect();
    EntryResult {
        name: e.name.clone(),
        validation_mismatch,
        parse_error: None,
        vectors,
    }
}

/// Runs every entry, each on its own thread.
pub fn run_corpus() -> CorpusSummary {
    let entries = entries();
    let results = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .iter()
            .map(|e| s.spawn(move || run_entry(e)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("corpus entry panicked"))
            .collect()
    });
    CorpusSummary { entries: results }
}
