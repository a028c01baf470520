//! One-step reduction, exhaustive search for data normal forms, and acceptance.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::rc::Rc;

use indexmap::IndexMap;
use rustc_hash::{FxBuildHasher, FxHashMap};
use thiserror::Error;

use crate::afs::{Afs, EncodeError};
use crate::syntax::{parse_term, ParseError};
use crate::term::{match_pattern, symbol_bit, Term, TermKind};

/// Which rule fired in a step; `None` is a beta step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub position: Vec<usize>,
    pub rule: Option<usize>,
    pub result: Term,
}

/// Mask of the defined symbols of `afs`, for skipping redex-free subterms.
pub(crate) fn defined_mask(afs: &Afs) -> u64 {
    afs.signature()
        .defined()
        .fold(0, |m, f| m | symbol_bit(f.name()))
}

fn may_reduce(t: &Term, mask: u64) -> bool {
    t.has_app() || t.symbol_mask() & mask != 0
}

fn steps_rec(afs: &Afs, mask: u64, t: &Term, pos: &mut Vec<usize>, out: &mut Vec<Step>) {
    if !may_reduce(t, mask) {
        return;
    }
    match t.kind() {
        TermKind::Fun(f, _) if afs.is_defined(f) => {
            for &i in afs.rule_indices_for(f.name()) {
                let r = &afs.rules()[i];
                if let Some(g) = match_pattern(&r.lhs, t) {
                    out.push(Step {
                        position: pos.clone(),
                        rule: Some(i),
                        result: r.rhs.subst(&g),
                    });
                }
            }
        }
        TermKind::App([f, a]) => {
            if let Some(r) = f.instantiate_abs(a) {
                out.push(Step {
                    position: pos.clone(),
                    rule: None,
                    result: r,
                });
            }
        }
        _ => {}
    }
    for (i, c) in t.children().iter().enumerate() {
        let start = out.len();
        pos.push(i);
        steps_rec(afs, mask, c, pos, out);
        pos.pop();
        for s in &mut out[start..] {
            s.result = t.replace_at(&s.position[pos.len()..pos.len() + 1], s.result.clone());
        }
    }
}

/// All one-step reductions of `t`, in position pre-order and rule order.
pub fn one_step(afs: &Afs, t: &Term) -> Vec<Step> {
    let mut out = Vec::new();
    steps_rec(afs, defined_mask(afs), t, &mut Vec::new(), &mut out);
    out
}

/// The set of one-step successors of `t`, deduplicated modulo alpha.
pub fn one_step_reducts(afs: &Afs, t: &Term) -> Vec<Term> {
    reducts_masked(afs, defined_mask(afs), t)
}

fn reducts_masked(afs: &Afs, mask: u64, t: &Term) -> Vec<Term> {
    let mut steps = Vec::new();
    steps_rec(afs, mask, t, &mut Vec::new(), &mut steps);
    let mut seen: IndexMap<Term, (), FxBuildHasher> = IndexMap::default();
    for s in steps {
        seen.entry(s.result).or_insert(());
    }
    seen.into_keys().collect()
}

/// One-step reducts memoized per subterm. Hash-consing makes subterms
/// shared between search states cheap to look up, so every distinct
/// subterm is matched against the rules once.
pub struct ReductCache<'a> {
    afs: &'a Afs,
    mask: u64,
    cache: FxHashMap<Term, Rc<[Term]>>,
}

impl<'a> ReductCache<'a> {
    pub fn new(afs: &'a Afs) -> ReductCache<'a> {
        ReductCache {
            afs,
            mask: defined_mask(afs),
            cache: FxHashMap::default(),
        }
    }

    /// Same result and order as [`one_step_reducts`].
    pub fn reducts(&mut self, t: &Term) -> Rc<[Term]> {
        if !may_reduce(t, self.mask) {
            return Rc::from([]);
        }
        if let Some(r) = self.cache.get(t) {
            return r.clone();
        }
        let mut out: IndexMap<Term, (), FxBuildHasher> = IndexMap::default();
        match t.kind() {
            TermKind::Fun(f, _) if self.afs.is_defined(f) => {
                for &i in self.afs.rule_indices_for(f.name()) {
                    let r = &self.afs.rules()[i];
                    if let Some(g) = match_pattern(&r.lhs, t) {
                        out.insert(r.rhs.subst(&g), ());
                    }
                }
            }
            TermKind::App([f, a]) => {
                if let Some(r) = f.instantiate_abs(a) {
                    out.insert(r, ());
                }
            }
            _ => {}
        }
        for (i, c) in t.children().iter().enumerate() {
            for r in self.reducts(c).iter() {
                out.insert(t.replace_at(&[i], r.clone()), ());
            }
        }
        let r: Rc<[Term]> = out.into_keys().collect();
        self.cache.insert(t.clone(), r.clone());
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_visited: usize,
    pub max_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_visited: 1_000_000,
            max_depth: 10_000,
        }
    }
}

impl SearchBudget {
    pub fn new(max_visited: usize, max_depth: usize) -> SearchBudget {
        assert!(
            max_visited > 0 && max_depth > 0,
            "search budgets are positive"
        );
        SearchBudget {
            max_visited,
            max_depth,
        }
    }
}

/// Outcome of an exploration of the reduct graph.
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Reachable data normal forms, in discovery order.
    pub data_normal_forms: Vec<Term>,
    /// The whole reachable set was explored.
    pub exhausted: bool,
    pub visited: usize,
    graph: IndexMap<Term, (usize, u32), FxBuildHasher>,
}

impl SearchResult {
    /// The path along which `target` was first reached, if it was visited;
    /// a shortest one under breadth-first order.
    pub fn trace(&self, target: &Term) -> Option<Vec<Term>> {
        let mut i = self.graph.get_index_of(target)?;
        let mut path = Vec::new();
        loop {
            let (t, &(parent, _)) = self.graph.get_index(i).expect("index in graph");
            path.push(t.clone());
            if parent == usize::MAX {
                break;
            }
            i = parent;
        }
        path.reverse();
        Some(path)
    }
}

/// Breadth-first search from `start`, collecting data normal forms.
pub fn search_data_normal_forms(afs: &Afs, start: &Term, budget: SearchBudget) -> SearchResult {
    search_until(afs, start, budget, |_| false)
}

/// Frontier order of a search. Both explore the same graph and agree on
/// everything once exhausted; they differ in what a budget cuts off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    #[default]
    BreadthFirst,
    /// Smallest term first, ties in discovery order. Reaches long witnesses
    /// that need few large intermediate terms, such as those of systems that
    /// guess a list and compare it with a non-left-linear rule.
    SmallestFirst,
}

enum Frontier {
    Fifo(VecDeque<usize>),
    Heap(BinaryHeap<Reverse<(u32, usize)>>),
}

impl Frontier {
    fn pop(&mut self) -> Option<usize> {
        match self {
            Frontier::Fifo(q) => q.pop_front(),
            Frontier::Heap(h) => h.pop().map(|Reverse((_, i))| i),
        }
    }

    fn push(&mut self, i: usize, t: &Term) {
        match self {
            Frontier::Fifo(q) => q.push_back(i),
            Frontier::Heap(h) => h.push(Reverse((t.size(), i))),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Frontier::Fifo(q) => q.is_empty(),
            Frontier::Heap(h) => h.is_empty(),
        }
    }
}

/// As [`search_data_normal_forms`], stopping early once `stop` holds for a
/// data normal form.
pub fn search_until(
    afs: &Afs,
    start: &Term,
    budget: SearchBudget,
    stop: impl Fn(&Term) -> bool,
) -> SearchResult {
    search_ordered(afs, start, budget, SearchOrder::BreadthFirst, stop)
}

/// As [`search_until`] with the given frontier order.
pub fn search_ordered(
    afs: &Afs,
    start: &Term,
    budget: SearchBudget,
    order: SearchOrder,
    stop: impl Fn(&Term) -> bool,
) -> SearchResult {
    let mut reducer = ReductCache::new(afs);
    let mut graph: IndexMap<Term, (usize, u32), FxBuildHasher> = IndexMap::default();
    graph.insert(start.clone(), (usize::MAX, 0));
    let mut queue = match order {
        SearchOrder::BreadthFirst => Frontier::Fifo(VecDeque::new()),
        SearchOrder::SmallestFirst => Frontier::Heap(BinaryHeap::new()),
    };
    queue.push(0, start);
    let mut found = Vec::new();
    let mut complete = true;
    while let Some(i) = queue.pop() {
        let (t, &(_, depth)) = graph.get_index(i).expect("queued index");
        let t = t.clone();
        if afs.is_data(&t) {
            found.push(t.clone());
            if stop(&t) {
                complete = queue.is_empty();
                break;
            }
            continue;
        }
        let succ = reducer.reducts(&t);
        if succ.is_empty() {
            continue;
        }
        if depth as usize >= budget.max_depth {
            complete = false;
            continue;
        }
        for u in succ.iter() {
            if graph.contains_key(u) {
                continue;
            }
            if graph.len() >= budget.max_visited {
                complete = false;
                break;
            }
            graph.insert(u.clone(), (i, depth + 1));
            queue.push(graph.len() - 1, u);
        }
        if !complete && graph.len() >= budget.max_visited {
            break;
        }
    }
    let exhausted = complete && queue.is_empty();
    SearchResult {
        data_normal_forms: found,
        exhausted,
        visited: graph.len(),
        graph,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Refuted,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Refuted => "refuted",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AcceptError {
    #[error("the system has no symbol decide : [string] => bool")]
    MissingDecide,
    #[error("{0}")]
    Encode(#[from] EncodeError),
    #[error("the system has no constructor true : bool")]
    MissingTrue,
}

/// `decide(⌜input⌝)` for an input word.
pub fn decide_term(afs: &Afs, input: &str) -> Result<Term, AcceptError> {
    let decide = afs.decide_symbol().ok_or(AcceptError::MissingDecide)?;
    let arg = afs.encode_input(input)?;
    Ok(Term::fun(decide, vec![arg]).expect("decide is applied to a string"))
}

pub fn true_term(afs: &Afs) -> Result<Term, AcceptError> {
    let t = afs
        .symbol("true")
        .filter(|s| afs.is_constructor(s) && s.arity() == 0)
        .ok_or(AcceptError::MissingTrue)?;
    Ok(Term::constant(t).expect("constant"))
}

/// Searches from `decide(⌜input⌝)` until `true` is found or the space is exhausted.
pub fn accepts(
    afs: &Afs,
    input: &str,
    budget: SearchBudget,
) -> Result<(Verdict, SearchResult), AcceptError> {
    accepts_ordered(afs, input, budget, SearchOrder::BreadthFirst)
}

/// As [`accepts`] with the given frontier order.
pub fn accepts_ordered(
    afs: &Afs,
    input: &str,
    budget: SearchBudget,
    order: SearchOrder,
) -> Result<(Verdict, SearchResult), AcceptError> {
    let start = decide_term(afs, input)?;
    let tt = true_term(afs)?;
    let res = search_ordered(afs, &start, budget, order, |t| *t == tt);
    let verdict = if res.data_normal_forms.contains(&tt) {
        Verdict::Accepted
    } else if res.exhausted {
        Verdict::Refuted
    } else {
        Verdict::Unknown
    };
    Ok((verdict, res))
}

/// Renders a reduction path, one term per line.
pub fn render_trace(path: &[Term]) -> String {
    let mut out = String::new();
    for t in path {
        out.push_str(&t.unicode());
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("line {line}: {err}")]
    Parse { line: usize, err: ParseError },
    #[error("line {line} is not a one-step reduct of line {}", line - 1)]
    NotAStep { line: usize },
    #[error("empty trace")]
    Empty,
}

/// Checks that each line of a printed trace is a one-step reduct of the previous one.
pub fn replay_trace(afs: &Afs, text: &str) -> Result<Vec<Term>, ReplayError> {
    let mut terms = Vec::new();
    for (i, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let t = parse_term(line, afs.signature(), &[])
            .map_err(|err| ReplayError::Parse { line: i + 1, err })?;
        if let Some(prev) = terms.last() {
            if !one_step_reducts(afs, prev).contains(&t) {
                return Err(ReplayError::NotAStep { line: i + 1 });
            }
        }
        terms.push(t);
    }
    if terms.is_empty() {
        return Err(ReplayError::Empty);
    }
    Ok(terms)
}
