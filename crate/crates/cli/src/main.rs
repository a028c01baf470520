use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use consfree::analysis::validate;
use consfree::compiler::{compile, power_module_over};
use consfree::corpus;
use consfree::rewrite::{
    accepts_ordered, render_trace, replay_trace, search_ordered, true_term, SearchBudget,
    SearchOrder, Verdict,
};
use consfree::saturation::{
    decide_by_saturation, saturate, Engine, SaturationError, SaturationOptions, DEFAULT_CAP,
};
use consfree::syntax::{parse_afs, parse_term};
use consfree::tm::{tm_run, validate_tm, Outcome, TuringMachine};
use consfree::Afs;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const UNKNOWN: u8 = 2;
const INVALID: u8 = 3;
const RESOURCE: u8 = 4;

/// Cons-free higher-order rewriting: validation, reduction search,
/// saturation and Turing machine compilation.
///
/// Exit codes: 0 accepted or pass, 1 refuted or fail, 2 unknown within
/// budget, 3 invalid input, 4 domain too large.
#[derive(Parser)]
#[command(name = "consfree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Budget {
    /// Stop after this many distinct terms.
    #[arg(long, default_value_t = 1_000_000)]
    budget_visited: usize,
    /// Do not reduce terms at this depth.
    #[arg(long, default_value_t = 10_000)]
    budget_depth: usize,
    #[arg(long, value_enum, default_value_t = Order::Bfs)]
    order: Order,
}

impl Budget {
    fn budget(self) -> SearchBudget {
        SearchBudget::new(self.budget_visited, self.budget_depth)
    }

    fn order(self) -> SearchOrder {
        match self.order {
            Order::Bfs => SearchOrder::BreadthFirst,
            Order::Smallest => SearchOrder::SmallestFirst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    /// Breadth first; traces are shortest.
    Bfs,
    /// Smallest term first.
    Smallest,
}

#[derive(clap::Args)]
struct SatArgs {
    /// Largest domain enumerated per type.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Print data set, domain sizes, statement count and timing.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
}

impl SatArgs {
    fn options(&self) -> SaturationOptions {
        let engine = match self.engine {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Dense => Engine::Dense,
            EngineArg::Demand => Engine::Demand,
        };
        SaturationOptions {
            cap: self.cap,
            engine,
            ..SaturationOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Dense,
    Demand,
}

#[derive(Subcommand)]
enum Command {
    /// Check constructor system, left-linearity and cons-freeness.
    Validate {
        afs: PathBuf,
        /// One JSON object per check and per finding.
        #[arg(long)]
        records: bool,
    },
    /// Search all reductions of a term for data normal forms.
    Rewrite {
        afs: PathBuf,
        term: String,
        #[command(flatten)]
        budget: Budget,
        /// Print the reduction path to each normal form.
        #[arg(long)]
        trace: bool,
    },
    /// Search the reductions of decide(input) for true.
    Accept {
        afs: PathBuf,
        input: String,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        trace: bool,
    },
    /// Check a printed trace step by step. With `--` marker lines, each
    /// marker starts a trace and text before the first one is ignored.
    Replay { afs: PathBuf, trace: PathBuf },
    /// Data normal forms of a basic term by saturation.
    Saturate {
        afs: PathBuf,
        term: String,
        #[command(flatten)]
        sat: SatArgs,
    },
    /// Decide acceptance of an input by saturation.
    Decide {
        afs: PathBuf,
        input: String,
        #[command(flatten)]
        sat: SatArgs,
    },
    /// Turing machines.
    Tm {
        #[command(subcommand)]
        command: TmCommand,
    },
    /// Compile a Turing machine into a cons-free system.
    CompileTm {
        #[arg(long)]
        tm: PathBuf,
        /// Order of the counting module.
        #[arg(long, default_value_t = 1)]
        order: u32,
        /// Number of base factors.
        #[arg(long, default_value_t = 1)]
        factor: u32,
        /// Write the system here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print rule count, signature size and bound to standard error.
        #[arg(long)]
        report: bool,
    },
    /// The built-in examples.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum TmCommand {
    /// Run a machine on an input.
    Run {
        tm: PathBuf,
        input: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Validate every entry and check its acceptance vectors.
    Run,
    /// Names of the entries.
    List,
    /// Print the source of an entry.
    Show { name: String },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_afs(path: &Path) -> Result<Afs> {
    let src = read(path)?;
    parse_afs(&src).with_context(|| format!("parsing {}", path.display()))
}

fn load_tm(path: &Path) -> Result<TuringMachine> {
    let src = read(path)?;
    TuringMachine::parse(&src).with_context(|| format!("parsing {}", path.display()))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Accepted => PASS,
        Verdict::Refuted => FAIL,
        Verdict::Unknown => UNKNOWN,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { afs, records } => {
            let report = validate(&load_afs(&afs)?);
            print!(
                "{}",
                if records {
                    report.render_records()
                } else {
                    report.render()
                }
            );
            Ok(if report.is_cons_free_system() {
                PASS
            } else {
                FAIL
            })
        }
        Command::Rewrite {
            afs,
            term,
            budget,
            trace,
        } => {
            let afs = load_afs(&afs)?;
            let start = parse_term(&term, afs.signature(), &[]).context("parsing the term")?;
            let t0 = Instant::now();
            let res = search_ordered(&afs, &start, budget.budget(), budget.order(), |_| false);
            log::info!("visited {} terms in {:.3?}", res.visited, t0.elapsed());
            for d in &res.data_normal_forms {
                println!("{d}");
            }
            if trace {
                for d in &res.data_normal_forms {
                    println!("-- trace to {d}");
                    print!(
                        "{}",
                        render_trace(&res.trace(d).expect("found terms were visited"))
                    );
                }
            }
            if !res.exhausted {
                eprintln!(
                    "budget exhausted after {} terms; more normal forms may exist",
                    res.visited
                );
                return Ok(UNKNOWN);
            }
            Ok(PASS)
        }
        Command::Accept {
            afs,
            input,
            budget,
            trace,
        } => {
            let afs = load_afs(&afs)?;
            let (v, res) = accepts_ordered(&afs, &input, budget.budget(), budget.order())?;
            println!("{v}");
            log::info!("visited {} terms", res.visited);
            if trace && v == Verdict::Accepted {
                println!("-- trace to true");
                print!(
                    "{}",
                    render_trace(&res.trace(&true_term(&afs)?).expect("true was visited"))
                );
            }
            Ok(verdict_code(v))
        }
        Command::Replay { afs, trace } => {
            let afs = load_afs(&afs)?;
            let text = read(&trace)?;
            let mut blocks = vec![String::new()];
            let marked = text.lines().any(|l| l.starts_with("--"));
            for line in text.lines().skip_while(|l| marked && !l.starts_with("--")) {
                if line.starts_with("--") {
                    blocks.push(String::new());
                } else {
                    let b = blocks.last_mut().expect("nonempty");
                    b.push_str(line);
                    b.push('\n');
                }
            }
            let mut checked = 0;
            for b in blocks.iter().filter(|b| !b.trim().is_empty()) {
                let steps =
                    replay_trace(&afs, b).with_context(|| format!("trace {}", checked + 1))?;
                println!("trace {}: {} steps ok", checked + 1, steps.len() - 1);
                checked += 1;
            }
            if checked == 0 {
                bail!("no trace found");
            }
            Ok(PASS)
        }
        Command::Saturate { afs, term, sat } => {
            let afs = load_afs(&afs)?;
            let start = parse_term(&term, afs.signature(), &[]).context("parsing the term")?;
            let res = saturate(&afs, &start, &sat.options())?;
            for d in &res.normal_forms {
                println!("{d}");
            }
            if sat.stats {
                eprintln!("{}", res.stats);
            }
            Ok(PASS)
        }
        Command::Decide { afs, input, sat } => {
            let afs = load_afs(&afs)?;
            let t0 = Instant::now();
            let accepted = decide_by_saturation(&afs, &input, &sat.options())?;
            println!(
                "{}",
                if accepted {
                    Verdict::Accepted
                } else {
                    Verdict::Refuted
                }
            );
            if sat.stats {
                eprintln!("time: {:.3?}", t0.elapsed());
            }
            Ok(if accepted { PASS } else { FAIL })
        }
        Command::Tm {
            command: TmCommand::Run { tm, input, fuel },
        } => {
            let tm = load_tm(&tm)?;
            let r = tm_run(&tm, &input, fuel)?;
            println!("{} after {} steps", r.outcome, r.steps);
            Ok(match r.outcome {
                Outcome::Accept => PASS,
                Outcome::Reject => FAIL,
                Outcome::Timeout => UNKNOWN,
            })
        }
        Command::CompileTm {
            tm,
            order,
            factor,
            out,
            report,
        } => {
            if order == 0 || factor == 0 {
                bail!("order and factor must be positive");
            }
            let tm = load_tm(&tm)?;
            let problems = validate_tm(&tm);
            if !problems.is_ok() {
                bail!("unusable machine:\n{problems}");
            }
            let c = compile(&tm, &power_module_over(order, factor, &tm.input))?;
            match &out {
                Some(p) => {
                    fs::write(p, &c.source).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{}", c.source),
            }
            if report {
                let sig = c.afs.signature();
                eprintln!("rules: {}", c.afs.rules().len());
                eprintln!(
                    "symbols: {} ({} defined)",
                    sig.symbols().count(),
                    sig.defined().count()
                );
                eprintln!("bound: P(n) = {}", c.module.bound());
                eprintln!("tuple arity: {}, order: {}", c.tuple_arity, c.afs.order());
            }
            Ok(PASS)
        }
        Command::Corpus { command } => match command {
            CorpusCommand::Run => {
                let summary = corpus::run_corpus();
                println!("{summary}");
                Ok(if summary.pass() { PASS } else { FAIL })
            }
            CorpusCommand::List => {
                for e in corpus::entries() {
                    println!("{} ({} vectors)", e.name, e.vectors.len());
                }
                for (name, _) in corpus::TM_SOURCES {
                    println!("{name} (machine)");
                }
                Ok(PASS)
            }
            CorpusCommand::Show { name } => {
                if let Some(src) = corpus::tm_source(&name) {
                    print!("{src}");
                } else if let Some(e) = corpus::entries().into_iter().find(|e| e.name == name) {
                    print!("{}", e.source);
                } else {
                    bail!("no corpus entry {name}");
                }
                Ok(PASS)
            }
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INVALID } else { PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<SaturationError>() {
                Some(SaturationError::DomainTooLarge { .. }) => RESOURCE,
                _ => INVALID,
            };
            ExitCode::from(code)
        }
    }
}
