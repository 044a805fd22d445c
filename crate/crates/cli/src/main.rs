use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parcomp::analysis::{self, AnalysisConfig, AnalysisReport};
use parcomp::dt::{canonical_parallel_problem, has_no_parallelism};
use parcomp::exec::Execution;
use parcomp::poly::BoundConfig;
use parcomp::rewrite::{
    empirical_complexity_with, first_parallel_step, fit_growth_degree, innermost_redexes, innermost_successors,
    is_normal_form, leftmost_innermost_step, parallel_innermost_successors, DerivationHeight,
};
use parcomp::term::Position;
use parcomp::tpdb::{self, System};
use parcomp::transform::delta;
use parcomp::{Strategy, Term, Trs};

#[derive(Parser)]
#[command(name = "parcomp", version, about = "Parallel-innermost runtime complexity analysis for term rewrite systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Largest start-term size for empirical sampling.
    #[arg(long, global = true, default_value_t = 8)]
    max_size: usize,
    /// Step budget per start term.
    #[arg(long, global = true, default_value_t = 100_000)]
    fuel: usize,
    /// Largest polynomial degree tried for sharp symbols.
    #[arg(long, global = true, default_value_t = 2)]
    degree: u32,
    /// Coefficient bound; the search escalates one step past it on failure.
    #[arg(long, global = true, default_value_t = 2)]
    coeff: u64,
    /// Follow every nondeterministic choice when tracing.
    #[arg(long, global = true)]
    all_paths: bool,
    /// Wall-clock limit per analysis phase, in seconds.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Prove a pirc upper bound and report supporting evidence.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Skip the empirical table.
        #[arg(long)]
        no_empirical: bool,
        /// Also write the relative system of the canonical problem here.
        #[arg(long)]
        delta_out: Option<PathBuf>,
    },
    /// Print a reduction sequence with redexes in brackets.
    Rewrite {
        file: PathBuf,
        term: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Innermost)]
        strategy: StrategyArg,
    },
    /// List the parallel dependency tuples of every rule.
    Pdts { file: PathBuf },
    /// Write the relative system of the canonical tuple problem.
    Delta {
        file: PathBuf,
        /// Output file; standard output if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sample runtime complexity on small basic terms.
    Empirical { file: PathBuf },
    /// Validate an interpretation certificate against the canonical problem.
    Check { file: PathBuf, certificate: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Innermost,
    Parallel,
}

/// Bad input from the user, reported with exit code 1.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| InputError(e).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) if e.is::<InputError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Ok(Err(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}

fn read_system(path: &Path) -> Result<System> {
    input((|| {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        tpdb::parse(&text).with_context(|| format!("cannot parse {}", path.display()))
    })())
}

fn read_trs(path: &Path) -> Result<Trs> {
    match read_system(path)? {
        System::Plain(trs) => Ok(trs),
        System::Relative(_) => input(Err(anyhow::anyhow!(
            "{} is a relative system; this command expects a plain one",
            path.display()
        ))),
    }
}

impl Opts {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            bound: BoundConfig {
                degree_bound: self.degree,
                coeff_bound: self.coeff,
                coeff_escalation: self.coeff + 1,
                ..BoundConfig::default()
            },
            max_size: self.max_size,
            fuel: self.fuel,
            timeout: self.timeout.map(Duration::from_secs_f64),
            execution: self.execution(),
            ..AnalysisConfig::default()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let opts = cli.opts;
    if opts.timeout.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return input(Err(anyhow::anyhow!("--timeout must be a non-negative number of seconds")));
    }
    match cli.command {
        Command::Analyze { files, no_empirical, delta_out } => {
            if delta_out.is_some() && files.len() > 1 {
                return input(Err(anyhow::anyhow!("--delta-out needs a single input file")));
            }
            let systems = files.iter().map(|f| read_trs(f)).collect::<Result<Vec<_>>>()?;
            let config = AnalysisConfig { empirical: !no_empirical, ..opts.analysis() };
            let jobs: Vec<(String, Trs)> =
                files.iter().map(|f| f.display().to_string()).zip(systems).collect();
            let mut reports = analyze_all(&jobs, &config)?;
            if let Some(out) = delta_out {
                write_delta(&jobs[0].1, &out)?;
                reports[0].delta_path = Some(out.display().to_string());
            }
            for r in &reports {
                if opts.json {
                    println!("{}", r.to_json());
                } else {
                    print!("{r}");
                }
            }
        }
        Command::Rewrite { file, term, strategy } => {
            let trs = read_trs(&file)?;
            let t = input(trs.parse_term(&term).with_context(|| format!("cannot parse term {term}")))?;
            let parallel = matches!(strategy, StrategyArg::Parallel);
            if opts.all_paths {
                all_paths(&trs, &t, parallel, opts.fuel)?;
            } else {
                trace(&trs, &t, parallel, opts.fuel, opts.json);
            }
        }
        Command::Pdts { file } => {
            let trs = read_trs(&file)?;
            let listing = analysis::pdt_listing(&trs);
            if opts.json {
                println!("{}", serde_json::to_string_pretty(&listing)?);
            } else {
                for group in &listing {
                    println!("{}", group.rule);
                    for d in &group.pdts {
                        println!("  {d}");
                    }
                }
                if has_no_parallelism(&trs) {
                    println!("no rule has parallelism: pirc = irc");
                }
            }
        }
        Command::Delta { file, out } => {
            let trs = read_trs(&file)?;
            match out {
                Some(path) => write_delta(&trs, &path)?,
                None => print!("{}", delta_text(&trs)?),
            }
        }
        Command::Empirical { file } => empirical(&read_system(&file)?, &opts)?,
        Command::Check { file, certificate } => {
            let trs = read_trs(&file)?;
            let text = input(
                fs::read_to_string(&certificate).with_context(|| format!("cannot read {}", certificate.display())),
            )?;
            let problem = canonical_parallel_problem(&trs);
            let outcome = input(
                analysis::parse_certificate(&text, &trs)
                    .and_then(|steps| analysis::check_certificate(&problem, &steps))
                    .map_err(anyhow::Error::from),
            )?;
            if opts.json {
                let v = serde_json::json!({
                    "accepted": outcome.accepted(),
                    "degree": outcome.degree,
                    "remaining": outcome.remaining.iter().map(|&i| problem.dts[i].to_string()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else if outcome.accepted() {
                println!("accepted, degree {}", outcome.degree);
            } else {
                println!("rejected: {} tuples remain strict", outcome.remaining.len());
                for &i in &outcome.remaining {
                    println!("  {}", problem.dts[i]);
                }
            }
            if !outcome.accepted() {
                return input(Err(anyhow::anyhow!("certificate does not remove every counted tuple")));
            }
        }
    }
    Ok(())
}

/// One thread per file; each analysis uses the shared pool for its sweeps.
fn analyze_all(jobs: &[(String, Trs)], config: &AnalysisConfig) -> Result<Vec<AnalysisReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(name, trs)| {
                std::thread::Builder::new()
                    .stack_size(256 << 20)
                    .spawn_scoped(s, move || analysis::analyze(trs, name, config))
                    .context("cannot spawn analysis thread")
            })
            .collect::<Result<_>>()?;
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| anyhow::anyhow!("analysis thread panicked")))
            .collect()
    })
}

fn delta_text(trs: &Trs) -> Result<String> {
    let rel = delta(&canonical_parallel_problem(trs)).context("relative system")?;
    Ok(tpdb::serialize(&System::Relative(rel)))
}

fn write_delta(trs: &Trs, out: &Path) -> Result<()> {
    let text = delta_text(trs)?;
    input(fs::write(out, text).with_context(|| format!("cannot write {}", out.display())))
}

/// `t` with every subterm at `marked` wrapped in brackets.
fn render_marked(t: &Term, marked: &[Position]) -> String {
    fn go(t: &Term, path: &mut Vec<usize>, marked: &HashSet<Vec<usize>>, out: &mut String) {
        let hit = marked.contains(path);
        if hit {
            out.push('[');
        }
        match t {
            Term::Var(x) => out.push_str(x),
            Term::App(f, args) => {
                out.push_str(f.name());
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        path.push(i + 1);
                        go(a, path, marked, out);
                        path.pop();
                    }
                    out.push(')');
                }
            }
        }
        if hit {
            out.push(']');
        }
    }
    let marked: HashSet<Vec<usize>> = marked.iter().map(|p| p.path().to_vec()).collect();
    let mut out = String::new();
    go(t, &mut Vec::new(), &marked, &mut out);
    out
}

fn trace(trs: &Trs, start: &Term, parallel: bool, fuel: usize, json: bool) {
    let mut current = start.clone();
    let mut steps: Vec<(String, Vec<String>)> = Vec::new();
    let mut exhausted = false;
    loop {
        let step = if parallel {
            first_parallel_step(&current, trs)
        } else {
            leftmost_innermost_step(&current, trs).map(|(p, t)| (vec![p], t))
        };
        let Some((positions, next)) = step else { break };
        if steps.len() >= fuel {
            exhausted = true;
            break;
        }
        steps.push((render_marked(&current, &positions), positions.iter().map(|p| p.to_string()).collect()));
        current = next;
    }
    if json {
        let v = serde_json::json!({
            "steps": steps.iter().map(|(t, ps)| serde_json::json!({"term": t, "redexes": ps})).collect::<Vec<_>>(),
            "count": steps.len(),
            "final": current.to_string(),
            "normal_form": !exhausted,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("trace serialises"));
        return;
    }
    for (i, (t, _)) in steps.iter().enumerate() {
        println!("{:>4}  {t}", i);
    }
    println!("{:>4}  {current}", steps.len());
    if exhausted {
        println!("fuel exhausted after {} steps; {current} is not a normal form", steps.len());
    } else {
        println!("{} steps to normal form {current}", steps.len());
    }
}

/// Breadth-first listing of every reachable term with the longest derivation.
fn all_paths(trs: &Trs, start: &Term, parallel: bool, fuel: usize) -> Result<()> {
    let successors = |t: &Term| {
        if parallel {
            parallel_innermost_successors(t, trs)
        } else {
            innermost_successors(t, trs)
        }
    };
    let mut seen: HashSet<Term> = HashSet::from([start.clone()]);
    let mut layer = vec![start.clone()];
    let mut depth = 0usize;
    while !layer.is_empty() && seen.len() <= fuel {
        println!("depth {depth}:");
        let mut next = Vec::new();
        for t in &layer {
            let nf = if is_normal_form(trs, t) { "  (normal form)" } else { "" };
            println!("  {}{nf}", render_marked(t, &innermost_redexes(t, trs)));
            for s in successors(t) {
                if seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        layer = next;
        depth += 1;
    }
    let strategy = if parallel { Strategy::ParallelInnermost } else { Strategy::Innermost };
    let height = parcomp::rewrite::derivation_height(start, &strategy, trs, fuel);
    if !layer.is_empty() {
        println!("fuel exhausted after {} terms", seen.len());
    }
    println!("longest derivation: {height}");
    Ok(())
}

fn empirical(system: &System, opts: &Opts) -> Result<()> {
    let exec = opts.execution();
    let cap = AnalysisConfig::default().cap;
    let (columns, tables) = match system {
        System::Plain(trs) => {
            let config = AnalysisConfig { max_size: opts.max_size, fuel: opts.fuel, execution: exec, ..AnalysisConfig::default() };
            let e = analysis::empirical_summary(trs, &config);
            if opts.json {
                println!("{}", serde_json::to_string_pretty(&e)?);
                return Ok(());
            }
            let irc = e.rows.iter().map(|r| (r.n, r.irc)).collect::<Vec<_>>();
            let pirc = e.rows.iter().map(|r| (r.n, r.pirc)).collect::<Vec<_>>();
            (vec!["irc", "pirc"], vec![(irc, e.truncated), (pirc, e.truncated)])
        }
        System::Relative(rel) => {
            let t = empirical_complexity_with(
                rel.union(),
                &Strategy::RelativeInnermost(rel.clone()),
                opts.max_size,
                opts.fuel,
                cap,
                exec,
            );
            if opts.json {
                let rows: Vec<_> = t.rows.iter().map(|(n, v)| serde_json::json!({"n": n, "irc": v})).collect();
                let v = serde_json::json!({
                    "label": analysis::EMPIRICAL_LABEL,
                    "rows": rows,
                    "fitted_irc_degree": fit_growth_degree(&t.rows),
                    "truncated": t.truncated,
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
                return Ok(());
            }
            (vec!["irc"], vec![(t.rows.clone(), t.truncated)])
        }
    };
    println!("{}:", analysis::EMPIRICAL_LABEL);
    print!("  {:>4}", "n");
    for c in &columns {
        print!(" {c:>10}");
    }
    println!();
    for (i, (n, _)) in tables[0].0.iter().enumerate() {
        print!("  {n:>4}");
        for (rows, _) in &tables {
            let v: DerivationHeight = rows[i].1;
            print!(" {:>10}", v.to_string());
        }
        println!();
    }
    for (c, (rows, truncated)) in columns.iter().zip(&tables) {
        let fit = fit_growth_degree(rows).map_or("none".to_string(), |d| d.to_string());
        println!("  fitted {c} degree: {fit}{}", if *truncated { " (enumeration truncated)" } else { "" });
    }
    Ok(())
}
