//! `impactrank`: rank papers of a citation network by expected short-term
//! impact, evaluate rankings on temporal splits and sweep parameter grids.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use impactrank::attrank::{fit_eta, AttRankConfig, AttentionMode, PartialParams};
use impactrank::baselines::{Baseline, FutureRankParams};
use impactrank::corpus::{citation_age_distribution, load_graph, temporal_split, CitationGraph, SplitView, TestRatio};
use impactrank::harness::{evaluate, sweep, Axis, EvalConfig, Method, Metric, Ranker, SweepMethod};
use impactrank::walkcore::{SolveOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};
use impactrank::Error;

#[derive(Parser)]
#[command(name = "impactrank", version, about = "Rank papers by expected short-term impact")]
struct Cli {
    /// Worker threads for sweeps and matrix-vector products (default: all cores)
    #[arg(long, global = true, env = "IMPACTRANK_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every paper with one method and write `paper_id,score` CSV
    Rank(RankCmd),
    /// Split a corpus in temporal order and write the manifest and ground truth
    Split(SplitCmd),
    /// Rank the current view of a split and report Spearman's rho and nDCG@k as JSON
    Eval(EvalCmd),
    /// Evaluate a method over a parameter grid and write a long-format CSV
    Sweep(SweepCmd),
    /// Fit the recency exponent to the citation-age distribution (printed to four decimals)
    FitEta(FitEtaCmd),
}

#[derive(Args)]
struct Input {
    /// Citation edges, one `citing<TAB>cited` pair per line
    #[arg(long, global = true)]
    edges: Option<PathBuf>,
    /// Paper metadata, `id<TAB>year-or-date[<TAB>author;author...]` per line
    #[arg(long, global = true)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct Solver {
    /// Convergence threshold on the L1 change between iterations
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Iteration cap
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct RankCmd {
    #[command(subcommand)]
    method: RankMethod,
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    solver: Solver,
    /// Rank only the current view of a split with this test ratio
    #[arg(long, global = true)]
    test_ratio: Option<String>,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RankMethod {
    /// Attention, recency and reference following
    Attrank(AttRankArgs),
    /// PageRank with uniform teleport
    Pagerank {
        #[arg(long, default_value_t = 0.85)]
        alpha: f64,
    },
    /// Traffic of researchers starting at recent papers
    Citerank {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        tau_dir: f64,
    },
    /// PageRank reinforced by authors and recency (needs author metadata when beta > 0)
    Futurerank {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
    },
    /// Citation counts discounted by the age of the citing paper
    Ram {
        #[arg(long)]
        gamma: f64,
    },
    /// Discounted walks of every length
    Ecm {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
    },
}

#[derive(Args, Clone, Default)]
struct AttRankArgs {
    /// Weight of reference following; inferred from beta and gamma when omitted
    #[arg(long)]
    alpha: Option<f64>,
    /// Weight of the attention vector; inferred when omitted
    #[arg(long)]
    beta: Option<f64>,
    /// Weight of the recency vector; inferred when omitted
    #[arg(long)]
    gamma: Option<f64>,
    /// Recency exponent, at most 0 [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Attention window in years [default: 1]
    #[arg(long)]
    y: Option<u32>,
    /// count_fraction or weighted_reference [default: count_fraction]
    #[arg(long)]
    attention_mode: Option<AttentionMode>,
    /// `key = value` file with AttRank settings; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SplitCmd {
    #[command(flatten)]
    input: Input,
    /// Future papers per current paper, in [1, 2]
    #[arg(long)]
    test_ratio: String,
    /// Output directory for manifest.json and sti.csv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodName {
    Attrank,
    Pagerank,
    Citerank,
    Futurerank,
    Ram,
    Ecm,
}

/// Method parameters for `eval`; baseline flags carry the method prefix.
#[derive(Args)]
struct MethodFlags {
    #[arg(long, value_enum)]
    method: MethodName,
    #[command(flatten)]
    attrank: AttRankArgs,
    /// PageRank damping factor
    #[arg(long, default_value_t = 0.85)]
    pr_alpha: f64,
    /// CiteRank probability of following a reference
    #[arg(long)]
    cr_alpha: Option<f64>,
    /// CiteRank decay time in years
    #[arg(long)]
    cr_tau_dir: Option<f64>,
    /// FutureRank weight of the citation walk
    #[arg(long)]
    fr_alpha: Option<f64>,
    /// FutureRank weight of the author scores
    #[arg(long)]
    fr_beta: Option<f64>,
    /// FutureRank weight of the recency term
    #[arg(long)]
    fr_gamma: Option<f64>,
    /// FutureRank recency exponent (negative)
    #[arg(long, allow_hyphen_values = true)]
    fr_rho: Option<f64>,
    /// RAM yearly decay of citation weight
    #[arg(long)]
    ram_gamma: Option<f64>,
    /// ECM weight of each additional path step
    #[arg(long)]
    ecm_alpha: Option<f64>,
    /// ECM yearly decay of citation weight
    #[arg(long)]
    ecm_gamma: Option<f64>,
}

#[derive(Args)]
struct EvalCmd {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    solver: Solver,
    #[command(flatten)]
    method: MethodFlags,
    #[arg(long, default_value = "1.6")]
    test_ratio: String,
    /// nDCG cutoffs
    #[arg(long = "k", value_delimiter = ',', default_values_t = [5usize, 10, 50, 100, 500])]
    ks: Vec<usize>,
    /// Keep papers without future citations in the Spearman correlation
    #[arg(long)]
    include_zero_truth: bool,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    solver: Solver,
    #[arg(long, value_enum)]
    method: MethodName,
    #[arg(long, default_value = "1.6")]
    test_ratio: String,
    /// spearman or ndcg@K
    #[arg(long, default_value = "spearman")]
    metric: String,
    /// Override one axis of the default grid: NAME=MIN:MAX:STEP or NAME=VALUE
    #[arg(long = "grid")]
    grid: Vec<String>,
    /// Recency exponent used by every AttRank cell
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eta: f64,
    #[arg(long, default_value_t = AttentionMode::CountFraction)]
    attention_mode: AttentionMode,
    /// Keep papers without future citations in the Spearman correlation
    #[arg(long)]
    include_zero_truth: bool,
    /// Output CSV (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitEtaCmd {
    #[command(flatten)]
    input: Input,
    /// Oldest citation age included, in years
    #[arg(long, default_value_t = 10)]
    max_age: usize,
    /// First age of the fitted tail
    #[arg(long, default_value_t = 0)]
    tail_start: usize,
    /// Fit on the current view of a split with this test ratio only
    #[arg(long)]
    test_ratio: Option<String>,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(e: impl Into<Error>) -> Self {
        let e = e.into();
        Failure {
            code: 2,
            message: format!("{}: {e}", e.kind()),
        }
    }

    fn method(e: Error) -> Self {
        Failure {
            code: 3,
            message: format!("{}: {e}", e.kind()),
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: msg.into(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::usage(format!("Io: cannot open {}: {e}", path.display())))
}

fn load(input: &Input) -> CliResult<CitationGraph> {
    let edges = input.edges.as_deref().ok_or_else(|| Failure::usage("--edges is required"))?;
    let meta = input.meta.as_deref().ok_or_else(|| Failure::usage("--meta is required"))?;
    let (e, m) = (open(edges)?, open(meta)?);
    let (g, stats) = load_graph(e, m).map_err(Failure::method)?;
    log::info!(
        "loaded {} papers, {} citations ({} impossible, {} self, {} duplicate dropped)",
        g.paper_count(),
        stats.edges_kept,
        stats.impossible_dropped,
        stats.self_citations_dropped,
        stats.duplicates_dropped
    );
    Ok(g)
}

fn ratio(text: &str) -> CliResult<TestRatio> {
    text.parse::<TestRatio>().map_err(Failure::config)
}

fn split_of(g: &CitationGraph, text: &str) -> CliResult<SplitView> {
    temporal_split(g, ratio(text)?).map_err(Failure::method)
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("Io: {}: {e}", dir.display())))?;
            }
            let f = File::create(p).map_err(|e| Failure::usage(format!("Io: {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::method(Error::from(e))
}

fn solve_options(s: &Solver) -> SolveOptions {
    SolveOptions::default().with_tol(s.tol).with_max_iter(s.max_iter)
}

fn attrank_params(args: &AttRankArgs, solver: &mut Solver) -> CliResult<Method> {
    let flags = PartialParams {
        alpha: args.alpha,
        beta: args.beta,
        gamma: args.gamma,
        eta: args.eta,
        y: args.y,
        attention_mode: args.attention_mode,
    };
    let params = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("Io: cannot read {}: {e}", path.display())))?;
            let cfg = AttRankConfig::parse(&text).map_err(Failure::config)?;
            if solver.tol == DEFAULT_TOL {
                solver.tol = cfg.tol.unwrap_or(solver.tol);
            }
            if solver.max_iter == DEFAULT_MAX_ITER {
                solver.max_iter = cfg.max_iter.unwrap_or(solver.max_iter);
            }
            cfg.params.merged(flags)
        }
        None => flags,
    };
    params.complete().map(Method::AttRank).map_err(Failure::config)
}

fn checked(method: Method) -> CliResult<Method> {
    if let Method::Baseline(b) = &method {
        b.validate().map_err(Failure::config)?;
    }
    Ok(method)
}

fn rank_method(m: &RankMethod, solver: &mut Solver) -> CliResult<Method> {
    let method = match *m {
        RankMethod::Attrank(ref args) => return attrank_params(args, solver),
        RankMethod::Pagerank { alpha } => {
            if !(0.0..1.0).contains(&alpha) {
                return Err(Failure::config(Error::InvalidParameter(format!(
                    "alpha must be in [0, 1), got {alpha}"
                ))));
            }
            Method::PageRank { alpha }
        }
        RankMethod::Citerank { alpha, tau_dir } => Method::Baseline(Baseline::CiteRank { alpha, tau_dir }),
        RankMethod::Futurerank { alpha, beta, gamma, rho } => Method::Baseline(Baseline::FutureRank(
            FutureRankParams::new(alpha, beta, gamma, rho).map_err(Failure::config)?,
        )),
        RankMethod::Ram { gamma } => Method::Baseline(Baseline::Ram { gamma }),
        RankMethod::Ecm { alpha, gamma } => Method::Baseline(Baseline::Ecm { alpha, gamma }),
    };
    checked(method)
}

fn flagged_method(f: &MethodFlags, solver: &mut Solver) -> CliResult<Method> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Failure::usage(format!("--{flag} is required")));
    let m = match f.method {
        MethodName::Attrank => RankMethod::Attrank(f.attrank.clone()),
        MethodName::Pagerank => RankMethod::Pagerank { alpha: f.pr_alpha },
        MethodName::Citerank => RankMethod::Citerank {
            alpha: need(f.cr_alpha, "cr-alpha")?,
            tau_dir: need(f.cr_tau_dir, "cr-tau-dir")?,
        },
        MethodName::Futurerank => RankMethod::Futurerank {
            alpha: need(f.fr_alpha, "fr-alpha")?,
            beta: need(f.fr_beta, "fr-beta")?,
            gamma: need(f.fr_gamma, "fr-gamma")?,
            rho: need(f.fr_rho, "fr-rho")?,
        },
        MethodName::Ram => RankMethod::Ram {
            gamma: need(f.ram_gamma, "ram-gamma")?,
        },
        MethodName::Ecm => RankMethod::Ecm {
            alpha: need(f.ecm_alpha, "ecm-alpha")?,
            gamma: need(f.ecm_gamma, "ecm-gamma")?,
        },
    };
    rank_method(&m, solver)
}

fn cmd_rank(mut cmd: RankCmd, jobs: Option<usize>) -> CliResult<()> {
    let method = rank_method(&cmd.method, &mut cmd.solver)?;
    let g = load(&cmd.input)?;
    let view = match &cmd.test_ratio {
        Some(r) => split_of(&g, r)?.current,
        None => g,
    };
    let opts = solve_options(&cmd.solver);
    let started = Instant::now();
    let sol = impactrank::par::with_jobs(jobs, || method.rank(&view, &opts)).map_err(Failure::method)?;
    eprintln!(
        "{}: {} iterations, {:.1} ms",
        method.name(),
        sol.iterations,
        started.elapsed().as_secs_f64() * 1e3
    );
    let mut out = output(cmd.out.as_deref())?;
    sol.scores.write_csv(view.ids(), &mut out).map_err(Failure::method)?;
    out.flush().map_err(io_failure)
}

fn cmd_split(cmd: SplitCmd) -> CliResult<()> {
    let r = ratio(&cmd.test_ratio)?;
    let g = load(&cmd.input)?;
    let split = temporal_split(&g, r).map_err(Failure::method)?;
    fs::create_dir_all(&cmd.out).map_err(|e| Failure::usage(format!("Io: {}: {e}", cmd.out.display())))?;
    let manifest = serde_json::json!({
        "test_ratio": r.to_string(),
        "n_papers": g.paper_count(),
        "n_current": split.n_current(),
        "n_future": split.n_future(),
        "current_newest_year": split.current.newest_year(),
        "sti": "sti.csv",
    });
    let mut m = output(Some(&cmd.out.join("manifest.json")))?;
    serde_json::to_writer_pretty(&mut m, &manifest).map_err(|e| io_failure(e.into()))?;
    writeln!(m).and_then(|_| m.flush()).map_err(io_failure)?;
    let mut s = output(Some(&cmd.out.join("sti.csv")))?;
    writeln!(s, "paper_id,sti").map_err(io_failure)?;
    for (id, v) in split.current.ids().iter().zip(split.sti.values()) {
        writeln!(s, "{id},{v}").map_err(io_failure)?;
    }
    s.flush().map_err(io_failure)?;
    eprintln!("current {} papers, future {} papers", split.n_current(), split.n_future());
    Ok(())
}

fn cmd_eval(mut cmd: EvalCmd, jobs: Option<usize>) -> CliResult<()> {
    let method = flagged_method(&cmd.method, &mut cmd.solver)?;
    let r = ratio(&cmd.test_ratio)?;
    if cmd.ks.contains(&0) {
        return Err(Failure::usage("--k values must be positive"));
    }
    let g = load(&cmd.input)?;
    let split = temporal_split(&g, r).map_err(Failure::method)?;
    let cfg = EvalConfig {
        ks: cmd.ks.clone(),
        exclude_zero_truth: !cmd.include_zero_truth,
        opts: solve_options(&cmd.solver),
    };
    let report = impactrank::par::with_jobs(jobs, || evaluate(&method, &split, &cfg)).map_err(Failure::method)?;
    eprintln!("{}: {} iterations, {:.1} ms", report.method, report.iterations, report.runtime_ms);
    let mut out = output(cmd.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| io_failure(e.into()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(io_failure)
}

fn cmd_sweep(cmd: SweepCmd, jobs: Option<usize>) -> CliResult<()> {
    let method = match cmd.method {
        MethodName::Attrank => SweepMethod::AttRank {
            eta: cmd.eta,
            attention_mode: cmd.attention_mode,
        },
        MethodName::Pagerank => SweepMethod::PageRank,
        MethodName::Citerank => SweepMethod::CiteRank,
        MethodName::Futurerank => SweepMethod::FutureRank,
        MethodName::Ram => SweepMethod::Ram,
        MethodName::Ecm => SweepMethod::Ecm,
    };
    let metric: Metric = cmd.metric.parse().map_err(Failure::config)?;
    let mut grid = method.default_grid();
    for spec in &cmd.grid {
        let (name, range) = spec
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--grid expects NAME=MIN:MAX:STEP, got `{spec}`")))?;
        let axis = Axis::parse(name.trim(), range).map_err(Failure::config)?;
        grid = grid.with_axis(axis).map_err(Failure::config)?;
    }
    let r = ratio(&cmd.test_ratio)?;
    let g = load(&cmd.input)?;
    let split = temporal_split(&g, r).map_err(Failure::method)?;
    let cfg = EvalConfig {
        exclude_zero_truth: !cmd.include_zero_truth,
        opts: solve_options(&cmd.solver),
        ..EvalConfig::default()
    };
    let started = Instant::now();
    let result = sweep(&method, &grid, &split, metric, &cfg, jobs).map_err(|e| match e {
        Error::EmptyGrid => Failure::config(e),
        e => Failure::method(e),
    })?;
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "{} cells ({failed} failed) in {:.1} s",
        result.rows.len(),
        started.elapsed().as_secs_f64()
    );
    match result.best_row() {
        Some(best) => {
            let cell: Vec<String> = result
                .axes
                .iter()
                .zip(&best.cell)
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            eprintln!("best {}: {} at {}", result.metric, best.value, cell.join(" "));
        }
        None => eprintln!("every cell failed"),
    }
    let mut out = output(cmd.out.as_deref())?;
    result.write_csv(&mut out).map_err(io_failure)?;
    out.flush().map_err(io_failure)
}

fn cmd_fit_eta(cmd: FitEtaCmd) -> CliResult<()> {
    let g = load(&cmd.input)?;
    let view = match &cmd.test_ratio {
        Some(r) => split_of(&g, r)?.current,
        None => g,
    };
    let dist = citation_age_distribution(&view, cmd.max_age).map_err(Failure::method)?;
    let eta = fit_eta(&dist, cmd.tail_start).map_err(Failure::method)?;
    log::info!("unrounded eta {eta}");
    println!("{}", (eta * 1e4).round() / 1e4);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.jobs == Some(0) {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Rank(c) => cmd_rank(c, cli.jobs),
        Command::Split(c) => cmd_split(c),
        Command::Eval(c) => cmd_eval(c, cli.jobs),
        Command::Sweep(c) => cmd_sweep(c, cli.jobs),
        Command::FitEta(c) => cmd_fit_eta(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
