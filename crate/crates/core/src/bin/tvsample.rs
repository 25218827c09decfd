use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use tvsample::bandlimit::{self, random_coefficients, DEFAULT_SUPPORT_EPS};
use tvsample::bench::{self, BenchCase};
use tvsample::graph::{path_graph, random_connected_graph, star_graph};
use tvsample::io::{self, BasisFile, PlanFile};
use tvsample::oracle;
use tvsample::reference;
use tvsample::{
    cycle_graph, detect_support, eig_sym, is_sbl, jft, laplacian, qualify, reconstruct, sample,
    Error, Execution, Graph, ReducedBases, SamplingPlan, SpectralSupport,
};

/// Critical sampling and reconstruction of time-vertex graph signals.
#[derive(Parser)]
#[command(name = "tvsample", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "TVSAMPLE_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs, supports, signals or the worked reference instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Detect the joint spectral support of a signal.
    Analyze(AnalyzeArgs),
    /// Build a critical sampling plan.
    Plan(PlanArgs),
    /// Read a signal at the samples of a plan.
    Sample(SampleArgs),
    /// Rebuild the full signal from its samples.
    Reconstruct(ReconstructArgs),
    /// Qualify a plan, optionally against exhaustive enumeration.
    Verify(VerifyArgs),
    /// Time the factored search against the direct row search.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Cycle,
    Star,
    Path,
    Random,
}

#[derive(Subcommand)]
enum GenCommand {
    Graph {
        #[arg(long = "type", value_enum)]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        center: usize,
        /// Edge probability for random graphs.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Support {
        #[arg(long = "T")]
        t: usize,
        #[arg(long = "N")]
        n: usize,
        /// 0-based `j_t,j_g` pairs separated by `;`.
        #[arg(long, conflicts_with = "random")]
        pairs: Option<String>,
        /// Draw a random SBL support (bandwidths random unless given).
        #[arg(long)]
        random: bool,
        #[arg(long, requires_all = ["kg", "k"])]
        kt: Option<usize>,
        #[arg(long)]
        kg: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    Signal {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the worked 4x4 instance (graphs, support, published bases, signal).
    Reference {
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    graph_t: PathBuf,
    #[arg(long)]
    graph_g: PathBuf,
    #[arg(long)]
    support: PathBuf,
    /// Override the computed eigenbases (full or restricted to the support).
    #[arg(long)]
    basis_file: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    graph_t: PathBuf,
    #[arg(long)]
    graph_g: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Full bases only.
    #[arg(long)]
    basis_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SUPPORT_EPS)]
    eps: f64,
    /// Write the detected support here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long)]
    out: PathBuf,
    /// Per-vertex schedule CSV.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Use separate sampling (all of S_T x S_G) instead.
    #[arg(long)]
    separate: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Original signal; enables the error report and the tolerance check.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Maximum abs error allowed, relative to the reference's Frobenius norm.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inst: Instance,
    /// Plan to check; computed when absent.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    exhaustive: bool,
    /// Largest subset size to enumerate (default K).
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    monotonicity_trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated sizes: N, NxT or NxT:KTxKG.
    #[arg(long, value_delimiter = ',', default_value = "32,48,64")]
    sizes: Vec<String>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Add the worked 4x4 instance as a first row.
    #[arg(long)]
    reference: bool,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Lib(Error),
    Tolerance(String),
    Theory(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unqualified { .. } | Error::RankDeficient { .. } => 3,
        Error::NoConvergence { .. } | Error::IllConditioned(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Tolerance(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Theory(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match cli.command {
        Command::Gen(g) => gen(g, &mut rng),
        Command::Analyze(a) => analyze(a),
        Command::Plan(p) => plan(p),
        Command::Sample(s) => sample_cmd(s),
        Command::Reconstruct(r) => reconstruct_cmd(r),
        Command::Verify(v) => verify(v, cli.seed),
        Command::Bench(b) => bench_cmd(b, cli.seed),
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    println!("{}", serde_json::to_string_pretty(value).map_err(Error::from)?);
    Ok(())
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>, Error> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(',')
                .ok_or_else(|| Error::Malformed(format!("pair {p:?} is not `j_t,j_g`")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Malformed(format!("bad index in pair {p:?}")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn gen(cmd: GenCommand, rng: &mut ChaCha8Rng) -> CliResult {
    match cmd {
        GenCommand::Graph {
            kind,
            n,
            center,
            p,
            out,
        } => {
            let g = match kind {
                GraphKind::Cycle => cycle_graph(n)?,
                GraphKind::Star => star_graph(n, center)?,
                GraphKind::Path => path_graph(n)?,
                GraphKind::Random => random_connected_graph(n, p, rng)?,
            };
            io::write_json(&out, &g)?;
        }
        GenCommand::Support {
            t,
            n,
            pairs,
            random,
            kt,
            kg,
            k,
            out,
        } => {
            let s = match (pairs, random) {
                (Some(p), _) => SpectralSupport::new(t, n, parse_pairs(&p)?)?,
                (None, true) => match (kt, kg, k) {
                    (Some(a), Some(b), Some(c)) => bandlimit::random_support(t, n, a, b, c, rng)?,
                    _ => bandlimit::random_sbl_support(t, n, rng)?,
                },
                (None, false) => {
                    return Err(Error::Malformed("give --pairs or --random".into()).into())
                }
            };
            io::write_json(&out, &s)?;
        }
        GenCommand::Signal { inst, out } => {
            let rb = load_instance(&inst)?;
            let x = rb.synthesize(&random_coefficients(rb.support(), rng))?;
            io::write_signal(&out, &x)?;
        }
        GenCommand::Reference { out_dir } => {
            std::fs::create_dir_all(&out_dir).map_err(Error::from)?;
            io::write_json(&out_dir.join("graph_t.json"), &reference::time_graph())?;
            io::write_json(&out_dir.join("graph_g.json"), &reference::vertex_graph())?;
            io::write_json(&out_dir.join("support.json"), &reference::support())?;
            io::write_json(
                &out_dir.join("basis.json"),
                &BasisFile::from_matrices(
                    &reference::restricted_time_basis(),
                    &reference::restricted_graph_basis(),
                ),
            )?;
            io::write_signal(&out_dir.join("signal.csv"), &reference::signal()?)?;
        }
    }
    Ok(())
}

fn load_graphs(graph_t: &Path, graph_g: &Path) -> Result<(Graph, Graph), Error> {
    Ok((io::read_json(graph_t)?, io::read_json(graph_g)?))
}

/// Picks the basis for one domain: a full square basis is restricted to the
/// occupied frequencies, a narrow one is taken as already restricted.
fn basis_for(m: DMatrix<f64>, dim: usize, freqs: &[usize], name: &str) -> Result<DMatrix<f64>, Error> {
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{name} basis has {} rows, graph has {dim} vertices",
            m.nrows()
        )));
    }
    if m.ncols() == dim {
        Ok(m.select_columns(freqs))
    } else if m.ncols() == freqs.len() {
        Ok(m)
    } else {
        Err(Error::DimensionMismatch(format!(
            "{name} basis has {} columns; expected {dim} (full) or {} (restricted)",
            m.ncols(),
            freqs.len()
        )))
    }
}

fn load_instance(inst: &Instance) -> Result<ReducedBases, Error> {
    let (gt, gg) = load_graphs(&inst.graph_t, &inst.graph_g)?;
    let s: SpectralSupport = io::read_json(&inst.support)?;
    if gt.n() != s.times() || gg.n() != s.vertices() {
        return Err(Error::DimensionMismatch(format!(
            "graphs have T={} N={} but the support is T={} N={}",
            gt.n(),
            gg.n(),
            s.times(),
            s.vertices()
        )));
    }
    let (u_t, u_g) = match &inst.basis_file {
        Some(p) => {
            let b: BasisFile = io::read_json(p)?;
            (b.time()?, b.graph()?)
        }
        None => (
            eig_sym(&laplacian(&gt))?.vectors().clone(),
            eig_sym(&laplacian(&gg))?.vectors().clone(),
        ),
    };
    let u_t = basis_for(u_t, s.times(), &s.time_freqs(), "time")?;
    let u_g = basis_for(u_g, s.vertices(), &s.graph_freqs(), "graph")?;
    ReducedBases::from_restricted(u_t, u_g, &s)
}

fn analyze(a: AnalyzeArgs) -> CliResult {
    let (gt, gg) = load_graphs(&a.graph_t, &a.graph_g)?;
    let x = io::read_signal(&a.signal)?;
    let (bt, bg) = match &a.basis_file {
        Some(p) => {
            let b: BasisFile = io::read_json(p)?;
            let (ut, ug) = (b.time()?, b.graph()?);
            if !ut.is_square() || !ug.is_square() {
                return Err(Error::DimensionMismatch("analyze needs full square bases".into()).into());
            }
            let (nt, ng) = (ut.ncols(), ug.ncols());
            (
                tvsample::EigenBasis::from_parts(ut, vec![f64::NAN; nt])?,
                tvsample::EigenBasis::from_parts(ug, vec![f64::NAN; ng])?,
            )
        }
        None => (eig_sym(&laplacian(&gt))?, eig_sym(&laplacian(&gg))?),
    };
    let xf = jft(&bt, &bg, &x)?;
    let s = detect_support(&xf, a.eps)?;
    if let Some(out) = &a.out {
        io::write_json(out, &s)?;
    }
    print_json(&json!({
        "T": s.times(),
        "N": s.vertices(),
        "K": s.k(),
        "K_T": s.k_t(),
        "K_G": s.k_g(),
        "sbl": is_sbl(&s),
        "pairs": s.pairs(),
    }))
}

fn plan(p: PlanArgs) -> CliResult {
    let rb = load_instance(&p.inst)?;
    let (plan, report) = if p.separate {
        let plan = tvsample::separate_sampling(rb.time(), rb.graph())?;
        let report = qualify(&plan, rb.joint(), rb.support())?;
        (plan, report)
    } else {
        rb.critical_plan()?
    };
    io::write_json(&p.out, &PlanFile::new(&plan, &report))?;
    if let Some(path) = &p.schedule {
        io::write_schedule(path, &plan)?;
    }
    print_json(&json!({ "report": report, "schedule": plan.schedule() }))
}

fn load_plan(path: &Path) -> Result<SamplingPlan, Error> {
    io::read_json::<PlanFile>(path)?.plan()
}

fn sample_cmd(s: SampleArgs) -> CliResult {
    let x = io::read_signal(&s.signal)?;
    let plan = load_plan(&s.plan)?;
    let values = sample(&x, &plan)?;
    io::write_samples(&s.out, &plan, &values)?;
    Ok(())
}

fn reconstruct_cmd(r: ReconstructArgs) -> CliResult {
    let rb = load_instance(&r.inst)?;
    let plan = load_plan(&r.plan)?;
    let values = io::values_for_plan(&io::read_samples(&r.samples)?, &plan)?;
    let rec = reconstruct(&values, &plan, rb.joint(), rb.support())?;
    io::write_signal(&r.out, &rec.signal)?;
    let Some(reference) = &r.reference else {
        return Ok(());
    };
    let x = io::read_signal(reference)?;
    if x.matrix().shape() != rec.signal.matrix().shape() {
        return Err(Error::DimensionMismatch("reference signal has the wrong shape".into()).into());
    }
    let err = (x.matrix() - rec.signal.matrix()).amax();
    let norm = x.matrix().norm();
    print_json(&json!({ "max_abs_error": err, "reference_norm": norm, "tol": r.tol }))?;
    if err < r.tol * norm {
        Ok(())
    } else {
        Err(Failure::Tolerance(format!(
            "max abs error {err:e} exceeds {:e} * {norm:e}",
            r.tol
        )))
    }
}

fn verify(v: VerifyArgs, seed: u64) -> CliResult {
    let rb = load_instance(&v.inst)?;
    let s = rb.support();
    let plan = match &v.plan {
        Some(p) => load_plan(p)?,
        None => rb.critical_plan()?.0,
    };
    let report = qualify(&plan, rb.joint(), s)?;
    let mut out = json!({ "samples": plan.samples(), "report": report });
    let mut theory_ok = report.qualified;

    if v.exhaustive {
        let ex = oracle::exhaustive_check(
            rb.joint(),
            s,
            v.max_size.unwrap_or(s.k()),
            Execution::Parallel,
        )?;
        theory_ok &= ex.bound_violations.is_empty() && ex.min_qualified_size == Some(s.k());
        out["plan_qualified_by_oracle"] = json!(oracle::is_qualified(rb.joint(), s, plan.samples()));
        out["exhaustive"] = serde_json::to_value(&ex).map_err(Error::from)?;
    }
    if v.monotonicity_trials > 0 {
        let ok = oracle::check_monotonicity(rb.joint(), v.monotonicity_trials, seed)?;
        theory_ok &= ok;
        out["monotone"] = json!(ok);
    }
    match &v.out {
        Some(p) => io::write_json(p, &out)?,
        None => print_json(&out)?,
    }
    if !report.qualified {
        return Err(Error::Unqualified {
            rank: report.rank,
            k: report.k,
        }
        .into());
    }
    if !theory_ok {
        return Err(Failure::Theory(
            "enumeration found a qualified set below a projection bound, or a rank-monotonicity failure".into(),
        ));
    }
    Ok(())
}

fn bench_cmd(b: BenchArgs, seed: u64) -> CliResult {
    let cases = b
        .sizes
        .iter()
        .map(|s| BenchCase::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    if b.reference {
        rows.push(bench::reference_row(b.reps)?);
    }
    rows.extend(bench::run(&cases, b.reps, seed, Execution::Parallel)?);
    bench::write_csv(&b.out, &rows)?;
    for r in &rows {
        eprintln!(
            "{:>10}  K={:<4} factored {:.3e}s  naive {:.3e}s  ratio {:.3}  samples {} vs {}",
            r.label, r.k, r.factored_secs, r.naive_secs, r.ratio, r.critical_samples, r.separate_samples
        );
    }
    Ok(())
}
