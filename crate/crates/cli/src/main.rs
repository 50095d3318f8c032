use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use indiqp::cover;
use indiqp::decomp::{self, DecompConfig, StepSchedule};
use indiqp::instance::{self, io as inst_io};
use indiqp::tridiag::{self, TridiagProblem};
use indiqp::{oracle, Instance};

/// Quadratic minimization with indicator variables on sparse support graphs.
#[derive(Debug, Parser)]
#[command(name = "indiqp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Solve a path-structured instance exactly.
    SolvePath(SolveArgs),
    /// Bound a diagonally dominant instance by dual decomposition.
    SolveDecomp(DecompArgs),
    /// Print the variable ordering and relaxed terms chosen by the cover.
    Decompose(SolveArgs),
    /// Solve a small instance by enumerating every support.
    Oracle(SolveArgs),
    /// Time the path solver over a range of sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Tridiag,
    Signal1d,
    Lattice2d,
}

#[derive(Debug, Args)]
struct GenArgs {
    family: Family,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    rows: usize,
    #[arg(long, default_value_t = 10)]
    cols: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0.01)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    input: PathBuf,
    /// Output file; stdout if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Steps {
    Geometric,
    Harmonic,
}

#[derive(Debug, Args)]
struct DecompArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Steps::Geometric)]
    steps: Steps,
    /// Ratio of the geometric schedule.
    #[arg(long, default_value_t = 1.01)]
    ratio: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Worker threads for the path segments.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the iteration log as CSV.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Family::Tridiag)]
    family: Family,
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SolutionJson {
    objective: f64,
    objective_with_offset: f64,
    z: Vec<u8>,
    x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iters: Option<usize>,
}

impl SolutionJson {
    fn new(inst: &Instance, objective: f64, x: Vec<f64>, z: &[bool]) -> Self {
        SolutionJson {
            objective,
            objective_with_offset: objective + inst.offset,
            z: z.iter().map(|&b| b as u8).collect(),
            x,
            lower: None,
            upper: None,
            gap: None,
            iters: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct RelaxedJson {
    i: usize,
    j: usize,
    w: f64,
}

/// Indices are 1-based, as in the instance format.
#[derive(Debug, Serialize)]
struct DecomposeJson {
    ordering: Vec<usize>,
    retained: Vec<(usize, usize)>,
    relaxed: Vec<RelaxedJson>,
    cover_weight: f64,
    total_weight: f64,
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    inst_io::read_instance(path).with_context(|| format!("reading {}", path.display()))
}

fn generate(family: Family, args: &GenArgs, n: usize, seed: u64) -> indiqp::Result<Instance> {
    match family {
        Family::Tridiag => instance::gen_tridiagonal(n, seed),
        Family::Signal1d => instance::gen_signal1d(n, args.sigma, args.mu, seed),
        Family::Lattice2d => instance::gen_lattice2d(args.rows, args.cols, args.sigma, args.mu, seed),
    }
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let inst = generate(args.family, args, args.n, args.seed)?;
    let mut w = output(args.output.as_deref())?;
    w.write_all(inst_io::to_json_string(&inst).as_bytes())?;
    writeln!(w)?;
    w.flush()?;
    log::info!("generated {:?} instance with n = {}", args.family, inst.n);
    Ok(())
}

fn cmd_solve_path(args: &SolveArgs) -> anyhow::Result<()> {
    let inst = load(&args.input)?;
    let sol = tridiag::solve(&TridiagProblem::from_instance(&inst)?)?;
    eprintln!("objective {}", sol.objective);
    write_json(&SolutionJson::new(&inst, sol.objective, sol.x, &sol.z), args.output.as_deref())
}

fn cmd_solve_decomp(args: &DecompArgs) -> anyhow::Result<()> {
    if args.threads == 0 {
        bail!(indiqp::Error::InvalidParameter("--threads must be >= 1".into()));
    }
    let inst = load(&args.input)?;
    let config = DecompConfig {
        schedule: match args.steps {
            Steps::Geometric => StepSchedule::Geometric { ratio: args.ratio },
            Steps::Harmonic => StepSchedule::Harmonic,
        },
        eps: args.eps,
        max_iter: args.max_iter,
        parallel: args.threads > 1,
        big_m: inst.meta.big_m,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
    let (_, res) = pool.install(|| decomp::solve(&inst, &config))?;
    if let Some(p) = &args.log {
        let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
        decomp::write_log_csv(&res.log, BufWriter::new(f))?;
    }
    eprintln!(
        "lower {} upper {} gap {:.6} after {} iterations ({:?})",
        res.lower(),
        res.upper(),
        res.gap(),
        res.iterations(),
        res.termination
    );
    let st = &res.state;
    let mut out = SolutionJson::new(&inst, st.best_upper, st.best_x.clone(), &st.best_z);
    out.lower = Some(res.lower());
    out.upper = Some(res.upper());
    out.gap = Some(res.gap());
    out.iters = Some(res.iterations());
    write_json(&out, args.output.as_deref())
}

fn cmd_decompose(args: &SolveArgs) -> anyhow::Result<()> {
    let inst = load(&args.input)?;
    let g = inst.support_graph();
    let cs = cover::path_cover(&g);
    let ord = cover::make_ordering(&cs, &g)?;
    let out = DecomposeJson {
        ordering: ord.pi.iter().map(|&v| v + 1).collect(),
        retained: ord.retained.iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
        relaxed: ord.relaxed.iter().map(|&(i, j, w)| RelaxedJson { i: i + 1, j: j + 1, w }).collect(),
        cover_weight: cs.weight,
        total_weight: g.edges.iter().map(|e| e.2).sum(),
    };
    write_json(&out, args.output.as_deref())
}

fn cmd_oracle(args: &SolveArgs) -> anyhow::Result<()> {
    let inst = load(&args.input)?;
    let res = oracle::enumerate(&inst)?;
    eprintln!("objective {} ({} supports)", res.value, res.supports_enumerated);
    write_json(&SolutionJson::new(&inst, res.value, res.x, &res.z), args.output.as_deref())
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    if args.reps == 0 {
        bail!(indiqp::Error::InvalidParameter("--reps must be >= 1".into()));
    }
    if matches!(args.family, Family::Lattice2d) {
        bail!(indiqp::Error::InvalidParameter("bench supports the path families only".into()));
    }
    let gen_args = GenArgs {
        family: args.family,
        n: 0,
        rows: 0,
        cols: 0,
        sigma: 0.1,
        mu: 0.01,
        seed: args.seed,
        output: None,
    };
    let mut w = output(args.output.as_deref())?;
    writeln!(w, "family,n,reps,median_ms,objective")?;
    for &n in &args.sizes {
        let inst = generate(args.family, &gen_args, n, args.seed)?;
        let p = TridiagProblem::from_instance(&inst)?;
        let mut times = Vec::with_capacity(args.reps);
        let mut objective = 0.0;
        for _ in 0..args.reps {
            let t = Instant::now();
            objective = tridiag::solve(&p)?.objective;
            times.push(t.elapsed().as_secs_f64() * 1e3);
        }
        times.sort_by(f64::total_cmp);
        let family = format!("{:?}", args.family).to_lowercase();
        writeln!(w, "{family},{n},{},{:.4},{objective}", args.reps, times[times.len() / 2])?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::SolvePath(a) => cmd_solve_path(a),
        Command::SolveDecomp(a) => cmd_solve_decomp(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<indiqp::Error>())
        .any(indiqp::Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
