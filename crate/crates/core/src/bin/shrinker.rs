use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shrinker_core::asymptotics::{
    drift_from_eigenvalues, high_k_table, potential_profile, profile_csv,
};
use shrinker_core::convergence::{
    run_study_on_curves, study_csv, study_summary, table_report, Quantity, DEFAULT_M_LIST,
};
use shrinker_core::geodesic::solve_geodesic_with_report;
use shrinker_core::io::{fmt17, read_curve, to_json, write_curve};
use shrinker_core::render::{
    surface_of_revolution, svg_variation, Azimuth, Variation, DEFAULT_EPSILON_FRACTION,
    DEFAULT_N_THETA,
};
use shrinker_core::spectral::{
    compute_index_with, eigenvalues, labelled_spectrum, IndexOptions, SpectrumReport,
};
use shrinker_core::{
    assemble_l0, assemble_lk, discrete_length, normal_field, DiscreteCurve, Error, HalfPlanePoint,
    SolveConfig,
};

const EXIT_RUNTIME: u8 = 2;
const EXIT_BAD_ARGS: u8 = 3;
const EXIT_CONSISTENCY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "shrinker",
    version,
    about = "Discrete self-shrinker cross-sections and their stability index"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the discrete curve and print its entropy.
    Solve(SolveArgs),
    /// Lowest eigenpairs of one stability matrix, as JSON.
    Spectrum(SpectrumArgs),
    /// Count negative modes over all k and report the index.
    Index(IndexArgs),
    /// Resolution study of the lowest eigenvalues and the entropy.
    Convergence(ConvergenceArgs),
    /// Large-j and large-k eigenvalue asymptotics.
    Asymptotics(AsymptoticsArgs),
    /// SVG and OBJ pictures of an eigenmode.
    Render(RenderArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Number of curve points.
    #[arg(short = 'M', long, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(8..=1 << 20))]
    points: u64,
    /// Stopping tolerance on the normal residual of the length gradient.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    grad_tol: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    /// Seed circle center, r coordinate.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2, value_parser = positive)]
    seed_r: f64,
    /// Seed circle center, z coordinate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = finite)]
    seed_z: f64,
    #[arg(long, default_value_t = 0.5, value_parser = positive)]
    seed_radius: f64,
}

impl SolverArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            points: self.points as usize,
            seed_center: HalfPlanePoint::new(self.seed_r, self.seed_z),
            seed_radius: self.seed_radius,
            grad_tol: self.grad_tol,
            max_iters: self.max_iter as usize,
            ..SolveConfig::default()
        }
    }
}

#[derive(Args)]
struct CurveSource {
    /// Curve CSV (`m,r,z`) to use instead of solving.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

impl CurveSource {
    fn load(&self) -> Result<DiscreteCurve, Failure> {
        match &self.curve {
            Some(path) => {
                read_curve(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
            }
            None => Ok(solve_geodesic_with_report(&self.solver.config())?.0),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    solver: SolverArgs,
    /// Curve CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: CurveSource,
    /// Azimuthal mode number.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true, value_parser = clap::value_parser!(i64).range(0..=100_000))]
    k: i64,
    /// Number of eigenpairs.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// JSON output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat dump `j,lambda,label,residual`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    source: CurveSource,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(0..=100_000))]
    k_max: u64,
    /// Eigenpairs labelled per mode.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// JSON output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    solver: SolverArgs,
    /// Resolutions, ascending.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_M_LIST.map(|m| m as u64), value_parser = clap::value_parser!(u64).range(8..=1 << 20))]
    m_list: Vec<u64>,
    /// Output directory.
    #[arg(long, default_value = "convergence")]
    out: PathBuf,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[command(flatten)]
    source: CurveSource,
    /// Mode for the large-j drift table and the potential profile.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true, value_parser = clap::value_parser!(i64).range(0..=100_000))]
    k: i64,
    /// Largest j in the drift table; M/16 when absent.
    #[arg(long, value_parser = clap::value_parser!(u64).range(10..))]
    j_max: Option<u64>,
    /// Range of k for the ground-state table.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(2..=100_000))]
    k_min: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..=100_000))]
    k_max: u64,
    /// Output directory.
    #[arg(long, default_value = "asymptotics")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    source: CurveSource,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true, value_parser = clap::value_parser!(i64).range(0..=100_000))]
    k: i64,
    /// Eigenmode index j within mode k.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=100_000))]
    mode: u64,
    /// Largest displacement; 0.15 of the curve diameter when absent.
    #[arg(long, value_parser = positive)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_THETA as u64, value_parser = clap::value_parser!(u64).range(3..=1 << 16))]
    ntheta: u64,
    /// Azimuthal factor sin(k theta).
    #[arg(long, conflicts_with = "cos")]
    sin: bool,
    /// Azimuthal factor cos(k theta) (the default).
    #[arg(long)]
    cos: bool,
    /// Output path without extension; `.svg` and `.obj` are appended.
    #[arg(long, default_value = "mode")]
    out: PathBuf,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not finite")),
        Err(e) => Err(e.to_string()),
    }
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn runtime(message: String) -> Self {
        Self {
            code: EXIT_RUNTIME,
            kind: "runtime",
            message,
        }
    }

    fn bad_args(message: String) -> Self {
        Self {
            code: EXIT_BAD_ARGS,
            kind: "bad-args",
            message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ExclusionMismatch(_)
            | Error::AmbiguousNormal { .. }
            | Error::UnboundedIndex { .. } => Self {
                code: EXIT_CONSISTENCY,
                kind: "consistency",
                message: e.to_string(),
            },
            Error::InvalidInput(_) => Self::bad_args(e.to_string()),
            _ => Self::runtime(e.to_string()),
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let (curve, _) = solve_geodesic_with_report(&args.solver.config())?;
    if let Some(out) = &args.out {
        write_curve(&curve, out)
            .map_err(|e| Failure::runtime(format!("{}: {e}", out.display())))?;
    }
    println!("entropy {} M {}", discrete_length(&curve), curve.len());
    Ok(())
}

fn spectrum(args: SpectrumArgs) -> Result<(), Failure> {
    let curve = args.source.load()?;
    let count = args.count as usize;
    if count > curve.len() {
        return Err(Failure::bad_args(format!(
            "--count {count} exceeds the {} curve points",
            curve.len()
        )));
    }
    let normals = normal_field(&curve)?;
    let l0 = assemble_l0(&curve, &normals)?;
    let spec = labelled_spectrum(&l0, &curve, &normals, args.k as u32, count)?;
    let report = SpectrumReport::new(curve.len(), &spec);
    let json = to_json(&report)?;
    match &args.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.csv {
        let mut csv = String::from("j,lambda,label,residual\n");
        for mode in &spec.modes {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                mode.j,
                fmt17(mode.lambda),
                mode.label,
                fmt17(mode.residual)
            ));
        }
        write(path, &csv)?;
    }
    Ok(())
}

fn index(args: IndexArgs) -> Result<(), Failure> {
    let curve = args.source.load()?;
    let opts = IndexOptions {
        count: args.count as usize,
        k_max: args.k_max as u32,
    };
    let report = compute_index_with(&curve, opts)?;
    let json = to_json(&report)?;
    match &args.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    println!("{}", report.summary());
    Ok(())
}

fn convergence(args: ConvergenceArgs) -> Result<(), Failure> {
    let m_list: Vec<usize> = args.m_list.iter().map(|&m| m as usize).collect();
    if m_list.len() < 3 || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::bad_args(format!(
            "--m-list must be strictly ascending with at least 3 entries, got {m_list:?}"
        )));
    }
    let curves = m_list
        .iter()
        .map(|&m| {
            let mut cfg = args.solver.config();
            cfg.points = m;
            solve_geodesic_with_report(&cfg).map(|r| r.0)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut quantities = Quantity::table();
    quantities.push(Quantity::Entropy);
    let studies = run_study_on_curves(&quantities, &curves.iter().collect::<Vec<_>>())?;
    let table = table_report(&studies);

    create_dir(&args.out)?;
    write(&args.out.join("table.csv"), &table.to_csv())?;
    write(&args.out.join("table.txt"), &table.to_text())?;
    write(&args.out.join("study.csv"), &study_csv(&studies))?;
    write(
        &args.out.join("summary.json"),
        &to_json(&study_summary(&studies))?,
    )?;
    let loglog = args.out.join("loglog");
    create_dir(&loglog)?;
    for s in &studies {
        write(&loglog.join(format!("{}.csv", s.quantity)), &s.loglog_csv())?;
    }
    print!("{}", table.to_text());
    Ok(())
}

fn asymptotics(args: AsymptoticsArgs) -> Result<(), Failure> {
    let curve = args.source.load()?;
    let k = args.k as u32;
    let j_max = args.j_max.map_or(curve.len() / 16, |j| j as usize);
    if args.k_min > args.k_max {
        return Err(Failure::bad_args(format!(
            "--k-min {} exceeds --k-max {}",
            args.k_min, args.k_max
        )));
    }
    let normals = normal_field(&curve)?;
    let l0 = assemble_l0(&curve, &normals)?;
    let profile = potential_profile(&curve, k);
    let values = eigenvalues(&assemble_lk(&l0, &curve, k))?;
    let drift = drift_from_eigenvalues(&profile, &values, j_max)?;
    let high_k = high_k_table(&curve, args.k_min as u32..=args.k_max as u32)?;

    create_dir(&args.out)?;
    write(&args.out.join("drift.csv"), &drift.to_csv())?;
    write(&args.out.join("profile.csv"), &profile_csv(&profile))?;
    let mut csv = String::from("k,lambda0,estimate,abs_error,rel_error\n");
    for row in &high_k {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k,
            fmt17(row.lambda0),
            fmt17(row.estimate),
            fmt17(row.abs_error()),
            fmt17(row.rel_error())
        ));
    }
    write(&args.out.join("highk.csv"), &csv)?;

    println!(
        "drift exponent {:.4} over j in [{}, {}] at k = {k}",
        drift.exponent, drift.fit_range.0, drift.fit_range.1
    );
    for row in &high_k {
        println!(
            "k {} lambda0 {:.8} estimate {:.8} abs_error {:.3e} rel_error {:.3e}",
            row.k,
            row.lambda0,
            row.estimate,
            row.abs_error(),
            row.rel_error()
        );
    }
    Ok(())
}

fn render(args: RenderArgs) -> Result<(), Failure> {
    let curve = args.source.load()?;
    let j = args.mode as usize;
    if j >= curve.len() {
        return Err(Failure::bad_args(format!(
            "--mode {j} exceeds the {} curve points",
            curve.len()
        )));
    }
    let k = args.k as u32;
    let normals = normal_field(&curve)?;
    let l0 = assemble_l0(&curve, &normals)?;
    let spec = labelled_spectrum(&l0, &curve, &normals, k, j + 1)?;
    let u = &spec.modes[j].u;
    let epsilon = args
        .epsilon
        .unwrap_or_else(|| DEFAULT_EPSILON_FRACTION * shrinker_core::render::diameter(&curve));
    let svg = svg_variation(&curve, &normals, u, Some(epsilon))?;
    let mesh = surface_of_revolution(
        &curve,
        args.ntheta as usize,
        Some(Variation {
            normals: &normals,
            u,
            k,
            azimuth: if args.sin { Azimuth::Sin } else { Azimuth::Cos },
            epsilon,
        }),
    )?;
    let base = args.out.as_os_str().to_owned();
    let mut svg_path = base.clone();
    svg_path.push(".svg");
    let mut obj_path = base;
    obj_path.push(".obj");
    write(Path::new(&svg_path), &svg)?;
    write(Path::new(&obj_path), &mesh.to_obj())?;
    println!(
        "k {k} mode {j} lambda {} label {}",
        spec.modes[j].lambda, spec.modes[j].label
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text
                .lines()
                .map(|l| l.trim_start_matches("error: ").trim())
                .find(|l| !l.is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("error[bad-args]: {line}");
            return ExitCode::from(EXIT_BAD_ARGS);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Index(a) => index(a),
        Command::Convergence(a) => convergence(a),
        Command::Asymptotics(a) => asymptotics(a),
        Command::Render(a) => render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
