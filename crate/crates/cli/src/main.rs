mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freeconv::catalog::{atomic_moments, push_square, Law, MeasureSpec};
use freeconv::conv::{
    boolean_power, commutator, free_power, free_power_fid, ConvMethod, ConvOp, ConvOutput, ConvRequest, ConvTarget,
};
use freeconv::idclass::{kurtosis_check, main3_factor, positivity_scan, prop345_check, to_regular_form};
use freeconv::ncpart::{boolean_cumulants_from_moments, catalan, enumerate_nc, free_cumulants_from_moments};
use freeconv::transforms::{boolean_k, cauchy, f_transform, s_series, stieltjes_invert, NumericMap, StieltjesResult, EPS_SCHEDULE};
use freeconv::verify::{run_verify, Suite, DEFAULT_SEED};
use freeconv::{Rational, Scalar, SeqN};
use num_complex::Complex64;
use serde_json::{json, Value};

use io::{fmt_g, CliResult, Failure};

const GRID_ENV: &str = "FREECONV_GRID_DEFAULT";

/// Computational free probability: transforms, free convolutions,
/// cumulant combinatorics and free regularity tests.
#[derive(Debug, Parser)]
#[command(name = "freeconv", version)]
struct Cli {
    /// Worker threads for grid and scan work.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CumulantKind {
    Free,
    Boolean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OpArg {
    Add,
    Mult,
    Boolean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Combinatorial,
    Series,
    Analytic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "G")]
    G,
    #[value(name = "F")]
    F,
    #[value(name = "K")]
    K,
    #[value(name = "S")]
    S,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Describe a catalog law and print its spec.
    Law {
        name: String,
        /// Comma-separated parameters.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Moments m_1..m_N.
    Moments(SeqArgs),
    /// Free or boolean cumulants 1..N.
    Cumulants {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, value_enum, default_value = "free")]
        kind: CumulantKind,
    },
    /// Free additive, free multiplicative or boolean convolution of two specs.
    Convolve {
        #[arg(long, value_enum)]
        op: OpArg,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, value_enum, default_value = "combinatorial")]
        method: MethodArg,
        /// Density of the free additive convolution on a grid, by subordination.
        #[arg(long)]
        density: bool,
        /// `lo:hi:n`; defaults to $FREECONV_GRID_DEFAULT or the joint support.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, value_enum)]
        out: Option<Out>,
    },
    /// Free (or boolean) convolution power μ^{⊞t} at cumulant level.
    Power {
        spec: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Boolean power instead of free.
        #[arg(long)]
        boolean: bool,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Density by Stieltjes inversion of the Cauchy transform.
    Density {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        out: Out,
    },
    /// Free cumulants of the free commutator of two laws.
    Commutator {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Spec of the pushforward under x ↦ x².
    Square { spec: PathBuf },
    /// Free cumulants of σ with μ² = m ⊠ σ, for symmetric μ.
    #[command(name = "factor-main3")]
    FactorMain3 {
        spec: PathBuf,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Free regularity of a triplet, or the free kurtosis test of a spec.
    Check(CheckArgs),
    /// Left edge of supp μ^{⊞t} over a range of t (evidence, not proof).
    Scan {
        /// Triplet file, or a catalog law spec with a closed-form triplet.
        input: PathBuf,
        /// `lo:hi:step`.
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Run the built-in identity, density and regularity checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Non-crossing partitions of {1..n}.
    Nc {
        #[arg(long, conflicts_with = "list", required_unless_present = "list")]
        count: Option<usize>,
        #[arg(long)]
        list: Option<usize>,
    },
    /// Evaluate G, F, K or the truncated S series at a point.
    Transform {
        spec: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        /// `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Truncation order of the S series.
        #[arg(long, default_value_t = 16)]
        order: usize,
    },
}

#[derive(Debug, Args)]
struct SeqArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Rational arithmetic; law and atomic specs only.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    out: Out,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct CheckArgs {
    /// Triplet JSON file.
    #[arg(long)]
    regular: Option<PathBuf>,
    /// Measure spec file.
    #[arg(long)]
    kurtosis: Option<PathBuf>,
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn emit_seq(s: &SeqN<f64>, out: Out) {
    match out {
        Out::Json => print_json(&io::seq_json(s)),
        Out::Csv => print!("{}", io::seq_csv(s)),
    }
}

fn exact_moments(spec: &MeasureSpec, n: usize) -> CliResult<SeqN<Rational>> {
    match spec {
        MeasureSpec::Law { .. } => {
            let law = spec.pushed_law().expect("law spec")?;
            Ok(SeqN::moments(law.moments_exact(n)?))
        }
        MeasureSpec::Atomic { atoms } => {
            let atoms: Vec<(Rational, Rational)> =
                atoms.iter().map(|(x, w)| (Rational::from_f64(*x), Rational::from_f64(*w))).collect();
            Ok(atomic_moments(&atoms, n))
        }
        other => Err(Failure::usage(format!("--exact needs a law or atomic spec, got {}", other.kind_name()))),
    }
}

fn default_grid(support: CliResult<(f64, f64)>) -> CliResult<Vec<f64>> {
    if let Ok(g) = std::env::var(GRID_ENV) {
        return io::parse_grid(&g).map_err(|e| Failure::usage(format!("${GRID_ENV}: {e}")));
    }
    let (lo, hi) = support?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Failure::usage("unbounded support; pass --grid"));
    }
    let pad = (0.1 * (hi - lo)).max(0.5);
    Ok(freeconv::transforms::linspace(lo - pad, hi + pad, 401))
}

fn grid_for(grid: &Option<String>, support: impl FnOnce() -> CliResult<(f64, f64)>) -> CliResult<Vec<f64>> {
    match grid {
        Some(g) => io::parse_grid(g),
        None => default_grid(support()),
    }
}

/// Raw recovered density: the library divides by the recovered mass.
fn raw_density(r: &StieltjesResult) -> Vec<f64> {
    match &r.measure {
        MeasureSpec::Grid { densities, .. } => densities.iter().map(|d| d * r.renormalization).collect(),
        _ => Vec::new(),
    }
}

fn emit_density(xs: &[f64], r: &StieltjesResult, failures: &[(usize, f64)], out: Out) {
    let dens = raw_density(r);
    if !r.clipped.is_empty() {
        eprintln!("warning: {} grid points clipped from negative values", r.clipped.len());
    }
    if !r.oscillating.is_empty() {
        eprintln!("warning: {} grid points did not settle under the ε schedule", r.oscillating.len());
    }
    if !failures.is_empty() {
        eprintln!("warning: subordination did not converge at {} grid points", failures.len());
    }
    match out {
        Out::Csv => print!("{}", io::density_csv(xs, &dens)),
        Out::Json => print_json(&json!({
            "kind": "density",
            "xs": xs,
            "values": dens,
            "atoms": r.atoms,
            "mass": r.renormalization,
            "oscillating": r.oscillating,
            "clipped": r.clipped,
        })),
    }
}

fn eval_s(spec: &MeasureSpec, order: usize, z: Complex64) -> CliResult<Complex64> {
    let s = s_series(&spec.moment_seq(order + 1)?, order)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in s.coeffs().iter().rev() {
        acc = acc * z + c;
    }
    Ok(acc * z.powi(s.low()))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Law { name, params, order } => {
            let law = Law::parse(&name, &params)?;
            let spec = MeasureSpec::law(&name, &params)?;
            let (lo, hi) = law.support();
            print_json(&json!({
                "kind": "law",
                "spec": spec,
                "support": [lo, hi],
                "atoms": law.atoms(),
                "symmetric": law.is_symmetric(),
                "moments": law.moments::<f64>(order)?,
            }));
        }
        Command::Moments(a) => {
            let spec = io::read_measure(&a.spec)?;
            if a.exact {
                print_json(&io::seq_json_exact(&exact_moments(&spec, a.order)?));
            } else {
                emit_seq(&spec.moment_seq(a.order)?, a.out);
            }
        }
        Command::Cumulants { seq: a, kind } => {
            let spec = io::read_measure(&a.spec)?;
            if a.exact {
                let m = exact_moments(&spec, a.order)?;
                let k = match kind {
                    CumulantKind::Free => free_cumulants_from_moments(&m)?,
                    CumulantKind::Boolean => boolean_cumulants_from_moments(&m)?,
                };
                print_json(&io::seq_json_exact(&k));
            } else {
                let k = match kind {
                    CumulantKind::Free => spec.free_cumulant_seq(a.order)?,
                    CumulantKind::Boolean => boolean_cumulants_from_moments(&spec.moment_seq(a.order)?)?,
                };
                emit_seq(&k, a.out);
            }
        }
        Command::Convolve { op, a, b, order, method, density, grid, out } => {
            let (sa, sb) = (io::read_measure(&a)?, io::read_measure(&b)?);
            let op = match op {
                OpArg::Add => ConvOp::FreeAdd,
                OpArg::Mult => ConvOp::FreeMult,
                OpArg::Boolean => ConvOp::BooleanAdd,
            };
            let (target, method) = if density {
                let xs = grid_for(&grid, || {
                    let (a0, a1) = sa.support()?;
                    let (b0, b1) = sb.support()?;
                    Ok((a0 + b0, a1 + b1))
                })?;
                (ConvTarget::Grid(xs), ConvMethod::Analytic)
            } else {
                let m = match method {
                    MethodArg::Combinatorial => ConvMethod::Combinatorial,
                    MethodArg::Series => ConvMethod::Series,
                    MethodArg::Analytic => ConvMethod::Analytic,
                };
                (ConvTarget::Order(order), m)
            };
            let req = ConvRequest { a: sa, b: sb, op, target: target.clone(), method };
            match req.run()? {
                ConvOutput::Sequence(s) => emit_seq(&s, out.unwrap_or(Out::Json)),
                ConvOutput::Mult(r) => match out.unwrap_or(Out::Json) {
                    Out::Json => print_json(&json!({
                        "kind": "moment",
                        "values": r.moments.values,
                        "mass_at_zero": r.mass_at_zero.map(|m| m + 0.0),
                    })),
                    Out::Csv => print!("{}", io::seq_csv(&r.moments)),
                },
                ConvOutput::Density(d) => {
                    let ConvTarget::Grid(xs) = &target else { unreachable!("density needs a grid") };
                    emit_density(xs, &d.inversion, &d.failures, out.unwrap_or(Out::Csv));
                }
            }
        }
        Command::Power { spec, t, order, boolean, out } => {
            let spec = io::read_measure(&spec)?;
            let s = if boolean {
                boolean_power(&boolean_cumulants_from_moments(&spec.moment_seq(order)?)?, &t)?
            } else {
                let k = spec.free_cumulant_seq(order)?;
                if t >= 1.0 {
                    free_power(&k, &t)?
                } else {
                    eprintln!("note: t < 1 assumes the input is freely infinitely divisible");
                    free_power_fid(&k, &t)?
                }
            };
            emit_seq(&s, out);
        }
        Command::Density { spec, grid, out } => {
            let spec = io::read_measure(&spec)?;
            let xs = grid_for(&grid, || Ok(spec.support()?))?;
            let g = NumericMap::cauchy_of(&spec)?;
            let r = stieltjes_invert(&g, &xs, EPS_SCHEDULE)?;
            emit_density(&xs, &r, &[], out);
        }
        Command::Commutator { a, b, order } => {
            let (sa, sb) = (io::read_measure(&a)?, io::read_measure(&b)?);
            let k = commutator(&sa.free_cumulant_seq(order)?, &sb.free_cumulant_seq(order)?, order)?;
            emit_seq(&k, Out::Json);
        }
        Command::Square { spec } => {
            let sq = push_square(&io::read_measure(&spec)?)?;
            print_json(&serde_json::to_value(&sq).expect("serializable"));
        }
        Command::FactorMain3 { spec, order } => {
            let spec = io::read_measure(&spec)?;
            let sigma = main3_factor(&spec.free_cumulant_seq(2 * order)?)?;
            emit_seq(&sigma, Out::Json);
        }
        Command::Check(c) => {
            if let Some(path) = c.regular {
                let t = io::read_triplet(&path)?;
                let (regular, form, reason) = match to_regular_form(&t) {
                    Ok(r) => (r.is_free_regular(), Some(r), None),
                    Err(e) => (false, None, Some(e.to_string())),
                };
                let prop = prop345_check(&t).ok();
                print_json(&json!({
                    "kind": "regularity",
                    "free_regular": regular,
                    "regular_form": form,
                    "reason": reason,
                    "voiculescu_check": prop,
                }));
            } else if let Some(path) = c.kurtosis {
                let spec = io::read_measure(&path)?;
                let k = kurtosis_check(&spec.moment_seq(4)?)?;
                print_json(&json!({
                    "kind": "kurtosis",
                    "value": k.value,
                    "verdict": k.verdict,
                }));
            }
        }
        Command::Scan { input, t, out } => {
            let triplet = io::read_triplet_or_law(&input)?;
            let ts = io::parse_range(&t)?;
            if ts[0] <= 0.0 {
                return Err(Failure::usage("scan needs t > 0"));
            }
            let report = positivity_scan(&triplet, &ts)?;
            match out {
                Out::Json => print_json(&json!({
                    "kind": "scan",
                    "points": report.points,
                    "nonnegative_evidence": report.nonnegative_evidence,
                })),
                Out::Csv => {
                    println!("t,left_edge,atom");
                    for p in &report.points {
                        println!("{},{},{}", fmt_g(p.t), fmt_g(p.left_edge), p.atom);
                    }
                }
            }
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse().map_err(Failure::usage)?;
            let report = run_verify(suite, seed);
            print!("{}", report.render());
            if !report.all_pass() {
                return Err(Failure::Compute(anyhow::anyhow!("verify: some checks failed")));
            }
        }
        Command::Nc { count, list } => {
            if let Some(n) = count {
                if n > 60 {
                    return Err(Failure::usage(format!("count is exact only for n ≤ 60, got {n}")));
                }
                println!("{}", catalan(n)[n]);
            } else if let Some(n) = list {
                for p in enumerate_nc(n)? {
                    let blocks: Vec<String> = p
                        .blocks()
                        .iter()
                        .map(|b| format!("{{{}}}", b.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
                        .collect();
                    println!("{}", blocks.join(" "));
                }
            }
        }
        Command::Transform { spec, which, at, order } => {
            let spec = io::read_measure(&spec)?;
            let z = io::parse_complex(&at)?;
            let v = match which {
                Which::G => cauchy(&spec, z)?,
                Which::F => f_transform(&spec, z)?,
                Which::K => boolean_k(&spec, z)?,
                Which::S => eval_s(&spec, order, z)?,
            };
            println!("{},{}", fmt_g(v.re), fmt_g(v.im));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
