use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use typen_forge::cr_invariants::{invariant_profile, AChoice, SolutionSpec};
use typen_forge::exact_series::{
    check_common_factor, g_coefficients, g_coefficients_symbolic, j_taylor, verify_theorem4,
};
use typen_forge::export::{json_envelope, metric_csv, profile_csv, trajectory_csv};
use typen_forge::metric::{parse_grid, reconstruct_metric, MetricConstants};
use typen_forge::numeric_ode::{
    asymptotic_fit, flat_family, integrate_abel, integrate_g, integrate_j, integrate_p, sandwich_of, FlatCase,
    FlatFamilyParams, Trajectory,
};
use typen_forge::painleve_analysis::{builtin, parse_ode, weak_painleve_verdict};
use typen_forge::puiseux_engine::{puiseux_coefficients, puiseux_expand};
use typen_forge::scalar::{parse_rational, rational_string};
use typen_forge::BigRational;

type Failure = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "typen-forge", version, about = "Series, Painleve, numeric and CR-invariant tools for type N reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Even power-series coefficients of g(w), or the J-series.
    Series(SeriesArgs),
    /// Puiseux coefficients of P(J) about a movable point.
    Puiseux(PuiseuxArgs),
    /// Weak Painleve verdict for a built-in or supplied equation.
    Painleve(PainleveArgs),
    /// Adaptive integration of one of the reduced equations.
    Integrate(IntegrateArgs),
    /// Cartan invariant profile of a solution.
    Invariants(InvariantsArgs),
    /// Conformally flat family on a z-grid.
    Flat(FlatArgs),
    /// Metric functions on a coordinate grid.
    Metric(MetricArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational: {s}"))
}

#[derive(Args)]
struct SeriesArgs {
    /// g(0), or J'(0) with --j.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    u0: Option<BigRational>,
    /// Number of even coefficients past u0 (order of the J-series with --j).
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Coefficients as polynomials in u0 over powers of u0.
    #[arg(long)]
    symbolic: bool,
    /// Check that (u0 + 3/4)(u0 + 6) divides every numerator up to kmax.
    #[arg(long)]
    factor: bool,
    /// Check the coefficient bound with constants C,M (rationals).
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    bound: Option<Vec<BigRational>>,
    /// J-series with J(0) = J''(0) = 0 and this Λ.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    j: Option<BigRational>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PuiseuxArgs {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    u0: BigRational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "0")]
    j0: BigRational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    lambda: BigRational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "1")]
    c1: BigRational,
    /// Number of coefficients.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PainleveArgs {
    /// Built-in equation: PEQ, JEQ or ABEL.
    #[arg(long, conflicts_with = "expr")]
    ode: Option<String>,
    /// Polynomial equation in x, y, y', y'', ... equal to zero.
    #[arg(long)]
    expr: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum OdeId {
    G,
    Peq,
    Jeq,
    Abel,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long, value_enum)]
    ode: OdeId,
    /// g: g(0).
    #[arg(long, allow_hyphen_values = true)]
    u0: Option<f64>,
    /// g: the constant C, 0 or 1.
    #[arg(long, default_value_t = 1)]
    c: u8,
    /// Start of the independent variable (PEQ: J0, JEQ: z0, ABEL: t0).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    start: f64,
    /// End of the independent variable.
    #[arg(long, allow_hyphen_values = true)]
    end: f64,
    /// Initial state: PEQ `P,P'`; JEQ `J,J',J''`; ABEL `f`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// g: also write sandwich and remainder-fit report as JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// g: window LO,HI of the remainder fit.
    #[arg(long, value_delimiter = ',', default_values_t = [20.0, 50.0])]
    fit: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Leroy-Nurowski, J = 3C1/(2Λ tan(C1(z+C0)/2)).
    Ln,
    /// Conformally flat, J = 2C1/(Λ tan(3C1(z+C0))).
    FlatTan,
    Case1,
    Case2,
    Case3,
    /// Even g-series as a J solution (Λ = -1, C1 = 1).
    GSeries,
    /// J(0) = 0, J'(0) = u0, J''(0) = 0, C1 = 0.
    JSeries,
    /// Initial data (J, J', J'') at z0.
    Jeq,
}

#[derive(Args)]
struct SolutionArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, allow_hyphen_values = true)]
    u0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    z0: f64,
    /// jeq: `J,J',J''` at z0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init: Vec<f64>,
}

impl SolutionArgs {
    fn flat_params(&self, case: FlatCase) -> FlatFamilyParams {
        FlatFamilyParams { case, lambda: self.lambda, c0: self.c0, c1: self.c1, c2: self.c2 }
    }

    fn spec(&self) -> Result<SolutionSpec, Failure> {
        let u0 = || self.u0.ok_or("--u0 is required for this family");
        let family = |params| SolutionSpec::Family { params };
        Ok(match self.family {
            Family::Ln => family(FlatFamilyParams::leroy_nurowski(self.lambda, self.c1, self.c0)),
            Family::FlatTan => family(FlatFamilyParams::flat_tan(self.lambda, self.c1, self.c0)),
            Family::Case1 => family(self.flat_params(FlatCase::Case1)),
            Family::Case2 => family(self.flat_params(FlatCase::Case2)),
            Family::Case3 => family(self.flat_params(FlatCase::Case3)),
            Family::GSeries => SolutionSpec::g_series(u0()?),
            Family::JSeries => SolutionSpec::j_series(u0()?, self.lambda),
            Family::Jeq => {
                let init: [f64; 3] = self.init.as_slice().try_into().map_err(|_| "--init needs J,J',J''")?;
                SolutionSpec::Jeq { z0: self.z0, init, lambda: self.lambda, c1: self.c1 }
            }
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AArg {
    /// A = 2.
    Two,
    /// A = ζ.
    Zeta,
}

#[derive(Args)]
struct InvariantsArgs {
    #[command(flatten)]
    solution: SolutionArgs,
    #[arg(long, allow_hyphen_values = true)]
    z_lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    z_hi: f64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = AArg::Two)]
    a: AArg,
    /// x for A = 2, |ζ| for A = ζ.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    transverse: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FlatArgs {
    #[arg(long, value_enum)]
    case: FlatArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, allow_hyphen_values = true)]
    z_lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    z_hi: f64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlatArg {
    Case1,
    Case2,
    Case3,
    FlatTan,
    FlatPole,
    Ln,
    LnPole,
}

impl From<FlatArg> for FlatCase {
    fn from(a: FlatArg) -> Self {
        match a {
            FlatArg::Case1 => FlatCase::Case1,
            FlatArg::Case2 => FlatCase::Case2,
            FlatArg::Case3 => FlatCase::Case3,
            FlatArg::FlatTan => FlatCase::FlatTan,
            FlatArg::FlatPole => FlatCase::FlatPole,
            FlatArg::Ln => FlatCase::LeroyNurowski,
            FlatArg::LnPole => FlatCase::LeroyNurowskiPole,
        }
    }
}

#[derive(Args)]
struct MetricArgs {
    #[command(flatten)]
    solution: SolutionArgs,
    /// Grid file: one `x z u r` tuple per line, `#` comments.
    #[arg(long)]
    grid: PathBuf,
    /// Additive constant of the inner integral of F2.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    k_f2: f64,
    /// Additive constant of the outer integral.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    k_outer: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// Print the JSON summary instead of one line per criterion.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    output: Output,
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(out: &Output, kind: &str, data: &T) -> Result<(), Failure> {
    emit(out, &(json_envelope(kind, data)? + "\n"))
}

fn series(a: &SeriesArgs) -> Result<(), Failure> {
    if a.symbolic {
        return emit_json(&a.output, "series", &g_coefficients_symbolic(a.kmax));
    }
    if a.factor {
        return emit_json(&a.output, "series", &check_common_factor(a.kmax));
    }
    let u0 = a.u0.as_ref().ok_or("--u0 is required unless --symbolic or --factor")?;
    if let Some(b) = &a.bound {
        if b.len() != 2 {
            return Err("--bound needs C,M".into());
        }
        return emit_json(&a.output, "series", &verify_theorem4(u0, &b[0], &b[1], a.kmax));
    }
    match &a.j {
        Some(lambda) => emit_json(&a.output, "series", &j_taylor(u0, lambda, a.kmax)?),
        None => emit_json(&a.output, "series", &g_coefficients(u0, a.kmax)?),
    }
}

fn to_f64(v: &BigRational) -> f64 {
    rational_string(v).split_once('/').map_or_else(
        || rational_string(v).parse().unwrap_or(f64::NAN),
        |(n, d)| n.parse::<f64>().unwrap_or(f64::NAN) / d.parse::<f64>().unwrap_or(f64::NAN),
    )
}

fn puiseux(a: &PuiseuxArgs) -> Result<(), Failure> {
    let exact = puiseux_coefficients(&a.u0, &a.j0, &a.lambda, &a.c1, a.n)?;
    let c = |v: &BigRational| Complex64::new(to_f64(v), 0.0);
    let series = puiseux_expand(c(&a.u0), c(&a.j0), to_f64(&a.lambda), to_f64(&a.c1), a.n)?;
    let exact: Vec<String> = exact.iter().map(rational_string).collect();
    emit_json(&a.output, "puiseux", &json!({ "exact": exact, "series": series }))
}

fn painleve(a: &PainleveArgs) -> Result<(), Failure> {
    let text = match (&a.ode, &a.expr) {
        (Some(id), _) => builtin(id).ok_or_else(|| format!("unknown built-in equation {id}"))?.to_string(),
        (None, Some(e)) => e.clone(),
        (None, None) => return Err("one of --ode or --expr is required".into()),
    };
    emit_json(&a.output, "painleve", &weak_painleve_verdict(&parse_ode(&text)?))
}

fn init_of<const N: usize>(v: &[f64], what: &str) -> Result<[f64; N], Failure> {
    v.try_into().map_err(|_| format!("--init needs {what}").into())
}

fn integrate(a: &IntegrateArgs) -> Result<(), Failure> {
    let tr: Trajectory = match a.ode {
        OdeId::G => integrate_g(a.u0.ok_or("--u0 is required for g")?, a.c, a.end, a.tol)?,
        OdeId::Peq => {
            let [p, dp] = init_of::<2>(&a.init, "P,P'")?;
            integrate_p(a.start, p, dp, a.lambda, a.c1, a.end, a.tol)?
        }
        OdeId::Jeq => integrate_j(a.start, init_of::<3>(&a.init, "J,J',J''")?, a.lambda, a.c1, a.end, a.tol)?,
        OdeId::Abel => integrate_abel(a.start, init_of::<1>(&a.init, "f")?[0], a.end, a.tol)?,
    };
    if let (OdeId::G, Some(path)) = (a.ode, &a.report) {
        if a.fit.len() != 2 {
            return Err("--fit needs LO,HI".into());
        }
        let fit = asymptotic_fit(&tr, a.fit[0], a.fit[1]).map_err(|e| e.to_string());
        let report = json!({ "sandwich": sandwich_of(&tr), "fit": fit.as_ref().ok(), "fit_error": fit.as_ref().err() });
        std::fs::write(path, json_envelope("trajectory", &report)? + "\n")?;
    }
    emit(&a.output, &trajectory_csv(&tr))
}

fn invariants(a: &InvariantsArgs) -> Result<(), Failure> {
    let achoice = match a.a {
        AArg::Two => AChoice::Constant2,
        AArg::Zeta => AChoice::IdentityZeta,
    };
    let p = invariant_profile(&a.solution.spec()?, a.z_lo, a.z_hi, a.samples, achoice, a.transverse)?;
    match a.format {
        Format::Csv => emit(&a.output, &profile_csv(&p)),
        Format::Json => emit_json(&a.output, "invariants", &p),
    }
}

fn flat(a: &FlatArgs) -> Result<(), Failure> {
    let params = FlatFamilyParams { case: a.case.into(), lambda: a.lambda, c0: a.c0, c1: a.c1, c2: a.c2 };
    let mut rows = Vec::new();
    for k in 0..a.samples {
        let z = if a.samples < 2 { a.z_lo } else { a.z_lo + (a.z_hi - a.z_lo) * k as f64 / (a.samples - 1) as f64 };
        rows.push(json!({ "z": z, "value": flat_family(&params, z)? }));
    }
    emit_json(&a.output, "flat", &json!({ "params": params, "samples": rows }))
}

fn metric(a: &MetricArgs) -> Result<(), Failure> {
    let grid = parse_grid(&std::fs::read_to_string(&a.grid)?)?;
    let k = MetricConstants { k_f2: a.k_f2, k_outer: a.k_outer };
    let samples = reconstruct_metric(&a.solution.spec()?, &grid, k)?;
    match a.format {
        Format::Csv => emit(&a.output, &metric_csv(&samples)),
        Format::Json => emit_json(&a.output, "metric", &samples),
    }
}

fn verify(a: &VerifyArgs) -> Result<bool, Failure> {
    let report = typen_forge_verify::run_acceptance();
    if a.json {
        emit_json(&a.output, "acceptance", &report)?;
    } else {
        let mut text = report.lines().join("\n");
        text.push_str(&format!("\n{} passed, {} failed\n", report.passed, report.failed));
        emit(&a.output, &text)?;
    }
    Ok(report.all_passed())
}

/// Caps rayon at `TYPEN_FORGE_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("TYPEN_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or(format!("TYPEN_FORGE_THREADS={v} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Series(a) => series(a).map(|_| true),
        Command::Puiseux(a) => puiseux(a).map(|_| true),
        Command::Painleve(a) => painleve(a).map(|_| true),
        Command::Integrate(a) => integrate(a).map(|_| true),
        Command::Invariants(a) => invariants(a).map(|_| true),
        Command::Flat(a) => flat(a).map(|_| true),
        Command::Metric(a) => metric(a).map(|_| true),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
