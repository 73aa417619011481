use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hw_staffing::erlang::{
    erlang_c_gamma, erlang_c_integer, erlang_c_real, min_servers, real_staffing_level,
    DelayProbability, Method,
};
use hw_staffing::halfin_whitt::{
    beta_for_target, grid, hw_sweep, inverse_sweep, staffing, Regime, SweepResult,
};
use hw_staffing::mmn_oracle::{simulate_mmn, SimConfig};
use hw_staffing::verify::{run_suite, Suite};
use hw_staffing::{Error, QuadratureConfig};

use crate::output::{csv_table, num, Destination};
use crate::svg::{self, Chart};
use crate::{CliError, Outcome};

/// Largest integer server count routed to the recurrence by `--method auto`.
const AUTO_RECURRENCE_MAX: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Recurrence for integer s, gamma closed form otherwise.
    Auto,
    Recurrence,
    Quadrature,
    Gamma,
    All,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Number of servers (real values allowed except for the recurrence).
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    /// Offered load lambda/mu.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

fn integer_servers(s: f64) -> Result<u64, Error> {
    if s >= 1.0 && s.fract() == 0.0 && s < u64::MAX as f64 {
        Ok(s as u64)
    } else {
        Err(Error::Domain(format!(
            "the recurrence needs an integer number of servers s >= 1, got {s}"
        )))
    }
}

fn evaluate(
    method: Method,
    s: f64,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<DelayProbability, Error> {
    match method {
        Method::IntegerRecurrence => erlang_c_integer(integer_servers(s)?, a),
        Method::Quadrature => erlang_c_real(s, a, cfg),
        Method::GammaClosedForm => erlang_c_gamma(s, a),
    }
}

fn delay_rows(results: &[DelayProbability]) -> Vec<Vec<String>> {
    results
        .iter()
        .map(|d| {
            vec![
                d.method.name().to_string(),
                num(d.value),
                num(d.error_bound),
            ]
        })
        .collect()
}

pub fn compute(args: &ComputeArgs, cfg: &QuadratureConfig) -> Result<Outcome, CliError> {
    let (s, a) = (args.s, args.a);
    let results = match args.method {
        MethodArg::Auto => {
            let first = if s.fract() == 0.0 && (1.0..=AUTO_RECURRENCE_MAX).contains(&s) {
                Method::IntegerRecurrence
            } else {
                Method::GammaClosedForm
            };
            match evaluate(first, s, a, cfg) {
                Ok(d) => vec![d],
                Err(e) if !e.is_domain() => vec![evaluate(Method::Quadrature, s, a, cfg)?],
                Err(e) => return Err(e.into()),
            }
        }
        MethodArg::All => {
            let mut out = Vec::new();
            for method in Method::ALL {
                if method == Method::IntegerRecurrence && integer_servers(s).is_err() {
                    eprintln!("note: skipping the recurrence, s = {s} is not an integer");
                    continue;
                }
                out.push(evaluate(method, s, a, cfg)?);
            }
            out
        }
        MethodArg::Recurrence => vec![evaluate(Method::IntegerRecurrence, s, a, cfg)?],
        MethodArg::Quadrature => vec![evaluate(Method::Quadrature, s, a, cfg)?],
        MethodArg::Gamma => vec![evaluate(Method::GammaClosedForm, s, a, cfg)?],
    };
    let table = csv_table(&["method", "value", "error_bound"], &delay_rows(&results))?;
    Destination::Stdout.write(&table)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StaffMode {
    /// Smallest integer n with C(n, a) <= epsilon.
    Integer,
    /// Real s solving C(s, a) = epsilon.
    Real,
    /// Halfin-Whitt beta with C*(beta) = epsilon.
    Beta,
}

#[derive(Debug, Args)]
pub struct StaffArgs {
    /// Offered load (required except in beta mode).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Target delay probability, 0 < epsilon < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = StaffMode::Integer)]
    pub mode: StaffMode,
}

pub fn staff(args: &StaffArgs, cfg: &QuadratureConfig) -> Result<Outcome, CliError> {
    let need_a = || {
        args.a
            .ok_or_else(|| CliError::Config("--a is required for integer and real modes".into()))
    };
    let text = match args.mode {
        StaffMode::Integer => format!("{}\n", min_servers(need_a()?, args.epsilon)?),
        StaffMode::Real => format!(
            "{}\n",
            num(real_staffing_level(need_a()?, args.epsilon, cfg)?)
        ),
        StaffMode::Beta => {
            let beta = beta_for_target(args.epsilon)?;
            let mut text = format!("beta = {}\n", num(beta));
            if let Some(a) = args.a {
                text.push_str(&format!("n = {}\n", num(staffing(a, beta)?)));
            }
            text
        }
    };
    Destination::Stdout.write(text.as_bytes())?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    /// C(a + beta sqrt(a), a) against the load a.
    Hw,
    /// C(s, s - beta sqrt(s)) against the server count s.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Svg,
    /// CSV and SVG side by side; `--out` names the files (extension replaced).
    Both,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Square-root slack, beta > 0.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// First grid point (hw default 0.01; inverse default beta^2 + min(beta^2, 0.5)).
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Last grid point (hw default 1e4; inverse default 50, or 50 (beta^2 + 1) when beta >= 1).
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of grid points (hw default 40, inverse default 200).
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic spacing and x axis.
    #[arg(long, conflicts_with = "linear_x")]
    pub log_x: bool,
    /// Linear spacing and x axis.
    #[arg(long)]
    pub linear_x: bool,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[arg(long, default_value_t = 640)]
    pub width: u32,
    #[arg(long, default_value_t = 480)]
    pub height: u32,
}

/// Grid after defaults and the inverse-regime clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub log_x: bool,
}

pub fn grid_spec(args: &SweepArgs) -> GridSpec {
    let b2 = args.beta * args.beta;
    let (from, to, points, log_x) = match args.regime {
        RegimeArg::Hw => (0.01, 1e4, 40, true),
        RegimeArg::Inverse => {
            let to = if b2 < 1.0 { 50.0 } else { 50.0 * (b2 + 1.0) };
            (b2 + b2.min(0.5), to, 200, b2 < 1.0)
        }
    };
    let mut spec = GridSpec {
        from: args.from.unwrap_or(from),
        to: args.to.unwrap_or(to),
        points: args.points.unwrap_or(points),
        log_x: if args.log_x {
            true
        } else if args.linear_x {
            false
        } else {
            log_x
        },
    };
    let floor = b2 * (1.0 + 1e-9);
    if args.regime == RegimeArg::Inverse && spec.from < floor {
        eprintln!(
            "warning: --from {} is at or below beta^2 = {b2}; clamped to {floor}",
            spec.from
        );
        spec.from = floor;
    }
    spec
}

fn sweep_table(result: &SweepResult) -> Result<Vec<u8>, CliError> {
    let with_error = result.failed_rows() > 0;
    let mut header: Vec<&str> = match result.regime {
        Regime::LoadParametrized => vec!["a", "s", "c", "c_star", "gap"],
        Regime::ServerParametrized => vec!["s", "a", "c"],
    };
    if with_error {
        header.push("error");
    }
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| {
            let c = r.c.map(|d| d.value);
            let mut row = match result.regime {
                Regime::LoadParametrized => {
                    vec![num(r.a), num(r.s), opt(c), opt(r.c_star), opt(r.gap())]
                }
                Regime::ServerParametrized => vec![num(r.s), num(r.a), opt(c)],
            };
            if with_error {
                row.push(r.error.clone().unwrap_or_default());
            }
            row
        })
        .collect();
    csv_table(&header, &rows)
}

fn sweep_svg(result: &SweepResult, log_x: bool, width: u32, height: u32) -> String {
    let points: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| Some((result.parameter(r), r.c?.value)))
        .collect();
    let (title, x_label) = match result.regime {
        Regime::LoadParametrized => (
            format!("C(a + β√a, a), β = {}", result.beta),
            "offered load a",
        ),
        Regime::ServerParametrized => (format!("C(s, s - β√s), β = {}", result.beta), "servers s"),
    };
    svg::render(&Chart {
        title: &title,
        x_label,
        y_label: "delay probability C",
        points: &points,
        log_x,
        width,
        height,
    })
}

pub fn sweep(args: &SweepArgs, cfg: &QuadratureConfig) -> Result<Outcome, CliError> {
    if args.width == 0 || args.height == 0 {
        return Err(CliError::Config(
            "--width and --height must be positive".into(),
        ));
    }
    let dest = Destination::parse(&args.out);
    if args.format == FormatArg::Both && dest == Destination::Stdout {
        return Err(CliError::Config(
            "--format both needs a file path for --out".into(),
        ));
    }
    let spec = grid_spec(args);
    let values = grid(spec.from, spec.to, spec.points, spec.log_x)?;
    let result = match args.regime {
        RegimeArg::Hw => hw_sweep(args.beta, &values, cfg)?,
        RegimeArg::Inverse => inverse_sweep(args.beta, &values, cfg)?,
    };
    let failed = result.failed_rows();
    if failed == result.rows.len() {
        let first = result.rows[0].error.clone().unwrap_or_default();
        return Err(CliError::Numerical(format!(
            "every sweep row failed; first error: {first}"
        )));
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {} rows failed", result.rows.len());
    }
    match args.format {
        FormatArg::Csv => dest.write(&sweep_table(&result)?)?,
        FormatArg::Svg => {
            dest.write(sweep_svg(&result, spec.log_x, args.width, args.height).as_bytes())?
        }
        FormatArg::Both => {
            dest.with_extension("csv").write(&sweep_table(&result)?)?;
            dest.with_extension("svg")
                .write(sweep_svg(&result, spec.log_x, args.width, args.height).as_bytes())?;
        }
    }
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Monotonicity,
    Order,
    Identities,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
}

pub fn verify(args: &VerifyArgs, cfg: &QuadratureConfig) -> Result<Outcome, CliError> {
    let suite = match args.suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Monotonicity => Suite::Monotonicity,
        SuiteArg::Order => Suite::Order,
        SuiteArg::Identities => Suite::Identities,
    };
    let reports = run_suite(suite, cfg)?;
    let mut text = String::new();
    for r in &reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{verdict} {}: margin {:.3e}; {}\n",
            r.name, r.worst_margin, r.detail
        ));
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    text.push_str(&format!(
        "{} properties checked, {failed} failed\n",
        reports.len()
    ));
    Destination::Stdout.write(text.as_bytes())?;
    Ok(if failed == 0 {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of servers.
    #[arg(long)]
    pub n: u32,
    /// Arrival rate.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Service rate per server.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measured arrivals after warmup.
    #[arg(long, default_value_t = 1_000_000)]
    pub arrivals: u64,
    /// Discarded arrivals (default 10 n / (1 - rho)).
    #[arg(long)]
    pub warmup: Option<u64>,
    /// Number of batch means.
    #[arg(long)]
    pub batches: Option<u32>,
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let mut sim = SimConfig::new(args.n, args.lambda, args.mu, args.arrivals, args.seed);
    if let Some(w) = args.warmup {
        sim.warmup_arrivals = w;
    }
    if let Some(b) = args.batches {
        sim.batches = b;
    }
    sim.validate()?;
    let est = simulate_mmn(&sim)?;
    let a = sim.offered_load();
    let exact = erlang_c_integer(args.n as u64, a)?.value;
    let discrepancy = if est.ci_halfwidth > 0.0 {
        (est.p_wait - exact) / est.ci_halfwidth
    } else {
        f64::NAN
    };
    let text = format!(
        "p_wait = {} ± {} (95% CI, {} batch means, {} measured arrivals, seed {})\n\
         analytic C({}, {}) = {}\n\
         discrepancy = {:.3} CI half-widths\n",
        num(est.p_wait),
        num(est.ci_halfwidth),
        est.batches,
        sim.measured_arrivals,
        sim.seed,
        args.n,
        a,
        num(exact),
        discrepancy
    );
    Destination::Stdout.write(text.as_bytes())?;
    Ok(Outcome::Success)
}
