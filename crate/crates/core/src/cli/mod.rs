//! The `renvol` command line.
//!
//! Every subcommand except `verify` writes one CSV table, preceded by a
//! `# renvol <args>` line that records the arguments, so that
//! `renvol --from-csv FILE` can rerun the command and diff the rows.
//!
//! Exit codes: 0 success, 1 a checked inequality or hypothesis failed
//! (or a replay differed), 2 usage error, 3 numerical or I/O failure.

mod grid;
mod output;

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use grid::Grid;
pub use output::{diff_tables, join_args, read_table, real, split_args, write_table, Recorded, Table};

use crate::acceptance;
use crate::comparison::{
    i_alpha, i_eps, lemma_aux_margin, lemma_aux_threshold, sweep_monotonicity,
    verify_theorem, ComparisonError, IAlphaSpec, Verdict,
};
use crate::expr::{parse_profile_file, Bindings, EvalError, Expression, ParseError};
use crate::metric::{
    hawking_mass, mass_for_horizon_radius, scalar_curvature, sphere_mean_curvature, MetricError,
    RadialProfile, DEFAULT_DELTA,
};
use crate::quad::{QuadError, Tolerance};
use crate::volume::{
    check_iso_identity, corollary_lower_bound, prop_volume_lower_bound, renormalized_volume_at,
    volume_between, FlowTime, VolumeError, DEFAULT_TRUNCATION_RADIUS,
};

/// Relative slack allowed when a computed lower bound exceeds the quantity it bounds.
const BOUND_SLACK: f64 = 1e-8;
/// Relative tolerance on the coordinate-sphere identity.
const ISO_TOLERANCE: f64 = 1e-8;
/// Relative tolerance on numeric cells when replaying a CSV.
const REPLAY_TOLERANCE: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(
    name = "renvol",
    version,
    about = "Renormalized volumes and volume comparison for rotationally symmetric asymptotically hyperbolic metrics",
    subcommand_required = false,
    arg_required_else_help = true
)]
pub struct Cli {
    /// Write the CSV to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Rerun the command recorded in a CSV file and compare its rows.
    #[arg(long, value_name = "FILE")]
    from_csv: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Renormalized volume, checked against ten times the truncation radius.
    Volume {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Truncation radius.
        #[arg(long, default_value_t = DEFAULT_TRUNCATION_RADIUS)]
        r_max: f64,
    },
    /// Hawking mass, mean curvature and scalar curvature of coordinate spheres.
    Hawking {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Radii; defaults to 13 log-spaced radii from the horizon (or 0.1) to 1e3.
        #[arg(long)]
        s: Option<Grid>,
    },
    /// Flow volume bounds against the metric volume at flow times tau.
    Bounds {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value = "1")]
        tau: Grid,
    },
    /// Twice the enclosed model volume against the bound with the model area.
    IsoCheck {
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
        /// Flow times in the model; the sphere is at s0 e^{tau/2}.
        #[arg(long, default_value = "0.5")]
        tau: Grid,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// I(alpha), or I_eps(alpha) when --eps is positive.
    Ialpha {
        #[arg(long, default_value_t = 4.0 * PI, allow_negative_numbers = true)]
        a_bar: f64,
        #[arg(long, default_value = "0:3:13")]
        alpha: Grid,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Margin of the auxiliary integral inequality over a grid of eps.
    LemmaAux {
        #[arg(long, default_value = "log:1e-4:1:9")]
        eps: Grid,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        mu: f64,
        /// Also report the ratio eps/mu at which the margin changes sign.
        #[arg(long)]
        threshold: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Hypothesis checks and volume comparison against a model.
    Compare {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Model mass; defaults to the model with the same horizon radius.
        #[arg(long, allow_negative_numbers = true)]
        model_m: Option<f64>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Renormalized volume of the models over a mass grid.
    Sweep {
        #[arg(long)]
        m: Grid,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run the acceptance battery.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Hyperbolic,
    Ads,
    RnAds,
    Custom,
}

#[derive(Args, Debug, Clone)]
struct ProfileArgs {
    /// Built-in profile family; `custom` with --profile or --profile-file. Defaults to ads.
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Profile expression f(s), e.g. "1 + s^2 - m/s".
    #[arg(long)]
    profile: Option<String>,
    /// File of `name = expression` lines.
    #[arg(long, value_name = "FILE")]
    profile_file: Option<PathBuf>,
    /// Entry of --profile-file to use; required when it has several.
    #[arg(long)]
    profile_name: Option<String>,
    /// Parameter binding `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_binding)]
    params: Vec<(String, f64)>,
    /// Decay exponent of the asymptotic condition.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
}

#[derive(Args, Debug, Clone, Copy)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    abs_tol: f64,
}

fn parse_binding(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{text}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((name.trim().to_string(), value))
}

/// A failed run, by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) | Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::InvalidTolerance { .. } | QuadError::InvalidDecay(_) => usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Quad(q) => q.into(),
            MetricError::Eval(EvalError::Unbound(_))
            | MetricError::NonPositiveMass(_)
            | MetricError::InvalidDelta(_)
            | MetricError::UnboundParameter(_)
            | MetricError::NonPositiveRadius(_)
            | MetricError::BelowHorizon { .. } => usage(e.to_string()),
            MetricError::Eval(EvalError::Domain { .. })
            | MetricError::NegativeProfile { .. }
            | MetricError::NotAsymptoticallyHyperbolic { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<VolumeError> for Failure {
    fn from(e: VolumeError) -> Self {
        match e {
            VolumeError::Metric(m) => m.into(),
            VolumeError::Quad(q) => q.into(),
            VolumeError::NoHorizon
            | VolumeError::InvalidRange { .. }
            | VolumeError::InvalidFlowTime(_)
            | VolumeError::InvalidArea(_)
            | VolumeError::InvalidDelta(_) => usage(e.to_string()),
            VolumeError::NonPositiveProfile { .. }
            | VolumeError::NotMeanConvex { .. }
            | VolumeError::CrossCheck { .. }
            | VolumeError::Unstable { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<ComparisonError> for Failure {
    fn from(e: ComparisonError) -> Self {
        match e {
            ComparisonError::Volume(v) => v.into(),
            ComparisonError::Metric(m) => m.into(),
            ComparisonError::Quad(q) => q.into(),
            ComparisonError::InvalidInput(_)
            | ComparisonError::AreaBelowModel { .. }
            | ComparisonError::EmptyGrid
            | ComparisonError::GridNotIncreasing { .. } => usage(e.to_string()),
            ComparisonError::NoSignChange => Failure::Numerical(e.to_string()),
        }
    }
}

/// What a subcommand produced.
struct Outcome {
    table: Table,
    /// False when a checked inequality or hypothesis failed.
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn passed(table: Table) -> Outcome {
        Outcome {
            table,
            ok: true,
            notes: Vec::new(),
        }
    }
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance, Failure> {
        Ok(Tolerance::new(self.rel_tol, self.abs_tol)?)
    }
}

impl ProfileArgs {
    fn build(&self) -> Result<RadialProfile, Failure> {
        let custom = self.profile.is_some() || self.profile_file.is_some();
        let family = match (self.family, custom) {
            (None, true) | (Some(Family::Custom), true) => Family::Custom,
            (Some(Family::Custom), false) => {
                return Err(usage("--family custom needs --profile or --profile-file"))
            }
            (Some(_), true) => {
                return Err(usage("--profile and --profile-file require --family custom"))
            }
            (None, false) => Family::Ads,
            (Some(f), false) => f,
        };
        if family != Family::Custom && !self.params.is_empty() {
            return Err(usage("--param applies to custom profiles only"));
        }
        let need_m = || self.m.ok_or_else(|| usage("this family needs --m"));
        let profile = match family {
            Family::Hyperbolic => {
                if self.m.is_some() || self.c.is_some() {
                    return Err(usage("the hyperbolic profile takes no parameters"));
                }
                RadialProfile::hyperbolic()
            }
            Family::Ads => {
                if self.c.is_some() {
                    return Err(usage("--c applies to the rn-ads family"));
                }
                RadialProfile::ads_schwarzschild(need_m()?)?
            }
            Family::RnAds => {
                let c = self.c.ok_or_else(|| usage("the rn-ads family needs --c"))?;
                RadialProfile::rn_ads(need_m()?, c)?
            }
            Family::Custom => {
                let (label, expr) = self.custom_expression()?;
                let mut params = Bindings::new();
                if let Some(m) = self.m {
                    params.insert("m".into(), m);
                }
                if let Some(c) = self.c {
                    params.insert("c".into(), c);
                }
                for (name, value) in &self.params {
                    params.insert(name.clone(), *value);
                }
                RadialProfile::new(label, expr, params, self.delta)?
            }
        };
        if family == Family::Custom || self.delta == DEFAULT_DELTA {
            Ok(profile)
        } else {
            Ok(profile.with_delta(self.delta)?)
        }
    }

    fn custom_expression(&self) -> Result<(String, Expression), Failure> {
        match (&self.profile, &self.profile_file) {
            (Some(_), Some(_)) => Err(usage("give either --profile or --profile-file")),
            (Some(text), None) => Ok(("custom".into(), Expression::parse(text)?)),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                let entries = parse_profile_file(&text)?;
                match &self.profile_name {
                    Some(name) => entries
                        .into_iter()
                        .find(|(n, _)| n == name)
                        .ok_or_else(|| usage(format!("no profile `{name}` in {}", path.display()))),
                    None if entries.len() == 1 => Ok(entries.into_iter().next().unwrap()),
                    None => Err(usage(format!(
                        "{} defines {} profiles; pick one with --profile-name",
                        path.display(),
                        entries.len()
                    ))),
                }
            }
            (None, None) => unreachable!("checked by build"),
        }
    }
}

fn mass_cell(p: &RadialProfile) -> String {
    p.params().get("m").map(|&m| real(m)).unwrap_or_default()
}

const BOUND_HEADER: [&str; 7] = ["label", "m", "tau", "lhs", "rhs", "rel_err", "evals"];

fn rel_err(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

fn execute(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Volume {
            profile,
            tol,
            r_max,
        } => {
            let p = profile.build()?;
            if !(r_max > 0.0 && r_max.is_finite()) {
                return Err(usage("--r-max must be positive"));
            }
            let result = renormalized_volume_at(&p, r_max, &tol.tolerance()?)?;
            let mut table = Table::new(&BOUND_HEADER);
            table.push(vec![
                p.label().to_string(),
                mass_cell(&p),
                String::new(),
                real(result.value),
                real(result.check_value),
                real(rel_err(result.value, result.check_value)),
                result.evaluations.to_string(),
            ]);
            Ok(Outcome::passed(table))
        }
        Command::Hawking { profile, s } => {
            let p = profile.build()?;
            let horizon = p.horizon()?;
            let radii = match s {
                Some(g) => g.0,
                None => {
                    let lo = horizon.map_or(0.1, |h| h.radius);
                    format!("log:{lo:e}:1e3:13").parse::<Grid>().map_err(usage)?.0
                }
            };
            let mut table = Table::new(&[
                "label",
                "s",
                "m_hawking",
                "mean_curvature",
                "scalar_curvature",
            ]);
            for s in radii {
                table.push(vec![
                    p.label().to_string(),
                    real(s),
                    real(hawking_mass(&p, s)?),
                    real(sphere_mean_curvature(&p, s)?),
                    real(scalar_curvature(&p, s)?),
                ]);
            }
            Ok(Outcome::passed(table))
        }
        Command::Bounds { profile, tol, tau } => {
            let p = profile.build()?;
            let tol = tol.tolerance()?;
            let h = p.horizon()?.ok_or_else(|| usage("bounds need a profile with a horizon"))?;
            let mut outcome = Outcome::passed(Table::new(&BOUND_HEADER));
            for t in tau.0 {
                let top = FlowTime::new(&h, t)?.radius;
                let vol = volume_between(&p, h.radius, top, &tol)?;
                let prop = prop_volume_lower_bound(&p, t, &tol)?;
                let cor = corollary_lower_bound(h.area, t, &tol)?;
                let rows = [
                    ("prop", vol.value, prop.value, vol.evaluations + prop.evaluations),
                    ("corollary", 2.0 * vol.value, cor.value, vol.evaluations + cor.evaluations),
                ];
                for (kind, lhs, rhs, evals) in rows {
                    if rhs - lhs > BOUND_SLACK * lhs.abs().max(1.0) {
                        outcome.ok = false;
                        outcome.notes.push(format!(
                            "{kind} bound exceeds the volume at tau = {t}: {rhs} > {lhs}"
                        ));
                    }
                    outcome.table.push(vec![
                        format!("{kind}:{}", p.label()),
                        mass_cell(&p),
                        real(t),
                        real(lhs),
                        real(rhs),
                        real(rel_err(lhs, rhs)),
                        evals.to_string(),
                    ]);
                }
            }
            Ok(outcome)
        }
        Command::IsoCheck { m, tau, tol } => {
            let tol = tol.tolerance()?;
            let s0 = crate::metric::s0_of_m(m)?;
            let mut outcome = Outcome::passed(Table::new(&BOUND_HEADER));
            for t in tau.0 {
                if !(t >= 0.0) {
                    return Err(usage("--tau must be nonnegative"));
                }
                let check = check_iso_identity(m, s0 * (0.5 * t).exp(), &tol)?;
                if check.rel_err > ISO_TOLERANCE {
                    outcome.ok = false;
                    outcome.notes.push(format!(
                        "identity off by {:e} at m = {m}, tau = {t}",
                        check.rel_err
                    ));
                }
                outcome.table.push(vec![
                    "iso".into(),
                    real(m),
                    real(t),
                    real(check.lhs),
                    real(check.rhs),
                    real(check.rel_err),
                    check.evaluations.to_string(),
                ]);
            }
            Ok(outcome)
        }
        Command::Ialpha {
            a_bar,
            alpha,
            eps,
            tol,
        } => {
            let tol = tol.tolerance()?;
            let mut table = Table::new(&["A_bar", "alpha", "eps", "value"]);
            for a in alpha.0 {
                let spec = IAlphaSpec::new(a_bar, a, eps)?;
                let value = if eps > 0.0 {
                    i_eps(&spec, &tol)?
                } else {
                    i_alpha(&spec, &tol)?
                };
                table.push(vec![real(a_bar), real(a), real(eps), real(value)]);
            }
            Ok(Outcome::passed(table))
        }
        Command::LemmaAux {
            eps,
            mu,
            threshold,
            tol,
        } => {
            let tol = tol.tolerance()?;
            let mut outcome = Outcome::passed(Table::new(&["eps", "mu", "lhs", "rhs", "margin"]));
            for e in eps.0 {
                let margin = lemma_aux_margin(e, mu, &tol)?;
                let rhs = 4.0 / e.sqrt() + 1.0 / mu.sqrt();
                outcome
                    .table
                    .push(vec![real(e), real(mu), real(margin + rhs), real(rhs), real(margin)]);
            }
            if threshold {
                let rho = lemma_aux_threshold(mu, &tol)?;
                outcome.notes.push(format!("margin changes sign at eps/mu = {}", real(rho)));
            }
            Ok(outcome)
        }
        Command::Compare {
            profile,
            model_m,
            tol,
        } => {
            let p = profile.build()?;
            let tol = tol.tolerance()?;
            let m = match model_m {
                Some(m) => m,
                None => mass_for_horizon_radius(
                    p.horizon()?
                        .ok_or_else(|| usage("no horizon; pass --model-m explicitly"))?
                        .radius,
                ),
            };
            let report = verify_theorem(&p, m, &tol)?;
            let failures = report.hypotheses.failures();
            let mut table = Table::new(&[
                "label",
                "model_m",
                "A",
                "A_bar",
                "alpha",
                "V_g",
                "V_model",
                "margin",
                "chain_bound",
                "verdict",
                "detail",
            ]);
            table.push(vec![
                p.label().to_string(),
                real(m),
                output::optional(report.area),
                real(report.a_bar),
                output::optional(report.alpha),
                output::optional(report.v_g),
                output::optional(report.v_model),
                output::optional(report.margin),
                output::optional(report.chain_bound),
                report.verdict.to_string(),
                failures.join("; "),
            ]);
            let ok = matches!(report.verdict, Verdict::Holds | Verdict::Equality);
            Ok(Outcome {
                table,
                ok,
                notes: failures,
            })
        }
        Command::Sweep { m, tol } => {
            let sweep = sweep_monotonicity(&m.0, &tol.tolerance()?)?;
            let mut table = Table::new(&["m", "V", "dV_prev"]);
            for row in &sweep.rows {
                table.push(vec![real(row.m), real(row.volume), output::optional(row.dv_prev)]);
            }
            Ok(Outcome {
                table,
                ok: sweep.increasing,
                notes: if sweep.increasing {
                    Vec::new()
                } else {
                    vec!["volume is not increasing along the grid".into()]
                },
            })
        }
        Command::Verify => unreachable!("handled by run"),
    }
}

/// Arguments to record in the comment line: everything but the output path.
fn recorded_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv.iter().skip(1) {
        if skip {
            skip = false;
        } else if a == "--output" {
            skip = true;
        } else if !a.starts_with("--output=") {
            out.push(a.clone());
        }
    }
    out
}

fn emit(cli_output: &Option<PathBuf>, args: &[String], table: &Table) -> Result<(), Failure> {
    match cli_output {
        Some(path) => {
            let mut buf = Vec::new();
            write_table(&mut buf, args, table)?;
            fs::write(path, buf).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_table(&mut lock, args, table)?;
            Ok(lock.flush()?)
        }
    }
}

fn replay(path: &PathBuf) -> Result<bool, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let recorded = read_table(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut argv = vec!["renvol".to_string()];
    argv.extend(recorded.args.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| usage(e.to_string()))?;
    let command = match cli.command {
        Some(Command::Verify) | None => {
            return Err(usage("recorded arguments do not name a CSV subcommand"))
        }
        Some(c) => c,
    };
    let fresh = execute(command)?;
    let diffs = diff_tables(&recorded.table, &fresh.table, REPLAY_TOLERANCE);
    for d in &diffs {
        eprintln!("{d}");
    }
    if diffs.is_empty() {
        eprintln!("{}: {} rows reproduced", path.display(), fresh.table.rows.len());
    }
    Ok(diffs.is_empty())
}

fn run_verify() -> i32 {
    let mut all = true;
    for outcome in acceptance::run_all() {
        println!("{outcome}");
        all &= outcome.passed;
    }
    if all {
        0
    } else {
        1
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match (cli.from_csv, cli.command) {
        (Some(_), Some(_)) => Err(usage("--from-csv takes no subcommand")),
        (Some(path), None) => replay(&path).map(|same| if same { 0 } else { 1 }),
        (None, Some(Command::Verify)) => Ok(run_verify()),
        (None, Some(command)) => execute(command).and_then(|outcome| {
            emit(&cli.output, &recorded_args(argv), &outcome.table)?;
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            Ok(if outcome.ok { 0 } else { 1 })
        }),
        (None, None) => Err(usage("no subcommand given; see --help")),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(line: &str) -> Vec<String> {
        std::iter::once("renvol".to_string())
            .chain(split_args(line).unwrap())
            .collect()
    }

    fn parse(line: &str) -> Command {
        Cli::try_parse_from(argv(line)).unwrap().command.unwrap()
    }

    #[test]
    fn profile_selection() {
        let build = |line: &str| match parse(line) {
            Command::Volume { profile, .. } => profile.build(),
            _ => unreachable!(),
        };
        assert_eq!(build("volume --m 2").unwrap().label(), "ads(m=2)");
        assert!(build("volume --family hyperbolic").unwrap().horizon().unwrap().is_none());
        assert!(build("volume --family rn-ads --m 4 --c -1").is_ok());
        let p = build("volume --profile '1 + s^2 - k/s' --param k=2").unwrap();
        assert_eq!(p.label(), "custom");
        assert!((p.f(1.0).unwrap()).abs() < 1e-15);

        for bad in [
            "volume --m -1",
            "volume",
            "volume --family rn-ads --m 4",
            "volume --family hyperbolic --m 1",
            "volume --family custom",
            "volume --family ads --profile s",
            "volume --profile '1 + s^2 - k/s'",
            "volume --profile '1 + * s'",
            "volume --m 2 --param k=1",
        ] {
            let e = build(bad).unwrap_err();
            assert_eq!(e.code(), 2, "{bad}: {e:?}");
        }
    }

    #[test]
    fn recorded_args_drop_output() {
        let a = argv("sweep --m 1:2:2 --output out.csv --rel-tol 1e-9");
        assert_eq!(recorded_args(&a), ["sweep", "--m", "1:2:2", "--rel-tol", "1e-9"]);
        let a = argv("--output=x.csv ialpha");
        assert_eq!(recorded_args(&a), ["ialpha"]);
    }

    #[test]
    fn exit_codes_for_errors() {
        assert_eq!(run(&argv("volume --m -1")), 2);
        assert_eq!(run(&argv("no-such-command")), 2);
        assert_eq!(run(&argv("volume --m 2 --rel-tol 0")), 2);
        assert_eq!(run(&argv("sweep --m 2:1:2")), 2);
        assert_eq!(
            run(&argv("volume --profile '1 + s^2 - s' --r-max 100")),
            3
        );
    }
}
