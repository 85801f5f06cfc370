//! Command-line front end.
//!
//! Five subcommands expose the library as reproducible, file-based
//! computations: `potential`, `orbits`, `trace`, `deviation`, `verify`.
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 numerical failure (partial output is still written).
//!
//! A JSON file passed with `--config` supplies defaults for any long flag
//! of the active subcommand (same key names); explicit flags win. The
//! `BHGEO_OUTPUT_DIR` environment variable sets the directory used when
//! `--out` is not given.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deviation::{self, DeviationState, ProbeConfig, RadialClosedForm, SingularityTarget};
use crate::error::{Error, Result};
use crate::geodesics::{
    self, ConservedCharges, GeodesicState, IntegrationConfig, StopReason, StopRule, Trajectory,
};
use crate::output;
use crate::potential::{self, PotentialSpec, Spacing, Stability};
use crate::spacetime::{
    self, christoffel_analytic, christoffel_numeric, riemann_analytic, riemann_numeric,
    MetricParams, SpacetimePoint,
};

const ENV_OUTPUT_DIR: &str = "BHGEO_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "bhgeo",
    version,
    about = "Geodesics, effective potentials, photon orbits, and tidal dynamics \
             around static charged black holes"
)]
struct Cli {
    /// JSON file whose keys mirror the long flags of the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output file path (default: command-specific name in BHGEO_OUTPUT_DIR
    /// or the current directory).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the squared effective potential V^2(r) to a curve file.
    Potential(PotentialOpts),
    /// Report circular photon orbit radii (closed form and numeric).
    Orbits(OrbitsOpts),
    /// Integrate a geodesic and write the sampled trajectory.
    Trace(TraceOpts),
    /// Integrate the geodesic-deviation equations; optionally probe a
    /// singularity approach.
    Deviation(DeviationOpts),
    /// Run every analytic-vs-numeric cross-check and report findings.
    Verify(VerifyOpts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FamilyArg {
    Schwarzschild,
    Rn,
    Ghs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
struct MetricOpts {
    /// Black-hole family.
    #[arg(long, value_enum)]
    #[serde(default)]
    family: Option<FamilyArg>,
    /// Mass parameter M (geometric units).
    #[arg(long)]
    #[serde(default)]
    mass: Option<f64>,
    /// Charge (Q for ghs, e for rn).
    #[arg(long)]
    #[serde(default)]
    charge: Option<f64>,
    /// Asymptotic dilaton value (ghs only).
    #[arg(long)]
    #[serde(default)]
    dilaton0: Option<f64>,
    /// Charge-dilaton parameter alpha (ghs only; excludes --charge).
    #[arg(long)]
    #[serde(default)]
    alpha: Option<f64>,
}

impl MetricOpts {
    fn or(self, fallback: &Self) -> Self {
        Self {
            family: self.family.or(fallback.family),
            mass: self.mass.or(fallback.mass),
            charge: self.charge.or(fallback.charge),
            dilaton0: self.dilaton0.or(fallback.dilaton0),
            alpha: self.alpha.or(fallback.alpha),
        }
    }

    fn build(&self) -> Result<MetricParams> {
        let family = self
            .family
            .ok_or_else(|| Error::Config("--family is required".into()))?;
        let mass = self
            .mass
            .ok_or_else(|| Error::Config("--mass is required".into()))?;
        match family {
            FamilyArg::Schwarzschild => {
                if self.charge.is_some() || self.alpha.is_some() || self.dilaton0.is_some() {
                    return Err(Error::Config("schwarzschild takes only --mass".into()));
                }
                MetricParams::schwarzschild(mass)
            }
            FamilyArg::Rn => {
                if self.alpha.is_some() || self.dilaton0.is_some() {
                    return Err(Error::Config("rn takes --mass and --charge only".into()));
                }
                MetricParams::reissner_nordstrom(mass, self.charge.unwrap_or(0.0))
            }
            FamilyArg::Ghs => match (self.alpha, self.charge) {
                (Some(_), Some(_)) => Err(Error::Config(
                    "--alpha and --charge are mutually exclusive for ghs".into(),
                )),
                (Some(alpha), None) => MetricParams::ghs_from_alpha(mass, alpha),
                (None, charge) => {
                    MetricParams::ghs(mass, charge.unwrap_or(0.0), self.dilaton0.unwrap_or(0.0))
                }
            },
        }
    }
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct PotentialOpts {
    #[command(flatten)]
    #[serde(flatten)]
    metric: MetricOpts,
    /// Angular momentum L.
    #[arg(long = "L")]
    #[serde(rename = "L", default)]
    angular_momentum: Option<f64>,
    /// Normalization: 0 (null) or -1 (timelike).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    epsilon: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    rmin: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    rmax: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    #[serde(default)]
    n: Option<usize>,
    /// Logarithmic radial spacing instead of linear.
    #[arg(long)]
    #[serde(default)]
    log_spacing: bool,
    /// Output format.
    #[arg(long, value_enum)]
    #[serde(default)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct OrbitsOpts {
    #[command(flatten)]
    #[serde(flatten)]
    metric: MetricOpts,
    /// Angular momentum used by the numeric root search (radii do not
    /// depend on it).
    #[arg(long = "L")]
    #[serde(rename = "L", default)]
    angular_momentum: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    bracket_lo: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    bracket_hi: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct TraceOpts {
    #[command(flatten)]
    #[serde(flatten)]
    metric: MetricOpts,
    /// Normalization: 0 (null) or -1 (timelike).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    epsilon: Option<f64>,
    /// Conserved energy E.
    #[arg(long = "E")]
    #[serde(rename = "E", default)]
    energy: Option<f64>,
    /// Conserved angular momentum L.
    #[arg(long = "L", allow_hyphen_values = true)]
    #[serde(rename = "L", default)]
    angular_momentum: Option<f64>,
    /// Launch radius (required unless --circular).
    #[arg(long)]
    #[serde(default)]
    r0: Option<f64>,
    /// Launch on the circular photon orbit at the exterior critical radius.
    #[arg(long)]
    #[serde(default)]
    circular: bool,
    /// Initial radial direction: in or out.
    #[arg(long)]
    #[serde(default)]
    direction: Option<String>,
    #[arg(long)]
    #[serde(default)]
    tau_max: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    r_floor: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    r_ceiling: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    rel_tol: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    abs_tol: Option<f64>,
    /// Output format (csv or json).
    #[arg(long, value_enum)]
    #[serde(default)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct DeviationOpts {
    #[command(flatten)]
    #[serde(flatten)]
    metric: MetricOpts,
    /// Start radius of the integration.
    #[arg(long)]
    #[serde(default)]
    r0: Option<f64>,
    /// Stop radius of the integration.
    #[arg(long)]
    #[serde(default)]
    r_stop: Option<f64>,
    /// Initial components (eta_r, eta_theta, eta_phi).
    #[arg(long, num_args = 3, value_names = ["R", "TH", "PH"], allow_hyphen_values = true)]
    #[serde(default)]
    eta0: Option<Vec<f64>>,
    /// Initial slopes (deta_r, deta_theta, deta_phi).
    #[arg(long, num_args = 3, value_names = ["R", "TH", "PH"], allow_hyphen_values = true)]
    #[serde(default)]
    deta0: Option<Vec<f64>>,
    /// Probe the approach to a singularity and report fitted exponents.
    #[arg(long, value_enum)]
    #[serde(default)]
    probe: Option<ProbeArg>,
    /// Check the exact radial solution against the deviation equation and
    /// echo the residual.
    #[arg(long)]
    #[serde(default)]
    closed_form_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ProbeArg {
    #[value(name = "r_alpha")]
    RAlpha,
    #[value(name = "r_zero")]
    RZero,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct VerifyOpts {
    /// Dilaton-family mass used by the curvature checks.
    #[arg(long)]
    #[serde(default)]
    mass: Option<f64>,
    /// Dilaton-family alpha used by the curvature checks.
    #[arg(long)]
    #[serde(default)]
    alpha: Option<f64>,
    /// Reissner-Nordstrom mass for the stability audit.
    #[arg(long)]
    #[serde(default)]
    rn_mass: Option<f64>,
    /// Reissner-Nordstrom charge for the stability audit.
    #[arg(long)]
    #[serde(default)]
    rn_charge: Option<f64>,
    /// Sample-point seed.
    #[arg(long)]
    #[serde(default)]
    seed: Option<u64>,
    /// Number of curvature sample points per family.
    #[arg(long)]
    #[serde(default)]
    points: Option<usize>,
    /// Negative control: perturb one analytic value so the cross-checks
    /// must fail.
    #[arg(long, hide = true)]
    #[serde(default)]
    inject_bug: bool,
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };

    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_)
                | Error::Domain(_)
                | Error::NonEquatorial { .. }
                | Error::Frame { .. }
                | Error::Io(_) => 2,
            }
        }
    }
}

fn load_config<T: for<'de> Deserialize<'de>>(path: &Option<PathBuf>) -> Result<Option<T>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            let value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config file {}: {e}", p.display())))?;
            Ok(Some(value))
        }
    }
}

fn resolve_out(cli_out: &Option<PathBuf>, default_name: &str) -> PathBuf {
    if let Some(p) = cli_out {
        return p.clone();
    }
    match std::env::var_os(ENV_OUTPUT_DIR) {
        Some(dir) => PathBuf::from(dir).join(default_name),
        None => PathBuf::from(default_name),
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Potential(opts) => {
            let merged = match load_config::<PotentialOpts>(&cli.config)? {
                Some(cfg) => PotentialOpts {
                    metric: opts.metric.or(&cfg.metric),
                    angular_momentum: opts.angular_momentum.or(cfg.angular_momentum),
                    epsilon: opts.epsilon.or(cfg.epsilon),
                    rmin: opts.rmin.or(cfg.rmin),
                    rmax: opts.rmax.or(cfg.rmax),
                    n: opts.n.or(cfg.n),
                    log_spacing: opts.log_spacing || cfg.log_spacing,
                    format: opts.format.or(cfg.format),
                },
                None => opts,
            };
            cmd_potential(merged, &cli.out)
        }
        Command::Orbits(opts) => {
            let merged = match load_config::<OrbitsOpts>(&cli.config)? {
                Some(cfg) => OrbitsOpts {
                    metric: opts.metric.or(&cfg.metric),
                    angular_momentum: opts.angular_momentum.or(cfg.angular_momentum),
                    bracket_lo: opts.bracket_lo.or(cfg.bracket_lo),
                    bracket_hi: opts.bracket_hi.or(cfg.bracket_hi),
                },
                None => opts,
            };
            cmd_orbits(merged, &cli.out)
        }
        Command::Trace(opts) => {
            let merged = match load_config::<TraceOpts>(&cli.config)? {
                Some(cfg) => TraceOpts {
                    metric: opts.metric.or(&cfg.metric),
                    epsilon: opts.epsilon.or(cfg.epsilon),
                    energy: opts.energy.or(cfg.energy),
                    angular_momentum: opts.angular_momentum.or(cfg.angular_momentum),
                    r0: opts.r0.or(cfg.r0),
                    circular: opts.circular || cfg.circular,
                    direction: opts.direction.or(cfg.direction),
                    tau_max: opts.tau_max.or(cfg.tau_max),
                    r_floor: opts.r_floor.or(cfg.r_floor),
                    r_ceiling: opts.r_ceiling.or(cfg.r_ceiling),
                    rel_tol: opts.rel_tol.or(cfg.rel_tol),
                    abs_tol: opts.abs_tol.or(cfg.abs_tol),
                    format: opts.format.or(cfg.format),
                },
                None => opts,
            };
            cmd_trace(merged, &cli.out)
        }
        Command::Deviation(opts) => {
            let merged = match load_config::<DeviationOpts>(&cli.config)? {
                Some(cfg) => DeviationOpts {
                    metric: opts.metric.or(&cfg.metric),
                    r0: opts.r0.or(cfg.r0),
                    r_stop: opts.r_stop.or(cfg.r_stop),
                    eta0: opts.eta0.or(cfg.eta0),
                    deta0: opts.deta0.or(cfg.deta0),
                    probe: opts.probe.or(cfg.probe),
                    closed_form_check: opts.closed_form_check || cfg.closed_form_check,
                },
                None => opts,
            };
            cmd_deviation(merged, &cli.out)
        }
        Command::Verify(opts) => {
            let merged = match load_config::<VerifyOpts>(&cli.config)? {
                Some(cfg) => VerifyOpts {
                    mass: opts.mass.or(cfg.mass),
                    alpha: opts.alpha.or(cfg.alpha),
                    rn_mass: opts.rn_mass.or(cfg.rn_mass),
                    rn_charge: opts.rn_charge.or(cfg.rn_charge),
                    seed: opts.seed.or(cfg.seed),
                    points: opts.points.or(cfg.points),
                    inject_bug: opts.inject_bug || cfg.inject_bug,
                },
                None => opts,
            };
            cmd_verify(merged, &cli.out)
        }
    }
}

// ---------------------------------------------------------------- potential

#[derive(Serialize)]
struct CurveReport {
    params: MetricParams,
    angular_momentum: f64,
    epsilon: f64,
    samples: Vec<CurveSample>,
}

#[derive(Serialize)]
struct CurveSample {
    r: f64,
    v2: f64,
}

fn cmd_potential(opts: PotentialOpts, out: &Option<PathBuf>) -> Result<i32> {
    let params = opts.metric.build()?;
    let l = opts.angular_momentum.unwrap_or(1.0);
    let epsilon = opts.epsilon.unwrap_or(0.0);
    let rmin = opts
        .rmin
        .ok_or_else(|| Error::Config("--rmin is required".into()))?;
    let rmax = opts
        .rmax
        .ok_or_else(|| Error::Config("--rmax is required".into()))?;
    let n = opts.n.unwrap_or(400);
    let spacing = if opts.log_spacing {
        Spacing::Log
    } else {
        Spacing::Linear
    };

    let spec = PotentialSpec::new(params, l, epsilon)?;
    let curve = potential::potential_curve(&spec, rmin, rmax, n, spacing)?;

    let format = opts.format.unwrap_or(FormatArg::Csv);
    let (default_name, contents) = match format {
        FormatArg::Csv => {
            let mut buf = Vec::new();
            output::write_csv(
                &mut buf,
                &["r", "V2"],
                curve.iter().map(|(r, v)| vec![*r, *v]),
            )?;
            (
                "potential.csv",
                String::from_utf8(buf).expect("csv is utf-8"),
            )
        }
        FormatArg::Json => {
            let report = CurveReport {
                params,
                angular_momentum: l,
                epsilon,
                samples: curve
                    .iter()
                    .map(|(r, v)| CurveSample { r: *r, v2: *v })
                    .collect(),
            };
            ("potential.json", output::to_json_string(&report))
        }
        FormatArg::Svg => (
            "potential.svg",
            output::svg_line_plot(&curve, "effective potential", "r", "V^2"),
        ),
    };
    let path = resolve_out(out, default_name);
    fs::write(&path, contents)?;
    println!("wrote {} samples to {}", curve.len(), path.display());
    Ok(0)
}

// ------------------------------------------------------------------- orbits

#[derive(Serialize)]
struct OrbitsReport {
    params: MetricParams,
    angular_momentum: f64,
    discriminant: f64,
    closed_form: Vec<f64>,
    numeric: Vec<potential::CircularOrbit>,
    max_abs_closed_minus_numeric: Option<f64>,
    note: Option<String>,
}

fn default_bracket(params: &MetricParams) -> (f64, f64) {
    let m = params.mass().max(1e-3);
    let lo = match params.family() {
        spacetime::SpacetimeFamily::StringyGhs => params.alpha() + 0.02 * m,
        _ => 0.02 * m,
    };
    (lo, 50.0 * m)
}

fn cmd_orbits(opts: OrbitsOpts, out: &Option<PathBuf>) -> Result<i32> {
    let params = opts.metric.build()?;
    let l = opts.angular_momentum.unwrap_or(1.0);
    let closed = potential::circular_orbit_radii_closed_form(&params)?;
    let discriminant = potential::photon_orbit_discriminant(&params)?;

    let (lo_default, hi_default) = default_bracket(&params);
    let bracket = (
        opts.bracket_lo.unwrap_or(lo_default),
        opts.bracket_hi.unwrap_or(hi_default),
    );
    let spec = PotentialSpec::null_ray(params, l);
    let numeric = potential::circular_orbit_radii_numeric(&spec, bracket)?;

    let max_abs = if closed.is_empty() || numeric.is_empty() {
        None
    } else {
        Some(
            numeric
                .iter()
                .map(|orbit| {
                    closed
                        .iter()
                        .map(|r| (orbit.radius - r).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max),
        )
    };
    let note = if closed.is_empty() {
        Some("e/m > 3*sqrt(2)/4: no circular photon orbits exist".to_string())
    } else {
        None
    };

    let report = OrbitsReport {
        params,
        angular_momentum: l,
        discriminant,
        closed_form: closed,
        numeric,
        max_abs_closed_minus_numeric: max_abs,
        note,
    };
    let text = output::to_json_string(&report);
    let path = resolve_out(out, "orbits.json");
    fs::write(&path, &text)?;
    print!("{text}");
    Ok(0)
}

// -------------------------------------------------------------------- trace

#[derive(Serialize)]
struct TraceReport {
    params: MetricParams,
    epsilon: f64,
    charges: ConservedCharges,
    stop: StopReason,
    charge_drift: f64,
    constraint_drift: f64,
    samples: Vec<TraceSample>,
}

#[derive(Serialize)]
struct TraceSample {
    tau: f64,
    t: f64,
    r: f64,
    theta: f64,
    phi: f64,
    tdot: f64,
    rdot: f64,
    thetadot: f64,
    phidot: f64,
    constraint_residual: f64,
}

fn trace_samples(
    params: &MetricParams,
    traj: &Trajectory,
    epsilon: f64,
) -> Result<Vec<TraceSample>> {
    traj.samples
        .iter()
        .map(|s| {
            let residual = geodesics::constraint_residual(params, s, epsilon)?;
            Ok(TraceSample {
                tau: s.tau,
                t: s.x.t,
                r: s.x.r,
                theta: s.x.theta,
                phi: s.x.phi,
                tdot: s.v[0],
                rdot: s.v[1],
                thetadot: s.v[2],
                phidot: s.v[3],
                constraint_residual: residual,
            })
        })
        .collect()
}

fn cmd_trace(opts: TraceOpts, out: &Option<PathBuf>) -> Result<i32> {
    let params = opts.metric.build()?;
    let epsilon = opts.epsilon.unwrap_or(0.0);
    let energy = opts.energy.unwrap_or(1.0);

    let initial: GeodesicState;
    let default_tau: f64;
    if opts.circular {
        let radii = potential::circular_orbit_radii_closed_form(&params)?;
        let r_ph = *radii
            .first()
            .ok_or_else(|| Error::Config("no circular photon orbit for these parameters".into()))?;
        if !params.is_exterior(r_ph) {
            return Err(Error::Config(format!(
                "the critical radius {r_ph} is not in the exterior region"
            )));
        }
        initial = geodesics::circular_photon_state(&params, r_ph, energy)?;
        default_tau = 2.0 * std::f64::consts::PI / initial.v[3];
    } else {
        let r0 = opts
            .r0
            .ok_or_else(|| Error::Config("--r0 is required unless --circular".into()))?;
        let l = opts.angular_momentum.unwrap_or(0.0);
        let charges = ConservedCharges {
            energy,
            angular_momentum: l,
            epsilon,
        };
        let sign = match opts.direction.as_deref() {
            None | Some("in") => -1.0,
            Some("out") => 1.0,
            Some(other) => {
                return Err(Error::Config(format!(
                    "--direction must be 'in' or 'out', got '{other}'"
                )))
            }
        };
        initial = geodesics::launch_equatorial(&params, r0, &charges, sign)?;
        default_tau = 200.0 * params.mass().max(1.0);
    }

    let config = IntegrationConfig {
        rel_tol: opts.rel_tol.unwrap_or(1e-10),
        abs_tol: opts.abs_tol.unwrap_or(1e-12),
        stop: StopRule {
            max_tau: Some(opts.tau_max.unwrap_or(default_tau)),
            r_floor: opts.r_floor,
            r_ceiling: opts.r_ceiling,
        },
        ..Default::default()
    };
    let traj = geodesics::integrate(&params, &initial, epsilon, &config)?;
    let charges = geodesics::first_integrals(&params, &initial)?;
    let samples = trace_samples(&params, &traj, epsilon)?;

    let format = opts.format.unwrap_or(FormatArg::Csv);
    let (default_name, contents) = match format {
        FormatArg::Json => {
            let report = TraceReport {
                params,
                epsilon,
                charges,
                stop: traj.stop,
                charge_drift: traj.charge_drift,
                constraint_drift: traj.constraint_drift,
                samples,
            };
            ("trace.json", output::to_json_string(&report))
        }
        _ => {
            let mut buf = Vec::new();
            output::write_csv(
                &mut buf,
                &[
                    "tau",
                    "t",
                    "r",
                    "theta",
                    "phi",
                    "tdot",
                    "rdot",
                    "thetadot",
                    "phidot",
                    "constraint_residual",
                ],
                samples.iter().map(|s| {
                    vec![
                        s.tau,
                        s.t,
                        s.r,
                        s.theta,
                        s.phi,
                        s.tdot,
                        s.rdot,
                        s.thetadot,
                        s.phidot,
                        s.constraint_residual,
                    ]
                }),
            )?;
            ("trace.csv", String::from_utf8(buf).expect("csv is utf-8"))
        }
    };
    let path = resolve_out(out, default_name);
    fs::write(&path, contents)?;

    println!(
        "samples={} stop={} charge_drift={} constraint_drift={} file={}",
        traj.samples.len(),
        stop_name(traj.stop),
        output::sci(traj.charge_drift),
        output::sci(traj.constraint_drift),
        path.display()
    );
    Ok(if traj.stop == StopReason::StepFailure {
        3
    } else {
        0
    })
}

fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::MaxTau => "max_tau",
        StopReason::RFloor => "r_floor",
        StopReason::RCeiling => "r_ceiling",
        StopReason::HorizonApproach => "horizon_approach",
        StopReason::StepFailure => "step_failure",
    }
}

// ---------------------------------------------------------------- deviation

fn cmd_deviation(opts: DeviationOpts, out: &Option<PathBuf>) -> Result<i32> {
    let params = opts.metric.build()?;
    let alpha = params.alpha();

    // Reject an impossible probe before producing any output.
    if let Some(probe) = opts.probe {
        if params.mass() <= 0.0 {
            return Err(Error::Config(
                "no singularity to probe in flat space".into(),
            ));
        }
        match probe {
            ProbeArg::RAlpha if alpha <= 0.0 => {
                return Err(Error::Config(
                    "no r = alpha singularity: alpha is zero for these parameters".into(),
                ))
            }
            ProbeArg::RZero if alpha > 0.0 => {
                return Err(Error::Config(
                    "r = 0 is hidden behind the r = alpha singularity when alpha > 0".into(),
                ))
            }
            _ => {}
        }
    }

    if opts.closed_form_check {
        let cf = RadialClosedForm::new(1.0, 1.0);
        let mut worst = 0.0_f64;
        for i in 0..1000 {
            let r = 0.1 + 9.9 * i as f64 / 999.0;
            worst = worst.max(deviation::radial_ode_residual_corrected(&cf, r).abs());
        }
        println!("closed_form_residual={}", output::sci(worst));
    }

    let triple = |v: &Option<Vec<f64>>, fallback: [f64; 3]| -> Result<[f64; 3]> {
        match v {
            None => Ok(fallback),
            Some(list) if list.len() == 3 => Ok([list[0], list[1], list[2]]),
            Some(list) => Err(Error::Config(format!(
                "expected exactly 3 components, got {}",
                list.len()
            ))),
        }
    };

    let r0 = opts.r0.unwrap_or(alpha + 10.0);
    let r_stop = opts.r_stop.unwrap_or(alpha + 0.1);
    let initial = DeviationState::new(
        r0,
        triple(&opts.eta0, [1.0, 1.0, 1.0])?,
        triple(&opts.deta0, [0.0, 0.0, 0.0])?,
    );
    let config = IntegrationConfig::default();
    let run = deviation::integrate_deviation(&params, &initial, r_stop, &config)?;

    let mut buf = Vec::new();
    output::write_csv(
        &mut buf,
        &[
            "r",
            "eta_r",
            "eta_theta",
            "eta_phi",
            "deta_r",
            "deta_theta",
            "deta_phi",
        ],
        run.samples.iter().map(|s| {
            vec![
                s.r,
                s.eta[0],
                s.eta[1],
                s.eta[2],
                s.deta_dr[0],
                s.deta_dr[1],
                s.deta_dr[2],
            ]
        }),
    )?;
    let csv_path = resolve_out(out, "deviation.csv");
    fs::write(&csv_path, buf)?;
    println!(
        "samples={} stop={} file={}",
        run.samples.len(),
        stop_name(run.stop),
        csv_path.display()
    );

    if let Some(probe) = opts.probe {
        let target = match probe {
            ProbeArg::RAlpha => SingularityTarget::RAlpha,
            ProbeArg::RZero => SingularityTarget::RZero,
        };
        let report = deviation::singularity_probe(&params, target, &ProbeConfig::default())?;
        let text = output::to_json_string(&report);
        // The probe report goes next to the CSV under a fixed name unless
        // --out pointed somewhere explicit.
        let probe_path = match out {
            Some(p) => p.with_extension("probe.json"),
            None => resolve_out(&None, "deviation_probe.json"),
        };
        fs::write(&probe_path, &text)?;
        print!("{text}");
        if report.stop == StopReason::StepFailure {
            return Ok(3);
        }
    }

    Ok(if run.stop == StopReason::StepFailure {
        3
    } else {
        0
    })
}

// ------------------------------------------------------------------- verify

#[derive(Serialize)]
struct CheckResult {
    name: String,
    observed: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct RnStabilityAudit {
    mass: f64,
    charge: f64,
    larger_root: f64,
    second_derivative: f64,
    stability: Stability,
    /// True when the computed classification contradicts the
    /// larger-root-is-stable reading: the second derivative at the larger
    /// root is negative (a maximum, hence an unstable orbit).
    rn_stability_discrepancy: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    ghs_params: MetricParams,
    checks: Vec<CheckResult>,
    rn_audit: RnStabilityAudit,
    /// The -1/r first-derivative variant of the radial deviation equation
    /// is inconsistent with the exact solution; this is its residual at
    /// r = 1 with C1 = C2 = 1.
    alt_damping_residual: f64,
    alt_damping_inconsistent: bool,
    pass: bool,
}

fn cmd_verify(opts: VerifyOpts, out: &Option<PathBuf>) -> Result<i32> {
    let mass = opts.mass.unwrap_or(1.0);
    let alpha = opts.alpha.unwrap_or(0.3);
    let rn_mass = opts.rn_mass.unwrap_or(1.0);
    let rn_charge = opts.rn_charge.unwrap_or(0.5);
    let seed = opts.seed.unwrap_or(7);
    let n_points = opts.points.unwrap_or(20);
    let bug = if opts.inject_bug { 1e-3 } else { 0.0 };

    let ghs = MetricParams::ghs_from_alpha(mass, alpha)?;
    let schw = MetricParams::schwarzschild(mass)?;
    let rn = MetricParams::reissner_nordstrom(rn_mass, rn_charge)?;

    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Christoffel and Riemann cross-checks per family. Polar angles stay
    // away from the axis: the cot(theta) stencil loses second-order
    // accuracy there and would pollute the comparison.
    for (label, params) in [("ghs", &ghs), ("schwarzschild", &schw), ("rn", &rn)] {
        let mut worst_gamma = 0.0_f64;
        let mut worst_riemann = 0.0_f64;
        for _ in 0..n_points {
            let point = SpacetimePoint::new(
                0.0,
                rng.gen_range(2.2 * mass.max(rn_mass)..50.0),
                rng.gen_range(std::f64::consts::FRAC_PI_4..3.0 * std::f64::consts::FRAC_PI_4),
                rng.gen_range(0.0..6.0),
            );
            let mut gamma_a = christoffel_analytic(params, &point)?;
            gamma_a.0[0][0][1] += bug;
            gamma_a.0[0][1][0] += bug;
            let gamma_n = christoffel_numeric(params, &point, 1e-5)?;
            worst_gamma = worst_gamma.max(gamma_n.max_abs_diff(&gamma_a));

            let riemann_a = riemann_analytic(params, &point)?;
            let riemann_n = riemann_numeric(params, &point, 1e-4)?;
            worst_riemann = worst_riemann.max(riemann_n.max_rel_dev(&riemann_a, 1e-12));
        }
        checks.push(CheckResult {
            name: format!("christoffel_numeric_vs_analytic_{label}"),
            observed: worst_gamma,
            tolerance: 1e-6,
            pass: worst_gamma < 1e-6,
        });
        checks.push(CheckResult {
            name: format!("riemann_numeric_vs_analytic_{label}"),
            observed: worst_riemann,
            tolerance: 1e-5,
            pass: worst_riemann < 1e-5,
        });
    }

    // Frame-projected tidal matrix against the closed-form couplings.
    let mut worst_tidal = 0.0_f64;
    let mut worst_offdiag = 0.0_f64;
    for _ in 0..100 {
        let point = SpacetimePoint::new(
            0.0,
            rng.gen_range(2.2 * mass..60.0),
            rng.gen_range(0.3..std::f64::consts::PI - 0.3),
            0.0,
        );
        let frame = deviation::pt_frame_static(&ghs, &point)?;
        let k = deviation::tidal_from_riemann(&ghs, &point, &frame)?;
        let c = deviation::tidal_coefficients(&ghs, point.r)?;
        let expected = [c.radial, c.transverse, c.transverse];
        for i in 0..3 {
            worst_tidal = worst_tidal.max((k[i][i] - expected[i]).abs() / expected[i].abs());
            for j in 0..3 {
                if i != j {
                    worst_offdiag = worst_offdiag.max(k[i][j].abs());
                }
            }
        }
    }
    checks.push(CheckResult {
        name: "tidal_projection_vs_coefficients".into(),
        observed: worst_tidal,
        tolerance: 1e-10,
        pass: worst_tidal < 1e-10,
    });
    checks.push(CheckResult {
        name: "tidal_projection_offdiagonal".into(),
        observed: worst_offdiag,
        tolerance: 1e-12,
        pass: worst_offdiag < 1e-12,
    });

    // Radial deviation equation: the exact solution must satisfy the
    // -1/(2r) form and demonstrably violate the -1/r variant.
    let cf = RadialClosedForm::new(1.0, 1.0);
    let mut worst_res = 0.0_f64;
    for i in 0..1000 {
        let r = 0.1 + 9.9 * i as f64 / 999.0;
        worst_res = worst_res.max(deviation::radial_ode_residual_corrected(&cf, r).abs());
    }
    checks.push(CheckResult {
        name: "radial_deviation_closed_form_residual".into(),
        observed: worst_res,
        tolerance: 1e-12,
        pass: worst_res < 1e-12,
    });
    let variant_res = deviation::radial_ode_residual_alt_damping(&cf, 1.0);
    checks.push(CheckResult {
        name: "radial_deviation_variant_detectably_inconsistent".into(),
        observed: variant_res.abs(),
        tolerance: 1e-3,
        pass: variant_res.abs() > 1e-3,
    });

    // RN stability audit at the larger critical radius.
    let rn_roots = potential::circular_orbit_radii_closed_form(&rn)?;
    let larger_root = *rn_roots
        .first()
        .ok_or_else(|| Error::Config("RN audit parameters admit no photon orbit".into()))?;
    let rn_spec = PotentialSpec::null_ray(rn, 1.0);
    let (stability, second_derivative) = potential::classify_radius(&rn_spec, larger_root)?;
    let rn_audit = RnStabilityAudit {
        mass: rn_mass,
        charge: rn_charge,
        larger_root,
        second_derivative,
        stability,
        rn_stability_discrepancy: second_derivative < 0.0,
    };

    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        ghs_params: ghs,
        checks,
        rn_audit,
        alt_damping_residual: variant_res,
        alt_damping_inconsistent: variant_res.abs() > 1e-3,
        pass,
    };
    let text = output::to_json_string(&report);
    let path = resolve_out(out, "verify.json");
    fs::write(&path, &text)?;
    print!("{text}");
    Ok(if pass { 0 } else { 1 })
}
