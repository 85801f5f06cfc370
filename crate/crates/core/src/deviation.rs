//! Geodesic deviation: orthonormal frames, tidal couplings, the Jacobi
//! equation along marginally bound radial infall, closed-form solutions,
//! and singularity-approach probes.
//!
//! For radial infall with E^2 = 1 and L = 0 the chart dr/dtau = -sqrt(2M/r)
//! turns the frame-projected Jacobi equations into ODEs in r:
//!
//! ```text
//! radial:      eta'' - (1/2r) eta' =  (1/r^2) eta
//! transverse:  eta'' - (1/2r) eta' = -(2r - alpha) / (4 r^2 (r - alpha)) eta
//! ```
//!
//! The first-derivative coefficient is -1/(2r) in all three equations; the
//! chain rule gives (2M/r) eta'' - (M/r^2) eta' on the left, and only this
//! coefficient is consistent with the exact radial solution
//! `eta^r = C1 / sqrt(r) + C2 r^2` (indicial roots 2 and -1/2). A -1/r
//! variant is kept available as a falsifiable alternative; substituting the
//! exact solution into it leaves an O(1) residual, which the verification
//! report demonstrates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesics::{IntegrationConfig, StopReason};
use crate::ode::{initial_step, StepOutcome, Stepper};
use crate::spacetime::{
    metric_at, riemann_analytic, MetricParams, SpacetimeFamily, SpacetimePoint, PHI, R, T, THETA,
};

/// Orthonormal tetrad at a point; `legs[0]` is the observer 4-velocity.
/// Components are in coordinate order (t, r, theta, phi).
#[derive(Debug, Clone, Copy)]
pub struct PtFrame {
    pub legs: [[f64; 4]; 4],
}

impl PtFrame {
    /// Largest deviation of the frame inner products from the Minkowski
    /// matrix diag(-1, 1, 1, 1).
    pub fn orthonormality_residual(
        &self,
        params: &MetricParams,
        point: &SpacetimePoint,
    ) -> Result<f64> {
        let g = metric_at(params, point)?;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i != j {
                    0.0
                } else if i == 0 {
                    -1.0
                } else {
                    1.0
                };
                worst = worst.max((g.dot(&self.legs[i], &self.legs[j]) - target).abs());
            }
        }
        Ok(worst)
    }
}

/// The static orthonormal frame: e0 along the timelike Killing direction,
/// e1 radial, e2 polar, e3 azimuthal.
pub fn pt_frame_static(params: &MetricParams, point: &SpacetimePoint) -> Result<PtFrame> {
    let (a, _, _) = params.profile_a(point.r);
    let (b, _, _) = params.profile_b(point.r);
    if a <= 0.0 {
        return Err(Error::Domain(format!(
            "no static frame at r = {}: inside or on the horizon",
            point.r
        )));
    }
    metric_at(params, point)?;
    let sin_th = point.theta.sin();
    if sin_th.abs() < crate::spacetime::AXIS_TOL {
        return Err(Error::Domain(
            "the azimuthal frame leg degenerates on the axis".into(),
        ));
    }
    let sqrt_b = b.sqrt();
    let mut legs = [[0.0; 4]; 4];
    legs[0][T] = 1.0 / a.sqrt();
    legs[1][R] = a.sqrt();
    legs[2][THETA] = 1.0 / sqrt_b;
    legs[3][PHI] = 1.0 / (sqrt_b * sin_th);
    Ok(PtFrame { legs })
}

/// Frame-projected tidal couplings for the dilaton/Schwarzschild family:
/// `radial = 2M/r^3`, `transverse = M(alpha - 2r) / (2 r^3 (r - alpha))`.
/// Positive means stretching, negative compression.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TidalCoefficients {
    pub radial: f64,
    pub transverse: f64,
}

pub fn tidal_coefficients(params: &MetricParams, r: f64) -> Result<TidalCoefficients> {
    if params.family() == SpacetimeFamily::ReissnerNordstrom {
        return Err(Error::Config(
            "closed-form tidal coefficients cover the dilaton/Schwarzschild family; \
             project the Riemann table through a frame for Reissner-Nordstrom"
                .into(),
        ));
    }
    let (m, alpha) = (params.mass(), params.alpha());
    if !(r > alpha) || r <= 0.0 {
        return Err(Error::Domain(format!(
            "tidal coefficients need r > alpha >= 0, got r = {r}, alpha = {alpha}"
        )));
    }
    let r3 = r * r * r;
    Ok(TidalCoefficients {
        radial: 2.0 * m / r3,
        transverse: m * (alpha - 2.0 * r) / (2.0 * r3 * (r - alpha)),
    })
}

/// Frame inner-product residual above which a frame is rejected.
pub const FRAME_TOL: f64 = 1e-9;

/// The 3x3 tidal matrix `K^i_j = -e~^i_a R^a_{bcd} e0^b ej^c e0^d` in the
/// given orthonormal frame. Row/column 0 of the result corresponds to the
/// first spatial leg. For the static frame it is diagonal with entries
/// (radial, transverse, transverse).
pub fn tidal_from_riemann(
    params: &MetricParams,
    point: &SpacetimePoint,
    frame: &PtFrame,
) -> Result<[[f64; 3]; 3]> {
    let residual = frame.orthonormality_residual(params, point)?;
    if residual > FRAME_TOL {
        return Err(Error::Frame { residual });
    }
    let g = metric_at(params, point)?.diagonal();
    let riemann = riemann_analytic(params, point)?;

    // Dual legs of an orthonormal frame: lower with g, raise with eta.
    let mut dual = [[0.0; 4]; 4];
    for (i, leg) in frame.legs.iter().enumerate() {
        let eta = if i == 0 { -1.0 } else { 1.0 };
        for a in 0..4 {
            dual[i][a] = eta * g[a] * leg[a];
        }
    }

    let e0 = &frame.legs[0];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut sum = 0.0;
            for a in 0..4 {
                if dual[i + 1][a] == 0.0 {
                    continue;
                }
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            sum += dual[i + 1][a]
                                * riemann.get(a, b, c, d)
                                * e0[b]
                                * frame.legs[j + 1][c]
                                * e0[d];
                        }
                    }
                }
            }
            out[i][j] = -sum;
        }
    }
    Ok(out)
}

/// Jacobi-field state with the radial coordinate as evolution variable.
/// `eta` holds the frame components (eta^r, eta^theta, eta^phi); the time
/// component vanishes identically for an orthogonal connecting vector.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviationState {
    pub r: f64,
    pub eta: [f64; 3],
    pub deta_dr: [f64; 3],
}

impl DeviationState {
    pub fn new(r: f64, eta: [f64; 3], deta_dr: [f64; 3]) -> Self {
        Self { r, eta, deta_dr }
    }

    fn from_vector(r: f64, y: &[f64; 6]) -> Self {
        Self {
            r,
            eta: [y[0], y[1], y[2]],
            deta_dr: [y[3], y[4], y[5]],
        }
    }

    fn to_vector(self) -> [f64; 6] {
        [
            self.eta[0],
            self.eta[1],
            self.eta[2],
            self.deta_dr[0],
            self.deta_dr[1],
            self.deta_dr[2],
        ]
    }
}

fn check_deviation_family(params: &MetricParams) -> Result<()> {
    if params.family() == SpacetimeFamily::ReissnerNordstrom {
        return Err(Error::Config(
            "the radial-infall deviation chart is built on the dilaton/Schwarzschild metric".into(),
        ));
    }
    if params.mass() <= 0.0 {
        return Err(Error::Config(
            "radial infall needs M > 0 (dr/dtau = -sqrt(2M/r) degenerates)".into(),
        ));
    }
    Ok(())
}

/// Second derivatives of the r-parameterized deviation equations.
fn eta_second_derivs(alpha: f64, r: f64, eta: &[f64; 3], deta: &[f64; 3]) -> [f64; 3] {
    let damping = 1.0 / (2.0 * r);
    let transverse = -(2.0 * r - alpha) / (4.0 * r * r * (r - alpha));
    [
        damping * deta[0] + eta[0] / (r * r),
        damping * deta[1] + transverse * eta[1],
        damping * deta[2] + transverse * eta[2],
    ]
}

/// First-order form of the deviation equations in r: returns
/// (d eta / dr, d^2 eta / dr^2).
pub fn deviation_rhs_in_r(
    params: &MetricParams,
    state: &DeviationState,
) -> Result<([f64; 3], [f64; 3])> {
    check_deviation_family(params)?;
    let r = state.r;
    if !(r > params.alpha()) || r <= 0.0 {
        return Err(Error::Domain(format!(
            "deviation equations need r > alpha >= 0, got r = {r}"
        )));
    }
    Ok((
        state.deta_dr,
        eta_second_derivs(params.alpha(), r, &state.eta, &state.deta_dr),
    ))
}

/// The tau-form right-hand side `d^2 eta / dtau^2 = k(r) eta`, exposed for
/// chain-rule cross-checks against the r-form.
pub fn deviation_accel_in_tau(params: &MetricParams, r: f64, eta: &[f64; 3]) -> Result<[f64; 3]> {
    let coeff = tidal_coefficients(params, r)?;
    Ok([
        coeff.radial * eta[0],
        coeff.transverse * eta[1],
        coeff.transverse * eta[2],
    ])
}

/// A sampled deviation integration; `stop` records whether the run reached
/// `r_stop` or the step size underflowed first.
#[derive(Debug, Clone)]
pub struct DeviationRun {
    pub samples: Vec<DeviationState>,
    pub stop: StopReason,
}

impl DeviationRun {
    pub fn last(&self) -> &DeviationState {
        self.samples.last().expect("run has samples")
    }
}

/// Integrate the deviation equations from `initial.r` to `r_stop`
/// (either direction), landing exactly on `r_stop`.
pub fn integrate_deviation(
    params: &MetricParams,
    initial: &DeviationState,
    r_stop: f64,
    config: &IntegrationConfig,
) -> Result<DeviationRun> {
    check_deviation_family(params)?;
    let alpha = params.alpha();
    if !(r_stop > alpha) || !(initial.r > alpha) {
        return Err(Error::Domain(format!(
            "both endpoints must lie above alpha = {alpha}: r0 = {}, r_stop = {r_stop}",
            initial.r
        )));
    }
    if r_stop == initial.r {
        return Err(Error::Config(
            "r_stop must differ from the initial radius".into(),
        ));
    }
    let control = config.control()?;

    let rhs = |r: f64, y: &[f64; 6]| -> Result<[f64; 6]> {
        if !(r > alpha) || r <= 0.0 {
            return Err(Error::Domain("left the r > alpha domain".into()));
        }
        let eta = [y[0], y[1], y[2]];
        let deta = [y[3], y[4], y[5]];
        let second = eta_second_derivs(alpha, r, &eta, &deta);
        Ok([y[3], y[4], y[5], second[0], second[1], second[2]])
    };

    let y0 = initial.to_vector();
    let dir = (r_stop - initial.r).signum();
    let dydr = rhs(initial.r, &y0)?;
    let h0 = initial_step(&control, &y0, &dydr, dir);
    let mut stepper: Stepper<6> = Stepper::new(control, h0);

    let mut samples = vec![*initial];
    let mut r = initial.r;
    let mut y = y0;
    let stop = 'outer: {
        for _ in 0..config.max_steps {
            stepper.clip_to(r, r_stop);
            match stepper.step(&rhs, r, &y)? {
                StepOutcome::Accepted(acc) => {
                    r = acc.t;
                    y = acc.y;
                }
                StepOutcome::Underflow => break 'outer StopReason::StepFailure,
            }
            if crate::ode::reached(r, r_stop) {
                r = r_stop;
            }
            samples.push(DeviationState::from_vector(r, &y));
            if r == r_stop {
                break 'outer StopReason::MaxTau;
            }
        }
        StopReason::StepFailure
    };

    Ok(DeviationRun { samples, stop })
}

/// Indicial exponents of the transverse equations at the origin,
/// b = 3/4 +- sqrt(5)/4 (the exponents appearing in the hypergeometric
/// closed forms).
pub const B_PLUS: f64 = 0.75 + 0.5590169943749474;
pub const B_MINUS: f64 = 0.75 - 0.5590169943749474;

/// The exact radial solution `eta^r = C1 / sqrt(r) + C2 r^2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialClosedForm {
    pub c1: f64,
    pub c2: f64,
}

impl RadialClosedForm {
    pub fn new(c1: f64, c2: f64) -> Self {
        Self { c1, c2 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.c1 / r.sqrt() + self.c2 * r * r
    }

    pub fn deriv(&self, r: f64) -> f64 {
        -0.5 * self.c1 / (r * r.sqrt()) + 2.0 * self.c2 * r
    }

    fn second_deriv(&self, r: f64) -> f64 {
        0.75 * self.c1 / (r * r * r.sqrt()) + 2.0 * self.c2
    }
}

/// Value of the radial closed form at `r`.
pub fn radial_closed_form(cf: &RadialClosedForm, r: f64) -> f64 {
    cf.eval(r)
}

/// Residual of the radial closed form in the -1/(2r) radial equation.
/// Zero (to rounding) for every C1, C2.
pub fn radial_ode_residual_corrected(cf: &RadialClosedForm, r: f64) -> f64 {
    cf.second_deriv(r) - cf.deriv(r) / (2.0 * r) - cf.eval(r) / (r * r)
}

/// Residual of the radial closed form in the -1/r first-derivative variant.
/// Nonzero: the variant is inconsistent with the exact solution.
pub fn radial_ode_residual_alt_damping(cf: &RadialClosedForm, r: f64) -> f64 {
    cf.second_deriv(r) - cf.deriv(r) / r - cf.eval(r) / (r * r)
}

/// Characteristic polynomial of the radial equation, k^2 - (3/2)k - 1;
/// roots 2 and -1/2.
pub fn radial_indicial_polynomial(k: f64) -> f64 {
    k * k - 1.5 * k - 1.0
}

/// Indicial polynomial of the transverse equations at the origin,
/// k^2 - (3/2)k + 1/4; roots 3/4 +- sqrt(5)/4.
pub fn transverse_indicial_polynomial(k: f64) -> f64 {
    k * k - 1.5 * k + 0.25
}

/// Which singularity a probe approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityTarget {
    RZero,
    RAlpha,
}

/// Probe tuning: where to start, how deep the branch-selection shot goes,
/// and the distance window (relative to the target) used for the
/// log-log exponent fit.
#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub r_start_offset: f64,
    pub shoot_depth: f64,
    pub fit_window: (f64, f64),
    pub fit_points: usize,
    pub integration: IntegrationConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            r_start_offset: 1.0,
            shoot_depth: 1e-8,
            fit_window: (1e-5, 1e-3),
            fit_points: 25,
            integration: IntegrationConfig {
                max_step: 0.25,
                ..Default::default()
            },
        }
    }
}

/// Fitted behaviour of one deviation component near a singularity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComponentFit {
    /// Least-squares slope of log|eta| against log(r - target).
    pub exponent: f64,
    /// RMS residual of the log-log fit (small means a clean power law).
    pub fit_rms: f64,
    /// |eta| at the innermost fit point.
    pub terminal_magnitude: f64,
}

/// Report of a singularity-approach probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub target: SingularityTarget,
    pub target_radius: f64,
    pub radial: ComponentFit,
    pub theta: ComponentFit,
    pub phi: ComponentFit,
    /// Sum of the three fitted exponents: the volume-element proxy scales
    /// as (r - target) to this power, so positive means crushed to zero.
    pub volume_exponent: f64,
    pub volume_vanishes: bool,
    pub radial_finite: bool,
    pub transverse_vanish: bool,
    pub stop: StopReason,
}

struct ProbePath {
    // (distance from target, |eta| per component)
    points: Vec<(f64, [f64; 3])>,
    stop: StopReason,
}

fn probe_path(
    params: &MetricParams,
    target_radius: f64,
    initial: DeviationState,
    checkpoints: &[f64],
    config: &IntegrationConfig,
) -> Result<ProbePath> {
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut current = initial;
    for &x in checkpoints {
        let run = integrate_deviation(params, &current, target_radius + x, config)?;
        current = *run.last();
        if run.stop == StopReason::StepFailure {
            return Ok(ProbePath {
                points,
                stop: StopReason::StepFailure,
            });
        }
        points.push((
            x,
            [
                current.eta[0].abs(),
                current.eta[1].abs(),
                current.eta[2].abs(),
            ],
        ));
    }
    Ok(ProbePath {
        points,
        stop: StopReason::MaxTau,
    })
}

// Least-squares power-law fit on (ln x, ln |eta|); points with |eta| = 0
// are skipped. Returns (slope, rms residual).
fn fit_exponent(points: &[(f64, f64)]) -> (f64, f64) {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(x, v)| (x.ln(), v.ln()))
        .collect();
    if logs.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let rms = (logs
        .iter()
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

/// Probe the behaviour of the deviation vector approaching `r = 0` or
/// `r = alpha`, fitting the local power-law exponent of every component
/// and the volume-element trend.
///
/// The transverse equations have a solution branch with a finite nonzero
/// limit at `r = alpha`; the probe isolates the vanishing branch by one
/// exact shooting step on the initial slope (the system is linear), which
/// is the branch the closed-form solutions describe.
pub fn singularity_probe(
    params: &MetricParams,
    target: SingularityTarget,
    config: &ProbeConfig,
) -> Result<ProbeReport> {
    check_deviation_family(params)?;
    let alpha = params.alpha();
    let target_radius = match target {
        SingularityTarget::RAlpha => {
            if alpha <= 0.0 {
                return Err(Error::Config(
                    "no r = alpha singularity: alpha is zero for these parameters".into(),
                ));
            }
            alpha
        }
        SingularityTarget::RZero => {
            if alpha > 0.0 {
                return Err(Error::Config(
                    "r = 0 is hidden behind the r = alpha singularity when alpha > 0".into(),
                ));
            }
            0.0
        }
    };

    let r_start = target_radius + config.r_start_offset;
    let (w_lo, w_hi) = config.fit_window;
    if !(config.shoot_depth < w_lo && w_lo < w_hi && w_hi < config.r_start_offset) {
        return Err(Error::Config(
            "probe needs shoot_depth < fit window < r_start_offset".into(),
        ));
    }

    // Descending checkpoints: through the fit window down to the shot depth.
    let mut checkpoints = Vec::with_capacity(config.fit_points + 1);
    for i in 0..config.fit_points {
        let frac = i as f64 / (config.fit_points - 1) as f64;
        checkpoints.push(w_hi * (w_lo / w_hi).powf(frac));
    }
    checkpoints.push(config.shoot_depth);

    let generic = DeviationState::new(r_start, [1.0, 1.0, 0.7], [0.0, 0.0, 0.0]);

    let path = match target {
        SingularityTarget::RZero => {
            // Every transverse branch decays at r = 0; generic data suffice.
            probe_path(
                params,
                target_radius,
                generic,
                &checkpoints,
                &config.integration,
            )?
        }
        SingularityTarget::RAlpha => {
            // Affine shooting on the transverse slopes: land eta = 0 at the
            // shot depth, then sample the fit window on the selected branch.
            let probe_value = |slope: f64| -> Result<[f64; 2]> {
                let init = DeviationState::new(r_start, [1.0, 1.0, 0.7], [0.0, slope, slope]);
                let run = integrate_deviation(
                    params,
                    &init,
                    target_radius + config.shoot_depth,
                    &config.integration,
                )?;
                if run.stop == StopReason::StepFailure {
                    return Err(Error::Config(
                        "branch-selection shot failed before reaching the target depth".into(),
                    ));
                }
                Ok([run.last().eta[1], run.last().eta[2]])
            };
            let g0 = probe_value(0.0)?;
            let g1 = probe_value(1.0)?;
            let mut slopes = [0.0_f64; 2];
            for (k, slot) in slopes.iter_mut().enumerate() {
                let denom = g1[k] - g0[k];
                if denom == 0.0 {
                    return Err(Error::Config(
                        "branch selection degenerate: shots do not separate".into(),
                    ));
                }
                *slot = -g0[k] / denom;
            }
            let selected =
                DeviationState::new(r_start, [1.0, 1.0, 0.7], [0.0, slopes[0], slopes[1]]);
            probe_path(
                params,
                target_radius,
                selected,
                &checkpoints,
                &config.integration,
            )?
        }
    };

    let in_window = |x: f64| x >= w_lo * (1.0 - 1e-9) && x <= w_hi * (1.0 + 1e-9);
    let component = |idx: usize| -> ComponentFit {
        let pts: Vec<(f64, f64)> = path
            .points
            .iter()
            .filter(|(x, _)| in_window(*x))
            .map(|(x, v)| (*x, v[idx]))
            .collect();
        let terminal = pts.first().map_or(f64::NAN, |_| {
            pts.iter()
                .fold((f64::INFINITY, 0.0), |acc, (x, v)| {
                    if *x < acc.0 {
                        (*x, *v)
                    } else {
                        acc
                    }
                })
                .1
        });
        let (exponent, fit_rms) = fit_exponent(&pts);
        ComponentFit {
            exponent,
            fit_rms,
            terminal_magnitude: terminal,
        }
    };

    let radial = component(0);
    let theta = component(1);
    let phi = component(2);
    let volume_exponent = radial.exponent + theta.exponent + phi.exponent;

    Ok(ProbeReport {
        target,
        target_radius,
        radial,
        theta,
        phi,
        volume_exponent,
        volume_vanishes: volume_exponent > 0.05,
        radial_finite: radial.exponent.abs() < 0.05 && radial.terminal_magnitude.is_finite(),
        transverse_vanish: theta.exponent > 0.5 && phi.exponent > 0.5,
        stop: path.stop,
    })
}
