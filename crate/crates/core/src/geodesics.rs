//! Geodesic equations of motion, first integrals, and the adaptive
//! trajectory integrator.
//!
//! The integrator advances the full second-order system in all four
//! coordinates (so the polar equation is exercised rather than assumed)
//! and monitors the conserved charges and the normalization constraint at
//! every accepted sample. Turning points need no special handling because
//! the radial equation, not the first-order energy equation, is integrated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{initial_step, StepControl, StepOutcome, Stepper};
use crate::potential::{check_epsilon, effective_potential_sq, PotentialSpec};
use crate::spacetime::{metric_at, MetricParams, SpacetimeFamily, SpacetimePoint, PHI, T, THETA};

/// Tolerance for treating a state as equatorial.
pub const EQUATORIAL_TOL: f64 = 1e-9;

/// A phase-space point along a geodesic: affine parameter, coordinates,
/// and coordinate velocities (d/dtau).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeodesicState {
    pub tau: f64,
    pub x: SpacetimePoint,
    pub v: [f64; 4],
}

impl GeodesicState {
    pub fn new(tau: f64, x: SpacetimePoint, v: [f64; 4]) -> Self {
        Self { tau, x, v }
    }

    fn from_vector(tau: f64, y: &[f64; 8]) -> Self {
        Self {
            tau,
            x: SpacetimePoint::new(y[0], y[1], y[2], y[3]),
            v: [y[4], y[5], y[6], y[7]],
        }
    }

    fn to_vector(self) -> [f64; 8] {
        [
            self.x.t,
            self.x.r,
            self.x.theta,
            self.x.phi,
            self.v[0],
            self.v[1],
            self.v[2],
            self.v[3],
        ]
    }
}

/// Conserved quantities along an equatorial geodesic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConservedCharges {
    pub energy: f64,
    pub angular_momentum: f64,
    pub epsilon: f64,
}

/// Stopping conditions for the trajectory integrator.
#[derive(Debug, Clone, Copy, Default)]
pub struct StopRule {
    pub max_tau: Option<f64>,
    pub r_floor: Option<f64>,
    pub r_ceiling: Option<f64>,
}

/// Integrator tolerances and stopping rule.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub stop: StopRule,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            max_steps: 2_000_000,
            stop: StopRule::default(),
        }
    }
}

impl IntegrationConfig {
    pub(crate) fn control(&self) -> Result<StepControl> {
        StepControl::new(self.rel_tol, self.abs_tol, self.max_step)
    }
}

/// Why an integration stopped.
///
/// `StepFailure` is a stop reason rather than an error so that the partial
/// trajectory up to the last valid state is always returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxTau,
    RFloor,
    RCeiling,
    HorizonApproach,
    StepFailure,
}

/// A sampled geodesic with conservation diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<GeodesicState>,
    /// Max deviation of the recomputed E and L from their initial values.
    pub charge_drift: f64,
    /// Max |g_ab v^a v^b - epsilon| over all samples.
    pub constraint_drift: f64,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn initial(&self) -> &GeodesicState {
        &self.samples[0]
    }

    pub fn last(&self) -> &GeodesicState {
        self.samples.last().expect("trajectory has samples")
    }
}

/// Coordinate accelerations (ttdot, rddot, thetaddot, phiddot) from the
/// closed-form geodesic equations of each family.
pub fn acceleration(params: &MetricParams, state: &GeodesicState) -> Result<[f64; 4]> {
    let r = state.x.r;
    let (sin_th, cos_th) = state.x.theta.sin_cos();
    let [vt, vr, vth, vph] = state.v;
    // Validate the point (horizon, r <= alpha, positivity).
    metric_at(params, &state.x)?;

    match params.family() {
        SpacetimeFamily::Schwarzschild | SpacetimeFamily::StringyGhs => {
            let (m, alpha) = (params.mass(), params.alpha());
            let r2m = r - 2.0 * m;
            let at = -2.0 * m / (r * r2m) * vr * vt;
            let ar = m / (r * r2m) * vr * vr
                - r2m * (alpha - 2.0 * r) / (2.0 * r) * (vth * vth + sin_th * sin_th * vph * vph)
                - m * r2m / (r * r * r) * vt * vt;
            let ang = (alpha - 2.0 * r) / (r * (alpha - r));
            let ath = -ang * vr * vth + sin_th * cos_th * vph * vph;
            let aph = if vph == 0.0 {
                -ang * vr * vph
            } else {
                if sin_th.abs() < crate::spacetime::AXIS_TOL {
                    return Err(Error::Domain(
                        "phi equation needs sin(theta) != 0 for a rotating state".into(),
                    ));
                }
                -ang * vr * vph - 2.0 * cos_th / sin_th * vth * vph
            };
            Ok([at, ar, ath, aph])
        }
        SpacetimeFamily::ReissnerNordstrom => {
            let (a, a1, _) = params.profile_a(r);
            let at = -a1 / a * vr * vt;
            let ar = a1 / (2.0 * a) * vr * vr + r * a * (vth * vth + sin_th * sin_th * vph * vph)
                - a * a1 / 2.0 * vt * vt;
            let ath = -2.0 / r * vr * vth + sin_th * cos_th * vph * vph;
            let aph = if vph == 0.0 {
                -2.0 / r * vr * vph
            } else {
                if sin_th.abs() < crate::spacetime::AXIS_TOL {
                    return Err(Error::Domain(
                        "phi equation needs sin(theta) != 0 for a rotating state".into(),
                    ));
                }
                -2.0 / r * vr * vph - 2.0 * cos_th / sin_th * vth * vph
            };
            Ok([at, ar, ath, aph])
        }
    }
}

/// Conserved E, L, and normalization from an equatorial state.
pub fn first_integrals(params: &MetricParams, state: &GeodesicState) -> Result<ConservedCharges> {
    let dtheta = (state.x.theta - std::f64::consts::FRAC_PI_2).abs();
    let theta_dot = state.v[THETA].abs();
    if dtheta > EQUATORIAL_TOL || theta_dot > EQUATORIAL_TOL {
        return Err(Error::NonEquatorial { dtheta, theta_dot });
    }

    let g = metric_at(params, &state.x)?;
    let energy = -g.g_tt * state.v[T];
    let angular_momentum = g.g_phph * state.v[PHI];
    let raw = g.norm_sq(&state.v);
    let epsilon = if raw.abs() < 1e-6 {
        0.0
    } else if (raw + 1.0).abs() < 1e-6 {
        -1.0
    } else {
        return Err(Error::Config(format!(
            "state normalization {raw:.6e} is neither null nor timelike"
        )));
    };
    Ok(ConservedCharges {
        energy,
        angular_momentum,
        epsilon,
    })
}

/// rdot^2 = E^2 - V^2(r) along an equatorial geodesic. May be negative in
/// the classically forbidden region.
pub fn radial_velocity_sq(
    params: &MetricParams,
    charges: &ConservedCharges,
    r: f64,
) -> Result<f64> {
    let spec = PotentialSpec::new(*params, charges.angular_momentum, charges.epsilon)?;
    Ok(charges.energy * charges.energy - effective_potential_sq(&spec, r)?)
}

/// g_ab v^a v^b - epsilon.
pub fn constraint_residual(
    params: &MetricParams,
    state: &GeodesicState,
    epsilon: f64,
) -> Result<f64> {
    let g = metric_at(params, &state.x)?;
    Ok(g.norm_sq(&state.v) - epsilon)
}

/// Build an equatorial launch state from conserved charges.
///
/// tdot and phidot are fixed by E and L; rdot comes from the energy
/// equation with the requested sign (`-1.0` for infall). Fails when the
/// radius lies in the classically forbidden region.
pub fn launch_equatorial(
    params: &MetricParams,
    r0: f64,
    charges: &ConservedCharges,
    rdot_sign: f64,
) -> Result<GeodesicState> {
    check_epsilon(charges.epsilon)?;
    let x = SpacetimePoint::equatorial(r0);
    let g = metric_at(params, &x)?;
    let vr_sq = radial_velocity_sq(params, charges, r0)?;
    if vr_sq < -1e-12 {
        return Err(Error::Config(format!(
            "r0 = {r0} is classically forbidden for these charges (rdot^2 = {vr_sq:.3e})"
        )));
    }
    let vt = -charges.energy / g.g_tt;
    let vph = charges.angular_momentum / g.g_phph;
    let vr = rdot_sign.signum() * vr_sq.max(0.0).sqrt();
    Ok(GeodesicState::new(0.0, x, [vt, vr, 0.0, vph]))
}

/// A circular photon state at radius `r_ph`: the critical angular momentum
/// for the chosen energy, prograde.
pub fn circular_photon_state(
    params: &MetricParams,
    r_ph: f64,
    energy: f64,
) -> Result<GeodesicState> {
    let x = SpacetimePoint::equatorial(r_ph);
    let g = metric_at(params, &x)?;
    let (a, _, _) = params.profile_a(r_ph);
    if a <= 0.0 {
        return Err(Error::Domain(format!(
            "r_ph = {r_ph} is not outside the horizon"
        )));
    }
    // E^2 = V^2(r_ph) for a null ray: L^2 = E^2 B / A. rdot is zero by
    // construction; going through the energy equation would plant a
    // sqrt-of-rounding radial kick that the unstable orbit amplifies.
    let l = energy * (g.g_phph / a).sqrt();
    let vt = -energy / g.g_tt;
    let vph = l / g.g_phph;
    Ok(GeodesicState::new(0.0, x, [vt, 0.0, 0.0, vph]))
}

/// Integrate the geodesic equations from `initial` until a stop rule fires.
///
/// The initial state must satisfy the normalization constraint to within
/// `config.abs_tol`. Charge and constraint drift are monitored at every
/// accepted sample.
pub fn integrate(
    params: &MetricParams,
    initial: &GeodesicState,
    epsilon: f64,
    config: &IntegrationConfig,
) -> Result<Trajectory> {
    check_epsilon(epsilon)?;
    let control = config.control()?;
    let res0 = constraint_residual(params, initial, epsilon)?;
    if res0.abs() >= config.abs_tol.max(1e-12) {
        return Err(Error::Config(format!(
            "initial state violates the normalization constraint: residual {res0:.3e}"
        )));
    }

    let g0 = metric_at(params, &initial.x)?;
    let energy0 = -g0.g_tt * initial.v[T];
    let l0 = g0.g_phph * initial.v[PHI];

    let rhs = |_tau: f64, y: &[f64; 8]| -> Result<[f64; 8]> {
        let state = GeodesicState::from_vector(0.0, y);
        let acc = acceleration(params, &state)?;
        Ok([y[4], y[5], y[6], y[7], acc[0], acc[1], acc[2], acc[3]])
    };

    let horizon_band = params
        .horizon_radius()
        .map(|rh| (rh, rh + 1e-6 * params.mass().max(1e-30)));

    let y0 = initial.to_vector();
    let dir = config
        .stop
        .max_tau
        .map_or(1.0, |t_end| (t_end - initial.tau).signum());
    let dydt = rhs(initial.tau, &y0)?;
    let h0 = initial_step(&control, &y0, &dydt, dir);
    let mut stepper: Stepper<8> = Stepper::new(control, h0);

    let mut samples = vec![*initial];
    let mut tau = initial.tau;
    let mut y = y0;
    let mut charge_drift = 0.0_f64;
    let mut constraint_drift = res0.abs();

    let stop = 'outer: {
        for _ in 0..config.max_steps {
            if let Some(t_end) = config.stop.max_tau {
                stepper.clip_to(tau, t_end);
            }
            match stepper.step(&rhs, tau, &y)? {
                StepOutcome::Accepted(acc) => {
                    tau = acc.t;
                    y = acc.y;
                }
                StepOutcome::Underflow => break 'outer StopReason::StepFailure,
            }
            let tau_done = config.stop.max_tau.is_some_and(|t_end| {
                if crate::ode::reached(tau, t_end) {
                    tau = t_end;
                    true
                } else {
                    false
                }
            });
            let state = GeodesicState::from_vector(tau, &y);
            samples.push(state);

            let g = metric_at(params, &state.x)?;
            let energy = -g.g_tt * state.v[T];
            let l = g.g_phph * state.v[PHI];
            charge_drift = charge_drift
                .max((energy - energy0).abs())
                .max((l - l0).abs());
            constraint_drift = constraint_drift.max((g.norm_sq(&state.v) - epsilon).abs());

            if tau_done {
                break 'outer StopReason::MaxTau;
            }
            if let Some(floor) = config.stop.r_floor {
                if state.x.r <= floor {
                    break 'outer StopReason::RFloor;
                }
            }
            if let Some(ceiling) = config.stop.r_ceiling {
                if state.x.r >= ceiling {
                    break 'outer StopReason::RCeiling;
                }
            }
            if let Some((_, band)) = horizon_band {
                if state.x.r <= band {
                    break 'outer StopReason::HorizonApproach;
                }
            }
        }
        StopReason::StepFailure
    };

    Ok(Trajectory {
        samples,
        charge_drift,
        constraint_drift,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::R;
    use approx::assert_relative_eq;

    fn ghs(mass: f64, alpha: f64) -> MetricParams {
        MetricParams::ghs_from_alpha(mass, alpha).unwrap()
    }

    fn static_state(r: f64, vt: f64) -> GeodesicState {
        GeodesicState::new(0.0, SpacetimePoint::equatorial(r), [vt, 0.0, 0.0, 0.0])
    }

    #[test]
    fn radial_acceleration_of_a_static_probe() {
        let p = ghs(1.0, 0.2);
        let acc = acceleration(&p, &static_state(5.0, 1.0)).unwrap();
        assert_relative_eq!(acc[R], -0.024, max_relative = 1e-14);
        assert_eq!(acc[T], 0.0);
    }

    #[test]
    fn equatorial_state_has_no_polar_acceleration() {
        let p = MetricParams::reissner_nordstrom(1.0, 0.6).unwrap();
        let state =
            GeodesicState::new(0.0, SpacetimePoint::equatorial(6.0), [1.3, -0.2, 0.0, 0.05]);
        let acc = acceleration(&p, &state).unwrap();
        // cos(pi/2) rounds to ~6e-17, so the polar acceleration is zero
        // only to rounding.
        assert!(acc[THETA].abs() < 1e-18);
    }

    #[test]
    fn flat_space_has_no_acceleration() {
        let p = ghs(0.0, 0.0);
        let state = GeodesicState::new(0.0, SpacetimePoint::equatorial(3.0), [1.0, -1.0, 0.0, 0.0]);
        assert_eq!(acceleration(&p, &state).unwrap(), [0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn energy_inverts_the_t_first_integral() {
        let p = ghs(1.0, 0.5);
        let state = static_state(10.0, 1.25);
        // Not normalized; first_integrals only reads E here.
        let g = metric_at(&p, &state.x).unwrap();
        assert_relative_eq!(-g.g_tt * state.v[T], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn angular_momentum_inverts_the_phi_first_integral() {
        let p = ghs(1.0, 0.5);
        let state =
            GeodesicState::new(0.0, SpacetimePoint::equatorial(10.0), [0.0, 0.0, 0.0, 0.01]);
        let g = metric_at(&p, &state.x).unwrap();
        assert_relative_eq!(g.g_phph * state.v[PHI], 0.95, max_relative = 1e-14);
    }

    #[test]
    fn flat_static_energy_is_tdot() {
        let p = ghs(0.0, 0.0);
        let state = static_state(7.0, 1.0);
        let charges = first_integrals(&p, &state).unwrap();
        assert_eq!(charges.energy, 1.0);
        assert_eq!(charges.epsilon, -1.0);
    }

    #[test]
    fn non_equatorial_states_are_rejected() {
        let p = ghs(1.0, 0.0);
        let mut state = static_state(8.0, 2.0);
        state.x.theta += 1e-3;
        assert!(matches!(
            first_integrals(&p, &state),
            Err(Error::NonEquatorial { .. })
        ));
    }

    #[test]
    fn radial_photon_has_unit_rdot_sq() {
        let p = ghs(1.0, 0.5);
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 0.0,
            epsilon: 0.0,
        };
        for r in [3.0, 10.0, 100.0] {
            assert_eq!(radial_velocity_sq(&p, &charges, r).unwrap(), 1.0);
        }
    }

    #[test]
    fn forbidden_region_at_the_schwarzschild_photon_sphere() {
        let p = ghs(1.0, 0.0);
        let charges = ConservedCharges {
            energy: 0.0,
            angular_momentum: 1.0,
            epsilon: 0.0,
        };
        assert_relative_eq!(
            radial_velocity_sq(&p, &charges, 3.0).unwrap(),
            -1.0 / 27.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn rn_radial_velocity_matches_hand_arithmetic() {
        let p = MetricParams::reissner_nordstrom(1.0, 0.5).unwrap();
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 1.0,
            epsilon: 0.0,
        };
        assert_relative_eq!(
            radial_velocity_sq(&p, &charges, 4.0).unwrap(),
            0.9677734375,
            max_relative = 1e-14
        );
    }

    #[test]
    fn launch_state_satisfies_the_constraint() {
        let p = ghs(1.0, 0.4);
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 3.0,
            epsilon: 0.0,
        };
        let state = launch_equatorial(&p, 12.0, &charges, -1.0).unwrap();
        assert!(constraint_residual(&p, &state, 0.0).unwrap().abs() < 1e-12);

        let timelike = ConservedCharges {
            energy: 1.0,
            angular_momentum: 0.0,
            epsilon: -1.0,
        };
        let state = launch_equatorial(&p, 10.0, &timelike, -1.0).unwrap();
        assert!(constraint_residual(&p, &state, -1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_velocity_null_state_has_zero_residual() {
        let p = ghs(1.0, 0.0);
        let state = GeodesicState::new(0.0, SpacetimePoint::equatorial(5.0), [0.0; 4]);
        assert_eq!(constraint_residual(&p, &state, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn radial_null_infall_in_flat_space_is_linear_in_tau() {
        let p = ghs(0.0, 0.0);
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 0.0,
            epsilon: 0.0,
        };
        let initial = launch_equatorial(&p, 10.0, &charges, -1.0).unwrap();
        let config = IntegrationConfig {
            stop: StopRule {
                max_tau: Some(5.0),
                ..Default::default()
            },
            ..Default::default()
        };
        let traj = integrate(&p, &initial, 0.0, &config).unwrap();
        assert_eq!(traj.stop, StopReason::MaxTau);
        for s in &traj.samples {
            assert!((s.x.r - (10.0 - s.tau)).abs() < 1e-10);
        }
    }

    #[test]
    fn circular_photon_orbit_stays_on_the_photon_sphere() {
        let p = MetricParams::schwarzschild(1.0).unwrap();
        let initial = circular_photon_state(&p, 3.0, 1.0).unwrap();
        // One full revolution: phidot = L / B(r) at launch.
        let phidot = initial.v[PHI];
        let tau_rev = 2.0 * std::f64::consts::PI / phidot;
        let config = IntegrationConfig {
            stop: StopRule {
                max_tau: Some(tau_rev),
                ..Default::default()
            },
            ..Default::default()
        };
        let traj = integrate(&p, &initial, 0.0, &config).unwrap();
        assert_eq!(traj.stop, StopReason::MaxTau);
        assert!(traj.samples.windows(2).all(|w| w[1].tau > w[0].tau));
        assert!(traj.last().x.phi >= 2.0 * std::f64::consts::PI - 1e-6);
        for s in &traj.samples {
            assert!(
                (s.x.r - 3.0).abs() < 1e-6,
                "left the photon sphere: r = {} at tau = {}",
                s.x.r,
                s.tau
            );
        }
        assert!(traj.charge_drift < 1e-8);
        assert!(traj.constraint_drift < 1e-9);
    }

    #[test]
    fn equatorial_launch_stays_locked_to_the_plane() {
        let p = ghs(1.0, 0.5);
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 4.0,
            epsilon: -1.0,
        };
        let initial = launch_equatorial(&p, 15.0, &charges, -1.0).unwrap();
        let config = IntegrationConfig {
            stop: StopRule {
                max_tau: Some(60.0),
                ..Default::default()
            },
            ..Default::default()
        };
        let traj = integrate(&p, &initial, -1.0, &config).unwrap();
        for s in &traj.samples {
            assert!((s.x.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        }
    }

    #[test]
    fn infall_stops_at_the_horizon_band_not_with_an_error() {
        let p = ghs(1.0, 0.3);
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 0.0,
            epsilon: -1.0,
        };
        let initial = launch_equatorial(&p, 8.0, &charges, -1.0).unwrap();
        let config = IntegrationConfig {
            stop: StopRule {
                max_tau: Some(1e4),
                ..Default::default()
            },
            ..Default::default()
        };
        let traj = integrate(&p, &initial, -1.0, &config).unwrap();
        assert_eq!(traj.stop, StopReason::HorizonApproach);
        let r_end = traj.last().x.r;
        assert!(r_end > 2.0 && r_end < 2.0 + 1e-3);
    }

    #[test]
    fn unnormalized_initial_state_is_rejected() {
        let p = ghs(1.0, 0.0);
        let state = static_state(10.0, 1.0); // g v v = -0.8, not -1
        let config = IntegrationConfig::default();
        assert!(integrate(&p, &state, -1.0, &config).is_err());
    }

    #[test]
    fn r_floor_stop_fires() {
        let p = ghs(1.0, 0.0);
        let charges = ConservedCharges {
            energy: 1.0,
            angular_momentum: 0.0,
            epsilon: 0.0,
        };
        let initial = launch_equatorial(&p, 10.0, &charges, -1.0).unwrap();
        let config = IntegrationConfig {
            stop: StopRule {
                r_floor: Some(5.0),
                ..Default::default()
            },
            ..Default::default()
        };
        let traj = integrate(&p, &initial, 0.0, &config).unwrap();
        assert_eq!(traj.stop, StopReason::RFloor);
        assert!(traj.last().x.r <= 5.0);
    }
}
