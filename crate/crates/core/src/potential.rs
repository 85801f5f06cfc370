//! Effective potentials and circular photon orbits.
//!
//! The squared effective potential along equatorial geodesics is
//!
//! ```text
//! V^2(r) = A(r) * (-epsilon + L^2 / B(r))
//! ```
//!
//! Circular orbits sit at critical points of `V^2`. Closed-form photon
//! radii exist for both charged families; the numerical route here finds
//! critical points from a sign scan of d(V^2)/dr followed by Brent
//! refinement, so it shares no algebra with the quadratic closed forms it
//! is checked against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;
use crate::spacetime::{MetricParams, SpacetimeFamily};

/// Potential parameters: spacetime, angular momentum, and normalization.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSpec {
    pub params: MetricParams,
    pub angular_momentum: f64,
    pub epsilon: f64,
}

impl PotentialSpec {
    pub fn new(params: MetricParams, angular_momentum: f64, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            params,
            angular_momentum,
            epsilon,
        })
    }

    /// Photon potential (epsilon = 0).
    pub fn null_ray(params: MetricParams, angular_momentum: f64) -> Self {
        Self {
            params,
            angular_momentum,
            epsilon: 0.0,
        }
    }

    /// Massive-particle potential (epsilon = -1).
    pub fn timelike(params: MetricParams, angular_momentum: f64) -> Self {
        Self {
            params,
            angular_momentum,
            epsilon: -1.0,
        }
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon != 0.0 && epsilon != -1.0 {
        return Err(Error::Config(format!(
            "epsilon must be 0 (null) or -1 (timelike), got {epsilon}"
        )));
    }
    Ok(())
}

fn check_potential_radius(params: &MetricParams, r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    if params.family() == SpacetimeFamily::StringyGhs && r <= params.alpha() {
        return Err(Error::Domain(format!(
            "r = {r} is at or inside r = alpha = {}",
            params.alpha()
        )));
    }
    Ok(())
}

/// Squared effective potential `V^2(r)`.
pub fn effective_potential_sq(spec: &PotentialSpec, r: f64) -> Result<f64> {
    check_potential_radius(&spec.params, r)?;
    let (a, _, _) = spec.params.profile_a(r);
    let (b, _, _) = spec.params.profile_b(r);
    let l = spec.angular_momentum;
    Ok(a * (-spec.epsilon + l * l / b))
}

/// Analytic d(V^2)/dr.
pub fn effective_potential_sq_deriv(spec: &PotentialSpec, r: f64) -> Result<f64> {
    check_potential_radius(&spec.params, r)?;
    let (a, a1, _) = spec.params.profile_a(r);
    let (b, b1, _) = spec.params.profile_b(r);
    let l = spec.angular_momentum;
    let w = -spec.epsilon + l * l / b;
    Ok(a1 * w - a * l * l * b1 / (b * b))
}

/// Stability of a circular orbit, classified by the sign of d^2(V^2)/dr^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Degenerate,
}

/// Classification threshold on the second derivative, in natural units.
pub const STABILITY_TOL: f64 = 1e-10;

/// A critical radius of the effective potential.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircularOrbit {
    pub radius: f64,
    pub stability: Stability,
    pub second_derivative: f64,
    pub in_exterior: bool,
}

/// Raw discriminant of the circular-photon-orbit quadratic:
/// `(6M + alpha)^2 - 32 M alpha` for the dilaton family,
/// `1 - 8 e^2 / (9 m^2)` for Reissner-Nordstrom.
pub fn photon_orbit_discriminant(params: &MetricParams) -> Result<f64> {
    match params.family() {
        SpacetimeFamily::Schwarzschild | SpacetimeFamily::StringyGhs => {
            let (m, alpha) = (params.mass(), params.alpha());
            Ok((6.0 * m + alpha) * (6.0 * m + alpha) - 32.0 * m * alpha)
        }
        SpacetimeFamily::ReissnerNordstrom => {
            let (m, e) = (params.mass(), params.charge());
            if m == 0.0 {
                return Err(Error::Config(
                    "photon-orbit discriminant needs a positive mass".into(),
                ));
            }
            Ok(1.0 - 8.0 * e * e / (9.0 * m * m))
        }
    }
}

/// Closed-form circular photon orbit radii, descending.
///
/// Dilaton family: `r = ((6M + alpha) +- sqrt((6M + alpha)^2 - 32 M alpha)) / 4`.
/// Reissner-Nordstrom: `r = (3m/2) (1 +- sqrt(1 - 8 e^2 / 9 m^2))`; the list
/// is empty when the discriminant is negative, and a discriminant within
/// rounding of zero is treated as an exact double root.
pub fn circular_orbit_radii_closed_form(params: &MetricParams) -> Result<Vec<f64>> {
    match params.family() {
        SpacetimeFamily::Schwarzschild | SpacetimeFamily::StringyGhs => {
            if params.family() == SpacetimeFamily::StringyGhs
                && params.alpha() >= 2.0 * params.mass()
            {
                return Err(Error::Config(
                    "no circular photon orbit exists for alpha >= 2M".into(),
                ));
            }
            let (m, alpha) = (params.mass(), params.alpha());
            let root = photon_orbit_discriminant(params)?.sqrt();
            Ok(vec![
                (6.0 * m + alpha + root) / 4.0,
                (6.0 * m + alpha - root) / 4.0,
            ])
        }
        SpacetimeFamily::ReissnerNordstrom => {
            let m = params.mass();
            let mut disc = photon_orbit_discriminant(params)?;
            if disc.abs() < 1e-13 {
                disc = 0.0;
            }
            if disc < 0.0 {
                return Ok(Vec::new());
            }
            let root = disc.sqrt();
            Ok(vec![1.5 * m * (1.0 + root), 1.5 * m * (1.0 - root)])
        }
    }
}

/// Second derivative of `V^2` by central difference with step `1e-6 * r`,
/// plus the stability classification it implies.
pub fn classify_radius(spec: &PotentialSpec, r: f64) -> Result<(Stability, f64)> {
    let h = 1e-6 * r;
    let f = |x: f64| effective_potential_sq(spec, x);
    let second = (f(r + h)? - 2.0 * f(r)? + f(r - h)?) / (h * h);
    let stability = if second > STABILITY_TOL {
        Stability::Stable
    } else if second < -STABILITY_TOL {
        Stability::Unstable
    } else {
        Stability::Degenerate
    };
    Ok((stability, second))
}

/// All critical points of `V^2` inside `bracket`, by sign scan of the
/// finite-difference derivative plus Brent refinement, classified by the
/// second derivative.
pub fn circular_orbit_radii_numeric(
    spec: &PotentialSpec,
    bracket: (f64, f64),
) -> Result<Vec<CircularOrbit>> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Config(format!(
            "bracket must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    check_potential_radius(&spec.params, lo)?;

    const SCAN_POINTS: usize = 4096;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut orbits = Vec::new();
    let mut prev_r = lo;
    let mut prev_d = effective_potential_sq_deriv(spec, lo)?;
    for i in 1..SCAN_POINTS {
        let r = lo + step * i as f64;
        let d = effective_potential_sq_deriv(spec, r)?;
        if prev_d == 0.0 || prev_d.signum() != d.signum() {
            let root = if prev_d == 0.0 {
                prev_r
            } else {
                roots::brent(
                    |x| effective_potential_sq_deriv(spec, x).unwrap_or(f64::NAN),
                    prev_r,
                    r,
                    1e-13,
                    1e-14,
                )?
            };
            let (stability, second_derivative) = classify_radius(spec, root)?;
            orbits.push(CircularOrbit {
                radius: root,
                stability,
                second_derivative,
                in_exterior: spec.params.is_exterior(root),
            });
        }
        prev_r = r;
        prev_d = d;
    }
    Ok(orbits)
}

/// Sample spacing for potential curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `n` samples of `(r, V^2)` over `[r_min, r_max]`.
pub fn potential_curve(
    spec: &PotentialSpec,
    r_min: f64,
    r_max: f64,
    n: usize,
    spacing: Spacing,
) -> Result<Vec<(f64, f64)>> {
    if !(r_min < r_max) {
        return Err(Error::Domain(format!(
            "need r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n}")));
    }
    check_potential_radius(&spec.params, r_min)?;

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let frac = i as f64 / (n - 1) as f64;
        let r = match spacing {
            Spacing::Linear => r_min + (r_max - r_min) * frac,
            Spacing::Log => r_min * (r_max / r_min).powf(frac),
        };
        out.push((r, effective_potential_sq(spec, r)?));
    }
    Ok(out)
}
