//! The three metric families and their curvature tables.
//!
//! All three spacetimes share the warped-product form
//!
//! ```text
//! ds^2 = -A(r) dt^2 + A(r)^-1 dr^2 + B(r) (dtheta^2 + sin^2(theta) dphi^2)
//! ```
//!
//! with `A = 1 - 2M/r`, `B = r(r - alpha)` for the dilaton (GHS) family
//! (Schwarzschild is `alpha = 0`) and `A = 1 - 2m/r + e^2/r^2`, `B = r^2`
//! for Reissner-Nordstrom. Christoffel symbols and Riemann components are
//! provided both in closed form and by central finite differences of the
//! metric, so each can audit the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate indices, in the order (t, r, theta, phi).
pub const T: usize = 0;
pub const R: usize = 1;
pub const THETA: usize = 2;
pub const PHI: usize = 3;

/// Angles closer to the axis than this are rejected where cot(theta) appears.
pub const AXIS_TOL: f64 = 1e-12;

/// Which black-hole family a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacetimeFamily {
    Schwarzschild,
    #[serde(alias = "rn")]
    ReissnerNordstrom,
    #[serde(alias = "ghs")]
    StringyGhs,
}

/// Physical parameters of one spacetime, in geometric units (G = c = 1).
///
/// `alpha` is the charge-dilaton parameter `Q^2 exp(-2 Phi0) / (2M)`; it is
/// computed once at construction and stored, and the GHS family can also be
/// built directly from `(M, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetricParams")]
pub struct MetricParams {
    family: SpacetimeFamily,
    mass: f64,
    charge: f64,
    dilaton0: f64,
    alpha: f64,
}

/// Loose mirror of [`MetricParams`] used for deserialization and CLI input.
#[derive(Debug, Clone, Deserialize)]
pub struct RawMetricParams {
    pub family: SpacetimeFamily,
    pub mass: f64,
    #[serde(default)]
    pub charge: Option<f64>,
    #[serde(default)]
    pub dilaton0: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl TryFrom<RawMetricParams> for MetricParams {
    type Error = Error;

    fn try_from(raw: RawMetricParams) -> Result<Self> {
        match raw.family {
            SpacetimeFamily::Schwarzschild => {
                if raw.charge.is_some() || raw.dilaton0.is_some() || raw.alpha.is_some() {
                    return Err(Error::Config(
                        "schwarzschild takes only a mass parameter".into(),
                    ));
                }
                MetricParams::schwarzschild(raw.mass)
            }
            SpacetimeFamily::ReissnerNordstrom => {
                if raw.dilaton0.is_some() || raw.alpha.is_some() {
                    return Err(Error::Config(
                        "reissner_nordstrom takes mass and charge only".into(),
                    ));
                }
                MetricParams::reissner_nordstrom(raw.mass, raw.charge.unwrap_or(0.0))
            }
            SpacetimeFamily::StringyGhs => match (raw.alpha, raw.charge) {
                (Some(alpha), Some(charge)) => {
                    // Both present (e.g. re-reading an echoed parameter file):
                    // accept only if they agree.
                    let p = MetricParams::ghs(raw.mass, charge, raw.dilaton0.unwrap_or(0.0))?;
                    if (p.alpha - alpha).abs() > 1e-12 * alpha.abs().max(1.0) {
                        return Err(Error::Config(format!(
                            "alpha = {alpha} contradicts charge/dilaton0 (which give {})",
                            p.alpha
                        )));
                    }
                    Ok(p)
                }
                (Some(alpha), None) => {
                    if raw.dilaton0.is_some() {
                        return Err(Error::Config(
                            "dilaton0 has no effect when alpha is given directly".into(),
                        ));
                    }
                    MetricParams::ghs_from_alpha(raw.mass, alpha)
                }
                (None, charge) => {
                    MetricParams::ghs(raw.mass, charge.unwrap_or(0.0), raw.dilaton0.unwrap_or(0.0))
                }
            },
        }
    }
}

impl MetricParams {
    pub fn schwarzschild(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(Self {
            family: SpacetimeFamily::Schwarzschild,
            mass,
            charge: 0.0,
            dilaton0: 0.0,
            alpha: 0.0,
        })
    }

    pub fn reissner_nordstrom(mass: f64, charge: f64) -> Result<Self> {
        check_mass(mass)?;
        if !charge.is_finite() {
            return Err(Error::Config(format!(
                "charge must be finite, got {charge}"
            )));
        }
        Ok(Self {
            family: SpacetimeFamily::ReissnerNordstrom,
            mass,
            charge,
            dilaton0: 0.0,
            alpha: 0.0,
        })
    }

    /// GHS parameters from charge and asymptotic dilaton value;
    /// `alpha = Q^2 exp(-2 Phi0) / (2M)`.
    pub fn ghs(mass: f64, charge: f64, dilaton0: f64) -> Result<Self> {
        check_mass(mass)?;
        if !charge.is_finite() || !dilaton0.is_finite() {
            return Err(Error::Config("charge and dilaton0 must be finite".into()));
        }
        if mass == 0.0 {
            if charge != 0.0 {
                return Err(Error::Config(
                    "GHS with zero mass requires zero charge (alpha would diverge)".into(),
                ));
            }
            return Self::ghs_raw(mass, 0.0, 0.0, 0.0);
        }
        let alpha = charge * charge * (-2.0 * dilaton0).exp() / (2.0 * mass);
        Self::ghs_raw(mass, charge, dilaton0, alpha)
    }

    /// GHS parameters directly from `(M, alpha)`. The charge that would
    /// reproduce `alpha` at `Phi0 = 0` is stored for the parameter echo.
    pub fn ghs_from_alpha(mass: f64, alpha: f64) -> Result<Self> {
        check_mass(mass)?;
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Config(format!(
                "alpha must be a nonnegative real, got {alpha}"
            )));
        }
        Self::ghs_raw(mass, (2.0 * mass * alpha).sqrt(), 0.0, alpha)
    }

    fn ghs_raw(mass: f64, charge: f64, dilaton0: f64, alpha: f64) -> Result<Self> {
        if alpha != 0.0 && alpha >= 2.0 * mass {
            return Err(Error::Config(format!(
                "alpha must be < 2M for a nondegenerate exterior (alpha = {alpha}, 2M = {})",
                2.0 * mass
            )));
        }
        Ok(Self {
            family: SpacetimeFamily::StringyGhs,
            mass,
            charge,
            dilaton0,
            alpha,
        })
    }

    pub fn family(&self) -> SpacetimeFamily {
        self.family
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn dilaton0(&self) -> f64 {
        self.dilaton0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Outer horizon radius, if the parameters admit one.
    pub fn horizon_radius(&self) -> Option<f64> {
        match self.family {
            SpacetimeFamily::Schwarzschild | SpacetimeFamily::StringyGhs => {
                (self.mass > 0.0).then_some(2.0 * self.mass)
            }
            SpacetimeFamily::ReissnerNordstrom => {
                let disc = self.mass * self.mass - self.charge * self.charge;
                (self.mass > 0.0 && disc >= 0.0).then(|| self.mass + disc.sqrt())
            }
        }
    }

    /// Inner (Cauchy) horizon radius for Reissner-Nordstrom with |e| <= m.
    pub fn inner_horizon_radius(&self) -> Option<f64> {
        match self.family {
            SpacetimeFamily::ReissnerNordstrom => {
                let disc = self.mass * self.mass - self.charge * self.charge;
                (self.mass > 0.0 && disc >= 0.0 && self.charge != 0.0)
                    .then(|| self.mass - disc.sqrt())
            }
            _ => None,
        }
    }

    /// True when `r` lies outside both the outer horizon and `r = alpha`.
    pub fn is_exterior(&self, r: f64) -> bool {
        r > self.alpha && self.horizon_radius().map_or(r > 0.0, |rh| r > rh)
    }

    /// Lapse-like profile `A(r)` and its first two derivatives.
    pub(crate) fn profile_a(&self, r: f64) -> (f64, f64, f64) {
        match self.family {
            SpacetimeFamily::Schwarzschild | SpacetimeFamily::StringyGhs => {
                let m = self.mass;
                (1.0 - 2.0 * m / r, 2.0 * m / (r * r), -4.0 * m / (r * r * r))
            }
            SpacetimeFamily::ReissnerNordstrom => {
                let (m, e2) = (self.mass, self.charge * self.charge);
                let r2 = r * r;
                (
                    1.0 - 2.0 * m / r + e2 / r2,
                    2.0 * m / r2 - 2.0 * e2 / (r2 * r),
                    -4.0 * m / (r2 * r) + 6.0 * e2 / (r2 * r2),
                )
            }
        }
    }

    /// Sphere-area profile `B(r)` and its first two derivatives.
    pub(crate) fn profile_b(&self, r: f64) -> (f64, f64, f64) {
        match self.family {
            SpacetimeFamily::Schwarzschild | SpacetimeFamily::StringyGhs => {
                let a = self.alpha;
                (r * (r - a), 2.0 * r - a, 2.0)
            }
            SpacetimeFamily::ReissnerNordstrom => (r * r, 2.0 * r, 2.0),
        }
    }

    /// Domain check shared by the curvature operations.
    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("r must be positive, got {r}")));
        }
        if self.family == SpacetimeFamily::StringyGhs && r <= self.alpha {
            return Err(Error::Domain(format!(
                "r = {r} is inside the r = alpha singularity (alpha = {})",
                self.alpha
            )));
        }
        let (a, _, _) = self.profile_a(r);
        let near_horizon = [self.horizon_radius(), self.inner_horizon_radius()]
            .into_iter()
            .flatten()
            .any(|rh| (r - rh).abs() <= 1e-12 * rh.max(1.0));
        if a == 0.0 || near_horizon {
            return Err(Error::Domain(format!(
                "r = {r} sits on a horizon; the metric is degenerate there"
            )));
        }
        Ok(())
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !mass.is_finite() || mass < 0.0 {
        return Err(Error::Config(format!(
            "mass must be a nonnegative real, got {mass}"
        )));
    }
    Ok(())
}

/// A spacetime event in (t, r, theta, phi) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Self {
        Self { t, r, theta, phi }
    }

    /// A point on the equatorial plane at the given radius.
    pub fn equatorial(r: f64) -> Self {
        Self::new(0.0, r, std::f64::consts::FRAC_PI_2, 0.0)
    }
}

/// Diagonal metric components with signature (-, +, +, +).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricComponents {
    pub g_tt: f64,
    pub g_rr: f64,
    pub g_thth: f64,
    pub g_phph: f64,
}

impl MetricComponents {
    pub fn diagonal(&self) -> [f64; 4] {
        [self.g_tt, self.g_rr, self.g_thth, self.g_phph]
    }

    /// g_ab u^a w^b for the diagonal metric.
    pub fn dot(&self, u: &[f64; 4], w: &[f64; 4]) -> f64 {
        self.g_tt * u[T] * w[T]
            + self.g_rr * u[R] * w[R]
            + self.g_thth * u[THETA] * w[THETA]
            + self.g_phph * u[PHI] * w[PHI]
    }

    /// g_ab v^a v^b.
    pub fn norm_sq(&self, v: &[f64; 4]) -> f64 {
        self.dot(v, v)
    }
}

/// Metric components at a point.
pub fn metric_at(params: &MetricParams, point: &SpacetimePoint) -> Result<MetricComponents> {
    params.check_radius(point.r)?;
    let (a, _, _) = params.profile_a(point.r);
    let (b, _, _) = params.profile_b(point.r);
    let s = point.theta.sin();
    Ok(MetricComponents {
        g_tt: -a,
        g_rr: 1.0 / a,
        g_thth: b,
        g_phph: b * s * s,
    })
}

/// Dense table of Christoffel symbols of the second kind, indexed `[a][b][c]`
/// for Gamma^a_{bc}.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTable(pub [[[f64; 4]; 4]; 4]);

impl ChristoffelTable {
    pub fn zeros() -> Self {
        Self([[[0.0; 4]; 4]; 4])
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.0[a][b][c]
    }

    fn set_sym(&mut self, a: usize, b: usize, c: usize, value: f64) {
        self.0[a][b][c] = value;
        self.0[a][c][b] = value;
    }

    /// Largest entry-wise absolute difference from another table.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    worst = worst.max((self.0[a][b][c] - other.0[a][b][c]).abs());
                }
            }
        }
        worst
    }

    /// -Gamma^a_{bc} v^b v^c, the geodesic acceleration implied by the table.
    pub fn geodesic_acceleration(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut acc = [0.0; 4];
        for (a, out) in acc.iter_mut().enumerate() {
            let mut sum = 0.0;
            for b in 0..4 {
                for c in 0..4 {
                    sum += self.0[a][b][c] * v[b] * v[c];
                }
            }
            *out = -sum;
        }
        acc
    }
}

/// Dense table of Riemann components, indexed `[a][b][c][d]` for R^a_{bcd}
/// in the convention
///
/// ```text
/// R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
///           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTable(pub [[[[f64; 4]; 4]; 4]; 4]);

impl RiemannTable {
    pub fn zeros() -> Self {
        Self([[[[0.0; 4]; 4]; 4]; 4])
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.0[a][b][c][d]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        worst = worst.max((self.0[a][b][c][d] - other.0[a][b][c][d]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest relative deviation from `other` over entries whose reference
    /// magnitude exceeds `floor`.
    pub fn max_rel_dev(&self, other: &Self, floor: f64) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let reference = other.0[a][b][c][d];
                        if reference.abs() > floor {
                            worst =
                                worst.max((self.0[a][b][c][d] - reference).abs() / reference.abs());
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        worst = worst.max(self.0[a][b][c][d].abs());
                    }
                }
            }
        }
        worst
    }
}

fn check_off_axis(theta: f64) -> Result<()> {
    if theta.sin().abs() < AXIS_TOL {
        return Err(Error::Domain(format!(
            "theta = {theta} is on the axis; cot(theta) terms diverge"
        )));
    }
    Ok(())
}

/// Closed-form Christoffel symbols.
pub fn christoffel_analytic(
    params: &MetricParams,
    point: &SpacetimePoint,
) -> Result<ChristoffelTable> {
    params.check_radius(point.r)?;
    check_off_axis(point.theta)?;

    let (a, a1, _) = params.profile_a(point.r);
    let (b, b1, _) = params.profile_b(point.r);
    let (sin_th, cos_th) = point.theta.sin_cos();

    let mut table = ChristoffelTable::zeros();
    table.set_sym(T, T, R, a1 / (2.0 * a));
    table.0[R][T][T] = a * a1 / 2.0;
    table.0[R][R][R] = -a1 / (2.0 * a);
    table.0[R][THETA][THETA] = -a * b1 / 2.0;
    table.0[R][PHI][PHI] = -a * b1 * sin_th * sin_th / 2.0;
    table.set_sym(THETA, R, THETA, b1 / (2.0 * b));
    table.0[THETA][PHI][PHI] = -sin_th * cos_th;
    table.set_sym(PHI, R, PHI, b1 / (2.0 * b));
    table.set_sym(PHI, THETA, PHI, cos_th / sin_th);
    Ok(table)
}

/// Christoffel symbols from central finite differences of [`metric_at`],
/// via `Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)`.
pub fn christoffel_numeric(
    params: &MetricParams,
    point: &SpacetimePoint,
    step: f64,
) -> Result<ChristoffelTable> {
    if !(step > 0.0) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let center = metric_at(params, point)?.diagonal();

    // d_k g_ii, k in {r, theta}; t and phi derivatives vanish by staticity.
    let mut dg = [[0.0_f64; 4]; 4];
    for k in [R, THETA] {
        let mut plus = *point;
        let mut minus = *point;
        match k {
            R => {
                plus.r += step;
                minus.r -= step;
            }
            _ => {
                plus.theta += step;
                minus.theta -= step;
            }
        }
        let gp = metric_at(params, &plus).map_err(stencil_err)?.diagonal();
        let gm = metric_at(params, &minus).map_err(stencil_err)?.diagonal();
        for i in 0..4 {
            dg[k][i] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }

    let mut table = ChristoffelTable::zeros();
    for a in 0..4 {
        let ginv_aa = 1.0 / center[a];
        for b in 0..4 {
            for c in 0..4 {
                // Diagonal metric: g_dc != 0 only for d == c, etc.
                let term_b = if a == c { dg[b][a] } else { 0.0 };
                let term_c = if a == b { dg[c][a] } else { 0.0 };
                let term_d = if b == c { dg[a][b] } else { 0.0 };
                table.0[a][b][c] = 0.5 * ginv_aa * (term_b + term_c - term_d);
            }
        }
    }
    Ok(table)
}

fn stencil_err(e: Error) -> Error {
    Error::Domain(format!(
        "finite-difference stencil leaves the valid region: {e}"
    ))
}

// The six independent pair values R^a_{bab} listed as (a, b, value).
fn riemann_pairs(params: &MetricParams, r: f64, sin_th: f64) -> [(usize, usize, f64); 6] {
    let (a, a1, a2) = params.profile_a(r);
    let (b, b1, b2) = params.profile_b(r);
    let s2 = sin_th * sin_th;

    let p01 = a * a2 / 2.0;
    let p02 = a * a1 * b1 / (4.0 * b);
    let p12 = -a1 * b1 / 4.0 - a * b2 / 2.0 + a * b1 * b1 / (4.0 * b);
    let p23 = s2 * (1.0 - a * b1 * b1 / (4.0 * b));

    [
        (R, T, p01),
        (THETA, T, p02),
        (PHI, T, p02),
        (R, THETA, p12),
        (R, PHI, p12 * s2),
        (THETA, PHI, p23),
    ]
}

/// Closed-form Riemann components.
///
/// The six independent values R^a_{bab} are completed to the full table with
/// the pair-exchange identity R^b_{aba} = (g_aa / g_bb) R^a_{bab} and
/// antisymmetry in the last two indices.
pub fn riemann_analytic(params: &MetricParams, point: &SpacetimePoint) -> Result<RiemannTable> {
    params.check_radius(point.r)?;
    check_off_axis(point.theta)?;

    let g = metric_at(params, point)?.diagonal();
    let mut table = RiemannTable::zeros();
    for (a, b, value) in riemann_pairs(params, point.r, point.theta.sin()) {
        let partner = g[a] / g[b] * value;
        table.0[a][b][a][b] = value;
        table.0[a][b][b][a] = -value;
        table.0[b][a][b][a] = partner;
        table.0[b][a][a][b] = -partner;
    }
    Ok(table)
}

/// Riemann components from central finite differences of
/// [`christoffel_analytic`].
pub fn riemann_numeric(
    params: &MetricParams,
    point: &SpacetimePoint,
    step: f64,
) -> Result<RiemannTable> {
    if !(step > 0.0) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let gamma = christoffel_analytic(params, point)?;

    // d_k Gamma^a_{bc}, k in {r, theta}.
    let mut dgamma = [ChristoffelTable::zeros(), ChristoffelTable::zeros()];
    for (slot, k) in [R, THETA].into_iter().enumerate() {
        let mut plus = *point;
        let mut minus = *point;
        match k {
            R => {
                plus.r += step;
                minus.r -= step;
            }
            _ => {
                plus.theta += step;
                minus.theta -= step;
            }
        }
        let gp = christoffel_analytic(params, &plus).map_err(stencil_err)?;
        let gm = christoffel_analytic(params, &minus).map_err(stencil_err)?;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    dgamma[slot].0[a][b][c] = (gp.0[a][b][c] - gm.0[a][b][c]) / (2.0 * step);
                }
            }
        }
    }
    let partial = |k: usize, a: usize, b: usize, c: usize| -> f64 {
        match k {
            R => dgamma[0].0[a][b][c],
            THETA => dgamma[1].0[a][b][c],
            _ => 0.0,
        }
    };

    let mut table = RiemannTable::zeros();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut value = partial(c, a, d, b) - partial(d, a, c, b);
                    for e in 0..4 {
                        value += gamma.0[a][c][e] * gamma.0[e][d][b]
                            - gamma.0[a][d][e] * gamma.0[e][c][b];
                    }
                    table.0[a][b][c][d] = value;
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ghs(mass: f64, alpha: f64) -> MetricParams {
        MetricParams::ghs_from_alpha(mass, alpha).unwrap()
    }

    #[test]
    fn alpha_follows_charge_and_dilaton() {
        let p = MetricParams::ghs(2.0, 1.0, 0.3).unwrap();
        assert_relative_eq!(p.alpha(), (-0.6_f64).exp() / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn ghs_rejects_alpha_at_or_beyond_two_m() {
        assert!(MetricParams::ghs_from_alpha(1.0, 2.0).is_err());
        assert!(MetricParams::ghs_from_alpha(1.0, 2.5).is_err());
        assert!(MetricParams::ghs_from_alpha(1.0, 1.9999).is_ok());
    }

    #[test]
    fn metric_reduces_to_schwarzschild_at_zero_alpha() {
        let p = ghs(1.0, 0.0);
        let g = metric_at(&p, &SpacetimePoint::equatorial(4.0)).unwrap();
        assert_eq!(g.g_tt, -0.5);
        assert_eq!(g.g_rr, 2.0);
        assert_relative_eq!(g.g_thth, 16.0, max_relative = 1e-15);
        assert_relative_eq!(g.g_phph, 16.0, max_relative = 1e-15);
    }

    #[test]
    fn ghs_angular_component_carries_the_alpha_factor() {
        let p = ghs(1.0, 0.5);
        let g = metric_at(&p, &SpacetimePoint::equatorial(4.0)).unwrap();
        assert_relative_eq!(g.g_thth, 14.0, max_relative = 1e-15);
    }

    #[test]
    fn rn_lapse_matches_hand_arithmetic() {
        let p = MetricParams::reissner_nordstrom(1.0, 0.5).unwrap();
        let g = metric_at(&p, &SpacetimePoint::equatorial(2.0)).unwrap();
        assert_relative_eq!(g.g_tt, -0.0625, max_relative = 1e-14);
    }

    #[test]
    fn metric_rejects_horizon_and_alpha_and_nonpositive_radius() {
        let p = ghs(1.0, 0.5);
        assert!(metric_at(&p, &SpacetimePoint::equatorial(2.0)).is_err());
        assert!(metric_at(&p, &SpacetimePoint::equatorial(0.5)).is_err());
        assert!(metric_at(&p, &SpacetimePoint::equatorial(0.3)).is_err());
        assert!(metric_at(&p, &SpacetimePoint::equatorial(-1.0)).is_err());

        let rn = MetricParams::reissner_nordstrom(1.0, 0.5).unwrap();
        let rh = rn.horizon_radius().unwrap();
        assert!(metric_at(&rn, &SpacetimePoint::equatorial(rh)).is_err());
    }

    #[test]
    fn christoffel_r_tt_matches_hand_arithmetic() {
        let p = ghs(1.0, 0.0);
        let gamma = christoffel_analytic(&p, &SpacetimePoint::equatorial(3.0)).unwrap();
        assert_relative_eq!(gamma.get(R, T, T), 1.0 / 27.0, max_relative = 1e-14);
    }

    #[test]
    fn theta_and_phi_radial_symbols_coincide() {
        let p = ghs(1.3, 0.7);
        let point = SpacetimePoint::new(0.0, 4.2, 1.1, 0.4);
        let gamma = christoffel_analytic(&p, &point).unwrap();
        assert_eq!(gamma.get(THETA, R, THETA), gamma.get(PHI, R, PHI));
    }

    #[test]
    fn equatorial_plane_kills_the_sin_cos_symbol() {
        let p = ghs(1.0, 0.0);
        let gamma = christoffel_analytic(&p, &SpacetimePoint::equatorial(4.0)).unwrap();
        assert!(gamma.get(THETA, PHI, PHI).abs() < 1e-15);
    }

    // The appendix prints Gamma^0_10 with a minus sign, but both the t
    // geodesic equation and finite differences of the metric give +M/(r(r-2M)).
    #[test]
    fn t_christoffel_sign_agrees_with_finite_differences() {
        let p = MetricParams::schwarzschild(1.0).unwrap();
        let point = SpacetimePoint::equatorial(10.0);
        let analytic = christoffel_analytic(&p, &point).unwrap();
        let numeric = christoffel_numeric(&p, &point, 1e-5).unwrap();
        assert_relative_eq!(analytic.get(T, T, R), 0.0125, max_relative = 1e-14);
        assert_relative_eq!(numeric.get(T, T, R), 0.0125, max_relative = 1e-8);
    }

    #[test]
    fn numeric_christoffel_tracks_analytic() {
        let p = ghs(1.0, 0.3);
        let point = SpacetimePoint::new(0.0, 5.0, 1.2, 0.0);
        let analytic = christoffel_analytic(&p, &point).unwrap();
        let numeric = christoffel_numeric(&p, &point, 1e-5).unwrap();
        assert!(numeric.max_abs_diff(&analytic) < 1e-6);
    }

    #[test]
    fn numeric_christoffel_is_symmetric_by_construction() {
        let p = MetricParams::reissner_nordstrom(1.0, 0.8).unwrap();
        let point = SpacetimePoint::new(0.0, 6.0, 0.9, 0.0);
        let table = christoffel_numeric(&p, &point, 1e-5).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(table.get(a, b, c), table.get(a, c, b));
                }
            }
        }
    }

    #[test]
    fn stencil_leaving_the_domain_is_a_domain_error() {
        let p = ghs(1.0, 0.5);
        // r - 2*step dips below alpha
        let point = SpacetimePoint::equatorial(0.5 + 1e-6);
        assert!(matches!(
            christoffel_numeric(&p, &point, 1e-5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn riemann_r_trt_matches_hand_arithmetic() {
        let p = ghs(1.0, 0.0);
        let riem = riemann_analytic(&p, &SpacetimePoint::equatorial(3.0)).unwrap();
        assert_relative_eq!(riem.get(R, T, R, T), -2.0 / 81.0, max_relative = 1e-14);

        let schw = MetricParams::schwarzschild(1.0).unwrap();
        let riem4 = riemann_analytic(&schw, &SpacetimePoint::equatorial(4.0)).unwrap();
        assert_relative_eq!(riem4.get(R, T, R, T), -0.015625, max_relative = 1e-14);
    }

    #[test]
    fn the_two_transverse_t_components_coincide() {
        let p = ghs(1.0, 0.4);
        let riem = riemann_analytic(&p, &SpacetimePoint::equatorial(3.0)).unwrap();
        assert_eq!(riem.get(THETA, T, THETA, T), riem.get(PHI, T, PHI, T));
    }

    #[test]
    fn flat_space_curvature_vanishes() {
        let p = ghs(0.0, 0.0);
        let riem = riemann_analytic(&p, &SpacetimePoint::new(0.0, 1.7, 1.0, 0.0)).unwrap();
        assert_eq!(riem.max_abs(), 0.0);
    }

    #[test]
    fn riemann_is_antisymmetric_in_the_last_two_indices() {
        let p = ghs(1.0, 0.3);
        let point = SpacetimePoint::new(0.0, 5.0, 1.2, 0.0);
        for table in [
            riemann_analytic(&p, &point).unwrap(),
            riemann_numeric(&p, &point, 1e-4).unwrap(),
        ] {
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            assert_eq!(table.get(a, b, c, d), -table.get(a, b, d, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn numeric_riemann_tracks_analytic() {
        let p = ghs(1.0, 0.3);
        let point = SpacetimePoint::new(0.0, 5.0, 1.2, 0.0);
        let analytic = riemann_analytic(&p, &point).unwrap();
        let numeric = riemann_numeric(&p, &point, 1e-4).unwrap();
        assert!(numeric.max_rel_dev(&analytic, 1e-12) < 1e-5);
    }

    #[test]
    fn zero_alpha_and_zero_charge_reduce_to_schwarzschild_tables() {
        let schw = MetricParams::schwarzschild(1.0).unwrap();
        let ghs0 = ghs(1.0, 0.0);
        let rn0 = MetricParams::reissner_nordstrom(1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let point = SpacetimePoint::new(
                0.0,
                rng.gen_range(2.1..40.0),
                rng.gen_range(0.3..std::f64::consts::PI - 0.3),
                rng.gen_range(0.0..6.0),
            );
            let base_g = christoffel_analytic(&schw, &point).unwrap();
            let base_r = riemann_analytic(&schw, &point).unwrap();
            for p in [&ghs0, &rn0] {
                assert!(
                    christoffel_analytic(p, &point)
                        .unwrap()
                        .max_abs_diff(&base_g)
                        < 1e-12
                );
                assert!(riemann_analytic(p, &point).unwrap().max_abs_diff(&base_r) < 1e-12);
            }
        }
    }

    // The nine symbols (plus lower-index symmetry) are the only nonzero
    // entries; everything else must vanish in the finite-difference table.
    #[test]
    fn nonzero_christoffel_set_matches_the_closed_form_list() {
        let listed: &[(usize, usize, usize)] = &[
            (T, T, R),
            (R, T, T),
            (R, R, R),
            (R, THETA, THETA),
            (R, PHI, PHI),
            (THETA, R, THETA),
            (THETA, PHI, PHI),
            (PHI, R, PHI),
            (PHI, THETA, PHI),
        ];
        let is_listed = |a: usize, b: usize, c: usize| {
            listed
                .iter()
                .any(|&(x, y, z)| (a, b, c) == (x, y, z) || (a, b, c) == (x, z, y))
        };
        let p = ghs(1.0, 0.6);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let point = SpacetimePoint::new(
                0.0,
                rng.gen_range(2.2..50.0),
                rng.gen_range(0.3..std::f64::consts::PI - 0.3),
                rng.gen_range(0.0..6.0),
            );
            let numeric = christoffel_numeric(&p, &point, 1e-5).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        if !is_listed(a, b, c) {
                            assert!(
                                numeric.get(a, b, c).abs() < 1e-12,
                                "unexpected nonzero Gamma^{a}_{{{b}{c}}} at r = {}",
                                point.r
                            );
                        }
                    }
                }
            }
        }
    }

    // Richardson order estimate from successive-step value differences.
    #[test]
    fn finite_differences_converge_at_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let families = [
            MetricParams::schwarzschild(1.0).unwrap(),
            MetricParams::reissner_nordstrom(1.0, 0.6).unwrap(),
            ghs(1.0, 0.5),
        ];
        for p in &families {
            for _ in 0..5 {
                let point = SpacetimePoint::new(
                    0.0,
                    rng.gen_range(2.5..30.0),
                    rng.gen_range(0.4..std::f64::consts::PI - 0.4),
                    0.0,
                );
                let g3 = christoffel_numeric(p, &point, 1e-3).unwrap();
                let g4 = christoffel_numeric(p, &point, 1e-4).unwrap();
                let g5 = christoffel_numeric(p, &point, 1e-5).unwrap();
                let d34 = g3.max_abs_diff(&g4);
                let d45 = g4.max_abs_diff(&g5);
                let order = (d34 / d45).log10();
                assert!(
                    order >= 1.9,
                    "observed order {order:.3} at r = {} for {:?}",
                    point.r,
                    p.family()
                );
                let analytic = christoffel_analytic(p, &point).unwrap();
                assert!(g5.max_abs_diff(&analytic) < 1e-6);
            }
        }
    }

    #[test]
    fn axis_points_are_rejected_for_curvature_tables() {
        let p = ghs(1.0, 0.2);
        let on_axis = SpacetimePoint::new(0.0, 5.0, 0.0, 0.0);
        assert!(christoffel_analytic(&p, &on_axis).is_err());
        assert!(riemann_analytic(&p, &on_axis).is_err());
    }

    #[test]
    fn params_json_echoes_alpha() {
        let p = ghs(1.0, 0.5);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"alpha\""));
        assert!(json.contains("\"family\":\"stringy_ghs\""));
        let back: MetricParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back.alpha(), 0.5);
    }

    #[test]
    fn raw_params_reject_contradictory_alpha_and_charge() {
        let raw = r#"{"family":"ghs","mass":1.0,"alpha":0.5,"charge":0.3}"#;
        assert!(serde_json::from_str::<MetricParams>(raw).is_err());
        // A consistent echoed pair round-trips.
        let ok = r#"{"family":"ghs","mass":1.0,"alpha":0.5,"charge":1.0}"#;
        assert!(serde_json::from_str::<MetricParams>(ok).is_ok());
    }
}
