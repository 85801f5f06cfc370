#![allow(clippy::needless_range_loop)]

//! Acceptance suite. Every test prints one pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see them all.

use bhgeo::deviation::{self, DeviationState, ProbeConfig, RadialClosedForm, SingularityTarget};
use bhgeo::geodesics::{self, ConservedCharges, IntegrationConfig, StopReason, StopRule};
use bhgeo::potential::{self, PotentialSpec, Spacing, Stability};
use bhgeo::roots;
use bhgeo::spacetime::{
    christoffel_analytic, christoffel_numeric, riemann_analytic, riemann_numeric, MetricParams,
    SpacetimePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} {name} failed: {detail}");
}

fn random_exterior_point(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> SpacetimePoint {
    SpacetimePoint::new(
        0.0,
        rng.gen_range(r_lo..r_hi),
        rng.gen_range(std::f64::consts::FRAC_PI_4..3.0 * std::f64::consts::FRAC_PI_4),
        rng.gen_range(0.0..6.0),
    )
}

#[test]
fn acceptance_01_schwarzschild_photon_sphere() {
    let params = MetricParams::schwarzschild(1.0).unwrap();
    let closed = potential::circular_orbit_radii_closed_form(&params).unwrap();
    let spec = PotentialSpec::null_ray(params, 1.0);
    let orbits = potential::circular_orbit_radii_numeric(&spec, (2.2, 50.0)).unwrap();
    let exact = closed[0] == 3.0;
    let delta = (orbits[0].radius - 3.0).abs();
    let pass =
        exact && orbits.len() == 1 && delta < 1e-9 && orbits[0].stability == Stability::Unstable;
    report(
        1,
        "schwarzschild photon sphere at r = 3M, unstable",
        pass,
        &format!("closed = {}, |numeric - 3| = {delta:.2e}", closed[0]),
    );
}

#[test]
fn acceptance_02_ghs_photon_sphere_family() {
    let mut prev = 3.0;
    let mut worst_rel = 0.0_f64;
    let mut all_unstable = true;
    let mut decreasing = true;
    for alpha in [0.1, 0.5, 0.9] {
        let params = MetricParams::ghs_from_alpha(1.0, alpha).unwrap();
        let closed = potential::circular_orbit_radii_closed_form(&params).unwrap()[0];
        let spec = PotentialSpec::null_ray(params, 1.0);
        let orbits = potential::circular_orbit_radii_numeric(&spec, (alpha + 0.05, 50.0)).unwrap();
        assert_eq!(orbits.len(), 1, "expected exactly one exterior root");
        worst_rel = worst_rel.max((orbits[0].radius - closed).abs() / closed);
        all_unstable &= orbits[0].stability == Stability::Unstable;
        decreasing &= closed < prev;
        prev = closed;
    }
    let pass = worst_rel < 1e-9 && all_unstable && decreasing;
    report(
        2,
        "dilaton photon sphere: closed form = numeric, unstable, below 3M and shrinking",
        pass,
        &format!("max rel |closed - numeric| = {worst_rel:.2e}"),
    );
}

#[test]
fn acceptance_03_rn_degenerate_radius_boundary() {
    let m = 1.0;
    let disc = |e: f64| {
        potential::photon_orbit_discriminant(&MetricParams::reissner_nordstrom(m, e).unwrap())
            .unwrap()
    };
    let e_star = roots::bisect(disc, 0.9, 1.2, 1e-12).unwrap();
    let expected = 3.0 * 2.0_f64.sqrt() / 4.0;
    let e_err = (e_star - expected).abs();

    // Degenerate radius from the mean of the two roots just below the
    // boundary (independent of the vanishing discriminant).
    let e_below = e_star - 1e-11;
    let radii = potential::circular_orbit_radii_closed_form(
        &MetricParams::reissner_nordstrom(m, e_below).unwrap(),
    )
    .unwrap();
    let r_boundary = 0.5 * (radii[0] + radii[1]);
    let r_err = (r_boundary - 1.5).abs();

    let pass = e_err < 1e-10 && r_err < 1e-8;
    report(
        3,
        "RN double-root boundary at e = 3*sqrt(2)/4 m with r = 3m/2",
        pass,
        &format!("|e - 3sqrt2/4| = {e_err:.2e}, |r - 1.5| = {r_err:.2e}"),
    );
}

#[test]
fn acceptance_04_rn_stability_audit_flag() {
    // The audit must come out of the verify command itself.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_bhgeo"))
        .args(["verify", "--out"])
        .arg(&out)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    let report_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let audit = &report_json["rn_audit"];
    let flag = audit["rn_stability_discrepancy"].as_bool().unwrap_or(false);
    let second = audit["second_derivative"].as_f64().unwrap_or(f64::NAN);
    let pass = status.success() && flag && second < 0.0;
    report(
        4,
        "verify flags the RN larger root as a maximum (unstable)",
        pass,
        &format!("flag = {flag}, d2(V2)/dr2 = {second:.4e}"),
    );
}

#[test]
fn acceptance_05_curvature_cross_check() {
    let families = [
        MetricParams::schwarzschild(1.0).unwrap(),
        MetricParams::reissner_nordstrom(1.0, 0.6).unwrap(),
        MetricParams::ghs_from_alpha(1.0, 0.5).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_gamma = 0.0_f64;
    let mut worst_riemann = 0.0_f64;
    for params in &families {
        for _ in 0..20 {
            let point = random_exterior_point(&mut rng, 2.2, 50.0);
            let gamma_a = christoffel_analytic(params, &point).unwrap();
            let gamma_n = christoffel_numeric(params, &point, 1e-5).unwrap();
            worst_gamma = worst_gamma.max(gamma_n.max_abs_diff(&gamma_a));
            let riemann_a = riemann_analytic(params, &point).unwrap();
            let riemann_n = riemann_numeric(params, &point, 1e-4).unwrap();
            worst_riemann = worst_riemann.max(riemann_n.max_rel_dev(&riemann_a, 1e-12));
        }
    }
    let pass = worst_gamma < 1e-6 && worst_riemann < 1e-5;
    report(
        5,
        "finite differences reproduce the curvature tables",
        pass,
        &format!("max |dGamma| = {worst_gamma:.2e}, max rel dRiemann = {worst_riemann:.2e}"),
    );
}

#[test]
fn acceptance_06_tidal_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_diag = 0.0_f64;
    let mut worst_off = 0.0_f64;
    for _ in 0..100 {
        let alpha = rng.gen_range(0.0..0.9);
        let params = MetricParams::ghs_from_alpha(1.0, alpha).unwrap();
        let point = random_exterior_point(&mut rng, 2.2, 60.0);
        let frame = deviation::pt_frame_static(&params, &point).unwrap();
        let k = deviation::tidal_from_riemann(&params, &point, &frame).unwrap();
        let c = deviation::tidal_coefficients(&params, point.r).unwrap();
        let expected = [c.radial, c.transverse, c.transverse];
        for i in 0..3 {
            worst_diag = worst_diag.max((k[i][i] - expected[i]).abs() / expected[i].abs());
            for j in 0..3 {
                if i != j {
                    worst_off = worst_off.max(k[i][j].abs());
                }
            }
        }
    }
    let pass = worst_diag < 1e-10 && worst_off < 1e-12;
    report(
        6,
        "projected Riemann diagonal equals the tidal couplings",
        pass,
        &format!("max rel diag = {worst_diag:.2e}, max |offdiag| = {worst_off:.2e}"),
    );
}

#[test]
fn acceptance_07_conservation_along_trajectories() {
    // Circular photon orbit for one full revolution.
    let schw = MetricParams::schwarzschild(1.0).unwrap();
    let circ0 = geodesics::circular_photon_state(&schw, 3.0, 1.0).unwrap();
    let tau_rev = 2.0 * std::f64::consts::PI / circ0.v[3];
    let config = IntegrationConfig {
        stop: StopRule {
            max_tau: Some(tau_rev),
            ..Default::default()
        },
        ..Default::default()
    };
    let circ = geodesics::integrate(&schw, &circ0, 0.0, &config).unwrap();
    let band = circ
        .samples
        .iter()
        .map(|s| (s.x.r - 3.0).abs())
        .fold(0.0_f64, f64::max);

    // Marginally bound radial infall, 10M down to 3M. (Constraint
    // evaluation is cancellation-limited close to the horizon where
    // tdot blows up, so the infall stops at the photon-sphere radius.)
    let ghs = MetricParams::ghs_from_alpha(1.0, 0.5).unwrap();
    let charges = ConservedCharges {
        energy: 1.0,
        angular_momentum: 0.0,
        epsilon: -1.0,
    };
    let infall0 = geodesics::launch_equatorial(&ghs, 10.0, &charges, -1.0).unwrap();
    let config = IntegrationConfig {
        stop: StopRule {
            r_floor: Some(3.0),
            ..Default::default()
        },
        ..Default::default()
    };
    let infall = geodesics::integrate(&ghs, &infall0, -1.0, &config).unwrap();

    let charge_drift = circ.charge_drift.max(infall.charge_drift);
    let constraint_drift = circ.constraint_drift.max(infall.constraint_drift);
    let lock = circ
        .samples
        .iter()
        .chain(infall.samples.iter())
        .map(|s| (s.x.theta - std::f64::consts::FRAC_PI_2).abs())
        .fold(0.0_f64, f64::max);

    let pass = charge_drift < 1e-8
        && constraint_drift < 1e-9
        && lock < 1e-10
        && band < 1e-6
        && infall.stop == StopReason::RFloor;
    report(
        7,
        "charges, constraint, and equatorial plane are conserved",
        pass,
        &format!(
            "charge drift = {charge_drift:.2e}, constraint drift = {constraint_drift:.2e}, \
             theta lock = {lock:.2e}, photon-sphere band = {band:.2e}"
        ),
    );
}

#[test]
fn acceptance_08_radial_deviation_closed_form() {
    let cf = RadialClosedForm::new(1.0, 1.0);
    let mut worst_res = 0.0_f64;
    for i in 0..1000 {
        let r = 0.1 + 9.9 * i as f64 / 999.0;
        worst_res = worst_res.max(deviation::radial_ode_residual_corrected(&cf, r).abs());
    }

    let params = MetricParams::ghs_from_alpha(1.0, 0.0).unwrap();
    let initial = DeviationState::new(10.0, [cf.eval(10.0), 0.0, 0.0], [cf.deriv(10.0), 0.0, 0.0]);
    let run = deviation::integrate_deviation(&params, &initial, 0.1, &IntegrationConfig::default())
        .unwrap();
    let mut worst_track = 0.0_f64;
    for s in &run.samples {
        let expected = cf.eval(s.r);
        worst_track = worst_track.max((s.eta[0] - expected).abs() / expected.abs());
    }

    let pass = worst_res < 1e-12 && worst_track < 1e-8 && run.stop == StopReason::MaxTau;
    report(
        8,
        "radial deviation: exact solution satisfied and tracked to r = 0.1",
        pass,
        &format!("ODE residual = {worst_res:.2e}, tracking error = {worst_track:.2e}"),
    );
}

#[test]
fn acceptance_09_damping_coefficient_discrepancy() {
    let cf = RadialClosedForm::new(1.0, 1.0);
    let corrected = deviation::radial_ode_residual_corrected(&cf, 1.0).abs();
    let variant = deviation::radial_ode_residual_alt_damping(&cf, 1.0).abs();
    let pass = variant > 1e-3 && corrected < 1e-12;
    report(
        9,
        "the -1/r damping variant is inconsistent with the exact solution",
        pass,
        &format!("variant residual = {variant:.3}, corrected residual = {corrected:.2e}"),
    );
}

#[test]
fn acceptance_10_singularity_probes() {
    let ghs = MetricParams::ghs_from_alpha(1.0, 0.5).unwrap();
    let at_alpha =
        deviation::singularity_probe(&ghs, SingularityTarget::RAlpha, &ProbeConfig::default())
            .unwrap();
    let schw = MetricParams::ghs_from_alpha(1.0, 0.0).unwrap();
    let at_zero =
        deviation::singularity_probe(&schw, SingularityTarget::RZero, &ProbeConfig::default())
            .unwrap();

    let theta_dev = (at_alpha.theta.exponent - 1.0).abs();
    let phi_dev = (at_alpha.phi.exponent - 1.0).abs();
    let radial_dev = (at_zero.radial.exponent + 0.5).abs();
    let pass = theta_dev < 0.05
        && phi_dev < 0.05
        && at_alpha.volume_vanishes
        && at_alpha.radial_finite
        && radial_dev < 0.05
        && at_zero.volume_vanishes;
    report(
        10,
        "transverse exponent 1 at r = alpha; radial exponent -1/2 at r = 0",
        pass,
        &format!(
            "theta = {:.4}, phi = {:.4} at alpha; radial = {:.4} at zero",
            at_alpha.theta.exponent, at_alpha.phi.exponent, at_zero.radial.exponent
        ),
    );
}

#[test]
fn acceptance_11_horizon_tidal_scaling() {
    let mut worst = 0.0_f64;
    for mass in [0.5, 1.0, 2.0, 10.0] {
        let params = MetricParams::ghs_from_alpha(mass, 0.0).unwrap();
        let c = deviation::tidal_coefficients(&params, 2.0 * mass).unwrap();
        let expected = 1.0 / (4.0 * mass * mass);
        worst = worst.max((c.radial - expected).abs() / expected);
    }
    let pass = worst < 1e-14;
    report(
        11,
        "radial tidal coupling at the horizon radius scales as 1/(4M^2)",
        pass,
        &format!("max rel deviation = {worst:.2e}"),
    );
}

#[test]
fn acceptance_12_small_alpha_curves_coincide() {
    let schw = PotentialSpec::null_ray(MetricParams::schwarzschild(1.0).unwrap(), 1.0);
    let ghs = PotentialSpec::null_ray(MetricParams::ghs_from_alpha(1.0, 1e-6).unwrap(), 1.0);
    let a = potential::potential_curve(&schw, 2.2, 20.0, 400, Spacing::Linear).unwrap();
    let b = potential::potential_curve(&ghs, 2.2, 20.0, 400, Spacing::Linear).unwrap();
    let worst = a
        .iter()
        .zip(&b)
        .map(|((_, va), (_, vb))| (va - vb).abs())
        .fold(0.0_f64, f64::max);
    let pass = worst < 1e-5;
    report(
        12,
        "alpha = 1e-6 potential curve is pointwise on the Schwarzschild curve",
        pass,
        &format!("max pointwise difference = {worst:.2e}"),
    );
}
