//! Integrate two null geodesics around a dilaton black hole: one riding
//! the (unstable) circular photon orbit for a full revolution, one falling
//! past the photon sphere, and write the sampled trajectories to CSV.

use bhgeo::geodesics::{
    circular_photon_state, integrate, launch_equatorial, ConservedCharges, IntegrationConfig,
    StopRule,
};
use bhgeo::output;
use bhgeo::potential::circular_orbit_radii_closed_form;
use bhgeo::spacetime::MetricParams;

fn write_trajectory(name: &str, traj: &bhgeo::geodesics::Trajectory) {
    let mut buf = Vec::new();
    output::write_csv(
        &mut buf,
        &[
            "tau", "t", "r", "theta", "phi", "tdot", "rdot", "thetadot", "phidot",
        ],
        traj.samples.iter().map(|s| {
            vec![
                s.tau, s.x.t, s.x.r, s.x.theta, s.x.phi, s.v[0], s.v[1], s.v[2], s.v[3],
            ]
        }),
    )
    .unwrap();
    std::fs::write(name, buf).unwrap();
    println!(
        "{name}: {} samples, stop = {:?}, charge drift = {:.2e}, constraint drift = {:.2e}",
        traj.samples.len(),
        traj.stop,
        traj.charge_drift,
        traj.constraint_drift
    );
}

fn main() {
    let params = MetricParams::ghs_from_alpha(1.0, 0.4).unwrap();
    let r_ph = circular_orbit_radii_closed_form(&params).unwrap()[0];
    println!("photon sphere at r = {r_ph:.9}");

    // One full revolution on the circular orbit.
    let circ = circular_photon_state(&params, r_ph, 1.0).unwrap();
    let tau_rev = 2.0 * std::f64::consts::PI / circ.v[3];
    let config = IntegrationConfig {
        stop: StopRule {
            max_tau: Some(tau_rev),
            ..Default::default()
        },
        ..Default::default()
    };
    let traj = integrate(&params, &circ, 0.0, &config).unwrap();
    let band = traj
        .samples
        .iter()
        .map(|s| (s.x.r - r_ph).abs())
        .fold(0.0_f64, f64::max);
    write_trajectory("trace_circular.csv", &traj);
    println!("  max |r - r_ph| over one revolution: {band:.2e}");

    // An infalling ray with slightly subcritical angular momentum.
    let charges = ConservedCharges {
        energy: 1.0,
        angular_momentum: 4.5,
        epsilon: 0.0,
    };
    let infall = launch_equatorial(&params, 20.0, &charges, -1.0).unwrap();
    let config = IntegrationConfig {
        stop: StopRule {
            max_tau: Some(200.0),
            ..Default::default()
        },
        ..Default::default()
    };
    let traj = integrate(&params, &infall, 0.0, &config).unwrap();
    write_trajectory("trace_infall.csv", &traj);
}
