//! Circular photon orbits: closed-form radii against the numeric critical
//! points of V^2, with stability from the second derivative.
//!
//! For Reissner-Nordstrom the run prints both critical radii; the larger
//! one comes out as a maximum of V^2 (an unstable orbit), the smaller as a
//! minimum inside the horizon.

use bhgeo::potential::{
    circular_orbit_radii_closed_form, circular_orbit_radii_numeric, PotentialSpec,
};
use bhgeo::spacetime::MetricParams;

fn main() {
    println!("dilaton family, M = 1:");
    for alpha in [0.0, 0.1, 0.5, 0.9] {
        let params = MetricParams::ghs_from_alpha(1.0, alpha).unwrap();
        let closed = circular_orbit_radii_closed_form(&params).unwrap();
        let spec = PotentialSpec::null_ray(params, 1.0);
        let numeric = circular_orbit_radii_numeric(&spec, (alpha + 0.05, 50.0)).unwrap();
        println!(
            "  alpha = {alpha:<4} closed = [{:.6}, {:.6}]  numeric = {:.9} ({:?})",
            closed[0], closed[1], numeric[0].radius, numeric[0].stability
        );
    }

    println!("\nReissner-Nordstrom, m = 1:");
    for e in [0.0, 0.5, 3.0 * 2.0_f64.sqrt() / 4.0, 1.2] {
        let params = MetricParams::reissner_nordstrom(1.0, e).unwrap();
        let closed = circular_orbit_radii_closed_form(&params).unwrap();
        if closed.is_empty() {
            println!("  e = {e:.4}: no circular photon orbits (e/m > 3*sqrt(2)/4)");
            continue;
        }
        let spec = PotentialSpec::null_ray(params, 1.0);
        let numeric = circular_orbit_radii_numeric(&spec, (0.05, 50.0)).unwrap();
        print!(
            "  e = {e:.4}: closed = [{:.6}, {:.6}]",
            closed[0], closed[1]
        );
        for orbit in &numeric {
            print!(
                "  r = {:.6} ({:?}, exterior: {})",
                orbit.radius, orbit.stability, orbit.in_exterior
            );
        }
        println!();
    }
}
