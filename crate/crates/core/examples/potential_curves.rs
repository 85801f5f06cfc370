//! Sample the photon effective potential for all three families and write
//! one CSV per family, plus an SVG of the dilaton curve.

use bhgeo::output;
use bhgeo::potential::{potential_curve, PotentialSpec, Spacing};
use bhgeo::spacetime::MetricParams;

fn main() {
    let cases = [
        ("schwarzschild", MetricParams::schwarzschild(1.0).unwrap()),
        (
            "rn_e05",
            MetricParams::reissner_nordstrom(1.0, 0.5).unwrap(),
        ),
        ("ghs_a05", MetricParams::ghs_from_alpha(1.0, 0.5).unwrap()),
    ];

    for (name, params) in cases {
        let spec = PotentialSpec::null_ray(params, 1.0);
        let r_min = params.alpha() + 0.6;
        let curve = potential_curve(&spec, r_min, 20.0, 600, Spacing::Linear).unwrap();

        let peak = curve.iter().filter(|(r, _)| *r > 1.0).cloned().fold(
            (0.0, f64::NEG_INFINITY),
            |acc, p| if p.1 > acc.1 { p } else { acc },
        );
        println!(
            "{name}: outer peak near r = {:.4}, V^2 = {:.6}",
            peak.0, peak.1
        );

        let path = format!("potential_{name}.csv");
        let mut buf = Vec::new();
        output::write_csv(
            &mut buf,
            &["r", "V2"],
            curve.iter().map(|(r, v)| vec![*r, *v]),
        )
        .unwrap();
        std::fs::write(&path, buf).unwrap();
        println!("  wrote {path}");

        if name == "ghs_a05" {
            let svg = output::svg_line_plot(&curve, "photon effective potential", "r", "V^2");
            std::fs::write("potential_ghs_a05.svg", svg).unwrap();
            println!("  wrote potential_ghs_a05.svg");
        }
    }
}
