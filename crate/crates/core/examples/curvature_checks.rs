//! Audit the closed-form curvature tables against central finite
//! differences of the metric, including the observed convergence order.

use bhgeo::spacetime::{
    christoffel_analytic, christoffel_numeric, riemann_analytic, riemann_numeric, MetricParams,
    SpacetimePoint,
};

fn main() {
    let families = [
        ("schwarzschild", MetricParams::schwarzschild(1.0).unwrap()),
        (
            "rn e=0.6",
            MetricParams::reissner_nordstrom(1.0, 0.6).unwrap(),
        ),
        ("ghs a=0.5", MetricParams::ghs_from_alpha(1.0, 0.5).unwrap()),
    ];
    let point = SpacetimePoint::new(0.0, 5.0, 1.2, 0.0);

    for (name, params) in &families {
        let gamma = christoffel_analytic(params, &point).unwrap();
        let riemann = riemann_analytic(params, &point).unwrap();

        println!("{name} at r = {}, theta = {}:", point.r, point.theta);
        for step in [1e-3, 1e-4, 1e-5] {
            let dev = christoffel_numeric(params, &point, step)
                .unwrap()
                .max_abs_diff(&gamma);
            println!("  christoffel step {step:.0e}: max |numeric - analytic| = {dev:.3e}");
        }
        let g3 = christoffel_numeric(params, &point, 1e-3).unwrap();
        let g4 = christoffel_numeric(params, &point, 1e-4).unwrap();
        let g5 = christoffel_numeric(params, &point, 1e-5).unwrap();
        let order = (g3.max_abs_diff(&g4) / g4.max_abs_diff(&g5)).log10();
        println!("  observed convergence order: {order:.3}");

        let rel = riemann_numeric(params, &point, 1e-4)
            .unwrap()
            .max_rel_dev(&riemann, 1e-12);
        println!("  riemann step 1e-4: max relative deviation = {rel:.3e}\n");
    }
}
