// Build a finite polar space and check the polar space axioms.

use polar_base::polar::{FormSpec, PolarSpace};

pub fn run_example() -> Vec<(String, usize, bool)> {
    let mut out = Vec::new();
    for spec in [FormSpec::symplectic(3, 2), FormSpec::hyperbolic(3, 2)] {
        let space = PolarSpace::build(spec).expect("supported space");
        let report = space.verify_axioms(0);
        println!(
            "{spec}: {} points, {} lines, generators per ridge {:?}",
            space.point_count(),
            report.lines_checked,
            report.generators_per_ridge
        );
        out.push((spec.to_string(), space.point_count(), report.passed()));
    }
    out
}

#[allow(dead_code)]
fn main() {
    run_example();
}
