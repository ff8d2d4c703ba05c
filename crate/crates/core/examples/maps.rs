// Random isometries of O+(8,2) permute base subsets and either fix or swap
// the two classes of generators.

use polar_base::maps::{verify_base_preserving_map, FormMap};
use polar_base::polar::{FormSpec, PolarSpace};

pub fn run_example() -> Vec<bool> {
    let space = PolarSpace::build(FormSpec::hyperbolic(4, 2)).unwrap();
    (0..4)
        .map(|seed| {
            let map = FormMap::random(&space, seed, 3 + seed as usize);
            let rep = verify_base_preserving_map(&space, 1, &map, 3, seed).unwrap();
            println!(
                "map {seed}: generator classes {:?}, passed = {}",
                rep.orbit_action,
                rep.passed()
            );
            rep.passed()
        })
        .collect()
}

#[allow(dead_code)]
fn main() {
    run_example();
}
