// Base subsets of every Grassmannian of O+(8,2), plus the two half-spin ones.

use polar_base::frames::{base_subset, base_subset_halfspin, find_frame};
use polar_base::grassmann::orbit_split;
use polar_base::model::Delta;
use polar_base::polar::{FormSpec, PolarSpace};

pub fn run_example() -> Vec<usize> {
    let space = PolarSpace::build(FormSpec::hyperbolic(4, 2)).unwrap();
    let f = find_frame(&space, Some(1));
    let mut sizes: Vec<usize> = (0..4)
        .map(|k| base_subset(&space, &f, k).unwrap().len())
        .collect();
    let split = orbit_split(&space).unwrap();
    for delta in [Delta::Plus, Delta::Minus] {
        sizes.push(
            base_subset_halfspin(&space, &split, &f, delta)
                .unwrap()
                .len(),
        );
    }
    println!("sizes at k = 0..3, then half-spin: {sizes:?}");
    sizes
}

#[allow(dead_code)]
fn main() {
    run_example();
}
