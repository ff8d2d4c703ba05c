// Collinearity and weak adjacency on the line Grassmannian of Sp(6,2).

use polar_base::grassmann::GrassmannSpace;
use polar_base::polar::{FormSpec, PolarSpace};

pub fn run_example() -> (usize, usize, usize) {
    let space = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
    let g = GrassmannSpace::new(&space, 1).unwrap();
    let (lines, collinear, weak) = (
        g.len(),
        g.collinearity().edge_count(),
        g.weak_adjacency().edge_count(),
    );
    println!("{lines} lines, {collinear} collinear pairs, {weak} weak-adjacent pairs");
    (lines, collinear, weak)
}

#[allow(dead_code)]
fn main() {
    run_example();
}
