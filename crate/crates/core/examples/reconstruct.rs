// Recover point collinearity of O+(6,2) from the family of all base
// subsets, with no access to the geometry.

use polar_base::oracle::FrameFamily;
use polar_base::polar::{FormSpec, PolarSpace};
use polar_base::reconstruct::reconstruct_collinearity;

pub fn run_example() -> (usize, usize, bool) {
    let space = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
    let family = FrameFamily::full(&space).unwrap();
    let rep = reconstruct_collinearity(&family, 0).unwrap();
    println!(
        "{} frames, {} recovered edges, {} true edges, equal = {}",
        rep.frames, rep.recovered_edges, rep.truth_edges, rep.equal
    );
    (rep.recovered_edges, rep.truth_edges, rep.equal)
}

#[allow(dead_code)]
fn main() {
    run_example();
}
