// Exactness by frame search: a set is exact when exactly one frame's base
// subset contains it.

use polar_base::frames::{base_subset, find_frame};
use polar_base::model::{ApartmentModel, Sign};
use polar_base::oracle::frames_containing;
use polar_base::polar::{FormSpec, PolarSpace};

pub fn run_example() -> Vec<(String, usize, bool)> {
    let space = PolarSpace::build(FormSpec::symplectic(3, 3)).unwrap();
    let f = find_frame(&space, Some(5));
    let bs = base_subset(&space, &f, 1).unwrap();
    let model = ApartmentModel::grassmann(3, 1, space.kind()).unwrap();
    let mut out = Vec::new();
    for (label, set) in [
        ("everything".to_string(), model.full()),
        ("B(-0)".to_string(), model.select(&[Sign::Minus(0)])),
    ] {
        let r: Vec<_> = set.ones().map(|i| bs.members()[i].clone()).collect();
        let found = frames_containing(&space, &r, 2).unwrap().len();
        println!(
            "{label}: {found} frame(s), model says exact = {}",
            model.is_exact(&set)
        );
        out.push((label, found, model.is_exact(&set)));
    }
    out
}

#[allow(dead_code)]
fn main() {
    run_example();
}
