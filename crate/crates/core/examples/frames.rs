// Frames: a seeded random one, the full count in O+(6,2), and a frame
// through two given planes.

use polar_base::frames::{base_subset, common_frame, enumerate_frames, find_frame};
use polar_base::polar::{FormSpec, PolarSpace};

pub fn run_example() -> (usize, bool) {
    let space = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
    let f = find_frame(&space, Some(42));
    println!("{}", serde_json::to_string(&f.to_json(&space)).unwrap());
    let all = enumerate_frames(&space).len();
    println!("{all} frames in total");

    let planes = space.grassmannian(2).unwrap();
    let (s, u) = (planes[0].subspace(), planes[17].subspace());
    let g = common_frame(&space, s, u).unwrap();
    let bs = base_subset(&space, &g, 2).unwrap();
    (all, bs.contains(s) && bs.contains(u))
}

#[allow(dead_code)]
fn main() {
    run_example();
}
