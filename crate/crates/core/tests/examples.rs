//! Every example runs and shows what it claims.

mod polar_space {
    include!("../examples/polar_space.rs");
}
mod grassmannian {
    include!("../examples/grassmannian.rs");
}
mod frames {
    include!("../examples/frames.rs");
}
mod base_subsets {
    include!("../examples/base_subsets.rs");
}
mod apartment_model {
    include!("../examples/apartment_model.rs");
}
mod exactness_oracle {
    include!("../examples/exactness_oracle.rs");
}
mod reconstruct {
    include!("../examples/reconstruct.rs");
}
mod maps {
    include!("../examples/maps.rs");
}
mod batch_run {
    include!("../examples/batch_run.rs");
}

#[test]
fn polar_space_axioms_hold() {
    let out = polar_space::run_example();
    assert_eq!(out[0].1, 63);
    assert_eq!(out[1].1, 35);
    assert!(out.iter().all(|x| x.2));
}

#[test]
fn line_grassmannian() {
    assert_eq!(grassmannian::run_example(), (315, 2835, 6615));
}

#[test]
fn frames_example() {
    assert_eq!(frames::run_example(), (840, true));
}

#[test]
fn base_subset_sizes() {
    assert_eq!(base_subsets::run_example(), vec![8, 24, 32, 16, 8, 8]);
}

#[test]
fn apartment_model_example() {
    let (len, _, agree) = apartment_model::run_example();
    assert_eq!(len, 80);
    assert!(agree);
}

#[test]
fn exactness_by_search() {
    let out = exactness_oracle::run_example();
    assert_eq!((out[0].1, out[0].2), (1, true));
    assert_eq!((out[1].1 > 1, out[1].2), (true, false));
}

#[test]
fn reconstruction_example() {
    let (_, _, equal) = reconstruct::run_example();
    assert!(equal);
}

#[test]
fn maps_example() {
    assert!(maps::run_example().into_iter().all(|x| x));
}

#[test]
fn batch_run_example() {
    assert_eq!(batch_run::run_example(), 0);
}
