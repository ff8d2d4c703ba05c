// Run several suites in one go and write summary.json plus CSVs.

use polar_base::polar::FormKind;
use polar_base::runner::{run, RunConfig, Suite, Target};

pub fn run_example() -> u64 {
    let out = std::env::temp_dir().join("polar-base-batch");
    let config = RunConfig::new(
        Target::Model {
            kind: FormKind::SymplecticC,
            n: 4,
        },
        vec![
            Suite::Sizes,
            Suite::Lemma21,
            Suite::Lemmanew,
            Suite::Props2x,
        ],
    )
    .with_seed(1)
    .with_out(&out);
    let summary = run(&config).unwrap();
    print!("{}", summary.to_json());
    println!("written to {}", out.display());
    summary.failures()
}

#[allow(dead_code)]
fn main() {
    run_example();
}
