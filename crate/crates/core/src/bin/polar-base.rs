use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polar_base::frames::{enumerate_frames, find_frame};
use polar_base::oracle::{expected_frame_count, FULL_FAMILY_LIMIT};
use polar_base::polar::{FormKind, FormSpec, PolarSpace};
use polar_base::runner::{run, RunConfig, Suite, Target};
use polar_base::Error;

#[derive(Parser)]
#[command(
    name = "polar-base",
    version,
    about = "Polar Grassmannians, frames and base subsets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites against a concrete polar space.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Suites on the combinatorial model only.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    Frames {
        #[command(subcommand)]
        command: FramesCommand,
    },
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Recover Grassmann collinearity from the full family of base subsets.
    Reconstruct {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    Verify {
        #[arg(long)]
        kind: FormKind,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand)]
enum FramesCommand {
    /// Every frame, as a JSON array.
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random frames, as a JSON array.
    Sample {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Model exactness against the frame search.
    Exactness {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    kind: FormKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: u32,
}

impl SpaceArgs {
    fn spec(&self) -> FormSpec {
        FormSpec {
            kind: self.kind,
            n: self.n,
            p: self.p,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Levels (repeat or comma-separate); default: all supported.
    #[arg(long = "k", value_delimiter = ',')]
    levels: Vec<usize>,
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<Suite>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    budget_secs: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record runtimes in summary.json.
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn config(self, target: Target, default_suites: &[Suite]) -> RunConfig {
        let suites = if self.suites.is_empty() {
            default_suites.to_vec()
        } else {
            self.suites
        };
        RunConfig {
            target,
            levels: self.levels,
            suites,
            seed: self.seed,
            out: self.out,
            threads: self.threads,
            budget_secs: self.budget_secs,
            timings: self.timings,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_)
                | Error::Parse { .. }
                | Error::Unsupported(_)
                | Error::UnsupportedField(_)
                | Error::LevelOutOfRange { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> polar_base::Result<ExitCode> {
    let config = match command {
        Command::Verify { space, run } => {
            run.config(Target::Space(space.spec()), &[Suite::Axioms, Suite::Sizes])
        }
        Command::Model {
            command: ModelCommand::Verify { kind, n, run },
        } => run.config(Target::Model { kind, n }, &[Suite::Sizes]),
        Command::Oracle {
            command: OracleCommand::Exactness { space, mut run },
        } => {
            run.suites = vec![Suite::Oracle];
            run.config(Target::Space(space.spec()), &[])
        }
        Command::Reconstruct { space, mut run } => {
            run.suites = vec![Suite::Reconstruct];
            run.config(Target::Space(space.spec()), &[])
        }
        Command::Frames { command } => return frames(command),
    };
    let summary = run(&config)?;
    print!("{}", summary.to_json());
    Ok(if summary.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn frames(command: FramesCommand) -> polar_base::Result<ExitCode> {
    let (space_args, out) = match &command {
        FramesCommand::Enumerate { space, out } | FramesCommand::Sample { space, out, .. } => {
            (space, out.clone())
        }
    };
    let space = PolarSpace::build(space_args.spec())?;
    let frames = match command {
        FramesCommand::Enumerate { .. } => {
            let expected = expected_frame_count(space.spec());
            if expected > FULL_FAMILY_LIMIT {
                return Err(Error::Usage(format!(
                    "{} has {expected} frames; use `frames sample`",
                    space.spec()
                )));
            }
            enumerate_frames(&space)
        }
        FramesCommand::Sample { count, seed, .. } => (0..count)
            .map(|t| find_frame(&space, Some(seed.wrapping_add(t))))
            .collect(),
    };
    let json: Vec<_> = frames.iter().map(|f| f.to_json(&space)).collect();
    let text = serde_json::to_string_pretty(&json).expect("frames serialize") + "\n";
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
