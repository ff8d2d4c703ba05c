//! Batch verification runs: suites over a concrete space or a bare model,
//! summarized as `summary.json` plus one `<suite>.csv` per suite.

mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polar::{FormKind, FormSpec, PolarSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Sizes,
    Lemma21,
    Lemma22,
    Lemmanew,
    Lemma24,
    Lemma25,
    Props2x,
    Prop31,
    Lemma31,
    Oracle,
    Reconstruct,
    Maps,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Axioms,
        Suite::Sizes,
        Suite::Lemma21,
        Suite::Lemma22,
        Suite::Lemmanew,
        Suite::Lemma24,
        Suite::Lemma25,
        Suite::Props2x,
        Suite::Prop31,
        Suite::Lemma31,
        Suite::Oracle,
        Suite::Reconstruct,
        Suite::Maps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Sizes => "sizes",
            Suite::Lemma21 => "lemma21",
            Suite::Lemma22 => "lemma22",
            Suite::Lemmanew => "lemmanew",
            Suite::Lemma24 => "lemma24",
            Suite::Lemma25 => "lemma25",
            Suite::Props2x => "props2x",
            Suite::Prop31 => "prop31",
            Suite::Lemma31 => "lemma31",
            Suite::Oracle => "oracle",
            Suite::Reconstruct => "reconstruct",
            Suite::Maps => "maps",
        }
    }

    /// Suites that need a concrete polar space rather than the bare model.
    pub fn needs_space(self) -> bool {
        matches!(
            self,
            Suite::Axioms | Suite::Oracle | Suite::Reconstruct | Suite::Maps
        )
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse {
                what: "suite",
                detail: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Space(FormSpec),
    Model { kind: FormKind, n: usize },
}

impl Target {
    pub fn kind(&self) -> FormKind {
        match *self {
            Target::Space(s) => s.kind,
            Target::Model { kind, .. } => kind,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Target::Space(s) => s.n,
            Target::Model { n, .. } => n,
        }
    }

    fn label(&self) -> String {
        match *self {
            Target::Space(s) => s.to_string(),
            Target::Model { kind, n } => format!("model({},n={n})", kind.letter()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub target: Target,
    /// Levels to run; empty means every level the suite supports.
    pub levels: Vec<usize>,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Any budget switches exhaustive suites to their sampled variants.
    pub budget_secs: Option<u64>,
    /// Adds wall-clock runtimes to the summary (which then stops being reproducible).
    pub timings: bool,
}

impl RunConfig {
    pub fn new(target: Target, suites: Vec<Suite>) -> Self {
        RunConfig {
            target,
            levels: Vec::new(),
            suites,
            seed: 0,
            out: None,
            threads: None,
            budget_secs: None,
            timings: false,
        }
    }

    pub fn with_levels(mut self, levels: Vec<usize>) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, secs: u64) -> Self {
        self.budget_secs = Some(secs);
        self
    }

    pub fn with_out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = Some(out.into());
        self
    }

    /// Levels for `suite`, or a usage error naming the incompatibility.
    pub fn levels_for(&self, suite: Suite) -> Result<Vec<usize>> {
        let n = self.target.n();
        let kind = self.target.kind();
        let usage = |msg: String| Err(Error::Usage(format!("{suite}: {msg}")));
        if suite.needs_space() && !matches!(self.target, Target::Space(_)) {
            return usage("needs a concrete space (use `verify`)".into());
        }
        let supported: Vec<usize> = match suite {
            Suite::Axioms | Suite::Prop31 | Suite::Lemma31 => vec![],
            Suite::Lemma21 | Suite::Lemmanew => {
                if kind != FormKind::SymplecticC {
                    return usage("needs type C".into());
                }
                (1..n.saturating_sub(1)).collect()
            }
            Suite::Lemma24 | Suite::Lemma25 => (1..n.saturating_sub(1)).collect(),
            Suite::Lemma22 => vec![n - 1],
            _ => (0..n).collect(),
        };
        if matches!(suite, Suite::Prop31 | Suite::Lemma31)
            && (kind != FormKind::HyperbolicD || n < 4)
        {
            return usage("half-spin suites need type D with n >= 4".into());
        }
        if suite == Suite::Reconstruct {
            if let Target::Space(spec) = self.target {
                if crate::oracle::expected_frame_count(spec) > crate::oracle::FULL_FAMILY_LIMIT {
                    return usage(format!("{spec} is too large for a full frame family"));
                }
            }
        }
        if matches!(suite, Suite::Axioms | Suite::Prop31 | Suite::Lemma31) {
            return Ok(vec![]);
        }
        if self.levels.is_empty() {
            if supported.is_empty() {
                return usage(format!("no supported level for n = {n}"));
            }
            return Ok(supported);
        }
        for &k in &self.levels {
            if !supported.contains(&k) {
                return usage(format!("level {k} unsupported (supported: {supported:?})"));
            }
        }
        Ok(self.levels.clone())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.target.n();
        if !(3..=8).contains(&n) {
            return Err(Error::Usage(format!("rank {n} outside 3..=8")));
        }
        if self.suites.is_empty() {
            return Err(Error::Usage("no suite requested".into()));
        }
        for &s in &self.suites {
            self.levels_for(s)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRecord {
    pub suite: Suite,
    pub space: String,
    pub k: Option<usize>,
    /// `exhaustive`, or `sampled` with what was sampled
    pub mode: String,
    pub checked: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub records: Vec<SuiteRecord>,
    /// CSV text per suite name.
    pub csv: BTreeMap<String, String>,
    /// Extra JSON reports per file name.
    pub reports: BTreeMap<String, String>,
}

impl RunSummary {
    pub fn failures(&self) -> u64 {
        self.records.iter().map(|r| r.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize") + "\n"
    }

    /// Writes `summary.json`, the CSVs and extra reports into `dir`.
    pub fn write(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.json"), self.to_json())?;
        for (name, text) in &self.csv {
            std::fs::write(dir.join(format!("{name}.csv")), text)?;
        }
        for (name, text) in &self.reports {
            std::fs::write(dir.join(name), text)?;
        }
        Ok(())
    }
}

/// Output of one suite at one level.
pub(crate) struct Outcome {
    pub k: Option<usize>,
    pub mode: String,
    pub checked: u64,
    pub failures: u64,
    pub rows: Vec<String>,
}

impl Outcome {
    pub(crate) fn new(k: Option<usize>, sampled: Option<String>) -> Self {
        Outcome {
            k,
            mode: sampled.unwrap_or_else(|| "exhaustive".into()),
            checked: 0,
            failures: 0,
            rows: Vec::new(),
        }
    }

    pub(crate) fn check(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

pub(crate) struct Ctx {
    pub target: Target,
    pub space: Option<PolarSpace>,
    pub seed: u64,
    pub sampled: bool,
    pub reports: BTreeMap<String, String>,
}

impl Ctx {
    pub(crate) fn space(&self) -> &PolarSpace {
        self.space.as_ref().expect("validated: suite has a space")
    }

    /// Sample size: `full` normally, `reduced` under a budget.
    pub(crate) fn samples(&self, full: usize, reduced: usize) -> usize {
        if self.sampled {
            reduced
        } else {
            full
        }
    }
}

/// Runs the configured suites, writing outputs when `config.out` is set.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Usage(e.to_string()))?;
            pool.install(|| run_inner(config))
        }
        None => run_inner(config),
    }
}

fn run_inner(config: &RunConfig) -> Result<RunSummary> {
    let space = match config.target {
        Target::Space(spec) => Some(PolarSpace::build(spec)?),
        Target::Model { .. } => None,
    };
    let mut ctx = Ctx {
        target: config.target,
        space,
        seed: config.seed,
        sampled: config.budget_secs.is_some(),
        reports: BTreeMap::new(),
    };
    let mut summary = RunSummary::default();
    let mut suites = config.suites.clone();
    suites.dedup();
    for suite in suites {
        let levels = config.levels_for(suite)?;
        let start = Instant::now();
        let (header, outcomes) = suites::run_suite(&mut ctx, suite, &levels)?;
        let elapsed = config.timings.then(|| start.elapsed().as_millis() as u64);
        let mut csv = String::from(header);
        csv.push('\n');
        for o in outcomes {
            for row in &o.rows {
                csv.push_str(row);
                csv.push('\n');
            }
            summary.records.push(SuiteRecord {
                suite,
                space: config.target.label(),
                k: o.k,
                mode: o.mode,
                checked: o.checked,
                failures: o.failures,
                runtime_ms: elapsed,
            });
        }
        summary.csv.insert(suite.name().to_string(), csv);
    }
    summary.reports = std::mem::take(&mut ctx.reports);
    if let Some(dir) = &config.out {
        summary.write(dir)?;
    }
    Ok(summary)
}
