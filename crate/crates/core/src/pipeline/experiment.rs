use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::{Bug, Generator, MetricsRecord, PipelineConfig, PipelineError, RevisionRun, Strategy, Suites};
use crate::compare::Rtc;
use crate::exec::{Executable, TestSuite};
use crate::history::VersionHistory;
use crate::mutate::{enumerate_mutants, pick_mutant, Mutant, MutateError};
use crate::reduce::{reduce, FastppConfig, Rs};
use crate::testgen::{cover_branches, InputDomain, SearchConfig};

/// How bugged revisions are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutantMode {
    /// One seeded mutant per revision.
    Seeded,
    /// Every mutant of every revision, each evaluated on top of the seeded chain.
    AllMutants,
}

impl fmt::Display for MutantMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutantMode::Seeded => "seeded",
            MutantMode::AllMutants => "all-mutants",
        })
    }
}

impl FromStr for MutantMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "seeded" => Ok(MutantMode::Seeded),
            "all-mutants" => Ok(MutantMode::AllMutants),
            _ => Err(format!("unknown mutant mode `{s}` (seeded, all-mutants)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub pipeline: PipelineConfig,
    pub seeds: Vec<u64>,
    pub mode: MutantMode,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pipeline: PipelineConfig {
                search: SearchConfig {
                    domain: InputDomain { scalar: (-4, 4), max_len: 3, element: (-4, 4) },
                    budget: 200_000,
                    ..SearchConfig::default()
                },
                ..PipelineConfig::default()
            },
            seeds: vec![0],
            mode: MutantMode::Seeded,
            jobs: 0,
        }
    }
}

/// A version history and the function under test.
#[derive(Debug, Clone)]
pub struct Subject {
    pub history: VersionHistory,
    pub function: String,
}

impl Subject {
    /// Tests the entry function of the first version.
    pub fn new(history: VersionHistory) -> Result<Subject, PipelineError> {
        if history.is_empty() {
            return Err(PipelineError::NoRevisions(history.name.clone()));
        }
        let function = history
            .version(0)
            .entry_function()
            .ok_or_else(|| PipelineError::NoRevisions(history.name.clone()))?
            .to_string();
        Ok(Subject { history, function })
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Subject, PipelineError> {
        Subject::new(VersionHistory::load(dir)?)
    }
}

/// Everything one strategy produced on one subject for one seed.
#[derive(Debug, Clone)]
pub struct CellRuns {
    pub subject: String,
    pub seed: u64,
    pub strategy: Strategy,
    /// Suite the chain started from.
    pub initial: Suites,
    /// The seeded chain, one run per revision that had a mutant.
    pub chain: Vec<RevisionRun>,
    /// Runs counted by the metrics: the chain, or every mutant in all-mutants mode.
    pub counted: Vec<RevisionRun>,
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub records: Vec<MetricsRecord>,
    pub cells: Vec<CellRuns>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the RNG stream for one cell, independent of scheduling.
pub fn cell_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED, |acc, &p| splitmix64(acc ^ p))
}

fn strategy_code(s: &Strategy) -> u64 {
    let rtc = match s.rtc {
        Rtc::Mt => 0,
        Rtc::Mr => 1,
    };
    let rs = Rs::ALL.iter().position(|r| *r == s.rs).unwrap_or(0) as u64;
    let cr = super::Cr::ALL.iter().position(|c| *c == s.cr).unwrap_or(0) as u64;
    rtc << 16 | (s.nrt as u64) << 12 | (s.npr as u64) << 8 | rs << 4 | cr
}

fn bug_of(m: Mutant) -> Bug {
    Bug { mutant: m.to_string(), line: m.line, program: Arc::new(m.program) }
}

/// Bugs for one subject and seed: the seeded pick per revision and, in
/// all-mutants mode, the whole enumeration.
struct Bugs {
    seeded: Vec<Option<Bug>>,
    all: Vec<Vec<Bug>>,
}

fn bugs_for(subject: &Subject, seed: u64, mode: MutantMode) -> Result<Bugs, PipelineError> {
    let k = subject.history.len();
    let mut seeded = vec![None];
    let mut all = vec![Vec::new()];
    for i in 1..=k {
        let p = subject.history.version(i);
        match pick_mutant(p, &subject.function, cell_seed(&[seed, i as u64])) {
            Ok(m) => seeded.push(Some(bug_of(m))),
            Err(MutateError::NoApplicableMutant(_)) => seeded.push(None),
            Err(e) => return Err(e.into()),
        }
        all.push(match mode {
            MutantMode::Seeded => Vec::new(),
            MutantMode::AllMutants => {
                enumerate_mutants(p, &subject.function)?.mutants.into_iter().map(bug_of).collect()
            }
        });
    }
    Ok(Bugs { seeded, all })
}

/// Runs every strategy over every subject, seed and revision, and
/// aggregates one metrics row per strategy. Rows are sorted by strategy.
pub fn run_experiment(
    subjects: &[Subject],
    strategies: &[Strategy],
    cfg: &ExperimentConfig,
) -> Result<Experiment, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        let mut cells = Vec::new();
        for subject in subjects {
            cells.extend(run_subject(subject, strategies, cfg)?);
        }
        let mut strategies: Vec<Strategy> = strategies.to_vec();
        strategies.sort();
        strategies.dedup();
        let records = strategies
            .iter()
            .map(|s| {
                let mine: Vec<&CellRuns> = cells.iter().filter(|c| c.strategy == *s).collect();
                let runs: Vec<_> = mine.iter().flat_map(|c| c.counted.iter().map(RevisionRun::summary)).collect();
                let skipped: BTreeSet<String> = mine.iter().flat_map(|c| c.skipped.iter().cloned()).collect();
                MetricsRecord::from_runs(*s, cfg.mode, &runs, skipped.into_iter().collect())
            })
            .collect();
        Ok(Experiment { records, cells })
    })
}

fn run_subject(
    subject: &Subject,
    strategies: &[Strategy],
    cfg: &ExperimentConfig,
) -> Result<Vec<CellRuns>, PipelineError> {
    let h = &subject.history;
    let k = h.len();
    let gen = Generator::new(h, subject.function.clone(), cfg.pipeline);
    let exe0 = Executable::new(h.version(0), &subject.function)?;
    let initial = cover_branches(&exe0, &exe0.cfa.branch_goals(exe0.entry), &cfg.pipeline.search);

    let bugs: Vec<Bugs> = cfg.seeds.iter().map(|&s| bugs_for(subject, s, cfg.mode)).collect::<Result<_, _>>()?;
    // Fill the generation cache up front so the strategy chains only read it.
    let mut pending: HashMap<(usize, String), &Bug> = HashMap::new();
    for b in &bugs {
        for i in 1..=k {
            for bug in b.seeded[i].iter().chain(&b.all[i]) {
                pending.entry((i, crate::minic::render(&bug.program))).or_insert(bug);
            }
        }
    }
    let mut pending: Vec<(usize, &Bug)> = pending.into_iter().map(|((i, _), b)| (i, b)).collect();
    pending.sort_by_key(|(i, b)| (*i, b.mutant.clone()));
    pending.par_iter().try_for_each(|(i, b)| gen.prepare(*i, b))?;

    let jobs: Vec<(usize, &Strategy)> =
        (0..cfg.seeds.len()).flat_map(|s| strategies.iter().map(move |st| (s, st))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(si, s)| {
            let seed = cfg.seeds[si];
            let reduced0 = if s.rs == Rs::None {
                initial.suite.clone()
            } else {
                let fast = FastppConfig { seed: cell_seed(&[seed, 0, strategy_code(s)]), dim: cfg.pipeline.fastpp_dim };
                match reduce(&initial.matrix, s.rs, &initial.suite.tests, &fast) {
                    Ok(r) => TestSuite::new(
                        r.selected.iter().filter_map(|id| initial.suite.get(id).cloned()).collect(),
                    ),
                    Err(_) => initial.suite.clone(),
                }
            };
            let start = Suites { full: initial.suite.clone(), reduced: reduced0 };
            let mut cell = CellRuns {
                subject: h.name.clone(),
                seed,
                strategy: *s,
                initial: start.clone(),
                chain: Vec::new(),
                counted: Vec::new(),
                skipped: Vec::new(),
            };
            let mut prev = start;
            for i in 1..=k {
                let Some(bug) = &bugs[si].seeded[i] else {
                    cell.skipped.push(format!("{}:r{i}:no-mutant", h.name));
                    continue;
                };
                let fseed = cell_seed(&[seed, i as u64, strategy_code(s)]);
                match gen.generate_suite(s, i, bug, &prev, fseed) {
                    Ok(run) => {
                        cell.skipped.extend(run.skipped.iter().map(|r| format!("{}:{r}", h.name)));
                        prev = run.carry();
                        if cfg.mode == MutantMode::Seeded {
                            cell.counted.push(run.clone());
                        }
                        cell.chain.push(run);
                    }
                    Err(e) => {
                        cell.skipped.push(format!("{}:r{i}:error:{e}", h.name));
                        continue;
                    }
                }
                if cfg.mode == MutantMode::AllMutants {
                    let base = cell.chain.len().checked_sub(2).map(|p| cell.chain[p].carry());
                    let base = base.unwrap_or_else(|| cell.initial.clone());
                    for m in &bugs[si].all[i] {
                        match gen.generate_suite(s, i, m, &base, fseed) {
                            Ok(run) => cell.counted.push(run),
                            Err(e) => cell.skipped.push(format!("{}:r{i}:error:{e}", h.name)),
                        }
                    }
                }
            }
            cell.skipped.sort();
            cell.skipped.dedup();
            cell
        })
        .collect();
    Ok(cells)
}
