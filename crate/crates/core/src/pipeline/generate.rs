use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use super::{Cr, PipelineError, RunSummary, Strategy};
use crate::compare::{check_comparable, differs_on_exe, mr_find_witnesses_exe, mt_goals_for, CompareError, Rtc};
use crate::exec::{coverage_matrix, Executable, Limits, TestCase, TestSuite};
use crate::history::VersionHistory;
use crate::minic::{render, SourceProgram};
use crate::reduce::{reduce, FastppConfig, Rs};
use crate::testgen::SearchConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub search: SearchConfig,
    pub fastpp_dim: usize,
    /// Also label the mutated line of the bugged version.
    pub label_mutation_site: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { search: SearchConfig::default(), fastpp_dim: 3, label_mutation_site: false }
    }
}

/// A faulty stand-in B_i for revision P_i.
#[derive(Debug, Clone)]
pub struct Bug {
    pub program: Arc<SourceProgram>,
    /// Mutant description, e.g. `ROR-le-eq @ 6:18 -> ==`.
    pub mutant: String,
    pub line: usize,
}

/// The previous revision's suite before and after reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Suites {
    pub full: TestSuite,
    pub reduced: TestSuite,
}

#[derive(Debug, Clone)]
pub struct RevisionRun {
    pub revision: usize,
    pub bug: Bug,
    /// Tests carried over from the previous revision.
    pub inherited: usize,
    pub new_tests: usize,
    /// Suite after generation, before reduction.
    pub pre_reduction: TestSuite,
    /// The suite the strategy delivers for this revision.
    pub suite: TestSuite,
    /// Lines labelled on the bugged version for the reduction goal set (MT only).
    pub label_lines: BTreeSet<usize>,
    pub detected: bool,
    pub gen_time: Duration,
    pub reduce_time: Duration,
    pub work: u64,
    /// Version pairs that contributed nothing, with the reason.
    pub skipped: Vec<String>,
}

impl RevisionRun {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            detected: self.detected,
            size: self.suite.len(),
            cpu: self.gen_time + self.reduce_time,
            work: self.work,
        }
    }

    /// Input for the next revision.
    pub fn carry(&self) -> Suites {
        Suites { full: self.pre_reduction.clone(), reduced: self.suite.clone() }
    }
}

/// 1 when some test in `t` makes the versions disagree.
pub fn detects(t: &TestSuite, fixed: &SourceProgram, bugged: &SourceProgram, function: &str) -> Result<bool, CompareError> {
    let a = Executable::new(fixed, function)?;
    let b = Executable::new(bugged, function)?;
    check_comparable(&a, &b)?;
    for test in &t.tests {
        if differs_on_exe(&a, &b, test, Limits::default())? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GenKey {
    bug: String,
    i: usize,
    j: usize,
    rtc: Rtc,
    nrt: usize,
}

#[derive(Debug)]
struct Generation {
    tests: Vec<TestCase>,
    work: u64,
    time: Duration,
    skip: Option<String>,
}

/// Suite generation over one history. Generated tests for a version pair
/// are cached, so strategies sharing a pair share the search; each
/// strategy is still charged the search's work and time.
pub struct Generator<'h> {
    pub history: &'h VersionHistory,
    pub function: String,
    pub cfg: PipelineConfig,
    cache: Mutex<HashMap<GenKey, Arc<Generation>>>,
}

impl<'h> Generator<'h> {
    pub fn new(history: &'h VersionHistory, function: impl Into<String>, cfg: PipelineConfig) -> Self {
        Generator { history, function: function.into(), cfg, cache: Mutex::new(HashMap::new()) }
    }

    /// Lines labelled on B_i when comparing against P_j.
    pub fn labels(&self, i: usize, j: usize, bug: &Bug) -> BTreeSet<usize> {
        let mut lines = self.history.lines_modified_since(i, j);
        if self.cfg.label_mutation_site {
            lines.insert(bug.line);
        }
        lines
    }

    /// Fills the cache for every pair and setting a strategy at revision
    /// `i` can ask for.
    pub fn prepare(&self, i: usize, bug: &Bug) -> Result<(), PipelineError> {
        for k in 0..3.min(i) {
            for rtc in [Rtc::Mt, Rtc::Mr] {
                for nrt in 1..=3 {
                    self.generation(i, i - 1 - k, rtc, nrt, bug)?;
                }
            }
        }
        Ok(())
    }

    fn generation(&self, i: usize, j: usize, rtc: Rtc, nrt: usize, bug: &Bug) -> Result<Arc<Generation>, PipelineError> {
        let key = GenKey { bug: render(&bug.program), i, j, rtc, nrt };
        if let Some(g) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(g.clone());
        }
        let start = Instant::now();
        let mut g = self.generate_pair(i, j, rtc, nrt, bug)?;
        g.time = start.elapsed();
        let mut cache = self.cache.lock().expect("cache lock");
        Ok(cache.entry(key).or_insert_with(|| Arc::new(g)).clone())
    }

    fn generate_pair(&self, i: usize, j: usize, rtc: Rtc, nrt: usize, bug: &Bug) -> Result<Generation, PipelineError> {
        let prefix = format!("r{i}p{j}");
        let skipped = |reason: &str| Generation {
            tests: Vec::new(),
            work: 0,
            time: Duration::ZERO,
            skip: Some(format!("r{i}-p{j}:{reason}")),
        };
        let rename = |t: TestCase| TestCase { id: format!("{prefix}{}", t.id), ..t };
        match rtc {
            Rtc::Mt => {
                let target = match mt_goals_for(&bug.program, &self.function, &self.labels(i, j, bug)) {
                    Ok(t) => t,
                    Err(CompareError::EmptyDiff) => return Ok(skipped("empty-diff")),
                    Err(e) => return Err(e.into()),
                };
                if target.labels.goals.is_empty() {
                    return Ok(skipped("no-labels"));
                }
                let targets: Vec<_> = target.labels.goals.iter().map(|g| g.target).collect();
                let batch = crate::testgen::find_n_tests_for(&target.exe, &targets, &self.cfg.search, nrt);
                Ok(Generation {
                    tests: batch.tests.into_iter().map(|g| rename(g.test)).collect(),
                    work: batch.work,
                    time: Duration::ZERO,
                    skip: None,
                })
            }
            Rtc::Mr => {
                // P_j is rebuilt from P_i through the inverse patches.
                let older_text = self.history.rewind(i, j)?;
                let older = crate::minic::parse_valid(&older_text).map_err(crate::exec::ExecError::Program)?;
                let newer = Executable::new(&bug.program, &self.function)?;
                let older = match Executable::new(&older, &self.function) {
                    Ok(e) => e,
                    Err(_) => return Ok(skipped("invalid-comparator")),
                };
                match mr_find_witnesses_exe(&newer, &older, &self.cfg.search, nrt) {
                    Ok(batch) => Ok(Generation {
                        tests: batch.witnesses.into_iter().map(|w| rename(w.test)).collect(),
                        work: batch.work,
                        time: Duration::ZERO,
                        skip: None,
                    }),
                    Err(CompareError::InvalidComparator { .. }) => Ok(skipped("invalid-comparator")),
                    Err(e) => Err(e.into()),
                }
            }
        }
    }

    /// One revision of suite generation: start from the previous suite as
    /// `cr` dictates, add up to `nrt` tests for each of the `npr` most
    /// recent version pairs, then reduce with `rs`.
    pub fn generate_suite(
        &self,
        s: &Strategy,
        i: usize,
        bug: &Bug,
        prev: &Suites,
        seed: u64,
    ) -> Result<RevisionRun, PipelineError> {
        assert!(i >= 1 && i <= self.history.len(), "revision {i} out of range");
        let exe = Executable::new(&bug.program, &self.function)?;
        let init = match s.cr {
            Cr::Cr => prev.reduced.tests.clone(),
            Cr::NoCr => prev.full.tests.clone(),
            Cr::None => Vec::new(),
        };
        let mut tests: Vec<TestCase> = init.into_iter().filter(|t| exe.accepts(t)).collect();
        let inherited = tests.len();
        let mut run = RevisionRun {
            revision: i,
            bug: bug.clone(),
            inherited,
            new_tests: 0,
            pre_reduction: TestSuite::default(),
            suite: TestSuite::default(),
            label_lines: BTreeSet::new(),
            detected: false,
            gen_time: Duration::ZERO,
            reduce_time: Duration::ZERO,
            work: 0,
            skipped: Vec::new(),
        };
        // Older versions than P_0 do not exist, so npr is capped at i.
        let pairs = s.npr.min(i);
        for k in 0..pairs {
            let g = self.generation(i, i - 1 - k, s.rtc, s.nrt, bug)?;
            run.gen_time += g.time;
            run.work += g.work;
            run.skipped.extend(g.skip.clone());
            for t in &g.tests {
                if !tests.iter().any(|u| u.same_inputs(t)) {
                    tests.push(t.clone());
                    run.new_tests += 1;
                }
            }
        }
        run.pre_reduction = TestSuite::new(tests);
        run.suite = if s.rs == Rs::None {
            run.pre_reduction.clone()
        } else {
            let start = Instant::now();
            let (goal_exe, goals) = match s.rtc {
                Rtc::Mt => {
                    run.label_lines = self.labels(i, i - pairs, bug);
                    let t = mt_goals_for(&bug.program, &self.function, &run.label_lines)?;
                    let root = t.exe.entry;
                    let mut goals = t.exe.cfa.branch_goals(root);
                    goals.extend(t.labels.goals);
                    (t.exe, goals)
                }
                Rtc::Mr => {
                    let goals = exe.cfa.branch_goals(exe.entry);
                    (exe.clone(), goals)
                }
            };
            let m = coverage_matrix(&goal_exe, &run.pre_reduction, &goals, self.cfg.search.limits)?;
            let fast = FastppConfig { seed, dim: self.cfg.fastpp_dim };
            let r = reduce(&m, s.rs, &run.pre_reduction.tests, &fast)?;
            run.reduce_time = start.elapsed();
            let by_id: HashMap<&str, &TestCase> = run.pre_reduction.tests.iter().map(|t| (t.id.as_str(), t)).collect();
            TestSuite::new(r.selected.iter().map(|id| by_id[id.as_str()].clone()).collect())
        };
        run.detected = detects(&run.suite, self.history.version(i), &bug.program, &self.function)?;
        Ok(run)
    }
}
