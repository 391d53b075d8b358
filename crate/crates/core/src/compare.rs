//! Regression targets for a version pair: label goals on modified lines
//! (modification-traversing) or inputs on which the two versions disagree
//! (modification-revealing).

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::cfa::{LabelInsertion, ProgramCfa};
use crate::exec::{outcomes_equal, ExecError, Executable, Limits, ObservedOutcome, TestCase, TestSuite};
use crate::minic::SourceProgram;
use crate::testgen::{search_first, Absent, CandidateSpace, Search, SearchConfig};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompareError {
    #[error("no modified lines")]
    EmptyDiff,
    #[error("invalid comparator: `{newer}` vs `{older}`")]
    InvalidComparator { newer: String, older: String },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rtc {
    Mt,
    Mr,
}

impl fmt::Display for Rtc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rtc::Mt => "MT",
            Rtc::Mr => "MR",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ComparatorSpec<'a> {
    pub mode: Rtc,
    pub newer: &'a SourceProgram,
    pub older: &'a SourceProgram,
    pub function: &'a str,
    /// MT only: lines of `newer` to label.
    pub modified_lines: BTreeSet<usize>,
}

/// `newer` with one label goal per modified line.
#[derive(Debug, Clone)]
pub struct MtTarget {
    pub exe: Executable,
    pub labels: LabelInsertion,
}

pub fn mt_goals_for(newer: &SourceProgram, function: &str, lines: &BTreeSet<usize>) -> Result<MtTarget, CompareError> {
    if lines.is_empty() {
        return Err(CompareError::EmptyDiff);
    }
    let mut cfa = ProgramCfa::build(newer);
    let root = cfa.function_index(function).ok_or_else(|| {
        ExecError::Program(crate::minic::MinicError::UnknownFunction(function.to_string()))
    })?;
    let labels = cfa.insert_label_goals(root, lines);
    Ok(MtTarget { exe: Executable::from_cfa(cfa, newer, function)?, labels })
}

pub fn mt_goals(spec: &ComparatorSpec<'_>) -> Result<MtTarget, CompareError> {
    mt_goals_for(spec.newer, spec.function, &spec.modified_lines)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceWitness {
    pub test: TestCase,
    pub newer: ObservedOutcome,
    pub older: ObservedOutcome,
    /// Full assume sequence of the run on the newer version.
    pub path: Vec<u32>,
}

impl DifferenceWitness {
    /// Suite-format line preceded by a `# differs:` comment.
    pub fn to_text(&self) -> String {
        format!("# differs: {} vs {}\n{}\n", self.older, self.newer, self.test)
    }
}

pub fn witnesses_to_suite(ws: &[DifferenceWitness]) -> TestSuite {
    TestSuite::new(ws.iter().map(|w| w.test.clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBatch {
    pub witnesses: Vec<DifferenceWitness>,
    /// Program executions spent (two per candidate).
    pub work: u64,
    pub stopped: Option<Absent>,
}

pub fn check_comparable(newer: &Executable, older: &Executable) -> Result<(), CompareError> {
    let (a, b) = (newer.signature(), older.signature());
    if a != b {
        return Err(CompareError::InvalidComparator { newer: a.to_string(), older: b.to_string() });
    }
    Ok(())
}

/// Up to `n` inputs on which the versions differ, with pairwise distinct
/// paths through `newer`.
pub fn mr_find_witnesses_exe(
    newer: &Executable,
    older: &Executable,
    cfg: &SearchConfig,
    n: usize,
) -> Result<WitnessBatch, CompareError> {
    check_comparable(newer, older)?;
    let space = CandidateSpace::new(newer.params(), cfg.domain);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut batch = WitnessBatch { witnesses: Vec::new(), work: 0, stopped: None };
    let mut start = 0;
    while batch.witnesses.len() < n {
        let found = search_first(&space, start, cfg.budget, |_, values| {
            let (a, trace) = newer.run(values, cfg.limits);
            let (b, _) = older.run(values, cfg.limits);
            (!outcomes_equal(&a, &b) && !seen.contains(&trace.assumes)).then(|| (a, b, trace.assumes))
        });
        batch.work += 2 * found.work();
        match found {
            Search::Found { index, value: (a, b, path), .. } => {
                seen.insert(path.clone());
                let test = newer.test_case(format!("w{index}"), space.get(index));
                batch.witnesses.push(DifferenceWitness { test, newer: a, older: b, path });
                start = index + 1;
            }
            Search::Absent { reason, .. } => {
                batch.stopped = Some(reason);
                break;
            }
        }
    }
    Ok(batch)
}

pub fn mr_find_witnesses(spec: &ComparatorSpec<'_>, cfg: &SearchConfig, n: usize) -> Result<WitnessBatch, CompareError> {
    let newer = Executable::new(spec.newer, spec.function)?;
    let older = Executable::new(spec.older, spec.function)?;
    mr_find_witnesses_exe(&newer, &older, cfg, n)
}

pub fn differs_on_exe(a: &Executable, b: &Executable, t: &TestCase, limits: Limits) -> Result<bool, CompareError> {
    check_comparable(a, b)?;
    let (x, _) = a.run_test(t, limits)?;
    let (y, _) = b.run_test(t, limits)?;
    Ok(!outcomes_equal(&x, &y))
}

pub fn differs_on(pi: &SourceProgram, pj: &SourceProgram, function: &str, t: &TestCase) -> Result<bool, CompareError> {
    differs_on_exe(&Executable::new(pi, function)?, &Executable::new(pj, function)?, t, Limits::default())
}
