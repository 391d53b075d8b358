//! Bounded generate-and-test input search.
//!
//! Candidates are enumerated in a fixed canonical order: array-length
//! vectors by (total length, then lexicographically), and within one length
//! vector all values lexicographically, last position fastest. Searches run
//! in parallel chunks but always report the first qualifying candidate in
//! that order.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::cfa::{EdgeRef, TestGoal};
use crate::exec::{CoverageMatrix, Executable, InputValue, Limits, TestCase, TestSuite};
use crate::minic::ParamKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct InputDomain {
    pub scalar: (i64, i64),
    pub max_len: usize,
    pub element: (i64, i64),
}

impl Default for InputDomain {
    fn default() -> Self {
        InputDomain { scalar: (-8, 8), max_len: 4, element: (-8, 8) }
    }
}

impl InputDomain {
    pub fn is_valid(&self) -> bool {
        self.scalar.0 <= self.scalar.1 && self.element.0 <= self.element.1
    }
}

/// Why a search came back empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Absent {
    /// Every candidate in the domain was tried.
    DomainExhausted,
    /// The candidate budget ran out first.
    StepBudget,
}

impl fmt::Display for Absent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Absent::DomainExhausted => "domain-exhausted",
            Absent::StepBudget => "step-budget",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub domain: InputDomain,
    pub limits: Limits,
    /// Candidate executions allowed per search.
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { domain: InputDomain::default(), limits: Limits::default(), budget: 2_000_000 }
    }
}

/// The canonical candidate order for one parameter list.
#[derive(Debug, Clone)]
pub struct CandidateSpace {
    kinds: Vec<ParamKind>,
    domain: InputDomain,
    /// (lengths of the array params, first index, candidate count)
    blocks: Vec<(Vec<usize>, u64, u64)>,
    total: u64,
}

impl CandidateSpace {
    pub fn new(kinds: &[ParamKind], domain: InputDomain) -> Self {
        let arrays = kinds.iter().filter(|k| **k == ParamKind::IntArray).count();
        let scalars = (kinds.len() - arrays) as u32;
        let mut lens: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..arrays {
            lens = lens.into_iter().flat_map(|v| (0..=domain.max_len).map(move |l| [v.clone(), vec![l]].concat())).collect();
        }
        lens.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
        let s = (domain.scalar.1 - domain.scalar.0 + 1) as u64;
        let e = (domain.element.1 - domain.element.0 + 1) as u64;
        let mut blocks = Vec::with_capacity(lens.len());
        let mut start = 0u64;
        for l in lens {
            let cells: u32 = l.iter().sum::<usize>() as u32;
            let count = s.saturating_pow(scalars).saturating_mul(e.saturating_pow(cells));
            blocks.push((l, start, count));
            start = start.saturating_add(count);
        }
        CandidateSpace { kinds: kinds.to_vec(), domain, blocks, total: start }
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Decodes the candidate at `index` (must be below [`len`](Self::len)).
    pub fn get(&self, index: u64) -> Vec<InputValue> {
        let b = self.blocks.partition_point(|(_, start, _)| *start <= index) - 1;
        let (lens, start, _) = &self.blocks[b];
        let mut rem = index - start;
        // Positions in order: each scalar, or each element of an array.
        let mut ranges: Vec<(i64, u64)> = Vec::new();
        let mut li = 0;
        for k in &self.kinds {
            match k {
                ParamKind::Int => ranges.push((self.domain.scalar.0, (self.domain.scalar.1 - self.domain.scalar.0 + 1) as u64)),
                ParamKind::IntArray => {
                    let width = (self.domain.element.1 - self.domain.element.0 + 1) as u64;
                    ranges.extend(std::iter::repeat((self.domain.element.0, width)).take(lens[li]));
                    li += 1;
                }
            }
        }
        let mut digits = vec![0i64; ranges.len()];
        for (d, (lo, width)) in digits.iter_mut().zip(&ranges).rev() {
            *d = lo + (rem % width) as i64;
            rem /= width;
        }
        let mut it = digits.into_iter();
        let mut li = 0;
        self.kinds
            .iter()
            .map(|k| match k {
                ParamKind::Int => InputValue::Int(it.next().expect("digit")),
                ParamKind::IntArray => {
                    let v = it.by_ref().take(lens[li]).collect();
                    li += 1;
                    InputValue::Array(v)
                }
            })
            .collect()
    }
}

/// Result of a first-match search over the candidate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<T> {
    Found { index: u64, value: T, work: u64 },
    Absent { reason: Absent, work: u64 },
}

impl<T> Search<T> {
    pub fn work(&self) -> u64 {
        match self {
            Search::Found { work, .. } | Search::Absent { work, .. } => *work,
        }
    }
}

/// Returns the first index in `start..space.len()` whose candidate satisfies
/// `check`, trying at most `budget` candidates. Work is the number of
/// candidates up to and including the hit, so it does not depend on
/// scheduling.
pub fn search_first<T: Send>(
    space: &CandidateSpace,
    start: u64,
    budget: u64,
    check: impl Fn(u64, &[InputValue]) -> Option<T> + Sync,
) -> Search<T> {
    let end = space.len().min(start.saturating_add(budget));
    let mut lo = start;
    let mut chunk = 64u64;
    while lo < end {
        let hi = end.min(lo + chunk);
        let hit = (lo..hi).into_par_iter().find_map_first(|i| check(i, &space.get(i)).map(|v| (i, v)));
        if let Some((index, value)) = hit {
            return Search::Found { index, value, work: index - start + 1 };
        }
        lo = hi;
        chunk = (chunk * 2).min(1 << 14);
    }
    let reason = if end == space.len() { Absent::DomainExhausted } else { Absent::StepBudget };
    Search::Absent { reason, work: end.saturating_sub(start) }
}

/// Assume-sequence prefixes already used to reach each goal.
#[derive(Debug, Clone, Default)]
pub struct BlockedPathSet {
    by_goal: HashMap<Vec<EdgeRef>, HashSet<Vec<u32>>>,
}

impl BlockedPathSet {
    pub fn block(&mut self, targets: &[EdgeRef], path: Vec<u32>) -> bool {
        self.by_goal.entry(targets.to_vec()).or_default().insert(path)
    }

    pub fn is_blocked(&self, targets: &[EdgeRef], path: &[u32]) -> bool {
        self.by_goal.get(targets).is_some_and(|s| s.contains(path))
    }

    pub fn for_goal(&self, targets: &[EdgeRef]) -> Option<&HashSet<Vec<u32>>> {
        self.by_goal.get(targets)
    }
}

/// A generated input with the assume-sequence prefix it used to reach the goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub test: TestCase,
    pub path: Vec<u32>,
    /// Position in the canonical order.
    pub index: u64,
}

/// Searches for an input reaching any of `targets` along a prefix not in
/// `blocked`, starting at candidate `start`.
pub fn find_test_from(
    exe: &Executable,
    targets: &[EdgeRef],
    cfg: &SearchConfig,
    blocked: &BlockedPathSet,
    start: u64,
) -> Search<Generated> {
    let space = CandidateSpace::new(exe.params(), cfg.domain);
    let globals: Vec<usize> = targets.iter().map(|&r| exe.cfa.global_id(r)).collect();
    let blocked = blocked.for_goal(targets);
    let found = search_first(&space, start, cfg.budget, |_, values| {
        let (_, trace) = exe.run(values, cfg.limits);
        let prefix = trace.prefix_to_any(&globals)?;
        if blocked.is_some_and(|b| b.contains(prefix)) {
            return None;
        }
        Some(prefix.to_vec())
    });
    match found {
        Search::Found { index, value, work } => {
            let test = exe.test_case(format!("c{index}"), space.get(index));
            Search::Found { index, value: Generated { test, path: value, index }, work }
        }
        Search::Absent { reason, work } => Search::Absent { reason, work },
    }
}

pub fn find_test(exe: &Executable, goal: &TestGoal, cfg: &SearchConfig, blocked: &BlockedPathSet) -> Search<Generated> {
    find_test_from(exe, &[goal.target], cfg, blocked, 0)
}

/// Up to `n` inputs reaching the target set along pairwise distinct paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub tests: Vec<Generated>,
    pub work: u64,
    /// Set when fewer than `n` tests were found.
    pub stopped: Option<Absent>,
}

pub fn find_n_tests_for(exe: &Executable, targets: &[EdgeRef], cfg: &SearchConfig, n: usize) -> Batch {
    let mut blocked = BlockedPathSet::default();
    let mut batch = Batch { tests: Vec::new(), work: 0, stopped: None };
    let mut start = 0;
    while batch.tests.len() < n {
        // Earlier candidates either missed the goal or used a path that is
        // still blocked, so resuming after the last hit loses nothing.
        match find_test_from(exe, targets, cfg, &blocked, start) {
            Search::Found { index, value, work } => {
                batch.work += work;
                blocked.block(targets, value.path.clone());
                batch.tests.push(value);
                start = index + 1;
            }
            Search::Absent { reason, work } => {
                batch.work += work;
                batch.stopped = Some(reason);
                break;
            }
        }
    }
    batch
}

pub fn find_n_tests(exe: &Executable, goal: &TestGoal, cfg: &SearchConfig, n: usize) -> Batch {
    find_n_tests_for(exe, &[goal.target], cfg, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchCoverage {
    pub suite: TestSuite,
    pub matrix: CoverageMatrix,
    /// Goals no input in the domain reaches, with the reason the search stopped.
    pub uncovered: Vec<(String, Absent)>,
    pub work: u64,
}

/// Greedy suite generation: target the first uncovered goal, keep the input
/// found, credit every goal its run covers, repeat.
pub fn cover_branches(exe: &Executable, goals: &[TestGoal], cfg: &SearchConfig) -> BranchCoverage {
    let mut covered = vec![false; goals.len()];
    let mut given_up = vec![false; goals.len()];
    let mut out = BranchCoverage {
        suite: TestSuite::default(),
        matrix: CoverageMatrix::new(Vec::new(), goals.iter().map(|g| g.id.clone()).collect(), Vec::new()),
        uncovered: Vec::new(),
        work: 0,
    };
    while let Some(g) = (0..goals.len()).find(|&g| !covered[g] && !given_up[g]) {
        let found = find_test(exe, &goals[g], cfg, &BlockedPathSet::default());
        out.work += found.work();
        match found {
            Search::Found { value, .. } => {
                let id = format!("t{}", out.suite.len() + 1);
                let test = TestCase { id: id.clone(), ..value.test };
                let (_, trace) = exe.run(&test.values(), cfg.limits);
                let row: std::collections::BTreeSet<usize> =
                    (0..goals.len()).filter(|&i| trace.covers(&exe.cfa, &goals[i])).collect();
                for &i in &row {
                    covered[i] = true;
                }
                out.matrix.tests.push(id);
                out.matrix.rows.push(row);
                out.suite.tests.push(test);
            }
            Search::Absent { reason, .. } => {
                given_up[g] = true;
                out.uncovered.push((goals[g].id.clone(), reason));
            }
        }
    }
    out
}
