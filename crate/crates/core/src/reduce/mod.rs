//! Test-suite reduction over a [`CoverageMatrix`]: exact minimum cover,
//! similarity-based sampling (FAST++) and greedy most-new-goals (DIFF).

mod diff;
mod fastpp;
mod ilp;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use diff::reduce_diff;
pub use fastpp::{encode_frequencies, reduce_fastpp, FastppConfig};
pub use ilp::{emit_ilp, reduce_ilp};

use crate::exec::{CoverageMatrix, TestCase};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("goals covered by no test: {}", .0.join(", "))]
    UncoverableGoal(Vec<String>),
    #[error("no input values for test `{0}`")]
    MissingInputs(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rs {
    None,
    Ilp,
    FastPp,
    Diff,
}

impl Rs {
    pub const ALL: [Rs; 4] = [Rs::None, Rs::Ilp, Rs::FastPp, Rs::Diff];
}

impl fmt::Display for Rs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rs::None => "None",
            Rs::Ilp => "ILP",
            Rs::FastPp => "FAST++",
            Rs::Diff => "DIFF",
        })
    }
}

impl FromStr for Rs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Rs::None),
            "ilp" => Ok(Rs::Ilp),
            "fast++" | "fastpp" => Ok(Rs::FastPp),
            "diff" => Ok(Rs::Diff),
            _ => Err(format!("unknown reduction strategy `{s}` (none, ilp, fastpp, diff)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    /// Selected test ids in selection order.
    pub selected: Vec<String>,
    pub strategy: Rs,
    /// Goals dropped up front because no test covers them.
    pub dropped: Vec<String>,
    /// Candidate subsets or picks examined.
    pub examined: u64,
    pub elapsed: Duration,
}

/// Compares ids so that embedded numbers order numerically (`t2 < t10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, sa), (db, sb)) in ca.iter().zip(&cb) {
        let ord = if *da && *db {
            let (ta, tb) = (sa.trim_start_matches('0'), sb.trim_start_matches('0'));
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb)).then_with(|| sa.len().cmp(&sb.len()))
        } else {
            sa.cmp(sb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len())
}

/// Fixed-width goal set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn empty(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn union_with(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    pub(crate) fn minus(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    pub(crate) fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub(crate) fn and_count(&self, o: &Bits) -> u32 {
        self.0.iter().zip(&o.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
}

/// Matrix rows as bitsets, tests sorted by natural id order.
pub(crate) struct Prepared {
    pub(crate) ids: Vec<String>,
    pub(crate) rows: Vec<Bits>,
    pub(crate) goals: usize,
    pub(crate) dropped: Vec<String>,
}

pub(crate) fn prepare(m: &CoverageMatrix, strict: bool) -> Result<Prepared, ReduceError> {
    let (m, dropped) = m.drop_uncoverable();
    if strict && !dropped.is_empty() {
        return Err(ReduceError::UncoverableGoal(dropped));
    }
    let mut order: Vec<usize> = (0..m.tests.len()).collect();
    order.sort_by(|&a, &b| natural_cmp(&m.tests[a], &m.tests[b]));
    let rows = order
        .iter()
        .map(|&t| {
            let mut b = Bits::empty(m.goals.len());
            m.rows[t].iter().for_each(|&g| b.set(g));
            b
        })
        .collect();
    Ok(Prepared { ids: order.iter().map(|&t| m.tests[t].clone()).collect(), rows, goals: m.goals.len(), dropped })
}

/// Runs `rs` after dropping goals no test covers. `Rs::None` keeps the
/// whole suite in its original order.
pub fn reduce(
    m: &CoverageMatrix,
    rs: Rs,
    inputs: &[TestCase],
    fast: &FastppConfig,
) -> Result<ReductionResult, ReduceError> {
    let start = Instant::now();
    let mut r = match rs {
        Rs::None => ReductionResult {
            selected: m.tests.clone(),
            strategy: Rs::None,
            dropped: m.uncovered(),
            examined: 0,
            elapsed: Duration::ZERO,
        },
        Rs::Ilp => ilp::run(prepare(m, false)?),
        Rs::Diff => diff::run(prepare(m, false)?),
        Rs::FastPp => fastpp::run(prepare(m, false)?, inputs, fast)?,
    };
    r.elapsed = start.elapsed();
    Ok(r)
}
