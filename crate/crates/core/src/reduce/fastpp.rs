use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{prepare, Bits, Prepared, ReduceError, ReductionResult, Rs};
use crate::exec::{CoverageMatrix, InputValue, TestCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastppConfig {
    pub seed: u64,
    /// Projection dimension.
    pub dim: usize,
}

impl Default for FastppConfig {
    fn default() -> Self {
        FastppConfig { seed: 0, dim: 3 }
    }
}

/// Frequency vectors over the ascending distinct values occurring anywhere
/// in the inputs. Returns the value axis and one row per test.
pub fn encode_frequencies(tests: &[TestCase]) -> (Vec<i64>, Vec<Vec<u32>>) {
    let flat = |t: &TestCase| -> Vec<i64> {
        t.bindings
            .iter()
            .flat_map(|(_, v)| match v {
                InputValue::Int(i) => vec![*i],
                InputValue::Array(a) => a.clone(),
            })
            .collect()
    };
    let mut counts: Vec<BTreeMap<i64, u32>> = Vec::with_capacity(tests.len());
    let mut axis: Vec<i64> = Vec::new();
    for t in tests {
        let mut c = BTreeMap::new();
        for v in flat(t) {
            *c.entry(v).or_insert(0) += 1;
            axis.push(v);
        }
        counts.push(c);
    }
    axis.sort_unstable();
    axis.dedup();
    let rows = counts.iter().map(|c| axis.iter().map(|v| c.get(v).copied().unwrap_or(0)).collect()).collect();
    (axis, rows)
}

/// Sparse random projection: entries -1, 0, +1 with probabilities 1/6, 2/3, 1/6.
fn projection(width: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..width)
        .map(|_| {
            (0..dim)
                .map(|_| match rng.gen_range(0..6) {
                    0 => -1.0,
                    5 => 1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect()
}

/// Similarity-based sampling: a seeded first pick, then each next test
/// drawn with probability proportional to its minimum Euclidean distance
/// (in projected space) to the tests already picked. Every pick is kept,
/// and picking stops once all goals are covered.
pub fn reduce_fastpp(
    m: &CoverageMatrix,
    inputs: &[TestCase],
    cfg: &FastppConfig,
) -> Result<ReductionResult, ReduceError> {
    run(prepare(m, true)?, inputs, cfg)
}

pub(super) fn run(
    p: Prepared,
    inputs: &[TestCase],
    cfg: &FastppConfig,
) -> Result<ReductionResult, ReduceError> {
    let by_id: HashMap<&str, &TestCase> = inputs.iter().map(|t| (t.id.as_str(), t)).collect();
    let ordered: Vec<TestCase> = p
        .ids
        .iter()
        .map(|id| by_id.get(id.as_str()).map(|t| (*t).clone()).ok_or_else(|| ReduceError::MissingInputs(id.clone())))
        .collect::<Result<_, _>>()?;
    let (axis, freq) = encode_frequencies(&ordered);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let proj = projection(axis.len(), cfg.dim.max(1), &mut rng);
    let points: Vec<Vec<f64>> = freq
        .iter()
        .map(|row| {
            (0..cfg.dim.max(1)).map(|d| row.iter().zip(&proj).map(|(&c, r)| c as f64 * r[d]).sum()).collect()
        })
        .collect();

    let n = p.rows.len();
    let mut missing = Bits::empty(p.goals);
    p.rows.iter().for_each(|r| missing.union_with(r));
    let mut selected: Vec<usize> = Vec::new();
    let mut taken = vec![false; n];
    let mut min_dist = vec![f64::INFINITY; n];
    let mut examined = 0u64;
    while !missing.is_empty() {
        let remaining: Vec<usize> = (0..n).filter(|&t| !taken[t]).collect();
        examined += remaining.len() as u64;
        let pick = if selected.is_empty() {
            remaining[rng.gen_range(0..remaining.len())]
        } else {
            let weights: Vec<f64> = remaining.iter().map(|&t| min_dist[t]).collect();
            match WeightedIndex::new(&weights) {
                Ok(w) => remaining[w.sample(&mut rng)],
                // All distances zero: fall back to a uniform pick.
                Err(_) => remaining[rng.gen_range(0..remaining.len())],
            }
        };
        taken[pick] = true;
        selected.push(pick);
        missing = missing.minus(&p.rows[pick]);
        for t in 0..n {
            let d = euclid(&points[t], &points[pick]);
            if d < min_dist[t] {
                min_dist[t] = d;
            }
        }
    }
    Ok(ReductionResult {
        selected: selected.iter().map(|&t| p.ids[t].clone()).collect(),
        strategy: Rs::FastPp,
        dropped: p.dropped,
        examined,
        elapsed: Duration::ZERO,
    })
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
