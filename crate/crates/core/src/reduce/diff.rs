use std::time::Duration;

use super::{prepare, Bits, Prepared, ReduceError, ReductionResult, Rs};
use crate::exec::CoverageMatrix;

/// Greedy: repeatedly take the test covering the most still-uncovered goals,
/// ties to the smallest id.
pub fn reduce_diff(m: &CoverageMatrix) -> Result<ReductionResult, ReduceError> {
    Ok(run(prepare(m, true)?))
}

pub(super) fn run(p: Prepared) -> ReductionResult {
    let mut missing = Bits::empty(p.goals);
    p.rows.iter().for_each(|r| missing.union_with(r));
    let mut taken = vec![false; p.rows.len()];
    let mut selected = Vec::new();
    let mut examined = 0u64;
    while !missing.is_empty() {
        let mut best: Option<(u32, usize)> = None;
        for (t, row) in p.rows.iter().enumerate() {
            if taken[t] {
                continue;
            }
            examined += 1;
            let gain = row.and_count(&missing);
            if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, t));
            }
        }
        let (_, t) = best.expect("every remaining goal is covered by some test");
        taken[t] = true;
        missing = missing.minus(&p.rows[t]);
        selected.push(t);
    }
    ReductionResult {
        selected: selected.iter().map(|&t| p.ids[t].clone()).collect(),
        strategy: Rs::Diff,
        dropped: p.dropped,
        examined,
        elapsed: Duration::ZERO,
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::{reduce_ilp, ReduceError};
    use super::*;

    #[test]
    fn small_matrix_order_is_t3_then_t1() {
        assert_eq!(reduce_diff(&small_matrix()).unwrap().selected, ["t3", "t1"]);
    }

    #[test]
    fn disjoint_singletons_select_all_in_id_order() {
        let m = matrix(&[&[2], &[0], &[1]], 3);
        assert_eq!(reduce_diff(&m).unwrap().selected, ["t1", "t2", "t3"]);
    }

    #[test]
    fn greedy_trap_is_worse_than_optimum() {
        // Optimum {t1, t2}; the greedy pick t3 leaves one goal on each side.
        let m = matrix(&[&[0, 1, 2], &[3, 4, 5], &[0, 1, 3, 4]], 6);
        assert_eq!(brute_force_min(&m), 2);
        assert_eq!(reduce_ilp(&m).unwrap().selected.len(), 2);
        assert_eq!(reduce_diff(&m).unwrap().selected, ["t3", "t1", "t2"]);
    }

    #[test]
    fn strict_mode_reports_uncoverable() {
        let m = matrix(&[&[0]], 2);
        assert_eq!(reduce_diff(&m), Err(ReduceError::UncoverableGoal(vec!["g2".into()])));
    }
}
