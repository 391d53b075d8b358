use std::fmt::Write as _;
use std::time::Duration;

use super::{prepare, Bits, Prepared, ReduceError, ReductionResult, Rs};
use crate::exec::CoverageMatrix;

/// Minimum-cardinality cover. Among minimum covers the lexicographically
/// smallest id sequence (natural id order) wins. Fails when a goal is
/// covered by no test.
pub fn reduce_ilp(m: &CoverageMatrix) -> Result<ReductionResult, ReduceError> {
    Ok(run(prepare(m, true)?))
}

pub(super) fn run(p: Prepared) -> ReductionResult {
    let target = {
        let mut all = Bits::empty(p.goals);
        p.rows.iter().for_each(|r| all.union_with(r));
        all
    };
    let n = p.rows.len();
    // last_cover[g]: highest test index covering goal g.
    let mut last_cover = vec![0usize; p.goals];
    for (t, row) in p.rows.iter().enumerate() {
        for (g, slot) in last_cover.iter_mut().enumerate() {
            if row.0[g / 64] >> (g % 64) & 1 == 1 {
                *slot = t;
            }
        }
    }
    let widest = p.rows.iter().map(Bits::count).max().unwrap_or(0);
    let mut search = Search { rows: &p.rows, last_cover: &last_cover, widest, examined: 0, chosen: Vec::new() };
    let mut selected = Vec::new();
    if !target.is_empty() {
        for k in 1..=n {
            if search.extend(&target, 0, k) {
                selected = search.chosen.clone();
                break;
            }
        }
    }
    ReductionResult {
        selected: selected.iter().map(|&t| p.ids[t].clone()).collect(),
        strategy: Rs::Ilp,
        dropped: p.dropped,
        examined: search.examined,
        elapsed: Duration::ZERO,
    }
}

struct Search<'a> {
    rows: &'a [Bits],
    last_cover: &'a [usize],
    widest: u32,
    examined: u64,
    chosen: Vec<usize>,
}

impl Search<'_> {
    /// Tries to cover `missing` with `k` more tests from index `from` on,
    /// visiting combinations in lexicographic order.
    fn extend(&mut self, missing: &Bits, from: usize, k: usize) -> bool {
        self.examined += 1;
        if missing.is_empty() {
            return true;
        }
        if k == 0 || (missing.count() as u64) > (k as u64) * (self.widest as u64) {
            return false;
        }
        // Every missing goal needs a covering test at or after `from`.
        for (g, &last) in self.last_cover.iter().enumerate() {
            if missing.0[g / 64] >> (g % 64) & 1 == 1 && last < from {
                return false;
            }
        }
        for t in from..self.rows.len() {
            if self.rows[t].and_count(missing) == 0 {
                continue;
            }
            self.chosen.push(t);
            if self.extend(&missing.minus(&self.rows[t]), t + 1, k - 1) {
                return true;
            }
            self.chosen.pop();
        }
        false
    }
}

/// The 0/1 program: one `>= 1` clause per goal over the tests covering it,
/// minimising the number of selected tests.
pub fn emit_ilp(m: &CoverageMatrix) -> String {
    let vars: Vec<String> = (1..=m.tests.len()).map(|i| format!("x{i}")).collect();
    let mut out = String::new();
    let _ = writeln!(out, "min: {};", vars.join(" + "));
    for (g, goal) in m.goals.iter().enumerate() {
        let terms: Vec<&str> =
            m.rows.iter().enumerate().filter(|(_, r)| r.contains(&g)).map(|(t, _)| vars[t].as_str()).collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let _ = writeln!(out, "{goal}: {lhs} >= 1;");
    }
    let _ = writeln!(out, "bin {};", vars.join(", "));
    for (v, t) in vars.iter().zip(&m.tests) {
        let _ = writeln!(out, "// {v} = {t}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_matrix_minimum_is_t1_t3() {
        let r = reduce_ilp(&small_matrix()).unwrap();
        assert_eq!(r.selected, ["t1", "t3"]);
    }

    #[test]
    fn single_full_test() {
        let m = matrix(&[&[0], &[0, 1, 2], &[2]], 3);
        assert_eq!(reduce_ilp(&m).unwrap().selected, ["t2"]);
    }

    #[test]
    fn triangle_picks_smallest_pair() {
        let m = matrix(&[&[0, 1], &[1, 2], &[0, 2]], 3);
        assert_eq!(brute_force_min(&m), 2);
        assert_eq!(reduce_ilp(&m).unwrap().selected, ["t1", "t2"]);
    }

    #[test]
    fn ids_compare_naturally() {
        let mut m = matrix(&[&[0], &[0]], 1);
        m.tests = vec!["t10".into(), "t2".into()];
        assert_eq!(reduce_ilp(&m).unwrap().selected, ["t2"]);
    }

    #[test]
    fn empty_goal_set_selects_nothing() {
        let m = matrix(&[&[], &[]], 0);
        assert!(reduce_ilp(&m).unwrap().selected.is_empty());
    }

    #[test]
    fn clause_system_text() {
        let text = emit_ilp(&small_matrix());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "min: x1 + x2 + x3 + x4;");
        assert_eq!(lines[1], "g1: x1 >= 1;");
        assert_eq!(lines[2], "g2: x2 + x3 + x4 >= 1;");
        assert_eq!(lines[5], "g5: x3 >= 1;");
        assert_eq!(lines[7], "bin x1, x2, x3, x4;");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matches_brute_force_minimum(m in arb_matrix(12, 10)) {
            let r = super::super::reduce(&m, Rs::Ilp, &[], &Default::default()).unwrap();
            prop_assert_eq!(r.selected.len(), brute_force_min(&m));
        }
    }
}
