//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regstrat::cfa::{EdgeOp, EdgeRef, GoalKind, TestGoal};
use regstrat::compare::{differs_on, mr_find_witnesses, mt_goals_for, ComparatorSpec, CompareError, Rtc};
use regstrat::exec::{coverage_matrix, CoverageMatrix, Executable, InputValue, Limits, OutcomeKind, TestCase, TestSuite};
use regstrat::history::VersionHistory;
use regstrat::minic::{parse_valid, SourceProgram};
use regstrat::pipeline::{
    enumerate_strategies, metrics_to_csv, report, run_experiment, Cr, Experiment, ExperimentConfig, MetricsRecord,
    Strategy, Subject,
};
use regstrat::reduce::{encode_frequencies, reduce, reduce_diff, reduce_ilp, FastppConfig, Rs};
use regstrat::testgen::{find_n_tests_for, Absent, SearchConfig};

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
const SUBJECTS: [&str; 4] = ["find_last", "grade", "count_range", "scale"];

type Check = Result<String, String>;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{CORPUS}/fixtures/{name}")).expect("fixture")
}

fn find_last() -> VersionHistory {
    VersionHistory::load(format!("{CORPUS}/find_last")).expect("find_last history")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:?}, limit {limit:?}", t.elapsed()))
}

fn returned(p: &SourceProgram, t: &TestCase) -> OutcomeKind {
    let exe = Executable::new(p, "find_last").unwrap();
    exe.run_test(t, Limits::default()).unwrap().0.kind
}

fn c1_goldens() -> Check {
    let start = Instant::now();
    let h = find_last();
    let suite = TestSuite::parse(&fixture("running_example.suite")).map_err(|e| e.to_string())?;
    let t1 = suite.get("t1").unwrap();
    let t2 = suite.get("t2").unwrap();
    let got = [returned(h.version(0), t1), returned(h.version(0), t2), returned(h.version(3), t2)];
    let want = [OutcomeKind::Returned(-1), OutcomeKind::Returned(0), OutcomeKind::Returned(-2)];
    ensure(got == want, || format!("got {got:?}"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("P0(t1)={} P0(t2)={} P3(t2)={}", got[0], got[1], got[2]))
}

/// Size of a minimum cover by plain subset enumeration.
fn brute_min(m: &CoverageMatrix) -> usize {
    let need = m.covered();
    let n = m.tests.len();
    (0u32..1 << n)
        .filter(|mask| {
            let got: BTreeSet<usize> =
                (0..n).filter(|t| mask & (1 << t) != 0).flat_map(|t| m.rows[t].iter().copied()).collect();
            got == need
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng) -> CoverageMatrix {
    let tests = rng.gen_range(1..=12);
    let goals = rng.gen_range(1..=10);
    let rows = (0..tests).map(|_| (0..goals).filter(|_| rng.gen_bool(0.3)).collect()).collect();
    CoverageMatrix::new(
        (1..=tests).map(|t| format!("t{t}")).collect(),
        (1..=goals).map(|g| format!("g{g}")).collect(),
        rows,
    )
}

fn scalar_inputs(m: &CoverageMatrix, rng: &mut ChaCha8Rng) -> Vec<TestCase> {
    m.tests
        .iter()
        .map(|id| TestCase::new(id.clone(), vec![("a".into(), InputValue::Int(rng.gen_range(-8..=8)))]))
        .collect()
}

fn ids(m: &CoverageMatrix, selected: &[String]) -> Vec<usize> {
    selected.iter().map(|id| m.test_index(id).expect("selected id is a test")).collect()
}

fn c2_ilp() -> Check {
    let start = Instant::now();
    let small = CoverageMatrix::from_csv(&fixture("small_matrix.csv")).map_err(|e| e.to_string())?;
    let r = reduce_ilp(&small).map_err(|e| e.to_string())?;
    let got: BTreeSet<&str> = r.selected.iter().map(String::as_str).collect();
    ensure(got == BTreeSet::from(["t1", "t3"]), || format!("small matrix selection {got:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..200 {
        let m = random_matrix(&mut rng);
        // Goals no test covers are dropped first, as in the pipeline.
        let r = reduce(&m, Rs::Ilp, &[], &FastppConfig::default()).map_err(|e| e.to_string())?;
        let chosen = ids(&m, &r.selected);
        ensure(m.covered_by(&chosen) == m.covered(), || format!("matrix {k}: cover lost"))?;
        let best = brute_min(&m);
        ensure(chosen.len() == best, || format!("matrix {k}: |ilp|={} brute={best}", chosen.len()))?;
    }
    within(start, Duration::from_secs(30))?;
    Ok("small matrix {t1,t3}; 200 random matrices optimal".into())
}

fn c3_diff() -> Check {
    let small = CoverageMatrix::from_csv(&fixture("small_matrix.csv")).map_err(|e| e.to_string())?;
    let r = reduce_diff(&small).map_err(|e| e.to_string())?;
    ensure(r.selected == ["t3", "t1"], || format!("order {:?}", r.selected))?;
    Ok("order [t3, t1]".into())
}

fn c4_fastpp() -> Check {
    let suite = TestSuite::parse(&fixture("running_example.suite")).map_err(|e| e.to_string())?;
    let (axis, rows) = encode_frequencies(&suite.tests[..4]);
    // Value counts written out by hand from t1..t4.
    let want_axis = vec![0, 1, 2, 3, 4, 5];
    let want_rows = vec![vec![2, 0, 0, 0, 0, 0], vec![0, 0, 0, 2, 1, 2], vec![0, 3, 1, 0, 0, 0], vec![1, 1, 2, 0, 0, 0]];
    ensure(axis == want_axis && rows == want_rows, || format!("axis {axis:?} rows {rows:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..100 {
        let m = random_matrix(&mut rng);
        let inputs = scalar_inputs(&m, &mut rng);
        let cfg = FastppConfig { seed: rng.gen(), dim: 3 };
        let a = reduce(&m, Rs::FastPp, &inputs, &cfg).map_err(|e| e.to_string())?;
        let b = reduce(&m, Rs::FastPp, &inputs, &cfg).map_err(|e| e.to_string())?;
        ensure(a.selected == b.selected, || format!("run {k}: not deterministic"))?;
        ensure(m.covered_by(&ids(&m, &a.selected)) == m.covered(), || format!("run {k}: cover lost"))?;
    }
    Ok("frequency table matches; 100 runs complete and deterministic".into())
}

fn c5_dominance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut instances = vec![CoverageMatrix::from_csv(&fixture("small_matrix.csv")).unwrap()];
    for _ in 0..300 {
        instances.push(random_matrix(&mut rng));
    }
    for (k, m) in instances.iter().enumerate() {
        let inputs = scalar_inputs(m, &mut rng);
        let fast = FastppConfig { seed: k as u64, dim: 3 };
        let mut sizes = Vec::new();
        for rs in [Rs::Ilp, Rs::Diff, Rs::FastPp] {
            let r = reduce(m, rs, &inputs, &fast).map_err(|e| e.to_string())?;
            let chosen = ids(m, &r.selected);
            ensure(m.covered_by(&chosen) == m.covered(), || format!("instance {k}: {rs} lost coverage"))?;
            sizes.push(chosen.len());
        }
        ensure(sizes[0] <= sizes[1] && sizes[0] <= sizes[2], || format!("instance {k}: sizes {sizes:?}"))?;
    }
    Ok(format!("{} instances", instances.len()))
}

fn c6_mr() -> Check {
    let start = Instant::now();
    let h = find_last();
    let (p2, p3) = (h.version(2), h.version(3));
    let cfg = SearchConfig::default();
    let spec = ComparatorSpec { mode: Rtc::Mr, newer: p3, older: p2, function: "find_last", modified_lines: BTreeSet::new() };
    let batch = mr_find_witnesses(&spec, &cfg, 3).map_err(|e| e.to_string())?;
    ensure(!batch.witnesses.is_empty(), || "no witnesses".into())?;
    for w in &batch.witnesses {
        ensure(differs_on(p3, p2, "find_last", &w.test).unwrap(), || format!("{} does not differ", w.test))?;
    }
    // Plain nested loops over the default domain, independent of the search.
    let a = Executable::new(p3, "find_last").unwrap();
    let b = Executable::new(p2, "find_last").unwrap();
    let d = cfg.domain;
    let mut brute = None;
    'outer: for len in 0..=d.max_len {
        let mut x = vec![d.element.0; len];
        loop {
            for y in d.scalar.0..=d.scalar.1 {
                let v = [InputValue::Array(x.clone()), InputValue::Int(y)];
                if a.run(&v, cfg.limits).0 != b.run(&v, cfg.limits).0 {
                    brute = Some(v);
                    break 'outer;
                }
            }
            let Some(p) = (0..len).rev().find(|&p| x[p] < d.element.1) else { break };
            x[p] += 1;
            x[p + 1..].iter_mut().for_each(|e| *e = d.element.0);
        }
    }
    ensure(brute.is_some(), || "brute force found no difference".into())?;
    let same = ComparatorSpec { newer: p3, older: p3, ..spec };
    let none = mr_find_witnesses(&same, &cfg, 1).map_err(|e| e.to_string())?;
    ensure(none.witnesses.is_empty() && none.stopped == Some(Absent::DomainExhausted), || {
        format!("identical programs: {} witnesses, stopped {:?}", none.witnesses.len(), none.stopped)
    })?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} sound witnesses; brute force agrees; identical pair exhausted", batch.witnesses.len()))
}

fn c7_distinct() -> Check {
    let p = parse_valid(&fixture("two_paths.mc")).map_err(|e| e.to_string())?;
    let exe = Executable::new(&p, "f").unwrap();
    let cfa = &exe.cfa.cfas[exe.entry];
    let targets: Vec<EdgeRef> = (0..cfa.edges.len())
        .filter(|&e| matches!(cfa.edges[e].op, EdgeOp::Return(_)))
        .map(|edge| EdgeRef { func: exe.entry, edge })
        .collect();
    let batch = find_n_tests_for(&exe, &targets, &SearchConfig::default(), 3);
    ensure(batch.tests.len() == 2, || format!("{} tests", batch.tests.len()))?;
    ensure(batch.tests[0].path != batch.tests[1].path, || "paths coincide".into())?;
    ensure(batch.stopped == Some(Absent::DomainExhausted), || format!("stopped {:?}", batch.stopped))?;
    Ok("2 tests, distinct assume sequences".into())
}

fn c8_strategies() -> Check {
    let all = enumerate_strategies();
    ensure(all.len() == 144, || format!("{} strategies", all.len()))?;
    let set: HashSet<Strategy> = all.iter().copied().collect();
    ensure(set.len() == 144, || "duplicates".into())?;
    ensure(set.contains(&Strategy::BASELINE_1) && set.contains(&Strategy::BASELINE_2), || "baseline missing".into())?;
    let bad = all.iter().filter(|s| (s.rs == Rs::None && s.cr == Cr::Cr) || (s.rs != Rs::None && s.cr == Cr::None));
    ensure(bad.count() == 0, || "invalid family present".into())?;
    Ok("144 strategies, both baselines".into())
}

fn subjects() -> Vec<Subject> {
    SUBJECTS.iter().map(|s| Subject::load(format!("{CORPUS}/{s}")).expect("corpus subject")).collect()
}

fn config(jobs: usize) -> ExperimentConfig {
    ExperimentConfig { seeds: vec![1, 2, 3], jobs, ..ExperimentConfig::default() }
}

fn experiment() -> &'static Result<Experiment, String> {
    static RUN: OnceLock<Result<Experiment, String>> = OnceLock::new();
    RUN.get_or_init(|| run_experiment(&subjects(), &enumerate_strategies(), &config(8)).map_err(|e| e.to_string()))
}

fn covered(m: &CoverageMatrix) -> BTreeSet<String> {
    m.covered().into_iter().map(|g| m.goals[g].clone()).collect()
}

fn c9_invariants() -> Check {
    let start = Instant::now();
    let exp = experiment().as_ref()?;
    let subjects = subjects();
    let mut runs = 0;
    for cell in &exp.cells {
        let subject = subjects.iter().find(|s| s.history.name == cell.subject).unwrap();
        let f = &subject.function;
        let s = cell.strategy;
        let mut prev = &cell.initial.full;
        for run in cell.chain.iter().chain(&cell.counted) {
            runs += 1;
            let at = || format!("{} seed {} {} r{}", cell.subject, cell.seed, s, run.revision);
            ensure(run.new_tests <= s.nrt * s.npr, || format!("{}: {} new tests", at(), run.new_tests))?;
            if s.rs != Rs::None {
                let goals: Vec<TestGoal>;
                let exe = match s.rtc {
                    Rtc::Mt => {
                        let t = mt_goals_for(&run.bug.program, f, &run.label_lines).map_err(|e| e.to_string())?;
                        goals = t.exe.cfa.branch_goals(t.exe.entry).into_iter().chain(t.labels.goals).collect();
                        ensure(goals.iter().any(|g| g.kind == GoalKind::Label), || format!("{}: no labels", at()))?;
                        t.exe
                    }
                    Rtc::Mr => {
                        let e = Executable::new(&run.bug.program, f).unwrap();
                        goals = e.cfa.branch_goals(e.entry);
                        e
                    }
                };
                let lim = Limits::default();
                let before = coverage_matrix(&exe, &run.pre_reduction, &goals, lim).map_err(|e| e.to_string())?;
                let after = coverage_matrix(&exe, &run.suite, &goals, lim).map_err(|e| e.to_string())?;
                ensure(covered(&before) == covered(&after), || format!("{}: reduction lost coverage", at()))?;
            }
        }
        if s.rs == Rs::None && s.cr == Cr::NoCr {
            for run in &cell.chain {
                let exe = Executable::new(&run.bug.program, f).unwrap();
                for t in prev.tests.iter().filter(|t| exe.accepts(t)) {
                    let kept = run.suite.tests.iter().any(|u| u.same_inputs(t));
                    ensure(kept, || format!("{} seed {} {s} r{}: dropped {}", cell.subject, cell.seed, run.revision, t.id))?;
                }
                prev = &run.suite;
            }
        }
    }
    let again = run_experiment(&subjects, &enumerate_strategies(), &config(8)).map_err(|e| e.to_string())?;
    let serial = run_experiment(&subjects, &enumerate_strategies(), &config(1)).map_err(|e| e.to_string())?;
    for (name, other) in [("rerun", &again), ("jobs 1", &serial)] {
        ensure(other.records.len() == exp.records.len(), || format!("{name}: row count differs"))?;
        for (a, b) in exp.records.iter().zip(&other.records) {
            ensure(a.same_deterministic(b), || format!("{name}: {} differs", a.strategy))?;
        }
    }
    Ok(format!("{} cells, {runs} runs, records identical across reruns and jobs; {:?}", exp.cells.len(), start.elapsed()))
}

fn mean_by(records: &[MetricsRecord], pick: impl Fn(&Strategy) -> bool, f: impl Fn(&MetricsRecord) -> f64) -> f64 {
    let xs: Vec<f64> = records.iter().filter(|r| pick(&r.strategy)).map(f).collect();
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn c10_directions() -> Check {
    let exp = experiment().as_ref()?;
    let rs = &exp.records;
    let rep = report(rs);
    let mr = rep.marginal("RTC", "MR").unwrap();
    let mt = rep.marginal("RTC", "MT").unwrap();
    let mut failures = Vec::new();
    if mr.effectiveness < mt.effectiveness {
        failures.push(format!("effectiveness MR {:.4} < MT {:.4}", mr.effectiveness, mt.effectiveness));
    }
    if mr.work_count <= mt.work_count {
        failures.push(format!("work_count MR {:.1} <= MT {:.1}", mr.work_count, mt.work_count));
    }
    let mut worse = Vec::new();
    for r in rs.iter().filter(|r| r.strategy.rs != Rs::None) {
        let base = Strategy { rs: Rs::None, cr: Cr::NoCr, ..r.strategy };
        let b = rs.iter().find(|x| x.strategy == base).unwrap();
        if r.eff_size >= b.eff_size {
            worse.push(r.strategy.to_string());
        }
    }
    if !worse.is_empty() {
        failures.push(format!("eff_size not below rs=None for {}", worse.join(" ")));
    }
    let reduced = mean_by(rs, |s| s.rs != Rs::None, |r| r.eff_size);
    let unreduced = mean_by(rs, |s| s.rs == Rs::None, |r| r.eff_size);
    let summary = format!(
        "effectiveness MR {:.4} / MT {:.4}; work_count MR {:.1} / MT {:.1}; eff_size reduced {reduced:.3} / unreduced {unreduced:.3}",
        mr.effectiveness, mt.effectiveness, mr.work_count, mt.work_count
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn c11_invalid_comparator() -> Check {
    let exp = experiment().as_ref()?;
    let h = VersionHistory::load(format!("{CORPUS}/scale")).map_err(|e| e.to_string())?;
    let f = Subject::new(h.clone()).unwrap().function;
    let spec = ComparatorSpec { mode: Rtc::Mr, newer: h.version(2), older: h.version(1), function: &f, modified_lines: BTreeSet::new() };
    let direct = mr_find_witnesses(&spec, &SearchConfig::default(), 1);
    ensure(matches!(direct, Err(CompareError::InvalidComparator { .. })), || format!("direct comparison gave {direct:?}"))?;
    let mr_rows: Vec<&MetricsRecord> = exp.records.iter().filter(|r| r.strategy.rtc == Rtc::Mr).collect();
    for r in &mr_rows {
        ensure(r.skipped.iter().any(|s| s.starts_with("scale:") && s.ends_with(":invalid-comparator")), || {
            format!("{} has no invalid-comparator skip", r.strategy)
        })?;
    }
    let mt_skips = exp.records.iter().filter(|r| r.strategy.rtc == Rtc::Mt).flat_map(|r| &r.skipped);
    ensure(mt_skips.clone().all(|s| !s.ends_with(":invalid-comparator")), || "MT row skipped a comparator".into())?;
    let scale_runs = exp.cells.iter().filter(|c| c.subject == "scale").map(|c| c.counted.len()).sum::<usize>();
    ensure(scale_runs > 0, || "scale produced no runs".into())?;
    let csv = metrics_to_csv(&exp.records);
    ensure(csv.contains("invalid-comparator"), || "CSV lacks the skip".into())?;
    Ok(format!("{} MR rows record the skip; {scale_runs} scale runs completed", mr_rows.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("running-example goldens", c1_goldens),
        ("ILP optimality", c2_ilp),
        ("DIFF golden", c3_diff),
        ("FAST++ properties", c4_fastpp),
        ("reduction dominance", c5_dominance),
        ("MR witness soundness", c6_mr),
        ("multiple-test distinctness", c7_distinct),
        ("strategy space", c8_strategies),
        ("pipeline invariants", c9_invariants),
        ("directional checks", c10_directions),
        ("invalid comparator", c11_invalid_comparator),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
