use std::collections::BTreeSet;

use regstrat::compare::{differs_on, Rtc};
use regstrat::pipeline::{enumerate_strategies, run_experiment, Cr, ExperimentConfig, MutantMode, Strategy, Subject};
use regstrat::reduce::Rs;

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");

fn subject(name: &str) -> Subject {
    Subject::load(format!("{CORPUS}/{name}")).unwrap()
}

#[test]
fn mr_tests_reveal_a_difference_on_the_bug() {
    let s = subject("find_last");
    let strategies: Vec<Strategy> = enumerate_strategies().into_iter().filter(|s| s.rtc == Rtc::Mr).collect();
    let exp = run_experiment(std::slice::from_ref(&s), &strategies, &ExperimentConfig::default()).unwrap();
    for cell in &exp.cells {
        for run in &cell.chain {
            let prefix = format!("r{}p", run.revision);
            for t in run.pre_reduction.tests.iter().filter(|t| t.id.starts_with(&prefix)) {
                let j: usize = t.id[prefix.len()..].split('w').next().unwrap().parse().unwrap();
                let older = s.history.version(j);
                assert!(differs_on(&run.bug.program, older, &s.function, t).unwrap(), "{} {}", cell.strategy, t.id);
            }
        }
    }
}

#[test]
fn cr_none_suites_hold_only_new_tests() {
    let s = subject("grade");
    let st = Strategy { rtc: Rtc::Mt, nrt: 2, npr: 2, rs: Rs::None, cr: Cr::None };
    let exp = run_experiment(&[s], &[st], &ExperimentConfig { seeds: vec![4, 5], ..ExperimentConfig::default() }).unwrap();
    for cell in &exp.cells {
        for run in &cell.chain {
            assert_eq!(run.inherited, 0);
            assert_eq!(run.suite.len(), run.new_tests);
        }
    }
}

#[test]
fn all_mutants_mode_counts_every_mutant() {
    let s = subject("find_last");
    let cfg = ExperimentConfig { mode: MutantMode::AllMutants, ..ExperimentConfig::default() };
    let exp = run_experiment(std::slice::from_ref(&s), &[Strategy::BASELINE_1], &cfg).unwrap();
    let mutants: usize = (1..=s.history.len())
        .map(|i| regstrat::mutate::enumerate_mutants(s.history.version(i), &s.function).unwrap().mutants.len())
        .sum();
    assert_eq!(exp.records[0].n, mutants);
    let lines: BTreeSet<usize> = exp.cells[0].counted.iter().map(|r| r.bug.line).collect();
    assert!(lines.len() > 1);
}
