//! One strategy over the running-example history, revision by revision.

use regstrat::pipeline::{run_experiment, ExperimentConfig, Strategy, Subject};

fn main() {
    let subject = Subject::load(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/find_last")).unwrap();
    let strategy: Strategy = "[MR,2,2,ILP,CR]".parse().unwrap();
    let exp = run_experiment(&[subject], &[strategy], &ExperimentConfig::default()).unwrap();
    let cell = &exp.cells[0];
    println!("initial suite: {} tests", cell.initial.full.len());
    for run in &cell.chain {
        println!(
            "r{}: bug {}; inherited {}, new {}, kept {}, detected {}",
            run.revision,
            run.bug.mutant,
            run.inherited,
            run.new_tests,
            run.suite.len(),
            run.detected
        );
    }
    println!("skipped: {:?}", cell.skipped);
}
