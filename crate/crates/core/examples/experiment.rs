//! Every strategy over the shipped histories, then the summary report.
//! Pass `--csv` to print the metrics CSV instead.

use regstrat::pipeline::{enumerate_strategies, metrics_to_csv, report, run_experiment, ExperimentConfig, Subject};

fn main() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
    let subjects: Vec<Subject> = ["find_last", "grade", "count_range", "scale"]
        .iter()
        .map(|s| Subject::load(format!("{root}/{s}")).unwrap())
        .collect();
    let cfg = ExperimentConfig { seeds: vec![1, 2, 3], ..ExperimentConfig::default() };
    let exp = run_experiment(&subjects, &enumerate_strategies(), &cfg).unwrap();
    if std::env::args().any(|a| a == "--csv") {
        print!("{}", metrics_to_csv(&exp.records));
    } else {
        print!("{}", report(&exp.records));
    }
}
