//! Reduce the small coverage matrix with each strategy.

use regstrat::exec::{CoverageMatrix, TestSuite};
use regstrat::reduce::{emit_ilp, reduce, FastppConfig, Rs};

fn main() {
    let m = CoverageMatrix::from_csv(include_str!("../corpus/fixtures/small_matrix.csv")).unwrap();
    let suite = TestSuite::parse(include_str!("../corpus/fixtures/running_example.suite")).unwrap();
    for rs in Rs::ALL {
        let r = reduce(&m, rs, &suite.tests, &FastppConfig::default()).unwrap();
        println!("{rs:<7} {}", r.selected.join(","));
    }
    print!("{}", emit_ilp(&m));
}
