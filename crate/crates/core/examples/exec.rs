//! Run the running-example suite against P0 and print the coverage matrix.

use regstrat::exec::{coverage_matrix, Executable, Limits, TestSuite};
use regstrat::minic::parse_valid;

fn main() {
    let p = parse_valid(include_str!("../corpus/find_last/p0.mc")).unwrap();
    let suite = TestSuite::parse(include_str!("../corpus/fixtures/running_example.suite")).unwrap();
    let exe = Executable::new(&p, "find_last").unwrap();
    for t in &suite.tests {
        let (outcome, trace) = exe.run_test(t, Limits::default()).unwrap();
        println!("{t}  =>  {outcome}  ({} branches)", trace.assumes.len());
    }
    let goals = exe.cfa.branch_goals(exe.entry);
    print!("{}", coverage_matrix(&exe, &suite, &goals, Limits::default()).unwrap().to_csv());
}
