//! Generate a branch-covering suite, then ask for three tests reaching the
//! return of a two-path program.

use regstrat::cfa::{EdgeOp, EdgeRef};
use regstrat::exec::Executable;
use regstrat::minic::parse_valid;
use regstrat::testgen::{cover_branches, find_n_tests_for, SearchConfig};

fn main() {
    let cfg = SearchConfig::default();
    let p = parse_valid(include_str!("../corpus/find_last/p0.mc")).unwrap();
    let exe = Executable::new(&p, "find_last").unwrap();
    let cov = cover_branches(&exe, &exe.cfa.branch_goals(exe.entry), &cfg);
    print!("{}", cov.suite.to_text());
    for (g, why) in &cov.uncovered {
        println!("# {g} uncovered: {why}");
    }

    let f = parse_valid(include_str!("../corpus/fixtures/two_paths.mc")).unwrap();
    let exe = Executable::new(&f, "f").unwrap();
    let cfa = &exe.cfa.cfas[exe.entry];
    let returns: Vec<EdgeRef> = (0..cfa.edges.len())
        .filter(|&e| matches!(cfa.edges[e].op, EdgeOp::Return(_)))
        .map(|edge| EdgeRef { func: exe.entry, edge })
        .collect();
    let batch = find_n_tests_for(&exe, &returns, &cfg, 3);
    for t in &batch.tests {
        println!("{}", t.test);
    }
    println!("# stopped: {:?}", batch.stopped);
}
