//! Control-flow automaton of the running example, with its branch goals
//! and a label goal before line 6.

use std::collections::BTreeSet;

use regstrat::cfa::ProgramCfa;
use regstrat::minic::parse_valid;

fn main() {
    let p = parse_valid(include_str!("../corpus/find_last/p0.mc")).unwrap();
    let mut cfa = ProgramCfa::build(&p);
    let root = cfa.function_index("find_last").unwrap();
    for g in cfa.branch_goals(root) {
        println!("{} -> {}", g.id, cfa.edge(g.target).text);
    }
    let labels = cfa.insert_label_goals(root, &BTreeSet::from([6]));
    println!("labels: {:?}", labels.goals.iter().map(|g| &g.id).collect::<Vec<_>>());
    print!("{}", cfa.cfas[root].to_dot());
}
