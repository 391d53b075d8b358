//! Enumerate the mutants of P0 and pick one by seed.

use regstrat::minic::parse_valid;
use regstrat::mutate::{enumerate_mutants, list_operators, pick_mutant};

fn main() {
    for op in list_operators() {
        println!("{:<14} {}", op.id, op.description);
    }
    let p = parse_valid(include_str!("../corpus/find_last/p0.mc")).unwrap();
    let e = enumerate_mutants(&p, "find_last").unwrap();
    println!("{} mutants, {} rejected", e.mutants.len(), e.rejected.len());
    for m in &e.mutants {
        println!("{m}");
    }
    print!("{}", pick_mutant(&p, "find_last", 7).unwrap().to_file_text());
}
