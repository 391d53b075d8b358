//! Parse a MiniC program and print each function's signature.

use regstrat::minic::{parse_valid, pretty, signature_of};

fn main() {
    let text = include_str!("../corpus/find_last/p0.mc");
    let p = parse_valid(text).expect("valid program");
    for f in &p.functions {
        println!("{}", signature_of(&p, &f.name).unwrap());
    }
    print!("{}", pretty(&p));
}
