//! Modification-traversing and modification-revealing tests for the last
//! revision of the running example.

use std::collections::BTreeSet;

use regstrat::compare::{mr_find_witnesses, mt_goals, ComparatorSpec, Rtc};
use regstrat::history::VersionHistory;
use regstrat::testgen::{find_n_tests_for, SearchConfig};

fn main() {
    let h = VersionHistory::load(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/find_last")).unwrap();
    let cfg = SearchConfig::default();
    let spec = ComparatorSpec {
        mode: Rtc::Mt,
        newer: h.version(3),
        older: h.version(2),
        function: "find_last",
        modified_lines: h.lines_modified_since(3, 2),
    };
    let target = mt_goals(&spec).unwrap();
    let targets: Vec<_> = target.labels.goals.iter().map(|g| g.target).collect();
    for t in find_n_tests_for(&target.exe, &targets, &cfg, 2).tests {
        println!("mt: {}", t.test);
    }
    let spec = ComparatorSpec { mode: Rtc::Mr, modified_lines: BTreeSet::new(), ..spec };
    for w in mr_find_witnesses(&spec, &cfg, 2).unwrap().witnesses {
        print!("mr: {}", w.to_text());
    }
}
