//! Regression-test suite generation across a version history, the strategy
//! space it is parameterised by, and the metrics used to compare strategies.

mod experiment;
mod generate;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

pub use experiment::{run_experiment, CellRuns, Experiment, ExperimentConfig, MutantMode, Subject};
pub use generate::{detects, Bug, Generator, PipelineConfig, RevisionRun, Suites};
pub use report::{parse_metrics_csv, report, Report};

use crate::compare::{CompareError, Rtc};
use crate::exec::ExecError;
use crate::history::HistoryError;
use crate::mutate::MutateError;
use crate::reduce::{ReduceError, Rs};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Mutate(#[from] MutateError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("metrics row {row}: {message}")]
    Metrics { row: usize, message: String },
    #[error("history `{0}` has no patches")]
    NoRevisions(String),
}

/// Continuous reduction: which previous suite a revision starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cr {
    /// The reduced previous suite.
    Cr,
    /// The unreduced previous suite.
    NoCr,
    /// Nothing.
    None,
}

impl Cr {
    pub const ALL: [Cr; 3] = [Cr::Cr, Cr::NoCr, Cr::None];
}

impl fmt::Display for Cr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cr::Cr => "CR",
            Cr::NoCr => "No-CR",
            Cr::None => "None",
        })
    }
}

impl FromStr for Cr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cr" => Ok(Cr::Cr),
            "no-cr" | "nocr" => Ok(Cr::NoCr),
            "none" => Ok(Cr::None),
            _ => Err(format!("unknown CR setting `{s}` (CR, No-CR, None)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    pub rtc: Rtc,
    /// Tests generated per version pair.
    pub nrt: usize,
    /// Previous versions compared against.
    pub npr: usize,
    pub rs: Rs,
    pub cr: Cr,
}

impl Strategy {
    pub const BASELINE_1: Strategy = Strategy { rtc: Rtc::Mt, nrt: 1, npr: 1, rs: Rs::None, cr: Cr::NoCr };
    pub const BASELINE_2: Strategy = Strategy { rtc: Rtc::Mt, nrt: 1, npr: 1, rs: Rs::None, cr: Cr::None };

    /// Reducing nothing while keeping the reduced suite, or reducing a suite
    /// that was never accumulated, are both excluded.
    pub fn is_valid(&self) -> bool {
        (1..=3).contains(&self.nrt)
            && (1..=3).contains(&self.npr)
            && !(self.rs == Rs::None && self.cr == Cr::Cr)
            && !(self.cr == Cr::None && self.rs != Rs::None)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.rtc, self.nrt, self.npr, self.rs, self.cr)
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or("expected `[RTC,NRT,NPR,RS,CR]`")?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [rtc, nrt, npr, rs, cr] = parts[..] else {
            return Err(format!("expected 5 fields in `{s}`"));
        };
        let rtc = match rtc.to_ascii_uppercase().as_str() {
            "MT" => Rtc::Mt,
            "MR" => Rtc::Mr,
            _ => return Err(format!("unknown RTC `{rtc}`")),
        };
        let num = |v: &str| v.parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
        let st = Strategy { rtc, nrt: num(nrt)?, npr: num(npr)?, rs: rs.parse()?, cr: cr.parse()? };
        if !st.is_valid() {
            return Err(format!("invalid strategy {st}"));
        }
        Ok(st)
    }
}

/// All valid strategies in sorted order.
pub fn enumerate_strategies() -> Vec<Strategy> {
    let mut out = Vec::new();
    for rtc in [Rtc::Mt, Rtc::Mr] {
        for nrt in 1..=3 {
            for npr in 1..=3 {
                for rs in Rs::ALL {
                    for cr in Cr::ALL {
                        let s = Strategy { rtc, nrt, npr, rs, cr };
                        if s.is_valid() {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// The measurements of one revision run that the metrics aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub detected: bool,
    pub size: usize,
    /// Generation plus reduction time.
    pub cpu: Duration,
    /// Candidate executions spent on generation.
    pub work: u64,
}

pub fn effectiveness(runs: &[RunSummary]) -> f64 {
    mean(runs, |r| if r.detected { 1.0 } else { 0.0 })
}

pub fn efficiency_size(runs: &[RunSummary]) -> f64 {
    mean(runs, |r| r.size as f64)
}

pub fn efficiency_cpu_ms(runs: &[RunSummary]) -> f64 {
    mean(runs, |r| r.cpu.as_secs_f64() * 1000.0)
}

/// Detections per test kept and detections per CPU second; `None` when
/// the denominator is zero.
pub fn tradeoffs(runs: &[RunSummary]) -> (Option<f64>, Option<f64>) {
    let eff = effectiveness(runs);
    let size = efficiency_size(runs);
    let secs = efficiency_cpu_ms(runs) / 1000.0;
    ((size > 0.0).then(|| eff / size), (secs > 0.0).then(|| eff / secs))
}

fn mean(runs: &[RunSummary], f: impl Fn(&RunSummary) -> f64) -> f64 {
    if runs.is_empty() {
        return 0.0;
    }
    runs.iter().map(f).sum::<f64>() / runs.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub strategy: Strategy,
    pub mode: MutantMode,
    pub n: usize,
    pub effectiveness: f64,
    pub eff_size: f64,
    pub eff_cpu_ms: f64,
    pub work_count: u64,
    pub tradeoff_size: Option<f64>,
    pub tradeoff_cpu: Option<f64>,
    pub skipped: Vec<String>,
}

impl MetricsRecord {
    pub fn from_runs(strategy: Strategy, mode: MutantMode, runs: &[RunSummary], skipped: Vec<String>) -> Self {
        let (tradeoff_size, tradeoff_cpu) = tradeoffs(runs);
        MetricsRecord {
            strategy,
            mode,
            n: runs.len(),
            effectiveness: effectiveness(runs),
            eff_size: efficiency_size(runs),
            eff_cpu_ms: efficiency_cpu_ms(runs),
            work_count: runs.iter().map(|r| r.work).sum(),
            tradeoff_size,
            tradeoff_cpu,
            skipped,
        }
    }

    /// Equality on every column except the wall-clock ones.
    pub fn same_deterministic(&self, o: &MetricsRecord) -> bool {
        self.strategy == o.strategy
            && self.mode == o.mode
            && self.n == o.n
            && self.effectiveness.to_bits() == o.effectiveness.to_bits()
            && self.eff_size.to_bits() == o.eff_size.to_bits()
            && self.work_count == o.work_count
            && self.tradeoff_size.map(f64::to_bits) == o.tradeoff_size.map(f64::to_bits)
            && self.skipped == o.skipped
    }
}

pub const METRICS_COLUMNS: [&str; 15] = [
    "strategy",
    "rtc",
    "nrt",
    "npr",
    "rs",
    "cr",
    "n",
    "effectiveness",
    "eff_size",
    "eff_cpu_ms",
    "work_count",
    "tradeoff_size",
    "tradeoff_cpu",
    "skipped",
    "mode",
];

/// Marker written for a trade-off whose denominator is zero.
pub const UNDEFINED: &str = "NA";

pub fn metrics_to_csv(records: &[MetricsRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_COLUMNS).expect("in-memory write");
    let opt = |v: Option<f64>| v.map_or(UNDEFINED.to_string(), |x| x.to_string());
    for r in records {
        let s = r.strategy;
        w.write_record([
            s.to_string(),
            s.rtc.to_string(),
            s.nrt.to_string(),
            s.npr.to_string(),
            s.rs.to_string(),
            s.cr.to_string(),
            r.n.to_string(),
            r.effectiveness.to_string(),
            r.eff_size.to_string(),
            format!("{:.3}", r.eff_cpu_ms),
            r.work_count.to_string(),
            opt(r.tradeoff_size),
            opt(r.tradeoff_cpu),
            r.skipped.join(";"),
            r.mode.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(detected: bool, size: usize, ms: u64) -> RunSummary {
        RunSummary { detected, size, cpu: Duration::from_millis(ms), work: 1 }
    }

    #[test]
    fn strategy_space() {
        let all = enumerate_strategies();
        assert_eq!(all.len(), 144);
        // Independent count: 2 RTC x 3 NRT x 3 NPR x (4 RS x 3 CR minus the 4 invalid pairs).
        let invalid_pairs = Rs::ALL
            .iter()
            .flat_map(|&rs| Cr::ALL.iter().map(move |&cr| (rs, cr)))
            .filter(|&(rs, cr)| (rs == Rs::None && cr == Cr::Cr) || (cr == Cr::None && rs != Rs::None))
            .count();
        assert_eq!(invalid_pairs, 4);
        assert_eq!(all.len(), 2 * 3 * 3 * (12 - invalid_pairs));
        assert!(all.contains(&Strategy::BASELINE_1));
        assert!(all.contains(&Strategy::BASELINE_2));
        assert!(!all.contains(&Strategy { cr: Cr::Cr, ..Strategy::BASELINE_1 }));
        assert!(all.iter().all(|s| !(s.cr == Cr::None && s.rs != Rs::None)));
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
    }

    #[test]
    fn strategy_text_round_trip() {
        for s in enumerate_strategies() {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!(Strategy::BASELINE_1.to_string(), "[MT,1,1,None,No-CR]");
        assert!("[MT,1,1,None,CR]".parse::<Strategy>().is_err());
        assert!("[MT,1,1]".parse::<Strategy>().is_err());
    }

    #[test]
    fn metric_arithmetic() {
        let runs = [run(true, 2, 10), run(false, 4, 30)];
        assert_eq!(effectiveness(&runs), 0.5);
        assert_eq!(efficiency_size(&runs), 3.0);
        assert_eq!(efficiency_cpu_ms(&runs), 20.0);
        let (ts, tc) = tradeoffs(&runs);
        assert!((ts.unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((tc.unwrap() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn zero_detections_give_zero_tradeoffs() {
        let runs = [run(false, 2, 10), run(false, 1, 5)];
        assert_eq!(effectiveness(&runs), 0.0);
        assert_eq!(tradeoffs(&runs), (Some(0.0), Some(0.0)));
    }

    #[test]
    fn single_run_tradeoff() {
        assert_eq!(tradeoffs(&[run(true, 1, 1)]).0, Some(1.0));
    }

    #[test]
    fn empty_suites_leave_tradeoff_undefined() {
        let runs = [run(false, 0, 0)];
        assert_eq!(tradeoffs(&runs), (None, None));
        let rec = MetricsRecord::from_runs(Strategy::BASELINE_2, MutantMode::Seeded, &runs, vec![]);
        let csv = metrics_to_csv(&[rec]);
        assert!(csv.lines().nth(1).unwrap().contains(",NA,NA,"));
    }

    #[test]
    fn csv_header() {
        let csv = metrics_to_csv(&[]);
        assert_eq!(
            csv.trim_end(),
            "strategy,rtc,nrt,npr,rs,cr,n,effectiveness,eff_size,eff_cpu_ms,work_count,tradeoff_size,tradeoff_cpu,skipped,mode"
        );
    }
}
