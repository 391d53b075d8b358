use std::collections::BTreeMap;
use std::fmt;

use super::{MetricsRecord, MutantMode, PipelineError, Strategy, METRICS_COLUMNS, UNDEFINED};

/// Reads a metrics CSV. The trailing `mode` column is optional.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRecord>, PipelineError> {
    let err = |row: usize, message: String| PipelineError::Metrics { row, message };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let mut idx = BTreeMap::new();
    for name in &METRICS_COLUMNS[..14] {
        idx.insert(*name, col(name).ok_or_else(|| err(1, format!("missing column `{name}`")))?);
    }
    let mode_col = col("mode");
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let row = n + 2;
        let rec = rec.map_err(|e| err(row, e.to_string()))?;
        let get = |name: &str| rec.get(idx[name]).unwrap_or("").trim();
        let num = |name: &str| get(name).parse::<f64>().map_err(|_| err(row, format!("`{name}` is not a number: {:?}", get(name))));
        let opt = |name: &str| if get(name) == UNDEFINED { Ok(None) } else { num(name).map(Some) };
        let strategy: Strategy = get("strategy").parse().map_err(|e: String| err(row, e))?;
        let mode = match mode_col.and_then(|c| rec.get(c)) {
            Some(m) if !m.trim().is_empty() => m.trim().parse().map_err(|e: String| err(row, e))?,
            _ => MutantMode::Seeded,
        };
        let skipped = get("skipped");
        out.push(MetricsRecord {
            strategy,
            mode,
            n: get("n").parse().map_err(|_| err(row, format!("`n` is not a count: {:?}", get("n"))))?,
            effectiveness: num("effectiveness")?,
            eff_size: num("eff_size")?,
            eff_cpu_ms: num("eff_cpu_ms")?,
            work_count: get("work_count")
                .parse()
                .map_err(|_| err(row, format!("`work_count` is not a count: {:?}", get("work_count"))))?,
            tradeoff_size: opt("tradeoff_size")?,
            tradeoff_cpu: opt("tradeoff_cpu")?,
            skipped: if skipped.is_empty() { Vec::new() } else { skipped.split(';').map(str::to_string).collect() },
        });
    }
    Ok(out)
}

/// Mean of each metric over the rows sharing one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub value: String,
    pub rows: usize,
    pub effectiveness: f64,
    pub eff_size: f64,
    pub eff_cpu_ms: f64,
    pub work_count: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extreme {
    pub metric: &'static str,
    pub best: (Strategy, f64),
    pub worst: (Strategy, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: usize,
    /// Per parameter (RTC, NRT, NPR, RS, CR), one entry per value in strategy order.
    pub marginals: Vec<(&'static str, Vec<Marginal>)>,
    pub extremes: Vec<Extreme>,
}

impl Report {
    pub fn marginal(&self, param: &str, value: &str) -> Option<&Marginal> {
        self.marginals.iter().find(|(p, _)| *p == param)?.1.iter().find(|m| m.value == value)
    }
}

type Key = fn(&Strategy) -> String;

pub fn report(records: &[MetricsRecord]) -> Report {
    let mut sorted: Vec<&MetricsRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.strategy.cmp(&b.strategy));
    let params: [(&'static str, Key); 5] = [
        ("RTC", |s| s.rtc.to_string()),
        ("NRT", |s| s.nrt.to_string()),
        ("NPR", |s| s.npr.to_string()),
        ("RS", |s| s.rs.to_string()),
        ("CR", |s| s.cr.to_string()),
    ];
    let marginals = params
        .iter()
        .map(|(name, key)| {
            let mut groups: Vec<(String, Vec<&MetricsRecord>)> = Vec::new();
            // Strategy order ranks values consistently, e.g. MT before MR.
            let mut order: Vec<(&Strategy, String)> = sorted.iter().map(|r| (&r.strategy, key(&r.strategy))).collect();
            order.sort_by(|a, b| param_rank(name, a.0).cmp(&param_rank(name, b.0)));
            for (_, v) in order {
                if !groups.iter().any(|(g, _)| *g == v) {
                    groups.push((v, Vec::new()));
                }
            }
            for r in &sorted {
                let v = key(&r.strategy);
                groups.iter_mut().find(|(g, _)| *g == v).expect("value seen").1.push(r);
            }
            let table = groups
                .into_iter()
                .map(|(value, rs)| {
                    let m = |f: fn(&MetricsRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / rs.len() as f64;
                    Marginal {
                        value,
                        rows: rs.len(),
                        effectiveness: m(|r| r.effectiveness),
                        eff_size: m(|r| r.eff_size),
                        eff_cpu_ms: m(|r| r.eff_cpu_ms),
                        work_count: m(|r| r.work_count as f64),
                    }
                })
                .collect();
            (*name, table)
        })
        .collect();

    type Metric = (&'static str, fn(&MetricsRecord) -> Option<f64>, bool);
    let metrics: [Metric; 6] = [
        ("effectiveness", |r| Some(r.effectiveness), true),
        ("eff_size", |r| Some(r.eff_size), false),
        ("eff_cpu_ms", |r| Some(r.eff_cpu_ms), false),
        ("work_count", |r| Some(r.work_count as f64), false),
        ("tradeoff_size", |r| r.tradeoff_size, true),
        ("tradeoff_cpu", |r| r.tradeoff_cpu, true),
    ];
    let extremes = metrics
        .iter()
        .filter_map(|&(metric, get, higher_is_better)| {
            let vals: Vec<(Strategy, f64)> = sorted.iter().filter_map(|r| get(r).map(|v| (r.strategy, v))).collect();
            let first = *vals.first()?;
            let (mut hi, mut lo) = (first, first);
            for &(s, v) in &vals[1..] {
                if v > hi.1 {
                    hi = (s, v);
                }
                if v < lo.1 {
                    lo = (s, v);
                }
            }
            let (best, worst) = if higher_is_better { (hi, lo) } else { (lo, hi) };
            Some(Extreme { metric, best, worst })
        })
        .collect();
    Report { rows: records.len(), marginals, extremes }
}

fn param_rank(name: &str, s: &Strategy) -> (u8, usize) {
    match name {
        "RTC" => (s.rtc as u8, 0),
        "NRT" => (0, s.nrt),
        "NPR" => (0, s.npr),
        "RS" => (s.rs as u8, 0),
        _ => (s.cr as u8, 0),
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        for (param, table) in &self.marginals {
            writeln!(f)?;
            writeln!(f, "{:<8} {:>5} {:>13} {:>10} {:>12} {:>12}", param, "rows", "effectiveness", "eff_size", "eff_cpu_ms", "work_count")?;
            for m in table {
                writeln!(
                    f,
                    "{:<8} {:>5} {:>13.4} {:>10.3} {:>12.3} {:>12.1}",
                    m.value, m.rows, m.effectiveness, m.eff_size, m.eff_cpu_ms, m.work_count
                )?;
            }
        }
        writeln!(f)?;
        writeln!(f, "{:<14} {:<24} {:>12} {:<24} {:>12}", "metric", "best", "value", "worst", "value")?;
        for e in &self.extremes {
            writeln!(
                f,
                "{:<14} {:<24} {:>12.4} {:<24} {:>12.4}",
                e.metric,
                e.best.0.to_string(),
                e.best.1,
                e.worst.0.to_string(),
                e.worst.1
            )?;
        }
        Ok(())
    }
}
