//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cfa::{EdgeOp, EdgeRef};
use crate::compare::{mr_find_witnesses_exe, mt_goals_for, Rtc};
use crate::exec::{coverage_matrix, CoverageMatrix, Executable, Limits, TestSuite};
use crate::history::{modified_lines, Patch};
use crate::minic::{self, SourceProgram};
use crate::mutate::{enumerate_mutants, list_operators, pick_mutant};
use crate::pipeline::{
    enumerate_strategies, metrics_to_csv, parse_metrics_csv, report, run_experiment, ExperimentConfig, MutantMode,
    Strategy, Subject,
};
use crate::reduce::{emit_ilp, reduce, FastppConfig, Rs};
use crate::testgen::{cover_branches, find_n_tests_for, InputDomain, SearchConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    /// Program diagnostics read `file:line:col: message`.
    #[error("{path}:{source}")]
    Source { path: String, source: minic::MinicError },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "regstrat", version, about = "Regression-test generation, selection and reduction for MiniC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check a program; print each function's signature.
    Parse {
        file: PathBuf,
        /// Print the normalised program text instead.
        #[arg(long)]
        pretty: bool,
    },
    /// Print the control-flow automaton and its test goals.
    CfaDump {
        file: PathBuf,
        #[arg(long)]
        function: Option<String>,
        /// Insert label goals before these lines (comma-separated).
        #[arg(long, value_delimiter = ',')]
        labels: Vec<usize>,
    },
    /// Run tests and print their outcomes, or a coverage matrix.
    Exec {
        file: PathBuf,
        #[arg(long)]
        function: Option<String>,
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        suite: Option<PathBuf>,
        /// A single test line, e.g. `test t1: x=[1,2]; y=3`.
        #[arg(long)]
        input: Option<String>,
        /// Print the branch-coverage matrix as CSV instead of outcomes.
        #[arg(long)]
        matrix: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a branch-covering suite, or several tests for one goal.
    Testgen {
        file: PathBuf,
        #[arg(long)]
        function: Option<String>,
        /// `gK` for one branch goal, or `return` for any return statement.
        #[arg(long)]
        goal: Option<String>,
        #[arg(short = 'n', long, default_value_t = 1, requires = "goal")]
        count: usize,
        /// Also write the coverage matrix here.
        #[arg(long, conflicts_with = "goal")]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tests that traverse modified lines (mt) or reveal a difference (mr).
    Compare {
        #[arg(long)]
        newer: PathBuf,
        #[arg(long)]
        older: PathBuf,
        #[arg(long, value_parser = parse_rtc)]
        mode: Rtc,
        #[arg(long)]
        function: Option<String>,
        /// MT: modified lines of the newer version (comma-separated).
        #[arg(long, value_delimiter = ',', conflicts_with = "patch")]
        lines: Vec<usize>,
        /// MT: take the modified lines from this patch file.
        #[arg(long)]
        patch: Option<PathBuf>,
        #[arg(short = 'n', long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a coverage matrix and print the selected test ids.
    Reduce {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_parser = parse_rs)]
        strategy: Rs,
        /// Suite file with the test inputs (needed for fastpp).
        #[arg(long)]
        inputs: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the 0/1 program instead of solving it.
        #[arg(long)]
        emit_ilp: bool,
    },
    /// List mutation operators or produce mutants.
    Mutate {
        #[arg(required_unless_present = "list")]
        file: Option<PathBuf>,
        #[arg(long)]
        function: Option<String>,
        #[arg(long, conflicts_with_all = ["seed", "all"])]
        list: bool,
        #[arg(long, conflicts_with = "all")]
        seed: Option<u64>,
        /// Print every mutant as a one-line summary.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one strategy over a history and print each revision.
    Run {
        #[arg(long)]
        history: PathBuf,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        label_mutation_site: bool,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Run strategies over histories and write the metrics CSV.
    Experiment(ExperimentArgs),
    /// Summarise a metrics CSV.
    Report { metrics: PathBuf },
}

#[derive(Debug, Clone, Default, Args)]
pub struct DomainArgs {
    /// Smallest scalar input.
    #[arg(long, allow_negative_numbers = true)]
    pub scalar_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub scalar_max: Option<i64>,
    /// Longest array input.
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub elem_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub elem_max: Option<i64>,
    /// Candidate executions per search.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// History directory (`p0.mc`, `patch1.diff`, ...); repeatable.
    #[arg(long)]
    pub history: Vec<PathBuf>,
    #[arg(long, conflicts_with = "strategy")]
    pub all_strategies: bool,
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Vec<Strategy>,
    /// Master seed; repeatable.
    #[arg(long)]
    pub seed: Vec<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Evaluate every mutant instead of one seeded mutant per revision.
    #[arg(long)]
    pub all_mutants: bool,
    #[arg(long)]
    pub label_mutation_site: bool,
    /// TOML file with the same keys as these flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Keys accepted in an experiment `--config` file.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    history: Option<Vec<PathBuf>>,
    all_strategies: Option<bool>,
    strategy: Option<Vec<String>>,
    seed: Option<Vec<u64>>,
    jobs: Option<usize>,
    all_mutants: Option<bool>,
    label_mutation_site: Option<bool>,
    scalar_min: Option<i64>,
    scalar_max: Option<i64>,
    max_len: Option<usize>,
    elem_min: Option<i64>,
    elem_max: Option<i64>,
    budget: Option<u64>,
    out: Option<PathBuf>,
}

fn parse_rtc(s: &str) -> Result<Rtc, String> {
    match s.to_ascii_lowercase().as_str() {
        "mt" => Ok(Rtc::Mt),
        "mr" => Ok(Rtc::Mr),
        _ => Err(format!("unknown mode `{s}` (mt, mr)")),
    }
}

fn parse_rs(s: &str) -> Result<Rs, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

impl DomainArgs {
    fn merged(&self, base: SearchConfig) -> Result<SearchConfig, CliError> {
        let d = base.domain;
        let domain = InputDomain {
            scalar: (self.scalar_min.unwrap_or(d.scalar.0), self.scalar_max.unwrap_or(d.scalar.1)),
            max_len: self.max_len.unwrap_or(d.max_len),
            element: (self.elem_min.unwrap_or(d.element.0), self.elem_max.unwrap_or(d.element.1)),
        };
        if !domain.is_valid() {
            return Err(CliError::Usage(format!("empty input domain {domain:?}")));
        }
        Ok(SearchConfig { domain, budget: self.budget.unwrap_or(base.budget), ..base })
    }

    fn or_file(mut self, f: &FileConfig) -> DomainArgs {
        self.scalar_min = self.scalar_min.or(f.scalar_min);
        self.scalar_max = self.scalar_max.or(f.scalar_max);
        self.max_len = self.max_len.or(f.max_len);
        self.elem_min = self.elem_min.or(f.elem_min);
        self.elem_max = self.elem_max.or(f.elem_max);
        self.budget = self.budget.or(f.budget);
        self
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input { path: path.display().to_string(), message: e.to_string() })
}

fn load_program(path: &Path) -> Result<SourceProgram, CliError> {
    minic::parse_valid(&read(path)?).map_err(|source| CliError::Source { path: path.display().to_string(), source })
}

fn pick_function(p: &SourceProgram, requested: &Option<String>) -> Result<String, CliError> {
    match requested {
        Some(f) if p.function(f).is_some() => Ok(f.clone()),
        Some(f) => Err(domain(minic::MinicError::UnknownFunction(f.clone()))),
        None => p.entry_function().map(str::to_string).ok_or_else(|| domain("program has no functions")),
    }
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input { path: p.display().to_string(), message: e.to_string() }),
        None => out.write_all(text.as_bytes()).map_err(domain),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> std::process::ExitCode {
    let code = execute(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::ExitCode::from(code as u8)
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Parse { file, pretty } => {
            let p = load_program(&file)?;
            if pretty {
                emit(out, &None, &minic::pretty(&p))
            } else {
                let mut text = String::new();
                for f in &p.functions {
                    let sig = minic::signature_of(&p, &f.name).map_err(domain)?;
                    text.push_str(&format!("{sig}  lines {}-{}\n", f.first_line, f.last_line));
                }
                emit(out, &None, &text)
            }
        }
        Command::CfaDump { file, function, labels } => {
            let p = load_program(&file)?;
            let f = pick_function(&p, &function)?;
            let mut pc = crate::cfa::ProgramCfa::build(&p);
            let root = pc.function_index(&f).expect("checked function");
            let inserted = pc.insert_label_goals(root, &labels.iter().copied().collect());
            let mut text = String::new();
            for idx in pc.reachable(root) {
                text.push_str(&pc.cfas[idx].to_dot());
            }
            for g in pc.branch_goals(root).iter().chain(&inserted.goals) {
                let e = pc.edge(g.target);
                text.push_str(&format!("// {}: line {} `{}`\n", g.id, e.line, e.text));
            }
            for l in &inserted.ignored {
                let _ = writeln!(err, "warning: no code at or after line {l}; label ignored");
            }
            emit(out, &None, &text)
        }
        Command::Exec { file, function, suite, input, matrix, out: path } => {
            let p = load_program(&file)?;
            let f = pick_function(&p, &function)?;
            let exe = Executable::new(&p, &f).map_err(domain)?;
            let suite = match (suite, input) {
                (Some(s), _) => TestSuite::parse(&read(&s)?).map_err(|e| CliError::Input {
                    path: s.display().to_string(),
                    message: e.to_string(),
                })?,
                (None, Some(line)) => TestSuite::new(vec![line.parse().map_err(CliError::Usage)?]),
                (None, None) => unreachable!("clap requires one of --suite/--input"),
            };
            let text = if matrix {
                let goals = exe.cfa.branch_goals(exe.entry);
                coverage_matrix(&exe, &suite, &goals, Limits::default()).map_err(domain)?.to_csv()
            } else {
                let mut text = String::new();
                for t in &suite.tests {
                    let (o, _) = exe.run_test(t, Limits::default()).map_err(domain)?;
                    text.push_str(&format!("{}: {o}\n", t.id));
                }
                text
            };
            emit(out, &path, &text)
        }
        Command::Testgen { file, function, goal, count, matrix, domain: d, out: path } => {
            let p = load_program(&file)?;
            let f = pick_function(&p, &function)?;
            let exe = Executable::new(&p, &f).map_err(domain)?;
            let cfg = d.merged(SearchConfig::default())?;
            let goals = exe.cfa.branch_goals(exe.entry);
            match goal {
                None => {
                    let cov = cover_branches(&exe, &goals, &cfg);
                    for (g, why) in &cov.uncovered {
                        let _ = writeln!(err, "uncovered {g}: {why}");
                    }
                    if let Some(m) = matrix {
                        emit(out, &Some(m), &cov.matrix.to_csv())?;
                    }
                    emit(out, &path, &cov.suite.to_text())
                }
                Some(g) => {
                    let targets: Vec<EdgeRef> = if g == "return" {
                        let cfa = &exe.cfa.cfas[exe.entry];
                        (0..cfa.edges.len())
                            .filter(|&e| matches!(cfa.edges[e].op, EdgeOp::Return(_)))
                            .map(|edge| EdgeRef { func: exe.entry, edge })
                            .collect()
                    } else {
                        let goal = goals.iter().find(|x| x.id == g).ok_or_else(|| {
                            CliError::Usage(format!("unknown goal `{g}` ({} branch goals)", goals.len()))
                        })?;
                        vec![goal.target]
                    };
                    let batch = find_n_tests_for(&exe, &targets, &cfg, count);
                    if let Some(why) = batch.stopped {
                        let _ = writeln!(err, "found {} of {count}: {why}", batch.tests.len());
                    }
                    let suite = TestSuite::new(batch.tests.into_iter().map(|t| t.test).collect());
                    emit(out, &path, &suite.to_text())
                }
            }
        }
        Command::Compare { newer, older, mode, function, lines, patch, count, domain: d, out: path } => {
            let pn = load_program(&newer)?;
            let po = load_program(&older)?;
            let f = pick_function(&pn, &function)?;
            let cfg = d.merged(SearchConfig::default())?;
            match mode {
                Rtc::Mt => {
                    let lines: BTreeSet<usize> = match patch {
                        Some(pp) => {
                            let patch = Patch::parse(&read(&pp)?).map_err(|e| CliError::Input {
                                path: pp.display().to_string(),
                                message: e.to_string(),
                            })?;
                            modified_lines(&patch).all()
                        }
                        None => lines.into_iter().collect(),
                    };
                    let target = mt_goals_for(&pn, &f, &lines).map_err(domain)?;
                    for l in &target.labels.ignored {
                        let _ = writeln!(err, "warning: line {l} outside every function; ignored");
                    }
                    let targets: Vec<EdgeRef> = target.labels.goals.iter().map(|g| g.target).collect();
                    let batch = find_n_tests_for(&target.exe, &targets, &cfg, count);
                    if let Some(why) = batch.stopped {
                        let _ = writeln!(err, "found {} of {count}: {why}", batch.tests.len());
                    }
                    let suite = TestSuite::new(batch.tests.into_iter().map(|t| t.test).collect());
                    emit(out, &path, &suite.to_text())
                }
                Rtc::Mr => {
                    let a = Executable::new(&pn, &f).map_err(domain)?;
                    let b = Executable::new(&po, &f).map_err(domain)?;
                    let batch = mr_find_witnesses_exe(&a, &b, &cfg, count).map_err(domain)?;
                    if let Some(why) = batch.stopped {
                        let _ = writeln!(err, "found {} of {count}: {why}", batch.witnesses.len());
                    }
                    let text: String = batch.witnesses.iter().map(|w| w.to_text()).collect();
                    emit(out, &path, &text)
                }
            }
        }
        Command::Reduce { matrix, strategy, inputs, seed, emit_ilp: ilp_text } => {
            let m = CoverageMatrix::from_csv(&read(&matrix)?)
                .map_err(|e| CliError::Input { path: matrix.display().to_string(), message: e.to_string() })?;
            if ilp_text {
                return emit(out, &None, &emit_ilp(&m));
            }
            let tests = match inputs {
                Some(p) => {
                    TestSuite::parse(&read(&p)?)
                        .map_err(|e| CliError::Input { path: p.display().to_string(), message: e.to_string() })?
                        .tests
                }
                None if strategy == Rs::FastPp => {
                    return Err(CliError::Usage("--strategy fastpp needs --inputs".into()));
                }
                None => Vec::new(),
            };
            let r = reduce(&m, strategy, &tests, &FastppConfig { seed, ..FastppConfig::default() }).map_err(domain)?;
            if !r.dropped.is_empty() {
                let _ = writeln!(err, "dropped uncoverable goals: {}", r.dropped.join(", "));
            }
            emit(out, &None, &format!("{}\n", r.selected.join(",")))
        }
        Command::Mutate { file, function, list, seed, all, out: path } => {
            if list {
                let text: String = list_operators()
                    .iter()
                    .map(|o| format!("{:<14} {:<22} {}\n", o.id, o.group.to_string(), o.description))
                    .collect();
                return emit(out, &None, &text);
            }
            let file = file.expect("clap requires a file unless --list");
            let p = load_program(&file)?;
            let f = pick_function(&p, &function)?;
            if all {
                let e = enumerate_mutants(&p, &f).map_err(domain)?;
                let text: String = e.mutants.iter().map(|m| format!("{m}\n")).collect();
                let _ = writeln!(err, "{} mutants, {} rejected", e.mutants.len(), e.rejected.len());
                return emit(out, &path, &text);
            }
            let m = pick_mutant(&p, &f, seed.unwrap_or(0)).map_err(domain)?;
            emit(out, &path, &m.to_file_text())
        }
        Command::Run { history, strategy, seed, label_mutation_site, domain: d } => {
            let subject = Subject::load(&history).map_err(domain)?;
            let mut cfg = ExperimentConfig::default();
            cfg.pipeline.search = d.merged(cfg.pipeline.search)?;
            cfg.pipeline.label_mutation_site = label_mutation_site;
            cfg.seeds = vec![seed];
            let e = run_experiment(std::slice::from_ref(&subject), &[strategy], &cfg).map_err(domain)?;
            let cell = &e.cells[0];
            let mut text = format!("{} on {} (function {}), seed {seed}\n", strategy, subject.history.name, subject.function);
            text.push_str(&format!("initial suite: {} tests\n", cell.initial.full.len()));
            for r in &cell.chain {
                text.push_str(&format!(
                    "r{}: bug {} | inherited {} new {} size {} | detected {} | work {}\n",
                    r.revision,
                    r.bug.mutant,
                    r.inherited,
                    r.new_tests,
                    r.suite.len(),
                    u8::from(r.detected),
                    r.work
                ));
            }
            for s in &cell.skipped {
                text.push_str(&format!("skipped {s}\n"));
            }
            emit(out, &None, &text)
        }
        Command::Experiment(args) => experiment(args, out, err),
        Command::Report { metrics } => {
            let records = parse_metrics_csv(&read(&metrics)?)
                .map_err(|e| CliError::Input { path: metrics.display().to_string(), message: e.to_string() })?;
            if records.is_empty() {
                return Err(CliError::Input { path: metrics.display().to_string(), message: "no rows".into() });
            }
            emit(out, &None, &report(&records).to_string())
        }
    }
}

fn experiment(args: ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let file: FileConfig = match &args.config {
        Some(p) => toml::from_str(&read(p)?)
            .map_err(|e| CliError::Input { path: p.display().to_string(), message: e.to_string() })?,
        None => FileConfig::default(),
    };
    let histories = if args.history.is_empty() { file.history.clone().unwrap_or_default() } else { args.history };
    if histories.is_empty() {
        return Err(CliError::Usage("at least one --history is required".into()));
    }
    let strategies: Vec<Strategy> = if !args.strategy.is_empty() {
        args.strategy
    } else if args.all_strategies || file.all_strategies == Some(true) {
        enumerate_strategies()
    } else if let Some(list) = &file.strategy {
        list.iter().map(|s| s.parse()).collect::<Result<_, _>>().map_err(CliError::Usage)?
    } else {
        return Err(CliError::Usage("give --all-strategies or at least one --strategy".into()));
    };
    let mut cfg = ExperimentConfig::default();
    cfg.pipeline.search = args.domain.or_file(&file).merged(cfg.pipeline.search)?;
    cfg.pipeline.label_mutation_site = args.label_mutation_site || file.label_mutation_site == Some(true);
    cfg.seeds = if args.seed.is_empty() { file.seed.clone().unwrap_or_else(|| vec![0]) } else { args.seed };
    cfg.jobs = args.jobs.or(file.jobs).unwrap_or(0);
    cfg.mode = if args.all_mutants || file.all_mutants == Some(true) { MutantMode::AllMutants } else { MutantMode::Seeded };
    let subjects: Vec<Subject> = histories.iter().map(Subject::load).collect::<Result<_, _>>().map_err(domain)?;
    let e = run_experiment(&subjects, &strategies, &cfg).map_err(domain)?;
    let _ = writeln!(
        err,
        "{} strategies x {} histories x {} seeds ({} mode)",
        strategies.len(),
        subjects.len(),
        cfg.seeds.len(),
        cfg.mode
    );
    emit(out, &args.out.or(file.out), &metrics_to_csv(&e.records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(rel: &str) -> String {
        format!("{}/corpus/{rel}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["regstrat"];
        full.extend_from_slice(args);
        let code = execute(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn reduce_small_matrix() {
        let (code, out, _) = run(&["reduce", "--matrix", &corpus("fixtures/small_matrix.csv"), "--strategy", "ilp"]);
        assert_eq!((code, out.as_str()), (0, "t1,t3\n"));
        let (_, out, _) = run(&["reduce", "--matrix", &corpus("fixtures/small_matrix.csv"), "--strategy", "diff"]);
        assert_eq!(out, "t3,t1\n");
    }

    #[test]
    fn parse_error_has_position() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.mc");
        fs::write(&bad, "int f() {\n    return 1 +;\n}\n").unwrap();
        let (code, out, err) = run(&["parse", bad.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1);
        assert!(err.contains("bad.mc:2:"), "{err}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&["reduce", "--bogus"]).0, 2);
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["mutate", "--list", "--seed", "3"]).0, 2);
        assert_eq!(run(&["reduce", "--matrix", &corpus("fixtures/small_matrix.csv"), "--strategy", "fastpp"]).0, 2);
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run(&["experiment", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("--jobs"));
    }

    #[test]
    fn exec_running_example() {
        let (code, out, _) = run(&[
            "exec",
            &corpus("find_last/p0.mc"),
            "--suite",
            &corpus("fixtures/running_example.suite"),
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("t1: returned(-1)\nt2: returned(0)\n"), "{out}");
    }

    #[test]
    fn mutate_writes_header() {
        let dir = tempfile::tempdir().unwrap();
        let dest = dir.path().join("m.mc");
        let (code, _, _) =
            run(&["mutate", &corpus("find_last/p0.mc"), "--seed", "3", "--out", dest.to_str().unwrap()]);
        assert_eq!(code, 0);
        let text = fs::read_to_string(&dest).unwrap();
        assert!(text.starts_with("// mutant: "));
        assert!(minic::parse_valid(&text).is_ok());
        let (_, list, _) = run(&["mutate", "--list"]);
        assert_eq!(list.lines().count(), list_operators().len());
    }

    #[test]
    fn compare_modes() {
        let dir = tempfile::tempdir().unwrap();
        let h = crate::history::VersionHistory::load(corpus("find_last")).unwrap();
        let p2 = dir.path().join("p2.mc");
        let p3 = dir.path().join("p3.mc");
        fs::write(&p2, minic::render(h.version(2))).unwrap();
        fs::write(&p3, minic::render(h.version(3))).unwrap();
        let (code, out, _) =
            run(&["compare", "--newer", p3.to_str().unwrap(), "--older", p2.to_str().unwrap(), "--mode", "mr"]);
        assert_eq!(code, 0);
        assert!(out.contains("test w3197: x=[2,-8]; y=-7"), "{out}");
        let (code, out, _) = run(&[
            "compare",
            "--newer",
            p3.to_str().unwrap(),
            "--older",
            p2.to_str().unwrap(),
            "--mode",
            "mt",
            "--patch",
            &corpus("find_last/patch3.diff"),
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
        let p4 = corpus("fixtures/find_last_p4.mc");
        let (code, _, err) = run(&["compare", "--newer", &p4, "--older", p2.to_str().unwrap(), "--mode", "mr"]);
        assert_eq!(code, 1);
        assert!(err.contains("invalid comparator"));
    }

    #[test]
    fn config_file_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("exp.toml");
        let metrics = dir.path().join("m.csv");
        fs::write(
            &cfg,
            format!(
                "history = [{:?}]\nstrategy = [\"[MT,1,1,None,No-CR]\"]\nseed = [1]\nmax-len = 2\nout = {:?}\n",
                corpus("find_last"),
                metrics.to_str().unwrap()
            ),
        )
        .unwrap();
        let (code, _, err) = run(&["experiment", "--config", cfg.to_str().unwrap(), "--jobs", "2"]);
        assert_eq!(code, 0, "{err}");
        let text = fs::read_to_string(&metrics).unwrap();
        assert_eq!(text.lines().count(), 2);
        let (code, out, _) = run(&["report", metrics.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("[MT,1,1,None,No-CR]"));

        fs::write(&cfg, "colour = 3\n").unwrap();
        assert_eq!(run(&["experiment", "--config", cfg.to_str().unwrap()]).0, 1);
    }
}
