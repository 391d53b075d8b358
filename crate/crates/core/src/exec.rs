//! Concrete interpreter over [`ProgramCfa`], with path tracing.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cfa::{EdgeOp, EdgeRef, ProgramCfa, RArg, RExpr, RTarget, Succ, TestGoal};
use crate::minic::{self, AssignOp, BinOp, ParamKind, ReturnKind, SourceProgram, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Program(#[from] minic::MinicError),
    #[error("test {test} does not match {signature}")]
    SignatureMismatch { test: String, signature: String },
    #[error("suite line {line}: {message}")]
    SuiteSyntax { line: usize, message: String },
    #[error("coverage matrix row {row}: {message}")]
    MatrixSyntax { row: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InputValue {
    Int(i64),
    Array(Vec<i64>),
}

impl InputValue {
    pub fn kind(&self) -> ParamKind {
        match self {
            InputValue::Int(_) => ParamKind::Int,
            InputValue::Array(_) => ParamKind::IntArray,
        }
    }
}

impl fmt::Display for InputValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputValue::Int(v) => write!(f, "{v}"),
            InputValue::Array(vs) => {
                let items: Vec<String> = vs.iter().map(i64::to_string).collect();
                write!(f, "[{}]", items.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestCase {
    pub id: String,
    pub bindings: Vec<(String, InputValue)>,
}

impl TestCase {
    pub fn new(id: impl Into<String>, bindings: Vec<(String, InputValue)>) -> Self {
        TestCase { id: id.into(), bindings }
    }

    /// Binds `values` positionally to the parameter names of `params`.
    pub fn from_values(id: impl Into<String>, params: &[String], values: Vec<InputValue>) -> Self {
        TestCase { id: id.into(), bindings: params.iter().cloned().zip(values).collect() }
    }

    pub fn values(&self) -> Vec<InputValue> {
        self.bindings.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn kinds(&self) -> Vec<ParamKind> {
        self.bindings.iter().map(|(_, v)| v.kind()).collect()
    }

    pub fn same_inputs(&self, other: &TestCase) -> bool {
        self.bindings == other.bindings
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "test {}:", self.id)?;
        let parts: Vec<String> = self.bindings.iter().map(|(n, v)| format!("{n}={v}")).collect();
        if !parts.is_empty() {
            write!(f, " {}", parts.join("; "))?;
        }
        Ok(())
    }
}

impl FromStr for TestCase {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, String> {
        let rest = line.trim().strip_prefix("test").ok_or("expected `test <id>: ...`")?;
        let (id, body) = rest.split_once(':').ok_or("missing `:` after test id")?;
        let id = id.trim();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(format!("bad test id {id:?}"));
        }
        let mut bindings = Vec::new();
        for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part.split_once('=').ok_or_else(|| format!("expected `name=value`, got {part:?}"))?;
            let value = value.trim();
            let parsed = if let Some(inner) = value.strip_prefix('[') {
                let inner = inner.strip_suffix(']').ok_or_else(|| format!("unterminated array in {part:?}"))?;
                let items: Result<Vec<i64>, _> =
                    inner.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect();
                InputValue::Array(items.map_err(|e| format!("bad array element in {part:?}: {e}"))?)
            } else {
                InputValue::Int(value.parse().map_err(|e| format!("bad integer in {part:?}: {e}"))?)
            };
            bindings.push((name.trim().to_string(), parsed));
        }
        Ok(TestCase { id: id.to_string(), bindings })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TestSuite {
    pub tests: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(tests: Vec<TestCase>) -> Self {
        TestSuite { tests }
    }

    /// Reads the line format `test <id>: <param>=<value>; ...`. Blank lines
    /// and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<TestSuite, ExecError> {
        let mut tests = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            tests.push(t.parse().map_err(|message| ExecError::SuiteSyntax { line: i + 1, message })?);
        }
        Ok(TestSuite { tests })
    }

    pub fn to_text(&self) -> String {
        self.tests.iter().map(|t| format!("{t}\n")).collect()
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&TestCase> {
        self.tests.iter().find(|t| t.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuntimeErrorKind {
    IndexOutOfBounds,
    DivByZero,
    RecursionLimit,
}

impl fmt::Display for RuntimeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuntimeErrorKind::IndexOutOfBounds => "index-out-of-bounds",
            RuntimeErrorKind::DivByZero => "div-by-zero",
            RuntimeErrorKind::RecursionLimit => "recursion-limit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Returned(i64),
    VoidReturned,
    RuntimeError(RuntimeErrorKind),
    StepLimitExceeded,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeKind::Returned(v) => write!(f, "returned({v})"),
            OutcomeKind::VoidReturned => f.write_str("void-returned"),
            OutcomeKind::RuntimeError(k) => write!(f, "runtime-error({k})"),
            OutcomeKind::StepLimitExceeded => f.write_str("step-limit-exceeded"),
        }
    }
}

/// Return behaviour plus the final value of every global.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservedOutcome {
    pub kind: OutcomeKind,
    pub global_names: Arc<Vec<String>>,
    pub globals: Vec<i64>,
}

impl ObservedOutcome {
    pub fn global(&self, name: &str) -> Option<i64> {
        self.global_names.iter().position(|n| n == name).map(|i| self.globals[i])
    }
}

impl fmt::Display for ObservedOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.globals.is_empty() {
            let parts: Vec<String> =
                self.global_names.iter().zip(&self.globals).map(|(n, v)| format!("{n}={v}")).collect();
            write!(f, " {{{}}}", parts.join(", "))?;
        }
        Ok(())
    }
}

pub fn outcomes_equal(a: &ObservedOutcome, b: &ObservedOutcome) -> bool {
    a == b
}

const NOT_HIT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    /// Dense ids (see [`ProgramCfa::global_id`]) of the assume edges taken.
    pub assumes: Vec<u32>,
    /// Per dense edge id: length of `assumes` right after the edge was first
    /// traversed, or `u32::MAX`.
    first_hit: Vec<u32>,
    pub steps: u64,
}

impl ExecutionTrace {
    pub fn hit(&self, global_edge: usize) -> bool {
        self.first_hit[global_edge] != NOT_HIT
    }

    /// Assume-sequence prefix up to the first traversal of `global_edge`.
    pub fn prefix_to(&self, global_edge: usize) -> Option<&[u32]> {
        match self.first_hit[global_edge] {
            NOT_HIT => None,
            k => Some(&self.assumes[..k as usize]),
        }
    }

    /// Shortest prefix over a set of target edges: the prefix at the moment
    /// any of them is first reached.
    pub fn prefix_to_any(&self, global_edges: &[usize]) -> Option<&[u32]> {
        let k = global_edges.iter().map(|&g| self.first_hit[g]).min()?;
        (k != NOT_HIT).then(|| &self.assumes[..k as usize])
    }

    pub fn covers(&self, pc: &ProgramCfa, goal: &TestGoal) -> bool {
        self.hit(pc.global_id(goal.target))
    }

    pub fn covered_goals<'g>(&self, pc: &ProgramCfa, goals: &'g [TestGoal]) -> Vec<&'g TestGoal> {
        goals.iter().filter(|g| self.covers(pc, g)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub steps: u64,
    pub depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { steps: 100_000, depth: 64 }
    }
}

/// A program lowered once and ready to run a chosen function many times.
#[derive(Debug, Clone)]
pub struct Executable {
    pub cfa: ProgramCfa,
    pub entry: usize,
    pub param_names: Vec<String>,
    global_names: Arc<Vec<String>>,
}

impl Executable {
    pub fn new(p: &SourceProgram, function: &str) -> Result<Executable, ExecError> {
        Self::from_cfa(ProgramCfa::build(p), p, function)
    }

    pub fn from_cfa(cfa: ProgramCfa, p: &SourceProgram, function: &str) -> Result<Executable, ExecError> {
        let f = p.function(function).ok_or_else(|| minic::MinicError::UnknownFunction(function.to_string()))?;
        let entry = cfa.function_index(function).expect("automaton per function");
        let global_names = Arc::new(cfa.global_names.clone());
        Ok(Executable { cfa, entry, param_names: f.params.iter().map(|p| p.name.clone()).collect(), global_names })
    }

    pub fn params(&self) -> &[ParamKind] {
        &self.cfa.cfas[self.entry].params
    }

    pub fn ret(&self) -> ReturnKind {
        self.cfa.cfas[self.entry].ret
    }

    pub fn signature(&self) -> minic::Signature {
        let c = &self.cfa.cfas[self.entry];
        minic::Signature { name: c.function.clone(), params: c.params.clone(), ret: c.ret }
    }

    pub fn accepts(&self, t: &TestCase) -> bool {
        t.kinds() == self.params()
    }

    pub fn test_case(&self, id: impl Into<String>, values: Vec<InputValue>) -> TestCase {
        TestCase::from_values(id, &self.param_names, values)
    }

    pub fn run_test(&self, t: &TestCase, limits: Limits) -> Result<(ObservedOutcome, ExecutionTrace), ExecError> {
        if !self.accepts(t) {
            return Err(ExecError::SignatureMismatch { test: t.id.clone(), signature: self.signature().to_string() });
        }
        Ok(self.run(&t.values(), limits))
    }

    /// Runs the entry function. Inputs must match its parameter kinds.
    pub fn run(&self, inputs: &[InputValue], limits: Limits) -> (ObservedOutcome, ExecutionTrace) {
        let mut m = Machine {
            pc: &self.cfa,
            globals: self.cfa.global_inits.clone(),
            limits,
            trace: ExecutionTrace { assumes: Vec::new(), first_hit: vec![NOT_HIT; self.cfa.total_edges()], steps: 0 },
        };
        let args = inputs
            .iter()
            .map(|v| match v {
                InputValue::Int(i) => Slot::Int(*i),
                InputValue::Array(a) => Slot::Arr(a.clone()),
            })
            .collect();
        let kind = match m.call(self.entry, args, 1) {
            Ok(Some(v)) => OutcomeKind::Returned(v),
            Ok(None) => OutcomeKind::VoidReturned,
            Err(Abort::Error(k)) => OutcomeKind::RuntimeError(k),
            Err(Abort::StepLimit) => OutcomeKind::StepLimitExceeded,
        };
        let outcome = ObservedOutcome { kind, global_names: Arc::clone(&self.global_names), globals: m.globals };
        (outcome, m.trace)
    }
}

/// Builds and runs in one go; prefer [`Executable`] for repeated runs.
pub fn run(
    p: &SourceProgram,
    function: &str,
    t: &TestCase,
    limits: Limits,
) -> Result<(ObservedOutcome, ExecutionTrace), ExecError> {
    Executable::new(p, function)?.run_test(t, limits)
}

#[derive(Debug, Clone)]
enum Slot {
    Int(i64),
    Arr(Vec<i64>),
}

enum Abort {
    Error(RuntimeErrorKind),
    StepLimit,
}

type Exec<T> = Result<T, Abort>;

struct Machine<'a> {
    pc: &'a ProgramCfa,
    globals: Vec<i64>,
    limits: Limits,
    trace: ExecutionTrace,
}

impl Machine<'_> {
    fn call(&mut self, func: usize, args: Vec<Slot>, depth: usize) -> Exec<Option<i64>> {
        if depth > self.limits.depth {
            return Err(Abort::Error(RuntimeErrorKind::RecursionLimit));
        }
        let cfa = &self.pc.cfas[func];
        let mut frame = args;
        frame.resize(cfa.slots, Slot::Int(0));
        let mut node = cfa.entry;
        loop {
            let edge_idx = match cfa.succ(node) {
                Succ::Exit => return Ok(None),
                Succ::Single(e) => e,
                Succ::Branch(t, f) => {
                    let EdgeOp::Assume { cond, .. } = &cfa.edges[t].op else { unreachable!() };
                    let taken = if self.eval(cond, &mut frame, depth)? != 0 { t } else { f };
                    self.trace.assumes.push(self.pc.global_id(EdgeRef { func, edge: taken }) as u32);
                    taken
                }
            };
            self.tick(func, edge_idx)?;
            let edge = &cfa.edges[edge_idx];
            match &edge.op {
                EdgeOp::Assume { .. } | EdgeOp::Label(_) | EdgeOp::Skip => {}
                EdgeOp::Declare { slot, init } => {
                    let v = self.eval(init, &mut frame, depth)?;
                    frame[*slot] = Slot::Int(v);
                }
                EdgeOp::Assign { target, op, value } => {
                    let v = self.eval(value, &mut frame, depth)?;
                    self.store(target, &mut frame, depth, |old| match op {
                        AssignOp::Set => v,
                        AssignOp::Add => old.wrapping_add(v),
                        AssignOp::Sub => old.wrapping_sub(v),
                    })?;
                }
                EdgeOp::Step { target, delta } => {
                    let d = *delta;
                    self.store(target, &mut frame, depth, |old| old.wrapping_add(d))?;
                }
                EdgeOp::Call(e) => {
                    self.eval_call(e, &mut frame, depth)?;
                }
                EdgeOp::Return(value) => {
                    return match value {
                        Some(e) => Ok(Some(self.eval(e, &mut frame, depth)?)),
                        None => Ok(None),
                    };
                }
            }
            node = edge.to;
        }
    }

    fn tick(&mut self, func: usize, edge: usize) -> Exec<()> {
        if self.trace.steps == self.limits.steps {
            return Err(Abort::StepLimit);
        }
        self.trace.steps += 1;
        let g = self.pc.global_id(EdgeRef { func, edge });
        if self.trace.first_hit[g] == NOT_HIT {
            self.trace.first_hit[g] = self.trace.assumes.len() as u32;
        }
        Ok(())
    }

    fn store(
        &mut self,
        target: &RTarget,
        frame: &mut [Slot],
        depth: usize,
        update: impl FnOnce(i64) -> i64,
    ) -> Exec<()> {
        match target {
            RTarget::Local(s) => {
                let old = match frame[*s] {
                    Slot::Int(v) => v,
                    Slot::Arr(_) => unreachable!("validated: scalar target"),
                };
                frame[*s] = Slot::Int(update(old));
            }
            RTarget::Global(g) => self.globals[*g] = update(self.globals[*g]),
            RTarget::Index { slot, index } => {
                let i = self.eval(index, frame, depth)?;
                let Slot::Arr(a) = &mut frame[*slot] else { unreachable!("validated: array target") };
                let cell = usize::try_from(i)
                    .ok()
                    .and_then(|i| a.get_mut(i))
                    .ok_or(Abort::Error(RuntimeErrorKind::IndexOutOfBounds))?;
                *cell = update(*cell);
            }
        }
        Ok(())
    }

    fn eval_call(&mut self, e: &RExpr, frame: &mut [Slot], depth: usize) -> Exec<Option<i64>> {
        let RExpr::Call { func, args } = e else { unreachable!() };
        let mut values = Vec::with_capacity(args.len());
        for a in args {
            values.push(match a {
                RArg::Value(v) => Slot::Int(self.eval(v, frame, depth)?),
                RArg::Array(s) => frame[*s].clone(),
            });
        }
        self.call(*func, values, depth + 1)
    }

    fn eval(&mut self, e: &RExpr, frame: &mut [Slot], depth: usize) -> Exec<i64> {
        Ok(match e {
            RExpr::Lit(v) => *v,
            RExpr::Local(s) => match &frame[*s] {
                Slot::Int(v) => *v,
                Slot::Arr(_) => unreachable!("validated: scalar read"),
            },
            RExpr::Global(g) => self.globals[*g],
            RExpr::Index { slot, index } => {
                let i = self.eval(index, frame, depth)?;
                let Slot::Arr(a) = &frame[*slot] else { unreachable!("validated: array read") };
                *usize::try_from(i).ok().and_then(|i| a.get(i)).ok_or(Abort::Error(RuntimeErrorKind::IndexOutOfBounds))?
            }
            RExpr::Unary { op, operand } => {
                let v = self.eval(operand, frame, depth)?;
                match op {
                    UnaryOp::Neg => v.wrapping_neg(),
                    UnaryOp::Not => (v == 0) as i64,
                }
            }
            RExpr::Binary { op: BinOp::And, lhs, rhs } => {
                (self.eval(lhs, frame, depth)? != 0 && self.eval(rhs, frame, depth)? != 0) as i64
            }
            RExpr::Binary { op: BinOp::Or, lhs, rhs } => {
                (self.eval(lhs, frame, depth)? != 0 || self.eval(rhs, frame, depth)? != 0) as i64
            }
            RExpr::Binary { op, lhs, rhs } => {
                let a = self.eval(lhs, frame, depth)?;
                let b = self.eval(rhs, frame, depth)?;
                match op {
                    BinOp::Add => a.wrapping_add(b),
                    BinOp::Sub => a.wrapping_sub(b),
                    BinOp::Mul => a.wrapping_mul(b),
                    BinOp::Div | BinOp::Rem if b == 0 => return Err(Abort::Error(RuntimeErrorKind::DivByZero)),
                    BinOp::Div => a.wrapping_div(b),
                    BinOp::Rem => a.wrapping_rem(b),
                    BinOp::Lt => (a < b) as i64,
                    BinOp::Le => (a <= b) as i64,
                    BinOp::Gt => (a > b) as i64,
                    BinOp::Ge => (a >= b) as i64,
                    BinOp::Eq => (a == b) as i64,
                    BinOp::Ne => (a != b) as i64,
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
            RExpr::Call { .. } => self.eval_call(e, frame, depth)?.unwrap_or(0),
        })
    }
}

/// Which goals each test covers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageMatrix {
    pub tests: Vec<String>,
    pub goals: Vec<String>,
    /// `rows[t]` holds the indices into `goals` covered by test `t`.
    pub rows: Vec<BTreeSet<usize>>,
}

impl CoverageMatrix {
    pub fn new(tests: Vec<String>, goals: Vec<String>, rows: Vec<BTreeSet<usize>>) -> Self {
        CoverageMatrix { tests, goals, rows }
    }

    /// Goals no test covers.
    pub fn uncovered(&self) -> Vec<String> {
        let covered: BTreeSet<usize> = self.rows.iter().flatten().copied().collect();
        (0..self.goals.len()).filter(|g| !covered.contains(g)).map(|g| self.goals[g].clone()).collect()
    }

    pub fn covered_by(&self, selected: &[usize]) -> BTreeSet<usize> {
        selected.iter().flat_map(|&t| self.rows[t].iter().copied()).collect()
    }

    pub fn covered(&self) -> BTreeSet<usize> {
        self.rows.iter().flatten().copied().collect()
    }

    pub fn test_index(&self, id: &str) -> Option<usize> {
        self.tests.iter().position(|t| t == id)
    }

    /// Copy restricted to goals some test covers, plus the dropped ids.
    pub fn drop_uncoverable(&self) -> (CoverageMatrix, Vec<String>) {
        let covered = self.covered();
        let keep: Vec<usize> = (0..self.goals.len()).filter(|g| covered.contains(g)).collect();
        let remap: std::collections::HashMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let m = CoverageMatrix {
            tests: self.tests.clone(),
            goals: keep.iter().map(|&g| self.goals[g].clone()).collect(),
            rows: self.rows.iter().map(|r| r.iter().filter_map(|g| remap.get(g).copied()).collect()).collect(),
        };
        (m, self.uncovered())
    }

    /// CSV with header `test,<goal ids>` and one 0/1 row per test.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["test".to_string()];
        header.extend(self.goals.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (t, row) in self.tests.iter().zip(&self.rows) {
            let mut rec = vec![t.clone()];
            rec.extend((0..self.goals.len()).map(|g| if row.contains(&g) { "1" } else { "0" }.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<CoverageMatrix, ExecError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let err = |row: usize, message: String| ExecError::MatrixSyntax { row, message };
        let header = r.headers().map_err(|e| err(1, e.to_string()))?.clone();
        if header.get(0) != Some("test") {
            return Err(err(1, "first column must be `test`".into()));
        }
        let goals: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut m = CoverageMatrix { tests: Vec::new(), goals, rows: Vec::new() };
        for (i, rec) in r.records().enumerate() {
            let row_no = i + 2;
            let rec = rec.map_err(|e| err(row_no, e.to_string()))?;
            if rec.len() != m.goals.len() + 1 {
                return Err(err(row_no, format!("expected {} cells, found {}", m.goals.len() + 1, rec.len())));
            }
            let mut row = BTreeSet::new();
            for (g, cell) in rec.iter().skip(1).enumerate() {
                match cell {
                    "1" => {
                        row.insert(g);
                    }
                    "0" => {}
                    other => return Err(err(row_no, format!("cell {other:?} is not 0 or 1"))),
                }
            }
            m.tests.push(rec[0].to_string());
            m.rows.push(row);
        }
        Ok(m)
    }
}

/// Runs every test and records which of `goals` it covers.
pub fn coverage_matrix(
    exe: &Executable,
    suite: &TestSuite,
    goals: &[TestGoal],
    limits: Limits,
) -> Result<CoverageMatrix, ExecError> {
    let mut rows = Vec::with_capacity(suite.len());
    for t in &suite.tests {
        let (_, trace) = exe.run_test(t, limits)?;
        rows.push((0..goals.len()).filter(|&g| trace.covers(&exe.cfa, &goals[g])).collect());
    }
    Ok(CoverageMatrix {
        tests: suite.tests.iter().map(|t| t.id.clone()).collect(),
        goals: goals.iter().map(|g| g.id.clone()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minic::parse_valid;

    const P0: &str = include_str!("../corpus/find_last/p0.mc");
    const SUITE: &str = include_str!("../corpus/fixtures/running_example.suite");

    fn p3() -> SourceProgram {
        parse_valid(&P0.replace("i=0", "i=1").replace("x[0]-2", "x[0]-1").replace("x[i] <= y", "x[i] == y")).unwrap()
    }

    fn suite() -> TestSuite {
        TestSuite::parse(SUITE).unwrap()
    }

    fn ret(exe: &Executable, t: &TestCase) -> OutcomeKind {
        exe.run_test(t, Limits::default()).unwrap().0.kind
    }

    #[test]
    fn running_example_outcomes() {
        let s = suite();
        let p0 = Executable::new(&parse_valid(P0).unwrap(), "find_last").unwrap();
        assert_eq!(ret(&p0, s.get("t1").unwrap()), OutcomeKind::Returned(-1));
        assert_eq!(ret(&p0, s.get("t2").unwrap()), OutcomeKind::Returned(0));
        let p3 = Executable::new(&p3(), "find_last").unwrap();
        assert_eq!(ret(&p3, s.get("t2").unwrap()), OutcomeKind::Returned(-2));
    }

    #[test]
    fn runs_are_deterministic() {
        let p = parse_valid(P0).unwrap();
        let t = suite().tests[1].clone();
        assert_eq!(run(&p, "find_last", &t, Limits::default()), run(&p, "find_last", &t, Limits::default()));
    }

    #[test]
    fn t1_covers_only_the_first_true_branch() {
        let p = parse_valid(P0).unwrap();
        let exe = Executable::new(&p, "find_last").unwrap();
        let goals = exe.cfa.branch_goals(exe.entry);
        let only_t1 = TestSuite::new(vec![suite().tests[0].clone()]);
        let m = coverage_matrix(&exe, &only_t1, &goals, Limits::default()).unwrap();
        assert_eq!(m.rows[0], BTreeSet::from([0]));
        assert_eq!(m.uncovered(), vec!["g2", "g3", "g4", "g5", "g6"]);
    }

    #[test]
    fn empty_suite_leaves_every_goal_uncovered() {
        let exe = Executable::new(&parse_valid(P0).unwrap(), "find_last").unwrap();
        let goals = exe.cfa.branch_goals(exe.entry);
        let m = coverage_matrix(&exe, &TestSuite::default(), &goals, Limits::default()).unwrap();
        assert_eq!(m.uncovered().len(), 6);
    }

    #[test]
    fn matrix_rows_follow_the_suite_order() {
        let exe = Executable::new(&parse_valid(P0).unwrap(), "find_last").unwrap();
        let goals = exe.cfa.branch_goals(exe.entry);
        let s = suite();
        let mut rev = s.clone();
        rev.tests.reverse();
        let a = coverage_matrix(&exe, &s, &goals, Limits::default()).unwrap();
        let b = coverage_matrix(&exe, &rev, &goals, Limits::default()).unwrap();
        for (i, id) in a.tests.iter().enumerate() {
            assert_eq!(a.rows[i], b.rows[b.test_index(id).unwrap()]);
        }
    }

    #[test]
    fn outcome_equality() {
        let names = Arc::new(vec!["g".to_string()]);
        let o = |kind, g| ObservedOutcome { kind, global_names: Arc::clone(&names), globals: vec![g] };
        assert!(!outcomes_equal(&o(OutcomeKind::Returned(-2), 0), &o(OutcomeKind::Returned(1), 0)));
        assert!(outcomes_equal(&o(OutcomeKind::Returned(5), 3), &o(OutcomeKind::Returned(5), 3)));
        assert!(!outcomes_equal(&o(OutcomeKind::Returned(5), 3), &o(OutcomeKind::Returned(5), 4)));
    }

    #[test]
    fn out_of_bounds_mutant_is_observably_different() {
        let src = "int f(int a[]) {\n return a[0];\n}";
        let mutant = "int f(int a[]) {\n return a[0 + 1];\n}";
        let t = TestCase::new("t", vec![("a".into(), InputValue::Array(vec![0]))]);
        let (a, _) = run(&parse_valid(src).unwrap(), "f", &t, Limits::default()).unwrap();
        let (b, _) = run(&parse_valid(mutant).unwrap(), "f", &t, Limits::default()).unwrap();
        assert_eq!(a.kind, OutcomeKind::Returned(0));
        assert_eq!(b.kind, OutcomeKind::RuntimeError(RuntimeErrorKind::IndexOutOfBounds));
        assert!(!outcomes_equal(&a, &b));
    }

    #[test]
    fn abnormal_terminations_are_outcomes() {
        let cases = [
            ("int f(int a) { return 1 / a; }", OutcomeKind::RuntimeError(RuntimeErrorKind::DivByZero)),
            ("int f(int a) { return 1 % a; }", OutcomeKind::RuntimeError(RuntimeErrorKind::DivByZero)),
            ("int f(int a) { return f(a); }", OutcomeKind::RuntimeError(RuntimeErrorKind::RecursionLimit)),
            ("int f(int a) { while (1) a++; return a; }", OutcomeKind::StepLimitExceeded),
        ];
        for (src, want) in cases {
            let t = TestCase::new("t", vec![("a".into(), InputValue::Int(0))]);
            let (o, trace) = run(&parse_valid(src).unwrap(), "f", &t, Limits::default()).unwrap();
            assert_eq!(o.kind, want, "{src}");
            assert!(trace.steps <= Limits::default().steps);
        }
    }

    #[test]
    fn recursion_up_to_the_cap_is_fine() {
        let src = "int f(int n) {\n if (n <= 1) return 1;\n return n + f(n - 1);\n}";
        let exe = Executable::new(&parse_valid(src).unwrap(), "f").unwrap();
        assert_eq!(exe.run(&[InputValue::Int(64)], Limits::default()).0.kind, OutcomeKind::Returned(64 * 65 / 2));
        assert_eq!(
            exe.run(&[InputValue::Int(65)], Limits::default()).0.kind,
            OutcomeKind::RuntimeError(RuntimeErrorKind::RecursionLimit)
        );
    }

    #[test]
    fn arrays_are_passed_by_value_and_globals_observed() {
        let src = "int g = 0;\nvoid bump(int a[]) {\n a[0] = 9;\n g = g + 1;\n}\n\
                   int f(int a[]) {\n bump(a);\n return a[0];\n}";
        let exe = Executable::new(&parse_valid(src).unwrap(), "f").unwrap();
        let (o, _) = exe.run(&[InputValue::Array(vec![4])], Limits::default());
        assert_eq!(o.kind, OutcomeKind::Returned(4));
        assert_eq!(o.global("g"), Some(1));
        assert_eq!(o.to_string(), "returned(4) {g=1}");
    }

    #[test]
    fn short_circuit_skips_errors() {
        let src = "int f(int a) { return a != 0 && 10 / a > 1; }";
        let exe = Executable::new(&parse_valid(src).unwrap(), "f").unwrap();
        assert_eq!(exe.run(&[InputValue::Int(0)], Limits::default()).0.kind, OutcomeKind::Returned(0));
        assert_eq!(exe.run(&[InputValue::Int(3)], Limits::default()).0.kind, OutcomeKind::Returned(1));
    }

    #[test]
    fn wrapping_arithmetic() {
        let src = "int f(int a) { return a * a * a * a * a; }";
        let exe = Executable::new(&parse_valid(src).unwrap(), "f").unwrap();
        let v: i64 = 1 << 20;
        let want = v.wrapping_mul(v).wrapping_mul(v).wrapping_mul(v).wrapping_mul(v);
        assert_eq!(exe.run(&[InputValue::Int(v)], Limits::default()).0.kind, OutcomeKind::Returned(want));
    }

    #[test]
    fn step_limit_monotonicity() {
        let p = parse_valid(P0).unwrap();
        let exe = Executable::new(&p, "find_last").unwrap();
        let t = suite().tests[1].values();
        let (o, tr) = exe.run(&t, Limits::default());
        let tight = Limits { steps: tr.steps, ..Limits::default() };
        assert_eq!(exe.run(&t, tight), (o.clone(), tr.clone()));
        let short = Limits { steps: tr.steps - 1, ..Limits::default() };
        assert_eq!(exe.run(&t, short).0.kind, OutcomeKind::StepLimitExceeded);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let exe = Executable::new(&parse_valid(P0).unwrap(), "find_last").unwrap();
        let t = TestCase::new("bad", vec![("x".into(), InputValue::Int(1))]);
        assert!(matches!(exe.run_test(&t, Limits::default()), Err(ExecError::SignatureMismatch { .. })));
    }

    #[test]
    fn suite_format_round_trips() {
        let s = suite();
        assert_eq!(s.len(), 6);
        assert_eq!(s.tests[1].to_string(), "test t2: x=[3,5,5,3]; y=4");
        assert_eq!(TestSuite::parse(&s.to_text()).unwrap(), s);
        let empty: TestCase = "test e: a=[]".parse().unwrap();
        assert_eq!(empty.bindings[0].1, InputValue::Array(vec![]));
        assert!(matches!(TestSuite::parse("test t: x=[1,"), Err(ExecError::SuiteSyntax { line: 1, .. })));
    }

    #[test]
    fn matrix_csv_round_trips() {
        let text = include_str!("../corpus/fixtures/small_matrix.csv");
        let m = CoverageMatrix::from_csv(text).unwrap();
        assert_eq!(m.tests, ["t1", "t2", "t3", "t4"]);
        assert_eq!(m.rows[2], BTreeSet::from([1, 2, 3, 4, 5]));
        assert_eq!(CoverageMatrix::from_csv(&m.to_csv()).unwrap(), m);
        assert!(matches!(
            CoverageMatrix::from_csv("test,g1\nt1,2\n"),
            Err(ExecError::MatrixSyntax { row: 2, .. })
        ));
    }

    #[test]
    fn label_goals_do_not_change_outcomes() {
        let p = p3();
        let plain = Executable::new(&p, "find_last").unwrap();
        let mut cfa = ProgramCfa::build(&p);
        let ins = cfa.insert_label_goals(0, &(1..=9).collect());
        let labelled = Executable::from_cfa(cfa, &p, "find_last").unwrap();
        for t in &suite().tests {
            let (a, _) = plain.run_test(t, Limits::default()).unwrap();
            let (b, tr) = labelled.run_test(t, Limits::default()).unwrap();
            assert_eq!(a, b);
            assert!(ins.goals.iter().any(|g| tr.covers(&labelled.cfa, g)));
        }
    }
}
