//! Control-flow automata with names resolved to storage slots.
//!
//! Every `if`/`for`/`while` condition becomes assume pairs; `&&`, `||` and
//! `!` in condition position are lowered into nested pairs, so each atomic
//! condition contributes two branch goals. In value position they are plain
//! operators.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::minic::{
    pretty_expr, AssignOp, BinOp, Expr, ExprKind, FunctionDef, LValue, ParamKind, ReturnKind, SourceProgram, Stmt,
    StmtKind, UnaryOp,
};

pub type NodeId = usize;

/// An edge of a particular function's automaton within a [`ProgramCfa`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub func: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RExpr {
    Lit(i64),
    Local(usize),
    Global(usize),
    Index { slot: usize, index: Box<RExpr> },
    Unary { op: UnaryOp, operand: Box<RExpr> },
    Binary { op: BinOp, lhs: Box<RExpr>, rhs: Box<RExpr> },
    Call { func: usize, args: Vec<RArg> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RArg {
    Value(RExpr),
    /// An array parameter passed by value (the callee gets a copy).
    Array(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RTarget {
    Local(usize),
    Global(usize),
    Index { slot: usize, index: RExpr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeOp {
    Assume { cond: RExpr, polarity: bool },
    Declare { slot: usize, init: RExpr },
    Assign { target: RTarget, op: AssignOp, value: RExpr },
    Step { target: RTarget, delta: i64 },
    Return(Option<RExpr>),
    Call(RExpr),
    Label(String),
    Skip,
}

impl EdgeOp {
    pub fn is_assume(&self) -> bool {
        matches!(self, EdgeOp::Assume { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub op: EdgeOp,
    /// Source line; 0 for synthetic joins and loop back-edges.
    pub line: usize,
    pub col: usize,
    /// Human-readable rendering of the operation.
    pub text: String,
}

/// What the interpreter does at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Succ {
    Exit,
    Single(usize),
    /// Assume pair: (true edge, false edge).
    Branch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfa {
    pub function: String,
    pub ret: ReturnKind,
    pub params: Vec<ParamKind>,
    pub node_count: usize,
    pub edges: Vec<Edge>,
    pub entry: NodeId,
    pub exit: NodeId,
    /// Number of local storage slots (parameters first).
    pub slots: usize,
    pub first_line: usize,
    pub last_line: usize,
    succ: Vec<Succ>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GoalKind {
    Branch,
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestGoal {
    pub id: String,
    pub target: EdgeRef,
    pub kind: GoalKind,
}

/// Result of splicing label goals: the goals plus requested lines that lie
/// outside every function (or have no code at or after them).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelInsertion {
    pub goals: Vec<TestGoal>,
    pub ignored: Vec<usize>,
}

impl Cfa {
    pub fn succ(&self, node: NodeId) -> Succ {
        self.succ[node]
    }

    pub fn assume_pairs(&self) -> usize {
        self.edges.iter().filter(|e| matches!(e.op, EdgeOp::Assume { polarity: true, .. })).count()
    }

    /// One goal per assume edge, ordered by (line, column, true before false).
    /// `func` is this automaton's index inside its program.
    pub fn branch_goals(&self, func: usize) -> Vec<TestGoal> {
        let refs = self.sorted_assumes(func);
        refs.into_iter()
            .enumerate()
            .map(|(i, target)| TestGoal { id: format!("g{}", i + 1), target, kind: GoalKind::Branch })
            .collect()
    }

    fn sorted_assumes(&self, func: usize) -> Vec<EdgeRef> {
        let mut keyed: Vec<((usize, usize, bool), EdgeRef)> = self
            .edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e.op {
                EdgeOp::Assume { polarity, .. } => Some(((e.line, e.col, !polarity), EdgeRef { func, edge: i })),
                _ => None,
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|(_, r)| r).collect()
    }

    /// Splices a `L<line>` label edge before the first edge of each line.
    /// A line without edges uses the next line in the function that has one.
    pub fn insert_label_goals(&mut self, func: usize, lines: &BTreeSet<usize>) -> LabelInsertion {
        let mut out = LabelInsertion::default();
        for &line in lines {
            if !(self.first_line..=self.last_line).contains(&line) {
                out.ignored.push(line);
                continue;
            }
            match self.splice_label(line) {
                Some(edge) => {
                    out.goals.push(TestGoal { id: format!("L{line}"), target: EdgeRef { func, edge }, kind: GoalKind::Label })
                }
                None => out.ignored.push(line),
            }
        }
        out
    }

    fn splice_label(&mut self, line: usize) -> Option<usize> {
        let anchor = (line..=self.last_line).find_map(|l| {
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.line == l && !matches!(e.op, EdgeOp::Label(_)))
                .map(|(i, _)| i)
                .next()
        })?;
        let target = self.edges[anchor].from;
        let fresh = self.node_count;
        self.node_count += 1;
        for e in &mut self.edges {
            if e.to == target {
                e.to = fresh;
            }
        }
        if self.entry == target {
            self.entry = fresh;
        }
        let name = format!("L{line}");
        self.edges.push(Edge {
            from: fresh,
            to: target,
            op: EdgeOp::Label(name.clone()),
            line: self.edges[anchor].line,
            col: 0,
            text: format!("{name}:"),
        });
        self.rebuild_succ();
        Some(self.edges.len() - 1)
    }

    fn rebuild_succ(&mut self) {
        let mut succ = vec![Succ::Exit; self.node_count];
        for (i, e) in self.edges.iter().enumerate() {
            succ[e.from] = match (succ[e.from], &e.op) {
                (Succ::Exit, EdgeOp::Assume { .. }) => Succ::Branch(i, i),
                (Succ::Exit, _) => Succ::Single(i),
                (Succ::Branch(t, f), EdgeOp::Assume { polarity, .. }) => {
                    if *polarity {
                        Succ::Branch(i, f)
                    } else {
                        Succ::Branch(t, i)
                    }
                }
                (s, _) => panic!("node {} has conflicting successors {s:?} and edge {i}", e.from),
            };
        }
        // Fix up pairs: the first assume seen filled both slots.
        for (i, e) in self.edges.iter().enumerate() {
            if let EdgeOp::Assume { polarity, .. } = e.op {
                if let Succ::Branch(t, f) = &mut succ[e.from] {
                    if polarity {
                        *t = i;
                    } else {
                        *f = i;
                    }
                }
            }
        }
        self.succ = succ;
    }

    /// Graphviz-style text dump.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", self.function);
        let _ = writeln!(out, "  entry [shape=point]; entry -> n{};", self.entry);
        let _ = writeln!(out, "  n{} [shape=doublecircle];", self.exit);
        for (i, e) in self.edges.iter().enumerate() {
            let text = e.text.replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  n{} -> n{} [label=\"e{i} l{}: {text}\"];", e.from, e.to, e.line);
        }
        out.push_str("}\n");
        out
    }
}

/// Automata for every function of a program, plus global layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramCfa {
    pub cfas: Vec<Cfa>,
    pub global_names: Vec<String>,
    pub global_inits: Vec<i64>,
    edge_offsets: Vec<usize>,
}

impl ProgramCfa {
    pub fn build(p: &SourceProgram) -> ProgramCfa {
        let functions: HashMap<&str, (usize, Vec<ParamKind>)> = p
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.as_str(), (i, f.params.iter().map(|p| p.kind).collect())))
            .collect();
        let globals: HashMap<&str, usize> = p.globals.iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect();
        let cfas = p.functions.iter().map(|f| Lowering::new(f, &functions, &globals).run()).collect();
        let mut pc = ProgramCfa {
            cfas,
            global_names: p.globals.iter().map(|g| g.name.clone()).collect(),
            global_inits: p.globals.iter().map(|g| g.init).collect(),
            edge_offsets: Vec::new(),
        };
        pc.reindex();
        pc
    }

    fn reindex(&mut self) {
        let mut offsets = Vec::with_capacity(self.cfas.len() + 1);
        let mut acc = 0;
        for c in &self.cfas {
            offsets.push(acc);
            acc += c.edges.len();
        }
        offsets.push(acc);
        self.edge_offsets = offsets;
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.cfas.iter().position(|c| c.function == name)
    }

    /// Dense id of an edge across all functions.
    pub fn global_id(&self, r: EdgeRef) -> usize {
        self.edge_offsets[r.func] + r.edge
    }

    pub fn edge_ref(&self, global: usize) -> EdgeRef {
        let func = self.edge_offsets.partition_point(|&o| o <= global) - 1;
        EdgeRef { func, edge: global - self.edge_offsets[func] }
    }

    pub fn total_edges(&self) -> usize {
        *self.edge_offsets.last().unwrap_or(&0)
    }

    pub fn edge(&self, r: EdgeRef) -> &Edge {
        &self.cfas[r.func].edges[r.edge]
    }

    /// Functions reachable from `root` through calls, `root` first.
    pub fn reachable(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.cfas.len()];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(f) = stack.pop() {
            for e in &self.cfas[f].edges {
                for callee in edge_callees(&e.op) {
                    if !seen[callee] {
                        seen[callee] = true;
                        stack.push(callee);
                    }
                }
            }
        }
        let mut out = vec![root];
        out.extend((0..self.cfas.len()).filter(|&i| i != root && seen[i]));
        out
    }

    /// Branch goals of `root` and every function it can call, numbered in
    /// source order (line, column, true before false).
    pub fn branch_goals(&self, root: usize) -> Vec<TestGoal> {
        let mut keyed: Vec<((usize, usize, bool), EdgeRef)> = Vec::new();
        for f in self.reachable(root) {
            for (i, e) in self.cfas[f].edges.iter().enumerate() {
                if let EdgeOp::Assume { polarity, .. } = e.op {
                    keyed.push(((e.line, e.col, !polarity), EdgeRef { func: f, edge: i }));
                }
            }
        }
        keyed.sort();
        keyed
            .into_iter()
            .enumerate()
            .map(|(i, (_, target))| TestGoal { id: format!("g{}", i + 1), target, kind: GoalKind::Branch })
            .collect()
    }

    /// Splices label goals into whichever reachable function owns each line.
    /// Edges keep their indices, so goals computed earlier stay valid.
    pub fn insert_label_goals(&mut self, root: usize, lines: &BTreeSet<usize>) -> LabelInsertion {
        let reachable = self.reachable(root);
        let mut out = LabelInsertion::default();
        for &line in lines {
            let owner = reachable.iter().copied().find(|&f| {
                let c = &self.cfas[f];
                (c.first_line..=c.last_line).contains(&line)
            });
            match owner {
                Some(f) => {
                    let r = self.cfas[f].insert_label_goals(f, &BTreeSet::from([line]));
                    out.goals.extend(r.goals);
                    out.ignored.extend(r.ignored);
                }
                None => out.ignored.push(line),
            }
        }
        self.reindex();
        out
    }
}

fn edge_callees(op: &EdgeOp) -> Vec<usize> {
    let mut out = Vec::new();
    let mut visit = |e: &RExpr| collect_rcalls(e, &mut out);
    match op {
        EdgeOp::Assume { cond, .. } => visit(cond),
        EdgeOp::Declare { init, .. } => visit(init),
        EdgeOp::Assign { target, value, .. } => {
            if let RTarget::Index { index, .. } = target {
                visit(index);
            }
            visit(value);
        }
        EdgeOp::Step { target: RTarget::Index { index, .. }, .. } => visit(index),
        EdgeOp::Return(Some(e)) | EdgeOp::Call(e) => visit(e),
        _ => {}
    }
    out
}

fn collect_rcalls(e: &RExpr, out: &mut Vec<usize>) {
    match e {
        RExpr::Lit(_) | RExpr::Local(_) | RExpr::Global(_) => {}
        RExpr::Index { index, .. } => collect_rcalls(index, out),
        RExpr::Unary { operand, .. } => collect_rcalls(operand, out),
        RExpr::Binary { lhs, rhs, .. } => {
            collect_rcalls(lhs, out);
            collect_rcalls(rhs, out);
        }
        RExpr::Call { func, args } => {
            out.push(*func);
            for a in args {
                if let RArg::Value(v) = a {
                    collect_rcalls(v, out);
                }
            }
        }
    }
}

/// Builds the automaton of a single function of `p`.
pub fn build_cfa(p: &SourceProgram, function: &str) -> Option<Cfa> {
    let idx = p.function_index(function)?;
    Some(ProgramCfa::build(p).cfas.swap_remove(idx))
}

struct Lowering<'a> {
    f: &'a FunctionDef,
    functions: &'a HashMap<&'a str, (usize, Vec<ParamKind>)>,
    globals: &'a HashMap<&'a str, usize>,
    scopes: Vec<HashMap<String, usize>>,
    slots: usize,
    nodes: usize,
    edges: Vec<Edge>,
    exit: NodeId,
}

impl<'a> Lowering<'a> {
    fn new(
        f: &'a FunctionDef,
        functions: &'a HashMap<&'a str, (usize, Vec<ParamKind>)>,
        globals: &'a HashMap<&'a str, usize>,
    ) -> Self {
        let params: HashMap<String, usize> = f.params.iter().enumerate().map(|(i, p)| (p.name.clone(), i)).collect();
        Lowering {
            f,
            functions,
            globals,
            scopes: vec![params],
            slots: f.params.len(),
            nodes: 2,
            edges: Vec::new(),
            exit: 1,
        }
    }

    fn run(mut self) -> Cfa {
        let f = self.f;
        self.scopes.push(HashMap::new());
        let end = self.block(&f.body, 0);
        let op = match f.ret {
            ReturnKind::Void => EdgeOp::Return(None),
            // Unreachable for validated programs: every path returns.
            ReturnKind::Int => EdgeOp::Skip,
        };
        let text = if f.ret == ReturnKind::Void { "return" } else { "skip" };
        self.edge(end, self.exit, op, f.last_line, 0, text.to_string());
        let mut cfa = Cfa {
            function: f.name.clone(),
            ret: f.ret,
            params: f.params.iter().map(|p| p.kind).collect(),
            node_count: self.nodes,
            edges: self.edges,
            entry: 0,
            exit: 1,
            slots: self.slots,
            first_line: f.first_line,
            last_line: f.last_line,
            succ: Vec::new(),
        };
        cfa.rebuild_succ();
        cfa
    }

    fn node(&mut self) -> NodeId {
        self.nodes += 1;
        self.nodes - 1
    }

    fn edge(&mut self, from: NodeId, to: NodeId, op: EdgeOp, line: usize, col: usize, text: String) {
        self.edges.push(Edge { from, to, op, line, col, text });
    }

    fn block(&mut self, stmts: &[Stmt], mut cur: NodeId) -> NodeId {
        for s in stmts {
            cur = self.stmt(s, cur);
        }
        cur
    }

    fn scoped(&mut self, s: &Stmt, cur: NodeId) -> NodeId {
        self.scopes.push(HashMap::new());
        let end = self.stmt(s, cur);
        self.scopes.pop();
        end
    }

    fn stmt(&mut self, s: &Stmt, cur: NodeId) -> NodeId {
        match &s.kind {
            StmtKind::Decl { name, init } => {
                let init = self.expr(init);
                let slot = self.slots;
                self.slots += 1;
                self.scopes.last_mut().expect("scope").insert(name.clone(), slot);
                let next = self.node();
                self.edge(cur, next, EdgeOp::Declare { slot, init }, s.line, s.col, stmt_text(s));
                next
            }
            StmtKind::Assign { target, op, value } => {
                let op = EdgeOp::Assign { target: self.target(target), op: *op, value: self.expr(value) };
                let next = self.node();
                self.edge(cur, next, op, s.line, s.col, stmt_text(s));
                next
            }
            StmtKind::Step { target, delta } => {
                let op = EdgeOp::Step { target: self.target(target), delta: *delta };
                let next = self.node();
                self.edge(cur, next, op, s.line, s.col, stmt_text(s));
                next
            }
            StmtKind::Call(e) => {
                let op = EdgeOp::Call(self.expr(e));
                let next = self.node();
                self.edge(cur, next, op, s.line, s.col, stmt_text(s));
                next
            }
            StmtKind::Label(name) => {
                let next = self.node();
                self.edge(cur, next, EdgeOp::Skip, s.line, s.col, format!("{name}:"));
                next
            }
            StmtKind::Return(value) => {
                let op = EdgeOp::Return(value.as_ref().map(|v| self.expr(v)));
                self.edge(cur, self.exit, op, s.line, s.col, stmt_text(s));
                // Anything after a return is dead but still gets nodes.
                self.node()
            }
            StmtKind::Block { stmts, .. } => {
                self.scopes.push(HashMap::new());
                let end = self.block(stmts, cur);
                self.scopes.pop();
                end
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let then_start = self.node();
                let join = self.node();
                match else_branch {
                    None => {
                        self.cond(cond, cur, then_start, join);
                        let then_end = self.scoped(then_branch, then_start);
                        self.edge(then_end, join, EdgeOp::Skip, 0, 0, "skip".into());
                    }
                    Some(e) => {
                        let else_start = self.node();
                        self.cond(cond, cur, then_start, else_start);
                        let then_end = self.scoped(then_branch, then_start);
                        self.edge(then_end, join, EdgeOp::Skip, 0, 0, "skip".into());
                        let else_end = self.scoped(e, else_start);
                        self.edge(else_end, join, EdgeOp::Skip, 0, 0, "skip".into());
                    }
                }
                join
            }
            StmtKind::While { cond, body } => {
                let head = self.node();
                self.edge(cur, head, EdgeOp::Skip, 0, 0, "skip".into());
                let body_start = self.node();
                let after = self.node();
                self.cond(cond, head, body_start, after);
                let body_end = self.scoped(body, body_start);
                self.edge(body_end, head, EdgeOp::Skip, 0, 0, "skip".into());
                after
            }
            StmtKind::For { init, cond, update, body } => {
                self.scopes.push(HashMap::new());
                let head = match init {
                    Some(i) => self.stmt(i, cur),
                    None => {
                        let head = self.node();
                        self.edge(cur, head, EdgeOp::Skip, 0, 0, "skip".into());
                        head
                    }
                };
                let body_start = self.node();
                let after = self.node();
                self.cond(cond, head, body_start, after);
                let body_end = self.scoped(body, body_start);
                match update {
                    Some(u) => {
                        let op = match &u.kind {
                            StmtKind::Assign { target, op, value } => {
                                EdgeOp::Assign { target: self.target(target), op: *op, value: self.expr(value) }
                            }
                            StmtKind::Step { target, delta } => {
                                EdgeOp::Step { target: self.target(target), delta: *delta }
                            }
                            StmtKind::Call(e) => EdgeOp::Call(self.expr(e)),
                            _ => EdgeOp::Skip,
                        };
                        self.edge(body_end, head, op, u.line, u.col, stmt_text(u));
                    }
                    None => self.edge(body_end, head, EdgeOp::Skip, 0, 0, "skip".into()),
                }
                self.scopes.pop();
                after
            }
        }
    }

    /// Lowers a condition so control reaches `t` when it holds and `f` otherwise.
    fn cond(&mut self, e: &Expr, from: NodeId, t: NodeId, f: NodeId) {
        match &e.kind {
            ExprKind::Binary { op: BinOp::And, lhs, rhs, .. } => {
                let mid = self.node();
                self.cond(lhs, from, mid, f);
                self.cond(rhs, mid, t, f);
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs, .. } => {
                let mid = self.node();
                self.cond(lhs, from, t, mid);
                self.cond(rhs, mid, t, f);
            }
            ExprKind::Unary { op: UnaryOp::Not, operand } => self.cond(operand, from, f, t),
            _ => {
                let r = self.expr(e);
                let text = pretty_expr(e);
                let (line, col) = (e.span.line, e.span.col);
                self.edge(from, t, EdgeOp::Assume { cond: r.clone(), polarity: true }, line, col, format!("[{text}]"));
                self.edge(from, f, EdgeOp::Assume { cond: r, polarity: false }, line, col, format!("[!({text})]"));
            }
        }
    }

    fn lookup(&self, name: &str) -> RExpr {
        for scope in self.scopes.iter().rev() {
            if let Some(&slot) = scope.get(name) {
                return RExpr::Local(slot);
            }
        }
        match self.globals.get(name) {
            Some(&g) => RExpr::Global(g),
            None => panic!("unresolved identifier `{name}` in validated program"),
        }
    }

    fn slot(&self, name: &str) -> usize {
        match self.lookup(name) {
            RExpr::Local(s) => s,
            _ => panic!("`{name}` is not a local array"),
        }
    }

    fn target(&mut self, l: &LValue) -> RTarget {
        match l {
            LValue::Var { name, .. } => match self.lookup(name) {
                RExpr::Local(s) => RTarget::Local(s),
                RExpr::Global(g) => RTarget::Global(g),
                _ => unreachable!(),
            },
            LValue::Index { array, index, .. } => RTarget::Index { slot: self.slot(array), index: self.expr(index) },
        }
    }

    fn expr(&mut self, e: &Expr) -> RExpr {
        match &e.kind {
            ExprKind::Lit(v) => RExpr::Lit(*v),
            ExprKind::Var(name) => self.lookup(name),
            ExprKind::Index { array, index, .. } => {
                RExpr::Index { slot: self.slot(array), index: Box::new(self.expr(index)) }
            }
            ExprKind::Unary { op, operand } => RExpr::Unary { op: *op, operand: Box::new(self.expr(operand)) },
            ExprKind::Binary { op, lhs, rhs, .. } => {
                RExpr::Binary { op: *op, lhs: Box::new(self.expr(lhs)), rhs: Box::new(self.expr(rhs)) }
            }
            ExprKind::Call { name, args } => {
                let (func, kinds) = self.functions.get(name.as_str()).expect("validated call");
                let func = *func;
                let kinds = kinds.clone();
                let args = args
                    .iter()
                    .zip(kinds)
                    .map(|(a, k)| match (k, &a.kind) {
                        (ParamKind::IntArray, ExprKind::Var(n)) => RArg::Array(self.slot(n)),
                        _ => RArg::Value(self.expr(a)),
                    })
                    .collect();
                RExpr::Call { func, args }
            }
        }
    }
}

fn lvalue_text(l: &LValue) -> String {
    match l {
        LValue::Var { name, .. } => name.clone(),
        LValue::Index { array, index, .. } => format!("{array}[{}]", pretty_expr(index)),
    }
}

fn stmt_text(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Decl { name, init } => format!("int {name} = {}", pretty_expr(init)),
        StmtKind::Assign { target, op, value } => {
            let op = match op {
                AssignOp::Set => "=",
                AssignOp::Add => "+=",
                AssignOp::Sub => "-=",
            };
            format!("{} {op} {}", lvalue_text(target), pretty_expr(value))
        }
        StmtKind::Step { target, delta } => format!("{}{}", lvalue_text(target), if *delta > 0 { "++" } else { "--" }),
        StmtKind::Call(e) => pretty_expr(e),
        StmtKind::Return(Some(e)) => format!("return {}", pretty_expr(e)),
        StmtKind::Return(None) => "return".into(),
        _ => String::new(),
    }
}

impl fmt::Display for TestGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}
