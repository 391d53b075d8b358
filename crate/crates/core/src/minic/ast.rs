use std::fmt;

/// Source region of an expression or operator token. Lines are 1-based,
/// columns are 0-based byte offsets into the line; `end_col` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl Span {
    pub fn single_line(&self) -> bool {
        self.line == self.end_line
    }

    pub fn to(&self, other: &Span) -> Span {
        Span { line: self.line, col: self.col, end_line: other.end_line, end_col: other.end_col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Int,
    IntArray,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKind::Int => f.write_str("int"),
            ParamKind::IntArray => f.write_str("int[]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReturnKind {
    Int,
    Void,
}

impl fmt::Display for ReturnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReturnKind::Int => f.write_str("int"),
            ReturnKind::Void => f.write_str("void"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Global {
    pub name: String,
    pub init: i64,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: ReturnKind,
    pub body: Vec<Stmt>,
    /// First and last source line of the definition (header through closing brace).
    pub first_line: usize,
    pub last_line: usize,
}

impl FunctionDef {
    pub fn contains_line(&self, line: usize) -> bool {
        (self.first_line..=self.last_line).contains(&line)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var { name: String, span: Span },
    Index { array: String, array_span: Span, index: Expr },
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Var { name, .. } => name,
            LValue::Index { array, .. } => array,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Decl { name: String, init: Expr },
    Assign { target: LValue, op: AssignOp, value: Expr },
    /// `x++` (delta 1) or `x--` (delta -1).
    Step { target: LValue, delta: i64 },
    If { cond: Expr, then_branch: Box<Stmt>, else_branch: Option<Box<Stmt>> },
    For { init: Option<Box<Stmt>>, cond: Expr, update: Option<Box<Stmt>>, body: Box<Stmt> },
    While { cond: Expr, body: Box<Stmt> },
    Return(Option<Expr>),
    Block { stmts: Vec<Stmt>, close_line: usize },
    Call(Expr),
    Label(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Lit(i64),
    Var(String),
    Index { array: String, array_span: Span, index: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary { op: BinOp, op_span: Span, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { name: String, args: Vec<Expr> },
}

/// A parsed MiniC compilation unit together with the exact text it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceProgram {
    pub globals: Vec<Global>,
    pub functions: Vec<FunctionDef>,
    /// Original text split on `\n`; line `n` lives at index `n - 1`.
    pub source_lines: Vec<String>,
    pub trailing_newline: bool,
}

impl SourceProgram {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn line_count(&self) -> usize {
        self.source_lines.len()
    }

    pub fn line(&self, n: usize) -> Option<&str> {
        n.checked_sub(1).and_then(|i| self.source_lines.get(i)).map(String::as_str)
    }

    /// Names of the functions reachable from `root` through calls, `root` first,
    /// the rest in definition order.
    pub fn reachable_functions(&self, root: &str) -> Vec<usize> {
        let Some(start) = self.function_index(root) else {
            return Vec::new();
        };
        let mut seen = vec![false; self.functions.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(idx) = stack.pop() {
            let mut callees = Vec::new();
            for stmt in &self.functions[idx].body {
                stmt.visit_exprs(&mut |e| collect_calls(e, &mut callees));
            }
            for name in callees {
                if let Some(c) = self.function_index(&name) {
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        let mut out = vec![start];
        out.extend((0..self.functions.len()).filter(|&i| i != start && seen[i]));
        out
    }

    /// The function no other function calls, first in definition order.
    pub fn entry_function(&self) -> Option<&str> {
        let mut called = Vec::new();
        for f in &self.functions {
            for stmt in &f.body {
                stmt.visit_exprs(&mut |e| collect_calls(e, &mut called));
            }
        }
        self.functions
            .iter()
            .find(|f| !called.contains(&f.name))
            .or(self.functions.first())
            .map(|f| f.name.as_str())
    }

    /// Copy with every span and line number zeroed; two programs are
    /// structurally identical when their stripped forms are equal.
    pub fn structure(&self) -> SourceProgram {
        SourceProgram {
            globals: self.globals.iter().map(|g| Global { line: 0, ..g.clone() }).collect(),
            functions: self
                .functions
                .iter()
                .map(|f| FunctionDef {
                    name: f.name.clone(),
                    params: f.params.clone(),
                    ret: f.ret,
                    body: f.body.iter().map(Stmt::stripped).collect(),
                    first_line: 0,
                    last_line: 0,
                })
                .collect(),
            source_lines: Vec::new(),
            trailing_newline: false,
        }
    }

    pub fn same_structure(&self, other: &SourceProgram) -> bool {
        self.structure() == other.structure()
    }
}

fn collect_calls(e: &Expr, out: &mut Vec<String>) {
    e.walk(&mut |sub| {
        if let ExprKind::Call { name, .. } = &sub.kind {
            out.push(name.clone());
        }
    });
}

impl Expr {
    /// Pre-order traversal over this expression and all subexpressions.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Lit(_) | ExprKind::Var(_) => {}
            ExprKind::Index { index, .. } => index.walk(f),
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
        }
    }

    fn stripped(&self) -> Expr {
        let kind = match &self.kind {
            ExprKind::Lit(v) => ExprKind::Lit(*v),
            ExprKind::Var(n) => ExprKind::Var(n.clone()),
            ExprKind::Index { array, index, .. } => ExprKind::Index {
                array: array.clone(),
                array_span: Span::default(),
                index: Box::new(index.stripped()),
            },
            ExprKind::Unary { op, operand } => ExprKind::Unary { op: *op, operand: Box::new(operand.stripped()) },
            ExprKind::Binary { op, lhs, rhs, .. } => ExprKind::Binary {
                op: *op,
                op_span: Span::default(),
                lhs: Box::new(lhs.stripped()),
                rhs: Box::new(rhs.stripped()),
            },
            ExprKind::Call { name, args } => {
                ExprKind::Call { name: name.clone(), args: args.iter().map(Expr::stripped).collect() }
            }
        };
        Expr { kind, span: Span::default() }
    }
}

impl LValue {
    fn stripped(&self) -> LValue {
        match self {
            LValue::Var { name, .. } => LValue::Var { name: name.clone(), span: Span::default() },
            LValue::Index { array, index, .. } => {
                LValue::Index { array: array.clone(), array_span: Span::default(), index: index.stripped() }
            }
        }
    }
}

impl Stmt {
    /// Visits every expression in this statement and nested statements,
    /// including index expressions of assignment targets.
    pub fn visit_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match &self.kind {
            StmtKind::Decl { init, .. } => f(init),
            StmtKind::Assign { target, value, .. } => {
                if let LValue::Index { index, .. } = target {
                    f(index);
                }
                f(value);
            }
            StmtKind::Step { target, .. } => {
                if let LValue::Index { index, .. } = target {
                    f(index);
                }
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                f(cond);
                then_branch.visit_exprs(f);
                if let Some(e) = else_branch {
                    e.visit_exprs(f);
                }
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(s) = init {
                    s.visit_exprs(f);
                }
                f(cond);
                if let Some(s) = update {
                    s.visit_exprs(f);
                }
                body.visit_exprs(f);
            }
            StmtKind::While { cond, body } => {
                f(cond);
                body.visit_exprs(f);
            }
            StmtKind::Return(value) => {
                if let Some(e) = value {
                    f(e);
                }
            }
            StmtKind::Block { stmts, .. } => stmts.iter().for_each(|s| s.visit_exprs(f)),
            StmtKind::Call(e) => f(e),
            StmtKind::Label(_) => {}
        }
    }

    fn stripped(&self) -> Stmt {
        let kind = match &self.kind {
            StmtKind::Decl { name, init } => StmtKind::Decl { name: name.clone(), init: init.stripped() },
            StmtKind::Assign { target, op, value } => {
                StmtKind::Assign { target: target.stripped(), op: *op, value: value.stripped() }
            }
            StmtKind::Step { target, delta } => StmtKind::Step { target: target.stripped(), delta: *delta },
            StmtKind::If { cond, then_branch, else_branch } => StmtKind::If {
                cond: cond.stripped(),
                then_branch: Box::new(then_branch.stripped()),
                else_branch: else_branch.as_ref().map(|e| Box::new(e.stripped())),
            },
            StmtKind::For { init, cond, update, body } => StmtKind::For {
                init: init.as_ref().map(|s| Box::new(s.stripped())),
                cond: cond.stripped(),
                update: update.as_ref().map(|s| Box::new(s.stripped())),
                body: Box::new(body.stripped()),
            },
            StmtKind::While { cond, body } => {
                StmtKind::While { cond: cond.stripped(), body: Box::new(body.stripped()) }
            }
            StmtKind::Return(v) => StmtKind::Return(v.as_ref().map(Expr::stripped)),
            StmtKind::Block { stmts, .. } => {
                StmtKind::Block { stmts: stmts.iter().map(Stmt::stripped).collect(), close_line: 0 }
            }
            StmtKind::Call(e) => StmtKind::Call(e.stripped()),
            StmtKind::Label(n) => StmtKind::Label(n.clone()),
        };
        Stmt { kind, line: 0, col: 0 }
    }
}
