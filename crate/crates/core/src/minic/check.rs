use std::collections::HashMap;

use super::ast::*;
use super::MinicError;

/// Name resolution only: every identifier must be declared before use.
pub fn check_scopes(p: &SourceProgram) -> Result<(), MinicError> {
    Checker::new(p, false).run()
}

/// Full semantic validation: scoping, kinds, call shapes, return discipline.
pub fn validate(p: &SourceProgram) -> Result<(), MinicError> {
    Checker::new(p, true).run()
}

struct FnInfo {
    params: Vec<ParamKind>,
    ret: ReturnKind,
}

struct Checker<'a> {
    program: &'a SourceProgram,
    full: bool,
    functions: HashMap<&'a str, FnInfo>,
    globals: HashMap<&'a str, ()>,
    scopes: Vec<HashMap<String, ParamKind>>,
    current_ret: ReturnKind,
}

impl<'a> Checker<'a> {
    fn new(program: &'a SourceProgram, full: bool) -> Self {
        Checker {
            program,
            full,
            functions: HashMap::new(),
            globals: HashMap::new(),
            scopes: Vec::new(),
            current_ret: ReturnKind::Int,
        }
    }

    fn semantic<T>(&self, line: usize, message: impl Into<String>) -> Result<T, MinicError> {
        Err(MinicError::Semantic { line, message: message.into() })
    }

    fn run(mut self) -> Result<(), MinicError> {
        let p = self.program;
        for g in &p.globals {
            if self.globals.insert(&g.name, ()).is_some() && self.full {
                return self.semantic(g.line, format!("global `{}` declared twice", g.name));
            }
        }
        for f in &p.functions {
            let info = FnInfo { params: f.params.iter().map(|p| p.kind).collect(), ret: f.ret };
            if self.functions.insert(&f.name, info).is_some() && self.full {
                return self.semantic(f.first_line, format!("function `{}` defined twice", f.name));
            }
            if self.full && self.globals.contains_key(f.name.as_str()) {
                return self.semantic(f.first_line, format!("`{}` is both a global and a function", f.name));
            }
        }
        for f in &p.functions {
            self.current_ret = f.ret;
            let mut params = HashMap::new();
            for param in &f.params {
                if params.insert(param.name.clone(), param.kind).is_some() && self.full {
                    return self.semantic(f.first_line, format!("parameter `{}` declared twice", param.name));
                }
            }
            self.scopes = vec![params, HashMap::new()];
            for s in &f.body {
                self.stmt(s)?;
            }
            if self.full && f.ret == ReturnKind::Int && !always_returns(&f.body) {
                return self.semantic(
                    f.last_line,
                    format!("function `{}` may reach its end without returning a value", f.name),
                );
            }
        }
        Ok(())
    }

    fn lookup(&self, name: &str) -> Option<ParamKind> {
        for scope in self.scopes.iter().rev() {
            if let Some(k) = scope.get(name) {
                return Some(*k);
            }
        }
        self.globals.get(name).map(|_| ParamKind::Int)
    }

    fn declare(&mut self, name: &str, line: usize) -> Result<(), MinicError> {
        let scope = self.scopes.last_mut().expect("scope stack never empty inside a function");
        if scope.insert(name.to_string(), ParamKind::Int).is_some() && self.full {
            return self.semantic(line, format!("`{name}` declared twice in the same scope"));
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), MinicError> {
        match &s.kind {
            StmtKind::Decl { name, init } => {
                self.int_expr(init)?;
                self.declare(name, s.line)?;
            }
            StmtKind::Assign { target, value, .. } => {
                self.lvalue(target, s.line)?;
                self.int_expr(value)?;
            }
            StmtKind::Step { target, .. } => self.lvalue(target, s.line)?,
            StmtKind::If { cond, then_branch, else_branch } => {
                self.int_expr(cond)?;
                self.nested(then_branch)?;
                if let Some(e) = else_branch {
                    self.nested(e)?;
                }
            }
            StmtKind::For { init, cond, update, body } => {
                self.scopes.push(HashMap::new());
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                self.int_expr(cond)?;
                if let Some(u) = update {
                    self.stmt(u)?;
                }
                self.nested(body)?;
                self.scopes.pop();
            }
            StmtKind::While { cond, body } => {
                self.int_expr(cond)?;
                self.nested(body)?;
            }
            StmtKind::Return(value) => match (value, self.current_ret) {
                (Some(e), ReturnKind::Int) => self.int_expr(e)?,
                (None, ReturnKind::Void) => {}
                (Some(e), ReturnKind::Void) => {
                    self.expr(e)?;
                    if self.full {
                        return self.semantic(s.line, "void function returns a value");
                    }
                }
                (None, ReturnKind::Int) => {
                    if self.full {
                        return self.semantic(s.line, "int function returns without a value");
                    }
                }
            },
            StmtKind::Block { stmts, .. } => {
                self.scopes.push(HashMap::new());
                for inner in stmts {
                    self.stmt(inner)?;
                }
                self.scopes.pop();
            }
            StmtKind::Call(e) => {
                if let ExprKind::Call { name, args } = &e.kind {
                    self.call(name, args, e.span.line, true)?;
                }
            }
            StmtKind::Label(_) => {}
        }
        Ok(())
    }

    /// A non-block statement in branch/body position gets its own scope.
    fn nested(&mut self, s: &Stmt) -> Result<(), MinicError> {
        self.scopes.push(HashMap::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    fn lvalue(&mut self, target: &LValue, line: usize) -> Result<(), MinicError> {
        match target {
            LValue::Var { name, .. } => match self.lookup(name) {
                None => Err(MinicError::Scope { ident: name.clone(), line }),
                Some(ParamKind::IntArray) if self.full => {
                    self.semantic(line, format!("cannot assign to array `{name}` as a whole"))
                }
                Some(_) => Ok(()),
            },
            LValue::Index { array, index, .. } => {
                match self.lookup(array) {
                    None => return Err(MinicError::Scope { ident: array.clone(), line }),
                    Some(ParamKind::Int) if self.full => {
                        return self.semantic(line, format!("`{array}` is not an array"));
                    }
                    Some(_) => {}
                }
                self.int_expr(index)
            }
        }
    }

    fn int_expr(&mut self, e: &Expr) -> Result<(), MinicError> {
        let kind = self.expr(e)?;
        if self.full && kind != Some(ParamKind::Int) {
            let what = if kind.is_none() { "void call" } else { "array" };
            return self.semantic(e.span.line, format!("{what} used where an integer is required"));
        }
        Ok(())
    }

    /// Returns the value kind of `e`; `None` for a void call.
    fn expr(&mut self, e: &Expr) -> Result<Option<ParamKind>, MinicError> {
        match &e.kind {
            ExprKind::Lit(_) => Ok(Some(ParamKind::Int)),
            ExprKind::Var(name) => match self.lookup(name) {
                Some(k) => Ok(Some(k)),
                None => Err(MinicError::Scope { ident: name.clone(), line: e.span.line }),
            },
            ExprKind::Index { array, index, .. } => {
                match self.lookup(array) {
                    None => return Err(MinicError::Scope { ident: array.clone(), line: e.span.line }),
                    Some(ParamKind::Int) if self.full => {
                        return self.semantic(e.span.line, format!("`{array}` is not an array"));
                    }
                    Some(_) => {}
                }
                self.int_expr(index)?;
                Ok(Some(ParamKind::Int))
            }
            ExprKind::Unary { operand, .. } => {
                self.int_expr(operand)?;
                Ok(Some(ParamKind::Int))
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.int_expr(lhs)?;
                self.int_expr(rhs)?;
                Ok(Some(ParamKind::Int))
            }
            ExprKind::Call { name, args } => self.call(name, args, e.span.line, false),
        }
    }

    fn call(&mut self, name: &str, args: &[Expr], line: usize, statement: bool) -> Result<Option<ParamKind>, MinicError> {
        let Some(info) = self.functions.get(name) else {
            return Err(MinicError::Scope { ident: name.to_string(), line });
        };
        let expected = info.params.clone();
        let ret = info.ret;
        if self.full && expected.len() != args.len() {
            return self.semantic(line, format!("`{name}` expects {} argument(s), got {}", expected.len(), args.len()));
        }
        for (arg, want) in args.iter().zip(expected.iter().map(Some).chain(std::iter::repeat(None))) {
            match want {
                Some(ParamKind::IntArray) => {
                    let is_array_var =
                        matches!(&arg.kind, ExprKind::Var(n) if self.lookup(n) == Some(ParamKind::IntArray));
                    self.expr(arg)?;
                    if self.full && !is_array_var {
                        return self.semantic(line, format!("argument to `{name}` must be an array variable"));
                    }
                }
                _ => self.int_expr(arg)?,
            }
        }
        if ret == ReturnKind::Void {
            if self.full && !statement {
                return self.semantic(line, format!("void function `{name}` used as a value"));
            }
            return Ok(None);
        }
        Ok(Some(ParamKind::Int))
    }
}

/// Conservative: loops are assumed to possibly run zero times.
pub(super) fn always_returns(stmts: &[Stmt]) -> bool {
    stmts.iter().any(stmt_always_returns)
}

fn stmt_always_returns(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::Block { stmts, .. } => always_returns(stmts),
        StmtKind::If { then_branch, else_branch: Some(e), .. } => {
            stmt_always_returns(then_branch) && stmt_always_returns(e)
        }
        _ => false,
    }
}
