use std::fmt::Write;

use super::ast::*;

/// Canonical formatting from the AST alone (four-space indent, one
/// statement per line). Line numbers are not preserved.
pub fn pretty(p: &SourceProgram) -> String {
    let mut out = String::new();
    for g in &p.globals {
        let _ = writeln!(out, "int {} = {};", g.name, g.init);
    }
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 || !p.globals.is_empty() {
            out.push('\n');
        }
        let params: Vec<String> = f
            .params
            .iter()
            .map(|p| match p.kind {
                ParamKind::Int => format!("int {}", p.name),
                ParamKind::IntArray => format!("int {}[]", p.name),
            })
            .collect();
        let _ = writeln!(out, "{} {}({}) {{", f.ret, f.name, params.join(", "));
        for s in &f.body {
            stmt(&mut out, s, 1);
        }
        out.push_str("}\n");
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::If { cond, then_branch, else_branch } => {
            let _ = write!(out, "if ({})", expr(cond));
            let braced = branch(out, then_branch, depth);
            if let Some(e) = else_branch {
                if braced {
                    out.push_str(" else");
                } else {
                    indent(out, depth);
                    out.push_str("else");
                }
                if branch(out, e, depth) {
                    out.push('\n');
                }
            } else if braced {
                out.push('\n');
            }
        }
        StmtKind::For { init, cond, update, body } => {
            let init = init.as_ref().map(|s| simple(s)).unwrap_or_default();
            let update = update.as_ref().map(|s| simple(s)).unwrap_or_default();
            let _ = write!(out, "for ({init}; {}; {update})", expr(cond));
            if branch(out, body, depth) {
                out.push('\n');
            }
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({})", expr(cond));
            if branch(out, body, depth) {
                out.push('\n');
            }
        }
        StmtKind::Block { stmts, .. } => {
            out.push_str("{\n");
            for inner in stmts {
                stmt(out, inner, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        StmtKind::Return(None) => out.push_str("return;\n"),
        StmtKind::Return(Some(e)) => {
            let _ = writeln!(out, "return {};", expr(e));
        }
        StmtKind::Label(name) => {
            let _ = writeln!(out, "{name}:");
        }
        _ => {
            let _ = writeln!(out, "{};", simple(s));
        }
    }
}

/// Prints the body of a compound statement after its header. Returns true
/// when the body was a block and the closing brace is left unterminated.
fn branch(out: &mut String, s: &Stmt, depth: usize) -> bool {
    match &s.kind {
        StmtKind::Block { stmts, .. } => {
            out.push_str(" {\n");
            for inner in stmts {
                stmt(out, inner, depth + 1);
            }
            indent(out, depth);
            out.push('}');
            true
        }
        _ => {
            out.push('\n');
            stmt(out, s, depth + 1);
            false
        }
    }
}

fn simple(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Decl { name, init } => format!("int {name} = {}", expr(init)),
        StmtKind::Assign { target, op, value } => {
            let op = match op {
                AssignOp::Set => "=",
                AssignOp::Add => "+=",
                AssignOp::Sub => "-=",
            };
            format!("{} {op} {}", lvalue(target), expr(value))
        }
        StmtKind::Step { target, delta } => {
            format!("{}{}", lvalue(target), if *delta > 0 { "++" } else { "--" })
        }
        StmtKind::Call(e) => expr(e),
        _ => String::new(),
    }
}

fn lvalue(l: &LValue) -> String {
    match l {
        LValue::Var { name, .. } => name.clone(),
        LValue::Index { array, index, .. } => format!("{array}[{}]", expr(index)),
    }
}

pub fn expr(e: &Expr) -> String {
    expr_prec(e, 0)
}

fn expr_prec(e: &Expr, parent: u8) -> String {
    match &e.kind {
        ExprKind::Lit(v) => v.to_string(),
        ExprKind::Var(n) => n.clone(),
        ExprKind::Index { array, index, .. } => format!("{array}[{}]", expr(index)),
        ExprKind::Unary { op, operand } => {
            let sym = match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "!",
            };
            // Nested negation must not print as `--`.
            let inner = expr_prec(operand, 7);
            if sym == "-" && inner.starts_with('-') {
                format!("-({inner})")
            } else {
                format!("{sym}{inner}")
            }
        }
        ExprKind::Binary { op, lhs, rhs, .. } => {
            let p = op.precedence();
            let text = format!("{} {} {}", expr_prec(lhs, p), op.symbol(), expr_prec(rhs, p + 1));
            if p < parent {
                format!("({text})")
            } else {
                text
            }
        }
        ExprKind::Call { name, args } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            format!("{name}({})", args.join(", "))
        }
    }
}
