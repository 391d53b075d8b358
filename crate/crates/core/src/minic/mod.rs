//! MiniC: a deterministic, integer-only subset of C.
//!
//! Programs consist of `int` globals with literal initialisers and functions
//! taking `int` / `int[]` parameters. Statements cover declarations with
//! initialisers, assignments (`=`, `+=`, `-=`, `++`, `--`), `if`/`else`,
//! `for`, `while`, `return`, blocks, call statements and `name:` labels.
//!
//! A parsed [`SourceProgram`] keeps the exact text it came from, so
//! [`render`] reproduces every line byte-for-byte and line numbers stay
//! meaningful across patches.

mod ast;
mod check;
mod lexer;
mod parser;
mod pretty;

use std::fmt;

pub use ast::*;
pub use check::validate;
pub use pretty::{expr as pretty_expr, pretty};


#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MinicError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}: undeclared identifier `{ident}`")]
    Scope { ident: String, line: usize },
    #[error("{line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

impl MinicError {
    pub fn line(&self) -> Option<usize> {
        match self {
            MinicError::Syntax { line, .. } | MinicError::Scope { line, .. } | MinicError::Semantic { line, .. } => {
                Some(*line)
            }
            MinicError::UnknownFunction(_) => None,
        }
    }
}

/// Parses `text` and resolves every identifier. No other semantic checks
/// run here; see [`validate`] and [`parse_valid`].
pub fn parse_program(text: &str) -> Result<SourceProgram, MinicError> {
    let program = parser::parse_syntax(text)?;
    check::check_scopes(&program)?;
    Ok(program)
}

/// [`parse_program`] followed by [`validate`].
pub fn parse_valid(text: &str) -> Result<SourceProgram, MinicError> {
    let program = parser::parse_syntax(text)?;
    validate(&program)?;
    Ok(program)
}

/// Returns the original text. Every line is reproduced exactly, including
/// whitespace, comments and the trailing newline.
pub fn render(p: &SourceProgram) -> String {
    let mut out = p.source_lines.join("\n");
    if p.trailing_newline {
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub name: String,
    pub params: Vec<ParamKind>,
    pub ret: ReturnKind,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(ToString::to_string).collect();
        write!(f, "{} {}({})", self.ret, self.name, params.join(", "))
    }
}

pub fn signature_of(p: &SourceProgram, function: &str) -> Result<Signature, MinicError> {
    let f = p.function(function).ok_or_else(|| MinicError::UnknownFunction(function.to_string()))?;
    Ok(Signature { name: f.name.clone(), params: f.params.iter().map(|p| p.kind).collect(), ret: f.ret })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0: &str = include_str!("../../corpus/find_last/p0.mc");

    #[test]
    fn parses_running_example() {
        let p = parse_program(P0).unwrap();
        assert_eq!(p.functions.len(), 1);
        let f = &p.functions[0];
        assert_eq!(f.name, "find_last");
        assert_eq!(
            f.params,
            vec![
                Param { name: "x".into(), kind: ParamKind::IntArray },
                Param { name: "y".into(), kind: ParamKind::Int }
            ]
        );
        assert_eq!(f.ret, ReturnKind::Int);
        assert_eq!((f.first_line, f.last_line), (1, 9));
        assert_eq!(p.line_count(), 9);
        validate(&p).unwrap();
    }

    #[test]
    fn minimal_program() {
        let p = parse_program("int f() { return 0; }").unwrap();
        assert_eq!(p.functions.len(), 1);
        assert!(p.functions[0].params.is_empty());
        assert_eq!(p.functions[0].body.len(), 1);
        assert!(matches!(p.functions[0].body[0].kind, StmtKind::Return(Some(_))));
    }

    #[test]
    fn undeclared_identifier_is_scope_error() {
        assert_eq!(
            parse_program("int f() { return z; }").unwrap_err(),
            MinicError::Scope { ident: "z".into(), line: 1 }
        );
    }

    #[test]
    fn use_before_declaration_is_scope_error() {
        let err = parse_program("int f() {\n  int a = b;\n  int b = 1;\n  return a;\n}").unwrap_err();
        assert_eq!(err, MinicError::Scope { ident: "b".into(), line: 2 });
    }

    #[test]
    fn loop_variable_does_not_escape() {
        let err = parse_program("int f() {\n for (int i = 0; i < 2; i++) i = i;\n return i;\n}").unwrap_err();
        assert_eq!(err, MinicError::Scope { ident: "i".into(), line: 3 });
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_program("int f() {\n  return 1 +;\n}").unwrap_err();
        assert!(matches!(err, MinicError::Syntax { line: 2, col: 13, .. }), "{err:?}");
    }

    #[test]
    fn render_is_byte_exact() {
        let p = parse_program(P0).unwrap();
        assert_eq!(render(&p), P0);
        let odd = "int g = -3;  // note\n\nint f(int a) {\r\n  return a + g;   }";
        assert_eq!(render(&parse_program(odd).unwrap()), odd);
    }

    #[test]
    fn render_parse_round_trip_is_identity() {
        let p = parse_program(P0).unwrap();
        assert_eq!(parse_program(&render(&p)).unwrap(), p);
    }

    #[test]
    fn pretty_print_preserves_structure() {
        let p = parse_program(P0).unwrap();
        let again = parse_program(&pretty(&p)).unwrap();
        assert!(p.same_structure(&again));
    }

    #[test]
    fn signature_of_running_example() {
        let p = parse_program(P0).unwrap();
        let sig = signature_of(&p, "find_last").unwrap();
        assert_eq!(sig.params, vec![ParamKind::IntArray, ParamKind::Int]);
        assert_eq!(sig.ret, ReturnKind::Int);
        assert_eq!(sig.to_string(), "int find_last(int[], int)");
        assert_eq!(signature_of(&p, "nope"), Err(MinicError::UnknownFunction("nope".into())));
    }

    #[test]
    fn validate_rejects_missing_return() {
        let p = parse_program("int f(int a) {\n if (a) return 1;\n}").unwrap();
        assert!(matches!(validate(&p), Err(MinicError::Semantic { line: 3, .. })));
    }

    #[test]
    fn validate_rejects_kind_errors() {
        for src in [
            "int f(int a[]) { return a; }",
            "int f(int a) { return a[0]; }",
            "void g() { return; }\nint f() { return g(); }",
            "int g(int a[]) { return 0; }\nint f(int b) { return g(b); }",
            "int g(int a) { return 0; }\nint f() { return g(); }",
            "void f() { return 1; }",
        ] {
            let p = parse_program(src).unwrap();
            assert!(matches!(validate(&p), Err(MinicError::Semantic { .. })), "{src}");
        }
    }

    #[test]
    fn every_statement_line_is_within_bounds() {
        let p = parse_program(P0).unwrap();
        for f in &p.functions {
            for s in &f.body {
                s.visit_exprs(&mut |e| assert!((1..=p.line_count()).contains(&e.span.line)));
                assert!((1..=p.line_count()).contains(&s.line));
            }
        }
    }
}
