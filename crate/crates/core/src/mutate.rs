//! Single-line mutants of a MiniC program, used to simulate bugs.
//!
//! Every operator rewrites one token range on one source line. The result is
//! reparsed and validated; rewrites that fail either check are dropped and
//! reported.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::minic::{
    parse_valid, render, BinOp, Expr, ExprKind, LValue, MinicError, ParamKind, SourceProgram, Span, Stmt,
    StmtKind,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutateError {
    #[error("no applicable mutant in `{0}`")]
    NoApplicableMutant(String),
    #[error(transparent)]
    Program(#[from] MinicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorGroup {
    ValueReplacement,
    OperatorReplacement,
    ReferenceReplacement,
}

impl fmt::Display for OperatorGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorGroup::ValueReplacement => "value-replacement",
            OperatorGroup::OperatorReplacement => "operator-replacement",
            OperatorGroup::ReferenceReplacement => "reference-replacement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MutationOperator {
    pub id: &'static str,
    pub group: OperatorGroup,
    pub description: &'static str,
}

const fn op(id: &'static str, group: OperatorGroup, description: &'static str) -> MutationOperator {
    MutationOperator { id, group, description }
}

use OperatorGroup::*;

const CATALOG: [MutationOperator; 15] = [
    op("CRP-inc", ValueReplacement, "constant c -> c+1"),
    op("CRP-dec", ValueReplacement, "constant c -> c-1"),
    op("CRP-zero", ValueReplacement, "constant c -> 0"),
    op("VRP", ValueReplacement, "variable -> other in-scope int variable"),
    op("AOR-add-sub", OperatorReplacement, "+ <-> -"),
    op("AOR-mul-div", OperatorReplacement, "* <-> /"),
    op("ROR-lt-le", OperatorReplacement, "< -> <="),
    op("ROR-le-lt", OperatorReplacement, "<= -> <"),
    op("ROR-le-eq", OperatorReplacement, "<= -> =="),
    op("ROR-eq-ne", OperatorReplacement, "== -> !="),
    op("ROR-gt-ge", OperatorReplacement, "> -> >="),
    op("LCR-and-or", OperatorReplacement, "&& <-> ||"),
    op("ARR-idx-inc", ReferenceReplacement, "index e -> e+1"),
    op("ARR-idx-dec", ReferenceReplacement, "index e -> e-1"),
    op("ARR-base-swap", ReferenceReplacement, "array base -> other in-scope array"),
];

pub fn list_operators() -> &'static [MutationOperator] {
    &CATALOG
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutant {
    pub operator: &'static str,
    pub line: usize,
    /// 0-based column of the rewritten range.
    pub col: usize,
    /// Replacement text for the range, e.g. `==`.
    pub replacement: String,
    pub program: SourceProgram,
}

impl Mutant {
    /// Header comment for a written mutant file.
    pub fn header(&self) -> String {
        format!("// mutant: {} @ line {}", self.operator, self.line)
    }

    /// Mutant source prefixed with [`Mutant::header`]. Line numbers shift
    /// by one in this form.
    pub fn to_file_text(&self) -> String {
        format!("{}\n{}", self.header(), render(&self.program))
    }
}

impl fmt::Display for Mutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}:{} -> `{}`", self.operator, self.line, self.col + 1, self.replacement)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub operator: &'static str,
    pub line: usize,
    pub col: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Enumeration {
    pub mutants: Vec<Mutant>,
    pub rejected: Vec<Rejected>,
}

/// A proposed rewrite of `[col, end_col)` on `line`.
struct Site {
    op: usize,
    line: usize,
    col: usize,
    end_col: usize,
    text: String,
}

/// Every valid single-line mutant inside `function` and its callees,
/// ordered by line, column, operator and replacement text.
pub fn enumerate_mutants(p: &SourceProgram, function: &str) -> Result<Enumeration, MutateError> {
    if p.function(function).is_none() {
        return Err(MinicError::UnknownFunction(function.to_string()).into());
    }
    let mut sites = Vec::new();
    for idx in p.reachable_functions(function) {
        let f = &p.functions[idx];
        let mut ints: Vec<&str> = p.globals.iter().map(|g| g.name.as_str()).collect();
        let mut arrays = Vec::new();
        for prm in &f.params {
            match prm.kind {
                ParamKind::Int => ints.push(&prm.name),
                ParamKind::IntArray => arrays.push(prm.name.as_str()),
            }
        }
        for s in &f.body {
            collect_decls(s, &mut ints);
        }
        ints.sort_unstable();
        ints.dedup();
        arrays.sort_unstable();
        let names = Names { ints, arrays };
        for s in &f.body {
            stmt_sites(s, &names, &mut sites);
        }
    }
    sites.sort_by(|a, b| (a.line, a.col, a.op, &a.text).cmp(&(b.line, b.col, b.op, &b.text)));

    let mut out = Enumeration::default();
    let base = p.structure();
    for s in sites {
        let operator = CATALOG[s.op].id;
        let reject = |reason: String| Rejected { operator, line: s.line, col: s.col, reason };
        let Some(src) = p.line(s.line) else { continue };
        if s.end_col > src.len() || s.col > s.end_col {
            out.rejected.push(reject("range outside line".into()));
            continue;
        }
        let mut lines = p.source_lines.clone();
        lines[s.line - 1] = format!("{}{}{}", &src[..s.col], s.text, &src[s.end_col..]);
        let mut text = lines.join("\n");
        if p.trailing_newline {
            text.push('\n');
        }
        match parse_valid(&text) {
            Ok(m) if m.structure() == base => out.rejected.push(reject("no structural change".into())),
            Ok(m) => out.mutants.push(Mutant {
                operator,
                line: s.line,
                col: s.col,
                replacement: s.text,
                program: m,
            }),
            Err(e) => out.rejected.push(reject(e.to_string())),
        }
    }
    Ok(out)
}

/// Uniform seeded choice from [`enumerate_mutants`].
pub fn pick_mutant(p: &SourceProgram, function: &str, seed: u64) -> Result<Mutant, MutateError> {
    let mut all = enumerate_mutants(p, function)?.mutants;
    if all.is_empty() {
        return Err(MutateError::NoApplicableMutant(function.to_string()));
    }
    let i = ChaCha8Rng::seed_from_u64(seed).gen_range(0..all.len());
    Ok(all.swap_remove(i))
}

struct Names<'a> {
    ints: Vec<&'a str>,
    arrays: Vec<&'a str>,
}

fn collect_decls<'a>(s: &'a Stmt, out: &mut Vec<&'a str>) {
    match &s.kind {
        StmtKind::Decl { name, .. } => out.push(name),
        StmtKind::If { then_branch, else_branch, .. } => {
            collect_decls(then_branch, out);
            if let Some(e) = else_branch {
                collect_decls(e, out);
            }
        }
        StmtKind::For { init, update, body, .. } => {
            for x in [init, update].into_iter().flatten() {
                collect_decls(x, out);
            }
            collect_decls(body, out);
        }
        StmtKind::While { body, .. } => collect_decls(body, out),
        StmtKind::Block { stmts, .. } => stmts.iter().for_each(|x| collect_decls(x, out)),
        _ => {}
    }
}

fn stmt_sites(s: &Stmt, names: &Names, out: &mut Vec<Site>) {
    match &s.kind {
        StmtKind::Assign { target, .. } | StmtKind::Step { target, .. } => {
            if let LValue::Index { array, array_span, index } = target {
                index_sites(array, array_span, index, names, out);
            }
        }
        StmtKind::If { then_branch, else_branch, .. } => {
            stmt_sites(then_branch, names, out);
            if let Some(e) = else_branch {
                stmt_sites(e, names, out);
            }
        }
        StmtKind::For { init, update, body, .. } => {
            for x in [init, update].into_iter().flatten() {
                stmt_sites(x, names, out);
            }
            stmt_sites(body, names, out);
        }
        StmtKind::While { body, .. } => stmt_sites(body, names, out),
        StmtKind::Block { stmts, .. } => stmts.iter().for_each(|x| stmt_sites(x, names, out)),
        _ => {}
    }
    // Only the statement's own expressions; nested statements were handled above.
    let own: Vec<&Expr> = match &s.kind {
        StmtKind::Decl { init, .. } => vec![init],
        StmtKind::Assign { target, value, .. } => {
            let mut v = vec![value];
            if let LValue::Index { index, .. } = target {
                v.push(index);
            }
            v
        }
        StmtKind::Step { target: LValue::Index { index, .. }, .. } => vec![index],
        StmtKind::If { cond, .. } | StmtKind::For { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
        StmtKind::Return(Some(e)) | StmtKind::Call(e) => vec![e],
        _ => vec![],
    };
    for e in own {
        e.walk(&mut |sub| expr_sites(sub, names, out));
    }
}

fn push(out: &mut Vec<Site>, id: &str, span: &Span, text: String) {
    if !span.single_line() {
        return;
    }
    let op = CATALOG.iter().position(|o| o.id == id).expect("catalog id");
    out.push(Site { op, line: span.line, col: span.col, end_col: span.end_col, text });
}

fn literal(v: i64) -> String {
    if v < 0 {
        format!("({v})")
    } else {
        v.to_string()
    }
}

fn expr_sites(e: &Expr, names: &Names, out: &mut Vec<Site>) {
    match &e.kind {
        ExprKind::Lit(c) => {
            push(out, "CRP-inc", &e.span, literal(c.wrapping_add(1)));
            push(out, "CRP-dec", &e.span, literal(c.wrapping_sub(1)));
            if *c != 0 {
                push(out, "CRP-zero", &e.span, "0".into());
            }
        }
        ExprKind::Var(name) => {
            for other in names.ints.iter().filter(|n| **n != name) {
                push(out, "VRP", &e.span, other.to_string());
            }
        }
        ExprKind::Index { array, array_span, index } => index_sites(array, array_span, index, names, out),
        ExprKind::Binary { op, op_span, .. } => {
            let (id, to) = match op {
                BinOp::Add => ("AOR-add-sub", "-"),
                BinOp::Sub => ("AOR-add-sub", "+"),
                BinOp::Mul => ("AOR-mul-div", "/"),
                BinOp::Div => ("AOR-mul-div", "*"),
                BinOp::Lt => ("ROR-lt-le", "<="),
                BinOp::Le => {
                    push(out, "ROR-le-lt", op_span, "<".into());
                    ("ROR-le-eq", "==")
                }
                BinOp::Eq => ("ROR-eq-ne", "!="),
                BinOp::Gt => ("ROR-gt-ge", ">="),
                BinOp::And => ("LCR-and-or", "||"),
                BinOp::Or => ("LCR-and-or", "&&"),
                BinOp::Rem | BinOp::Ge | BinOp::Ne => return,
            };
            push(out, id, op_span, to.into());
        }
        ExprKind::Unary { .. } | ExprKind::Call { .. } => {}
    }
}

fn index_sites(array: &str, array_span: &Span, index: &Expr, names: &Names, out: &mut Vec<Site>) {
    let inner = pretty_index(index);
    push(out, "ARR-idx-inc", &index.span, format!("{inner} + 1"));
    push(out, "ARR-idx-dec", &index.span, format!("{inner} - 1"));
    for other in names.arrays.iter().filter(|n| **n != array) {
        push(out, "ARR-base-swap", array_span, other.to_string());
    }
}

/// Index text, parenthesised when its top operator binds looser than `+`.
fn pretty_index(index: &Expr) -> String {
    let text = crate::minic::pretty_expr(index);
    match &index.kind {
        ExprKind::Binary { op, .. } if op.precedence() < BinOp::Add.precedence() => format!("({text})"),
        _ => text,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::history::VersionHistory;

    fn find_last() -> VersionHistory {
        VersionHistory::load(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/find_last")).unwrap()
    }

    #[test]
    fn catalog_shape() {
        let ops = list_operators();
        assert_eq!(ops.len(), 15);
        let ids: BTreeSet<&str> = ops.iter().map(|o| o.id).collect();
        assert_eq!(ids.len(), ops.len());
        assert!(ids.contains("ROR-le-eq"));
        let groups: BTreeSet<OperatorGroup> = ops.iter().map(|o| o.group).collect();
        assert_eq!(groups.len(), 3);
    }

    #[test]
    fn p2_reaches_p3() {
        let h = find_last();
        let e = enumerate_mutants(h.version(2), "find_last").unwrap();
        let hit: Vec<&Mutant> = e.mutants.iter().filter(|m| m.program.same_structure(h.version(3))).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!((hit[0].operator, hit[0].line), ("ROR-le-eq", 6));
        assert_eq!(render(&hit[0].program), render(h.version(3)));
    }

    #[test]
    fn every_mutant_differs_on_exactly_one_line() {
        let h = find_last();
        for v in h.versions() {
            let e = enumerate_mutants(v, "find_last").unwrap();
            for m in &e.mutants {
                assert_eq!(m.program.source_lines.len(), v.source_lines.len());
                let diff = m.program.source_lines.iter().zip(&v.source_lines).filter(|(a, b)| a != b).count();
                assert_eq!(diff, 1, "{m}");
                assert!(!m.program.same_structure(v));
            }
        }
    }

    #[test]
    fn constant_function_only_const_mutants() {
        let p = parse_valid("int f() {\n    return 1;\n}\n").unwrap();
        let e = enumerate_mutants(&p, "f").unwrap();
        let got: Vec<(&str, &str)> = e.mutants.iter().map(|m| (m.operator, m.replacement.as_str())).collect();
        assert_eq!(got, [("CRP-inc", "2"), ("CRP-dec", "0"), ("CRP-zero", "0")]);
    }

    #[test]
    fn p0_count_snapshot() {
        let h = find_last();
        let e = enumerate_mutants(h.version(0), "find_last").unwrap();
        assert!(e.mutants.len() >= 10);
        assert_eq!(e.mutants.len(), 39, "{:#?}", e.mutants.iter().map(ToString::to_string).collect::<Vec<_>>());
        let keys: Vec<(usize, usize, usize)> = e
            .mutants
            .iter()
            .map(|m| (m.line, m.col, CATALOG.iter().position(|o| o.id == m.operator).unwrap()))
            .collect();
        let sorted = {
            let mut k = keys.clone();
            k.sort();
            k
        };
        assert_eq!(keys, sorted);
    }

    #[test]
    fn negative_replacements_stay_parseable() {
        let p = parse_valid("int f(int a) {\n    return a - 0;\n}\n").unwrap();
        let e = enumerate_mutants(&p, "f").unwrap();
        let dec = e.mutants.iter().find(|m| m.operator == "CRP-dec").unwrap();
        assert_eq!(dec.program.line(2), Some("    return a - (-1);"));
    }

    #[test]
    fn base_swap_needs_two_arrays() {
        let p = parse_valid("int f(int a[], int b[]) {\n    return a[0];\n}\n").unwrap();
        let e = enumerate_mutants(&p, "f").unwrap();
        let swap: Vec<&Mutant> = e.mutants.iter().filter(|m| m.operator == "ARR-base-swap").collect();
        assert_eq!(swap.len(), 1);
        assert_eq!(swap[0].program.line(2), Some("    return b[0];"));
        let one = parse_valid("int f(int a[]) {\n    return a[0];\n}\n").unwrap();
        assert!(enumerate_mutants(&one, "f").unwrap().mutants.iter().all(|m| m.operator != "ARR-base-swap"));
    }

    #[test]
    fn out_of_scope_variables_are_rejected() {
        let p = parse_valid("int f(int a) {\n    if (a > 0) {\n        int b = 1;\n        a = b;\n    }\n    return a;\n}\n")
            .unwrap();
        let e = enumerate_mutants(&p, "f").unwrap();
        assert!(e.mutants.iter().all(|m| m.program.line(6) != Some("    return b;")));
        assert!(e.rejected.iter().any(|r| r.operator == "VRP" && r.line == 6));
    }

    #[test]
    fn callee_sites_are_included() {
        let h = VersionHistory::load(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/count_range")).unwrap();
        let e = enumerate_mutants(h.version(0), "count_range").unwrap();
        assert!(e.mutants.iter().any(|m| m.line == 4 && m.operator == "LCR-and-or"));
    }

    #[test]
    fn pick_is_seeded() {
        let h = find_last();
        let all = enumerate_mutants(h.version(0), "find_last").unwrap().mutants;
        let a = pick_mutant(h.version(0), "find_last", 7).unwrap();
        assert_eq!(a, pick_mutant(h.version(0), "find_last", 7).unwrap());
        assert!(all.contains(&a));
        assert!(all.contains(&pick_mutant(h.version(0), "find_last", 8).unwrap()));
    }

    #[test]
    fn empty_body_has_no_mutant() {
        let p = parse_valid("void f() {\n}\n").unwrap();
        assert_eq!(pick_mutant(&p, "f", 0), Err(MutateError::NoApplicableMutant("f".into())));
    }

    #[test]
    fn header_format() {
        let h = find_last();
        let m = pick_mutant(h.version(0), "find_last", 1).unwrap();
        assert!(m.to_file_text().starts_with(&format!("// mutant: {} @ line {}\n", m.operator, m.line)));
    }
}
