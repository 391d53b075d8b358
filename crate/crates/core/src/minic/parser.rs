use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::MinicError;

/// Parses MiniC text without any name resolution.
pub fn parse_syntax(text: &str) -> Result<SourceProgram, MinicError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let (globals, functions) = parser.program()?;
    let trailing_newline = text.ends_with('\n');
    let body = if trailing_newline { &text[..text.len() - 1] } else { text };
    let source_lines = body.split('\n').map(str::to_string).collect();
    Ok(SourceProgram { globals, functions, source_lines, trailing_newline })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, MinicError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn current(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = self.current();
        Err(MinicError::Syntax { line: t.line, col: t.col + 1, message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> PResult<Token> {
        if *self.peek() == want {
            Ok(self.advance())
        } else {
            let found = self.peek().describe();
            self.error(format!("expected {}, found {found}", want.describe()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Token)> {
        match self.peek().clone() {
            Tok::Ident(name) => Ok((name, self.advance())),
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn program(&mut self) -> PResult<(Vec<Global>, Vec<FunctionDef>)> {
        let mut globals = Vec::new();
        let mut functions = Vec::new();
        while *self.peek() != Tok::Eof {
            let is_function = matches!(self.peek_at(2), Tok::LParen);
            match self.peek() {
                Tok::Int if !is_function => globals.push(self.global()?),
                Tok::Int | Tok::Void => functions.push(self.function()?),
                other => {
                    let found = other.describe();
                    return self.error(format!("expected global or function definition, found {found}"));
                }
            }
        }
        Ok((globals, functions))
    }

    fn global(&mut self) -> PResult<Global> {
        let start = self.expect(Tok::Int)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::Assign)?;
        let negative = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        let value = match self.peek().clone() {
            Tok::Num(v) => {
                self.advance();
                v
            }
            other => return self.error(format!("global initializer must be an integer literal, found {}", other.describe())),
        };
        self.expect(Tok::Semi)?;
        Ok(Global { name, init: if negative { -value } else { value }, line: start.line })
    }

    fn function(&mut self) -> PResult<FunctionDef> {
        let head = self.advance();
        let ret = if head.tok == Tok::Void { ReturnKind::Void } else { ReturnKind::Int };
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() == Tok::Void && *self.peek_at(1) == Tok::RParen {
            self.advance();
        } else if *self.peek() != Tok::RParen {
            loop {
                self.expect(Tok::Int)?;
                let (pname, _) = self.ident()?;
                let kind = if *self.peek() == Tok::LBracket {
                    self.advance();
                    self.expect(Tok::RBracket)?;
                    ParamKind::IntArray
                } else {
                    ParamKind::Int
                };
                params.push(Param { name: pname, kind });
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.error("unexpected end of input inside function body");
            }
            body.push(self.stmt()?);
        }
        let close = self.advance();
        Ok(FunctionDef { name, params, ret, body, first_line: head.line, last_line: close.line })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.current().clone();
        let kind = match self.peek().clone() {
            Tok::Int => {
                let kind = self.decl()?;
                self.expect(Tok::Semi)?;
                kind
            }
            Tok::If => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = Box::new(self.stmt()?);
                let else_branch = if *self.peek() == Tok::Else {
                    self.advance();
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                StmtKind::If { cond, then_branch, else_branch }
            }
            Tok::For => {
                self.advance();
                self.expect(Tok::LParen)?;
                let init = if *self.peek() == Tok::Semi { None } else { Some(Box::new(self.simple_or_decl()?)) };
                self.expect(Tok::Semi)?;
                let cond = self.expr()?;
                self.expect(Tok::Semi)?;
                let update = if *self.peek() == Tok::RParen { None } else { Some(Box::new(self.simple_or_decl()?)) };
                self.expect(Tok::RParen)?;
                let body = Box::new(self.stmt()?);
                StmtKind::For { init, cond, update, body }
            }
            Tok::While => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                StmtKind::While { cond, body: Box::new(self.stmt()?) }
            }
            Tok::Return => {
                self.advance();
                let value = if *self.peek() == Tok::Semi { None } else { Some(self.expr()?) };
                self.expect(Tok::Semi)?;
                StmtKind::Return(value)
            }
            Tok::LBrace => {
                self.advance();
                let mut stmts = Vec::new();
                while *self.peek() != Tok::RBrace {
                    if *self.peek() == Tok::Eof {
                        return self.error("unexpected end of input inside block");
                    }
                    stmts.push(self.stmt()?);
                }
                let close = self.advance();
                StmtKind::Block { stmts, close_line: close.line }
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::Colon => {
                self.advance();
                self.advance();
                StmtKind::Label(name)
            }
            Tok::Ident(_) => {
                let kind = self.simple()?;
                self.expect(Tok::Semi)?;
                kind
            }
            other => return self.error(format!("expected statement, found {}", other.describe())),
        };
        Ok(Stmt { kind, line: start.line, col: start.col })
    }

    fn decl(&mut self) -> PResult<StmtKind> {
        self.expect(Tok::Int)?;
        let (name, _) = self.ident()?;
        if *self.peek() != Tok::Assign {
            return self.error("local declarations require an initializer");
        }
        self.advance();
        let init = self.expr()?;
        Ok(StmtKind::Decl { name, init })
    }

    fn simple_or_decl(&mut self) -> PResult<Stmt> {
        let start = self.current().clone();
        let kind = if *self.peek() == Tok::Int { self.decl()? } else { self.simple()? };
        Ok(Stmt { kind, line: start.line, col: start.col })
    }

    /// Assignment, increment or call statement, without the trailing `;`.
    fn simple(&mut self) -> PResult<StmtKind> {
        if matches!(self.peek_at(1), Tok::LParen) {
            let call = self.expr()?;
            return match call.kind {
                ExprKind::Call { .. } => Ok(StmtKind::Call(call)),
                _ => self.error("expected `;` after call"),
            };
        }
        let target = self.lvalue()?;
        match self.peek() {
            Tok::Assign | Tok::PlusAssign | Tok::MinusAssign => {
                let op = match self.advance().tok {
                    Tok::Assign => AssignOp::Set,
                    Tok::PlusAssign => AssignOp::Add,
                    _ => AssignOp::Sub,
                };
                let value = self.expr()?;
                Ok(StmtKind::Assign { target, op, value })
            }
            Tok::PlusPlus => {
                self.advance();
                Ok(StmtKind::Step { target, delta: 1 })
            }
            Tok::MinusMinus => {
                self.advance();
                Ok(StmtKind::Step { target, delta: -1 })
            }
            other => {
                let found = other.describe();
                self.error(format!("expected assignment operator, found {found}"))
            }
        }
    }

    fn lvalue(&mut self) -> PResult<LValue> {
        let (name, tok) = self.ident()?;
        let span = tok_span(&tok);
        if *self.peek() == Tok::LBracket {
            self.advance();
            let index = self.expr()?;
            self.expect(Tok::RBracket)?;
            Ok(LValue::Index { array: name, array_span: span, index })
        } else {
            Ok(LValue::Var { name, span })
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::OrOr => BinOp::Or,
                Tok::AndAnd => BinOp::And,
                Tok::EqEq => BinOp::Eq,
                Tok::Ne => BinOp::Ne,
                Tok::Lt => BinOp::Lt,
                Tok::Le => BinOp::Le,
                Tok::Gt => BinOp::Gt,
                Tok::Ge => BinOp::Ge,
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Rem,
                _ => break,
            };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let op_tok = self.advance();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(&rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary { op, op_span: tok_span(&op_tok), lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Tok::Minus => Some(UnaryOp::Neg),
            Tok::Bang => Some(UnaryOp::Not),
            _ => None,
        };
        if let Some(op) = op {
            let tok = self.advance();
            let operand = self.unary()?;
            let span = tok_span(&tok).to(&operand.span);
            return Ok(Expr { kind: ExprKind::Unary { op, operand: Box::new(operand) }, span });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.current().clone();
        match tok.tok.clone() {
            Tok::Num(v) => {
                self.advance();
                Ok(Expr { kind: ExprKind::Lit(v), span: tok_span(&tok) })
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                let close = self.expect(Tok::RParen)?;
                // Parenthesised spans include the parens so rewrites stay well-formed.
                Ok(Expr { span: tok_span(&tok).to(&tok_span(&close)), ..inner })
            }
            Tok::Ident(name) => {
                self.advance();
                match self.peek() {
                    Tok::LBracket => {
                        self.advance();
                        let index = self.expr()?;
                        let close = self.expect(Tok::RBracket)?;
                        Ok(Expr {
                            kind: ExprKind::Index { array: name, array_span: tok_span(&tok), index: Box::new(index) },
                            span: tok_span(&tok).to(&tok_span(&close)),
                        })
                    }
                    Tok::LParen => {
                        self.advance();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            loop {
                                args.push(self.expr()?);
                                if *self.peek() == Tok::Comma {
                                    self.advance();
                                } else {
                                    break;
                                }
                            }
                        }
                        let close = self.expect(Tok::RParen)?;
                        Ok(Expr { kind: ExprKind::Call { name, args }, span: tok_span(&tok).to(&tok_span(&close)) })
                    }
                    _ => Ok(Expr { kind: ExprKind::Var(name), span: tok_span(&tok) }),
                }
            }
            other => self.error(format!("expected expression, found {}", other.describe())),
        }
    }
}

fn tok_span(t: &Token) -> Span {
    Span { line: t.line, col: t.col, end_line: t.line, end_col: t.end_col }
}
