use super::MinicError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Int,
    Void,
    If,
    Else,
    For,
    While,
    Return,
    Ident(String),
    Num(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    Assign,
    PlusAssign,
    MinusAssign,
    PlusPlus,
    MinusMinus,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Num(n) => format!("literal `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Int => "int",
            Tok::Void => "void",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::For => "for",
            Tok::While => "while",
            Tok::Return => "return",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Assign => "=",
            Tok::PlusAssign => "+=",
            Tok::MinusAssign => "-=",
            Tok::PlusPlus => "++",
            Tok::MinusMinus => "--",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

/// A token with its 1-based line and 0-based byte column range inside that line.
#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub end_col: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, MinicError> {
    let mut out = Vec::new();
    let mut line_no = 0;
    let mut in_block_comment = false;
    for raw_line in text.split('\n') {
        line_no += 1;
        let bytes = raw_line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if in_block_comment {
                if bytes[i..].starts_with(b"*/") {
                    in_block_comment = false;
                    i += 2;
                } else {
                    i += 1;
                }
                continue;
            }
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if bytes[i..].starts_with(b"//") {
                break;
            }
            if bytes[i..].starts_with(b"/*") {
                in_block_comment = true;
                i += 2;
                continue;
            }
            let start = i;
            let tok = if c.is_ascii_digit() {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &raw_line[start..i];
                let value = digits.parse::<i64>().map_err(|_| MinicError::Syntax {
                    line: line_no,
                    col: start + 1,
                    message: format!("integer literal `{digits}` out of range"),
                })?;
                Tok::Num(value)
            } else if c.is_ascii_alphabetic() || c == b'_' {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &raw_line[start..i] {
                    "int" => Tok::Int,
                    "void" => Tok::Void,
                    "if" => Tok::If,
                    "else" => Tok::Else,
                    "for" => Tok::For,
                    "while" => Tok::While,
                    "return" => Tok::Return,
                    word => Tok::Ident(word.to_string()),
                }
            } else {
                let two = if i + 1 < bytes.len() { Some(&bytes[i..i + 2]) } else { None };
                let double = match two {
                    Some(b"+=") => Some(Tok::PlusAssign),
                    Some(b"-=") => Some(Tok::MinusAssign),
                    Some(b"++") => Some(Tok::PlusPlus),
                    Some(b"--") => Some(Tok::MinusMinus),
                    Some(b"<=") => Some(Tok::Le),
                    Some(b">=") => Some(Tok::Ge),
                    Some(b"==") => Some(Tok::EqEq),
                    Some(b"!=") => Some(Tok::Ne),
                    Some(b"&&") => Some(Tok::AndAnd),
                    Some(b"||") => Some(Tok::OrOr),
                    _ => None,
                };
                if let Some(t) = double {
                    i += 2;
                    t
                } else {
                    i += 1;
                    match c {
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b'{' => Tok::LBrace,
                        b'}' => Tok::RBrace,
                        b'[' => Tok::LBracket,
                        b']' => Tok::RBracket,
                        b';' => Tok::Semi,
                        b',' => Tok::Comma,
                        b':' => Tok::Colon,
                        b'=' => Tok::Assign,
                        b'+' => Tok::Plus,
                        b'-' => Tok::Minus,
                        b'*' => Tok::Star,
                        b'/' => Tok::Slash,
                        b'%' => Tok::Percent,
                        b'<' => Tok::Lt,
                        b'>' => Tok::Gt,
                        b'!' => Tok::Bang,
                        _ => {
                            let ch = raw_line[start..].chars().next().unwrap_or('?');
                            return Err(MinicError::Syntax {
                                line: line_no,
                                col: start + 1,
                                message: format!("unexpected character `{ch}`"),
                            });
                        }
                    }
                }
            };
            out.push(Token { tok, line: line_no, col: start, end_col: i });
        }
    }
    if in_block_comment {
        return Err(MinicError::Syntax {
            line: line_no,
            col: 1,
            message: "unterminated block comment".into(),
        });
    }
    let last_line = line_no.max(1);
    out.push(Token { tok: Tok::Eof, line: last_line, col: 0, end_col: 0 });
    Ok(out)
}
