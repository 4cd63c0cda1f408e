//! Tokenizer and precedence-climbing parser.
//!
//! Binding powers, loosest first: `+ -`, `* /`, prefix `-`, `^`. The power
//! operator is right-associative and binds tighter than a prefix minus on
//! its left, so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use super::{BinOp, Expr, ExprError, ExprErrorKind, Func, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn err(kind: ExprErrorKind, offset: usize) -> ExprError {
    ExprError { kind, offset }
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                    pos += 1;
                }
                // Optional exponent: e, E followed by an optionally signed integer.
                if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                    let mut look = pos + 1;
                    if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                        look += 1;
                    }
                    if look < bytes.len() && bytes[look].is_ascii_digit() {
                        pos = look;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                    }
                }
                let lit = &text[start..pos];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| err(ExprErrorKind::InvalidNumber(lit.to_string()), start))?;
                out.push(Token {
                    tok: Tok::Num(value),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..pos].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(err(ExprErrorKind::UnexpectedChar(ch), start));
            }
        };
        out.push(Token { tok, offset: start });
        pos += 1;
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const PREFIX_MINUS_BP: u8 = 5;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Caret => BinOp::Pow,
                _ => break,
            };
            let (lbp, rbp) = match op {
                BinOp::Add | BinOp::Sub => (1, 2),
                BinOp::Mul | BinOp::Div => (3, 4),
                BinOp::Pow => (8, 7),
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expression(rbp)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ExprError> {
        let token = self.next();
        match token.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Minus => {
                let operand = self.expression(PREFIX_MINUS_BP)?;
                Ok(Expr::Neg(Box::new(operand)))
            }
            Tok::LParen => {
                let inner = self.expression(0)?;
                self.expect_close(token.offset)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, token.offset),
            Tok::End => Err(err(ExprErrorKind::UnexpectedEnd, token.offset)),
            Tok::RParen => Err(err(ExprErrorKind::UnbalancedParen, token.offset)),
            other => Err(err(
                ExprErrorKind::UnexpectedToken(format!("{other:?}")),
                token.offset,
            )),
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Expr, ExprError> {
        match name.as_str() {
            "x" => return Ok(Expr::Var(Var::X)),
            "y" => return Ok(Expr::Var(Var::Y)),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(err(ExprErrorKind::UnknownIdentifier(name), offset));
        };
        let open = self.next();
        if open.tok != Tok::LParen {
            return Err(err(
                ExprErrorKind::UnexpectedToken(format!("expected '(' after {name}")),
                open.offset,
            ));
        }
        match self.peek().tok {
            Tok::RParen => return Err(err(ExprErrorKind::EmptyArgument, self.peek().offset)),
            Tok::End => return Err(err(ExprErrorKind::EmptyArgument, self.peek().offset)),
            _ => {}
        }
        let arg = self.expression(0)?;
        self.expect_close(open.offset)?;
        Ok(Expr::Call(func, Box::new(arg)))
    }

    fn expect_close(&mut self, open_offset: usize) -> Result<(), ExprError> {
        let t = self.next();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::End => Err(err(ExprErrorKind::UnbalancedParen, open_offset)),
            other => Err(err(
                ExprErrorKind::UnexpectedToken(format!("{other:?}")),
                t.offset,
            )),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(err(ExprErrorKind::EmptyInput, 0));
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expression(0)?;
    let rest = parser.peek();
    match rest.tok {
        Tok::End => Ok(expr),
        Tok::RParen => Err(err(ExprErrorKind::UnbalancedParen, rest.offset)),
        _ => Err(err(ExprErrorKind::TrailingTokens, rest.offset)),
    }
}
