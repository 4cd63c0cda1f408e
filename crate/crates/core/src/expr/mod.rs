//! Scalar expressions in `x` and `y`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | tanh | exp | ln | sqrt | abs
//! number := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! `^` is right-associative and binds tighter than a prefix minus, so
//! `-x^2 = -(x^2)` and `2^3^2 = 512`.

mod parser;

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprErrorKind {
    UnknownIdentifier(String),
    UnbalancedParen,
    TrailingTokens,
    EmptyArgument,
    EmptyInput,
    UnexpectedEnd,
    UnexpectedChar(char),
    UnexpectedToken(String),
    InvalidNumber(String),
    NonFinite { x: f64, y: f64 },
}

impl fmt::Display for ExprErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownIdentifier(name) => write!(f, "unknown identifier '{name}'"),
            Self::UnbalancedParen => write!(f, "unbalanced parenthesis"),
            Self::TrailingTokens => write!(f, "trailing tokens"),
            Self::EmptyArgument => write!(f, "empty function argument"),
            Self::EmptyInput => write!(f, "empty expression"),
            Self::UnexpectedEnd => write!(f, "unexpected end of input"),
            Self::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            Self::UnexpectedToken(t) => write!(f, "unexpected token {t}"),
            Self::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
            Self::NonFinite { x, y } => write!(f, "non-finite value at (x, y) = ({x}, {y})"),
        }
    }
}

/// Parse or evaluation failure. `offset` is a byte offset into the source
/// text (zero for evaluation failures).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ExprError {
    pub kind: ExprErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            Self::Add => '+',
            Self::Sub => '-',
            Self::Mul => '*',
            Self::Div => '/',
            Self::Pow => '^',
        }
    }

    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Self::Add => a + b,
            Self::Sub => a - b,
            Self::Mul => a * b,
            Self::Div => a / b,
            Self::Pow => a.powf(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Tanh => "tanh",
            Self::Exp => "exp",
            Self::Ln => "ln",
            Self::Sqrt => "sqrt",
            Self::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Self::Sin => v.sin(),
            Self::Cos => v.cos(),
            Self::Tan => v.tan(),
            Self::Tanh => v.tanh(),
            Self::Exp => v.exp(),
            Self::Ln => v.ln(),
            Self::Sqrt => v.sqrt(),
            Self::Abs => v.abs(),
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        parser::parse(text)
    }

    /// Tree-walking evaluation. May return a non-finite value.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Bin(op, a, b) => op.apply(a.eval(x, y), b.eval(x, y)),
            Expr::Call(f, a) => f.apply(a.eval(x, y)),
        }
    }

    /// Evaluation that flags non-finite results.
    pub fn eval_checked(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        finite(self.eval(x, y), x, y)
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses(var),
            Expr::Bin(_, a, b) => a.uses(var) || b.uses(var),
        }
    }

    pub fn compile(&self) -> Program {
        let mut ops = Vec::new();
        let mut depth = 0;
        let mut max_depth = 0;
        self.emit(&mut ops, &mut depth, &mut max_depth);
        Program { ops, max_depth }
    }

    fn emit(&self, ops: &mut Vec<Op>, depth: &mut usize, max_depth: &mut usize) {
        let mut push = |ops: &mut Vec<Op>, op: Op, delta: isize| {
            ops.push(op);
            *depth = (*depth as isize + delta) as usize;
            *max_depth = (*max_depth).max(*depth);
        };
        match self {
            Expr::Num(v) => push(ops, Op::Const(*v), 1),
            Expr::Pi => push(ops, Op::Const(std::f64::consts::PI), 1),
            Expr::Var(Var::X) => push(ops, Op::X, 1),
            Expr::Var(Var::Y) => push(ops, Op::Y, 1),
            Expr::Neg(e) => {
                e.emit(ops, depth, max_depth);
                ops.push(Op::Neg);
            }
            Expr::Call(f, e) => {
                e.emit(ops, depth, max_depth);
                ops.push(Op::Call(*f));
            }
            Expr::Bin(op, a, b) => {
                a.emit(ops, depth, max_depth);
                b.emit(ops, depth, max_depth);
                ops.push(Op::Bin(*op));
                *depth -= 1;
            }
        }
    }
}

fn finite(v: f64, x: f64, y: f64) -> Result<f64, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError {
            kind: ExprErrorKind::NonFinite { x, y },
            offset: 0,
        })
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

/// Fully parenthesized rendering; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    X,
    Y,
    Neg,
    Bin(BinOp),
    Call(Func),
}

/// Postfix form of an [`Expr`] for repeated evaluation in hot loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    ops: Vec<Op>,
    max_depth: usize,
}

const INLINE_STACK: usize = 32;

impl Program {
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if self.max_depth <= INLINE_STACK {
            let mut stack = [0.0; INLINE_STACK];
            self.run(&mut stack, x, y)
        } else {
            let mut stack = vec![0.0; self.max_depth];
            self.run(&mut stack, x, y)
        }
    }

    pub fn eval_checked(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        finite(self.eval(x, y), x, y)
    }

    #[inline]
    fn run(&self, stack: &mut [f64], x: f64, y: f64) -> f64 {
        let mut top = 0usize;
        for op in &self.ops {
            match *op {
                Op::Const(v) => {
                    stack[top] = v;
                    top += 1;
                }
                Op::X => {
                    stack[top] = x;
                    top += 1;
                }
                Op::Y => {
                    stack[top] = y;
                    top += 1;
                }
                Op::Neg => stack[top - 1] = -stack[top - 1],
                Op::Call(f) => stack[top - 1] = f.apply(stack[top - 1]),
                Op::Bin(b) => {
                    top -= 1;
                    stack[top - 1] = b.apply(stack[top - 1], stack[top]);
                }
            }
        }
        stack[0]
    }
}

/// Parsed expression together with its source text and compiled program.
#[derive(Debug, Clone)]
pub struct ScalarFn {
    source: String,
    ast: Expr,
    program: Program,
}

impl ScalarFn {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let ast = Expr::parse(text)?;
        let program = ast.compile();
        Ok(Self {
            source: text.to_string(),
            ast,
            program,
        })
    }

    pub fn constant(c: f64) -> Self {
        let ast = Expr::Num(c);
        let program = ast.compile();
        let source = if c < 0.0 {
            format!("-{:?}", -c)
        } else {
            format!("{c:?}")
        };
        Self {
            source,
            ast,
            program,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.program.eval(x, y)
    }

    pub fn eval_checked(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        self.program.eval_checked(x, y)
    }
}

impl PartialEq for ScalarFn {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}
