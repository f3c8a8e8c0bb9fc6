//! Tiny expression language for custom defining functions.
//!
//! Grammar: `+ - * / ^` with usual precedence, parentheses, unary minus,
//! numeric literals, the constant `pi`, variables `x1,y1,…,x4,y4` and the
//! functions `sin cos exp sqrt abs`. `^` takes an integer literal exponent.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("exponent must be an integer literal")]
    BadExponent,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i32),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Exp(Box<Node>),
    Sqrt(Box<Node>),
    Abs(Box<Node>),
}

/// A parsed expression over the real coordinates (x₁,y₁,…).
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
    max_var: usize,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expression()?;
        if p.pos != p.tokens.len() {
            return Err(ExprError::Parse {
                pos: p.tokens[p.pos].1,
                msg: "trailing input".into(),
            });
        }
        let mut max_var = 0;
        collect_max_var(&root, &mut max_var);
        Ok(Expr { root, source: src.to_string(), max_var })
    }

    /// Largest variable index used, +1 (0 when constant).
    pub fn var_count(&self) -> usize {
        self.max_var
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, coords: &[f64]) -> f64 {
        eval_node(&self.root, coords)
    }
}

fn collect_max_var(n: &Node, max_var: &mut usize) {
    match n {
        Node::Var(i) => *max_var = (*max_var).max(i + 1),
        Node::Const(_) => {}
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            collect_max_var(a, max_var);
            collect_max_var(b, max_var);
        }
        Node::Neg(a)
        | Node::Pow(a, _)
        | Node::Sin(a)
        | Node::Cos(a)
        | Node::Exp(a)
        | Node::Sqrt(a)
        | Node::Abs(a) => collect_max_var(a, max_var),
    }
}

fn eval_node(n: &Node, c: &[f64]) -> f64 {
    match n {
        Node::Const(v) => *v,
        Node::Var(i) => c.get(*i).copied().unwrap_or(0.0),
        Node::Add(a, b) => eval_node(a, c) + eval_node(b, c),
        Node::Sub(a, b) => eval_node(a, c) - eval_node(b, c),
        Node::Mul(a, b) => eval_node(a, c) * eval_node(b, c),
        Node::Div(a, b) => eval_node(a, c) / eval_node(b, c),
        Node::Neg(a) => -eval_node(a, c),
        Node::Pow(a, k) => eval_node(a, c).powi(*k),
        Node::Sin(a) => eval_node(a, c).sin(),
        Node::Cos(a) => eval_node(a, c).cos(),
        Node::Exp(a) => eval_node(a, c).exp(),
        Node::Sqrt(a) => eval_node(a, c).sqrt(),
        Node::Abs(a) => eval_node(a, c).abs(),
    }
}

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
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => { out.push((Tok::Plus, i)); i += 1; }
            b'-' => { out.push((Tok::Minus, i)); i += 1; }
            b'*' => { out.push((Tok::Star, i)); i += 1; }
            b'/' => { out.push((Tok::Slash, i)); i += 1; }
            b'^' => { out.push((Tok::Caret, i)); i += 1; }
            b'(' => { out.push((Tok::LParen, i)); i += 1; }
            b')' => { out.push((Tok::RParen, i)); i += 1; }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == b'.'
                        || bytes[i] == b'e'
                        || bytes[i] == b'E'
                        || ((bytes[i] == b'+' || bytes[i] == b'-')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                {
                    i += 1;
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ExprError::Parse {
                    pos: start,
                    msg: format!("bad number `{text}`"),
                })?;
                out.push((Tok::Num(v), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ExprError::Parse {
                    pos: i,
                    msg: format!("unexpected character `{}`", b as char),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(usize::MAX, |(_, p)| *p)
    }

    fn expression(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let neg = matches!(self.peek(), Some(Tok::Minus)) && {
                self.bump();
                true
            };
            match self.bump() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 1e9 => {
                    let k = v as i32 * if neg { -1 } else { 1 };
                    Ok(Node::Pow(Box::new(base), k))
                }
                _ => Err(ExprError::BadExponent),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Const(v)),
            Some(Tok::LParen) => {
                let inner = self.expression()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ExprError::Parse { pos, msg: "unclosed parenthesis".into() }),
                }
            }
            Some(Tok::Ident(name)) => self.ident(name, pos),
            other => Err(ExprError::Parse {
                pos,
                msg: format!("expected value, got {other:?}"),
            }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Node, ExprError> {
        if let Some(idx) = var_index(&name) {
            return Ok(Node::Var(idx));
        }
        if name == "pi" {
            return Ok(Node::Const(std::f64::consts::PI));
        }
        let func = match name.as_str() {
            "sin" | "cos" | "exp" | "sqrt" | "abs" => name,
            _ => return Err(ExprError::UnknownIdent(name)),
        };
        match self.bump() {
            Some(Tok::LParen) => {}
            _ => {
                return Err(ExprError::Parse {
                    pos,
                    msg: format!("function `{func}` needs parentheses"),
                })
            }
        }
        let arg = Box::new(self.expression()?);
        match self.bump() {
            Some(Tok::RParen) => {}
            _ => return Err(ExprError::Parse { pos, msg: "unclosed call".into() }),
        }
        Ok(match func.as_str() {
            "sin" => Node::Sin(arg),
            "cos" => Node::Cos(arg),
            "exp" => Node::Exp(arg),
            "sqrt" => Node::Sqrt(arg),
            _ => Node::Abs(arg),
        })
    }
}

fn var_index(name: &str) -> Option<usize> {
    let b = name.as_bytes();
    if b.len() == 2 && (b[0] == b'x' || b[0] == b'y') && (b'1'..=b'4').contains(&b[1]) {
        let j = (b[1] - b'1') as usize;
        Some(2 * j + if b[0] == b'x' { 0 } else { 1 })
    } else {
        None
    }
}
