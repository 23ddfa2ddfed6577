//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := number | variable | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `x1` .. `x12`; when the dimension is at most 3, `x`, `y`
//! and `z` alias `x1`, `x2` and `x3`. Both `-` and `−` (U+2212) are minus.

use thiserror::Error;

use super::expr::{Expr, Func};

pub const MAX_VARIABLES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("variable `{name}` at position {pos} exceeds dimension {dim}")]
    VariableOutOfRange { name: String, pos: usize, dim: usize },
    #[error("dimension must be between 1 and {MAX_VARIABLES}, got {0}")]
    BadDimension(usize),
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::VariableOutOfRange { pos, .. } => Some(*pos),
            ParseError::BadDimension(_) => None,
        }
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
    Comma,
    Semi,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' | '\u{2212}' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            ',' => out.push((Tok::Comma, start)),
            ';' => out.push((Tok::Semi, start)),
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text
                    .parse::<f64>()
                    .map_err(|_| ParseError::Syntax { pos: start, message: format!("malformed number `{text}`") })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(ParseError::Syntax { pos: start, message: format!("unexpected character `{other}`") }),
        }
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                message: format!("expected {}, found {}", want.describe(), self.peek().describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    if *self.peek() == Tok::Comma {
                        return Err(ParseError::Syntax {
                            pos: self.pos(),
                            message: format!("`{name}` takes exactly one argument"),
                        });
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                self.variable(&name, pos).map(Expr::Var)
            }
            other => Err(ParseError::Syntax { pos, message: format!("unexpected {}", other.describe()) }),
        }
    }

    fn variable(&self, name: &str, pos: usize) -> Result<usize, ParseError> {
        let index = match name {
            "x" | "y" | "z" if self.dim <= 3 => match name {
                "x" => 1,
                "y" => 2,
                _ => 3,
            },
            _ => name
                .strip_prefix('x')
                .filter(|digits| !digits.is_empty() && !digits.starts_with('0'))
                .and_then(|digits| digits.parse::<usize>().ok())
                .filter(|&i| (1..=MAX_VARIABLES).contains(&i))
                .ok_or_else(|| ParseError::UnknownIdentifier { name: name.to_string(), pos })?,
        };
        if index > self.dim {
            return Err(ParseError::VariableOutOfRange { name: name.to_string(), pos, dim: self.dim });
        }
        Ok(index - 1)
    }
}

/// Parse one expression over `n` variables.
pub fn parse(src: &str, n: usize) -> Result<Expr, ParseError> {
    if n == 0 || n > MAX_VARIABLES {
        return Err(ParseError::BadDimension(n));
    }
    let mut p = Parser { toks: tokenize(src)?, at: 0, dim: n };
    if *p.peek() == Tok::End {
        return Err(ParseError::Syntax { pos: p.pos(), message: "empty expression".into() });
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax { pos: p.pos(), message: format!("unexpected {}", p.peek().describe()) });
    }
    Ok(e)
}

/// Parse a semicolon-separated list of constraint expressions, each meaning
/// `expr < 0`. Empty items are ignored. Reported positions are offsets into
/// the whole source.
pub fn parse_constraints(src: &str, n: usize) -> Result<Vec<Expr>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for piece in src.split(';') {
        let width = piece.chars().count();
        if !piece.trim().is_empty() {
            let e = parse(piece, n).map_err(|e| shift(e, offset))?;
            out.push(e);
        }
        offset += width + 1;
    }
    Ok(out)
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax { pos, message } => ParseError::Syntax { pos: pos + by, message },
        ParseError::UnknownIdentifier { name, pos } => ParseError::UnknownIdentifier { name, pos: pos + by },
        ParseError::VariableOutOfRange { name, pos, dim } => {
            ParseError::VariableOutOfRange { name, pos: pos + by, dim }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn sum_of_squares() {
        let e = parse("x^2 + y^2", 2).unwrap();
        let expected = Expr::Add(
            b(Expr::Pow(b(Expr::Var(0)), b(Expr::Const(2.0)))),
            b(Expr::Pow(b(Expr::Var(1)), b(Expr::Const(2.0)))),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn reciprocal_product_with_unicode_minus() {
        let ascii = parse("1/((1-x^2)*(1-y^2))", 2).unwrap();
        let unicode = parse("1/((1−x^2)*(1−y^2))", 2).unwrap();
        assert_eq!(ascii, unicode);
        let one_minus_sq = |i| Expr::Sub(b(Expr::Const(1.0)), b(Expr::Pow(b(Expr::Var(i)), b(Expr::Const(2.0)))));
        let expected = Expr::Div(b(Expr::Const(1.0)), b(Expr::Mul(b(one_minus_sq(0)), b(one_minus_sq(1)))));
        assert_eq!(ascii, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-x^2", 1).unwrap(), Expr::Neg(b(Expr::Pow(b(Expr::Var(0)), b(Expr::Const(2.0))))));
        assert_eq!(
            parse("2^3^2", 1).unwrap(),
            Expr::Pow(b(Expr::Const(2.0)), b(Expr::Pow(b(Expr::Const(3.0)), b(Expr::Const(2.0)))))
        );
        assert_eq!(
            parse("1-2-3", 1).unwrap(),
            Expr::Sub(b(Expr::Sub(b(Expr::Const(1.0)), b(Expr::Const(2.0)))), b(Expr::Const(3.0)))
        );
        assert_eq!(parse("2^-x", 1).unwrap(), Expr::Pow(b(Expr::Const(2.0)), b(Expr::Neg(b(Expr::Var(0))))));
        assert_eq!(
            parse("x*y/z", 3).unwrap(),
            Expr::Div(b(Expr::Mul(b(Expr::Var(0)), b(Expr::Var(1)))), b(Expr::Var(2)))
        );
    }

    #[test]
    fn indexed_variables_and_exponent_literals() {
        assert_eq!(parse("x12", 12).unwrap(), Expr::Var(11));
        assert_eq!(parse("1.5e-3", 1).unwrap(), Expr::Const(1.5e-3));
        assert_eq!(parse("sqrt(x2)", 4).unwrap(), Expr::Call(Func::Sqrt, b(Expr::Var(1))));
    }

    #[test]
    fn error_paths() {
        assert_eq!(parse("x1 + q", 1).unwrap_err(), ParseError::UnknownIdentifier { name: "q".into(), pos: 5 });
        assert!(matches!(parse("x3", 2).unwrap_err(), ParseError::VariableOutOfRange { pos: 0, .. }));
        assert!(matches!(parse("y", 1).unwrap_err(), ParseError::VariableOutOfRange { .. }));
        assert!(matches!(parse("y", 4).unwrap_err(), ParseError::UnknownIdentifier { .. }));
        assert!(matches!(parse("x13", 12).unwrap_err(), ParseError::UnknownIdentifier { .. }));
        assert!(matches!(parse("(x", 1).unwrap_err(), ParseError::Syntax { pos: 2, .. }));
        assert!(matches!(parse("x +", 1).unwrap_err(), ParseError::Syntax { .. }));
        assert!(matches!(parse("exp(x, x)", 1).unwrap_err(), ParseError::Syntax { .. }));
        assert!(matches!(parse("x $ 2", 1).unwrap_err(), ParseError::Syntax { pos: 2, .. }));
        assert!(matches!(parse("", 1).unwrap_err(), ParseError::Syntax { .. }));
        assert!(matches!(parse("x", 0).unwrap_err(), ParseError::BadDimension(0)));
    }

    #[test]
    fn constraint_lists() {
        let cs = parse_constraints("x^2-1; y^2-1;", 2).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(parse_constraints("", 2).unwrap().is_empty());
        let err = parse_constraints("x-1; w", 2).unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { name: "w".into(), pos: 5 });
    }

    #[test]
    fn unparse_reparses_identically() {
        for src in ["1/((1-x^2)*(1-y^2))", "-x^2 + exp(-y) * abs(x - 0.25)", "2^3^x / log(1 + x*x)"] {
            let e = parse(src, 2).unwrap();
            assert_eq!(parse(&e.unparse(), 2).unwrap(), e, "{src}");
        }
    }
}
