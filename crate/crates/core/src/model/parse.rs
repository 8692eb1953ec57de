//! Recursive-descent parser for the function DSL.
//!
//! ```text
//! fexpr  := fterm (('+'|'-') fterm)*
//! fterm  := ffact ('*' ffact)*
//! ffact  := 'fb(' num ')' | 'fv(' num ')' | 'mono(' kexpr ')'
//!         | 'max(' fexpr ',' fexpr ')' | 'subst(' fexpr ';' sexpr ')'
//!         | 'pw(' branch (';' branch)* ')' | '(' fexpr ')'
//! branch := guard '->' fexpr
//! guard  := 'u' ('=='|'<'|'<='|'>'|'>=') num | 'else'
//! kexpr  := arithmetic over numbers and 's'
//! sexpr  := arithmetic over numbers and 'u', 'pow(' sexpr ',' num ')', 'pw(...)'
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::{Branch, FunctionExpr, Guard, KExpr, ScalarExpr};
use super::eval::check_coverage;
use crate::algebra::ScalarMode;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    NonTotalPiecewise(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (what, msg) = match &self.kind {
            ParseErrorKind::Syntax(m) => ("syntax error", m.as_str()),
            ParseErrorKind::UnknownIdentifier(m) => ("unknown identifier", m.as_str()),
            ParseErrorKind::NonTotalPiecewise(m) => ("non-total piecewise", m.as_str()),
        };
        write!(f, "{what} at {}:{}: {msg}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    Comma,
    Semi,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Semi => f.write_str("';'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::EqEq => f.write_str("'=='"),
            Tok::Lt => f.write_str("'<'"),
            Tok::Le => f.write_str("'<='"),
            Tok::Gt => f.write_str("'>'"),
            Tok::Ge => f.write_str("'>='"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, msg: String| ParseError {
        kind: ParseErrorKind::Syntax(msg),
        line,
        column,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '+' => (Tok::Plus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '-' => (Tok::Minus, 1),
            '=' if next == Some('=') => (Tok::EqEq, 2),
            '<' if next == Some('=') => (Tok::Le, 2),
            '<' => (Tok::Lt, 1),
            '>' if next == Some('=') => (Tok::Ge, 2),
            '>' => (Tok::Gt, 1),
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lit: String = chars[i..j].iter().collect();
                let x: f64 = lit
                    .parse()
                    .map_err(|_| err(line, start_col, format!("malformed number '{lit}'")))?;
                (Tok::Num(x), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => return Err(err(line, start_col, format!("unexpected character '{other}'"))),
        };
        out.push(Spanned {
            tok,
            line,
            column: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Self {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { kind, line, column }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.syntax(format!("unexpected trailing {}", self.peek())))
        }
    }

    /// Optionally signed numeric literal.
    fn num(&mut self) -> PResult<f64> {
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(sign * x)
            }
            other => Err(self.syntax(format!("expected a number, found {other}"))),
        }
    }

    fn guard(&mut self) -> PResult<Guard> {
        match self.peek().clone() {
            Tok::Ident(id) if id == "else" => {
                self.bump();
                Ok(Guard::Else)
            }
            Tok::Ident(id) if id == "u" => {
                self.bump();
                let op = self.bump();
                let c = self.num()?;
                match op {
                    Tok::EqEq => Ok(Guard::Eq { c }),
                    Tok::Lt => Ok(Guard::Lt { c }),
                    Tok::Le => Ok(Guard::Le { c }),
                    Tok::Gt => Ok(Guard::Gt { c }),
                    Tok::Ge => Ok(Guard::Ge { c }),
                    other => Err(self.syntax(format!("expected a comparison, found {other}"))),
                }
            }
            Tok::Ident(id) => Err(self.error(ParseErrorKind::UnknownIdentifier(format!(
                "'{id}' in guard (expected 'u' or 'else')"
            )))),
            other => Err(self.syntax(format!("expected a guard, found {other}"))),
        }
    }

    fn branches<T>(
        &mut self,
        mut body: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<Branch<T>>> {
        let (line, column) = self.here();
        let mut out = Vec::new();
        loop {
            let guard = self.guard()?;
            self.expect(Tok::Arrow)?;
            out.push(Branch {
                guard,
                body: body(self)?,
            });
            if *self.peek() == Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        let guards: Vec<Guard> = out.iter().map(|b| b.guard).collect();
        check_coverage(&guards).map_err(|gap| ParseError {
            kind: ParseErrorKind::NonTotalPiecewise(format!("no branch covers {gap}")),
            line,
            column,
        })?;
        Ok(out)
    }

    // ---- function expressions ----

    fn fexpr(&mut self) -> PResult<FunctionExpr> {
        let mut lhs = self.fterm()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = FunctionExpr::sum(lhs, self.fterm()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = FunctionExpr::difference(lhs, self.fterm()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn fterm(&mut self) -> PResult<FunctionExpr> {
        let mut lhs = self.ffact()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = FunctionExpr::Product {
                lhs: Box::new(lhs),
                rhs: Box::new(self.ffact()?),
            };
        }
        Ok(lhs)
    }

    fn ffact(&mut self) -> PResult<FunctionExpr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.fexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(id) => {
                self.bump();
                match id.as_str() {
                    "fb" | "fv" => {
                        self.expect(Tok::LParen)?;
                        let x = self.num()?;
                        self.expect(Tok::RParen)?;
                        let mode = if id == "fb" {
                            ScalarMode::Base
                        } else {
                            ScalarMode::Value
                        };
                        Ok(FunctionExpr::Const { mode, x })
                    }
                    "mono" => {
                        self.expect(Tok::LParen)?;
                        let k = self.kexpr()?;
                        self.expect(Tok::RParen)?;
                        Ok(FunctionExpr::Mono { k })
                    }
                    "max" => {
                        self.expect(Tok::LParen)?;
                        let a = self.fexpr()?;
                        self.expect(Tok::Comma)?;
                        let b = self.fexpr()?;
                        self.expect(Tok::RParen)?;
                        Ok(FunctionExpr::max(a, b))
                    }
                    "subst" => {
                        self.expect(Tok::LParen)?;
                        let outer = self.fexpr()?;
                        self.expect(Tok::Semi)?;
                        let inner = self.sexpr()?;
                        self.expect(Tok::RParen)?;
                        Ok(FunctionExpr::Subst {
                            outer: Box::new(outer),
                            inner,
                        })
                    }
                    "pw" => {
                        self.expect(Tok::LParen)?;
                        let branches = self.branches(|p| p.fexpr())?;
                        Ok(FunctionExpr::Piecewise { branches })
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.error(ParseErrorKind::UnknownIdentifier(format!(
                            "'{id}' (expected fb, fv, mono, max, subst or pw)"
                        ))))
                    }
                }
            }
            other => Err(self.syntax(format!("expected a function term, found {other}"))),
        }
    }

    // ---- exponent expressions ----

    fn kexpr(&mut self) -> PResult<KExpr> {
        let mut lhs = self.kterm()?;
        loop {
            let ctor: fn(Box<KExpr>, Box<KExpr>) -> KExpr = match self.peek() {
                Tok::Plus => |lhs, rhs| KExpr::Add { lhs, rhs },
                Tok::Minus => |lhs, rhs| KExpr::Sub { lhs, rhs },
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = ctor(Box::new(lhs), Box::new(self.kterm()?));
        }
    }

    fn kterm(&mut self) -> PResult<KExpr> {
        let mut lhs = self.kunary()?;
        loop {
            let ctor: fn(Box<KExpr>, Box<KExpr>) -> KExpr = match self.peek() {
                Tok::Star => |lhs, rhs| KExpr::Mul { lhs, rhs },
                Tok::Slash => |lhs, rhs| KExpr::Div { lhs, rhs },
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = ctor(Box::new(lhs), Box::new(self.kunary()?));
        }
    }

    fn kunary(&mut self) -> PResult<KExpr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            if let Tok::Num(x) = *self.peek() {
                self.bump();
                return Ok(KExpr::num(-x));
            }
            return Ok(KExpr::Neg {
                arg: Box::new(self.kunary()?),
            });
        }
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(KExpr::num(x))
            }
            Tok::Ident(id) if id == "s" => {
                self.bump();
                Ok(KExpr::S)
            }
            Tok::Ident(id) => Err(self.error(ParseErrorKind::UnknownIdentifier(format!(
                "'{id}' in exponent (only 's' is allowed)"
            )))),
            Tok::LParen => {
                self.bump();
                let e = self.kexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(self.syntax(format!("expected an exponent term, found {other}"))),
        }
    }

    // ---- scalar expressions ----

    fn sexpr(&mut self) -> PResult<ScalarExpr> {
        let mut lhs = self.sterm()?;
        loop {
            let ctor: fn(Box<ScalarExpr>, Box<ScalarExpr>) -> ScalarExpr = match self.peek() {
                Tok::Plus => |lhs, rhs| ScalarExpr::Add { lhs, rhs },
                Tok::Minus => |lhs, rhs| ScalarExpr::Sub { lhs, rhs },
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = ctor(Box::new(lhs), Box::new(self.sterm()?));
        }
    }

    fn sterm(&mut self) -> PResult<ScalarExpr> {
        let mut lhs = self.sunary()?;
        loop {
            let ctor: fn(Box<ScalarExpr>, Box<ScalarExpr>) -> ScalarExpr = match self.peek() {
                Tok::Star => |lhs, rhs| ScalarExpr::Mul { lhs, rhs },
                Tok::Slash => |lhs, rhs| ScalarExpr::Div { lhs, rhs },
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = ctor(Box::new(lhs), Box::new(self.sunary()?));
        }
    }

    fn sunary(&mut self) -> PResult<ScalarExpr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            if let Tok::Num(x) = *self.peek() {
                self.bump();
                return Ok(ScalarExpr::num(-x));
            }
            return Ok(ScalarExpr::Neg {
                arg: Box::new(self.sunary()?),
            });
        }
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(ScalarExpr::num(x))
            }
            Tok::LParen => {
                self.bump();
                let e = self.sexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(id) => {
                self.bump();
                match id.as_str() {
                    "u" => Ok(ScalarExpr::U),
                    "pow" => {
                        self.expect(Tok::LParen)?;
                        let arg = self.sexpr()?;
                        self.expect(Tok::Comma)?;
                        let exponent = self.num()?;
                        self.expect(Tok::RParen)?;
                        Ok(ScalarExpr::Pow {
                            arg: Box::new(arg),
                            exponent,
                        })
                    }
                    "pw" => {
                        self.expect(Tok::LParen)?;
                        let branches = self.branches(|p| p.sexpr())?;
                        Ok(ScalarExpr::Piecewise { branches })
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.error(ParseErrorKind::UnknownIdentifier(format!(
                            "'{id}' in scalar expression (expected u, pow or pw)"
                        ))))
                    }
                }
            }
            other => Err(self.syntax(format!("expected a scalar term, found {other}"))),
        }
    }
}

/// Parses a function `ℝ₊ → ℝ^α`.
pub fn parse(text: &str) -> Result<FunctionExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.fexpr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a real-valued function of `u`.
pub fn parse_scalar(text: &str) -> Result<ScalarExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.sexpr()?;
    p.finish()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_s() {
        assert_eq!(parse("mono(s)").unwrap(), FunctionExpr::mono_s());
    }

    #[test]
    fn example_41_shape() {
        let f = parse("pw(u==0 -> fb(0); u>0 -> fb(1)*mono(s) + fb(-1))").unwrap();
        let expected = FunctionExpr::piecewise(vec![
            (Guard::Eq { c: 0.0 }, FunctionExpr::fb(0.0)),
            (
                Guard::Gt { c: 0.0 },
                FunctionExpr::sum(
                    FunctionExpr::Product {
                        lhs: Box::new(FunctionExpr::fb(1.0)),
                        rhs: Box::new(FunctionExpr::mono_s()),
                    },
                    FunctionExpr::fb(-1.0),
                ),
            ),
        ]);
        assert_eq!(f, expected);
    }

    #[test]
    fn example_42_shape() {
        let f = parse("pw(u<=1 -> mono(s/(1-s)); u>1 -> fv(2)*mono(s/(1-s)))").unwrap();
        let FunctionExpr::Piecewise { branches } = &f else {
            panic!("not piecewise: {f:?}")
        };
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].guard, Guard::Le { c: 1.0 });
        let FunctionExpr::Mono { k } = &branches[0].body else {
            panic!()
        };
        assert_eq!(k.eval(0.5), 1.0);
        assert!(matches!(
            &branches[1].body,
            FunctionExpr::Product { lhs, .. } if **lhs == FunctionExpr::fv(2.0)
        ));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("mono(s) +\n  foo(1)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownIdentifier(_)));
        assert_eq!((e.line, e.column), (2, 3));

        let e = parse("mono(s").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!((e.line, e.column), (1, 7));

        let e = parse("pw(u<1 -> fb(0); u>1 -> fb(1))").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::NonTotalPiecewise(_)));

        let e = parse("mono(u)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownIdentifier(_)));

        assert!(parse("fb(1) fb(2)").is_err());
        assert!(parse("fb(1) $").is_err());
    }

    #[test]
    fn scalar_forms() {
        let g = parse_scalar("pow(u, 2) - 3*u + 1").unwrap();
        assert_eq!(g.eval(2.0).unwrap(), -1.0);
        let h = parse_scalar("pw(u < 1 -> u; else -> 2*u)").unwrap();
        assert_eq!(h.eval(3.0).unwrap(), 6.0);
        assert!(parse_scalar("s + u").is_err());
    }

    #[test]
    fn subst_and_max() {
        let f = parse("subst(mono(s); pow(u, 2))").unwrap();
        assert!(matches!(f, FunctionExpr::Subst { .. }));
        let m = parse("max(mono(1), fb(2))").unwrap();
        assert!(matches!(m, FunctionExpr::Max { .. }));
    }
}
