//! Recursive-descent parser for the expression DSL.
//!
//! Grammar (infix, `^` right-associative, unary minus binds looser than `^`):
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := unary (('*'|'/') unary)*
//! unary   := ('-'|'+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr,* ')' | '(' expr ')'
//!          | 'D' '[' expr ',' ident ',' integer ']'
//! ```
//!
//! `i` is the imaginary unit; `exp`, `log`, `sin`, `cos`, `sqrt` are built
//! in; any other applied identifier is an opaque function whose arity is
//! fixed by first use. Identifiers may carry trailing apostrophes (doubled
//! charts write the first group slot as `q'`). Decimal literals are exact
//! rationals.

use super::{Expr, Scope};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("arity mismatch for opaque function `{name}`: saw {got} args, expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
        offset: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos] as char;
        let tok = match c {
            '+' => {
                self.pos += 1;
                Tok::Plus
            }
            '-' => {
                self.pos += 1;
                Tok::Minus
            }
            '*' => {
                self.pos += 1;
                Tok::Star
            }
            '/' => {
                self.pos += 1;
                Tok::Slash
            }
            '^' => {
                self.pos += 1;
                Tok::Caret
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            '[' => {
                self.pos += 1;
                Tok::LBracket
            }
            ']' => {
                self.pos += 1;
                Tok::RBracket
            }
            ',' => {
                self.pos += 1;
                Tok::Comma
            }
            '0'..='9' | '.' => {
                let mut end = self.pos;
                let mut seen_dot = false;
                while end < self.src.len() {
                    let ch = self.src[end] as char;
                    if ch.is_ascii_digit() {
                        end += 1;
                    } else if ch == '.' && !seen_dot {
                        seen_dot = true;
                        end += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Num(decimal_to_rational(text).ok_or(ParseError::Syntax {
                    offset: start,
                    msg: format!("malformed number `{text}`"),
                })?)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = self.pos;
                while end < self.src.len() {
                    let ch = self.src[end] as char;
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        end += 1;
                    } else {
                        break;
                    }
                }
                // trailing apostrophes mark primed (first-slot) coordinates
                while end < self.src.len() && self.src[end] as char == '\'' {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Ident(text.to_string())
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

fn decimal_to_rational(text: &str) -> Option<BigRational> {
    if text == "." {
        return None;
    }
    match text.find('.') {
        None => Some(BigRational::from_integer(text.parse::<BigInt>().ok()?)),
        Some(idx) => {
            let int_part = &text[..idx];
            let frac_part = &text[idx + 1..];
            let mut num: BigInt = if int_part.is_empty() {
                BigInt::from(0)
            } else {
                int_part.parse().ok()?
            };
            let mut den = BigInt::from(1);
            for ch in frac_part.chars() {
                num = num * 10 + ch.to_digit(10)?;
                den *= 10;
            }
            Some(BigRational::new(num, den))
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    scope: &'a Scope,
    end: usize,
    opaques: BTreeMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        match self.bump() {
            Some((_, t)) if &t == want => Ok(()),
            Some((o, t)) => Err(ParseError::Syntax {
                offset: o,
                msg: format!("expected {what}, found {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                offset: self.end,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some((_, Tok::Plus)) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Expr::Sum(vec![acc, rhs]);
                }
                Some((_, Tok::Minus)) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Expr::Sum(vec![acc, Expr::Product(vec![Expr::int(-1), rhs])]);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some((_, Tok::Star)) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::Product(vec![acc, rhs]);
                }
                Some((_, Tok::Slash)) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::Product(vec![
                        acc,
                        Expr::Power(Box::new(rhs), Box::new(Expr::int(-1))),
                    ]);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some((_, Tok::Minus)) => {
                self.bump();
                let inner = self.unary()?;
                Ok(Expr::Product(vec![Expr::int(-1), inner]))
            }
            Some((_, Tok::Plus)) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Some((_, Tok::Caret)) = self.peek() {
            self.bump();
            let expo = self.unary()?;
            return Ok(Expr::Power(Box::new(base), Box::new(expo)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((_, Tok::Num(r))) => Ok(Expr::Const(super::CRat::from_rat(r))),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some((offset, Tok::Ident(name))) => self.ident(offset, name),
            Some((o, t)) => Err(ParseError::Syntax {
                offset: o,
                msg: format!("expected a value, found {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                offset: self.end,
                msg: "expected a value, found end of input".into(),
            }),
        }
    }

    fn ident(&mut self, offset: usize, name: String) -> Result<Expr, ParseError> {
        if name == "D" {
            return self.derivative_notation(offset);
        }
        let applied = matches!(self.peek(), Some((_, Tok::LParen)));
        if applied {
            self.bump();
            let mut args = vec![self.expr()?];
            while matches!(self.peek(), Some((_, Tok::Comma))) {
                self.bump();
                args.push(self.expr()?);
            }
            self.expect(&Tok::RParen, "`)`")?;
            return match name.as_str() {
                "exp" | "log" | "sin" | "cos" | "sqrt" => {
                    if args.len() != 1 {
                        return Err(ParseError::ArityMismatch {
                            name,
                            expected: 1,
                            got: args.len(),
                            offset,
                        });
                    }
                    let a = Box::new(args.pop().unwrap());
                    Ok(match name.as_str() {
                        "exp" => Expr::Exp(a),
                        "log" => Expr::Log(a),
                        "sin" => Expr::Sin(a),
                        "cos" => Expr::Cos(a),
                        _ => Expr::Power(a, Box::new(Expr::ratio(1, 2))),
                    })
                }
                _ => {
                    let arity = args.len();
                    match self.opaques.get(&name) {
                        Some(&known) if known != arity => Err(ParseError::ArityMismatch {
                            name,
                            expected: known,
                            got: arity,
                            offset,
                        }),
                        _ => {
                            self.opaques.insert(name.clone(), arity);
                            Ok(Expr::Opaque {
                                name,
                                didx: vec![0; arity],
                                args,
                            })
                        }
                    }
                }
            };
        }
        if name == "i" {
            return Ok(Expr::i());
        }
        if self.scope.has_coord(&name) {
            return Ok(Expr::Coord(name));
        }
        if self.scope.param(&name).is_some() {
            return Ok(Expr::Param(name));
        }
        Err(ParseError::UnknownIdentifier { offset, name })
    }

    fn derivative_notation(&mut self, offset: usize) -> Result<Expr, ParseError> {
        self.expect(&Tok::LBracket, "`[` after D")?;
        let inner = self.expr()?;
        self.expect(&Tok::Comma, "`,` in D[...]")?;
        let var = match self.bump() {
            Some((_, Tok::Ident(n))) => n,
            _ => {
                return Err(ParseError::Syntax {
                    offset,
                    msg: "D[...] needs a coordinate name".into(),
                })
            }
        };
        self.expect(&Tok::Comma, "`,` in D[...]")?;
        let order = match self.bump() {
            Some((o, Tok::Num(r))) => {
                if r.is_integer() {
                    num_traits::ToPrimitive::to_u32(&r.to_integer()).ok_or(ParseError::Syntax {
                        offset: o,
                        msg: "derivative order out of range".into(),
                    })?
                } else {
                    return Err(ParseError::Syntax {
                        offset: o,
                        msg: "derivative order must be an integer".into(),
                    });
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset,
                    msg: "D[...] needs an integer order".into(),
                })
            }
        };
        self.expect(&Tok::RBracket, "`]`")?;
        let mut out = inner;
        for _ in 0..order {
            out = out.diff(&var);
        }
        Ok(out)
    }
}

/// Parse and normalize a DSL expression against a chart context.
pub fn parse(src: &str, scope: &Scope) -> Result<Expr, ParseError> {
    parse_ast(src, scope).map(|e| e.normalize())
}

/// Parse without normalizing (keeps the written operand order, which the
/// noncommutative operator parser relies on).
pub fn parse_ast(src: &str, scope: &Scope) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(src);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    let mut p = Parser {
        toks,
        idx: 0,
        scope,
        end: src.len(),
        opaques: BTreeMap::new(),
    };
    let e = p.expr()?;
    if let Some((o, t)) = p.peek() {
        return Err(ParseError::Syntax {
            offset: *o,
            msg: format!("unexpected trailing {t:?}"),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{CoordDecl, ParamAssumption, ParamDomain};

    fn scope() -> Scope {
        Scope::new(
            vec![CoordDecl::new("q"), CoordDecl::new("p")],
            vec![ParamAssumption::new("j", ParamDomain::IntegerConstrained)],
        )
    }

    #[test]
    fn parses_sum_of_terms() {
        let s = scope();
        let e = parse("q*p + exp(q)", &s).unwrap();
        match e {
            Expr::Sum(ts) => assert_eq!(ts.len(), 2),
            other => panic!("expected sum, got {other:?}"),
        }
    }

    #[test]
    fn parses_symbolic_power() {
        let s = Scope::new(
            vec![CoordDecl::new("c"), CoordDecl::new("cs")],
            vec![ParamAssumption::new("j", ParamDomain::IntegerConstrained)],
        );
        let e = parse("(1 + c*cs)^(-j)", &s).unwrap();
        assert!(matches!(e, Expr::Power(_, _)));
    }

    #[test]
    fn syntax_error_carries_offset() {
        let s = scope();
        match parse("q +* p", &s) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let s = scope();
        assert!(matches!(
            parse("q + z", &s),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn opaque_arity_is_fixed_by_first_use() {
        let s = scope();
        assert!(parse("Phi(q) + Phi(p)", &s).is_ok());
        assert!(matches!(
            parse("Phi(q) + Phi(q, p)", &s),
            Err(ParseError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn derivative_notation() {
        let s = scope();
        let e = parse("D[Phi(q), q, 2]", &s).unwrap();
        match e {
            Expr::Opaque { didx, .. } => assert_eq!(didx, vec![2]),
            other => panic!("expected opaque derivative, got {other:?}"),
        }
    }

    #[test]
    fn decimals_are_exact() {
        let s = scope();
        let e = parse("0.3", &s).unwrap();
        assert_eq!(e, Expr::ratio(3, 10));
    }

    #[test]
    fn primed_coordinates() {
        let s = scope().doubled();
        let e = parse("p'*q - q'*p", &s).unwrap();
        assert!(e.free_coords().contains("q'"));
    }
}
