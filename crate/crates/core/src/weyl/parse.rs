//! Parser for operator expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := ("-" | "+") factor | atom
//! atom   := number | "x" | "y" | "z" | "px" | "py" | "pz" | "hbar" | "i" | "(" expr ")"
//! number := integer | integer "/" integer
//! ```
//!
//! `*` is the non-commutative product; juxtaposition is an error. Whitespace is
//! insignificant. Positions in errors are byte offsets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::coeff::GaussianRational;
use super::expr::{Generator, WeylExpression, MAX_DEGREE};
use super::rewrite::RawTerm;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Gen(Generator),
    Hbar,
    I,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Gen(g) => format!("`{}`", g.name()),
        Tok::Hbar => "`hbar`".into(),
        Tok::I => "`i`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match ch {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let digits = |mut j: usize| {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    j
                };
                let end = digits(i);
                let num: BigInt = text[i..end].parse().expect("ascii digits");
                let after = skip_ws(end);
                if after < bytes.len() && bytes[after] == b'/' {
                    let d0 = skip_ws(after + 1);
                    let d1 = digits(d0);
                    if d1 == d0 {
                        return Err(syntax(d0, "expected an integer denominator after `/`"));
                    }
                    let den: BigInt = text[d0..d1].parse().expect("ascii digits");
                    if den.is_zero() {
                        return Err(syntax(d0, "zero denominator"));
                    }
                    i = d1;
                    out.push((Tok::Num(BigRational::new(num, den)), start));
                } else {
                    i = end;
                    out.push((Tok::Num(BigRational::from_integer(num)), start));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = i;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                let word = &text[i..end];
                i = end;
                let tok = match word {
                    "hbar" => Tok::Hbar,
                    "i" => Tok::I,
                    w => match Generator::from_name(w) {
                        Some(g) => Tok::Gen(g),
                        None => {
                            return Err(Error::UnknownSymbol {
                                position: start,
                                name: w.to_owned(),
                            })
                        }
                    },
                };
                out.push((tok, start));
                continue;
            }
            b'/' => return Err(syntax(i, "`/` is only allowed inside a rational literal")),
            _ => {
                let c = text[i..].chars().next().expect("in bounds");
                return Err(syntax(i, format!("unexpected character `{c}`")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Parsed operator expression before normal ordering.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigRational),
    Gen(Generator),
    Hbar,
    I,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Ast> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Ast::Neg(Box::new(self.factor()?)))
            }
            Tok::Plus => {
                self.bump();
                self.factor()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        let at = self.offset();
        let ast = match self.bump() {
            Tok::Num(n) => Ast::Num(n),
            Tok::Gen(g) => Ast::Gen(g),
            Tok::Hbar => Ast::Hbar,
            Tok::I => Ast::I,
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(syntax(
                        self.offset(),
                        format!("expected `)`, found {}", describe(self.peek())),
                    ));
                }
                self.bump();
                inner
            }
            other => return Err(syntax(at, format!("expected an operand, found {}", describe(&other)))),
        };
        // Two operands in a row means a missing operator.
        if matches!(
            self.peek(),
            Tok::Num(_) | Tok::Gen(_) | Tok::Hbar | Tok::I | Tok::LParen
        ) {
            return Err(syntax(
                self.offset(),
                "missing operator; products must be written with `*`",
            ));
        }
        Ok(ast)
    }
}

/// Parses `text` into an unevaluated syntax tree.
pub fn parse_ast(text: &str) -> Result<Ast> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(ast)
}

impl Ast {
    /// Evaluates to a normal-ordered expression using the closed-form product.
    pub fn evaluate(&self) -> Result<WeylExpression> {
        Ok(match self {
            Ast::Num(n) => WeylExpression::constant(GaussianRational::real(n.clone())),
            Ast::Gen(g) => WeylExpression::generator(*g),
            Ast::Hbar => WeylExpression::hbar(),
            Ast::I => WeylExpression::i(),
            Ast::Neg(a) => a.evaluate()?.neg(),
            Ast::Add(a, b) => a.evaluate()?.add(&b.evaluate()?),
            Ast::Sub(a, b) => a.evaluate()?.sub(&b.evaluate()?),
            Ast::Mul(a, b) => a.evaluate()?.mul(&b.evaluate()?)?,
        })
    }

    /// Distributes products into raw words, keeping generator order as written.
    pub fn expand(&self) -> Result<Vec<RawTerm>> {
        Ok(match self {
            Ast::Num(n) => vec![RawTerm::new(GaussianRational::real(n.clone()), vec![])],
            Ast::Gen(g) => vec![RawTerm::unit(vec![*g])],
            Ast::Hbar => vec![RawTerm {
                coeff: GaussianRational::from_int(1),
                hbar: 1,
                word: vec![],
            }],
            Ast::I => vec![RawTerm::new(GaussianRational::i(), vec![])],
            Ast::Neg(a) => a
                .expand()?
                .into_iter()
                .map(|t| RawTerm { coeff: -t.coeff, ..t })
                .collect(),
            Ast::Add(a, b) => {
                let mut v = a.expand()?;
                v.extend(b.expand()?);
                v
            }
            Ast::Sub(a, b) => {
                let mut v = a.expand()?;
                v.extend(Ast::Neg(b.clone()).expand()?);
                v
            }
            Ast::Mul(a, b) => {
                let (l, r) = (a.expand()?, b.expand()?);
                let mut v = Vec::with_capacity(l.len() * r.len());
                for x in &l {
                    for y in &r {
                        let mut word = x.word.clone();
                        word.extend_from_slice(&y.word);
                        if word.len() as u32 > MAX_DEGREE {
                            return Err(Error::DegreeOverflow {
                                degree: word.len() as u32,
                                limit: MAX_DEGREE,
                            });
                        }
                        v.push(RawTerm {
                            coeff: &x.coeff * &y.coeff,
                            hbar: x.hbar + y.hbar,
                            word,
                        });
                    }
                }
                v
            }
        })
    }
}

/// Parses and normal orders an operator expression.
pub fn parse(text: &str) -> Result<WeylExpression> {
    parse_ast(text)?.evaluate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_component() {
        let e = parse("y*pz - z*py").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.to_string(), "y*pz - z*py");
    }

    #[test]
    fn reordering() {
        assert_eq!(parse("pz*z").unwrap().to_string(), "z*pz - i*hbar");
    }

    #[test]
    fn cancellation() {
        assert!(parse("x*py - x*py").unwrap().is_zero());
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse("-x + y").unwrap(), parse("y - x").unwrap());
        assert_eq!(parse("-x*y").unwrap(), parse("-(x*y)").unwrap());
        assert_eq!(parse("x - y - z").unwrap(), parse("x - (y + z)").unwrap());
        assert_eq!(parse("2*(x + y)").unwrap(), parse("2*x + 2*y").unwrap());
        assert_eq!(parse("--x").unwrap(), parse("x").unwrap());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse("1/2*x + 1 / 2*x").unwrap(), parse("x").unwrap());
        assert_eq!(parse("2/4").unwrap().to_string(), "1/2");
        assert_eq!(parse("i*i").unwrap(), parse("-1").unwrap());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse("x y").unwrap_err().position(), Some(2));
        assert_eq!(parse("2x").unwrap_err().position(), Some(1));
        assert_eq!(parse("x + ").unwrap_err().position(), Some(4));
        assert_eq!(parse("(x").unwrap_err().position(), Some(2));
        assert_eq!(parse("x)").unwrap_err().position(), Some(1));
        assert_eq!(parse("1/0").unwrap_err().position(), Some(2));
        assert_eq!(parse("x / y").unwrap_err().position(), Some(2));
        assert_eq!(parse("x ^ 2").unwrap_err().position(), Some(2));
        assert!(matches!(parse(""), Err(Error::Syntax { position: 0, .. })));
    }

    #[test]
    fn unknown_symbols() {
        assert_eq!(
            parse("x*qx"),
            Err(Error::UnknownSymbol {
                position: 2,
                name: "qx".into()
            })
        );
    }

    #[test]
    fn degree_limit() {
        let long = vec!["x"; 17].join("*");
        assert!(matches!(parse(&long), Err(Error::DegreeOverflow { .. })));
        let ok = vec!["x"; 16].join("*");
        assert_eq!(parse(&ok).unwrap().degree(), 16);
    }

    #[test]
    fn printed_form_reparses() {
        for s in [
            "pz*z*pz*z",
            "(1/2 - 3*i)*x*px + 7/3*hbar*y",
            "-(y*pz - z*py)",
            "i*hbar - 2",
            "0",
            "hbar*hbar*px*x",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
