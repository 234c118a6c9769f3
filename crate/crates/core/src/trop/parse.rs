use num_traits::{One, Zero};

use super::{AffineForm, TropExpr, TropRational};
use crate::num::{Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Int),
    Var(usize),
    Min,
    Inf,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((t, l0, c0));
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Num(s.parse().unwrap()), l0, c0));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "min" => Tok::Min,
                "inf" => Tok::Inf,
                w if w.starts_with('x') && w.len() > 1 && w[1..].chars().all(|d| d.is_ascii_digit()) => {
                    let k: usize = w[1..].parse().map_err(|_| err(l0, c0, format!("bad variable `{w}`")))?;
                    if k == 0 {
                        return Err(err(l0, c0, "variables are numbered from x1".into()));
                    }
                    Tok::Var(k - 1)
                }
                w => return Err(err(l0, c0, format!("unexpected identifier `{w}`"))),
            };
            toks.push((tok, l0, c0));
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character `{c}`")));
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks })
}

/// A parsed summand: either an affine term or a genuinely tropical subexpression.
enum Atom {
    Affine(AffineForm),
    Expr(TropExpr),
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        let msg = msg.into();
        let msg = if self.toks[self.pos].0 == Tok::End { format!("{msg} at end of input") } else { msg };
        ParseError { line, col, msg }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    /// `[-] atom (('+'|'-') atom)*` as a list of (negated, atom).
    fn sum(&mut self) -> Result<Vec<(bool, Atom)>, ParseError> {
        let mut out = Vec::new();
        let mut neg = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            neg = true;
        }
        loop {
            out.push((neg, self.atom()?));
            match self.peek() {
                Tok::Plus => neg = false,
                Tok::Minus => neg = true,
                _ => break,
            }
            self.bump();
        }
        Ok(out)
    }

    fn rational(&mut self, first: Int) -> Result<Rat, ParseError> {
        if *self.peek() == Tok::Slash {
            self.bump();
            match self.bump() {
                Tok::Num(d) if !d.is_zero() => Ok(Rat::new(first, d)),
                t => {
                    if t != Tok::End {
                        self.pos -= 1;
                    }
                    Err(self.error("expected positive denominator"))
                }
            }
        } else {
            Ok(Rat::from_integer(first))
        }
    }

    fn var(&self, i: usize) -> Result<AffineForm, ParseError> {
        if i >= self.n {
            return Err(ParseError {
                line: self.toks[self.pos - 1].1,
                col: self.toks[self.pos - 1].2,
                msg: format!("variable x{} out of range for dimension {}", i + 1, self.n),
            });
        }
        Ok(AffineForm::var(self.n, i))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.bump() {
            Tok::Num(k) => {
                let q = self.rational(k)?;
                if *self.peek() != Tok::Star {
                    return Ok(Atom::Affine(AffineForm::constant(self.n, q)));
                }
                self.bump();
                if !q.denom().is_one() {
                    return Err(self.error("slopes and exponents must be integers"));
                }
                let k = q.to_integer();
                match self.peek().clone() {
                    Tok::Var(i) => {
                        self.bump();
                        Ok(Atom::Affine(self.var(i)?.scale(&k)))
                    }
                    Tok::Min | Tok::LParen => match self.atom()? {
                        Atom::Affine(a) => Ok(Atom::Affine(a.scale(&k))),
                        Atom::Expr(e) => {
                            let k: i64 = k.try_into().map_err(|_| self.error("exponent too large"))?;
                            Ok(Atom::Expr(TropExpr::Pow(Box::new(e), k)))
                        }
                    },
                    _ => Err(self.error("expected variable, `min(` or `(` after `*`")),
                }
            }
            Tok::Var(i) => Ok(Atom::Affine(self.var(i)?)),
            Tok::Inf => Ok(Atom::Expr(TropExpr::Infinity)),
            Tok::Min => {
                self.expect(Tok::LParen, "`(` after min")?;
                let mut args = vec![self.nested()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.nested()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                Ok(Atom::Expr(TropExpr::min_of(args)))
            }
            Tok::LParen => {
                let e = self.nested_atom()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            t => {
                if t != Tok::End {
                    self.pos -= 1;
                }
                Err(self.error("expected a term"))
            }
        }
    }

    fn nested_atom(&mut self) -> Result<Atom, ParseError> {
        let parts = self.sum()?;
        Ok(match build(parts, self.n, false) {
            (TropExpr::Affine(a), _) => Atom::Affine(a),
            (e, _) => Atom::Expr(e),
        })
    }

    fn nested(&mut self) -> Result<TropExpr, ParseError> {
        let parts = self.sum()?;
        Ok(build(parts, self.n, false).0)
    }
}

/// Folds signed atoms into an expression. At top level, subtracted tropical atoms go to
/// the denominator; nested, they become `⊙`-inverses.
fn build(parts: Vec<(bool, Atom)>, n: usize, top: bool) -> (TropExpr, Vec<TropExpr>) {
    let mut aff: Option<AffineForm> = None;
    let mut rest = Vec::new();
    let mut den = Vec::new();
    for (neg, atom) in parts {
        match atom {
            Atom::Affine(a) => {
                let a = if neg { a.neg() } else { a };
                aff = Some(aff.map_or(a.clone(), |b| b.add(&a)));
            }
            Atom::Expr(e) if !neg => rest.push(e),
            Atom::Expr(e) if top => den.push(e),
            Atom::Expr(e) => rest.push(match e {
                TropExpr::Pow(inner, k) => TropExpr::Pow(inner, -k),
                e => TropExpr::Pow(Box::new(e), -1),
            }),
        }
    }
    let mut out = Vec::new();
    match aff {
        Some(a) if !(!rest.is_empty() && a.is_constant() && a.constant.is_zero()) => {
            out.push(TropExpr::Affine(a))
        }
        None if rest.is_empty() => out.push(TropExpr::Affine(AffineForm::zero(n))),
        _ => {}
    }
    out.extend(rest);
    (TropExpr::sum_of(out), den)
}

fn parser(text: &str, n: usize) -> Result<Parser, ParseError> {
    Ok(Parser { toks: lex(text)?.toks, pos: 0, n })
}

/// Parses an expression over `x1..xn`; subtraction of a tropical term is a `⊙`-inverse.
pub fn parse_expr(text: &str, n: usize) -> Result<TropExpr, ParseError> {
    let mut p = parser(text, n)?;
    let e = p.nested()?;
    if *p.peek() != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses `p - q` where the top-level subtracted tropical terms form the denominator `q`.
pub fn parse_rational(text: &str, n: usize) -> Result<TropRational, ParseError> {
    let mut p = parser(text, n)?;
    let parts = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    let (num, den) = build(parts, n, true);
    let den = if den.is_empty() { TropExpr::Affine(AffineForm::zero(n)) } else { TropExpr::sum_of(den) };
    Ok(TropRational { num, den })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, ratio};
    use crate::trop::TropValue;

    #[test]
    fn min_node_with_affine_leaves() {
        let e = parse_expr("min(x1, 0)", 1).unwrap();
        assert_eq!(e, TropExpr::Min(vec![TropExpr::var(1, 0), TropExpr::constant(1, rat(0))]));
    }

    #[test]
    fn affine_leaf() {
        let e = parse_expr("2 + 3*x1 - x2", 2).unwrap();
        assert_eq!(e, TropExpr::Affine(AffineForm::from_ints(&[3, -1], rat(2))));
    }

    #[test]
    fn truncated_input_reports_end() {
        let err = parse_expr("min(x1,", 1).unwrap_err();
        assert!(err.msg.contains("end of input"), "{err}");
        assert_eq!((err.line, err.col), (1, 8));
    }

    #[test]
    fn variable_range_and_integrality() {
        assert!(parse_expr("x3", 2).unwrap_err().msg.contains("out of range"));
        assert!(parse_expr("1/2*x1", 1).unwrap_err().msg.contains("integer"));
        assert!(parse_expr("x0", 1).is_err());
        assert!(parse_expr("min(x1 0)", 1).is_err());
    }

    #[test]
    fn top_level_minus_is_division() {
        let r = parse_rational("x1 - min(x1, 0)", 1).unwrap();
        assert_eq!(r.den, TropExpr::Min(vec![TropExpr::var(1, 0), TropExpr::constant(1, rat(0))]));
        assert_eq!(r.eval(&[rat(-1)]).unwrap(), TropValue::Finite(rat(0)));
        assert_eq!(r.eval(&[rat(3)]).unwrap(), TropValue::Finite(rat(3)));
    }

    #[test]
    fn powers_and_rationals() {
        let e = parse_expr("2*min(x1, 0) - 1/2", 1).unwrap();
        assert_eq!(e.eval(&[rat(-3)]).unwrap(), TropValue::Finite(ratio(-13, 2)));
        let e = parse_expr("-min(x1, 0)", 1).unwrap();
        assert_eq!(e.eval(&[rat(-3)]).unwrap(), TropValue::Finite(rat(3)));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "min(x1, 0)",
            "2 + 3*x1 - x2",
            "x2 + min(x1, 0) - min(x2, 0)",
            "0 - min(0, 2 - 2*x1)",
            "3*min(x1, -x2) - 2*min(x1, 1/2)",
        ] {
            let r = parse_rational(s, 2).unwrap();
            assert_eq!(r.to_string(), s);
        }
        let e = parse_expr("min(x1, 2*(x2 + min(x1, 0)), -min(x2, 3))", 2).unwrap();
        assert_eq!(parse_expr(&e.to_string(), 2).unwrap(), e);
    }
}
