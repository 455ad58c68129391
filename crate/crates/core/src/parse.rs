//! Text syntax for scalars, forms and derivations.
//!
//! One recursive-descent parser serves all three: scalar expressions follow
//! the usual arithmetic grammar, `dx<k>` (1-based) denote coordinate
//! differentials with `^` acting as wedge between forms, and `L(v)` / `i(v)`
//! denote the lifts of a named vector field. A leading unary minus is
//! accepted anywhere a factor may appear.

use std::collections::BTreeMap;

use crate::derivations::Derivation;
use crate::error::{GeomError, Result};
use crate::expr::{Func, Rational, ScalarExpr};
use crate::forms::Form;
use crate::vector::VectorField;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool),
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

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v, _) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| GeomError::Parse {
                    offset: start,
                    expected: vec!["number".into()],
                    found: format!("`{s}`"),
                })?;
                out.push((start, Tok::Num(v, !s.contains('.'))));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(GeomError::Parse {
                    offset: start,
                    expected: vec!["expression".into()],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// Names visible to the parser besides coordinates.
#[derive(Clone, Copy)]
pub struct Scope<'a> {
    pub coords: &'a [String],
    pub forms: Option<&'a BTreeMap<String, Form>>,
    pub vectors: Option<&'a BTreeMap<String, VectorField>>,
}

impl<'a> Scope<'a> {
    pub fn coords(coords: &'a [String]) -> Self {
        Scope {
            coords,
            forms: None,
            vectors: None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Scalar,
    Form,
    Derivation,
}

#[derive(Clone)]
enum Val {
    Scalar(ScalarExpr),
    Form(Form),
    Der(Derivation),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    scope: Scope<'a>,
    mode: Mode,
}

const FUNCS: [&str; 6] = ["sin", "cos", "tan", "exp", "log", "sqrt"];

impl<'a> Parser<'a> {
    fn dim(&self) -> usize {
        self.scope.coords.len()
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(GeomError::Parse {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn fail_at<T>(&self, offset: usize, expected: &str, found: &str) -> Result<T> {
        Err(GeomError::Parse {
            offset,
            expected: vec![expected.to_string()],
            found: found.to_string(),
        })
    }

    fn expect(&mut self, t: Tok, name: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn to_form(&self, v: Val, at: usize) -> Result<Form> {
        match v {
            Val::Scalar(s) => Ok(Form::scalar(self.dim(), s)),
            Val::Form(f) => Ok(f),
            Val::Der(_) => self.fail_at(at, "form", "derivation"),
        }
    }

    fn to_scalar(&self, v: Val, at: usize) -> Result<ScalarExpr> {
        match v {
            Val::Scalar(s) => Ok(s),
            Val::Form(f) => match f.as_scalar() {
                Some(s) => Ok(s),
                None => self.fail_at(at, "degree-0 expression", "form of positive degree"),
            },
            Val::Der(_) => self.fail_at(at, "scalar", "derivation"),
        }
    }

    fn add(&self, a: Val, b: Val, sign: f64, at: usize) -> Result<Val> {
        Ok(match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(&x + &y.scale(sign)),
            (Val::Der(x), Val::Der(y)) => Val::Der(x.add(&y.scale_const(sign))),
            (Val::Der(x), other) => {
                // only the literal zero may be mixed with a derivation
                if !self.to_scalar(other, at)?.is_zero() {
                    return self.fail_at(at, "derivation", "form");
                }
                Val::Der(x)
            }
            (other, Val::Der(y)) => {
                if !self.to_scalar(other, at)?.is_zero() {
                    return self.fail_at(at, "derivation", "form");
                }
                Val::Der(y.scale_const(sign))
            }
            (x, y) => {
                let fx = self.to_form(x, at)?;
                let fy = self.to_form(y, at)?;
                Val::Form(fx.add(&fy.scale_const(sign)))
            }
        })
    }

    fn mul(&self, a: Val, b: Val, at: usize) -> Result<Val> {
        Ok(match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(&x * &y),
            (Val::Der(_), Val::Der(_)) => return self.fail_at(at, "form coefficient", "derivation"),
            (x, Val::Der(d)) => Val::Der(d.left_mul(&self.to_form(x, at)?)),
            (Val::Der(d), y) => Val::Der(d.right_mul(&self.to_form(y, at)?)),
            (x, y) => Val::Form(self.to_form(x, at)?.wedge(&self.to_form(y, at)?)),
        })
    }

    fn div(&self, a: Val, b: Val, at: usize) -> Result<Val> {
        let s = self.to_scalar(b, at)?.recip();
        self.mul(a, Val::Scalar(s), at)
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => return Ok(acc),
            };
            let at = self.offset();
            self.bump();
            let rhs = self.term()?;
            acc = self.add(acc, rhs, sign, at)?;
        }
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs, at)?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = self.div(acc, rhs, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Val> {
        if *self.peek() == Tok::Minus {
            let at = self.offset();
            self.bump();
            let v = self.unary()?;
            return self.mul(Val::Scalar(ScalarExpr::constant(-1.0)), v, at);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Val> {
        let mut acc = self.base()?;
        while *self.peek() == Tok::Caret {
            let at = self.offset();
            self.bump();
            if matches!((&acc, self.peek()), (Val::Form(_), Tok::Ident(_))) {
                let rhs = self.base()?;
                let lhs = self.to_form(acc, at)?;
                let rhs = self.to_form(rhs, at)?;
                acc = Val::Form(lhs.wedge(&rhs));
            } else {
                let r = self.exponent()?;
                let b = self.to_scalar(acc, at)?;
                acc = Val::Scalar(b.pow(r));
            }
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v, true) if v.fract() == 0.0 && v.abs() < 1e15 => {
                self.bump();
                Ok(if neg { -(v as i64) } else { v as i64 })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn exponent(&mut self) -> Result<Rational> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let num = self.integer()?;
            let den = if *self.peek() == Tok::Slash {
                self.bump();
                let at = self.offset();
                let d = self.integer()?;
                if d == 0 {
                    return self.fail_at(at, "nonzero denominator", "0");
                }
                d
            } else {
                1
            };
            self.expect(Tok::RParen, "`)`")?;
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::integer(self.integer()?))
        }
    }

    fn base(&mut self) -> Result<Val> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v, _) => Ok(Val::Scalar(ScalarExpr::constant(v))),
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(v)
            }
            Tok::Ident(name) => self.ident(name, at),
            _ => {
                self.pos -= 1;
                self.fail(&["number", "name", "`(`", "function"])
            }
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Val> {
        let call = *self.peek() == Tok::LParen;
        if call && FUNCS.contains(&name.as_str()) {
            self.bump();
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            let a = self.to_scalar(arg, at)?;
            let v = match name.as_str() {
                "sin" => a.sin(),
                "cos" => a.cos(),
                "tan" => a.tan(),
                "exp" => a.exp(),
                "log" => ScalarExpr::apply(Func::Log, a),
                _ => a.sqrt(),
            };
            return Ok(Val::Scalar(v));
        }
        if call && self.mode == Mode::Derivation && (name == "L" || name == "i") {
            self.bump();
            let vat = self.offset();
            let vname = match self.bump() {
                Tok::Ident(v) => v,
                _ => {
                    self.pos -= 1;
                    return self.fail(&["vector field name"]);
                }
            };
            let v = self
                .scope
                .vectors
                .and_then(|m| m.get(&vname))
                .ok_or(GeomError::UnknownIdentifier(vname.clone()))?;
            if v.dim() != self.dim() {
                return self.fail_at(vat, "vector field of chart dimension", &vname);
            }
            self.expect(Tok::RParen, "`)`")?;
            let d = if name == "L" {
                Derivation::lift_lie(v)
            } else {
                Derivation::lift_ins(v)
            };
            return Ok(Val::Der(d));
        }
        if name == "pi" {
            return Ok(Val::Scalar(ScalarExpr::pi()));
        }
        if let Some(k) = self.scope.coords.iter().position(|c| *c == name) {
            return Ok(Val::Scalar(ScalarExpr::coord(k)));
        }
        if self.mode != Mode::Scalar {
            if let Some(k) = name.strip_prefix("dx").and_then(|s| s.parse::<usize>().ok()) {
                if (1..=self.dim()).contains(&k) {
                    return Ok(Val::Form(Form::dx(self.dim(), k - 1)));
                }
            }
            if let Some(f) = self.scope.forms.and_then(|m| m.get(&name)) {
                return Ok(Val::Form(f.clone()));
            }
        }
        Err(GeomError::UnknownIdentifier(name))
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() != Tok::End {
            return self.fail(&["operator", "end of input"]);
        }
        Ok(())
    }
}

fn run(text: &str, scope: Scope<'_>, mode: Mode) -> Result<(Val, usize)> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        scope,
        mode,
    };
    let v = p.expr()?;
    p.finish()?;
    Ok((v, p.dim()))
}

/// Parses a scalar expression over the given coordinate names.
pub fn parse_expr(text: &str, coords: &[String]) -> Result<ScalarExpr> {
    let (v, _) = run(text, Scope::coords(coords), Mode::Scalar)?;
    match v {
        Val::Scalar(s) => Ok(s),
        _ => Err(GeomError::Parse {
            offset: 0,
            expected: vec!["scalar expression".into()],
            found: "form".into(),
        }),
    }
}

/// Parses a form literal such as `sin(x1) * dx1^dx2`.
pub fn parse_form(text: &str, scope: Scope<'_>) -> Result<Form> {
    let (v, dim) = run(text, scope, Mode::Form)?;
    match v {
        Val::Scalar(s) => Ok(Form::scalar(dim, s)),
        Val::Form(f) => Ok(f),
        Val::Der(_) => Err(GeomError::Parse {
            offset: 0,
            expected: vec!["form".into()],
            found: "derivation".into(),
        }),
    }
}

/// Parses a derivation such as `x1 * L(U) + dx1 * i(E2)`.
pub fn parse_derivation(text: &str, scope: Scope<'_>) -> Result<Derivation> {
    let (v, dim) = run(text, scope, Mode::Derivation)?;
    match v {
        Val::Der(d) => Ok(d),
        Val::Scalar(s) if s.is_zero() => Ok(Derivation::zero(dim)),
        _ => Err(GeomError::Parse {
            offset: 0,
            expected: vec!["derivation".into()],
            found: "form".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn scalar_grammar() {
        let c = names(&["th", "ph"]);
        let e = parse_expr("sin(th)^2", &c).unwrap();
        assert_eq!(e, ScalarExpr::coord(0).sin().powi(2));
        let c = names(&["x", "y"]);
        let e = parse_expr("x*y + 1/2", &c).unwrap();
        assert_eq!(e, &(&ScalarExpr::coord(0) * &ScalarExpr::coord(1)) + &ScalarExpr::constant(0.5));
        assert_eq!(
            parse_expr("foo(x)", &c),
            Err(GeomError::UnknownIdentifier("foo".into()))
        );
        assert_eq!(parse_expr("sqrt(x)", &c).unwrap(), parse_expr("x^(1/2)", &c).unwrap());
    }

    #[test]
    fn parse_error_offset() {
        let c = names(&["x"]);
        match parse_expr("x + * 2", &c) {
            Err(GeomError::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("x^y", &c), Err(GeomError::Parse { .. })));
        assert!(matches!(parse_expr("(x", &c), Err(GeomError::Parse { .. })));
    }

    #[test]
    fn form_literals() {
        let c = names(&["x1", "x2"]);
        let f = parse_form("sin(x1) * dx1^dx2", Scope::coords(&c)).unwrap();
        assert_eq!(f, Form::monomial(2, 0b11, ScalarExpr::coord(0).sin()));
        let g = parse_form("dx2^dx1", Scope::coords(&c)).unwrap();
        assert_eq!(g, Form::monomial(2, 0b11, ScalarExpr::constant(-1.0)));
        assert!(matches!(
            parse_form("dx3", Scope::coords(&c)),
            Err(GeomError::UnknownIdentifier(_))
        ));
    }

    #[test]
    fn derivation_literals() {
        let c = names(&["x1", "x2"]);
        let mut vectors = BTreeMap::new();
        vectors.insert("U".to_string(), VectorField::coord(2, 0));
        let scope = Scope {
            coords: &c,
            forms: None,
            vectors: Some(&vectors),
        };
        let d = parse_derivation("x1 * L(U) + dx1 * i(U)", scope).unwrap();
        let expect = Derivation::lie_gen(2, 0)
            .left_mul(&Form::scalar(2, ScalarExpr::coord(0)))
            .add(&Derivation::ins_gen(2, 0).left_mul(&Form::dx(2, 0)));
        assert_eq!(d, expect);
        assert_eq!(
            parse_derivation("L(V)", scope),
            Err(GeomError::UnknownIdentifier("V".into()))
        );
    }
}
