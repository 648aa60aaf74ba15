//! Morphism expressions.
//!
//! ```text
//! sum     := tensor (('+' | '-') tensor)*
//! tensor  := compose ('*' compose)*
//! compose := unary ('.' unary)*
//! unary   := '-' unary | atom
//! atom    := int ['/' int] | 'D' int | gen | '1[' word ']' | '(' sum ')'
//! gen     := c | c' | d | d' | s | s' | t | t' | x | x'
//! ```
//!
//! `f . g` is `f` after `g`. Compose binds tighter than tensor, both are left
//! associative. Scalars are endomorphisms of the empty word, so `2 * s` is
//! twice `s`. Words use `^`, `v` and `0` for the empty word.

use std::fmt;

use num_bigint::BigInt;

use crate::diagrams::{Gen, Slice, SliceWord, Word};
use crate::scalars::{Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("position {pos}: type mismatch: {msg}")]
    Type { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Gen(Gen),
    Id(Word),
    Scalar(Poly),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Compose(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
}

/// A parsed expression; `pos` is the byte offset of the node's operator or
/// first token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub pos: usize,
    pub kind: ExprKind,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Gen(g) => write!(f, "{g}"),
            ExprKind::Id(w) => write!(f, "1[{w}]"),
            ExprKind::Scalar(p) => write!(f, "({p})"),
            ExprKind::Neg(e) => write!(f, "-{e}"),
            ExprKind::Add(a, b) => write!(f, "({a} + {b})"),
            ExprKind::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprKind::Compose(a, b) => write!(f, "({a} . {b})"),
            ExprKind::Tensor(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

/// A typed linear combination of slice words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    pub src: Word,
    pub tgt: Word,
    pub terms: Vec<(SliceWord, Poly)>,
}

impl Combination {
    fn single(w: SliceWord, c: Poly) -> Combination {
        Combination {
            src: w.src.clone(),
            tgt: w.tgt(),
            terms: vec![(w, c)],
        }
    }

    fn scaled(mut self, c: &Poly) -> Combination {
        for t in &mut self.terms {
            t.1 = &t.1 * c;
        }
        self
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos, msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.tensor()?;
        loop {
            let pos = self.pos_here();
            if self.eat('+') {
                let rhs = self.tensor()?;
                lhs = Expr { pos, kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)) };
            } else if self.eat('-') {
                let rhs = self.tensor()?;
                lhs = Expr { pos, kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)) };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn pos_here(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn tensor(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.compose()?;
        loop {
            let pos = self.pos_here();
            if !self.eat('*') {
                return Ok(lhs);
            }
            let rhs = self.compose()?;
            lhs = Expr { pos, kind: ExprKind::Tensor(Box::new(lhs), Box::new(rhs)) };
        }
    }

    fn compose(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos_here();
            if !self.eat('.') {
                return Ok(lhs);
            }
            let rhs = self.unary()?;
            lhs = Expr { pos, kind: ExprKind::Compose(Box::new(lhs), Box::new(rhs)) };
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos_here();
        if self.eat('-') {
            let e = self.unary()?;
            return Ok(Expr { pos, kind: ExprKind::Neg(Box::new(e)) });
        }
        self.atom()
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        let len = self.src[start..].bytes().take_while(u8::is_ascii_digit).count();
        self.pos += len;
        (len > 0).then(|| &self.src[start..start + len])
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos_here();
        let Some(c) = self.peek() else {
            return self.err(pos, "unexpected end of input");
        };
        let kind = match c {
            '(' => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return self.err(self.pos, "expected ')'");
                }
                return Ok(e);
            }
            '1' if self.src[pos..].starts_with("1[") => {
                self.pos += 2;
                let close = match self.src[self.pos..].find(']') {
                    Some(i) => self.pos + i,
                    None => return self.err(self.pos, "expected ']'"),
                };
                let text = self.src[self.pos..close].trim();
                let w = Word::parse(text).map_err(|e| ExprError::Syntax { pos: self.pos, msg: e.to_string() })?;
                self.pos = close + 1;
                ExprKind::Id(w)
            }
            '0'..='9' => {
                let num: BigInt = self.digits().unwrap().parse().unwrap();
                let mut r = Rat::from_integer(num);
                if self.src[self.pos..].starts_with('/') {
                    self.pos += 1;
                    let p = self.pos;
                    let Some(d) = self.digits() else {
                        return self.err(p, "expected a denominator");
                    };
                    let den: BigInt = d.parse().unwrap();
                    if den == BigInt::from(0) {
                        return self.err(p, "zero denominator");
                    }
                    r /= Rat::from_integer(den);
                }
                ExprKind::Scalar(Poly::from_rat(r))
            }
            'D' => {
                self.pos += 1;
                let p = self.pos;
                let k: u32 = match self.digits().and_then(|d| d.parse().ok()) {
                    Some(k) if k >= 1 => k,
                    _ => return self.err(p, "expected a bubble index D<k> with k >= 1"),
                };
                ExprKind::Scalar(Poly::delta(k))
            }
            'c' | 'd' | 's' | 't' | 'x' => {
                self.pos += 1;
                let mut name = c.to_string();
                if self.src[self.pos..].starts_with('\'') {
                    self.pos += 1;
                    name.push('\'');
                }
                if self.src[self.pos..].chars().next().is_some_and(|c| c.is_alphanumeric()) {
                    return self.err(pos, format!("unknown token starting with '{name}'"));
                }
                ExprKind::Gen(Gen::from_name(&name).expect("generator name"))
            }
            other => return self.err(pos, format!("unknown token '{other}'")),
        };
        Ok(Expr { pos, kind })
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.sum()?;
    if p.peek().is_some() {
        return p.err(p.pos, "unexpected trailing input");
    }
    Ok(e)
}

fn type_err<T>(pos: usize, msg: String) -> Result<T, ExprError> {
    Err(ExprError::Type { pos, msg })
}

/// Expands an expression into slice words, checking types.
pub fn elaborate(e: &Expr) -> Result<Combination, ExprError> {
    match &e.kind {
        ExprKind::Gen(g) => {
            let w = SliceWord::new(Word(g.src().to_vec()), vec![Slice::new(0, *g)]).expect("generator types");
            Ok(Combination::single(w, Poly::one()))
        }
        ExprKind::Id(w) => Ok(Combination::single(SliceWord::identity(w), Poly::one())),
        ExprKind::Scalar(c) => Ok(Combination::single(SliceWord::identity(&Word::empty()), c.clone())),
        ExprKind::Neg(a) => Ok(elaborate(a)?.scaled(&Poly::int(-1))),
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
            let (x, y) = (elaborate(a)?, elaborate(b)?);
            if x.src != y.src || x.tgt != y.tgt {
                return type_err(
                    e.pos,
                    format!("cannot add {} -> {} and {} -> {}", x.src, x.tgt, y.src, y.tgt),
                );
            }
            let y = if matches!(e.kind, ExprKind::Sub(..)) { y.scaled(&Poly::int(-1)) } else { y };
            let mut out = x;
            out.terms.extend(y.terms);
            Ok(out)
        }
        ExprKind::Compose(a, b) => {
            let (f, g) = (elaborate(a)?, elaborate(b)?);
            if f.src != g.tgt {
                return type_err(
                    e.pos,
                    format!("cannot compose {} -> {} after {} -> {}", f.src, f.tgt, g.src, g.tgt),
                );
            }
            let mut terms = Vec::new();
            for (fw, fc) in &f.terms {
                for (gw, gc) in &g.terms {
                    terms.push((gw.then(fw), fc * gc));
                }
            }
            Ok(Combination { src: g.src, tgt: f.tgt, terms })
        }
        ExprKind::Tensor(a, b) => {
            let (f, g) = (elaborate(a)?, elaborate(b)?);
            let mut terms = Vec::new();
            for (fw, fc) in &f.terms {
                for (gw, gc) in &g.terms {
                    terms.push((SliceWord::tensor(fw, gw), fc * gc));
                }
            }
            Ok(Combination {
                src: f.src.concat(&g.src),
                tgt: f.tgt.concat(&g.tgt),
                terms,
            })
        }
    }
}

/// Parses and elaborates in one step.
pub fn parse_combination(src: &str) -> Result<Combination, ExprError> {
    elaborate(&parse(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::Engine;
    use crate::diagrams::Morphism;

    fn nf(src: &str) -> Morphism {
        let c = parse_combination(src).unwrap();
        Engine::filtered().normalize_sum(&c.terms, &c.src, &c.tgt).unwrap()
    }

    #[test]
    fn bubble_and_involution() {
        assert_eq!(nf("d' . c"), Morphism::identity(&Word::empty()).scaled(&Poly::delta(1)));
        assert_eq!(nf("s . s"), Morphism::identity(&Word::parse("^^").unwrap()));
    }

    #[test]
    fn affine_relation() {
        assert_eq!(nf("s . (x * 1[^])"), nf("(1[^] * x) . s - 1[^^]"));
    }

    #[test]
    fn precedence() {
        let e = parse("x . x * s").unwrap();
        assert!(matches!(e.kind, ExprKind::Tensor(..)));
        let c = parse_combination("x . x * s").unwrap();
        assert_eq!(c.src, Word::parse("^^^").unwrap());
        let e = parse("s . s . s").unwrap();
        let ExprKind::Compose(lhs, _) = &e.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Compose(..)));
    }

    #[test]
    fn scalars() {
        assert_eq!(nf("3/2 * D2 * x"), Morphism::from_diagram(
            crate::diagrams::NormalDiagram::identity(&Word::parse("^").unwrap()).with_dots(1, 1),
            &Poly::from_rat(crate::scalars::ratio(3, 2)) * &Poly::delta(2),
        ));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_combination("s . c"),
            Err(ExprError::Type { pos: 2, msg: "cannot compose ^^ -> ^^ after 0 -> ^v".into() })
        );
        assert!(matches!(parse("s + q"), Err(ExprError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("(s"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("1[^x]"), Err(ExprError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_combination("s + x"), Err(ExprError::Type { pos: 2, .. })));
    }
}
