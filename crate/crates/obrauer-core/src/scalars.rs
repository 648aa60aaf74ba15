//! Exact coefficient arithmetic.
//!
//! Everything is a sparse multivariate polynomial with rational coefficients
//! over a fixed, globally ordered set of indeterminates. Integers and
//! rationals are just constant polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("polynomial is not monic in u: {0}")]
    NotMonic(String),
    #[error("degree mismatch: f has degree {0}, f' has degree {1}")]
    DegreeMismatch(usize, usize),
    #[error("delta index must be positive")]
    NonPositiveIndex,
    #[error("parameter lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cannot parse scalar `{0}`: {1}")]
    Parse(String, String),
}

/// Indeterminates. The derived order is the global symbol order:
/// bubble parameters, then the m's, then the lambda's, then u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Delta(u32),
    M(u32),
    Lam(u32),
    U,
}

impl Sym {
    pub fn name(&self) -> String {
        match self {
            Sym::Delta(k) => format!("D{k}"),
            Sym::M(k) => format!("m{k}"),
            Sym::Lam(k) => format!("l{k}"),
            Sym::U => "u".to_string(),
        }
    }

    pub fn parse(s: &str) -> Option<Sym> {
        if s == "u" {
            return Some(Sym::U);
        }
        let (head, tail) = if let Some(t) = s.strip_prefix("lambda") {
            ("l", t)
        } else {
            s.split_at(s.find(|c: char| c.is_ascii_digit())?)
        };
        let k: u32 = tail.parse().ok()?;
        if k == 0 {
            return None;
        }
        match head {
            "D" => Some(Sym::Delta(k)),
            "m" => Some(Sym::M(k)),
            "l" => Some(Sym::Lam(k)),
            _ => None,
        }
    }
}

/// A power product, stored as (symbol, exponent) pairs sorted by symbol with
/// positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Sym, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Sym) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Sym, u32)>) -> Self {
        pairs.retain(|p| p.1 > 0);
        pairs.sort();
        let mut out: Vec<(Sym, u32)> = Vec::with_capacity(pairs.len());
        for (s, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(Sym, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn exponent(&self, s: Sym) -> u32 {
        self.0
            .iter()
            .find(|p| p.0 == s)
            .map(|p| p.1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Splits into the part made of symbols satisfying `pred` and the rest.
    pub fn split(&self, pred: impl Fn(Sym) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|p| pred(p.0));
        (Monomial(a), Monomial(b))
    }

    /// Filtered degree of a bubble monomial: each D_k contributes k-1.
    pub fn bubble_degree(&self) -> u32 {
        self.0
            .iter()
            .map(|&(s, e)| match s {
                Sym::Delta(k) => (k - 1) * e,
                _ => 0,
            })
            .sum()
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order on exponent vectors.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self.degree().cmp(&other.degree()) {
            Equal => {}
            o => return o,
        }
        for (x, y) in self.0.iter().zip(other.0.iter()) {
            if x.0 != y.0 {
                // the smaller symbol carries a positive exponent on this side only
                return if x.0 < y.0 { Greater } else { Less };
            }
            match x.1.cmp(&y.1) {
                Equal => {}
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(s, e)| {
                if e == 1 {
                    s.name()
                } else {
                    format!("{}^{}", s.name(), e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial with rational coefficients; no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

pub type Scalar = Poly;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::from_rat(Rat::one())
    }

    pub fn int(n: i64) -> Self {
        Poly::from_rat(rat(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), r);
        p
    }

    pub fn var(s: Sym) -> Self {
        Poly::monomial(Monomial::var(s), Rat::one())
    }

    pub fn delta(k: u32) -> Self {
        Poly::var(Sym::Delta(k))
    }

    pub fn m(k: u32) -> Self {
        Poly::var(Sym::M(k))
    }

    pub fn lam(k: u32) -> Self {
        Poly::var(Sym::Lam(k))
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rat().map(|r| r.is_one()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rat().is_some()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rat) -> Poly {
        let mut out = Poly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.mul(mono), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn symbols(&self) -> Vec<Sym> {
        let mut v: Vec<Sym> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|p| p.0))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn mentions(&self, pred: impl Fn(Sym) -> bool) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|p| pred(p.0)))
    }

    pub fn degree_in(&self, s: Sym) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    /// Substitutes polynomials for the symbols handled by `f`; other symbols stay.
    pub fn substitute(&self, f: &dyn Fn(Sym) -> Option<Poly>) -> Poly {
        let mut cache: BTreeMap<(Sym, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::from_rat(c.clone());
            let mut kept = Vec::new();
            for &(s, e) in &m.0 {
                match f(s) {
                    Some(val) => {
                        let pw = cache.entry((s, e)).or_insert_with(|| val.pow(e)).clone();
                        acc = &acc * &pw;
                    }
                    None => kept.push((s, e)),
                }
            }
            if !kept.is_empty() {
                acc = acc.mul_monomial(&Monomial(kept), &Rat::one());
            }
            out += &acc;
        }
        out
    }

    /// Coefficients in u, lowest power first, as polynomials in the other symbols.
    pub fn coeffs_in_u(&self) -> Vec<Poly> {
        let deg = self.degree_in(Sym::U) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(Sym::U) as usize;
            let (_, rest) = m.split(|s| s == Sym::U);
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Exact division by a nonzero polynomial when it is known to divide.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_rat() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        let (lm_d, lc_d) = d.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((lm, lc)) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = monomial_div(&lm, &lm_d)?;
            let qc = lc / &lc_d;
            rem -= &d.mul_monomial(&qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    pub fn parse(src: &str) -> Result<Poly, ScalarError> {
        PolyParser::new(src).parse_all()
    }
}

fn monomial_div(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    let mut out = Vec::new();
    let mut j = 0;
    for &(s, e) in &a.0 {
        if j < b.0.len() && b.0[j].0 == s {
            if b.0[j].1 > e {
                return None;
            }
            if e > b.0[j].1 {
                out.push((s, e - b.0[j].1));
            }
            j += 1;
        } else if j < b.0.len() && b.0[j].0 < s {
            return None;
        } else {
            out.push((s, e));
        }
    }
    if j < b.0.len() {
        return None;
    }
    Some(Monomial(out))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", fmt_rat(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{}", fmt_rat(&a), m)?;
            }
        }
        Ok(())
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, o: Poly) -> Poly {
        self += &o;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, o: Poly) -> Poly {
        self -= &o;
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::int(n)
    }
}

impl From<Rat> for Poly {
    fn from(r: Rat) -> Self {
        Poly::from_rat(r)
    }
}

struct PolyParser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> PolyParser<'a> {
    fn new(src: &'a str) -> Self {
        PolyParser {
            src,
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse(self.src.to_string(), format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<Poly, ScalarError> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly, ScalarError> {
        let mut neg = false;
        if self.peek() == Some('-') {
            self.pos += 1;
            neg = true;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc += &t;
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc -= &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ScalarError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                Some('/') => {
                    self.pos += 1;
                    let f = self.power()?;
                    let c = f.as_rat().filter(|c| !c.is_zero()).ok_or_else(|| self.err("division by a non-constant or zero"))?;
                    acc = acc.scale(&(Rat::one() / c));
                }
                Some(c) if c.is_ascii_alphanumeric() || c == '(' => {
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ScalarError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ScalarError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n: BigInt = s.parse().map_err(|_| self.err("bad integer"))?;
                Ok(Poly::from_rat(Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                Sym::parse(&s)
                    .map(Poly::var)
                    .ok_or_else(|| self.err(&format!("unknown symbol `{s}`")))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Parses a rational literal such as `3`, `-2/5`.
pub fn parse_rat(s: &str) -> Result<Rat, ScalarError> {
    let p = Poly::parse(s)?;
    p.as_rat()
        .ok_or_else(|| ScalarError::Parse(s.to_string(), "not a constant".into()))
}

/// Truncated expansion c_0 + c_1 u^-1 + ... + c_N u^-N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTrunc {
    pub coeffs: Vec<Poly>,
}

impl SeriesTrunc {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Expansion of num/den where both are monic of the same degree in u,
    /// via den * q = num read off coefficient by coefficient.
    pub fn quotient(num: &MonicPoly, den: &MonicPoly, n: usize) -> Result<SeriesTrunc, ScalarError> {
        if num.degree() != den.degree() {
            return Err(ScalarError::DegreeMismatch(den.degree(), num.degree()));
        }
        let l = den.degree();
        let mut q: Vec<Poly> = Vec::with_capacity(n + 1);
        q.push(Poly::one());
        for k in 1..=n {
            let mut v = if k <= l { num.coeffs[k - 1].clone() } else { Poly::zero() };
            for i in 1..=k.min(l) {
                v -= &(&den.coeffs[i - 1] * &q[k - i]);
            }
            q.push(v);
        }
        Ok(SeriesTrunc { coeffs: q })
    }
}

/// Monic polynomial u^l + a_1 u^(l-1) + ... + a_l, stored as [a_1, ..., a_l].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonicPoly {
    pub coeffs: Vec<Poly>,
}

impl MonicPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn from_roots(roots: &[Poly]) -> MonicPoly {
        // elementary symmetric functions with alternating signs
        let coeffs = (1..=roots.len())
            .map(|j| {
                let e = sym_e(j, roots);
                if j % 2 == 1 {
                    -e
                } else {
                    e
                }
            })
            .collect();
        MonicPoly { coeffs }
    }

    pub fn from_poly(p: &Poly) -> Result<MonicPoly, ScalarError> {
        let cs = p.coeffs_in_u();
        let l = cs.len() - 1;
        if l == 0 || !cs[l].is_one() {
            return Err(ScalarError::NotMonic(p.to_string()));
        }
        Ok(MonicPoly {
            coeffs: (1..=l).map(|i| cs[l - i].clone()).collect(),
        })
    }

    pub fn parse(s: &str) -> Result<MonicPoly, ScalarError> {
        MonicPoly::from_poly(&Poly::parse(s)?)
    }

    pub fn to_poly(&self) -> Poly {
        let l = self.degree() as u32;
        let mut p = Poly::var(Sym::U).pow(l);
        for (i, a) in self.coeffs.iter().enumerate() {
            p += &(a * &Poly::var(Sym::U).pow(l - 1 - i as u32));
        }
        p
    }

    /// Coefficient list [1, a_1, ..., a_l].
    pub fn full(&self) -> Vec<Poly> {
        std::iter::once(Poly::one()).chain(self.coeffs.iter().cloned()).collect()
    }
}

/// Elementary symmetric polynomial e_j.
pub fn sym_e(j: usize, vars: &[Poly]) -> Poly {
    let mut e = vec![Poly::zero(); j + 1];
    e[0] = Poly::one();
    for v in vars {
        for k in (1..=j).rev() {
            let add = &e[k - 1] * v;
            e[k] += &add;
        }
    }
    e.pop().unwrap()
}

/// Complete homogeneous symmetric polynomial h_i.
pub fn sym_h(i: usize, vars: &[Poly]) -> Poly {
    let mut h = vec![Poly::zero(); i + 1];
    h[0] = Poly::one();
    for v in vars {
        for k in 1..=i {
            let add = &h[k - 1] * v;
            h[k] += &add;
        }
    }
    h.pop().unwrap()
}

/// delta_1..delta_N from the expansion of f'(u)/f(u).
pub fn deltas_from_pair(f: &MonicPoly, fprime: &MonicPoly, n: usize) -> Result<Vec<Poly>, ScalarError> {
    let s = SeriesTrunc::quotient(fprime, f, n)?;
    Ok(s.coeffs[1..].to_vec())
}

/// Closed form delta_k = sum over i+j=k of h_i(m) e_j(lam - m).
pub fn delta_explicit(m: &[Poly], lam: &[Poly], k: usize) -> Result<Poly, ScalarError> {
    if k == 0 {
        return Err(ScalarError::NonPositiveIndex);
    }
    if m.len() != lam.len() {
        return Err(ScalarError::LengthMismatch(m.len(), lam.len()));
    }
    let diffs: Vec<Poly> = lam.iter().zip(m).map(|(l, mm)| l - mm).collect();
    let mut acc = Poly::zero();
    for i in 0..=k {
        let t = &sym_h(i, m) * &sym_e(k - i, &diffs);
        acc += &t;
    }
    Ok(acc)
}

/// The f and f' attached to parameters m and lambda:
/// f = prod (u - m_i), f' = prod (u + lambda_i - m_i).
pub fn pyramid_polys(m: &[Poly], lam: &[Poly]) -> (MonicPoly, MonicPoly) {
    let f = MonicPoly::from_roots(m);
    let roots: Vec<Poly> = lam.iter().zip(m).map(|(l, mm)| mm - l).collect();
    (f, MonicPoly::from_roots(&roots))
}

/// Counterclockwise parameters from clockwise ones:
/// D'_k = D_k - sum_{i<k} D_i D'_{k-i}.
pub fn delta_prime_from_delta(deltas: &[Poly], n: usize) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut v = deltas[k - 1].clone();
        for i in 1..k {
            v -= &(&deltas[i - 1] * &out[k - i - 1]);
        }
        out.push(v);
    }
    out
}

pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Poly {
        Poly::var(Sym::M(1))
    }
    fn b() -> Poly {
        Poly::var(Sym::M(2))
    }

    #[test]
    fn elementary_basics() {
        assert_eq!(sym_e(0, &[a(), b()]), Poly::one());
        assert_eq!(sym_e(2, &[a()]), Poly::zero());
        let d = &Poly::lam(1) - &Poly::m(1);
        assert_eq!(sym_e(1, std::slice::from_ref(&d)), d);
    }

    #[test]
    fn complete_basics() {
        assert_eq!(sym_h(0, &[a(), b(), Poly::m(3)]), Poly::one());
        assert_eq!(sym_h(2, &[a()]), a().pow(2));
        assert_eq!(sym_h(1, &[a(), b()]), &a() + &b());
        // h_2(a,b) = a^2 + ab + b^2
        let expect = &(&a().pow(2) + &(&a() * &b())) + &b().pow(2);
        assert_eq!(sym_h(2, &[a(), b()]), expect);
    }

    #[test]
    fn level_one_series() {
        let m = Poly::m(1);
        let l = Poly::lam(1);
        let f = MonicPoly { coeffs: vec![-&m] };
        let fp = MonicPoly { coeffs: vec![&l - &m] };
        let ds = deltas_from_pair(&f, &fp, 3).unwrap();
        assert_eq!(ds[0], l);
        assert_eq!(ds[1], &l * &m);
        assert_eq!(ds[2], &l * &m.pow(2));
        let fp3 = MonicPoly { coeffs: vec![&Poly::int(3) - &m] };
        assert_eq!(deltas_from_pair(&f, &fp3, 2).unwrap()[1], &Poly::int(3) * &m);
    }

    #[test]
    fn equal_pair_gives_zero() {
        let f = MonicPoly::parse("u^2 - 3u + 7").unwrap();
        assert!(deltas_from_pair(&f, &f, 5).unwrap().iter().all(|d| d.is_zero()));
    }

    #[test]
    fn mismatched_degrees_rejected() {
        let f = MonicPoly::parse("u^2 - 1").unwrap();
        let g = MonicPoly::parse("u - 1").unwrap();
        assert!(deltas_from_pair(&f, &g, 3).is_err());
        assert!(MonicPoly::parse("2u^2").is_err());
    }

    #[test]
    fn explicit_deltas() {
        let m = [Poly::m(1), Poly::m(2), Poly::m(3)];
        let l = [Poly::int(2), Poly::int(3), Poly::int(4)];
        assert_eq!(delta_explicit(&m, &l, 1).unwrap(), Poly::int(9));
        let m1 = [Poly::m(1)];
        let l1 = [Poly::lam(1)];
        assert_eq!(delta_explicit(&m1, &l1, 2).unwrap(), &Poly::m(1) * &Poly::lam(1));
        assert_eq!(
            delta_explicit(&m1, &[Poly::int(3)], 2).unwrap(),
            &Poly::int(3) * &Poly::m(1)
        );
        assert!(delta_explicit(&m1, &l1, 0).is_err());
    }

    #[test]
    fn primes_from_deltas() {
        let ds: Vec<Poly> = (1..=3).map(Poly::delta).collect();
        let p = delta_prime_from_delta(&ds, 3);
        assert_eq!(p[0], Poly::delta(1));
        assert_eq!(p[1], &Poly::delta(2) - &Poly::delta(1).pow(2));
        assert!(delta_prime_from_delta(&[Poly::zero(), Poly::zero()], 2)
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn graded_lex_order() {
        let d1 = Monomial::var(Sym::Delta(1));
        let m1 = Monomial::var(Sym::M(1));
        let d1sq = Monomial::from_pairs(vec![(Sym::Delta(1), 2)]);
        assert!(d1 > m1);
        assert!(d1sq > d1);
        assert!(Monomial::one() < m1);
    }

    #[test]
    fn parse_and_display() {
        let p = Poly::parse("u^2 - 1").unwrap();
        assert_eq!(p.to_string(), "u^2 - 1");
        let q = Poly::parse("(D1 + 2)*(D1 - 2) + 1/2").unwrap();
        assert_eq!(q, &Poly::delta(1).pow(2) - &Poly::from_rat(ratio(7, 2)));
        assert_eq!(Poly::parse("3m1").unwrap(), &Poly::int(3) * &Poly::m(1));
    }

    #[test]
    fn exact_division() {
        let x = Poly::m(1);
        let y = Poly::m(2);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.div_exact(&(&x + &y)).unwrap(), &x - &y);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn small_rat() -> impl Strategy<Value = Poly> {
            (-9i64..10, 1i64..4).prop_map(|(n, d)| Poly::from_rat(ratio(n, d)))
        }

        proptest! {
            #[test]
            fn series_matches_closed_form(
                ms in proptest::collection::vec(small_rat(), 1..=3),
                ls in proptest::collection::vec(small_rat(), 3),
                n in 1usize..=6,
            ) {
                let ls = &ls[..ms.len()];
                let (f, fp) = pyramid_polys(&ms, ls);
                let ds = deltas_from_pair(&f, &fp, n).unwrap();
                for k in 1..=n {
                    prop_assert_eq!(&ds[k - 1], &delta_explicit(&ms, ls, k).unwrap());
                }
            }

            #[test]
            fn newton_identity(vars in proptest::collection::vec(small_rat(), 0..4), k in 1usize..6) {
                let mut acc = Poly::zero();
                for j in 0..=k {
                    let t = &sym_h(k - j, &vars) * &sym_e(j, &vars);
                    if j % 2 == 0 { acc += &t } else { acc -= &t }
                }
                prop_assert!(acc.is_zero());
            }

            #[test]
            fn prime_map_is_involutive_up_to_sign(ds in proptest::collection::vec(small_rat(), 1..6)) {
                let n = ds.len();
                let neg = |v: Vec<Poly>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
                let once = neg(delta_prime_from_delta(&ds, n));
                let twice = neg(delta_prime_from_delta(&once, n));
                prop_assert_eq!(twice, ds);
            }

            #[test]
            fn parse_display_roundtrip(ms in proptest::collection::vec(small_rat(), 1..=3)) {
                let p = MonicPoly::from_roots(&ms).to_poly();
                prop_assert_eq!(Poly::parse(&p.to_string()).unwrap(), p);
            }
        }
    }
}
