//! Exact matrix representations built from pyramids, and exact rank.
//!
//! Vectors are sparse maps from basis indices to coefficients. The basis of
//! `V(a)` is the set of index tuples in row-major order (first tensor factor
//! most significant).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagrams::{to_slices, Dir, Gen, Morphism, Slice, SliceWord, Word};
use crate::scalars::{delta_explicit, Monomial, Poly, Rat, Sym};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("pyramid must be a nonempty unimodular sequence of positive integers, got {0:?}")]
    NotUnimodular(Vec<u32>),
    #[error("expected {expected} parameters m, got {found}")]
    ParamCount { expected: usize, found: usize },
    #[error("this representation does not accept dotted morphisms")]
    Dotted,
    #[error("modified transposition needs an up letter at position {0}")]
    NotUp(usize),
    #[error("position out of range")]
    OutOfRange,
    #[error("cannot evaluate bubble parameter {0}")]
    Bubble(String),
    #[error("matrix shapes do not match")]
    Shape,
    #[error("ill-typed slice word: {0}")]
    Diagram(#[from] crate::diagrams::DiagramError),
}

/// Column heights with boxes numbered along rows from the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pyramid {
    lambda: Vec<u32>,
    col: Vec<usize>,
    leftmost: Vec<bool>,
    row: Vec<usize>,
}

impl Pyramid {
    pub fn new(lambda: &[u32]) -> Result<Pyramid, RepError> {
        if lambda.is_empty() || lambda.contains(&0) {
            return Err(RepError::NotUnimodular(lambda.to_vec()));
        }
        let peak = lambda
            .iter()
            .enumerate()
            .max_by_key(|&(i, v)| (v, std::cmp::Reverse(i)))
            .map(|p| p.0)
            .unwrap();
        let ok = lambda[..=peak].windows(2).all(|w| w[0] <= w[1])
            && lambda[peak..].windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(RepError::NotUnimodular(lambda.to_vec()));
        }
        let h = lambda[peak];
        let (mut col, mut leftmost, mut row) = (Vec::new(), Vec::new(), Vec::new());
        for (r, level) in (1..=h).rev().enumerate() {
            let mut first = true;
            for (j, &l) in lambda.iter().enumerate() {
                if l >= level {
                    col.push(j + 1);
                    leftmost.push(first);
                    row.push(r);
                    first = false;
                }
            }
        }
        Ok(Pyramid {
            lambda: lambda.to_vec(),
            col,
            leftmost,
            row,
        })
    }

    pub fn lambda(&self) -> &[u32] {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.col.len()
    }

    pub fn ell(&self) -> usize {
        self.lambda.len()
    }

    /// Column of box `i` (both 1-based).
    pub fn col(&self, i: usize) -> usize {
        self.col[i - 1]
    }

    /// Row of box `i`, counted from the top starting at 0.
    pub fn row_of(&self, i: usize) -> usize {
        self.row[i - 1]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 1..=self.n() {
            let r = self.row_of(i);
            if out.len() <= r {
                out.push(Vec::new());
            }
            out[r].push(i);
        }
        out
    }

    /// Bubble parameters for the given m: delta_k from the closed form.
    pub fn deltas(&self, m: &[Poly], upto: usize) -> Result<Vec<Poly>, RepError> {
        let lam: Vec<Poly> = self.lambda.iter().map(|&l| Poly::int(l as i64)).collect();
        if m.len() != lam.len() {
            return Err(RepError::ParamCount {
                expected: lam.len(),
                found: m.len(),
            });
        }
        Ok((1..=upto)
            .map(|k| delta_explicit(m, &lam, k).expect("lengths checked"))
            .collect())
    }
}

pub type SparseVec = BTreeMap<usize, Poly>;

fn add_to(v: &mut SparseVec, i: usize, c: &Poly) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(i).or_default();
    *e += c;
    if e.is_zero() {
        v.remove(&i);
    }
}

/// A matrix stored as sparse columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> ExactMatrix {
        ExactMatrix {
            rows,
            cols: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> ExactMatrix {
        ExactMatrix {
            rows: n,
            cols: (0..n).map(|i| SparseVec::from([(i, Poly::one())])).collect(),
        }
    }

    pub fn from_dense(rows: Vec<Vec<Poly>>) -> ExactMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = ExactMatrix::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                add_to(&mut m.cols[j], i, &v);
            }
        }
        m
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Poly {
        self.cols[j].get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v {
            for (i, a) in &self.cols[*j] {
                add_to(&mut out, *i, &(a * c));
            }
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &ExactMatrix, c: &Poly) {
        for (mine, theirs) in self.cols.iter_mut().zip(&other.cols) {
            for (i, v) in theirs {
                add_to(mine, *i, &(v * c));
            }
        }
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        let mut m = self.clone();
        m.add_scaled(other, &Poly::int(-1));
        m
    }

    pub fn scale(&self, c: &Poly) -> ExactMatrix {
        let mut m = ExactMatrix::zero(self.rows, self.ncols());
        m.add_scaled(self, c);
        m
    }

    /// Kronecker product with `self` as the left tensor factor.
    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        let mut m = ExactMatrix::zero(self.rows * other.rows, self.ncols() * other.ncols());
        for (j1, c1) in self.cols.iter().enumerate() {
            for (j2, c2) in other.cols.iter().enumerate() {
                let col = &mut m.cols[j1 * other.ncols() + j2];
                for (i1, a) in c1 {
                    for (i2, b) in c2 {
                        add_to(col, i1 * other.rows + i2, &(a * b));
                    }
                }
            }
        }
        m
    }

    /// All entries, column by column, as one long vector.
    pub fn vectorize(&self) -> SparseVec {
        let mut v = SparseVec::new();
        for (j, c) in self.cols.iter().enumerate() {
            for (i, a) in c {
                v.insert(j * self.rows + i, a.clone());
            }
        }
        v
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> ExactMatrix {
        let mut m = ExactMatrix::zero(self.rows, self.ncols());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, a) in c {
                add_to(&mut m.cols[j], *i, &f(a));
            }
        }
        m
    }
}

/// Which functor to realize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepKind {
    /// The undotted tensor functor.
    Psi,
    /// The filtered functor with the deformed dot action.
    PsiLambda,
    /// The graded functor sending a dot to the nilpotent e.
    PhiLambda,
}

/// A representation on tensor spaces over a pyramid.
#[derive(Debug, Clone)]
pub struct Rep {
    pub pyramid: Pyramid,
    pub m: Vec<Poly>,
    pub kind: RepKind,
}

fn decode(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for p in (0..k).rev() {
        t[p] = idx % n;
        idx /= n;
    }
    t
}

fn encode(t: &[usize], n: usize) -> usize {
    t.iter().fold(0, |acc, &i| acc * n + i)
}

impl Rep {
    pub fn new(pyramid: Pyramid, m: Vec<Poly>, kind: RepKind) -> Result<Rep, RepError> {
        if m.len() != pyramid.ell() {
            return Err(RepError::ParamCount {
                expected: pyramid.ell(),
                found: m.len(),
            });
        }
        Ok(Rep { pyramid, m, kind })
    }

    /// Filtered representation with symbolic parameters m_1..m_l.
    pub fn symbolic(lambda: &[u32]) -> Result<Rep, RepError> {
        let p = Pyramid::new(lambda)?;
        let m = (1..=p.ell() as u32).map(Poly::m).collect();
        Rep::new(p, m, RepKind::PsiLambda)
    }

    pub fn psi(n: usize) -> Rep {
        let p = Pyramid::new(&[n as u32]).expect("single column");
        Rep {
            pyramid: p,
            m: vec![Poly::zero()],
            kind: RepKind::Psi,
        }
    }

    pub fn phi(lambda: &[u32]) -> Result<Rep, RepError> {
        let p = Pyramid::new(lambda)?;
        let m = vec![Poly::zero(); p.ell()];
        Rep::new(p, m, RepKind::PhiLambda)
    }

    pub fn n(&self) -> usize {
        self.pyramid.n()
    }

    pub fn dim(&self, a: &Word) -> usize {
        self.n().pow(a.len() as u32)
    }

    /// Value of the bubble parameter D_k.
    pub fn bubble(&self, k: u32) -> Result<Poly, RepError> {
        match self.kind {
            RepKind::PsiLambda => Ok(self.pyramid.deltas(&self.m, k as usize)?.pop().unwrap()),
            RepKind::PhiLambda | RepKind::Psi => {
                if k == 1 {
                    Ok(Poly::int(self.n() as i64))
                } else if self.kind == RepKind::PhiLambda {
                    Ok(Poly::zero())
                } else {
                    Err(RepError::Dotted)
                }
            }
        }
    }

    /// Substitutes bubble parameters in a coefficient.
    pub fn eval_scalar(&self, c: &Poly) -> Result<Poly, RepError> {
        let mut vals: BTreeMap<u32, Poly> = BTreeMap::new();
        for s in c.symbols() {
            if let Sym::Delta(k) = s {
                vals.insert(k, self.bubble(k)?);
            }
        }
        Ok(c.substitute(&|s| match s {
            Sym::Delta(k) => vals.get(&k).cloned(),
            _ => None,
        }))
    }

    /// The signed transposition `(p,q)^a` applied to a basis tuple (0-based p, q).
    fn transposition(&self, a: &Word, p: usize, q: usize, j: &[usize]) -> Vec<(Vec<usize>, i64)> {
        if a.get(p) == a.get(q) {
            let mut i = j.to_vec();
            i.swap(p, q);
            vec![(i, 1)]
        } else if j[p] == j[q] {
            (0..self.n())
                .map(|k| {
                    let mut i = j.to_vec();
                    i[p] = k;
                    i[q] = k;
                    (i, -1)
                })
                .collect()
        } else {
            Vec::new()
        }
    }

    /// The modified transposition `(p,q)^a_lambda` on a basis tuple.
    fn mod_transposition(&self, a: &Word, p: usize, q: usize, j: &[usize]) -> Vec<(Vec<usize>, i64)> {
        let col = |b: usize| self.pyramid.col[b];
        self.transposition(a, p, q, j)
            .into_iter()
            .filter_map(|(i, beta)| {
                if p > q && col(i[p]) >= col(j[p]) {
                    Some((i, beta))
                } else if p < q && col(i[p]) < col(j[p]) {
                    Some((i, -beta))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Matrix of `(p,q)^a_lambda` (1-based positions).
    pub fn mod_transposition_matrix(&self, a: &Word, p: usize, q: usize) -> Result<ExactMatrix, RepError> {
        if p == 0 || q == 0 || p > a.len() || q > a.len() || p == q {
            return Err(RepError::OutOfRange);
        }
        if a.get(p - 1) != Dir::Up {
            return Err(RepError::NotUp(p));
        }
        let n = self.n();
        let dim = self.dim(a);
        let mut m = ExactMatrix::zero(dim, dim);
        for col in 0..dim {
            let j = decode(col, n, a.len());
            for (i, c) in self.mod_transposition(a, p - 1, q - 1, &j) {
                add_to(&mut m.cols[col], encode(&i, n), &Poly::int(c));
            }
        }
        Ok(m)
    }

    /// The nilpotent shift applied at position p of a tuple.
    fn shift(&self, j: &[usize], p: usize) -> Option<Vec<usize>> {
        if self.pyramid.leftmost[j[p]] {
            None
        } else {
            let mut i = j.to_vec();
            i[p] -= 1;
            Some(i)
        }
    }

    /// Dot on the up strand at position p of `a`, applied to a basis tuple.
    fn dot_up(&self, a: &Word, p: usize, j: &[usize]) -> Vec<(Vec<usize>, Poly)> {
        let mut out = Vec::new();
        if let Some(i) = self.shift(j, p) {
            out.push((i, Poly::one()));
        }
        match self.kind {
            RepKind::PhiLambda => {}
            RepKind::Psi => unreachable!("dots rejected earlier"),
            RepKind::PsiLambda => {
                out.push((j.to_vec(), self.m[self.pyramid.col[j[p]] - 1].clone()));
                for q in 0..a.len() {
                    if q != p {
                        for (i, c) in self.mod_transposition(a, p, q, j) {
                            out.push((i, Poly::int(c)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Applies one slice to a vector in `V(word)`.
    pub fn apply_slice(&self, word: &Word, s: Slice, v: &SparseVec) -> Result<SparseVec, RepError> {
        let n = self.n();
        let k = word.len();
        let p = s.pos;
        if s.gen.is_dot() && self.kind == RepKind::Psi {
            return Err(RepError::Dotted);
        }
        if s.gen == Gen::XRev {
            // zigzag: cup to the right, dot on its up strand, cap on the left
            let w1 = Slice::new(p + 1, Gen::Cup).apply(word).ok_or(RepError::Shape)?;
            let v1 = self.apply_slice(word, Slice::new(p + 1, Gen::Cup), v)?;
            let v2 = self.apply_slice(&w1, Slice::new(p + 1, Gen::X), &v1)?;
            return self.apply_slice(&w1, Slice::new(p, Gen::Cap), &v2);
        }
        let mut out = SparseVec::new();
        for (idx, c) in v {
            let j = decode(*idx, n, k);
            match s.gen {
                Gen::Cup | Gen::CupRev => {
                    for b in 0..n {
                        let mut i = j[..p].to_vec();
                        i.push(b);
                        i.push(b);
                        i.extend_from_slice(&j[p..]);
                        add_to(&mut out, encode(&i, n), c);
                    }
                }
                Gen::Cap | Gen::CapRev => {
                    if j[p] == j[p + 1] {
                        let mut i = j[..p].to_vec();
                        i.extend_from_slice(&j[p + 2..]);
                        add_to(&mut out, encode(&i, n), c);
                    }
                }
                Gen::S | Gen::SRev | Gen::T | Gen::TRev => {
                    let mut i = j.clone();
                    i.swap(p, p + 1);
                    add_to(&mut out, encode(&i, n), c);
                }
                Gen::X => {
                    for (i, a) in self.dot_up(word, p, &j) {
                        add_to(&mut out, encode(&i, n), &(&a * c));
                    }
                }
                Gen::XRev => unreachable!(),
            }
        }
        Ok(out)
    }

    /// Applies a slice word to a vector.
    pub fn apply_word(&self, sw: &SliceWord, v: &SparseVec) -> Result<SparseVec, RepError> {
        let words = sw.words()?;
        let mut cur = v.clone();
        for (i, s) in sw.slices.iter().enumerate() {
            cur = self.apply_slice(&words[i], *s, &cur)?;
        }
        Ok(cur)
    }

    /// Matrix of a slice word, applied slice by slice.
    pub fn eval_slices(&self, sw: &SliceWord) -> Result<ExactMatrix, RepError> {
        let words = sw.words()?;
        let dim_in = self.dim(&sw.src);
        let dim_out = self.dim(words.last().unwrap());
        let mut cols = Vec::with_capacity(dim_in);
        for j in 0..dim_in {
            let mut cur = SparseVec::from([(j, Poly::one())]);
            for (i, s) in sw.slices.iter().enumerate() {
                cur = self.apply_slice(&words[i], *s, &cur)?;
            }
            cols.push(cur);
        }
        Ok(ExactMatrix { rows: dim_out, cols })
    }

    /// Matrix of a linear combination of slice words.
    pub fn eval_combination(&self, terms: &[(SliceWord, Poly)], src: &Word, tgt: &Word) -> Result<ExactMatrix, RepError> {
        let mut m = ExactMatrix::zero(self.dim(tgt), self.dim(src));
        for (sw, c) in terms {
            let c = self.eval_scalar(c)?;
            if !c.is_zero() {
                m.add_scaled(&self.eval_slices(sw)?, &c);
            }
        }
        Ok(m)
    }

    /// Matrix of a morphism in normal form.
    pub fn eval_morphism(&self, f: &Morphism) -> Result<ExactMatrix, RepError> {
        let mut m = ExactMatrix::zero(self.dim(&f.tgt), self.dim(&f.src));
        for (d, c) in &f.terms {
            let c = self.eval_scalar(c)?;
            if !c.is_zero() {
                m.add_scaled(&self.eval_slices(&to_slices(d, &Monomial::one()))?, &c);
            }
        }
        Ok(m)
    }
}

/// Rank of a list of vectors with rational entries.
pub fn rank_rational(vectors: &[SparseVec]) -> usize {
    let mut rows: Vec<BTreeMap<usize, Rat>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|(i, c)| (*i, c.as_rat().expect("rational entries")))
                .filter(|(_, c)| !c.is_zero())
                .collect()
        })
        .collect();
    let mut rank = 0;
    let mut pivots: Vec<(usize, BTreeMap<usize, Rat>)> = Vec::new();
    for row in rows.iter_mut() {
        for (pc, prow) in &pivots {
            if let Some(f) = row.get(pc).cloned() {
                for (i, v) in prow {
                    let e = row.entry(*i).or_insert_with(Rat::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        row.remove(i);
                    }
                }
            }
        }
        if let Some((&pc, pv)) = row.iter().next() {
            let inv = Rat::one() / pv;
            let normalized: BTreeMap<usize, Rat> = row.iter().map(|(i, v)| (*i, v * &inv)).collect();
            pivots.push((pc, normalized));
            rank += 1;
        }
    }
    rank
}

/// Rank over the fraction field by fraction-free elimination.
pub fn rank_bareiss(vectors: &[SparseVec]) -> usize {
    let mut rows: Vec<SparseVec> = vectors.iter().filter(|v| !v.is_empty()).cloned().collect();
    let mut prev = Poly::one();
    let mut rank = 0;
    while !rows.is_empty() {
        // choose the pivot with the smallest column, preferring short entries
        let (ri, col) = {
            let min_col = rows.iter().filter_map(|r| r.keys().next().copied()).min();
            let Some(c) = min_col else { break };
            let ri = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.keys().next() == Some(&c))
                .min_by_key(|(_, r)| r[&c].len())
                .unwrap()
                .0;
            (ri, c)
        };
        let prow = rows.swap_remove(ri);
        let pv = prow[&col].clone();
        rank += 1;
        let mut next = Vec::with_capacity(rows.len());
        for r in rows {
            let f = r.get(&col).cloned().unwrap_or_default();
            let mut nr = SparseVec::new();
            let keys: std::collections::BTreeSet<usize> = r.keys().chain(prow.keys()).copied().collect();
            for k in keys {
                if k == col {
                    continue;
                }
                let a = r.get(&k).cloned().unwrap_or_default();
                let b = prow.get(&k).cloned().unwrap_or_default();
                let num = &(&pv * &a) - &(&f * &b);
                if !num.is_zero() {
                    let q = num.div_exact(&prev).expect("fraction-free step divides exactly");
                    nr.insert(k, q);
                }
            }
            if !nr.is_empty() {
                next.push(nr);
            }
        }
        rows = next;
        prev = pv;
    }
    rank
}

/// Generic rank by evaluation at random rational points: the maximum over
/// `points` independent draws. Equal to the generic rank whenever it reaches
/// the number of vectors.
pub fn rank_by_evaluation(vectors: &[SparseVec], seed: u64, points: usize) -> usize {
    let mut syms: Vec<Sym> = vectors.iter().flat_map(|v| v.values().flat_map(|p| p.symbols())).collect();
    syms.sort();
    syms.dedup();
    if syms.is_empty() {
        return rank_rational(vectors);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..points.max(1) {
        let vals: BTreeMap<Sym, Poly> = syms
            .iter()
            .map(|&s| {
                let num: i64 = rng.gen_range(-1000..=1000);
                let den: i64 = rng.gen_range(1..=97);
                (s, Poly::from_rat(crate::scalars::ratio(num, den)))
            })
            .collect();
        let evald: Vec<SparseVec> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|(i, p)| (*i, p.substitute(&|s| vals.get(&s).cloned())))
                    .filter(|(_, p)| !p.is_zero())
                    .collect()
            })
            .collect();
        best = best.max(rank_rational(&evald));
        if best == vectors.len() {
            break;
        }
    }
    best
}

/// Exact rank: rationals by elimination, polynomials by fraction-free
/// elimination over the fraction field.
pub fn matrix_rank(m: &ExactMatrix) -> usize {
    let symbolic = m.cols.iter().any(|c| c.values().any(|p| !p.is_constant()));
    if symbolic {
        rank_bareiss(&m.cols)
    } else {
        rank_rational(&m.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::Word;
    use crate::scalars::sym_h;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn worked() -> Pyramid {
        Pyramid::new(&[2, 3, 2, 1, 1]).unwrap()
    }

    fn unit(t: &[usize], n: usize) -> SparseVec {
        SparseVec::from([(encode(t, n), Poly::one())])
    }

    #[test]
    fn pyramid_numbering() {
        let p = worked();
        assert_eq!(p.n(), 9);
        assert_eq!(p.col(6), 2);
        assert_eq!(p.col(1), 2);
        assert_eq!(p.rows(), vec![vec![1], vec![2, 3, 4], vec![5, 6, 7, 8, 9]]);
        let one = Pyramid::new(&[1]).unwrap();
        assert_eq!((one.n(), one.col(1)), (1, 1));
        assert!(Pyramid::new(&[2, 1, 2]).is_err());
        assert!(Pyramid::new(&[]).is_err());
    }

    #[test]
    fn worked_modified_transpositions() {
        let rep = Rep::symbolic(&[2, 3, 2, 1, 1]).unwrap();
        let a = w("^^vv");
        let n = 9;
        let v = unit(&[6, 5, 4, 5], n);
        let m12 = rep.mod_transposition_matrix(&a, 1, 2).unwrap();
        let mut expect = SparseVec::new();
        expect.insert(encode(&[5, 6, 4, 5], n), Poly::int(-1));
        assert_eq!(m12.apply(&v), expect);
        let m24 = rep.mod_transposition_matrix(&a, 2, 4).unwrap();
        let mut expect = SparseVec::new();
        expect.insert(encode(&[6, 1, 4, 1], n), Poly::one());
        expect.insert(encode(&[6, 4, 4, 4], n), Poly::one());
        assert_eq!(m24.apply(&v), expect);
        assert!(rep.mod_transposition_matrix(&a, 3, 1).is_err());
    }

    #[test]
    fn plain_transpositions() {
        let rep = Rep::psi(3);
        let a = w("^^vv");
        let sw = SliceWord::new(a.clone(), vec![Slice::new(0, Gen::S)]).unwrap();
        let m = rep.eval_slices(&sw).unwrap();
        assert_eq!(m.apply(&unit(&[0, 1, 2, 2], 3)), unit(&[1, 0, 2, 2], 3));
    }

    #[test]
    fn single_column_modified() {
        let rep = Rep::new(Pyramid::new(&[3]).unwrap(), vec![Poly::m(1)], RepKind::PsiLambda).unwrap();
        let a = w("^^v");
        let n = 3;
        for (p, q) in [(2, 1), (1, 2), (1, 3)] {
            let m = rep.mod_transposition_matrix(&a, p, q).unwrap();
            for col in 0..27 {
                let j = decode(col, n, 3);
                let mut plain = SparseVec::new();
                for (i, c) in rep.transposition(&a, p - 1, q - 1, &j) {
                    add_to(&mut plain, encode(&i, n), &Poly::int(c));
                }
                if p > q {
                    assert_eq!(m.cols[col], plain);
                } else {
                    assert!(m.cols[col].is_empty());
                }
            }
        }
    }

    #[test]
    fn dot_on_two_boxes() {
        let rep = Rep::symbolic(&[1, 1]).unwrap();
        let sw = SliceWord::new(w("^"), vec![Slice::new(0, Gen::X)]).unwrap();
        let m = rep.eval_slices(&sw).unwrap();
        let expect = ExactMatrix::from_dense(vec![
            vec![Poly::m(1), Poly::one()],
            vec![Poly::zero(), Poly::m(2)],
        ]);
        assert_eq!(m, expect);
    }

    #[test]
    fn ranks() {
        assert_eq!(matrix_rank(&ExactMatrix::identity(2)), 2);
        assert_eq!(matrix_rank(&ExactMatrix::zero(3, 3)), 0);
        let x = ExactMatrix::from_dense(vec![
            vec![Poly::m(1), Poly::one()],
            vec![Poly::zero(), Poly::m(2)],
        ]);
        let stack = vec![ExactMatrix::identity(2).vectorize(), x.vectorize()];
        assert_eq!(rank_bareiss(&stack), 2);
        assert_eq!(rank_by_evaluation(&stack, 1, 2), 2);
        let dependent = vec![x.vectorize(), x.scale(&Poly::m(1)).vectorize()];
        assert_eq!(rank_bareiss(&dependent), 1);
    }

    #[test]
    fn bubble_values() {
        let rep = Rep::symbolic(&[2, 3, 2, 1, 1]).unwrap();
        assert_eq!(rep.bubble(1).unwrap(), Poly::int(9));
        let one = Rep::new(Pyramid::new(&[3]).unwrap(), vec![Poly::m(1)], RepKind::PsiLambda).unwrap();
        assert_eq!(one.bubble(3).unwrap(), &Poly::int(3) * &Poly::m(1).pow(2));
        let _ = sym_h(0, &[]);
    }

    #[test]
    fn nilpotent_shift() {
        let rep = Rep::phi(&[2, 3, 2, 1, 1]).unwrap();
        let sw = SliceWord::new(w("^"), vec![Slice::new(0, Gen::X); 5]).unwrap();
        assert!(rep.eval_slices(&sw).unwrap().is_zero());
        let sw2 = SliceWord::new(w("^"), vec![Slice::new(0, Gen::X); 4]).unwrap();
        assert!(!rep.eval_slices(&sw2).unwrap().is_zero());
    }
}
