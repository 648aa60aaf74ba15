//! Specializations and quotient categories, Jucys-Murphy morphisms, the
//! level one functor and duality transports.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagrams::{
    compose_matchings, enumerate_normal_basis, to_slices, BasisBounds, DiagramError, Dir, Gen, Matching, Morphism,
    NormalDiagram, Side, Slice, SliceWord, Word,
};
use crate::rewrite::{Engine, Grading, RewriteError};
use crate::scalars::{MonicPoly, Monomial, Poly, Sym};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("no value given for bubble parameter D{0}")]
    Uncovered(u32),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("source does not factor as {expected}: {found}")]
    Factorization { expected: String, found: Word },
}

/// Values for the bubble parameters. Indices above `values.len()` are
/// rejected unless a cyclotomic polynomial is supplied, in which case they
/// follow its recursion.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecializationMap {
    pub values: Vec<Poly>,
    pub cyclotomic: Option<MonicPoly>,
}

impl SpecializationMap {
    pub fn new(values: Vec<Poly>) -> SpecializationMap {
        SpecializationMap {
            values,
            cyclotomic: None,
        }
    }

    /// Value of `D_k`, or `None` if uncovered.
    pub fn value(&self, k: u32) -> Option<Poly> {
        let k = k as usize;
        if k >= 1 && k <= self.values.len() {
            return Some(self.values[k - 1].clone());
        }
        let f = self.cyclotomic.as_ref()?;
        let l = f.degree();
        if k == 0 || self.values.len() < l {
            return None;
        }
        let mut vals = self.values[..l].to_vec();
        while vals.len() < k {
            let j = vals.len() + 1;
            let mut next = Poly::zero();
            for (i, a) in f.coeffs.iter().enumerate() {
                next -= &(a * &vals[j - (i + 1) - 1]);
            }
            vals.push(next);
        }
        Some(vals[k - 1].clone())
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly, QuotientError> {
        for s in p.symbols() {
            if let Sym::Delta(k) = s {
                if self.value(k).is_none() {
                    return Err(QuotientError::Uncovered(k));
                }
            }
        }
        Ok(p.substitute(&|s| match s {
            Sym::Delta(k) => self.value(k),
            _ => None,
        }))
    }
}

/// Evaluates every bubble parameter.
pub fn specialize(m: &Morphism, s: &SpecializationMap) -> Result<Morphism, QuotientError> {
    let mut out = Morphism::zero(&m.src, &m.tgt);
    for (d, c) in &m.terms {
        out.add_term(d.clone(), s.apply(c)?);
    }
    Ok(out)
}

/// `D_k` for k > l rewritten in terms of `D_1..D_l`.
pub fn reduce_bubbles(p: &Poly, f: &MonicPoly) -> Poly {
    let l = f.degree() as u32;
    let maxk = p
        .symbols()
        .iter()
        .filter_map(|s| match s {
            Sym::Delta(k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    if maxk <= l {
        return p.clone();
    }
    let mut vals: Vec<Poly> = (1..=l).map(Poly::delta).collect();
    while (vals.len() as u32) < maxk {
        let j = vals.len() + 1;
        let mut next = Poly::zero();
        for (i, a) in f.coeffs.iter().enumerate() {
            next -= &(a * &vals[j - (i + 1) - 1]);
        }
        vals.push(next);
    }
    p.substitute(&|s| match s {
        Sym::Delta(k) if k > l => Some(vals[k as usize - 1].clone()),
        _ => None,
    })
}

/// Crossings moving the letter at position `p` of `w` to position 0, and
/// the crossings moving it back.
fn to_front(w: &Word, p: usize) -> (Vec<Slice>, Vec<Slice>) {
    let mut word = w.0.clone();
    let mut q = Vec::new();
    for i in (0..p).rev() {
        q.push(Slice::new(i, Gen::crossing(word[i], word[i + 1])));
        word.swap(i, i + 1);
    }
    let mut back = Vec::new();
    for i in 0..p {
        back.push(Slice::new(i, Gen::crossing(word[i], word[i + 1])));
        word.swap(i, i + 1);
    }
    (q, back)
}

/// Reduces a filtered normal form modulo the right tensor ideal generated by
/// `f(x)`: afterwards every strand carries fewer than `deg f` dots and only
/// `D_1..D_l` occur.
pub fn cyclotomic_reduce(engine: &Engine, m: &Morphism, f: &MonicPoly) -> Morphism {
    let l = f.degree() as u32;
    let full = f.full();
    let mut todo = m.clone();
    let mut out = Morphism::zero(&m.src, &m.tgt);
    loop {
        let next = todo
            .terms
            .iter()
            .filter(|(d, _)| d.max_dots() >= l)
            .max_by_key(|(d, _)| d.degree())
            .map(|(d, c)| (d.clone(), c.clone()));
        let Some((d, c)) = next else { break };
        todo.terms.remove(&d);
        let mat = &d.matching;
        let e = (0..mat.n_ends()).find(|&e| d.dots_on(e) >= l).unwrap();
        let k = d.dots_on(e);
        let base = d.with_dots(e, 0);
        let pre = to_slices(&base, &Monomial::one());
        // the ideal member f(x) x^(k-l) sitting on the leftmost strand
        let mut ideal: Vec<(SliceWord, Poly)> = Vec::new();
        let ep = mat.endpoint(e);
        for (i, a) in full.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let dots = k - i as u32;
            let mut sl = Vec::new();
            match ep.side {
                Side::Top => {
                    let (q, back) = to_front(&m.tgt, ep.pos);
                    sl.extend(pre.slices.iter().copied());
                    sl.extend(q);
                    sl.extend((0..dots).map(|_| Slice::new(0, Gen::X)));
                    sl.extend(back);
                }
                Side::Bottom => {
                    let p = ep.pos;
                    let mut w = m.src.0.clone();
                    w.insert(p + 1, Dir::Up);
                    w.insert(p + 2, Dir::Down);
                    let (q, back) = to_front(&Word(w), p + 1);
                    sl.push(Slice::new(p + 1, Gen::Cup));
                    sl.extend(q);
                    sl.extend((0..dots).map(|_| Slice::new(0, Gen::X)));
                    sl.extend(back);
                    sl.push(Slice::new(p, Gen::Cap));
                    sl.extend(pre.slices.iter().copied());
                }
            }
            ideal.push((
                SliceWord {
                    src: m.src.clone(),
                    slices: sl,
                },
                a.clone(),
            ));
        }
        let mut member = Morphism::zero(&m.src, &m.tgt);
        for (w, a) in &ideal {
            member.add_scaled(&engine.normalize(w).expect("typed ideal member"), a);
        }
        let mut repl = Morphism::from_diagram(d.clone(), Poly::one());
        repl.add_scaled(&member, &Poly::int(-1));
        todo.add_scaled(&repl, &c);
        // finished terms move to the output
        let done: Vec<NormalDiagram> = todo.terms.keys().filter(|d| d.max_dots() < l).cloned().collect();
        for d in done {
            let c = todo.terms.remove(&d).unwrap();
            out.add_term(d, c);
        }
    }
    for (d, c) in todo.terms {
        out.add_term(d, c);
    }
    out.map_coeffs(|c| reduce_bubbles(c, f))
}

/// Graded truncation: `x^l = 0`, undotted bubbles to `delta`, dotted ones to 0.
pub fn gob_reduce(m: &Morphism, ell: u32, delta: &Poly) -> Morphism {
    let mut out = Morphism::zero(&m.src, &m.tgt);
    for (d, c) in &m.terms {
        if d.max_dots() >= ell {
            continue;
        }
        let v = c.substitute(&|s| match s {
            Sym::Delta(1) => Some(delta.clone()),
            Sym::Delta(_) => Some(Poly::zero()),
            _ => None,
        });
        out.add_term(d.clone(), v);
    }
    out
}

/// The categories the engine computes in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Category {
    /// Undotted diagrams, loops evaluated at `delta` (symbolic `D1` allowed).
    Ob { delta: Poly },
    /// The affine category, optionally specialized.
    Aob { values: Option<Vec<Poly>> },
    /// The graded category; with `ell`, the truncation `x^ell = 0` and loops at `delta`.
    Gob { ell: Option<u32>, delta: Poly },
    /// The cyclotomic quotient by `f(x)`, optionally with `D_1..D_l` specialized.
    Cyclotomic { f: MonicPoly, values: Option<Vec<Poly>> },
}

impl Category {
    pub fn grading(&self) -> Grading {
        match self {
            Category::Gob { .. } => Grading::Graded,
            _ => Grading::Filtered,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Category::Ob { .. } => "ob",
            Category::Aob { .. } => "aob",
            Category::Gob { .. } => "gob",
            Category::Cyclotomic { .. } => "obf",
        }
    }

    /// Dot bound making Hom spaces finite, if the category has one.
    pub fn dot_bound(&self) -> Option<u32> {
        match self {
            Category::Ob { .. } => Some(0),
            Category::Gob { ell: Some(l), .. } => Some(l - 1),
            Category::Cyclotomic { f, .. } => Some(f.degree() as u32 - 1),
            _ => None,
        }
    }
}

/// An engine together with the category it computes in.
pub struct Session {
    pub category: Category,
    pub engine: Engine,
}

impl Session {
    pub fn new(category: Category) -> Result<Session, QuotientError> {
        let engine = Engine::new(category.grading())?;
        Ok(Session { category, engine })
    }

    /// Applies the quotient and specialization to a normal form.
    pub fn reduce(&self, m: &Morphism) -> Result<Morphism, QuotientError> {
        match &self.category {
            Category::Ob { delta } => {
                if m.terms.keys().any(|d| d.degree() > 0) {
                    return Err(QuotientError::Diagram(DiagramError::Dotted));
                }
                let out = m.map_coeffs(|c| {
                    c.substitute(&|s| match s {
                        Sym::Delta(1) => Some(delta.clone()),
                        _ => None,
                    })
                });
                if out.terms.values().any(|c| c.mentions(|s| matches!(s, Sym::Delta(k) if k > 1))) {
                    return Err(QuotientError::Diagram(DiagramError::Dotted));
                }
                Ok(out)
            }
            Category::Aob { values: None } => Ok(m.clone()),
            Category::Aob { values: Some(v) } => specialize(m, &SpecializationMap::new(v.clone())),
            Category::Gob { ell: None, .. } => Ok(m.clone()),
            Category::Gob { ell: Some(l), delta } => Ok(gob_reduce(m, *l, delta)),
            Category::Cyclotomic { f, values } => {
                let r = cyclotomic_reduce(&self.engine, m, f);
                match values {
                    None => Ok(r),
                    Some(v) => specialize(
                        &r,
                        &SpecializationMap {
                            values: v.clone(),
                            cyclotomic: Some(f.clone()),
                        },
                    ),
                }
            }
        }
    }

    pub fn normalize(&self, w: &SliceWord) -> Result<Morphism, QuotientError> {
        if matches!(self.category, Category::Ob { .. }) && w.has_dots() {
            return Err(QuotientError::Diagram(DiagramError::Dotted));
        }
        let m = self.engine.normalize(w)?;
        self.reduce(&m)
    }

    pub fn normalize_sum(&self, terms: &[(SliceWord, Poly)], src: &Word, tgt: &Word) -> Result<Morphism, QuotientError> {
        let m = self.engine.normalize_sum(terms, src, tgt)?;
        self.reduce(&m)
    }

    pub fn compose(&self, f: &Morphism, g: &Morphism) -> Result<Morphism, QuotientError> {
        if let Category::Ob { delta } = &self.category {
            return ob_compose(f, g, delta);
        }
        let m = self.engine.compose(f, g)?;
        self.reduce(&m)
    }

    pub fn tensor(&self, f: &Morphism, g: &Morphism) -> Result<Morphism, QuotientError> {
        let m = self.engine.tensor(f, g)?;
        self.reduce(&m)
    }

    /// Normal basis of `Hom(a, b)`; affine categories need explicit bounds.
    pub fn basis(&self, a: &Word, b: &Word, bounds: Option<BasisBounds>) -> Result<Vec<(NormalDiagram, Monomial)>, QuotientError> {
        let bounds = match (self.category.dot_bound(), bounds) {
            (Some(k), _) => BasisBounds::dots(k),
            (None, Some(b)) => b,
            (None, None) => return Err(QuotientError::Diagram(DiagramError::Unbounded)),
        };
        Ok(enumerate_normal_basis(a, b, &bounds)?)
    }
}

/// Composition of undotted morphisms by composing matchings, each loop
/// contributing `delta`.
pub fn ob_compose(f: &Morphism, g: &Morphism, delta: &Poly) -> Result<Morphism, QuotientError> {
    if f.src != g.tgt {
        return Err(QuotientError::Diagram(DiagramError::TypeMismatch {
            expected: f.src.clone(),
            found: g.tgt.clone(),
        }));
    }
    let mut out = Morphism::zero(&g.src, &f.tgt);
    for (dg, cg) in &g.terms {
        for (df, cf) in &f.terms {
            if dg.degree() > 0 || df.degree() > 0 {
                return Err(QuotientError::Diagram(DiagramError::Dotted));
            }
            let (m, loops) = compose_matchings(&df.matching, &dg.matching)?;
            out.add_term(NormalDiagram::undotted(m), &(cf * cg) * &delta.pow(loops as u32));
        }
    }
    Ok(out)
}

fn check_index(a: &Word, p: usize) -> Result<(), QuotientError> {
    if p == 0 || p > a.len() {
        return Err(QuotientError::OutOfRange(format!("position {p} in word {a}")));
    }
    Ok(())
}

/// `(p,q)^a` for 1-based positions: the crossing of strands p and q when the
/// letters agree, otherwise minus the cap-cup pair joining them.
pub fn transposition(a: &Word, p: usize, q: usize) -> Result<Morphism, QuotientError> {
    check_index(a, p)?;
    check_index(a, q)?;
    if p == q {
        return Err(QuotientError::OutOfRange(format!("transposition ({p},{q})")));
    }
    let (p, q) = (p - 1, q - 1);
    let n = a.len();
    let mut pair: Vec<usize> = (0..2 * n).map(|e| if e < n { e + n } else { e - n }).collect();
    let sign = if a.get(p) == a.get(q) {
        pair[p] = n + q;
        pair[n + q] = p;
        pair[q] = n + p;
        pair[n + p] = q;
        1
    } else {
        pair[p] = q;
        pair[q] = p;
        pair[n + p] = n + q;
        pair[n + q] = n + p;
        -1
    };
    let m = Matching::from_pairs(a.clone(), a.clone(), pair)?;
    Ok(Morphism::from_diagram(NormalDiagram::undotted(m), Poly::int(sign)))
}

/// `JM^a_p`, the sum of `(p,q)^a` over `q < p`.
pub fn jm_morphism(a: &Word, p: usize) -> Result<Morphism, QuotientError> {
    check_index(a, p)?;
    let mut out = Morphism::zero(a, a);
    for q in 1..p {
        out.add_scaled(&transposition(a, p, q)?, &Poly::one());
    }
    Ok(out)
}

/// The level one functor from `OB^f`, `f = u - m0`, to OB (loops stay `D1`).
pub fn level_one_map(engine: &Engine, m: &Morphism, f: &MonicPoly) -> Result<Morphism, QuotientError> {
    if f.degree() != 1 {
        return Err(QuotientError::Unsupported("the level one functor needs deg f = 1".into()));
    }
    let m0 = -&f.coeffs[0];
    let delta = Poly::delta(1);
    let mut out = Morphism::zero(&m.src, &m.tgt);
    for (d, c) in &m.terms {
        let sw = to_slices(d, &Monomial::one());
        let words = sw.words()?;
        let mut acc = Morphism::identity(&sw.src);
        for (i, s) in sw.slices.iter().enumerate() {
            let img = level_one_slice(engine, &words[i], *s, &m0)?;
            acc = ob_compose(&img, &acc, &delta)?;
        }
        out.add_scaled(&acc, &reduce_bubbles(c, f));
    }
    Ok(out)
}

fn level_one_slice(engine: &Engine, w: &Word, s: Slice, m0: &Poly) -> Result<Morphism, QuotientError> {
    let delta = Poly::delta(1);
    match s.gen {
        Gen::X => {
            let mut img = jm_morphism(w, s.pos + 1)?;
            img.add_scaled(&Morphism::identity(w), m0);
            Ok(img)
        }
        Gen::XRev => {
            // the zigzag through an upward dot
            let p = s.pos;
            let zig = [Slice::new(p + 1, Gen::Cup), Slice::new(p + 1, Gen::X), Slice::new(p, Gen::Cap)];
            let mut cur = w.clone();
            let mut acc = Morphism::identity(w);
            for z in zig {
                let img = level_one_slice(engine, &cur, z, m0)?;
                cur = z.apply(&cur).expect("zigzag fits");
                acc = ob_compose(&img, &acc, &delta)?;
            }
            Ok(acc)
        }
        _ => {
            let sw = SliceWord::new(w.clone(), vec![s])?;
            Ok(engine.normalize(&sw)?)
        }
    }
}

/// The unit `1 -> a ⊗ a*`, built from c and c' nested.
pub fn unit(engine: &Engine, a: &Word) -> Result<Morphism, QuotientError> {
    let n = a.len();
    let mut sl = Vec::new();
    for i in 0..n {
        let g = if a.get(i) == Dir::Up { Gen::Cup } else { Gen::CupRev };
        sl.push(Slice::new(i, g));
    }
    Ok(engine.normalize(&SliceWord::new(Word::empty(), sl)?)?)
}

/// The counit `a* ⊗ a -> 1`, built from d and d' nested.
pub fn counit(engine: &Engine, a: &Word) -> Result<Morphism, QuotientError> {
    let n = a.len();
    let mut sl = Vec::new();
    for i in 0..n {
        let g = if a.get(i) == Dir::Up { Gen::Cap } else { Gen::CapRev };
        sl.push(Slice::new(n - 1 - i, g));
    }
    Ok(engine.normalize(&SliceWord::new(a.dual().concat(a), sl)?)?)
}

fn split_src(w: &Word, prefix: &Word, at_start: bool) -> Result<Word, QuotientError> {
    let n = prefix.len();
    let ok = w.len() >= n
        && if at_start {
            w.slice(0, n) == *prefix
        } else {
            w.slice(w.len() - n, w.len()) == *prefix
        };
    if !ok {
        return Err(QuotientError::Factorization {
            expected: prefix.to_string(),
            found: w.clone(),
        });
    }
    Ok(if at_start { w.slice(n, w.len()) } else { w.slice(0, w.len() - n) })
}

/// `Hom(a* ⊗ b, c) -> Hom(b, a ⊗ c)`, `h ↦ (1_a ⊗ h) ∘ (η_a ⊗ 1_b)`.
pub fn hom_transport_left(engine: &Engine, h: &Morphism, a: &Word) -> Result<Morphism, QuotientError> {
    let b = split_src(&h.src, &a.dual(), true)?;
    let eta = engine.tensor(&unit(engine, a)?, &Morphism::identity(&b))?;
    let top = engine.tensor(&Morphism::identity(a), h)?;
    Ok(engine.compose(&top, &eta)?)
}

/// Inverse of [`hom_transport_left`]: `g ↦ (ε_a ⊗ 1_c) ∘ (1_{a*} ⊗ g)`.
pub fn hom_transport_left_inv(engine: &Engine, g: &Morphism, a: &Word) -> Result<Morphism, QuotientError> {
    let c = split_src(&g.tgt, a, true)?;
    let lower = engine.tensor(&Morphism::identity(&a.dual()), g)?;
    let eps = engine.tensor(&counit(engine, a)?, &Morphism::identity(&c))?;
    Ok(engine.compose(&eps, &lower)?)
}

/// `Hom(b, c ⊗ a*) -> Hom(b ⊗ a, c)`, `h ↦ (1_c ⊗ ε_a) ∘ (h ⊗ 1_a)`.
pub fn hom_transport_right(engine: &Engine, h: &Morphism, a: &Word) -> Result<Morphism, QuotientError> {
    let c = split_src(&h.tgt, &a.dual(), false)?;
    let lower = engine.tensor(h, &Morphism::identity(a))?;
    let eps = engine.tensor(&Morphism::identity(&c), &counit(engine, a)?)?;
    Ok(engine.compose(&eps, &lower)?)
}

/// Inverse of [`hom_transport_right`]: `g ↦ (g ⊗ 1_{a*}) ∘ (1_b ⊗ η_a)`.
pub fn hom_transport_right_inv(engine: &Engine, g: &Morphism, a: &Word) -> Result<Morphism, QuotientError> {
    let b = split_src(&g.src, a, false)?;
    let eta = engine.tensor(&Morphism::identity(&b), &unit(engine, a)?)?;
    let top = engine.tensor(g, &Morphism::identity(&a.dual()))?;
    Ok(engine.compose(&top, &eta)?)
}

/// Basis and multiplication table of `End(↑^r ↓^s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalledBrauer {
    pub word: Word,
    pub basis: Vec<NormalDiagram>,
    /// `table[i][j]` lists `(k, c)` with `b_i ∘ b_j = Σ c b_k`.
    pub table: Vec<Vec<Vec<(usize, Poly)>>>,
}

/// The walled Brauer algebra and its affine/cyclotomic analogues, for the
/// finite categories (OB, truncated GOB, cyclotomic).
pub fn walled_brauer_algebra(session: &Session, r: usize, s: usize) -> Result<WalledBrauer, QuotientError> {
    let word = Word((0..r).map(|_| Dir::Up).chain((0..s).map(|_| Dir::Down)).collect());
    if session.category.dot_bound().is_none() {
        return Err(QuotientError::Unsupported(
            "the affine algebra is infinite dimensional; choose ob, obf or gob with a level".into(),
        ));
    }
    let basis: Vec<NormalDiagram> = session
        .basis(&word, &word, None)?
        .into_iter()
        .filter(|(_, m)| m.is_one())
        .map(|(d, _)| d)
        .collect();
    let index: BTreeMap<&NormalDiagram, usize> = basis.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let mut table = Vec::with_capacity(basis.len());
    for bi in &basis {
        let fi = Morphism::from_diagram(bi.clone(), Poly::one());
        let mut row = Vec::with_capacity(basis.len());
        for bj in &basis {
            let gj = Morphism::from_diagram(bj.clone(), Poly::one());
            let prod = session.compose(&fi, &gj)?;
            let mut entry = Vec::new();
            for (d, c) in &prod.terms {
                let k = *index
                    .get(d)
                    .ok_or_else(|| QuotientError::Unsupported(format!("product left the basis: {d}")))?;
                entry.push((k, c.clone()));
            }
            entry.sort_by_key(|e| e.0);
            row.push(entry);
        }
        table.push(row);
    }
    Ok(WalledBrauer { word, basis, table })
}

/// The composites c', d', s', x' in normal form.
pub fn primed_generators(engine: &Engine) -> Result<BTreeMap<&'static str, Morphism>, QuotientError> {
    let w = |s: &str| Word::parse(s).expect("literal word");
    let sl = |v: &[(usize, Gen)]| v.iter().map(|&(p, g)| Slice::new(p, g)).collect::<Vec<_>>();
    let mut out = BTreeMap::new();
    out.insert("c'", engine.normalize(&SliceWord::new(w("0"), sl(&[(0, Gen::Cup), (0, Gen::T)]))?)?);
    out.insert("d'", engine.normalize(&SliceWord::new(w("^v"), sl(&[(0, Gen::T), (0, Gen::Cap)]))?)?);
    out.insert(
        "s'",
        engine.normalize(&SliceWord::new(
            w("vv"),
            sl(&[(2, Gen::Cup), (3, Gen::Cup), (2, Gen::S), (1, Gen::Cap), (0, Gen::Cap)]),
        )?)?,
    );
    out.insert(
        "x'",
        engine.normalize(&SliceWord::new(w("v"), sl(&[(1, Gen::Cup), (1, Gen::X), (0, Gen::Cap)]))?)?,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::random_slice_word;
    use crate::reps::Rep;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn sw(src: &str, sl: &[(usize, Gen)]) -> SliceWord {
        SliceWord::new(w(src), sl.iter().map(|&(p, g)| Slice::new(p, g)).collect()).unwrap()
    }

    fn level_one(m: &str) -> MonicPoly {
        MonicPoly::from_roots(&[Poly::parse(m).unwrap()])
    }

    #[test]
    fn level_one_dot_is_scalar() {
        let e = Engine::filtered();
        let f = level_one("m1");
        let x = e.normalize(&sw("^", &[(0, Gen::X)])).unwrap();
        assert_eq!(cyclotomic_reduce(&e, &x, &f), Morphism::identity(&w("^")).scaled(&Poly::m(1)));
        let d2 = Morphism::identity(&w("0")).scaled(&Poly::delta(2));
        assert_eq!(cyclotomic_reduce(&e, &d2, &f), Morphism::identity(&w("0")).scaled(&(&Poly::m(1) * &Poly::delta(1))));
    }

    #[test]
    fn reduction_agrees_with_oracle() {
        let e = Engine::filtered();
        let rep = Rep::symbolic(&[1, 2]).unwrap();
        let f = MonicPoly::from_roots(&[Poly::m(1), Poly::m(2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..60 {
            let src = Word((0..i % 3).map(|_| if rng.gen_bool(0.5) { Dir::Up } else { Dir::Down }).collect());
            let word = random_slice_word(&mut rng, &src, 7, 4, 3);
            let nf = e.normalize(&word).unwrap();
            let red = cyclotomic_reduce(&e, &nf, &f);
            assert!(red.terms.keys().all(|d| d.max_dots() < 2));
            assert!(red.terms.values().all(|c| !c.mentions(|s| matches!(s, Sym::Delta(k) if k > 2))));
            assert_eq!(rep.eval_morphism(&red).unwrap(), rep.eval_slices(&word).unwrap(), "{word}");
            assert_eq!(cyclotomic_reduce(&e, &red, &f), red);
        }
    }

    #[test]
    fn specialization() {
        let s = SpecializationMap::new(vec![Poly::int(3)]);
        let m = Morphism::identity(&w("0")).scaled(&Poly::delta(1));
        assert_eq!(specialize(&m, &s).unwrap(), Morphism::identity(&w("0")).scaled(&Poly::int(3)));
        let m2 = Morphism::identity(&w("0")).scaled(&Poly::delta(2));
        assert_eq!(specialize(&m2, &s), Err(QuotientError::Uncovered(2)));
        let dtc = Session::new(Category::Ob { delta: Poly::int(5) })
            .unwrap()
            .normalize(&sw("0", &[(0, Gen::Cup), (0, Gen::T), (0, Gen::Cap)]))
            .unwrap();
        assert_eq!(dtc, Morphism::identity(&w("0")).scaled(&Poly::int(5)));
    }

    #[test]
    fn transpositions_and_jm() {
        let t = transposition(&w("^v"), 1, 2).unwrap();
        let (d, c) = t.terms.iter().next().unwrap();
        assert_eq!(c, &Poly::int(-1));
        assert_eq!(d.matching.partner(0), 1);
        for a in ["^", "v^", "^^v"] {
            assert!(jm_morphism(&w(a), 1).unwrap().is_zero());
        }
        let e = Engine::filtered();
        let s = e.normalize(&sw("^^", &[(0, Gen::S)])).unwrap();
        assert_eq!(jm_morphism(&w("^^"), 2).unwrap(), s);
        assert!(transposition(&w("^^"), 1, 3).is_err());
    }

    #[test]
    fn level_one_functor() {
        let e = Engine::filtered();
        let f = level_one("m1");
        let x = e.normalize(&sw("^", &[(0, Gen::X)])).unwrap();
        assert_eq!(level_one_map(&e, &x, &f).unwrap(), Morphism::identity(&w("^")).scaled(&Poly::m(1)));
        let ux = e.normalize(&sw("^^", &[(1, Gen::X)])).unwrap();
        let mut expect = e.normalize(&sw("^^", &[(0, Gen::S)])).unwrap();
        expect.add_scaled(&Morphism::identity(&w("^^")), &Poly::m(1));
        assert_eq!(level_one_map(&e, &ux, &f).unwrap(), expect);
        for (src, g) in [("0", Gen::Cup), ("v^", Gen::Cap), ("^^", Gen::S), ("^v", Gen::T)] {
            let m = e.normalize(&sw(src, &[(0, g)])).unwrap();
            assert_eq!(level_one_map(&e, &m, &f).unwrap(), m);
        }
    }

    #[test]
    fn duality_transport() {
        let e = Engine::filtered();
        let d = e.normalize(&sw("v^", &[(0, Gen::Cap)])).unwrap();
        let up = w("^");
        assert_eq!(hom_transport_left(&e, &d, &up).unwrap(), Morphism::identity(&up));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let word = random_slice_word(&mut rng, &w("v^"), 5, 2, 3);
            let h = e.normalize(&word).unwrap();
            let g = hom_transport_left(&e, &h, &up).unwrap();
            assert_eq!(hom_transport_left_inv(&e, &g, &up).unwrap(), h);
            let word = loop {
                let cand = random_slice_word(&mut rng, &w("^"), 5, 2, 3);
                if cand.tgt().0.last() == Some(&Dir::Down) {
                    break cand;
                }
            };
            let h = e.normalize(&word).unwrap();
            let g = hom_transport_right(&e, &h, &up).unwrap();
            assert_eq!(hom_transport_right_inv(&e, &g, &up).unwrap(), h);
        }
    }

    #[test]
    fn walled_brauer_small() {
        let ob = Session::new(Category::Ob { delta: Poly::delta(1) }).unwrap();
        let b11 = walled_brauer_algebra(&ob, 1, 1).unwrap();
        assert_eq!(b11.basis.len(), 2);
        let obf = Session::new(Category::Cyclotomic {
            f: MonicPoly::from_roots(&[Poly::m(1), Poly::m(2)]),
            values: None,
        })
        .unwrap();
        assert_eq!(walled_brauer_algebra(&obf, 1, 1).unwrap().basis.len(), 8);
    }

    #[test]
    fn primed_relations() {
        let e = Engine::filtered();
        let p = primed_generators(&e).unwrap();
        let down = w("v");
        // (v d')(c' v) = 1
        let lhs = e
            .compose(
                &e.tensor(&Morphism::identity(&down), &p["d'"]).unwrap(),
                &e.tensor(&p["c'"], &Morphism::identity(&down)).unwrap(),
            )
            .unwrap();
        assert_eq!(lhs, Morphism::identity(&down));
        let vv = w("vv");
        let ss = e.compose(&p["s'"], &p["s'"]).unwrap();
        assert_eq!(ss, Morphism::identity(&vv));
        let vx = e.tensor(&Morphism::identity(&down), &p["x'"]).unwrap();
        let xv = e.tensor(&p["x'"], &Morphism::identity(&down)).unwrap();
        let mut rhs = e.compose(&p["s'"], &xv).unwrap();
        rhs.add_scaled(&Morphism::identity(&vv), &Poly::int(-1));
        assert_eq!(e.compose(&vx, &p["s'"]).unwrap(), rhs);
    }
}
