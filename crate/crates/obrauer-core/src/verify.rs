//! Verification suites: defining relations, basis rank checks, oracle fuzzing
//! and parameter identities.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagrams::{
    bubble_slices, enumerate_matchings, enumerate_normal_basis, random_slice_word, to_slices, BasisBounds, Dir, Gen,
    Morphism, Slice, SliceWord, Word,
};
use crate::quotients::{
    cyclotomic_reduce, level_one_map, transposition, walled_brauer_algebra, Category, Session,
};
use crate::reps::{rank_bareiss, rank_by_evaluation, Pyramid, Rep, RepKind, SparseVec};
use crate::rewrite::{derive_slide_rules, Engine, Grading};
use crate::scalars::{delta_prime_from_delta, deltas_from_pair, ratio, sym_h, MonicPoly, Monomial, Poly};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
    pub millis: u128,
}

impl CheckReport {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match &self.witness {
            Some(w) if !self.passed => format!("{status} {} ({} ms): {w}", self.name, self.millis),
            _ => format!("{status} {} ({} ms)", self.name, self.millis),
        }
    }
}

pub fn run_check(name: impl Into<String>, f: impl FnOnce() -> Result<(), String>) -> CheckReport {
    let t = Instant::now();
    let r = f();
    CheckReport {
        name: name.into(),
        passed: r.is_ok(),
        witness: r.err(),
        millis: t.elapsed().as_millis(),
    }
}

/// A defining relation as two linear combinations of slice words.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: &'static str,
    pub grading: Grading,
    pub src: Word,
    pub lhs: Vec<(SliceWord, Poly)>,
    pub rhs: Vec<(SliceWord, Poly)>,
}

fn sl(v: &[(usize, Gen)]) -> Vec<Slice> {
    v.iter().map(|&(p, g)| Slice::new(p, g)).collect()
}

fn cat(parts: &[Vec<Slice>]) -> Vec<Slice> {
    parts.concat()
}

fn cup_prime(p: usize) -> Vec<Slice> {
    sl(&[(p, Gen::Cup), (p, Gen::T)])
}

fn cap_prime(p: usize) -> Vec<Slice> {
    sl(&[(p, Gen::T), (p, Gen::Cap)])
}

fn cross_prime(p: usize) -> Vec<Slice> {
    sl(&[(p + 2, Gen::Cup), (p + 3, Gen::Cup), (p + 2, Gen::S), (p + 1, Gen::Cap), (p, Gen::Cap)])
}

fn dot_prime(p: usize) -> Vec<Slice> {
    sl(&[(p + 1, Gen::Cup), (p + 1, Gen::X), (p, Gen::Cap)])
}

/// The mixed crossing `(d ↑↓)(↓ s ↓)(↓↑ c)` from `↓↑` to `↑↓`.
fn mixed_x(p: usize) -> Vec<Slice> {
    sl(&[(p + 2, Gen::Cup), (p + 1, Gen::S), (p, Gen::Cap)])
}

fn rel(name: &'static str, grading: Grading, src: &str, lhs: Vec<(Vec<Slice>, Poly)>, rhs: Vec<(Vec<Slice>, Poly)>) -> Relation {
    let src = Word::parse(src).expect("literal word");
    let mk = |v: Vec<(Vec<Slice>, Poly)>| {
        v.into_iter()
            .map(|(s, c)| (SliceWord::new(src.clone(), s).expect("typed relation"), c))
            .collect()
    };
    Relation {
        name,
        grading,
        lhs: mk(lhs),
        rhs: mk(rhs),
        src,
    }
}

/// The defining relations of the oriented Brauer categories, their affine
/// and graded dot relations, and the identities of the primed generators.
pub fn relations() -> Vec<Relation> {
    use Grading::*;
    let one = Poly::one;
    let id = || (Vec::new(), Poly::one());
    vec![
        rel("zigzag up", Filtered, "^", vec![(sl(&[(0, Gen::Cup), (1, Gen::Cap)]), one())], vec![id()]),
        rel("zigzag down", Filtered, "v", vec![(sl(&[(1, Gen::Cup), (0, Gen::Cap)]), one())], vec![id()]),
        rel("s squared", Filtered, "^^", vec![(sl(&[(0, Gen::S), (0, Gen::S)]), one())], vec![id()]),
        rel(
            "braid",
            Filtered,
            "^^^",
            vec![(sl(&[(1, Gen::S), (0, Gen::S), (1, Gen::S)]), one())],
            vec![(sl(&[(0, Gen::S), (1, Gen::S), (0, Gen::S)]), one())],
        ),
        rel("t inverts X (X.t)", Filtered, "^v", vec![(cat(&[sl(&[(0, Gen::T)]), mixed_x(0)]), one())], vec![id()]),
        rel("t inverts X (t.X)", Filtered, "v^", vec![(cat(&[mixed_x(0), sl(&[(0, Gen::T)])]), one())], vec![id()]),
        rel(
            "affine dot relation",
            Filtered,
            "^^",
            vec![(sl(&[(0, Gen::S), (1, Gen::X)]), one())],
            vec![(sl(&[(0, Gen::X), (0, Gen::S)]), one()), id()],
        ),
        rel(
            "graded dot relation",
            Graded,
            "^^",
            vec![(sl(&[(0, Gen::S), (1, Gen::X)]), one())],
            vec![(sl(&[(0, Gen::X), (0, Gen::S)]), one())],
        ),
        rel("bubble d.t.c", Filtered, "0", vec![(sl(&[(0, Gen::Cup), (0, Gen::T), (0, Gen::Cap)]), one())], vec![(Vec::new(), Poly::delta(1))]),
        rel("primed zigzag down", Filtered, "v", vec![(cat(&[cup_prime(0), cap_prime(1)]), one())], vec![id()]),
        rel("primed zigzag up", Filtered, "^", vec![(cat(&[cup_prime(1), cap_prime(0)]), one())], vec![id()]),
        rel("s' squared", Filtered, "vv", vec![(cat(&[cross_prime(0), cross_prime(0)]), one())], vec![id()]),
        rel(
            "s' braid",
            Filtered,
            "vvv",
            vec![(cat(&[cross_prime(1), cross_prime(0), cross_prime(1)]), one())],
            vec![(cat(&[cross_prime(0), cross_prime(1), cross_prime(0)]), one())],
        ),
        rel(
            "primed mixed crossing invertible (left)",
            Filtered,
            "^v",
            vec![(cat(&[cup_prime(2), cross_prime(1), cap_prime(0), sl(&[(0, Gen::TRev)])]), one())],
            vec![id()],
        ),
        rel(
            "primed mixed crossing invertible (right)",
            Filtered,
            "v^",
            vec![(cat(&[sl(&[(0, Gen::TRev)]), cup_prime(2), cross_prime(1), cap_prime(0)]), one())],
            vec![id()],
        ),
        rel(
            "primed dot relation",
            Filtered,
            "vv",
            vec![(cat(&[cross_prime(0), dot_prime(1)]), one())],
            vec![(cat(&[dot_prime(0), cross_prime(0)]), one()), (Vec::new(), Poly::int(-1))],
        ),
    ]
}

/// Every relation as an engine equality and as an identity of matrices.
pub fn relation_suite(lambda: &[u32]) -> Vec<CheckReport> {
    let filtered = Engine::filtered();
    let graded = Engine::graded();
    let psi = Rep::symbolic(lambda).expect("valid pyramid");
    let phi = Rep::phi(lambda).expect("valid pyramid");
    relations()
        .into_iter()
        .map(|r| {
            run_check(format!("relation: {}", r.name), || {
                let (e, rep) = match r.grading {
                    Grading::Filtered => (&filtered, &psi),
                    Grading::Graded => (&graded, &phi),
                };
                let tgt = r.lhs[0].0.tgt();
                let l = e.normalize_sum(&r.lhs, &r.src, &tgt).map_err(|x| x.to_string())?;
                let rr = e.normalize_sum(&r.rhs, &r.src, &tgt).map_err(|x| x.to_string())?;
                if l != rr {
                    return Err(format!("engine: {l}  vs  {rr}"));
                }
                let ml = rep.eval_combination(&r.lhs, &r.src, &tgt).map_err(|x| x.to_string())?;
                let mr = rep.eval_combination(&r.rhs, &r.src, &tgt).map_err(|x| x.to_string())?;
                if ml != mr {
                    return Err("matrices differ".into());
                }
                Ok(())
            })
        })
        .collect()
}

/// Random distinct rationals.
pub fn random_params(seed: u64, count: usize) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Poly> = Vec::new();
    while out.len() < count {
        let p = Poly::from_rat(ratio(rng.gen_range(-50..=50), rng.gen_range(1..=13)));
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Basis count and rank of the images of normal diagrams with at most l-1
/// dots per strand in `Hom(a, b)` under the filtered representation `rep`
/// of level l. Rejects pyramids whose smallest column is below the average
/// word length, where the images need not be independent.
pub fn basis_rank(a: &Word, b: &Word, rep: &Rep, seed: u64) -> Result<(usize, usize), String> {
    let l = rep.pyramid.ell() as u32;
    let avg = (a.len() + b.len()) as f64 / 2.0;
    let min = *rep.pyramid.lambda().iter().min().unwrap() as f64;
    if min < avg {
        return Err(format!("min(lambda) = {min} is below the average length {avg}"));
    }
    let basis = enumerate_normal_basis(a, b, &BasisBounds::dots(l - 1)).map_err(|e| e.to_string())?;
    let vecs: Vec<SparseVec> = basis
        .iter()
        .map(|(d, _)| rep.eval_slices(&to_slices(d, &Monomial::one())).map(|m| m.vectorize()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok((basis.len(), independent_rank(&vecs, seed)))
}

pub fn basis_theorem_check(a: &Word, b: &Word, rep: &Rep, seed: u64) -> CheckReport {
    let name = format!("basis rank {a} -> {b}, lambda {:?}", rep.pyramid.lambda());
    run_check(name, || {
        let (count, rank) = basis_rank(a, b, rep, seed)?;
        if rank != count {
            return Err(format!("rank {rank} but {count} basis elements"));
        }
        Ok(())
    })
}

/// Exact rank for symbolic entries; for rational entries the rank is
/// computed at two independent parameter draws by the caller.
fn independent_rank(vecs: &[SparseVec], seed: u64) -> usize {
    let symbolic = vecs.iter().any(|v| v.values().any(|p| !p.is_constant()));
    if symbolic {
        let r = rank_by_evaluation(vecs, seed, 3);
        if r == vecs.len() {
            r
        } else {
            rank_bareiss(vecs)
        }
    } else {
        crate::reps::rank_rational(vecs)
    }
}

/// All words of length at most `n`.
pub fn words_up_to(n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for d in [Dir::Up, Dir::Down] {
                let mut v = w.0.clone();
                v.push(d);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn charge(w: &Word) -> isize {
    let (u, d) = w.counts();
    u as isize - d as isize
}

/// Rank checks for levels 1 and 2 over all word pairs of length at most 2.
pub fn cyclotomic_basis_suite(seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for lambda in [vec![2u32], vec![2, 2]] {
        let rep = Rep::symbolic(&lambda).expect("valid pyramid");
        for a in words_up_to(2) {
            for b in words_up_to(2) {
                if charge(&a) != charge(&b) {
                    continue;
                }
                out.push(basis_theorem_check(&a, &b, &rep, seed));
            }
        }
    }
    out
}

/// Normal diagrams with at most two dots in total are independent in the
/// affine category: checked through a level three quotient at two random
/// parameter points.
pub fn affine_independence_suite(seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for word in ["^", "^v"] {
        let a = Word::parse(word).unwrap();
        out.push(run_check(format!("affine independence End({a}), at most 2 dots"), || {
            let basis = enumerate_normal_basis(&a, &a, &BasisBounds::total(2)).map_err(|e| e.to_string())?;
            let mut best = 0;
            for point in 0..2 {
                let m = random_params(seed.wrapping_add(point), 3);
                let rep = Rep::new(Pyramid::new(&[2, 2, 2]).unwrap(), m, RepKind::PsiLambda).map_err(|e| e.to_string())?;
                let vecs: Vec<SparseVec> = basis
                    .iter()
                    .filter(|(_, mono)| mono.is_one())
                    .map(|(d, _)| rep.eval_slices(&to_slices(d, &Monomial::one())).map(|m| m.vectorize()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                let r = crate::reps::rank_rational(&vecs);
                if r != vecs.len() {
                    return Err(format!("rank {r} of {} at point {point}", vecs.len()));
                }
                best = best.max(r);
            }
            if best == 0 && !basis.is_empty() {
                return Err("empty image".into());
            }
            Ok(())
        }));
    }
    out
}

/// Normalization against the representation: consistency, idempotence and
/// linearity on random slice words.
pub fn oracle_fuzz(engine: &Engine, rep: &Rep, seed: u64, count: usize) -> CheckReport {
    run_check(format!("oracle fuzz seed {seed}, {count} words"), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let len = rng.gen_range(0..=3usize);
            let src = Word((0..len).map(|_| if rng.gen_bool(0.5) { Dir::Up } else { Dir::Down }).collect());
            let w = random_slice_word(&mut rng, &src, 8, 4, 3);
            let tgt = w.tgt();
            let nf = engine.normalize(&w).map_err(|e| e.to_string())?;
            let lhs = rep.eval_slices(&w).map_err(|e| e.to_string())?;
            let rhs = rep.eval_morphism(&nf).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("word {i}: {w} normalizes to {nf}, matrices differ"));
            }
            let again = engine.normalize_sum(&nf.slice_terms(), &src, &tgt).map_err(|e| e.to_string())?;
            if again != nf {
                return Err(format!("word {i}: {w} not idempotent: {nf} then {again}"));
            }
            // a second word of the same type, when one turns up quickly
            let other = (0..40)
                .map(|_| random_slice_word(&mut rng, &src, 8, 4, 3))
                .find(|v| v.tgt() == tgt);
            if let Some(v) = other {
                let (a, b) = (Poly::int(rng.gen_range(-3..=3)), Poly::from_rat(ratio(rng.gen_range(-3..=3), 2)));
                let comb = engine
                    .normalize_sum(&[(w.clone(), a.clone()), (v.clone(), b.clone())], &src, &tgt)
                    .map_err(|e| e.to_string())?;
                let mut sum = nf.scaled(&a);
                sum.add_scaled(&engine.normalize(&v).map_err(|e| e.to_string())?, &b);
                if comb != sum {
                    return Err(format!("word {i}: not linear on {w} and {v}"));
                }
            }
        }
        Ok(())
    })
}

/// An engine whose down-down exchange sign is flipped must fail the fuzz
/// and the certification.
pub fn mutation_check(rep: &Rep, seed: u64) -> CheckReport {
    run_check("corrupted rule is detected", || {
        let rules = derive_slide_rules(Grading::Filtered);
        let idx = rules
            .exchange
            .iter()
            .position(|r| r.gen == Gen::SRev)
            .expect("down-down rule");
        let bad = rules.corrupted(idx);
        if crate::rewrite::certify(&bad, &crate::rewrite::certification_rep(Grading::Filtered)).is_ok() {
            return Err("certification accepted a corrupted rule".into());
        }
        let engine = Engine::with_rules(bad);
        let r = oracle_fuzz(&engine, rep, seed, 200);
        if r.passed {
            return Err("fuzzing did not notice the corrupted rule".into());
        }
        Ok(())
    })
}

/// Eta coefficients: the entry for `v_i ⊗ f_i` in the image of `v_j ⊗ f_j`
/// under k dots on the up strand of `↑↓`, in closed form.
pub fn eta_closed_form(p: &Pyramid, m: &[Poly], i: usize, j: usize, k: u32) -> Poly {
    let (ci, cj) = (p.col(i), p.col(j));
    if i == j {
        return m[ci - 1].pow(k);
    }
    if ci >= cj {
        return Poly::zero();
    }
    let lam: Vec<Poly> = p.lambda().iter().map(|&x| Poly::int(x as i64)).collect();
    let mut total = Poly::zero();
    // chains ci = p0 < p1 < ... < pr = cj
    let inner: Vec<usize> = (ci + 1..cj).collect();
    for mask in 0u32..(1 << inner.len()) {
        let mut chain = vec![ci];
        chain.extend(inner.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c));
        chain.push(cj);
        let r = chain.len() as u32 - 1;
        if r > k {
            continue;
        }
        let ms: Vec<Poly> = chain.iter().map(|&c| m[c - 1].clone()).collect();
        let mut term = sym_h((k - r) as usize, &ms);
        for &c in &chain[1..chain.len() - 1] {
            term = &term * &lam[c - 1];
        }
        total += &term;
    }
    total
}

/// Bubble values, eta coefficients and the counterclockwise bubble.
pub fn parameter_suite() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for lambda in [vec![2u32, 3, 2, 1, 1], vec![2, 2], vec![1, 1]] {
        out.push(run_check(format!("bubble values lambda {lambda:?}"), || {
            let rep = Rep::symbolic(&lambda).map_err(|e| e.to_string())?;
            let expect = rep.pyramid.deltas(&rep.m, 5).map_err(|e| e.to_string())?;
            for k in 1..=5u32 {
                let w = SliceWord::new(Word::empty(), bubble_slices(0, k)).unwrap();
                let got = rep.eval_slices(&w).map_err(|e| e.to_string())?.get(0, 0);
                if got != expect[k as usize - 1] {
                    return Err(format!("D{k}: matrix {got}, formula {}", expect[k as usize - 1]));
                }
            }
            Ok(())
        }));
    }
    out.push(run_check("eta closed form, lambda [2, 3, 2, 1, 1], k <= 4", || {
        let rep = Rep::symbolic(&[2, 3, 2, 1, 1]).unwrap();
        let n = rep.n();
        let updown = Word::parse("^v").unwrap();
        for k in 0..=4u32 {
            let w = SliceWord::new(updown.clone(), (0..k).map(|_| Slice::new(0, Gen::X)).collect()).unwrap();
            let mat = rep.eval_slices(&w).map_err(|e| e.to_string())?;
            for i in 1..=n {
                for j in 1..=n {
                    let got = mat.get((i - 1) * n + (i - 1), (j - 1) * n + (j - 1));
                    let want = eta_closed_form(&rep.pyramid, &rep.m, i, j, k);
                    if got != want {
                        return Err(format!("k={k} i={i} j={j}: {got} vs {want}"));
                    }
                }
            }
        }
        Ok(())
    }));
    out.push(run_check("level one series: lambda [3] gives 3 m^(k-1)", || {
        let rep = Rep::symbolic(&[3]).unwrap();
        let got = rep.pyramid.deltas(&rep.m, 5).map_err(|e| e.to_string())?;
        let f = MonicPoly::from_roots(&[Poly::m(1)]);
        let fp = MonicPoly::from_roots(&[&Poly::m(1) - &Poly::int(3)]);
        let series = deltas_from_pair(&f, &fp, 5).map_err(|e| e.to_string())?;
        for k in 1..=5u32 {
            let want = &Poly::int(3) * &Poly::m(1).pow(k - 1);
            if got[k as usize - 1] != want || series[k as usize - 1] != want {
                return Err(format!("k={k}: {} / {} vs {want}", got[k as usize - 1], series[k as usize - 1]));
            }
        }
        Ok(())
    }));
    out.push(run_check("counterclockwise bubbles", || {
        let e = Engine::filtered();
        let ds: Vec<Poly> = (1..=4).map(Poly::delta).collect();
        let primes = delta_prime_from_delta(&ds, 4);
        if primes[1] != &Poly::delta(2) - &Poly::delta(1).pow(2) {
            return Err(format!("D'2 = {}", primes[1]));
        }
        let rep = Rep::symbolic(&[2, 3, 2, 1, 1]).unwrap();
        for k in 1..=4u32 {
            let mut s = vec![Slice::new(0, Gen::CupRev)];
            s.extend((1..k).map(|_| Slice::new(0, Gen::XRev)));
            s.push(Slice::new(0, Gen::Cap));
            let w = SliceWord::new(Word::empty(), s).unwrap();
            let want = &primes[k as usize - 1];
            let got = e.normalize(&w).map_err(|x| x.to_string())?;
            if got != Morphism::identity(&Word::empty()).scaled(want) {
                return Err(format!("{k} - 1 dots: engine gives {got}, expected {want}"));
            }
            let direct = rep.eval_slices(&w).map_err(|x| x.to_string())?.get(0, 0);
            if direct != rep.eval_scalar(want).map_err(|x| x.to_string())? {
                return Err(format!("{k} - 1 dots: representation gives {direct}"));
            }
        }
        // the same bubbles beside a strand
        for k in 1..=3u32 {
            let mut s = vec![Slice::new(1, Gen::CupRev)];
            s.extend((1..k).map(|_| Slice::new(1, Gen::XRev)));
            s.push(Slice::new(1, Gen::Cap));
            let w = SliceWord::new(Word::parse("^").unwrap(), s).unwrap();
            let nf = e.normalize(&w).map_err(|x| x.to_string())?;
            if rep.eval_morphism(&nf).map_err(|x| x.to_string())? != rep.eval_slices(&w).map_err(|x| x.to_string())? {
                return Err(format!("{k} - 1 dots beside a strand"));
            }
        }
        Ok(())
    }));
    out
}

/// `g(x')` on a down strand in the quotient by `f(x)` with the bubble
/// parameters read off from `f'(u)/f(u)`.
pub fn dual_dot_polynomial(f: &MonicPoly, fprime: &MonicPoly, g: &MonicPoly) -> Result<Morphism, String> {
    let l = f.degree();
    let values = deltas_from_pair(f, fprime, l).map_err(|e| e.to_string())?;
    let session = Session::new(Category::Cyclotomic { f: f.clone(), values: Some(values) }).map_err(|e| e.to_string())?;
    let down = Word::parse("v").unwrap();
    let terms: Vec<(SliceWord, Poly)> = g
        .full()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let s = (0..g.degree() - i).flat_map(|_| dot_prime(0)).collect();
            (SliceWord::new(down.clone(), s).unwrap(), a.clone())
        })
        .collect();
    session.normalize_sum(&terms, &down, &down).map_err(|e| e.to_string())
}

/// The bubble recursion in the cyclotomic quotients and in the series.
pub fn cyclotomic_suite() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for l in 1..=3u32 {
        let roots: Vec<Poly> = (1..=l).map(Poly::m).collect();
        let f = MonicPoly::from_roots(&roots);
        out.push(run_check(format!("bubble recursion vanishes, level {l}"), || {
            let session = Session::new(Category::Cyclotomic { f: f.clone(), values: None }).map_err(|e| e.to_string())?;
            let full = f.full();
            let empty = Word::empty();
            let terms: Vec<(SliceWord, Poly)> = (0..=l as usize)
                .map(|i| (SliceWord::new(empty.clone(), bubble_slices(0, l + 1 - i as u32)).unwrap(), full[i].clone()))
                .collect();
            let r = session.normalize_sum(&terms, &empty, &empty).map_err(|e| e.to_string())?;
            if !r.is_zero() {
                return Err(format!("bubble form: {r}"));
            }
            // with the dots on a strand, reduced through the ideal, then closed
            let mut strand = Morphism::zero(&Word::parse("^").unwrap(), &Word::parse("^").unwrap());
            for (i, a) in full.iter().enumerate() {
                let w = SliceWord::new(Word::parse("^").unwrap(), (0..l - i as u32).map(|_| Slice::new(0, Gen::X)).collect()).unwrap();
                strand.add_scaled(&session.engine.normalize(&w).map_err(|e| e.to_string())?, a);
            }
            let reduced = cyclotomic_reduce(&session.engine, &strand, &f);
            if !reduced.is_zero() {
                return Err(format!("strand form: {reduced}"));
            }
            Ok(())
        }));
        out.push(run_check(format!("f'(x') vanishes on a down strand, level {l}"), || {
            let shifted: Vec<Poly> = (1..=l).map(|i| &Poly::m(i) - &Poly::lam(i)).collect();
            let fprime = MonicPoly::from_roots(&shifted);
            let r = dual_dot_polynomial(&f, &fprime, &fprime)?;
            if !r.is_zero() {
                return Err(format!("{r}"));
            }
            Ok(())
        }));
        out.push(run_check(format!("series recursion, level {l}"), || {
            let lam: Vec<Poly> = (1..=l).map(Poly::lam).collect();
            let fprime = MonicPoly::from_roots(&roots.iter().zip(&lam).map(|(m, x)| m - x).collect::<Vec<_>>());
            let d = deltas_from_pair(&f, &fprime, l as usize + 3).map_err(|e| e.to_string())?;
            let full = f.full();
            for k in l as usize + 1..=l as usize + 3 {
                let mut s = d[k - 1].clone();
                for i in 1..=l as usize {
                    s += &(&full[i] * &d[k - i - 1]);
                }
                if !s.is_zero() {
                    return Err(format!("k={k}: residue {s}"));
                }
            }
            Ok(())
        }));
    }
    out
}

/// The level one functor: inverse to the inclusion, and consistent with
/// the cyclotomic reduction.
pub fn level_one_suite(seed: u64) -> Vec<CheckReport> {
    let f = MonicPoly::from_roots(&[Poly::m(1)]);
    let mut out = Vec::new();
    let session = Session::new(Category::Cyclotomic { f: f.clone(), values: None }).expect("certified engine");
    out.push(run_check("level one: F(G(g)) = g on generators and 50 composites", || {
        let e = &session.engine;
        let mut words: Vec<SliceWord> = Vec::new();
        for g in Gen::ALL.iter().filter(|g| !g.is_dot()) {
            words.push(SliceWord::new(Word(g.src().to_vec()), vec![Slice::new(0, *g)]).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while words.len() < Gen::ALL.len() - 2 + 50 {
            let len = rng.gen_range(0..=3usize);
            let src = Word((0..len).map(|_| if rng.gen_bool(0.5) { Dir::Up } else { Dir::Down }).collect());
            words.push(random_slice_word(&mut rng, &src, 8, 0, 3));
        }
        for w in &words {
            let g = session.normalize(w).map_err(|x| x.to_string())?;
            let back = level_one_map(e, &g, &f).map_err(|x| x.to_string())?;
            if back != g {
                return Err(format!("{w}: {g} maps to {back}"));
            }
        }
        Ok(())
    }));
    out.push(run_check("level one: F agrees with the reduction on 50 dotted words", || {
        let e = &session.engine;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..50 {
            let len = rng.gen_range(0..=2usize);
            let src = Word((0..len).map(|_| if rng.gen_bool(0.5) { Dir::Up } else { Dir::Down }).collect());
            let w = random_slice_word(&mut rng, &src, 6, 3, 3);
            let nf = e.normalize(&w).map_err(|x| x.to_string())?;
            let via_f = level_one_map(e, &nf, &f).map_err(|x| x.to_string())?;
            let reduced = session.reduce(&nf).map_err(|x| x.to_string())?;
            if via_f != reduced {
                return Err(format!("{w}: F gives {via_f}, reduction gives {reduced}"));
            }
        }
        Ok(())
    }));
    for a in words_up_to(3) {
        out.push(run_check(format!("level one: dim End({a}) = matchings"), || {
            let count = enumerate_matchings(&a, &a).len();
            let basis = session.basis(&a, &a, None).map_err(|e| e.to_string())?;
            if basis.len() != count {
                return Err(format!("basis {} vs matchings {count}", basis.len()));
            }
            let rep = Rep::symbolic(&[3]).unwrap();
            let vecs: Vec<SparseVec> = basis
                .iter()
                .map(|(d, _)| rep.eval_slices(&to_slices(d, &Monomial::one())).map(|m| m.vectorize()))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let r = independent_rank(&vecs, seed);
            if r != count {
                return Err(format!("rank {r} vs {count}"));
            }
            Ok(())
        }));
    }
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Dimensions of walled Brauer algebras, the idempotent relation for the
/// cap-cup element.
pub fn walled_brauer_suite() -> Vec<CheckReport> {
    let mut out = Vec::new();
    let delta = Poly::delta(1);
    let session = Session::new(Category::Ob { delta: delta.clone() }).expect("certified engine");
    for r in 0..=4usize {
        for s in 0..=4 - r {
            out.push(run_check(format!("dim B({r},{s}) = {}", factorial(r + s)), || {
                let b = walled_brauer_algebra(&session, r, s).map_err(|e| e.to_string())?;
                if b.basis.len() != factorial(r + s) {
                    return Err(format!("{} basis elements", b.basis.len()));
                }
                Ok(())
            }));
        }
    }
    out.push(run_check("structure constant JSON is byte-stable", || {
        let render = || -> Result<String, String> {
            let fresh = Session::new(Category::Ob { delta: Poly::int(5) }).map_err(|e| e.to_string())?;
            let b = walled_brauer_algebra(&fresh, 2, 1).map_err(|e| e.to_string())?;
            Ok(crate::json::to_canonical(&crate::json::walled_brauer_to_json("ob", &b)))
        };
        let (a, b) = (render()?, render()?);
        if a != b {
            return Err("two runs differ".into());
        }
        Ok(())
    }));
    out.push(run_check("e.e = delta e in B(1,1)", || {
        let a = Word::parse("^v").unwrap();
        let e = transposition(&a, 1, 2).map_err(|x| x.to_string())?.scaled(&Poly::int(-1));
        let ee = session.compose(&e, &e).map_err(|x| x.to_string())?;
        if ee != e.scaled(&delta) {
            return Err(format!("{ee}"));
        }
        Ok(())
    }));
    out
}

/// Suite names accepted by [`run_suite`], in declaration order.
pub const SUITES: [&str; 8] = [
    "relations",
    "basis",
    "affine",
    "parameters",
    "cyclotomic",
    "level-one",
    "fuzz",
    "walled-brauer",
];

/// Runs one named suite. `lambda` is the pyramid for the relation suite.
pub fn run_suite(name: &str, lambda: &[u32], seed: u64) -> Option<Vec<CheckReport>> {
    Some(match name {
        "relations" => relation_suite(lambda),
        "basis" => cyclotomic_basis_suite(seed),
        "affine" => affine_independence_suite(seed),
        "parameters" => parameter_suite(),
        "cyclotomic" => cyclotomic_suite(),
        "level-one" => level_one_suite(seed),
        "fuzz" => {
            let rep = Rep::symbolic(&[2, 1]).expect("valid pyramid");
            vec![oracle_fuzz(&Engine::filtered(), &rep, seed, 200), mutation_check(&rep, seed)]
        }
        "walled-brauer" => walled_brauer_suite(),
        _ => return None,
    })
}

/// Runs suites on separate threads; reports come back in the order given.
pub fn run_suites(names: &[&str], lambda: &[u32], seed: u64) -> Option<Vec<CheckReport>> {
    if names.iter().any(|n| !SUITES.contains(n)) {
        return None;
    }
    let results: Vec<Vec<CheckReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|n| scope.spawn(move || run_suite(n, lambda, seed).expect("known suite")))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread")).collect()
    });
    Some(results.concat())
}

/// Every suite with its default parameters.
pub fn all_suites(seed: u64) -> Vec<CheckReport> {
    run_suites(&SUITES, &[2, 3, 2, 1, 1], seed).expect("known suites")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_hold() {
        for r in relation_suite(&[2, 2]) {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn eta_agrees_on_small_pyramid() {
        let p = Pyramid::new(&[1, 2]).unwrap();
        let m = vec![Poly::m(1), Poly::m(2)];
        let (a, b) = ((1..=3).find(|&i| p.col(i) == 1).unwrap(), (1..=3).find(|&i| p.col(i) == 2).unwrap());
        // a single step between adjacent columns has coefficient 1
        assert_eq!(eta_closed_form(&p, &m, a, b, 1), Poly::one());
        assert_eq!(eta_closed_form(&p, &m, a, b, 2), &Poly::m(1) + &Poly::m(2));
        assert_eq!(eta_closed_form(&p, &m, b, a, 2), Poly::zero());
        assert_eq!(eta_closed_form(&p, &m, b, b, 3), Poly::m(2).pow(3));
    }

    #[test]
    fn walled_brauer() {
        for r in walled_brauer_suite() {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn dual_polynomial_must_match_the_parameters() {
        let f = MonicPoly::from_roots(&[Poly::m(1), Poly::m(2)]);
        let wrong = MonicPoly::from_roots(&[&Poly::m(1) + &Poly::lam(1), &Poly::m(2) - &Poly::lam(2)]);
        let right = MonicPoly::from_roots(&[&Poly::m(1) - &Poly::lam(1), &Poly::m(2) - &Poly::lam(2)]);
        assert!(dual_dot_polynomial(&f, &right, &right).unwrap().is_zero());
        assert!(dual_dot_polynomial(&f, &wrong, &wrong).unwrap().is_zero());
        assert!(!dual_dot_polynomial(&f, &right, &wrong).unwrap().is_zero());
    }

    #[test]
    fn words_enumerated() {
        assert_eq!(words_up_to(2).len(), 7);
    }

    #[test]
    #[ignore]
    fn everything() {
        for r in all_suites(7) {
            println!("{}", r.line());
        }
    }
}
