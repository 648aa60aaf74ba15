//! The normalization engine.
//!
//! A slice word is rewritten by tracing its strands. Dots on open strands are
//! pushed along the orientation past crossings with the exchange rules until
//! they reach the outward end of their strand. Closed loops carrying dots are
//! opened by a partial-trace cut, normalized as open diagrams and closed up
//! again; the resulting bubbles are moved to the left edge. Undotted loops
//! contribute powers of `D1`.
//!
//! In graded mode the exchange rules carry no correction term.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use thiserror::Error;

use crate::diagrams::{
    bubble_slices, monomial_slices, to_slices, DiagramError, Dir, Gen, Matching, Morphism, NormalDiagram, Side, Slice,
    SliceWord, Word,
};
use crate::reps::{Rep, RepError};
use crate::scalars::{delta_prime_from_delta, Monomial, Poly, Sym};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("source/target mismatch: {0} vs {1}")]
    HomMismatch(String, String),
    #[error("rule `{0}` failed certification against the representation")]
    Certification(String),
    #[error("representation error: {0}")]
    Rep(#[from] RepError),
}

/// Filtered mode uses the corrected exchange rules; graded mode drops them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grading {
    Filtered,
    Graded,
}

impl Grading {
    pub fn correction(self) -> i64 {
        match self {
            Grading::Filtered => 1,
            Grading::Graded => 0,
        }
    }
}

/// Moving a dot along a strand through a crossing:
/// dot before = dot after - eps * correction * smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeRule {
    pub gen: Gen,
    /// Where the dotted strand enters the crossing.
    pub side: Side,
    pub offset: usize,
    pub eps: i64,
}

impl ExchangeRule {
    pub fn name(&self) -> String {
        let side = match self.side {
            Side::Bottom => "bottom",
            Side::Top => "top",
        };
        let off = if self.offset == 0 { "left" } else { "right" };
        format!("{} entering {}-{}", self.gen, side, off)
    }

    /// Local slice words (dot before, dot after, smoothing) on the crossing's source.
    pub fn sides(&self) -> (SliceWord, SliceWord, SliceWord) {
        let src = Word(self.gen.src().to_vec());
        let cross = Slice::new(0, self.gen);
        let o = self.offset;
        let (before, after) = match self.side {
            Side::Bottom => (
                vec![Slice::new(o, Gen::X), cross],
                vec![cross, Slice::new(1 - o, Gen::X)],
            ),
            Side::Top => (
                vec![cross, Slice::new(o, Gen::XRev)],
                vec![Slice::new(1 - o, Gen::XRev), cross],
            ),
        };
        (
            SliceWord::new(src.clone(), before).expect("typed"),
            SliceWord::new(src.clone(), after).expect("typed"),
            SliceWord::new(src, smoothing(self.gen, 0)).expect("typed"),
        )
    }
}

/// The oriented smoothing of a crossing at position p.
pub fn smoothing(gen: Gen, p: usize) -> Vec<Slice> {
    match gen {
        Gen::S | Gen::SRev => Vec::new(),
        Gen::T => vec![Slice::new(p, Gen::CapRev), Slice::new(p, Gen::CupRev)],
        Gen::TRev => vec![Slice::new(p, Gen::Cap), Slice::new(p, Gen::Cup)],
        _ => panic!("not a crossing"),
    }
}

/// The exchange rules plus the free slides of dots through cups and caps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub grading: Grading,
    pub exchange: Vec<ExchangeRule>,
}

impl RuleSet {
    pub fn eps(&self, gen: Gen, side: Side, offset: usize) -> i64 {
        self.exchange
            .iter()
            .find(|r| r.gen == gen && r.side == side && r.offset == offset)
            .map(|r| r.eps)
            .expect("rule table covers every crossing entry")
    }

    /// Flips the sign of one exchange rule. Used to check that certification
    /// and the oracle catch a wrong rule.
    pub fn corrupted(&self, index: usize) -> RuleSet {
        let mut r = self.clone();
        r.exchange[index].eps = -r.exchange[index].eps;
        r
    }

    /// The four free slides as (left, right) pairs of equal slice words.
    pub fn free_slides() -> Vec<(&'static str, SliceWord, SliceWord)> {
        let e = Word::empty();
        let w = |s: &str| Word::parse(s).unwrap();
        let sw = |src: &Word, v: Vec<Slice>| SliceWord::new(src.clone(), v).unwrap();
        vec![
            (
                "dot through c",
                sw(&e, vec![Slice::new(0, Gen::Cup), Slice::new(0, Gen::X)]),
                sw(&e, vec![Slice::new(0, Gen::Cup), Slice::new(1, Gen::XRev)]),
            ),
            (
                "dot through c'",
                sw(&e, vec![Slice::new(0, Gen::CupRev), Slice::new(0, Gen::XRev)]),
                sw(&e, vec![Slice::new(0, Gen::CupRev), Slice::new(1, Gen::X)]),
            ),
            (
                "dot through d",
                sw(&w("v^"), vec![Slice::new(0, Gen::XRev), Slice::new(0, Gen::Cap)]),
                sw(&w("v^"), vec![Slice::new(1, Gen::X), Slice::new(0, Gen::Cap)]),
            ),
            (
                "dot through d'",
                sw(&w("^v"), vec![Slice::new(0, Gen::X), Slice::new(0, Gen::CapRev)]),
                sw(&w("^v"), vec![Slice::new(1, Gen::XRev), Slice::new(0, Gen::CapRev)]),
            ),
        ]
    }
}

/// The eight exchange rules. The up-up and down-down signs are read off the
/// defining relations; the mixed ones come from conjugating by cups and caps.
pub fn derive_slide_rules(grading: Grading) -> RuleSet {
    use Side::*;
    let table = [
        (Gen::S, Bottom, 0, 1),
        (Gen::S, Bottom, 1, -1),
        (Gen::SRev, Top, 1, 1),
        (Gen::SRev, Top, 0, -1),
        (Gen::T, Bottom, 0, -1),
        (Gen::T, Top, 0, 1),
        (Gen::TRev, Bottom, 1, 1),
        (Gen::TRev, Top, 1, -1),
    ];
    RuleSet {
        grading,
        exchange: table
            .iter()
            .map(|&(gen, side, offset, eps)| ExchangeRule {
                gen,
                side,
                offset,
                eps,
            })
            .collect(),
    }
}

/// The oracle used for certification: the filtered representation for
/// filtered rules, the graded one for graded rules.
pub fn certification_rep(grading: Grading) -> Rep {
    match grading {
        Grading::Filtered => Rep::symbolic(&[2, 3, 2, 1, 1]).expect("valid pyramid"),
        Grading::Graded => Rep::phi(&[2, 3, 2, 1, 1]).expect("valid pyramid"),
    }
}

/// Checks every rule of the set against the given representation.
pub fn certify(rules: &RuleSet, rep: &Rep) -> Result<(), RewriteError> {
    let cc = Poly::int(rules.grading.correction());
    for r in &rules.exchange {
        let (before, after, smooth) = r.sides();
        let lhs = rep.eval_slices(&before)?;
        let mut rhs = rep.eval_slices(&after)?;
        rhs.add_scaled(&rep.eval_slices(&smooth)?, &(&cc * &Poly::int(-r.eps)));
        if lhs != rhs {
            return Err(RewriteError::Certification(r.name()));
        }
    }
    for (name, l, r) in RuleSet::free_slides() {
        if rep.eval_slices(&l)? != rep.eval_slices(&r)? {
            return Err(RewriteError::Certification(name.to_string()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Pt {
    level: usize,
    pos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ev {
    Dot(usize),
    Cross { slice: usize, side: Side, off: usize },
    Turn(usize),
}

#[derive(Debug, Clone)]
struct Step {
    ev: Option<Ev>,
    to: Pt,
}

#[derive(Debug, Clone)]
struct Strand {
    start: Pt,
    steps: Vec<Step>,
    closed: bool,
}

impl Strand {
    fn points(&self) -> impl Iterator<Item = Pt> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.to))
    }

    fn dots(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.ev, Some(Ev::Dot(_)))).count()
    }
}

struct Traced<'a> {
    w: &'a SliceWord,
    words: Vec<Word>,
    strands: Vec<Strand>,
}

impl<'a> Traced<'a> {
    fn new(w: &'a SliceWord) -> Traced<'a> {
        let words = w.words().expect("typed slice word");
        let mut t = Traced {
            w,
            words,
            strands: Vec::new(),
        };
        t.trace_all();
        t
    }

    fn letter(&self, p: Pt) -> Dir {
        self.words[p.level].get(p.pos)
    }

    fn step(&self, p: Pt) -> Option<(Option<Ev>, Pt)> {
        let n = self.w.slices.len();
        match self.letter(p) {
            Dir::Up => {
                if p.level == n {
                    return None;
                }
                let s = self.w.slices[p.level];
                let (ls, lt) = (s.gen.src().len(), s.gen.tgt().len());
                if p.pos < s.pos {
                    return Some((None, Pt { level: p.level + 1, pos: p.pos }));
                }
                if p.pos >= s.pos + ls {
                    return Some((None, Pt { level: p.level + 1, pos: p.pos + lt - ls }));
                }
                let o = p.pos - s.pos;
                match s.gen {
                    g if g.is_crossing() => Some((
                        Some(Ev::Cross { slice: p.level, side: Side::Bottom, off: o }),
                        Pt { level: p.level + 1, pos: s.pos + 1 - o },
                    )),
                    Gen::X => Some((Some(Ev::Dot(p.level)), Pt { level: p.level + 1, pos: p.pos })),
                    Gen::Cap | Gen::CapRev => Some((
                        Some(Ev::Turn(p.level)),
                        Pt { level: p.level, pos: s.pos + 1 - o },
                    )),
                    _ => unreachable!("up strand cannot enter {:?}", s.gen),
                }
            }
            Dir::Down => {
                if p.level == 0 {
                    return None;
                }
                let s = self.w.slices[p.level - 1];
                let (ls, lt) = (s.gen.src().len(), s.gen.tgt().len());
                if p.pos < s.pos {
                    return Some((None, Pt { level: p.level - 1, pos: p.pos }));
                }
                if p.pos >= s.pos + lt {
                    return Some((None, Pt { level: p.level - 1, pos: p.pos + ls - lt }));
                }
                let o = p.pos - s.pos;
                match s.gen {
                    g if g.is_crossing() => Some((
                        Some(Ev::Cross { slice: p.level - 1, side: Side::Top, off: o }),
                        Pt { level: p.level - 1, pos: s.pos + 1 - o },
                    )),
                    Gen::XRev => Some((Some(Ev::Dot(p.level - 1)), Pt { level: p.level - 1, pos: p.pos })),
                    Gen::Cup | Gen::CupRev => Some((
                        Some(Ev::Turn(p.level - 1)),
                        Pt { level: p.level, pos: s.pos + 1 - o },
                    )),
                    _ => unreachable!("down strand cannot enter {:?}", s.gen),
                }
            }
        }
    }

    fn trace_all(&mut self) {
        let n = self.w.slices.len();
        let mut seen: Vec<Vec<bool>> = self.words.iter().map(|w| vec![false; w.len()]).collect();
        let mut starts = Vec::new();
        for q in 0..self.words[0].len() {
            if self.words[0].get(q) == Dir::Up {
                starts.push(Pt { level: 0, pos: q });
            }
        }
        for q in 0..self.words[n].len() {
            if self.words[n].get(q) == Dir::Down {
                starts.push(Pt { level: n, pos: q });
            }
        }
        for st in starts {
            let mut steps = Vec::new();
            let mut cur = st;
            seen[cur.level][cur.pos] = true;
            while let Some((ev, nx)) = self.step(cur) {
                steps.push(Step { ev, to: nx });
                seen[nx.level][nx.pos] = true;
                cur = nx;
            }
            self.strands.push(Strand {
                start: st,
                steps,
                closed: false,
            });
        }
        for level in 0..=n {
            for pos in 0..self.words[level].len() {
                if seen[level][pos] {
                    continue;
                }
                let st = Pt { level, pos };
                let mut steps = Vec::new();
                let mut cur = st;
                seen[level][pos] = true;
                loop {
                    let (ev, nx) = self.step(cur).expect("loops have no ends");
                    steps.push(Step { ev, to: nx });
                    if nx == st {
                        break;
                    }
                    seen[nx.level][nx.pos] = true;
                    cur = nx;
                }
                self.strands.push(Strand {
                    start: st,
                    steps,
                    closed: true,
                });
            }
        }
    }

    /// Global endpoint index of a boundary point; `start` marks where a strand begins.
    fn endpoint(&self, p: Pt, start: bool) -> usize {
        if (self.letter(p) == Dir::Up) == start {
            p.pos
        } else {
            self.w.src.len() + p.pos
        }
    }
}

/// A sum of slice words, to be normalized.
pub type Combination = Vec<(SliceWord, Poly)>;

pub struct Engine {
    rules: RuleSet,
    nf_cache: Mutex<HashMap<SliceWord, Morphism>>,
    bubble_cache: Mutex<HashMap<(Word, u32), Morphism>>,
}

impl Engine {
    /// Builds an engine after certifying its rules.
    pub fn new(grading: Grading) -> Result<Engine, RewriteError> {
        let rules = derive_slide_rules(grading);
        certify(&rules, &certification_rep(grading))?;
        Ok(Engine::with_rules(rules))
    }

    /// An engine using the given rules without certification.
    pub fn with_rules(rules: RuleSet) -> Engine {
        Engine {
            rules,
            nf_cache: Mutex::new(HashMap::new()),
            bubble_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn filtered() -> Engine {
        Engine::with_rules(derive_slide_rules(Grading::Filtered))
    }

    pub fn graded() -> Engine {
        Engine::with_rules(derive_slide_rules(Grading::Graded))
    }

    pub fn grading(&self) -> Grading {
        self.rules.grading
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// Normal form of a slice word.
    pub fn normalize(&self, w: &SliceWord) -> Result<Morphism, RewriteError> {
        w.words()?;
        Ok(self.nf(w))
    }

    /// Normal form of a linear combination of slice words of one type.
    pub fn normalize_sum(&self, terms: &[(SliceWord, Poly)], src: &Word, tgt: &Word) -> Result<Morphism, RewriteError> {
        let mut out = Morphism::zero(src, tgt);
        for (w, c) in terms {
            let ws = w.words()?;
            if &w.src != src || ws.last().unwrap() != tgt {
                return Err(RewriteError::HomMismatch(
                    format!("{} -> {}", src, tgt),
                    format!("{} -> {}", w.src, ws.last().unwrap()),
                ));
            }
            out.add_scaled(&self.nf(w), c);
        }
        Ok(out)
    }

    /// Clockwise and counterclockwise bubbles with `k - 1` dots as polynomials
    /// in the clockwise parameters.
    pub fn bubble_value(&self, clockwise: bool, k: u32) -> Poly {
        if clockwise || self.grading() == Grading::Graded {
            Poly::delta(k)
        } else {
            let ds: Vec<Poly> = (1..=k).map(Poly::delta).collect();
            delta_prime_from_delta(&ds, k as usize).pop().unwrap()
        }
    }

    fn nf(&self, w: &SliceWord) -> Morphism {
        if let Some(m) = self.nf_cache.lock().unwrap().get(w) {
            return m.clone();
        }
        let m = self.nf_uncached(w);
        self.nf_cache.lock().unwrap().insert(w.clone(), m.clone());
        m
    }

    fn nf_uncached(&self, w: &SliceWord) -> Morphism {
        let t = Traced::new(w);
        let src = &t.words[0];
        let tgt = t.words.last().unwrap();
        // a dot on an open strand with a crossing still ahead of it
        let mut best: Option<(usize, usize, usize)> = None;
        for (si, st) in t.strands.iter().enumerate() {
            if st.closed {
                continue;
            }
            let last_cross = st.steps.iter().rposition(|s| matches!(s.ev, Some(Ev::Cross { .. })));
            let Some(lc) = last_cross else { continue };
            for (k, s) in st.steps[..lc].iter().enumerate() {
                if let Some(Ev::Dot(d)) = s.ev {
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, si, k));
                    }
                }
            }
        }
        if let Some((d, si, k)) = best {
            return self.exchange(&t, d, si, k);
        }
        if let Some(li) = t.strands.iter().position(|s| s.closed && s.dots() > 0) {
            if let Some(m) = self.direct_bubble(&t, li) {
                return m;
            }
            return self.right_cut(&t, li);
        }
        // read off the normal diagram
        let n_ends = src.len() + tgt.len();
        let mut pair = vec![0; n_ends];
        let mut dots = vec![0; n_ends];
        let mut loops = 0u32;
        for st in &t.strands {
            if st.closed {
                loops += 1;
                continue;
            }
            let a = t.endpoint(st.start, true);
            let b = t.endpoint(st.steps.last().map_or(st.start, |s| s.to), false);
            pair[a] = b;
            pair[b] = a;
            dots[b] = st.dots() as u32;
        }
        let m = Matching::from_pairs(src.clone(), tgt.clone(), pair).expect("traced matching");
        let d = NormalDiagram::new(m, dots).expect("dots on outputs");
        Morphism::from_diagram(d, Poly::delta(1).pow(loops))
    }

    fn exchange(&self, t: &Traced, dot: usize, si: usize, k: usize) -> Morphism {
        let st = &t.strands[si];
        let (ci, cstep) = st.steps[k + 1..]
            .iter()
            .enumerate()
            .find(|(_, s)| matches!(s.ev, Some(Ev::Cross { .. })))
            .map(|(i, s)| (k + 1 + i, s))
            .unwrap();
        let _ = ci;
        let Some(Ev::Cross { slice: cs, side, off }) = cstep.ev else { unreachable!() };
        let exit = cstep.to;
        let slices = &t.w.slices;
        // dot moved past the crossing
        let mut after = slices.clone();
        after.insert(exit.level, Slice::new(exit.pos, Gen::dot(t.letter(exit))));
        let old = if dot >= exit.level { dot + 1 } else { dot };
        after.remove(old);
        let w_after = SliceWord {
            src: t.w.src.clone(),
            slices: after,
        };
        let mut out = self.nf(&w_after);
        let eps = self.rules.eps(slices[cs].gen, side, off) * self.rules.grading.correction();
        if eps != 0 {
            let mut smooth = Vec::with_capacity(slices.len() + 1);
            for (i, s) in slices.iter().enumerate() {
                if i == dot {
                    continue;
                }
                if i == cs {
                    smooth.extend(smoothing(s.gen, s.pos));
                } else {
                    smooth.push(*s);
                }
            }
            let w_smooth = SliceWord {
                src: t.w.src.clone(),
                slices: smooth,
            };
            out.add_scaled(&self.nf(&w_smooth), &Poly::int(-eps));
        }
        out
    }

    /// A loop at positions 0 and 1 made of one cup, one cap and dots.
    fn direct_bubble(&self, t: &Traced, li: usize) -> Option<Morphism> {
        let st = &t.strands[li];
        if st.points().any(|p| p.pos > 1) {
            return None;
        }
        let mut turns = Vec::new();
        let mut dots = Vec::new();
        for s in &st.steps {
            match s.ev {
                Some(Ev::Cross { .. }) => return None,
                Some(Ev::Turn(i)) => turns.push(i),
                Some(Ev::Dot(i)) => dots.push(i),
                None => {}
            }
        }
        if turns.len() != 2 {
            return None;
        }
        let (lo, hi) = (turns[0].min(turns[1]), turns[0].max(turns[1]));
        let cup = t.w.slices[lo].gen;
        let clockwise = match cup {
            Gen::Cup => true,
            Gen::CupRev => false,
            _ => return None,
        };
        let mut rest = Vec::new();
        for (i, s) in t.w.slices.iter().enumerate() {
            if i == lo || i == hi || dots.contains(&i) {
                continue;
            }
            if i > lo && i < hi {
                rest.push(Slice::new(s.pos - 2, s.gen));
            } else {
                rest.push(*s);
            }
        }
        let w = SliceWord {
            src: t.w.src.clone(),
            slices: rest,
        };
        let c = self.bubble_value(clockwise, dots.len() as u32 + 1);
        Some(self.nf(&w).scaled(&c))
    }

    /// Opens a loop next to an extra strand on the right, normalizes, and
    /// closes the extra strand again.
    fn right_cut(&self, t: &Traced, li: usize) -> Morphism {
        let st = &t.strands[li];
        let cut = st
            .points()
            .max_by_key(|p| (p.pos, std::cmp::Reverse(p.level)))
            .unwrap();
        let sigma = t.letter(cut);
        let h = cut.level;
        let mut word = t.words[h].0.clone();
        let r = word.len();
        let mut q = Vec::new();
        for i in cut.pos..r - 1 {
            q.push(Slice::new(i, Gen::crossing(word[i], word[i + 1])));
            word.swap(i, i + 1);
        }
        let mut qinv = Vec::new();
        for i in (cut.pos..r - 1).rev() {
            qinv.push(Slice::new(i, Gen::crossing(word[i], word[i + 1])));
            word.swap(i, i + 1);
        }
        let mut slices: Vec<Slice> = t.w.slices[..h].to_vec();
        slices.extend(q);
        slices.push(Slice::new(r - 1, Gen::crossing(sigma, sigma)));
        slices.extend(qinv);
        slices.extend_from_slice(&t.w.slices[h..]);
        let mut src = t.w.src.clone();
        src.0.push(sigma);
        let e = SliceWord { src, slices };
        let ne = self.nf(&e);
        let a = &t.words[0];
        let b = t.words.last().unwrap();
        let mut out = Morphism::zero(a, b);
        for (n, c) in &ne.terms {
            let m = &n.matching;
            let bl = a.len();
            let tl = a.len() + 1 + b.len();
            if m.partner(bl) == tl {
                let output = if sigma == Dir::Up { tl } else { bl };
                let k = n.dots_on(output);
                let rest = remove_strand(n, bl, tl);
                let bubble = self.bubble_value(sigma == Dir::Up, k + 1);
                let right = self.bubble_poly_right(b, &bubble);
                let comp = self.compose_nf(&right, &Morphism::from_diagram(rest, Poly::one()));
                out.add_scaled(&comp, c);
            } else {
                let (open, close) = match sigma {
                    Dir::Up => (Gen::Cup, Gen::CapRev),
                    Dir::Down => (Gen::CupRev, Gen::Cap),
                };
                let inner = to_slices(n, &Monomial::one());
                let mut sl = vec![Slice::new(a.len(), open)];
                sl.extend(inner.slices);
                sl.push(Slice::new(b.len(), close));
                let wc = SliceWord { src: a.clone(), slices: sl };
                out.add_scaled(&self.nf(&wc), c);
            }
        }
        out
    }

    /// Normal form of `1_b ⊗ D_k`.
    pub fn bubble_right(&self, b: &Word, k: u32) -> Morphism {
        if k == 1 || b.is_empty() || self.grading() == Grading::Graded {
            return Morphism::identity(b).scaled(&Poly::delta(k));
        }
        let key = (b.clone(), k);
        if let Some(m) = self.bubble_cache.lock().unwrap().get(&key) {
            return m.clone();
        }
        let m = if b.len() == 1 {
            self.slide_one(b.get(0), k)
        } else {
            let prefix = b.slice(0, b.len() - 1);
            let last = b.slice(b.len() - 1, b.len());
            let single = self.bubble_right(&last, k);
            let mut out = Morphism::zero(b, b);
            for (d, c) in &single.terms {
                let left = self.bubble_poly_right(&prefix, c);
                for (ld, lc) in &left.terms {
                    out.add_term(NormalDiagram::tensor(ld, d), lc.clone());
                }
            }
            out
        };
        self.bubble_cache.lock().unwrap().insert(key, m.clone());
        m
    }

    /// `1_b ⊗ p` for a polynomial p in the bubble parameters (other symbols
    /// are scalars).
    pub fn bubble_poly_right(&self, b: &Word, p: &Poly) -> Morphism {
        let mut out = Morphism::zero(b, b);
        for (mono, c) in p.terms() {
            let (bub, rest) = mono.split(|s| matches!(s, Sym::Delta(_)));
            let mut acc = Morphism::identity(b).scaled(&Poly::monomial(rest, c.clone()));
            for &(s, e) in bub.pairs() {
                let Sym::Delta(k) = s else { unreachable!() };
                if k == 1 {
                    acc = acc.scaled(&Poly::delta(1).pow(e));
                    continue;
                }
                let f = self.bubble_right(b, k);
                for _ in 0..e {
                    acc = self.compose_nf(&f, &acc);
                }
            }
            out.add_scaled(&acc, &Poly::one());
        }
        out
    }

    /// `1_σ ⊗ D_k` by cutting the bubble open against a strand on the left.
    fn slide_one(&self, sigma: Dir, k: u32) -> Morphism {
        let a = Word(vec![sigma]);
        // the loop is cut just above its cup, where it points up at position 1
        let tau = Dir::Up;
        let mut slices = bubble_slices(1, k);
        slices.insert(1, Slice::new(0, Gen::crossing(sigma, tau)));
        slices.insert(2, Slice::new(0, Gen::crossing(tau, sigma)));
        let mut e_slices: Vec<Slice> = slices[..2].iter().map(|s| Slice::new(s.pos + 1, s.gen)).collect();
        e_slices.push(Slice::new(0, Gen::crossing(tau, tau)));
        e_slices.extend(slices[2..].iter().map(|s| Slice::new(s.pos + 1, s.gen)));
        let e = SliceWord {
            src: Word(vec![tau, sigma]),
            slices: e_slices,
        };
        let ne = self.nf(&e);
        let mut out = Morphism::zero(&a, &a);
        for (n, c) in &ne.terms {
            let (pure, dotted) = split_undotted(c);
            if !pure.is_zero() && n.matching.partner(0) == 2 {
                let kk = n.dots_on(2);
                let bubble = self.bubble_value(false, kk + 1);
                out.add_term(remove_strand(n, 0, 2), &pure * &bubble);
            } else if !pure.is_zero() {
                out.add_scaled(&self.nf(&left_closure(n, &Monomial::one())), &pure);
            }
            // dotted bubbles of the opened form end up inside the closed loop
            for (mono, cc) in dotted {
                out.add_scaled(&self.nf(&left_closure(n, &mono)), &cc);
            }
        }
        out
    }

    /// Composite of two normal forms `f ∘ g`.
    fn compose_nf(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let mut out = Morphism::zero(&g.src, &f.tgt);
        for (dg, cg) in &g.terms {
            let wg = to_slices(dg, &Monomial::one());
            for (df, cf) in &f.terms {
                let wf = to_slices(df, &Monomial::one());
                out.add_scaled(&self.nf(&wg.then(&wf)), &(cf * cg));
            }
        }
        out
    }

    /// `f ∘ g`.
    pub fn compose(&self, f: &Morphism, g: &Morphism) -> Result<Morphism, RewriteError> {
        if f.src != g.tgt {
            return Err(RewriteError::Diagram(DiagramError::TypeMismatch {
                expected: f.src.clone(),
                found: g.tgt.clone(),
            }));
        }
        Ok(self.compose_nf(f, g))
    }

    /// `f ⊗ g` with f on the left.
    pub fn tensor(&self, f: &Morphism, g: &Morphism) -> Result<Morphism, RewriteError> {
        let src = f.src.concat(&g.src);
        let tgt = f.tgt.concat(&g.tgt);
        let mut out = Morphism::zero(&src, &tgt);
        for (dg, cg) in &g.terms {
            // bubbles of g sit right of f's strands: 1_{a_f} ⊗ cg ⊗ dg
            let moved = self.bubble_poly_right(&f.src, cg);
            let lower = self.tensor_diagrams(&moved, &Morphism::from_diagram(dg.clone(), Poly::one()));
            for (df, cf) in &f.terms {
                let upper = Morphism::from_diagram(
                    NormalDiagram::tensor(df, &NormalDiagram::identity(&g.tgt)),
                    cf.clone(),
                );
                out.add_scaled(&self.compose_nf(&upper, &lower), &Poly::one());
            }
        }
        Ok(out)
    }

    /// Tensor of normal forms where the right factor carries no bubbles.
    fn tensor_diagrams(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let mut out = Morphism::zero(&f.src.concat(&g.src), &f.tgt.concat(&g.tgt));
        for (df, cf) in &f.terms {
            for (dg, cg) in &g.terms {
                debug_assert!(!cg.mentions(|s| matches!(s, Sym::Delta(k) if k > 1)));
                out.add_term(NormalDiagram::tensor(df, dg), cf * cg);
            }
        }
        out
    }

    /// Decides equality of morphisms in the same hom space.
    pub fn equals(&self, f: &Morphism, g: &Morphism) -> Result<bool, RewriteError> {
        if f.src != g.src || f.tgt != g.tgt {
            return Err(RewriteError::HomMismatch(
                format!("{} -> {}", f.src, f.tgt),
                format!("{} -> {}", g.src, g.tgt),
            ));
        }
        Ok((f - g).is_zero())
    }

    /// The degree-i part of a filtered normal form, read as a graded morphism.
    pub fn associated_graded(&self, f: &Morphism, i: u32) -> Morphism {
        f.homogeneous_part(i)
    }
}

/// Removes the strand joining endpoints `lo` (bottom) and `hi` (top).
fn remove_strand(n: &NormalDiagram, lo: usize, hi: usize) -> NormalDiagram {
    let m = &n.matching;
    let mut src = m.src.clone();
    let mut tgt = m.tgt.clone();
    let keep: Vec<usize> = (0..m.n_ends()).filter(|&e| e != lo && e != hi).collect();
    let mut new_index = vec![usize::MAX; m.n_ends()];
    for (i, &e) in keep.iter().enumerate() {
        new_index[e] = i;
    }
    src.0.remove(lo);
    tgt.0.remove(hi - m.src.len());
    let pair: Vec<usize> = keep.iter().map(|&e| new_index[m.partner(e)]).collect();
    let dots: Vec<u32> = keep.iter().map(|&e| n.dots_on(e)).collect();
    let mm = Matching::from_pairs(src, tgt, pair).expect("strand removal keeps a matching");
    NormalDiagram::new(mm, dots).expect("dots stay on outputs")
}

/// Splits a coefficient into its part free of dotted bubbles and the list of
/// (dotted bubble monomial, remaining coefficient) pairs.
fn split_undotted(c: &Poly) -> (Poly, Vec<(Monomial, Poly)>) {
    let mut pure = Poly::zero();
    let mut dotted: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, v) in c.terms() {
        let (hi, lo) = m.split(|s| matches!(s, Sym::Delta(k) if k > 1));
        if hi.is_one() {
            pure.add_term(m.clone(), v.clone());
        } else {
            dotted.entry(hi).or_default().add_term(lo, v.clone());
        }
    }
    (pure, dotted.into_iter().collect())
}

/// Closes the leftmost (upward) strand of `n` around the left edge, with the
/// bubbles of `mono` drawn just inside the closing strand.
fn left_closure(n: &NormalDiagram, mono: &Monomial) -> SliceWord {
    let inner = to_slices(n, &Monomial::one());
    let src = n.src().slice(1, n.src().len());
    let mut sl = vec![Slice::new(0, Gen::CupRev)];
    sl.extend(monomial_slices(mono, 1, true));
    sl.extend(inner.slices.iter().map(|s| Slice::new(s.pos + 1, s.gen)));
    sl.push(Slice::new(0, Gen::Cap));
    SliceWord { src, slices: sl }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::random_slice_word;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sw(src: &str, sl: &[(usize, Gen)]) -> SliceWord {
        SliceWord::new(Word::parse(src).unwrap(), sl.iter().map(|&(p, g)| Slice::new(p, g)).collect()).unwrap()
    }

    #[test]
    fn rules_certify() {
        for g in [Grading::Filtered, Grading::Graded] {
            certify(&derive_slide_rules(g), &certification_rep(g)).unwrap();
        }
    }

    #[test]
    fn corrupted_rules_fail_certification() {
        let rules = derive_slide_rules(Grading::Filtered);
        let rep = certification_rep(Grading::Filtered);
        for i in 0..rules.exchange.len() {
            assert!(certify(&rules.corrupted(i), &rep).is_err(), "rule {i}");
        }
    }

    #[test]
    fn dot_through_crossing() {
        let e = Engine::filtered();
        let lhs = e.normalize(&sw("^^", &[(0, Gen::X), (0, Gen::S)])).unwrap();
        let rhs = e.normalize(&sw("^^", &[(0, Gen::S), (1, Gen::X)])).unwrap();
        assert_eq!(&lhs - &rhs, Morphism::identity(&Word::parse("^^").unwrap()).scaled(&Poly::int(-1)));
        let g = Engine::graded();
        assert_eq!(
            g.normalize(&sw("^^", &[(0, Gen::X), (0, Gen::S)])).unwrap(),
            g.normalize(&sw("^^", &[(0, Gen::S), (1, Gen::X)])).unwrap()
        );
    }

    #[test]
    fn bubbles() {
        let e = Engine::filtered();
        let cw = e.normalize(&sw("0", &[(0, Gen::Cup), (0, Gen::X), (0, Gen::CapRev)])).unwrap();
        assert_eq!(cw.terms.values().next().unwrap(), &Poly::delta(2));
        let ccw = e.normalize(&sw("0", &[(0, Gen::CupRev), (0, Gen::XRev), (0, Gen::Cap)])).unwrap();
        let expect = &Poly::delta(2) - &Poly::delta(1).pow(2);
        assert_eq!(ccw.terms.values().next().unwrap(), &expect);
        let plain = e.normalize(&sw("0", &[(0, Gen::CupRev), (0, Gen::Cap)])).unwrap();
        assert_eq!(plain.terms.values().next().unwrap(), &Poly::delta(1));
    }

    #[test]
    fn t_inverts_x() {
        let e = Engine::filtered();
        // X = (d ^ v)(v s v)(v ^ c) on v^, preceded by t
        let w = sw("^v", &[(0, Gen::T), (2, Gen::Cup), (1, Gen::S), (0, Gen::Cap)]);
        assert_eq!(w.tgt(), Word::parse("^v").unwrap());
        assert_eq!(e.normalize(&w).unwrap(), Morphism::identity(&Word::parse("^v").unwrap()));
    }

    #[test]
    fn bubble_slides_past_strand() {
        let e = Engine::filtered();
        let up = Word::parse("^").unwrap();
        let m = e.bubble_right(&up, 2);
        assert_eq!(m.homogeneous_part(1), Morphism::identity(&up).scaled(&Poly::delta(2)));
        let rep = Rep::symbolic(&[2, 2]).unwrap();
        let mut sl = vec![];
        sl.extend(bubble_slices(1, 2));
        let direct = rep.eval_slices(&SliceWord::new(up.clone(), sl).unwrap()).unwrap();
        assert_eq!(rep.eval_morphism(&m).unwrap(), direct);
    }

    #[test]
    fn tensor_matches_slice_rendering() {
        let e = Engine::filtered();
        let rep = Rep::symbolic(&[1, 2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let fw = random_slice_word(&mut rng, &Word::parse("^").unwrap(), 4, 2, 3);
            let gw = random_slice_word(&mut rng, &Word::parse("v").unwrap(), 4, 2, 3);
            let mut f = e.normalize(&fw).unwrap();
            let g = e.normalize(&gw).unwrap();
            // put a dotted bubble into g's coefficients
            let g = g.scaled(&Poly::delta(2));
            f = f.scaled(&Poly::int(2));
            let t = e.tensor(&f, &g).unwrap();
            let mut sl: Vec<Slice> = bubble_slices(1, 2);
            sl.extend(gw.slices.iter().map(|s| Slice::new(s.pos + 1, s.gen)));
            sl.extend(fw.slices.iter().copied());
            let direct = SliceWord::new(Word::parse("^v").unwrap(), sl).unwrap();
            let lhs = rep.eval_slices(&direct).unwrap().scale(&Poly::int(2));
            assert_eq!(lhs, rep.eval_morphism(&t).unwrap());
        }
    }

    fn oracle_check(e: &Engine, rep: &Rep, seed: u64, count: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let len = i % 3;
            let src = Word((0..len).map(|_| if rand::Rng::gen_bool(&mut rng, 0.5) { Dir::Up } else { Dir::Down }).collect());
            let w = random_slice_word(&mut rng, &src, 8, 4, 3);
            let nf = e.normalize(&w).unwrap();
            let lhs = rep.eval_slices(&w).unwrap();
            let rhs = rep.eval_morphism(&nf).unwrap();
            assert_eq!(lhs, rhs, "word {w}");
        }
    }

    #[test]
    fn normal_forms_agree_with_filtered_oracle() {
        oracle_check(&Engine::filtered(), &Rep::symbolic(&[2, 1]).unwrap(), 7, 150);
    }

    #[test]
    fn normal_forms_agree_with_graded_oracle() {
        oracle_check(&Engine::graded(), &Rep::phi(&[2, 1]).unwrap(), 8, 150);
    }
}

#[cfg(test)]
mod stress {
    use super::*;
    use crate::diagrams::random_slice_word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    #[ignore]
    fn stress_oracle() {
        let e = Engine::filtered();
        let rep = Rep::symbolic(&[1, 2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let t0 = std::time::Instant::now();
        let mut loops = 0;
        for i in 0..600 {
            let len = i % 3;
            let src = Word((0..len).map(|_| if rng.gen_bool(0.5) { Dir::Up } else { Dir::Down }).collect());
            let w = random_slice_word(&mut rng, &src, 10, 4, 4);
            if Traced::new(&w).strands.iter().any(|s| s.closed && s.dots() > 0) {
                loops += 1;
            }
            let nf = e.normalize(&w).unwrap();
            assert_eq!(rep.eval_slices(&w).unwrap(), rep.eval_morphism(&nf).unwrap(), "word {w}");
        }
        eprintln!("dotted-loop words {loops}, {:?}", t0.elapsed());
    }
}
