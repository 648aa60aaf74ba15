//! Words, oriented Brauer matchings, normally ordered diagrams and slice words.
//!
//! Endpoints of a diagram of type `a -> b` are numbered globally: bottom
//! position `i` is `i`, top position `j` is `a.len() + j` (all 0-based).
//! Inputs are bottom `Up` and top `Down` endpoints; outputs are top `Up` and
//! bottom `Down` endpoints. A strand is identified with its output endpoint.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use num_traits::One;

use crate::scalars::{Monomial, Poly, Rat, Sym};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("bad word `{0}`: use `^`, `v` or `0`")]
    BadWord(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: Word, found: Word },
    #[error("slice {index} ({gen}) does not fit at position {pos} of word {word}")]
    IllTyped {
        index: usize,
        gen: Gen,
        pos: usize,
        word: Word,
    },
    #[error("not a bijection from inputs to outputs")]
    NotBijection,
    #[error("dots are not allowed here")]
    Dotted,
    #[error("the requested family is infinite; give a finite dot or degree bound")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Up,
    Down,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Dir::Up => '^',
            Dir::Down => 'v',
        }
    }
}

/// An object: a finite sequence of orientations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Dir>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn up(n: usize) -> Word {
        Word(vec![Dir::Up; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Dir {
        self.0[i]
    }

    pub fn parse(s: &str) -> Result<Word, DiagramError> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Word::empty());
        }
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '^' | 'u' | 'U' | '↑' => Ok(Dir::Up),
                'v' | 'd' | 'D' | '↓' => Ok(Dir::Down),
                _ => Err(DiagramError::BadWord(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Reverse and flip every letter.
    pub fn dual(&self) -> Word {
        Word(self.0.iter().rev().map(|d| d.flip()).collect())
    }

    pub fn flipped(&self) -> Word {
        Word(self.0.iter().map(|d| d.flip()).collect())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// The counts of `Up` and `Down` letters.
    pub fn counts(&self) -> (usize, usize) {
        let up = self.0.iter().filter(|d| **d == Dir::Up).count();
        (up, self.0.len() - up)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for d in &self.0 {
            write!(f, "{}", d.symbol())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub side: Side,
    /// 0-based position in the word on that side.
    pub pos: usize,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.side {
            Side::Bottom => 'b',
            Side::Top => 't',
        };
        write!(f, "{}{}", c, self.pos + 1)
    }
}

impl Endpoint {
    pub fn parse(s: &str) -> Option<Endpoint> {
        let side = match s.chars().next()? {
            'b' => Side::Bottom,
            't' => Side::Top,
            _ => return None,
        };
        let n: usize = s[1..].parse().ok()?;
        (n >= 1).then_some(Endpoint { side, pos: n - 1 })
    }
}

/// An oriented Brauer diagram up to equivalence: a perfect matching of the
/// endpoints pairing every input with an output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    pub src: Word,
    pub tgt: Word,
    pair: Vec<usize>,
}

impl Matching {
    pub fn n_ends(&self) -> usize {
        self.src.len() + self.tgt.len()
    }

    pub fn endpoint(&self, e: usize) -> Endpoint {
        if e < self.src.len() {
            Endpoint {
                side: Side::Bottom,
                pos: e,
            }
        } else {
            Endpoint {
                side: Side::Top,
                pos: e - self.src.len(),
            }
        }
    }

    pub fn index(&self, ep: Endpoint) -> usize {
        match ep.side {
            Side::Bottom => ep.pos,
            Side::Top => self.src.len() + ep.pos,
        }
    }

    pub fn is_input(&self, e: usize) -> bool {
        is_input(&self.src, &self.tgt, e)
    }

    pub fn partner(&self, e: usize) -> usize {
        self.pair[e]
    }

    pub fn pairs(&self) -> &[usize] {
        &self.pair
    }

    pub fn inputs(&self) -> Vec<usize> {
        (0..self.n_ends()).filter(|&e| self.is_input(e)).collect()
    }

    pub fn outputs(&self) -> Vec<usize> {
        (0..self.n_ends()).filter(|&e| !self.is_input(e)).collect()
    }

    /// Output endpoint for each input, inputs in ascending order.
    pub fn flat(&self) -> Vec<usize> {
        self.inputs().into_iter().map(|i| self.pair[i]).collect()
    }

    /// Builds a matching from an involution on endpoints, checking that every
    /// pair joins an input to an output.
    pub fn from_pairs(src: Word, tgt: Word, pair: Vec<usize>) -> Result<Matching, DiagramError> {
        let n = src.len() + tgt.len();
        if pair.len() != n {
            return Err(DiagramError::NotBijection);
        }
        for e in 0..n {
            let p = pair[e];
            if p >= n || p == e || pair[p] != e || is_input(&src, &tgt, e) == is_input(&src, &tgt, p) {
                return Err(DiagramError::NotBijection);
            }
        }
        Ok(Matching { src, tgt, pair })
    }

    /// Builds a matching from the output chosen for each input (ascending).
    pub fn from_flat(src: Word, tgt: Word, flat: &[usize]) -> Result<Matching, DiagramError> {
        let n = src.len() + tgt.len();
        let ins: Vec<usize> = (0..n).filter(|&e| is_input(&src, &tgt, e)).collect();
        if ins.len() != flat.len() {
            return Err(DiagramError::NotBijection);
        }
        let mut pair = vec![usize::MAX; n];
        for (&i, &o) in ins.iter().zip(flat) {
            if o >= n || pair[o] != usize::MAX {
                return Err(DiagramError::NotBijection);
            }
            pair[i] = o;
            pair[o] = i;
        }
        Matching::from_pairs(src, tgt, pair)
    }

    pub fn identity(a: &Word) -> Matching {
        let k = a.len();
        let mut pair = vec![0; 2 * k];
        for i in 0..k {
            pair[i] = k + i;
            pair[k + i] = i;
        }
        Matching {
            src: a.clone(),
            tgt: a.clone(),
            pair,
        }
    }

    /// `f` placed to the left of `g`.
    pub fn tensor(f: &Matching, g: &Matching) -> Matching {
        let src = f.src.concat(&g.src);
        let tgt = f.tgt.concat(&g.tgt);
        let (fa, ga) = (f.src.len(), g.src.len());
        let fb = f.tgt.len();
        let map_f = |e: usize| if e < fa { e } else { fa + ga + (e - fa) };
        let map_g = |e: usize| if e < ga { fa + e } else { fa + ga + fb + (e - ga) };
        let mut pair = vec![0; src.len() + tgt.len()];
        for e in 0..f.n_ends() {
            pair[map_f(e)] = map_f(f.pair[e]);
        }
        for e in 0..g.n_ends() {
            pair[map_g(e)] = map_g(g.pair[e]);
        }
        Matching { src, tgt, pair }
    }

    /// The matching with all orientations reversed.
    pub fn reversed(&self) -> Matching {
        Matching {
            src: self.src.flipped(),
            tgt: self.tgt.flipped(),
            pair: self.pair.clone(),
        }
    }

    /// True if the strand through `e` joins bottom to top.
    pub fn is_through(&self, e: usize) -> bool {
        (e < self.src.len()) != (self.pair[e] < self.src.len())
    }
}

fn is_input(src: &Word, tgt: &Word, e: usize) -> bool {
    if e < src.len() {
        src.get(e) == Dir::Up
    } else {
        tgt.get(e - src.len()) == Dir::Down
    }
}

impl PartialOrd for Matching {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matching {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.src, &self.tgt, self.flat()).cmp(&(&other.src, &other.tgt, other.flat()))
    }
}

/// All matchings of type `a -> b`, ordered lexicographically by `flat`.
pub fn enumerate_matchings(a: &Word, b: &Word) -> Vec<Matching> {
    let n = a.len() + b.len();
    let ins: Vec<usize> = (0..n).filter(|&e| is_input(a, b, e)).collect();
    let outs: Vec<usize> = (0..n).filter(|&e| !is_input(a, b, e)).collect();
    if ins.len() != outs.len() {
        return Vec::new();
    }
    let mut result = Vec::new();
    let mut used = vec![false; outs.len()];
    let mut cur = Vec::with_capacity(outs.len());
    fn rec(
        outs: &[usize],
        used: &mut [bool],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == outs.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..outs.len() {
            if !used[i] {
                used[i] = true;
                cur.push(outs[i]);
                rec(outs, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut flats = Vec::new();
    rec(&outs, &mut used, &mut cur, &mut flats);
    for f in flats {
        result.push(Matching::from_flat(a.clone(), b.clone(), &f).expect("enumerated matching"));
    }
    result
}

/// Stacks `upper` on top of `lower`, returning the composite and the number
/// of closed loops formed in the middle.
pub fn compose_matchings(upper: &Matching, lower: &Matching) -> Result<(Matching, usize), DiagramError> {
    if upper.src != lower.tgt {
        return Err(DiagramError::TypeMismatch {
            expected: upper.src.clone(),
            found: lower.tgt.clone(),
        });
    }
    let a = lower.src.len();
    let b = lower.tgt.len();
    let c = upper.tgt.len();
    // node ids: lower ends 0..a+b (middle = a..a+b), upper top ends a+b..a+b+c
    let mut pair = vec![usize::MAX; a + c];
    let mut mid_seen = vec![false; b];
    // walk from an outer endpoint; `cur` is a node in one of the two diagrams
    let walk = |start_lower: bool, start: usize, mid_seen: &mut Vec<bool>| -> (bool, usize) {
        let (mut in_lower, mut e) = (start_lower, start);
        loop {
            if in_lower {
                let p = lower.pair[e];
                if p < a {
                    return (true, p);
                }
                mid_seen[p - a] = true;
                in_lower = false;
                e = p - a;
            } else {
                let p = upper.pair[e];
                if p >= b {
                    return (false, p - b);
                }
                mid_seen[p] = true;
                in_lower = true;
                e = a + p;
            }
        }
    };
    for (i, slot) in pair.iter_mut().enumerate().take(a) {
        let (low, p) = walk(true, i, &mut mid_seen);
        *slot = if low { p } else { a + p };
    }
    for j in 0..c {
        let (low, p) = walk(false, b + j, &mut mid_seen);
        pair[a + j] = if low { p } else { a + p };
    }
    // remaining middle points lie on loops
    let mut loops = 0;
    for m in 0..b {
        if mid_seen[m] {
            continue;
        }
        loops += 1;
        let mut e = m;
        loop {
            mid_seen[e] = true;
            let p = upper.pair[e];
            mid_seen[p] = true;
            let q = lower.pair[a + p] - a;
            if q == m {
                break;
            }
            e = q;
        }
    }
    let m = Matching::from_pairs(lower.src.clone(), upper.tgt.clone(), pair)?;
    Ok((m, loops))
}

/// A normally ordered dotted diagram: a matching and a dot count per output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalDiagram {
    pub matching: Matching,
    dots: Vec<u32>,
}

impl NormalDiagram {
    pub fn new(matching: Matching, dots: Vec<u32>) -> Result<NormalDiagram, DiagramError> {
        if dots.len() != matching.n_ends() {
            return Err(DiagramError::NotBijection);
        }
        for (e, &d) in dots.iter().enumerate() {
            if d > 0 && matching.is_input(e) {
                return Err(DiagramError::NotBijection);
            }
        }
        Ok(NormalDiagram { matching, dots })
    }

    pub fn undotted(matching: Matching) -> NormalDiagram {
        let n = matching.n_ends();
        NormalDiagram {
            matching,
            dots: vec![0; n],
        }
    }

    pub fn identity(a: &Word) -> NormalDiagram {
        NormalDiagram::undotted(Matching::identity(a))
    }

    pub fn src(&self) -> &Word {
        &self.matching.src
    }

    pub fn tgt(&self) -> &Word {
        &self.matching.tgt
    }

    /// Dots indexed by endpoint; nonzero only at outputs.
    pub fn dots(&self) -> &[u32] {
        &self.dots
    }

    pub fn dots_on(&self, output: usize) -> u32 {
        self.dots[output]
    }

    pub fn degree(&self) -> u32 {
        self.dots.iter().sum()
    }

    pub fn max_dots(&self) -> u32 {
        self.dots.iter().copied().max().unwrap_or(0)
    }

    pub fn with_dots(&self, output: usize, k: u32) -> NormalDiagram {
        let mut d = self.clone();
        d.dots[output] = k;
        d
    }

    pub fn tensor(f: &NormalDiagram, g: &NormalDiagram) -> NormalDiagram {
        let m = Matching::tensor(&f.matching, &g.matching);
        let (fa, ga, fb) = (f.src().len(), g.src().len(), f.tgt().len());
        let mut dots = vec![0; m.n_ends()];
        for e in 0..f.matching.n_ends() {
            let t = if e < fa { e } else { fa + ga + (e - fa) };
            dots[t] = f.dots[e];
        }
        for e in 0..g.matching.n_ends() {
            let t = if e < ga { fa + e } else { fa + ga + fb + (e - ga) };
            dots[t] = g.dots[e];
        }
        NormalDiagram { matching: m, dots }
    }
}

impl PartialOrd for NormalDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormalDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        self.matching
            .cmp(&other.matching)
            .then_with(|| self.dots.cmp(&other.dots))
    }
}

impl fmt::Display for NormalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.matching;
        let mut parts = Vec::new();
        for i in m.inputs() {
            let o = m.partner(i);
            let mut s = format!("{}-{}", m.endpoint(i), m.endpoint(o));
            if self.dots[o] > 0 {
                s.push_str(&format!("*x{}", self.dots[o]));
            }
            parts.push(s);
        }
        write!(f, "[{}: {} -> {}]", parts.join(" "), m.src, m.tgt)
    }
}

/// Elementary generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// c: 0 -> ^v
    Cup,
    /// c': 0 -> v^
    CupRev,
    /// d: v^ -> 0
    Cap,
    /// d': ^v -> 0
    CapRev,
    /// s: ^^ -> ^^
    S,
    /// s': vv -> vv
    SRev,
    /// t: ^v -> v^
    T,
    /// t': v^ -> ^v
    TRev,
    /// x on ^
    X,
    /// x' on v
    XRev,
}

impl Gen {
    pub const ALL: [Gen; 10] = [
        Gen::Cup,
        Gen::CupRev,
        Gen::Cap,
        Gen::CapRev,
        Gen::S,
        Gen::SRev,
        Gen::T,
        Gen::TRev,
        Gen::X,
        Gen::XRev,
    ];

    pub fn src(self) -> &'static [Dir] {
        use Dir::*;
        match self {
            Gen::Cup | Gen::CupRev => &[],
            Gen::Cap => &[Down, Up],
            Gen::CapRev => &[Up, Down],
            Gen::S => &[Up, Up],
            Gen::SRev => &[Down, Down],
            Gen::T => &[Up, Down],
            Gen::TRev => &[Down, Up],
            Gen::X => &[Up],
            Gen::XRev => &[Down],
        }
    }

    pub fn tgt(self) -> &'static [Dir] {
        use Dir::*;
        match self {
            Gen::Cup => &[Up, Down],
            Gen::CupRev => &[Down, Up],
            Gen::Cap | Gen::CapRev => &[],
            Gen::S => &[Up, Up],
            Gen::SRev => &[Down, Down],
            Gen::T => &[Down, Up],
            Gen::TRev => &[Up, Down],
            Gen::X => &[Up],
            Gen::XRev => &[Down],
        }
    }

    pub fn is_crossing(self) -> bool {
        matches!(self, Gen::S | Gen::SRev | Gen::T | Gen::TRev)
    }

    pub fn is_dot(self) -> bool {
        matches!(self, Gen::X | Gen::XRev)
    }

    pub fn name(self) -> &'static str {
        match self {
            Gen::Cup => "c",
            Gen::CupRev => "c'",
            Gen::Cap => "d",
            Gen::CapRev => "d'",
            Gen::S => "s",
            Gen::SRev => "s'",
            Gen::T => "t",
            Gen::TRev => "t'",
            Gen::X => "x",
            Gen::XRev => "x'",
        }
    }

    pub fn from_name(s: &str) -> Option<Gen> {
        Gen::ALL.iter().copied().find(|g| g.name() == s)
    }

    /// The crossing whose source is `(l, r)`.
    pub fn crossing(l: Dir, r: Dir) -> Gen {
        match (l, r) {
            (Dir::Up, Dir::Up) => Gen::S,
            (Dir::Down, Dir::Down) => Gen::SRev,
            (Dir::Up, Dir::Down) => Gen::T,
            (Dir::Down, Dir::Up) => Gen::TRev,
        }
    }

    pub fn dot(d: Dir) -> Gen {
        match d {
            Dir::Up => Gen::X,
            Dir::Down => Gen::XRev,
        }
    }

    /// Inverse of a crossing.
    pub fn inverse(self) -> Gen {
        match self {
            Gen::T => Gen::TRev,
            Gen::TRev => Gen::T,
            g => g,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A generator placed at a position of the current word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slice {
    pub pos: usize,
    pub gen: Gen,
}

impl Slice {
    pub fn new(pos: usize, gen: Gen) -> Slice {
        Slice { pos, gen }
    }

    pub fn apply(&self, w: &Word) -> Option<Word> {
        let s = self.gen.src();
        if self.pos + s.len() > w.len() || &w.0[self.pos..self.pos + s.len()] != s {
            return None;
        }
        let mut v = w.0[..self.pos].to_vec();
        v.extend_from_slice(self.gen.tgt());
        v.extend_from_slice(&w.0[self.pos + s.len()..]);
        Some(Word(v))
    }
}

/// A raw morphism: slices applied bottom to top starting from `src`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SliceWord {
    pub src: Word,
    pub slices: Vec<Slice>,
}

impl SliceWord {
    pub fn identity(a: &Word) -> SliceWord {
        SliceWord {
            src: a.clone(),
            slices: Vec::new(),
        }
    }

    pub fn new(src: Word, slices: Vec<Slice>) -> Result<SliceWord, DiagramError> {
        let w = SliceWord { src, slices };
        w.words()?;
        Ok(w)
    }

    /// Words at every level, `levels[0] = src`, `levels[n] = target`.
    pub fn words(&self) -> Result<Vec<Word>, DiagramError> {
        let mut out = Vec::with_capacity(self.slices.len() + 1);
        out.push(self.src.clone());
        for (i, s) in self.slices.iter().enumerate() {
            let cur = out.last().unwrap();
            match s.apply(cur) {
                Some(w) => out.push(w),
                None => {
                    return Err(DiagramError::IllTyped {
                        index: i,
                        gen: s.gen,
                        pos: s.pos,
                        word: cur.clone(),
                    })
                }
            }
        }
        Ok(out)
    }

    pub fn tgt(&self) -> Word {
        self.words().expect("typed slice word").pop().unwrap()
    }

    /// `self` followed by `upper` (i.e. `upper ∘ self`).
    pub fn then(&self, upper: &SliceWord) -> SliceWord {
        let mut slices = self.slices.clone();
        slices.extend_from_slice(&upper.slices);
        SliceWord {
            src: self.src.clone(),
            slices,
        }
    }

    pub fn shifted(&self, by: usize, left: &Word) -> SliceWord {
        SliceWord {
            src: left.concat(&self.src),
            slices: self
                .slices
                .iter()
                .map(|s| Slice::new(s.pos + by, s.gen))
                .collect(),
        }
    }

    /// `f ⊗ g`: g's slices first (shifted past f's source), then f's.
    pub fn tensor(f: &SliceWord, g: &SliceWord) -> SliceWord {
        let k = f.src.len();
        let mut slices: Vec<Slice> = g.slices.iter().map(|s| Slice::new(s.pos + k, s.gen)).collect();
        slices.extend_from_slice(&f.slices);
        SliceWord {
            src: f.src.concat(&g.src),
            slices,
        }
    }

    /// Places `self` with identity strands on both sides.
    pub fn pad(&self, left: &Word, right: &Word) -> SliceWord {
        SliceWord {
            src: left.concat(&self.src).concat(right),
            slices: self
                .slices
                .iter()
                .map(|s| Slice::new(s.pos + left.len(), s.gen))
                .collect(),
        }
    }

    pub fn dot_count(&self) -> usize {
        self.slices.iter().filter(|s| s.gen.is_dot()).count()
    }

    pub fn has_dots(&self) -> bool {
        self.slices.iter().any(|s| s.gen.is_dot())
    }

    /// Reverses all orientations of an undotted slice word.
    pub fn reversed(&self) -> Result<SliceWord, DiagramError> {
        let slices = self
            .slices
            .iter()
            .map(|s| {
                let g = match s.gen {
                    Gen::Cup => Gen::CupRev,
                    Gen::CupRev => Gen::Cup,
                    Gen::Cap => Gen::CapRev,
                    Gen::CapRev => Gen::Cap,
                    Gen::S => Gen::SRev,
                    Gen::SRev => Gen::S,
                    Gen::T => Gen::TRev,
                    Gen::TRev => Gen::T,
                    Gen::X | Gen::XRev => return Err(DiagramError::Dotted),
                };
                Ok(Slice::new(s.pos, g))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SliceWord {
            src: self.src.flipped(),
            slices,
        })
    }
}

impl fmt::Display for SliceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.src)?;
        for s in &self.slices {
            write!(f, " {}@{}", s.gen, s.pos + 1)?;
        }
        Ok(())
    }
}

/// Slices for a clockwise bubble with `k - 1` dots at position `pos`.
pub fn bubble_slices(pos: usize, k: u32) -> Vec<Slice> {
    let mut v = vec![Slice::new(pos, Gen::Cup)];
    v.extend((1..k).map(|_| Slice::new(pos, Gen::X)));
    v.push(Slice::new(pos, Gen::CapRev));
    v
}

/// Slices for the bubbles of a coefficient monomial, placed at `pos`.
/// Undotted bubbles are skipped when `skip_undotted` is set.
pub fn monomial_slices(mono: &Monomial, pos: usize, skip_undotted: bool) -> Vec<Slice> {
    let mut v = Vec::new();
    for &(s, e) in mono.pairs() {
        if let Sym::Delta(k) = s {
            if k == 1 && skip_undotted {
                continue;
            }
            for _ in 0..e {
                v.extend(bubble_slices(pos, k));
            }
        }
    }
    v
}

/// Canonical layout of a normal diagram (with optional bubbles on the left).
///
/// Bottom to top: bubbles, dots on bottom outputs, caps, cups on the right,
/// crossings sorting strands into place, dots on top outputs.
pub fn to_slices(d: &NormalDiagram, bubbles: &Monomial) -> SliceWord {
    let m = &d.matching;
    let a = &m.src;
    let b = &m.tgt;
    let na = a.len();
    let mut slices = monomial_slices(bubbles, 0, false);
    for i in 0..na {
        if a.get(i) == Dir::Down && d.dots[i] > 0 {
            slices.extend((0..d.dots[i]).map(|_| Slice::new(i, Gen::XRev)));
        }
    }
    // current strands, labelled by their endpoint on the far side of the
    // layout: top position for through strands, or a bottom endpoint for caps
    let mut cur: Vec<usize> = (0..na).collect();
    let mut word: Vec<Dir> = a.0.clone();
    let mut caps: Vec<(usize, usize)> = (0..na)
        .filter(|&i| m.partner(i) < na && i < m.partner(i))
        .map(|i| (i, m.partner(i)))
        .collect();
    caps.sort_by_key(|&(l, r)| (r - l, l));
    let push_cross = |slices: &mut Vec<Slice>, cur: &mut Vec<usize>, word: &mut Vec<Dir>, p: usize| {
        slices.push(Slice::new(p, Gen::crossing(word[p], word[p + 1])));
        cur.swap(p, p + 1);
        word.swap(p, p + 1);
    };
    for (l, r) in caps {
        let mut pl = cur.iter().position(|&x| x == l).unwrap();
        let mut pr = cur.iter().position(|&x| x == r).unwrap();
        if pl > pr {
            std::mem::swap(&mut pl, &mut pr);
        }
        while pr > pl + 1 {
            push_cross(&mut slices, &mut cur, &mut word, pr - 1);
            pr -= 1;
        }
        let g = if word[pl] == Dir::Down { Gen::Cap } else { Gen::CapRev };
        slices.push(Slice::new(pl, g));
        cur.drain(pl..pl + 2);
        word.drain(pl..pl + 2);
    }
    // remaining strands go to the top; relabel with top positions
    let mut target: Vec<usize> = cur.iter().map(|&i| m.partner(i) - na).collect();
    for j in 0..b.len() {
        let e = na + j;
        let p = m.partner(e);
        if p >= na && e < p {
            let k = p - na;
            let g = if b.get(j) == Dir::Up { Gen::Cup } else { Gen::CupRev };
            slices.push(Slice::new(word.len(), g));
            word.push(b.get(j));
            word.push(b.get(k));
            target.push(j);
            target.push(k);
        }
    }
    // leftmost-descent bubble sort
    while let Some(p) = (0..target.len().saturating_sub(1)).find(|&p| target[p] > target[p + 1]) {
        slices.push(Slice::new(p, Gen::crossing(word[p], word[p + 1])));
        target.swap(p, p + 1);
        word.swap(p, p + 1);
    }
    for j in 0..b.len() {
        if b.get(j) == Dir::Up {
            slices.extend((0..d.dots[na + j]).map(|_| Slice::new(j, Gen::X)));
        }
    }
    SliceWord {
        src: a.clone(),
        slices,
    }
}

/// Bounds for basis enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BasisBounds {
    pub max_dots_per_strand: Option<u32>,
    pub max_total_degree: Option<u32>,
    /// Largest bubble index allowed; 0 means no bubbles.
    pub max_bubble_index: u32,
    /// Largest number of bubble factors in a monomial.
    pub max_bubble_factors: u32,
}

impl BasisBounds {
    pub fn dots(max: u32) -> BasisBounds {
        BasisBounds {
            max_dots_per_strand: Some(max),
            ..Default::default()
        }
    }

    pub fn total(max: u32) -> BasisBounds {
        BasisBounds {
            max_total_degree: Some(max),
            ..Default::default()
        }
    }
}

/// Monomials in D_1..D_{max_index} with at most `max_factors` factors and
/// filtered degree at most `max_degree`, in ascending monomial order.
pub fn bubble_monomials(max_index: u32, max_factors: u32, max_degree: Option<u32>) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    fn rec(
        start: u32,
        max_index: u32,
        left: u32,
        cur: &mut Vec<(Sym, u32)>,
        max_degree: Option<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if left == 0 {
            return;
        }
        for k in start..=max_index {
            cur.push((Sym::Delta(k), 1));
            let m = Monomial::from_pairs(cur.clone());
            if max_degree.is_none_or(|d| m.bubble_degree() <= d) {
                out.push(m);
                rec(k, max_index, left - 1, cur, max_degree, out);
            }
            cur.pop();
        }
    }
    rec(1, max_index, max_factors, &mut Vec::new(), max_degree, &mut out);
    out.sort_by_key(bubble_key);
    out.dedup();
    out
}

fn bubble_key(m: &Monomial) -> (u32, Vec<u32>) {
    let idx = m
        .pairs()
        .iter()
        .flat_map(|&(s, e)| match s {
            Sym::Delta(k) => vec![k; e as usize],
            _ => Vec::new(),
        })
        .collect();
    (m.degree(), idx)
}

/// The normally ordered basis of `Hom(a, b)` within the bounds.
pub fn enumerate_normal_basis(
    a: &Word,
    b: &Word,
    bounds: &BasisBounds,
) -> Result<Vec<(NormalDiagram, Monomial)>, DiagramError> {
    let strands = (a.len() + b.len()) / 2;
    if strands > 0 && bounds.max_dots_per_strand.is_none() && bounds.max_total_degree.is_none() {
        return Err(DiagramError::Unbounded);
    }
    let monos = bubble_monomials(
        bounds.max_bubble_index,
        bounds.max_bubble_factors,
        bounds.max_total_degree,
    );
    let mut out = Vec::new();
    for m in enumerate_matchings(a, b) {
        let outs = m.outputs();
        let per = bounds
            .max_dots_per_strand
            .unwrap_or(u32::MAX)
            .min(bounds.max_total_degree.unwrap_or(u32::MAX));
        let mut dot_vecs: Vec<Vec<u32>> = vec![vec![0; outs.len()]];
        for i in 0..outs.len() {
            let mut next = Vec::new();
            for v in &dot_vecs {
                let used: u32 = v.iter().sum();
                let room = bounds.max_total_degree.map_or(per, |t| per.min(t - used));
                for k in 0..=room {
                    let mut w = v.clone();
                    w[i] = k;
                    next.push(w);
                }
            }
            dot_vecs = next;
        }
        let mut diags: Vec<NormalDiagram> = dot_vecs
            .into_iter()
            .map(|v| {
                let mut dots = vec![0; m.n_ends()];
                for (o, k) in outs.iter().zip(v) {
                    dots[*o] = k;
                }
                NormalDiagram {
                    matching: m.clone(),
                    dots,
                }
            })
            .collect();
        diags.sort();
        for d in diags {
            let deg = d.degree();
            for mono in &monos {
                if bounds
                    .max_total_degree
                    .is_none_or(|t| deg + mono.bubble_degree() <= t)
                {
                    out.push((d.clone(), mono.clone()));
                }
            }
        }
    }
    Ok(out)
}

/// A linear combination of normal diagrams. Bubble monomials live in the
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub src: Word,
    pub tgt: Word,
    pub terms: BTreeMap<NormalDiagram, Poly>,
}

impl Morphism {
    pub fn zero(src: &Word, tgt: &Word) -> Morphism {
        Morphism {
            src: src.clone(),
            tgt: tgt.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(a: &Word) -> Morphism {
        Morphism::from_diagram(NormalDiagram::identity(a), Poly::one())
    }

    pub fn from_diagram(d: NormalDiagram, c: Poly) -> Morphism {
        let mut m = Morphism::zero(d.src(), d.tgt());
        m.add_term(d, c);
        m
    }

    pub fn add_term(&mut self, d: NormalDiagram, c: Poly) {
        debug_assert!(d.src() == &self.src && d.tgt() == &self.tgt);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(d) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Morphism, c: &Poly) {
        for (d, v) in &other.terms {
            self.add_term(d.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Poly) -> Morphism {
        let mut m = Morphism::zero(&self.src, &self.tgt);
        m.add_scaled(self, c);
        m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Expands coefficients into (diagram, bubble monomial, rest) triples.
    pub fn basis_terms(&self) -> Vec<(NormalDiagram, Monomial, Poly)> {
        let mut out = Vec::new();
        for (d, c) in &self.terms {
            let mut by_bubble: BTreeMap<Monomial, Poly> = BTreeMap::new();
            for (m, v) in c.terms() {
                let (bub, rest) = m.split(|s| matches!(s, Sym::Delta(_)));
                by_bubble
                    .entry(bub)
                    .or_default()
                    .add_term(rest, v.clone());
            }
            for (b, r) in by_bubble {
                out.push((d.clone(), b, r));
            }
        }
        out
    }

    /// Largest strand dots plus bubble degree over all terms; `None` for zero.
    pub fn filtered_degree(&self) -> Option<u32> {
        self.basis_terms()
            .iter()
            .map(|(d, b, _)| d.degree() + b.bubble_degree())
            .max()
    }

    /// The terms of filtered degree exactly `i`.
    pub fn homogeneous_part(&self, i: u32) -> Morphism {
        let mut out = Morphism::zero(&self.src, &self.tgt);
        for (d, b, r) in self.basis_terms() {
            if d.degree() + b.bubble_degree() == i {
                out.add_term(d, r.mul_monomial(&b, &Rat::one()));
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Morphism {
        let mut out = Morphism::zero(&self.src, &self.tgt);
        for (d, c) in &self.terms {
            out.add_term(d.clone(), f(c));
        }
        out
    }

    /// Slice words with coefficients, bubbles kept in the coefficients.
    pub fn slice_terms(&self) -> Vec<(SliceWord, Poly)> {
        self.terms
            .iter()
            .map(|(d, c)| (to_slices(d, &Monomial::one()), c.clone()))
            .collect()
    }
}

impl std::ops::Sub for &Morphism {
    type Output = Morphism;
    fn sub(self, o: &Morphism) -> Morphism {
        let mut m = self.clone();
        m.add_scaled(o, &Poly::int(-1));
        m
    }
}

impl std::ops::Add for &Morphism {
    type Output = Morphism;
    fn add(self, o: &Morphism) -> Morphism {
        let mut m = self.clone();
        m.add_scaled(o, &Poly::one());
        m
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 : {} -> {}", self.src, self.tgt);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("({c}) {d}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Reverses the orientation of every strand of an undotted diagram.
pub fn reverse_orientation(d: &NormalDiagram) -> Result<NormalDiagram, DiagramError> {
    if d.degree() > 0 {
        return Err(DiagramError::Dotted);
    }
    Ok(NormalDiagram::undotted(d.matching.reversed()))
}

/// A random typed slice word with at most `max_slices` slices, `max_dots`
/// dots and intermediate words of length at most `max_len`.
pub fn random_slice_word<R: rand::Rng>(rng: &mut R, src: &Word, max_slices: usize, max_dots: usize, max_len: usize) -> SliceWord {
    let mut cur = src.clone();
    let mut slices = Vec::new();
    let mut dots = 0;
    let n = rng.gen_range(0..=max_slices);
    for _ in 0..n {
        let mut options = Vec::new();
        for g in Gen::ALL {
            if g.is_dot() && dots >= max_dots {
                continue;
            }
            let grow = g.tgt().len() as isize - g.src().len() as isize;
            if cur.len() as isize + grow > max_len as isize {
                continue;
            }
            for p in 0..=cur.len() {
                let s = Slice::new(p, g);
                if s.apply(&cur).is_some() {
                    options.push(s);
                }
            }
        }
        if options.is_empty() {
            break;
        }
        let s = options[rng.gen_range(0..options.len())];
        if s.gen.is_dot() {
            dots += 1;
        }
        cur = s.apply(&cur).unwrap();
        slices.push(s);
    }
    SliceWord {
        src: src.clone(),
        slices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn fact(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn matching_counts() {
        assert_eq!(enumerate_matchings(&w("0"), &w("0")).len(), 1);
        assert!(enumerate_matchings(&w("^"), &w("v")).is_empty());
        assert_eq!(enumerate_matchings(&w("^v"), &w("^v")).len(), 2);
        assert_eq!(enumerate_matchings(&w("^^vv"), &w("^^vv")).len(), 24);
        for r in 0..=3 {
            for s in 0..=(5 - r).min(3) {
                let a = Word(
                    std::iter::repeat_n(Dir::Up, r)
                        .chain(std::iter::repeat_n(Dir::Down, s))
                        .collect(),
                );
                assert_eq!(enumerate_matchings(&a, &a).len(), fact(r + s));
            }
        }
    }

    #[test]
    fn enumeration_is_sorted() {
        let ms = enumerate_matchings(&w("^v^"), &w("^v^"));
        assert!(ms.windows(2).all(|p| p[0] < p[1]));
    }

    fn single(src: &str, g: Gen) -> Matching {
        let sw = SliceWord::new(w(src), vec![Slice::new(0, g)]).unwrap();
        slice_matching(&sw)
    }

    fn slice_matching(sw: &SliceWord) -> Matching {
        // brute tracing through compose_matchings of single generators
        let mut acc = Matching::identity(&sw.src);
        let words = sw.words().unwrap();
        for (i, s) in sw.slices.iter().enumerate() {
            let cur = &words[i];
            let left = cur.slice(0, s.pos);
            let right = cur.slice(s.pos + s.gen.src().len(), cur.len());
            let g = gen_matching(s.gen);
            let m = Matching::tensor(&Matching::tensor(&Matching::identity(&left), &g), &Matching::identity(&right));
            acc = compose_matchings(&m, &acc).unwrap().0;
        }
        acc
    }

    fn gen_matching(g: Gen) -> Matching {
        let src = Word(g.src().to_vec());
        let tgt = Word(g.tgt().to_vec());
        let pair = match g {
            Gen::Cup | Gen::CupRev | Gen::Cap | Gen::CapRev => vec![1, 0],
            Gen::X | Gen::XRev => vec![1, 0],
            _ => vec![3, 2, 1, 0],
        };
        Matching::from_pairs(src, tgt, pair).unwrap()
    }

    #[test]
    fn bubble_from_cup_cap() {
        let cap = single("^v", Gen::CapRev);
        let cup = gen_matching(Gen::Cup);
        let (m, loops) = compose_matchings(&cap, &cup).unwrap();
        assert_eq!(loops, 1);
        assert_eq!(m.n_ends(), 0);
    }

    #[test]
    fn s_squared_is_identity() {
        let s = gen_matching(Gen::S);
        let (m, loops) = compose_matchings(&s, &s).unwrap();
        assert_eq!(loops, 0);
        assert_eq!(m, Matching::identity(&w("^^")));
    }

    #[test]
    fn duals() {
        assert_eq!(w("^^v").dual(), w("^vv"));
        assert_eq!(w("0").dual(), w("0"));
        assert_eq!(w("^v^^").dual().dual(), w("^v^^"));
    }

    #[test]
    fn layout_of_dotted_crossing() {
        let m = gen_matching(Gen::S);
        let d = NormalDiagram::new(m, vec![0, 0, 0, 1]).unwrap();
        let sw = to_slices(&d, &Monomial::one());
        assert_eq!(sw.slices, vec![Slice::new(0, Gen::S), Slice::new(1, Gen::X)]);
        assert!(to_slices(&NormalDiagram::identity(&w("^")), &Monomial::one()).slices.is_empty());
    }

    #[test]
    fn layout_realizes_matching() {
        for (a, b) in [("^v", "^v"), ("^^v", "^"), ("v^", "0"), ("0", "^vv^"), ("^v^", "^v^"), ("vv^", "v")] {
            for m in enumerate_matchings(&w(a), &w(b)) {
                let sw = to_slices(&NormalDiagram::undotted(m.clone()), &Monomial::one());
                assert_eq!(sw.tgt(), w(b));
                assert_eq!(slice_matching(&sw), m, "{sw}");
            }
        }
    }

    #[test]
    fn bubble_layout() {
        let mono = Monomial::var(Sym::Delta(2));
        let sw = to_slices(&NormalDiagram::identity(&w("^")), &mono);
        assert_eq!(
            sw.slices,
            vec![Slice::new(0, Gen::Cup), Slice::new(0, Gen::X), Slice::new(0, Gen::CapRev)]
        );
    }

    #[test]
    fn basis_counts() {
        let b = enumerate_normal_basis(&w("^"), &w("^"), &BasisBounds::dots(1)).unwrap();
        assert_eq!(b.len(), 2);
        for l in 1..=3u32 {
            let b = enumerate_normal_basis(&w("^v"), &w("^v"), &BasisBounds::dots(l - 1)).unwrap();
            assert_eq!(b.len(), 2 * (l * l) as usize);
        }
        let bounds = BasisBounds {
            max_bubble_index: 2,
            max_bubble_factors: 1,
            max_total_degree: Some(1),
            ..Default::default()
        };
        let e = enumerate_normal_basis(&w("0"), &w("0"), &bounds).unwrap();
        let monos: Vec<String> = e.iter().map(|p| p.1.to_string()).collect();
        assert_eq!(monos, vec!["", "D1", "D2"]);
        assert!(enumerate_normal_basis(&w("^"), &w("^"), &BasisBounds::default()).is_err());
    }

    #[test]
    fn reversal() {
        let c = NormalDiagram::undotted(gen_matching(Gen::Cup));
        let r = reverse_orientation(&c).unwrap();
        assert_eq!(r.tgt(), &w("v^"));
        assert_eq!(reverse_orientation(&r).unwrap(), c);
        let s = NormalDiagram::undotted(gen_matching(Gen::S));
        assert_eq!(reverse_orientation(&s).unwrap().matching, gen_matching(Gen::SRev));
    }

    #[test]
    fn endpoint_codes() {
        let e = Endpoint::parse("t2").unwrap();
        assert_eq!(e.to_string(), "t2");
        assert!(Endpoint::parse("x1").is_none());
    }
}
