//! The cutting algorithm, bi-fan navigation and the centralizer generator.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{BergError, Result};
use crate::intmat::{det_cols, vadd, vneg, vsub, Mat2Z, Vec2};
use crate::qfield::EigenData;

/// Ordered lattice basis `{e, f}`; a fan node when `e` lies in the open
/// first and `f` in the open second eigen-quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BasisPair {
    pub e: Vec2,
    pub f: Vec2,
}

impl BasisPair {
    pub fn new(e: Vec2, f: Vec2) -> Self {
        BasisPair { e, f }
    }

    /// `[e|f]` as a matrix with columns `e`, `f`.
    pub fn matrix(&self) -> Mat2Z {
        Mat2Z::from_cols(self.e, self.f)
    }

    pub fn det(&self) -> i128 {
        det_cols(self.e, self.f)
    }

    pub fn is_fan_node(&self, ed: &EigenData) -> bool {
        self.det().abs() == 1 && ed.in_first_quadrant(self.e) && ed.in_second_quadrant(self.f)
    }

    /// `[e|f] * E(bit)`.
    pub fn apply_bit(&self, bit: u8) -> BasisPair {
        if bit == 1 {
            BasisPair::new(vadd(self.e, self.f), self.f)
        } else {
            BasisPair::new(self.e, vadd(self.e, self.f))
        }
    }
}

/// Whether the word repeats (`Period`) or repeats complemented (`SemiPeriod`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WordKind {
    #[serde(rename = "period")]
    Period,
    #[serde(rename = "semi-period")]
    SemiPeriod,
}

impl WordKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WordKind::Period => "period",
            WordKind::SemiPeriod => "semi-period",
        }
    }
}

/// Orientation determinant of `(x, y)` measured in the eigen chart.
fn chart_orientation(ed: &EigenData, x: Vec2, y: Vec2) -> i32 {
    let (hx, yx) = ed.chart(x);
    let (hy, yy) = ed.chart(y);
    (hx * yy - hy * yx).signum()
}

/// Initial fan node: `±(1,0)`, `±(0,1)` are signed so the first vector is
/// right of the unstable line and the second left of it, ordered to be
/// positively oriented in the chart, then cut until both quadrant
/// conditions hold.
pub fn seed_basis(ed: &EigenData) -> BasisPair {
    let mut a: Vec2 = [1, 0];
    let mut b: Vec2 = [0, 1];
    if ed.stable_coord(a).is_negative() {
        a = vneg(a);
    }
    if ed.stable_coord(b).is_positive() {
        b = vneg(b);
    }
    if chart_orientation(ed, a, b) < 0 {
        (a, b) = (vneg(b), vneg(a));
    }
    let mut bp = BasisPair::new(a, b);
    while !bp.is_fan_node(ed) {
        bp = cut(ed, &bp).0;
    }
    bp
}

fn cut(ed: &EigenData, bp: &BasisPair) -> (BasisPair, u8) {
    let c = vadd(bp.e, bp.f);
    if ed.stable_coord(c).is_positive() {
        (BasisPair::new(c, bp.f), 1)
    } else {
        (BasisPair::new(bp.e, c), 0)
    }
}

/// Successor node and the bit `s_n` (1 exactly when `f` is kept).
pub fn step_forward(ed: &EigenData, bp: &BasisPair) -> (BasisPair, u8) {
    cut(ed, bp)
}

/// Predecessor node and the bit `s_{n-1}`.
pub fn step_backward(ed: &EigenData, bp: &BasisPair) -> (BasisPair, u8) {
    let d = vsub(bp.e, bp.f);
    // e - f always lies right of the unstable line, f - e left of it.
    if ed.unstable_coord(d).is_positive() {
        (BasisPair::new(d, bp.f), 1)
    } else {
        (BasisPair::new(bp.e, vneg(d)), 0)
    }
}

/// `[e_n|f_n] = [e_k|f_k] * prod E(s_j)` for the given bits.
pub fn reconstruct(bp: &BasisPair, bits: &[u8]) -> BasisPair {
    bits.iter().fold(*bp, |acc, &s| acc.apply_bit(s))
}

/// Product `E(s_0) ... E(s_{n-1})`.
pub fn word_product(bits: &[u8]) -> Mat2Z {
    bits.iter()
        .fold(Mat2Z::IDENTITY, |acc, &s| acc * Mat2Z::elementary(s))
}

/// Basic (semi-)period data of a hyperbolic matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuttingWord {
    pub matrix: Mat2Z,
    /// `s_0 ... s_{N-1}` read from `basis0`.
    pub word: Vec<u8>,
    pub kind: WordKind,
    #[serde(rename = "N")]
    pub n: usize,
    /// Generator in standard coordinates.
    pub generator: Mat2Z,
    /// Generator written in the basis `basis0`.
    pub generator_in_basis0: Mat2Z,
    #[serde(rename = "K")]
    pub k: u32,
    pub sign: i32,
    pub basis0: BasisPair,
}

impl CuttingWord {
    pub fn word_string(&self) -> String {
        self.word.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }

    /// Length of the full period of the infinite sequence.
    pub fn full_period(&self) -> usize {
        match self.kind {
            WordKind::Period => self.n,
            WordKind::SemiPeriod => 2 * self.n,
        }
    }

    /// `s_i` for any integer index.
    pub fn bit(&self, i: i64) -> u8 {
        let n = self.n as i64;
        let r = i.rem_euclid(n) as usize;
        let block = i.div_euclid(n);
        let b = self.word[r];
        if self.kind == WordKind::SemiPeriod && block.rem_euclid(2) == 1 {
            1 - b
        } else {
            b
        }
    }

    /// Bits `s_from .. s_{to-1}`.
    pub fn bits(&self, from: i64, to: i64) -> Vec<u8> {
        (from..to).map(|i| self.bit(i)).collect()
    }

    /// Fan node at index `i` (negative indices walk backwards).
    pub fn basis_at(&self, i: i64) -> BasisPair {
        if i >= 0 {
            reconstruct(&self.basis0, &self.bits(0, i))
        } else {
            let inv = |b: u8| -> Mat2Z {
                if b == 1 {
                    Mat2Z::new(1, 0, -1, 1)
                } else {
                    Mat2Z::new(1, -1, 0, 1)
                }
            };
            let mut m = self.basis0.matrix();
            for j in (i..0).rev() {
                m = m * inv(self.bit(j));
            }
            BasisPair::new(m.col(0), m.col(1))
        }
    }

    /// Fan nodes at indices `from ..= to`.
    pub fn bases(&self, from: i64, to: i64) -> Vec<BasisPair> {
        let mut out = Vec::new();
        if from > to {
            return out;
        }
        let mut bp = self.basis_at(from);
        out.push(bp);
        for i in from..to {
            bp = bp.apply_bit(self.bit(i));
            out.push(bp);
        }
        out
    }

    /// A fan node is reduced when the bits on either side of it differ.
    pub fn is_reduced(&self, i: i64) -> bool {
        self.bit(i - 1) != self.bit(i)
    }

    /// `prod_{j=k}^{k+N-1} E(s_j) * sigma^a`: the generator in the basis at `k`.
    pub fn factorization_at(&self, k: i64) -> Mat2Z {
        let p = word_product(&self.bits(k, k + self.n as i64));
        match self.kind {
            WordKind::Period => p,
            WordKind::SemiPeriod => p * Mat2Z::SIGMA,
        }
    }
}

fn word_of(bases_bits: &[u8], from: usize, len: usize) -> &[u8] {
    &bases_bits[from..from + len]
}

/// Runs the cutting algorithm on `m` and extracts its basic (semi-)period.
///
/// The reported origin is the rotation of the periodic sequence whose
/// `N`-letter window is lexicographically largest, so equal inputs up to
/// fan shifts give identical words.
pub fn cutting_word(m: &Mat2Z) -> Result<CuttingWord> {
    let ed = EigenData::new(m)?;
    cutting_word_with(&ed)
}

pub fn cutting_word_with(ed: &EigenData) -> Result<CuttingWord> {
    let m = ed.matrix;
    let seed = seed_basis(ed);
    let b0 = seed.matrix();
    let b0_inv = b0.inverse_unimodular()?;
    let mut bp = seed;
    let mut bits = Vec::new();
    let (n, kind) = loop {
        let (next, s) = step_forward(ed, &bp);
        bits.push(s);
        bp = next;
        let t_per = bp.matrix() * b0_inv;
        if t_per.commutes_with(&m) {
            break (bits.len(), WordKind::Period);
        }
        let t_semi = bp.matrix() * Mat2Z::SIGMA * b0_inv;
        if t_semi.commutes_with(&m) {
            break (bits.len(), WordKind::SemiPeriod);
        }
    };
    let full = if kind == WordKind::Period { n } else { 2 * n };
    let seq: Vec<u8> = (0..full + n)
        .map(|i| {
            let b = bits[i % n];
            if kind == WordKind::SemiPeriod && (i / n) % 2 == 1 {
                1 - b
            } else {
                b
            }
        })
        .collect();
    let mut best = 0;
    for r in 1..full {
        if word_of(&seq, r, n) > word_of(&seq, best, n) {
            best = r;
        }
    }
    let basis0 = reconstruct(&seed, &seq[..best]);
    let word = word_of(&seq, best, n).to_vec();
    let bn = reconstruct(&basis0, &word);
    let b = basis0.matrix();
    let b_inv = b.inverse_unimodular()?;
    let target = match kind {
        WordKind::Period => bn.matrix(),
        WordKind::SemiPeriod => bn.matrix() * Mat2Z::SIGMA,
    };
    let generator = target * b_inv;
    let generator_in_basis0 = b_inv * target;
    let (k, sign) = generator_power(&generator, &m)?;
    Ok(CuttingWord {
        matrix: m,
        word,
        kind,
        n,
        generator,
        generator_in_basis0,
        k,
        sign,
        basis0,
    })
}

/// Smallest `K >= 1` with `g^K = sign * m`.
pub fn generator_power(g: &Mat2Z, m: &Mat2Z) -> Result<(u32, i32)> {
    let limit = m.max_abs_entry();
    let mut p = *g;
    let mut k = 1;
    loop {
        if p == *m {
            return Ok((k, 1));
        }
        if p == -*m {
            return Ok((k, -1));
        }
        if p.max_abs_entry() > limit {
            return Err(BergError::Internal(format!(
                "no power of {g} equals ±{m}"
            )));
        }
        p = p * *g;
        k += 1;
    }
}

/// The `2N` nonnegative representatives of the generator: the products at
/// each of `N` consecutive base points and their `sigma`-conjugates.
pub fn nonnegative_representatives(cw: &CuttingWord) -> Vec<Mat2Z> {
    let mut out = Vec::with_capacity(2 * cw.n);
    for k in 0..cw.n as i64 {
        let p = cw.factorization_at(k);
        out.push(p);
        out.push(p.sigma_conj());
    }
    out
}

/// Checks that the generator is represented by the factorization at every
/// base point and that the `2N` representatives are pairwise distinct.
pub fn check_factorization(cw: &CuttingWord) -> Result<()> {
    for k in 0..cw.n as i64 {
        let b = cw.basis_at(k).matrix();
        let rep = b.inverse_unimodular()? * cw.generator * b;
        if rep != cw.factorization_at(k) {
            return Err(BergError::Internal(format!(
                "factorization fails at base point {k}"
            )));
        }
    }
    let reps = nonnegative_representatives(cw);
    let distinct: HashSet<_> = reps.iter().collect();
    if distinct.len() != reps.len() {
        return Err(BergError::Internal("repeated nonnegative representative".into()));
    }
    Ok(())
}

/// Whether the unordered pair `{a, b}` or `{-a, -b}` is a fan node.
///
/// Quadrant placement is necessary; reachability is then confirmed by
/// walking the fan from `cw.basis0` until the walk overshoots `a`, `b`.
pub fn in_fan_up_to_sign(cw: &CuttingWord, ed: &EigenData, a: Vec2, b: Vec2) -> bool {
    let mut candidates = Vec::new();
    for (x, y) in [(a, b), (b, a), (vneg(a), vneg(b)), (vneg(b), vneg(a))] {
        let bp = BasisPair::new(x, y);
        if bp.is_fan_node(ed) {
            candidates.push(bp);
        }
    }
    candidates.iter().any(|bp| fan_contains(cw, ed, bp))
}

fn fan_contains(cw: &CuttingWord, ed: &EigenData, target: &BasisPair) -> bool {
    let ty = ed.unstable_coord(target.e).max_q(ed.unstable_coord(target.f));
    let th = ed
        .stable_coord(target.e)
        .abs()
        .max_q(ed.stable_coord(target.f).abs());
    // Forward: unstable coordinates grow without bound.
    let mut bp = cw.basis0;
    loop {
        if bp == *target {
            return true;
        }
        if ed.unstable_coord(bp.e) > ty && ed.unstable_coord(bp.f) > ty {
            break;
        }
        bp = step_forward(ed, &bp).0;
    }
    // Backward: stable coordinates grow without bound.
    let mut bp = cw.basis0;
    loop {
        if bp == *target {
            return true;
        }
        let he = ed.stable_coord(bp.e).abs();
        let hf = ed.stable_coord(bp.f).abs();
        if he > th && hf > th {
            return false;
        }
        bp = step_backward(ed, &bp).0;
    }
}

trait MaxQ {
    fn max_q(self, o: Self) -> Self;
}

impl MaxQ for crate::qfield::QuadNum {
    fn max_q(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
}

/// One hit of [`nonneg_representation_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NonnegHit {
    pub a: Vec2,
    pub b: Vec2,
    pub in_fan: bool,
}

/// All unimodular bases with entries in `[-bound, bound]` in which `m` or
/// its generator is a nonnegative matrix, with their fan membership.
pub fn nonneg_representation_scan(m: &Mat2Z, bound: i128) -> Result<Vec<NonnegHit>> {
    let ed = EigenData::new(m)?;
    let cw = cutting_word_with(&ed)?;
    let mut hits = Vec::new();
    let range = -bound..=bound;
    for a0 in range.clone() {
        for a1 in range.clone() {
            for b0 in range.clone() {
                for b1 in range.clone() {
                    let (a, b) = ([a0, a1], [b0, b1]);
                    if det_cols(a, b).abs() != 1 {
                        continue;
                    }
                    let bm = Mat2Z::from_cols(a, b);
                    let inv = bm.inverse_unimodular()?;
                    let rm = inv * *m * bm;
                    let rg = inv * cw.generator * bm;
                    if rm.is_nonnegative() || rg.is_nonnegative() {
                        hits.push(NonnegHit {
                            a,
                            b,
                            in_fan: in_fan_up_to_sign(&cw, &ed, a, b),
                        });
                    }
                }
            }
        }
    }
    Ok(hits)
}
