//! Connectivity matrices, rectangle dimensions, closed-form counts and
//! symmetry classification of Berg partitions.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::bifan::{cutting_word_with, BasisPair, CuttingWord, WordKind};
use crate::error::{BergError, Result};
use crate::intmat::{iadd, imul, Mat2Z};
use crate::qfield::{EigenData, QuadNum};

/// `C = [[k, l], [m, n]]` with nonnegative entries and `det C = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectivityMatrix {
    pub k: i128,
    pub l: i128,
    pub m: i128,
    pub n: i128,
}

impl ConnectivityMatrix {
    pub fn new(k: i128, l: i128, m: i128, n: i128) -> Result<Self> {
        let c = ConnectivityMatrix { k, l, m, n };
        if k < 0 || l < 0 || m < 0 || n < 0 {
            return Err(BergError::InvalidConnectivity(format!("negative entry in {c}")));
        }
        if c.det().abs() != 1 {
            return Err(BergError::InvalidConnectivity(format!("det of {c} is not ±1")));
        }
        if c.trace() < 1 || (c.det() == 1 && c.trace() < 3) {
            return Err(BergError::InvalidConnectivity(format!("{c} is not hyperbolic")));
        }
        Ok(c)
    }

    pub fn from_mat(a: &Mat2Z) -> Result<Self> {
        Self::new(a.a, a.b, a.c, a.d)
    }

    pub fn mat(&self) -> Mat2Z {
        Mat2Z::new(self.k, self.l, self.m, self.n)
    }

    pub fn det(&self) -> i128 {
        self.k * self.n - self.l * self.m
    }

    pub fn trace(&self) -> i128 {
        self.k + self.n
    }

    pub fn sum(&self) -> i128 {
        self.k + self.l + self.m + self.n
    }

    /// `sigma C sigma`: the same partition with the rectangles relabelled.
    pub fn sigma_conj(&self) -> Self {
        ConnectivityMatrix { k: self.n, l: self.m, m: self.l, n: self.k }
    }

    pub fn transpose(&self) -> Self {
        ConnectivityMatrix { k: self.k, l: self.m, m: self.l, n: self.n }
    }

    /// `C^J = sigma C^T sigma`: diagonal entries exchanged.
    pub fn j_conjugate(&self) -> Self {
        ConnectivityMatrix { k: self.n, l: self.l, m: self.m, n: self.k }
    }

    /// Lexicographically smallest of `C` and `sigma C sigma`.
    pub fn canonical(&self) -> Self {
        (*self).min(self.sigma_conj())
    }

    pub fn is_j_symmetric(&self) -> bool {
        self.k == self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.l == self.m
    }
}

impl fmt::Display for ConnectivityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.k, self.l, self.m, self.n)
    }
}

impl Serialize for ConnectivityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.mat().serialize(s)
    }
}

/// Perron root of `C`, which is `|lambda|` of the analyzed matrix.
pub fn perron_root(c: &ConnectivityMatrix) -> QuadNum {
    let disc = (c.k - c.n) * (c.k - c.n) + 4 * c.l * c.m;
    QuadNum::rational(c.trace(), 2, disc) + QuadNum::sqrt_disc(disc).div_int(2)
}

/// Rectangle dimensions: `R_1` is `u x p`, `R_2` is `v x q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dims {
    pub u: QuadNum,
    pub v: QuadNum,
    pub p: QuadNum,
    pub q: QuadNum,
}

/// `(p, q)` is the Perron column eigenvector and `(u, v)` the Perron row
/// eigenvector of `C`, scaled so that `p + q = 1` and `up + vq = 1`.
/// Both conditions are unchanged by relabelling the rectangles, so the
/// dimensions of `sigma C sigma` are those of `C` swapped.
pub fn rectangle_dims(c: &ConnectivityMatrix) -> Dims {
    let lam = perron_root(c);
    let x = lam - lam.q_int(c.k);
    let h = lam.q_int(c.l) + x;
    let s = lam.q_int(imul(c.m, c.l)) + x * x;
    Dims {
        u: lam.q_int(c.m) * h / s,
        v: x * h / s,
        p: lam.q_int(c.l) / h,
        q: x / h,
    }
}

trait QInt {
    fn q_int(&self, n: i128) -> QuadNum;
}

impl QInt for QuadNum {
    fn q_int(&self, n: i128) -> QuadNum {
        QuadNum::from_int(n, self.disc())
    }
}

/// Covering and packing identities plus unit area, checked exactly.
pub fn dims_identities_hold(c: &ConnectivityMatrix, d: &Dims) -> bool {
    let lam = perron_root(c);
    let mu = lam.recip().expect("Perron root is nonzero");
    let q = |n: i128| lam.q_int(n);
    let all_pos = [d.u, d.v, d.p, d.q].iter().all(|x| x.is_positive());
    all_pos
        && lam * d.p == q(c.k) * d.p + q(c.l) * d.q
        && lam * d.q == q(c.m) * d.p + q(c.n) * d.q
        && d.u == q(c.k) * mu * d.u + q(c.m) * mu * d.v
        && d.v == q(c.l) * mu * d.u + q(c.n) * mu * d.v
        && d.u * d.p + d.v * d.q == q(1)
}

/// Both rectangles project injectively to the torus.
///
/// Equivalent to `(u - v)(p - q) > 0` for the dimensions of `C`, and to
/// the Perron root lying outside the interval between `k + l` and `k + m`.
pub fn is_isolated(c: &ConnectivityMatrix) -> bool {
    (c.l - c.m).abs() < (c.k - c.n).abs()
}

/// Isolation read off the rectangle dimensions.
pub fn is_isolated_by_dims(d: &Dims) -> bool {
    ((d.u - d.v) * (d.p - d.q)).is_positive()
}

pub fn count_berg(c: &ConnectivityMatrix) -> i128 {
    c.sum() / 2
}

/// Both fixed points can sit at the centres of their spines.
pub fn center_is_integer(c: &ConnectivityMatrix) -> bool {
    (c.k - c.n) % 2 == 0 && (c.l - c.m) % 2 == 0
}

pub fn hinged_pairs_isolated(c: &ConnectivityMatrix) -> Result<i128> {
    if !is_isolated(c) {
        return Err(BergError::Domain(format!("{c} is connected")));
    }
    Ok(c.l / 2 + c.m / 2)
}

/// Upper bound on the size of a hinged family for a connected shape:
/// `floor(sqrt(l/m + ((n-k)/2m)^2) - |n-k|/2m) + 2` after ordering `l >= m`.
pub fn hinged_bound_connected(c: &ConnectivityMatrix) -> Result<i128> {
    if is_isolated(c) {
        return Err(BergError::Domain(format!("{c} is isolated")));
    }
    let c = if c.l < c.m { c.sigma_conj() } else { *c };
    let d = (c.n - c.k).abs();
    let disc = iadd(imul(d, d), imul(4, imul(c.l, c.m)));
    // largest t with 2mt + d <= sqrt(disc)
    let fits = |t: i128| {
        let x = iadd(imul(imul(2, c.m), t), d);
        imul(x, x) <= disc
    };
    let mut t = 0;
    while fits(t + 1) {
        t += 1;
    }
    Ok(t + 2)
}

/// One fan position with its connectivity matrix and dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BergShape {
    pub index: usize,
    pub basis: BasisPair,
    /// Connectivity matrix in the order `(e, f)` of `basis`.
    #[serde(rename = "C_basis")]
    pub c_raw: ConnectivityMatrix,
    #[serde(rename = "C")]
    pub c: ConnectivityMatrix,
    pub dims: Dims,
    pub isolated: bool,
}

/// `sign(tr M) * (B^-1 M B)^T` for the basis `B`.
pub fn connectivity_at(m: &Mat2Z, basis: &BasisPair) -> Result<ConnectivityMatrix> {
    let b = basis.matrix();
    let rep = b.inverse_unimodular()? * *m * b;
    let rep = if m.trace() < 0 { -rep } else { rep };
    ConnectivityMatrix::from_mat(&rep.transpose())
}

pub fn shapes_of(cw: &CuttingWord) -> Result<Vec<BergShape>> {
    cw.bases(0, cw.n as i64 - 1)
        .into_iter()
        .enumerate()
        .map(|(index, basis)| {
            let c_raw = connectivity_at(&cw.matrix, &basis)?;
            let dims = rectangle_dims(&c_raw);
            Ok(BergShape {
                index,
                basis,
                c_raw,
                c: c_raw.canonical(),
                dims,
                isolated: is_isolated(&c_raw),
            })
        })
        .collect()
}

pub fn connectivity_matrices(m: &Mat2Z) -> Result<Vec<ConnectivityMatrix>> {
    let ed = EigenData::new(m)?;
    let cw = cutting_word_with(&ed)?;
    Ok(shapes_of(&cw)?.into_iter().map(|s| s.c).collect())
}

pub fn total_from_shapes(shapes: &[BergShape]) -> i128 {
    shapes.iter().map(|s| count_berg(&s.c)).sum()
}

pub fn total_berg_count(m: &Mat2Z) -> Result<i128> {
    Ok(connectivity_matrices(m)?.iter().map(count_berg).sum())
}

/// Closed form for the all-ones word with semi-period `N`.
pub fn all_ones_total(n: i128) -> i128 {
    if n % 2 == 1 {
        n * (n * n + 6 * n + 5) / 12
    } else {
        n * (n * n + 6 * n + 8) / 12
    }
}

/// `W(x, y) = [(x^2+y^2)(xy+6) + 6(x+y)(xy+1) + 10xy] / 12`, exact.
pub fn w_formula(x: i128, y: i128) -> Ratio<i128> {
    Ratio::new(
        (x * x + y * y) * (x * y + 6) + 6 * (x + y) * (x * y + 1) + 10 * x * y,
        12,
    )
}

/// Closed form for the period word `1^{n1} 0^{n2}`: `W` when `n1 + n2` is
/// even, `W` plus a quarter of the even block length otherwise.
pub fn block_word_total(n1: i128, n2: i128) -> Ratio<i128> {
    let w = w_formula(n1, n2);
    if (n1 + n2) % 2 == 0 {
        w
    } else {
        let even = if n1 % 2 == 0 { n1 } else { n2 };
        w + Ratio::new(even, 4)
    }
}

/// The generator `prod E(s_j) sigma^a` of a word, as a matrix.
pub fn generator_of_word(word: &[u8], kind: WordKind) -> Mat2Z {
    let p = crate::bifan::word_product(word);
    match kind {
        WordKind::Period => p,
        WordKind::SemiPeriod => p * Mat2Z::SIGMA,
    }
}

/// Parses a word of `0`/`1` characters.
pub fn parse_word(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .enumerate()
        .map(|(i, ch)| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(BergError::Parse { pos: i, msg: format!("unexpected {ch:?} in word") }),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymmetryType {
    I,
    II,
    III,
    IV,
    V,
    VI,
    #[serde(rename = "none")]
    None,
}

impl fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymmetryType::I => "I",
            SymmetryType::II => "II",
            SymmetryType::III => "III",
            SymmetryType::IV => "IV",
            SymmetryType::V => "V",
            SymmetryType::VI => "VI",
            SymmetryType::None => "none",
        };
        f.write_str(s)
    }
}

/// A reflection `s_i = s_{c - i}` (or `1 - s_{c - i}` when complemented)
/// of the full periodic sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Reflection {
    pub center: usize,
    pub complemented: bool,
}

impl Reflection {
    /// Fan positions mapped to themselves: `2j = c + 1 (mod P)`.
    pub fn fixed_positions(&self, period: usize) -> Vec<usize> {
        (0..period)
            .filter(|j| (2 * j) % period == (self.center + 1) % period)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub has_order4: bool,
    pub has_simple2: bool,
    pub has_shift2: bool,
    pub symmetry_type: SymmetryType,
    pub witness: Option<Reflection>,
    pub reflections: Vec<Reflection>,
}

/// Classifies the word by the reflections of its full periodic sequence.
pub fn classify_word(word: &[u8], kind: WordKind) -> SymmetryReport {
    let n = word.len();
    let seq: Vec<u8> = match kind {
        WordKind::Period => word.to_vec(),
        WordKind::SemiPeriod => word.iter().copied().chain(word.iter().map(|b| 1 - b)).collect(),
    };
    let p = seq.len();
    let mut reflections = Vec::new();
    for complemented in [false, true] {
        for c in 0..p {
            let ok = (0..p).all(|i| {
                let j = (c + p - i) % p;
                if complemented {
                    seq[i] == 1 - seq[j]
                } else {
                    seq[i] == seq[j]
                }
            });
            if ok {
                reflections.push(Reflection { center: c, complemented });
            }
        }
    }
    let plain = reflections.iter().filter(|r| !r.complemented);
    let has_simple2 = plain.clone().any(|r| p % 2 == 1 || r.center % 2 == 1);
    let has_shift2 = plain.clone().any(|r| p % 2 == 1 || r.center % 2 == 0);
    let order4 = reflections.iter().find(|r| r.complemented).copied();
    let has_order4 = order4.is_some();
    let even = n.is_multiple_of(2);
    let (symmetry_type, witness) = match (kind, has_order4) {
        (WordKind::Period, true) => (SymmetryType::IV, order4),
        (WordKind::SemiPeriod, true) if !even => (SymmetryType::V, order4),
        (WordKind::SemiPeriod, true) => (SymmetryType::VI, order4),
        (WordKind::Period, false) if has_simple2 => {
            let w = plain.clone().find(|r| p % 2 == 1 || r.center % 2 == 1).copied();
            (if even { SymmetryType::I } else { SymmetryType::II }, w)
        }
        (WordKind::Period, false) if has_shift2 && even => {
            (SymmetryType::III, plain.clone().next().copied())
        }
        _ => (SymmetryType::None, None),
    };
    SymmetryReport { has_order4, has_simple2, has_shift2, symmetry_type, witness, reflections }
}

pub fn classify_symmetry(cw: &CuttingWord) -> SymmetryReport {
    classify_word(&cw.word, cw.kind)
}

/// Checks the matrix-sequence identities implied by the reflections of
/// the word: a reflection about basis position `r` sends `C_j` to a
/// matrix equal to `C_{r-j}^T` up to relabelling, and the positions it
/// fixes carry J-symmetric (plain reflection) or symmetric (complemented)
/// matrices.
pub fn check_symmetry_identities(cw: &CuttingWord, shapes: &[BergShape]) -> Result<()> {
    let report = classify_symmetry(cw);
    let p = cw.full_period();
    let n = cw.n;
    let at = |j: usize| &shapes[j % n];
    for r in &report.reflections {
        for j in 0..p {
            let image = (r.center + 1 + p - j) % p;
            if at(image).c != at(j).c_raw.transpose().canonical() {
                return Err(BergError::Internal(format!(
                    "C_{image} is not C_{j}^T up to relabelling"
                )));
            }
        }
        for j in r.fixed_positions(p) {
            let c = at(j).c_raw;
            let ok = if r.complemented { c.is_symmetric() } else { c.is_j_symmetric() };
            if !ok {
                return Err(BergError::Internal(format!(
                    "C_{j} = {c} lacks the symmetry of the reflection at {}",
                    r.center
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifan::cutting_word;

    fn cm(k: i128, l: i128, m: i128, n: i128) -> ConnectivityMatrix {
        ConnectivityMatrix::new(k, l, m, n).unwrap()
    }

    #[test]
    fn reference_connectivity_lists() {
        assert_eq!(
            connectivity_matrices(&Mat2Z::new(0, 1, 1, 2)).unwrap(),
            vec![cm(0, 1, 1, 2), cm(1, 1, 2, 1)]
        );
        assert_eq!(connectivity_matrices(&Mat2Z::new(0, 1, 1, 1)).unwrap(), vec![cm(0, 1, 1, 1)]);
        let cs = connectivity_matrices(&Mat2Z::new(1, 1, 1, 2)).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].trace(), 3);
        assert_eq!(cs[0].det(), 1);
    }

    #[test]
    fn dims_identities() {
        for c in [cm(0, 1, 1, 1), cm(0, 1, 1, 2), cm(1, 1, 2, 1), cm(3, 5, 1, 2), cm(7, 2, 3, 1)] {
            let d = rectangle_dims(&c);
            assert!(dims_identities_hold(&c, &d), "{c}");
            let ds = rectangle_dims(&c.sigma_conj());
            assert_eq!((ds.u, ds.v, ds.p, ds.q), (d.v, d.u, d.q, d.p));
            assert_eq!(is_isolated_by_dims(&d), is_isolated(&c), "{c}");
        }
    }

    #[test]
    fn dims_match_eigen_chart() {
        for m in [
            Mat2Z::new(0, 1, 1, 1),
            Mat2Z::new(5, 2, 2, 1),
            Mat2Z::new(-4, 3, 5, -4),
            Mat2Z::new(2, 3, -3, -5),
            Mat2Z::new(-1, 2, 1, -3),
        ] {
            let ed = EigenData::new(&m).unwrap();
            let cw = cutting_word_with(&ed).unwrap();
            for (i, sh) in shapes_of(&cw).unwrap().iter().enumerate() {
                let (he, ye) = ed.chart(sh.basis.e);
                let (hf, yf) = ed.chart(sh.basis.f);
                let d = &sh.dims;
                assert_eq!(he / (-hf), d.v / d.u, "{m} at {i}");
                assert_eq!(ye / yf, d.p / d.q, "{m} at {i}");
                assert!(dims_identities_hold(&sh.c_raw, d));
                assert_eq!(sh.isolated, cw.is_reduced(i as i64), "{m} at {i}");
            }
        }
    }

    #[test]
    fn counts_and_parity() {
        assert_eq!(count_berg(&cm(0, 1, 1, 1)), 1);
        assert_eq!(count_berg(&cm(0, 1, 1, 2)), 2);
        assert_eq!(count_berg(&cm(1, 1, 2, 1)), 2);
        assert!(!center_is_integer(&cm(1, 1, 2, 1)));
        assert!(center_is_integer(&cm(0, 1, 1, 2)));
        assert!(!center_is_integer(&cm(2, 1, 1, 1)));
        for s in 2..6 {
            for m in 1..4 {
                let c = cm(s * m - 1, m, s * (s + 1) * m - 2 * s - 1, (s + 1) * m - 1);
                assert_eq!(count_berg(&c), c.sum() / 2);
                assert_eq!(count_berg(&c), count_berg(&c.transpose()));
            }
        }
    }

    #[test]
    fn hinged_formulas() {
        assert_eq!(hinged_pairs_isolated(&cm(3, 1, 1, 0)).unwrap(), 0);
        assert!(hinged_pairs_isolated(&cm(1, 1, 2, 1)).is_err());
        assert!(is_isolated(&cm(1, 1, 1, 2)));
        for n in 3..9 {
            let c = cm(n - 1, 1, n * n - n - 1, n);
            assert!(!is_isolated(&c));
            assert_eq!(hinged_bound_connected(&c).unwrap(), n);
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(total_berg_count(&Mat2Z::new(0, 1, 1, 1)).unwrap(), 1);
        assert_eq!(total_berg_count(&Mat2Z::new(0, 1, 1, 2)).unwrap(), 4);
        let g3 = generator_of_word(&[1, 1, 1], WordKind::SemiPeriod);
        assert_eq!(total_berg_count(&g3).unwrap(), 8);
        assert_eq!(all_ones_total(3), 8);
        assert_eq!(block_word_total(2, 1), Ratio::from_integer(10));
    }

    #[test]
    fn j_and_transpose() {
        let c = cm(2, 3, 1, 1);
        assert_eq!(c.j_conjugate(), cm(1, 3, 1, 2));
        assert_eq!(c.j_conjugate().j_conjugate(), c);
        assert_eq!(c.transpose(), cm(2, 1, 3, 1));
    }

    #[test]
    fn reference_symmetry_words() {
        let cases = [
            ("110011", WordKind::Period, SymmetryType::I),
            ("11011", WordKind::Period, SymmetryType::II),
            ("1101", WordKind::Period, SymmetryType::III),
            ("110100", WordKind::Period, SymmetryType::IV),
            ("1", WordKind::SemiPeriod, SymmetryType::V),
            ("11", WordKind::SemiPeriod, SymmetryType::VI),
        ];
        for (w, kind, want) in cases {
            let word = parse_word(w).unwrap();
            assert_eq!(classify_word(&word, kind).symmetry_type, want, "{w}");
            let cw = cutting_word(&generator_of_word(&word, kind)).unwrap();
            assert_eq!(classify_symmetry(&cw).symmetry_type, want, "{w}");
            let shapes = shapes_of(&cw).unwrap();
            check_symmetry_identities(&cw, &shapes).unwrap();
        }
    }
}
