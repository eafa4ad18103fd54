//! Brute-force verification of the closed-form counts.
//!
//! Placements of a shape are enumerated as superlattice points in the box
//! `P = [-u, v] x [0, p + q]` of the local chart in which
//! `R_1 = [-u, 0] x [q - p, q]`, `R_2 = [0, v] x [0, q]`, `e = (v, p)`,
//! `f = (-u, q)`. The horizontal spine lifts to `[-u, v] x {q}` and the
//! vertical one to `{0} x [-p, q]`. A placement puts one fixed point at
//! `(t, q)` and the other at `(0, q - s)`; their difference `(t, s)` is a
//! point of `(M - I)^-1 L` inside `P`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::berg::{
    center_is_integer, count_berg, hinged_bound_connected, hinged_pairs_isolated, is_isolated,
    perron_root, rectangle_dims, shapes_of, BergShape, ConnectivityMatrix, Dims,
};
use crate::bifan::{check_factorization, cutting_word_with, nonneg_representation_scan, CuttingWord};
use crate::error::{BergError, Result};
use crate::intmat::{imul, Mat2Z, TorusPointQ, Vec2};
use crate::qfield::{EigenData, QuadNum};

/// Sign pattern of the eigenvalues, numbered as in the counting theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseId {
    /// `det C = 1`, `tr M > 0`: both eigenvalues positive.
    One = 1,
    /// `det C = -1`, `tr M < 0`: unstable eigenvalue negative.
    Two = 2,
    /// `det C = 1`, `tr M < 0`: both eigenvalues negative.
    Three = 3,
    /// `det C = -1`, `tr M > 0`: stable eigenvalue negative.
    Four = 4,
}

impl CaseId {
    pub fn of(det: i128, trace: i128) -> CaseId {
        match (det == 1, trace > 0) {
            (true, true) => CaseId::One,
            (false, false) => CaseId::Two,
            (true, false) => CaseId::Three,
            (false, true) => CaseId::Four,
        }
    }

    pub fn number(&self) -> u8 {
        *self as u8
    }
}

/// Everything the placement oracle needs about a shape: the connectivity
/// matrix in basis order and the sign of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGeometry {
    pub c: ConnectivityMatrix,
    pub trace_sign: i128,
    /// Representation of the automorphism in the shape's basis.
    pub rep: Mat2Z,
    pub lambda: QuadNum,
    pub mu: QuadNum,
    pub dims: Dims,
    pub case: CaseId,
}

pub type LatticePoint = [i128; 2];

impl OracleGeometry {
    pub fn new(c: ConnectivityMatrix, trace_sign: i128) -> Self {
        let rep = if trace_sign > 0 { c.mat().transpose() } else { -c.mat().transpose() };
        let lam_c = perron_root(&c);
        let lambda = if trace_sign > 0 { lam_c } else { -lam_c };
        let mu = QuadNum::from_int(c.det(), lambda.disc()) / lambda;
        OracleGeometry {
            c,
            trace_sign,
            rep,
            lambda,
            mu,
            dims: rectangle_dims(&c),
            case: CaseId::of(c.det(), trace_sign),
        }
    }

    pub fn of_shape(shape: &BergShape, m: &Mat2Z) -> Self {
        Self::new(shape.c_raw, m.trace().signum())
    }

    /// Geometry of the inverse automorphism with the transposed matrix.
    pub fn inverse(&self) -> Self {
        Self::new(self.c.transpose(), self.trace_sign * self.c.det())
    }

    fn q(&self, n: i128) -> QuadNum {
        QuadNum::from_int(n, self.lambda.disc())
    }

    /// Chart position `(t, s)` of `i e' + j f'`.
    pub fn chart(&self, z: LatticePoint) -> (QuadNum, QuadNum) {
        let d = &self.dims;
        let one = self.q(1);
        let t = (d.v.scale(z[0]) - d.u.scale(z[1])) / (self.mu - one);
        let s = (d.p.scale(z[0]) + d.q.scale(z[1])) / (self.lambda - one);
        (t, s)
    }

    /// `e` and `f` in the basis `{e', f'}`: the columns of `rep - I`.
    pub fn e_coords(&self) -> LatticePoint {
        self.rep.sub_identity().col(0)
    }

    pub fn f_coords(&self) -> LatticePoint {
        self.rep.sub_identity().col(1)
    }

    pub fn e_plus_f(&self) -> LatticePoint {
        let (e, f) = (self.e_coords(), self.f_coords());
        [e[0] + f[0], e[1] + f[1]]
    }

    pub fn in_box(&self, z: LatticePoint) -> bool {
        let (t, s) = self.chart(z);
        let d = &self.dims;
        t >= -d.u && t <= d.v && !s.is_negative() && s <= d.p + d.q
    }

    /// Closed `beta`-middle tests for the spines whose eigenvalue is negative.
    pub fn in_middles(&self, z: LatticePoint) -> bool {
        let (t, s) = self.chart(z);
        let d = &self.dims;
        let beta = self.lambda.abs();
        let margin = |len: QuadNum| len / (beta + self.q(1));
        if self.mu.is_negative() {
            let m = margin(d.u + d.v);
            if t + d.u < m || d.v - t < m {
                return false;
            }
        }
        if self.lambda.is_negative() {
            let m = margin(d.p + d.q);
            if s < m || d.p + d.q - s < m {
                return false;
            }
        }
        true
    }

    pub fn admissible(&self, z: LatticePoint) -> bool {
        self.in_box(z) && self.in_middles(z)
    }

    /// Integer search rectangle: `P` lies inside `{a e + b f : a, b in [-1, 2]}`.
    pub fn search_region(&self) -> ([i128; 2], [i128; 2]) {
        let (e, f) = (self.e_coords(), self.f_coords());
        let mut lo = [i128::MAX; 2];
        let mut hi = [i128::MIN; 2];
        for a in [-1, 2] {
            for b in [-1, 2] {
                for k in 0..2 {
                    let x = a * e[k] + b * f[k];
                    lo[k] = lo[k].min(x);
                    hi[k] = hi[k].max(x);
                }
            }
        }
        ([lo[0] - 2, lo[1] - 2], [hi[0] + 2, hi[1] + 2])
    }

    /// The points the counting argument removes from `P` in each case.
    pub fn listed_exclusions(&self) -> Vec<LatticePoint> {
        let (e, f, ef) = (self.e_coords(), self.f_coords(), self.e_plus_f());
        let mut v = match self.case {
            CaseId::One => vec![],
            CaseId::Two => vec![[0, 0], ef],
            CaseId::Three => vec![
                [0, 0],
                e,
                f,
                ef,
                [-1, 0],
                [0, -1],
                [ef[0] + 1, ef[1]],
                [ef[0], ef[1] + 1],
            ],
            CaseId::Four => vec![e, f],
        };
        v.sort();
        v
    }

    /// Class of `z` in `L^ / L`, as residues of `adj(rep - I) z`.
    pub fn class_key(&self, z: LatticePoint) -> LatticePoint {
        let a = self.rep.sub_identity();
        let d = a.det().abs();
        let adj = Mat2Z::new(a.d, -a.b, -a.c, a.a);
        let w = adj.apply(z);
        [w[0].rem_euclid(d), w[1].rem_euclid(d)]
    }

    pub fn class_count(&self) -> i128 {
        self.rep.sub_identity().det().abs()
    }

    pub fn mirror(&self, z: LatticePoint) -> LatticePoint {
        let ef = self.e_plus_f();
        [ef[0] - z[0], ef[1] - z[1]]
    }
}

/// Result of scanning `P` for superlattice points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementScan {
    pub case_id: CaseId,
    /// All superlattice points in the closed box.
    pub in_box: Vec<LatticePoint>,
    pub admissible: Vec<LatticePoint>,
    pub excluded: Vec<LatticePoint>,
}

pub fn scan_geometry(geo: &OracleGeometry) -> PlacementScan {
    let (lo, hi) = geo.search_region();
    let mut in_box = Vec::new();
    let mut admissible = Vec::new();
    let mut excluded = Vec::new();
    for i in lo[0]..=hi[0] {
        for j in lo[1]..=hi[1] {
            let z = [i, j];
            if !geo.in_box(z) {
                continue;
            }
            in_box.push(z);
            if geo.in_middles(z) {
                admissible.push(z);
            } else {
                excluded.push(z);
            }
        }
    }
    PlacementScan { case_id: geo.case, in_box, admissible, excluded }
}

/// Admissible placements of `shape`. The case with a negative stable and
/// positive unstable eigenvalue is computed on the inverse automorphism
/// with the transposed connectivity matrix, where it becomes case 2.
pub fn placement_lattice_points(shape: &BergShape, m: &Mat2Z) -> (OracleGeometry, PlacementScan) {
    let geo = OracleGeometry::of_shape(shape, m);
    let geo = if geo.case == CaseId::Four { geo.inverse() } else { geo };
    let scan = scan_geometry(&geo);
    (geo, scan)
}

/// Number of classes under the central symmetry `z -> e + f - z` of `P`.
pub fn quotient_by_equivalence(points: &[LatticePoint], geo: &OracleGeometry) -> usize {
    let set: BTreeSet<_> = points.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut classes = 0;
    for &z in points {
        if seen.contains(&z) {
            continue;
        }
        classes += 1;
        seen.insert(z);
        let w = geo.mirror(z);
        if set.contains(&w) {
            seen.insert(w);
        }
    }
    classes
}

/// Hinged families: placements sharing a pair of distinct fixed points.
///
/// Admissible points are grouped by their nonzero class in `L^ / L`; the
/// points of one group differ by translations by `e` and `f`. A group and
/// its image under the central symmetry describe the same family, so they
/// are counted once. Placements anchored on a single fixed point (class
/// zero, a common corner of the rectangles) are not hinged families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HingedAnalysis {
    /// Largest number of placements in one family.
    pub max_family: usize,
    /// Families with exactly two placements.
    pub pairs: usize,
    pub family_sizes: Vec<usize>,
}

pub fn hinged_analysis(points: &[LatticePoint], geo: &OracleGeometry) -> HingedAnalysis {
    let mut groups: BTreeMap<LatticePoint, Vec<LatticePoint>> = BTreeMap::new();
    for &z in points {
        groups.entry(geo.class_key(z)).or_default().push(z);
    }
    let mut done = BTreeSet::new();
    let mut family_sizes = Vec::new();
    for (key, group) in &groups {
        if *key == [0, 0] || done.contains(key) {
            continue;
        }
        done.insert(*key);
        done.insert(geo.class_key(geo.mirror(group[0])));
        family_sizes.push(group.len());
    }
    family_sizes.sort_unstable_by(|a, b| b.cmp(a));
    HingedAnalysis {
        max_family: family_sizes.first().copied().unwrap_or(0),
        pairs: family_sizes.iter().filter(|&&s| s == 2).count(),
        family_sizes,
    }
}

/// A concrete Berg partition: a shape with its two anchoring fixed points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BergPlacement {
    pub shape: BergShape,
    pub lattice_point: LatticePoint,
    /// Fixed point on the horizontal spine.
    pub p1: TorusPointQ,
    /// Fixed point on the vertical spine.
    pub p2: TorusPointQ,
    /// `p1 - p2` lifted to the plane, in standard coordinates.
    #[serde(serialize_with = "ser_ratio_pair")]
    pub z: [Ratio<i128>; 2],
    /// Distance of `p1` from the left end of the horizontal spine.
    pub offset_s: QuadNum,
    /// Distance of `p2` from the top end of the vertical spine.
    pub offset_u: QuadNum,
}

fn ser_ratio_pair<S: serde::Serializer>(
    z: &[Ratio<i128>; 2],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [z[0].to_string(), z[1].to_string()].serialize(s)
}

fn solve_rational(a: &Mat2Z, v: Vec2) -> Result<[Ratio<i128>; 2]> {
    let d = a.det();
    if d == 0 {
        return Err(BergError::Degenerate("singular matrix".into()));
    }
    let adj = Mat2Z::new(a.d, -a.b, -a.c, a.a);
    let w = adj.apply(v);
    Ok([Ratio::new(w[0], d), Ratio::new(w[1], d)])
}

/// Builds the placement for an admissible superlattice point, expressed in
/// the shape's own geometry (never via the inverse automorphism).
pub fn realize_placement(shape: &BergShape, m: &Mat2Z, z: LatticePoint) -> Result<BergPlacement> {
    let geo = OracleGeometry::of_shape(shape, m);
    if !geo.in_box(z) {
        return Err(BergError::Infeasible(format!("{z:?} lies outside the box")));
    }
    if !geo.in_middles(z) {
        return Err(BergError::Infeasible(format!(
            "{z:?} puts a fixed point outside the middle of its spine"
        )));
    }
    let b = shape.basis.matrix();
    let z_std = solve_rational(&m.sub_identity(), b.apply(z))?;
    let p1 = TorusPointQ::origin();
    let p2 = TorusPointQ::new(-z_std[0], -z_std[1]);
    let (t, s) = geo.chart(z);
    Ok(BergPlacement {
        shape: shape.clone(),
        lattice_point: z,
        p1,
        p2,
        z: z_std,
        offset_s: t + geo.dims.u,
        offset_u: s,
    })
}

/// Checks the Markov conditions `M(J^s) ⊂ J^s`, `M(J^u) ⊃ J^u` directly.
///
/// The fixed points are tested on the torus, their difference is located
/// through the eigen chart of `M` (independently of the superlattice
/// coordinates), and the spine images are compared endpoint by endpoint.
pub fn verify_markov(pl: &BergPlacement, m: &Mat2Z) -> bool {
    if !pl.p1.is_fixed_by(m) || !pl.p2.is_fixed_by(m) {
        return false;
    }
    let diff = pl.p1.sub(&pl.p2);
    let lift = TorusPointQ::new(pl.z[0], pl.z[1]);
    if diff != lift {
        return false;
    }
    let Ok(ed) = EigenData::new(m) else { return false };
    let d = &pl.shape.dims;
    let basis = &pl.shape.basis;
    // Chart scales taking e to (v, p).
    let alpha = d.v / ed.stable_coord(basis.e);
    let beta = d.p / ed.unstable_coord(basis.e);
    let den = *pl.z[0].denom() * *pl.z[1].denom();
    let num = [
        imul(*pl.z[0].numer(), *pl.z[1].denom()),
        imul(*pl.z[1].numer(), *pl.z[0].denom()),
    ];
    let t = alpha * ed.stable_coord(num).div_int(den);
    let s = beta * ed.unstable_coord(num).div_int(den);
    if t + d.u != pl.offset_s || s != pl.offset_u {
        return false;
    }
    let zero = ed.q(0);
    if t < -d.u || t > d.v || s < zero || s > d.p + d.q {
        return false;
    }
    // Horizontal spine [-u, v] contracted about t.
    let img = |x: QuadNum| t + ed.mu * (x - t);
    let (a, b) = (img(-d.u), img(d.v));
    let inside = |x: QuadNum| x >= -d.u && x <= d.v;
    if !inside(a) || !inside(b) {
        return false;
    }
    // Vertical spine [-p, q] expanded about q - s.
    let y0 = d.q - s;
    let img = |y: QuadNum| y0 + ed.lambda * (y - y0);
    let (a, b) = (img(-d.p), img(d.q));
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    lo <= -d.p && hi >= d.q
}

/// Pick's lemma on the parallelogram with vertex `origin` and sides `a`, `b`:
/// area equals interior points plus half the non-vertex boundary points plus one.
pub fn pick_check(origin: Vec2, a: Vec2, b: Vec2) -> Result<bool> {
    let area = (a[0] * b[1] - a[1] * b[0]).abs();
    if area == 0 {
        return Err(BergError::Degenerate("zero-area parallelogram".into()));
    }
    let corners = [origin, [origin[0] + a[0], origin[1] + a[1]], [origin[0] + b[0], origin[1] + b[1]], [
        origin[0] + a[0] + b[0],
        origin[1] + a[1] + b[1],
    ]];
    let xs = corners.iter().map(|c| c[0]);
    let ys = corners.iter().map(|c| c[1]);
    let (x0, x1) = (xs.clone().min().unwrap(), xs.max().unwrap());
    let (y0, y1) = (ys.clone().min().unwrap(), ys.max().unwrap());
    let (mut interior, mut boundary) = (0i128, 0i128);
    for x in x0..=x1 {
        for y in y0..=y1 {
            // p = origin + alpha a + beta b, with alpha, beta scaled by det.
            let w = [x - origin[0], y - origin[1]];
            let det = a[0] * b[1] - a[1] * b[0];
            let mut al = w[0] * b[1] - w[1] * b[0];
            let mut be = a[0] * w[1] - a[1] * w[0];
            if det < 0 {
                al = -al;
                be = -be;
            }
            let d = det.abs();
            if al < 0 || be < 0 || al > d || be > d {
                continue;
            }
            if al > 0 && be > 0 && al < d && be < d {
                interior += 1;
            } else if !corners.contains(&[x, y]) {
                boundary += 1;
            }
        }
    }
    Ok(2 * area == 2 * interior + boundary + 2)
}

/// Oracle result for one shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub index: usize,
    #[serde(rename = "C")]
    pub c: ConnectivityMatrix,
    pub case_id: u8,
    pub raw_points: usize,
    pub pre_exclusion: usize,
    pub classes: usize,
    pub formula: i128,
    #[serde(rename = "match")]
    pub matches: bool,
    pub raw_match: bool,
    pub exclusions_match: bool,
    /// Case 4 only: count computed in the shape's own geometry.
    pub direct_classes: Option<usize>,
    pub markov_ok: bool,
    pub realized: usize,
    pub fixed_point_classes: usize,
    pub fixed_point_total: i128,
    pub surjective: bool,
    pub hinged: HingedAnalysis,
    pub hinged_formula: Option<i128>,
    pub hinged_ok: bool,
    pub center_ok: bool,
}

impl ShapeCheck {
    pub fn all_ok(&self) -> bool {
        self.matches
            && self.raw_match
            && self.exclusions_match
            && self.direct_classes.is_none_or(|d| d as i128 == self.formula)
            && self.markov_ok
            && self.surjective
            && self.hinged_ok
            && self.center_ok
    }
}

pub fn check_shape(shape: &BergShape, m: &Mat2Z) -> ShapeCheck {
    let (geo, scan) = placement_lattice_points(shape, m);
    let classes = quotient_by_equivalence(&scan.admissible, &geo);
    let formula = count_berg(&shape.c);
    let sum = shape.c.sum();
    let raw = scan.admissible.len();
    let pre = scan.in_box.len() as i128;
    let pre_expected = match geo.case {
        CaseId::One => sum - 1,
        CaseId::Two | CaseId::Four => sum + 1,
        CaseId::Three => sum + 7,
    };
    let mut excluded = scan.excluded.clone();
    excluded.sort();
    let exclusions_match = excluded == geo.listed_exclusions() && pre == pre_expected;

    // The shape's own geometry, used for realizations and case-4 cross-checks.
    let own = OracleGeometry::of_shape(shape, m);
    let own_scan = if own.case == CaseId::Four { scan_geometry(&own) } else { scan.clone() };
    let direct_classes = (own.case == CaseId::Four).then(|| quotient_by_equivalence(&own_scan.admissible, &own));
    let own_excl_ok = if own.case == CaseId::Four {
        let mut ex = own_scan.excluded.clone();
        ex.sort();
        ex == own.listed_exclusions() && own_scan.admissible.len() as i128 == sum - 1
    } else {
        true
    };

    let mut markov_ok = true;
    let mut realized = 0;
    for &z in &own_scan.admissible {
        match realize_placement(shape, m, z) {
            Ok(pl) if verify_markov(&pl, m) => realized += 1,
            _ => markov_ok = false,
        }
    }
    for &z in &own_scan.excluded {
        if realize_placement(shape, m, z).is_ok() {
            markov_ok = false;
        }
    }

    let keys: HashSet<_> = own_scan.admissible.iter().map(|&z| own.class_key(z)).collect();
    let total = own.class_count();
    let surjective = match own.case {
        CaseId::Three => keys.len() as i128 == total - 1 && !keys.contains(&[0, 0]),
        _ => keys.len() as i128 == total,
    };

    let hinged = hinged_analysis(&own_scan.admissible, &own);
    let (hinged_formula, hinged_ok) = if is_isolated(&shape.c) {
        let f = hinged_pairs_isolated(&shape.c).ok();
        (f, f == Some(hinged.pairs as i128) && hinged.max_family <= 2)
    } else {
        let f = hinged_bound_connected(&shape.c).ok();
        (f, f.is_some_and(|b| hinged.max_family as i128 <= b))
    };

    let center = own.e_plus_f();
    let center_integral = center[0] % 2 == 0 && center[1] % 2 == 0;
    let center_ok = center_integral == center_is_integer(&shape.c) && (raw % 2 == 1) == center_integral;

    ShapeCheck {
        index: shape.index,
        c: shape.c,
        case_id: geo.case.number(),
        raw_points: raw,
        pre_exclusion: scan.in_box.len(),
        classes,
        formula,
        matches: classes as i128 == formula,
        raw_match: raw as i128 == sum - 1,
        exclusions_match: exclusions_match && own_excl_ok,
        direct_classes,
        markov_ok: markov_ok && realized as i128 == sum - 1,
        realized,
        fixed_point_classes: keys.len(),
        fixed_point_total: total,
        surjective,
        hinged,
        hinged_formula,
        hinged_ok,
        center_ok,
    }
}

/// Oracle result for one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixCheck {
    pub matrix: Mat2Z,
    pub word: String,
    pub kind: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub shapes: Vec<ShapeCheck>,
    pub fixed_points_ok: bool,
    pub factorization_ok: bool,
    pub symmetry_ok: bool,
    pub scan_ok: Option<bool>,
}

impl MatrixCheck {
    pub fn all_ok(&self) -> bool {
        self.fixed_points_ok
            && self.factorization_ok
            && self.symmetry_ok
            && self.scan_ok.unwrap_or(true)
            && self.shapes.iter().all(ShapeCheck::all_ok)
    }

    pub fn count_mismatches(&self) -> usize {
        self.shapes.iter().filter(|s| !s.matches).count()
    }
}

/// Options for [`check_matrix`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    /// Bound for the nonnegative-representation scan, if it should run.
    pub scan_bound: Option<i128>,
}

pub fn check_matrix(m: &Mat2Z, opts: CheckOptions) -> Result<MatrixCheck> {
    let ed = EigenData::new(m)?;
    let cw = cutting_word_with(&ed)?;
    let shapes = shapes_of(&cw)?;
    let fixed = m.fixed_points()?;
    let fixed_points_ok = fixed.len() as i128 == m.sub_identity().det().abs()
        && fixed.iter().all(|p| p.is_fixed_by(m))
        && fixed.iter().collect::<HashSet<_>>().len() == fixed.len()
        && fixed_point_group_closed(&fixed);
    let factorization_ok = check_factorization(&cw).is_ok();
    let symmetry_ok = crate::berg::check_symmetry_identities(&cw, &shapes).is_ok();
    let scan_ok = match opts.scan_bound {
        Some(b) => Some(nonneg_representation_scan(m, b)?.iter().all(|h| h.in_fan)),
        None => None,
    };
    let checks = shapes.iter().map(|s| check_shape(s, m)).collect();
    Ok(MatrixCheck {
        matrix: *m,
        word: cw.word_string(),
        kind: cw.kind.as_str(),
        n: cw.n,
        shapes: checks,
        fixed_points_ok,
        factorization_ok,
        symmetry_ok,
        scan_ok,
    })
}

fn fixed_point_group_closed(points: &[TorusPointQ]) -> bool {
    let set: HashSet<_> = points.iter().collect();
    points
        .iter()
        .all(|a| points.iter().all(|b| set.contains(&a.add(b))) && set.contains(&a.neg()))
}

/// All hyperbolic matrices of `GL(2, Z)` with entries in `[-bound, bound]`,
/// in lexicographic order.
pub fn corpus(bound: i128) -> Vec<Mat2Z> {
    let r = -bound..=bound;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let m = Mat2Z::new(a, b, c, d);
                    if m.det().abs() == 1 && m.is_hyperbolic().unwrap_or(false) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Conjugation-invariant key: trace, determinant and the cyclic sequence
/// of canonical connectivity matrices, rotated to its smallest form.
pub fn conjugacy_key(cw: &CuttingWord) -> Result<(i128, i128, Vec<ConnectivityMatrix>)> {
    let cs: Vec<_> = shapes_of(cw)?.into_iter().map(|s| s.c).collect();
    let best = (0..cs.len())
        .map(|r| cs[r..].iter().chain(&cs[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default();
    Ok((cw.matrix.trace(), cw.matrix.det(), best))
}

pub fn dedup_conjugates(ms: &[Mat2Z]) -> Result<Vec<Mat2Z>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in ms {
        let cw = cutting_word_with(&EigenData::new(m)?)?;
        if seen.insert(conjugacy_key(&cw)?) {
            out.push(*m);
        }
    }
    Ok(out)
}

/// Aggregate of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub matrices: usize,
    pub shapes: usize,
    pub mismatches: usize,
    pub failures: Vec<MatrixCheck>,
    pub by_case: BTreeMap<u8, usize>,
}

/// Runs [`check_matrix`] on every matrix in parallel on the current rayon pool.
pub fn sweep(ms: &[Mat2Z], opts: CheckOptions) -> Result<SweepReport> {
    let checks: Vec<MatrixCheck> = ms
        .par_iter()
        .map(|m| check_matrix(m, opts))
        .collect::<Result<_>>()?;
    let mut by_case = BTreeMap::new();
    for c in &checks {
        for s in &c.shapes {
            *by_case.entry(s.case_id).or_insert(0) += 1;
        }
    }
    let mut failures: Vec<_> = checks.iter().filter(|c| !c.all_ok()).cloned().collect();
    failures.sort_by_key(|c| c.matrix);
    Ok(SweepReport {
        matrices: checks.len(),
        shapes: checks.iter().map(|c| c.shapes.len()).sum(),
        mismatches: checks.iter().filter(|c| !c.all_ok()).count(),
        failures,
        by_case,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifan::cutting_word;

    fn shapes(m: &Mat2Z) -> Vec<BergShape> {
        shapes_of(&cutting_word(m).unwrap()).unwrap()
    }

    #[test]
    fn golden_mean_shape() {
        let m = Mat2Z::new(0, 1, 1, 1);
        let sh = &shapes(&m)[0];
        let (geo, scan) = placement_lattice_points(sh, &m);
        assert_eq!(geo.case, CaseId::Two);
        assert_eq!(scan.admissible.len(), 2);
        assert_eq!(quotient_by_equivalence(&scan.admissible, &geo), 1);
        let own = OracleGeometry::of_shape(sh, &m);
        for z in scan_geometry(&own).admissible {
            let pl = realize_placement(sh, &m, z).unwrap();
            assert_eq!(pl.p1, TorusPointQ::origin());
            assert!(verify_markov(&pl, &m));
        }
    }

    #[test]
    fn silver_shapes() {
        let m = Mat2Z::new(0, 1, 1, 2);
        for sh in shapes(&m) {
            let (geo, scan) = placement_lattice_points(&sh, &m);
            assert_eq!(geo.case, CaseId::Two);
            assert_eq!(scan.admissible.len() as i128, sh.c.sum() - 1);
            assert_eq!(quotient_by_equivalence(&scan.admissible, &geo), 2);
        }
    }

    #[test]
    fn quotient_small_sets() {
        let m = Mat2Z::new(0, 1, 1, 2);
        let geo = OracleGeometry::of_shape(&shapes(&m)[0], &m);
        let ef = geo.e_plus_f();
        let c = [ef[0] / 2, ef[1] / 2];
        assert_eq!(quotient_by_equivalence(&[[0, 0], ef, c], &geo), 2);
        assert_eq!(quotient_by_equivalence(&[[0, 0], ef], &geo), 1);
    }

    #[test]
    fn perturbed_placement_fails() {
        let m = Mat2Z::new(2, 1, 1, 1);
        let sh = &shapes(&m)[0];
        let own = OracleGeometry::of_shape(sh, &m);
        let z = scan_geometry(&own).admissible[0];
        let mut pl = realize_placement(sh, &m, z).unwrap();
        assert!(verify_markov(&pl, &m));
        pl.p2 = pl.p2.add(&TorusPointQ::new(Ratio::new(1, 7), Ratio::new(0, 1)));
        assert!(!verify_markov(&pl, &m));
    }

    #[test]
    fn case_three_exclusions_are_infeasible() {
        let m = Mat2Z::new(-3, 1, -1, 0);
        for sh in shapes(&m) {
            let own = OracleGeometry::of_shape(&sh, &m);
            assert_eq!(own.case, CaseId::Three);
            let scan = scan_geometry(&own);
            assert_eq!(scan.excluded.len(), 8);
            for z in scan.excluded {
                assert!(matches!(realize_placement(&sh, &m, z), Err(BergError::Infeasible(_))));
            }
        }
    }

    #[test]
    fn pick_examples() {
        assert!(pick_check([0, 0], [1, 0], [0, 1]).unwrap());
        assert!(pick_check([0, 0], [2, 0], [0, 2]).unwrap());
        assert!(pick_check([0, 0], [3, 1], [1, 2]).unwrap());
        assert!(pick_check([0, 0], [1, 1], [2, 2]).is_err());
    }

    #[test]
    fn small_sweep_is_clean() {
        let report = sweep(&corpus(2), CheckOptions { scan_bound: None }).unwrap();
        for f in &report.failures {
            eprintln!("{}", serde_json::to_string(f).unwrap());
        }
        assert_eq!(report.mismatches, 0);
    }
}
