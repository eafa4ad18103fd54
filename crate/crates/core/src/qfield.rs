//! Exact arithmetic in a real quadratic field `Q(sqrt(disc))`.
//!
//! Every comparison is decided with integers only: the sign of
//! `a + b*sqrt(disc)` is immediate when `a` and `b` agree in sign, and
//! otherwise follows from comparing `a^2` with `b^2 * disc`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{BergError, Result};
use crate::intmat::{iadd, imul, isub, Mat2Z, Vec2};

/// `(a + b*sqrt(disc)) / c` in canonical form: `c > 0`, `gcd(a, b, c) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: i128,
    b: i128,
    c: i128,
    disc: i128,
}

fn is_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).any(|k| k >= 0 && k * k == n)
}

/// Checks that `disc` can serve as the radicand of a real quadratic field.
pub fn check_discriminant(disc: i128) -> Result<()> {
    if disc <= 1 || is_square(disc) {
        Err(BergError::BadDiscriminant(disc))
    } else {
        Ok(())
    }
}

impl QuadNum {
    /// Builds `(a + b*sqrt(disc)) / c`. `disc` must be a positive non-square.
    pub fn new(a: i128, b: i128, c: i128, disc: i128) -> Result<Self> {
        check_discriminant(disc)?;
        if c == 0 {
            return Err(BergError::DivisionByZero);
        }
        Ok(Self::canonical(a, b, c, disc))
    }

    fn canonical(mut a: i128, mut b: i128, mut c: i128, disc: i128) -> Self {
        if a == 0 && b == 0 {
            return QuadNum { a: 0, b: 0, c: 1, disc };
        }
        if c < 0 {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        QuadNum { a: a / g, b: b / g, c: c / g, disc }
    }

    pub fn from_int(n: i128, disc: i128) -> Self {
        QuadNum { a: n, b: 0, c: 1, disc }
    }

    pub fn rational(num: i128, den: i128, disc: i128) -> Self {
        assert!(den != 0, "zero denominator");
        Self::canonical(num, 0, den, disc)
    }

    pub fn zero(disc: i128) -> Self {
        Self::from_int(0, disc)
    }

    pub fn one(disc: i128) -> Self {
        Self::from_int(1, disc)
    }

    /// `sqrt(disc)` itself.
    pub fn sqrt_disc(disc: i128) -> Self {
        QuadNum { a: 0, b: 1, c: 1, disc }
    }

    pub fn parts(&self) -> (i128, i128, i128) {
        (self.a, self.b, self.c)
    }

    pub fn disc(&self) -> i128 {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    /// Integer value, if `self` is one.
    pub fn as_integer(&self) -> Option<i128> {
        (self.b == 0 && self.c == 1).then_some(self.a)
    }

    fn same_ctx(&self, o: &QuadNum) -> Result<()> {
        if self.disc == o.disc {
            Ok(())
        } else {
            Err(BergError::ContextMismatch {
                left: self.disc,
                right: o.disc,
            })
        }
    }

    pub fn checked_add(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_ctx(o)?;
        if self.c == o.c {
            return Ok(Self::canonical(
                iadd(self.a, o.a),
                iadd(self.b, o.b),
                self.c,
                self.disc,
            ));
        }
        Ok(Self::canonical(
            iadd(imul(self.a, o.c), imul(o.a, self.c)),
            iadd(imul(self.b, o.c), imul(o.b, self.c)),
            imul(self.c, o.c),
            self.disc,
        ))
    }

    pub fn checked_sub(&self, o: &QuadNum) -> Result<QuadNum> {
        self.checked_add(&o.neg_ref())
    }

    pub fn checked_mul(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_ctx(o)?;
        let a = iadd(imul(self.a, o.a), imul(imul(self.b, o.b), self.disc));
        let b = iadd(imul(self.a, o.b), imul(self.b, o.a));
        Ok(Self::canonical(a, b, imul(self.c, o.c), self.disc))
    }

    /// Field norm times `c^2`: `a^2 - b^2 disc`.
    fn raw_norm(&self) -> i128 {
        isub(imul(self.a, self.a), imul(imul(self.b, self.b), self.disc))
    }

    pub fn recip(&self) -> Result<QuadNum> {
        if self.is_zero() {
            return Err(BergError::DivisionByZero);
        }
        // c / (a + b r) = c (a - b r) / (a^2 - b^2 disc)
        let n = self.raw_norm();
        Ok(Self::canonical(
            imul(self.c, self.a),
            imul(self.c, -self.b),
            n,
            self.disc,
        ))
    }

    pub fn checked_div(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_ctx(o)?;
        self.checked_mul(&o.recip()?)
    }

    fn neg_ref(&self) -> QuadNum {
        QuadNum {
            a: -self.a,
            b: -self.b,
            c: self.c,
            disc: self.disc,
        }
    }

    /// Galois conjugate `(a - b sqrt(disc)) / c`.
    pub fn conj(&self) -> QuadNum {
        QuadNum {
            a: self.a,
            b: -self.b,
            c: self.c,
            disc: self.disc,
        }
    }

    pub fn scale(&self, k: i128) -> QuadNum {
        Self::canonical(imul(self.a, k), imul(self.b, k), self.c, self.disc)
    }

    pub fn div_int(&self, k: i128) -> QuadNum {
        assert!(k != 0, "division by zero");
        Self::canonical(self.a, self.b, imul(self.c, k), self.disc)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = self.a.signum() as i32;
        let sb = self.b.signum() as i32;
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // a and b*sqrt(disc) have opposite signs; the larger magnitude wins.
        let a2 = imul(self.a, self.a);
        let b2d = imul(imul(self.b, self.b), self.disc);
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> QuadNum {
        if self.is_negative() {
            self.neg_ref()
        } else {
            *self
        }
    }

    /// Exact comparison; fails on mismatched fields.
    pub fn try_cmp(&self, o: &QuadNum) -> Result<Ordering> {
        let d = self.checked_sub(o)?;
        Ok(d.signum().cmp(&0))
    }

    /// Floating approximation. Cancellation is avoided by rationalising
    /// when `a` and `b` have opposite signs. Informational only.
    pub fn to_f64(&self) -> f64 {
        let r = (self.disc as f64).sqrt();
        let (a, b, c) = (self.a as f64, self.b as f64, self.c as f64);
        if self.a.signum() * self.b.signum() < 0 {
            if let Some(n) = self
                .a
                .checked_mul(self.a)
                .and_then(|a2| a2.checked_sub(self.b.checked_mul(self.b)?.checked_mul(self.disc)?))
            {
                return n as f64 / ((a - b * r) * c);
            }
        }
        (a + b * r) / c
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for QuadNum {
            type Output = QuadNum;
            fn $m(self, o: QuadNum) -> QuadNum {
                self.$checked(&o).expect(concat!("QuadNum ", stringify!($m)))
            }
        }
        impl<'a> $tr<&'a QuadNum> for &'a QuadNum {
            type Output = QuadNum;
            fn $m(self, o: &'a QuadNum) -> QuadNum {
                self.$checked(o).expect(concat!("QuadNum ", stringify!($m)))
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        self.neg_ref()
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        self.neg_ref()
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, o: &QuadNum) -> Option<Ordering> {
        self.try_cmp(o).ok()
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match (self.a, self.b) {
            (a, 0) => format!("{a}"),
            (0, b) => format!("{b}√{}", self.disc),
            (a, b) if b < 0 => format!("{a}-{}√{}", -b, self.disc),
            (a, b) => format!("{a}+{b}√{}", self.disc),
        };
        if self.c == 1 {
            write!(f, "{num}")
        } else if self.b == 0 || self.a == 0 {
            write!(f, "{num}/{}", self.c)
        } else {
            write!(f, "({num})/{}", self.c)
        }
    }
}

impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadNum", 5)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("disc", &self.disc)?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

/// Exact eigen-data of a hyperbolic automorphism.
///
/// `lambda` is the expanding eigenvalue. The direction vectors follow a fixed
/// convention: for `M = [[a,b],[c,d]]` the eigenvector for `t` is
/// `(b, t - a)` when `b != 0`, else `(t - d, c)`. The chart used throughout
/// the crate has the stable direction as its horizontal axis and the
/// unstable direction as its vertical axis, oriented along these vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    pub matrix: Mat2Z,
    pub disc: i128,
    pub lambda: QuadNum,
    pub mu: QuadNum,
    pub unstable_dir: [QuadNum; 2],
    pub stable_dir: [QuadNum; 2],
    stable_row: [QuadNum; 2],
    unstable_row: [QuadNum; 2],
}

impl EigenData {
    pub fn new(m: &Mat2Z) -> Result<Self> {
        m.require_hyperbolic()?;
        let tr = m.trace();
        let det = m.det();
        let disc = isub(imul(tr, tr), imul(4, det));
        check_discriminant(disc)?;
        let root = QuadNum::sqrt_disc(disc);
        let half_tr = QuadNum::rational(tr, 2, disc);
        let half_root = root.div_int(2);
        let (lambda, mu) = if tr > 0 {
            (half_tr + half_root, half_tr - half_root)
        } else {
            (half_tr - half_root, half_tr + half_root)
        };
        let dir = |t: &QuadNum| -> [QuadNum; 2] {
            if m.b != 0 {
                [
                    QuadNum::from_int(m.b, disc),
                    *t - QuadNum::from_int(m.a, disc),
                ]
            } else {
                [
                    *t - QuadNum::from_int(m.d, disc),
                    QuadNum::from_int(m.c, disc),
                ]
            }
        };
        let unstable_dir = dir(&lambda);
        let stable_dir = dir(&mu);
        // x = h * stable_dir + y * unstable_dir, solved by Cramer's rule.
        let w = stable_dir[0] * unstable_dir[1] - stable_dir[1] * unstable_dir[0];
        let stable_row = [unstable_dir[1] / w, -(unstable_dir[0] / w)];
        let unstable_row = [-(stable_dir[1] / w), stable_dir[0] / w];
        Ok(EigenData {
            matrix: *m,
            disc,
            lambda,
            mu,
            unstable_dir,
            stable_dir,
            stable_row,
            unstable_row,
        })
    }

    pub fn q(&self, n: i128) -> QuadNum {
        QuadNum::from_int(n, self.disc)
    }

    /// Horizontal (stable) chart coordinate of an integer vector.
    pub fn stable_coord(&self, v: Vec2) -> QuadNum {
        self.stable_row[0].scale(v[0]) + self.stable_row[1].scale(v[1])
    }

    /// Vertical (unstable) chart coordinate of an integer vector.
    pub fn unstable_coord(&self, v: Vec2) -> QuadNum {
        self.unstable_row[0].scale(v[0]) + self.unstable_row[1].scale(v[1])
    }

    /// Both chart coordinates `(horizontal, vertical)`.
    pub fn chart(&self, v: Vec2) -> (QuadNum, QuadNum) {
        (self.stable_coord(v), self.unstable_coord(v))
    }

    /// Strictly in the open first quadrant of the chart.
    pub fn in_first_quadrant(&self, v: Vec2) -> bool {
        self.stable_coord(v).is_positive() && self.unstable_coord(v).is_positive()
    }

    /// Strictly in the open second quadrant of the chart.
    pub fn in_second_quadrant(&self, v: Vec2) -> bool {
        self.stable_coord(v).is_negative() && self.unstable_coord(v).is_positive()
    }

    /// Image of an eigen-direction vector under the matrix, for checking.
    pub fn apply_to(&self, v: &[QuadNum; 2]) -> [QuadNum; 2] {
        let m = &self.matrix;
        [
            v[0].scale(m.a) + v[1].scale(m.b),
            v[0].scale(m.c) + v[1].scale(m.d),
        ]
    }
}

/// Convenience wrapper matching the operation name used in reports.
pub fn eigen_data(m: &Mat2Z) -> Result<EigenData> {
    EigenData::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i128, b: i128, c: i128, d: i128) -> QuadNum {
        QuadNum::new(a, b, c, d).unwrap()
    }

    #[test]
    fn golden_ratio_products() {
        let phi = q(1, 1, 2, 5);
        let psi = q(-1, 1, 2, 5);
        assert_eq!(phi * psi, QuadNum::one(5));
        assert_eq!(phi * phi, q(3, 1, 2, 5));
        assert_eq!(phi + QuadNum::zero(5), phi);
    }

    #[test]
    fn comparisons() {
        let phi = q(1, 1, 2, 5);
        assert_eq!(phi.try_cmp(&QuadNum::rational(8, 5, 5)).unwrap(), Ordering::Greater);
        let r2 = QuadNum::sqrt_disc(2);
        assert_eq!(r2.try_cmp(&r2).unwrap(), Ordering::Equal);
        assert_eq!((-r2).try_cmp(&QuadNum::zero(2)).unwrap(), Ordering::Less);
    }

    #[test]
    fn context_and_zero_errors() {
        let a = QuadNum::sqrt_disc(2);
        let b = QuadNum::sqrt_disc(5);
        assert!(matches!(
            a.checked_add(&b),
            Err(BergError::ContextMismatch { left: 2, right: 5 })
        ));
        assert_eq!(a.checked_div(&QuadNum::zero(2)), Err(BergError::DivisionByZero));
        assert_eq!(QuadNum::new(1, 1, 1, 4), Err(BergError::BadDiscriminant(4)));
    }

    #[test]
    fn canonical_form_is_unique() {
        assert_eq!(q(2, 4, -6, 5).parts(), (-1, -2, 3));
        assert_eq!(q(0, 0, -7, 5).parts(), (0, 0, 1));
    }

    fn check_eigen(m: Mat2Z, lambda: QuadNum, mu: QuadNum) {
        let ed = EigenData::new(&m).unwrap();
        assert_eq!(ed.lambda, lambda);
        assert_eq!(ed.mu, mu);
        // characteristic polynomial vanishes exactly
        let t = ed.q(m.trace());
        let d = ed.q(m.det());
        for x in [ed.lambda, ed.mu] {
            assert!((x * x - t * x + d).is_zero());
        }
        assert_eq!(ed.lambda * ed.mu, d);
        assert_eq!(ed.lambda + ed.mu, t);
        let mv = ed.apply_to(&ed.unstable_dir);
        assert_eq!(mv[0], ed.lambda * ed.unstable_dir[0]);
        assert_eq!(mv[1], ed.lambda * ed.unstable_dir[1]);
        let mv = ed.apply_to(&ed.stable_dir);
        assert_eq!(mv[0], ed.mu * ed.stable_dir[0]);
        assert_eq!(mv[1], ed.mu * ed.stable_dir[1]);
    }

    #[test]
    fn eigen_examples() {
        check_eigen(Mat2Z::new(2, 1, 1, 1), q(3, 1, 2, 5), q(3, -1, 2, 5));
        // disc is kept unreduced: tr^2 - 4 det = 5 for [[0,1],[1,1]], 8 for [[0,1],[1,2]]
        check_eigen(Mat2Z::new(0, 1, 1, 1), q(1, 1, 2, 5), q(1, -1, 2, 5));
        check_eigen(Mat2Z::new(0, 1, 1, 2), q(2, 1, 2, 8), q(2, -1, 2, 8));
        // 1 + sqrt(2) == (2 + sqrt(8)) / 2
        assert!((q(2, 1, 2, 8).to_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        check_eigen(Mat2Z::new(-3, 1, -1, 0), q(-3, -1, 2, 5), q(-3, 1, 2, 5));
        // det -1: disc = 1 + 4
        check_eigen(Mat2Z::new(1, 1, 1, 0), q(1, 1, 2, 5), q(1, -1, 2, 5));
    }

    #[test]
    fn eigen_chart_is_diagonal() {
        let m = Mat2Z::new(3, 2, 4, 3);
        let ed = EigenData::new(&m).unwrap();
        for v in [[1, 0], [0, 1], [3, -7]] {
            let mv = m.apply(v);
            assert_eq!(ed.stable_coord(mv), ed.mu * ed.stable_coord(v));
            assert_eq!(ed.unstable_coord(mv), ed.lambda * ed.unstable_coord(v));
        }
    }

    fn arb_q(disc: i128) -> impl Strategy<Value = QuadNum> {
        (-50i128..50, -50i128..50, 1i128..30).prop_map(move |(a, b, c)| {
            QuadNum::new(a, b, c, disc).unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_q(13), y in arb_q(13), z in arb_q(13)) {
            prop_assert_eq!((x + y) + z, x + (y + z));
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x * (y + z), x * y + x * z);
            prop_assert_eq!(x - x, QuadNum::zero(13));
            if !y.is_zero() {
                prop_assert_eq!((x / y) * y, x);
            }
        }

        #[test]
        fn ordering_is_translation_invariant(x in arb_q(7), y in arb_q(7), z in arb_q(7)) {
            prop_assert_eq!(x.try_cmp(&y).unwrap(), (x + z).try_cmp(&(y + z)).unwrap());
        }
    }
}
