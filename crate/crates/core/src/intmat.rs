//! Exact 2x2 integer matrices, GL(2,Z) membership, hyperbolicity and fixed
//! points of toral automorphisms.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{BergError, Result};

/// Integer column vector.
pub type Vec2 = [i128; 2];

#[inline]
pub(crate) fn imul(x: i128, y: i128) -> i128 {
    x.checked_mul(y).expect("integer overflow in exact arithmetic")
}

#[inline]
pub(crate) fn iadd(x: i128, y: i128) -> i128 {
    x.checked_add(y).expect("integer overflow in exact arithmetic")
}

#[inline]
pub(crate) fn isub(x: i128, y: i128) -> i128 {
    x.checked_sub(y).expect("integer overflow in exact arithmetic")
}

pub fn vadd(x: Vec2, y: Vec2) -> Vec2 {
    [iadd(x[0], y[0]), iadd(x[1], y[1])]
}

pub fn vsub(x: Vec2, y: Vec2) -> Vec2 {
    [isub(x[0], y[0]), isub(x[1], y[1])]
}

pub fn vneg(x: Vec2) -> Vec2 {
    [-x[0], -x[1]]
}

/// Determinant of the matrix with columns `x`, `y`.
pub fn det_cols(x: Vec2, y: Vec2) -> i128 {
    isub(imul(x[0], y[1]), imul(x[1], y[0]))
}

/// A 2x2 integer matrix `[[a, b], [c, d]]` (row-major).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2Z {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl Mat2Z {
    pub const IDENTITY: Mat2Z = Mat2Z::new(1, 0, 0, 1);
    /// The coordinate swap.
    pub const SIGMA: Mat2Z = Mat2Z::new(0, 1, 1, 0);

    pub const fn new(a: i128, b: i128, c: i128, d: i128) -> Self {
        Mat2Z { a, b, c, d }
    }

    /// Matrix with the given columns.
    pub fn from_cols(x: Vec2, y: Vec2) -> Self {
        Mat2Z::new(x[0], y[0], x[1], y[1])
    }

    pub fn col(&self, j: usize) -> Vec2 {
        match j {
            0 => [self.a, self.c],
            1 => [self.b, self.d],
            _ => panic!("column index out of range"),
        }
    }

    /// Elementary factor used by the cutting sequence: bit 1 keeps the
    /// second column (`[[1,0],[1,1]]`), bit 0 keeps the first (`[[1,1],[0,1]]`).
    pub fn elementary(bit: u8) -> Self {
        if bit == 1 {
            Mat2Z::new(1, 0, 1, 1)
        } else {
            Mat2Z::new(1, 1, 0, 1)
        }
    }

    pub fn det(&self) -> i128 {
        isub(imul(self.a, self.d), imul(self.b, self.c))
    }

    pub fn trace(&self) -> i128 {
        iadd(self.a, self.d)
    }

    pub fn transpose(&self) -> Self {
        Mat2Z::new(self.a, self.c, self.b, self.d)
    }

    /// `sigma * self * sigma`: both rows and columns swapped.
    pub fn sigma_conj(&self) -> Self {
        Mat2Z::new(self.d, self.c, self.b, self.a)
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        [
            iadd(imul(self.a, v[0]), imul(self.b, v[1])),
            iadd(imul(self.c, v[0]), imul(self.d, v[1])),
        ]
    }

    pub fn checked_mul(&self, o: &Mat2Z) -> Option<Mat2Z> {
        let e = |x: i128, y: i128, z: i128, w: i128| {
            x.checked_mul(y)?.checked_add(z.checked_mul(w)?)
        };
        Some(Mat2Z::new(
            e(self.a, o.a, self.b, o.c)?,
            e(self.a, o.b, self.b, o.d)?,
            e(self.c, o.a, self.d, o.c)?,
            e(self.c, o.b, self.d, o.d)?,
        ))
    }

    pub fn sub_identity(&self) -> Self {
        Mat2Z::new(isub(self.a, 1), self.b, self.c, isub(self.d, 1))
    }

    /// Inverse of a unimodular matrix, exact over Z.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        match self.det() {
            1 => Ok(Mat2Z::new(self.d, -self.b, -self.c, self.a)),
            -1 => Ok(Mat2Z::new(-self.d, self.b, self.c, -self.a)),
            d => Err(BergError::NotAutomorphism(d)),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Mat2Z::IDENTITY;
        for _ in 0..k {
            acc = acc * *self;
        }
        acc
    }

    pub fn max_abs_entry(&self) -> i128 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a >= 0 && self.b >= 0 && self.c >= 0 && self.d >= 0
    }

    pub fn commutes_with(&self, o: &Mat2Z) -> bool {
        *self * *o == *o * *self
    }

    /// Hyperbolicity of a toral automorphism: `(det = 1 and |tr| > 2)` or
    /// `(det = -1 and tr != 0)`. Rejects matrices outside GL(2,Z).
    pub fn is_hyperbolic(&self) -> Result<bool> {
        let tr = self.trace();
        match self.det() {
            1 => Ok(tr.abs() > 2),
            -1 => Ok(tr != 0),
            d => Err(BergError::NotAutomorphism(d)),
        }
    }

    /// Ok only for hyperbolic automorphisms; the error explains why not.
    pub fn require_hyperbolic(&self) -> Result<()> {
        if self.is_hyperbolic()? {
            Ok(())
        } else {
            Err(BergError::NotHyperbolic(format!(
                "{} has det {} and trace {}",
                self,
                self.det(),
                self.trace()
            )))
        }
    }

    /// Coordinates of `v` in the basis given by the columns of `self`, which
    /// must be unimodular.
    pub fn solve_unimodular(&self, v: Vec2) -> Result<Vec2> {
        Ok(self.inverse_unimodular()?.apply(v))
    }

    /// Complete list of torus fixed points of `self`, sorted
    /// lexicographically, starting with the origin.
    pub fn fixed_points(&self) -> Result<Vec<TorusPointQ>> {
        self.require_hyperbolic()?;
        let q = self.sub_identity().det().abs();
        let mut out = Vec::new();
        for i in 0..q {
            for j in 0..q {
                // (M - I)(i/q, j/q) must be integral.
                let m = self.sub_identity();
                let x = iadd(imul(m.a, i), imul(m.b, j));
                let y = iadd(imul(m.c, i), imul(m.d, j));
                if x % q == 0 && y % q == 0 {
                    out.push(TorusPointQ::new(Ratio::new(i, q), Ratio::new(j, q)));
                }
            }
        }
        Ok(out)
    }
}

impl Mul for Mat2Z {
    type Output = Mat2Z;
    fn mul(self, o: Mat2Z) -> Mat2Z {
        self.checked_mul(&o)
            .expect("integer overflow in matrix product")
    }
}

impl Neg for Mat2Z {
    type Output = Mat2Z;
    fn neg(self) -> Mat2Z {
        Mat2Z::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Mat2Z {
    type Err = BergError;

    /// Accepts `"a,b;c,d"` (spaces allowed) or the JSON form `[[a,b],[c,d]]`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim_start();
        if trimmed.starts_with('[') {
            let rows: Vec<Vec<i128>> = serde_json::from_str(s).map_err(|e| BergError::Parse {
                pos: e.column().saturating_sub(1),
                msg: e.to_string(),
            })?;
            if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                return Err(BergError::Parse {
                    pos: 0,
                    msg: "expected a 2x2 array".into(),
                });
            }
            return Ok(Mat2Z::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]));
        }
        parse_text(s)
    }
}

fn parse_text(s: &str) -> Result<Mat2Z> {
    let mut entries = Vec::with_capacity(4);
    let mut seps = Vec::with_capacity(3);
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if ch == b',' || ch == b';' {
            if entries.len() == seps.len() {
                return Err(BergError::Parse {
                    pos: i,
                    msg: format!("unexpected '{}'", ch as char),
                });
            }
            seps.push((ch, i));
            i += 1;
            continue;
        }
        if ch == b'-' || ch == b'+' || ch.is_ascii_digit() {
            if entries.len() != seps.len() {
                return Err(BergError::Parse {
                    pos: i,
                    msg: "missing separator".into(),
                });
            }
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let tok = &s[start..i];
            let v: i128 = tok.parse().map_err(|_| BergError::Parse {
                pos: start,
                msg: format!("invalid integer '{tok}'"),
            })?;
            entries.push(v);
            continue;
        }
        return Err(BergError::Parse {
            pos: i,
            msg: format!("unexpected character '{}'", ch as char),
        });
    }
    if entries.len() != 4 || seps.len() != 3 {
        return Err(BergError::Parse {
            pos: s.len(),
            msg: "expected four entries in the form a,b;c,d".into(),
        });
    }
    let expected = *b",;,";
    for (k, (ch, pos)) in seps.iter().enumerate() {
        if *ch != expected[k] {
            return Err(BergError::Parse {
                pos: *pos,
                msg: format!("expected '{}'", expected[k] as char),
            });
        }
    }
    Ok(Mat2Z::new(entries[0], entries[1], entries[2], entries[3]))
}

impl Serialize for Mat2Z {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [[self.a, self.b], [self.c, self.d]].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2Z {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = <[[i128; 2]; 2]>::deserialize(d)?;
        Ok(Mat2Z::new(m[0][0], m[0][1], m[1][0], m[1][1]))
    }
}

/// A point of the torus R^2/Z^2 with rational coordinates in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPointQ {
    pub x: Ratio<i128>,
    pub y: Ratio<i128>,
}

fn frac(r: Ratio<i128>) -> Ratio<i128> {
    r - r.floor()
}

impl TorusPointQ {
    pub fn new(x: Ratio<i128>, y: Ratio<i128>) -> Self {
        TorusPointQ { x: frac(x), y: frac(y) }
    }

    pub fn origin() -> Self {
        TorusPointQ::new(Ratio::from_integer(0), Ratio::from_integer(0))
    }

    pub fn add(&self, o: &TorusPointQ) -> Self {
        TorusPointQ::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(&self, o: &TorusPointQ) -> Self {
        TorusPointQ::new(self.x - o.x, self.y - o.y)
    }

    pub fn neg(&self) -> Self {
        TorusPointQ::new(-self.x, -self.y)
    }

    /// `true` iff `m * p == p` on the torus.
    pub fn is_fixed_by(&self, m: &Mat2Z) -> bool {
        let s = m.sub_identity();
        let x = self.x * s.a + self.y * s.b;
        let y = self.x * s.c + self.y * s.d;
        x.is_integer() && y.is_integer()
    }

    pub fn common_denominator(&self) -> i128 {
        self.x.denom().lcm(self.y.denom())
    }
}

impl Serialize for TorusPointQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let show = |r: &Ratio<i128>| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        };
        [show(&self.x), show(&self.y)].serialize(s)
    }
}
