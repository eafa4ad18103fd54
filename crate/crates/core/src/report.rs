//! Machine-readable analysis of one automorphism.

use serde::Serialize;

use crate::berg::{
    center_is_integer, classify_symmetry, count_berg, hinged_bound_connected, hinged_pairs_isolated,
    shapes_of, ConnectivityMatrix, Dims, SymmetryReport,
};
use crate::bifan::{cutting_word, BasisPair, WordKind};
use crate::error::Result;
use crate::intmat::Mat2Z;
use crate::qfield::{eigen_data, QuadNum};

/// Hinged families: exact pair count for isolated shapes, an upper bound on
/// the family size otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Hinged {
    Pairs(i128),
    MaxFamilyBound(i128),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeReport {
    pub index: usize,
    #[serde(rename = "C")]
    pub c: ConnectivityMatrix,
    #[serde(rename = "C_basis")]
    pub c_basis: ConnectivityMatrix,
    pub basis: BasisPair,
    pub count: i128,
    pub isolated: bool,
    pub center_integer: bool,
    pub hinged: Hinged,
    pub dims: Dims,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub matrix: Mat2Z,
    pub trace: i128,
    pub det: i128,
    pub lambda: QuadNum,
    pub mu: QuadNum,
    pub word: String,
    pub kind: WordKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: u32,
    pub sign: i32,
    pub generator: Mat2Z,
    pub generator_in_basis0: Mat2Z,
    pub basis0: BasisPair,
    pub shapes: Vec<ShapeReport>,
    pub symmetry: SymmetryReport,
    pub total: i128,
}

pub fn analyze(m: &Mat2Z) -> Result<Analysis> {
    let eig = eigen_data(m)?;
    let cw = cutting_word(m)?;
    let mut shapes = Vec::with_capacity(cw.n);
    for s in shapes_of(&cw)? {
        let hinged = if s.isolated {
            Hinged::Pairs(hinged_pairs_isolated(&s.c_raw)?)
        } else {
            Hinged::MaxFamilyBound(hinged_bound_connected(&s.c_raw)?)
        };
        shapes.push(ShapeReport {
            index: s.index,
            c: s.c,
            c_basis: s.c_raw,
            basis: s.basis,
            count: count_berg(&s.c_raw),
            isolated: s.isolated,
            center_integer: center_is_integer(&s.c_raw),
            hinged,
            dims: s.dims,
        });
    }
    let total = shapes.iter().map(|s| s.count).sum();
    Ok(Analysis {
        matrix: *m,
        trace: m.trace(),
        det: m.det(),
        lambda: eig.lambda,
        mu: eig.mu,
        word: cw.word_string(),
        kind: cw.kind,
        n: cw.n,
        k: cw.k,
        sign: cw.sign,
        generator: cw.generator,
        generator_in_basis0: cw.generator_in_basis0,
        basis0: cw.basis0,
        symmetry: classify_symmetry(&cw),
        shapes,
        total,
    })
}
