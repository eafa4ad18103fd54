//! Exact computation of Markov partitions for hyperbolic toral automorphisms.

pub mod error;
pub mod intmat;
pub mod qfield;
pub mod bifan;
pub mod berg;
pub mod oracle;
pub mod render;
pub mod report;

pub use error::{BergError, Result};
pub use intmat::{Mat2Z, TorusPointQ, Vec2};
pub use qfield::{EigenData, QuadNum};
pub use bifan::{BasisPair, CuttingWord, WordKind};
pub use berg::{BergShape, ConnectivityMatrix, Dims, SymmetryReport, SymmetryType};
pub use oracle::{BergPlacement, CaseId, OracleGeometry};
pub use render::{RenderSpec, ShowFlags};
pub use report::Analysis;
