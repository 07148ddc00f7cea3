//! Exact arithmetic over F2: polynomials, bit-packed vectors and matrices,
//! and matrices over F2[x] with Smith-normal-form invariant factors.

mod matrix;
mod poly;
mod polymat;
mod vector;

pub use matrix::MatF2;
pub use poly::{Degree, Poly2};
pub use polymat::{InvariantFactors, PolyMat};
pub use vector::F2Vec;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix {rows}x{cols} exceeds the {MAX_DIM} limit")]
    TooLarge { rows: usize, cols: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// `gcd(a, b)`, monic.
pub fn poly_gcd(a: &Poly2, b: &Poly2) -> Result<Poly2, Gf2Error> {
    a.gcd(b)
}

/// Smith-form invariant factors of `xI - M`.
pub fn smith_invariant_factors(m: &PolyMat) -> Result<InvariantFactors, Gf2Error> {
    m.smith_invariant_factors()
}

pub fn char_poly(m: &MatF2) -> Result<Poly2, Gf2Error> {
    m.char_poly()
}

pub fn min_poly(m: &MatF2) -> Result<Poly2, Gf2Error> {
    m.min_poly()
}

pub fn kernel_dim(m: &MatF2) -> usize {
    m.kernel_dim()
}

pub fn subspace_dim_per(factors: &InvariantFactors, r: u64) -> usize {
    factors.subspace_dim_per(r)
}
