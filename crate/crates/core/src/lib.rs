//! Dynamics of symmetric invertible asynchronous elementary cellular automata.
//!
//! These are sequential dynamical systems over the cycle graph `C_n` whose
//! vertex functions are `parity_3` (ECA rule 150) or `(1+parity)_3` (rule
//! 105). The crate offers three independent ways to count periodic points:
//!
//! * brute-force enumeration of the phase space ([`phase`]),
//! * invariant factors of the linear part over F2\[x\] ([`gf2`], [`affine`]),
//! * closed-form period counts ([`affine::closed_form_per`]),
//!
//! and the supporting machinery: the shift-conjugacy embedding
//! ([`embedding`]), flexible toggles ([`toggle`]), and a harness for
//! exploring `Z/mZ` generalisations ([`conjecture`]).

pub mod affine;
pub mod arith;
pub mod conjecture;
pub mod embedding;
pub mod gf2;
pub mod phase;
pub mod system;
pub mod toggle;

pub use gf2::{F2Vec, InvariantFactors, MatF2, Poly2, PolyMat};
pub use phase::{PeriodTable, PhaseGraph};
pub use system::{Rule, RuleVector, SdsSpec, State, UpdateOrder};
