//! Exact construction and verification of explicit Runge–Kutta methods of
//! order 10.
//!
//! The crate covers the rooted-tree machinery behind order conditions
//! ([`trees`]), exact arithmetic in the number field ℚ(α, β) that contains the
//! six-point Lobatto nodes ([`field`]), Butcher tableau diagnostics
//! ([`tableau`], [`duality`]), the seven-parameter family of 15-stage
//! order-10 methods ([`family`]), stability and error analysis
//! ([`analysis`]), fixed-step integration ([`integrator`]) and file formats
//! ([`io`]).

pub mod analysis;
pub mod duality;
pub mod family;
pub mod field;
pub mod integrator;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod tableau;
pub mod trees;

pub use field::{FieldElement, Rational, Real};
pub use scalar::{Scalar, Tol};
pub use tableau::ButcherTableau;
pub use trees::{Forest, RootedTree, TreeCombination};
