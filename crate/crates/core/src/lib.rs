//! Spherical functions of infinite symmetric group pairs.
//!
//! The closed-form Thoma spherical functions ([`thoma`]) are checked against
//! three independent constructions:
//!
//! * [`oracle`]: a finite-rank tensor product of graded spaces with the
//!   super sign rule, evaluated exactly;
//! * [`cocycle`]: affine isometric actions `h ↦ U(g)h + Ξ(g)` on tensor
//!   powers of `ℓ₂`, whose spherical function is `exp(−½‖Ξ(g)‖²)`;
//! * [`fock`]: a degree-truncated boson Fock space realizing those affine
//!   actions by operators.
//!
//! [`verify`] ties them together into reproducible check suites.

pub mod cocycle;
pub mod fock;
pub mod oracle;
pub mod perm;
pub mod tensor;
pub mod thoma;
pub mod verify;

/// Exact rational numbers used throughout.
pub type Rational = num_rational::BigRational;

pub use cocycle::{make_pair, parse_group_element, GroupElement, PairKind, PairSpec};
pub use perm::{parse_permutation, Label, Permutation};
pub use thoma::{combine, make_params, phi, power_sum, psi, ThomaParams};
