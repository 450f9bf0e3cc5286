//! Exact Tanaka prolongation of stratified nilpotent Lie algebras, and
//! realization of the prolonged algebra as polynomial conformal vector
//! fields on the corresponding Carnot group.
//!
//! All arithmetic is over arbitrary-precision rationals, so every rank and
//! every polynomial identity is decided exactly.
//!
//! ```
//! use carnot_core::derivations::{constrain_g0, strata_derivations, GZeroConstraint};
//! use carnot_core::presets;
//! use carnot_core::prolongation::{full_prolongation, Status};
//!
//! let g = presets::engel();
//! let g0 = constrain_g0(&g, &strata_derivations(&g), &GZeroConstraint::Conformal).unwrap();
//! let (s, report) = full_prolongation(&g, &g0, 10).unwrap();
//! assert_eq!(report.level_dims, vec![1, 0]);
//! assert_eq!(report.status, Status::TerminatedAt(1));
//! assert_eq!(s.dim(), 5);
//! ```

pub mod algebra;
pub mod contact;
pub mod derivations;
pub mod frame;
pub mod group;
pub mod linalg;
pub mod poly;
pub mod presets;
pub mod prolongation;
pub mod tau;

pub use algebra::{AlgebraError, AlgebraSpec, GradedLieAlgebra};
pub use frame::{left_invariant_frame, Frame, PolyVectorField};
pub use group::{CoordinateRecipe, Group};
pub use linalg::{Matrix, Rational, Subspace};
pub use poly::{Monomial, Polynomial};

#[doc = include_str!("../../../book/src/algebras.md")]
#[doc(hidden)]
pub mod book_algebras {}

#[doc = include_str!("../../../book/src/prolongation.md")]
#[doc(hidden)]
pub mod book_prolongation {}

#[doc = include_str!("../../../book/src/vector_fields.md")]
#[doc(hidden)]
pub mod book_vector_fields {}

#[doc = include_str!("../../../book/src/conformality.md")]
#[doc(hidden)]
pub mod book_conformality {}
