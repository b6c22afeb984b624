//! Exact exterior calculus over polynomial contact manifolds, plus the
//! numerical dynamics toolkit used to study characteristic foliations of
//! level-set hypersurfaces.
//!
//! The symbolic layer (`scalar`, `eps`, `poly`, `form`, `field`) works over
//! sparse multivariate polynomials whose coefficients are finite Laurent
//! series in a formal parameter `e` with exact rational coefficients, so
//! every identity check is a zero test in a decidable ring. The geometric
//! layer (`contact`, `construction`) extracts characteristic vector fields
//! of hypersurfaces `{F = 0}` and runs the verification ledger for a
//! specific overtwisted-hypersurface construction that violates the
//! Thurston-Bennequin inequality. The numeric layer (`real`, `unipoly`,
//! `dynamics`) provides high-precision root isolation, Sturm positivity
//! certificates, singularity classification and constrained integration.

pub mod chart;
pub mod contact;
pub mod construction;
pub mod coords;
pub mod dsl;
pub mod dynamics;
pub mod eps;
pub mod error;
pub mod field;
pub mod form;
pub mod ledger;
pub mod poly;
pub mod real;
pub mod rule;
pub mod scalar;
pub mod unipoly;

pub use contact::{ContactData, TangencyRecord, TangencySign, TbReport, Verdict};
pub use construction::{ModelData, ReducedSystem};
pub use coords::CoordSystem;
pub use eps::EpsCoeff;
pub use error::Error;
pub use field::VecField;
pub use form::Form;
pub use poly::Poly;
pub use real::{Ctx, Real};
pub use rule::NormalFormRule;
pub use scalar::Scalar;
pub use unipoly::UniPoly;
