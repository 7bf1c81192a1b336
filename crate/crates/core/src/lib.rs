//! Exact integral cohomology of the type-A Peterson variety.
//!
//! The ring `Z[y1..yn]/(I + I')` is modelled twice:
//!
//! * [`petring`] multiplies classes in the integral basis `{pi_J : J ⊆ [n-1]}`
//!   using closed-form structure constants built from binomial coefficients
//!   of the component merges;
//! * [`oracle`] builds every graded piece of the quotient by brute-force
//!   integer linear algebra and serves as ground truth for the former.
//!
//! [`permfan`] computes the cohomology of the permutohedral variety from the
//! Stanley–Reisner presentation of the braid fan, together with the integral
//! rank of its `S_n`-invariants, and [`verify`] bundles all cross-checks into
//! deterministic report-producing suites.

pub mod cache;
pub mod combinat;
pub mod error;
pub mod intpoly;
pub mod oracle;
pub mod permfan;
pub mod petring;
pub mod serde_int;
pub mod verify;
pub mod zlinalg;

pub use combinat::{HessenbergFn, Interval, SubsetJ};
pub use error::{Error, Result};
pub use intpoly::{HookPartition, IntPoly, Monomial};
pub use petring::{IntervalClass, PetClass};
pub use zlinalg::{Cokernel, ZMatrix, ZQuotientStructure};
