//! Exact-arithmetic engine for the two-dimensional one-component plasma at
//! even coupling `Gamma`.
//!
//! The crate expands integer powers of the Vandermonde determinant
//! `prod_{j<k} (z_k - z_j)^{Gamma/2}` over monomial (`Gamma = 4p`) or
//! antisymmetrized-monomial (`Gamma = 4p+2`) bases via Jack-eigenvalue
//! recursions, then uses the squared coefficients to compute finite-`N`
//! observables exactly: pair-correlation moments on the sphere, density
//! moments in the soft disk, diagrammatic approximations, perturbative
//! corrections around `Gamma = 2`, and finite-size extrapolations.
//!
//! All observable values are exact `BigRational`s; floating point appears only
//! in explicitly approximate series and at the rendering boundary.

pub mod diagrams;
pub mod disk;
pub mod error;
pub mod expansion;
pub mod extrapolation;
pub mod numeric;
pub mod partitions;
pub mod perturbation;
pub mod reduce;
pub mod sphere;

pub use error::{Error, Result};
pub use expansion::{
    brute_force_expand, expand, expand_with_limit, load_table, save_table, CoefficientTable,
    PlasmaParams,
};
pub use extrapolation::{fit4, FitBasis, FitResult};
pub use numeric::{Decimal, DecimalOrigin};
pub use partitions::{
    dominance_leq, enumerate_admissible, enumerate_admissible_with_limit, AdmissibleSet,
    ExpansionKind, Partition, DEFAULT_MEMBER_LIMIT,
};
pub use sphere::MomentRecord;
