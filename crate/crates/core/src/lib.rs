//! Exact arithmetic for the cohomological action of Fourier-Mukai transforms on
//! polarized abelian varieties, together with the numerical stability data they act on.
//!
//! Everything lattice-valued is computed in `Q[ℓ]/(ℓ^{g+1})` with rational coefficients.
//! Central charges live in `Q(√3)[i]` whenever the inputs allow it and fall back to
//! `f64` otherwise, with the fallback tracked explicitly.

pub mod angle;
pub mod cohlattice;
pub mod config;
pub mod emit;
pub mod error;
pub mod field;
pub mod fmtransform;
pub mod rational;
pub mod scan;
pub mod stability;
pub mod transformlaw;
pub mod verify;

pub use angle::{PolarScalar, RationalAngle};
pub use cohlattice::{AbelianContext, CohClass, VVector};
pub use error::{Error, Result};
pub use field::{Cplx, QSqrt3, Real};
pub use fmtransform::{FMTransformSpec, QuasiInverse, ShiftedClass};
pub use rational::Q;
pub use scan::{scan_walls, ScanRequest, WallDataset};
pub use stability::{bg_check, central_charge, ChargeSpec, Phase};
pub use transformlaw::{
    conjecture_params, phase_shift_check, verify_induced_law, zeta, InducedChargeLaw,
};
