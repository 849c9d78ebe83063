//! Two-qubit entanglement detection with a three-setting Bell-type
//! inequality over complementary local observables.
//!
//! A state is separable exactly when
//! `√(⟨A₁B₁+A₂B₂⟩² + ⟨A₃+B₃⟩²) − ⟨A₃B₃⟩ ≤ 1` for every pair of same-orientation
//! triads, and the largest value over settings is `1 − 4·λ_min(ρ^{T_B})`.
//!
//! Modules, bottom-up:
//! - [`linalg`]: 2×2 / 4×4 complex matrices, Kronecker product, partial
//!   transpose, Jacobi eigensolver.
//! - [`states`]: density matrices, Bell and Werner states, random ensembles,
//!   Schmidt decomposition.
//! - [`observables`]: triads, orientation, settings and exact correlators.
//! - [`witness`]: the inequality evaluators and the optimal-setting construction.
//! - [`optimize`]: multi-start compass search over frame pairs.
//! - [`shots`]: finite-statistics simulation with bootstrap error bars.
//! - [`io`] and [`cli`]: file formats, presets and the command front end.

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod optimize;
pub mod rotation;
pub mod shots;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use observables::{correlators, TestSetting, TestStatistics, Triad};
pub use optimize::{maximize_violation, OptConfig, OptResult};
pub use states::{DensityMatrix, PureState};
pub use witness::{bell_value, optimal_setting, ppt_lambda_min, WitnessReport};
