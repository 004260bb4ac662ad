//! Meshless peridynamics with constitutive correspondence material models.
//!
//! The crate implements the original correspondence model (nonlocal
//! deformation gradient driving a local first Piola-Kirchhoff law) and the
//! generalized finite-deformation family built on nonlocal Seth-Hill strain
//! measures, together with the machinery needed to study material stability
//! of both: analytic Jacobian diagonal blocks, finite-difference Jacobian
//! oracles, discrete and continuum hydrostatic stability criteria, lattice
//! sum verification, Silling's perturbation test, dispersion analysis, and
//! quasi-static/explicit-dynamic solvers for the numerical experiments.
//!
//! Force assembly and the embarrassingly parallel analyses run on rayon when
//! the default `parallel` feature is enabled and fall back to sequential
//! loops otherwise; both paths produce bit-identical results.

pub mod error;
pub mod exec;
pub mod kinematics;
pub mod linalg;
pub mod material;
pub mod mesh;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod stability;
pub mod tensor;

pub mod experiments;

pub use error::{Error, Result};
pub use kinematics::SethHill;
pub use material::{Body, LocalLaw, MaterialSpec, ModelFamily};
pub use mesh::{FamilyMap, GridSpec, InfluenceKind, InfluenceSpec, NodeSet};
pub use tensor::{Tensor2, Tensor4};
