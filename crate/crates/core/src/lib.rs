//! Numerical harmonic analysis for Markov semigroups on finite-dimensional
//! von Neumann algebras: matrix algebras `M_n` with normalized trace and
//! group algebras of finite groups.

pub mod bmo;
pub mod czmetric;
pub mod error;
pub mod fit;
pub mod forms;
pub mod groups;
pub mod opcore;
pub mod qmetric;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod semigroup;
pub mod transforms;

pub use error::{Error, Result};
pub use opcore::{OperatorElement, SchattenExponent, C64};
