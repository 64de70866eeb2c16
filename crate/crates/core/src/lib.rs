//! Numerical toolkit for ψ-hyperholomorphic and fractional ψ-Fueter analysis on
//! four-dimensional boxes, with residual reports for the integral identities.

pub mod corpus;
pub mod error;
pub mod fraccalc;
pub mod fracfueter;
pub mod fueter;
pub mod hypercomplex;
pub mod perturbed;
pub mod quadrature;
pub mod report;
pub mod special;

pub use error::{Error, Result};
pub use hypercomplex::{ComplexQuaternion, Quaternion, StructuralSet, CQ};
