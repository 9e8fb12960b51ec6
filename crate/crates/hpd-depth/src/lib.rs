//! Intrinsic data depth for Hermitian positive definite matrices.
//!
//! The space of HPD matrices, equipped with the affine-invariant Riemannian
//! metric, is a geodesically complete manifold of non-positive curvature.
//! This crate implements depth functions acting directly on that manifold
//! (zonoid, geodesic distance, spatial, and integrated variants for curves of
//! matrices), the intrinsic mean and median they are maximized by, depth-based
//! ranking and central regions, percentile-bootstrap confidence regions for
//! the intrinsic mean, and simulation harnesses for robustness, efficiency,
//! timing, and coverage studies.

pub mod centers;
pub mod depth;
pub mod error;
pub mod experiments;
pub mod hermitian;
pub mod inference;
pub mod io;
pub mod lp;
pub mod manifold;
pub mod sampling;

pub use error::{Error, Result};
pub use hermitian::{
    congruence, congruence_hpd, eigh, from_coordinates, hermitian_basis, hermitian_exp,
    matrix_function, to_coordinates, BasisCoordinates, ComplexMatrix, Eigensystem,
    HermitianMatrix, HpdMatrix,
};
