//! Numerical geometry of two- and three-qubit separable states.
//!
//! The crate builds the tetrahedral and Pauli pure-product bases, maps
//! between three affine coordinate charts on density matrices, evaluates
//! Bures / Hilbert-Schmidt / Wigner-Yanase distances and Bures metric
//! tensors, classifies two-qubit states with the partial-transpose test,
//! analyses distance-class graphs and integrates Bures volumes over
//! two-dimensional sections of the two-qubit state space.
//!
//! Data-parallel loops (pair classification, tensor assembly, grid scans,
//! quadrature panels) run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise. Results are identical either
//! way: every reduction is performed in index order.

pub mod constants;
mod error;
pub mod export;
pub mod geometry;
pub mod linalg;
pub mod metrics;
mod par;
pub mod quadrature;
pub mod sections;
pub mod separability;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use metrics::{Convention, MetricTensor, SpectrumReport};
pub use states::{
    BlochVector, Chart, ChartKind, ChartPoint, DensityMatrix, GeneratorBasis, ProductBasis,
    ProductKind,
};
