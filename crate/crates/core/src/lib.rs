//! Spectral toolkit for tight-binding zigzag nanoribbons in a perpendicular
//! magnetic field and a transverse electric potential.
//!
//! The operator lives on the honeycomb strip of width `N` zigzag chains
//! (`p = 2N + 1` transverse sites). Its Bloch decomposition reduces every
//! spectral question to `p x p` real symmetric tridiagonal matrices
//! `J_t(b, v)` parametrized by the quasimomentum `t in [0, 2pi)`:
//!
//! * [`lattice`] builds the ribbon graph, the magnetic edge phases, and a
//!   direct-space finite-section oracle,
//! * [`fiber`] builds the tridiagonal Bloch fibers (real and complex gauge),
//! * [`eigen`] is the self-contained symmetric tridiagonal eigensolver,
//! * [`bands`] samples dispersion curves, assembles spectral bands and
//!   detects flat bands,
//! * [`asymptotics`] evaluates the perturbative band-edge formulas and
//!   checks them against exact numerics,
//! * [`inverse`] solves the two inverse spectral problems (odd potentials
//!   from flat-band samples, monotone potentials from antiperiodic data).

pub mod asymptotics;
pub mod bands;
pub mod eigen;
pub mod fiber;
pub mod inverse;
pub mod lattice;

mod linalg;

#[cfg(test)]
mod exact_oracle;

pub use asymptotics::{AsymptoticReport, Quantity};
pub use bands::{Band, BandStructure, DispersionSet, TransferState};
pub use eigen::SpectrumResult;
pub use fiber::{ComplexFiberMatrix, FiberMatrix};
pub use inverse::{InverseResult, NodeSet, OddPotential};
pub use lattice::{MagneticPhase, RibbonGraph, RibbonSpec};

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid ribbon: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown edge class: {0}")]
    UnknownEdgeClass(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("nodes yield degenerate linearization")]
    DegenerateLinearization,
    #[error("outside injectivity domain (alpha <= 1 required): {0}")]
    OutsideInjectivityDomain(String),
    #[error("inconsistent spectral data: {0}")]
    InconsistentSpectralData(String),
    #[error("construction infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
