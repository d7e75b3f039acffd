//! Error probability tensors for generalized Pauli errors in qudit Clifford
//! circuits, and an analytic error model for an encoded qudit repeater.

pub mod channels;
pub mod clifford;
pub mod entanglement;
pub mod ept;
pub mod error;
pub mod figures;
pub mod linalg;
pub mod modarith;
pub mod oracle;
pub mod pauli;
pub mod qpcode;
pub mod repeater;
pub mod scalar;
mod table;

pub use channels::{axis_depolarizing, depolarizing, tensor_product, Axis, PauliChannelTable};
pub use clifford::{automorphism_of, compose, CliffordAutomorphism, Direction, GateSpec};
pub use entanglement::{fidelity, log_negativity, BellDiagonalState};
pub use ept::{CosetStatistics, CosetTable, ErrorProbabilityTensor, StabilizerBasis};
pub use error::{Error, Result};
pub use modarith::{Residue, ResidueVector};
pub use pauli::{commutation_phase, PauliLabel, PhasedPauli};
pub use qpcode::{CodeParams, QuantumPolynomialCode};
pub use scalar::Real;
pub use table::DEFAULT_DENSE_CAP;

pub type Tensor64 = ErrorProbabilityTensor<f64>;
pub type Tensor32 = ErrorProbabilityTensor<f32>;
pub type Channel64 = PauliChannelTable<f64>;
pub type Channel32 = PauliChannelTable<f32>;
pub type CosetStats64 = CosetStatistics<f64>;
