//! Adiabatic quantum computation on exact cover 3: instance generation,
//! problem and driver Hamiltonians, sparse low-lying spectra, gap scans
//! and runtime estimates for the transverse-field and XY-network drivers.

mod ec3;
mod lanczos;
mod pauli;
mod scan;

pub use ec3::{
    assignment_index, assignment_magnetization, build_h_in_x, build_h_in_xy, build_h_out, interpolate,
    random_ec3_instance, EC3Instance, WeightRule, BRUTE_FORCE_CAP, REJECTION_BUDGET,
};
pub use lanczos::{lowest_levels, lowest_levels_with, LanczosConfig, Levels, Sector};
pub use pauli::{CompiledOperator, Pauli, PauliWord, SpinHamiltonian, MAX_QUBITS};
pub use scan::{
    compare_schemes, gap_scan, ground_sector, median, runtime_estimate, CompareConfig, ComparisonRow, GapPoint,
    GapScan, ScanConfig, SchemeComparison, SchemeResult, SectorPolicy, DEGENERATE_START,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AqcError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{n} qubits exceed the cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("operators act on {0} and {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("variable {0} appears in no clause, so its driver weight is zero")]
    IsolatedVariable(usize),
    #[error("no instance with a unique solution after {attempts} draws")]
    RejectionBudget { attempts: usize },
    #[error("sector {0:?} is not conserved by the operator")]
    SectorNotConserved(Sector),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("gap closes at g = {g}")]
    ZeroGap { g: f64 },
    #[error("the two lowest levels never couple: exact crossing")]
    ExactCrossing,
    #[error("scan carries no matrix elements")]
    MissingMatrixElements,
}
