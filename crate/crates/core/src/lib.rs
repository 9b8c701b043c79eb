//! Scale-invariant vertex couplings on star quantum graphs.
//!
//! * [`coupling`]: ST-form and (A, B) couplings and their scattering matrices.
//! * [`freelike`]: couplings with free-vertex scattering moduli.
//! * [`approx`]: approximating graphs made of delta couplings, short edges
//!   and constant vector potentials.
//! * [`solver`]: scattering on approximating graphs and convergence studies.
//! * [`io`]: JSON and CSV formats shared by the CLI and other front ends.

pub mod approx;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod freelike;
pub mod io;
pub mod linalg;
pub mod solver;

pub use approx::{build_approximation, ApproxGraph, Connector};
pub use coupling::{
    ft_scattering, is_k_independent, ks_scattering, parameter_count, st_to_ab, validate_st,
    CouplingAb, CouplingSt, ScatteringMatrix, DEFAULT_TOL,
};
pub use error::{Error, Result};
pub use freelike::{
    build_freelike, classify_freelike, enumerate_time_reversal, is_freelike, realize_smatrix,
    FreeLikeCase, FreeLikeCoupling, FreeLikeForm, Permutation, FREELIKE_TOL,
};
pub use linalg::{CMatrix, C64};
pub use solver::{
    connector_transfer, convergence_study, solve_scattering, ConvergenceReport, ConvergenceRow,
    TransferMode,
};
