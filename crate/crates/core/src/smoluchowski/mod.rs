//! Mean-field theory of path percolation: reference tree laws, the
//! fragmentation kernel, the steady-state rate-equation solver, moment
//! formulas for the critical rate, and the removed-path-length predictor.

pub mod harmonic;
pub mod kernel;
pub mod moments;
pub mod predictor;
pub mod reference;
pub mod solver;

pub use harmonic::{generalized_harmonic, zeta, HarmonicCache, ZETA_1_2, ZETA_3_2};
pub use kernel::{fragmentation_kernel, Kernel, KernelMode};
pub use moments::{
    asymptotic_alpha_star, balance_alpha_star, critical_alpha_closed_form, prefactor_ratio, select_tau,
    AlphaScaling, MomentReport, TauSelection,
};
pub use predictor::{
    discretized_rayleigh, predict_removed_length_distribution, predict_removed_lengths, LengthPrediction,
    PathLengthLaw,
};
pub use reference::{mean_fragment_count, rayleigh_cdf, rayleigh_mean, rayleigh_pdf};
pub use solver::{solve_steady_state, Equation, SolverConfig, SolverState};
