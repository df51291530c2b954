//! Convergence diagnostics: spectra of the iteration matrix `S` and of the
//! iteration-operator Jacobian `F'`, hypothesis reports, symmetry
//! generators, error decomposition and orbit identification.

mod orbit;
mod spectrum;
mod symmetry;

pub use orbit::{default_window, fit_phase_line, orbit_match, OrbitFit, MIN_WINDOW, WINDOW_FRACTION};
pub use spectrum::{
    full_spectrum, hypothesis_report, iteration_matrix_action, jacobian_f_action,
    spectrum_shift_check, top_eigenvalues, HypothesisReport, IterationJacobian, IterationMatrix,
    ShiftReport, SpectrumReport, DENSE_LIMIT, UNIT_TOLERANCE,
};
pub use symmetry::{decompose_error, symmetry_generators, ErrorDecomposition, GRAM_CONDITION_LIMIT};
