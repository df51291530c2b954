//! Fixed-point engines for `L u = N(u)`.
//!
//! [`solve`] runs either the classical iteration `L u_{n+1} = N(u_n)` or
//! the stabilized one `L u_{n+1} = s(u_n) N(u_n)`. [`newton_solve`] is a
//! fallback for states outside the basin of the fixed-point methods.

mod engine;
mod newton;

use serde::{Deserialize, Serialize};

pub use engine::{classical_step, residual, solve, solve_batch, stabilized_step};
pub use newton::{newton_solve, newton_solve_with, NewtonOptions};

use crate::spectral::Field;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop once `RE_n <= residual_tolerance`.
    #[default]
    Residual,
    /// Additionally require `|s(u_n) - 1| <= factor_tolerance`.
    ResidualAndFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationConfig {
    pub max_iterations: usize,
    pub residual_tolerance: f64,
    pub factor_tolerance: f64,
    /// Divergence is declared when `||u_n||` or `RE_n` exceeds this many
    /// times its initial value, or `||u_n||` falls below the initial norm
    /// divided by it.
    pub divergence_guard: f64,
    pub stop_rule: StopRule,
    /// Keep every iterate, not only the first and the last.
    pub keep_history: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            residual_tolerance: 1e-12,
            factor_tolerance: 1e-13,
            divergence_guard: 1e8,
            stop_rule: StopRule::Residual,
            keep_history: false,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tolerance > 0.0) || !(self.factor_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.divergence_guard > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "divergence guard must exceed 1, got {}",
                self.divergence_guard
            )));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.residual_tolerance = tol;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }
}

/// One line of the trace: the state *before* update `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    /// `|s(u_n) - 1|`; absent for the classical and Newton engines.
    pub factor_discrepancy: Option<f64>,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceReason {
    NonFinite,
    NormBlowup,
    ResidualBlowup,
    /// The iterates decay towards the trivial solution.
    Collapse,
    FactorBreakdown(String),
    /// No step along the search direction reduced the residual.
    Stagnation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    Diverged(DivergenceReason),
    MaxIterations,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::Diverged(_) => "diverged",
            Termination::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub first: Field,
    pub last: Field,
    /// Every iterate, when requested through [`IterationConfig::keep_history`].
    pub history: Option<Vec<Field>>,
}

impl IterationTrace {
    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual).collect()
    }

    pub fn last_record(&self) -> &IterationRecord {
        self.records.last().expect("traces hold at least one record")
    }

    /// Whether the last `n` residuals strictly decrease.
    pub fn tail_is_monotone(&self, n: usize) -> bool {
        let r = self.residuals();
        let start = r.len().saturating_sub(n);
        r[start..].windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub solution: Field,
    pub trace: IterationTrace,
    /// Estimated convergence order of the residual tail (Newton only).
    pub observed_order: Option<f64>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.trace.termination == Termination::Converged
    }

    /// Number of updates performed.
    pub fn iterations(&self) -> usize {
        self.trace.last_record().iteration
    }

    pub fn final_residual(&self) -> f64 {
        self.trace.last_record().residual
    }

    pub fn final_factor_discrepancy(&self) -> Option<f64> {
        self.trace.last_record().factor_discrepancy
    }

    /// First iteration whose residual is at or below `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.trace
            .records
            .iter()
            .find(|r| r.residual <= tol)
            .map(|r| r.iteration)
    }
}
