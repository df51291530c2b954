use super::engine::residual;
use super::{DivergenceReason, IterationConfig, IterationRecord, IterationTrace, SolveResult, Termination};
use crate::linalg::{assemble, gmres, pseudo_solve, DenseLu, LinearOperator};
use crate::problems::ProblemModel;
use crate::spectral::Field;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Largest realified dimension solved with a dense factorization.
    pub dense_limit: usize,
    pub max_backtracks: usize,
    pub gmres_restart: usize,
    pub gmres_max_restarts: usize,
    pub gmres_tolerance: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            dense_limit: 2048,
            max_backtracks: 12,
            gmres_restart: 60,
            gmres_max_restarts: 20,
            gmres_tolerance: 1e-11,
        }
    }
}

/// Realified Jacobian `v -> L v - N'(u) v` of `G(u) = L u - N(u)`, with the
/// identity acting on pinned modes so that the operator is invertible on the
/// whole space.
struct Jacobian<'a> {
    problem: &'a dyn ProblemModel,
    u: &'a Field,
}

impl Jacobian<'_> {
    fn field(&self, x: &[f64]) -> Field {
        Field::from_realified(self.problem.domain(), self.problem.scalar_kind(), x)
            .expect("realified vector of the problem dimension")
    }
}

impl LinearOperator for Jacobian<'_> {
    fn dim(&self) -> usize {
        self.u.real_dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = self.field(x);
        let mut free = v.clone();
        self.problem.project_pinned(&mut free);
        let pinned_part = v.sub(&free);
        let jn = self
            .problem
            .jac_n_action(self.u, &free)
            .expect("Jacobian availability checked before assembly");
        let mut out = self.problem.apply_l(&free).sub(&jn);
        self.problem.project_pinned(&mut out);
        out.axpy(1.0, &pinned_part);
        out.realified()
    }
}

/// Newton's method on `G(u) = L u - N(u)` with backtracking.
pub fn newton_solve(
    problem: &dyn ProblemModel,
    u0: &Field,
    config: &IterationConfig,
) -> Result<SolveResult> {
    newton_solve_with(problem, u0, config, &NewtonOptions::default())
}

pub fn newton_solve_with(
    problem: &dyn ProblemModel,
    u0: &Field,
    config: &IterationConfig,
    opts: &NewtonOptions,
) -> Result<SolveResult> {
    config.validate()?;
    problem.check_field(u0)?;
    let mut u = u0.clone();
    problem.project_pinned(&mut u);
    if !(u.norm() > 0.0) || !u.is_finite() {
        return Err(Error::InvalidSeed);
    }
    // Fails early when the model has no Jacobian.
    problem.jac_n_action(&u, &u)?;

    let first = u.clone();
    let mut history = config.keep_history.then(|| vec![u.clone()]);
    let mut records = Vec::new();
    let mut res = residual(problem, &u);

    let termination = loop {
        let n = records.len();
        records.push(IterationRecord {
            iteration: n,
            residual: res,
            factor_discrepancy: None,
            norm: u.norm(),
        });
        if !res.is_finite() {
            break Termination::Diverged(DivergenceReason::NonFinite);
        }
        if res <= config.residual_tolerance {
            break Termination::Converged;
        }
        if n >= config.max_iterations {
            break Termination::MaxIterations;
        }

        let mut g = problem.apply_l(&u).sub(&problem.apply_n(&u));
        problem.project_pinned(&mut g);
        let rhs: Vec<f64> = g.realified().iter().map(|x| -x).collect();
        let step = newton_direction(problem, &u, &rhs, opts)?;
        let step = Field::from_realified(problem.domain(), problem.scalar_kind(), &step)?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let mut trial = u.clone();
            trial.axpy(t, &step);
            problem.project_pinned(&mut trial);
            let r = residual(problem, &trial);
            if r.is_finite() && r < res {
                accepted = Some((trial, r));
                break;
            }
            t *= 0.5;
        }
        let Some((next, r)) = accepted else {
            break Termination::Diverged(DivergenceReason::Stagnation);
        };
        u = next;
        res = r;
        if let Some(h) = history.as_mut() {
            h.push(u.clone());
        }
    };

    let residuals: Vec<f64> = records.iter().map(|r| r.residual).collect();
    // Residuals within a few hundred ulps of |L u| + |N(u)| are rounding
    // noise and say nothing about the rate.
    let floor = 1e3 * f64::EPSILON * (problem.apply_l(&u).norm() + problem.apply_n(&u).norm());
    Ok(SolveResult {
        solution: u.clone(),
        trace: IterationTrace {
            records,
            termination,
            first,
            last: u,
            history,
        },
        observed_order: estimate_order(&residuals, floor),
    })
}

fn newton_direction(
    problem: &dyn ProblemModel,
    u: &Field,
    rhs: &[f64],
    opts: &NewtonOptions,
) -> Result<Vec<f64>> {
    let jac = Jacobian { problem, u };
    let step = if jac.dim() <= opts.dense_limit {
        let matrix = assemble(&jac);
        match DenseLu::new(&matrix) {
            Ok(lu) if lu.pivot_ratio() > 1e-8 => lu.solve(rhs),
            // Near-singular (e.g. a symmetry kernel): minimum-norm step.
            _ => pseudo_solve(&matrix, rhs, 1e-9).0,
        }
    } else {
        let precond = |x: &[f64]| -> Vec<f64> {
            let f = jac.field(x);
            let mut free = f.clone();
            problem.project_pinned(&mut free);
            let mut out = problem.solve_l(&free);
            out.axpy(1.0, &f.sub(&free));
            out.realified()
        };
        let (x, rel) = gmres(
            &jac,
            &precond,
            rhs,
            opts.gmres_restart,
            opts.gmres_max_restarts,
            opts.gmres_tolerance,
        );
        if !(rel < 1.0) {
            return Err(Error::SingularJacobian(format!(
                "GMRES stalled at relative residual {rel:e}"
            )));
        }
        x
    };
    if step.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularJacobian("non-finite Newton step".into()));
    }
    Ok(step)
}

/// Order `k` in `r_{n+1} ~ C r_n^k` from the last three residuals above
/// `floor`.
fn estimate_order(residuals: &[f64], floor: f64) -> Option<f64> {
    let useful: Vec<f64> = residuals.iter().copied().filter(|r| *r > floor && r.is_finite()).collect();
    if useful.len() < 3 {
        return None;
    }
    let w = &useful[useful.len() - 3..];
    let k = (w[2] / w[1]).ln() / (w[1] / w[0]).ln();
    k.is_finite().then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::DenseQuadratic;

    #[test]
    fn converges_quadratically_on_synthetic_problem() {
        let p = DenseQuadratic::new(vec![1.0, 0.7, 1.3, 0.9], &[1.5, -0.4, 0.3]).unwrap();
        let mut seed = p.solution().scaled(1.1);
        seed.as_real_mut().unwrap()[1] -= 0.05;
        let cfg = IterationConfig::default().with_max_iterations(30);
        let r = newton_solve(&p, &seed, &cfg).unwrap();
        assert!(r.converged());
        assert!(r.solution.sub(&p.solution()).norm() < 1e-10);
        assert!(r.iterations() <= 8);
    }

    #[test]
    fn order_estimate() {
        assert!((estimate_order(&[1e-1, 1e-2, 1e-4], 1e-14).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(estimate_order(&[1e-1, 1e-15], 1e-14), None);
    }
}
