use super::{DivergenceReason, IterationConfig, IterationRecord, IterationTrace, SolveResult, StopRule, Termination};
use crate::factors::StabilizingFactor;
use crate::par;
use crate::problems::ProblemModel;
use crate::spectral::Field;
use crate::{Error, Result};

/// `||L u - N(u)||` with pinned modes removed.
pub fn residual(problem: &dyn ProblemModel, u: &Field) -> f64 {
    residual_from_parts(problem, &problem.apply_l(u), &problem.apply_n(u))
}

fn residual_from_parts(problem: &dyn ProblemModel, lu: &Field, nu: &Field) -> f64 {
    let mut r = lu.sub(nu);
    problem.project_pinned(&mut r);
    r.norm()
}

/// `L^-1 N(u)`.
pub fn classical_step(problem: &dyn ProblemModel, u: &Field) -> Field {
    let mut next = problem.solve_l(&problem.apply_n(u));
    problem.project_pinned(&mut next);
    next
}

/// `L^-1 (s(u) N(u))` together with `s(u)`.
pub fn stabilized_step(
    problem: &dyn ProblemModel,
    factor: &StabilizingFactor,
    u: &Field,
) -> Result<(Field, f64)> {
    let nu = problem.apply_n(u);
    let s = factor.evaluate_parts(u, &problem.apply_l(u), &nu)?;
    let mut next = problem.solve_l(&nu.scaled(s));
    problem.project_pinned(&mut next);
    Ok((next, s))
}

/// Runs the stabilized iteration with `factor`, or the classical one when
/// `factor` is `None`. Divergence is reported through the trace, never as an
/// error.
pub fn solve(
    problem: &dyn ProblemModel,
    factor: Option<&StabilizingFactor>,
    u0: &Field,
    config: &IterationConfig,
) -> Result<SolveResult> {
    config.validate()?;
    problem.check_field(u0)?;
    let mut u = u0.clone();
    problem.project_pinned(&mut u);
    let norm0 = u.norm();
    if !(norm0 > 0.0) || !u.is_finite() {
        return Err(Error::InvalidSeed);
    }

    let guard = config.divergence_guard;
    let first = u.clone();
    let mut history = config.keep_history.then(|| vec![u.clone()]);
    let mut records = Vec::new();
    let mut residual0 = None;

    let termination = 'outer: loop {
        let n = records.len();
        let lu = problem.apply_l(&u);
        let nu = problem.apply_n(&u);
        let res = residual_from_parts(problem, &lu, &nu);
        let norm = u.norm();
        let s = factor.map(|f| f.evaluate_parts(&u, &lu, &nu));
        let discrepancy = match &s {
            Some(Ok(s)) => Some((s - 1.0).abs()),
            _ => None,
        };
        records.push(IterationRecord {
            iteration: n,
            residual: res,
            factor_discrepancy: discrepancy,
            norm,
        });
        let r0 = *residual0.get_or_insert(res);

        if !res.is_finite() || !norm.is_finite() {
            break Termination::Diverged(DivergenceReason::NonFinite);
        }
        if norm > guard * norm0 {
            break Termination::Diverged(DivergenceReason::NormBlowup);
        }
        if norm < norm0 / guard {
            break Termination::Diverged(DivergenceReason::Collapse);
        }
        if r0 > 0.0 && res > guard * r0 {
            break Termination::Diverged(DivergenceReason::ResidualBlowup);
        }
        let s = match s {
            Some(Err(e)) => break Termination::Diverged(DivergenceReason::FactorBreakdown(e.to_string())),
            Some(Ok(s)) => {
                if !s.is_finite() {
                    break Termination::Diverged(DivergenceReason::NonFinite);
                }
                s
            }
            None => 1.0,
        };

        let factor_ok = match (config.stop_rule, discrepancy) {
            (StopRule::ResidualAndFactor, Some(d)) => d <= config.factor_tolerance,
            _ => true,
        };
        if res <= config.residual_tolerance && factor_ok {
            break Termination::Converged;
        }
        if n >= config.max_iterations {
            break Termination::MaxIterations;
        }

        let mut next = problem.solve_l(&if s == 1.0 { nu } else { nu.scaled(s) });
        problem.project_pinned(&mut next);
        if !next.is_finite() {
            // Record the blow-up on the next line before stopping.
            records.push(IterationRecord {
                iteration: n + 1,
                residual: f64::INFINITY,
                factor_discrepancy: None,
                norm: next.norm(),
            });
            break 'outer Termination::Diverged(DivergenceReason::NonFinite);
        }
        u = next;
        if let Some(h) = history.as_mut() {
            h.push(u.clone());
        }
    };

    Ok(SolveResult {
        solution: u.clone(),
        trace: IterationTrace {
            records,
            termination,
            first,
            last: u,
            history,
        },
        observed_order: None,
    })
}

/// Independent solves from several seeds, run in parallel.
pub fn solve_batch(
    problem: &dyn ProblemModel,
    factor: Option<&StabilizingFactor>,
    seeds: &[Field],
    config: &IterationConfig,
) -> Vec<Result<SolveResult>> {
    par::map_slice(seeds, |seed| solve(problem, factor, seed, config))
}
