//! Parameter continuation with warm starts and step bisection.

use serde::{Deserialize, Serialize};

use crate::factors::FactorSpec;
use crate::iterate::{solve, IterationConfig, SolveResult};
use crate::problems::ProblemModel;
use crate::spectral::Field;
use crate::{Error, Result};

/// Ordered parameter values `p_0, p_1, ..., p_M` visited by
/// [`continue_solve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyPath {
    pub parameter: String,
    pub values: Vec<f64>,
    /// How many times a failed step may be halved.
    #[serde(default = "default_bisections")]
    pub max_bisections: usize,
}

fn default_bisections() -> usize {
    4
}

impl HomotopyPath {
    pub fn new(parameter: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let path = Self {
            parameter: parameter.into(),
            values,
            max_bisections: default_bisections(),
        };
        path.validate()?;
        Ok(path)
    }

    /// `start, start + step, ...` up to and including `end` (within
    /// rounding).
    pub fn uniform(parameter: impl Into<String>, start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step != 0.0 && step.is_finite()) || (end - start) * step < 0.0 {
            return Err(Error::InvalidPath(format!(
                "step {step} does not lead from {start} to {end}"
            )));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        let values = (0..=count).map(|i| start + i as f64 * step).collect();
        Self::new(parameter, values)
    }

    pub fn with_max_bisections(mut self, n: usize) -> Self {
        self.max_bisections = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidPath("no parameter values".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPath("non-finite parameter value".into()));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidPath("values must be strictly monotone".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub parameter: f64,
    pub result: SolveResult,
    /// Whether the stage was inserted by step bisection.
    pub refinement: bool,
}

#[derive(Clone, Debug)]
pub struct ContinuationResult {
    pub stages: Vec<Stage>,
    /// False when some path value could not be reached.
    pub completed: bool,
    pub failure: Option<String>,
}

impl ContinuationResult {
    /// Stages at the requested path values (bisection stages omitted).
    pub fn path_stages(&self) -> impl Iterator<Item = &Stage> {
        self.stages.iter().filter(|s| !s.refinement)
    }

    pub fn last_solution(&self) -> Option<&Field> {
        self.stages.last().map(|s| &s.result.solution)
    }
}

/// Solves along `path`, starting each stage from the previous converged
/// profile. A failed step is retried through its midpoint, up to
/// `path.max_bisections` levels; past that the run stops and the partial
/// result is returned with `completed = false`.
pub fn continue_solve<P, F>(
    family: F,
    path: &HomotopyPath,
    seed: &Field,
    factor: &FactorSpec,
    config: &IterationConfig,
) -> Result<ContinuationResult>
where
    P: ProblemModel,
    F: Fn(f64) -> Result<P>,
{
    path.validate()?;
    let mut driver = Driver {
        family: &family,
        factor,
        config,
        max_level: path.max_bisections,
        stages: Vec::new(),
    };
    let mut current = seed.clone();
    let mut previous: Option<f64> = None;
    for &target in &path.values {
        match driver.reach(previous, target, &current, 0, false)? {
            Some(solution) => {
                current = solution;
                previous = Some(target);
            }
            None => {
                return Ok(ContinuationResult {
                    stages: driver.stages,
                    completed: false,
                    failure: Some(format!(
                        "{} = {target} not reached after {} bisections",
                        path.parameter, path.max_bisections
                    )),
                });
            }
        }
    }
    Ok(ContinuationResult {
        stages: driver.stages,
        completed: true,
        failure: None,
    })
}

struct Driver<'a, F> {
    family: &'a F,
    factor: &'a FactorSpec,
    config: &'a IterationConfig,
    max_level: usize,
    stages: Vec<Stage>,
}

impl<P: ProblemModel, F: Fn(f64) -> Result<P>> Driver<'_, F> {
    fn attempt(&mut self, value: f64, start: &Field, refinement: bool) -> Result<Option<Field>> {
        let problem = (self.family)(value)?;
        let factor = self.factor.build(&problem)?;
        let result = solve(&problem, Some(&factor), start, self.config)?;
        let ok = result.converged();
        let solution = result.solution.clone();
        if ok {
            self.stages.push(Stage {
                parameter: value,
                result,
                refinement,
            });
            Ok(Some(solution))
        } else {
            Ok(None)
        }
    }

    fn reach(
        &mut self,
        from: Option<f64>,
        target: f64,
        start: &Field,
        level: usize,
        refinement: bool,
    ) -> Result<Option<Field>> {
        if let Some(sol) = self.attempt(target, start, refinement)? {
            return Ok(Some(sol));
        }
        let Some(from) = from else {
            return Ok(None);
        };
        if level >= self.max_level {
            return Ok(None);
        }
        let mid = 0.5 * (from + target);
        let Some(mid_sol) = self.reach(Some(from), mid, start, level + 1, true)? else {
            return Ok(None);
        };
        self.reach(Some(mid), target, &mid_sol, level + 1, refinement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_path() {
        let p = HomotopyPath::uniform("gamma", 0.0, 0.5, 0.1).unwrap();
        assert_eq!(p.values.len(), 6);
        assert!((p.values[5] - 0.5).abs() < 1e-12);
        assert_eq!(p.max_bisections, 4);
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(HomotopyPath::new("g", vec![0.0, 0.2, 0.1]).is_err());
        assert!(HomotopyPath::new("g", vec![]).is_err());
        assert!(HomotopyPath::uniform("g", 0.0, 1.0, -0.1).is_err());
        assert!(HomotopyPath::new("g", vec![0.5, 0.3, 0.0]).is_ok());
    }
}
