//! Problems and seeds built from a [`RunConfig`](crate::config::RunConfig).

use std::path::Path;

use petviashvili::problems::{
    exact_soliton_profile, gaussian_seed, perturbed_seed, BenjaminLump, NlsGroundState, NlsSoliton, SolitonParameters,
};
use petviashvili::{Complex64, Domain, Field, Grid1D, Grid2D, ProblemModel, ScalarKind};

use crate::config::{
    GridSpec, ProblemSpec, SeedSpec, DEFAULT_LINE_HALF_LENGTH, DEFAULT_LINE_POINTS, DEFAULT_PLANE_HALF_LENGTH,
    DEFAULT_PLANE_POINTS,
};
use crate::error::CliError;

/// `L = I`, `N(u) = u`. Linear (degree 1), so every factor is undefined,
/// but the iteration matrix is exactly the identity.
pub struct IdentityProblem {
    grid: Grid1D,
}

impl IdentityProblem {
    pub fn new(dimension: usize) -> Result<Self, CliError> {
        let grid = Grid1D::new(dimension as f64 / 2.0, dimension).map_err(|e| CliError::config("problem.dimension", e))?;
        Ok(Self { grid })
    }
}

impl ProblemModel for IdentityProblem {
    fn name(&self) -> &str {
        "identity"
    }

    fn degree(&self) -> f64 {
        1.0
    }

    fn domain(&self) -> Domain {
        Domain::Line(self.grid)
    }

    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Real
    }

    fn apply_l(&self, u: &Field) -> Field {
        u.clone()
    }

    fn solve_l(&self, b: &Field) -> Field {
        b.clone()
    }

    fn apply_n(&self, u: &Field) -> Field {
        u.clone()
    }

    fn jac_n_action(&self, _u: &Field, v: &Field) -> petviashvili::Result<Field> {
        Ok(v.clone())
    }
}

fn line(grid: &GridSpec) -> Result<Grid1D, CliError> {
    Grid1D::new(
        grid.l.unwrap_or(DEFAULT_LINE_HALF_LENGTH),
        grid.m.unwrap_or(DEFAULT_LINE_POINTS),
    )
    .map_err(|e| CliError::config("problem.grid", e))
}

fn plane(grid: &GridSpec) -> Result<Grid2D, CliError> {
    let l = grid.l.unwrap_or(DEFAULT_PLANE_HALF_LENGTH);
    let m = grid.m.unwrap_or(DEFAULT_PLANE_POINTS);
    let x = Grid1D::new(l, m).map_err(|e| CliError::config("problem.grid", e))?;
    let z = Grid1D::new(grid.lz.unwrap_or(l), grid.mz.unwrap_or(m)).map_err(|e| CliError::config("problem.grid", e))?;
    Ok(Grid2D::new(x, z))
}

pub fn soliton_parameters(spec: &ProblemSpec) -> Option<SolitonParameters> {
    match spec {
        ProblemSpec::NlsSoliton {
            sigma, lambda1, lambda2, ..
        } => Some(SolitonParameters::new(*sigma, *lambda1, *lambda2)),
        _ => None,
    }
}

pub fn build_problem(spec: &ProblemSpec) -> Result<Box<dyn ProblemModel>, CliError> {
    let bad = |e: petviashvili::Error| CliError::config("problem", e);
    Ok(match spec {
        ProblemSpec::NlsGroundState {
            mu,
            potential,
            cubic_sign,
            grid,
        } => Box::new(NlsGroundState::new(potential, *mu, line(grid)?, *cubic_sign).map_err(bad)?),
        ProblemSpec::NlsSoliton { grid, .. } => {
            let params = soliton_parameters(spec).expect("soliton spec");
            Box::new(NlsSoliton::new(params, line(grid)?).map_err(bad)?)
        }
        ProblemSpec::BenjaminLump { gamma, speed, grid } => {
            Box::new(BenjaminLump::new(*gamma, *speed, plane(grid)?).map_err(bad)?)
        }
        ProblemSpec::Identity { dimension } => Box::new(IdentityProblem::new(*dimension)?),
    })
}

pub fn build_seed(seed: &SeedSpec, spec: &ProblemSpec, problem: &dyn ProblemModel) -> Result<Field, CliError> {
    match seed {
        SeedSpec::Gaussian {
            amplitude,
            width,
            antisymmetric,
        } => gaussian_seed(problem.domain(), *amplitude, *width, *antisymmetric, problem.scalar_kind())
            .map_err(|e| CliError::config("seed", e)),
        SeedSpec::ExactPerturbed { eps1, eps2 } => {
            let params = soliton_parameters(spec)
                .ok_or_else(|| CliError::config("seed.kind", "exact_perturbed needs an nls_soliton problem"))?;
            let grid = *problem.domain().as_line().expect("soliton grid");
            let exact = exact_soliton_profile(&params, &grid).map_err(|e| CliError::config("problem", e))?;
            Ok(perturbed_seed(&exact, *eps1, *eps2))
        }
        SeedSpec::File { path } => load_profile(path, problem),
    }
}

/// Reads a `profile.csv` (`x[,z],re,im`) onto the problem's grid.
pub fn load_profile(path: &Path, problem: &dyn ProblemModel) -> Result<Field, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("seed.path", format!("cannot read state file {}: {e}", path.display())))?;
    let bad = |msg: String| CliError::config("seed.path", format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').collect();
    let re_col = header.iter().position(|h| *h == "re").ok_or_else(|| bad("no 're' column".into()))?;
    let im_col = header.iter().position(|h| *h == "im").ok_or_else(|| bad("no 'im' column".into()))?;
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |i: usize| -> Result<f64, CliError> {
            cols.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(format!("line {}: bad number", n + 2)))
        };
        values.push(Complex64::new(parse(re_col)?, parse(im_col)?));
    }
    let domain = problem.domain();
    if values.len() != domain.len() {
        return Err(bad(format!("{} values for a grid of {}", values.len(), domain.len())));
    }
    let field = match problem.scalar_kind() {
        ScalarKind::Real => Field::real(domain, values.iter().map(|z| z.re).collect()),
        ScalarKind::Complex => Field::complex(domain, values),
    };
    field.map_err(|e| bad(e.to_string()))
}
