use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ProblemModel, Symmetry};
use crate::spectral::{self, Domain, Field, Grid1D, ScalarKind};
use crate::{Error, Result};

/// Parameters of `U'' + |U|^(2 sigma) U - lambda1 U - i lambda2 U' = 0` and
/// of the orbit element `(x0, theta0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonParameters {
    pub sigma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub theta0: f64,
}

impl SolitonParameters {
    pub fn new(sigma: f64, lambda1: f64, lambda2: f64) -> Self {
        Self {
            sigma,
            lambda1,
            lambda2,
            x0: 0.0,
            theta0: 0.0,
        }
    }

    pub fn with_orbit(mut self, x0: f64, theta0: f64) -> Self {
        self.x0 = x0;
        self.theta0 = theta0;
        self
    }

    /// `a = lambda1 - lambda2^2 / 4`.
    pub fn a(&self) -> f64 {
        self.lambda1 - 0.25 * self.lambda2 * self.lambda2
    }

    pub fn degree(&self) -> f64 {
        2.0 * self.sigma + 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.a() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "a = lambda1 - lambda2^2/4 must be positive, got {}",
                self.a()
            )));
        }
        Ok(())
    }

    /// Modulus `rho(x)` of the centered profile.
    pub fn modulus(&self, x: f64) -> f64 {
        let (s, a) = (self.sigma, self.a());
        (a * (s + 1.0)).powf(0.5 / s) * (1.0 / (s * a.sqrt() * x).cosh()).powf(1.0 / s)
    }
}

/// Samples `rho(x - x0) exp(i (lambda2/2 (x - x0) + theta0))`.
pub fn exact_soliton_profile(params: &SolitonParameters, grid: &Grid1D) -> Result<Field> {
    params.validate()?;
    let values = grid
        .nodes()
        .into_iter()
        .map(|x| {
            let y = x - params.x0;
            Complex64::from_polar(params.modulus(y), 0.5 * params.lambda2 * y + params.theta0)
        })
        .collect();
    Field::complex(*grid, values)
}

/// Spectral discretization of the generalized NLS soliton equation with
/// `L` of symbol `-k^2 - lambda1 + lambda2 k` and `N(U) = -|U|^(2 sigma) U`.
pub struct NlsSoliton {
    grid: Grid1D,
    params: SolitonParameters,
    symbol: Vec<f64>,
}

impl NlsSoliton {
    const SYMMETRIES: [Symmetry; 2] = [Symmetry::Gauge, Symmetry::TranslationX];

    pub fn new(params: SolitonParameters, grid: Grid1D) -> Result<Self> {
        params.validate()?;
        let k = grid.wavenumbers();
        // The first-order term uses the Nyquist-zeroed wavenumbers, like every
        // odd-order derivative.
        let symbol = k
            .iter()
            .zip(grid.odd_wavenumbers())
            .map(|(k, ko)| -k * k - params.lambda1 + params.lambda2 * ko)
            .collect();
        Ok(Self {
            grid,
            params,
            symbol,
        })
    }

    pub fn params(&self) -> &SolitonParameters {
        &self.params
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    pub fn exact_solution(&self) -> Field {
        exact_soliton_profile(&self.params, &self.grid).expect("validated parameters")
    }
}

fn complex(u: &Field) -> &[Complex64] {
    u.as_complex().expect("soliton fields are complex")
}

impl ProblemModel for NlsSoliton {
    fn name(&self) -> &str {
        "nls_soliton"
    }

    fn degree(&self) -> f64 {
        self.params.degree()
    }

    fn domain(&self) -> Domain {
        Domain::Line(self.grid)
    }

    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Complex
    }

    fn apply_l(&self, u: &Field) -> Field {
        spectral::apply_real_multiplier(u, &self.symbol)
    }

    fn solve_l(&self, b: &Field) -> Field {
        spectral::divide_by_symbol(b, &self.symbol, &[])
    }

    fn apply_n(&self, u: &Field) -> Field {
        let s = self.params.sigma;
        let out = complex(u)
            .iter()
            .map(|z| -z * z.norm_sqr().powf(s))
            .collect();
        Field::complex(self.grid, out).expect("grid-sized vector")
    }

    /// Real-linear map `v -> -(sigma+1)|U|^(2 sigma) v - sigma |U|^(2 sigma - 2) U^2 conj(v)`.
    /// It is self-adjoint under the real pairing.
    fn jac_n_action(&self, u: &Field, v: &Field) -> Result<Field> {
        let s = self.params.sigma;
        let out = complex(u)
            .iter()
            .zip(complex(v))
            .map(|(u, v)| {
                let r = u.norm();
                if r == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let r2s = r.powf(2.0 * s);
                let phase = u / r;
                -(s + 1.0) * r2s * v - s * r2s * phase * phase * v.conj()
            })
            .collect();
        Ok(Field::complex(self.grid, out).expect("grid-sized vector"))
    }

    fn symmetries(&self) -> &[Symmetry] {
        &Self::SYMMETRIES
    }
}
