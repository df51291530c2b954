use serde::{Deserialize, Serialize};

use super::ProblemModel;
use crate::linalg::{matvec, DenseLu, DenseMatrix};
use crate::spectral::{diff_matrix, Domain, Field, Grid1D, ScalarKind};
use crate::{Error, Result};

/// Sign of the cubic term `N(U) = sign * U^3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CubicSign {
    /// `N(U) = +U^3`, the literal reading of `U'' + V U - mu U - U^3 = 0`
    /// (defocusing). Localized states need an attractive potential whose
    /// linear eigenvalues exceed `mu`.
    #[default]
    Plus,
    /// `N(U) = -U^3`: the focusing equation `U'' + V U - mu U + U^3 = 0`.
    /// Required for the `sech^2` ground state at `mu = 1.3`, where `L` is
    /// negative definite and the `+U^3` system has only the zero solution.
    Minus,
}

impl CubicSign {
    fn factor(self) -> f64 {
        match self {
            CubicSign::Minus => -1.0,
            CubicSign::Plus => 1.0,
        }
    }
}

/// Real potentials sampled at the grid nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    /// `amplitude * sum_c sech^2(x - c)`.
    SechSquared { amplitude: f64, centers: Vec<f64> },
    Sampled { values: Vec<f64> },
}

impl Potential {
    pub fn sech_squared() -> Self {
        Potential::SechSquared {
            amplitude: 1.0,
            centers: vec![0.0],
        }
    }

    pub fn double_well(amplitude: f64, separation: f64) -> Self {
        Potential::SechSquared {
            amplitude,
            centers: vec![-separation, separation],
        }
    }

    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        let x = grid.nodes();
        match self {
            Potential::Zero => Ok(vec![0.0; x.len()]),
            Potential::SechSquared { amplitude, centers } => Ok(x
                .iter()
                .map(|&x| {
                    centers
                        .iter()
                        .map(|c| amplitude / (x - c).cosh().powi(2))
                        .sum()
                })
                .collect()),
            Potential::Sampled { values } => {
                if values.len() != x.len() {
                    return Err(Error::FieldMismatch(format!(
                        "potential has {} samples for {} nodes",
                        values.len(),
                        x.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

/// `L U = N(U)` with `L = D^2 + diag(V) - mu I` (dense Fourier
/// differentiation matrix) and `N(U) = +-U^3`.
pub struct NlsGroundState {
    grid: Grid1D,
    potential: Vec<f64>,
    mu: f64,
    sign: CubicSign,
    matrix: DenseMatrix,
    lu: DenseLu,
}

impl NlsGroundState {
    pub fn new(potential: &Potential, mu: f64, grid: Grid1D, sign: CubicSign) -> Result<Self> {
        let v = potential.sample(&grid)?;
        let mut matrix = diff_matrix(&grid, 2)?;
        for (j, vj) in v.iter().enumerate() {
            matrix[(j, j)] += vj - mu;
        }
        let lu = DenseLu::new(&matrix)
            .map_err(|e| Error::SingularOperator(format!("mu = {mu}: {e}")))?;
        Ok(Self {
            grid,
            potential: v,
            mu,
            sign,
            matrix,
            lu,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sign(&self) -> CubicSign {
        self.sign
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    fn real(u: &Field) -> &[f64] {
        u.as_real().expect("ground-state fields are real")
    }

    fn wrap(&self, v: Vec<f64>) -> Field {
        Field::real(self.grid, v).expect("grid-sized vector")
    }
}

impl ProblemModel for NlsGroundState {
    fn name(&self) -> &str {
        "nls_ground_state"
    }

    fn degree(&self) -> f64 {
        3.0
    }

    fn domain(&self) -> Domain {
        Domain::Line(self.grid)
    }

    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Real
    }

    fn apply_l(&self, u: &Field) -> Field {
        self.wrap(matvec(&self.matrix, Self::real(u)))
    }

    fn solve_l(&self, b: &Field) -> Field {
        self.wrap(self.lu.solve(Self::real(b)))
    }

    fn apply_n(&self, u: &Field) -> Field {
        let s = self.sign.factor();
        u.map_real(|x| s * x * x * x)
    }

    fn jac_n_action(&self, u: &Field, v: &Field) -> Result<Field> {
        let s = self.sign.factor();
        let out = Self::real(u)
            .iter()
            .zip(Self::real(v))
            .map(|(u, v)| 3.0 * s * u * u * v)
            .collect();
        Ok(self.wrap(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_trivial_solution() {
        let g = Grid1D::new(10.0, 32).unwrap();
        let p = NlsGroundState::new(&Potential::Zero, 1.0, g, CubicSign::Minus).unwrap();
        let z = p.zero_field();
        assert_eq!(p.apply_l(&z).norm(), 0.0);
        assert_eq!(p.apply_n(&z).norm(), 0.0);
    }

    #[test]
    fn singular_operator_detected() {
        // With V = 0 the constant mode has L-eigenvalue -mu, so mu = 0 is singular.
        let g = Grid1D::new(10.0, 32).unwrap();
        let err = NlsGroundState::new(&Potential::Zero, 0.0, g, CubicSign::Minus);
        assert!(matches!(err, Err(Error::SingularOperator(_))));
    }

    #[test]
    fn solve_inverts_apply() {
        let g = Grid1D::new(20.0, 64).unwrap();
        let p = NlsGroundState::new(&Potential::sech_squared(), 1.3, g, CubicSign::Minus).unwrap();
        let b = Field::real(g, g.nodes().iter().map(|x| (-x * x / 9.0).exp()).collect()).unwrap();
        let x = p.solve_l(&b);
        assert!(p.apply_l(&x).sub(&b).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn sign_conventions() {
        let g = Grid1D::new(1.0, 4).unwrap();
        let u = Field::real(g, vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        let minus = NlsGroundState::new(&Potential::Zero, 1.0, g, CubicSign::Minus).unwrap();
        let plus = NlsGroundState::new(&Potential::Zero, 1.0, g, CubicSign::Plus).unwrap();
        assert_eq!(minus.apply_n(&u).as_real().unwrap(), &[-1.0, -8.0, 1.0, -0.125]);
        assert_eq!(plus.apply_n(&u).as_real().unwrap(), &[1.0, 8.0, -1.0, 0.125]);
    }
}
