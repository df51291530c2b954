use super::ProblemModel;
use crate::linalg::{matvec, DenseLu, DenseMatrix};
use crate::spectral::{Domain, Field, Grid1D, ScalarKind};
use crate::{Error, Result};

/// Small dense system `L u = u o u` built around a prescribed solution `u*`
/// and a prescribed iteration-matrix spectrum.
///
/// With `P` the identity whose first column is replaced by `u*` and
/// `M = P diag(2, mu_1, ..., mu_{n-1}) P^-1`, setting `L = 2 diag(u*) M^-1`
/// makes `u*` a solution and `S = L^-1 N'(u*) = M` exactly. The eigenvector
/// of `mu_k` is `e_k`.
pub struct DenseQuadratic {
    grid: Grid1D,
    solution: Vec<f64>,
    matrix: DenseMatrix,
    lu: DenseLu,
}

impl DenseQuadratic {
    /// `solution` must be entrywise nonzero; `spectrum` lists the `n - 1`
    /// eigenvalues of `S` other than `p = 2` and must be nonzero.
    pub fn new(solution: Vec<f64>, spectrum: &[f64]) -> Result<Self> {
        let n = solution.len();
        if spectrum.len() + 1 != n {
            return Err(Error::InvalidParameter(format!(
                "need {} eigenvalues besides p, got {}",
                n.saturating_sub(1),
                spectrum.len()
            )));
        }
        if solution.iter().any(|&u| u == 0.0 || !u.is_finite()) {
            return Err(Error::InvalidParameter("solution must be entrywise nonzero".into()));
        }
        if spectrum.contains(&0.0) {
            return Err(Error::InvalidParameter("eigenvalues must be nonzero".into()));
        }
        let grid = Grid1D::new(1.0, n)?;
        // M^-1 = P diag(1/2, 1/mu_k) P^-1, with P^-1 = identity whose first
        // column is (1/u0, -u_i/u0).
        let u0 = solution[0];
        let inv_eig: Vec<f64> = std::iter::once(0.5)
            .chain(spectrum.iter().map(|m| 1.0 / m))
            .collect();
        let p = DenseMatrix::from_fn(n, n, |i, j| {
            if j == 0 {
                solution[i]
            } else if i == j {
                1.0
            } else {
                0.0
            }
        });
        let p_inv = DenseMatrix::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) => 1.0 / u0,
            (i, 0) => -solution[i] / u0,
            (i, j) if i == j => 1.0,
            _ => 0.0,
        });
        let d = DenseMatrix::from_fn(n, n, |i, j| if i == j { inv_eig[i] } else { 0.0 });
        let m_inv = &p * &d * &p_inv;
        let matrix = DenseMatrix::from_fn(n, n, |i, j| 2.0 * solution[i] * m_inv.read(i, j));
        let lu = DenseLu::new(&matrix)?;
        Ok(Self {
            grid,
            solution,
            matrix,
            lu,
        })
    }

    pub fn solution(&self) -> Field {
        self.wrap(self.solution.clone())
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    fn wrap(&self, v: Vec<f64>) -> Field {
        Field::real(self.grid, v).expect("sized vector")
    }
}

impl ProblemModel for DenseQuadratic {
    fn name(&self) -> &str {
        "dense_quadratic"
    }

    fn degree(&self) -> f64 {
        2.0
    }

    fn domain(&self) -> Domain {
        Domain::Line(self.grid)
    }

    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Real
    }

    fn apply_l(&self, u: &Field) -> Field {
        self.wrap(matvec(&self.matrix, u.as_real().expect("real field")))
    }

    fn apply_l_adjoint(&self, u: &Field) -> Field {
        self.wrap(matvec(&self.matrix.transpose().to_owned(), u.as_real().expect("real field")))
    }

    fn solve_l(&self, b: &Field) -> Field {
        self.wrap(self.lu.solve(b.as_real().expect("real field")))
    }

    fn apply_n(&self, u: &Field) -> Field {
        u.map_real(|x| x * x)
    }

    fn jac_n_action(&self, u: &Field, v: &Field) -> Result<Field> {
        let (u, v) = (u.as_real().expect("real"), v.as_real().expect("real"));
        Ok(self.wrap(u.iter().zip(v).map(|(u, v)| 2.0 * u * v).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prescribed_solution_and_spectrum() {
        let q = DenseQuadratic::new(vec![1.0, 0.5, -0.8, 1.2], &[0.6, -0.3, 0.1]).unwrap();
        let u = q.solution();
        assert!(q.apply_l(&u).sub(&q.apply_n(&u)).norm() < 1e-13);
        // S e_1 = 0.6 e_1.
        let e1 = Field::real(q.grid, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = q.solve_l(&q.jac_n_action(&u, &e1).unwrap());
        assert!(s.sub(&e1.scaled(0.6)).norm() < 1e-13);
    }
}
