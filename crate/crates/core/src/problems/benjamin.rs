use super::{ProblemModel, Symmetry};
use crate::spectral::{self, Domain, Field, Grid2D, ScalarKind};
use crate::{Error, Result};

/// Fourier form of the two-dimensional Benjamin lump equation,
///
/// `(k_x^2 (c + 2 Gamma |k_x| + k_x^2) + k_z^2) eta_hat = k_x^2 (eta^2)_hat`,
///
/// with the `(0, 0)` mode pinned to zero (zero total mass). `Gamma = 0`
/// is the KP-I lump equation.
pub struct BenjaminLump {
    grid: Grid2D,
    gamma: f64,
    speed: f64,
    symbol: Vec<f64>,
    kx2: Vec<f64>,
}

impl BenjaminLump {
    const PINNED: [usize; 1] = [0];
    const SYMMETRIES: [Symmetry; 2] = [Symmetry::TranslationX, Symmetry::TranslationZ];

    pub fn new(gamma: f64, speed: f64, grid: Grid2D) -> Result<Self> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wave speed must be positive, got {speed}"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Gamma must be nonnegative, got {gamma}"
            )));
        }
        let (mx, mz) = (grid.x.points(), grid.z.points());
        let mut symbol = Vec::with_capacity(mx * mz);
        let mut kx2 = Vec::with_capacity(mx * mz);
        for ix in 0..mx {
            for iz in 0..mz {
                let (kx, kz) = grid.wavenumber_pair(ix, iz);
                symbol.push(lump_symbol(kx, kz, gamma, speed));
                kx2.push(kx * kx);
            }
        }
        Ok(Self {
            grid,
            gamma,
            speed,
            symbol,
            kx2,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn mass_operator(&self, u: &Field) -> Field {
        spectral::apply_real_multiplier(u, &self.kx2)
    }

    fn real(u: &Field) -> &[f64] {
        u.as_real().expect("lump fields are real")
    }

    fn product(&self, a: &Field, b: &Field, scale: f64) -> Field {
        let v = Self::real(a)
            .iter()
            .zip(Self::real(b))
            .map(|(a, b)| scale * a * b)
            .collect();
        Field::real(self.grid, v).expect("grid-sized vector")
    }
}

/// `k_x^2 (c + 2 Gamma |k_x| + k_x^2) + k_z^2`.
pub fn lump_symbol(kx: f64, kz: f64, gamma: f64, speed: f64) -> f64 {
    kx * kx * (speed + 2.0 * gamma * kx.abs() + kx * kx) + kz * kz
}

impl ProblemModel for BenjaminLump {
    fn name(&self) -> &str {
        "benjamin_lump"
    }

    fn degree(&self) -> f64 {
        2.0
    }

    fn domain(&self) -> Domain {
        Domain::Plane(self.grid)
    }

    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Real
    }

    fn apply_l(&self, u: &Field) -> Field {
        spectral::apply_real_multiplier(u, &self.symbol)
    }

    fn solve_l(&self, b: &Field) -> Field {
        spectral::divide_by_symbol(b, &self.symbol, &Self::PINNED)
    }

    fn apply_n(&self, u: &Field) -> Field {
        self.mass_operator(&self.product(u, u, 1.0))
    }

    fn jac_n_action(&self, u: &Field, v: &Field) -> Result<Field> {
        Ok(self.mass_operator(&self.product(u, v, 2.0)))
    }

    fn jac_n_adjoint_action(&self, u: &Field, w: &Field) -> Result<Field> {
        Ok(self.product(u, &self.mass_operator(w), 2.0))
    }

    fn pinned_modes(&self) -> &[usize] {
        &Self::PINNED
    }

    fn symmetries(&self) -> &[Symmetry] {
        &Self::SYMMETRIES
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gaussian_seed;

    #[test]
    fn symbol_examples() {
        assert_eq!(lump_symbol(1.0, 0.0, 0.5, 1.0), 3.0);
        assert_eq!(lump_symbol(0.0, 2.0, 0.5, 1.0), 4.0);
    }

    #[test]
    fn nonlinearity_has_zero_x_mean() {
        let g = Grid2D::square(8.0, 16).unwrap();
        let m = BenjaminLump::new(0.3, 1.0, g).unwrap();
        let u = gaussian_seed(g, 2.0, 2.0, false, ScalarKind::Real).unwrap();
        let n = m.apply_n(&u);
        let v = n.as_real().unwrap();
        for iz in 0..16 {
            let s: f64 = (0..16).map(|ix| v[g.index(ix, iz)]).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn solve_zeroes_pinned_mode() {
        let g = Grid2D::square(8.0, 16).unwrap();
        let m = BenjaminLump::new(0.0, 1.0, g).unwrap();
        let u = gaussian_seed(g, 2.0, 2.0, false, ScalarKind::Real).unwrap();
        let x = m.solve_l(&u);
        assert!(x.is_finite());
        assert!(spectral::forward(&x)[0].norm() < 1e-12);
    }

    #[test]
    fn adjoint_jacobian_is_consistent() {
        let g = Grid2D::square(8.0, 16).unwrap();
        let m = BenjaminLump::new(0.5, 1.0, g).unwrap();
        let u = gaussian_seed(g, 2.0, 2.0, false, ScalarKind::Real).unwrap();
        let v = gaussian_seed(g, 1.0, 3.0, true, ScalarKind::Real).unwrap();
        let w = spectral::partial(&u, spectral::Axis::Z, 1).add(&u.scaled(0.1));
        let lhs = m.jac_n_action(&u, &v).unwrap().dot(&w);
        let rhs = v.dot(&m.jac_n_adjoint_action(&u, &w).unwrap());
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }
}
