//! Discretized systems `L u = N(u)`.
//!
//! Every model works on a fixed [`Domain`] and [`ScalarKind`]. Complex
//! fields are treated as real vector spaces, so Jacobians of `N` are
//! real-linear maps and adjoints are taken with respect to the real part of
//! the Hermitian pairing.

mod benjamin;
mod ground_state;
mod soliton;
mod synthetic;

use serde::{Deserialize, Serialize};

pub use benjamin::{lump_symbol, BenjaminLump};
pub use ground_state::{CubicSign, NlsGroundState, Potential};
pub use soliton::{exact_soliton_profile, NlsSoliton, SolitonParameters};
pub use synthetic::DenseQuadratic;

use crate::spectral::{self, Axis, Domain, Field, ScalarKind};
use crate::{Error, Result};

/// Continuous symmetry groups under which a model is invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// `u -> exp(i theta) u`, generator `i u`.
    Gauge,
    /// Translation in `x`, generator `d u / dx`.
    TranslationX,
    /// Translation in `z`, generator `d u / dz`.
    TranslationZ,
}

impl Symmetry {
    /// Infinitesimal generator evaluated at `u`.
    pub fn generator(&self, u: &Field) -> Field {
        match self {
            Symmetry::Gauge => u.times_i(),
            Symmetry::TranslationX => spectral::partial(u, Axis::X, 1),
            Symmetry::TranslationZ => spectral::partial(u, Axis::Z, 1),
        }
    }
}

/// A discrete system `L u = N(u)` with `N` positively homogeneous of degree
/// `p`.
pub trait ProblemModel: Send + Sync {
    fn name(&self) -> &str;

    /// Homogeneity degree `p` of `N`.
    fn degree(&self) -> f64;

    fn domain(&self) -> Domain;

    fn scalar_kind(&self) -> ScalarKind;

    fn apply_l(&self, u: &Field) -> Field;

    /// Adjoint of `L` under the real pairing. Defaults to `L` itself.
    fn apply_l_adjoint(&self, u: &Field) -> Field {
        self.apply_l(u)
    }

    /// Solves `L x = b`; pinned modes of the result are zero.
    fn solve_l(&self, b: &Field) -> Field;

    fn apply_n(&self, u: &Field) -> Field;

    /// `N'(u) v`.
    fn jac_n_action(&self, _u: &Field, _v: &Field) -> Result<Field> {
        Err(Error::MissingJacobian)
    }

    /// `N'(u)^* w`. Defaults to the forward action (self-adjoint Jacobian).
    fn jac_n_adjoint_action(&self, u: &Field, w: &Field) -> Result<Field> {
        self.jac_n_action(u, w)
    }

    /// FFT slots held at zero.
    fn pinned_modes(&self) -> &[usize] {
        &[]
    }

    fn symmetries(&self) -> &[Symmetry] {
        &[]
    }

    fn zero_field(&self) -> Field {
        Field::zeros(self.domain(), self.scalar_kind())
    }

    /// Zeroes the pinned Fourier modes.
    fn project_pinned(&self, u: &mut Field) {
        spectral::zero_modes(u, self.pinned_modes());
    }

    /// Checks that `u` lives on this model's domain and scalar kind.
    fn check_field(&self, u: &Field) -> Result<()> {
        if *u.domain() != self.domain() || u.kind() != self.scalar_kind() {
            return Err(Error::FieldMismatch(format!(
                "{} expects a {:?} field on {:?}",
                self.name(),
                self.scalar_kind(),
                self.domain()
            )));
        }
        Ok(())
    }
}

impl<P: ProblemModel + ?Sized> ProblemModel for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn degree(&self) -> f64 {
        (**self).degree()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn scalar_kind(&self) -> ScalarKind {
        (**self).scalar_kind()
    }
    fn apply_l(&self, u: &Field) -> Field {
        (**self).apply_l(u)
    }
    fn apply_l_adjoint(&self, u: &Field) -> Field {
        (**self).apply_l_adjoint(u)
    }
    fn solve_l(&self, b: &Field) -> Field {
        (**self).solve_l(b)
    }
    fn apply_n(&self, u: &Field) -> Field {
        (**self).apply_n(u)
    }
    fn jac_n_action(&self, u: &Field, v: &Field) -> Result<Field> {
        (**self).jac_n_action(u, v)
    }
    fn jac_n_adjoint_action(&self, u: &Field, w: &Field) -> Result<Field> {
        (**self).jac_n_adjoint_action(u, w)
    }
    fn pinned_modes(&self) -> &[usize] {
        (**self).pinned_modes()
    }
    fn symmetries(&self) -> &[Symmetry] {
        (**self).symmetries()
    }
}

/// `A exp(-|x|^2 / w^2)`, multiplied by `x` when `antisymmetric`. On a plane
/// the profile is radial in `(x, z)`.
pub fn gaussian_seed(
    domain: impl Into<Domain>,
    amplitude: f64,
    width: f64,
    antisymmetric: bool,
    kind: ScalarKind,
) -> Result<Field> {
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "seed amplitude must be nonzero, got {amplitude}"
        )));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "seed width must be positive, got {width}"
        )));
    }
    let domain = domain.into();
    let profile = |x: f64, r2: f64| {
        let g = amplitude * (-r2 / (width * width)).exp();
        if antisymmetric {
            x * g
        } else {
            g
        }
    };
    let values: Vec<f64> = match &domain {
        Domain::Line(g) => g.nodes().into_iter().map(|x| profile(x, x * x)).collect(),
        Domain::Plane(g) => {
            let (xs, zs) = (g.x.nodes(), g.z.nodes());
            xs.iter()
                .flat_map(|&x| zs.iter().map(move |&z| profile(x, x * x + z * z)))
                .collect()
        }
    };
    let real = Field::real(domain, values)?;
    Ok(match kind {
        ScalarKind::Real => real,
        ScalarKind::Complex => real.rotated(0.0),
    })
}

/// The perturbed seed `U + eps1 i U + eps2 dU/dx`.
pub fn perturbed_seed(u: &Field, eps1: f64, eps2: f64) -> Field {
    let mut seed = u.rotated(0.0);
    seed.axpy(eps1, &u.times_i());
    seed.axpy(eps2, &spectral::derivative(u, 1).rotated(0.0));
    if u.kind() == ScalarKind::Real && eps1 == 0.0 {
        let re: Vec<f64> = seed.to_complex_vec().iter().map(|z| z.re).collect();
        return Field::real(*u.domain(), re).expect("same domain");
    }
    seed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid1D, Grid2D};

    #[test]
    fn gaussian_seed_values() {
        let g = Grid1D::new(5.0, 10).unwrap();
        let u = gaussian_seed(g, 1.0, 1.0, false, ScalarKind::Real).unwrap();
        assert_eq!(u.as_real().unwrap()[5], 1.0);
        let odd = gaussian_seed(g, 1.0, 1.0, true, ScalarKind::Real).unwrap();
        let v = odd.as_real().unwrap();
        for j in 1..10 {
            assert!((v[j] + v[g.mirror(j)]).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_seed_rejects_bad_parameters() {
        let g = Grid1D::new(5.0, 10).unwrap();
        assert!(gaussian_seed(g, 0.0, 1.0, false, ScalarKind::Real).is_err());
        assert!(gaussian_seed(g, 1.0, 0.0, false, ScalarKind::Real).is_err());
    }

    #[test]
    fn plane_seed_is_radial() {
        let g = Grid2D::square(4.0, 8).unwrap();
        let u = gaussian_seed(g, 2.0, 2.0, false, ScalarKind::Real).unwrap();
        let v = u.as_real().unwrap();
        assert_eq!(v[g.index(4, 4)], 2.0);
        assert_eq!(v[g.index(3, 4)], v[g.index(4, 3)]);
    }
}
