use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Domain;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Node values on a [`Domain`].
///
/// Complex fields are treated as real vector spaces: the inner product is
/// the real part of the Hermitian pairing, which coincides with the
/// Euclidean product of the realified vector `[re..., im...]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    domain: Domain,
    values: Values,
}

impl Field {
    pub fn real(domain: impl Into<Domain>, values: Vec<f64>) -> Result<Self> {
        let domain = domain.into();
        check_len(&domain, values.len())?;
        Ok(Self {
            domain,
            values: Values::Real(values),
        })
    }

    pub fn complex(domain: impl Into<Domain>, values: Vec<Complex64>) -> Result<Self> {
        let domain = domain.into();
        check_len(&domain, values.len())?;
        Ok(Self {
            domain,
            values: Values::Complex(values),
        })
    }

    pub fn zeros(domain: impl Into<Domain>, kind: ScalarKind) -> Self {
        let domain = domain.into();
        let n = domain.len();
        let values = match kind {
            ScalarKind::Real => Values::Real(vec![0.0; n]),
            ScalarKind::Complex => Values::Complex(vec![Complex64::new(0.0, 0.0); n]),
        };
        Self { domain, values }
    }

    /// Rebuilds a field of the given kind from its realified coordinates.
    pub fn from_realified(domain: impl Into<Domain>, kind: ScalarKind, data: &[f64]) -> Result<Self> {
        let domain = domain.into();
        let n = domain.len();
        match kind {
            ScalarKind::Real => Self::real(domain, data.to_vec()),
            ScalarKind::Complex => {
                if data.len() != 2 * n {
                    return Err(Error::FieldMismatch(format!(
                        "realified length {} does not match 2 x {n}",
                        data.len()
                    )));
                }
                let values = (0..n)
                    .map(|j| Complex64::new(data[j], data[n + j]))
                    .collect();
                Self::complex(domain, values)
            }
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> ScalarKind {
        match self.values {
            Values::Real(_) => ScalarKind::Real,
            Values::Complex(_) => ScalarKind::Complex,
        }
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension of the realified space.
    pub fn real_dim(&self) -> usize {
        match self.kind() {
            ScalarKind::Real => self.len(),
            ScalarKind::Complex => 2 * self.len(),
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Real(v) => Some(v),
            Values::Complex(_) => None,
        }
    }

    pub fn as_real_mut(&mut self) -> Option<&mut [f64]> {
        match &mut self.values {
            Values::Real(v) => Some(v),
            Values::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match &self.values {
            Values::Complex(v) => Some(v),
            Values::Real(_) => None,
        }
    }

    pub fn as_complex_mut(&mut self) -> Option<&mut [Complex64]> {
        match &mut self.values {
            Values::Complex(v) => Some(v),
            Values::Real(_) => None,
        }
    }

    /// Node values promoted to complex numbers.
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match &self.values {
            Values::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Values::Complex(v) => v.clone(),
        }
    }

    /// Realified coordinates `[re..., im...]` (just the values for real fields).
    pub fn realified(&self) -> Vec<f64> {
        match &self.values {
            Values::Real(v) => v.clone(),
            Values::Complex(v) => v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect(),
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        match &self.values {
            Values::Real(v) => v.iter().map(|x| x.abs()).collect(),
            Values::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.values {
            Values::Real(v) => v.iter().all(|x| x.is_finite()),
            Values::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }

    /// Real part of the Hermitian pairing.
    pub fn dot(&self, other: &Field) -> f64 {
        self.assert_compatible(other);
        match (&self.values, &other.values) {
            (Values::Real(a), Values::Real(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Values::Complex(a), Values::Complex(b)) => {
                a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
            }
            _ => unreachable!(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        match &self.values {
            Values::Real(v) => v.iter().map(|x| x * x).sum(),
            Values::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.moduli().into_iter().fold(0.0, f64::max)
    }

    /// `(sum |u_j|^r)^(1/r)`; `r = inf` gives the maximum norm.
    pub fn lp_norm(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return self.sup_norm();
        }
        if r == 1.0 {
            return self.moduli().iter().sum();
        }
        if r == 2.0 {
            return self.norm();
        }
        let scale = self.sup_norm();
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.moduli().iter().map(|a| (a / scale).powf(r)).sum();
        scale * s.powf(1.0 / r)
    }

    pub fn scale(&mut self, t: f64) {
        match &mut self.values {
            Values::Real(v) => v.iter_mut().for_each(|x| *x *= t),
            Values::Complex(v) => v.iter_mut().for_each(|z| *z *= t),
        }
    }

    pub fn scaled(&self, t: f64) -> Field {
        let mut out = self.clone();
        out.scale(t);
        out
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &Field) {
        self.assert_compatible(x);
        match (&mut self.values, &x.values) {
            (Values::Real(s), Values::Real(x)) => {
                s.iter_mut().zip(x).for_each(|(s, x)| *s += a * x)
            }
            (Values::Complex(s), Values::Complex(x)) => {
                s.iter_mut().zip(x).for_each(|(s, x)| *s += x * a)
            }
            _ => unreachable!(),
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiplication by the imaginary unit; real fields are promoted.
    pub fn times_i(&self) -> Field {
        let values = self
            .to_complex_vec()
            .into_iter()
            .map(|z| Complex64::new(-z.im, z.re))
            .collect();
        Field {
            domain: self.domain,
            values: Values::Complex(values),
        }
    }

    /// Multiplication by `exp(i theta)`; real fields are promoted.
    pub fn rotated(&self, theta: f64) -> Field {
        let w = Complex64::from_polar(1.0, theta);
        let values = self.to_complex_vec().into_iter().map(|z| z * w).collect();
        Field {
            domain: self.domain,
            values: Values::Complex(values),
        }
    }

    /// Pointwise map on real fields; panics on complex fields.
    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Field {
        let v = self.as_real().expect("map_real on a complex field");
        Field {
            domain: self.domain,
            values: Values::Real(v.iter().map(|&x| f(x)).collect()),
        }
    }

    pub fn zeros_like(&self) -> Field {
        Field::zeros(self.domain, self.kind())
    }

    pub fn is_compatible(&self, other: &Field) -> bool {
        self.domain == other.domain && self.kind() == other.kind()
    }

    fn assert_compatible(&self, other: &Field) {
        assert!(
            self.is_compatible(other),
            "incompatible fields: {:?}/{:?} vs {:?}/{:?}",
            self.domain,
            self.kind(),
            other.domain,
            other.kind()
        );
    }
}

fn check_len(domain: &Domain, n: usize) -> Result<()> {
    if domain.len() != n {
        return Err(Error::FieldMismatch(format!(
            "{n} values for a domain of {} nodes",
            domain.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid1D;

    fn grid() -> Grid1D {
        Grid1D::new(1.0, 4).unwrap()
    }

    #[test]
    fn complex_dot_is_realified_euclidean() {
        let a = Field::complex(
            grid(),
            vec![
                Complex64::new(1.0, 2.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.5),
                Complex64::new(-2.0, 1.0),
            ],
        )
        .unwrap();
        let b = a.times_i().add(&a.scaled(0.5));
        let ra = a.realified();
        let rb = b.realified();
        let expected: f64 = ra.iter().zip(&rb).map(|(x, y)| x * y).sum();
        assert!((a.dot(&b) - expected).abs() < 1e-14);
        // i u is orthogonal to u under the real pairing.
        assert!(a.dot(&a.times_i()).abs() < 1e-14);
    }

    #[test]
    fn realified_round_trip() {
        let a = Field::complex(grid(), (0..4).map(|j| Complex64::new(j as f64, -(j as f64))).collect())
            .unwrap();
        let back = Field::from_realified(grid(), ScalarKind::Complex, &a.realified()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn lp_norms() {
        let u = Field::real(Grid1D::new(1.0, 2).unwrap(), vec![1.0, -2.0]).unwrap();
        assert_eq!(u.lp_norm(1.0), 3.0);
        assert_eq!(u.lp_norm(f64::INFINITY), 2.0);
        assert!((u.lp_norm(3.0) - 9f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(Field::real(grid(), vec![1.0; 3]).is_err());
    }
}
