//! Stabilizing factors `s(u)` for the iteration `L u_{n+1} = s(u_n) N(u_n)`.
//!
//! Every family has the form `s(u) = (A(u) / B(u))^gamma` where `A` is built
//! from `L u` and `B` from `N(u)`, so `s(u*) = 1` at solutions and `s` is
//! homogeneous of degree `q = gamma (1 - p)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::par;
use crate::problems::ProblemModel;
use crate::spectral::{Field, ScalarKind};
use crate::{Error, Result};

/// The `gamma` minimizing the contraction factor `|p + q|`: `q = -p`.
pub fn optimal_gamma(p: f64) -> Result<f64> {
    if p == 1.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "optimal gamma needs p != 1, got {p}"
        )));
    }
    Ok(p / (p - 1.0))
}

/// Order `r` of the norm family, `1 <= r <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_infinite() && r > 0.0 {
            Ok(NormOrder::Infinity)
        } else if r >= 1.0 && r.is_finite() {
            Ok(NormOrder::Finite(r))
        } else {
            Err(Error::InvalidParameter(format!("norm order must be in [1, inf], got {r}")))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            NormOrder::Finite(r) => *r,
            NormOrder::Infinity => f64::INFINITY,
        }
    }

    fn is_kinked(&self) -> bool {
        matches!(self, NormOrder::Infinity | NormOrder::Finite(1.0))
    }
}

type MapFn = dyn Fn(&Field) -> Field + Send + Sync;

/// The homogeneous map `f` of the inner-product family.
#[derive(Clone)]
pub enum InnerMap {
    Identity,
    /// Pointwise `u o u`.
    Square,
    /// Pointwise `u o u o u`.
    Cube,
    Custom {
        name: String,
        degree: f64,
        map: Arc<MapFn>,
    },
}

impl fmt::Debug for InnerMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PartialEq for InnerMap {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

impl InnerMap {
    pub fn custom(
        name: impl Into<String>,
        degree: f64,
        map: impl Fn(&Field) -> Field + Send + Sync + 'static,
    ) -> Self {
        InnerMap::Custom {
            name: name.into(),
            degree,
            map: Arc::new(map),
        }
    }

    pub fn name(&self) -> String {
        match self {
            InnerMap::Identity => "identity".into(),
            InnerMap::Square => "square".into(),
            InnerMap::Cube => "cube".into(),
            InnerMap::Custom { name, .. } => name.clone(),
        }
    }

    pub fn degree(&self) -> f64 {
        match self {
            InnerMap::Identity => 1.0,
            InnerMap::Square => 2.0,
            InnerMap::Cube => 3.0,
            InnerMap::Custom { degree, .. } => *degree,
        }
    }

    pub fn apply(&self, u: &Field) -> Field {
        match self {
            InnerMap::Identity => u.clone(),
            InnerMap::Square => pointwise_power(u, 2),
            InnerMap::Cube => pointwise_power(u, 3),
            InnerMap::Custom { map, .. } => map(u),
        }
    }

    /// `f'(u)^* w` under the real pairing; `None` for custom maps.
    fn adjoint_derivative(&self, u: &Field, w: &Field) -> Option<Field> {
        let k = match self {
            InnerMap::Identity => return Some(w.clone()),
            InnerMap::Square => 2,
            InnerMap::Cube => 3,
            InnerMap::Custom { .. } => return None,
        };
        // f(u) = u^k has f'(u) v = k u^(k-1) v, whose adjoint multiplies by
        // k conj(u)^(k-1).
        let kf = k as f64;
        let out = match (u.as_real(), w.as_real()) {
            (Some(uv), Some(wv)) => Field::real(
                *w.domain(),
                uv.iter().zip(wv).map(|(u, w)| kf * u.powi(k - 1) * w).collect(),
            ),
            _ => {
                let (uv, wv) = (u.as_complex()?, w.as_complex()?);
                Field::complex(
                    *w.domain(),
                    uv.iter()
                        .zip(wv)
                        .map(|(u, w)| kf * u.conj().powi(k - 1) * w)
                        .collect(),
                )
            }
        };
        Some(out.expect("same length"))
    }

    fn validate(&self, probe: &Field) -> Result<()> {
        let d = self.degree();
        if !(d >= 1.0) {
            return Err(Error::NotHomogeneous(format!(
                "{}: degree {d} is below 1",
                self.name()
            )));
        }
        let base = self.apply(probe);
        if !base.is_compatible(probe) || !base.is_finite() {
            return Err(Error::NotHomogeneous(format!(
                "{}: output is not a finite field of the input kind",
                self.name()
            )));
        }
        for t in [0.5, 2.0, 3.0] {
            let scaled = self.apply(&probe.scaled(t));
            let expected = base.scaled(t.powf(d));
            let err = scaled.sub(&expected).norm();
            if err > 1e-10 * expected.norm().max(f64::MIN_POSITIVE) {
                return Err(Error::NotHomogeneous(format!(
                    "{}: f({t} u) differs from {t}^{d} f(u) by {err:e}",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

fn pointwise_power(u: &Field, k: i32) -> Field {
    match u.kind() {
        ScalarKind::Real => u.map_real(|x| x.powi(k)),
        ScalarKind::Complex => {
            let v = u.as_complex().unwrap().iter().map(|z| z.powi(k)).collect();
            Field::complex(*u.domain(), v).expect("same domain")
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FactorFamily {
    /// `(<L u, u> / <N(u), u>)^gamma`.
    Petviashvili,
    /// `(<L u, f(u)> / <N(u), f(u)>)^gamma`.
    Inner(InnerMap),
    /// `(||L u||_r / ||N(u)||_r)^gamma`.
    Norm(NormOrder),
}

/// `s(u)` paired with a problem of degree `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizingFactor {
    family: FactorFamily,
    gamma: f64,
    p: f64,
    q: f64,
}

/// Relative threshold below which `B(u)` is treated as zero.
const DEGENERATE_TOL: f64 = 1e-14;

impl StabilizingFactor {
    /// Builds a factor and checks `|p + q| < 1`.
    pub fn new(family: FactorFamily, gamma: f64, problem: &dyn ProblemModel) -> Result<Self> {
        let factor = Self::unchecked(family, gamma, problem.degree())?;
        if !((factor.p + factor.q).abs() < 1.0) {
            return Err(Error::PropertyViolation {
                p: factor.p,
                q: factor.q,
            });
        }
        if let FactorFamily::Inner(map) = &factor.family {
            map.validate(&probe_field(problem))?;
        }
        Ok(factor)
    }

    /// Builds a factor without the `|p + q| < 1` check, for experiments on
    /// the boundary of the admissible range.
    pub fn unchecked(family: FactorFamily, gamma: f64, p: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be finite, got {gamma}")));
        }
        Ok(Self {
            family,
            gamma,
            p,
            q: gamma * (1.0 - p),
        })
    }

    pub fn petviashvili(gamma: f64, problem: &dyn ProblemModel) -> Result<Self> {
        Self::new(FactorFamily::Petviashvili, gamma, problem)
    }

    pub fn inner(map: InnerMap, gamma: f64, problem: &dyn ProblemModel) -> Result<Self> {
        Self::new(FactorFamily::Inner(map), gamma, problem)
    }

    pub fn norm(r: f64, gamma: f64, problem: &dyn ProblemModel) -> Result<Self> {
        Self::new(FactorFamily::Norm(NormOrder::new(r)?), gamma, problem)
    }

    /// Parses a descriptor such as `petviashvili:optimal`, `inner:f=square:2`
    /// or `norm:inf:1.5`.
    pub fn from_descriptor(descriptor: &str, problem: &dyn ProblemModel) -> Result<Self> {
        let spec: FactorSpec = descriptor.parse()?;
        spec.build(problem)
    }

    pub fn family(&self) -> &FactorFamily {
        &self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Degree of the paired problem.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Homogeneity degree `q = gamma (1 - p)`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn descriptor(&self) -> String {
        FactorSpec {
            family: self.family.clone(),
            gamma: GammaSpec::Value(self.gamma),
        }
        .to_string()
    }

    pub fn evaluate(&self, problem: &dyn ProblemModel, u: &Field) -> Result<f64> {
        let lu = problem.apply_l(u);
        let nu = problem.apply_n(u);
        self.evaluate_parts(u, &lu, &nu)
    }

    /// Evaluates `s` from precomputed `L u` and `N(u)`.
    pub fn evaluate_parts(&self, u: &Field, lu: &Field, nu: &Field) -> Result<f64> {
        let (a, b) = self.ratio_parts(u, lu, nu)?;
        self.power(a / b)
    }

    fn ratio_parts(&self, u: &Field, lu: &Field, nu: &Field) -> Result<(f64, f64)> {
        let (a, b, scale) = match &self.family {
            FactorFamily::Petviashvili => (lu.dot(u), nu.dot(u), nu.norm() * u.norm()),
            FactorFamily::Inner(map) => {
                let f = map.apply(u);
                (lu.dot(&f), nu.dot(&f), nu.norm() * f.norm())
            }
            FactorFamily::Norm(r) => {
                let b = nu.lp_norm(r.value());
                (lu.lp_norm(r.value()), b, 0.0)
            }
        };
        if !(b.abs() > DEGENERATE_TOL * scale) || b == 0.0 || !b.is_finite() {
            return Err(Error::DegenerateDenominator { value: b });
        }
        Ok((a, b))
    }

    fn power(&self, ratio: f64) -> Result<f64> {
        if ratio >= 0.0 {
            return Ok(ratio.powf(self.gamma));
        }
        if self.gamma.fract() == 0.0 {
            Ok(ratio.powi(self.gamma as i32))
        } else {
            Err(Error::NegativeFactorBase {
                ratio,
                gamma: self.gamma,
            })
        }
    }

    /// Gradient of `s` at `u`, represented by its Riesz vector under the
    /// real pairing, so `s'(u) v = grad.dot(v)`.
    pub fn gradient(&self, problem: &dyn ProblemModel, u: &Field) -> Result<Field> {
        let lu = problem.apply_l(u);
        let nu = problem.apply_n(u);
        let (a, b) = self.ratio_parts(u, &lu, &nu)?;
        let s = self.power(a / b)?;
        let map = match &self.family {
            FactorFamily::Petviashvili => InnerMap::Identity,
            FactorFamily::Inner(InnerMap::Custom { .. }) => return self.finite_difference_gradient(problem, u),
            FactorFamily::Inner(map) => map.clone(),
            FactorFamily::Norm(r) => {
                // grad A = L^* g(L u), grad B = N'(u)^* g(N(u)) with g the
                // (sub)gradient of the r-norm.
                let grad_a = problem.apply_l_adjoint(&norm_gradient(&lu, *r));
                let grad_b = match problem.jac_n_adjoint_action(u, &norm_gradient(&nu, *r)) {
                    Ok(g) => g,
                    Err(Error::MissingJacobian) => return self.finite_difference_gradient(problem, u),
                    Err(e) => return Err(e),
                };
                let mut g = grad_a.scaled(1.0 / a);
                g.axpy(-1.0 / b, &grad_b);
                g.scale(self.gamma * s);
                return Ok(g);
            }
        };
        let f = map.apply(u);
        // grad A = L^* f(u) + f'(u)^* L u,  grad B = N'(u)^* f(u) + f'(u)^* N(u).
        let mut grad_a = problem.apply_l_adjoint(&f);
        grad_a.axpy(1.0, &map.adjoint_derivative(u, &lu).expect("analytic map"));
        let mut grad_b = problem.jac_n_adjoint_action(u, &f)?;
        grad_b.axpy(1.0, &map.adjoint_derivative(u, &nu).expect("analytic map"));
        let mut g = grad_a.scaled(1.0 / a);
        g.axpy(-1.0 / b, &grad_b);
        g.scale(self.gamma * s);
        Ok(g)
    }

    /// Central-difference gradient, one realified component at a time, with
    /// step `1e-6 ||u||`; components are evaluated in parallel. Used for
    /// custom inner maps and as a cross-check of the analytic gradients.
    pub fn finite_difference_gradient(&self, problem: &dyn ProblemModel, u: &Field) -> Result<Field> {
        let norm = u.norm();
        let mut base = u.realified();
        if matches!(&self.family, FactorFamily::Norm(r) if r.is_kinked()) {
            // Move off measure-zero kinks of the 1- and inf-norms.
            let shift = 1e-12 * norm;
            let n = base.len();
            for (j, x) in base.iter_mut().enumerate() {
                *x += shift * (1.0 + j as f64 / n as f64);
            }
        }
        let h = 1e-6 * norm;
        let domain = *u.domain();
        let kind = u.kind();
        let eval = |x: &[f64]| -> Result<f64> {
            let f = Field::from_realified(domain, kind, x)?;
            self.evaluate(problem, &f)
        };
        let comps = par::map_range(base.len(), |j| -> Result<f64> {
            let mut x = base.clone();
            x[j] = base[j] + h;
            let plus = eval(&x)?;
            x[j] = base[j] - h;
            let minus = eval(&x)?;
            Ok((plus - minus) / (2.0 * h))
        });
        let g = comps.into_iter().collect::<Result<Vec<f64>>>()?;
        Field::from_realified(domain, kind, &g)
    }

    /// `(s(u + eps v) - s(u - eps v)) / (2 eps)`.
    pub fn directional_derivative(
        &self,
        problem: &dyn ProblemModel,
        u: &Field,
        v: &Field,
        eps: f64,
    ) -> Result<f64> {
        let mut plus = u.clone();
        plus.axpy(eps, v);
        let mut minus = u.clone();
        minus.axpy(-eps, v);
        Ok((self.evaluate(problem, &plus)? - self.evaluate(problem, &minus)?) / (2.0 * eps))
    }
}

/// Riesz vector of the r-norm's derivative at `w`. At the kinks of the 1-
/// and inf-norms this is a subgradient; it always satisfies
/// `<g, w> = ||w||_r`.
fn norm_gradient(w: &Field, r: NormOrder) -> Field {
    let moduli = w.moduli();
    let weights: Vec<f64> = match r {
        NormOrder::Infinity => {
            let top = moduli
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(j, _)| j);
            (0..moduli.len())
                .map(|j| if Some(j) == top && moduli[j] > 0.0 { 1.0 / moduli[j] } else { 0.0 })
                .collect()
        }
        NormOrder::Finite(r) => {
            let total = w.lp_norm(r);
            moduli
                .iter()
                .map(|&m| if m > 0.0 { (m / total).powf(r - 1.0) / m } else { 0.0 })
                .collect()
        }
    };
    match w.kind() {
        ScalarKind::Real => {
            let v = w.as_real().unwrap().iter().zip(&weights).map(|(x, c)| x * c).collect();
            Field::real(*w.domain(), v).expect("same domain")
        }
        ScalarKind::Complex => {
            let v = w.as_complex().unwrap().iter().zip(&weights).map(|(z, c)| z * *c).collect();
            Field::complex(*w.domain(), v).expect("same domain")
        }
    }
}

/// Deterministic smooth probe for validating custom inner maps.
fn probe_field(problem: &dyn ProblemModel) -> Field {
    let domain = problem.domain();
    let n = domain.len();
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let t = j as f64 / n as f64;
            1.0 + 0.5 * (2.0 * std::f64::consts::PI * t).sin() + 0.25 * t
        })
        .collect();
    let f = Field::real(domain, values).expect("domain-sized vector");
    match problem.scalar_kind() {
        ScalarKind::Real => f,
        ScalarKind::Complex => f.rotated(0.3),
    }
}

/// `gamma` as written in a descriptor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaSpec {
    Optimal,
    Value(f64),
}

impl GammaSpec {
    pub fn resolve(&self, p: f64) -> Result<f64> {
        match self {
            GammaSpec::Optimal => optimal_gamma(p),
            GammaSpec::Value(g) => Ok(*g),
        }
    }
}

/// Parsed factor descriptor, independent of any problem.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpec {
    pub family: FactorFamily,
    pub gamma: GammaSpec,
}

impl FactorSpec {
    pub fn build(&self, problem: &dyn ProblemModel) -> Result<StabilizingFactor> {
        let gamma = self.gamma.resolve(problem.degree())?;
        StabilizingFactor::new(self.family.clone(), gamma, problem)
    }

    /// Same as [`build`](Self::build) without the `|p + q| < 1` check.
    pub fn build_unchecked(&self, p: f64) -> Result<StabilizingFactor> {
        StabilizingFactor::unchecked(self.family.clone(), self.gamma.resolve(p)?, p)
    }
}

impl FromStr for FactorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Descriptor(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let parse_gamma = |g: &str| -> Result<GammaSpec> {
            if g.eq_ignore_ascii_case("optimal") {
                Ok(GammaSpec::Optimal)
            } else {
                g.parse::<f64>()
                    .ok()
                    .filter(|g| g.is_finite())
                    .map(GammaSpec::Value)
                    .ok_or_else(bad)
            }
        };
        let (family, gamma) = match parts.as_slice() {
            ["petviashvili", g] => (FactorFamily::Petviashvili, parse_gamma(g)?),
            ["inner", f, g] => {
                let name = f.strip_prefix("f=").ok_or_else(bad)?;
                let map = match name {
                    "identity" | "x" => InnerMap::Identity,
                    "square" => InnerMap::Square,
                    "cube" => InnerMap::Cube,
                    _ => return Err(bad()),
                };
                (FactorFamily::Inner(map), parse_gamma(g)?)
            }
            ["norm", r, g] => {
                let r = if r.eq_ignore_ascii_case("inf") {
                    f64::INFINITY
                } else {
                    r.parse::<f64>().map_err(|_| bad())?
                };
                (
                    FactorFamily::Norm(NormOrder::new(r).map_err(|_| bad())?),
                    parse_gamma(g)?,
                )
            }
            _ => return Err(bad()),
        };
        Ok(FactorSpec { family, gamma })
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gamma = match self.gamma {
            GammaSpec::Optimal => "optimal".to_string(),
            GammaSpec::Value(g) => format!("{g}"),
        };
        match &self.family {
            FactorFamily::Petviashvili => write!(f, "petviashvili:{gamma}"),
            FactorFamily::Inner(map) => write!(f, "inner:f={}:{gamma}", map.name()),
            FactorFamily::Norm(NormOrder::Infinity) => write!(f, "norm:inf:{gamma}"),
            FactorFamily::Norm(NormOrder::Finite(r)) => write!(f, "norm:{r}:{gamma}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Domain, Grid1D};

    /// `u = u o u` with `L = I`.
    struct Toy(Grid1D);

    impl ProblemModel for Toy {
        fn name(&self) -> &str {
            "toy"
        }
        fn degree(&self) -> f64 {
            2.0
        }
        fn domain(&self) -> Domain {
            Domain::Line(self.0)
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
            u.map_real(|x| x * x)
        }
        fn jac_n_action(&self, u: &Field, v: &Field) -> Result<Field> {
            let (u, v) = (u.as_real().unwrap(), v.as_real().unwrap());
            Ok(Field::real(self.0, u.iter().zip(v).map(|(u, v)| 2.0 * u * v).collect()).unwrap())
        }
    }

    fn toy() -> (Toy, Field) {
        let g = Grid1D::new(1.0, 2).unwrap();
        (Toy(g), Field::real(g, vec![1.0, 2.0]).unwrap())
    }

    #[test]
    fn hand_computed_values() {
        let (p, u) = toy();
        let s = StabilizingFactor::petviashvili(2.0, &p).unwrap();
        assert!((s.evaluate(&p, &u).unwrap() - 25.0 / 81.0).abs() < 1e-15);
        // gamma = 1 gives |p + q| = 1, outside the admissible range.
        let s = StabilizingFactor::unchecked(FactorFamily::Inner(InnerMap::Square), 1.0, 2.0).unwrap();
        assert!((s.evaluate(&p, &u).unwrap() - 9.0 / 17.0).abs() < 1e-15);
        let s = StabilizingFactor::unchecked(FactorFamily::Norm(NormOrder::Finite(1.0)), 1.0, 2.0).unwrap();
        assert!((s.evaluate(&p, &u).unwrap() - 0.6).abs() < 1e-15);
        let s = StabilizingFactor::unchecked(FactorFamily::Norm(NormOrder::Infinity), 1.0, 2.0).unwrap();
        assert_eq!(s.evaluate(&p, &u).unwrap(), 0.5);
    }

    #[test]
    fn identity_map_is_petviashvili() {
        let (p, u) = toy();
        let a = StabilizingFactor::petviashvili(1.7, &p).unwrap();
        let b = StabilizingFactor::inner(InnerMap::Identity, 1.7, &p).unwrap();
        assert_eq!(a.evaluate(&p, &u).unwrap(), b.evaluate(&p, &u).unwrap());
    }

    #[test]
    fn property_violation_rejected() {
        let (p, _) = toy();
        // q = -3, |p + q| = 1.
        assert!(matches!(
            StabilizingFactor::petviashvili(3.0, &p),
            Err(Error::PropertyViolation { .. })
        ));
        assert!(StabilizingFactor::unchecked(FactorFamily::Petviashvili, 3.0, 2.0).is_ok());
    }

    #[test]
    fn degenerate_denominator() {
        let g = Grid1D::new(1.0, 2).unwrap();
        let p = Toy(g);
        // <u o u, u> = 1 - 1 = 0.
        let u = Field::real(g, vec![1.0, -1.0]).unwrap();
        let s = StabilizingFactor::petviashvili(2.0, &p).unwrap();
        assert!(matches!(s.evaluate(&p, &u), Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn negative_base_needs_integer_gamma() {
        let g = Grid1D::new(1.0, 2).unwrap();
        let p = Toy(g);
        let u = Field::real(g, vec![1.0, -2.0]).unwrap();
        // ratio = 5 / (1 - 8) < 0
        let s = StabilizingFactor::petviashvili(1.5, &p).unwrap();
        assert!(matches!(s.evaluate(&p, &u), Err(Error::NegativeFactorBase { .. })));
        let s = StabilizingFactor::petviashvili(2.0, &p).unwrap();
        assert!((s.evaluate(&p, &u).unwrap() - 25.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn custom_map_validated() {
        let (p, _) = toy();
        let good = InnerMap::custom("abs_square", 2.0, |u: &Field| u.map_real(|x| x * x.abs()));
        assert!(StabilizingFactor::inner(good, 2.0, &p).is_ok());
        let bad = InnerMap::custom("affine", 1.0, |u: &Field| u.map_real(|x| x + 1.0));
        assert!(matches!(
            StabilizingFactor::inner(bad, 2.0, &p),
            Err(Error::NotHomogeneous(_))
        ));
    }

    #[test]
    fn optimal_gamma_values() {
        assert_eq!(optimal_gamma(2.0).unwrap(), 2.0);
        assert_eq!(optimal_gamma(3.0).unwrap(), 1.5);
        assert_eq!(optimal_gamma(5.0).unwrap(), 1.25);
        assert!(optimal_gamma(1.0).is_err());
    }

    #[test]
    fn descriptors_round_trip() {
        for d in ["petviashvili:2", "inner:f=square:1.5", "norm:1:2", "norm:inf:optimal"] {
            let spec: FactorSpec = d.parse().unwrap();
            assert_eq!(spec.to_string(), d);
        }
        for bad in ["", "petviashvili", "inner:square:2", "norm:0.5:2", "norm:2:x", "foo:1"] {
            assert!(matches!(bad.parse::<FactorSpec>(), Err(Error::Descriptor(_))), "{bad}");
        }
    }

    #[test]
    fn analytic_gradient_euler_identity() {
        let g = Grid1D::new(1.0, 4).unwrap();
        let p = Toy(g);
        let u = Field::real(g, vec![1.0, 2.0, 0.5, 1.5]).unwrap();
        for fam in [FactorFamily::Petviashvili, FactorFamily::Inner(InnerMap::Cube)] {
            let s = StabilizingFactor::new(fam, 1.5, &p).unwrap();
            let grad = s.gradient(&p, &u).unwrap();
            let sv = s.evaluate(&p, &u).unwrap();
            assert!((grad.dot(&u) - s.q() * sv).abs() < 1e-12);
        }
    }
}
