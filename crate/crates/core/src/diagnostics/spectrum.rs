use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::factors::StabilizingFactor;
use crate::linalg::{
    assemble, dense_eigenpairs, eigen_residual, krylov_eigenpairs, EigenPair, KrylovOptions,
    LinearOperator,
};
use crate::problems::ProblemModel;
use crate::spectral::Field;
use crate::{Error, Result};

/// Absolute tolerance for "modulus one" clustering.
pub const UNIT_TOLERANCE: f64 = 1e-4;

/// Largest dimension handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;

/// The iteration matrix `S = L^-1 N'(u*)` on realified vectors.
pub struct IterationMatrix<'a> {
    problem: &'a dyn ProblemModel,
    u_star: &'a Field,
}

impl<'a> IterationMatrix<'a> {
    pub fn new(problem: &'a dyn ProblemModel, u_star: &'a Field) -> Result<Self> {
        problem.check_field(u_star)?;
        problem.jac_n_action(u_star, u_star)?;
        Ok(Self { problem, u_star })
    }

    pub fn apply_field(&self, v: &Field) -> Field {
        let jn = self
            .problem
            .jac_n_action(self.u_star, v)
            .expect("Jacobian availability checked at construction");
        let mut out = self.problem.solve_l(&jn);
        self.problem.project_pinned(&mut out);
        out
    }

    fn field(&self, x: &[f64]) -> Field {
        Field::from_realified(self.problem.domain(), self.problem.scalar_kind(), x)
            .expect("realified vector of the problem dimension")
    }
}

impl LinearOperator for IterationMatrix<'_> {
    fn dim(&self) -> usize {
        self.u_star.real_dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_field(&self.field(x)).realified()
    }
}

/// The Jacobian of the stabilized iteration operator,
/// `F'(u*) = S + u* (grad s(u*))^T`.
pub struct IterationJacobian<'a> {
    s: IterationMatrix<'a>,
    gradient: Field,
}

impl<'a> IterationJacobian<'a> {
    pub fn new(
        problem: &'a dyn ProblemModel,
        factor: &StabilizingFactor,
        u_star: &'a Field,
    ) -> Result<Self> {
        let s = IterationMatrix::new(problem, u_star)?;
        let gradient = factor.gradient(problem, u_star)?;
        Ok(Self { s, gradient })
    }

    pub fn gradient(&self) -> &Field {
        &self.gradient
    }

    pub fn apply_field(&self, v: &Field) -> Field {
        let mut out = self.s.apply_field(v);
        out.axpy(self.gradient.dot(v), self.s.u_star);
        out
    }
}

impl LinearOperator for IterationJacobian<'_> {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_field(&self.s.field(x)).realified()
    }
}

/// `S v = L^-1 N'(u*) v`.
pub fn iteration_matrix_action(problem: &dyn ProblemModel, u_star: &Field, v: &Field) -> Result<Field> {
    Ok(IterationMatrix::new(problem, u_star)?.apply_field(v))
}

/// `F'(u*) v = S v + u* (grad s(u*) . v)`.
pub fn jacobian_f_action(
    problem: &dyn ProblemModel,
    factor: &StabilizingFactor,
    u_star: &Field,
    v: &Field,
) -> Result<Field> {
    Ok(IterationJacobian::new(problem, factor, u_star)?.apply_field(v))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by descending modulus.
    pub eigenvalues: Vec<Complex64>,
    pub moduli: Vec<f64>,
    /// `||A v - lambda v|| / ||v||` per eigenvalue.
    pub residuals: Vec<f64>,
    /// `||lambda| - 1| <= UNIT_TOLERANCE`.
    pub unit_modulus: Vec<bool>,
    pub dimension: usize,
    pub method: String,
    /// False when the iterative eigensolver stopped before reaching its
    /// tolerance; the values are then the best available estimates.
    pub converged: bool,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl SpectrumReport {
    fn from_pairs(op: &dyn LinearOperator, pairs: Vec<EigenPair>, method: &str, converged: bool) -> Self {
        let residuals = crate::par::map_slice(&pairs, |p| eigen_residual(op, p));
        let eigenvalues: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
        Self {
            moduli: eigenvalues.iter().map(|z| z.norm()).collect(),
            unit_modulus: eigenvalues
                .iter()
                .map(|z| (z.norm() - 1.0).abs() <= UNIT_TOLERANCE)
                .collect(),
            eigenvalues,
            residuals,
            dimension: op.dim(),
            method: method.to_string(),
            converged,
            eigenvectors: pairs.into_iter().map(|p| p.vector).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Whether every eigenvalue of the operator is listed.
    pub fn is_complete(&self) -> bool {
        self.len() == self.dimension
    }

    /// Number of eigenvalues within `tol` of `target`.
    pub fn count_near(&self, target: Complex64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|z| (*z - target).norm() <= tol).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// The `k` largest-modulus eigenvalues of `op`: dense eigendecomposition of
/// the assembled matrix up to [`DENSE_LIMIT`], restarted Arnoldi beyond.
pub fn top_eigenvalues(op: &dyn LinearOperator, k: usize) -> Result<SpectrumReport> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenvalues of a {n}-dimensional operator"
        )));
    }
    if n <= DENSE_LIMIT {
        let matrix = assemble(op);
        let mut pairs = dense_eigenpairs(&matrix);
        pairs.truncate(k);
        Ok(SpectrumReport::from_pairs(op, pairs, "dense", true))
    } else {
        let (pairs, converged) = krylov_eigenpairs(op, k, KrylovOptions::default());
        if pairs.is_empty() {
            return Err(Error::EigenSolver("no Ritz pairs produced".into()));
        }
        Ok(SpectrumReport::from_pairs(op, pairs, "arnoldi", converged))
    }
}

/// Every eigenvalue of `op` (dense path only).
pub fn full_spectrum(op: &dyn LinearOperator) -> Result<SpectrumReport> {
    if op.dim() > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "full spectrum limited to dimension {DENSE_LIMIT}"
        )));
    }
    top_eigenvalues(op, op.dim())
}

/// Outcome of comparing `spec(F')` with `(spec(S) \ {p}) U {p + q}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftReport {
    pub passed: bool,
    pub tolerance: f64,
    pub removed: Complex64,
    pub inserted: f64,
    pub expected: Vec<Complex64>,
    pub matched: Vec<Complex64>,
    pub differences: Vec<f64>,
}

/// Checks the spectrum-shift law. With truncated spectra the comparison is
/// limited to the entries guaranteed to be among the largest on both sides.
pub fn spectrum_shift_check(
    spec_s: &SpectrumReport,
    spec_f: &SpectrumReport,
    p: f64,
    q: f64,
    tol: f64,
) -> ShiftReport {
    let target = Complex64::new(p, 0.0);
    let (idx, removed) = spec_s
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
        .map(|(i, z)| (i, *z))
        .unwrap_or((usize::MAX, target));
    let mut expected: Vec<Complex64> = spec_s
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, z)| *z)
        .collect();
    // The top k - 1 entries of (S \ {p}) U {p + q} are determined by the top
    // k entries of S; the full multiset only when both spectra are complete.
    let complete = spec_s.is_complete() && spec_f.is_complete();
    expected.push(Complex64::new(p + q, 0.0));
    expected.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let keep = if complete {
        expected.len()
    } else {
        spec_s.len().saturating_sub(1).min(spec_f.len())
    };
    expected.truncate(keep);

    let mut used = vec![false; spec_f.len()];
    let mut matched = Vec::with_capacity(expected.len());
    let mut differences = Vec::with_capacity(expected.len());
    for e in &expected {
        let best = spec_f
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|a, b| (a.1 - e).norm().total_cmp(&(b.1 - e).norm()));
        match best {
            Some((i, z)) => {
                used[i] = true;
                matched.push(*z);
                differences.push((z - e).norm());
            }
            None => {
                matched.push(Complex64::new(f64::NAN, f64::NAN));
                differences.push(f64::INFINITY);
            }
        }
    }
    ShiftReport {
        passed: differences.iter().all(|d| *d <= tol),
        tolerance: tol,
        removed,
        inserted: p + q,
        expected,
        matched,
        differences,
    }
}

/// Advisory verdicts on the convergence hypotheses for the stabilized
/// iteration, read off the spectrum of `S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub p: f64,
    pub tolerance: f64,
    /// (i): the dominant eigenvalue equals `p` and is simple.
    pub dominant_is_p: bool,
    pub dominant_simple: bool,
    /// (ii): every other eigenvalue has modulus at most `1 + tol`.
    pub rest_bounded: bool,
    pub violating: Vec<Complex64>,
    /// (iii): eigenvalues of unit modulus, with the rank of their
    /// eigenvectors as a semisimplicity indicator.
    pub unit_modulus: Vec<Complex64>,
    pub unit_eigenvector_rank: usize,
    pub eigenvalue_one_multiplicity: usize,
    /// Relative size of the seed error in each unit-modulus eigendirection,
    /// when a seed error was supplied.
    pub seed_components: Option<Vec<f64>>,
    pub verdicts: Vec<String>,
}

pub fn hypothesis_report(spec: &SpectrumReport, p: f64, seed_error: Option<&[f64]>) -> HypothesisReport {
    let tol = UNIT_TOLERANCE;
    let target = Complex64::new(p, 0.0);
    let near_p = spec.count_near(target, 1e-3 * p.abs().max(1.0));
    let dominant_is_p = spec
        .eigenvalues
        .first()
        .is_some_and(|z| (z - target).norm() <= 1e-3 * p.abs().max(1.0));
    let dominant_simple = near_p == 1;
    let mut skipped_p = false;
    let mut violating = Vec::new();
    let mut unit = Vec::new();
    let mut unit_vectors = Vec::new();
    for (z, v) in spec.eigenvalues.iter().zip(spec.eigenvectors.iter().map(Some).chain(std::iter::repeat(None))) {
        if !skipped_p && (z - target).norm() <= 1e-3 * p.abs().max(1.0) {
            skipped_p = true;
            continue;
        }
        if z.norm() > 1.0 + tol {
            violating.push(*z);
        } else if (z.norm() - 1.0).abs() <= tol {
            unit.push(*z);
            if let Some(v) = v {
                unit_vectors.push(v.clone());
            }
        }
    }
    let rank = numerical_rank(&unit_vectors);
    let seed_components = seed_error.map(|e| {
        let en = e.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        unit_vectors
            .iter()
            .map(|v| {
                let c: Complex64 = v.iter().zip(e).map(|(v, e)| v.conj() * e).sum();
                c.norm() / en
            })
            .collect()
    });
    let mut verdicts = Vec::new();
    verdicts.push(if dominant_is_p && dominant_simple {
        "hypothesis (i) satisfied: dominant eigenvalue p is simple".to_string()
    } else {
        "hypothesis (i) violated: dominant eigenvalue is not a simple p".to_string()
    });
    verdicts.push(if violating.is_empty() {
        "hypothesis (ii) satisfied: no eigenvalue besides p has modulus above one".to_string()
    } else {
        format!(
            "hypothesis (ii) violated: {} eigenvalue(s) besides p have modulus above one",
            violating.len()
        )
    });
    verdicts.push(if unit.is_empty() {
        "hypothesis (iii) not needed: no eigenvalue of modulus one".to_string()
    } else if rank == unit.len() {
        format!(
            "hypothesis (iii) advisory: {} unit-modulus eigenvalue(s), eigenvectors independent (semisimple)",
            unit.len()
        )
    } else {
        format!(
            "hypothesis (iii) advisory: {} unit-modulus eigenvalue(s) but eigenvector rank {rank} (possibly defective)",
            unit.len()
        )
    });
    HypothesisReport {
        p,
        tolerance: tol,
        dominant_is_p,
        dominant_simple,
        rest_bounded: violating.is_empty(),
        violating,
        eigenvalue_one_multiplicity: spec.count_near(Complex64::new(1.0, 0.0), tol),
        unit_modulus: unit,
        unit_eigenvector_rank: rank,
        seed_components,
        verdicts,
    }
}

/// Rank of a set of complex vectors through modified Gram-Schmidt with a
/// relative threshold.
fn numerical_rank(vectors: &[Vec<Complex64>]) -> usize {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        let n0: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for b in &basis {
            let c: Complex64 = b.iter().zip(&w).map(|(b, w)| b.conj() * w).sum();
            w.iter_mut().zip(b).for_each(|(w, b)| *w -= c * b);
        }
        let n: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 * n0 {
            basis.push(w.iter().map(|z| z / n).collect());
        }
    }
    basis.len()
}
