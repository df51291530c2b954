//! Dense and matrix-free linear algebra on realified vectors.

use faer::complex_native::c64;
use faer::prelude::*;
use num_complex::Complex64;

use crate::par;
use crate::{Error, Result};

pub type DenseMatrix = faer::Mat<f64>;

/// A linear map on `R^dim`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

/// Wraps an explicit dense matrix.
pub struct MatrixOperator<'a>(pub &'a DenseMatrix);

impl LinearOperator for MatrixOperator<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        matvec(self.0, x)
    }
}

/// Identity on `R^dim`.
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

pub fn matvec(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a.read(i, j) * x[j]).sum())
        .collect()
}

/// Assembles the matrix of `op` column by column. Columns are independent
/// and are evaluated in parallel.
pub fn assemble(op: &dyn LinearOperator) -> DenseMatrix {
    let n = op.dim();
    let cols = par::map_range(n, |j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        op.apply(&e)
    });
    DenseMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

/// LU factorization with partial pivoting and a pivot-based singularity test.
pub struct DenseLu {
    lu: faer::solvers::PartialPivLu<f64>,
    pivot_ratio: f64,
}

impl DenseLu {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let lu = a.partial_piv_lu();
        let u = lu.compute_u();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..u.nrows() {
            let d = u.read(i, i).abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
        // Elimination on an exactly singular matrix leaves a last pivot of
        // order n eps ||A||, so the cutoff grows with the dimension.
        let cutoff = 16.0 * u.nrows().max(1) as f64 * f64::EPSILON;
        if !(pivot_ratio > cutoff) || !pivot_ratio.is_finite() {
            return Err(Error::SingularOperator(format!(
                "pivot ratio {pivot_ratio:e}"
            )));
        }
        Ok(Self { lu, pivot_ratio })
    }

    /// Smallest over largest pivot modulus; a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = faer::Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..b.len()).map(|i| x.read(i, 0)).collect()
    }
}

/// Minimum-norm least-squares solution, discarding singular values below
/// `rel_cutoff * s_max`. Returns the solution and the numerical rank.
pub fn pseudo_solve(a: &DenseMatrix, b: &[f64], rel_cutoff: f64) -> (Vec<f64>, usize) {
    let svd = a.thin_svd();
    let s = svd.s_diagonal();
    let (u, v) = (svd.u(), svd.v());
    let smax = (0..s.nrows()).map(|i| s.read(i)).fold(0.0, f64::max);
    let mut x = vec![0.0; a.ncols()];
    let mut rank = 0;
    for k in 0..s.nrows() {
        let sk = s.read(k);
        if sk <= rel_cutoff * smax || sk == 0.0 {
            continue;
        }
        rank += 1;
        let c: f64 = (0..a.nrows()).map(|i| u.read(i, k) * b[i]).sum::<f64>() / sk;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += c * v.read(j, k);
        }
    }
    (x, rank)
}

/// Restarted GMRES with a right preconditioner `precond` (pass the identity
/// closure for none). Returns the approximate solution and the final
/// relative residual.
pub fn gmres(
    op: &dyn LinearOperator,
    precond: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    b: &[f64],
    restart: usize,
    max_restarts: usize,
    rel_tol: f64,
) -> (Vec<f64>, f64) {
    let n = op.dim();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return (x, 0.0);
    }
    let mut rel = 1.0;
    for _ in 0..max_restarts {
        let ax = op.apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= rel_tol {
            break;
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut steps = 0;
        for j in 0..restart {
            let mut w = op.apply(&precond(&basis[j]));
            for _pass in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(&w, v);
                    h[i][j] += c;
                    axpy(&mut w, -c, v);
                }
            }
            h[j + 1][j] = norm(&w);
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == 0.0 {
                steps = j;
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            let hn = h[j + 1][j];
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            steps = j + 1;
            rel = g[j + 1].abs() / bnorm;
            if rel <= rel_tol || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        let mut y = vec![0.0; steps];
        for i in (0..steps).rev() {
            let s: f64 = (i + 1..steps).map(|k| h[i][k] * y[k]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (k, yk) in y.iter().enumerate() {
            axpy(&mut update, *yk, &basis[k]);
        }
        axpy(&mut x, 1.0, &precond(&update));
        if rel <= rel_tol {
            break;
        }
    }
    (x, rel)
}

/// Eigenpair of a real operator; the eigenvector is complex.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

fn to_complex(z: c64) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// All eigenpairs of a dense real matrix, ordered by descending modulus.
pub fn dense_eigenpairs(a: &DenseMatrix) -> Vec<EigenPair> {
    let n = a.nrows();
    let eig = a.eigendecomposition::<c64>();
    let s = eig.s().column_vector();
    let u = eig.u();
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| EigenPair {
            value: to_complex(s.read(k)),
            vector: (0..n).map(|i| to_complex(u.read(i, k))).collect(),
        })
        .collect();
    sort_by_modulus(&mut pairs);
    pairs
}

/// All eigenvalues of a dense real matrix, ordered by descending modulus.
pub fn dense_eigenvalues(a: &DenseMatrix) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = a
        .eigenvalues::<c64>()
        .into_iter()
        .map(to_complex)
        .collect();
    ev.sort_by(|a, b| modulus_order(*a, *b));
    ev
}

fn modulus_order(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    // Descending modulus; conjugate pairs with positive imaginary part first.
    b.norm()
        .partial_cmp(&a.norm())
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal))
        .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
}

fn sort_by_modulus(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| modulus_order(a.value, b.value));
}

/// `||A v - lambda v|| / ||v||` for a complex vector under a real operator.
pub fn eigen_residual(op: &dyn LinearOperator, pair: &EigenPair) -> f64 {
    let re: Vec<f64> = pair.vector.iter().map(|z| z.re).collect();
    let im: Vec<f64> = pair.vector.iter().map(|z| z.im).collect();
    let are = op.apply(&re);
    let aim = if im.iter().any(|&v| v != 0.0) {
        op.apply(&im)
    } else {
        vec![0.0; im.len()]
    };
    let lam = pair.value;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..re.len() {
        let av = Complex64::new(are[i], aim[i]);
        let d = av - lam * pair.vector[i];
        num += d.norm_sqr();
        den += pair.vector[i].norm_sqr();
    }
    if den == 0.0 {
        return f64::INFINITY;
    }
    (num / den).sqrt()
}

/// Options for the restarted Krylov eigensolver.
#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    pub subspace: usize,
    pub max_restarts: usize,
    pub tolerance: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            subspace: 60,
            max_restarts: 200,
            tolerance: 1e-10,
        }
    }
}

/// Largest-modulus eigenpairs of a matrix-free operator by thick-restarted
/// Arnoldi: after each cycle the basis is compressed onto the real span of
/// the wanted Ritz vectors plus the next Krylov direction.
///
/// Returns the pairs found and whether all met the tolerance.
pub fn krylov_eigenpairs(
    op: &dyn LinearOperator,
    k: usize,
    opts: KrylovOptions,
) -> (Vec<EigenPair>, bool) {
    let n = op.dim();
    let want = (k + 4).min(n);
    let cap = opts.subspace.max(2 * want + 6).min(n);

    // Deterministic start vector.
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut start: Vec<f64> = (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let s0 = norm(&start);
    start.iter_mut().for_each(|v| *v /= s0);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut images: Vec<Vec<f64>> = vec![op.apply(&basis[0])];
    let mut best: Vec<EigenPair> = Vec::new();

    for _cycle in 0..opts.max_restarts {
        // Expand to the subspace cap.
        while basis.len() < cap {
            let mut w = images.last().unwrap().clone();
            if !orthogonalize(&mut w, &basis) {
                break;
            }
            images.push(op.apply(&w));
            basis.push(w);
        }
        let j = basis.len();
        let h = DenseMatrix::from_fn(j, j, |r, c| dot(&basis[r], &images[c]));
        let ritz = dense_eigenpairs(&h);

        // Ritz vectors and explicit residuals.
        let take = want.min(ritz.len());
        let mut pairs = Vec::with_capacity(take);
        let mut converged = true;
        for pair in ritz.iter().take(take) {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            let mut ax = vec![Complex64::new(0.0, 0.0); n];
            for (c, y) in pair.vector.iter().enumerate() {
                for i in 0..n {
                    x[i] += basis[c][i] * y;
                    ax[i] += images[c][i] * y;
                }
            }
            let xn: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let res: f64 = x
                .iter()
                .zip(&ax)
                .map(|(x, a)| (a - pair.value * x).norm_sqr())
                .sum::<f64>()
                .sqrt()
                / xn;
            if pairs.len() < k && res > opts.tolerance * pair.value.norm().max(1.0) {
                converged = false;
            }
            pairs.push(EigenPair {
                value: pair.value,
                vector: x.iter().map(|z| z / xn).collect(),
            });
        }
        best = pairs;
        if converged || j < cap {
            best.truncate(k);
            return (best, converged);
        }

        // Next Krylov direction before compressing.
        let mut next = images.last().unwrap().clone();
        let has_next = orthogonalize(&mut next, &basis);

        // Real basis of the wanted Ritz space in subspace coordinates.
        let mut small: Vec<Vec<f64>> = Vec::new();
        for pair in ritz.iter().take(take) {
            for part in [
                pair.vector.iter().map(|z| z.re).collect::<Vec<_>>(),
                pair.vector.iter().map(|z| z.im).collect::<Vec<_>>(),
            ] {
                let mut v = part;
                if orthogonalize(&mut v, &small) {
                    small.push(v);
                }
            }
        }
        let combine = |vecs: &[Vec<f64>], coeff: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (c, v) in coeff.iter().zip(vecs) {
                axpy(&mut out, *c, v);
            }
            out
        };
        let new_basis: Vec<Vec<f64>> = small.iter().map(|c| combine(&basis, c)).collect();
        let new_images: Vec<Vec<f64>> = small.iter().map(|c| combine(&images, c)).collect();
        basis = new_basis;
        images = new_images;
        if has_next && orthogonalize(&mut next, &basis) {
            images.push(op.apply(&next));
            basis.push(next);
        }
    }
    best.truncate(k);
    (best, false)
}

/// Two passes of classical Gram-Schmidt, then normalization. Returns false
/// when the vector is numerically in the span of `basis`.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let before = norm(w);
    if before == 0.0 {
        return false;
    }
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|v| dot(w, v)).collect();
        for (c, v) in coeffs.iter().zip(basis) {
            axpy(w, -c, v);
        }
    }
    let after = norm(w);
    if after <= 1e-12 * before {
        return false;
    }
    w.iter_mut().for_each(|v| *v /= after);
    true
}

/// Condition number of a symmetric positive semidefinite matrix from its
/// eigenvalues.
pub fn spd_condition(a: &DenseMatrix) -> f64 {
    let ev = a.selfadjoint_eigenvalues(faer::Side::Lower);
    let hi = ev.iter().cloned().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lo = ev.iter().cloned().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
