//! Periodic grids, discrete Fourier transforms and spectral multipliers.
//!
//! The forward transform is the plain DFT; the inverse carries the `1/m`
//! factor. Odd-order derivatives and the Hilbert transform zero the Nyquist
//! mode so real fields stay real.

mod field;
mod grid;

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub use field::{Field, ScalarKind, Values};
pub use grid::{Domain, Grid1D, Grid2D};

use crate::linalg::DenseMatrix;
use crate::par;
use crate::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Z,
}

fn transform_rows(data: &mut [Complex64], row_len: usize, inverse: bool) {
    par::for_each_chunk_mut(data, row_len, |row| plan(row_len, inverse).process(row));
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn transform_in_place(domain: &Domain, data: &mut Vec<Complex64>, inverse: bool) {
    match domain {
        Domain::Line(g) => plan(g.points(), inverse).process(data),
        Domain::Plane(g) => {
            let (mx, mz) = (g.x.points(), g.z.points());
            transform_rows(data, mz, inverse);
            let mut t = transpose(data, mx, mz);
            transform_rows(&mut t, mx, inverse);
            *data = transpose(&t, mz, mx);
        }
    }
}

/// Unnormalized forward DFT of the field (2D fields use the same row-major
/// layout as the node values).
pub fn forward(field: &Field) -> Vec<Complex64> {
    let mut data = field.to_complex_vec();
    transform_in_place(field.domain(), &mut data, false);
    data
}

/// Inverse DFT including the `1/len` factor. For [`ScalarKind::Real`] the
/// imaginary part is discarded.
pub fn inverse(domain: &Domain, kind: ScalarKind, mut spectrum: Vec<Complex64>) -> Field {
    transform_in_place(domain, &mut spectrum, true);
    let scale = 1.0 / domain.len() as f64;
    match kind {
        ScalarKind::Real => {
            Field::real(*domain, spectrum.iter().map(|z| z.re * scale).collect())
                .expect("length preserved by the transform")
        }
        ScalarKind::Complex => {
            Field::complex(*domain, spectrum.into_iter().map(|z| z * scale).collect())
                .expect("length preserved by the transform")
        }
    }
}

/// Applies a Fourier multiplier given per FFT slot.
pub fn apply_multiplier(field: &Field, multiplier: &[Complex64]) -> Field {
    assert_eq!(multiplier.len(), field.len());
    let mut spec = forward(field);
    spec.iter_mut().zip(multiplier).for_each(|(s, m)| *s *= m);
    inverse(field.domain(), field.kind(), spec)
}

/// Applies a real Fourier multiplier given per FFT slot.
pub fn apply_real_multiplier(field: &Field, multiplier: &[f64]) -> Field {
    assert_eq!(multiplier.len(), field.len());
    let mut spec = forward(field);
    spec.iter_mut().zip(multiplier).for_each(|(s, m)| *s *= m);
    inverse(field.domain(), field.kind(), spec)
}

/// Divides mode-wise by a real symbol; modes flagged in `pinned` are set
/// to zero instead.
pub fn divide_by_symbol(field: &Field, symbol: &[f64], pinned: &[usize]) -> Field {
    let mut spec = forward(field);
    spec.iter_mut().zip(symbol).for_each(|(s, m)| *s /= m);
    for &idx in pinned {
        spec[idx] = Complex64::new(0.0, 0.0);
    }
    inverse(field.domain(), field.kind(), spec)
}

/// Zeroes the listed Fourier modes.
pub fn zero_modes(field: &mut Field, modes: &[usize]) {
    if modes.is_empty() {
        return;
    }
    let mut spec = forward(field);
    for &idx in modes {
        spec[idx] = Complex64::new(0.0, 0.0);
    }
    *field = inverse(field.domain(), field.kind(), spec);
}

/// Multiplier of the `order`-th derivative along one axis of `domain`.
pub fn derivative_multiplier(domain: &Domain, axis: Axis, order: u32) -> Vec<Complex64> {
    let axis_symbol = |k: f64, is_nyquist: bool| -> Complex64 {
        if order % 2 == 1 && is_nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k).powu(order)
        }
    };
    match (domain, axis) {
        (Domain::Line(g), Axis::X) => {
            let nyq = g.nyquist_index();
            g.wavenumbers()
                .iter()
                .enumerate()
                .map(|(j, &k)| axis_symbol(k, j == nyq))
                .collect()
        }
        (Domain::Line(_), Axis::Z) => panic!("a line domain has no z axis"),
        (Domain::Plane(g), axis) => {
            let (mx, mz) = (g.x.points(), g.z.points());
            let mut out = Vec::with_capacity(mx * mz);
            for ix in 0..mx {
                for iz in 0..mz {
                    let (kx, kz) = g.wavenumber_pair(ix, iz);
                    out.push(match axis {
                        Axis::X => axis_symbol(kx, ix == g.x.nyquist_index()),
                        Axis::Z => axis_symbol(kz, iz == g.z.nyquist_index()),
                    });
                }
            }
            out
        }
    }
}

/// Spectral derivative along `x` (the only axis of a line domain).
pub fn derivative(field: &Field, order: u32) -> Field {
    partial(field, Axis::X, order)
}

/// Spectral partial derivative along `axis`.
pub fn partial(field: &Field, axis: Axis, order: u32) -> Field {
    if order == 0 {
        return field.clone();
    }
    apply_multiplier(field, &derivative_multiplier(field.domain(), axis, order))
}

/// Symbol `-i sign(k)` of the Hilbert transform with Nyquist and zero modes
/// mapped to zero.
pub fn hilbert_symbol(k: f64) -> Complex64 {
    if k == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, -k.signum())
    }
}

/// Hilbert transform with respect to `x`.
pub fn hilbert_transform(field: &Field) -> Field {
    let domain = *field.domain();
    let mult: Vec<Complex64> = match &domain {
        Domain::Line(g) => {
            let k = g.odd_wavenumbers();
            k.iter().map(|&k| hilbert_symbol(k)).collect()
        }
        Domain::Plane(g) => {
            let kx = g.x.odd_wavenumbers();
            (0..g.len())
                .map(|idx| hilbert_symbol(kx[idx / g.z.points()]))
                .collect()
        }
    };
    apply_multiplier(field, &mult)
}

/// Dense Fourier differentiation matrix of order 1 or 2 on a periodic grid,
/// from the closed-form derivatives of the periodic sinc interpolant.
pub fn diff_matrix(grid: &Grid1D, order: u32) -> Result<DenseMatrix> {
    let m = grid.points();
    let h = 2.0 * PI / m as f64;
    let scale = PI / grid.half_length();
    let mut d = DenseMatrix::zeros(m, m);
    match order {
        1 => {
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        let diff = i as f64 - j as f64;
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        d[(i, j)] = scale * 0.5 * sign / (0.5 * diff * h).tan();
                    }
                }
            }
        }
        2 => {
            let diag = -PI * PI / (3.0 * h * h) - 1.0 / 6.0;
            for i in 0..m {
                for j in 0..m {
                    d[(i, j)] = scale * scale
                        * if i == j {
                            diag
                        } else {
                            let diff = i as f64 - j as f64;
                            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                            -0.5 * sign / (0.5 * diff * h).sin().powi(2)
                        };
                }
            }
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "differentiation matrix order must be 1 or 2, got {order}"
            )))
        }
    }
    Ok(d)
}
