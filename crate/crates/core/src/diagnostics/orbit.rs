use std::f64::consts::{PI, TAU};
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::problems::{exact_soliton_profile, SolitonParameters};
use crate::spectral::Field;
use crate::{Error, Result};

/// Fraction of the peak modulus delimiting the default phase window.
pub const WINDOW_FRACTION: f64 = 0.05;

/// Fewest nodes accepted for a phase-line fit.
pub const MIN_WINDOW: usize = 8;

/// Phase-line fit and orbit identification for a converged soliton.
///
/// Orbit parameters are reported in two conventions:
/// * `x0`, `theta0`: `U_f(x) ~ rho(x - x0) exp(i (lambda2/2 (x - x0) + theta0))`;
/// * `group_x0`, `group_theta0`: `U_f(x) ~ exp(i group_theta0) U(x + group_x0)`
///   with `U` the centered profile.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OrbitFit {
    pub slope: f64,
    pub intercept: f64,
    /// In `[0, 2 pi)`.
    pub intercept_mod_2pi: f64,
    pub window_start: usize,
    pub window_end: usize,
    pub x0: Option<f64>,
    pub theta0: Option<f64>,
    pub group_x0: Option<f64>,
    pub group_theta0: Option<f64>,
    /// `max |U_f - U_matched|`.
    pub sup_distance: Option<f64>,
    /// `max ||U_f| - |U_matched||`.
    pub modulus_sup_distance: Option<f64>,
}

fn wrap(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

fn peak(values: &[Complex64]) -> Result<(usize, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(j, z)| (j, z.norm()))
        .filter(|(_, r)| r.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|(_, r)| *r > 0.0)
        .ok_or(Error::NoPeak)
}

/// Contiguous run of nodes around the peak with `|U| >= 0.05 max|U|`.
pub fn default_window(u: &Field) -> Result<Range<usize>> {
    let values = u.to_complex_vec();
    let (jp, max) = peak(&values)?;
    let cut = WINDOW_FRACTION * max;
    let mut lo = jp;
    while lo > 0 && values[lo - 1].norm() >= cut {
        lo -= 1;
    }
    let mut hi = jp + 1;
    while hi < values.len() && values[hi].norm() >= cut {
        hi += 1;
    }
    Ok(lo..hi)
}

/// Least-squares line through the unwrapped phase `arg U_f` on `window`
/// (default: [`default_window`]). Unwrapping proceeds outward from the
/// modulus peak.
pub fn fit_phase_line(u: &Field, window: Option<Range<usize>>) -> Result<OrbitFit> {
    let window = match window {
        Some(w) => w,
        None => default_window(u)?,
    };
    let len = window.end.saturating_sub(window.start);
    if len < MIN_WINDOW || window.end > u.len() {
        return Err(Error::WindowTooSmall(len));
    }
    let values = u.to_complex_vec();
    let x = u.domain().x_axis().nodes();
    let w = &values[window.clone()];
    let (local_peak, _) = peak(w)?;

    let mut phase = vec![0.0; len];
    phase[local_peak] = w[local_peak].arg();
    for j in local_peak + 1..len {
        phase[j] = phase[j - 1] + wrap(w[j].arg() - w[j - 1].arg());
    }
    for j in (0..local_peak).rev() {
        phase[j] = phase[j + 1] + wrap(w[j].arg() - w[j + 1].arg());
    }

    let xs = &x[window.clone()];
    let n = len as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = phase.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&phase).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(OrbitFit {
        slope,
        intercept,
        intercept_mod_2pi: intercept.rem_euclid(TAU) % TAU,
        window_start: window.start,
        window_end: window.end,
        ..OrbitFit::default()
    })
}

/// Matches `U_f` against the orbit of the exact soliton for `params`
/// (whose own `x0`, `theta0` are ignored).
pub fn orbit_match(u: &Field, params: &SolitonParameters) -> Result<OrbitFit> {
    params.validate()?;
    let grid = *u.domain().as_line().ok_or(Error::NoPeak)?;
    let values = u.to_complex_vec();
    let moduli: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let x = grid.nodes();
    let (jp, _) = peak(&values)?;
    let base = SolitonParameters { x0: 0.0, theta0: 0.0, ..*params };

    // x0: minimize the modulus misfit over one cell on each side of the
    // peak node.
    let misfit = |x0: f64| -> f64 {
        x.iter()
            .zip(&moduli)
            .map(|(x, m)| {
                let d = m - base.modulus(x - x0);
                d * d
            })
            .sum()
    };
    let h = grid.spacing();
    let x0 = golden_section(misfit, x[jp] - 2.0 * h, x[jp] + 2.0 * h, 1e-13);

    // theta0: phase of the projection on the translated profile.
    let shifted = exact_soliton_profile(&base.with_orbit(x0, 0.0), &grid)?;
    let overlap: Complex64 = values
        .iter()
        .zip(shifted.as_complex().expect("complex profile"))
        .map(|(a, b)| a * b.conj())
        .sum();
    let theta0 = overlap.arg();
    let matched = exact_soliton_profile(&base.with_orbit(x0, theta0), &grid)?;
    let m = matched.as_complex().expect("complex profile");
    let sup = values.iter().zip(m).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let sup_mod = moduli
        .iter()
        .zip(m)
        .map(|(a, b)| (a - b.norm()).abs())
        .fold(0.0, f64::max);

    let mut fit = fit_phase_line(u, None)?;
    fit.x0 = Some(x0);
    fit.theta0 = Some(theta0);
    fit.group_x0 = Some(-x0);
    fit.group_theta0 = Some(wrap(theta0));
    fit.sup_distance = Some(sup);
    fit.modulus_sup_distance = Some(sup_mod);
    Ok(fit)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
