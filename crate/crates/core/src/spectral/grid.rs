use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform periodic grid on `(-l, l)` with `m` nodes `x_j = -l + j h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_length: f64,
    points: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        if points == 0 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and positive, got {points}"
            )));
        }
        Ok(Self {
            half_length,
            points,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Index of the Nyquist mode `j = -m/2` in FFT ordering.
    pub fn nyquist_index(&self) -> usize {
        self.points / 2
    }

    /// Signed mode number of the FFT slot `idx`.
    pub fn mode_number(&self, idx: usize) -> i64 {
        let m = self.points as i64;
        let i = idx as i64;
        if i < m / 2 {
            i
        } else {
            i - m
        }
    }

    /// Wavenumbers `k_j = (pi/l) j`, `j = -m/2..m/2-1`, in FFT ordering
    /// (`0, 1, ..., m/2-1, -m/2, ..., -1`).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let scale = PI / self.half_length;
        (0..self.points)
            .map(|idx| scale * self.mode_number(idx) as f64)
            .collect()
    }

    /// Wavenumbers with the Nyquist entry zeroed, as used by odd-order
    /// multipliers.
    pub fn odd_wavenumbers(&self) -> Vec<f64> {
        let mut k = self.wavenumbers();
        k[self.nyquist_index()] = 0.0;
        k
    }

    /// Mirror index `j -> m - j (mod m)`, the node at `-x_j`.
    pub fn mirror(&self, j: usize) -> usize {
        (self.points - j) % self.points
    }
}

/// Tensor-product grid; the first axis is `x` (the propagation direction),
/// the second `z`. Values are stored row-major with `x` as the slow index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub z: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, z: Grid1D) -> Self {
        Self { x, z }
    }

    pub fn square(half_length: f64, points: usize) -> Result<Self> {
        let axis = Grid1D::new(half_length, points)?;
        Ok(Self::new(axis, axis))
    }

    pub fn len(&self) -> usize {
        self.x.points() * self.z.points()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iz: usize) -> usize {
        ix * self.z.points() + iz
    }

    /// Wavenumber pair `(k_x, k_z)` of the FFT slot `(ix, iz)`.
    pub fn wavenumber_pair(&self, ix: usize, iz: usize) -> (f64, f64) {
        let sx = PI / self.x.half_length();
        let sz = PI / self.z.half_length();
        (
            sx * self.x.mode_number(ix) as f64,
            sz * self.z.mode_number(iz) as f64,
        )
    }
}

/// The index space a [`Field`](super::Field) lives on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Line(Grid1D),
    Plane(Grid2D),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::Line(g) => g.points(),
            Domain::Plane(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_line(&self) -> Option<&Grid1D> {
        match self {
            Domain::Line(g) => Some(g),
            Domain::Plane(_) => None,
        }
    }

    pub fn as_plane(&self) -> Option<&Grid2D> {
        match self {
            Domain::Line(_) => None,
            Domain::Plane(g) => Some(g),
        }
    }

    /// Grid along the `x` direction.
    pub fn x_axis(&self) -> &Grid1D {
        match self {
            Domain::Line(g) => g,
            Domain::Plane(g) => &g.x,
        }
    }
}

impl From<Grid1D> for Domain {
    fn from(g: Grid1D) -> Self {
        Domain::Line(g)
    }
}

impl From<Grid2D> for Domain {
    fn from(g: Grid2D) -> Self {
        Domain::Plane(g)
    }
}
