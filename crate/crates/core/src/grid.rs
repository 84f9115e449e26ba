//! Dense tensor grids on `Q_π` and the FFT round trip between sparse
//! spectra and node values.
//!
//! Nodes are `x_l = -π + 2πl/L` on every axis; arrays are row-major with the
//! last axis fastest. Frequency `k` lives in bin `k mod L` and picks up the
//! phase `(-1)^{Σk}` from the shifted origin.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// An `L^m` tensor grid over `Q_π`.
#[derive(Clone)]
pub struct Grid {
    dim: usize,
    side: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("side", &self.side)
            .finish()
    }
}

impl Grid {
    pub fn new(dim: usize, side: usize) -> Self {
        assert!(side >= 1 && dim >= 1);
        let mut planner = FftPlanner::new();
        Grid {
            dim,
            side,
            forward: planner.plan_fft_forward(side),
            inverse: planner.plan_fft_inverse(side),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate along one axis.
    #[inline]
    pub fn node(&self, l: usize) -> f64 {
        -PI + 2.0 * PI * l as f64 / self.side as f64
    }

    /// Coordinates of the node with flat index `idx`.
    pub fn point(&self, mut idx: usize, out: &mut [f64]) {
        for j in (0..self.dim).rev() {
            out[j] = self.node(idx % self.side);
            idx /= self.side;
        }
    }

    /// Quadrature weight `(2π/L)^m` of the rectangle rule.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * PI / self.side as f64).powi(self.dim as i32)
    }

    /// Flat bin index of frequency `k`, or an aliasing error.
    pub fn bin(&self, k: &[i64]) -> Result<usize> {
        let l = self.side as i64;
        let mut idx = 0usize;
        for &kj in k {
            if 2 * kj.abs() >= l {
                return Err(Error::Aliasing {
                    grid: self.side,
                    degree: kj.unsigned_abs() as usize,
                    required: 2 * kj.unsigned_abs() as usize + 1,
                });
            }
            idx = idx * self.side + kj.rem_euclid(l) as usize;
        }
        Ok(idx)
    }

    /// Signed frequency carried by a flat bin index (centered convention).
    pub fn frequency(&self, mut idx: usize, out: &mut [i64]) {
        let l = self.side as i64;
        for j in (0..self.dim).rev() {
            let b = (idx % self.side) as i64;
            out[j] = if 2 * b >= l { b - l } else { b };
            idx /= self.side;
        }
    }

    /// Values `Σ c_k e^{ik·x}` at every node.
    pub fn synthesize<'a>(
        &self,
        coeffs: impl IntoIterator<Item = (&'a [i64], Complex64)>,
    ) -> Result<Vec<Complex64>> {
        let mut data = vec![Complex64::new(0.0, 0.0); self.len()];
        for (k, c) in coeffs {
            let b = self.bin(k)?;
            let sign = if k.iter().sum::<i64>().rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            data[b] += c * sign;
        }
        self.transform(&mut data, &self.inverse);
        Ok(data)
    }

    /// Coefficients `L^{-m} Σ_l v_l e^{-ik·x_l}` for every bin, i.e. the
    /// inverse of [`Grid::synthesize`] on alias-free spectra. Output is indexed
    /// by bin; use [`Grid::frequency`] to recover `k`.
    pub fn analyze(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let mut data = values.to_vec();
        self.transform(&mut data, &self.forward);
        let scale = 1.0 / self.len() as f64;
        let mut k = vec![0i64; self.dim];
        for (idx, v) in data.iter_mut().enumerate() {
            self.frequency(idx, &mut k);
            let sign = if k.iter().sum::<i64>().rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            *v *= sign * scale;
        }
        data
    }

    /// In-place separable transform along every axis.
    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.side;
        if self.dim == 1 {
            plan.process(data);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let total = data.len();
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Smallest `L ≥ n` of the form `2^a 3^b 5^c`.
pub fn fast_size(n: usize) -> usize {
    let mut l = n.max(1);
    loop {
        let mut r = l;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return l;
        }
        l += 1;
    }
}
