//! Trigonometric polynomials with lattice spectra, the spectral action of
//! constant-coefficient operators, and `L_p(Q_π)` quasi-norms.

mod io;
mod operator;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, LatticeSet, MAX_DIM};
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;
use crate::grid::{fast_size, Grid};
use crate::quadrature::pairwise_sum;

pub(crate) use operator::i_pow;
pub use operator::DifferentialOperator;

/// Default oversampling over the alias-free grid size.
pub const DEFAULT_OVERSAMPLING: usize = 4;

/// A declared spectrum bound `aV`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBudget {
    pub body: ConvexBody,
    pub a: f64,
}

/// `T(x) = Σ_k c_k e^{ik·x}` with finitely many nonzero `c_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "io::PolyRepr", into = "io::PolyRepr")]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
    budget: Option<SpectrumBudget>,
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(TrigPolynomial {
            dim,
            coeffs: BTreeMap::new(),
            budget: None,
        })
    }

    /// Repeated frequencies are summed.
    pub fn from_coefficients(
        dim: usize,
        coeffs: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self> {
        let mut t = Self::zero(dim)?;
        for (k, c) in coeffs {
            if k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(invalid("coefficients must be finite"));
            }
            *t.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(t)
    }

    pub fn constant(dim: usize, c: Complex64) -> Result<Self> {
        Self::from_coefficients(dim, [(vec![0; dim], c)])
    }

    /// Attaches a spectrum budget after checking every frequency against it.
    pub fn with_budget(mut self, body: ConvexBody, a: f64) -> Result<Self> {
        if body.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: body.dim(),
            });
        }
        if let Some(k) = self.coeffs.keys().find(|k| !body.contains_lattice(k, a)) {
            return Err(invalid(format!(
                "frequency {k:?} lies outside {a}·({body})"
            )));
        }
        self.budget = Some(SpectrumBudget { body, a });
        Ok(self)
    }

    pub fn budget(&self) -> Option<&SpectrumBudget> {
        self.budget.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Coefficients in lexicographic frequency order.
    pub fn iter(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.coeffs.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    /// `max_k max_j |k_j|`.
    pub fn degree(&self) -> usize {
        self.coeffs
            .keys()
            .flat_map(|k| k.iter().map(|x| x.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// `max_k |k|`.
    pub fn euclidean_degree(&self) -> f64 {
        self.coeffs
            .keys()
            .map(|k| k.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `Σ|c_k|²`.
    pub fn coefficient_energy(&self) -> f64 {
        pairwise_sum(
            &self
                .coeffs
                .values()
                .map(|c| c.norm_sqr())
                .collect::<Vec<_>>(),
        )
    }

    /// `c_k ↦ Δ_N(ik) c_k`; the spectrum and budget are kept.
    pub fn apply_operator(&self, op: &DifferentialOperator) -> Result<Self> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.dim(),
            });
        }
        Ok(self.map_coefficients(|k, c| op.multiplier(k) * c))
    }

    /// `T(· − τ)`.
    pub fn translate(&self, tau: &[f64]) -> Result<Self> {
        if tau.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: tau.len(),
            });
        }
        Ok(self.map_coefficients(|k, c| {
            let phase: f64 = k.iter().zip(tau).map(|(kj, t)| *kj as f64 * t).sum();
            c * Complex64::from_polar(1.0, -phase)
        }))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coefficients(|_, c| c * s)
    }

    /// Sum; the budget is dropped unless both operands share it.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            *out.coeffs
                .entry(k.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        if self.budget != other.budget {
            out.budget = None;
        }
        Ok(out)
    }

    fn map_coefficients(&self, f: impl Fn(&[i64], Complex64) -> Complex64) -> Self {
        TrigPolynomial {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (k.clone(), f(k, *c)))
                .collect(),
            budget: self.budget.clone(),
        }
    }

    /// Direct evaluation at one point.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(x).map(|(kj, xj)| *kj as f64 * xj).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum())
    }

    /// Values at the `L^m` nodes `-π + 2πl/L`, row-major with the last axis
    /// fastest. Requires `L ≥ 2·deg + 1`.
    pub fn evaluate_grid(&self, side: usize) -> Result<Vec<Complex64>> {
        self.evaluate_on(&Grid::new(self.dim, side))
    }

    pub fn evaluate_on(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        let required = 2 * self.degree() + 1;
        if grid.side() < required {
            return Err(Error::Aliasing {
                grid: grid.side(),
                degree: self.degree(),
                required,
            });
        }
        grid.synthesize(self.iter())
    }

    /// Default alias-free grid with oversampling.
    pub fn default_grid_side(&self) -> usize {
        fast_size(DEFAULT_OVERSAMPLING * (2 * self.degree() + 1))
    }
}

/// Where a norm was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormDomain {
    /// The torus `Q_π`.
    Torus,
}

/// `‖T‖_{L_p}` with the grid used and an error bound relative to the value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub p: Exponent,
    pub domain: NormDomain,
    pub grid: usize,
    /// Relative error bound; `∞` when no bound is available at this grid.
    pub rel_error: f64,
    /// Whether `rel_error` is a proven bound rather than an estimate.
    pub certified: bool,
}

/// `‖T‖_{L_p(Q_π)}` on an `L^m` grid.
///
/// Finite `p`: rectangle rule, exact up to rounding when `p` is an even
/// integer and `L > p·deg`; otherwise the error is estimated from a second
/// rule on nodes shifted by half a cell. `p = ∞`: the grid maximum, a lower
/// estimate, with the certified relative bound
/// `1/√(1 − 2π²m n²/L²) − 1`, `n = max|k|`, which follows from Bernstein's
/// inequality for the second directional derivative of `|T|²`.
pub fn norm_lp(t: &TrigPolynomial, p: Exponent, side: usize) -> Result<NormEstimate> {
    let grid = Grid::new(t.dim, side);
    let values = t.evaluate_on(&grid)?;
    let mut est = norm_from_values(&values, &grid, p);
    if p.is_infinite() {
        est.rel_error = sup_grid_error(t.dim, t.euclidean_degree(), side);
        est.certified = true;
        return Ok(est);
    }
    let pv = p.get();
    let even = pv.fract() == 0.0 && (pv as u64).is_multiple_of(2);
    if even && (side as f64) > pv * t.degree() as f64 {
        est.rel_error = 64.0 * f64::EPSILON * (grid.len() as f64).log2().max(1.0);
        est.certified = true;
        return Ok(est);
    }
    let shift = vec![PI / side as f64; t.dim];
    let shifted = t.translate(&shift)?.evaluate_on(&grid)?;
    let other = norm_from_values(&shifted, &grid, p);
    est.rel_error = if est.value > 0.0 {
        (other.value - est.value).abs() / est.value
    } else {
        0.0
    };
    est.certified = false;
    Ok(est)
}

/// Target relative change between successive grids in [`norm_lp_refined`].
pub const REFINEMENT_TOL: f64 = 1e-8;

/// Node budget for [`norm_lp_refined`].
pub const MAX_REFINED_NODES: usize = 1 << 22;

/// [`norm_lp`] with grid doubling until two successive values agree to
/// `tol` or the node budget is spent. Exact cases return after one grid.
/// The reported error is the last relative change.
pub fn norm_lp_refined(
    t: &TrigPolynomial,
    p: Exponent,
    side: usize,
    tol: f64,
) -> Result<NormEstimate> {
    let mut est = norm_lp(t, p, side)?;
    if p.is_infinite() || est.certified || est.value == 0.0 {
        return Ok(est);
    }
    loop {
        let next = fast_size(2 * est.grid);
        if next.pow(t.dim as u32) > MAX_REFINED_NODES {
            return Ok(est);
        }
        let mut finer = norm_lp(t, p, next)?;
        let change = (finer.value - est.value).abs() / finer.value;
        finer.rel_error = change;
        finer.certified = false;
        est = finer;
        if change <= tol {
            return Ok(est);
        }
    }
}

/// [`norm_lp_refined`] starting from `ρ` times the alias-free grid size.
pub fn norm_lp_oversampled(t: &TrigPolynomial, p: Exponent, rho: usize) -> Result<NormEstimate> {
    let side = fast_size(rho.max(1) * (2 * t.degree() + 1));
    norm_lp_refined(t, p, side, REFINEMENT_TOL)
}

/// [`norm_lp_oversampled`] with the default `ρ`.
pub fn norm_lp_default(t: &TrigPolynomial, p: Exponent) -> Result<NormEstimate> {
    norm_lp_oversampled(t, p, DEFAULT_OVERSAMPLING)
}

/// Rectangle-rule norm of precomputed node values.
pub fn norm_from_values(values: &[Complex64], grid: &Grid, p: Exponent) -> NormEstimate {
    let value = if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else {
        let pv = p.get();
        let vmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if vmax == 0.0 {
            0.0
        } else {
            let terms: Vec<f64> = values.iter().map(|v| (v.norm() / vmax).powf(pv)).collect();
            vmax * (grid.cell_volume() * pairwise_sum(&terms)).powf(1.0 / pv)
        }
    };
    NormEstimate {
        value,
        p,
        domain: NormDomain::Torus,
        grid: grid.side(),
        rel_error: 0.0,
        certified: false,
    }
}

/// Certified relative gap between the grid maximum and the true maximum.
pub fn sup_grid_error(dim: usize, euclidean_degree: f64, side: usize) -> f64 {
    let r = 2.0 * PI * PI * dim as f64 * euclidean_degree.powi(2) / (side as f64).powi(2);
    if r >= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - r).sqrt() - 1.0
    }
}

/// Independent standard complex Gaussian coefficients on `spectrum` from a
/// ChaCha8 stream seeded with `seed`, drawn in lexicographic order.
pub fn random_polynomial(spectrum: &LatticeSet, seed: u64) -> Result<TrigPolynomial> {
    if spectrum.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TrigPolynomial::from_coefficients(
        spectrum.dim(),
        spectrum.iter().map(|k| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            (k.to_vec(), Complex64::new(re, im) * FRAC_1_SQRT_2)
        }),
    )
}
