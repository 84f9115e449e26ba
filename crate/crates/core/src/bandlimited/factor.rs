//! One-dimensional band-limited factors given by piecewise-polynomial
//! spectral densities: `F(t) = ∫ ρ(ξ) e^{itξ} dξ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quadrature::gl16;

/// `ρ(ξ) = P((ξ − c)/w)` on `[c − w, c + w]`, with `P(s) = Σ a_j s^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub center: f64,
    pub half_width: f64,
    pub coeffs: Vec<Complex64>,
}

impl Piece {
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn poly(&self, s: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * s + a)
    }

    /// `∫_{-1}^{1} P(s) e^{iτs} ds`.
    fn unit_transform(&self, tau: f64) -> Complex64 {
        let deg = self.degree();
        if tau.abs() > (4 * deg + 8) as f64 {
            // Repeated integration by parts terminates for polynomials.
            let it = Complex64::new(0.0, tau);
            let (ep, em) = (
                Complex64::from_polar(1.0, tau),
                Complex64::from_polar(1.0, -tau),
            );
            let mut d = self.coeffs.clone();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut denom = it;
            let mut sign = 1.0;
            while !d.is_empty() {
                let at1: Complex64 = d.iter().sum();
                let atm1: Complex64 = d
                    .iter()
                    .enumerate()
                    .map(|(j, a)| if j % 2 == 0 { *a } else { -a })
                    .sum();
                acc += (at1 * ep - atm1 * em) * sign / denom;
                d = d
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, a)| a * j as f64)
                    .collect();
                denom *= it;
                sign = -sign;
            }
            return acc;
        }
        let rule = gl16();
        let panels = (tau.abs() / 3.0).ceil() as usize + deg / 16 + 1;
        let width = 2.0 / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = -1.0 + (p as f64 + 0.5) * width;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let s = mid + 0.5 * width * x;
                acc += self.poly(s) * Complex64::from_polar(w * 0.5 * width, tau * s);
            }
        }
        acc
    }

    /// Multiplies the density by `(iξ)^n`, `ξ = c + w s`.
    fn times_i_xi(&self, n: u32) -> Piece {
        let mut coeffs = self.coeffs.clone();
        let lin = [
            Complex64::new(0.0, self.center),
            Complex64::new(0.0, self.half_width),
        ];
        for _ in 0..n {
            let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (j, a) in coeffs.iter().enumerate() {
                out[j] += a * lin[0];
                out[j + 1] += a * lin[1];
            }
            coeffs = out;
        }
        Piece {
            center: self.center,
            half_width: self.half_width,
            coeffs,
        }
    }

    /// Coefficients (in `s`) of `dʲρ/dξʲ`.
    fn derivative_coeffs(&self, j: usize) -> Vec<Complex64> {
        let mut d = self.coeffs.clone();
        for _ in 0..j {
            d = d
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * k as f64 / self.half_width)
                .collect();
        }
        d
    }

    fn derivative_at(&self, j: usize, s: f64) -> Complex64 {
        self.derivative_coeffs(j)
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * s + a)
    }

    /// Crude bound on `max|ρ^{(j)}|` over the piece.
    fn max_derivative(&self, j: usize) -> f64 {
        self.derivative_coeffs(j).iter().map(|a| a.norm()).sum()
    }

    /// `∫|ρ|` by composite Gauss–Legendre.
    fn l1(&self) -> f64 {
        let rule = gl16();
        let panels = 256;
        let width = 2.0 / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = -1.0 + (p as f64 + 0.5) * width;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                acc += w * 0.5 * width * self.poly(mid + 0.5 * width * x).norm();
            }
        }
        acc * self.half_width
    }
}

/// Highest integration-by-parts order tried for decay bounds.
const MAX_DECAY_ORDER: usize = 6;

/// A univariate factor with its own decay bound
/// `|F(t)| ≤ C (1 + |t|)^{-d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor1d {
    pieces: Vec<Piece>,
    decay_order: f64,
    decay_constant: f64,
    sup_bound: f64,
}

impl Factor1d {
    /// The sup bound is `∫|ρ|`; the decay bound comes from
    /// [`Factor1d::density_decay`].
    pub fn new(pieces: Vec<Piece>) -> Self {
        let mut f = Factor1d {
            pieces,
            decay_order: 0.0,
            decay_constant: 0.0,
            sup_bound: 0.0,
        };
        f.sup_bound = f.pieces.iter().map(Piece::l1).sum::<f64>() * (1.0 + 1e-9);
        let (d, c) = f.density_decay();
        f.decay_order = d;
        f.decay_constant = c;
        f
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.pieces
            .iter()
            .map(|p| {
                Complex64::from_polar(p.half_width, t * p.center)
                    * p.unit_transform(t * p.half_width)
            })
            .sum()
    }

    /// Spectral support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        let lo = self
            .pieces
            .iter()
            .map(|p| p.center - p.half_width)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .pieces
            .iter()
            .map(|p| p.center + p.half_width)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }

    /// `(d, C)` with `|F(t)| ≤ C (1 + |t|)^{-d}`.
    pub fn decay(&self) -> (f64, f64) {
        (self.decay_order, self.decay_constant)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// `F^{(n)}`, exact: the density picks up `(iξ)^n`.
    pub fn derivative(&self, n: u32) -> Factor1d {
        if n == 0 {
            return self.clone();
        }
        Factor1d::new(self.pieces.iter().map(|p| p.times_i_xi(n)).collect())
    }

    /// Integrating by parts `n` times while the jumps of `ρ, …, ρ^{(n-2)}`
    /// vanish gives `|F(t)| ≤ B_n/|t|^n` with `B_n` the total jump of
    /// `ρ^{(n-1)}` plus `∫|ρ^{(n)}|`. Combined with `|F| ≤ A = ∫|ρ|`, the
    /// sharp constant for `(1+|t|)^n |F|` is `(A^{1/n} + B_n^{1/n})^n`.
    fn density_decay(&self) -> (f64, f64) {
        let a = self.sup_bound;
        let max_deg = self.pieces.iter().map(Piece::degree).max().unwrap_or(0);
        let mut best = (0.0, a);
        for n in 1..=MAX_DECAY_ORDER.min(max_deg + 1) {
            if n >= 2 && !self.jumps_vanish(n - 2) {
                break;
            }
            let b = (self.total_jump(n - 1) + self.derivative_l1(n)) * (1.0 + 1e-9);
            let nf = n as f64;
            let c = (a.powf(1.0 / nf) + b.powf(1.0 / nf)).powf(nf);
            if c.is_finite() {
                best = (nf, c);
            }
        }
        best
    }

    /// Breakpoints with the one-sided values of `ρ^{(j)}`.
    fn one_sided(&self, j: usize) -> Vec<(f64, Complex64, Complex64)> {
        let mut pts: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.center - p.half_width, p.center + p.half_width])
            .collect();
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * x.abs().max(1.0));
        pts.into_iter()
            .map(|x| {
                let mut left = Complex64::new(0.0, 0.0);
                let mut right = Complex64::new(0.0, 0.0);
                for p in &self.pieces {
                    let (lo, hi) = (p.center - p.half_width, p.center + p.half_width);
                    let tol = 1e-14 * x.abs().max(1.0);
                    if (x - hi).abs() <= tol {
                        left += p.derivative_at(j, 1.0);
                    } else if x > lo && x < hi {
                        let s = (x - p.center) / p.half_width;
                        left += p.derivative_at(j, s);
                        right += p.derivative_at(j, s);
                    }
                    if (x - lo).abs() <= tol {
                        right += p.derivative_at(j, -1.0);
                    }
                }
                (x, left, right)
            })
            .collect()
    }

    fn total_jump(&self, j: usize) -> f64 {
        self.one_sided(j)
            .iter()
            .map(|(_, l, r)| (r - l).norm())
            .sum()
    }

    fn jumps_vanish(&self, upto: usize) -> bool {
        (0..=upto).all(|j| {
            let sides = self.one_sided(j);
            let scale = sides
                .iter()
                .flat_map(|(_, l, r)| [l.norm(), r.norm()])
                .fold(0.0, f64::max)
                .max(
                    self.pieces
                        .iter()
                        .map(|p| p.max_derivative(j))
                        .fold(0.0, f64::max),
                );
            sides
                .iter()
                .all(|(_, l, r)| (r - l).norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE))
        })
    }

    fn derivative_l1(&self, n: usize) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let d = p.derivative_coeffs(n);
                if d.is_empty() {
                    0.0
                } else {
                    Piece {
                        center: p.center,
                        half_width: p.half_width,
                        coeffs: d,
                    }
                    .l1()
                }
            })
            .sum()
    }

    /// `ρ(ξ)`, summing overlapping pieces.
    pub fn density(&self, xi: f64) -> Complex64 {
        self.pieces
            .iter()
            .filter(|p| (xi - p.center).abs() <= p.half_width)
            .map(|p| p.poly((xi - p.center) / p.half_width))
            .sum()
    }

    /// `‖F‖_{L_2(ℝ)} = (2π ∫|ρ|²)^{1/2}`, exact up to Gauss–Legendre
    /// rounding since `|ρ|²` is polynomial between breakpoints.
    pub fn l2_norm(&self) -> f64 {
        let mut pts: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.center - p.half_width, p.center + p.half_width])
            .collect();
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let rule = gl16();
        let mut acc = 0.0;
        for w in pts.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                acc += wt * half * self.density(mid + half * x).norm_sqr();
            }
        }
        (2.0 * std::f64::consts::PI * acc).sqrt()
    }

    /// `F(γt)`.
    pub fn dilate(&self, gamma: f64) -> Factor1d {
        Factor1d {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    center: p.center * gamma,
                    half_width: p.half_width * gamma,
                    coeffs: p.coeffs.iter().map(|a| a / gamma).collect(),
                })
                .collect(),
            decay_order: self.decay_order,
            decay_constant: self.decay_constant * (1.0f64).max(1.0 / gamma).powf(self.decay_order),
            sup_bound: self.sup_bound,
        }
    }

    /// Whether the density is real and even, so `F` is real.
    pub fn is_real(&self) -> bool {
        // Reflection ξ → −ξ maps piece (c, w, a_j) to (−c, w, (−1)^j a_j).
        self.pieces.iter().all(|p| {
            self.pieces.iter().any(|q| {
                q.center == -p.center
                    && q.half_width == p.half_width
                    && q.coeffs.len() == p.coeffs.len()
                    && q.coeffs
                        .iter()
                        .zip(&p.coeffs)
                        .enumerate()
                        .all(|(j, (a, b))| {
                            let refl = if j % 2 == 0 { *b } else { -b };
                            *a == refl.conj() && *a == refl
                        })
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_piece(c: f64, w: f64, v: f64) -> Piece {
        Piece {
            center: c,
            half_width: w,
            coeffs: vec![Complex64::new(v, 0.0)],
        }
    }

    #[test]
    fn both_evaluation_paths_agree_with_sinc() {
        // ∫_{-1}^{1} ½ e^{itξ} dξ = sin t / t.
        let f = Factor1d::new(vec![constant_piece(0.0, 1.0, 0.5)]);
        for t in [0.0f64, 1e-3, 0.7, 5.0, 11.9, 12.1, 40.0, 1234.5] {
            let exact = if t == 0.0 { 1.0 } else { t.sin() / t };
            let v = f.eval(t);
            assert!((v.re - exact).abs() < 1e-14, "t={t}");
            assert!(v.im.abs() < 1e-14);
        }
        assert!((f.sup_bound() - 1.0).abs() < 1e-8);
        assert!(f.is_real());
        // A = 1, B = 1 (two jumps of ½): C = 2.
        let (d, c) = f.decay();
        assert_eq!(d, 1.0);
        assert!((c - 2.0).abs() < 1e-8);
    }

    #[test]
    fn triangle_density_decays_quadratically() {
        let tri = Factor1d::new(vec![
            Piece {
                center: -0.5,
                half_width: 0.5,
                coeffs: vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
            },
            Piece {
                center: 0.5,
                half_width: 0.5,
                coeffs: vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)],
            },
        ]);
        let (d, c) = tri.decay();
        assert_eq!(d, 2.0);
        assert!((c - 9.0).abs() < 1e-6, "{c}");
        for t in [0.3f64, 2.0, 9.0, 100.0] {
            let exact = ((t / 2.0).sin() / (t / 2.0)).powi(2);
            assert!((tri.eval(t).re - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_closed_form() {
        // d/dt (sin t / t) = cos t / t − sin t / t².
        let f = Factor1d::new(vec![constant_piece(0.0, 1.0, 0.5)]).derivative(1);
        for t in [0.5f64, 3.0, 30.0, 300.0] {
            let exact = t.cos() / t - t.sin() / (t * t);
            assert!((f.eval(t).re - exact).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn dilation_rescales_argument() {
        let f = Factor1d::new(vec![constant_piece(0.3, 0.2, 1.0)]);
        let g = f.dilate(2.5);
        for t in [0.0, 1.0, 17.0] {
            assert!((g.eval(t) - f.eval(2.5 * t)).norm() < 1e-14);
        }
    }
}
