//! Levitan polynomials `S_a(f, x) = Σ_k f(x + 2kπa) h²(x/(2a) + kπ)`:
//! periodizations of band-limited functions into trigonometric polynomials
//! of period `2πa` with spectrum in `(a + c)V`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bandlimited::{norm_lp_truncated, BandLimitedFunction, Factor1d, TruncationConfig};
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;
use crate::grid::{fast_size, Grid};
use crate::trigpoly::{norm_lp_default, DifferentialOperator, TrigPolynomial};

/// Cutoff `K` for `|k_j| ≤ K` and the certified bound on the discarded
/// terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub k: usize,
    pub bound: f64,
}

/// `K` for one axis such that the terms with `|k_j| > K` contribute at most
/// `target`, for `|x_j| ≤ aπ`.
///
/// With `z = x_j + 2πak`, `h²(x_j/(2a) + kπ) ≤ 4a²/z²` and
/// `|z| ≥ 2πa(|k| − ½)`. A decay bound `|f| ≤ C|z|^{-d}` gives
/// `8a²C(2πa)^{-d-2}(K − ½)^{-d-1}/(d + 1)`; the sup bound alone gives
/// `8a²‖f‖_∞(2πa)^{-2}/(K − ½)`. The smaller `K` wins.
fn axis_truncation(
    a: f64,
    decay_order: f64,
    decay_constant: f64,
    sup: f64,
    target: f64,
) -> Truncation {
    let two_pi_a = 2.0 * PI * a;
    let with_sup = |k: f64| 8.0 * a * a * sup / (two_pi_a * two_pi_a * (k - 0.5));
    let with_decay = |k: f64| {
        let d = decay_order;
        8.0 * a * a * decay_constant * two_pi_a.powf(-d - 2.0) * (k - 0.5).powf(-d - 1.0)
            / (d + 1.0)
    };
    if sup == 0.0 {
        return Truncation { k: 0, bound: 0.0 };
    }
    let k_sup = 0.5 + 8.0 * a * a * sup / (two_pi_a * two_pi_a * target);
    let k_decay = if decay_order > 0.0 {
        let d = decay_order;
        0.5 + (8.0 * a * a * decay_constant * two_pi_a.powf(-d - 2.0) / ((d + 1.0) * target))
            .powf(1.0 / (d + 1.0))
    } else {
        f64::INFINITY
    };
    let k = k_sup.min(k_decay).ceil().max(1.0);
    let bound = with_sup(k).min(if decay_order > 0.0 {
        with_decay(k)
    } else {
        f64::INFINITY
    });
    Truncation {
        k: k as usize,
        bound,
    }
}

/// `h²(y + kπ)` for `k = −K..=K`, i.e. `sin²y/(y + kπ)²`.
fn weights(y: f64, k: usize) -> Vec<f64> {
    let s2 = y.sin().powi(2);
    (-(k as i64)..=k as i64)
        .map(|l| {
            let t = y + l as f64 * PI;
            if t == 0.0 {
                1.0
            } else if t.abs() < 1e-8 {
                1.0 - t * t / 3.0
            } else {
                s2 / (t * t)
            }
        })
        .collect()
}

/// `x − 2πa·round(x/(2πa))`, using the period of `S_a`.
fn reduce(x: f64, a: f64) -> f64 {
    let period = 2.0 * PI * a;
    x - period * (x / period).round()
}

enum Plan {
    Constant(Complex64),
    /// `c ∏_j S_a(F_j)` with one cutoff per axis.
    Tensor {
        c: Complex64,
        factors: Vec<(Factor1d, usize)>,
    },
    General {
        k: usize,
    },
}

/// `S_a(f, ·)` with a fixed truncation.
pub struct LevitanOperator {
    f: BandLimitedFunction,
    a: f64,
    plan: Plan,
    bound: f64,
}

impl LevitanOperator {
    /// Chooses cutoffs so that every evaluation is within `eps` of the
    /// untruncated series.
    pub fn new(f: &BandLimitedFunction, a: f64, eps: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid(format!("a must be positive, got {a}")));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {eps}")));
        }
        if !f.sup_bound().is_finite() {
            return Err(Error::Unbounded);
        }
        let m = f.dim();
        let (plan, bound) = if let Some(c) = f.as_constant() {
            (Plan::Constant(c), 0.0)
        } else if let Some((c, factors)) = f.as_tensor() {
            // |∏A − ∏B| ≤ Σ_j e_j ∏_{i≠j}(s_i + e_i) with e_i ≤ 1.
            let sups: Vec<f64> = factors.iter().map(Factor1d::sup_bound).collect();
            let mut total = 0.0;
            let mut planned = Vec::with_capacity(m);
            for (j, fj) in factors.iter().enumerate() {
                let others: f64 = sups
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, s)| s + 1.0)
                    .product();
                let target = (eps / (m as f64 * c.norm().max(1e-300) * others)).min(1.0);
                let (d, k) = fj.decay();
                let t = axis_truncation(a, d, k, sups[j], target);
                total += t.bound * others;
                planned.push((fj.clone(), t.k));
            }
            (
                Plan::Tensor {
                    c,
                    factors: planned,
                },
                c.norm() * total,
            )
        } else {
            let decay = f.decay();
            let t = axis_truncation(
                a,
                decay.order(),
                decay.radial_constant(m),
                f.sup_bound(),
                eps / m as f64,
            );
            (Plan::General { k: t.k }, m as f64 * t.bound)
        };
        Ok(LevitanOperator {
            f: f.clone(),
            a,
            plan,
            bound,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Bound on the discarded terms at any point.
    pub fn truncation_bound(&self) -> f64 {
        self.bound
    }

    /// Largest per-axis cutoff.
    pub fn cutoff(&self) -> usize {
        match &self.plan {
            Plan::Constant(_) => 0,
            Plan::Tensor { factors, .. } => factors.iter().map(|(_, k)| *k).max().unwrap_or(0),
            Plan::General { k } => *k,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let a = self.a;
        match &self.plan {
            Plan::Constant(c) => *c,
            Plan::Tensor { c, factors } => factors.iter().zip(x).fold(*c, |acc, ((f, k), &xj)| {
                let xr = reduce(xj, a);
                let w = weights(xr / (2.0 * a), *k);
                let s: Complex64 = w
                    .iter()
                    .enumerate()
                    .map(|(i, wi)| {
                        let l = i as f64 - *k as f64;
                        f.eval(xr + 2.0 * PI * a * l) * wi
                    })
                    .sum();
                acc * s
            }),
            Plan::General { k } => {
                let m = x.len();
                let xr: Vec<f64> = x.iter().map(|&v| reduce(v, a)).collect();
                let ws: Vec<Vec<f64>> = xr.iter().map(|&v| weights(v / (2.0 * a), *k)).collect();
                let side = 2 * k + 1;
                let total = side.pow(m as u32);
                let mut z = vec![0.0; m];
                let mut acc = Complex64::new(0.0, 0.0);
                for idx in 0..total {
                    let mut rest = idx;
                    let mut w = 1.0;
                    for j in (0..m).rev() {
                        let i = rest % side;
                        rest /= side;
                        w *= ws[j][i];
                        z[j] = xr[j] + 2.0 * PI * a * (i as f64 - *k as f64);
                    }
                    if w != 0.0 {
                        acc += self.f.eval(&z) * w;
                    }
                }
                acc
            }
        }
    }
}

/// `S_a(f, x)` within `eps`.
pub fn levitan_evaluate(f: &BandLimitedFunction, a: f64, x: &[f64], eps: f64) -> Result<Complex64> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    Ok(LevitanOperator::new(f, a, eps)?.eval(x))
}

/// The polynomial `T(y) = S_a(f, ay)` with its provenance.
pub struct LevitanResult {
    pub label: String,
    pub a: f64,
    /// Largest per-axis cutoff `K`.
    pub cutoff: usize,
    /// `T(y) = S_a(f, ay)`, spectrum in `(a + c)V`.
    pub polynomial: TrigPolynomial,
    /// Bound on `|S_a − truncated sum|` at every sample.
    pub truncation_bound: f64,
    /// Largest extracted coefficient outside `(a + c)V`.
    pub out_of_spectrum: f64,
    /// `c = sup Σ|y_j| / ‖y‖_V^*`.
    pub c: f64,
    operator: LevitanOperator,
}

impl LevitanResult {
    /// `S_a(f, x)` by the truncated series.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.operator.eval(x)
    }

    /// `S_a(f, x)` by synthesis from the extracted coefficients.
    pub fn synthesize(&self, x: &[f64]) -> Result<Complex64> {
        let y: Vec<f64> = x.iter().map(|v| v / self.a).collect();
        self.polynomial.evaluate_at(&y)
    }

    /// `D_N S_a(x) = a^{-N} (D_N T)(x/a)`.
    pub fn derivative(&self, op: &DifferentialOperator, x: &[f64]) -> Result<Complex64> {
        let t = self.polynomial.apply_operator(op)?;
        let y: Vec<f64> = x.iter().map(|v| v / self.a).collect();
        Ok(t.evaluate_at(&y)? * self.a.powi(-(op.order() as i32)))
    }
}

/// Extracts `T(y) = S_a(f, ay)` by a DFT of truncated-series samples on a
/// grid over `Q_π` with twice the alias-free resolution. Fails when the
/// coefficients outside `(a + c)V` exceed `eps`.
pub fn levitan_coefficients(f: &BandLimitedFunction, a: f64, eps: f64) -> Result<LevitanResult> {
    let op = LevitanOperator::new(f, a, eps)?;
    let body = f.body();
    let m = f.dim();
    let c = body.ell1_over_dual_constant();
    let degree = body
        .semi_axes()
        .iter()
        .map(|s| ((a + c) * s * (1.0 + 1e-12)).floor() as usize)
        .max()
        .unwrap_or(0);
    let side = fast_size(4 * degree + 3);
    let grid = Grid::new(m, side);
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mut y = [0.0; 4];
            grid.point(idx, &mut y[..m]);
            let x: Vec<f64> = y[..m].iter().map(|v| a * v).collect();
            op.eval(&x)
        })
        .collect();
    let coeffs = grid.analyze(&values);
    let mut kept = Vec::new();
    let mut outside: f64 = 0.0;
    let mut k = vec![0i64; m];
    for (idx, v) in coeffs.iter().enumerate() {
        grid.frequency(idx, &mut k);
        if body.contains_lattice(&k, a + c) {
            if *v != Complex64::new(0.0, 0.0) {
                kept.push((k.clone(), *v));
            }
        } else {
            outside = outside.max(v.norm());
        }
    }
    if outside > eps {
        return Err(Error::Truncation {
            energy: outside,
            tolerance: eps,
        });
    }
    let polynomial =
        TrigPolynomial::from_coefficients(m, kept)?.with_budget(body.clone(), a + c)?;
    Ok(LevitanResult {
        label: f.label().to_string(),
        a,
        cutoff: op.cutoff(),
        polynomial,
        truncation_bound: op.truncation_bound(),
        out_of_spectrum: outside,
        c,
        operator: op,
    })
}

/// Coefficients `ρ_g(n/a)/a` of `T` from the spectral side, for tensor
/// inputs: `g_a = f·h²(·/(2a))` has density `ρ_f * ρ_w`, with `ρ_w` the
/// triangle `a(1 − a|ξ|)` on `[−1/a, 1/a]` along each axis.
pub fn levitan_coefficients_spectral(f: &BandLimitedFunction, a: f64) -> Result<TrigPolynomial> {
    let (c, factors) = f
        .as_tensor()
        .ok_or_else(|| invalid("spectral Levitan coefficients need a tensor product"))?;
    let body = f.body();
    let cc = body.ell1_over_dual_constant();
    let per_axis: Vec<Vec<(i64, Complex64)>> = factors
        .iter()
        .zip(body.semi_axes())
        .map(|(fj, s)| {
            let n = ((a + cc) * s).ceil() as i64 + 1;
            (-n..=n)
                .map(|k| (k, convolved_density(fj, a, k as f64 / a) / a))
                .collect()
        })
        .collect();
    let m = f.dim();
    let mut coeffs = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let mut k = Vec::with_capacity(m);
        let mut v = c;
        for j in 0..m {
            let (kj, cj) = per_axis[j][idx[j]];
            k.push(kj);
            v *= cj;
        }
        if v != Complex64::new(0.0, 0.0) {
            coeffs.push((k, v));
        }
        let mut j = m;
        loop {
            if j == 0 {
                return TrigPolynomial::from_coefficients(m, coeffs);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < per_axis[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// `(ρ_F * ρ_w)(ξ)` by Gauss–Legendre between breakpoints.
fn convolved_density(f: &Factor1d, a: f64, xi: f64) -> Complex64 {
    let w = 1.0 / a;
    let tri = |eta: f64| {
        let t = (xi - eta).abs();
        if t >= w {
            0.0
        } else {
            a * (1.0 - a * t)
        }
    };
    let mut pts: Vec<f64> = f
        .pieces()
        .iter()
        .flat_map(|p| [p.center - p.half_width, p.center + p.half_width])
        .chain([xi - w, xi, xi + w])
        .collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let rule = crate::quadrature::gl16();
    let mut acc = Complex64::new(0.0, 0.0);
    for seg in pts.windows(2) {
        let (mid, half) = (0.5 * (seg[0] + seg[1]), 0.5 * (seg[1] - seg[0]));
        if half <= 0.0 {
            continue;
        }
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let eta = mid + half * x;
            acc += f.density(eta) * (wt * half * tri(eta));
        }
    }
    acc
}

/// `‖S_a‖_{L_p(Q_{aπ})} ≤ ‖f‖_{L_p(ℝ^m)}` with both sides and their
/// error allowances.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub a: f64,
    pub p: Exponent,
    /// `‖S_a‖_{L_p(Q_{aπ})}`.
    pub lhs: f64,
    /// `‖f‖_{L_p(ℝ^m)}`, truncated part; `∞` when `f ∉ L_p` by its decay.
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    /// Combined quadrature and truncation allowance; the inequality is
    /// confirmed when `slack ≥ −certificate`.
    pub certificate: f64,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.slack >= -self.certificate
    }
}

/// Both sides of the contraction inequality. The left side uses
/// `‖S_a‖^p_{Q_{aπ}} = a^m ‖T‖^p_{Q_π}`.
pub fn check_norm_contraction(
    f: &BandLimitedFunction,
    a: f64,
    p: Exponent,
    eps: f64,
    config: &TruncationConfig,
) -> Result<ContractionReport> {
    let m = f.dim() as f64;
    if f.is_zero() {
        return Ok(ContractionReport {
            a,
            p,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            certificate: 0.0,
        });
    }
    let rhs = match norm_lp_truncated(f, p, config) {
        Ok(est) => Some(est),
        Err(Error::NotIntegrable { .. }) => None,
        Err(e) => return Err(e),
    };
    let result = levitan_coefficients(f, a, eps)?;
    let t = norm_lp_default(&result.polynomial, p)?;
    let volume = (2.0 * PI * a).powf(m);
    let (lhs, lhs_err) = if p.is_infinite() {
        (t.value, t.value * t.rel_error + result.truncation_bound)
    } else {
        let pv = p.get();
        let scale = a.powf(m / pv);
        let lhs = scale * t.value;
        // Perturbing S_a by at most δ pointwise moves the L_p norm by
        // δ|Q|^{1/p} for p ≥ 1, and the p-th power by δ^p|Q| below.
        let trunc = if pv >= 1.0 {
            result.truncation_bound * volume.powf(1.0 / pv)
        } else {
            (lhs.powf(pv) + result.truncation_bound.powf(pv) * volume).powf(1.0 / pv) - lhs
        };
        (lhs, lhs * t.rel_error + trunc)
    };
    Ok(match rhs {
        None => ContractionReport {
            a,
            p,
            lhs,
            rhs: f64::INFINITY,
            slack: f64::INFINITY,
            certificate: lhs_err,
        },
        Some(est) => ContractionReport {
            a,
            p,
            lhs,
            rhs: est.value,
            slack: est.value - lhs,
            certificate: lhs_err + est.value * est.rel_quadrature_error,
        },
    })
}

/// `|f(x) − S_a(f, x)|` against `(1/6)(|x|/a)²‖f‖_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseRow {
    pub a: f64,
    pub x: Vec<f64>,
    pub observed: f64,
    pub bound: f64,
    /// `bound − observed + truncation bound`.
    pub slack: f64,
}

/// Pointwise approximation check at the sample points.
pub fn check_pointwise_bound(
    f: &BandLimitedFunction,
    a: f64,
    xs: &[Vec<f64>],
    eps: f64,
) -> Result<Vec<PointwiseRow>> {
    let op = LevitanOperator::new(f, a, eps)?;
    let sup = f.sup_bound();
    xs.par_iter()
        .map(|x| {
            if x.len() != f.dim() {
                return Err(Error::DimensionMismatch {
                    expected: f.dim(),
                    found: x.len(),
                });
            }
            let observed = (f.eval(x) - op.eval(x)).norm();
            let r2 = x.iter().map(|v| v * v).sum::<f64>();
            let bound = r2 / (6.0 * a * a) * sup;
            Ok(PointwiseRow {
                a,
                x: x.clone(),
                observed,
                bound,
                slack: bound - observed + op.truncation_bound(),
            })
        })
        .collect()
}

/// One sample of `|D_N f(x) − D_N S_a(x)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorErrorRow {
    pub a: f64,
    pub x: Vec<f64>,
    pub observed: f64,
    /// `(diam V)^N ‖f‖_∞`, the scale of the bound.
    pub scale: f64,
}

/// Fitted `(A, B)` in `observed ≈ scale·(A|x|²/a² + B/a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorErrorFit {
    /// `None` for the fit over all scales.
    pub a: Option<f64>,
    pub quadratic: f64,
    pub inverse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorErrorReport {
    pub rows: Vec<OperatorErrorRow>,
    /// One fit per `a`, then the joint fit.
    pub fits: Vec<OperatorErrorFit>,
}

impl OperatorErrorReport {
    pub fn joint(&self) -> &OperatorErrorFit {
        self.fits.last().expect("joint fit present")
    }
}

/// `|D_N f − D_N S_a|` at the sample points for each `a`, with nonnegative
/// least-squares fits of the bound's shape. `D_N S_a` comes from the
/// extracted coefficients; `D_N f` is spectral for analytic
/// representations and by finite differences for opaque evaluators.
pub fn check_operator_error(
    f: &BandLimitedFunction,
    a_values: &[f64],
    op: &DifferentialOperator,
    xs: &[Vec<f64>],
    eps: f64,
) -> Result<OperatorErrorReport> {
    if a_values.iter().any(|&a| a < 1.0) {
        return Err(invalid("the operator error bound needs a ≥ 1"));
    }
    let df = f.apply_operator(op)?;
    let scale = f.body().diameter().powi(op.order() as i32) * f.sup_bound();
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &a in a_values {
        let result = levitan_coefficients(f, a, eps)?;
        let dt = result.polynomial.apply_operator(op)?;
        let factor = a.powi(-(op.order() as i32));
        let start = rows.len();
        for x in xs {
            let y: Vec<f64> = x.iter().map(|v| v / a).collect();
            let observed = (df.eval(x) - dt.evaluate_at(&y)? * factor).norm();
            rows.push(OperatorErrorRow {
                a,
                x: x.clone(),
                observed,
                scale,
            });
        }
        let (qa, ib) = fit_shape(&rows[start..]);
        fits.push(OperatorErrorFit {
            a: Some(a),
            quadratic: qa,
            inverse: ib,
        });
    }
    let (qa, ib) = fit_shape(&rows);
    fits.push(OperatorErrorFit {
        a: None,
        quadratic: qa,
        inverse: ib,
    });
    Ok(OperatorErrorReport { rows, fits })
}

/// Nonnegative least squares for `y ≈ A u + B v`.
fn fit_shape(rows: &[OperatorErrorRow]) -> (f64, f64) {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.scale > 0.0)
        .map(|r| {
            let r2 = r.x.iter().map(|v| v * v).sum::<f64>();
            (r2 / (r.a * r.a), 1.0 / r.a, r.observed / r.scale)
        })
        .collect();
    let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(u, v, y) in &pts {
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suy += u * y;
        svy += v * y;
    }
    let sse = |a: f64, b: f64| {
        pts.iter()
            .map(|&(u, v, y)| (y - a * u - b * v).powi(2))
            .sum::<f64>()
    };
    let det = suu * svv - suv * suv;
    if det.abs() > 1e-14 * suu * svv {
        let a = (suy * svv - svy * suv) / det;
        let b = (svy * suu - suy * suv) / det;
        if a >= 0.0 && b >= 0.0 {
            return (a, b);
        }
    }
    let only_a = if suu > 0.0 { (suy / suu).max(0.0) } else { 0.0 };
    let only_b = if svv > 0.0 { (svy / svv).max(0.0) } else { 0.0 };
    if sse(only_a, 0.0) <= sse(0.0, only_b) {
        (only_a, 0.0)
    } else {
        (0.0, only_b)
    }
}

/// `ε_{q,N}`: `2q/(2q+m)` for `N = 0`, `min{q/m, 2q/(2q+m)}` otherwise.
pub fn schedule_exponent_limit(q: Exponent, order: u32, m: usize) -> f64 {
    let m = m as f64;
    let base = if q.is_infinite() {
        1.0
    } else {
        2.0 * q.get() / (2.0 * q.get() + m)
    };
    if order == 0 {
        base
    } else {
        base.min(q.get() / m)
    }
}

/// `M_a = min{a^δ, aπ}` for `δ ∈ (0, ε_{q,N})`.
pub fn m_a_schedule(a: f64, q: Exponent, order: u32, m: usize, delta: f64) -> Result<f64> {
    if !(a >= 1.0 && a.is_finite()) {
        return Err(invalid(format!("a must be at least 1, got {a}")));
    }
    let limit = schedule_exponent_limit(q, order, m);
    if !(delta > 0.0 && delta < limit) {
        return Err(invalid(format!("δ = {delta} outside (0, {limit})")));
    }
    Ok(a.powf(delta).min(a * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandlimited::{akhiezer_tensor, cs_extremal, sinc_squared, sinc_squared_half};
    use crate::body::ConvexBody;

    #[test]
    fn constant_is_reproduced() {
        let f = BandLimitedFunction::constant(
            ConvexBody::cube(2, 1.0).unwrap(),
            Complex64::new(3.0, 0.0),
        )
        .unwrap();
        let v = levitan_evaluate(&f, 2.0, &[0.3, -1.0], 1e-12).unwrap();
        assert_eq!(v, Complex64::new(3.0, 0.0));
    }

    #[test]
    fn triangle_kernel_at_origin() {
        let f = sinc_squared_half(1).unwrap();
        let v = levitan_evaluate(&f, 1.0, &[0.0], 1e-12).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_bound_is_honest() {
        // Compare against a far longer sum.
        let f = sinc_squared_half(1).unwrap();
        for eps in [1e-4, 1e-8] {
            let short = LevitanOperator::new(&f, 2.0, eps).unwrap();
            let long = LevitanOperator::new(&f, 2.0, 1e-14).unwrap();
            assert!(long.cutoff() > short.cutoff());
            for x in [0.3, 2.0, -5.9] {
                let diff = (short.eval(&[x]) - long.eval(&[x])).norm();
                assert!(diff <= eps + 1e-14, "eps={eps} x={x} diff={diff}");
            }
        }
    }

    #[test]
    fn dft_and_spectral_coefficients_agree() {
        let f = sinc_squared_half(1).unwrap();
        for a in [1.0, 3.0] {
            let r = levitan_coefficients(&f, a, 1e-12).unwrap();
            let s = levitan_coefficients_spectral(&f, a).unwrap();
            for (k, c) in s.iter() {
                assert!(
                    (r.polynomial.coefficient(k) - c).norm() < 1e-11,
                    "a={a} k={k:?}"
                );
            }
            assert!(r.out_of_spectrum <= 1e-12);
            // Two code paths for S_a at fresh points.
            for x in [0.17, 1.3, -2.9] {
                let d = (r.evaluate(&[x]) - r.synthesize(&[x]).unwrap()).norm();
                assert!(d < 1e-11);
            }
        }
    }

    #[test]
    fn real_input_gives_real_polynomial() {
        let f = sinc_squared(2).unwrap();
        let r = levitan_coefficients(&f, 2.0, 1e-10).unwrap();
        for (k, c) in r.polynomial.iter() {
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            assert!((r.polynomial.coefficient(&neg) - c.conj()).norm() < 1e-10);
        }
        let c = ConvexBody::cube(2, 2.0).unwrap().ell1_over_dual_constant();
        let budget = ConvexBody::cube(2, 2.0)
            .unwrap()
            .lattice_points(2.0 + c)
            .unwrap();
        assert!(r.polynomial.iter().all(|(k, _)| budget.contains(k)));
    }

    #[test]
    fn contraction_on_small_matrix() {
        let cfg = TruncationConfig::default();
        let f = sinc_squared(1).unwrap();
        for p in [
            Exponent::new(0.5).unwrap(),
            Exponent::ONE,
            Exponent::TWO,
            Exponent::INFINITY,
        ] {
            let r = check_norm_contraction(&f, 2.0, p, 1e-10, &cfg).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        let g = akhiezer_tensor(&[1.0], 2.0, 0.5).unwrap();
        let r = check_norm_contraction(&g, 2.0, Exponent::TWO, 1e-10, &cfg).unwrap();
        assert!(r.holds(), "{r:?}");
        let id = DifferentialOperator::identity(1).unwrap();
        let cs = cs_extremal(&ConvexBody::cube(1, 1.0).unwrap(), &id).unwrap();
        let r = check_norm_contraction(&cs, 4.0, Exponent::ONE, 1e-10, &cfg).unwrap();
        assert_eq!(r.slack, f64::INFINITY);
    }

    #[test]
    fn pointwise_bound() {
        let f = sinc_squared_half(1).unwrap();
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![-2.0 + 0.2 * i as f64]).collect();
        for row in check_pointwise_bound(&f, 4.0, &xs, 1e-12).unwrap() {
            assert!(row.slack >= 0.0, "{row:?}");
        }
    }

    #[test]
    fn operator_error_decreases() {
        let f = sinc_squared_half(1).unwrap();
        let op = DifferentialOperator::partial(1, 0).unwrap();
        let xs = vec![vec![0.5], vec![1.0], vec![-1.5]];
        let rep = check_operator_error(&f, &[4.0, 8.0, 16.0], &op, &xs, 1e-12).unwrap();
        let at = |a: f64| {
            rep.rows
                .iter()
                .find(|r| r.a == a && r.x[0] == 1.0)
                .unwrap()
                .observed
        };
        assert!(at(16.0) < at(8.0) && at(8.0) < at(4.0));
        assert_eq!(rep.fits.len(), 4);
    }

    #[test]
    fn schedule() {
        let q = Exponent::TWO;
        assert!((schedule_exponent_limit(q, 0, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m_a_schedule(4.0, q, 0, 2, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(m_a_schedule(4.0, q, 0, 2, 2.0 / 3.0).is_err());
        assert_eq!(m_a_schedule(1.0, q, 0, 2, 0.5).unwrap(), 1.0);
    }
}
