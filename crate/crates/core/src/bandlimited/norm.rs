//! `L_p(ℝ^m)` norms of band-limited functions: quadrature on a cube `Q_R`
//! plus an analytic tail bound from the decay descriptor.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{BandLimitedFunction, DecayKind, Factor1d, Repr};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::quadrature::pairwise_sum;

/// Quadrature parameters for [`norm_lp_truncated`].
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationConfig {
    /// Truncation radius; `None` picks `2^14 / W` with `W` the narrowest
    /// spectral width, or a node-limited radius on `m`-dimensional grids.
    pub radius: Option<f64>,
    /// Initial nodes per period `2π/W`.
    pub nodes_per_period: usize,
    /// Relative change between successive refinements that stops doubling.
    pub tolerance: f64,
    /// Node cap for one-dimensional integrals.
    pub max_nodes_1d: usize,
    /// Node cap for `m`-dimensional grids.
    pub max_nodes_grid: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            radius: None,
            nodes_per_period: 8,
            tolerance: 1e-10,
            max_nodes_1d: 1 << 24,
            max_nodes_grid: 1 << 22,
        }
    }
}

impl TruncationConfig {
    pub fn with_radius(radius: f64) -> Self {
        TruncationConfig {
            radius: Some(radius),
            ..Self::default()
        }
    }
}

/// `‖f‖_{L_p(ℝ^m)}` split into the computed part over `Q_R` and a bound
/// for the remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct RealDomainNormEstimate {
    /// The norm over the truncated region.
    pub value: f64,
    pub p: Exponent,
    pub radius: f64,
    /// Upper bound on (true norm) − `value` from the decay descriptor, in
    /// norm units.
    pub tail_bound: f64,
    pub nodes: usize,
    /// Relative change at the last refinement step.
    pub rel_quadrature_error: f64,
}

impl RealDomainNormEstimate {
    /// `value + tail_bound`, inflated by the quadrature error.
    pub fn upper(&self) -> f64 {
        (self.value + self.tail_bound) * (1.0 + self.rel_quadrature_error)
    }

    /// `value` deflated by the quadrature error.
    pub fn lower(&self) -> f64 {
        self.value * (1.0 - self.rel_quadrature_error)
    }

    fn exact(value: f64, p: Exponent) -> Self {
        RealDomainNormEstimate {
            value,
            p,
            radius: f64::INFINITY,
            tail_bound: 0.0,
            nodes: 0,
            rel_quadrature_error: 0.0,
        }
    }
}

/// Default radius in units of the narrowest spectral width.
const RADIUS_WIDTHS: f64 = 16384.0;

/// `‖f‖_{L_p(ℝ^m)}` with a certified tail. Tensor products factor into
/// one-dimensional integrals, balls reduce to a radial integral, and
/// `p = 2` with a known density uses Plancherel. Other functions fall back
/// to an `m`-dimensional trapezoid grid.
pub fn norm_lp_truncated(
    f: &BandLimitedFunction,
    p: Exponent,
    config: &TruncationConfig,
) -> Result<RealDomainNormEstimate> {
    if f.is_zero() {
        return Ok(RealDomainNormEstimate::exact(0.0, p));
    }
    let m = f.dim();
    check_integrable(f, p)?;
    match &f.repr {
        Repr::Constant(c) => Ok(RealDomainNormEstimate::exact(c.norm(), p)),
        Repr::Separable(terms) if terms.len() == 1 => {
            let (c, factors) = &terms[0];
            tensor_norm(c.norm(), factors, p, config)
        }
        Repr::Radial { radius, scale } => radial_norm(f, *radius, scale.norm(), p, config),
        Repr::Spectral(_) if p.get() == 2.0 => Ok(RealDomainNormEstimate::exact(
            f.l2_norm_plancherel().expect("density known"),
            p,
        )),
        _ => grid_norm(f, m, p, config),
    }
}

fn check_integrable(f: &BandLimitedFunction, p: Exponent) -> Result<()> {
    if p.is_infinite() {
        return Ok(());
    }
    let decay = f.decay();
    let m = f.dim();
    let ok = match decay.kind {
        DecayKind::Tensor => decay.orders.iter().all(|d| d * p.get() > 1.0),
        DecayKind::Radial => decay.orders[0] * p.get() > m as f64,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotIntegrable {
            order: decay.order(),
            p: p.get(),
            dim: m,
        })
    }
}

fn default_radius(width: f64, config: &TruncationConfig) -> f64 {
    config.radius.unwrap_or(RADIUS_WIDTHS / width)
}

/// `∫_{-R}^{R} (1+|t|)^{-s} dt`, `s > 1`, with `R = ∞` allowed.
fn algebraic_mass(s: f64, r: f64) -> f64 {
    2.0 * (1.0 - (1.0 + r).powf(1.0 - s)) / (s - 1.0)
}

fn tensor_norm(
    c: f64,
    factors: &[Factor1d],
    p: Exponent,
    config: &TruncationConfig,
) -> Result<RealDomainNormEstimate> {
    let narrowest = factors
        .iter()
        .map(Factor1d::width)
        .fold(f64::INFINITY, f64::min);
    let radius = default_radius(narrowest, config);
    let parts: Vec<Integral1d> = factors
        .iter()
        .map(|f| {
            let h = 2.0 * PI / (f.width() * config.nodes_per_period as f64);
            integrate_1d(&|t| f.eval(t).norm(), radius, h, p, config, false)
        })
        .collect();
    let nodes = parts.iter().map(|i| i.nodes).sum();
    let err = parts.iter().map(|i| i.rel_error).sum::<f64>();
    if p.is_infinite() {
        let value = parts.iter().fold(c, |acc, i| acc * i.value);
        let outer = factors.iter().zip(&parts).fold(c, |acc, (f, i)| {
            let (d, k) = f.decay();
            acc * i.value.max(k * (1.0 + radius).powf(-d))
        });
        return Ok(RealDomainNormEstimate {
            value,
            p,
            radius,
            tail_bound: outer - value,
            nodes,
            rel_quadrature_error: err,
        });
    }
    let pp = p.get();
    // Each factor: truth^p ≤ v^p + t.
    let mut inner = c.powf(pp);
    let mut outer = c.powf(pp);
    for (f, i) in factors.iter().zip(&parts) {
        let (d, k) = f.decay();
        let s = d * pp;
        let tail = k.powf(pp) * 2.0 * (1.0 + radius).powf(1.0 - s) / (s - 1.0);
        inner *= i.value;
        outer *= i.value + tail;
    }
    let value = inner.powf(1.0 / pp);
    Ok(RealDomainNormEstimate {
        value,
        p,
        radius,
        tail_bound: outer.powf(1.0 / pp) - value,
        nodes,
        rel_quadrature_error: err / pp,
    })
}

fn sphere_area(m: usize) -> f64 {
    [2.0, 2.0 * PI, 4.0 * PI, 2.0 * PI * PI][m - 1]
}

fn radial_norm(
    f: &BandLimitedFunction,
    ball_radius: f64,
    scale: f64,
    p: Exponent,
    config: &TruncationConfig,
) -> Result<RealDomainNormEstimate> {
    let m = f.dim();
    let width = 2.0 * ball_radius;
    let radius = default_radius(width, config);
    let h = 2.0 * PI / (width * config.nodes_per_period as f64);
    let profile = |r: f64| scale * super::ball_transform(m, ball_radius, r).abs();
    let decay = f.decay();
    let (d, k) = (decay.orders[0], decay.constant);
    if p.is_infinite() {
        let i = integrate_1d(&profile, radius, h, p, config, true);
        let outside = k * (1.0 + radius).powf(-d);
        return Ok(RealDomainNormEstimate {
            value: i.value,
            p,
            radius,
            tail_bound: (outside - i.value).max(0.0),
            nodes: i.nodes,
            rel_quadrature_error: i.rel_error,
        });
    }
    let pp = p.get();
    let area = sphere_area(m);
    let weight = |r: f64| profile(r).powf(pp) * r.powi(m as i32 - 1);
    let i = integrate_1d(&weight, radius, h, Exponent::ONE, config, true);
    let inner = area * i.value;
    let tail = area * k.powf(pp) * (1.0 + radius).powf(m as f64 - d * pp) / (d * pp - m as f64);
    let value = inner.powf(1.0 / pp);
    Ok(RealDomainNormEstimate {
        value,
        p,
        radius,
        tail_bound: (inner + tail).powf(1.0 / pp) - value,
        nodes: i.nodes,
        rel_quadrature_error: i.rel_error / pp,
    })
}

struct Integral1d {
    /// `∫|g|^p` for finite `p`, `sup|g|` for `p = ∞`.
    value: f64,
    nodes: usize,
    rel_error: f64,
}

/// Trapezoid rule for `∫_{-R}^{R} g^p` (or `∫_0^R` when `half_line`),
/// halving the step until successive values agree. For `p = ∞` returns the
/// grid maximum refined by golden-section search.
fn integrate_1d(
    g: &(dyn Fn(f64) -> f64 + Sync),
    radius: f64,
    h0: f64,
    p: Exponent,
    config: &TruncationConfig,
    half_line: bool,
) -> Integral1d {
    let lo = if half_line { 0.0 } else { -radius };
    let span = radius - lo;
    let mut n = ((span / h0).ceil() as usize).max(16);
    if p.is_infinite() {
        n = n.saturating_mul(4).min(config.max_nodes_1d);
        let h = span / n as f64;
        let values: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|i| g(lo + i as f64 * h))
            .collect();
        let mut best = values.iter().copied().fold(0.0, f64::max);
        // Refine around every node within a factor of the grid maximum.
        let candidates: Vec<usize> = (0..=n)
            .filter(|&i| values[i] >= 0.9 * best)
            .filter(|&i| {
                (i == 0 || values[i] >= values[i - 1]) && (i == n || values[i] >= values[i + 1])
            })
            .take(64)
            .collect();
        for i in candidates {
            let t = lo + i as f64 * h;
            best = best.max(golden_max(g, (t - h).max(lo), (t + h).min(radius)));
        }
        return Integral1d {
            value: best,
            nodes: n + 1,
            rel_error: 0.0,
        };
    }
    let pp = p.get();
    let pow = |t: f64| {
        let v = g(t);
        if pp == 1.0 {
            v
        } else if pp == 2.0 {
            v * v
        } else {
            v.powf(pp)
        }
    };
    let mut h = span / n as f64;
    let ends = 0.5 * (pow(lo) + pow(radius));
    let interior: Vec<f64> = (1..n)
        .into_par_iter()
        .map(|i| pow(lo + i as f64 * h))
        .collect();
    let mut sum = ends + pairwise_sum(&interior);
    let mut value = h * sum;
    let mut rel_error = f64::INFINITY;
    while n * 2 <= config.max_nodes_1d {
        let fresh: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| pow(lo + (i as f64 + 0.5) * h))
            .collect();
        sum += pairwise_sum(&fresh);
        n *= 2;
        h *= 0.5;
        let next = h * sum;
        rel_error = if next > 0.0 {
            (next - value).abs() / next
        } else {
            0.0
        };
        value = next;
        if rel_error <= config.tolerance {
            break;
        }
    }
    Integral1d {
        value,
        nodes: n + 1,
        rel_error,
    }
}

fn golden_max(g: &(dyn Fn(f64) -> f64 + Sync), mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        }
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    f1.max(f2)
}

/// Trapezoid rule over `Q_R` at two resolutions.
fn grid_norm(
    f: &BandLimitedFunction,
    m: usize,
    p: Exponent,
    config: &TruncationConfig,
) -> Result<RealDomainNormEstimate> {
    let width = f
        .body()
        .semi_axes()
        .iter()
        .fold(0.0f64, |a, &s| a.max(2.0 * s));
    let h = 2.0 * PI / (width * config.nodes_per_period as f64);
    let per_axis = ((config.max_nodes_grid as f64).powf(1.0 / m as f64).floor() as usize).max(3);
    let reachable = 0.5 * (per_axis - 1) as f64 * h;
    let radius = config
        .radius
        .unwrap_or_else(|| (RADIUS_WIDTHS / width).min(reachable));
    let n = (((2.0 * radius / h).ceil() as usize) | 1).min(per_axis | 1);
    let total = n
        .checked_pow(m as u32)
        .filter(|&t| t <= 4 * config.max_nodes_grid);
    let Some(total) = total else {
        return Err(Error::BudgetExceeded(format!("{n}^{m} grid nodes")));
    };
    let step = 2.0 * radius / (n - 1) as f64;
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut x = [0.0; 4];
            let mut rest = idx;
            let mut weight = 1.0;
            for j in (0..m).rev() {
                let l = rest % n;
                rest /= n;
                x[j] = -radius + l as f64 * step;
                if l == 0 || l == n - 1 {
                    weight *= 0.5;
                }
            }
            let v = f.eval(&x[..m]).norm();
            if p.is_infinite() {
                v
            } else {
                weight * v.powf(p.get())
            }
        })
        .collect();
    let decay = f.decay();
    if p.is_infinite() {
        let value = values.iter().copied().fold(0.0, f64::max);
        let outside = decay.radial_constant(m) * (1.0 + radius).powf(-decay.order());
        return Ok(RealDomainNormEstimate {
            value,
            p,
            radius,
            tail_bound: (outside - value).max(0.0),
            nodes: total,
            rel_quadrature_error: 0.0,
        });
    }
    let pp = p.get();
    let cell = step.powi(m as i32);
    let fine = cell * pairwise_sum(&values);
    // Every other node along each axis, with step 2h.
    let coarse: f64 = {
        let mut acc = Vec::with_capacity(total >> m);
        for (idx, v) in values.iter().enumerate() {
            let mut rest = idx;
            let mut keep = true;
            for _ in 0..m {
                keep &= (rest % n).is_multiple_of(2);
                rest /= n;
            }
            if keep {
                acc.push(*v);
            }
        }
        (2.0 * step).powi(m as i32) * pairwise_sum(&acc)
    };
    let tail_mass = match decay.kind {
        DecayKind::Tensor => {
            let c = decay.constant.powf(pp);
            let full: f64 = decay
                .orders
                .iter()
                .map(|d| algebraic_mass(d * pp, f64::INFINITY))
                .product();
            let inside: f64 = decay
                .orders
                .iter()
                .map(|d| algebraic_mass(d * pp, radius))
                .product();
            c * (full - inside)
        }
        DecayKind::Radial => {
            let (d, k) = (decay.orders[0], decay.constant);
            sphere_area(m) * k.powf(pp) * (1.0 + radius).powf(m as f64 - d * pp)
                / (d * pp - m as f64)
        }
    };
    let value = fine.powf(1.0 / pp);
    Ok(RealDomainNormEstimate {
        value,
        p,
        radius,
        tail_bound: (fine + tail_mass).powf(1.0 / pp) - value,
        nodes: total,
        rel_quadrature_error: if fine > 0.0 {
            (fine - coarse).abs() / fine / pp
        } else {
            0.0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::super::{cs_extremal, sinc_kernel, sinc_squared_half};
    use super::*;
    use crate::body::ConvexBody;
    use crate::trigpoly::DifferentialOperator;
    use num_complex::Complex64;

    #[test]
    fn sinc_l2_norm_is_sqrt_pi() {
        let h = sinc_kernel(1).unwrap();
        let est =
            norm_lp_truncated(&h, Exponent::TWO, &TruncationConfig::with_radius(1e4)).unwrap();
        assert!((est.value - PI.sqrt()).abs() < 1e-4, "{est:?}");
        assert!(est.value <= PI.sqrt() && PI.sqrt() <= est.upper());
    }

    #[test]
    fn sup_norm_and_zero() {
        let h = sinc_squared_half(2).unwrap();
        let est = norm_lp_truncated(&h, Exponent::INFINITY, &TruncationConfig::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14);
        let zero = BandLimitedFunction::constant(
            ConvexBody::cube(1, 1.0).unwrap(),
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(
            norm_lp_truncated(&zero, Exponent::ONE, &TruncationConfig::default())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn triangle_l1_norm() {
        // ∫ (sin(t/2)/(t/2))² dt = 2π.
        let h = sinc_squared_half(1).unwrap();
        let est = norm_lp_truncated(&h, Exponent::ONE, &TruncationConfig::default()).unwrap();
        assert!(
            est.value <= 2.0 * PI && 2.0 * PI <= est.upper() + 1e-12,
            "{est:?}"
        );
        assert!(est.tail_bound < 3e-3);
    }

    #[test]
    fn ball_l2_matches_plancherel() {
        for m in [2, 3] {
            let ball = ConvexBody::ball(m, 1.0).unwrap();
            let f = cs_extremal(&ball, &DifferentialOperator::identity(m).unwrap()).unwrap();
            let exact = f.l2_norm_plancherel().unwrap();
            let est = norm_lp_truncated(&f, Exponent::TWO, &TruncationConfig::default()).unwrap();
            assert!(
                est.lower() <= exact && exact <= est.upper(),
                "m={m} {est:?} {exact}"
            );
            assert!((est.value - exact).abs() / exact < 1e-4);
        }
    }

    #[test]
    fn non_integrable_tail_is_reported() {
        let h = sinc_kernel(1).unwrap();
        assert!(matches!(
            norm_lp_truncated(&h, Exponent::ONE, &TruncationConfig::default()),
            Err(Error::NotIntegrable { .. })
        ));
    }

    #[test]
    fn grid_path_agrees_with_tensor_path() {
        // A two-term separable function forces the grid path.
        let h = sinc_squared_half(2).unwrap();
        let lap = h
            .apply_operator(&DifferentialOperator::laplacian(2).unwrap())
            .unwrap();
        assert!(lap.as_tensor().is_none());
        let cfg = TruncationConfig {
            radius: Some(60.0),
            ..TruncationConfig::default()
        };
        let grid = norm_lp_truncated(&lap, Exponent::TWO, &cfg).unwrap();
        // Plancherel: (2π)² ∫|ξ|⁴ (1−|ξ₁|)²(1−|ξ₂|)² over Q_1.
        let a0 = 2.0 / 3.0; // ∫(1−|x|)²
        let a2 = 2.0 * (1.0 / 3.0 - 2.0 / 4.0 + 1.0 / 5.0); // ∫x²(1−|x|)²
        let a4 = 2.0 * (1.0 / 5.0 - 2.0 / 6.0 + 1.0 / 7.0);
        let exact = (4.0 * PI * PI * (2.0 * a4 * a0 + 2.0 * a2 * a2)).sqrt();
        assert!(
            grid.value <= exact * (1.0 + 1e-9) && exact <= grid.upper() * (1.0 + 1e-9),
            "{grid:?} {exact}"
        );
        assert!((grid.value - exact).abs() / exact < 1e-3);
    }
}
