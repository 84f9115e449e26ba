//! One-dimensional rules and nested integration over convex bodies.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::body::ConvexBody;

/// Nodes and weights of a rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Gauss–Legendre rule with `n` nodes, Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// The 16-point Gauss–Legendre rule used for composite panels.
pub fn gl16() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Tanh–sinh rule on `[-1, 1]` with step `h`, truncated where weights
/// underflow. Robust against algebraic endpoint singularities.
pub fn tanh_sinh(h: f64) -> Rule {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut k: i64 = 0;
    loop {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let x = u.tanh();
        let w = h * FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if w < 1e-300 || (1.0 - x) <= 0.0 {
            break;
        }
        if k == 0 {
            nodes.push(0.0);
            weights.push(w);
        } else {
            nodes.push(x);
            weights.push(w);
            nodes.push(-x);
            weights.push(w);
        }
        k += 1;
    }
    Rule { nodes, weights }
}

/// Default tanh–sinh rule for smooth or endpoint-singular integrands.
pub fn tanh_sinh_default() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| tanh_sinh(1.0 / 32.0))
}

/// `∫_{-w}^{w} g(η) e^{itη} dη` after the substitution `η = w sin θ`, on
/// composite 16-point panels sized to the oscillation `|t|w`.
pub fn oscillatory_sin_sub(half_width: f64, t: f64, g: impl Fn(f64) -> Complex64) -> Complex64 {
    let phase = (t * half_width).abs();
    let panels = ((PI * phase) / 6.0).ceil() as usize + 2;
    let rule = gl16();
    let width = PI / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = -FRAC_PI_2 + p as f64 * width;
        let mid = lo + 0.5 * width;
        let mut part = Complex64::new(0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let theta = mid + 0.5 * width * x;
            let (s, c) = theta.sin_cos();
            let eta = half_width * s;
            let jac = half_width * c;
            part += g(eta) * Complex64::from_polar(1.0, t * eta) * (w * jac);
        }
        acc += part * (0.5 * width);
    }
    acc
}

/// Integrates `f` over `V` by nested sections: coordinate `j` ranges over
/// the chord `[-w_j, w_j]` allowed by the preceding coordinates. Each
/// chord is split at the origin and integrated with tanh–sinh.
pub fn integrate_over_body(body: &ConvexBody, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    integrate_over_body_with(body, tanh_sinh_default(), f)
}

/// [`integrate_over_body`] with an explicit rule on `[-1, 1]`.
pub fn integrate_over_body_with(body: &ConvexBody, rule: &Rule, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut x = vec![0.0; body.dim()];
    nested(body, rule, &mut x, 0, f)
}

fn nested(
    body: &ConvexBody,
    rule: &Rule,
    x: &mut Vec<f64>,
    level: usize,
    f: &dyn Fn(&[f64]) -> f64,
) -> f64 {
    let Some(w) = body.section_half_width(&x[..level]) else {
        return 0.0;
    };
    if w <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    // Two halves [-w, 0] and [0, w], each mapped from [-1, 1].
    for sign in [-1.0, 1.0] {
        let mut half = 0.0;
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            x[level] = sign * 0.5 * w * (1.0 + t);
            let v = if level + 1 == body.dim() {
                f(x)
            } else {
                nested(body, rule, x, level + 1, f)
            };
            half += wt * v;
        }
        acc += half * 0.5 * w;
    }
    acc
}

/// Oscillatory version of [`integrate_over_body`]:
/// `∫_V g(x) e^{iu·x} dx` with sine-substituted composite panels on every
/// chord.
pub fn fourier_over_body(
    body: &ConvexBody,
    u: &[f64],
    g: &dyn Fn(&[f64]) -> Complex64,
) -> Complex64 {
    let mut x = vec![0.0; body.dim()];
    fourier_nested(body, u, &mut x, 0, g)
}

fn fourier_nested(
    body: &ConvexBody,
    u: &[f64],
    x: &mut Vec<f64>,
    level: usize,
    g: &dyn Fn(&[f64]) -> Complex64,
) -> Complex64 {
    let Some(w) = body.section_half_width(&x[..level]) else {
        return Complex64::new(0.0, 0.0);
    };
    if w <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let dim = body.dim();
    let phase = (u[level] * w).abs();
    let panels = ((PI * phase) / 6.0).ceil() as usize + 2;
    let rule = gl16();
    let width = PI / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = -FRAC_PI_2 + (p as f64 + 0.5) * width;
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            let theta = mid + 0.5 * width * t;
            let (s, c) = theta.sin_cos();
            x[level] = w * s;
            let jac = w * c * wt * 0.5 * width;
            let inner = if level + 1 == dim {
                g(x)
            } else {
                fourier_nested(body, u, x, level + 1, g)
            };
            acc += inner * Complex64::from_polar(jac, u[level] * x[level]);
        }
    }
    acc
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if v.len() <= BLOCK {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 40] {
            let r = gauss_legendre(n);
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            let approx = r.integrate(|x| x.powi(deg as i32));
            assert!((approx - exact).abs() < 1e-13, "n={n}");
            let even = 2 * (n - 1);
            let approx = r.integrate(|x| x.powi(even as i32));
            assert!((approx - 2.0 / (even as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let r = tanh_sinh_default();
        let v = r.integrate(|x| (1.0 - x * x).sqrt());
        assert!((v - PI / 2.0).abs() < 1e-14);
        // 1 - x loses digits next to the endpoint, capping the accuracy.
        let v = r.integrate(|x| (1.0 - x).powf(-0.5));
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn oscillatory_rule_matches_sinc() {
        for t in [0.0, 0.3, 7.0, 123.4, 4000.0] {
            let v = oscillatory_sin_sub(1.0, t, |_| Complex64::new(1.0, 0.0));
            let exact = if t == 0.0 { 2.0 } else { 2.0 * t.sin() / t };
            assert!((v.re - exact).abs() < 1e-13, "t={t}: {} vs {exact}", v.re);
            assert!(v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn body_integration_recovers_volumes() {
        for (body, vol) in [
            (ConvexBody::ball(2, 1.0).unwrap(), PI),
            (ConvexBody::ball(3, 1.0).unwrap(), 4.0 * PI / 3.0),
            (ConvexBody::parallelepiped(vec![1.0, 2.0]).unwrap(), 8.0),
        ] {
            let v = integrate_over_body(&body, &|_| 1.0);
            assert!((v - vol).abs() < 1e-12 * vol, "{body}: {v}");
        }
        // ∫_{B_1} |x|² = 2π/4 in 2D.
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let v = integrate_over_body(&b, &|x| x[0] * x[0] + x[1] * x[1]);
        assert!((v - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_over_disc_matches_bessel_identity() {
        // ∫_{B_1} e^{iu·x} dx at u = 0 is π; it is real and even in u.
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let one = |_: &[f64]| Complex64::new(1.0, 0.0);
        let v0 = fourier_over_body(&b, &[0.0, 0.0], &one);
        assert!((v0.re - PI).abs() < 1e-10);
        let v = fourier_over_body(&b, &[3.0, 4.0], &one);
        let w = fourier_over_body(&b, &[5.0, 0.0], &one);
        assert!((v - w).norm() < 1e-9);
        assert!(v.im.abs() < 1e-12);
    }
}
