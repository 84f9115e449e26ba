//! Entire functions of exponential type `V` on `ℝ^m`: sinc kernels,
//! Akhiezer families, Cauchy–Schwarz extremals and user closures.
//!
//! Every function is `f(x) = ∫_V g(ξ) e^{ix·ξ} dξ` for some density `g`.
//! Tensor and radial densities are evaluated in closed form; the general
//! case uses oscillatory quadrature over the body.

mod factor;
mod norm;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::body::ConvexBody;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{fourier_over_body, integrate_over_body};
use crate::trigpoly::{DifferentialOperator, TrigPolynomial};

pub use factor::{Factor1d, Piece};
pub use norm::{norm_lp_truncated, RealDomainNormEstimate, TruncationConfig};

/// Shape of a decay bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    /// `|f(x)| ≤ C (1 + |x|)^{-d}`.
    Radial,
    /// `|f(x)| ≤ C ∏_j (1 + |x_j|)^{-d_j}`.
    Tensor,
}

/// Polynomial decay descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct Decay {
    pub kind: DecayKind,
    /// One order for [`DecayKind::Radial`], one per axis for
    /// [`DecayKind::Tensor`].
    pub orders: Vec<f64>,
    pub constant: f64,
    /// `false` when the constant was fitted from samples.
    pub certified: bool,
}

impl Decay {
    fn radial(order: f64, constant: f64, certified: bool) -> Self {
        Decay {
            kind: DecayKind::Radial,
            orders: vec![order],
            constant,
            certified,
        }
    }

    /// Smallest order, i.e. the `d` of a bound `C'(1 + |x|)^{-d}`.
    pub fn order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// A constant `C'` valid for `|f(x)| ≤ C'(1 + |x|)^{-d}`, `d = order()`.
    /// For tensor bounds this uses `1 + |x|_∞ ≥ (1 + |x|)/√m`.
    pub fn radial_constant(&self, dim: usize) -> f64 {
        match self.kind {
            DecayKind::Radial => self.constant,
            DecayKind::Tensor => self.constant * (dim as f64).sqrt().powf(self.order()),
        }
    }

    /// The bound at `x`.
    pub fn bound_at(&self, x: &[f64]) -> f64 {
        match self.kind {
            DecayKind::Radial => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                self.constant * (1.0 + r).powf(-self.orders[0])
            }
            DecayKind::Tensor => x
                .iter()
                .zip(&self.orders)
                .fold(self.constant, |acc, (xj, d)| {
                    acc * (1.0 + xj.abs()).powf(-d)
                }),
        }
    }
}

type Density = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
type Closure = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Constant(Complex64),
    /// `Σ_t c_t ∏_j F_{t,j}(x_j)`.
    Separable(Vec<(Complex64, Vec<Factor1d>)>),
    /// `c · ∫_{B_M} e^{ix·ξ} dξ`.
    Radial {
        radius: f64,
        scale: Complex64,
    },
    /// `∫_V g(ξ) e^{ix·ξ} dξ` over the declared body.
    Spectral(Density),
    /// Opaque evaluator; derivatives by finite differences.
    Pointwise {
        f: Closure,
        step: f64,
    },
}

/// A function of exponential type `V` with a sup bound and a decay
/// descriptor checked on sample rays at construction.
#[derive(Clone)]
pub struct BandLimitedFunction {
    body: ConvexBody,
    repr: Repr,
    sup_bound: f64,
    decay: Decay,
    label: String,
}

impl fmt::Debug for BandLimitedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BandLimitedFunction")
            .field("label", &self.label)
            .field("body", &self.body)
            .field("sup_bound", &self.sup_bound)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

/// Tolerance of the sampled decay check.
const DECAY_CHECK_SLACK: f64 = 1.1;
/// Spectral representations are sampled only up to this radius.
const SPECTRAL_SAMPLE_RADIUS: f64 = 100.0;
/// Finite-difference step relative to `1/diam(V)`.
const FD_STEP: f64 = 1e-4;

impl BandLimitedFunction {
    fn build(body: ConvexBody, repr: Repr, label: impl Into<String>) -> Result<Self> {
        let (sup_bound, decay) = summarize(&body, &repr)?;
        let f = BandLimitedFunction {
            body,
            repr,
            sup_bound,
            decay,
            label: label.into(),
        };
        f.check_decay()?;
        Ok(f)
    }

    /// Wraps an arbitrary evaluator. The caller declares the body, the sup
    /// bound and the decay; the decay is spot-checked on rays.
    pub fn from_fn(
        body: ConvexBody,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
        sup_bound: f64,
        decay: Decay,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(sup_bound.is_finite() && sup_bound >= 0.0) {
            return Err(Error::Unbounded);
        }
        let step = FD_STEP / body.diameter().max(1e-300);
        let out = BandLimitedFunction {
            body,
            repr: Repr::Pointwise {
                f: Arc::new(f),
                step,
            },
            sup_bound,
            decay,
            label: label.into(),
        };
        out.check_decay()?;
        Ok(out)
    }

    /// `f(ξ) = ∫_V g(ξ) e^{ix·ξ} dξ` for a bounded density `g` on `V`.
    pub fn from_density(
        body: ConvexBody,
        g: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::build(body, Repr::Spectral(Arc::new(g)), label)
    }

    /// The constant function; it has exponential type of any body.
    pub fn constant(body: ConvexBody, c: Complex64) -> Result<Self> {
        Self::build(body, Repr::Constant(c), format!("const({c})"))
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// Declared spectral body.
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn decay(&self) -> &Decay {
        &self.decay
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.sup_bound == 0.0
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match self.repr {
            Repr::Constant(c) => Some(c),
            _ => None,
        }
    }

    /// `c · ∏ F_j(x_j)` when the function is a single tensor product.
    pub fn as_tensor(&self) -> Option<(Complex64, &[Factor1d])> {
        match &self.repr {
            Repr::Separable(terms) if terms.len() == 1 => Some((terms[0].0, &terms[0].1)),
            _ => None,
        }
    }

    /// Whether the function is known to be real-valued on `ℝ^m`.
    pub fn is_real(&self) -> bool {
        match &self.repr {
            Repr::Constant(c) => c.im == 0.0,
            Repr::Separable(terms) => terms
                .iter()
                .all(|(c, fs)| c.im == 0.0 && fs.iter().all(Factor1d::is_real)),
            Repr::Radial { scale, .. } => scale.im == 0.0,
            Repr::Spectral(_) | Repr::Pointwise { .. } => false,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim());
        match &self.repr {
            Repr::Constant(c) => *c,
            Repr::Separable(terms) => terms
                .iter()
                .map(|(c, fs)| fs.iter().zip(x).fold(*c, |acc, (f, &t)| acc * f.eval(t)))
                .sum(),
            Repr::Radial { radius, scale } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                scale * ball_transform(self.dim(), *radius, r)
            }
            Repr::Spectral(g) => fourier_over_body(&self.body, x, g.as_ref()),
            Repr::Pointwise { f, .. } => f(x),
        }
    }

    /// `f(γ·)`, of type `γV`.
    pub fn dilate(&self, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid(format!("dilation must be positive, got {gamma}")));
        }
        let body = self.body.dilate(gamma)?;
        let m = self.dim() as i32;
        let repr = match &self.repr {
            Repr::Constant(c) => Repr::Constant(*c),
            Repr::Separable(terms) => Repr::Separable(
                terms
                    .iter()
                    .map(|(c, fs)| (*c, fs.iter().map(|f| f.dilate(gamma)).collect()))
                    .collect(),
            ),
            // F_M(γr) = γ^{-m} F_{γM}(r).
            Repr::Radial { radius, scale } => Repr::Radial {
                radius: radius * gamma,
                scale: scale / gamma.powi(m),
            },
            Repr::Spectral(g) => {
                let g = g.clone();
                let dim = self.dim();
                let norm = gamma.powi(m);
                Repr::Spectral(Arc::new(move |eta: &[f64]| {
                    let mut xi = [0.0; 4];
                    for j in 0..dim {
                        xi[j] = eta[j] / gamma;
                    }
                    g(&xi[..dim]) / norm
                }))
            }
            Repr::Pointwise { f, step } => {
                let f = f.clone();
                let dim = self.dim();
                Repr::Pointwise {
                    f: Arc::new(move |x: &[f64]| {
                        let mut y = [0.0; 4];
                        for j in 0..dim {
                            y[j] = gamma * x[j];
                        }
                        f(&y[..dim])
                    }),
                    step: step / gamma,
                }
            }
        };
        let label = format!("{}∘{gamma}", self.label);
        match repr {
            Repr::Pointwise { .. } => {
                let mut decay = self.decay.clone();
                decay.constant *= 1f64.max(1.0 / gamma).powf(decay.order());
                Ok(BandLimitedFunction {
                    body,
                    repr,
                    sup_bound: self.sup_bound,
                    decay,
                    label,
                })
            }
            _ => Self::build(body, repr, label),
        }
    }

    /// `c · f`.
    pub fn scale(&self, c: Complex64) -> Result<Self> {
        let repr = match &self.repr {
            Repr::Constant(v) => Repr::Constant(v * c),
            Repr::Separable(terms) => {
                Repr::Separable(terms.iter().map(|(v, fs)| (v * c, fs.clone())).collect())
            }
            Repr::Radial { radius, scale } => Repr::Radial {
                radius: *radius,
                scale: scale * c,
            },
            Repr::Spectral(g) => {
                let g = g.clone();
                Repr::Spectral(Arc::new(move |xi: &[f64]| g(xi) * c))
            }
            Repr::Pointwise { f, step } => {
                let f = f.clone();
                let mut decay = self.decay.clone();
                decay.constant *= c.norm();
                return Ok(BandLimitedFunction {
                    body: self.body.clone(),
                    repr: Repr::Pointwise {
                        f: Arc::new(move |x: &[f64]| f(x) * c),
                        step: *step,
                    },
                    sup_bound: self.sup_bound * c.norm(),
                    decay,
                    label: format!("{c}·{}", self.label),
                });
            }
        };
        Self::build(self.body.clone(), repr, format!("{c}·{}", self.label))
    }

    /// `D_N f`. Exact on the spectral side (`g(ξ) ↦ Δ_N(iξ) g(ξ)`) except
    /// for opaque evaluators, which use fourth-order central differences.
    pub fn apply_operator(&self, op: &DifferentialOperator) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        if op.is_identity() {
            return Ok(self.clone());
        }
        let label = format!("D[{op}]{}", self.label);
        let repr = match &self.repr {
            Repr::Constant(_) => Repr::Constant(Complex64::new(0.0, 0.0)),
            Repr::Separable(terms) => {
                let mut out = Vec::new();
                for (c, fs) in terms {
                    for (alpha, b) in op.terms() {
                        let factors = fs
                            .iter()
                            .zip(alpha)
                            .map(|(f, &n)| f.derivative(n))
                            .collect();
                        out.push((c * b, factors));
                    }
                }
                Repr::Separable(out)
            }
            Repr::Radial { scale, .. } => {
                let (op, scale) = (op.clone(), *scale);
                Repr::Spectral(Arc::new(move |xi: &[f64]| scale * op.multiplier_f64(xi)))
            }
            Repr::Spectral(g) => {
                let (op, g) = (op.clone(), g.clone());
                Repr::Spectral(Arc::new(move |xi: &[f64]| g(xi) * op.multiplier_f64(xi)))
            }
            Repr::Pointwise { f, step } => {
                return self.finite_difference(op, f.clone(), *step, label);
            }
        };
        Self::build(self.body.clone(), normalize(self.dim(), repr), label)
    }

    fn finite_difference(
        &self,
        op: &DifferentialOperator,
        f: Closure,
        step: f64,
        label: String,
    ) -> Result<Self> {
        let terms: Vec<(Vec<u32>, Complex64)> = op.terms().map(|(a, b)| (a.to_vec(), b)).collect();
        let dim = self.dim();
        let g = move |x: &[f64]| -> Complex64 {
            terms
                .iter()
                .map(|(alpha, b)| b * central_difference(&*f, x, alpha, step, dim))
                .sum()
        };
        // Bernstein: ‖D_N f‖_∞ ≤ ‖Δ_N‖ on V times ‖f‖_∞ for the bound;
        // decay is inherited with the same bound-to-sup ratio.
        let factor =
            op.coefficient_norm(1.0) * (self.body.diameter() / 2.0).powi(op.order() as i32);
        let mut decay = self.decay.clone();
        decay.constant *= factor.max(1.0);
        decay.certified = false;
        Ok(BandLimitedFunction {
            body: self.body.clone(),
            repr: Repr::Pointwise {
                f: Arc::new(g),
                step,
            },
            sup_bound: self.sup_bound * factor,
            decay,
            label,
        })
    }

    /// `‖f‖_{L_2(ℝ^m)}` by Plancherel, `(2π)^m ∫_V |g|²`, when the density
    /// is available.
    pub fn l2_norm_plancherel(&self) -> Option<f64> {
        let two_pi_m = (2.0 * PI).powi(self.dim() as i32);
        match &self.repr {
            Repr::Constant(c) => (c.norm() == 0.0).then_some(0.0),
            Repr::Radial { scale, .. } => {
                Some((two_pi_m * scale.norm_sqr() * self.body.volume()).sqrt())
            }
            Repr::Spectral(g) => {
                Some((two_pi_m * integrate_over_body(&self.body, &|x| g(x).norm_sqr())).sqrt())
            }
            Repr::Separable(terms) if terms.len() == 1 => {
                let (c, fs) = &terms[0];
                Some(fs.iter().fold(c.norm(), |acc, f| acc * f.l2_norm()))
            }
            _ => None,
        }
    }

    fn check_decay(&self) -> Result<()> {
        let m = self.dim();
        let width = self.body.diameter().max(1e-300);
        let r_max = match self.repr {
            Repr::Spectral(_) => SPECTRAL_SAMPLE_RADIUS,
            _ => 4096.0 / width,
        };
        let mut dirs: Vec<Vec<f64>> = (0..m)
            .map(|j| (0..m).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        dirs.push(vec![1.0 / (m as f64).sqrt(); m]);
        let odd: Vec<f64> = (0..m)
            .map(|j| ((j + 1) as f64 * 0.7548776662).fract() - 0.5)
            .collect();
        let n = odd.iter().map(|v| v * v).sum::<f64>().sqrt();
        dirs.push(odd.iter().map(|v| v / n).collect());
        let mut radii = vec![0.0];
        let mut r = 0.37 / width;
        while r <= r_max {
            radii.push(r);
            r *= 1.9;
        }
        for d in &dirs {
            for &r in &radii {
                let x: Vec<f64> = d.iter().map(|v| v * r).collect();
                let observed = self.eval(&x).norm();
                let allowed = DECAY_CHECK_SLACK * self.decay.bound_at(&x);
                if !(observed <= allowed + 1e-300) {
                    return Err(Error::DecayViolation {
                        observed,
                        allowed,
                        radius: r,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Single-variable separable sums collapse into one factor.
fn normalize(dim: usize, repr: Repr) -> Repr {
    match repr {
        Repr::Separable(terms) if dim == 1 && terms.len() > 1 => {
            let pieces: Vec<Piece> = terms
                .iter()
                .flat_map(|(c, fs)| {
                    fs[0].pieces().iter().map(move |p| Piece {
                        center: p.center,
                        half_width: p.half_width,
                        coeffs: p.coeffs.iter().map(|a| a * c).collect(),
                    })
                })
                .collect();
            Repr::Separable(vec![(
                Complex64::new(1.0, 0.0),
                vec![Factor1d::new(pieces)],
            )])
        }
        other => other,
    }
}

/// Sup bound and decay descriptor for the analytic representations.
fn summarize(body: &ConvexBody, repr: &Repr) -> Result<(f64, Decay)> {
    let m = body.dim();
    Ok(match repr {
        Repr::Constant(c) => (c.norm(), Decay::radial(0.0, c.norm(), true)),
        Repr::Separable(terms) => {
            let mut orders = vec![f64::INFINITY; m];
            let mut constant = 0.0;
            let mut sup = 0.0;
            for (c, fs) in terms {
                let mut cc = c.norm();
                let mut ss = c.norm();
                for (j, f) in fs.iter().enumerate() {
                    let (d, k) = f.decay();
                    orders[j] = orders[j].min(d);
                    cc *= k;
                    ss *= f.sup_bound();
                }
                constant += cc;
                sup += ss;
            }
            let orders = orders
                .into_iter()
                .map(|d| if d.is_finite() { d } else { 0.0 })
                .collect();
            (
                sup,
                Decay {
                    kind: DecayKind::Tensor,
                    orders,
                    constant,
                    certified: true,
                },
            )
        }
        Repr::Radial { radius, scale } => {
            let order = (m as f64 + 1.0) / 2.0;
            let peak = ball_transform(m, *radius, 0.0);
            // Sampled envelope of (1 + r)^d |F(r)|; the Bessel envelope
            // √z|J_ν(z)| is largest near the first lobes.
            let step = 0.05 / radius;
            let mut best: f64 = peak;
            for i in 1..=40_000 {
                let r = i as f64 * step;
                best = best.max((1.0 + r).powf(order) * ball_transform(m, *radius, r).abs());
            }
            (
                scale.norm() * peak,
                Decay::radial(order, 1.05 * best * scale.norm(), false),
            )
        }
        Repr::Spectral(g) => {
            let sup = integrate_over_body(body, &|x| g(x).norm());
            let mut best: f64 = sup;
            let mut x = vec![0.0; m];
            let diag = 1.0 / (m as f64).sqrt();
            for dir in 0..=m {
                let mut r = 0.5;
                while r <= SPECTRAL_SAMPLE_RADIUS {
                    for (j, xj) in x.iter_mut().enumerate() {
                        *xj = if dir == m {
                            r * diag
                        } else if j == dir {
                            r
                        } else {
                            0.0
                        };
                    }
                    let v = fourier_over_body(body, &x, g.as_ref()).norm();
                    best = best.max((1.0 + r) * v);
                    r *= 1.25;
                }
            }
            (sup, Decay::radial(1.0, 1.05 * best, false))
        }
        Repr::Pointwise { .. } => unreachable!("opaque evaluators carry declared bounds"),
    })
}

/// `∫_{B_M} e^{ix·ξ} dξ` at `|x| = r`.
fn ball_transform(m: usize, radius: f64, r: f64) -> f64 {
    let z = radius * r;
    let mm = radius.powi(m as i32);
    mm * match m {
        1 => 2.0 * sinc(z),
        2 => {
            2.0 * PI
                * if z < 1e-4 {
                    0.5 - z * z / 16.0
                } else {
                    libm::j1(z) / z
                }
        }
        3 => {
            4.0 * PI
                * if z < 0.05 {
                    let z2 = z * z;
                    1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0 - z2 * z2 * z2 / 45360.0
                } else {
                    (z.sin() - z * z.cos()) / (z * z * z)
                }
        }
        4 => {
            4.0 * PI
                * PI
                * if z < 1e-3 {
                    0.125 - z * z / 96.0
                } else {
                    libm::jn(2, z) / (z * z)
                }
        }
        _ => unreachable!("dimension checked at body construction"),
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Fourth-order central difference `∂^α f(x)`, applied axis by axis.
fn central_difference(
    f: &(dyn Fn(&[f64]) -> Complex64 + Send + Sync),
    x: &[f64],
    alpha: &[u32],
    h: f64,
    dim: usize,
) -> Complex64 {
    let Some(j) = alpha.iter().position(|&a| a > 0) else {
        return f(x);
    };
    let mut rest = alpha.to_vec();
    let (stencil, take, denom): (&[f64], u32, f64) = if alpha[j] >= 2 {
        (&[-1.0, 16.0, -30.0, 16.0, -1.0], 2, 12.0 * h * h)
    } else {
        (&[1.0, -8.0, 0.0, 8.0, -1.0], 1, 12.0 * h)
    };
    rest[j] -= take;
    let mut y = x.to_vec();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, w) in stencil.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        y[j] = x[j] + (i as f64 - 2.0) * h;
        acc += central_difference(f, &y[..dim], &rest, h, dim) * *w;
    }
    acc / denom
}

fn half_piece(center: f64, half_width: f64, coeffs: &[f64]) -> Piece {
    Piece {
        center,
        half_width,
        coeffs: coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
    }
}

/// `sin t / t`, density `½` on `[-1, 1]`.
fn sinc_factor() -> Factor1d {
    Factor1d::new(vec![half_piece(0.0, 1.0, &[0.5])])
}

/// `(sin(t/2)/(t/2))²`, triangular density `1 − |ξ|` on `[-1, 1]`.
fn sinc_squared_half_factor() -> Factor1d {
    Factor1d::new(vec![
        half_piece(-0.5, 0.5, &[0.5, 0.5]),
        half_piece(0.5, 0.5, &[0.5, -0.5]),
    ])
}

fn tensor(factors: Vec<Factor1d>) -> Repr {
    Repr::Separable(vec![(Complex64::new(1.0, 0.0), factors)])
}

/// `h(y) = ∏ sin y_j / y_j`, of type `Q_1`.
pub fn sinc_kernel(m: usize) -> Result<BandLimitedFunction> {
    let body = ConvexBody::cube(m, 1.0)?;
    BandLimitedFunction::build(body, tensor(vec![sinc_factor(); m]), "h")
}

/// `h²(·/2)`, of type `Q_1` and integrable.
pub fn sinc_squared_half(m: usize) -> Result<BandLimitedFunction> {
    let body = ConvexBody::cube(m, 1.0)?;
    BandLimitedFunction::build(body, tensor(vec![sinc_squared_half_factor(); m]), "h²(·/2)")
}

/// `h²`, of type `Q_2`.
pub fn sinc_squared(m: usize) -> Result<BandLimitedFunction> {
    let f = sinc_squared_half(m)?.dilate(2.0)?;
    Ok(BandLimitedFunction {
        label: "h²".into(),
        ..f
    })
}

/// A truncated partition-of-unity sum `Σ_{|k|_∞ ≤ K} h²(x/2 + kπ)` with a
/// bound on its distance from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSum {
    pub value: f64,
    pub tail_bound: f64,
}

/// Per-axis tail `Σ_{|l|>K} sin²y/(y + lπ)² ≤ 2 sin²y/(π²(K − |y|/π))`,
/// from `|y + lπ| ≥ (|l| − |y|/π)π`.
fn partition_axis_tail(y: f64, k: usize) -> f64 {
    let s = y.abs() / PI;
    if (k as f64) <= s {
        return 1.0;
    }
    (2.0 * y.sin().powi(2) / (PI * PI * (k as f64 - s))).min(1.0)
}

/// `Σ_{|k|_∞ ≤ K} h²(x/2 + kπ)`, computed as the product of the per-axis
/// sums. The full series equals 1 for every `x`; the reported bound is
/// `1 − ∏(1 − t_j)` with `t_j` the per-axis tails.
pub fn sinc_partition_sum(x: &[f64], k: usize) -> PartitionSum {
    let mut value = 1.0;
    let mut inside = 1.0;
    for &xj in x {
        let y = xj / 2.0;
        let s2 = y.sin().powi(2);
        let terms: Vec<f64> = (-(k as i64)..=k as i64)
            .map(|l| {
                let t = y + l as f64 * PI;
                if t.abs() < 1e-8 {
                    1.0 - t * t / 3.0
                } else {
                    s2 / (t * t)
                }
            })
            .collect();
        value *= crate::quadrature::pairwise_sum(&terms);
        inside *= 1.0 - partition_axis_tail(y, k);
    }
    PartitionSum {
        value,
        tail_bound: 1.0 - inside,
    }
}

/// Smallest `K` whose partition-sum bound is at most `bound` for every
/// `x ∈ Q_X` in dimension `m`.
pub fn partition_cutoff(m: usize, half_side: f64, bound: f64) -> usize {
    let per_axis = 1.0 - (1.0 - bound).powf(1.0 / m as f64);
    let s = half_side / (2.0 * PI);
    (s + 2.0 / (PI * PI * per_axis)).ceil() as usize
}

/// An Akhiezer function together with its derivative of order `s`.
#[derive(Debug, Clone)]
pub struct AkhiezerPair {
    pub function: BandLimitedFunction,
    pub derivative: BandLimitedFunction,
    /// `d = ⌊1/q⌋ + 1`, the boundary flatness of the density.
    pub flatness: u32,
}

fn akhiezer_flatness(q: f64) -> Result<u32> {
    if q.is_nan() || q <= 0.0 {
        return Err(invalid(format!("q must lie in (0, inf], got {q}")));
    }
    Ok(if q.is_infinite() {
        1
    } else {
        (1.0 / q).floor() as u32 + 1
    })
}

/// `f_h(t) = ∫₀¹ e^{it(M − hτ)} φ(τ) dτ`, `φ = (τ(1−τ))^{d+1}`, as a factor.
fn akhiezer_factor(big_m: f64, d: u32, h: f64) -> Factor1d {
    // ξ = M − hτ = c + ws with c = M − h/2, w = h/2, so τ(1−τ) = (1−s²)/4
    // and the density in ξ is φ/h.
    let n = d as usize + 1;
    let mut coeffs = vec![0.0; 2 * n + 1];
    let mut binom = 1.0;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[2 * k] = sign * binom / (4f64.powi(n as i32) * h);
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    Factor1d::new(vec![half_piece(big_m - h / 2.0, h / 2.0, &coeffs)])
}

/// The univariate Akhiezer function of type `[−M, M]` with spectrum in
/// `[M − h, M]`, and its `s`-th derivative.
pub fn akhiezer_family(big_m: f64, q: f64, h: f64, s: u32) -> Result<AkhiezerPair> {
    if !(big_m.is_finite() && big_m > 0.0) {
        return Err(invalid(format!("M must be positive, got {big_m}")));
    }
    if !(h > 0.0 && h < big_m) {
        return Err(invalid(format!(
            "h must lie in (0, M) = (0, {big_m}), got {h}"
        )));
    }
    if s == 0 {
        return Err(invalid("derivative order s must be positive"));
    }
    let d = akhiezer_flatness(q)?;
    let body = ConvexBody::cube(1, big_m)?;
    let factor = akhiezer_factor(big_m, d, h);
    let label = format!("akhiezer(M={big_m},q={q},h={h})");
    let function = BandLimitedFunction::build(body.clone(), tensor(vec![factor.clone()]), &label)?;
    let derivative = BandLimitedFunction::build(
        body,
        tensor(vec![factor.derivative(s)]),
        format!("{label}^({s})"),
    )?;
    Ok(AkhiezerPair {
        function,
        derivative,
        flatness: d,
    })
}

/// `∏_j f_{h,q,σ_j}(x_j)`, of type `Π_σ`.
pub fn akhiezer_tensor(sigma: &[f64], q: f64, h: f64) -> Result<BandLimitedFunction> {
    let body = ConvexBody::parallelepiped(sigma.to_vec())?;
    if !sigma.iter().all(|&s| h > 0.0 && h < s) {
        return Err(invalid(format!("h must lie in (0, min σ), got {h}")));
    }
    let d = akhiezer_flatness(q)?;
    let factors = sigma.iter().map(|&s| akhiezer_factor(s, d, h)).collect();
    BandLimitedFunction::build(body, tensor(factors), format!("akhiezer⊗(q={q},h={h})"))
}

/// `f(u) = ∫_V conj(Δ_N(ix)) e^{iu·x} dx`, the equality case of
/// Cauchy–Schwarz for `|D_N f(0)| ≤ ‖f‖_2 · (2π)^{-m/2} ‖Δ_N(i·)‖_{L_2(V)}`.
pub fn cs_extremal(body: &ConvexBody, op: &DifferentialOperator) -> Result<BandLimitedFunction> {
    let m = body.dim();
    if op.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: op.dim(),
        });
    }
    if m > 3 {
        return Err(Error::UnsupportedDimension(m));
    }
    let label = format!("cs[{op}]");
    // conj(Δ_N(ix)) = conj(i^N) Σ conj(b_α) x^α.
    let phase = crate::trigpoly::i_pow(op.order()).conj();
    if body.is_box() {
        let sigma = body.semi_axes();
        let terms = op
            .terms()
            .map(|(alpha, b)| {
                let factors = alpha
                    .iter()
                    .zip(sigma)
                    .map(|(&n, &s)| {
                        // x^n on [−s, s] with x = s·t.
                        let mut coeffs = vec![0.0; n as usize + 1];
                        coeffs[n as usize] = s.powi(n as i32);
                        Factor1d::new(vec![half_piece(0.0, s, &coeffs)])
                    })
                    .collect();
                (b.conj() * phase, factors)
            })
            .collect();
        return BandLimitedFunction::build(
            body.clone(),
            normalize(m, Repr::Separable(terms)),
            label,
        );
    }
    if body.is_ball() && op.is_identity() {
        let radius = body.semi_axes()[0];
        return BandLimitedFunction::build(
            body.clone(),
            Repr::Radial {
                radius,
                scale: Complex64::new(1.0, 0.0),
            },
            label,
        );
    }
    let op = op.clone();
    BandLimitedFunction::from_density(body.clone(), move |x| op.multiplier_f64(x).conj(), label)
}

/// `T(x) = ∏ cos(⌊aσ_j⌋ x_j)`, with spectrum budget `aΠ_σ`.
pub fn cos_product(a: f64, sigma: &[f64]) -> Result<TrigPolynomial> {
    let body = ConvexBody::parallelepiped(sigma.to_vec())?;
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    let n: Vec<i64> = sigma.iter().map(|s| (a * s).floor() as i64).collect();
    if n.iter().any(|&k| k < 1) {
        return Err(invalid(format!("⌊aσ_j⌋ must be at least 1, got {n:?}")));
    }
    let m = sigma.len();
    let c = Complex64::new(0.5f64.powi(m as i32), 0.0);
    let coeffs = (0..1usize << m).map(|mask| {
        let k: Vec<i64> = n
            .iter()
            .enumerate()
            .map(|(j, &nj)| if mask >> j & 1 == 1 { -nj } else { nj })
            .collect();
        (k, c)
    });
    TrigPolynomial::from_coefficients(m, coeffs)?.with_budget(body, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta;

    #[test]
    fn sinc_kernel_values() {
        let h = sinc_kernel(2).unwrap();
        assert!((h.eval(&[0.0, 0.0]).re - 1.0).abs() < 1e-15);
        assert!(h.eval(&[PI, PI]).norm() < 1e-15);
        assert!(h.is_real());
        let x = [0.3, -1.7];
        let exact = (0.3f64.sin() / 0.3) * ((-1.7f64).sin() / -1.7);
        assert!((h.eval(&x).re - exact).abs() < 1e-15);
        let h2 = sinc_squared(1).unwrap();
        assert!((h2.eval(&[1.3]).re - (1.3f64.sin() / 1.3).powi(2)).abs() < 1e-15);
        assert_eq!(h2.body().semi_axes(), &[2.0]);
    }

    #[test]
    fn akhiezer_at_origin_is_beta() {
        for q in [0.5, 1.0, 2.0, f64::INFINITY] {
            let pair = akhiezer_family(1.0, q, 0.1, 1).unwrap();
            let d = pair.flatness as f64;
            let expect = beta(d + 2.0, d + 2.0);
            assert!((pair.function.eval(&[0.0]).re - expect).abs() < 1e-15 * 1e3);
            assert_eq!(pair.function.decay().order(), d + 2.0);
        }
        assert!(akhiezer_family(1.0, 2.0, 1.0, 1).is_err());
        assert!(akhiezer_family(1.0, 2.0, 0.0, 1).is_err());
    }

    #[test]
    fn akhiezer_matches_direct_quadrature() {
        // f_h(t) = ∫₀¹ e^{it(M − hτ)} (τ(1−τ))^{d+1} dτ with d = 1 at q = 2.
        let pair = akhiezer_family(1.0, 2.0, 0.1, 1).unwrap();
        let rule = crate::quadrature::gauss_legendre(64);
        for t in [0.0, 3.0, 45.0, 700.0] {
            let direct: Complex64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| {
                    let tau = 0.5 * (x + 1.0);
                    Complex64::from_polar(
                        0.5 * w * (tau * (1.0 - tau)).powi(2),
                        t * (1.0 - 0.1 * tau),
                    )
                })
                .sum();
            let diff = (pair.function.eval(&[t]) - direct).norm();
            assert!(diff < 1e-15 * 10.0, "t={t} {diff:e} {direct}");
        }
    }

    #[test]
    fn cs_extremal_shapes() {
        let id1 = DifferentialOperator::identity(1).unwrap();
        let f = cs_extremal(&ConvexBody::cube(1, 1.0).unwrap(), &id1).unwrap();
        for u in [0.0f64, 0.4, 9.0] {
            let exact = if u == 0.0 { 2.0 } else { 2.0 * u.sin() / u };
            assert!((f.eval(&[u]).re - exact).abs() < 1e-14);
        }
        // General body path. A real symbol Δ_N(ix) gives a Hermitian f; an
        // odd order with real b_α gives an imaginary density and
        // f(−u) = −conj f(u).
        let disc = ConvexBody::ball(2, 1.0).unwrap();
        let lap = cs_extremal(&disc, &DifferentialOperator::laplacian(2).unwrap()).unwrap();
        let (a, b) = (lap.eval(&[0.7, -0.2]), lap.eval(&[-0.7, 0.2]));
        assert!((a - b.conj()).norm() < 1e-12);
        let dx = cs_extremal(&disc, &DifferentialOperator::partial(2, 0).unwrap()).unwrap();
        let (a, b) = (dx.eval(&[0.7, -0.2]), dx.eval(&[-0.7, 0.2]));
        assert!((a + b.conj()).norm() < 1e-12);
        // The radial closed form against body quadrature.
        let id2 = DifferentialOperator::identity(2).unwrap();
        let ball = ConvexBody::ball(2, 1.3).unwrap();
        let r = cs_extremal(&ball, &id2).unwrap();
        let q =
            BandLimitedFunction::from_density(ball, |_| Complex64::new(1.0, 0.0), "ind").unwrap();
        for x in [[0.0, 0.0], [0.5, 1.0], [7.0, -3.0]] {
            assert!((r.eval(&x) - q.eval(&x)).norm() < 1e-10);
        }
    }

    #[test]
    fn operators_act_spectrally() {
        // d/dx of 2 sin u / u.
        let id = DifferentialOperator::identity(1).unwrap();
        let f = cs_extremal(&ConvexBody::cube(1, 1.0).unwrap(), &id).unwrap();
        let df = f
            .apply_operator(&DifferentialOperator::partial(1, 0).unwrap())
            .unwrap();
        let u = 1.3f64;
        let exact = 2.0 * (u.cos() / u - u.sin() / (u * u));
        assert!((df.eval(&[u]).re - exact).abs() < 1e-14);
        // Opaque evaluator of the same function via finite differences.
        let g = BandLimitedFunction::from_fn(
            f.body().clone(),
            |x| Complex64::new(2.0 * sinc(x[0]), 0.0),
            2.0,
            f.decay().clone(),
            "fd",
        )
        .unwrap();
        let dg = g
            .apply_operator(&DifferentialOperator::partial(1, 0).unwrap())
            .unwrap();
        assert!((dg.eval(&[u]).re - exact).abs() < 1e-9);
        // Laplacian of a 2-D tensor.
        let h = sinc_kernel(2).unwrap();
        let lap = h
            .apply_operator(&DifferentialOperator::laplacian(2).unwrap())
            .unwrap();
        let fd = BandLimitedFunction::from_fn(
            h.body().clone(),
            |x| Complex64::new(sinc(x[0]) * sinc(x[1]), 0.0),
            1.0,
            h.decay().clone(),
            "fd",
        )
        .unwrap()
        .apply_operator(&DifferentialOperator::laplacian(2).unwrap())
        .unwrap();
        let x = [0.8, -2.1];
        // Second differences at h ≈ 3.5e-5 carry roundoff near eps/h² ≈ 2e-7.
        assert!((lap.eval(&x) - fd.eval(&x)).norm() < 1e-6);
    }

    #[test]
    fn dilation_and_scaling() {
        let ball = ConvexBody::ball(3, 1.0).unwrap();
        let f = cs_extremal(&ball, &DifferentialOperator::identity(3).unwrap()).unwrap();
        let g = f.dilate(2.0).unwrap();
        assert_eq!(g.body().semi_axes(), &[2.0, 2.0, 2.0]);
        let x = [0.3, 0.1, -0.4];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((g.eval(&x) - f.eval(&x2)).norm() < 1e-13);
        let s = f.scale(Complex64::new(0.0, 2.0)).unwrap();
        assert!((s.eval(&x) - f.eval(&x) * Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn decay_check_rejects_false_claims() {
        let body = ConvexBody::cube(1, 1.0).unwrap();
        let bad = Decay::radial(3.0, 1.0, false);
        let err =
            BandLimitedFunction::from_fn(body, |x| Complex64::new(sinc(x[0]), 0.0), 1.0, bad, "x");
        assert!(matches!(err, Err(Error::DecayViolation { .. })));
    }

    #[test]
    fn partition_of_unity() {
        for x in [vec![0.0], vec![1.3], vec![-7.0, 2.2]] {
            let short = sinc_partition_sum(&x, 50);
            assert!((short.value - 1.0).abs() <= short.tail_bound + 1e-15);
        }
        let k = partition_cutoff(1, 3.0 * PI, 1e-6);
        assert!(sinc_partition_sum(&[3.0 * PI - 1e-3], k).tail_bound <= 1e-6);
        assert!(sinc_partition_sum(&[3.0 * PI], k - 1).tail_bound > 1e-6);
    }

    #[test]
    fn cos_product_spectrum() {
        let t = cos_product(1.0, &[2.0, 3.0]).unwrap();
        assert_eq!(t.len(), 4);
        for k in [[2, 3], [-2, 3], [2, -3], [-2, -3]] {
            assert_eq!(t.coefficient(&k), Complex64::new(0.25, 0.0));
        }
        assert!(cos_product(0.4, &[2.0, 1.0]).is_err());
    }
}
