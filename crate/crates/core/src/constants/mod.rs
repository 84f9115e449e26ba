//! Sharp constants `P_{p,q,D_N,a,V}` and `E_{p,q,D_N,V}`: closed forms,
//! explicit upper bounds, lower bounds from candidate functions, and a
//! multistart optimizer over trigonometric polynomials.

mod optimize;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bandlimited::{norm_lp_truncated, BandLimitedFunction, TruncationConfig};
use crate::body::ConvexBody;
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;
use crate::quadrature::{integrate_over_body_with, pairwise_sum, tanh_sinh};
use crate::trigpoly::{norm_lp, DifferentialOperator};

pub use optimize::{optimize_sharp_constant, OptimizerConfig, RatioObjective};

/// What a reported value is known to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    ExactClosedForm,
    LowerBoundOptimizer,
    LowerBoundCandidate,
    UpperBound,
}

impl EstimateKind {
    pub fn is_lower(self) -> bool {
        matches!(self, Self::LowerBoundOptimizer | Self::LowerBoundCandidate)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Self::UpperBound)
    }
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactClosedForm => "exact-closed-form",
            Self::LowerBoundOptimizer => "lower-bound-optimizer",
            Self::LowerBoundCandidate => "lower-bound-candidate",
            Self::UpperBound => "upper-bound",
        })
    }
}

/// The parameters a constant refers to. `a = None` stands for the entire
/// function constant `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantParams {
    pub p: Exponent,
    pub q: Exponent,
    pub operator: String,
    pub body: String,
    pub a: Option<f64>,
}

impl ConstantParams {
    fn new(
        p: Exponent,
        q: Exponent,
        op: &DifferentialOperator,
        body: &ConvexBody,
        a: Option<f64>,
    ) -> Self {
        ConstantParams {
            p,
            q,
            operator: op.to_string(),
            body: body.to_string(),
            a,
        }
    }

    /// `a` as text, `limit` for `E`.
    pub fn a_label(&self) -> String {
        self.a
            .map_or_else(|| "limit".to_string(), |a| a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpConstantEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub params: ConstantParams,
    /// Relative uncertainty of `value`.
    pub tolerance: f64,
    pub notes: Vec<String>,
    /// Per-restart values for optimizer output, in restart order.
    pub restart_values: Vec<f64>,
}

impl SharpConstantEstimate {
    fn new(value: f64, kind: EstimateKind, params: ConstantParams, tolerance: f64) -> Self {
        SharpConstantEstimate {
            value,
            kind,
            params,
            tolerance,
            notes: Vec::new(),
            restart_values: Vec::new(),
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Smallest value compatible with the tolerance.
    pub fn low(&self) -> f64 {
        self.value * (1.0 - self.tolerance)
    }

    /// Largest value compatible with the tolerance.
    pub fn high(&self) -> f64 {
        self.value * (1.0 + self.tolerance)
    }

    /// Whether this estimate and `other` can both be right: a lower bound may
    /// not exceed an upper bound or an exact value, and an upper bound may not
    /// undercut an exact value, each up to the combined tolerances and a
    /// relative slack `slack`.
    pub fn consistent_with(&self, other: &SharpConstantEstimate, slack: f64) -> bool {
        use EstimateKind::*;
        let below = |lo: &Self, hi: &Self| lo.low() <= hi.high() * (1.0 + slack);
        match (self.kind, other.kind) {
            (LowerBoundOptimizer | LowerBoundCandidate, UpperBound | ExactClosedForm) => {
                below(self, other)
            }
            (UpperBound | ExactClosedForm, LowerBoundOptimizer | LowerBoundCandidate) => {
                below(other, self)
            }
            (ExactClosedForm, UpperBound) => below(self, other),
            (UpperBound, ExactClosedForm) => below(other, self),
            (ExactClosedForm, ExactClosedForm) => {
                (self.value - other.value).abs()
                    <= (self.tolerance + other.tolerance + slack)
                        * self.value.abs().max(other.value.abs())
            }
            _ => true,
        }
    }
}

fn check_dims(body: &ConvexBody, op: &DifferentialOperator) -> Result<()> {
    if body.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            found: op.dim(),
        });
    }
    Ok(())
}

fn check_scale(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    Ok(())
}

fn check_order(p: Exponent, q: Exponent) -> Result<()> {
    if p > q {
        return Err(invalid(format!("p = {p} exceeds q = {q}")));
    }
    Ok(())
}

/// `a^{-N-m/p+m/q}`.
pub fn normalization(a: f64, order: u32, m: usize, p: Exponent, q: Exponent) -> f64 {
    a.powf(-(order as f64) - m as f64 * (p.recip() - q.recip()))
}

/// `P_{2,∞,D_N,a,V} = (2π)^{-m/2} a^{-(N+m/2)} (Σ_{k∈aV∩ℤ^m} |Δ_N(ik)|²)^{1/2}`.
pub fn closed_p2_inf(
    body: &ConvexBody,
    op: &DifferentialOperator,
    a: f64,
) -> Result<SharpConstantEstimate> {
    check_dims(body, op)?;
    check_scale(a)?;
    let m = body.dim();
    let lattice = body.lattice_points(a)?;
    let squares: Vec<f64> = lattice
        .iter()
        .map(|k| op.multiplier(k).norm_sqr())
        .collect();
    let value = (2.0 * PI).powf(-(m as f64) / 2.0)
        * normalization(a, op.order(), m, Exponent::TWO, Exponent::INFINITY)
        * pairwise_sum(&squares).sqrt();
    let params = ConstantParams::new(Exponent::TWO, Exponent::INFINITY, op, body, Some(a));
    Ok(
        SharpConstantEstimate::new(value, EstimateKind::ExactClosedForm, params, 1e-14)
            .note(format!("{} lattice points", lattice.len())),
    )
}

/// `E_{2,∞,D_N,V} = (2π)^{-m/2} (∫_V |Δ_N(ix)|² dx)^{1/2}`, by nested
/// tanh–sinh quadrature. The tolerance is the relative change against a rule
/// with twice the step.
pub fn closed_e2_inf(
    body: &ConvexBody,
    op: &DifferentialOperator,
) -> Result<SharpConstantEstimate> {
    check_dims(body, op)?;
    let m = body.dim();
    if m > 3 {
        return Err(Error::UnsupportedDimension(m));
    }
    let g = |x: &[f64]| op.symbol_unchecked(x).norm_sqr();
    let fine = integrate_over_body_with(body, &tanh_sinh(1.0 / 8.0), &g);
    let coarse = integrate_over_body_with(body, &tanh_sinh(1.0 / 4.0), &g);
    if !fine.is_finite() {
        return Err(Error::BudgetExceeded("non-finite quadrature".into()));
    }
    let scale = (2.0 * PI).powf(-(m as f64) / 2.0);
    let value = scale * fine.sqrt();
    let tolerance = if fine > 0.0 {
        0.5 * (fine - coarse).abs() / fine + 1e-15
    } else {
        0.0
    };
    let params = ConstantParams::new(Exponent::TWO, Exponent::INFINITY, op, body, None);
    Ok(SharpConstantEstimate::new(
        value,
        EstimateKind::ExactClosedForm,
        params,
        tolerance,
    ))
}

/// `P_{2,2,D_N,a,V} = a^{-N} max_{k∈aV∩ℤ^m} |Δ_N(ik)|`.
pub fn closed_p22(
    body: &ConvexBody,
    op: &DifferentialOperator,
    a: f64,
) -> Result<SharpConstantEstimate> {
    check_dims(body, op)?;
    check_scale(a)?;
    let lattice = body.lattice_points(a)?;
    if lattice.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let max = lattice
        .iter()
        .map(|k| op.multiplier(k).norm())
        .fold(0.0, f64::max);
    let value = a.powi(-(op.order() as i32)) * max;
    let params = ConstantParams::new(Exponent::TWO, Exponent::TWO, op, body, Some(a));
    Ok(SharpConstantEstimate::new(
        value,
        EstimateKind::ExactClosedForm,
        params,
        1e-15,
    ))
}

/// Relative step at which the boundary ascent in [`closed_e22`] stops.
pub const ASCENT_TOL: f64 = 1e-8;

/// `E_{2,2,D_N,V} = max_{x∈V} |Δ_N(ix)|`. By homogeneity the maximum sits
/// on `∂V`; boundary points `u/‖u‖_V` are scanned over a grid of directions
/// `u` and the best ones refined by compass search in angle space.
pub fn closed_e22(body: &ConvexBody, op: &DifferentialOperator) -> Result<SharpConstantEstimate> {
    check_dims(body, op)?;
    let m = body.dim();
    let params = ConstantParams::new(Exponent::TWO, Exponent::TWO, op, body, None);
    let n = op.order() as i32;
    let objective = |angles: &[f64]| {
        let u = direction(angles, m);
        op.symbol_unchecked(&u).norm() / body.gauge(&u).powi(n)
    };
    if m == 1 {
        let value = objective(&[0.0]).max(objective(&[PI]));
        return Ok(SharpConstantEstimate::new(
            value,
            EstimateKind::ExactClosedForm,
            params,
            1e-15,
        ));
    }
    let (counts, spans): (Vec<usize>, Vec<f64>) = match m {
        2 => (vec![3600], vec![2.0 * PI]),
        3 => (vec![360, 180], vec![2.0 * PI, PI]),
        _ => (vec![96, 48, 48], vec![2.0 * PI, PI, PI]),
    };
    let steps: Vec<f64> = counts
        .iter()
        .zip(&spans)
        .map(|(c, s)| s / *c as f64)
        .collect();
    let total: usize = counts.iter().product();
    let mut scored: Vec<(f64, Vec<f64>)> = (0..total)
        .map(|mut idx| {
            let angles: Vec<f64> = counts
                .iter()
                .zip(&steps)
                .map(|(c, h)| {
                    let i = idx % c;
                    idx /= c;
                    i as f64 * h
                })
                .collect();
            (objective(&angles), angles)
        })
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut best = scored[0].0;
    let mut converged = true;
    for (start, angles) in scored.iter().take(8) {
        let (value, ok) = compass_ascent(&objective, angles.clone(), *start, &steps);
        best = best.max(value);
        converged &= ok;
    }
    let mut est =
        SharpConstantEstimate::new(best, EstimateKind::ExactClosedForm, params, ASCENT_TOL);
    if !converged {
        est = est.note("boundary ascent hit its iteration cap");
    }
    Ok(est)
}

/// Hyperspherical angles to a unit vector.
fn direction(angles: &[f64], m: usize) -> Vec<f64> {
    match m {
        1 => vec![angles[0].cos().signum()],
        2 => vec![angles[0].cos(), angles[0].sin()],
        3 => {
            let (t, f) = (angles[0], angles[1]);
            vec![f.sin() * t.cos(), f.sin() * t.sin(), f.cos()]
        }
        _ => {
            let (t, f, s) = (angles[0], angles[1], angles[2]);
            vec![
                s.sin() * f.sin() * t.cos(),
                s.sin() * f.sin() * t.sin(),
                s.sin() * f.cos(),
                s.cos(),
            ]
        }
    }
}

/// Coordinate compass search; returns the value and whether the step fell
/// below [`ASCENT_TOL`] before the iteration cap.
fn compass_ascent(
    g: &dyn Fn(&[f64]) -> f64,
    mut x: Vec<f64>,
    mut fx: f64,
    steps: &[f64],
) -> (f64, bool) {
    let mut h: Vec<f64> = steps.to_vec();
    for _ in 0..20_000 {
        if h.iter().all(|&s| s < ASCENT_TOL) {
            return (fx, true);
        }
        let mut moved = false;
        for j in 0..x.len() {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[j] += sign * h[j];
                let fy = g(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    (fx, false)
}

/// Estimates for the Bernstein constants of a monomial `D^α` on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinBracket {
    /// `E_{q,q,D^α,Π_σ} = σ^α`.
    pub exact: SharpConstantEstimate,
    /// `a^{-|α|} ∏⌊aσ_j⌋^{α_j}`, attained by `∏cos(⌊aσ_j⌋x_j)`.
    pub lower: SharpConstantEstimate,
    /// `a^{-|α|} ∏⌈aσ_j⌉^{α_j}`.
    pub upper: SharpConstantEstimate,
}

impl BernsteinBracket {
    pub fn width(&self) -> f64 {
        self.upper.value - self.lower.value
    }

    pub fn contains(&self, value: f64, rel: f64) -> bool {
        value >= self.lower.value * (1.0 - rel) && value <= self.upper.value * (1.0 + rel)
    }
}

/// The constants `E` and `P` for `p = q` (any `q`), `D^α` and `V = Π_σ`.
pub fn bernstein_pq(
    body: &ConvexBody,
    alpha: &[u32],
    a: f64,
    q: Exponent,
) -> Result<BernsteinBracket> {
    if !body.is_box() {
        return Err(invalid(format!(
            "Bernstein bracket needs a box, got {body}"
        )));
    }
    check_scale(a)?;
    let op = DifferentialOperator::monomial(alpha.to_vec())?;
    check_dims(body, &op)?;
    let sigma = body.semi_axes();
    let floors: Vec<f64> = sigma.iter().map(|s| (a * s).floor()).collect();
    if floors.contains(&0.0) {
        return Err(invalid(format!(
            "⌊aσ_j⌋ vanishes for a = {a}, σ = {sigma:?}"
        )));
    }
    let pow = |v: &[f64]| {
        v.iter()
            .zip(alpha)
            .map(|(x, &n)| x.powi(n as i32))
            .product::<f64>()
    };
    let ceils: Vec<f64> = sigma.iter().map(|s| (a * s).ceil()).collect();
    let norm = a.powi(-(op.order() as i32));
    let params = |a| ConstantParams::new(q, q, &op, body, a);
    Ok(BernsteinBracket {
        exact: SharpConstantEstimate::new(
            pow(sigma),
            EstimateKind::ExactClosedForm,
            params(None),
            1e-15,
        ),
        lower: SharpConstantEstimate::new(
            norm * pow(&floors),
            EstimateKind::LowerBoundCandidate,
            params(Some(a)),
            1e-15,
        )
        .note("cosine product"),
        upper: SharpConstantEstimate::new(
            norm * pow(&ceils),
            EstimateKind::UpperBound,
            params(Some(a)),
            1e-15,
        ),
    })
}

/// `[(⌈p/2⌉/(2π))^m |V|]^{1/p−1/q}`, an upper bound for `E_{p,q,D_0,V}` and
/// the limit of upper bounds for `P_{p,q,D_0,a,V}`.
pub fn nikolskii_upper(
    p: Exponent,
    q: Exponent,
    body: &ConvexBody,
) -> Result<SharpConstantEstimate> {
    check_order(p, q)?;
    let m = body.dim();
    let exponent = p.recip() - q.recip();
    let value = if exponent == 0.0 {
        1.0
    } else {
        let c = (p.get() / 2.0).ceil() / (2.0 * PI);
        (c.powi(m as i32) * body.volume()).powf(exponent)
    };
    let op = DifferentialOperator::identity(m)?;
    let params = ConstantParams::new(p, q, &op, body, None);
    Ok(SharpConstantEstimate::new(
        value,
        EstimateKind::UpperBound,
        params,
        1e-15,
    ))
}

/// `(diam V/2)^N (Σ|b_α|^{q̃})^{1/q̃}` times the Nikolskii factor, with
/// `q̃ = min(1, q)`: the box bound for `E_{q,q,D_N}` on `Q_{diam/2} ⊇ V`
/// composed with `E_{p,q,D_0,V}`.
pub fn crude_upper(
    p: Exponent,
    q: Exponent,
    op: &DifferentialOperator,
    body: &ConvexBody,
) -> Result<SharpConstantEstimate> {
    check_dims(body, op)?;
    let nik = nikolskii_upper(p, q, body)?;
    let half = body.diameter() / 2.0;
    let value = half.powi(op.order() as i32) * op.coefficient_norm(q.tilde()) * nik.value;
    let params = ConstantParams::new(p, q, op, body, None);
    Ok(SharpConstantEstimate::new(
        value,
        EstimateKind::UpperBound,
        params,
        1e-14,
    ))
}

/// `E_{∞,∞,Δ,B_M} = mM²`.
pub fn kamzolov_target(big_m: f64, m: usize) -> Result<SharpConstantEstimate> {
    let body = ConvexBody::ball(m, big_m)?;
    let op = DifferentialOperator::laplacian(m)?;
    let params = ConstantParams::new(Exponent::INFINITY, Exponent::INFINITY, &op, &body, None);
    Ok(SharpConstantEstimate::new(
        m as f64 * big_m * big_m,
        EstimateKind::ExactClosedForm,
        params,
        0.0,
    ))
}

/// `‖D_N f‖_q / ‖f‖_p` for one function of exponential type `V`, a lower
/// bound for `E_{p,q,D_N,V}`. The value uses the truncated norms; the
/// tolerance covers the tails and the quadrature errors of both norms.
pub fn candidate_lower_bound_e(
    f: &BandLimitedFunction,
    p: Exponent,
    q: Exponent,
    op: &DifferentialOperator,
    config: &TruncationConfig,
) -> Result<SharpConstantEstimate> {
    check_dims(f.body(), op)?;
    check_order(p, q)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let den = norm_lp_truncated(f, p, config)?;
    let df = f.apply_operator(op)?;
    let num = norm_lp_truncated(&df, q, config)?;
    if den.value == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let value = num.value / den.value;
    let lower = num.lower() / den.upper();
    let upper = num.upper() / den.lower();
    let tolerance = if value > 0.0 {
        ((value - lower) / value).max((upper - value) / value)
    } else {
        0.0
    };
    let params = ConstantParams::new(p, q, op, f.body(), None);
    Ok(
        SharpConstantEstimate::new(value, EstimateKind::LowerBoundCandidate, params, tolerance)
            .note(format!("candidate {}", f.label())),
    )
}

/// One row of a [`limit_study`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub a: f64,
    pub estimate: SharpConstantEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitStudy {
    pub rows: Vec<LimitRow>,
    /// The `E` constant, when a closed form is known.
    pub reference: Option<SharpConstantEstimate>,
    /// `(a₂P₂ − a₁P₁)/(a₂ − a₁)` from the last two rows, eliminating an
    /// error term of order `1/a`.
    pub extrapolated: Option<f64>,
}

impl LimitStudy {
    /// Relative distance of the last row to the reference.
    pub fn final_gap(&self) -> Option<f64> {
        let e = self.reference.as_ref()?.value;
        let last = self.rows.last()?.estimate.value;
        Some((last - e).abs() / e)
    }
}

/// `P_{p,q,D_N,a,V}` along `a_list`, from a closed form where one exists
/// and from the optimizer otherwise, next to the matching `E` value.
pub fn limit_study(
    p: Exponent,
    q: Exponent,
    op: &DifferentialOperator,
    body: &ConvexBody,
    a_list: &[f64],
    config: &OptimizerConfig,
) -> Result<LimitStudy> {
    check_dims(body, op)?;
    check_order(p, q)?;
    if a_list.is_empty() {
        return Err(invalid("empty a-sequence"));
    }
    if a_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("a-sequence must be increasing"));
    }
    let rows = a_list
        .iter()
        .map(|&a| {
            let estimate = p_estimate(p, q, op, body, a, config)?;
            Ok(LimitRow { a, estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    let extrapolated = match rows.as_slice() {
        [.., r1, r2] => Some((r2.a * r2.estimate.value - r1.a * r1.estimate.value) / (r2.a - r1.a)),
        _ => None,
    };
    Ok(LimitStudy {
        reference: e_reference(p, q, op, body),
        rows,
        extrapolated,
    })
}

/// The best available value of `P` at one `a`.
pub fn p_estimate(
    p: Exponent,
    q: Exponent,
    op: &DifferentialOperator,
    body: &ConvexBody,
    a: f64,
    config: &OptimizerConfig,
) -> Result<SharpConstantEstimate> {
    if p == Exponent::TWO && q.is_infinite() {
        closed_p2_inf(body, op, a)
    } else if p == Exponent::TWO && q == Exponent::TWO {
        closed_p22(body, op, a)
    } else {
        optimize_sharp_constant(p, q, op, a, body, config)
    }
}

/// The `E` constant when it has a closed form.
pub fn e_reference(
    p: Exponent,
    q: Exponent,
    op: &DifferentialOperator,
    body: &ConvexBody,
) -> Option<SharpConstantEstimate> {
    if p == Exponent::TWO && q.is_infinite() {
        return closed_e2_inf(body, op).ok();
    }
    if p == Exponent::TWO && q == Exponent::TWO {
        return closed_e22(body, op).ok();
    }
    if p == q {
        if let Some((alpha, b)) = op.as_monomial() {
            if body.is_box() && b == Complex64::new(1.0, 0.0) {
                let bracket = bernstein_pq(body, alpha, 1e6, q).ok()?;
                return Some(bracket.exact);
            }
        }
        if op.order() == 0 {
            return nikolskii_upper(p, q, body).ok().map(|mut e| {
                e.kind = EstimateKind::ExactClosedForm;
                e
            });
        }
        let m = body.dim();
        if p.is_infinite() && body.is_ball() && *op == DifferentialOperator::laplacian(m).ok()? {
            return kamzolov_target(body.semi_axes()[0], m).ok();
        }
    }
    None
}

/// `‖D^α T‖_q/‖T‖_q` for `T = ∏cos(⌊aσ_j⌋x_j)`, scaled by `a^{-|α|}`.
pub fn cos_product_ratio(a: f64, sigma: &[f64], alpha: &[u32], q: Exponent) -> Result<f64> {
    let t = crate::bandlimited::cos_product(a, sigma)?;
    let op = DifferentialOperator::monomial(alpha.to_vec())?;
    let dt = t.apply_operator(&op)?;
    let side = crate::grid::fast_size(16 * (2 * t.degree() + 1));
    let num = norm_lp(&dt, q, side)?.value;
    let den = norm_lp(&t, q, side)?.value;
    Ok(a.powi(-(op.order() as i32)) * num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(m: usize, s: f64) -> ConvexBody {
        ConvexBody::cube(m, s).unwrap()
    }

    fn id(m: usize) -> DifferentialOperator {
        DifferentialOperator::identity(m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn p2_inf_small_lattices() {
        let v = closed_p2_inf(&cube(1, 1.0), &id(1), 1.0).unwrap();
        assert!(rel(v.value, (3.0 / (2.0 * PI)).sqrt()) < 1e-14);
        let v = closed_p2_inf(&cube(2, 1.0), &id(2), 1.0).unwrap();
        assert!(rel(v.value, 3.0 / (2.0 * PI)) < 1e-14);
    }

    #[test]
    fn p2_inf_with_derivative_matches_direct_sum() {
        // Σ_{|k|≤3} k² = 28, a = 3, N = 1: (2π)^{-1/2} 3^{-3/2} √28.
        let d = DifferentialOperator::partial(1, 0).unwrap();
        let v = closed_p2_inf(&cube(1, 1.0), &d, 3.0).unwrap();
        let expect = (28.0f64).sqrt() / (2.0 * PI).sqrt() / 3f64.powf(1.5);
        assert!(rel(v.value, expect) < 1e-14);
    }

    #[test]
    fn e2_inf_values() {
        let e = closed_e2_inf(&cube(1, 1.0), &id(1)).unwrap();
        assert!(rel(e.value, 1.0 / PI.sqrt()) < 1e-12, "{}", e.value);
        let e = closed_e2_inf(&cube(2, 1.0), &id(2)).unwrap();
        assert!(rel(e.value, 1.0 / PI) < 1e-12);
        // ∫_{-1}^{1} x² = 2/3.
        let d = DifferentialOperator::partial(1, 0).unwrap();
        let e = closed_e2_inf(&cube(1, 1.0), &d).unwrap();
        assert!(rel(e.value, (2.0 / 3.0 / (2.0 * PI)).sqrt()) < 1e-12);
    }

    #[test]
    fn e2_inf_ball_laplacian() {
        // ∫_{B_1} |x|⁴ over the disc = 2π/6.
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let lap = DifferentialOperator::laplacian(2).unwrap();
        let e = closed_e2_inf(&ball, &lap).unwrap();
        let expect = (PI / 3.0).sqrt() / (2.0 * PI);
        assert!(rel(e.value, expect) < 1e-9, "{} vs {expect}", e.value);
    }

    #[test]
    fn p2_inf_approaches_e2_inf() {
        let e = closed_e2_inf(&cube(1, 1.0), &id(1)).unwrap().value;
        let errs: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&a| rel(closed_p2_inf(&cube(1, 1.0), &id(1), a).unwrap().value, e))
            .collect();
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
        assert!(errs[1] < 0.02);
    }

    #[test]
    fn p22_and_e22_examples() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let d1 = DifferentialOperator::partial(2, 0).unwrap();
        assert_eq!(closed_p22(&ball, &d1, 1.0).unwrap().value, 1.0);
        let ball3 = ConvexBody::ball(2, 3.0).unwrap();
        assert!(rel(closed_e22(&ball3, &d1).unwrap().value, 3.0) < 1e-12);
        let lap = DifferentialOperator::laplacian(2).unwrap();
        assert!(rel(closed_e22(&ball3, &lap).unwrap().value, 9.0) < 1e-12);
    }

    #[test]
    fn e22_mixed_derivative_on_ellipse() {
        // max |xy| on x²/4 + y² ≤ 1 is 1, at (√2, 1/√2).
        let v = ConvexBody::lp_ellipsoid(vec![2.0, 1.0], 2.0).unwrap();
        let op = DifferentialOperator::monomial(vec![1, 1]).unwrap();
        let e = closed_e22(&v, &op).unwrap();
        assert!(rel(e.value, 1.0) < 1e-8, "{}", e.value);
        assert!(e.notes.is_empty());
    }

    #[test]
    fn e22_in_three_and_four_dimensions() {
        // max |x₁x₂x₃| on the unit ball is 3^{-3/2}.
        let ball = ConvexBody::ball(3, 1.0).unwrap();
        let op = DifferentialOperator::monomial(vec![1, 1, 1]).unwrap();
        let e = closed_e22(&ball, &op).unwrap();
        assert!(rel(e.value, 3f64.powf(-1.5)) < 1e-8, "{}", e.value);
        let cube4 = cube(4, 2.0);
        let op = DifferentialOperator::monomial(vec![0, 1, 0, 2]).unwrap();
        assert!(rel(closed_e22(&cube4, &op).unwrap().value, 8.0) < 1e-8);
    }

    #[test]
    fn bernstein_examples() {
        let pi = ConvexBody::parallelepiped(vec![2.0, 3.0]).unwrap();
        let b = bernstein_pq(&pi, &[1, 1], 1.0, Exponent::TWO).unwrap();
        assert_eq!(b.exact.value, 6.0);
        let unit = ConvexBody::parallelepiped(vec![1.0, 1.0]).unwrap();
        let b = bernstein_pq(&unit, &[2, 0], 10.0, Exponent::TWO).unwrap();
        assert!(rel(b.lower.value, 1.0) < 1e-15 && rel(b.upper.value, 1.0) < 1e-15);
        let line = ConvexBody::parallelepiped(vec![1.0]).unwrap();
        let b = bernstein_pq(&line, &[1], 1.5, Exponent::TWO).unwrap();
        assert!(rel(b.lower.value, 1.0 / 1.5) < 1e-15);
        assert!(rel(b.upper.value, 2.0 / 1.5) < 1e-15);
        assert!(bernstein_pq(&line, &[1], 0.5, Exponent::TWO).is_err());
    }

    #[test]
    fn cos_product_attains_lower_end() {
        for q in [0.5, 1.0, 2.0, f64::INFINITY] {
            let q = Exponent::new(q).unwrap();
            let r = cos_product_ratio(3.0, &[1.0, 2.0], &[1, 1], q).unwrap();
            // ⌊3·1⌋·⌊3·2⌋/3² = 2.
            assert!(rel(r, 2.0) < 1e-8, "q={q}: {r}");
        }
    }

    #[test]
    fn nikolskii_examples() {
        let v = nikolskii_upper(Exponent::TWO, Exponent::INFINITY, &cube(2, 1.0)).unwrap();
        assert!(rel(v.value, 1.0 / PI) < 1e-14);
        let v = nikolskii_upper(
            Exponent::new(3.0).unwrap(),
            Exponent::new(3.0).unwrap(),
            &cube(2, 1.0),
        )
        .unwrap();
        assert_eq!(v.value, 1.0);
        assert!(nikolskii_upper(Exponent::INFINITY, Exponent::TWO, &cube(1, 1.0)).is_err());
        // ⌈p/2⌉ = 2 for p = 3.
        let v = nikolskii_upper(
            Exponent::new(3.0).unwrap(),
            Exponent::INFINITY,
            &cube(1, 1.0),
        )
        .unwrap();
        assert!(rel(v.value, (2.0 / PI).powf(1.0 / 3.0)) < 1e-14);
    }

    #[test]
    fn crude_bound_composition() {
        let body = cube(2, 1.0);
        let nik = nikolskii_upper(Exponent::ONE, Exponent::INFINITY, &body).unwrap();
        let crude = crude_upper(Exponent::ONE, Exponent::INFINITY, &id(2), &body).unwrap();
        assert_eq!(crude.value, nik.value);
        let lap = DifferentialOperator::laplacian(2).unwrap();
        let crude = crude_upper(Exponent::ONE, Exponent::INFINITY, &lap, &body).unwrap();
        // diam Q_1 = 2√2, so (√2)² · (1 + 1) · nik.
        assert!(rel(crude.value, 4.0 * nik.value) < 1e-14);
        let half = Exponent::new(0.5).unwrap();
        let crude = crude_upper(half, half, &lap, &body).unwrap();
        // q̃ = 1/2: (1 + 1)^2 = 4.
        assert!(rel(crude.value, 2.0 * 4.0) < 1e-14);
    }

    #[test]
    fn kamzolov_values() {
        assert_eq!(kamzolov_target(1.0, 2).unwrap().value, 2.0);
        assert_eq!(kamzolov_target(1.0, 1).unwrap().value, 1.0);
        assert_eq!(kamzolov_target(2.0, 3).unwrap().value, 12.0);
    }

    #[test]
    fn e2_inf_scaling_law() {
        let lap = DifferentialOperator::laplacian(2).unwrap();
        let body = ConvexBody::lp_ellipsoid(vec![1.0, 0.5], 3.0).unwrap();
        let base = closed_e2_inf(&body, &lap).unwrap().value;
        for gamma in [0.5, 2.0] {
            let scaled = closed_e2_inf(&body.dilate(gamma).unwrap(), &lap)
                .unwrap()
                .value;
            assert!(rel(scaled, gamma.powi(3) * base) < 1e-8);
        }
    }

    #[test]
    fn candidate_from_cs_extremal() {
        let body = cube(1, 1.0);
        let f = crate::bandlimited::cs_extremal(&body, &id(1)).unwrap();
        let c = candidate_lower_bound_e(
            &f,
            Exponent::TWO,
            Exponent::INFINITY,
            &id(1),
            &TruncationConfig::default(),
        )
        .unwrap();
        assert!(rel(c.value, 1.0 / PI.sqrt()) < 1e-4, "{}", c.value);
        let e = closed_e2_inf(&body, &id(1)).unwrap();
        assert!(c.consistent_with(&e, 0.0));
    }

    #[test]
    fn order_consistency() {
        let body = cube(1, 1.0);
        let params = ConstantParams::new(Exponent::TWO, Exponent::INFINITY, &id(1), &body, None);
        let lo =
            SharpConstantEstimate::new(1.0, EstimateKind::LowerBoundCandidate, params.clone(), 0.0);
        let hi = SharpConstantEstimate::new(0.9, EstimateKind::UpperBound, params, 0.05);
        assert!(!lo.consistent_with(&hi, 0.0));
        assert!(lo.consistent_with(&hi, 0.1));
    }

    #[test]
    fn limit_study_riemann_sums() {
        let a: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
        let s = limit_study(
            Exponent::TWO,
            Exponent::INFINITY,
            &id(1),
            &cube(1, 1.0),
            &a,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(s.rows.len(), 10);
        assert!(s.final_gap().unwrap() < 0.02);
        let ext = s.extrapolated.unwrap();
        let e = s.reference.unwrap().value;
        assert!((ext - e).abs() < (s.rows[9].estimate.value - e).abs());
    }

    #[test]
    fn limit_study_lattice_max() {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let d1 = DifferentialOperator::partial(2, 0).unwrap();
        let a: Vec<f64> = (1..=50).map(f64::from).collect();
        let s = limit_study(
            Exponent::TWO,
            Exponent::TWO,
            &d1,
            &ball,
            &a,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(s.reference.as_ref().unwrap().value, 1.0);
        // a^{-1} max|k₁| over aB_1 is ⌊a⌋/a = 1 at integer a.
        assert!(s.rows.iter().all(|r| rel(r.estimate.value, 1.0) < 1e-15));
    }
}
