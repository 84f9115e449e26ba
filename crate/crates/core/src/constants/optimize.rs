//! Multistart ascent of the normalized ratio
//! `a^{-N-m/p+m/q} ‖D_N T‖_q / ‖T‖_p` over `T ∈ 𝒯_{aV}`.
//!
//! Coefficients are real pairs `(Re c_k, Im c_k)` in lattice order. The
//! ascent maximizes the logarithm of the ratio with L-BFGS and an Armijo
//! line search; the ratio is scale invariant, so iterates are kept on the
//! unit sphere. For `q = ∞` the numerator is `|D_N T(0)|`. A sup-norm in the
//! denominator is replaced during the ascent by `(Σ_l |T(x_l)|^τ)^{1/τ}`, a
//! log-sum-exp of `log|T|` at temperature `τ`.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dims, check_order, check_scale, closed_p22, normalization, ConstantParams};
use super::{EstimateKind, SharpConstantEstimate};
use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{fast_size, Grid};
use crate::quadrature::pairwise_sum;
use crate::trigpoly::{
    norm_lp_refined, sup_grid_error, DifferentialOperator, TrigPolynomial, REFINEMENT_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Ascent grid side as a multiple of the alias-free size `2·deg + 1`.
    pub oversampling: usize,
    /// L-BFGS iterations per temperature.
    pub iterations: usize,
    /// Temperatures for a sup-norm denominator, in order.
    pub smoothing: Vec<f64>,
    /// Restrict to `c_{-k} = conj(c_k)`, i.e. real-valued `T`.
    pub real: bool,
    /// Answer `p = q = 2` from the lattice maximum instead of ascending.
    pub closed_form_shortcut: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 8,
            seed: 0,
            oversampling: 4,
            iterations: 400,
            smoothing: vec![1e1, 1e2, 1e3, 1e4],
            real: false,
            closed_form_shortcut: true,
        }
    }
}

/// The log-ratio and its gradient on a fixed grid.
#[derive(Debug, Clone)]
pub struct RatioObjective {
    p: Exponent,
    q: Exponent,
    dim: usize,
    points: Vec<Vec<i64>>,
    multipliers: Vec<Complex64>,
    bins: Vec<usize>,
    mirror: Vec<usize>,
    grid: Grid,
    log_norm: f64,
}

struct Evaluation {
    log_ratio: f64,
    gradient: Vec<f64>,
}

impl RatioObjective {
    pub fn new(
        p: Exponent,
        q: Exponent,
        op: &DifferentialOperator,
        a: f64,
        body: &ConvexBody,
        oversampling: usize,
    ) -> Result<Self> {
        check_dims(body, op)?;
        check_scale(a)?;
        check_order(p, q)?;
        let lattice = body.lattice_points(a)?;
        if lattice.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let points: Vec<Vec<i64>> = lattice.iter().map(<[i64]>::to_vec).collect();
        let degree = points
            .iter()
            .flatten()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let grid = Grid::new(
            body.dim(),
            fast_size(oversampling.max(1) * (2 * degree + 1)),
        );
        let bins = points
            .iter()
            .map(|k| grid.bin(k))
            .collect::<Result<Vec<_>>>()?;
        let index: HashMap<&[i64], usize> = points
            .iter()
            .enumerate()
            .map(|(i, k)| (k.as_slice(), i))
            .collect();
        let mirror = points
            .iter()
            .map(|k| {
                let neg: Vec<i64> = k.iter().map(|x| -x).collect();
                index[neg.as_slice()]
            })
            .collect();
        Ok(RatioObjective {
            p,
            q,
            dim: body.dim(),
            multipliers: points.iter().map(|k| op.multiplier(k)).collect(),
            points,
            bins,
            mirror,
            grid,
            log_norm: normalization(a, op.order(), body.dim(), p, q).ln(),
        })
    }

    /// Number of real parameters.
    pub fn len(&self) -> usize {
        2 * self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn grid_side(&self) -> usize {
        self.grid.side()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    fn coefficients(&self, x: &[f64]) -> Vec<Complex64> {
        x.chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect()
    }

    pub fn polynomial(&self, x: &[f64]) -> Result<TrigPolynomial> {
        TrigPolynomial::from_coefficients(
            self.dim,
            self.points.iter().cloned().zip(self.coefficients(x)),
        )
    }

    /// The ratio on the ascent grid, exact sup-norm at `p = ∞`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x, None).map_or(0.0, |e| e.log_ratio.exp())
    }

    /// The ratio and its gradient with respect to the real parameters, for
    /// finite `p`.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        match self.evaluate(x, None) {
            Some(e) => {
                let r = e.log_ratio.exp();
                (r, e.gradient.into_iter().map(|g| g * r).collect())
            }
            None => (0.0, vec![0.0; x.len()]),
        }
    }

    /// Orthogonal projection onto `c_{-k} = conj(c_k)`.
    pub fn project_real(&self, x: &mut [f64]) {
        let c = self.coefficients(x);
        for (i, &j) in self.mirror.iter().enumerate() {
            let s = (c[i] + c[j].conj()) * 0.5;
            x[2 * i] = s.re;
            x[2 * i + 1] = s.im;
        }
    }

    /// `Σ_l z_l e^{-ik·x_l}` at every lattice point.
    fn correlate(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.len() as f64;
        let spectrum = self.grid.analyze(z);
        self.bins.iter().map(|&b| spectrum[b] * n).collect()
    }

    /// `log Σ_l w|v_l|^r` and the weights `u_l = r w |v_l|^{r-2} v_l / S`,
    /// computed relative to `max|v|`.
    fn log_power_sum(values: &[Complex64], r: f64, w: f64) -> Option<(f64, Vec<Complex64>)> {
        let vmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(vmax > 0.0 && vmax.is_finite()) {
            return None;
        }
        let powers: Vec<f64> = values.iter().map(|v| (v.norm() / vmax).powf(r)).collect();
        let s = w * pairwise_sum(&powers);
        let u = values
            .iter()
            .zip(&powers)
            .map(|(v, t)| {
                let n2 = v.norm_sqr();
                if n2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    v * (r * w * t / (s * n2))
                }
            })
            .collect();
        Some((r * vmax.ln() + s.ln(), u))
    }

    /// `log|T|` at its grid maximum with the matching subgradient weights.
    fn log_grid_max(values: &[Complex64]) -> Option<(f64, Vec<Complex64>)> {
        let (l, v) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        let n2 = v.norm_sqr();
        if n2 == 0.0 {
            return None;
        }
        let mut u = vec![Complex64::new(0.0, 0.0); values.len()];
        u[l] = v / n2;
        Some((0.5 * n2.ln(), u))
    }

    fn evaluate(&self, x: &[f64], temperature: Option<f64>) -> Option<Evaluation> {
        let c = self.coefficients(x);
        let w = self.grid.cell_volume();
        let mut grad = vec![Complex64::new(0.0, 0.0); c.len()];

        let num = if self.q.is_infinite() {
            let s: Complex64 = self.multipliers.iter().zip(&c).map(|(m, c)| m * c).sum();
            let n2 = s.norm_sqr();
            if !(n2 > 0.0) {
                return None;
            }
            for (g, m) in grad.iter_mut().zip(&self.multipliers) {
                *g += s * m.conj() / n2;
            }
            0.5 * n2.ln()
        } else {
            let qq = self.q.get();
            let dc: Vec<Complex64> = self
                .multipliers
                .iter()
                .zip(&c)
                .map(|(m, c)| m * c)
                .collect();
            let values = self
                .grid
                .synthesize(self.points.iter().map(Vec::as_slice).zip(dc))
                .ok()?;
            let (log_s, u) = Self::log_power_sum(&values, qq, w)?;
            for ((g, m), h) in grad
                .iter_mut()
                .zip(&self.multipliers)
                .zip(self.correlate(&u))
            {
                *g += m.conj() * h / qq;
            }
            log_s / qq
        };

        let values = self
            .grid
            .synthesize(self.points.iter().map(Vec::as_slice).zip(c.iter().copied()))
            .ok()?;
        let (den, u) = if self.p.is_infinite() {
            match temperature {
                Some(tau) => {
                    let (log_s, u) = Self::log_power_sum(&values, tau, 1.0)?;
                    (
                        log_s / tau,
                        u.into_iter().map(|z| z / tau).collect::<Vec<_>>(),
                    )
                }
                None => Self::log_grid_max(&values)?,
            }
        } else {
            let pp = self.p.get();
            let (log_s, u) = Self::log_power_sum(&values, pp, w)?;
            (log_s / pp, u.into_iter().map(|z| z / pp).collect())
        };
        for (g, h) in grad.iter_mut().zip(self.correlate(&u)) {
            *g -= h;
        }
        let log_ratio = self.log_norm + num - den;
        if !log_ratio.is_finite() {
            return None;
        }
        Some(Evaluation {
            log_ratio,
            gradient: grad.iter().flat_map(|g| [g.re, g.im]).collect(),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> bool {
    let n = dot(x, x).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= n);
    true
}

const MEMORY: usize = 8;
const ARMIJO: f64 = 1e-4;

/// L-BFGS ascent of the log-ratio from `x`, in place. Returns the final
/// log-ratio, or `None` when the iterate degenerates.
fn ascend(
    obj: &RatioObjective,
    x: &mut Vec<f64>,
    temperature: Option<f64>,
    iterations: usize,
    real: bool,
) -> Option<f64> {
    if real {
        obj.project_real(x);
    }
    if !normalize(x) {
        return None;
    }
    let mut current = obj.evaluate(x, temperature)?;
    // Minimize f = −log ratio.
    let mut gf: Vec<f64> = current.gradient.iter().map(|g| -g).collect();
    if real {
        obj.project_real(&mut gf);
    }
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stalls = 0;
    for _ in 0..iterations {
        let gnorm = dot(&gf, &gf).sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let mut d = gf.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        d.iter_mut().for_each(|v| *v = -*v);
        if real {
            obj.project_real(&mut d);
        }
        let mut slope = dot(&gf, &d);
        if !(slope < 0.0) {
            history.clear();
            d = gf.iter().map(|g| -g).collect();
            slope = -gnorm * gnorm;
        }
        let mut t = if history.is_empty() {
            (0.1 / dot(&d, &d).sqrt()).min(1.0)
        } else {
            1.0
        };
        let f0 = -current.log_ratio;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            if normalize(&mut trial) {
                if let Some(e) = obj.evaluate(&trial, temperature) {
                    if -e.log_ratio <= f0 + ARMIJO * t * slope {
                        accepted = Some((trial, e));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let Some((next, e)) = accepted else {
            if history.is_empty() {
                break;
            }
            history.clear();
            continue;
        };
        let mut gf_next: Vec<f64> = e.gradient.iter().map(|g| -g).collect();
        if real {
            obj.project_real(&mut gf_next);
        }
        let s: Vec<f64> = next.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gf_next.iter().zip(&gf).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let gain = e.log_ratio - current.log_ratio;
        stalls = if gain.abs() <= 1e-14 * current.log_ratio.abs().max(1.0) {
            stalls + 1
        } else {
            0
        };
        *x = next;
        gf = gf_next;
        current = e;
        if stalls >= 3 {
            break;
        }
    }
    Some(current.log_ratio)
}

/// The supremum of `|T|` on `Q_π`: the maximum over a grid whose certified
/// gap is small, then compass refinement of the best nodes. Returns the
/// refined maximum and the certified relative gap between the two.
fn sup_norm(t: &TrigPolynomial, oversampling: usize) -> Result<(f64, f64)> {
    let m = t.dim();
    let n = t.euclidean_degree();
    let want = (std::f64::consts::PI * n * (200.0 * m as f64).sqrt()).ceil() as usize;
    let mut side = fast_size((oversampling * (2 * t.degree() + 1)).max(want));
    while side.pow(m as u32) > crate::trigpoly::MAX_REFINED_NODES && side > 2 * t.degree() + 1 {
        side = fast_size(side * 3 / 4);
    }
    let grid = Grid::new(m, side);
    let values = t.evaluate_on(&grid)?;
    let grid_max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].norm().total_cmp(&values[a].norm()));
    let h = 2.0 * std::f64::consts::PI / side as f64;
    let abs = |x: &[f64]| t.evaluate_at(x).map_or(0.0, |v| v.norm());
    let mut best = grid_max;
    let mut point = vec![0.0; m];
    for &l in order.iter().take(8) {
        grid.point(l, &mut point);
        let mut x = point.clone();
        let mut fx = values[l].norm();
        let mut step = h;
        while step > 1e-12 {
            let mut moved = false;
            for j in 0..m {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[j] += sign * step;
                    let fy = abs(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.max(fx);
    }
    let certified = grid_max * (1.0 + sup_grid_error(m, n, side));
    Ok((best, (certified / best - 1.0).max(0.0)))
}

struct Outcome {
    value: f64,
    tolerance: f64,
}

/// Unsmoothed ratio for the final iterate: refined quadrature for finite
/// exponents, the exact point value for `q = ∞`, a refined maximum for
/// `p = ∞`.
fn final_value(obj: &RatioObjective, x: &[f64], oversampling: usize) -> Result<Outcome> {
    let t = obj.polynomial(x)?;
    let side = fast_size(oversampling.max(1) * (2 * t.degree() + 1));
    let (num, num_err) = if obj.q.is_infinite() {
        let s: Complex64 = obj
            .multipliers
            .iter()
            .zip(obj.coefficients(x))
            .map(|(m, c)| m * c)
            .sum();
        (s.norm(), 0.0)
    } else {
        let dt = TrigPolynomial::from_coefficients(
            obj.dim,
            obj.points.iter().cloned().zip(
                obj.multipliers
                    .iter()
                    .zip(obj.coefficients(x))
                    .map(|(m, c)| m * c),
            ),
        )?;
        let e = norm_lp_refined(&dt, obj.q, side, REFINEMENT_TOL)?;
        (e.value, e.rel_error)
    };
    let (den, den_err) = if obj.p.is_infinite() {
        sup_norm(&t, oversampling)?
    } else {
        let e = norm_lp_refined(&t, obj.p, side, REFINEMENT_TOL)?;
        (e.value, e.rel_error)
    };
    if den == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(Outcome {
        value: obj.log_norm.exp() * num / den,
        tolerance: num_err + den_err,
    })
}

fn restart_seed(seed: u64, restart: usize, attempt: usize) -> u64 {
    let mut z = seed
        .wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((attempt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const ATTEMPTS: usize = 3;

fn run_restart(obj: &RatioObjective, config: &OptimizerConfig, restart: usize) -> Option<Outcome> {
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, restart, attempt));
        let mut x: Vec<f64> = (0..obj.len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let schedule: Vec<Option<f64>> = if obj.p.is_infinite() {
            config.smoothing.iter().map(|&t| Some(t)).collect()
        } else {
            vec![None]
        };
        let ok = schedule
            .iter()
            .all(|&tau| ascend(obj, &mut x, tau, config.iterations, config.real).is_some());
        if !ok {
            continue;
        }
        if let Ok(out) = final_value(obj, &x, config.oversampling) {
            if out.value.is_finite() {
                return Some(out);
            }
        }
    }
    None
}

/// A lower bound for `P_{p,q,D_N,a,V}` from the best of several ascents.
pub fn optimize_sharp_constant(
    p: Exponent,
    q: Exponent,
    op: &DifferentialOperator,
    a: f64,
    body: &ConvexBody,
    config: &OptimizerConfig,
) -> Result<SharpConstantEstimate> {
    let start = Instant::now();
    let params = ConstantParams::new(p, q, op, body, Some(a));
    if config.closed_form_shortcut && p == Exponent::TWO && q == Exponent::TWO {
        let mut est = closed_p22(body, op, a)?;
        est.notes.push("p = q = 2: lattice maximum".into());
        return Ok(est);
    }
    let obj = RatioObjective::new(p, q, op, a, body, config.oversampling)?;
    if obj.multipliers.iter().all(|m| m.norm() == 0.0) {
        let mut est = SharpConstantEstimate::new(0.0, EstimateKind::ExactClosedForm, params, 0.0);
        est.notes.push("operator annihilates the spectrum".into());
        return Ok(est);
    }
    if config.restarts == 0 {
        return Err(crate::error::invalid("at least one restart is required"));
    }
    let outcomes: Vec<Option<Outcome>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&obj, config, r))
        .collect();
    let mut best: Option<(usize, &Outcome)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(o) = o {
            if best.is_none_or(|(_, b)| o.value > b.value) {
                best = Some((i, o));
            }
        }
    }
    let Some((index, outcome)) = best else {
        return Err(Error::Optimizer(format!(
            "all {} restarts degenerated",
            config.restarts
        )));
    };
    let failed = outcomes.iter().filter(|o| o.is_none()).count();
    let mut est = SharpConstantEstimate::new(
        outcome.value,
        EstimateKind::LowerBoundOptimizer,
        params,
        outcome.tolerance,
    );
    est.restart_values = outcomes
        .iter()
        .map(|o| o.as_ref().map_or(f64::NAN, |o| o.value))
        .collect();
    est.notes.push(format!(
        "best restart {index} of {}, {} lattice points, grid {}",
        config.restarts,
        obj.points.len(),
        obj.grid_side()
    ));
    if failed > 0 {
        est.notes.push(format!("{failed} restarts degenerated"));
    }
    if config.real {
        est.notes.push("real coefficients pattern".into());
    }
    est.notes
        .push(format!("{} ms", start.elapsed().as_millis()));
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{closed_p22, closed_p2_inf};

    fn cube(m: usize) -> ConvexBody {
        ConvexBody::cube(m, 1.0).unwrap()
    }

    fn id(m: usize) -> DifferentialOperator {
        DifferentialOperator::identity(m).unwrap()
    }

    #[test]
    fn two_infinity_matches_closed_form() {
        let cfg = OptimizerConfig::default();
        let est = optimize_sharp_constant(
            Exponent::TWO,
            Exponent::INFINITY,
            &id(1),
            1.0,
            &cube(1),
            &cfg,
        )
        .unwrap();
        let exact = closed_p2_inf(&cube(1), &id(1), 1.0).unwrap().value;
        assert!((est.value - exact).abs() < 1e-8, "{} vs {exact}", est.value);
        let hits = est
            .restart_values
            .iter()
            .filter(|v| (*v - exact).abs() < 1e-4)
            .count();
        assert!(hits * 10 >= 9 * est.restart_values.len());
    }

    #[test]
    fn two_infinity_in_the_plane_with_derivative() {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        let op = DifferentialOperator::partial(2, 1).unwrap();
        let cfg = OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::default()
        };
        let est = optimize_sharp_constant(Exponent::TWO, Exponent::INFINITY, &op, 3.0, &body, &cfg)
            .unwrap();
        let exact = closed_p2_inf(&body, &op, 3.0).unwrap().value;
        assert!(
            (est.value - exact).abs() < 1e-6 * exact,
            "{} vs {exact}",
            est.value
        );
    }

    #[test]
    fn ascent_reaches_lattice_maximum_without_shortcut() {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        let op = DifferentialOperator::partial(2, 0).unwrap();
        let cfg = OptimizerConfig {
            closed_form_shortcut: false,
            restarts: 4,
            ..OptimizerConfig::default()
        };
        let est =
            optimize_sharp_constant(Exponent::TWO, Exponent::TWO, &op, 2.5, &body, &cfg).unwrap();
        let exact = closed_p22(&body, &op, 2.5).unwrap().value;
        assert!(est.value <= exact * (1.0 + 1e-12));
        assert!(est.value > exact * (1.0 - 1e-6), "{} vs {exact}", est.value);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = OptimizerConfig {
            restarts: 3,
            seed: 17,
            ..OptimizerConfig::default()
        };
        let p = Exponent::new(4.0).unwrap();
        let run =
            || optimize_sharp_constant(p, Exponent::INFINITY, &id(1), 4.0, &cube(1), &cfg).unwrap();
        let (x, y) = (run(), run());
        assert_eq!(x.value.to_bits(), y.value.to_bits());
        assert_eq!(x.restart_values.len(), 3);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let op = DifferentialOperator::from_terms(
            2,
            [
                (vec![1, 0], Complex64::new(1.0, 0.5)),
                (vec![0, 1], Complex64::new(-0.3, 0.0)),
            ],
        )
        .unwrap();
        let body = ConvexBody::ball(2, 1.0).unwrap();
        for (p, q) in [(1.0, 2.0), (2.0, 4.0), (3.0, 3.0), (1.5, 6.0)] {
            let obj = RatioObjective::new(
                Exponent::new(p).unwrap(),
                Exponent::new(q).unwrap(),
                &op,
                2.0,
                &body,
                4,
            )
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let x: Vec<f64> = (0..obj.len())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let (_, g) = obj.value_and_gradient(&x);
            let h = 1e-6;
            let mut worst: f64 = 0.0;
            let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for i in 0..x.len() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * h);
                worst = worst.max((fd - g[i]).abs() / scale);
            }
            assert!(worst < 1e-6, "p={p} q={q}: {worst}");
        }
    }

    #[test]
    fn real_projection_is_idempotent_and_real() {
        let obj = RatioObjective::new(Exponent::TWO, Exponent::INFINITY, &id(2), 2.0, &cube(2), 4)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut x: Vec<f64> = (0..obj.len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        obj.project_real(&mut x);
        let once = x.clone();
        obj.project_real(&mut x);
        assert_eq!(once, x);
        let t = obj.polynomial(&x).unwrap();
        assert!(t.evaluate_at(&[0.3, -1.1]).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn real_toggle_runs() {
        let cfg = OptimizerConfig {
            real: true,
            restarts: 2,
            ..OptimizerConfig::default()
        };
        let est = optimize_sharp_constant(
            Exponent::ONE,
            Exponent::INFINITY,
            &id(1),
            4.0,
            &cube(1),
            &cfg,
        )
        .unwrap();
        let complex = optimize_sharp_constant(
            Exponent::ONE,
            Exponent::INFINITY,
            &id(1),
            4.0,
            &cube(1),
            &OptimizerConfig {
                restarts: 2,
                ..OptimizerConfig::default()
            },
        )
        .unwrap();
        assert!(est.value > 0.0 && complex.value > 0.0);
    }

    #[test]
    fn sup_denominator_respects_bernstein() {
        // P_{∞,∞,d/dx,a,[−1,1]} = 1 at integer a.
        let d = DifferentialOperator::partial(1, 0).unwrap();
        let cfg = OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::default()
        };
        let est = optimize_sharp_constant(
            Exponent::INFINITY,
            Exponent::INFINITY,
            &d,
            3.0,
            &cube(1),
            &cfg,
        )
        .unwrap();
        assert!(est.value <= 1.0 + 1e-9, "{}", est.value);
        assert!(est.value > 0.95, "{}", est.value);
    }
}
