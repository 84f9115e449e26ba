//! Centrally symmetric convex bodies and their integer lattice points.
//!
//! Every shape is reduced to a canonical ℓ^μ-ellipsoid `(σ, μ)` before any
//! derived quantity is computed, so the aliased spellings (a cube versus an
//! ℓ^∞-ellipsoid with equal semi-axes, a ball versus an ℓ²-ellipsoid) agree
//! to the last bit.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};

/// Hard cap on the ambient dimension.
pub const MAX_DIM: usize = 4;

/// Default cap on the number of lattice points a single enumeration may return.
pub const DEFAULT_LATTICE_CAP: usize = 10_000_000;

/// Relative guard band used by floating-point membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `Π_σ = {|x_j| ≤ σ_j}`.
    Parallelepiped { sigma: Vec<f64> },
    /// `Q_M = {|x_j| ≤ M}`.
    Cube { half_side: f64 },
    /// `B_M = {|x| ≤ M}`.
    Ball { radius: f64 },
    /// `{(Σ|x_j/σ_j|^μ)^{1/μ} ≤ 1}` with `μ ∈ [1, ∞]`.
    LpEllipsoid { sigma: Vec<f64>, mu: f64 },
}

/// A closed, centrally symmetric convex body in `ℝ^m`, `1 ≤ m ≤ 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyRepr", into = "BodyRepr")]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    sigma: Vec<f64>,
    mu: f64,
}

#[derive(Serialize, Deserialize)]
struct BodyRepr {
    dim: usize,
    shape: Shape,
}

impl From<ConvexBody> for BodyRepr {
    fn from(b: ConvexBody) -> Self {
        BodyRepr {
            dim: b.dim,
            shape: b.shape,
        }
    }
}

impl TryFrom<BodyRepr> for ConvexBody {
    type Error = Error;
    fn try_from(r: BodyRepr) -> Result<Self> {
        match r.shape {
            Shape::Parallelepiped { sigma } => Self::parallelepiped(sigma),
            Shape::Cube { half_side } => Self::cube(r.dim, half_side),
            Shape::Ball { radius } => Self::ball(r.dim, radius),
            Shape::LpEllipsoid { sigma, mu } => Self::lp_ellipsoid(sigma, mu),
        }
    }
}

fn check_dim(m: usize) -> Result<()> {
    if m == 0 || m > MAX_DIM {
        return Err(Error::UnsupportedDimension(m));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

impl ConvexBody {
    pub fn parallelepiped(sigma: Vec<f64>) -> Result<Self> {
        check_dim(sigma.len())?;
        for &s in &sigma {
            check_positive("sigma", s)?;
        }
        Ok(Self::build(sigma.len(), Shape::Parallelepiped { sigma }))
    }

    pub fn cube(dim: usize, half_side: f64) -> Result<Self> {
        check_dim(dim)?;
        check_positive("cube half-side", half_side)?;
        Ok(Self::build(dim, Shape::Cube { half_side }))
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        check_positive("ball radius", radius)?;
        Ok(Self::build(dim, Shape::Ball { radius }))
    }

    pub fn lp_ellipsoid(sigma: Vec<f64>, mu: f64) -> Result<Self> {
        check_dim(sigma.len())?;
        for &s in &sigma {
            check_positive("sigma", s)?;
        }
        if mu.is_nan() || mu < 1.0 {
            return Err(invalid(format!(
                "ellipsoid exponent must lie in [1, inf], got {mu}"
            )));
        }
        Ok(Self::build(sigma.len(), Shape::LpEllipsoid { sigma, mu }))
    }

    fn build(dim: usize, shape: Shape) -> Self {
        let (sigma, mu) = match &shape {
            Shape::Parallelepiped { sigma } => (sigma.clone(), f64::INFINITY),
            Shape::Cube { half_side } => (vec![*half_side; dim], f64::INFINITY),
            Shape::Ball { radius } => (vec![*radius; dim], 2.0),
            Shape::LpEllipsoid { sigma, mu } => (sigma.clone(), *mu),
        };
        ConvexBody {
            dim,
            shape,
            sigma,
            mu,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Semi-axes of the canonical ellipsoid; also the half-widths of the
    /// bounding box.
    pub fn semi_axes(&self) -> &[f64] {
        &self.sigma
    }

    /// Exponent μ of the canonical ellipsoid (`∞` for boxes).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_box(&self) -> bool {
        self.mu.is_infinite()
    }

    /// Euclidean ball, possibly spelled as an ℓ²-ellipsoid with equal axes.
    pub fn is_ball(&self) -> bool {
        self.mu == 2.0 && self.sigma.iter().all(|&s| s == self.sigma[0])
    }

    /// The body `γV`.
    pub fn dilate(&self, gamma: f64) -> Result<Self> {
        check_positive("dilation factor", gamma)?;
        let shape = match &self.shape {
            Shape::Parallelepiped { sigma } => Shape::Parallelepiped {
                sigma: sigma.iter().map(|s| s * gamma).collect(),
            },
            Shape::Cube { half_side } => Shape::Cube {
                half_side: half_side * gamma,
            },
            Shape::Ball { radius } => Shape::Ball {
                radius: radius * gamma,
            },
            Shape::LpEllipsoid { sigma, mu } => Shape::LpEllipsoid {
                sigma: sigma.iter().map(|s| s * gamma).collect(),
                mu: *mu,
            },
        };
        Ok(Self::build(self.dim, shape))
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Minkowski functional: `V = {gauge ≤ 1}`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let scaled = x.iter().zip(&self.sigma).map(|(xi, s)| (xi / s).abs());
        lp_combine(scaled, self.mu)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0 + MEMBERSHIP_TOL
    }

    /// `‖y‖_V^* = sup_{x∈V} |x·y|`.
    pub fn dual_norm(&self, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        let scaled = y.iter().zip(&self.sigma).map(|(yi, s)| (yi * s).abs());
        Ok(lp_combine(scaled, conjugate_exponent(self.mu)))
    }

    /// `|V|_m`, closed form.
    pub fn volume(&self) -> f64 {
        let m = self.dim as f64;
        let prod: f64 = self.sigma.iter().map(|s| 2.0 * s).product();
        if self.mu.is_infinite() {
            return prod;
        }
        let mu = self.mu;
        if mu == 2.0 {
            // π^{m/2}/Γ(1 + m/2) over 2^m, exact for the supported dimensions.
            let unit = [2.0, PI, 4.0 * PI / 3.0, PI * PI / 2.0][self.dim - 1];
            return prod * unit / 2f64.powi(self.dim as i32);
        }
        prod * gamma(1.0 + 1.0 / mu).powf(m) / gamma(1.0 + m / mu)
    }

    /// `diam(V) = 2 max_{x∈V} |x|`.
    pub fn diameter(&self) -> f64 {
        let mu = self.mu;
        let max_sq = if mu.is_infinite() {
            self.sigma.iter().map(|s| s * s).sum::<f64>()
        } else if mu <= 2.0 {
            // |x|² is convex in t_j = |x_j/σ_j|^μ on the simplex: a vertex wins.
            self.sigma.iter().fold(0.0f64, |a, s| a.max(s * s))
        } else {
            // Concave in t: stationary point t_j ∝ σ_j^{2μ/(μ-2)}.
            let e = 2.0 * mu / (mu - 2.0);
            let smax = self.sigma.iter().fold(0.0f64, |a, &s| a.max(s));
            let w: Vec<f64> = self.sigma.iter().map(|s| (s / smax).powf(e)).collect();
            let total: f64 = w.iter().sum();
            self.sigma
                .iter()
                .zip(&w)
                .map(|(s, wi)| s * s * (wi / total).powf(2.0 / mu))
                .sum()
        };
        2.0 * max_sq.sqrt()
    }

    /// `c = sup_y Σ|y_j| / ‖y‖_V^*`, the smallest `c` with `Q_1 ⊆ cV`, i.e.
    /// the gauge of the all-ones vertex.
    pub fn ell1_over_dual_constant(&self) -> f64 {
        let ones = vec![1.0; self.dim];
        self.gauge(&ones)
    }

    /// Half-width of the section along coordinate `prefix.len()` given the
    /// values of the preceding coordinates, or `None` when the prefix lies
    /// outside the projection of the body.
    pub fn section_half_width(&self, prefix: &[f64]) -> Option<f64> {
        let j = prefix.len();
        debug_assert!(j < self.dim);
        if self.mu.is_infinite() {
            let inside = prefix
                .iter()
                .zip(&self.sigma)
                .all(|(x, s)| x.abs() <= s * (1.0 + MEMBERSHIP_TOL));
            return inside.then_some(self.sigma[j]);
        }
        let used: f64 = prefix
            .iter()
            .zip(&self.sigma)
            .map(|(x, s)| (x / s).abs().powf(self.mu))
            .sum();
        if used > 1.0 {
            return None;
        }
        Some(self.sigma[j] * (1.0 - used).powf(1.0 / self.mu))
    }

    /// Whether `k ∈ aV`, with the same boundary rule as [`Self::lattice_points`].
    pub fn contains_lattice(&self, k: &[i64], a: f64) -> bool {
        k.len() == self.dim && LatticeMembership::new(self, a).contains(k)
    }

    /// `aV ∩ ℤ^m` with the default cap.
    pub fn lattice_points(&self, a: f64) -> Result<LatticeSet> {
        self.lattice_points_capped(a, DEFAULT_LATTICE_CAP)
    }

    /// `aV ∩ ℤ^m`, scanning the bounding box of `aV` in lexicographic order.
    /// Boundary points are included.
    pub fn lattice_points_capped(&self, a: f64, cap: usize) -> Result<LatticeSet> {
        check_positive("scale a", a)?;
        let bounds: Vec<i64> = self
            .sigma
            .iter()
            .map(|s| (a * s * (1.0 + MEMBERSHIP_TOL)).floor() as i64)
            .collect();
        let scan: u128 = bounds.iter().map(|b| (2 * *b + 1) as u128).product();
        // Boxes are filled exactly; other shapes fill at least 1/24 of their
        // bounding box for m ≤ 4.
        let scan_limit = if self.is_box() {
            cap as u128
        } else {
            24 * cap as u128
        };
        if scan > scan_limit {
            return Err(Error::LatticeCapExceeded { count: scan, cap });
        }
        let test = LatticeMembership::new(self, a);
        let mut points = Vec::new();
        let mut k: Vec<i64> = bounds.iter().map(|b| -b).collect();
        loop {
            if test.contains(&k) {
                if points.len() == cap {
                    return Err(Error::LatticeCapExceeded {
                        count: points.len() as u128 + 1,
                        cap,
                    });
                }
                points.push(k.clone());
            }
            // Odometer increment, last coordinate fastest.
            let mut j = self.dim;
            loop {
                if j == 0 {
                    return Ok(LatticeSet {
                        dim: self.dim,
                        points,
                    });
                }
                j -= 1;
                if k[j] < bounds[j] {
                    k[j] += 1;
                    break;
                }
                k[j] = -bounds[j];
            }
        }
    }

    /// Grammar: `pi:1,2`, `cube:1`, `ball:1`, `lp:1,2:3` (μ may be `inf`).
    /// `dim` is required for `cube` and `ball` and checked against the axis
    /// count of `pi` and `lp`.
    pub fn parse(spec: &str, dim: Option<usize>) -> Result<Self> {
        let spec = spec.trim();
        let (kind, rest) = spec.split_once(':').ok_or_else(|| Error::Parse {
            position: spec.len(),
            message: "expected '<kind>:<parameters>'".into(),
        })?;
        let offset = kind.len() + 1;
        let need_dim = |what: &str| {
            dim.ok_or_else(|| Error::Parse {
                position: 0,
                message: format!("{what} requires an explicit dimension"),
            })
        };
        let body = match kind {
            "pi" => Self::parallelepiped(parse_list(rest, offset)?)?,
            "cube" => Self::cube(need_dim("cube")?, parse_scalar(rest, offset)?)?,
            "ball" => Self::ball(need_dim("ball")?, parse_scalar(rest, offset)?)?,
            "lp" => {
                let (axes, mu) = rest.rsplit_once(':').ok_or_else(|| Error::Parse {
                    position: spec.len(),
                    message: "expected 'lp:<sigma list>:<mu>'".into(),
                })?;
                let mu_pos = offset + axes.len() + 1;
                let mu = if mu.trim().eq_ignore_ascii_case("inf") {
                    f64::INFINITY
                } else {
                    parse_scalar(mu, mu_pos)?
                };
                Self::lp_ellipsoid(parse_list(axes, offset)?, mu)?
            }
            other => {
                return Err(Error::Parse {
                    position: 0,
                    message: format!("unknown body kind {other:?}; expected pi, cube, ball or lp"),
                })
            }
        };
        if let Some(m) = dim {
            if m != body.dim {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: body.dim,
                });
            }
        }
        Ok(body)
    }
}

fn parse_scalar(s: &str, position: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        position,
        message: format!("expected a number, found {s:?}"),
    })
}

fn parse_list(s: &str, position: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut pos = position;
    for item in s.split(',') {
        out.push(parse_scalar(item, pos)?);
        pos += item.len() + 1;
    }
    Ok(out)
}

impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.shape {
            Shape::Parallelepiped { sigma } => write!(f, "pi:{}", list(sigma)),
            Shape::Cube { half_side } => write!(f, "cube:{half_side}"),
            Shape::Ball { radius } => write!(f, "ball:{radius}"),
            Shape::LpEllipsoid { sigma, mu } => {
                if mu.is_infinite() {
                    write!(f, "lp:{}:inf", list(sigma))
                } else {
                    write!(f, "lp:{}:{mu}", list(sigma))
                }
            }
        }
    }
}

/// `(Σ v_j^r)^{1/r}`, or the maximum for `r = ∞`; evaluated with the
/// largest entry factored out.
pub(crate) fn lp_combine(values: impl Iterator<Item = f64>, r: f64) -> f64 {
    let v: Vec<f64> = values.collect();
    let vmax = v.iter().fold(0.0f64, |a, &b| a.max(b));
    if r.is_infinite() || vmax == 0.0 {
        return vmax;
    }
    if r == 1.0 {
        return v.iter().sum();
    }
    let s: f64 = v.iter().map(|x| (x / vmax).powf(r)).sum();
    vmax * s.powf(1.0 / r)
}

/// Hölder conjugate `λ` of `μ`: `1/μ + 1/λ = 1`.
pub(crate) fn conjugate_exponent(mu: f64) -> f64 {
    if mu.is_infinite() {
        1.0
    } else if mu == 1.0 {
        f64::INFINITY
    } else {
        mu / (mu - 1.0)
    }
}

/// Membership of `k/a` in `V` for integer `k`, exact where the parameters
/// allow it.
struct LatticeMembership {
    sigma_scaled: Vec<f64>,
    mu: f64,
    /// For balls whose squared scaled radius is an integer up to rounding.
    exact_radius_sq: Option<i64>,
}

impl LatticeMembership {
    fn new(body: &ConvexBody, a: f64) -> Self {
        let sigma_scaled: Vec<f64> = body.sigma.iter().map(|s| a * s).collect();
        let exact_radius_sq = if body.is_ball() {
            let r2 = sigma_scaled[0] * sigma_scaled[0];
            let n = r2.round();
            ((r2 - n).abs() <= MEMBERSHIP_TOL * r2.max(1.0) && n < 9.0e15).then_some(n as i64)
        } else {
            None
        };
        LatticeMembership {
            sigma_scaled,
            mu: body.mu,
            exact_radius_sq,
        }
    }

    fn contains(&self, k: &[i64]) -> bool {
        if let Some(r2) = self.exact_radius_sq {
            return k.iter().map(|x| x * x).sum::<i64>() <= r2;
        }
        if self.mu.is_infinite() {
            return k
                .iter()
                .zip(&self.sigma_scaled)
                .all(|(x, s)| (*x as f64).abs() <= s * (1.0 + MEMBERSHIP_TOL));
        }
        let g = lp_combine(
            k.iter()
                .zip(&self.sigma_scaled)
                .map(|(x, s)| (*x as f64 / s).abs()),
            self.mu,
        );
        g <= 1.0 + MEMBERSHIP_TOL
    }
}

/// A finite, lexicographically sorted set of integer vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSet {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl LatticeSet {
    /// Sorts and deduplicates.
    pub fn from_points(dim: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        check_dim(dim)?;
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        points.sort();
        points.dedup();
        Ok(LatticeSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.points.iter().map(|p| p.as_slice())
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        self.points
            .binary_search_by(|p| p.as_slice().cmp(k))
            .is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|k| {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            self.contains(&neg)
        })
    }

    pub fn is_subset_of(&self, other: &LatticeSet) -> bool {
        self.iter().all(|k| other.contains(k))
    }

    /// `max_k |k_j|` per axis.
    pub fn max_abs(&self) -> Vec<i64> {
        let mut out = vec![0; self.dim];
        for k in &self.points {
            for (o, x) in out.iter_mut().zip(k) {
                *o = (*o).max(x.abs());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi12() -> ConvexBody {
        ConvexBody::parallelepiped(vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn dual_norm_examples() {
        assert_eq!(pi12().dual_norm(&[3.0, 1.0]).unwrap(), 5.0);
        let b = ConvexBody::ball(2, 2.0).unwrap();
        assert!((b.dual_norm(&[3.0, 4.0]).unwrap() - 10.0).abs() < 1e-14);
        assert_eq!(b.dual_norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            b.dual_norm(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let q = ConvexBody::cube(3, 2.0).unwrap();
        assert_eq!(q.dual_norm(&[1.0, -2.0, 3.0]).unwrap(), 12.0);
        // lp: σ=(1,2), μ=3 ⇒ λ=3/2
        let lp = ConvexBody::lp_ellipsoid(vec![1.0, 2.0], 3.0).unwrap();
        let expect = (1.0f64.powf(1.5) + 2.0f64.powf(1.5)).powf(1.0 / 1.5);
        assert!((lp.dual_norm(&[1.0, 1.0]).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn volume_examples() {
        assert_eq!(ConvexBody::cube(2, 1.0).unwrap().volume(), 4.0);
        assert!((ConvexBody::ball(2, 1.0).unwrap().volume() - PI).abs() < 1e-15);
        assert_eq!(pi12().volume(), 8.0);
        assert!((ConvexBody::ball(3, 1.0).unwrap().volume() - 4.0 * PI / 3.0).abs() < 1e-13);
        // ℓ¹ ball in 2D is a square of area 2.
        let l1 = ConvexBody::lp_ellipsoid(vec![1.0, 1.0], 1.0).unwrap();
        assert!((l1.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn diameter_examples() {
        let q = ConvexBody::cube(2, 1.5).unwrap();
        assert!((q.diameter() - 2.0 * 1.5 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(ConvexBody::ball(3, 2.0).unwrap().diameter(), 4.0);
        assert!((pi12().diameter() - 2.0 * 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn diameter_lp_matches_boundary_search() {
        let body = ConvexBody::lp_ellipsoid(vec![1.0, 2.0], 4.0).unwrap();
        let mut best = 0.0f64;
        for i in 0..200_000 {
            let t = 2.0 * PI * i as f64 / 200_000.0;
            let d = [t.cos(), t.sin()];
            let g = body.gauge(&d);
            best = best.max(1.0 / g);
        }
        assert!((body.diameter() - 2.0 * best).abs() < 1e-8);
    }

    #[test]
    fn lattice_examples() {
        let b = ConvexBody::ball(2, 1.0)
            .unwrap()
            .lattice_points(1.0)
            .unwrap();
        assert_eq!(
            b.points(),
            &[vec![-1, 0], vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(
            ConvexBody::cube(2, 1.0)
                .unwrap()
                .lattice_points(2.0)
                .unwrap()
                .len(),
            25
        );
        let p = pi12().lattice_points(1.0).unwrap();
        assert_eq!(p.len(), 15);
        assert!(p.iter().all(|k| k[0].abs() <= 1 && k[1].abs() <= 2));
    }

    #[test]
    fn boundary_points_are_included() {
        // 5² = 3² + 4²: (3,4) sits exactly on the boundary of 5·B_1.
        let set = ConvexBody::ball(2, 1.0)
            .unwrap()
            .lattice_points(5.0)
            .unwrap();
        assert!(set.contains(&[3, 4]));
        assert!(set.contains(&[-5, 0]));
        // Scaled radius 0.1·30 = 3 with rounding error in the product.
        let set = ConvexBody::ball(1, 0.1)
            .unwrap()
            .lattice_points(30.0)
            .unwrap();
        assert!(set.contains(&[3]));
    }

    #[test]
    fn lattice_cap_is_enforced() {
        let err = ConvexBody::cube(2, 1.0)
            .unwrap()
            .lattice_points_capped(10.0, 100)
            .unwrap_err();
        assert!(matches!(err, Error::LatticeCapExceeded { .. }));
        assert!(ConvexBody::cube(2, 1.0)
            .unwrap()
            .lattice_points(-1.0)
            .is_err());
    }

    #[test]
    fn ell1_constant_examples() {
        let b = ConvexBody::ball(2, 2.0).unwrap();
        assert!((b.ell1_over_dual_constant() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(
            ConvexBody::cube(3, 4.0).unwrap().ell1_over_dual_constant(),
            0.25
        );
    }

    #[test]
    fn aliased_shapes_agree() {
        for m in 1..=3 {
            let c = ConvexBody::cube(m, 1.3).unwrap();
            let e = ConvexBody::lp_ellipsoid(vec![1.3; m], f64::INFINITY).unwrap();
            assert_eq!(c.volume(), e.volume());
            assert_eq!(c.diameter(), e.diameter());
            assert_eq!(
                c.lattice_points(3.0).unwrap(),
                e.lattice_points(3.0).unwrap()
            );
            let b = ConvexBody::ball(m, 1.3).unwrap();
            let e2 = ConvexBody::lp_ellipsoid(vec![1.3; m], 2.0).unwrap();
            assert!((b.volume() - e2.volume()).abs() <= 1e-12 * b.volume());
            assert_eq!(b.diameter(), e2.diameter());
            assert_eq!(
                b.lattice_points(3.0).unwrap(),
                e2.lattice_points(3.0).unwrap()
            );
            assert_eq!(b.ell1_over_dual_constant(), e2.ell1_over_dual_constant());
        }
    }

    #[test]
    fn parse_round_trip() {
        for (s, m) in [
            ("pi:1,2", None),
            ("cube:1", Some(2)),
            ("ball:1.5", Some(3)),
            ("lp:1,2:3", None),
            ("lp:1,2:inf", Some(2)),
        ] {
            let b = ConvexBody::parse(s, m).unwrap();
            assert_eq!(b.to_string(), s);
            assert_eq!(ConvexBody::parse(&b.to_string(), Some(b.dim())).unwrap(), b);
        }
        let err = ConvexBody::parse("lp:1,x:3", None).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                position: 5,
                message: "expected a number, found \"x\"".into()
            }
        );
        assert!(ConvexBody::parse("cube:1", None).is_err());
        assert!(ConvexBody::parse("pi:1,2", Some(3)).is_err());
        assert!(ConvexBody::parse("blob:1", Some(1)).is_err());
    }

    #[test]
    fn section_half_widths() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        assert!((b.section_half_width(&[0.6]).unwrap() - 0.8).abs() < 1e-15);
        assert!(b.section_half_width(&[1.2]).is_none());
        assert_eq!(pi12().section_half_width(&[0.5]), Some(2.0));
        assert_eq!(pi12().section_half_width(&[]), Some(1.0));
    }
}
