use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::body::MAX_DIM;
use crate::error::{invalid, Error, Result};

/// Homogeneous constant-coefficient operator `D_N = Σ_{|α|=N} b_α D^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct DifferentialOperator {
    dim: usize,
    order: u32,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

impl From<DifferentialOperator> for OperatorRepr {
    fn from(op: DifferentialOperator) -> Self {
        OperatorRepr {
            dim: op.dim,
            terms: op
                .terms
                .into_iter()
                .map(|(alpha, b)| TermRepr {
                    alpha,
                    re: b.re,
                    im: b.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<OperatorRepr> for DifferentialOperator {
    type Error = Error;
    fn try_from(r: OperatorRepr) -> Result<Self> {
        DifferentialOperator::from_terms(
            r.dim,
            r.terms
                .into_iter()
                .map(|t| (t.alpha, Complex64::new(t.re, t.im))),
        )
    }
}

impl DifferentialOperator {
    /// Validates homogeneity and drops zero coefficients. Repeated
    /// multi-indices are summed.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>,
    ) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        let mut order: Option<u32> = None;
        for (alpha, b) in terms {
            if alpha.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: alpha.len(),
                });
            }
            if !(b.re.is_finite() && b.im.is_finite()) {
                return Err(invalid("operator coefficients must be finite"));
            }
            let n: u32 = alpha.iter().sum();
            match order {
                None => order = Some(n),
                Some(o) if o != n => {
                    return Err(invalid(format!(
                        "operator is not homogeneous: orders {o} and {n}"
                    )))
                }
                _ => {}
            }
            *map.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += b;
        }
        map.retain(|_, b| *b != Complex64::new(0.0, 0.0));
        let order = order.ok_or_else(|| invalid("operator has no terms"))?;
        if map.is_empty() {
            return Err(invalid("operator has only zero coefficients"));
        }
        if order == 0 && map.values().next() != Some(&Complex64::new(1.0, 0.0)) {
            return Err(invalid("order-0 operator must be the identity"));
        }
        Ok(DifferentialOperator {
            dim,
            order,
            terms: map,
        })
    }

    /// `D_0`, the identity.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::monomial(vec![0; dim])
    }

    /// `∂/∂x_j` (zero-based `j`).
    pub fn partial(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(invalid(format!(
                "axis {j} out of range for dimension {dim}"
            )));
        }
        let mut alpha = vec![0; dim];
        alpha[j] = 1;
        Self::monomial(alpha)
    }

    /// `D^α` with unit coefficient.
    pub fn monomial(alpha: Vec<u32>) -> Result<Self> {
        let dim = alpha.len();
        Self::from_terms(dim, [(alpha, Complex64::new(1.0, 0.0))])
    }

    /// `Σ_j ∂²/∂x_j²`.
    pub fn laplacian(dim: usize) -> Result<Self> {
        Self::from_terms(
            dim,
            (0..dim).map(|j| {
                let mut a = vec![0; dim];
                a[j] = 2;
                (a, Complex64::new(1.0, 0.0))
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(a, b)| (a.as_slice(), *b))
    }

    pub fn is_identity(&self) -> bool {
        self.order == 0
    }

    /// The multi-index and coefficient of a single-term operator.
    pub fn as_monomial(&self) -> Option<(&[u32], Complex64)> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(|b| b.im == 0.0)
    }

    /// `(Σ|b_α|^r)^{1/r}`.
    pub fn coefficient_norm(&self, r: f64) -> f64 {
        crate::body::lp_combine(self.terms.values().map(|b| b.norm()), r)
    }

    /// `Δ_N(y) = Σ b_α y^α`.
    pub fn symbol(&self, y: &[f64]) -> Result<Complex64> {
        self.check_len(y.len())?;
        Ok(self.symbol_unchecked(y))
    }

    /// `Δ_N(iy) = i^N Δ_N(y)`.
    pub fn symbol_at_imaginary(&self, y: &[f64]) -> Result<Complex64> {
        self.check_len(y.len())?;
        Ok(self.multiplier_f64(y))
    }

    /// Spectral multiplier `Δ_N(ik)` at an integer frequency.
    pub fn multiplier(&self, k: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, b) in &self.terms {
            let mono: f64 = alpha
                .iter()
                .zip(k)
                .map(|(a, kj)| (*kj as f64).powi(*a as i32))
                .product();
            acc += b * mono;
        }
        acc * i_pow(self.order)
    }

    pub(crate) fn multiplier_f64(&self, y: &[f64]) -> Complex64 {
        self.symbol_unchecked(y) * i_pow(self.order)
    }

    pub(crate) fn symbol_unchecked(&self, y: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, b) in &self.terms {
            let mono: f64 = alpha
                .iter()
                .zip(y)
                .map(|(a, yj)| yj.powi(*a as i32))
                .product();
            acc += b * mono;
        }
        acc
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n,
            });
        }
        Ok(())
    }
}

/// `i^n`.
pub(crate) fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Terms `α₁,…,α_m:re,im` joined by ` + `.
impl fmt::Display for DifferentialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (alpha, b) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let a: Vec<String> = alpha.iter().map(|x| x.to_string()).collect();
            write!(f, "{}:{},{}", a.join(","), b.re, b.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_examples() {
        let d1 = DifferentialOperator::partial(2, 0).unwrap();
        assert_eq!(d1.symbol(&[3.0, 5.0]).unwrap(), Complex64::new(3.0, 0.0));
        let lap = DifferentialOperator::laplacian(2).unwrap();
        assert_eq!(
            lap.symbol_at_imaginary(&[1.0, 2.0]).unwrap(),
            Complex64::new(-5.0, 0.0)
        );
        let id = DifferentialOperator::identity(3).unwrap();
        assert_eq!(
            id.symbol(&[0.3, -2.0, 9.0]).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(d1.symbol(&[1.0]).is_err());
    }

    #[test]
    fn homogeneity_is_enforced() {
        let r = DifferentialOperator::from_terms(
            2,
            [
                (vec![2, 0], Complex64::new(1.0, 0.0)),
                (vec![0, 1], Complex64::new(1.0, 0.0)),
            ],
        );
        assert!(r.is_err());
        assert!(
            DifferentialOperator::from_terms(1, [(vec![0], Complex64::new(2.0, 0.0))]).is_err()
        );
        assert!(
            DifferentialOperator::from_terms(1, [(vec![1], Complex64::new(0.0, 0.0))]).is_err()
        );
    }

    #[test]
    fn display_and_serde_round_trip() {
        let op = DifferentialOperator::from_terms(
            2,
            [
                (vec![1, 1], Complex64::new(1.0, 0.0)),
                (vec![2, 0], Complex64::new(0.5, -2.0)),
            ],
        )
        .unwrap();
        assert_eq!(op.to_string(), "1,1:1,0 + 2,0:0.5,-2");
        let json = serde_json::to_string(&op).unwrap();
        let back: DifferentialOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
    }
}
