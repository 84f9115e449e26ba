//! Text and JSON serialization of trigonometric polynomials.
//!
//! Text format: one coefficient per line, `k_1 … k_m re im`, with an
//! optional `# dim m` header. Floats use the shortest round-trip spelling.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SpectrumBudget, TrigPolynomial};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
pub(super) struct PolyRepr {
    dim: usize,
    coefficients: Vec<CoeffRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<SpectrumBudget>,
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

impl From<TrigPolynomial> for PolyRepr {
    fn from(t: TrigPolynomial) -> Self {
        PolyRepr {
            dim: t.dim,
            coefficients: t
                .coeffs
                .into_iter()
                .map(|(k, c)| CoeffRepr {
                    k,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
            budget: t.budget,
        }
    }
}

impl TryFrom<PolyRepr> for TrigPolynomial {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        let t = TrigPolynomial::from_coefficients(
            r.dim,
            r.coefficients
                .into_iter()
                .map(|c| (c.k, Complex64::new(c.re, c.im))),
        )?;
        match r.budget {
            Some(b) => t.with_budget(b.body, b.a),
            None => Ok(t),
        }
    }
}

impl TrigPolynomial {
    pub fn to_text(&self) -> String {
        let mut s = format!("# dim {}\n", self.dim);
        for (k, c) in self.iter() {
            for kj in k {
                write!(s, "{kj} ").unwrap();
            }
            writeln!(s, "{:?} {:?}", c.re, c.im).unwrap();
        }
        s
    }

    /// Parses [`TrigPolynomial::to_text`] output. Without a header the
    /// dimension is the token count of the first record minus two.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut coeffs = Vec::new();
        let mut offset = 0usize;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.trim();
            if body.is_empty() {
                continue;
            }
            if let Some(comment) = body.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("dim") {
                    let m = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or(Error::Parse {
                            position: start,
                            message: "malformed dimension header".into(),
                        })?;
                    dim = Some(m);
                }
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let m = *dim.get_or_insert(tokens.len().saturating_sub(2));
            if tokens.len() != m + 2 || m == 0 {
                return Err(Error::Parse {
                    position: start,
                    message: format!("expected {} fields, found {}", m + 2, tokens.len()),
                });
            }
            let bad = |what: &str, tok: &str| Error::Parse {
                position: start + line.find(tok).unwrap_or(0),
                message: format!("invalid {what} {tok:?}"),
            };
            let k = tokens[..m]
                .iter()
                .map(|t| t.parse::<i64>().map_err(|_| bad("frequency", t)))
                .collect::<Result<Vec<_>>>()?;
            let re: f64 = tokens[m].parse().map_err(|_| bad("real part", tokens[m]))?;
            let im: f64 = tokens[m + 1]
                .parse()
                .map_err(|_| bad("imaginary part", tokens[m + 1]))?;
            coeffs.push((k, Complex64::new(re, im)));
        }
        let dim = dim.ok_or(Error::Parse {
            position: 0,
            message: "no dimension header and no records".into(),
        })?;
        TrigPolynomial::from_coefficients(dim, coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            position: e.column(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::trigpoly::random_polynomial;

    #[test]
    fn text_and_json_round_trip_exactly() {
        let set = ConvexBody::ball(3, 1.0)
            .unwrap()
            .lattice_points(2.0)
            .unwrap();
        let mut t = random_polynomial(&set, 11).unwrap();
        t = t
            .add(
                &TrigPolynomial::from_coefficients(
                    3,
                    [(vec![0, 0, 0], Complex64::new(1e-300, -3.5e17))],
                )
                .unwrap(),
            )
            .unwrap();
        assert_eq!(TrigPolynomial::from_text(&t.to_text()).unwrap(), t);
        assert_eq!(TrigPolynomial::from_json(&t.to_json()).unwrap(), t);
        let b = t
            .clone()
            .with_budget(ConvexBody::ball(3, 1.0).unwrap(), 2.0)
            .unwrap();
        assert_eq!(TrigPolynomial::from_json(&b.to_json()).unwrap(), b);
    }

    #[test]
    fn text_without_header_and_errors() {
        let t = TrigPolynomial::from_text("1 0 0.5 0\n-1 0 0.5 0\n").unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 2);
        let err = TrigPolynomial::from_text("# dim 1\n1 0.5 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { position: 14, .. }), "{err:?}");
        assert!(TrigPolynomial::from_text("# dim 2\n1 0.5 0\n").is_err());
    }
}
