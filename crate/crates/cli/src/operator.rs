//! Operator specs: `"1,1:1,0"` is `b_{(1,1)} = 1`, terms are joined by `+`,
//! and `laplacian:m` expands to `Σ ∂²/∂x_j²`. `id` is the identity.

use bnsharp_core::{DifferentialOperator, Error, Result};
use num_complex::Complex64;

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// Parses an operator. With `dim = None` the dimension comes from the
/// first multi-index; `id` then needs `dim`.
pub fn operator_parse(spec: &str, dim: Option<usize>) -> Result<DifferentialOperator> {
    let trimmed = spec.trim();
    if let Some(rest) = trimmed.strip_prefix("laplacian:") {
        let m: usize = rest.trim().parse().map_err(|_| {
            parse_err(
                "laplacian:".len(),
                format!("expected a dimension, found {rest:?}"),
            )
        })?;
        check_dim(dim, m, 0)?;
        return DifferentialOperator::laplacian(m);
    }
    if trimmed == "id" || trimmed == "identity" {
        let m = dim.ok_or_else(|| parse_err(0, "identity requires an explicit dimension"))?;
        return DifferentialOperator::identity(m);
    }

    let mut terms: Vec<(Vec<u32>, Complex64)> = Vec::new();
    let mut order: Option<u32> = None;
    let mut offset = 0;
    for raw in spec.split('+') {
        let lead = raw.len() - raw.trim_start().len();
        let start = offset + lead;
        let term = raw.trim();
        offset += raw.len() + 1;
        if term.is_empty() {
            return Err(parse_err(start, "empty term"));
        }
        let (alpha_s, coef_s) = term
            .split_once(':')
            .ok_or_else(|| parse_err(start, "expected '<alpha>:<re>,<im>'"))?;
        let alpha = alpha_s
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| parse_err(start, format!("bad multi-index entry {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        let coef_pos = start + alpha_s.len() + 1;
        let parts: Vec<&str> = coef_s.split(',').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(coef_pos, format!("bad coefficient {s:?}")))
        };
        let b = match parts.as_slice() {
            [re] => Complex64::new(num(re)?, 0.0),
            [re, im] => Complex64::new(num(re)?, num(im)?),
            _ => return Err(parse_err(coef_pos, "coefficient is '<re>' or '<re>,<im>'")),
        };
        let n: u32 = alpha.iter().sum();
        match order {
            None => order = Some(n),
            Some(o) if o != n => {
                return Err(parse_err(
                    start,
                    format!("operator is not homogeneous: orders {o} and {n}"),
                ))
            }
            _ => {}
        }
        if let Some((first, _)) = terms.first() {
            if first.len() != alpha.len() {
                return Err(parse_err(
                    start,
                    format!(
                        "multi-index has {} entries, expected {}",
                        alpha.len(),
                        first.len()
                    ),
                ));
            }
        }
        terms.push((alpha, b));
    }
    let m = terms[0].0.len();
    check_dim(dim, m, 0)?;
    DifferentialOperator::from_terms(m, terms)
}

fn check_dim(dim: Option<usize>, found: usize, position: usize) -> Result<()> {
    match dim {
        Some(m) if m != found => Err(parse_err(
            position,
            format!("operator has dimension {found}, expected {m}"),
        )),
        _ => Ok(()),
    }
}

/// The canonical spec of an operator; parses back to the same operator.
pub fn operator_spec(op: &DifferentialOperator) -> String {
    op.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_expands() {
        let op = operator_parse("laplacian:2", None).unwrap();
        let terms: Vec<_> = op.terms().map(|(a, b)| (a.to_vec(), b)).collect();
        assert_eq!(
            terms,
            vec![
                (vec![0, 2], Complex64::new(1.0, 0.0)),
                (vec![2, 0], Complex64::new(1.0, 0.0))
            ]
        );
    }

    #[test]
    fn derivative_in_one_dimension() {
        let op = operator_parse("1:1,0", Some(1)).unwrap();
        assert_eq!(op, DifferentialOperator::partial(1, 0).unwrap());
    }

    #[test]
    fn mixed_orders_rejected_at_second_term() {
        match operator_parse("2,0:1,0 + 0,1:1,0", None) {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 10);
                assert!(message.contains("homogeneous"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_round_trips() {
        for s in ["1,1:1,0", "2,0:1,-0.5 + 0,2:3,0", "laplacian:3", "0,0:1,0"] {
            let op = operator_parse(s, None).unwrap();
            assert_eq!(operator_parse(&operator_spec(&op), None).unwrap(), op);
        }
    }

    #[test]
    fn bad_coefficient_position() {
        match operator_parse("1,0:x,0", None) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
    }
}
