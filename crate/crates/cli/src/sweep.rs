use std::fmt;
use std::str::FromStr;

use bnsharp_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Geom,
}

/// Values of `a`: either `start:stop:count[:lin|geom]` or an explicit
/// comma-separated list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Range {
        start: f64,
        stop: f64,
        count: usize,
        spacing: Spacing,
    },
    List(Vec<f64>),
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Sweep::List(v) => v.clone(),
            Sweep::Range {
                start,
                stop,
                count,
                spacing,
            } => {
                if *count == 1 {
                    return vec![*start];
                }
                let n = (*count - 1) as f64;
                (0..*count)
                    .map(|i| {
                        if i + 1 == *count {
                            return *stop;
                        }
                        let t = i as f64 / n;
                        match spacing {
                            Spacing::Lin => start + (stop - start) * t,
                            Spacing::Geom => start * (stop / start).powf(t),
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::List(v) => v.len(),
            Sweep::Range { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn number(s: &str, position: usize) -> Result<f64, Error> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(position, format!("expected a number, found {s:?}")))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(parse_err(position, format!("a must be positive, got {v}")));
    }
    Ok(v)
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(parse_err(0, "empty sweep"));
        }
        if !s.contains(':') {
            let mut pos = 0;
            let mut out = Vec::new();
            for part in s.split(',') {
                out.push(number(part, pos)?);
                pos += part.len() + 1;
            }
            return Ok(Sweep::List(out));
        }
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(parse_err(0, "expected 'start:stop:count[:lin|geom]'"));
        }
        let at = |i: usize| parts[..i].iter().map(|p| p.len() + 1).sum::<usize>();
        let start = number(parts[0], 0)?;
        let stop = number(parts[1], at(1))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(at(2), format!("bad count {:?}", parts[2])))?;
        if count == 0 {
            return Err(parse_err(at(2), "empty sweep"));
        }
        if stop < start {
            return Err(parse_err(at(1), "stop lies below start"));
        }
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") => Spacing::Lin,
            Some("geom") => Spacing::Geom,
            Some(other) => {
                return Err(parse_err(
                    at(3),
                    format!("spacing is lin or geom, found {other:?}"),
                ))
            }
        };
        Ok(Sweep::Range {
            start,
            stop,
            count,
            spacing,
        })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sweep::List(v) => {
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&items.join(","))
            }
            Sweep::Range {
                start,
                stop,
                count,
                spacing,
            } => {
                let sp = match spacing {
                    Spacing::Lin => "lin",
                    Spacing::Geom => "geom",
                };
                write!(f, "{start}:{stop}:{count}:{sp}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_range_hits_both_ends() {
        let s: Sweep = "1:100:25:geom".parse().unwrap();
        let p = s.points();
        assert_eq!(p.len(), 25);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[24], 100.0);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!((p[12] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn list_and_round_trip() {
        for text in ["4,8,16", "1:2:3:lin", "0.5:64:7:geom"] {
            let s: Sweep = text.parse().unwrap();
            assert_eq!(s.to_string().parse::<Sweep>().unwrap(), s);
        }
        assert_eq!(
            "4,8,16".parse::<Sweep>().unwrap().points(),
            vec![4.0, 8.0, 16.0]
        );
    }

    #[test]
    fn empty_sweeps_rejected() {
        assert!("".parse::<Sweep>().is_err());
        assert!("1:2:0".parse::<Sweep>().is_err());
        match "1:2:3:log".parse::<Sweep>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
    }
}
