use std::path::PathBuf;
use std::time::Instant;

use bnsharp_core::bandlimited::{akhiezer_tensor, cs_extremal, sinc_squared_half};
use bnsharp_core::constants::{
    candidate_lower_bound_e, crude_upper, e_reference, limit_study, optimize_sharp_constant,
    p_estimate, SharpConstantEstimate,
};
use bnsharp_core::levitan::{check_norm_contraction, check_pointwise_bound};
use bnsharp_core::{
    BandLimitedFunction, ConvexBody, DifferentialOperator, Error, Result, TruncationConfig,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind, FunctionChoice};
use crate::output::{write_csv_atomic, write_manifest, Manifest};

/// One row of a constants CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub p: String,
    pub q: String,
    pub operator: String,
    pub body: String,
    pub a: String,
    pub kind: String,
    pub value: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub runtime_ms: u128,
}

/// One row of a Levitan CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevitanRow {
    pub a: f64,
    pub property: String,
    pub bound: f64,
    pub observed: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Constants(Vec<ConstantRow>),
    Levitan(Vec<LevitanRow>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Constants(r) => r.len(),
            Table::Levitan(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Results of one experiment before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub reference: Option<SharpConstantEstimate>,
    pub extrapolated: Option<f64>,
    pub notes: Vec<String>,
}

fn row(est: &SharpConstantEstimate, seed: u64, started: Instant) -> ConstantRow {
    ConstantRow {
        p: est.params.p.to_string(),
        q: est.params.q.to_string(),
        operator: est.params.operator.clone(),
        body: est.params.body.clone(),
        a: est.params.a_label(),
        kind: est.kind.to_string(),
        value: est.value,
        tolerance: est.tolerance,
        seed,
        runtime_ms: started.elapsed().as_millis(),
    }
}

/// Runs the experiment and returns its table. Sweep points run
/// concurrently; rows come back in sweep order.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutput> {
    let body = config.body()?;
    let op = config.operator()?;
    let a_values = config.sweep.points();
    if a_values.is_empty() {
        return Err(Error::Parse {
            position: 0,
            message: "empty sweep".into(),
        });
    }
    let (p, q, seed) = (config.p, config.q, config.seed);
    let opt = &config.optimizer;
    let per_a = |f: &(dyn Fn(f64) -> Result<SharpConstantEstimate> + Sync)| {
        a_values
            .par_iter()
            .map(|&a| {
                let t = Instant::now();
                f(a).map(|e| row(&e, seed, t))
            })
            .collect::<Result<Vec<_>>>()
    };
    let mut notes = Vec::new();
    match config.kind {
        ExperimentKind::Constant => {
            let mut rows = per_a(&|a| p_estimate(p, q, &op, &body, a, opt))?;
            let reference = e_reference(p, q, &op, &body);
            let t = Instant::now();
            if let Some(r) = &reference {
                rows.push(row(r, seed, t));
            }
            let t = Instant::now();
            rows.push(row(&crude_upper(p, q, &op, &body)?, seed, t));
            Ok(RunOutput {
                table: Table::Constants(rows),
                reference,
                extrapolated: None,
                notes,
            })
        }
        ExperimentKind::Optimize => {
            let rows = per_a(&|a| optimize_sharp_constant(p, q, &op, a, &body, opt))?;
            Ok(RunOutput {
                table: Table::Constants(rows),
                reference: e_reference(p, q, &op, &body),
                extrapolated: None,
                notes,
            })
        }
        ExperimentKind::Converge => {
            let t = Instant::now();
            let study = limit_study(p, q, &op, &body, &a_values, opt)?;
            let rows = study
                .rows
                .iter()
                .map(|r| row(&r.estimate, seed, t))
                .collect();
            Ok(RunOutput {
                table: Table::Constants(rows),
                reference: study.reference,
                extrapolated: study.extrapolated,
                notes,
            })
        }
        ExperimentKind::Candidates => {
            let mut rows = Vec::new();
            let trunc = TruncationConfig::default();
            for f in test_functions(
                &body,
                &op,
                p.into(),
                config.function.unwrap_or(FunctionChoice::All),
            )? {
                let t = Instant::now();
                match candidate_lower_bound_e(&f, p, q, &op, &trunc) {
                    Ok(e) => {
                        notes.push(format!("row {}: {}", rows.len(), f.label()));
                        rows.push(row(&e, seed, t));
                    }
                    Err(e @ Error::NotIntegrable { .. }) => {
                        notes.push(format!("skipped {}: {e}", f.label()));
                    }
                    Err(e) => return Err(e),
                }
            }
            let t = Instant::now();
            rows.push(row(&crude_upper(p, q, &op, &body)?, seed, t));
            Ok(RunOutput {
                table: Table::Constants(rows),
                reference: e_reference(p, q, &op, &body),
                extrapolated: None,
                notes,
            })
        }
        ExperimentKind::LevitanCheck => {
            let choice = match config.function {
                None | Some(FunctionChoice::All) if body.is_box() => FunctionChoice::H2,
                None | Some(FunctionChoice::All) => FunctionChoice::Cs,
                Some(c) => c,
            };
            let f = test_functions(
                &body,
                &DifferentialOperator::identity(body.dim())?,
                p.into(),
                choice,
            )?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidParameter("no test function for this body".into()))?;
            notes.push(format!("function {}", f.label()));
            let rows = a_values
                .par_iter()
                .map(|&a| levitan_rows(&f, a, config))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            Ok(RunOutput {
                table: Table::Levitan(rows),
                reference: None,
                extrapolated: None,
                notes,
            })
        }
    }
}

/// Functions of exponential type `V` for candidate bounds and Levitan
/// checks. Akhiezer functions are built to be integrable in `L_p`.
pub fn test_functions(
    body: &ConvexBody,
    op: &DifferentialOperator,
    p: f64,
    choice: FunctionChoice,
) -> Result<Vec<BandLimitedFunction>> {
    let m = body.dim();
    let mut out = Vec::new();
    let want = |c: FunctionChoice| choice == c || choice == FunctionChoice::All;
    let cube_side = body
        .semi_axes()
        .iter()
        .all(|s| *s == body.semi_axes()[0])
        .then(|| body.semi_axes()[0]);
    if want(FunctionChoice::H2) {
        match (body.is_box(), cube_side) {
            (true, Some(side)) => out.push(sinc_squared_half(m)?.dilate(side)?),
            _ if choice == FunctionChoice::H2 => {
                return Err(Error::InvalidParameter("h2 needs a cube body".into()))
            }
            _ => {}
        }
    }
    if want(FunctionChoice::Akhiezer) {
        if body.is_box() {
            let sigma = body.semi_axes();
            let smallest = sigma.iter().copied().fold(f64::INFINITY, f64::min);
            for div in [4.0, 16.0, 64.0] {
                out.push(akhiezer_tensor(sigma, p, smallest / div)?);
            }
        } else if choice == FunctionChoice::Akhiezer {
            return Err(Error::InvalidParameter("akhiezer needs a box body".into()));
        }
    }
    if want(FunctionChoice::Cs) {
        match cs_extremal(body, op) {
            Ok(f) => out.push(f),
            Err(e) if choice == FunctionChoice::Cs => return Err(e),
            Err(_) => {}
        }
    }
    Ok(out)
}

/// Sample points with `|x| ≤ a/2` along the diagonal.
fn sample_points(m: usize, a: f64) -> Vec<Vec<f64>> {
    [0.05, 0.1, 0.25, 0.5]
        .iter()
        .map(|t| vec![t * a / (m as f64).sqrt(); m])
        .collect()
}

fn levitan_rows(
    f: &BandLimitedFunction,
    a: f64,
    config: &ExperimentConfig,
) -> Result<Vec<LevitanRow>> {
    let mut rows = Vec::new();
    let c = check_norm_contraction(f, a, config.p, config.eps, &TruncationConfig::default())?;
    rows.push(LevitanRow {
        a,
        property: format!("norm-contraction-p={}", config.p),
        bound: c.rhs,
        observed: c.lhs,
        slack: c.slack + c.certificate,
    });
    for r in check_pointwise_bound(f, a, &sample_points(f.dim(), a), config.eps)? {
        let r2: f64 = r.x.iter().map(|v| v * v).sum();
        rows.push(LevitanRow {
            a,
            property: format!("pointwise-|x|={}", r2.sqrt()),
            bound: r.bound,
            observed: r.observed,
            slack: r.slack,
        });
    }
    Ok(rows)
}

/// What [`run`] wrote.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub rows: usize,
    pub csv: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    /// The CSV text when no output path was configured.
    pub stdout: Option<String>,
}

/// Executes the experiment and writes the CSV (atomically) and its
/// manifest when an output path is configured; otherwise returns the CSV.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let out = execute(config)?;
    let csv = crate::output::render_csv(&out.table)?;
    let manifest = Manifest::new(config, &out);
    match &config.output {
        Some(path) => {
            write_csv_atomic(path, &csv)?;
            let mpath = write_manifest(path, &manifest)?;
            Ok(RunSummary {
                rows: out.table.len(),
                csv: Some(path.clone()),
                manifest: Some(mpath),
                stdout: None,
            })
        }
        None => Ok(RunSummary {
            rows: out.table.len(),
            csv: None,
            manifest: None,
            stdout: Some(csv),
        }),
    }
}
