//! Command-line grammar and the experiment configuration it describes.
//!
//! A config file uses the flag grammar with one flag per line, optionally
//! preceded by the subcommand; `#` starts a comment.

use std::path::PathBuf;

use bnsharp_core::{ConvexBody, Error, Exponent, OptimizerConfig, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::operator::operator_parse;
use crate::sweep::Sweep;

#[derive(Debug, Parser)]
#[command(
    name = "bnsharp",
    version,
    about = "Sharp Bernstein-Nikolskii constants",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best available value of P at each a, plus E references and bounds.
    Constant(CommonArgs),
    /// Optimizer lower bounds for P at each a.
    Optimize(CommonArgs),
    /// P along a sweep of a, with the E limit in the manifest.
    Converge(CommonArgs),
    /// Levitan polynomial properties along a sweep of a.
    LevitanCheck(CommonArgs),
    /// Lower bounds for E from explicit functions.
    Candidates(CommonArgs),
}

impl Command {
    pub fn parts(&self) -> (ExperimentKind, &CommonArgs) {
        match self {
            Command::Constant(a) => (ExperimentKind::Constant, a),
            Command::Optimize(a) => (ExperimentKind::Optimize, a),
            Command::Converge(a) => (ExperimentKind::Converge, a),
            Command::LevitanCheck(a) => (ExperimentKind::LevitanCheck, a),
            Command::Candidates(a) => (ExperimentKind::Candidates, a),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Read further flags from a file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spectral body: pi:σ₁,…  cube:M  ball:M  lp:σ₁,…:μ
    #[arg(long, default_value = "cube:1")]
    pub body: String,
    /// Dimension, required by cube and ball.
    #[arg(long)]
    pub m: Option<usize>,
    /// Operator: "α:re,im" terms joined by '+', laplacian:m, or id.
    #[arg(long, default_value = "id")]
    pub op: String,
    #[arg(long, default_value = "2")]
    pub p: String,
    #[arg(long, default_value = "inf")]
    pub q: String,
    /// start:stop:count[:lin|geom] or a comma-separated list.
    #[arg(long, default_value = "1")]
    pub a: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 400)]
    pub iterations: usize,
    #[arg(long, default_value_t = 4)]
    pub oversampling: usize,
    /// Restrict the optimizer to real-valued polynomials.
    #[arg(long)]
    pub real: bool,
    /// Run the optimizer even where p = q = 2 has a closed form.
    #[arg(long)]
    pub no_shortcut: bool,
    /// Test function for levitan-check and candidates.
    #[arg(long, value_enum)]
    pub function: Option<FunctionChoice>,
    /// Truncation tolerance for Levitan sums.
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "BNSHARP_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Constant,
    Optimize,
    Converge,
    LevitanCheck,
    Candidates,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Optimize => "optimize",
            Self::Converge => "converge",
            Self::LevitanCheck => "levitan-check",
            Self::Candidates => "candidates",
        }
    }
}

/// Test functions on a body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionChoice {
    /// `∏ h²(x_j/2)` dilated to the cube.
    H2,
    /// Tensor Akhiezer function on a box.
    Akhiezer,
    /// The Cauchy–Schwarz extremal of the body and operator.
    Cs,
    /// Every function that applies.
    All,
}

impl FunctionChoice {
    pub fn name(self) -> &'static str {
        match self {
            Self::H2 => "h2",
            Self::Akhiezer => "akhiezer",
            Self::Cs => "cs",
            Self::All => "all",
        }
    }
}

/// A validated experiment. Spec strings are kept verbatim so that the
/// emitted text parses back to an identical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub body: String,
    pub m: Option<usize>,
    pub operator: String,
    pub p: Exponent,
    pub q: Exponent,
    pub sweep: Sweep,
    pub optimizer: OptimizerConfig,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub function: Option<FunctionChoice>,
    pub eps: f64,
}

fn exponent(s: &str, flag: &str) -> Result<Exponent> {
    s.parse::<Exponent>().map_err(|e| match e {
        Error::Parse { position, message } => Error::Parse {
            position,
            message: format!("{flag}: {message}"),
        },
        other => other,
    })
}

fn located(flag: &str, e: Error) -> Error {
    match e {
        Error::Parse { position, message } => Error::Parse {
            position,
            message: format!("{flag}: {message}"),
        },
        other => Error::InvalidParameter(format!("{flag}: {other}")),
    }
}

impl ExperimentConfig {
    pub fn from_args(kind: ExperimentKind, args: &CommonArgs) -> Result<Self> {
        let p = exponent(&args.p, "--p")?;
        let q = exponent(&args.q, "--q")?;
        if p > q {
            return Err(Error::InvalidParameter(format!("p = {p} exceeds q = {q}")));
        }
        let sweep: Sweep = args.a.parse().map_err(|e| located("--a", e))?;
        let config = ExperimentConfig {
            kind,
            body: args.body.clone(),
            m: args.m,
            operator: args.op.clone(),
            p,
            q,
            sweep,
            optimizer: OptimizerConfig {
                restarts: args.restarts,
                seed: args.seed,
                oversampling: args.oversampling,
                iterations: args.iterations,
                real: args.real,
                closed_form_shortcut: !args.no_shortcut,
                ..OptimizerConfig::default()
            },
            output: args.output.clone(),
            seed: args.seed,
            function: args.function,
            eps: args.eps,
        };
        config.body()?;
        config.operator()?;
        Ok(config)
    }

    pub fn body(&self) -> Result<ConvexBody> {
        ConvexBody::parse(&self.body, self.m).map_err(|e| located("--body", e))
    }

    pub fn operator(&self) -> Result<bnsharp_core::DifferentialOperator> {
        let m = self.body()?.dim();
        operator_parse(&self.operator, Some(m)).map_err(|e| located("--op", e))
    }

    /// The config in file grammar: subcommand, then one flag per line.
    pub fn to_text(&self) -> String {
        let mut lines = vec![self.kind.name().to_string()];
        lines.push(format!("--body {}", self.body));
        if let Some(m) = self.m {
            lines.push(format!("--m {m}"));
        }
        lines.push(format!("--op {}", self.operator));
        lines.push(format!("--p {}", self.p));
        lines.push(format!("--q {}", self.q));
        lines.push(format!("--a {}", self.sweep));
        if let Some(o) = &self.output {
            lines.push(format!("--output {}", o.display()));
        }
        lines.push(format!("--seed {}", self.seed));
        lines.push(format!("--restarts {}", self.optimizer.restarts));
        lines.push(format!("--iterations {}", self.optimizer.iterations));
        lines.push(format!("--oversampling {}", self.optimizer.oversampling));
        if self.optimizer.real {
            lines.push("--real".into());
        }
        if !self.optimizer.closed_form_shortcut {
            lines.push("--no-shortcut".into());
        }
        if let Some(f) = self.function {
            lines.push(format!("--function {}", f.name()));
        }
        lines.push(format!("--eps {:e}", self.eps));
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut argv = vec!["bnsharp".to_string()];
        argv.extend(config_tokens(text)?);
        let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse {
            position: 0,
            message: e.to_string(),
        })?;
        let (kind, args) = cli.command.parts();
        Self::from_args(kind, args)
    }
}

/// Splits config text into argv tokens: a line is a subcommand, a bare
/// flag, or a flag followed by its value (the rest of the line).
pub fn config_tokens(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let here = offset;
        offset += raw.len() + 1;
        if line.is_empty() {
            continue;
        }
        if !line.starts_with("--") {
            if out.is_empty() {
                out.push(line.to_string());
                continue;
            }
            return Err(Error::Parse {
                position: here,
                message: format!("expected a flag, found {line:?}"),
            });
        }
        match line.split_once(char::is_whitespace) {
            Some((flag, value)) => {
                out.push(flag.to_string());
                out.push(value.trim().to_string());
            }
            None => out.push(line.to_string()),
        }
    }
    Ok(out)
}

/// Replaces `--config <file>` in `args` by the file's flags. Flags given
/// on the command line after the file's flags take precedence.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(i) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let (path, width) = match args[i].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => (
            args.get(i + 1).cloned().ok_or_else(|| Error::Parse {
                position: i,
                message: "--config needs a file".into(),
            })?,
            2,
        ),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
    let mut file = config_tokens(&text)?;
    let mut rest: Vec<String> = args[..i]
        .iter()
        .chain(&args[i + width..])
        .cloned()
        .collect();
    let program = if rest.is_empty() {
        "bnsharp".to_string()
    } else {
        rest.remove(0)
    };
    let file_cmd = file.first().filter(|t| !t.starts_with("--")).cloned();
    let cli_cmd = rest.first().filter(|t| !t.starts_with("--")).cloned();
    let mut out = vec![program];
    match (file_cmd, cli_cmd) {
        (Some(f), Some(c)) if f != c => {
            return Err(Error::InvalidParameter(format!(
                "config file is for {f:?}, command line asks for {c:?}"
            )))
        }
        (Some(f), Some(_)) => {
            file.remove(0);
            rest.remove(0);
            out.push(f);
        }
        (Some(f), None) => {
            file.remove(0);
            out.push(f);
        }
        (None, Some(c)) => {
            rest.remove(0);
            out.push(c);
        }
        (None, None) => {}
    }
    out.extend(file);
    out.extend(rest);
    Ok(out)
}
