use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rqc", version, about = "Fidelity decay of random quantum circuits with faulty gates and routing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo fidelity sweep against the closed form.
    #[command(args_override_self = true)]
    Fidelity(SweepArgs),
    /// Closed-form fidelity prediction.
    #[command(args_override_self = true)]
    Analytic(AnalyticArgs),
    /// Swap and layer counts of the routing algorithms.
    #[command(args_override_self = true)]
    RouteStats(RouteArgs),
    /// Noise levels at which the quantum volume test is just passed.
    #[command(args_override_self = true)]
    QvContour(ContourArgs),
    /// Heavy-output frequency against fidelity, with a linear fit.
    #[command(args_override_self = true)]
    HuVsF(HeavyArgs),
    /// Brick-wall circuit sweep against its perturbative sum.
    #[command(args_override_self = true)]
    Brickwall(SweepArgs),
    /// Run the acceptance criteria.
    #[command(args_override_self = true)]
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArchKind {
    Fc,
    Line,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Original,
    Solvable,
    Brickwall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Zero,
    RandomBasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderKind {
    GatesFirst,
    PermutationFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Omission,
    Pulse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatKind {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct ArchArgs {
    #[arg(long, value_enum, default_value = "fc")]
    pub arch: ArchKind,
    /// Grid dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Grid side length.
    #[arg(long)]
    pub side: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (falls back to RQC_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON file whose keys are flag names; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CircuitArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    /// Qubit count, or a list such as "4,6,8" or "4..12:2".
    #[arg(long = "L")]
    pub l: Option<String>,
    /// Depth, or a list such as "1..12".
    #[arg(long = "T", default_value = "1")]
    pub t: String,
    #[arg(long, default_value = "0")]
    pub alpha: String,
    /// Swap omission probability.
    #[arg(long, conflicts_with = "sigma")]
    pub p: Option<String>,
    /// Pulse-length spread; converted to an omission probability unless
    /// the pulse channel is selected.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "original")]
    pub model: ModelKind,
    #[arg(long, value_enum, default_value = "zero")]
    pub init: InitKind,
    #[arg(long, value_enum, default_value = "gates-first")]
    pub order: OrderKind,
    #[arg(long, value_enum, default_value = "omission")]
    pub channel: ChannelKind,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    /// exact, asymptotic, brickwall, lower-bound or upper-bound-optimized;
    /// defaults to exact for fc, lower-bound for lattices.
    #[arg(long)]
    pub mode: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct RouteArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    #[arg(long = "L")]
    pub l: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ContourArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Grid of omission probabilities.
    #[arg(long, default_value = "0..0.2:0.002")]
    pub p: String,
    /// Ideal heavy-output frequency; (1 + ln 2)/2 when absent.
    #[arg(long)]
    pub h_ideal: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct HeavyArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    #[arg(long = "L", default_value_t = 10)]
    pub l: usize,
    /// Depths at which points are taken.
    #[arg(long = "T", default_value = "12,16,20")]
    pub t: String,
    /// (alpha, p) pairs as "a:p,a:p"; the built-in grid when absent.
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    /// Criteria to run, e.g. "2,4"; all when absent.
    #[arg(long)]
    pub only: Option<String>,
    /// Multiplier on the stated trial counts.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Parses "a,b,c", "a..b" (integers, inclusive) or "a..b:step".
pub fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    let s = s.trim();
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, step.trim().parse::<f64>().context("range step")?),
            None => (rest, 1.0),
        };
        let lo: f64 = lo.trim().parse().with_context(|| format!("range start in '{s}'"))?;
        let hi: f64 = hi.trim().parse().with_context(|| format!("range end in '{s}'"))?;
        if !(step > 0.0) || hi < lo {
            bail!("empty or invalid range '{s}'");
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| lo + i as f64 * step).collect());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number '{v}' in '{s}'")))
        .collect()
}

pub fn parse_usize_list(s: &str) -> anyhow::Result<Vec<usize>> {
    parse_list(s)?
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 {
                bail!("expected a non-negative integer, got {v}");
            }
            Ok(v as usize)
        })
        .collect()
}

/// Inserts the flags of a `--config` JSON object right after the subcommand,
/// so flags given on the command line, which come later, override them.
pub fn expand_config(args: Vec<String>) -> anyhow::Result<Vec<String>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let json: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing config {path}"))?;
    let obj = json.as_object().context("config must be a JSON object")?;
    let mut flags = Vec::new();
    for (key, value) in obj {
        let v = match value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            serde_json::Value::Array(items) => items
                .iter()
                .map(|x| match x {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            other => bail!("unsupported config value for '{key}': {other}"),
        };
        flags.push(format!("--{key}"));
        flags.push(v);
    }
    let at = rest.len().min(2);
    rest.splice(at..at, flags);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("1,2.5, 3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_usize_list("1..4").unwrap(), vec![1, 2, 3, 4]);
        let g = parse_list("0..0.01:0.0025").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[4] - 0.01).abs() < 1e-15);
        assert!(parse_list("3..1").is_err());
        assert!(parse_list("a,b").is_err());
        assert!(parse_usize_list("1.5").is_err());
    }
}
