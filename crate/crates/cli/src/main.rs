mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;

use args::*;
use rqc::analytics::{
    brickwall_fidelity_perturbative, predict, qv_contour, solvable_fidelity, FidelityPrediction, Provenance,
};
use rqc::circuit::{CircuitConfig, InitialState, LayerOrder, Model};
use rqc::experiments::{fit_scatter, heavy_output_points, run_sweep, Axis, Format, SweepSpec, Table};
use rqc::routing::{Architecture, NoiseParams, RoutingStats, SwapChannel};
use rqc::validation::{heavy_output_grid, heavy_output_p_grid, run_criterion, Budget, Outcome, CRITERIA};
use rqc::Seed;

/// A flag combination the parser accepts but the command cannot use.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

/// Runs `f` and reports a parse failure as a usage error.
fn flag<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| Usage(format!("--{name}: {e:#}")).into())
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Fidelity(a) => sweep(a, false),
        Command::Brickwall(a) => sweep(a, true),
        Command::Analytic(a) => analytic(a),
        Command::RouteStats(a) => route_stats(a),
        Command::QvContour(a) => contour(a),
        Command::HuVsF(a) => heavy(a),
        Command::Validate(a) => validate(a),
    }
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("RQC_THREADS") {
            Ok(v) => Some(flag("threads", || v.trim().parse::<usize>().context("RQC_THREADS"))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return usage("--threads must be >= 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn architecture(a: &ArchArgs, l: Option<usize>) -> Result<(Architecture, Option<usize>)> {
    match a.arch {
        ArchKind::Fc => Ok((Architecture::FullyConnected, l)),
        ArchKind::Line => Ok((Architecture::Line, l)),
        ArchKind::Grid => {
            let (Some(d), Some(side)) = (a.d, a.side) else {
                return usage("--arch grid needs --d and --side");
            };
            let arch = flag("side", || Ok(Architecture::grid(d, side)?))?;
            let n = side.pow(d as u32);
            if l.is_some_and(|l| l != n) {
                return usage(format!("--L must equal side^d = {n} on this grid"));
            }
            Ok((arch, Some(n)))
        }
    }
}

fn write_table(table: &Table, out: &OutputArgs) -> Result<()> {
    let format = match out.format {
        FormatKind::Csv => Format::Csv,
        FormatKind::Json => Format::Json,
    };
    match &out.out {
        Some(path) => rqc::experiments::write_results(table, path, format)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let text = table.render(format)?;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn write_meta(out: &Option<std::path::PathBuf>, sigma: f64, p: f64, channel: SwapChannel) -> Result<()> {
    let channel = match channel {
        SwapChannel::Omission => "omission",
        SwapChannel::Pulse => "pulse",
    };
    eprintln!("sigma {sigma} corresponds to swap omission probability p = {p} ({channel} channel)");
    if let Some(path) = out {
        let mut name = path.as_os_str().to_owned();
        name.push(".meta.json");
        let meta = json!({ "sigma": sigma, "p": p, "channel": channel });
        std::fs::write(Path::new(&name), serde_json::to_string_pretty(&meta)? + "\n")?;
    }
    Ok(())
}

struct Axes {
    l: Vec<usize>,
    t: Vec<usize>,
    alpha: Vec<f64>,
    p: Vec<f64>,
}

fn axes(c: &CircuitArgs, default_l: Option<usize>) -> Result<Axes> {
    let l = match &c.l {
        Some(s) => flag("L", || parse_usize_list(s))?,
        None => match default_l {
            Some(l) => vec![l],
            None => return usage("--L is required"),
        },
    };
    let t = flag("T", || parse_usize_list(&c.t))?;
    let alpha = flag("alpha", || parse_list(&c.alpha))?;
    let p = match &c.p {
        Some(s) => flag("p", || parse_list(s))?,
        None => vec![0.0],
    };
    let multi = [l.len(), t.len(), alpha.len(), p.len()].iter().filter(|n| **n > 1).count();
    if multi > 1 {
        return usage("at most one of --L, --T, --alpha, --p may list several values");
    }
    Ok(Axes { l, t, alpha, p })
}

fn circuit_template(c: &CircuitArgs, brickwall: bool) -> Result<(CircuitConfig, Axes)> {
    let given_l = match &c.l {
        Some(s) if !s.contains([',', '.']) => Some(flag("L", || Ok(s.trim().parse::<usize>()?))?),
        _ => None,
    };
    let (arch, default_l) = if brickwall {
        (Architecture::Line, given_l)
    } else {
        architecture(&c.arch, given_l)?
    };
    let ax = axes(c, default_l)?;
    if let Some(odd) = ax.l.iter().find(|l| *l % 2 == 1) {
        return usage(format!("--L must be even for circuits, got {odd}"));
    }
    let model = if brickwall {
        Model::BrickWall
    } else {
        match c.model {
            ModelKind::Original => Model::Original,
            ModelKind::Solvable => Model::Solvable,
            ModelKind::Brickwall => Model::BrickWall,
        }
    };
    let channel = match c.channel {
        ChannelKind::Omission => SwapChannel::Omission,
        ChannelKind::Pulse => SwapChannel::Pulse,
    };
    let noise = match c.sigma {
        Some(sigma) => NoiseParams::from_sigma(ax.alpha[0], sigma, channel)?,
        None if channel == SwapChannel::Pulse => return usage("--channel pulse needs --sigma"),
        None => NoiseParams::new(ax.alpha[0], ax.p[0])?,
    };
    let config = CircuitConfig {
        l: ax.l[0],
        t: ax.t[0],
        arch,
        noise,
        model,
        init: match c.init {
            InitKind::Zero => InitialState::ZeroState,
            InitKind::RandomBasis => InitialState::RandomBasisState,
        },
        order: match c.order {
            OrderKind::GatesFirst => LayerOrder::GatesFirst,
            OrderKind::PermutationFirst => LayerOrder::PermutationFirst,
        },
    };
    config.validate()?;
    Ok((config, ax))
}

fn sweep_axis(ax: &Axes) -> (Axis, Vec<f64>) {
    if ax.l.len() > 1 {
        (Axis::L, ax.l.iter().map(|&v| v as f64).collect())
    } else if ax.alpha.len() > 1 {
        (Axis::Alpha, ax.alpha.clone())
    } else if ax.p.len() > 1 {
        (Axis::P, ax.p.clone())
    } else {
        (Axis::T, ax.t.iter().map(|&v| v as f64).collect())
    }
}

fn sweep(a: SweepArgs, brickwall: bool) -> Result<ExitCode> {
    set_threads(a.output.threads)?;
    let (template, ax) = circuit_template(&a.circuit, brickwall)?;
    if a.circuit.sigma.is_some() && ax.p.len() > 1 {
        return usage("--sigma takes a single value");
    }
    if let Some(sigma) = template.noise.sigma {
        write_meta(&a.output.out, sigma, template.noise.p, template.noise.channel)?;
    }
    let (axis, values) = sweep_axis(&ax);
    let spec = SweepSpec {
        template,
        axis,
        values,
        trials: a.trials,
        seed: Seed::new(a.output.seed),
    };
    let rows = run_sweep(&spec)?;
    write_table(&Table::from_records(&rows), &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn analytic(a: AnalyticArgs) -> Result<ExitCode> {
    let brickwall = a.circuit.model == ModelKind::Brickwall;
    let (template, ax) = circuit_template(&a.circuit, brickwall)?;
    let mode = match &a.mode {
        Some(m) => flag("mode", || Ok(Provenance::parse(m)?))?,
        None if brickwall => Provenance::BrickwallPerturbative,
        None if matches!(template.arch, Architecture::FullyConnected) => Provenance::Exact,
        None => Provenance::LowerBound,
    };
    let (axis, values) = sweep_axis(&ax);
    let mut preds = Vec::new();
    for v in &values {
        let (mut l, mut t, mut alpha, mut p) = (template.l, template.t, template.noise.alpha, template.noise.p);
        match axis {
            Axis::L => l = *v as usize,
            Axis::T => t = *v as usize,
            Axis::Alpha => alpha = *v,
            Axis::P => p = *v,
        }
        let pred = match mode {
            // Noiseless routing: delta = 4^L exactly on every architecture.
            Provenance::Exact | Provenance::LowerBound if p == 0.0 => FidelityPrediction {
                l,
                t,
                alpha,
                p,
                arch: template.arch.clone(),
                provenance: mode,
                value: solvable_fidelity(l, t, alpha, 4f64.powi(l as i32))?,
            },
            Provenance::BrickwallPerturbative => FidelityPrediction {
                l,
                t,
                alpha,
                p,
                arch: template.arch.clone(),
                provenance: mode,
                value: brickwall_fidelity_perturbative(l, t, alpha),
            },
            _ => predict(l, t, alpha, p, &template.arch, mode)?,
        };
        preds.push(pred);
    }
    if preds.len() == 1 && a.output.out.is_none() {
        println!("{:?}", preds[0].value);
    } else {
        write_table(&Table::from_records(&preds), &a.output)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn route_stats(a: RouteArgs) -> Result<ExitCode> {
    set_threads(a.output.threads)?;
    let given = match &a.l {
        Some(s) => flag("L", || parse_usize_list(s))?,
        None => Vec::new(),
    };
    let (arch, grid_l) = architecture(&a.arch, if given.len() == 1 { Some(given[0]) } else { None })?;
    let sizes = match (grid_l, given.is_empty()) {
        (Some(n), _) if matches!(arch, Architecture::Grid { .. }) => vec![n],
        (_, false) => given,
        _ => return usage("--L is required"),
    };
    if a.samples < 2 {
        return usage("--samples must be >= 2");
    }
    let seed = Seed::new(a.output.seed);
    let rows = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| Ok(RoutingStats::collect(n, &arch, a.samples, seed.derive(i as u64))?))
        .collect::<Result<Vec<_>>>()?;
    write_table(&Table::from_records(&rows), &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn contour(a: ContourArgs) -> Result<ExitCode> {
    let (arch, l) = architecture(&a.arch, a.l)?;
    let Some(l) = l else { return usage("--L is required") };
    let t = a.t.unwrap_or(l);
    let grid = flag("p", || parse_list(&a.p))?;
    let points = qv_contour(l, t, &arch, &grid, a.h_ideal)?;
    write_table(&Table::from_records(&points), &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn heavy(a: HeavyArgs) -> Result<ExitCode> {
    set_threads(a.output.threads)?;
    let (arch, l) = architecture(&a.arch, Some(a.l))?;
    let l = l.unwrap_or(a.l);
    let depths = flag("T", || parse_usize_list(&a.t))?;
    let pairs: Vec<(f64, f64)> = match &a.pairs {
        Some(s) => flag("pairs", || {
            s.split(',')
                .map(|pair| {
                    let (x, y) = pair.split_once(':').context("pairs look like alpha:p")?;
                    Ok((x.trim().parse()?, y.trim().parse()?))
                })
                .collect()
        })?,
        None => {
            let mut v = heavy_output_grid(&arch);
            v.extend(heavy_output_p_grid().into_iter().map(|p| (0.0, p)));
            v
        }
    };
    let max_t = *depths.iter().max().context("no depths")?;
    let configs = pairs
        .iter()
        .map(|&(alpha, p)| Ok(CircuitConfig::new(l, max_t, arch.clone(), alpha, p)?))
        .collect::<Result<Vec<_>>>()?;
    let points = heavy_output_points(&configs, &depths, a.trials, Seed::new(a.output.seed))?;
    let table = Table::from_records(&points);
    let res = fit_scatter(points)?;
    eprintln!(
        "fit h = {:.6} F + {:.6}, r^2 {:.6}; linear map rms {:.6}",
        res.fit.slope, res.fit.intercept, res.fit.r_squared, res.map_rms
    );
    write_table(&table, &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn validate(a: ValidateArgs) -> Result<ExitCode> {
    set_threads(a.threads)?;
    let ids: Vec<usize> = match &a.only {
        Some(s) => flag("only", || parse_usize_list(s))?,
        None => (1..=CRITERIA.len()).collect(),
    };
    if let Some(bad) = ids.iter().find(|i| **i == 0 || **i > CRITERIA.len()) {
        return usage(format!("no criterion {bad}"));
    }
    if !(a.scale > 0.0) {
        return usage("--scale must be positive");
    }
    let mut budget = Budget { scale: a.scale, ..Budget::default() };
    if let Some(s) = a.seed {
        budget.seed = Seed::new(s);
    }
    let mut failed = 0;
    for id in ids {
        let o = run_criterion(id, &budget).unwrap_or_else(|e| Outcome {
            id,
            title: CRITERIA[id - 1],
            passed: false,
            detail: format!("error: {e}"),
        });
        println!("{o}");
        failed += usize::from(!o.passed);
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
