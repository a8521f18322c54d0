//! Command-line front end.
//!
//! Curves go to stdout as CSV with a leading `# schema=...` comment line,
//! structured results as JSON, and a run manifest as one JSON line on
//! stderr. All floating-point output carries 12 significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::capacity::{ah_optimal, capacity_curve, cf_optimal, theorem1_search, OptimizerConfig, RatePoint};
use crate::channel::gaussian::{gaussian_capacity, gaussian_cf_r0, gaussian_cf_rstar, GaussianRelaySpec};
use crate::channel::{ChannelFile, DiscreteRelayChannel, StateChannel, StateChannelFile};
use crate::codec::{simulate_haf, SimParams};
use crate::error::{Error, Result};
use crate::info::{Pmf, Typicality};

pub const CAPACITY_CSV_SCHEMA: &str = "relaycap.capacity-csv/1";
pub const GAUSSIAN_CAPACITY_CSV_SCHEMA: &str = "relaycap.gaussian-capacity-csv/1";
pub const GAUSSIAN_CF_CSV_SCHEMA: &str = "relaycap.gaussian-cf-csv/1";
pub const VALIDATE_SCHEMA: &str = "relaycap.validate/1";
pub const RATE_REPORT_SCHEMA: &str = "relaycap.rate-report/1";
pub const MANIFEST_SCHEMA: &str = "relaycap.run-manifest/1";

/// Environment variable capping the worker count (0 = automatic).
pub const THREADS_ENV: &str = "RELAYCAP_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "relaycap",
    version,
    about = "Capacity and coding experiments for deterministic relay channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the relay output is a function of (x, y) and print the map.
    Validate {
        /// Channel JSON (relay or state form).
        channel: PathBuf,
    },
    /// Capacity curve over a grid of link rates, as CSV.
    Capacity {
        channel: PathBuf,
        /// Link rates: `start:step:stop`, a comma list, or a single value.
        #[arg(long, value_parser = parse_grid)]
        r0: Grid,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Closed-form Gaussian curves, as CSV.
    Gaussian(GaussianArgs),
    /// Monte Carlo error rate of hash-and-forward, as JSON.
    Simulate(SimulateArgs),
    /// Best compress-and-forward rate and its test channel, as JSON.
    CfRate {
        channel: PathBuf,
        #[arg(long)]
        r0: f64,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Best rate with rate-limited state information at the receiver, as JSON.
    Ah {
        /// State-channel JSON.
        channel: PathBuf,
        #[arg(long)]
        r0: f64,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct OptimizerArgs {
    /// Target certified gap in bits.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Random restarts of the nonconvex searches.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            tolerance: self.tol,
            max_iterations: self.max_iterations,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GaussianArgs {
    /// Transmit power.
    #[arg(long = "P", required_unless_present = "spec", conflicts_with = "spec")]
    pub power: Option<f64>,
    /// Noise variance at receiver and relay.
    #[arg(long = "N", required_unless_present = "spec", conflicts_with = "spec")]
    pub noise: Option<f64>,
    /// Noise correlation, +1 or -1.
    #[arg(
        long,
        required_unless_present = "spec",
        conflicts_with = "spec",
        allow_hyphen_values = true
    )]
    pub rho: Option<f64>,
    /// JSON file {"P": .., "N": .., "rho": ..} instead of the three flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Capacity C(R0) over these link rates.
    #[arg(long, value_parser = parse_grid, required_unless_present = "sigma2", conflicts_with = "sigma2")]
    pub r0: Option<Grid>,
    /// Parametric (R0, R*) over these description noise variances; also
    /// accepts `log:lo:hi:count`.
    #[arg(long, value_parser = parse_grid)]
    pub sigma2: Option<Grid>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    pub channel: PathBuf,
    /// Block length.
    #[arg(long)]
    pub n: usize,
    /// Message rate in bits per symbol.
    #[arg(long)]
    pub rate: f64,
    /// Link rate; the hash has floor(n r0) bits.
    #[arg(long)]
    pub r0: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Reuse one codebook and hash for every trial.
    #[arg(long)]
    pub fixed_codebook: bool,
    #[arg(long, default_value_t = Typicality::Weak)]
    pub typicality: Typicality,
    /// Input distribution as a comma list; uniform by default.
    #[arg(long, value_parser = parse_list)]
    pub px: Option<Grid>,
}

/// A list of numbers given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_list(s: &str) -> std::result::Result<Grid, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Grid)
}

/// `start:step:stop`, `log:lo:hi:count`, a comma list, or one number.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let grid = match parts.as_slice() {
        [single] => parse_list(single)?.0,
        ["log", lo, hi, count] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let count: usize = count.trim().parse().map_err(|e| format!("`{count}`: {e}"))?;
            if !(lo > 0.0 && hi >= lo) || count < 2 {
                return Err("log grid needs 0 < lo <= hi and count >= 2".into());
            }
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
                .collect()
        }
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err("range grid needs step > 0 and stop >= start".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            if count > 1_000_000 {
                return Err("grid has more than 10^6 points".into());
            }
            // integer multiples avoid accumulated drift
            (0..=count).map(|k| start + k as f64 * step).collect()
        }
        _ => return Err("expected `start:step:stop`, `log:lo:hi:count`, or a comma list".into()),
    };
    if grid.iter().any(|v| !v.is_finite()) {
        return Err("grid values must be finite".into());
    }
    Ok(Grid(grid))
}

/// Formats like C's `%.12g`.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            fmt12(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Exit status for an error: 2 for unreadable or malformed input, 1 otherwise.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Channel file in either relay form or state form.
pub enum LoadedChannel {
    Relay(DiscreteRelayChannel),
    State(StateChannel),
}

impl LoadedChannel {
    pub fn relay_channel(&self) -> Result<DiscreteRelayChannel> {
        match self {
            LoadedChannel::Relay(ch) => Ok(ch.clone()),
            LoadedChannel::State(sc) => sc.to_relay_channel(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a channel file; a `sizeS` key selects the state form.
pub fn load_channel(path: &Path) -> Result<LoadedChannel> {
    let text = read(path)?;
    let value: Value = parse_json(path, &text)?;
    if value.get("sizeS").is_some() {
        let file: StateChannelFile = parse_json(path, &text)?;
        Ok(LoadedChannel::State(file.into_channel()?))
    } else {
        let file: ChannelFile = parse_json(path, &text)?;
        Ok(LoadedChannel::Relay(file.into_channel()?))
    }
}

struct Manifest {
    command: &'static str,
    inputs: Vec<PathBuf>,
    parameters: Value,
    seeds: Value,
    start: Instant,
}

impl Manifest {
    fn new(command: &'static str, inputs: Vec<PathBuf>, parameters: Value, seeds: Value) -> Self {
        Self {
            command,
            inputs,
            parameters,
            seeds,
            start: Instant::now(),
        }
    }

    fn emit(self, err: &mut dyn Write) -> Result<()> {
        let manifest = json!({
            "schema": MANIFEST_SCHEMA,
            "command": self.command,
            "inputs": self.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "parameters": self.parameters,
            "seeds": self.seeds,
            "version": env!("CARGO_PKG_VERSION"),
            "threads": rayon::current_num_threads(),
            "wallClockSeconds": self.start.elapsed().as_secs_f64(),
        });
        writeln!(err, "{}", serde_json::to_string(&round_json(manifest))?)?;
        Ok(())
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let v = round_json(serde_json::to_value(value)?);
    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    Ok(())
}

/// Runs one parsed command, writing results to `out` and the manifest to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Validate { channel } => cmd_validate(&channel, out, err),
        Command::Capacity { channel, r0, opt } => cmd_capacity(&channel, &r0.0, &opt, out, err),
        Command::Gaussian(args) => cmd_gaussian(&args, out, err),
        Command::Simulate(args) => cmd_simulate(&args, out, err),
        Command::CfRate { channel, r0, opt } => cmd_rate(RateKind::CompressForward, &channel, r0, &opt, out, err),
        Command::Ah { channel, r0, opt } => cmd_rate(RateKind::StateInformation, &channel, r0, &opt, out, err),
    }
}

pub fn cmd_validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let manifest = Manifest::new("validate", vec![path.into()], json!({}), json!({}));
    let loaded = load_channel(path)?;
    let ch = loaded.relay_channel()?;
    let relay = ch.validate()?;
    writeln!(out, "deterministic: {}", relay.describe())?;
    writeln!(out, "# schema={VALIDATE_SCHEMA}")?;
    writeln!(out, "x,y,y1")?;
    for (x, y, y1) in relay.table_rows() {
        match y1 {
            Some(v) => writeln!(out, "{x},{y},{v}")?,
            None => writeln!(out, "{x},{y},-")?,
        }
    }
    manifest.emit(err)
}

pub fn cmd_capacity(
    path: &Path,
    grid: &[f64],
    opt: &OptimizerArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let cfg = opt.config();
    let manifest = Manifest::new(
        "capacity",
        vec![path.into()],
        json!({ "r0": grid, "tolerance": cfg.tolerance, "restarts": cfg.restarts, "maxIterations": cfg.max_iterations }),
        json!({ "optimizer": cfg.seed }),
    );
    let ch = load_channel(path)?.relay_channel()?;
    let curve = capacity_curve(&ch, grid, &cfg)?;
    if let Some(w) = curve.points.windows(2).find(|w| w[1].rate < w[0].rate) {
        return Err(Error::InvalidParameter(format!(
            "monotonicity audit failed between r0={} and r0={}",
            w[0].r0, w[1].r0
        )));
    }
    writeln!(out, "# schema={CAPACITY_CSV_SCHEMA}")?;
    let px_cols: Vec<String> = (0..ch.size_x()).map(|x| format!("px{x}")).collect();
    writeln!(
        out,
        "r0,capacity,active_branch,link_term,broadcast_term,upper_bound,converged,{}",
        px_cols.join(",")
    )?;
    for p in &curve.points {
        let px: Vec<String> = p.argmax_input.probs().iter().map(|&v| fmt12(v)).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt12(p.r0),
            fmt12(p.rate),
            p.active_branch.as_str(),
            fmt12(p.link_term),
            fmt12(p.broadcast_term),
            p.upper_bound.map_or_else(String::new, fmt12),
            p.converged,
            px.join(",")
        )?;
    }
    manifest.emit(err)
}

pub fn cmd_gaussian(args: &GaussianArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let spec = match &args.spec {
        Some(path) => {
            let spec: GaussianRelaySpec = parse_json(path, &read(path)?)?;
            spec.check()?;
            spec
        }
        None => GaussianRelaySpec::new(
            args.power.expect("clap enforces P"),
            args.noise.expect("clap enforces N"),
            args.rho.expect("clap enforces rho"),
        )?,
    };
    let inputs = args.spec.iter().cloned().collect();
    let params = json!({
        "P": spec.power, "N": spec.noise, "rho": spec.rho,
        "r0": args.r0.as_ref().map(|g| &g.0), "sigma2": args.sigma2.as_ref().map(|g| &g.0),
    });
    let manifest = Manifest::new("gaussian", inputs, params, json!({}));
    if let Some(Grid(sigma2)) = &args.sigma2 {
        let rows = sigma2
            .iter()
            .map(|&s| Ok((s, gaussian_cf_r0(&spec, s)?, gaussian_cf_rstar(&spec, s)?)))
            .collect::<Result<Vec<_>>>()?;
        writeln!(out, "# schema={GAUSSIAN_CF_CSV_SCHEMA}")?;
        writeln!(out, "sigma2,r0,rstar,rstar_minus_r0")?;
        for (s, r0, rstar) in rows {
            writeln!(out, "{},{},{},{}", fmt12(s), fmt12(r0), fmt12(rstar), fmt12(rstar - r0))?;
        }
    } else {
        let grid = &args.r0.as_ref().expect("clap enforces a grid").0;
        let rows = grid
            .iter()
            .map(|&r0| Ok((r0, gaussian_capacity(&spec, r0)?)))
            .collect::<Result<Vec<_>>>()?;
        writeln!(out, "# schema={GAUSSIAN_CAPACITY_CSV_SCHEMA}")?;
        writeln!(out, "r0,capacity")?;
        for (r0, c) in rows {
            writeln!(out, "{},{}", fmt12(r0), fmt12(c))?;
        }
    }
    manifest.emit(err)
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let params = SimParams {
        n: args.n,
        rate: args.rate,
        r0: args.r0,
        eps: args.eps,
        trials: args.trials,
        master_seed: args.seed,
        typicality: args.typicality,
        fixed_codebook: args.fixed_codebook,
    };
    let manifest = Manifest::new(
        "simulate",
        vec![args.channel.clone()],
        serde_json::to_value(params)?,
        json!({ "master": args.seed }),
    );
    let ch = load_channel(&args.channel)?.relay_channel()?;
    let px = match &args.px {
        Some(Grid(p)) => Pmf::new(p.clone())?,
        None => Pmf::uniform(ch.size_x()),
    };
    if px.len() != ch.size_x() {
        return Err(Error::ShapeMismatch(format!(
            "--px has {} entries, channel has |X| = {}",
            px.len(),
            ch.size_x()
        )));
    }
    let report = simulate_haf(&ch, &px, &params)?;
    write_json(out, &report)?;
    manifest.emit(err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RateKind {
    CompressForward,
    StateInformation,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RateReport {
    schema: &'static str,
    scheme: &'static str,
    #[serde(flatten)]
    point: RatePoint,
    /// Max-min capacity at the same link rate, when the relay is deterministic.
    capacity: Option<f64>,
    gap: Option<f64>,
    /// Whether the state (relay output) is a function of (x, y).
    #[serde(skip_serializing_if = "Option::is_none")]
    state_recoverable: Option<bool>,
}

fn cmd_rate(
    kind: RateKind,
    path: &Path,
    r0: f64,
    opt: &OptimizerArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let cfg = opt.config();
    let name = match kind {
        RateKind::CompressForward => "cf-rate",
        RateKind::StateInformation => "ah",
    };
    let manifest = Manifest::new(
        name,
        vec![path.into()],
        json!({ "r0": r0, "tolerance": cfg.tolerance, "restarts": cfg.restarts, "maxIterations": cfg.max_iterations }),
        json!({ "optimizer": cfg.seed }),
    );
    let loaded = load_channel(path)?;
    let ch = loaded.relay_channel()?;
    let (point, recoverable) = match (kind, &loaded) {
        (RateKind::CompressForward, _) => (cf_optimal(&ch, r0, &cfg)?, None),
        (RateKind::StateInformation, LoadedChannel::State(sc)) => {
            (ah_optimal(sc, r0, &cfg)?, Some(ch.validate().is_ok()))
        }
        (RateKind::StateInformation, LoadedChannel::Relay(_)) => {
            return Err(Error::InvalidParameter(
                "ah needs a state-channel file (sizeX, sizeY, sizeS, stateProbs, output)".into(),
            ))
        }
    };
    let capacity = if recoverable == Some(false) {
        None
    } else {
        Some(theorem1_search(&ch, r0, &cfg)?.rate)
    };
    let report = RateReport {
        schema: RATE_REPORT_SCHEMA,
        scheme: name,
        gap: capacity.map(|c| c - point.rate),
        capacity,
        point,
        state_recoverable: recoverable,
    };
    write_json(out, &report)?;
    manifest.emit(err)
}

/// Sizes the global worker pool from `RELAYCAP_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{THREADS_ENV}={raw:?} is not a nonnegative integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(-2.5), "-2.5");
        assert_eq!(fmt12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt12(1e-7), "1e-07");
        assert_eq!(fmt12(0.999999999999999), "1");
        assert_eq!(fmt12(0.278071905112638), "0.278071905113");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0").unwrap(), Grid(vec![0.0]));
        assert_eq!(parse_grid("0.1, 0.3").unwrap(), Grid(vec![0.1, 0.3]));
        let g = parse_grid("0:0.05:0.7").unwrap().0;
        assert_eq!(g.len(), 15);
        assert!((g[14] - 0.7).abs() < 1e-12);
        let g = parse_grid("log:1e-4:1e4:9").unwrap().0;
        assert_eq!(g.len(), 9);
        assert!((g[4] - 1.0).abs() < 1e-12);
        for bad in ["", "a", "0:0:1", "1:0.1:0", "log:0:1:5", "1:2", "0,nan"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_rounding() {
        let v = round_json(json!({ "a": [1.0 / 3.0, 2], "b": { "c": 0.1 + 0.2 } }));
        assert_eq!(v.to_string(), r#"{"a":[0.333333333333,2],"b":{"c":0.3}}"#);
    }
}
