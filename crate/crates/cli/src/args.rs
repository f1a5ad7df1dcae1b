//! Command-line grammar. Every subcommand's arguments are serializable so
//! they can be embedded in, and replayed from, a [`RunConfig`](crate::config::RunConfig).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use bperc_core::{Axis, Direction, Rect, Selection};

#[derive(Debug, Parser)]
#[command(name = "bperc", version, about = "Two-neighbour bootstrap percolation workbench")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Master seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Trial budget (meaning depends on the subcommand).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// TOML or JSON file of constants (p, B, C, delta, L1 … L6).
    #[arg(long, global = true, value_name = "FILE")]
    pub constants: Option<PathBuf>,
    /// Override one constant, e.g. `--const delta=0.1`; repeatable.
    #[arg(long = "const", global = true, value_name = "NAME=VALUE", value_parser = parse_assignment)]
    pub overrides: Vec<(String, f64)>,
    /// Shorthand for `--const p=VALUE`.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Shorthand for `--const q=VALUE`.
    #[arg(long, global = true, conflicts_with = "p")]
    pub q: Option<f64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Record wall-clock times; without it runtime fields are 0 so that
    /// reruns are byte-identical.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Closure of a configuration, read from a file or sampled at density p.
    Sim(SimArgs),
    /// Bisection estimates of the critical probability of [n]².
    Pc(PcArgs),
    /// Monte Carlo probability of one event.
    EventProb(EventArgs),
    /// Evaluate a bound, with its precondition flags.
    Bound(BoundArgs),
    /// Table of β, g and g′.
    GTable(GTableArgs),
    /// Build or check hierarchies.
    #[command(subcommand)]
    Hier(HierCommand),
    /// Run the probability-inequality validation suites.
    Validate(ValidateArgs),
    /// Replay a run from the configuration embedded in one of its outputs.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimArgs {
    /// JSON configuration `{"domain": [x0,x1,y0,y1], "infected": [[x,y],…]}`.
    #[arg(long, value_name = "FILE", conflicts_with = "dims")]
    pub input: Option<PathBuf>,
    /// Sample a configuration of these dimensions at density p.
    #[arg(long, value_parser = parse_dims, required_unless_present = "input")]
    pub dims: Option<(i64, i64)>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PcArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    /// Stop bisecting once the bracket is narrower than this.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// `R` is internally filled.
    Filled,
    D1,
    D2,
    Crossing,
    DoubleGap,
    Percolation,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EventArgs {
    #[arg(long, value_enum)]
    pub event: EventKind,
    /// Dimensions of `R`, placed at the origin.
    #[arg(long, value_parser = parse_dims)]
    pub dims: (i64, i64),
    /// Inner rectangle `S` as `x0,x1,y0,y1` (events d1, d2).
    #[arg(long, value_parser = parse_rect)]
    pub s: Option<Rect>,
    /// Label as a list of directions, e.g. `+x,-y`; empty for 0.
    #[arg(long, value_parser = parse_selection, default_value = "")]
    pub x: Selection,
    /// Side crossing starts from (event crossing).
    #[arg(long, value_parser = parse_direction, default_value = "-x")]
    pub from: Direction,
    /// Orientation of the double gap (event double-gap).
    #[arg(long, value_parser = parse_axis, default_value = "vertical")]
    pub axis: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Lambda,
    Droplet,
    Seeds,
    Crossing,
    CorKey,
    LeavingDiagonal,
    Pc,
    LongThin,
    TwoBig,
    WeightedCount,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    /// Dimensions of `R`.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<(i64, i64)>,
    /// Inner rectangle `S` as `x0,x1,y0,y1` (cor-key).
    #[arg(long, value_parser = parse_rect)]
    pub s: Option<Rect>,
    /// Frame label as a list of directions, e.g. `+x,-y` (cor-key).
    #[arg(long, value_parser = parse_selection, default_value = "")]
    pub x: Selection,
    /// Criticality index for cor-key.
    #[arg(long, default_value_t = 1)]
    pub j: u8,
    /// Shorter side length `a` (leaving-diagonal).
    #[arg(long)]
    pub a: Option<i64>,
    /// Longer side length `b ≥ a` (leaving-diagonal).
    #[arg(long)]
    pub b: Option<i64>,
    /// Grid size (pc) or vertex count (weighted-count).
    #[arg(long)]
    pub n: Option<u64>,
    /// Seed count (weighted-count).
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GTableArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub z_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub z_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "log")]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum HierCommand {
    /// Build hierarchies for a given filled configuration or for sampled
    /// internally filled droplets, and check them.
    Build(HierBuildArgs),
    /// Check hierarchies from a file.
    Check(HierCheckArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HierBuildArgs {
    /// JSON configuration whose domain is `R`.
    #[arg(long, value_name = "FILE", conflicts_with = "dims")]
    pub input: Option<PathBuf>,
    /// Sample internally filled droplets of these dimensions.
    #[arg(long, value_parser = parse_dims, required_unless_present = "input")]
    pub dims: Option<(i64, i64)>,
    /// Density for sampling; defaults to the constants' p.
    #[arg(long)]
    pub sample_p: Option<f64>,
    /// Number of droplets to sample.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Search for pods (exhaustive, small hierarchies only).
    #[arg(long)]
    pub pods: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HierCheckArgs {
    /// A hierarchy dump, or the JSON output of `hier build`.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Configuration to check satisfaction against (for a bare dump).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub pods: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// `all` or one of the suite names.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    /// A JSON or CSV output of an earlier run.
    #[arg(value_name = "FILE")]
    pub from: PathBuf,
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let value = value.trim().parse().map_err(|e| format!("{name}: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn parse_dims(s: &str) -> Result<(i64, i64), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: i64 = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h: i64 = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    if w < 1 || h < 1 {
        return Err(format!("dimensions must be positive, got {w}x{h}"));
    }
    Ok((w, h))
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("rectangle: {e}"))?;
    let [x0, x1, y0, y1] = parts[..] else {
        return Err(format!("expected x0,x1,y0,y1, got {s:?}"));
    };
    Rect::new(x0, x1, y0, y1).map_err(|e| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    Direction::parse(s.trim()).ok_or_else(|| format!("expected one of +x, +y, -x, -y, got {s:?}"))
}

fn parse_selection(s: &str) -> Result<Selection, String> {
    let mut x = Selection::NONE;
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty() && *t != "0") {
        x.set(parse_direction(part)?, true);
    }
    Ok(x)
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    match s {
        "vertical" => Ok(Axis::Vertical),
        "horizontal" => Ok(Axis::Horizontal),
        _ => Err(format!("expected vertical or horizontal, got {s:?}")),
    }
}
