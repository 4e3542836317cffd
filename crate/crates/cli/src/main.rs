use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod config;

use config::{parse_nodes, parse_positive, parse_radius, parse_range, parse_shape, parse_temperature, Range};

/// Radial-hedgehog solutions of the Landau-de Gennes model on spherical shells.
///
/// Any subcommand accepts `--config FILE` with `key = value` lines (keys are
/// flag names); flags on the command line override the file.
#[derive(Parser)]
#[command(name = "hedgehog", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the radial profile ODE and check the comparison bounds.
    Solve(SolveArgs),
    /// Mode-wise and full second-variation spectra for one point or a sweep.
    Spectrum(SpectrumArgs),
    /// Sampled and exact checks of the pointwise inequalities.
    VerifyLemmas(LemmaArgs),
    /// Random-start energy minimizations on the shell grid.
    Minimize(MinimizeArgs),
    /// SVG or ASCII plots of G, of the profile, or of a stability map.
    Plot(PlotArgs),
    /// Table of radius and temperature thresholds.
    Thresholds(ThresholdArgs),
}

#[derive(Args, Serialize)]
#[command(args_override_self = true)]
pub struct SolveArgs {
    #[arg(long = "R", allow_negative_numbers = true, value_parser = parse_radius, default_value = "1.5")]
    #[serde(rename = "R")]
    pub r_outer: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_temperature, default_value = "0")]
    pub t: f64,
    /// Radial nodes.
    #[arg(long, value_parser = parse_nodes, default_value = "4097")]
    pub nr: usize,
    /// Residual tolerance on the `dr²`-scaled discrete equations.
    #[arg(long, value_parser = parse_positive, default_value = "1e-10")]
    pub tol: f64,
    /// Profile CSV (`r,h,dh,eta,bound_sqrt`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(args_override_self = true)]
pub struct SpectrumArgs {
    #[arg(long = "R", allow_negative_numbers = true, value_parser = parse_radius, default_value = "1.5")]
    #[serde(rename = "R")]
    pub r_outer: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_temperature, default_value = "0")]
    pub t: f64,
    /// Sweep `start:end:count` in R (replaces --R).
    #[arg(long = "R-range", value_parser = parse_range)]
    #[serde(rename = "R-range")]
    pub r_range: Option<Range>,
    /// Sweep `start:end:count` in t (replaces --t).
    #[arg(long = "t-range", value_parser = parse_range)]
    #[serde(rename = "t-range")]
    pub t_range: Option<Range>,
    #[arg(long, value_parser = parse_nodes, default_value = "1025")]
    pub nr: usize,
    /// Largest mode index `i` of the one-dimensional functionals.
    #[arg(long = "i-max", default_value = "4")]
    #[serde(rename = "i-max")]
    pub i_max: usize,
    /// Shell grid `NRxNTxNP` for the full discrete second variation (skipped if absent).
    #[arg(long = "full-grid", value_parser = parse_shape)]
    #[serde(rename = "full-grid")]
    pub full_grid: Option<(usize, usize, usize)>,
    /// Eigenvalues must exceed this for a `stable` verdict.
    #[arg(long, default_value = "1e-9")]
    pub tol: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(args_override_self = true)]
pub struct LemmaArgs {
    #[arg(long, default_value = "1000000")]
    pub samples: usize,
    #[arg(long, default_value = "42")]
    pub seed: u64,
    /// `h` for the sampled nonnegativity of φ.
    #[arg(long = "varphi-h", default_value = "0.99")]
    #[serde(rename = "varphi-h")]
    pub varphi_h: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Lbfgs,
    GradientFlow,
}

#[derive(Args, Serialize)]
#[command(args_override_self = true)]
pub struct MinimizeArgs {
    #[arg(long = "R", allow_negative_numbers = true, value_parser = parse_radius, default_value = "1.5")]
    #[serde(rename = "R")]
    pub r_outer: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_temperature, default_value = "5")]
    pub t: f64,
    #[arg(long, default_value = "20")]
    pub runs: usize,
    /// Peak `|Q − H|` of the random initial fields.
    #[arg(long, value_parser = parse_positive, default_value = "0.5")]
    pub amplitude: f64,
    #[arg(long, default_value = "0")]
    pub seed: u64,
    #[arg(long, value_parser = parse_shape, default_value = "48x24x48")]
    pub grid: (usize, usize, usize),
    /// Radial nodes of the profile solve.
    #[arg(long, value_parser = parse_nodes, default_value = "1025")]
    pub nr: usize,
    /// Stopping tolerance on the L² gradient norm.
    #[arg(long, value_parser = parse_positive, default_value = "1e-4")]
    pub tol: f64,
    #[arg(long = "max-iter", default_value = "5000")]
    #[serde(rename = "max-iter")]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "lbfgs")]
    pub method: MethodArg,
    /// Relative energy tolerance for the gap check.
    #[arg(long = "gap-tol", default_value = "1e-6")]
    #[serde(rename = "gap-tol")]
    pub gap_tol: f64,
    /// Relative L² distance tolerance (fraction of ‖H‖).
    #[arg(long = "distance-tol", default_value = "1e-2")]
    #[serde(rename = "distance-tol")]
    pub distance_tol: f64,
    #[arg(long = "allow-nonconverged")]
    #[serde(rename = "allow-nonconverged")]
    pub allow_nonconverged: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Field CSV of the first run's final state (plus a `.json` sidecar).
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
pub enum PlotKind {
    #[value(name = "G")]
    G,
    Profile,
    Map,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum PlotFormat {
    Svg,
    Ascii,
}

#[derive(Args, Serialize)]
#[command(args_override_self = true)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long = "eps-max", value_parser = parse_positive, default_value = "3")]
    #[serde(rename = "eps-max")]
    pub eps_max: f64,
    #[arg(long = "R", allow_negative_numbers = true, value_parser = parse_radius, default_value = "1.5")]
    #[serde(rename = "R")]
    pub r_outer: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_temperature, default_value = "0")]
    pub t: f64,
    #[arg(long, value_parser = parse_nodes, default_value = "1025")]
    pub nr: usize,
    /// Stability CSV for `--kind map`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to svg with --out and ascii on stdout otherwise.
    #[arg(long, value_enum)]
    pub format: Option<PlotFormat>,
}

#[derive(Args, Serialize)]
#[command(args_override_self = true)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub json: bool,
}

fn configure_threads() {
    if let Some(n) = std::env::var("HEDGEHOG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    configure_threads();
    let code = match cli.cmd {
        Cmd::Solve(a) => commands::solve(&a),
        Cmd::Spectrum(a) => commands::spectrum(&a),
        Cmd::VerifyLemmas(a) => commands::verify_lemmas(&a),
        Cmd::Minimize(a) => commands::minimize(&a),
        Cmd::Plot(a) => commands::plot(&a),
        Cmd::Thresholds(a) => commands::thresholds(&a),
    };
    ExitCode::from(code)
}
