use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

mod commands;
mod config;

use commands::{geometry, greens, hull, tensor, volume, Ctx, Invalid, Outcome};
use config::ConfigFile;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Cone calculus, barriers and radial Green's function experiments.
#[derive(Debug, Parser)]
#[command(name = "sigmak", version, arg_required_else_help = true)]
struct Cli {
    /// TOML config with one table per subcommand, e.g. [greens.solve].
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON and CSV artifacts; `-` prints the JSON to stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for commands that draw random samples.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    group: Group,
}

#[derive(Debug, Subcommand)]
enum Group {
    /// Cone membership and mu_plus.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Concave defining functions.
    #[command(subcommand)]
    Defining(DefiningCmd),
    /// Radial super-solutions.
    #[command(subcommand)]
    Barrier(BarrierCmd),
    /// Exact families, bubbles and the regularized solver.
    #[command(subcommand)]
    Greens(GreensCmd),
    /// Birkhoff-von Neumann decomposition and the eigenvalue hull check.
    #[command(subcommand)]
    Bvn(BvnCmd),
    /// Divergence and curl identities of the Schouten tensor.
    #[command(subcommand)]
    Tensorid(TensorCmd),
    /// Inf-convolution, conformal Ricci curvature and volume ratios.
    #[command(subcommand)]
    Volcomp(VolCmd),
}

#[derive(Debug, Subcommand)]
enum ConeCmd {
    Info(geometry::ConeInfo),
    Check(geometry::ConeCheck),
}

#[derive(Debug, Subcommand)]
enum DefiningCmd {
    Build(geometry::DefiningBuild),
    Probe(geometry::DefiningProbe),
}

#[derive(Debug, Subcommand)]
enum BarrierCmd {
    Check(geometry::BarrierArgs),
    Glue(geometry::BarrierArgs),
}

#[derive(Debug, Subcommand)]
enum GreensCmd {
    Exact(greens::ExactArgs),
    Bubble(greens::BubbleArgs),
    Solve(greens::SolveArgs),
    Continue(greens::SolveArgs),
    Mass(greens::MassArgs),
}

#[derive(Debug, Subcommand)]
enum BvnCmd {
    Decompose(hull::DecomposeArgs),
    Hullcheck(hull::HullArgs),
}

#[derive(Debug, Subcommand)]
enum TensorCmd {
    Div(tensor::DivArgs),
    Curl(tensor::CurlArgs),
    Order(tensor::OrderArgs),
}

#[derive(Debug, Subcommand)]
enum VolCmd {
    Infconv(volume::InfConvArgs),
    Ricci(volume::RicciArgs),
    Volume(volume::VolumeArgs),
    Ratio(volume::RatioArgs),
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool_version: &'a str,
    command: &'a str,
    seed: u64,
    config_echo: Value,
    result: Value,
}

struct Run {
    group: &'static str,
    action: &'static str,
    echo: Value,
    outcome: Outcome,
}

fn run<P, H>(ctx: &Ctx, cfg: &ConfigFile, group: &'static str, action: &'static str, flags: &P, handler: H) -> Result<Run>
where
    P: Serialize + serde::de::DeserializeOwned,
    H: FnOnce(&Ctx, &mut P) -> Result<Outcome>,
{
    let mut params = cfg.overlay(group, action, flags).map_err(|e| Invalid(format!("{e:#}")))?;
    let outcome = handler(ctx, &mut params)?;
    Ok(Run {
        group,
        action,
        echo: serde_json::to_value(&params)?,
        outcome,
    })
}

fn dispatch(ctx: &Ctx, cfg: &ConfigFile, group: &Group) -> Result<Run> {
    use Group::*;
    match group {
        Cone(ConeCmd::Info(a)) => run(ctx, cfg, "cone", "info", a, geometry::cone_info),
        Cone(ConeCmd::Check(a)) => run(ctx, cfg, "cone", "check", a, geometry::cone_check),
        Defining(DefiningCmd::Build(a)) => run(ctx, cfg, "defining", "build", a, geometry::defining_build),
        Defining(DefiningCmd::Probe(a)) => run(ctx, cfg, "defining", "probe", a, geometry::defining_probe),
        Barrier(BarrierCmd::Check(a)) => run(ctx, cfg, "barrier", "check", a, geometry::barrier_check),
        Barrier(BarrierCmd::Glue(a)) => run(ctx, cfg, "barrier", "glue", a, geometry::barrier_glue),
        Greens(GreensCmd::Exact(a)) => run(ctx, cfg, "greens", "exact", a, greens::exact),
        Greens(GreensCmd::Bubble(a)) => run(ctx, cfg, "greens", "bubble", a, greens::bubble_cmd),
        Greens(GreensCmd::Solve(a)) => run(ctx, cfg, "greens", "solve", a, greens::solve),
        Greens(GreensCmd::Continue(a)) => run(ctx, cfg, "greens", "continue", a, greens::continue_cmd),
        Greens(GreensCmd::Mass(a)) => run(ctx, cfg, "greens", "mass", a, greens::mass),
        Bvn(BvnCmd::Decompose(a)) => run(ctx, cfg, "bvn", "decompose", a, hull::decompose),
        Bvn(BvnCmd::Hullcheck(a)) => run(ctx, cfg, "bvn", "hullcheck", a, hull::hullcheck),
        Tensorid(TensorCmd::Div(a)) => run(ctx, cfg, "tensorid", "div", a, tensor::div),
        Tensorid(TensorCmd::Curl(a)) => run(ctx, cfg, "tensorid", "curl", a, tensor::curl),
        Tensorid(TensorCmd::Order(a)) => run(ctx, cfg, "tensorid", "order", a, tensor::order),
        Volcomp(VolCmd::Infconv(a)) => run(ctx, cfg, "volcomp", "infconv", a, volume::infconv),
        Volcomp(VolCmd::Ricci(a)) => run(ctx, cfg, "volcomp", "ricci", a, volume::ricci),
        Volcomp(VolCmd::Volume(a)) => run(ctx, cfg, "volcomp", "volume", a, volume::volume),
        Volcomp(VolCmd::Ratio(a)) => run(ctx, cfg, "volcomp", "ratio", a, volume::ratio),
    }
}

fn write_artifacts(out: &Path, seed: u64, run: Run) -> Result<()> {
    let command = format!("{} {}", run.group, run.action);
    let envelope = Envelope {
        tool_version: sigmak::VERSION,
        command: &command,
        seed,
        config_echo: run.echo,
        result: run.outcome.result,
    };
    let json = sigmak::json::to_string_pretty(&envelope)?;
    println!("{command}: {}", run.outcome.summary);
    if out == Path::new("-") {
        print!("{json}");
        return Ok(());
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stem = format!("{}-{}", run.group, run.action);
    let path = out.join(format!("{stem}.json"));
    std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
    if let Some(csv) = run.outcome.csv {
        let path = out.join(format!("{stem}.csv"));
        std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(|e| Invalid(format!("{e:#}")))?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let out = cli.output.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let run = dispatch(&Ctx { seed }, &cfg, &cli.group)?;
    write_artifacts(&out, seed, run)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<sigmak::Error>() {
        Some(e) if !e.is_validation() => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::UnknownArgument
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
