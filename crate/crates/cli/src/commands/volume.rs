use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sigmak::volcomp::{
    bishop_gromov_ratio, inf_convolution, max_second_difference, ricci_conformal_radial, space_form_volume,
    ConformalFactor, RadialConformalMetric,
};
use sigmak::{RadialProfile, Spacing};

use super::{invalid, or, required, Ctx, GridArgs, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct InfConvArgs {
    /// CSV file with header `r,<name>`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in test function when no input is given: abs or square.
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

pub fn infconv(_: &Ctx, p: &mut InfConvArgs) -> Result<Outcome> {
    let f = match &p.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            RadialProfile::from_csv(&text)?
        }
        None => {
            // the domain straddles zero, so this grid defaults to linear
            let grid = p.grid.points("-1:1:401", Spacing::Linear)?;
            match or(&mut p.function, "abs".into()).as_str() {
                "abs" => RadialProfile::from_fn(grid, f64::abs)?,
                "square" => RadialProfile::from_fn(grid, |x| x * x)?,
                other => return Err(invalid(format!("unknown function '{other}' (abs or square)"))),
            }
        }
    };
    let eps = or(&mut p.epsilon, 0.05);
    let g = inf_convolution(&f, eps)?;
    let sup = g
        .values()
        .iter()
        .zip(f.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let result = json!({
        "epsilon": eps,
        "sup_difference": sup,
        "max_second_difference": max_second_difference(&g),
        "semiconcavity_bound": 2.0 / eps,
    });
    Ok(Outcome::new(format!("epsilon = {eps}: sup |f_eps - f| = {sup:.6e}"), &result)?.with_csv(g.to_csv("f_eps")))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct MetricArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Conformal factor: constant, sphere, neg_log, log_one_plus_sq or two_ends.
    #[arg(long)]
    pub factor: Option<String>,
    /// Value of a constant factor.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
}

impl MetricArgs {
    fn resolve(&mut self) -> Result<RadialConformalMetric> {
        let kind = or(&mut self.factor, "sphere".into());
        let factor = if kind == "constant" {
            ConformalFactor::Constant { c: or(&mut self.c, 0.0) }
        } else {
            serde_json::from_value(json!({ "kind": kind }))
                .map_err(|_| invalid(format!("unknown conformal factor '{kind}'")))?
        };
        Ok(RadialConformalMetric::new(or(&mut self.n, 4), factor)?)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RicciArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

pub fn ricci(_: &Ctx, p: &mut RicciArgs) -> Result<Outcome> {
    let metric = p.metric.resolve()?;
    let grid = p.grid.points("0.05:3:60", Spacing::Log)?;
    let mut radial = Vec::with_capacity(grid.len());
    let mut tangential = Vec::with_capacity(grid.len());
    for &r in &grid {
        let e = ricci_conformal_radial(&metric, r)?;
        radial.push(e.entries()[0]);
        tangential.push(e.entries()[1]);
    }
    let lowest = radial
        .iter()
        .chain(&tangential)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let result = json!({ "r": grid, "radial": radial, "tangential": tangential, "min_eigenvalue": lowest });
    Outcome::new(format!("min Ricci eigenvalue {lowest:.6e}"), &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct VolumeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Sectional curvature of the model space.
    #[arg(long, allow_hyphen_values = true)]
    pub kcurv: Option<f64>,
    /// Geodesic radius.
    #[arg(long)]
    pub radius: Option<f64>,
}

pub fn volume(_: &Ctx, p: &mut VolumeArgs) -> Result<Outcome> {
    let n = or(&mut p.n, 3);
    let k = or(&mut p.kcurv, 0.0);
    let r = required(&p.radius, "radius")?;
    let v = space_form_volume(n, k, r)?;
    Outcome::new(format!("v({n}, {k}, {r}) = {v:.17e}"), &json!({ "volume": v }))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RatioArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub kcurv: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

pub fn ratio(_: &Ctx, p: &mut RatioArgs) -> Result<Outcome> {
    let metric = p.metric.resolve()?;
    let grid = p.grid.points("0.05:3:60", Spacing::Log)?;
    let rep = bishop_gromov_ratio(&metric, or(&mut p.kcurv, 1.0), &grid)?;
    let csv = rep.ratio.to_csv("ratio");
    let summary = format!(
        "verdict {:?}, Ricci bound holds = {}",
        rep.verdict, rep.ricci_bound_holds
    );
    Ok(Outcome::new(summary, &rep)?.with_csv(csv))
}
