use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sigmak::barrier::{glue_barrier, verify_supersolution, SuperSolutionParams};
use sigmak::profile::RadialProfile;
use sigmak::{Cone, DefiningFunction, Error, Spacing};

use super::{invalid, or, required, ConeArgs, Ctx, GridArgs, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ConeInfo {
    #[command(flatten)]
    #[serde(flatten)]
    pub cone: ConeArgs,
}

pub fn cone_info(_: &Ctx, p: &mut ConeInfo) -> Result<Outcome> {
    let cone = p.cone.resolve()?;
    let mu = cone.mu_plus(1e-13)?;
    let result = json!({
        "cone": cone.describe(),
        "n": cone.dim(),
        "mu_plus": mu,
        "mu_plus_exceeds_one": mu > 1.0,
        "first_axis": cone.contains_first_axis(1e-12)?,
    });
    Outcome::new(format!("{}: mu_plus = {mu}", cone.describe()), &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ConeCheck {
    #[command(flatten)]
    #[serde(flatten)]
    pub cone: ConeArgs,
    /// Eigenvalue vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    /// Scale-normalized boundary tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn cone_check(_: &Ctx, p: &mut ConeCheck) -> Result<Outcome> {
    let cone = p.cone.resolve()?;
    let lam = required(&p.lambda, "lambda")?;
    let m = cone.contains(&lam, or(&mut p.tol, 1e-10))?;
    Outcome::new(format!("{}: {}", cone.describe(), m.verdict), &m)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DefiningBuild {
    #[command(flatten)]
    #[serde(flatten)]
    pub cone: ConeArgs,
    /// Exponent on the slice function, in (0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Form: constructed or canonical.
    #[arg(long)]
    pub form: Option<String>,
    /// Random interior samples for the ellipticity ratio.
    #[arg(long)]
    pub samples: Option<usize>,
}

fn defining(cone: &Cone, form: &str, alpha: Option<f64>) -> Result<DefiningFunction> {
    match form {
        "constructed" => Ok(DefiningFunction::build(cone, alpha)?),
        "canonical" if alpha.is_none() => Ok(DefiningFunction::canonical(cone)?),
        "canonical" => Err(invalid("--alpha applies only to the constructed form")),
        other => Err(invalid(format!("unknown form '{other}' (constructed or canonical)"))),
    }
}

pub fn defining_build(ctx: &Ctx, p: &mut DefiningBuild) -> Result<Outcome> {
    let cone = p.cone.resolve()?;
    let f = defining(&cone, &or(&mut p.form, "constructed".into()), p.alpha)?;
    let samples = or(&mut p.samples, 2000);
    let nu = f.ellipticity_ratio(samples, ctx.seed)?;
    let result = json!({
        "description": f.describe(),
        "alpha": f.alpha(),
        "value_at_e": f.value(&vec![1.0; cone.dim()])?,
        "ellipticity_ratio": nu,
        "samples": samples,
    });
    Outcome::new(format!("{}: ellipticity ratio {nu:.6e}", f.describe()), &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DefiningProbe {
    #[command(flatten)]
    #[serde(flatten)]
    pub cone: ConeArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub form: Option<String>,
    /// Eigenvalue vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
}

pub fn defining_probe(_: &Ctx, p: &mut DefiningProbe) -> Result<Outcome> {
    let cone = p.cone.resolve()?;
    let f = defining(&cone, &or(&mut p.form, "constructed".into()), p.alpha)?;
    let lam = required(&p.lambda, "lambda")?;
    let value = f.value(&lam)?;
    let membership = cone.contains(&lam, 1e-10)?;
    let (gradient, ellipticity) = if membership.is_interior() {
        (Some(f.gradient(&lam)?), Some(f.ellipticity_at(&lam)?))
    } else {
        (None, None)
    };
    let result = json!({
        "value": value,
        "verdict": membership.verdict,
        "gradient": gradient,
        "ellipticity": ellipticity,
    });
    Outcome::new(format!("f = {value:.17e} ({})", membership.verdict), &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BarrierArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Gamma_k index used for the membership check.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Coefficient a; `barrier check` searches 1e1..1e4 when it is absent.
    #[arg(long)]
    pub a: Option<f64>,
    /// Cutoff radius.
    #[arg(long)]
    pub r1: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

impl BarrierArgs {
    fn params(&mut self, a: f64) -> Result<SuperSolutionParams> {
        Ok(SuperSolutionParams::new(
            or(&mut self.n, 5),
            or(&mut self.mu, 1.4),
            or(&mut self.delta, 2.0),
            a,
            or(&mut self.r1, 0.4),
        )?)
    }
}

pub fn barrier_check(_: &Ctx, p: &mut BarrierArgs) -> Result<Outcome> {
    let grid = p.grid.points("1e-3:0.2:50", Spacing::Log)?;
    let cone = Cone::gamma_k(or(&mut p.n, 5), or(&mut p.k, 2))?;
    let candidates = match p.a {
        Some(a) => vec![a],
        None => vec![1e1, 1e2, 1e3, 1e4],
    };
    let mut last = None;
    for a in candidates {
        let params = p.params(a)?;
        let report = verify_supersolution(&params, &cone, &grid)?;
        let ok = report.all_interior && report.ratio_min > 0.0;
        last = Some((params, report));
        if ok {
            break;
        }
    }
    let (params, report) = last.expect("at least one candidate");
    if !(report.all_interior && report.ratio_min > 0.0) {
        return Err(Error::Numeric(format!(
            "no barrier coefficient gives Interior verdicts everywhere ({} failures at a = {})",
            report.failures().len(),
            params.a
        ))
        .into());
    }
    p.a = Some(params.a);
    let interior = report.verdicts.len();
    let summary = format!(
        "a = {}: {interior}/{interior} Interior, min ratio {:.6e}",
        params.a, report.ratio_min
    );
    Outcome::new(summary, &json!({ "params": params, "report": report }))
}

pub fn barrier_glue(_: &Ctx, p: &mut BarrierArgs) -> Result<Outcome> {
    let grid = p.grid.points("1e-3:1:200", Spacing::Log)?;
    let a = or(&mut p.a, 10.0);
    let params = p.params(a)?;
    let values = grid
        .iter()
        .map(|&r| glue_barrier(&params, r).map(|j| j.u))
        .collect::<sigmak::Result<Vec<f64>>>()?;
    let profile = RadialProfile::new(grid, values)?;
    let v = profile.values();
    let result = json!({
        "params": params,
        "u_min": v.iter().cloned().fold(f64::INFINITY, f64::min),
        "u_max": v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    });
    Ok(Outcome::new(format!("glued barrier on {} points", v.len()), &result)?.with_csv(profile.to_csv("u")))
}
