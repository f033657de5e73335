use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sigmak::tensorid::{convergence_study, curl_residual, divergence_residual, FieldKind, Identity, ScalarField};

use super::{invalid, or, required, Ctx, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct FieldArgs {
    /// Field: constant, poly_gauss, power_offset, exp_linear or affine.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Coefficient vector of exp_linear and affine fields.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
}

impl FieldArgs {
    fn resolve(&mut self) -> Result<(ScalarField, Vec<f64>)> {
        let n = or(&mut self.n, 3);
        let kind = match or(&mut self.field, "poly_gauss".into()).as_str() {
            "constant" => FieldKind::Constant { c: or(&mut self.c, 1.0) },
            "poly_gauss" => FieldKind::PolyGauss {
                a: or(&mut self.a, 0.0),
                b: or(&mut self.b, 1.0),
            },
            "power_offset" => FieldKind::PowerOffset {
                c: or(&mut self.c, 1.0),
                p: or(&mut self.p, -1.0),
            },
            "exp_linear" => FieldKind::ExpLinear {
                a: required(&self.coeffs, "coeffs")?,
            },
            "affine" => FieldKind::Affine {
                c: or(&mut self.c, 2.0),
                a: required(&self.coeffs, "coeffs")?,
            },
            other => return Err(invalid(format!("unknown field '{other}'"))),
        };
        let x = or(&mut self.x, vec![0.1; n]);
        Ok((ScalarField::new(n, kind)?, x))
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DivArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Order of the Newton tensor.
    #[arg(long)]
    pub k: Option<usize>,
    /// Finite-difference step.
    #[arg(long)]
    pub h: Option<f64>,
}

fn max_abs<'a>(v: impl Iterator<Item = &'a f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

pub fn div(_: &Ctx, p: &mut DivArgs) -> Result<Outcome> {
    let (field, x) = p.field.resolve()?;
    let k = or(&mut p.k, 2);
    let res = divergence_residual(&field, k, &x, or(&mut p.h, 1e-2))?;
    let worst = max_abs(res.iter());
    let result = json!({ "field": field.describe(), "residual": res, "residual_max": worst });
    Outcome::new(format!("{}: max |div T_{k}| = {worst:.3e}", field.describe()), &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CurlArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub h: Option<f64>,
}

pub fn curl(_: &Ctx, p: &mut CurlArgs) -> Result<Outcome> {
    let (field, x) = p.field.resolve()?;
    let res = curl_residual(&field, &x, or(&mut p.h, 1e-2))?;
    let worst = max_abs(res.iter().flatten().flatten());
    let result = json!({ "field": field.describe(), "residual": res, "residual_max": worst });
    Outcome::new(format!("{}: max curl residual {worst:.3e}", field.describe()), &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct OrderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Identity: div or curl.
    #[arg(long)]
    pub identity: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Step ladder, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<f64>>,
}

pub fn order(_: &Ctx, p: &mut OrderArgs) -> Result<Outcome> {
    let (field, x) = p.field.resolve()?;
    let identity = match or(&mut p.identity, "div".into()).as_str() {
        "div" => Identity::Divergence { k: or(&mut p.k, 2) },
        "curl" => Identity::Curl,
        other => return Err(invalid(format!("unknown identity '{other}' (div or curl)"))),
    };
    let ladder = or(&mut p.ladder, vec![2e-2, 1e-2, 5e-3]);
    let rep = convergence_study(&field, identity, &x, &ladder)?;
    let order = if rep.order.is_exact() {
        "exact".to_string()
    } else {
        format!("{:.4}", rep.order.value())
    };
    Outcome::new(format!("{}: order {order}", field.describe()), &rep)
}
