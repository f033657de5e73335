use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sigmak::conformal::radial_eigenvalues;
use sigmak::greens::{bubble, continuation, mass_constant, relative_sup_error, solve_regularized, verify_degenerate};
use sigmak::{Cone, DefiningFunction, ExactFamily, Precision, RadialBVP, Spacing, Verdict};

use super::{invalid, or, parse_enum, Ctx, GridArgs, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ExactArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Exponent m; defaults to the degenerate (n − 2k)/k.
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

pub fn exact(_: &Ctx, p: &mut ExactArgs) -> Result<Outcome> {
    let n = or(&mut p.n, 5);
    let k = or(&mut p.k, 2);
    let cone = Cone::gamma_k(n, k)?;
    let degenerate_m = (n as f64 - 2.0 * k as f64) / k as f64;
    let fam = ExactFamily::new(n, or(&mut p.m, degenerate_m), or(&mut p.c1, 1.0), or(&mut p.c2, 1.0))?;
    let grid = p.grid.points("0.01:10:50", Spacing::Log)?;
    let profile = fam.profile(&grid)?;
    let (verdicts, degenerate) = if (fam.m - degenerate_m).abs() <= 1e-12 && 2 * k < n {
        let rep = verify_degenerate(&fam, &cone, &grid, 1e-10)?;
        (rep.verdicts.clone(), Some(rep))
    } else {
        let v = grid
            .iter()
            .map(|&r| {
                let lam = radial_eigenvalues(n, &fam.jet(r)?)?;
                Ok(cone.contains(lam.entries(), 1e-10)?.verdict)
            })
            .collect::<sigmak::Result<Vec<Verdict>>>()?;
        (v, None)
    };
    let boundary = verdicts.iter().filter(|v| **v == Verdict::Boundary).count();
    let result = json!({
        "family": fam,
        "verdicts": verdicts,
        "all_boundary": boundary == verdicts.len(),
        "max_sigma_residual": degenerate.as_ref().map(|d| d.max_sigma_residual),
        "min_lower_sigma": degenerate.as_ref().map(|d| d.min_lower_sigma),
    });
    let summary = format!("m = {}: {boundary}/{} Boundary", fam.m, verdicts.len());
    Ok(Outcome::new(summary, &result)?.with_csv(profile.to_csv("u")))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BubbleArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Concentration parameter lambda.
    #[arg(long)]
    pub scale: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

pub fn bubble_cmd(_: &Ctx, p: &mut BubbleArgs) -> Result<Outcome> {
    let n = or(&mut p.n, 5);
    let f = DefiningFunction::build(&Cone::gamma_k(n, or(&mut p.k, 2))?, None)?;
    let b = bubble(&f, or(&mut p.scale, 1.0))?;
    let grid = p.grid.points("0.01:100:50", Spacing::Log)?;
    let mut worst: f64 = 0.0;
    for &r in &grid {
        let lam = radial_eigenvalues(n, &b.jet(r)?)?;
        worst = worst.max((f.value(lam.entries())? - 1.0).abs());
    }
    let profile = sigmak::RadialProfile::from_fn(grid, |r| b.value(r))?;
    let result = json!({
        "n": b.n,
        "kappa": b.kappa,
        "scale": b.scale,
        "max_normalization_error": worst,
    });
    let summary = format!("kappa = {:.17e}, max |f - 1| = {worst:.3e}", b.kappa);
    Ok(Outcome::new(summary, &result)?.with_csv(profile.to_csv("u")))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Right-hand side epsilon (`greens solve`).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Epsilon ladder, comma separated (`greens continue`).
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<f64>>,
    #[arg(long)]
    pub r_in: Option<f64>,
    #[arg(long)]
    pub r_out: Option<f64>,
    /// Coefficients of the exact family supplying boundary data.
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    /// Collocation nodes.
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// double or double_double.
    #[arg(long, value_parser = parse_enum::<Precision>)]
    pub precision: Option<Precision>,
    /// Defining function: canonical or constructed.
    #[arg(long)]
    pub form: Option<String>,
}

impl SolveArgs {
    fn problem(&mut self, epsilon: f64) -> Result<(RadialBVP, ExactFamily)> {
        let n = or(&mut self.n, 5);
        let k = or(&mut self.k, 2);
        let cone = Cone::gamma_k(n, k)?;
        let f = match or(&mut self.form, "canonical".into()).as_str() {
            "canonical" => DefiningFunction::canonical(&cone)?,
            "constructed" => DefiningFunction::build(&cone, None)?,
            other => return Err(invalid(format!("unknown form '{other}' (canonical or constructed)"))),
        };
        let fam = ExactFamily::degenerate_for(n, k, or(&mut self.c1, 0.45), or(&mut self.c2, 0.45))?;
        let bvp = RadialBVP::from_family(f, epsilon, &fam, or(&mut self.r_in, 0.05), or(&mut self.r_out, 1.0))?
            .with_grid_size(or(&mut self.grid_size, 5000))
            .with_precision(or(&mut self.precision, Precision::DoubleDouble));
        Ok((bvp, fam))
    }
}

pub fn solve(_: &Ctx, p: &mut SolveArgs) -> Result<Outcome> {
    if p.ladder.is_some() {
        return Err(invalid("--ladder belongs to `greens continue`"));
    }
    let epsilon = or(&mut p.epsilon, 0.1);
    let (bvp, fam) = p.problem(epsilon)?;
    let mut report = solve_regularized(&bvp)?;
    report.sup_error = Some(relative_sup_error(&report.profile, &fam));
    let summary = format!(
        "epsilon = {}: converged = {}, residual {:.3e}, {} Newton steps",
        report.epsilon, report.converged, report.residual_max, report.newton_iterations
    );
    let csv = report.profile.to_csv("u");
    Ok(Outcome::new(summary, &report)?.with_csv(csv))
}

pub fn continue_cmd(_: &Ctx, p: &mut SolveArgs) -> Result<Outcome> {
    if p.epsilon.is_some() {
        return Err(invalid("--epsilon belongs to `greens solve`; use --ladder"));
    }
    let ladder = or(&mut p.ladder, vec![1e-1, 1e-2, 1e-3, 1e-4]);
    let first = *ladder.first().ok_or_else(|| invalid("the ladder is empty"))?;
    let (bvp, fam) = p.problem(first)?;
    let reports = continuation(&bvp, &ladder, Some(&fam))?;
    let last = reports.last().expect("non-empty ladder");
    let summary = format!(
        "{} levels, final epsilon {}: residual {:.3e}, sup-error {:.3e}",
        reports.len(),
        last.epsilon,
        last.residual_max,
        last.sup_error.unwrap_or(f64::NAN)
    );
    let csv = last.profile.to_csv("u");
    Ok(Outcome::new(summary, &json!({ "levels": reports }))?.with_csv(csv))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct MassArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    pub quad_points: Option<usize>,
}

pub fn mass(_: &Ctx, p: &mut MassArgs) -> Result<Outcome> {
    let n = or(&mut p.n, 5);
    let k = or(&mut p.k, 2);
    let f = DefiningFunction::build(&Cone::gamma_k(n, k)?, None)?;
    let m = mass_constant(n, k, &f, or(&mut p.quad_points, 16))?;
    Outcome::new(format!("m({n},{k}) = {m:.17e}"), &json!({ "mass_constant": m }))
}
