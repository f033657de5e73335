use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sigmak::linalg::SymmetricMatrix;
use sigmak::matrixhull::{
    bvn_decompose, midpoint_hull_check, random_orthogonal, seeded_rng, squared_orthogonal, DoublyStochasticMatrix,
};

use super::{invalid, or, read_json, rows_from, Ctx, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DecomposeArgs {
    /// JSON file holding the matrix rows, bare or under "matrix".
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Size of a random squared-orthogonal matrix when no input is given.
    #[arg(long)]
    pub n: Option<usize>,
}

pub fn decompose(ctx: &Ctx, p: &mut DecomposeArgs) -> Result<Outcome> {
    let s = match &p.input {
        Some(path) => {
            let v = read_json(path)?;
            let rows = match v.get("matrix") {
                Some(m) => rows_from(m, "matrix")?,
                None => rows_from(&v, "input")?,
            };
            DoublyStochasticMatrix::new(rows)?
        }
        None => {
            let mut rng = seeded_rng(ctx.seed);
            squared_orthogonal(&random_orthogonal(or(&mut p.n, 4), &mut rng))?
        }
    };
    let d = bvn_decompose(&s)?;
    let err = d.reconstruction_error(&s);
    let result = json!({
        "matrix": s.rows(),
        "items": d,
        "count": d.len(),
        "reconstruction_error": err,
    });
    let summary = format!(
        "{n}x{n}: {} permutation(s), reconstruction error {err:.3e}",
        d.len(),
        n = s.dim()
    );
    Outcome::new(summary, &result)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct HullArgs {
    /// JSON file with symmetric matrices under "a" and "b".
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Size of the random pair when no input is given.
    #[arg(long)]
    pub n: Option<usize>,
}

fn random_symmetric(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-1.0..1.0);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    m
}

pub fn hullcheck(ctx: &Ctx, p: &mut HullArgs) -> Result<Outcome> {
    let (a, b) = match &p.input {
        Some(path) => {
            let v = read_json(path)?;
            let get = |key: &str| -> Result<Vec<Vec<f64>>> {
                rows_from(v.get(key).unwrap_or(&Value::Null), key)
                    .map_err(|_| invalid(format!("input needs a symmetric matrix under \"{key}\"")))
            };
            (get("a")?, get("b")?)
        }
        None => {
            let n = or(&mut p.n, 3);
            let mut rng = seeded_rng(ctx.seed);
            (random_symmetric(n, &mut rng), random_symmetric(n, &mut rng))
        }
    };
    let a = SymmetricMatrix::from_rows(&a)?;
    let b = SymmetricMatrix::from_rows(&b)?;
    let cert = midpoint_hull_check(&a, &b)?;
    let summary = format!(
        "feasible = {}, {} vertices, residual {:.3e}",
        cert.feasible,
        cert.weights.len(),
        cert.residual
    );
    Outcome::new(summary, &cert)
}
