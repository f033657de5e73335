//! One-dimensional quadrature helpers.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{arg, Error, Result};

/// `|S^{n−1}|`, the area of the unit sphere in `ℝ^n`, by the recurrence
/// `|S^{n+1}| = 2π |S^{n−1}| / n`.
pub fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

/// Volume of the unit ball in `ℝ^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

const MAX_DEPTH: usize = 40;
const SIMPSON_DEPTH: usize = 28;

/// Gauss–Legendre panels with `points` nodes, bisected until a panel and its
/// two halves agree to `rel_tol` relative to the running total.
pub fn adaptive_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, points: usize, rel_tol: f64) -> Result<f64> {
    let degree = NonZeroUsize::new(points).ok_or_else(|| Error::Argument("need at least one node".into()))?;
    let rule = GaussLegendre::new(degree);
    let whole = rule.integrate(a, b, f);
    gauss_step(&rule, f, a, b, whole, rel_tol, whole.abs(), 0)
}

#[allow(clippy::too_many_arguments)]
fn gauss_step(
    rule: &GaussLegendre,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    scale: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    let sum = left + right;
    if !sum.is_finite() {
        return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
    }
    if (sum - whole).abs() <= rel_tol * scale.max(f64::MIN_POSITIVE) || depth >= MAX_DEPTH {
        return Ok(sum);
    }
    Ok(gauss_step(rule, f, a, m, left, rel_tol, scale, depth + 1)?
        + gauss_step(rule, f, m, b, right, rel_tol, scale, depth + 1)?)
}

/// Adaptive Simpson with Richardson correction, to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(b >= a) {
        return arg(format!("integration interval [{a}, {b}] is reversed"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let out = simpson_step(f, a, b, fa, fm, fb, whole, tol, 0);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")))
    }
}

/// Adaptive Simpson to `rel_tol` relative to a 64-panel composite estimate.
pub fn adaptive_simpson_rel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(b >= a) {
        return arg(format!("integration interval [{a}, {b}] is reversed"));
    }
    let panels = 64;
    let h = (b - a) / panels as f64;
    let crude: f64 = (0..panels)
        .map(|i| {
            let x = a + h * i as f64;
            h / 6.0 * (f(x).abs() + 4.0 * f(x + 0.5 * h).abs() + f(x + h).abs())
        })
        .sum();
    adaptive_simpson(f, a, b, (rel_tol * crude).max(f64::MIN_POSITIVE))
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= SIMPSON_DEPTH || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_and_simpson() {
        let g = adaptive_gauss(&|x: f64| x.sin(), 0.0, PI, 8, 1e-14).unwrap();
        assert!((g - 2.0).abs() < 1e-13);
        let s = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((s - (1f64.exp() - 1.0)).abs() < 1e-12);
    }
}
