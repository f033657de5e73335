//! Inf-convolution on 1-D grids, Ricci eigenvalues of radial conformal
//! metrics `e^{2f}δ`, space-form ball volumes and Bishop–Gromov ratios.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::profile::{check_increasing, RadialProfile};
use crate::quad::{adaptive_simpson_rel, sphere_area, unit_ball_volume};
use crate::symfunc::EigenvalueVector;

/// Grid samples of a function of one variable.
pub type SampledFunction = RadialProfile;

/// Absolute slack on the monotonicity verdict.
pub const MONOTONE_SLACK: f64 = 1e-8;
const QUAD_TOL: f64 = 1e-12;

/// `f_ε(x_i) = min_j [f(x_j) + (x_i − x_j)²/ε]`, exact over the grid.
pub fn inf_convolution(f: &SampledFunction, eps: f64) -> Result<SampledFunction> {
    Ok(inf_convolution_with_argmin(f, eps)?.0)
}

/// Also returns the index of the minimizing node `x*` for every `x_i`.
pub fn inf_convolution_with_argmin(f: &SampledFunction, eps: f64) -> Result<(SampledFunction, Vec<usize>)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return arg(format!("eps must be positive, got {eps}"));
    }
    let (x, v) = (f.grid(), f.values());
    let mut out = Vec::with_capacity(x.len());
    let mut arg_min = Vec::with_capacity(x.len());
    for &xi in x {
        let (mut best, mut at) = (f64::INFINITY, 0);
        for (j, (&xj, &fj)) in x.iter().zip(v).enumerate() {
            let c = fj + (xi - xj) * (xi - xj) / eps;
            if c < best {
                best = c;
                at = j;
            }
        }
        out.push(best);
        arg_min.push(at);
    }
    Ok((RadialProfile::new(x.to_vec(), out)?, arg_min))
}

/// Largest second difference of `f` on its grid (non-uniform stencil).
/// For `f_ε` this is bounded by `2/ε`, the discrete semiconcavity bound.
pub fn max_second_difference(f: &SampledFunction) -> f64 {
    let (x, v) = (f.grid(), f.values());
    (1..x.len().saturating_sub(1))
        .map(|i| {
            let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            2.0 * (hl * v[i + 1] - (hl + hr) * v[i] + hr * v[i - 1]) / (hl * hr * (hl + hr))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Radial conformal factors with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConformalFactor {
    Constant { c: f64 },
    /// `ln(2/(1+r²))`: the unit round sphere.
    Sphere,
    /// `−ln r`: a flat cylinder.
    NegLog,
    /// `ln(1+r²)`.
    LogOnePlusSq,
    /// `(2/(n−2)) ln(1 + r^{2−n})`: two asymptotically flat ends.
    TwoEnds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialConformalMetric {
    pub n: usize,
    pub factor: ConformalFactor,
}

impl RadialConformalMetric {
    pub fn new(n: usize, factor: ConformalFactor) -> Result<Self> {
        if n < 2 {
            return arg(format!("dimension must be at least 2, got {n}"));
        }
        if matches!(factor, ConformalFactor::TwoEnds) && n < 3 {
            return arg("the two-ended factor needs n >= 3");
        }
        Ok(RadialConformalMetric { n, factor })
    }

    /// `(f, f′, f″)` at `r`.
    pub fn jet(&self, r: f64) -> (f64, f64, f64) {
        match self.factor {
            ConformalFactor::Constant { c } => (c, 0.0, 0.0),
            ConformalFactor::Sphere => {
                let q = 1.0 + r * r;
                ((2.0 / q).ln(), -2.0 * r / q, -2.0 * (1.0 - r * r) / (q * q))
            }
            ConformalFactor::NegLog => (-r.ln(), -1.0 / r, 1.0 / (r * r)),
            ConformalFactor::LogOnePlusSq => {
                let q = 1.0 + r * r;
                (q.ln(), 2.0 * r / q, 2.0 * (1.0 - r * r) / (q * q))
            }
            ConformalFactor::TwoEnds => {
                let m = self.n as f64 - 2.0;
                let c = 2.0 / m;
                let p = r.powf(-m);
                let u = 1.0 + p;
                let du = -m * p / r;
                let d2u = m * (m + 1.0) * p / (r * r);
                (c * u.ln(), c * du / u, c * (d2u / u - du * du / (u * u)))
            }
        }
    }

    /// `e^{f}`, integrable down to `r = 0` where the factor allows it.
    fn length_density(&self, t: f64) -> f64 {
        if t == 0.0 {
            return match self.factor {
                ConformalFactor::Constant { c } => c.exp(),
                ConformalFactor::Sphere => 2.0,
                ConformalFactor::LogOnePlusSq => 1.0,
                ConformalFactor::NegLog | ConformalFactor::TwoEnds => f64::INFINITY,
            };
        }
        self.jet(t).0.exp()
    }

    fn volume_density(&self, t: f64) -> f64 {
        if t == 0.0 {
            return if self.n > 1 { 0.0 } else { self.length_density(0.0) };
        }
        (self.n as f64 * self.jet(t).0).exp() * t.powi(self.n as i32 - 1)
    }

    fn regular_at_origin(&self) -> bool {
        !matches!(self.factor, ConformalFactor::NegLog | ConformalFactor::TwoEnds)
    }
}

/// Ricci eigenvalues of `e^{2f}δ` relative to itself: radial first, then the
/// `n − 1` equal tangential ones.
pub fn ricci_conformal_radial(metric: &RadialConformalMetric, r: f64) -> Result<EigenvalueVector<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return arg(format!("radius must be positive, got {r}"));
    }
    let (f, d1, d2) = metric.jet(r);
    let nf = metric.n as f64;
    let scale = (-2.0 * f).exp();
    let radial = -(nf - 1.0) * (d2 + d1 / r);
    let tangential = -d2 - (2.0 * nf - 3.0) * d1 / r - (nf - 2.0) * d1 * d1;
    EigenvalueVector::radial(metric.n, radial * scale, tangential * scale)
}

/// `sn_k(t)`.
fn sn(kcurv: f64, t: f64) -> f64 {
    if kcurv > 0.0 {
        let s = kcurv.sqrt();
        (s * t).sin() / s
    } else if kcurv < 0.0 {
        let s = (-kcurv).sqrt();
        (s * t).sinh() / s
    } else {
        t
    }
}

/// `v(n, k, r) = |S^{n−1}| ∫_0^r sn_k(t)^{n−1} dt`.
pub fn space_form_volume(n: usize, kcurv: f64, r: f64) -> Result<f64> {
    if n < 1 {
        return arg("dimension must be positive");
    }
    if !(r > 0.0 && r.is_finite() && kcurv.is_finite()) {
        return arg(format!("radius must be positive, got {r}"));
    }
    if kcurv > 0.0 && r > std::f64::consts::PI / kcurv.sqrt() {
        return arg(format!("radius {r} exceeds the diameter π/√k of the model sphere"));
    }
    if kcurv == 0.0 {
        return Ok(unit_ball_volume(n) * r.powi(n as i32));
    }
    let integrand = |t: f64| sn(kcurv, t).powi(n as i32 - 1);
    Ok(sphere_area(n) * adaptive_simpson_rel(&integrand, 0.0, r, QUAD_TOL)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneVerdict {
    NonIncreasing,
    Increasing,
    /// The Ricci lower bound failed somewhere; the ratio is reported anyway.
    Unsupported,
}

#[derive(Debug, Clone, Serialize)]
pub struct BishopGromovReport {
    pub n: usize,
    pub kcurv: f64,
    pub geodesic_radius: Vec<f64>,
    pub volume: Vec<f64>,
    #[serde(skip)]
    pub ratio: RadialProfile,
    /// Smallest Ricci eigenvalue minus `(n−1)k` over the grid.
    pub ricci_margin_min: f64,
    pub ricci_bound_holds: bool,
    pub non_increasing: bool,
    pub verdict: MonotoneVerdict,
}

/// `Vol(B_ρ)/v(n, k, s(ρ))` with `s(ρ) = ∫_0^ρ e^f`, `Vol(B_ρ) = |S^{n−1}| ∫_0^ρ e^{nf} t^{n−1}`.
pub fn bishop_gromov_ratio(metric: &RadialConformalMetric, kcurv: f64, grid: &[f64]) -> Result<BishopGromovReport> {
    check_increasing(grid)?;
    if !(grid[0] > 0.0) {
        return arg("radii must be positive");
    }
    if !metric.regular_at_origin() {
        return Err(Error::Precondition(
            "balls about the origin need a conformal factor that is regular at r = 0".into(),
        ));
    }
    let n = metric.n;
    let bound = (n as f64 - 1.0) * kcurv;
    let mut ricci_margin_min = f64::INFINITY;
    for &r in grid {
        let ev = ricci_conformal_radial(metric, r)?;
        let lo = ev.iter().fold(f64::INFINITY, |a, &x| a.min(x));
        ricci_margin_min = ricci_margin_min.min(lo - bound);
    }
    let ricci_bound_holds = ricci_margin_min >= -1e-10;

    let ld = |t: f64| metric.length_density(t);
    let vd = |t: f64| metric.volume_density(t);
    let (mut s, mut vol, mut prev) = (0.0, 0.0, 0.0);
    let (mut radii, mut vols, mut ratio) = (Vec::new(), Vec::new(), Vec::new());
    for &r in grid {
        s += adaptive_simpson_rel(&ld, prev, r, QUAD_TOL)?;
        vol += sphere_area(n) * adaptive_simpson_rel(&vd, prev, r, QUAD_TOL)?;
        prev = r;
        radii.push(s);
        vols.push(vol);
        ratio.push(vol / space_form_volume(n, kcurv, s)?);
    }
    let non_increasing = ratio.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let verdict = if !ricci_bound_holds {
        MonotoneVerdict::Unsupported
    } else if non_increasing {
        MonotoneVerdict::NonIncreasing
    } else {
        MonotoneVerdict::Increasing
    };
    Ok(BishopGromovReport {
        n,
        kcurv,
        geodesic_radius: radii,
        volume: vols,
        ratio: RadialProfile::new(grid.to_vec(), ratio)?,
        ricci_margin_min,
        ricci_bound_holds,
        non_increasing,
        verdict,
    })
}

/// Exploratory: for `u = 1 + r^{2−n}` (two flat ends exchanged by inversion)
/// the region within geodesic distance `s` of the neck `r = 1` is the annulus
/// `1/R < r < R`; its volume over `ω_n s^n` tends to the number of ends, 2.
pub fn two_end_ratio(n: usize, big_r: &[f64]) -> Result<RadialProfile> {
    let metric = RadialConformalMetric::new(n, ConformalFactor::TwoEnds)?;
    check_increasing(big_r)?;
    if !(big_r[0] > 1.0) {
        return arg("radii must exceed the neck radius 1");
    }
    let ld = |t: f64| metric.length_density(t);
    let vd = |t: f64| metric.volume_density(t);
    let mut out = Vec::with_capacity(big_r.len());
    for &r in big_r {
        let s = adaptive_simpson_rel(&ld, 1.0, r, QUAD_TOL)?;
        // inversion symmetry: the inner half has the same volume
        let half = sphere_area(n) * adaptive_simpson_rel(&vd, 1.0, r, QUAD_TOL)?;
        out.push(2.0 * half / (unit_ball_volume(n) * s.powi(n as i32)));
    }
    RadialProfile::new(big_r.to_vec(), out)
}
