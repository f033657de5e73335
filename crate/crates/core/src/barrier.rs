//! Explicit radial super-solutions and their verification on grids.
//!
//! * `v_a(r) = (r^{1−μ} + a − r^{δ−μ})^{(n−2)/(μ−1)}`, whose Schouten
//!   eigenvalues lie in `Γ` near the pole for `a` large;
//! * `φ(r) = a r^{−q} + b r^{−(n−2−q)}`, with `f(λ(A_{g_φ})) ≳ r^{−2} φ^{−4/(n−2)}`;
//! * the glued barrier `v_a ψ + a(1 − ψ)` for a fixed quintic cutoff `ψ`.

use serde::Serialize;

use crate::cone::{Cone, ConeMembership, Verdict};
use crate::conformal::{radial_chi, radial_eigenvalues, RadialJet};
use crate::defining::DefiningFunction;
use crate::error::{arg, Error, Result};
use crate::profile::check_increasing;
use crate::scalar::Real;

/// Verdict tolerance used by the grid checks.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperSolutionParams {
    pub n: usize,
    pub mu: f64,
    pub delta: f64,
    pub a: f64,
    pub r1: f64,
}

impl SuperSolutionParams {
    pub fn new(n: usize, mu: f64, delta: f64, a: f64, r1: f64) -> Result<Self> {
        if n < 3 {
            return arg(format!("n must be at least 3, got {n}"));
        }
        if !(1.0 < mu && mu < delta && delta < 3.0) {
            return arg(format!("need 1 < mu < delta < 3, got mu = {mu}, delta = {delta}"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return arg(format!("shift a must be positive, got {a}"));
        }
        if !(r1 > 0.0 && r1.is_finite()) {
            return arg(format!("gluing radius must be positive, got {r1}"));
        }
        Ok(SuperSolutionParams { n, mu, delta, a, r1 })
    }

    fn gamma(&self) -> f64 {
        (self.n as f64 - 2.0) / (self.mu - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeSuperHarParams {
    pub n: usize,
    pub q: f64,
    pub a: f64,
    pub b: f64,
}

impl ConeSuperHarParams {
    pub fn new(n: usize, q: f64, a: f64, b: f64) -> Result<Self> {
        if n < 3 {
            return arg(format!("n must be at least 3, got {n}"));
        }
        if !(q > 0.0 && q < n as f64 - 2.0) {
            return arg(format!("need 0 < q < n - 2, got q = {q}"));
        }
        if !(a > 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return arg(format!("coefficients must satisfy a > 0, b >= 0, got a = {a}, b = {b}"));
        }
        Ok(ConeSuperHarParams { n, q, a, b })
    }
}

/// Result of a barrier check on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierReport {
    pub grid: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    pub margins: Vec<f64>,
    pub min_margin: f64,
    /// Smallest value of the check ratio along the grid: `(χ_1−χ_2)/χ_1 + μ`
    /// for super-solutions, `r² φ^{4/(n−2)} f(λ)` for the cone-superharmonic
    /// profile.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// `χ_1 > 0` everywhere (super-solution checks only).
    pub chi1_positive: bool,
    pub all_interior: bool,
}

impl BarrierReport {
    fn assemble(grid: Vec<f64>, members: Vec<ConeMembership>, ratios: Vec<f64>, chi1_positive: bool) -> Self {
        let margins: Vec<f64> = members.iter().map(|m| m.signed_margin).collect();
        let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        let ratio_min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let ratio_max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let all_interior = members.iter().all(|m| m.is_interior());
        BarrierReport {
            grid,
            verdicts: members.iter().map(|m| m.verdict).collect(),
            margins,
            min_margin,
            ratio_min,
            ratio_max,
            chi1_positive,
            all_interior,
        }
    }

    /// Radii whose verdict is not `Interior`.
    pub fn failures(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(&self.verdicts)
            .filter(|(_, v)| **v != Verdict::Interior)
            .map(|(r, _)| *r)
            .collect()
    }

    /// Bounded away from zero in the sense `min > 1e−6 · max`.
    pub fn ratio_bounded_away(&self) -> bool {
        self.ratio_min > 0.0 && self.ratio_min > 1e-6 * self.ratio_max
    }
}

/// Closed-form jet of `v_a`.
pub fn supersolution_jet<T: Real>(p: &SuperSolutionParams, r: T) -> Result<RadialJet<T>> {
    if !(r > T::zero()) {
        return arg(format!("radius must be positive, got {r}"));
    }
    let mu = T::lit(p.mu);
    let dm = T::lit(p.delta - p.mu);
    let one = T::one();
    let e1 = one - mu;
    let base = r.powf(e1) + T::lit(p.a) - r.powf(dm);
    if !(base > T::zero()) {
        return Err(Error::Domain(format!(
            "r^(1-mu) + a - r^(delta-mu) = {base} is not positive at r = {r}"
        )));
    }
    let d1 = e1 * r.powf(e1 - one) - dm * r.powf(dm - one);
    let d2 = e1 * (e1 - one) * r.powf(e1 - T::lit(2.0)) - dm * (dm - one) * r.powf(dm - T::lit(2.0));
    let g = T::lit(p.gamma());
    let v = base.powf(g);
    let dv = g * base.powf(g - one) * d1;
    let d2v = g * (g - one) * base.powf(g - T::lit(2.0)) * d1 * d1 + g * base.powf(g - one) * d2;
    RadialJet::new(r, v, dv, d2v)
}

/// Checks `λ(A_{g_{v_a}}) ∈ Γ` along `grid ⊂ (0, r_1/2]`, together with the
/// ratio `(χ_1 − χ_2)/χ_1 + μ > 0`.
pub fn verify_supersolution(p: &SuperSolutionParams, cone: &Cone, grid: &[f64]) -> Result<BarrierReport> {
    check_increasing(grid)?;
    if cone.dim() != p.n {
        return arg(format!("cone dimension {} differs from n = {}", cone.dim(), p.n));
    }
    if grid[0] <= 0.0 || grid[grid.len() - 1] > 0.5 * p.r1 {
        return Err(Error::Domain(format!(
            "grid must lie in (0, r1/2] = (0, {}]",
            0.5 * p.r1
        )));
    }
    let mut members = Vec::with_capacity(grid.len());
    let mut ratios = Vec::with_capacity(grid.len());
    let mut chi1_positive = true;
    for &r in grid {
        let jet = supersolution_jet(p, r)?;
        let chi = radial_chi(p.n, &jet)?;
        let lam = radial_eigenvalues(p.n, &jet)?;
        members.push(cone.contains(&lam, MEMBERSHIP_TOL)?);
        ratios.push((chi.chi1 - chi.chi2) / chi.chi1 + p.mu);
        chi1_positive &= chi.chi1 > 0.0;
    }
    Ok(BarrierReport::assemble(grid.to_vec(), members, ratios, chi1_positive))
}

/// Closed-form jet of `φ = a r^{−q} + b r^{−(n−2−q)}`.
pub fn conesuperhar_jet<T: Real>(p: &ConeSuperHarParams, r: T) -> Result<RadialJet<T>> {
    if !(r > T::zero()) {
        return arg(format!("radius must be positive, got {r}"));
    }
    let mut u = T::zero();
    let mut du = T::zero();
    let mut d2u = T::zero();
    for (c, e) in [(p.a, -p.q), (p.b, -(p.n as f64 - 2.0 - p.q))] {
        let (c, e) = (T::lit(c), T::lit(e));
        u = u + c * r.powf(e);
        du = du + c * e * r.powf(e - T::one());
        d2u = d2u + c * e * (e - T::one()) * r.powf(e - T::lit(2.0));
    }
    RadialJet::new(r, u, du, d2u)
}

/// Evaluates `r² φ^{4/(n−2)} f(λ(A_{g_φ}))` along the grid. Needs
/// `μ_Γ⁺ > 1`, i.e. `(−1, 1, …, 1) ∈ Γ`.
pub fn verify_conesuperhar(p: &ConeSuperHarParams, f: &DefiningFunction, grid: &[f64]) -> Result<BarrierReport> {
    check_increasing(grid)?;
    if f.dim() != p.n {
        return arg(format!("defining function dimension {} differs from n = {}", f.dim(), p.n));
    }
    let mu = f.cone().mu_plus(1e-12)?;
    if mu <= 1.0 + 1e-9 {
        return Err(Error::Precondition(format!(
            "needs mu_plus > 1, got {mu} for {}",
            f.cone().describe()
        )));
    }
    let mut members = Vec::with_capacity(grid.len());
    let mut ratios = Vec::with_capacity(grid.len());
    let expo = 4.0 / (p.n as f64 - 2.0);
    for &r in grid {
        let jet = conesuperhar_jet(p, r)?;
        let lam = radial_eigenvalues(p.n, &jet)?;
        let m = f.cone().contains(&lam, MEMBERSHIP_TOL)?;
        let ratio = match m.verdict {
            Verdict::Outside => f64::NEG_INFINITY,
            _ => f.value(&lam)? * r * r * jet.u.powf(expo),
        };
        members.push(m);
        ratios.push(ratio);
    }
    Ok(BarrierReport::assemble(grid.to_vec(), members, ratios, true))
}

/// Quintic cutoff: 1 on `r ≤ 3r_1/5`, 0 on `r ≥ 4r_1/5`, `C²` in between.
/// Returns the value and the first two derivatives.
pub fn cutoff<T: Real>(r1: T, r: T) -> (T, T, T) {
    let lo = T::lit(0.6) * r1;
    let hi = T::lit(0.8) * r1;
    if r <= lo {
        return (T::one(), T::zero(), T::zero());
    }
    if r >= hi {
        return (T::zero(), T::zero(), T::zero());
    }
    let w = hi - lo;
    let s = (r - lo) / w;
    let (s2, s3) = (s * s, s * s * s);
    let step = T::lit(10.0) * s3 - T::lit(15.0) * s2 * s2 + T::lit(6.0) * s3 * s2;
    let dstep = T::lit(30.0) * s2 - T::lit(60.0) * s3 + T::lit(30.0) * s2 * s2;
    let d2step = T::lit(60.0) * s - T::lit(180.0) * s2 + T::lit(120.0) * s3;
    (T::one() - step, -dstep / w, -d2step / (w * w))
}

/// `v_a ψ + a (1 − ψ)`; the constant `a` outside the cutoff support.
pub fn glue_barrier<T: Real>(p: &SuperSolutionParams, r: T) -> Result<RadialJet<T>> {
    if !(r > T::zero()) {
        return arg(format!("radius must be positive, got {r}"));
    }
    let a = T::lit(p.a);
    let (psi, dpsi, d2psi) = cutoff(T::lit(p.r1), r);
    if psi == T::zero() {
        return RadialJet::new(r, a, T::zero(), T::zero());
    }
    let v = supersolution_jet(p, r)?;
    if psi == T::one() && dpsi == T::zero() {
        return Ok(v);
    }
    let two = T::lit(2.0);
    let u = v.u * psi + a * (T::one() - psi);
    let du = v.du * psi + (v.u - a) * dpsi;
    let d2u = v.d2u * psi + two * v.du * dpsi + (v.u - a) * d2psi;
    RadialJet::new(r, u, du, d2u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::log_grid;

    fn params(a: f64) -> SuperSolutionParams {
        SuperSolutionParams::new(5, 1.4, 2.0, a, 1.0).unwrap()
    }

    #[test]
    fn value_at_unit_radius() {
        let p = SuperSolutionParams::new(5, 1.4, 2.0, 3.0, 4.0).unwrap();
        let j = supersolution_jet(&p, 1.0).unwrap();
        assert!((j.u - 3.0f64.powf(3.0 / 0.4)).abs() < 1e-9 * j.u);
    }

    #[test]
    fn jet_matches_hand_derivatives() {
        // n=5, μ=1.4, δ=2, a=10, r=0.1; B = r^{−0.4} + 10 − r^{0.6}, γ = 7.5
        let p = params(10.0);
        let r: f64 = 0.1;
        let b = r.powf(-0.4) + 10.0 - r.powf(0.6);
        let b1 = -0.4 * r.powf(-1.4) - 0.6 * r.powf(-0.4);
        let b2 = 0.56 * r.powf(-2.4) + 0.24 * r.powf(-1.4);
        let g = 7.5;
        let v = b.powf(g);
        let v1 = g * b.powf(g - 1.0) * b1;
        let v2 = g * (g - 1.0) * b.powf(g - 2.0) * b1 * b1 + g * b.powf(g - 1.0) * b2;
        let j = supersolution_jet(&p, r).unwrap();
        assert!((j.u - v).abs() < 1e-12 * v);
        assert!((j.du - v1).abs() < 1e-12 * v1.abs());
        assert!((j.d2u - v2).abs() < 1e-12 * v2.abs());
    }

    #[test]
    fn decreasing_near_pole() {
        let p = params(100.0);
        for r in log_grid(1e-3, 0.5, 40).unwrap() {
            assert!(supersolution_jet(&p, r).unwrap().du < 0.0);
        }
    }

    #[test]
    fn large_shift_passes_small_fails() {
        let cone = Cone::gamma_k(5, 2).unwrap();
        let p = SuperSolutionParams::new(5, 1.4, 2.0, 100.0, 0.4).unwrap();
        let grid = log_grid(1e-3, 0.2, 50).unwrap();
        let rep = verify_supersolution(&p, &cone, &grid).unwrap();
        assert!(rep.all_interior, "failures {:?}", rep.failures());
        assert!(rep.ratio_min > 0.0 && rep.chi1_positive);
        let q = SuperSolutionParams::new(5, 1.4, 2.0, 0.01, 0.4).unwrap();
        match verify_supersolution(&q, &cone, &grid) {
            Ok(rep) => assert!(!rep.all_interior),
            Err(e) => assert!(matches!(e, Error::Domain(_))),
        }
    }

    #[test]
    fn grid_must_fit_inside_half_radius() {
        let cone = Cone::gamma_k(5, 2).unwrap();
        let p = params(100.0);
        let grid = log_grid(1e-3, 0.9, 10).unwrap();
        assert!(matches!(verify_supersolution(&p, &cone, &grid), Err(Error::Domain(_))));
    }

    #[test]
    fn conesuperhar_examples() {
        let p = ConeSuperHarParams::new(5, 1.5, 2.0, 2.0).unwrap();
        let j = conesuperhar_jet(&p, 0.3f64).unwrap();
        assert!((j.u - 4.0 * 0.3f64.powf(-1.5)).abs() < 1e-12);
        let p = ConeSuperHarParams::new(5, 1.0, 2.0, 0.0).unwrap();
        let j = conesuperhar_jet(&p, 0.5f64).unwrap();
        assert!((j.u - 4.0).abs() < 1e-14 && (j.du + 8.0).abs() < 1e-13 && (j.d2u - 32.0).abs() < 1e-12);
        // n=5, q=1, a=2, b=3 at r=0.5: φ = 2/r + 3/r², φ′ = −2/r² − 6/r³, φ″ = 4/r³ + 18/r⁴
        let p = ConeSuperHarParams::new(5, 1.0, 2.0, 3.0).unwrap();
        let j = conesuperhar_jet(&p, 0.5f64).unwrap();
        assert!((j.u - 16.0).abs() < 1e-12 && (j.du + 56.0).abs() < 1e-12 && (j.d2u - 320.0).abs() < 1e-11);
    }

    #[test]
    fn conesuperhar_ratio() {
        let f = DefiningFunction::build(&Cone::gamma_k(5, 2).unwrap(), None).unwrap();
        let p = ConeSuperHarParams::new(5, 1.0, 1.0, 1.0).unwrap();
        let rep = verify_conesuperhar(&p, &f, &log_grid(1e-3, 0.1, 30).unwrap()).unwrap();
        assert!(rep.ratio_min > 0.0 && rep.ratio_bounded_away());

        let f6 = DefiningFunction::build(&Cone::gamma_k(6, 2).unwrap(), None).unwrap();
        let p = ConeSuperHarParams::new(6, 2.0, 1.0, 5.0).unwrap();
        let rep = verify_conesuperhar(&p, &f6, &log_grid(1e-3, 0.1, 30).unwrap()).unwrap();
        assert!(rep.ratio_min > 0.0);

        let f4 = DefiningFunction::build(&Cone::gamma_k(4, 2).unwrap(), None).unwrap();
        let p = ConeSuperHarParams::new(4, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            verify_conesuperhar(&p, &f4, &[0.01, 0.1]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn glued_barrier_regions() {
        let p = SuperSolutionParams::new(5, 1.4, 2.0, 50.0, 1.0).unwrap();
        for r in [0.1f64, 0.3, 0.5] {
            assert_eq!(glue_barrier(&p, r).unwrap(), supersolution_jet(&p, r).unwrap());
        }
        for r in [1.0f64, 1.5] {
            let j = glue_barrier(&p, r).unwrap();
            assert_eq!((j.u, j.du, j.d2u), (50.0, 0.0, 0.0));
        }
        let r: f64 = 0.7;
        let h = 1e-4;
        let j = glue_barrier(&p, r).unwrap();
        let up = glue_barrier(&p, r + h).unwrap();
        let dn = glue_barrier(&p, r - h).unwrap();
        let fd1 = (up.u - dn.u) / (2.0 * h);
        let fd2 = (up.u - 2.0 * j.u + dn.u) / (h * h);
        assert!((fd1 - j.du).abs() < 1e-5 * j.du.abs().max(1.0));
        assert!((fd2 - j.d2u).abs() < 1e-3 * j.d2u.abs().max(1.0));
        let v = supersolution_jet(&p, r).unwrap().u;
        assert!(j.u > v.min(50.0) && j.u < v.max(50.0));
    }

    #[test]
    fn pole_asymptotics() {
        let p = params(10.0);
        for r in log_grid(1e-8, 1e-3, 10).unwrap() {
            let v = supersolution_jet(&p, r).unwrap().u;
            let lhs = (r.powi(3) * v - 1.0).abs();
            assert!(lhs < 10.0 * r.powf(0.4) * p.a * 7.5, "r = {r}: {lhs}");
        }
    }
}
