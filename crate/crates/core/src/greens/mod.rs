//! Radial Green's function machinery on flat space: the exact family
//! `(C_1 r^{−m} + C_2)^{(n−2)/m}`, the normalized bubble, the regularized
//! Dirichlet solver with continuation, comparison checks and the mass
//! constant `m_{n,k}`.

mod solver;

use serde::Serialize;

pub use solver::{continuation, relative_sup_error, solve_from, solve_regularized, Precision, RadialBVP, SolverReport};

use crate::cone::{Cone, Verdict};
use crate::conformal::{radial_eigenvalues, RadialJet};
use crate::defining::DefiningFunction;
use crate::error::{arg, Error, Result};
use crate::profile::{check_increasing, RadialProfile};
use crate::quad::{self, sphere_area};
use crate::scalar::Real;
use crate::symfunc::sigma_upto;
use twofloat::TwoFloat;

/// `u(r) = (C_1 r^{−m} + C_2)^{(n−2)/m}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactFamily {
    pub n: usize,
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ExactFamily {
    pub fn new(n: usize, m: f64, c1: f64, c2: f64) -> Result<Self> {
        if n < 3 {
            return arg(format!("n must be at least 3, got {n}"));
        }
        if !(m > 0.0 && m.is_finite()) {
            return arg(format!("exponent m must be positive, got {m}"));
        }
        if !(c1 >= 0.0 && c2 >= 0.0 && c1 + c2 > 0.0) {
            return arg(format!("need C1, C2 >= 0 with C1 + C2 > 0, got {c1}, {c2}"));
        }
        Ok(ExactFamily { n, m, c1, c2 })
    }

    /// The family whose eigenvalues lie on `∂Γ_k`: `m = (n − 2k)/k`.
    pub fn degenerate_for(n: usize, k: usize, c1: f64, c2: f64) -> Result<Self> {
        if k == 0 || 2 * k >= n {
            return arg(format!("degenerate exponent needs 1 <= k < n/2, got k = {k}, n = {n}"));
        }
        Self::new(n, (n as f64 - 2.0 * k as f64) / k as f64, c1, c2)
    }

    pub fn jet<T: Real>(&self, r: T) -> Result<RadialJet<T>> {
        if !(r > T::zero()) {
            return arg(format!("radius must be positive, got {r}"));
        }
        let m = T::lit(self.m);
        let one = T::one();
        let c1 = T::lit(self.c1);
        let base = c1 * r.powf(-m) + T::lit(self.c2);
        let d1 = -m * c1 * r.powf(-m - one);
        let d2 = m * (m + one) * c1 * r.powf(-m - T::lit(2.0));
        let g = T::lit((self.n as f64 - 2.0) / self.m);
        let u = base.powf(g);
        let du = g * base.powf(g - one) * d1;
        let d2u = g * (g - one) * base.powf(g - T::lit(2.0)) * d1 * d1 + g * base.powf(g - one) * d2;
        RadialJet::new(r, u, du, d2u)
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.c1 * r.powf(-self.m) + self.c2).powf((self.n as f64 - 2.0) / self.m)
    }

    pub fn profile(&self, grid: &[f64]) -> Result<RadialProfile> {
        RadialProfile::from_fn(grid.to_vec(), |r| self.value(r))
    }
}

/// Per-point outcome of a degeneracy check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateReport {
    pub grid: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    /// `max |σ_k(λ)| / ‖λ‖^k` over the grid (Γ_k only, else the defining
    /// margin).
    pub max_sigma_residual: f64,
    /// `min_{j<k} σ_j(λ)/‖λ‖^j` over the grid.
    pub min_lower_sigma: f64,
    pub all_boundary: bool,
}

/// Checks that a degenerate exact family has eigenvalues on `∂Γ` along the
/// grid. Requires `m = μ⁺ − 1`.
pub fn verify_degenerate(fam: &ExactFamily, cone: &Cone, grid: &[f64], tol: f64) -> Result<DegenerateReport> {
    check_increasing(grid)?;
    if cone.dim() != fam.n {
        return arg(format!("cone dimension {} differs from n = {}", cone.dim(), fam.n));
    }
    let mu = cone.mu_plus(1e-13)?;
    if (fam.m - (mu - 1.0)).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "exponent m = {} is not the degenerate exponent mu_plus - 1 = {}",
            fam.m,
            mu - 1.0
        )));
    }
    let mut verdicts = Vec::with_capacity(grid.len());
    let mut max_res: f64 = 0.0;
    let mut min_lower = f64::INFINITY;
    for &r in grid {
        // double-double keeps the cancellation in χ_1 − χ_2 out of the residual
        let lam = radial_eigenvalues(fam.n, &fam.jet(<TwoFloat as From<f64>>::from(r))?)?;
        let norm = lam.norm();
        if norm == TwoFloat::from(0.0) {
            // the flat image u = c r^{2−n}: the vertex
            verdicts.push(Verdict::Boundary);
            continue;
        }
        verdicts.push(cone.contains(&lam, tol)?.verdict);
        match cone.gamma_index() {
            Some(k) => {
                let s = sigma_upto(k, lam.entries());
                let mut scale = TwoFloat::from(1.0);
                for (j, &sj) in s.iter().enumerate().skip(1) {
                    scale *= norm;
                    let q = (sj / scale).as_f64();
                    if j < k {
                        min_lower = min_lower.min(q);
                    } else {
                        max_res = max_res.max(q.abs());
                    }
                }
            }
            None => max_res = max_res.max(cone.margin(lam.entries())?.as_f64().abs()),
        }
    }
    let all_boundary = verdicts.iter().all(|v| *v == Verdict::Boundary);
    Ok(DegenerateReport {
        grid: grid.to_vec(),
        verdicts,
        max_sigma_residual: max_res,
        min_lower_sigma: min_lower,
        all_boundary,
    })
}

/// `U_λ(r) = κ (λ/(1 + λ² r²))^{(n−2)/2}` normalized by `f(λ(A)) = 1`.
#[derive(Debug, Clone)]
pub struct Bubble {
    pub n: usize,
    pub kappa: f64,
    pub scale: f64,
}

/// Schouten eigenvalue of the unnormalized bubble `(1 + r²)^{−(n−2)/2}`.
pub const BUBBLE_EIGENVALUE: f64 = 2.0;

impl Bubble {
    pub fn jet<T: Real>(&self, r: T) -> Result<RadialJet<T>> {
        bubble_jet(self.n, T::lit(self.kappa), T::lit(self.scale), r)
    }

    pub fn value(&self, r: f64) -> f64 {
        let l = self.scale;
        self.kappa * (l / (1.0 + l * l * r * r)).powf(0.5 * (self.n as f64 - 2.0))
    }
}

fn bubble_jet<T: Real>(n: usize, kappa: T, l: T, r: T) -> Result<RadialJet<T>> {
    if !(r > T::zero()) {
        return arg(format!("radius must be positive, got {r}"));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let p = T::lit(0.5 * (n as f64 - 2.0));
    let q = one + l * l * r * r;
    // U = κ l^p q^{−p}; q′ = 2 l² r, q″ = 2 l²
    let c = kappa * l.powf(p);
    let dq = two * l * l * r;
    let d2q = two * l * l;
    let u = c * q.powf(-p);
    let du = -p * c * q.powf(-p - one) * dq;
    let d2u = p * (p + one) * c * q.powf(-p - two) * dq * dq - p * c * q.powf(-p - one) * d2q;
    RadialJet::new(r, u, du, d2u)
}

/// `κ = f(2, …, 2)^{(n−2)/4}` and the normalized bubble at `lam_scale`.
pub fn bubble(f: &DefiningFunction, lam_scale: f64) -> Result<Bubble> {
    if !(lam_scale > 0.0 && lam_scale.is_finite()) {
        return arg(format!("bubble scale must be positive, got {lam_scale}"));
    }
    let n = f.dim();
    if n < 3 {
        return arg("bubbles need n >= 3");
    }
    let c0 = vec![BUBBLE_EIGENVALUE; n];
    let fc = f.value(&c0)?;
    if !(fc > 0.0 && fc.is_finite()) {
        return Err(Error::Numeric(format!("f(2,...,2) = {fc} is not positive")));
    }
    Ok(Bubble {
        n,
        kappa: fc.powf((n as f64 - 2.0) / 4.0),
        scale: lam_scale,
    })
}

/// True iff `lower ≤ u ≤ upper` at every node, with `1e−12` relative slack.
pub fn sandwich_check(u: &RadialProfile, lower: &RadialProfile, upper: &RadialProfile) -> Result<bool> {
    if !u.same_grid(lower) || !u.same_grid(upper) {
        return arg("sandwich profiles must share the solver grid");
    }
    Ok(u.values()
        .iter()
        .zip(lower.values())
        .zip(upper.values())
        .all(|((&v, &lo), &hi)| {
            let slack = 1e-12 * v.abs().max(1.0);
            lo <= v + slack && v <= hi + slack
        }))
}

/// `m_{n,k} = U_1(0)^{(n−2k)/(n−2)} |S^{n−1}| ∫_0^∞ U_1^{(n+2k)/(n−2)} r^{n−1} dr`.
///
/// With `r = tan θ` the integrand becomes `κ^p sin^{n−1}θ cos^{2k−1}θ` on
/// `[0, π/2]`, integrated by adaptive Gauss–Legendre panels with
/// `quad_points` nodes each.
pub fn mass_constant(n: usize, k: usize, f: &DefiningFunction, quad_points: usize) -> Result<f64> {
    if k == 0 || 2 * k >= n {
        return Err(Error::Precondition(format!(
            "mass constant needs 1 <= k < n/2, got n = {n}, k = {k}"
        )));
    }
    if f.dim() != n {
        return arg(format!("defining function dimension {} differs from n = {n}", f.dim()));
    }
    if quad_points < 2 {
        return arg("quad_points must be at least 2");
    }
    let b = bubble(f, 1.0)?;
    let nf = n as f64;
    let kf = k as f64;
    let power = (nf + 2.0 * kf) / (nf - 2.0);
    let integrand = |t: f64| t.sin().powi(n as i32 - 1) * t.cos().powi(2 * k as i32 - 1);
    let integral = quad::adaptive_gauss(&integrand, 0.0, std::f64::consts::FRAC_PI_2, quad_points, 1e-12)?;
    let u0 = b.kappa;
    Ok(u0.powf((nf - 2.0 * kf) / (nf - 2.0)) * sphere_area(n) * b.kappa.powf(power) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::radial_chi;
    use crate::profile::log_grid;

    #[test]
    fn family_special_cases() {
        let inv = ExactFamily::new(5, 0.5, 1.0, 0.0).unwrap();
        let j = inv.jet(0.4f64).unwrap();
        assert!((j.u - 0.4f64.powi(-3)).abs() < 1e-12 * j.u);
        let c = radial_chi(5, &j).unwrap();
        assert!(c.chi1.abs() < 1e-10 && c.chi2.abs() < 1e-10);
        let one = ExactFamily::new(5, 0.5, 0.0, 1.0).unwrap().jet(0.7f64).unwrap();
        assert_eq!((one.u, one.du, one.d2u), (1.0, 0.0, 0.0));
    }

    #[test]
    fn family_jet_hand_check() {
        // n=5, m=0.5, C1=C2=1 at r=0.3: u = (r^{−1/2} + 1)^6
        let r: f64 = 0.3;
        let b = r.powf(-0.5) + 1.0;
        let b1 = -0.5 * r.powf(-1.5);
        let b2 = 0.75 * r.powf(-2.5);
        let u = b.powi(6);
        let du = 6.0 * b.powi(5) * b1;
        let d2u = 30.0 * b.powi(4) * b1 * b1 + 6.0 * b.powi(5) * b2;
        let j = ExactFamily::new(5, 0.5, 1.0, 1.0).unwrap().jet(r).unwrap();
        assert!((j.u - u).abs() < 1e-12 * u);
        assert!((j.du - du).abs() < 1e-12 * du.abs());
        assert!((j.d2u - d2u).abs() < 1e-12 * d2u);
    }

    #[test]
    fn degenerate_examples() {
        let g = log_grid(0.01, 10.0, 50).unwrap();
        let fam = ExactFamily::new(5, 0.5, 1.0, 1.0).unwrap();
        let rep = verify_degenerate(&fam, &Cone::gamma_k(5, 2).unwrap(), &g, 1e-10).unwrap();
        assert!(rep.all_boundary && rep.max_sigma_residual < 1e-10 && rep.min_lower_sigma > 0.0);
        let fam = ExactFamily::new(7, 1.5, 1.0, 2.0).unwrap();
        let rep = verify_degenerate(&fam, &Cone::gamma_k(7, 2).unwrap(), &g, 1e-10).unwrap();
        assert!(rep.all_boundary);
        let bad = ExactFamily::new(5, 0.7, 1.0, 1.0).unwrap();
        assert!(matches!(
            verify_degenerate(&bad, &Cone::gamma_k(5, 2).unwrap(), &g, 1e-10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bubble_normalization() {
        let f1 = DefiningFunction::build(&Cone::gamma_k(5, 1).unwrap(), None).unwrap();
        let b = bubble(&f1, 1.0).unwrap();
        assert!((b.kappa - 10f64.powf(0.75)).abs() < 1e-12);
        for f in [f1, DefiningFunction::build(&Cone::gamma_k(5, 2).unwrap(), None).unwrap()] {
            for scale in [0.5, 1.0, 2.0] {
                let b = bubble(&f, scale).unwrap();
                for r in log_grid(0.01, 10.0, 20).unwrap() {
                    let lam = radial_eigenvalues(5, &b.jet(r).unwrap()).unwrap();
                    assert!((f.value(&lam).unwrap() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn unnormalized_bubble_is_round() {
        for r in log_grid(0.01, 10.0, 20).unwrap() {
            let j = bubble_jet(6, 1.0, 1.0, r).unwrap();
            assert!(radial_chi(6, &j).unwrap().chi2.abs() < 1e-10);
            let lam = radial_eigenvalues(6, &j).unwrap();
            assert!(lam.iter().all(|&x| (x - 2.0).abs() < 1e-10));
        }
    }

    #[test]
    fn sandwich_basics() {
        let u = RadialProfile::from_fn(vec![0.1, 0.2, 0.3], |r| 1.0 / r).unwrap();
        assert!(sandwich_check(&u, &u, &u).unwrap());
        assert!(!sandwich_check(&u, &u, &u.scaled(0.5)).unwrap());
        let other = RadialProfile::from_fn(vec![0.1, 0.2, 0.4], |r| r).unwrap();
        assert!(sandwich_check(&u, &other, &u).is_err());
    }

    #[test]
    fn mass_constant_examples() {
        let cone = Cone::gamma_k(5, 1).unwrap();
        let f = DefiningFunction::canonical(&cone).unwrap();
        let a = mass_constant(5, 1, &f, 16).unwrap();
        let b = mass_constant(5, 1, &f, 32).unwrap();
        assert!(a > 0.0 && a.is_finite() && ((a - b) / b).abs() < 1e-6);
        let f4 = DefiningFunction::canonical(&Cone::gamma_k(4, 2).unwrap()).unwrap();
        assert!(matches!(mass_constant(4, 2, &f4, 16), Err(Error::Precondition(_))));
    }

    #[test]
    fn mass_constant_against_beta_function() {
        use statrs::function::beta::beta;
        let f = DefiningFunction::canonical(&Cone::gamma_k(5, 2).unwrap()).unwrap();
        let kappa = bubble(&f, 1.0).unwrap().kappa;
        let (n, k) = (5.0, 2.0);
        let area = 2.0 * std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0);
        let exact = kappa.powf((n - 2.0 * k) / (n - 2.0)) * area * kappa.powf((n + 2.0 * k) / (n - 2.0)) * 0.5 * beta(n / 2.0, k);
        let got = mass_constant(5, 2, &f, 12).unwrap();
        assert!(((got - exact) / exact).abs() < 1e-10);
    }
}
