//! Damped Newton solver for `f(λ(A_{g_u})) = ε` on an annulus, radial,
//! Dirichlet data at both ends.
//!
//! With `λ = (a, b, …, b)` (radial entry first) and `f` homogeneous, the
//! equation is solved for the radial eigenvalue: `f = ε ⇔ a = A(b, ε)`.
//! Newton runs on `H = a − A(b, ε)`, which is linear in `u″` and stays well
//! scaled as `ε → 0`; convergence is still judged on `F = f(λ) − ε`.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::ExactFamily;
use crate::defining::DefiningFunction;
use crate::error::{arg, Error, Result};
use crate::profile::RadialProfile;
use crate::scalar::{binomial, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    /// `TwoFloat` arithmetic, about 32 significant digits.
    #[default]
    DoubleDouble,
}

/// The regularized two-point problem.
#[derive(Debug, Clone)]
pub struct RadialBVP {
    pub f: DefiningFunction,
    pub epsilon: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub bc_in: f64,
    pub bc_out: f64,
    pub grid_size: usize,
    pub precision: Precision,
    pub max_iterations: usize,
}

pub const DEFAULT_GRID_SIZE: usize = 400;
const STEP_FLOOR: f64 = 1.0 / 1048576.0;

impl RadialBVP {
    pub fn new(f: DefiningFunction, epsilon: f64, r_in: f64, r_out: f64, bc_in: f64, bc_out: f64) -> Result<Self> {
        let bvp = RadialBVP {
            f,
            epsilon,
            r_in,
            r_out,
            bc_in,
            bc_out,
            grid_size: DEFAULT_GRID_SIZE,
            precision: Precision::default(),
            max_iterations: 100,
        };
        bvp.validate()?;
        Ok(bvp)
    }

    /// Boundary values taken from an exact family.
    pub fn from_family(f: DefiningFunction, epsilon: f64, fam: &ExactFamily, r_in: f64, r_out: f64) -> Result<Self> {
        Self::new(f, epsilon, r_in, r_out, fam.value(r_in), fam.value(r_out))
    }

    pub fn with_grid_size(mut self, n: usize) -> Self {
        self.grid_size = n;
        self
    }

    pub fn with_precision(mut self, p: Precision) -> Self {
        self.precision = p;
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn n(&self) -> usize {
        self.f.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() < 3 {
            return arg("the radial problem needs n >= 3");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return arg(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.r_in > 0.0 && self.r_out > self.r_in && self.r_out.is_finite()) {
            return arg(format!("need 0 < r_in < r_out, got {} and {}", self.r_in, self.r_out));
        }
        if !(self.bc_in > 0.0 && self.bc_out > 0.0 && self.bc_in.is_finite() && self.bc_out.is_finite()) {
            return arg("boundary values must be positive");
        }
        if self.grid_size < 5 {
            return arg(format!("grid_size must be at least 5, got {}", self.grid_size));
        }
        Ok(())
    }

    /// Log-uniform nodes in `f64`.
    pub fn grid(&self) -> Vec<f64> {
        nodes::<f64>(self).0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub epsilon: f64,
    pub converged: bool,
    /// `max |f(λ) − ε|` over interior nodes.
    pub residual_max: f64,
    pub newton_iterations: usize,
    /// Smallest cone margin along the solution.
    pub eigen_margin_min: f64,
    /// Relative sup-distance to a reference profile, when one was supplied.
    pub sup_error: Option<f64>,
    #[serde(skip)]
    pub profile: RadialProfile,
}

impl SolverReport {
    pub fn tolerance(&self) -> f64 {
        1e-10 * (1.0 + self.epsilon)
    }
}

fn nodes<T: Real>(bvp: &RadialBVP) -> (Vec<f64>, Vec<T>, T) {
    let n = bvp.grid_size;
    let a = T::lit(bvp.r_in).ln();
    let b = T::lit(bvp.r_out).ln();
    let h = (b - a) / T::count(n - 1);
    let mut r: Vec<T> = (0..n).map(|i| (a + h * T::count(i)).exp()).collect();
    r[0] = T::lit(bvp.r_in);
    r[n - 1] = T::lit(bvp.r_out);
    (r.iter().map(|x| x.as_f64()).collect(), r, h)
}

/// `a = A(b, ε)` together with `∂A/∂b`.
enum Closure {
    /// `f = (σ_k / C(n,k))^{1/k}`: closed form.
    Canonical { n: usize, k: usize },
    /// Any other `f`: invert `φ(ρ) = f(ρ, 1, …, 1)` numerically.
    General { f: DefiningFunction, rho_lo: f64 },
}

impl Closure {
    fn for_function(f: &DefiningFunction) -> Result<Self> {
        Ok(match f.canonical_index() {
            Some(k) => Closure::Canonical { n: f.dim(), k },
            None => Closure::General {
                f: f.clone(),
                rho_lo: -f.cone().mu_plus(1e-15)?,
            },
        })
    }

    fn solve<T: Real>(&self, b: T, eps: T) -> Option<(T, T)> {
        match self {
            Closure::Canonical { n, k: 1 } => {
                let n1 = T::count(*n - 1);
                Some((T::count(*n) * eps - n1 * b, -n1))
            }
            Closure::Canonical { n, k } => {
                if !(b > T::zero()) {
                    return None;
                }
                let (n, k) = (*n, *k);
                let cnk = binomial::<T>(n, k);
                let lead = binomial::<T>(n - 1, k - 1);
                let tail = binomial::<T>(n - 1, k) / lead;
                let ek = eps.powi(k as i32);
                let head = cnk * ek / (lead * b.powi(k as i32 - 1));
                let a = head - tail * b;
                let da = -T::count(k - 1) * head / b - tail;
                Some((a, da))
            }
            Closure::General { f, rho_lo } => {
                if !(b > T::zero()) {
                    return None;
                }
                let y = eps / b;
                let (psi, dpsi) = invert_radial(f, y, T::lit(*rho_lo))?;
                Some((b * psi, psi - y * dpsi))
            }
        }
    }
}

/// Solves `f(ρ, 1, …, 1) = y` for `ρ`; returns `ρ` and `dρ/dy`.
fn invert_radial<T: Real>(f: &DefiningFunction, y: T, rho_lo: T) -> Option<(T, T)> {
    let n = f.dim();
    let phi = |rho: T| -> Option<(T, T)> {
        let mut v = vec![T::one(); n];
        v[0] = rho;
        let val = f.value(&v).ok()?;
        let d = f.gradient(&v).ok().map(|g| g[0]).unwrap_or(T::zero());
        Some((val, d))
    };
    let below = |rho: T| phi(rho).map(|p| p.0 < y).unwrap_or(true);
    let mut lo = rho_lo;
    let mut hi = rho_lo.abs().max(T::one());
    let mut guard = 0;
    while below(hi) {
        hi = hi + hi;
        guard += 1;
        if guard > 200 {
            return None;
        }
    }
    let tiny = T::lit(64.0) * T::unit_roundoff();
    let mut rho = T::lit(0.5) * (lo + hi);
    let mut last = None;
    for _ in 0..400 {
        let (val, d) = match phi(rho) {
            Some(p) => p,
            None => {
                lo = rho;
                rho = T::lit(0.5) * (lo + hi);
                continue;
            }
        };
        last = Some((rho, val, d));
        if val < y {
            lo = rho;
        } else {
            hi = rho;
        }
        let scale = rho.abs().max(T::one());
        if (val - y).abs() <= tiny * y || hi - lo <= tiny * scale {
            break;
        }
        let newton = rho - (val - y) / d;
        if d > T::zero() && newton > lo && newton < hi {
            let moved = (newton - rho).abs();
            rho = newton;
            if moved <= tiny * scale {
                break;
            }
        } else {
            rho = T::lit(0.5) * (lo + hi);
        }
    }
    // transcendental noise can keep the residual above `tiny`
    let (rho, val, d) = last?;
    if d > T::zero() && (val - y).abs() <= T::unit_roundoff().sqrt() * y {
        Some((rho, T::one() / d))
    } else {
        None
    }
}

/// Discrete radial and tangential eigenvalues at one node with their
/// derivatives in `(u_{i−1}, u_i, u_{i+1})`.
struct NodeTerms<T> {
    a: T,
    b: T,
    da: [T; 3],
    db: [T; 3],
}

fn node_terms<T: Real>(n: usize, r: T, h: T, um: T, u: T, up: T) -> NodeTerms<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let m = T::count(n - 2);
    let c = two / m;
    let kk = two * T::count(n) / (m * m);
    let ut = (up - um) / (two * h);
    let utt = (up - two * u + um) / (h * h);
    let du = ut / r;
    let p = du / u;
    let r2 = r * r;
    // (u″ − u′/r) on the log grid: (u_tt − 2u_t)/r²
    let w = (utt - two * ut) / r2;
    let chi1 = -c * p / r - (c / m) * p * p;
    let chi2 = c * w / u - kk * p * p;
    let s = u.powf(-T::lit(4.0) / m);

    let p_u = -p / u;
    let p_ut = one / (r * u);
    let dchi1_dp = -c / r - two * (c / m) * p;
    let chi1_u = dchi1_dp * p_u;
    let chi1_ut = dchi1_dp * p_ut;
    let chi2_u = -c * w / (u * u) - two * kk * p * p_u;
    let chi2_ut = -two * c / (r2 * u) - two * kk * p * p_ut;
    let chi2_utt = c / (r2 * u);
    let s_u = -T::lit(4.0) / m * s / u;

    let a = s * (chi1 - chi2);
    let b = s * chi1;
    let a_u = s_u * (chi1 - chi2) + s * (chi1_u - chi2_u);
    let a_ut = s * (chi1_ut - chi2_ut);
    let a_utt = -s * chi2_utt;
    let b_u = s_u * chi1 + s * chi1_u;
    let b_ut = s * chi1_ut;

    let (k_ut, k_utt) = (one / (two * h), one / (h * h));
    let spread = |x_u: T, x_ut: T, x_utt: T| [-x_ut * k_ut + x_utt * k_utt, x_u - two * x_utt * k_utt, x_ut * k_ut + x_utt * k_utt];
    NodeTerms {
        a,
        b,
        da: spread(a_u, a_ut, a_utt),
        db: spread(b_u, b_ut, T::zero()),
    }
}

/// Everything the Newton loop needs at one iterate.
struct Evaluation<T> {
    h_res: Vec<T>,
    jac: Option<[Vec<T>; 3]>,
    f_res_max: T,
    margin_min: T,
}

enum Outcome<T> {
    Ok(Evaluation<T>),
    /// Node index where the iterate left the cone.
    Exit(usize),
}

struct Problem<'a, T> {
    bvp: &'a RadialBVP,
    closure: Closure,
    r: Vec<T>,
    h: T,
    eps: T,
}

impl<T: Real> Problem<'_, T> {
    fn evaluate(&self, u: &[T], with_jacobian: bool) -> Result<Outcome<T>> {
        let n = self.bvp.n();
        let cone = self.bvp.f.cone();
        let len = u.len();
        let mut h_res = Vec::with_capacity(len - 2);
        let mut jac = if with_jacobian {
            Some([vec![T::zero(); len - 2], vec![T::zero(); len - 2], vec![T::zero(); len - 2]])
        } else {
            None
        };
        let mut f_max = T::zero();
        let mut margin_min = T::infinity();
        let mut lam = vec![T::zero(); n];
        for i in 1..len - 1 {
            if !(u[i] > T::zero()) {
                return Ok(Outcome::Exit(i));
            }
            let t = node_terms(n, self.r[i], self.h, u[i - 1], u[i], u[i + 1]);
            lam[0] = t.a;
            for slot in lam.iter_mut().skip(1) {
                *slot = t.b;
            }
            let margin = match cone.margin(&lam) {
                Ok(m) => m,
                Err(Error::Argument(_)) => return Ok(Outcome::Exit(i)),
                Err(e) => return Err(e),
            };
            if !(margin > T::zero()) {
                return Ok(Outcome::Exit(i));
            }
            margin_min = margin_min.min(margin);
            let (a_star, da_star) = match self.closure.solve(t.b, self.eps) {
                Some(v) => v,
                None => return Ok(Outcome::Exit(i)),
            };
            h_res.push(t.a - a_star);
            let fval = match self.bvp.f.value(&lam) {
                Ok(v) => v,
                Err(_) => return Ok(Outcome::Exit(i)),
            };
            f_max = f_max.max((fval - self.eps).abs());
            if let Some(j) = jac.as_mut() {
                for (slot, (da, db)) in j.iter_mut().zip(t.da.iter().zip(t.db.iter())) {
                    slot[i - 1] = *da - da_star * *db;
                }
            }
        }
        Ok(Outcome::Ok(Evaluation {
            h_res,
            jac,
            f_res_max: f_max,
            margin_min,
        }))
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, x| a.max(x.abs()))
}

/// Thomas algorithm; `lower[0]` and `upper[last]` are ignored.
fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut piv = diag[0];
    if piv == T::zero() || !piv.is_finite() {
        return Err(Error::Numeric("singular Newton matrix".into()));
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv == T::zero() || !piv.is_finite() {
            return Err(Error::Numeric("singular Newton matrix".into()));
        }
        c[i] = if i + 1 < n { upper[i] / piv } else { T::zero() };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Ok(d)
}

fn initial_guess<T: Real>(bvp: &RadialBVP, r: &[T]) -> Vec<T> {
    let (ri, ro) = (T::lit(bvp.r_in), T::lit(bvp.r_out));
    let (ui, uo) = (T::lit(bvp.bc_in), T::lit(bvp.bc_out));
    let p = (uo / ui).ln() / (ro / ri).ln();
    let mut u: Vec<T> = r.iter().map(|&x| ui * (x / ri).powf(p)).collect();
    let last = u.len() - 1;
    u[0] = ui;
    u[last] = uo;
    u
}

fn run<T: Real>(bvp: &RadialBVP, start: Option<Vec<T>>) -> Result<(SolverReport, Vec<T>)> {
    bvp.validate()?;
    let (grid, r, h) = nodes::<T>(bvp);
    let problem = Problem {
        bvp,
        closure: Closure::for_function(&bvp.f)?,
        r,
        h,
        eps: T::lit(bvp.epsilon),
    };
    let warm = start.is_some();
    let mut u = match start {
        Some(u) if u.len() == bvp.grid_size => u,
        Some(_) => return arg("warm start has the wrong length"),
        None => initial_guess(bvp, &problem.r),
    };
    let last = u.len() - 1;
    u[0] = T::lit(bvp.bc_in);
    u[last] = T::lit(bvp.bc_out);

    let mut eval = match problem.evaluate(&u, true)? {
        Outcome::Ok(e) => e,
        Outcome::Exit(i) => {
            let what = if warm { "warm start" } else { "power-law initial guess" };
            return Err(Error::Precondition(format!(
                "{what} is not inside the cone at node {i} (r = {})",
                grid[i]
            )));
        }
    };
    let tol = T::lit(1e-10 * (1.0 + bvp.epsilon));
    let mut iterations = 0;
    let mut converged = eval.f_res_max < tol;
    while !converged && iterations < bvp.max_iterations {
        let [lo, di, up] = eval.jac.take().expect("jacobian requested");
        let rhs: Vec<T> = eval.h_res.iter().map(|&x| -x).collect();
        let step = solve_tridiagonal(&lo, &di, &up, &rhs)?;
        let h0 = max_abs(&eval.h_res);
        let mut tau = T::one();
        let mut exit_node = None;
        let accepted = loop {
            let mut trial = u.clone();
            for (slot, d) in trial[1..last].iter_mut().zip(&step) {
                *slot = *slot + tau * *d;
            }
            match problem.evaluate(&trial, true)? {
                Outcome::Ok(e) if max_abs(&e.h_res) < h0 || e.f_res_max < tol => break Some((trial, e)),
                Outcome::Ok(_) => exit_node = None,
                Outcome::Exit(i) => exit_node = Some(i),
            }
            tau = tau * T::lit(0.5);
            if tau.as_f64() < STEP_FLOOR {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some((next, e)) => {
                u = next;
                eval = e;
                converged = eval.f_res_max < tol;
            }
            None => match exit_node {
                Some(node) => return Err(Error::ConeExit { node }),
                None => break,
            },
        }
    }
    let values: Vec<f64> = u.iter().map(|x| x.as_f64()).collect();
    let report = SolverReport {
        epsilon: bvp.epsilon,
        converged,
        residual_max: eval.f_res_max.as_f64(),
        newton_iterations: iterations,
        eigen_margin_min: eval.margin_min.as_f64(),
        sup_error: None,
        profile: RadialProfile::new(grid, values)?,
    };
    Ok((report, u))
}

/// Solves one regularized problem from the power-law initial guess.
pub fn solve_regularized(bvp: &RadialBVP) -> Result<SolverReport> {
    match bvp.precision {
        Precision::Double => run::<f64>(bvp, None).map(|r| r.0),
        Precision::DoubleDouble => run::<TwoFloat>(bvp, None).map(|r| r.0),
    }
}

/// Solves one regularized problem starting from the given nodal values.
pub fn solve_from(bvp: &RadialBVP, start: &[f64]) -> Result<SolverReport> {
    fn lift<T: Real>(v: &[f64]) -> Vec<T> {
        v.iter().map(|&x| T::lit(x)).collect()
    }
    match bvp.precision {
        Precision::Double => run::<f64>(bvp, Some(lift(start))).map(|r| r.0),
        Precision::DoubleDouble => run::<TwoFloat>(bvp, Some(lift(start))).map(|r| r.0),
    }
}

/// Relative sup-distance between a profile and a reference family.
pub fn relative_sup_error(profile: &RadialProfile, reference: &ExactFamily) -> f64 {
    profile
        .grid()
        .iter()
        .zip(profile.values())
        .map(|(&r, &u)| {
            let e = reference.value(r);
            ((u - e) / e).abs()
        })
        .fold(0.0, f64::max)
}

/// Warm-started solves down a strictly decreasing `ε` ladder.
pub fn continuation(template: &RadialBVP, ladder: &[f64], reference: Option<&ExactFamily>) -> Result<Vec<SolverReport>> {
    if ladder.is_empty() {
        return arg("empty epsilon ladder");
    }
    if ladder.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return arg("epsilon ladder entries must be positive");
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return arg("epsilon ladder must be strictly decreasing");
    }
    match template.precision {
        Precision::Double => ladder_run::<f64>(template, ladder, reference),
        Precision::DoubleDouble => ladder_run::<TwoFloat>(template, ladder, reference),
    }
}

fn ladder_run<T: Real>(template: &RadialBVP, ladder: &[f64], reference: Option<&ExactFamily>) -> Result<Vec<SolverReport>> {
    let mut out = Vec::with_capacity(ladder.len());
    let mut state: Option<Vec<T>> = None;
    for (level, &eps) in ladder.iter().enumerate() {
        let bvp = template.clone().with_epsilon(eps);
        let (mut report, u) = run::<T>(&bvp, state.take()).map_err(|e| Error::Continuation {
            level,
            epsilon: eps,
            source: Box::new(e),
        })?;
        report.sup_error = reference.map(|fam| relative_sup_error(&report.profile, fam));
        out.push(report);
        state = Some(u);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;
    use crate::conformal::radial_eigenvalues;
    use crate::greens::bubble;

    fn canonical(n: usize, k: usize) -> DefiningFunction {
        DefiningFunction::canonical(&Cone::gamma_k(n, k).unwrap()).unwrap()
    }

    #[test]
    fn closure_matches_defining_function() {
        let eps = 0.03f64;
        for f in [
            canonical(5, 2),
            canonical(5, 1),
            DefiningFunction::build(&Cone::gamma_k(5, 2).unwrap(), None).unwrap(),
        ] {
            let c = Closure::for_function(&f).unwrap();
            for b in [0.05f64, 0.4, 2.0] {
                let (a, da) = c.solve(b, eps).unwrap();
                let v = f.value(&[a, b, b, b, b]).unwrap();
                assert!((v - eps).abs() < 1e-12, "{}: {v}", f.describe());
                let hb = 1e-6;
                let fd = (c.solve(b + hb, eps).unwrap().0 - c.solve(b - hb, eps).unwrap().0) / (2.0 * hb);
                assert!((fd - da).abs() < 1e-6 * (1.0 + da.abs()));
            }
        }
    }

    #[test]
    fn jacobian_matches_differences() {
        let (n, r, h) = (5, 0.3f64, 0.01f64);
        let u = [2.1f64, 2.0, 1.92];
        let t = node_terms(n, r, h, u[0], u[1], u[2]);
        for j in 0..3 {
            let e = 1e-7;
            let mut p = u;
            let mut m = u;
            p[j] += e;
            m[j] -= e;
            let tp = node_terms(n, r, h, p[0], p[1], p[2]);
            let tm = node_terms(n, r, h, m[0], m[1], m[2]);
            let fa = (tp.a - tm.a) / (2.0 * e);
            let fb = (tp.b - tm.b) / (2.0 * e);
            assert!((fa - t.da[j]).abs() < 1e-5 * (1.0 + fa.abs()));
            assert!((fb - t.db[j]).abs() < 1e-5 * (1.0 + fb.abs()));
        }
    }

    #[test]
    fn thomas_solves() {
        let lo = [0.0f64, 1.0, 1.0];
        let di = [4.0, 4.0, 4.0];
        let up = [1.0, 1.0, 0.0];
        let x = solve_tridiagonal(&lo, &di, &up, &[5.0, 6.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn small_epsilon_tracks_exact_family() {
        let fam = ExactFamily::new(5, 0.5, 1.0, 1.0).unwrap();
        let bvp = RadialBVP::from_family(canonical(5, 2), 1e-6, &fam, 0.05, 1.0).unwrap();
        let rep = solve_regularized(&bvp).unwrap();
        assert!(rep.converged, "residual {}", rep.residual_max);
        assert!(rep.residual_max < rep.tolerance());
        assert!(relative_sup_error(&rep.profile, &fam) < 1e-3);
    }

    #[test]
    fn larger_epsilon_lies_above() {
        let fam = ExactFamily::new(5, 0.5, 0.45, 0.45).unwrap();
        let base = RadialBVP::from_family(canonical(5, 2), 1e-6, &fam, 0.05, 1.0).unwrap();
        let small = solve_regularized(&base).unwrap();
        let large = solve_regularized(&base.clone().with_epsilon(0.1)).unwrap();
        assert!(small.converged && large.converged);
        let (a, b) = (small.profile.values(), large.profile.values());
        for i in 1..a.len() - 1 {
            assert!(b[i] > a[i], "node {i}: {} vs {}", b[i], a[i]);
        }
    }

    #[test]
    fn bubble_solves_its_own_problem() {
        let f = DefiningFunction::build(&Cone::gamma_k(5, 2).unwrap(), None).unwrap();
        let b = bubble(&f, 1.0).unwrap();
        // the continuum residual at the bubble
        for r in [0.1, 0.5, 1.0, 2.0] {
            let lam = radial_eigenvalues(5, &b.jet(r).unwrap()).unwrap();
            assert!((f.value::<f64>(&lam).unwrap() - 1.0).abs() < 1e-10);
        }
        let bvp = RadialBVP::new(f, 1.0, 0.1, 2.0, b.value(0.1), b.value(2.0)).unwrap();
        let sampled: Vec<f64> = bvp.grid().iter().map(|&r| b.value(r)).collect();
        let rep = solve_from(&bvp, &sampled).unwrap();
        assert!(rep.converged);
        let err = rep
            .profile
            .grid()
            .iter()
            .zip(rep.profile.values())
            .map(|(&r, &u)| ((u - b.value(r)) / b.value(r)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "discrete solution differs from the bubble by {err}");
    }

    #[test]
    fn ladder_validation() {
        let fam = ExactFamily::new(5, 0.5, 0.45, 0.45).unwrap();
        let t = RadialBVP::from_family(canonical(5, 2), 0.1, &fam, 0.05, 1.0).unwrap();
        assert!(continuation(&t, &[0.1, 0.2], None).is_err());
        assert!(continuation(&t, &[], None).is_err());
        let one = continuation(&t, &[0.1], None).unwrap();
        let direct = solve_regularized(&t).unwrap();
        assert_eq!(one[0].profile, direct.profile);
    }
}
