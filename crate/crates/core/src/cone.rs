//! Symmetric convex cones in eigenvalue space.
//!
//! Built-in cones are the Gårding cones `Γ_k = {σ_1 > 0, …, σ_k > 0}` and the
//! round cone `{|λ − σ_1 e/n| < ρ σ_1}`. Arbitrary cones are described by a
//! concave slice function on `{σ_1 = 1}`, and any cone can be opened up by
//! the map `λ ↦ tλ + (1 − t)σ_1(λ)e`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::scalar::Real;
use crate::symfunc::sigma_upto;

/// Classification of a point relative to a cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Interior,
    Boundary,
    Outside,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Interior => "Interior",
            Verdict::Boundary => "Boundary",
            Verdict::Outside => "Outside",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeMembership {
    pub verdict: Verdict,
    /// Scale-free signed distance proxy; positive inside.
    pub signed_margin: f64,
}

impl ConeMembership {
    fn classify(margin: f64, tol: f64) -> Self {
        let verdict = if margin > tol {
            Verdict::Interior
        } else if margin >= -tol {
            Verdict::Boundary
        } else {
            Verdict::Outside
        };
        ConeMembership {
            verdict,
            signed_margin: margin,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.verdict == Verdict::Interior
    }
}

type SliceEval = dyn Fn(&[f64]) -> f64 + Send + Sync;
type SliceGrad = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A concave function on the slice `{σ_1 = 1}`, positive exactly on the
/// slice of the cone it defines.
#[derive(Clone)]
pub struct SliceFunction {
    label: String,
    eval: Arc<SliceEval>,
    grad: Option<Arc<SliceGrad>>,
    perms: Option<Arc<Vec<Vec<usize>>>>,
}

impl fmt::Debug for SliceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SliceFunction")
            .field("label", &self.label)
            .field("symmetrized", &self.perms.is_some())
            .finish()
    }
}

impl SliceFunction {
    /// Wraps `h` and symmetrizes it by averaging over all coordinate
    /// permutations of an `n`-vector.
    pub fn new<F>(label: impl Into<String>, n: usize, h: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(2..=8).contains(&n) {
            return arg(format!("symmetrized slice functions need 2 <= n <= 8, got {n}"));
        }
        Ok(SliceFunction {
            label: label.into(),
            eval: Arc::new(h),
            grad: None,
            perms: Some(Arc::new(permutations(n))),
        })
    }

    /// Wraps an `h` that is already symmetric; no averaging is done.
    pub fn symmetric<F>(label: impl Into<String>, h: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        SliceFunction {
            label: label.into(),
            eval: Arc::new(h),
            grad: None,
            perms: None,
        }
    }

    /// Supplies an analytic gradient; only honoured for symmetric slices.
    pub fn with_gradient<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.perms {
            None => (self.eval)(x),
            Some(perms) => {
                let mut buf = vec![0.0; x.len()];
                let mut acc = 0.0;
                for p in perms.iter() {
                    for (slot, &j) in buf.iter_mut().zip(p) {
                        *slot = x[j];
                    }
                    acc += (self.eval)(&buf);
                }
                acc / perms.len() as f64
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        if let (Some(g), None) = (&self.grad, &self.perms) {
            return g(x);
        }
        let h = 1e-6;
        let mut y = x.to_vec();
        (0..x.len())
            .map(|i| {
                y[i] = x[i] + h;
                let up = self.value(&y);
                y[i] = x[i] - h;
                let dn = self.value(&y);
                y[i] = x[i];
                (up - dn) / (2.0 * h)
            })
            .collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut p, &mut out);
    out
}

fn heap_permute(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, p, out);
}

#[derive(Debug, Clone)]
pub enum ConeKind {
    GammaK(usize),
    /// `{λ : |λ/σ_1 − e/n| < ρ, σ_1 > 0}`.
    Ball { radius: f64 },
    Slice(SliceFunction),
    OpenedUp { base: Box<Cone>, t: f64 },
}

/// An open symmetric convex cone `Γ_n ⊂ Γ ⊂ Γ_1` in `ℝ^n`.
#[derive(Debug, Clone)]
pub struct Cone {
    dim: usize,
    kind: ConeKind,
}

/// JSON description of a cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ConeSpec {
    GammaK { n: usize, k: usize },
    Custom { n: usize, shape: String, radius: f64 },
}

impl Cone {
    pub fn gamma_k(n: usize, k: usize) -> Result<Self> {
        if n < 1 {
            return arg("Gamma_k needs n >= 1");
        }
        if k < 1 || k > n {
            return arg(format!("Gamma_k needs 1 <= k <= n, got k = {k}, n = {n}"));
        }
        Ok(Cone {
            dim: n,
            kind: ConeKind::GammaK(k),
        })
    }

    /// Round cone around the diagonal. It contains `Γ_n` iff
    /// `radius ≥ √((n−1)/n)`, with `(1,0,…,0)` on the boundary at equality.
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        if n < 2 {
            return arg(format!("cones need n >= 2, got {n}"));
        }
        let vertex = ((n as f64 - 1.0) / n as f64).sqrt();
        if !radius.is_finite() || radius < vertex - 1e-12 {
            return arg(format!(
                "ball cone radius {radius} does not contain the positive orthant (needs >= {vertex})"
            ));
        }
        Ok(Cone {
            dim: n,
            kind: ConeKind::Ball { radius },
        })
    }

    /// Cone defined by a slice function; probed for `e ∈ Γ` and for
    /// concavity on random segments of the slice.
    pub fn from_slice(n: usize, h: SliceFunction) -> Result<Self> {
        if n < 2 {
            return arg(format!("cones need n >= 2, got {n}"));
        }
        let centre = vec![1.0 / n as f64; n];
        if !(h.value(&centre) > 0.0) {
            return arg(format!("slice function {} is not positive at e/n", h.label()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..64 {
            let a = random_slice_point(&mut rng, n);
            let b = random_slice_point(&mut rng, n);
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let (ha, hb, hm) = (h.value(&a), h.value(&b), h.value(&mid));
            if hm < 0.5 * (ha + hb) - 1e-9 * (1.0 + ha.abs() + hb.abs()) {
                return arg(format!("slice function {} failed the concavity probe", h.label()));
            }
        }
        Ok(Cone {
            dim: n,
            kind: ConeKind::Slice(h),
        })
    }

    pub fn from_spec(spec: &ConeSpec) -> Result<Self> {
        match spec {
            ConeSpec::GammaK { n, k } => Cone::gamma_k(*n, *k),
            ConeSpec::Custom { n, shape, radius } => match shape.as_str() {
                "ball" => Cone::ball(*n, *radius),
                other => arg(format!("unknown custom cone shape '{other}'")),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    /// `Some(k)` for a plain `Γ_k`.
    pub fn gamma_index(&self) -> Option<usize> {
        match self.kind {
            ConeKind::GammaK(k) => Some(k),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ConeKind::GammaK(k) => format!("Gamma_{k} (n = {})", self.dim),
            ConeKind::Ball { radius } => format!("ball cone radius {radius} (n = {})", self.dim),
            ConeKind::Slice(h) => format!("slice cone '{}' (n = {})", h.label(), self.dim),
            ConeKind::OpenedUp { base, t } => format!("{} opened up with t = {t}", base.describe()),
        }
    }

    /// Signed, scale-invariant margin: positive inside, zero on the boundary.
    ///
    /// For `Γ_k` this is `min_j σ_j(λ)/‖λ‖^j`; for slice cones it is
    /// `h(λ/σ_1)` when `σ_1 > 0` and `σ_1/‖λ‖ − 1` otherwise.
    pub fn margin<T: Real>(&self, lam: &[T]) -> Result<T> {
        if lam.len() != self.dim {
            return arg(format!("expected {} eigenvalues, got {}", self.dim, lam.len()));
        }
        let norm = lam.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if !norm.is_finite() {
            return Err(Error::Numeric("non-finite eigenvalue vector".into()));
        }
        if norm == T::zero() {
            return arg("the zero vector is the cone vertex");
        }
        match &self.kind {
            ConeKind::GammaK(k) => {
                let s = sigma_upto(*k, lam);
                let mut scale = T::one();
                let mut best = T::infinity();
                for sj in s.iter().skip(1) {
                    scale = scale * norm;
                    best = best.min(*sj / scale);
                }
                Ok(best)
            }
            ConeKind::Ball { radius } => {
                let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
                if s1 <= T::zero() {
                    return Ok(s1 / norm - T::one());
                }
                let c = T::one() / T::count(self.dim);
                let d = lam
                    .iter()
                    .fold(T::zero(), |a, &x| {
                        let y = x / s1 - c;
                        a + y * y
                    })
                    .sqrt();
                Ok(T::lit(*radius) - d)
            }
            ConeKind::Slice(h) => {
                let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
                if s1 <= T::zero() {
                    return Ok(s1 / norm - T::one());
                }
                let x: Vec<f64> = lam.iter().map(|&v| (v / s1).as_f64()).collect();
                Ok(T::lit(h.value(&x)))
            }
            ConeKind::OpenedUp { base, t } => base.margin(&open_map(lam, T::lit(*t))),
        }
    }

    pub fn contains<T: Real>(&self, lam: &[T], tol: f64) -> Result<ConeMembership> {
        if !(tol > 0.0) {
            return arg(format!("membership tolerance must be positive, got {tol}"));
        }
        let m = self.margin(lam)?;
        Ok(ConeMembership::classify(m.as_f64(), tol))
    }

    /// `μ⁺`: the `μ` with `(−μ, 1, …, 1)` on the boundary, by bisection.
    pub fn mu_plus(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return arg(format!("tolerance must be positive, got {tol}"));
        }
        let n = self.dim;
        if n == 1 {
            // (−μ) lies on the boundary {0} of the half-line only at μ = 0
            return Ok(0.0);
        }
        let probe = |mu: f64| -> Result<f64> {
            let mut v = vec![1.0; n];
            v[0] = -mu;
            self.margin(&v)
        };
        let mut lo = 0.0;
        let mut hi = n as f64 - 1.0 + 1e-6;
        if probe(lo)? < 0.0 || probe(hi)? > 0.0 {
            return Err(Error::Domain(format!(
                "mu_plus bracket [0, n-1] does not straddle the boundary of {}",
                self.describe()
            )));
        }
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if probe(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `Γ_t = {λ : tλ + (1−t)σ_1(λ)e ∈ Γ}` for `t ∈ [½, 1]`.
    pub fn open_up(&self, t: f64) -> Result<Cone> {
        if !(0.5..=1.0).contains(&t) {
            return arg(format!("opening parameter t must lie in [1/2, 1], got {t}"));
        }
        Ok(Cone {
            dim: self.dim,
            kind: ConeKind::OpenedUp {
                base: Box::new(self.clone()),
                t,
            },
        })
    }

    /// Whether `(1, 0, …, 0)` lies strictly inside.
    pub fn contains_first_axis(&self, tol: f64) -> Result<Verdict> {
        let mut e1 = vec![0.0; self.dim];
        e1[0] = 1.0;
        Ok(self.contains(&e1, tol)?.verdict)
    }
}

pub(crate) fn open_map<T: Real>(lam: &[T], t: T) -> Vec<T> {
    let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
    let shift = (T::one() - t) * s1;
    lam.iter().map(|&x| t * x + shift).collect()
}

/// Random point of the slice `{σ_1 = 1}` near the centre, used for probes.
pub(crate) fn random_slice_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let s: f64 = x.iter().sum();
    for v in &mut x {
        *v /= s;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma2_examples() {
        let c = Cone::gamma_k(4, 2).unwrap();
        let v = |x: &[f64]| c.contains(x, 1e-12).unwrap().verdict;
        assert_eq!(v(&[1.0, 1.0, 1.0, 1.0]), Verdict::Interior);
        assert_eq!(v(&[1.0, 0.0, 0.0, 0.0]), Verdict::Boundary);
        assert_eq!(v(&[-3.0, 1.0, 1.0, 1.0]), Verdict::Outside);
        assert!(c.contains(&[0.0; 4], 1e-12).is_err());
        assert!(c.contains(&[1.0; 3], 1e-12).is_err());
    }

    #[test]
    fn mu_plus_examples() {
        let m = Cone::gamma_k(5, 2).unwrap().mu_plus(1e-12).unwrap();
        assert!((m - 1.5).abs() < 1e-10);
        let m = Cone::gamma_k(4, 1).unwrap().mu_plus(1e-12).unwrap();
        assert!((m - 3.0).abs() < 1e-10);
        for n in 2..=6 {
            let m = Cone::gamma_k(n, n).unwrap().mu_plus(1e-12).unwrap();
            assert!(m.abs() < 1e-10);
        }
    }

    #[test]
    fn opening_up() {
        let c = Cone::gamma_k(4, 2).unwrap();
        let o = c.open_up(0.9).unwrap();
        assert_eq!(
            o.contains(&[1.0, 0.0, 0.0, 0.0], 1e-12).unwrap().verdict,
            Verdict::Interior
        );
        // (−3,1,1,1) ↦ 0.9·(−3,1,1,1) + 0.1·0·e = (−2.7, 0.9, 0.9, 0.9): σ_2 = −4.86
        let mapped = open_map(&[-3.0f64, 1.0, 1.0, 1.0], 0.9);
        assert!((mapped[0] + 2.7).abs() < 1e-15);
        assert_eq!(
            o.contains(&[-3.0, 1.0, 1.0, 1.0], 1e-12).unwrap().verdict,
            Verdict::Outside
        );
        assert!(c.open_up(0.4).is_err());
        assert!(c.open_up(1.1).is_err());
    }

    #[test]
    fn identity_opening_agrees() {
        let c = Cone::gamma_k(5, 3).unwrap();
        let o = c.open_up(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert_eq!(c.contains(&x, 1e-10).unwrap(), o.contains(&x, 1e-10).unwrap());
        }
    }

    #[test]
    fn ball_cone() {
        let n = 4;
        let r0 = ((n as f64 - 1.0) / n as f64).sqrt();
        assert!(Cone::ball(n, 0.5 * r0).is_err());
        let c = Cone::ball(n, r0).unwrap();
        assert_eq!(c.contains_first_axis(1e-12).unwrap(), Verdict::Boundary);
        let wide = Cone::ball(n, 1.2 * r0).unwrap();
        assert_eq!(wide.contains_first_axis(1e-12).unwrap(), Verdict::Interior);
        assert!(wide.mu_plus(1e-12).unwrap() > 0.0);
    }

    #[test]
    fn spec_round_trip() {
        let s: ConeSpec = serde_json::from_str(r#"{"family":"gamma_k","n":5,"k":2}"#).unwrap();
        assert_eq!(s, ConeSpec::GammaK { n: 5, k: 2 });
        let c: ConeSpec =
            serde_json::from_str(r#"{"family":"custom","n":3,"shape":"ball","radius":0.9}"#).unwrap();
        assert!(Cone::from_spec(&c).is_ok());
    }

    #[test]
    fn slice_cone_symmetrizes() {
        let h = SliceFunction::new("skewed", 3, |x: &[f64]| {
            let r = 0.9 - ((x[0] - 1.0 / 3.0).powi(2) + 2.0 * (x[1] - 1.0 / 3.0).powi(2) + (x[2] - 1.0 / 3.0).powi(2)).sqrt();
            r
        })
        .unwrap();
        let a = h.value(&[0.5, 0.3, 0.2]);
        let b = h.value(&[0.2, 0.5, 0.3]);
        assert!((a - b).abs() < 1e-15);
        let c = Cone::from_slice(3, h).unwrap();
        assert!(c.contains(&[1.0, 1.0, 1.0], 1e-9).unwrap().is_interior());
        assert_eq!(
            c.contains(&[-1.0, 0.5, 0.2], 1e-9).unwrap().verdict,
            Verdict::Outside
        );
    }

    #[test]
    fn rejects_convex_slice() {
        let h = SliceFunction::symmetric("convex", |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>());
        assert!(Cone::from_slice(3, h).is_err());
    }
}
