//! Concave defining functions `f` of a cone: degree-one homogeneous,
//! symmetric, positive inside, zero on the boundary, increasing in every
//! eigenvalue.
//!
//! The general construction is `f(λ) = σ_1 · h(λ/σ_1)^α` for a concave slice
//! function `h`. On `Γ_k` the slice function is the normalized quotient
//! `q_k = (σ_k/C(n,k)) / (σ_{k−1}/C(n,k−1))`, which vanishes linearly on the
//! boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{open_map, Cone, ConeKind, SliceFunction, Verdict};
use crate::error::{arg, Error, Result};
use crate::scalar::{binomial, Real};
use crate::symfunc::{sigma_gradient, sigma_upto};

/// Exponent used when `(1, 0, …, 0)` lies on the boundary of the cone.
pub const DEFAULT_ALPHA: f64 = 0.99;

#[derive(Debug, Clone)]
enum Form {
    /// `f = σ_1`.
    Trace,
    /// `f = σ_1^{1−α} q_k^α`.
    Quotient { k: usize },
    /// `f = (σ_k / C(n,k))^{1/k}`.
    Canonical { k: usize },
    /// `f = σ_1 h(λ/σ_1)^α` with the cone's own slice function.
    Slice,
    /// `f = f_base(tλ + (1−t)σ_1 e)`.
    Opened { base: Box<DefiningFunction>, t: f64 },
}

#[derive(Debug, Clone)]
pub struct DefiningFunction {
    cone: Cone,
    alpha: f64,
    form: Form,
}

impl DefiningFunction {
    /// The slice construction, with `α = 1` when `(1,0,…,0) ∈ Γ` and
    /// [`DEFAULT_ALPHA`] otherwise.
    pub fn build(cone: &Cone, alpha_override: Option<f64>) -> Result<Self> {
        let e1 = cone.contains_first_axis(1e-12)?;
        if let Some(a) = alpha_override {
            if !(a > 0.0 && a <= 1.0) {
                return arg(format!("alpha must lie in (0, 1], got {a}"));
            }
            if a == 1.0 && e1 != Verdict::Interior {
                return arg(
                    "alpha = 1 requires (1,0,...,0) inside the cone; on the boundary no such f is elliptic",
                );
            }
        }
        let alpha = alpha_override.unwrap_or(if e1 == Verdict::Interior { 1.0 } else { DEFAULT_ALPHA });
        Self::assemble(cone, alpha)
    }

    fn assemble(cone: &Cone, alpha: f64) -> Result<Self> {
        let form = match cone.kind() {
            ConeKind::GammaK(1) => Form::Trace,
            ConeKind::GammaK(k) => Form::Quotient { k: *k },
            ConeKind::Ball { .. } | ConeKind::Slice(_) => Form::Slice,
            // the slice function of Γ_t is h(t·x + (1−t)e), so the base form
            // is reused on the mapped point with the opened cone's exponent
            ConeKind::OpenedUp { base, t } => Form::Opened {
                base: Box::new(Self::assemble(base, alpha)?),
                t: *t,
            },
        };
        let alpha = if matches!(form, Form::Trace) { 1.0 } else { alpha };
        Ok(DefiningFunction {
            cone: cone.clone(),
            alpha,
            form,
        })
    }

    /// `(σ_k/C(n,k))^{1/k}` on `Γ_k`, normalized so that `f(e) = 1`.
    pub fn canonical(cone: &Cone) -> Result<Self> {
        match cone.gamma_index() {
            Some(k) => Ok(DefiningFunction {
                cone: cone.clone(),
                alpha: 1.0 / k as f64,
                form: Form::Canonical { k },
            }),
            None => arg("the canonical defining function exists only for Gamma_k"),
        }
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `Some(k)` when this is the canonical `(σ_k/C(n,k))^{1/k}`.
    pub fn canonical_index(&self) -> Option<usize> {
        match self.form {
            Form::Canonical { k } => Some(k),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        let form = match &self.form {
            Form::Trace => "sigma_1".to_string(),
            Form::Quotient { k } => format!("sigma_1^(1-a) q_{k}^a"),
            Form::Canonical { k } => format!("(sigma_{k}/C(n,{k}))^(1/{k})"),
            Form::Slice => "sigma_1 h(lambda/sigma_1)^a".to_string(),
            Form::Opened { t, .. } => format!("opened-up (t = {t})"),
        };
        format!("{form} on {}, alpha = {}", self.cone.describe(), self.alpha)
    }

    fn check_dim<T>(&self, lam: &[T]) -> Result<()> {
        if lam.len() != self.dim() {
            return arg(format!("expected {} eigenvalues, got {}", self.dim(), lam.len()));
        }
        Ok(())
    }

    /// `f(λ)` on the closed cone; points outside are a domain error.
    pub fn value<T: Real>(&self, lam: &[T]) -> Result<T> {
        self.check_dim(lam)?;
        let norm = lam.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        let slack = T::lit(64.0) * T::unit_roundoff();
        let n = self.dim();
        match &self.form {
            Form::Trace => {
                let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
                if s1 < -slack * norm {
                    return outside();
                }
                Ok(s1.max(T::zero()))
            }
            Form::Canonical { k } => {
                let s = closed_sigmas(*k, lam, norm, slack)?;
                match s {
                    None => Ok(T::zero()),
                    Some(s) => Ok((s[*k] / binomial::<T>(n, *k)).powf(T::one() / T::count(*k))),
                }
            }
            Form::Quotient { k } => {
                let s = closed_sigmas(*k, lam, norm, slack)?;
                let s = match s {
                    None => return Ok(T::zero()),
                    Some(s) => s,
                };
                let q = quotient(n, *k, &s);
                let a = T::lit(self.alpha);
                Ok(s[1].powf(T::one() - a) * q.powf(a))
            }
            Form::Slice => {
                let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
                if s1 <= T::zero() {
                    return outside();
                }
                let x: Vec<T> = lam.iter().map(|&v| v / s1).collect();
                let h = self.slice_value(&x)?;
                if h < T::zero() {
                    if h > -slack {
                        return Ok(T::zero());
                    }
                    return outside();
                }
                Ok(s1 * h.powf(T::lit(self.alpha)))
            }
            Form::Opened { base, t } => base.value(&open_map(lam, T::lit(*t))),
        }
    }

    /// `∇f(λ)`; only defined in the open cone.
    pub fn gradient<T: Real>(&self, lam: &[T]) -> Result<Vec<T>> {
        self.check_dim(lam)?;
        let n = self.dim();
        let norm = lam.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        match &self.form {
            Form::Trace => {
                let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
                if !(s1 > T::zero()) {
                    return outside();
                }
                Ok(vec![T::one(); n])
            }
            Form::Canonical { k } => {
                let s = open_sigmas(*k, lam, norm)?;
                let c = binomial::<T>(n, *k);
                let kk = T::count(*k);
                // d/dλ (σ_k/c)^{1/k} = (1/k)(σ_k/c)^{1/k − 1} ∂σ_k / c
                let pre = (s[*k] / c).powf(T::one() / kk - T::one()) / (kk * c);
                Ok(sigma_gradient(*k, lam).into_iter().map(|g| pre * g).collect())
            }
            Form::Quotient { k } => {
                let s = open_sigmas(*k, lam, norm)?;
                let q = quotient(n, *k, &s);
                let ratio = binomial::<T>(n, *k - 1) / binomial::<T>(n, *k);
                let gk = sigma_gradient(*k, lam);
                let gkm = sigma_gradient(*k - 1, lam);
                let a = T::lit(self.alpha);
                let s1 = s[1];
                let c_trace = (T::one() - a) * (q / s1).powf(a);
                let c_q = a * (s1 / q).powf(T::one() - a);
                let skm = s[*k - 1];
                Ok((0..n)
                    .map(|i| {
                        let dq = ratio * (skm * gk[i] - s[*k] * gkm[i]) / (skm * skm);
                        c_trace + c_q * dq
                    })
                    .collect())
            }
            Form::Slice => {
                let s1 = lam.iter().fold(T::zero(), |a, &x| a + x);
                if !(s1 > T::zero()) {
                    return outside();
                }
                let x: Vec<T> = lam.iter().map(|&v| v / s1).collect();
                let h = self.slice_value(&x)?;
                if !(h > T::zero()) {
                    return outside();
                }
                let dh = self.slice_gradient(&x)?;
                let a = T::lit(self.alpha);
                let g = h.powf(a);
                let dg: Vec<T> = dh.iter().map(|&d| a * h.powf(a - T::one()) * d).collect();
                let proj = dg.iter().zip(&x).fold(T::zero(), |acc, (&d, &xi)| acc + d * xi);
                Ok(dg.iter().map(|&d| g + d - proj).collect())
            }
            Form::Opened { base, t } => {
                let t = T::lit(*t);
                let gb = base.gradient(&open_map(lam, t))?;
                let total = gb.iter().fold(T::zero(), |a, &x| a + x);
                Ok(gb.iter().map(|&g| t * g + (T::one() - t) * total).collect())
            }
        }
    }

    fn slice_value<T: Real>(&self, x: &[T]) -> Result<T> {
        match self.cone.kind() {
            ConeKind::Ball { radius } => {
                let c = T::one() / T::count(x.len());
                let d = x.iter().fold(T::zero(), |a, &v| a + (v - c) * (v - c)).sqrt();
                Ok(T::lit(*radius) - d)
            }
            ConeKind::Slice(h) => Ok(T::lit(h.value(&to_f64(x)))),
            _ => Err(Error::Numeric("cone has no slice function".into())),
        }
    }

    fn slice_gradient<T: Real>(&self, x: &[T]) -> Result<Vec<T>> {
        match self.cone.kind() {
            ConeKind::Ball { .. } => {
                let c = T::one() / T::count(x.len());
                let d = x.iter().fold(T::zero(), |a, &v| a + (v - c) * (v - c)).sqrt();
                if d == T::zero() {
                    return Ok(vec![T::zero(); x.len()]);
                }
                Ok(x.iter().map(|&v| -(v - c) / d).collect())
            }
            ConeKind::Slice(h) => Ok(h.gradient(&to_f64(x)).into_iter().map(T::lit).collect()),
            _ => Err(Error::Numeric("cone has no slice function".into())),
        }
    }

    /// `min_i ∂_i f / Σ_j ∂_j f` at one interior point.
    pub fn ellipticity_at(&self, lam: &[f64]) -> Result<f64> {
        let g = self.gradient(lam)?;
        let total: f64 = g.iter().sum();
        let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(min / total)
    }

    /// Empirical minimum of [`Self::ellipticity_at`] over random interior
    /// points drawn with a seeded generator.
    pub fn ellipticity_ratio(&self, sample_count: usize, seed: u64) -> Result<f64> {
        if sample_count == 0 {
            return arg("sample_count must be at least 1");
        }
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = f64::INFINITY;
        let mut taken = 0;
        let mut tries = 0usize;
        while taken < sample_count {
            tries += 1;
            if tries > 10_000 * sample_count {
                return Err(Error::Domain("could not draw interior samples".into()));
            }
            let shift = rng.gen_range(0.0..1.5);
            let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) + shift).collect();
            if !self.cone.contains(&lam, 1e-6)?.is_interior() {
                continue;
            }
            best = best.min(self.ellipticity_at(&lam)?);
            taken += 1;
        }
        Ok(best)
    }
}

/// A slice function for `Γ_k`-like custom cones: the symmetrized quotient
/// `q_k` evaluated on the slice.
pub fn quotient_slice(n: usize, k: usize) -> Result<SliceFunction> {
    if k < 2 || k > n {
        return arg(format!("quotient slice needs 2 <= k <= n, got k = {k}"));
    }
    Ok(SliceFunction::symmetric(format!("q_{k}"), move |x: &[f64]| {
        let s = sigma_upto(k, x);
        if s[k - 1] <= 0.0 {
            return -1.0;
        }
        quotient(n, k, &s)
    }))
}

fn quotient<T: Real>(n: usize, k: usize, s: &[T]) -> T {
    (s[k] / binomial::<T>(n, k)) / (s[k - 1] / binomial::<T>(n, k - 1))
}

fn outside<T>() -> Result<T> {
    Err(Error::Domain("point lies outside the cone".into()))
}

fn to_f64<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.as_f64()).collect()
}

/// `σ_0..σ_k` on the closed cone; `None` when some `σ_j` vanishes (within
/// rounding), so `f = 0`.
fn closed_sigmas<T: Real>(k: usize, lam: &[T], norm: T, slack: T) -> Result<Option<Vec<T>>> {
    let s = sigma_upto(k, lam);
    let mut scale = T::one();
    let mut degenerate = false;
    for sj in s.iter().skip(1) {
        scale = scale * norm;
        if *sj < -slack * scale {
            return outside();
        }
        if *sj <= slack * scale {
            degenerate = true;
        }
    }
    Ok(if degenerate { None } else { Some(s) })
}

fn open_sigmas<T: Real>(k: usize, lam: &[T], norm: T) -> Result<Vec<T>> {
    let s = sigma_upto(k, lam);
    let mut scale = T::one();
    for sj in s.iter().skip(1) {
        scale = scale * norm;
        if !(*sj > T::zero()) {
            return outside();
        }
    }
    let _ = scale;
    Ok(s)
}
