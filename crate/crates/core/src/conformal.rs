//! Schouten tensor of a conformal metric `g_u = u^{4/(n−2)} g` and its
//! eigenvalues, plus the exact radial reduction on flat space.

use serde::Serialize;

use crate::error::{arg, Result};
use crate::linalg::SymmetricMatrix;
use crate::scalar::Real;
use crate::symfunc::EigenvalueVector;

/// `(r, u, u′, u″)` for a radial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialJet<T> {
    pub r: T,
    pub u: T,
    pub du: T,
    pub d2u: T,
}

impl<T: Real> RadialJet<T> {
    pub fn new(r: T, u: T, du: T, d2u: T) -> Result<Self> {
        let jet = RadialJet { r, u, du, d2u };
        jet.validate()?;
        Ok(jet)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > T::zero()) || !(self.u > T::zero()) {
            return arg(format!(
                "radial jet needs r > 0 and u > 0, got r = {}, u = {}",
                self.r, self.u
            ));
        }
        if !(self.du.is_finite() && self.d2u.is_finite() && self.u.is_finite() && self.r.is_finite()) {
            return arg("radial jet has non-finite entries");
        }
        Ok(())
    }

    /// Cartesian jet at `x = r e_1` on flat `ℝ^n`.
    pub fn embed(&self, n: usize) -> Result<PointJet<T>> {
        let mut grad = vec![T::zero(); n];
        grad[0] = self.du;
        let tang = self.du / self.r;
        let hess = SymmetricMatrix::from_fn(n, |i, j| match (i, j) {
            (0, 0) => self.d2u,
            (i, j) if i == j => tang,
            _ => T::zero(),
        });
        PointJet::flat(self.u, grad, hess)
    }
}

/// The two distinct coefficients of the flat radial Schouten tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiPair<T> {
    pub chi1: T,
    pub chi2: T,
}

/// Second-order jet of a positive function at a point of a chart, together
/// with the background metric and its Schouten tensor there.
#[derive(Debug, Clone, PartialEq)]
pub struct PointJet<T> {
    pub u: T,
    pub grad: Vec<T>,
    pub hess: SymmetricMatrix<T>,
    pub background_schouten: SymmetricMatrix<T>,
    pub background_metric: SymmetricMatrix<T>,
}

impl<T: Real> PointJet<T> {
    pub fn new(
        u: T,
        grad: Vec<T>,
        hess: SymmetricMatrix<T>,
        background_schouten: SymmetricMatrix<T>,
        background_metric: SymmetricMatrix<T>,
    ) -> Result<Self> {
        let n = grad.len();
        if n < 3 {
            return arg(format!("conformal jets need n >= 3, got {n}"));
        }
        if hess.dim() != n || background_schouten.dim() != n || background_metric.dim() != n {
            return arg("jet components have mismatched dimensions");
        }
        if !(u > T::zero()) || !u.is_finite() {
            return arg(format!("jet value must be positive, got {u}"));
        }
        if grad.iter().any(|x| !x.is_finite()) || !hess.is_finite() || !background_schouten.is_finite() {
            return arg("jet has non-finite entries");
        }
        background_metric.cholesky()?;
        Ok(PointJet {
            u,
            grad,
            hess,
            background_schouten,
            background_metric,
        })
    }

    /// Jet on flat space: `g = I`, `A_g = 0`.
    pub fn flat(u: T, grad: Vec<T>, hess: SymmetricMatrix<T>) -> Result<Self> {
        let n = grad.len();
        Self::new(u, grad, hess, SymmetricMatrix::zeros(n), SymmetricMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    fn grad_norm_sq(&self) -> Result<T> {
        let l = self.background_metric.cholesky()?;
        // |du|²_g = ‖L⁻¹ du‖²
        let y = l.lower_inverse()?.mul_vec(&self.grad);
        Ok(y.iter().fold(T::zero(), |a, &v| a + v * v))
    }
}

/// `A_{g_u}` as a (0,2) tensor in the chart:
/// `−(2/(n−2))u⁻¹∇²u + (2n/(n−2)²)u⁻² du⊗du − (2/(n−2)²)u⁻²|du|²_g g + A_g`.
pub fn schouten_conformal<T: Real>(jet: &PointJet<T>) -> Result<SymmetricMatrix<T>> {
    let n = jet.dim();
    let m = T::count(n - 2);
    let u = jet.u;
    let g2 = jet.grad_norm_sq()?;
    let c_hess = -T::lit(2.0) / (m * u);
    let c_outer = T::lit(2.0) * T::count(n) / (m * m * u * u);
    let c_metric = -T::lit(2.0) * g2 / (m * m * u * u);
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        c_hess * jet.hess.get(i, j)
            + c_outer * jet.grad[i] * jet.grad[j]
            + c_metric * jet.background_metric.get(i, j)
            + jet.background_schouten.get(i, j)
    }))
}

/// Eigenvalues of `A` relative to a positive definite `metric`, ascending.
pub fn eigen_wrt<T: Real>(a: &SymmetricMatrix<T>, metric: &SymmetricMatrix<T>) -> Result<EigenvalueVector<T>> {
    if a.dim() != metric.dim() {
        return arg("tensor and metric have different dimensions");
    }
    let l = metric.cholesky()?;
    let li = l.lower_inverse()?;
    // L⁻¹ A L⁻ᵀ = (L⁻ᵀ)ᵀ A L⁻ᵀ
    let reduced = a.congruence(&li.transpose());
    EigenvalueVector::new(reduced.eigenvalues()?)
}

/// `χ_1, χ_2` for a radial `u` on flat space.
pub fn radial_chi<T: Real>(n: usize, jet: &RadialJet<T>) -> Result<ChiPair<T>> {
    if n < 3 {
        return arg(format!("radial Schouten formulas need n >= 3, got {n}"));
    }
    jet.validate()?;
    let m = T::count(n - 2);
    let two = T::lit(2.0);
    let p = jet.du / jet.u;
    let chi1 = -(two / m) * p / jet.r - two / (m * m) * p * p;
    let chi2 = (two / m) * (jet.d2u - jet.du / jet.r) / jet.u - two * T::count(n) / (m * m) * p * p;
    Ok(ChiPair { chi1, chi2 })
}

/// Schouten eigenvalues of `g_u` relative to `g_u`:
/// `u^{−4/(n−2)}(χ_1 − χ_2, χ_1, …, χ_1)`, radial direction first.
pub fn radial_eigenvalues<T: Real>(n: usize, jet: &RadialJet<T>) -> Result<EigenvalueVector<T>> {
    let chi = radial_chi(n, jet)?;
    let s = radial_scale(n, jet.u);
    EigenvalueVector::radial(n, s * (chi.chi1 - chi.chi2), s * chi.chi1)
}

/// `u^{−4/(n−2)}`.
pub fn radial_scale<T: Real>(n: usize, u: T) -> T {
    u.powf(-T::lit(4.0) / T::count(n - 2))
}

/// Second-order jet of `w = u^{−2/(n−2)}`; same layout as [`PointJet`].
pub type WJet<T> = PointJet<T>;

/// `A_w = ∇²w − (1/(2w))|dw|²_g g + w A_g`.
///
/// With `g_u = w^{−2} g` the Schouten tensor is `A_{g_u} = w⁻¹ A_w`, so the
/// eigenvalues of `A_{g_u}` relative to `g_u` are `w` times those of `A_w`
/// relative to `g`.
pub fn schouten_w<T: Real>(jet: &WJet<T>) -> Result<SymmetricMatrix<T>> {
    let n = jet.dim();
    let w = jet.u;
    let g2 = jet.grad_norm_sq()?;
    let c = -g2 / (T::lit(2.0) * w);
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        jet.hess.get(i, j) + c * jet.background_metric.get(i, j) + w * jet.background_schouten.get(i, j)
    }))
}

/// Converts a `u`-jet into the matching `w`-jet, `w = u^{−2/(n−2)}`.
pub fn w_jet_from_u<T: Real>(jet: &PointJet<T>) -> Result<WJet<T>> {
    let n = jet.dim();
    let a = -T::lit(2.0) / T::count(n - 2);
    let w = jet.u.powf(a);
    // ∂w = a u^{a−1} ∂u, ∂²w = a u^{a−1} ∂²u + a(a−1) u^{a−2} ∂u ∂u
    let d1 = a * jet.u.powf(a - T::one());
    let d2 = a * (a - T::one()) * jet.u.powf(a - T::lit(2.0));
    let grad: Vec<T> = jet.grad.iter().map(|&g| d1 * g).collect();
    let hess = SymmetricMatrix::from_fn(n, |i, j| d1 * jet.hess.get(i, j) + d2 * jet.grad[i] * jet.grad[j]);
    PointJet::new(
        w,
        grad,
        hess,
        jet.background_schouten.clone(),
        jet.background_metric.clone(),
    )
}
