//! Finite-difference checks of the Newton-tensor divergence identity and the
//! Schouten commutator identity on flat space.
//!
//! Both residuals difference an analytically assembled tensor field (exact
//! catalog derivatives of `u` or `w`) with second-order central
//! differences, so they are `O(h²)` wherever the identity holds.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{arg, Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::symfunc::{newton_tensor, sigma_matrix};

/// Half-width of the evaluation box `[−1, 1]^n`.
pub const BOX_HALF_WIDTH: f64 = 1.0;

/// Catalog of smooth positive test fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    Constant { c: f64 },
    /// `1 + a|x|² + b e^{−|x|²}`.
    PolyGauss { a: f64, b: f64 },
    /// `c + |x − x₀|^p`, `x₀ = (−2, …, −2)` outside the box.
    PowerOffset { c: f64, p: f64 },
    /// `exp(a·x)`.
    ExpLinear { a: Vec<f64> },
    /// `c + a·x`.
    Affine { c: f64, a: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub n: usize,
    #[serde(flatten)]
    pub kind: FieldKind,
}

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone)]
pub struct FieldJet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: SymmetricMatrix<f64>,
}

const POWER_CENTER: f64 = -2.0;

impl ScalarField {
    pub fn new(n: usize, kind: FieldKind) -> Result<Self> {
        if n < 3 {
            return arg(format!("fields need n >= 3, got {n}"));
        }
        match &kind {
            FieldKind::Constant { c } if !(*c > 0.0) => return arg("constant field must be positive"),
            FieldKind::PolyGauss { a, b } if !(*a >= 0.0 && *b >= 0.0) => {
                return arg("poly-Gauss coefficients must be nonnegative")
            }
            FieldKind::PowerOffset { c, .. } if !(*c > 0.0) => return arg("power offset must be positive"),
            FieldKind::ExpLinear { a } | FieldKind::Affine { a, .. } if a.len() != n => {
                return arg(format!("coefficient vector has length {}, expected {n}", a.len()))
            }
            FieldKind::Affine { c, a } => {
                let worst = c - BOX_HALF_WIDTH * a.iter().map(|x| x.abs()).sum::<f64>();
                if !(worst > 0.0) {
                    return arg("affine field is not positive on the box");
                }
            }
            _ => {}
        }
        Ok(ScalarField { n, kind })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, FieldKind::Constant { c })
    }

    pub fn gaussian(n: usize) -> Result<Self> {
        Self::new(n, FieldKind::PolyGauss { a: 0.0, b: 1.0 })
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FieldKind::Constant { c } => format!("u = {c}"),
            FieldKind::PolyGauss { a, b } => format!("1 + {a}|x|^2 + {b} exp(-|x|^2)"),
            FieldKind::PowerOffset { c, p } => format!("{c} + |x + 2|^{p}"),
            FieldKind::ExpLinear { a } => format!("exp({a:?} . x)"),
            FieldKind::Affine { c, a } => format!("{c} + {a:?} . x"),
        }
    }

    fn check_point(&self, x: &[f64], margin: f64) -> Result<()> {
        if x.len() != self.n {
            return arg(format!("point has {} coordinates, expected {}", x.len(), self.n));
        }
        if x.iter().any(|c| !c.is_finite() || c.abs() + margin > BOX_HALF_WIDTH) {
            return arg(format!("point {x:?} is not inside the box with margin {margin}"));
        }
        Ok(())
    }

    pub fn jet(&self, x: &[f64]) -> FieldJet {
        let n = self.n;
        let r2: f64 = x.iter().map(|c| c * c).sum();
        match &self.kind {
            FieldKind::Constant { c } => FieldJet {
                value: *c,
                grad: vec![0.0; n],
                hess: SymmetricMatrix::zeros(n),
            },
            FieldKind::PolyGauss { a, b } => {
                let e = b * (-r2).exp();
                FieldJet {
                    value: 1.0 + a * r2 + e,
                    grad: x.iter().map(|&c| 2.0 * a * c - 2.0 * e * c).collect(),
                    hess: SymmetricMatrix::from_fn(n, |i, j| {
                        let d = if i == j { 1.0 } else { 0.0 };
                        2.0 * a * d + e * (4.0 * x[i] * x[j] - 2.0 * d)
                    }),
                }
            }
            FieldKind::PowerOffset { c, p } => {
                let y: Vec<f64> = x.iter().map(|v| v - POWER_CENTER).collect();
                let s2: f64 = y.iter().map(|v| v * v).sum();
                let s = s2.sqrt();
                let sp2 = s.powf(p - 2.0);
                FieldJet {
                    value: c + s.powf(*p),
                    grad: y.iter().map(|&v| p * sp2 * v).collect(),
                    hess: SymmetricMatrix::from_fn(n, |i, j| {
                        let d = if i == j { 1.0 } else { 0.0 };
                        p * sp2 * (d + (p - 2.0) * y[i] * y[j] / s2)
                    }),
                }
            }
            FieldKind::ExpLinear { a } => {
                let v = a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>().exp();
                FieldJet {
                    value: v,
                    grad: a.iter().map(|p| p * v).collect(),
                    hess: SymmetricMatrix::from_fn(n, |i, j| a[i] * a[j] * v),
                }
            }
            FieldKind::Affine { c, a } => FieldJet {
                value: c + a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>(),
                grad: a.clone(),
                hess: SymmetricMatrix::zeros(n),
            },
        }
    }
}

/// `(A_w)^i_j = w ∂_i∂_j w − ½|∇w|² δ^i_j` from a `w`-jet.
fn mixed_schouten_w(jw: &FieldJet) -> SymmetricMatrix<f64> {
    let g2: f64 = jw.grad.iter().map(|g| g * g).sum();
    SymmetricMatrix::from_fn(jw.grad.len(), |i, j| {
        jw.value * jw.hess.get(i, j) - if i == j { 0.5 * g2 } else { 0.0 }
    })
}

/// `w`-jet of `w = u^{−2/(n−2)}` from a `u`-jet.
fn w_from_u(n: usize, ju: &FieldJet) -> FieldJet {
    let a = -2.0 / (n as f64 - 2.0);
    let u = ju.value;
    let d1 = a * u.powf(a - 1.0);
    let d2 = a * (a - 1.0) * u.powf(a - 2.0);
    FieldJet {
        value: u.powf(a),
        grad: ju.grad.iter().map(|g| d1 * g).collect(),
        hess: SymmetricMatrix::from_fn(n, |i, j| d1 * ju.hess.get(i, j) + d2 * ju.grad[i] * ju.grad[j]),
    }
}

/// The (1,1) Schouten tensor of `g_u = u^{4/(n−2)} δ` in flat coordinates.
pub fn schouten_mixed(field: &ScalarField, x: &[f64]) -> SymmetricMatrix<f64> {
    mixed_schouten_w(&w_from_u(field.n, &field.jet(x)))
}

fn shifted(x: &[f64], j: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[j] += d;
    y
}

/// `R_r = ∂_j T_k{}^j{}_r + (2/(n−2)) (∂_j u/u) [n T_k{}^j{}_r − (n−k) σ_k δ^j_r]`
/// with `T_k = T_k(A_{g_u})`; zero on flat space.
pub fn divergence_residual(field: &ScalarField, k: usize, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = field.n;
    if k + 1 > n {
        return arg(format!("need 0 <= k <= n - 1, got k = {k}"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return arg(format!("step must be positive, got {h}"));
    }
    field.check_point(x, 4.0 * h)?;
    let t_at = |y: &[f64]| newton_tensor(k, &schouten_mixed(field, y));
    let mut div = vec![0.0; n];
    for j in 0..n {
        let tp = t_at(&shifted(x, j, h))?;
        let tm = t_at(&shifted(x, j, -h))?;
        for (r, d) in div.iter_mut().enumerate() {
            *d += (tp.get(j, r) - tm.get(j, r)) / (2.0 * h);
        }
    }
    let a = schouten_mixed(field, x);
    let t = newton_tensor(k, &a)?;
    let sk = sigma_matrix(k, &a)?;
    let ju = field.jet(x);
    let c = 2.0 / (n as f64 - 2.0);
    let (nf, kf) = (n as f64, k as f64);
    Ok((0..n)
        .map(|r| {
            let corr: f64 = (0..n)
                .map(|j| {
                    let delta = if j == r { 1.0 } else { 0.0 };
                    ju.grad[j] / ju.value * (nf * t.get(j, r) - (nf - kf) * sk * delta)
                })
                .sum();
            div[r] + c * corr
        })
        .collect())
}

/// Residual of the flat commutator identity for a `w` field,
/// `∂_i(A_w)^l_j − ∂_j(A_w)^l_i − (1/w)[w_i A^l_j − w_j A^l_i − w_s A^s_i δ^l_j + w_s A^s_j δ^l_i]`,
/// indexed `[i][j][l]`.
pub fn curl_residual(w_field: &ScalarField, x: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = w_field.n;
    if !(h > 0.0 && h.is_finite()) {
        return arg(format!("step must be positive, got {h}"));
    }
    w_field.check_point(x, 4.0 * h)?;
    let a_at = |y: &[f64]| mixed_schouten_w(&w_field.jet(y));
    // da[i] = ∂_i A_w
    let da: Vec<SymmetricMatrix<f64>> = (0..n)
        .map(|i| {
            let p = a_at(&shifted(x, i, h));
            let m = a_at(&shifted(x, i, -h));
            SymmetricMatrix::from_fn(n, |a, b| (p.get(a, b) - m.get(a, b)) / (2.0 * h))
        })
        .collect();
    let jw = w_field.jet(x);
    if !(jw.value > 0.0) {
        return Err(Error::Domain("w must be positive".into()));
    }
    let a = mixed_schouten_w(&jw);
    let g = &jw.grad;
    let ga: Vec<f64> = (0..n).map(|i| (0..n).map(|s| g[s] * a.get(s, i)).sum()).collect();
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let d_lj = if l == j { 1.0 } else { 0.0 };
                let d_li = if l == i { 1.0 } else { 0.0 };
                let lhs = da[i].get(l, j) - da[j].get(l, i);
                let rhs = (g[i] * a.get(l, j) - g[j] * a.get(l, i) - ga[i] * d_lj + ga[j] * d_li) / jw.value;
                out[i][j][l] = lhs - rhs;
            }
        }
    }
    Ok(out)
}

/// Which identity a convergence study exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "identity", rename_all = "snake_case")]
pub enum Identity {
    Divergence { k: usize },
    /// The field is read as `w`.
    Curl,
}

/// Fitted order, or the sentinel for a residual that vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    /// Every residual underflowed: the discrete identity is exact.
    Exact,
}

impl Order {
    pub fn value(&self) -> f64 {
        match self {
            Order::Finite(p) => *p,
            Order::Exact => f64::INFINITY,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Order::Exact)
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(p) => s.serialize_f64(*p),
            Order::Exact => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity: Identity,
    pub h: Vec<f64>,
    pub residual_max: Vec<f64>,
    pub order: Order,
}

/// Below this the residual counts as exactly zero.
const UNDERFLOW: f64 = 1e-14;

pub fn residual_max(field: &ScalarField, identity: Identity, x: &[f64], h: f64) -> Result<f64> {
    Ok(match identity {
        Identity::Divergence { k } => divergence_residual(field, k, x, h)?
            .iter()
            .fold(0.0, |m, v| m.max(v.abs())),
        Identity::Curl => curl_residual(field, x, h)?
            .iter()
            .flatten()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs())),
    })
}

/// Least-squares slope of `log residual` against `log h`.
pub fn convergence_study(field: &ScalarField, identity: Identity, x: &[f64], ladder: &[f64]) -> Result<ResidualReport> {
    if ladder.len() < 2 {
        return arg("a convergence study needs at least two steps");
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) || ladder.iter().any(|h| !(*h > 0.0)) {
        return arg("step ladder must be positive and strictly decreasing");
    }
    let res = ladder
        .iter()
        .map(|&h| residual_max(field, identity, x, h))
        .collect::<Result<Vec<f64>>>()?;
    let order = if res.iter().all(|r| *r < UNDERFLOW) {
        Order::Exact
    } else if res.iter().any(|r| *r < UNDERFLOW) {
        return Err(Error::Numeric(
            "residual underflows on part of the ladder; order is undefined".into(),
        ));
    } else {
        let xs: Vec<f64> = ladder.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
        let m = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
        Order::Finite(sxy / sxx)
    };
    Ok(ResidualReport {
        identity,
        h: ladder.to_vec(),
        residual_max: res,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_jet_check(f: &ScalarField, x: &[f64]) {
        let j = f.jet(x);
        let e = 1e-5;
        for i in 0..f.n {
            let p = f.jet(&shifted(x, i, e));
            let m = f.jet(&shifted(x, i, -e));
            let g = (p.value - m.value) / (2.0 * e);
            assert!((g - j.grad[i]).abs() < 1e-7 * (1.0 + g.abs()), "{}", f.describe());
            for l in 0..f.n {
                let hh = (p.grad[l] - m.grad[l]) / (2.0 * e);
                assert!((hh - j.hess.get(i, l)).abs() < 1e-6 * (1.0 + hh.abs()));
            }
        }
    }

    #[test]
    fn catalog_derivatives() {
        let x = [0.3, -0.2, 0.1, 0.4];
        for kind in [
            FieldKind::PolyGauss { a: 0.5, b: 1.0 },
            FieldKind::PowerOffset { c: 1.0, p: -1.5 },
            FieldKind::ExpLinear { a: vec![0.2, -0.1, 0.3, 0.05] },
            FieldKind::Affine { c: 2.0, a: vec![0.2, -0.1, 0.3, 0.05] },
        ] {
            fd_jet_check(&ScalarField::new(4, kind).unwrap(), &x);
        }
    }

    #[test]
    fn constant_field_is_exact() {
        let f = ScalarField::constant(4, 1.0).unwrap();
        for k in 0..4 {
            let r = divergence_residual(&f, k, &[0.1, 0.2, 0.3, 0.4], 1e-2).unwrap();
            assert!(r.iter().all(|v| *v == 0.0));
        }
        let rep = convergence_study(&f, Identity::Divergence { k: 2 }, &[0.0; 4], &[1e-2, 5e-3]).unwrap();
        assert!(rep.order.is_exact());
        assert_eq!(serde_json::to_string(&rep.order).unwrap(), "\"inf\"");
    }

    #[test]
    fn k_zero_matches_direct_formula() {
        // T_0 = I: both the divergence and the bracket vanish
        let f = ScalarField::gaussian(4).unwrap();
        let r = divergence_residual(&f, 0, &[0.3, 0.1, -0.2, 0.4], 1e-2).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn gaussian_k2_is_second_order() {
        let f = ScalarField::gaussian(4).unwrap();
        let x = [0.3, 0.1, -0.2, 0.4];
        let a = residual_max(&f, Identity::Divergence { k: 2 }, &x, 1e-2).unwrap();
        let b = residual_max(&f, Identity::Divergence { k: 2 }, &x, 5e-3).unwrap();
        let ratio = a / b;
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn curl_cases() {
        let x = [0.2, -0.3, 0.1];
        let aff = ScalarField::new(3, FieldKind::Affine { c: 2.0, a: vec![0.3, 0.1, -0.2] }).unwrap();
        let r = residual_max(&aff, Identity::Curl, &x, 1e-3).unwrap();
        assert!(r < 1e-8, "{r}");
        let c = ScalarField::constant(3, 1.7).unwrap();
        assert_eq!(residual_max(&c, Identity::Curl, &x, 1e-3).unwrap(), 0.0);
        let g = ScalarField::gaussian(3).unwrap();
        let rep = convergence_study(&g, Identity::Curl, &x, &[4e-2, 2e-2, 1e-2]).unwrap();
        let p = rep.order.value();
        assert!((1.7..=2.3).contains(&p), "order {p}");
    }

    #[test]
    fn rejects_points_near_the_edge() {
        let f = ScalarField::gaussian(3).unwrap();
        assert!(divergence_residual(&f, 1, &[0.99, 0.0, 0.0], 1e-2).is_err());
        assert!(divergence_residual(&f, 3, &[0.0, 0.0, 0.0], 1e-2).is_err());
    }
}
