//! Elementary symmetric functions of vectors and symmetric matrices, and the
//! Newton tensors `T_k(A) = Σ_{l≤k} (−1)^{k−l} σ_l(A) A^{k−l}`.

use std::ops::{Add, Deref, Mul};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{arg, Result};
use crate::linalg::SymmetricMatrix;
use crate::scalar::Real;

/// A point of eigenvalue space, `n ≥ 2`, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVector<T> {
    entries: Vec<T>,
}

impl<T: Real> EigenvalueVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.len() < 2 {
            return arg(format!("eigenvalue vectors need n >= 2, got {}", entries.len()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return arg("eigenvalue vector has a non-finite entry");
        }
        Ok(EigenvalueVector { entries })
    }

    /// `(a, b, …, b)`: one distinguished entry followed by `n − 1` copies.
    pub fn radial(n: usize, first: T, rest: T) -> Result<Self> {
        let mut v = vec![rest; n];
        v[0] = first;
        Self::new(v)
    }

    pub fn constant(n: usize, c: T) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn norm(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        EigenvalueVector {
            entries: self.entries.iter().map(|&x| s * x).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|x| x.as_f64()).collect()
    }
}

impl<T> Deref for EigenvalueVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.entries
    }
}

impl<T: Real> Serialize for EigenvalueVector<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_f64().serialize(s)
    }
}

/// Coefficients `σ_0, …, σ_kmax` of `Π (t + x_i)` by the product recurrence.
///
/// Works over any commutative ring, so exact rational arithmetic can be used
/// as well as floats. The entries are processed in the order given.
pub fn elementary_symmetric<R>(entries: &[R], k_max: usize) -> Vec<R>
where
    R: Clone + Zero + One + Add<Output = R> + Mul<Output = R>,
{
    let mut c = vec![R::zero(); k_max + 1];
    c[0] = R::one();
    for (i, x) in entries.iter().enumerate() {
        let top = (i + 1).min(k_max);
        for j in (1..=top).rev() {
            c[j] = c[j].clone() + c[j - 1].clone() * x.clone();
        }
    }
    c
}

/// All of `σ_0(λ), …, σ_kmax(λ)`, evaluated on the sorted entries so the
/// result does not depend on the order of `lam`.
pub fn sigma_upto<T: Real>(k_max: usize, lam: &[T]) -> Vec<T> {
    let mut sorted = lam.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    elementary_symmetric(&sorted, k_max.min(lam.len()))
        .into_iter()
        .chain(std::iter::repeat(T::zero()))
        .take(k_max + 1)
        .collect()
}

/// `σ_k(λ)`; `σ_0 = 1`.
pub fn sigma<T: Real>(k: usize, lam: &[T]) -> Result<T> {
    if k > lam.len() {
        return arg(format!("sigma_{k} undefined for n = {}", lam.len()));
    }
    Ok(sigma_upto(k, lam)[k])
}

/// `∂σ_k/∂λ_i = σ_{k−1}(λ with entry i removed)`.
pub fn sigma_partial<T: Real>(k: usize, lam: &[T], i: usize) -> T {
    if k == 0 {
        return T::zero();
    }
    let rest: Vec<T> = lam
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &x)| x)
        .collect();
    sigma_upto(k - 1, &rest)[k - 1]
}

/// Gradient of `σ_k` with respect to the eigenvalues.
pub fn sigma_gradient<T: Real>(k: usize, lam: &[T]) -> Vec<T> {
    (0..lam.len()).map(|i| sigma_partial(k, lam, i)).collect()
}

/// `σ_k` of the eigenvalues of a symmetric matrix.
pub fn sigma_matrix<T: Real>(k: usize, a: &SymmetricMatrix<T>) -> Result<T> {
    if k > a.dim() {
        return arg(format!("sigma_{k} undefined for n = {}", a.dim()));
    }
    let ev = a.eigenvalues()?;
    Ok(sigma_upto(k, &ev)[k])
}

/// Newton tensor `T_k(A)` for `0 ≤ k ≤ n − 1`.
pub fn newton_tensor<T: Real>(k: usize, a: &SymmetricMatrix<T>) -> Result<SymmetricMatrix<T>> {
    let n = a.dim();
    if k + 1 > n {
        return arg(format!("Newton tensor T_{k} needs k <= n - 1 = {}", n.saturating_sub(1)));
    }
    let ev = a.eigenvalues()?;
    let sig = sigma_upto(k, &ev);
    // powers[p] = A^p, symmetrised after each multiplication
    let mut powers = Vec::with_capacity(k + 1);
    powers.push(SymmetricMatrix::identity(n));
    for p in 1..=k {
        let next = powers[p - 1].commuting_product(a);
        powers.push(next);
    }
    let mut out = SymmetricMatrix::zeros(n);
    for l in 0..=k {
        let sign = if (k - l) % 2 == 0 { T::one() } else { -T::one() };
        out = &out + &powers[k - l].scale(sign * sig[l]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Test-only oracle: explicit sum over all k-subsets.
    fn brute_sigma(k: usize, lam: &[f64]) -> f64 {
        let n = lam.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                total += (0..n).filter(|i| mask & (1 << i) != 0).map(|i| lam[i]).product::<f64>();
            }
        }
        total
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymmetricMatrix<f64> {
        SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn trivial_values() {
        assert_eq!(sigma(2, &[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(sigma(4, &[1.0; 4]).unwrap(), 1.0);
        assert_eq!(sigma(0, &[3.0, -2.0]).unwrap(), 1.0);
        assert!(sigma(3, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lam: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = sigma(3, &lam).unwrap();
        let slow = brute_sigma(3, &lam);
        assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1e-300));
    }

    #[test]
    fn matrix_sigma_cases() {
        assert!((sigma_matrix(1, &SymmetricMatrix::<f64>::identity(4)).unwrap() - 4.0).abs() < 1e-15);
        let (a, b, c): (f64, f64, f64) = (0.3, -1.2, 2.5);
        let d = SymmetricMatrix::diagonal(&[a, b, c]);
        assert!((sigma_matrix(2, &d).unwrap() - (a * b + a * c + b * c)).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_sym(&mut rng, 5);
        let tr = m.trace();
        let tr2 = m.matmul(&m);
        let tr2: f64 = (0..5).map(|i| tr2.get(i, i)).sum();
        let oracle = 0.5 * (tr * tr - tr2);
        assert!((sigma_matrix(2, &m).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn newton_tensor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_sym(&mut rng, 4);
        let t0 = newton_tensor(0, &a).unwrap();
        assert_eq!(t0, SymmetricMatrix::identity(4));

        let t2 = newton_tensor(2, &SymmetricMatrix::<f64>::identity(5)).unwrap();
        assert!((&t2 - &SymmetricMatrix::identity(5).scale(6.0)).max_abs() < 1e-13);

        let t1 = newton_tensor(1, &SymmetricMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap();
        assert!((&t1 - &SymmetricMatrix::diagonal(&[5.0, 4.0, 3.0])).max_abs() < 1e-14);

        assert!(newton_tensor(4, &a).is_err());
    }

    #[test]
    fn partials_match_definition() {
        let lam: [f64; 4] = [0.4, -0.3, 1.1, 0.7];
        let h = 1e-6;
        for k in 1..=4 {
            for i in 0..4 {
                let mut p = lam;
                let mut m = lam;
                p[i] += h;
                m[i] -= h;
                let fd = (sigma(k, &p).unwrap() - sigma(k, &m).unwrap()) / (2.0 * h);
                assert!((fd - sigma_partial(k, &lam, i)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_rational_recurrence() {
        use num_rational::Ratio;
        let xs: Vec<Ratio<i64>> = [(1, 2), (-1, 3), (2, 1), (3, 4)]
            .iter()
            .map(|&(a, b)| Ratio::new(a, b))
            .collect();
        let c = elementary_symmetric(&xs, 4);
        // Π x_i = 1/2 · (−1/3) · 2 · 3/4
        assert_eq!(c[4], Ratio::new(-1, 4));
        assert_eq!(c[1], Ratio::new(35, 12));
    }

    #[test]
    fn works_in_single_precision() {
        let v: f32 = sigma(2, &[1.0f32, 2.0, 3.0]).unwrap();
        assert_eq!(v, 11.0);
    }

    #[test]
    fn vector_invariants() {
        assert!(EigenvalueVector::new(vec![1.0]).is_err());
        assert!(EigenvalueVector::new(vec![1.0, f64::NAN]).is_err());
        let v = EigenvalueVector::radial(4, -1.0, 2.0).unwrap();
        assert_eq!(v.entries(), &[-1.0, 2.0, 2.0, 2.0]);
    }
}
