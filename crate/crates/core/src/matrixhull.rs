//! Birkhoff–von Neumann decompositions and the midpoint eigenvalue hull check.
//!
//! Permutations are stored 0-based and written 1-based in JSON.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{arg, Error, Result};
use crate::linalg::{Matrix, SymmetricMatrix};

pub const SUPPORT_THRESHOLD: f64 = 1e-12;
const SUM_TOL: f64 = 1e-10;
pub const MAX_HULL_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochasticMatrix {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl DoublyStochasticMatrix {
    /// Validates the rows; entries in `[−1e−12, 0)` are clamped to zero.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return arg("empty matrix");
        }
        let mut entries = rows;
        for row in entries.iter_mut() {
            if row.len() != n {
                return arg(format!("matrix is not square: row of length {} in a {n}-row matrix", row.len()));
            }
            for x in row.iter_mut() {
                if !x.is_finite() || *x < -SUPPORT_THRESHOLD {
                    return arg(format!("entry {x} is negative"));
                }
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
        }
        for i in 0..n {
            let r: f64 = entries[i].iter().sum();
            let c: f64 = entries.iter().map(|row| row[i]).sum();
            if (r - 1.0).abs() > SUM_TOL || (c - 1.0).abs() > SUM_TOL {
                return arg(format!("row/column {i} sums to {r}/{c}, not 1"));
            }
        }
        Ok(DoublyStochasticMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }
}

impl Serialize for DoublyStochasticMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPermutation {
    pub weight: f64,
    /// `perm[i]` is the column matched to row `i`.
    pub perm: Vec<usize>,
}

impl Serialize for WeightedPermutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("WeightedPermutation", 2)?;
        st.serialize_field("weight", &self.weight)?;
        let one_based: Vec<usize> = self.perm.iter().map(|p| p + 1).collect();
        st.serialize_field("permutation", &one_based)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightedPermutationList {
    pub items: Vec<WeightedPermutation>,
}

impl WeightedPermutationList {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.items.iter().map(|it| it.weight).sum()
    }

    /// `Σ w_π P_π`.
    pub fn reconstruct(&self, n: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; n]; n];
        for it in &self.items {
            for (i, &j) in it.perm.iter().enumerate() {
                out[i][j] += it.weight;
            }
        }
        out
    }

    /// Max-norm distance between the reconstruction and `s`.
    pub fn reconstruction_error(&self, s: &DoublyStochasticMatrix) -> f64 {
        let r = self.reconstruct(s.dim());
        r.iter()
            .zip(s.rows())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Perfect matching on `{(i, j) : m[i][j] > threshold}` by augmenting paths.
/// Rows and columns are scanned in index order, so the result is deterministic.
fn perfect_matching(m: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = m.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];

    fn augment(i: usize, m: &[Vec<f64>], t: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..m.len() {
            if m[i][j] > t && !seen[j] {
                seen[j] = true;
                if owner[j].map_or(true, |k| augment(k, m, t, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, m, threshold, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("perfect matching")] = j;
    }
    Some(perm)
}

/// Greedy Birkhoff–von Neumann decomposition. Each step zeroes at least one
/// support entry, so the face dimension drops and at most `(n−1)² + 1`
/// permutations are produced.
pub fn bvn_decompose(s: &DoublyStochasticMatrix) -> Result<WeightedPermutationList> {
    let n = s.dim();
    let mut rest: Vec<Vec<f64>> = s.rows().to_vec();
    let mut items = Vec::new();
    let mut remaining = 1.0;
    while remaining > SUPPORT_THRESHOLD {
        let max_entry = rest.iter().flatten().fold(0.0f64, |a, &x| a.max(x));
        if max_entry <= SUPPORT_THRESHOLD {
            break;
        }
        let perm = perfect_matching(&rest, SUPPORT_THRESHOLD).ok_or_else(|| {
            Error::Decomposition(format!(
                "no perfect matching on the positive support after {} permutations",
                items.len()
            ))
        })?;
        let (mut w, mut at) = (f64::INFINITY, 0);
        for (i, &j) in perm.iter().enumerate() {
            if rest[i][j] < w {
                w = rest[i][j];
                at = i;
            }
        }
        for (i, &j) in perm.iter().enumerate() {
            rest[i][j] -= w;
        }
        rest[at][perm[at]] = 0.0;
        remaining -= w;
        items.push(WeightedPermutation { weight: w, perm });
        if items.len() > n * n {
            return Err(Error::Decomposition("greedy decomposition did not terminate".into()));
        }
    }
    let total: f64 = items.iter().map(|it| it.weight).sum();
    if !(total > 0.0) {
        return Err(Error::Decomposition("decomposition has zero total weight".into()));
    }
    for it in items.iter_mut() {
        it.weight /= total;
    }
    Ok(WeightedPermutationList { items })
}

/// `S_ij = P_ij²` for orthogonal `P`.
pub fn squared_orthogonal(p: &Matrix<f64>) -> Result<DoublyStochasticMatrix> {
    let n = p.dim();
    let ptp = p.transpose().matmul(p);
    let dev = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (ptp.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    if !(dev < 1e-10) {
        return arg(format!("matrix is not orthogonal: |PᵀP − I| = {dev:e}"));
    }
    DoublyStochasticMatrix::new(
        (0..n)
            .map(|i| (0..n).map(|j| p.get(i, j) * p.get(i, j)).collect())
            .collect(),
    )
}

/// Orthogonal factor of a Gaussian matrix (Gram–Schmidt, twice).
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= d * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Matrix::from_fn(n, |i, j| cols[j][i])
}

/// `I − 2vvᵀ/|v|²`.
pub fn householder(v: &[f64]) -> Result<Matrix<f64>> {
    let nn: f64 = v.iter().map(|x| x * x).sum();
    if !(nn > 0.0 && nn.is_finite()) {
        return arg("Householder vector must be nonzero");
    }
    Ok(Matrix::from_fn(v.len(), |i, j| {
        (if i == j { 1.0 } else { 0.0 }) - 2.0 * v[i] * v[j] / nn
    }))
}

/// Random symmetric matrix `Q diag(λ) Qᵀ`.
pub fn random_symmetric_with_spectrum(lam: &[f64], rng: &mut ChaCha8Rng) -> SymmetricMatrix<f64> {
    let q = random_orthogonal(lam.len(), rng);
    SymmetricMatrix::diagonal(lam).congruence(&q.transpose())
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All permutations of `0..n` in lexicographic order, identity first.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullWeight {
    pub source: Source,
    #[serde(serialize_with = "one_based")]
    pub permutation: Vec<usize>,
    pub weight: f64,
}

fn one_based<S: Serializer>(p: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    p.iter().map(|x| x + 1).collect::<Vec<_>>().serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullCertificate {
    pub feasible: bool,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// Convex weights reproducing `w`; empty when infeasible.
    pub weights: Vec<HullWeight>,
    /// `max_i |Σ weights·vertex − w|_i`.
    pub residual: f64,
}

/// Is `λ((A+B)/2)` a convex combination of permutations of `λ(A)` and `λ(B)`?
pub fn midpoint_hull_check(a: &SymmetricMatrix<f64>, b: &SymmetricMatrix<f64>) -> Result<HullCertificate> {
    let n = a.dim();
    if b.dim() != n {
        return arg(format!("matrix sizes differ: {n} and {}", b.dim()));
    }
    if n == 0 || n > MAX_HULL_DIM {
        return arg(format!("hull check needs 1 <= n <= {MAX_HULL_DIM}, got {n}"));
    }
    let u = a.eigenvalues()?;
    let v = b.eigenvalues()?;
    let mid = &(a + b) * 0.5;
    let w = mid.eigenvalues()?;

    let perms = permutations(n);
    let mut vertices: Vec<(Source, &Vec<usize>, Vec<f64>)> = Vec::with_capacity(2 * perms.len());
    for (src, base) in [(Source::U, &u), (Source::V, &v)] {
        for p in &perms {
            vertices.push((src, p, p.iter().map(|&j| base[j]).collect()));
        }
    }
    let scale = u.iter().chain(&v).chain(&w).fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale;

    // a single vertex already equal to w
    let direct = vertices
        .iter()
        .position(|(_, _, x)| x.iter().zip(&w).all(|(p, q)| (p - q).abs() <= tol));
    let lambda = match direct {
        Some(k) => {
            let mut l = vec![0.0; vertices.len()];
            l[k] = 1.0;
            Some(l)
        }
        None => {
            // rows: Σ λ_k x_k = w, Σ λ_k = 1
            let mut rows: Vec<Vec<f64>> = (0..n)
                .map(|i| vertices.iter().map(|(_, _, x)| x[i] / scale).collect())
                .collect();
            rows.push(vec![1.0; vertices.len()]);
            let mut rhs: Vec<f64> = w.iter().map(|x| x / scale).collect();
            rhs.push(1.0);
            phase_one(&rows, &rhs, 1e-11)?
        }
    };
    let Some(lambda) = lambda else {
        return Ok(HullCertificate {
            feasible: false,
            u,
            v,
            w,
            weights: Vec::new(),
            residual: f64::INFINITY,
        });
    };
    let mut combo = vec![0.0; n];
    let mut weights = Vec::new();
    for (l, (src, p, x)) in lambda.iter().zip(&vertices) {
        if *l > 0.0 {
            for (c, xi) in combo.iter_mut().zip(x) {
                *c += l * xi;
            }
            weights.push(HullWeight {
                source: *src,
                permutation: (*p).clone(),
                weight: *l,
            });
        }
    }
    let residual = combo.iter().zip(&w).map(|(c, x)| (c - x).abs()).fold(0.0, f64::max);
    Ok(HullCertificate {
        feasible: residual <= 1e-8 * scale,
        u,
        v,
        w,
        weights,
        residual,
    })
}

/// Phase-I simplex with Bland's rule for `{x ≥ 0 : Ax = b}`.
/// `Ok(None)` means infeasible; a stalled pivot sequence is a numeric error.
fn phase_one(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<Option<Vec<f64>>> {
    let m = a.len();
    let nv = a[0].len();
    let width = nv + m + 1;
    // tableau rows with artificials; b made nonnegative
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width];
        for j in 0..nv {
            row[j] = sign * a[i][j];
        }
        row[nv + i] = 1.0;
        row[width - 1] = sign * b[i];
        t.push(row);
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();
    // reduced costs for min Σ artificials
    let mut cost = vec![0.0; width];
    for row in &t {
        for j in 0..nv {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }
    let max_iter = 50 * (nv + m);
    for _ in 0..max_iter {
        let Some(enter) = (0..nv + m).find(|&j| cost[j] < -tol) else {
            let objective = -cost[width - 1];
            if objective > 1e3 * tol {
                return Ok(None);
            }
            let mut x = vec![0.0; nv];
            for (i, &bi) in basis.iter().enumerate() {
                if bi < nv {
                    x[bi] = t[i][width - 1].max(0.0);
                }
            }
            return Ok(Some(x));
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > tol {
                let ratio = t[i][width - 1] / t[i][enter];
                let better = ratio < best - 1e-15
                    || ((ratio - best).abs() <= 1e-15 && leave.map_or(true, |l| basis[i] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::Numeric("phase-one problem is unbounded".into()));
        };
        let piv = t[r][enter];
        for x in t[r].iter_mut() {
            *x /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[enter] != 0.0 {
                let f = row[enter];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        let f = cost[enter];
        for (x, p) in cost.iter_mut().zip(&pivot_row) {
            *x -= f * p;
        }
        basis[r] = enter;
    }
    Err(Error::Numeric("simplex iteration limit reached".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<Vec<f64>>) -> DoublyStochasticMatrix {
        DoublyStochasticMatrix::new(rows).unwrap()
    }

    #[test]
    fn identity_decomposes_to_itself() {
        let s = ds(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let d = bvn_decompose(&s).unwrap();
        assert_eq!(d.items, vec![WeightedPermutation { weight: 1.0, perm: vec![0, 1, 2] }]);
    }

    #[test]
    fn half_identity_half_shift() {
        let s = ds(vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]]);
        let d = bvn_decompose(&s).unwrap();
        assert_eq!(d.len(), 2);
        for it in &d.items {
            assert!((it.weight - 0.5).abs() < 1e-15);
        }
        assert!(d.reconstruction_error(&s) < 1e-15);
    }

    #[test]
    fn random_squared_orthogonal_reconstructs() {
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let s = squared_orthogonal(&random_orthogonal(4, &mut rng)).unwrap();
            let d = bvn_decompose(&s).unwrap();
            assert!(d.reconstruction_error(&s) < 1e-10);
            assert!(d.len() <= 10);
            assert!((d.weight_sum() - 1.0).abs() < 1e-10);
            assert!(d.items.iter().all(|it| it.weight > 0.0));
        }
    }

    #[test]
    fn constructor_policy() {
        assert!(DoublyStochasticMatrix::new(vec![vec![1.0, -1e-13], vec![0.0, 1.0]]).is_ok());
        assert!(DoublyStochasticMatrix::new(vec![vec![1.1, -0.1], vec![-0.1, 1.1]]).is_err());
        assert!(DoublyStochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.4, 0.5]]).is_err());
        assert!(DoublyStochasticMatrix::new(vec![vec![1.0]]).is_ok());
    }

    #[test]
    fn squared_rotation_and_householder() {
        let th: f64 = 0.3;
        let (c, s) = (th.cos(), th.sin());
        let p = Matrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        let q = squared_orthogonal(&p).unwrap();
        assert!((q.get(0, 0) - c * c).abs() < 1e-15 && (q.get(0, 1) - s * s).abs() < 1e-15);
        let h = householder(&[1.0, -2.0, 0.5, 3.0, 1.5]).unwrap();
        let q = squared_orthogonal(&h).unwrap();
        for i in 0..5 {
            let r: f64 = q.rows()[i].iter().sum();
            assert!((r - 1.0).abs() < 1e-12);
        }
        let bad = Matrix::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(squared_orthogonal(&bad), Err(Error::Argument(_))));
    }

    #[test]
    fn permutation_count_and_order() {
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], vec![0, 1, 2, 3]);
        assert_eq!(p[23], vec![3, 2, 1, 0]);
    }

    #[test]
    fn hull_trivial_cases() {
        let a = SymmetricMatrix::diagonal(&[1.0, 3.0, 2.0]);
        let c = midpoint_hull_check(&a, &a).unwrap();
        assert!(c.feasible);
        assert_eq!(c.weights.len(), 1);
        assert_eq!(c.weights[0].source, Source::U);
        assert_eq!(c.weights[0].permutation, vec![0, 1, 2]);
        assert_eq!(c.weights[0].weight, 1.0);

        let a = SymmetricMatrix::diagonal(&[1.0, 2.0]);
        let b = SymmetricMatrix::diagonal(&[2.0, 1.0]);
        let c = midpoint_hull_check(&a, &b).unwrap();
        assert!(c.feasible);
        assert_eq!(c.w, vec![1.5, 1.5]);
        assert!(c.residual < 1e-12);
    }

    #[test]
    fn infeasible_target_is_reported() {
        // w outside the permutohedron of (0, 1)
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let r = phase_one(&rows, &[2.0, -1.0, 1.0], 1e-11).unwrap();
        assert!(r.is_none());
        let r = phase_one(&rows, &[0.25, 0.75, 1.0], 1e-11).unwrap().unwrap();
        assert!((r[0] - 0.75).abs() < 1e-12 && (r[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn random_pairs_are_feasible() {
        let mut rng = seeded_rng(11);
        for n in 2..=5 {
            for _ in 0..20 {
                let a = random_symmetric_with_spectrum(&(0..n).map(|i| i as f64 - 1.3).collect::<Vec<_>>(), &mut rng);
                let b = random_symmetric_with_spectrum(&(0..n).map(|i| (i * i) as f64).collect::<Vec<_>>(), &mut rng);
                let c = midpoint_hull_check(&a, &b).unwrap();
                assert!(c.feasible, "residual {}", c.residual);
                let total: f64 = c.weights.iter().map(|w| w.weight).sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
}
