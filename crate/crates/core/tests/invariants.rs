use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sigmak::conformal::radial_eigenvalues;
use sigmak::greens::ExactFamily;
use sigmak::linalg::SymmetricMatrix;
use sigmak::matrixhull::{bvn_decompose, midpoint_hull_check, random_orthogonal, squared_orthogonal};
use sigmak::profile::{linear_grid, RadialProfile};
use sigmak::symfunc::{newton_tensor, sigma_upto};
use sigmak::tensorid::{divergence_residual, ScalarField};
use sigmak::volcomp::{inf_convolution, space_form_volume};
use sigmak::{Cone, DefiningFunction, Verdict};

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

fn symmetric(n: usize) -> impl Strategy<Value = SymmetricMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| {
        SymmetricMatrix::from_fn(n, |i, j| if i <= j { v[i * n + j] } else { v[j * n + i] })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_is_permutation_symmetric(lam in vector(6), shift in 1usize..6) {
        let mut rotated = lam.clone();
        rotated.rotate_left(shift);
        let a = sigma_upto(6, &lam);
        let b = sigma_upto(6, &rotated);
        for k in 0..=6 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-12 * (1.0 + a[k].abs()));
        }
    }

    #[test]
    fn sigma_is_homogeneous(lam in vector(5), t in 0.1..4.0f64) {
        let scaled: Vec<f64> = lam.iter().map(|x| t * x).collect();
        let a = sigma_upto(5, &lam);
        let b = sigma_upto(5, &scaled);
        for k in 0..=5 {
            let want = t.powi(k as i32) * a[k];
            prop_assert!((b[k] - want).abs() <= 1e-11 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn newton_tensor_trace(a in symmetric(4)) {
        let ev = a.eigenvalues().unwrap();
        let s = sigma_upto(4, &ev);
        for k in 0..4 {
            let t = newton_tensor(k, &a).unwrap();
            prop_assert!((t.trace() - (4 - k) as f64 * s[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn cone_membership_is_scale_invariant(lam in vector(5), t in 0.01..100.0f64, k in 1usize..=5) {
        let cone = Cone::gamma_k(5, k).unwrap();
        let scaled: Vec<f64> = lam.iter().map(|x| t * x).collect();
        if lam.iter().any(|x| *x != 0.0) {
            let a = cone.contains(&lam, 1e-9).unwrap().verdict;
            let b = cone.contains(&scaled, 1e-9).unwrap().verdict;
            // boundary verdicts may flip with rounding; strict ones may not
            if a != Verdict::Boundary && b != Verdict::Boundary {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn cones_are_nested(lam in vector(5), k in 2usize..=5) {
        let inner = Cone::gamma_k(5, k).unwrap().contains(&lam, 1e-12).unwrap();
        let outer = Cone::gamma_k(5, k - 1).unwrap().contains(&lam, 1e-12).unwrap();
        if inner.is_interior() {
            prop_assert!(outer.is_interior());
        }
    }

    #[test]
    fn defining_function_is_homogeneous(raw in prop::collection::vec(0.05..2.0f64, 5), t in 0.1..10.0f64) {
        let f = DefiningFunction::build(&Cone::gamma_k(5, 3).unwrap(), None).unwrap();
        let scaled: Vec<f64> = raw.iter().map(|x| t * x).collect();
        let a = f.value(&raw).unwrap();
        prop_assert!((f.value(&scaled).unwrap() - t * a).abs() <= 1e-10 * t * a);
    }

    #[test]
    fn degenerate_family_stays_on_the_boundary(r in 0.01..100.0f64, c1 in 0.1..10.0f64, c2 in 0.1..10.0f64) {
        let fam = ExactFamily::degenerate_for(6, 2, c1, c2).unwrap();
        let lam = radial_eigenvalues(6, &fam.jet(r).unwrap()).unwrap();
        let m = Cone::gamma_k(6, 2).unwrap().contains(lam.entries(), 1e-8).unwrap();
        prop_assert_eq!(m.verdict, Verdict::Boundary);
    }

    #[test]
    fn bvn_reconstructs(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = squared_orthogonal(&random_orthogonal(n, &mut rng)).unwrap();
        let d = bvn_decompose(&s).unwrap();
        prop_assert!(d.reconstruction_error(&s) < 1e-10);
        prop_assert!((d.weight_sum() - 1.0).abs() < 1e-12);
        prop_assert!(d.len() <= (n - 1) * (n - 1) + 1);
    }

    #[test]
    fn midpoint_lies_in_the_hull(a in symmetric(3), b in symmetric(3)) {
        let c = midpoint_hull_check(&a, &b).unwrap();
        prop_assert!(c.feasible);
        prop_assert!(c.residual < 1e-9);
        let total: f64 = c.weights.iter().map(|w| w.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inf_convolution_lies_below(vals in prop::collection::vec(-2.0..2.0f64, 41), eps in 0.01..1.0f64) {
        let f = RadialProfile::new(linear_grid(-1.0, 1.0, 41).unwrap(), vals).unwrap();
        let g = inf_convolution(&f, eps).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn space_form_volume_grows_with_radius(n in 2usize..=6, kcurv in -1.0..1.0f64, r in 0.1..1.4f64) {
        let a = space_form_volume(n, kcurv, r).unwrap();
        let b = space_form_volume(n, kcurv, r * 1.1).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn divergence_residual_is_symmetric_under_reflection(x0 in -0.5..0.5f64, x1 in -0.5..0.5f64, x2 in -0.5..0.5f64) {
        // the Gaussian field is even, so T_k is reflection-equivariant and the
        // residual at −x is the negated residual at x
        let field = ScalarField::gaussian(3).unwrap();
        let x = [x0, x1, x2];
        let y = [-x0, -x1, -x2];
        let a = divergence_residual(&field, 2, &x, 1e-2).unwrap();
        let b = divergence_residual(&field, 2, &y, 1e-2).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p + q).abs() < 1e-9);
        }
    }
}
