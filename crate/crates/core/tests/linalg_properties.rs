mod common;

use common::{from_nalgebra, random_psd, random_psd_with_spectrum, to_nalgebra};
use optfilter_core::example::{build_triple, ExampleModel, OutcomeRng, Truncation};
use optfilter_core::tolerances::{EIG_RECONSTRUCTION, LDL_REASSEMBLY, MOORE_PENROSE, PINV_INVOLUTION};
use optfilter_core::{ldl_reduce, mp_property_check, pinv, slow_series, symmetric_eig, Matrix, RankPolicy};
use proptest::prelude::*;

fn psd_strategy() -> impl Strategy<Value = Matrix> {
    (1usize..=32, any::<u64>(), 0.0f64..=1.0).prop_map(|(n, seed, rank_frac)| {
        let mut rng = OutcomeRng::new(seed);
        let rank = ((n as f64 * rank_frac).ceil() as usize).clamp(1, n);
        random_psd(&mut rng, n, rank)
    })
}

/// Spectrum bounded away from zero on the range, so `‖A^†‖` stays moderate
/// and the residual `A^†AA^† − A^†` is not dominated by conditioning.
fn conditioned_psd_strategy() -> impl Strategy<Value = Matrix> {
    (1usize..=32, any::<u64>(), 0.0f64..=1.0).prop_map(|(n, seed, rank_frac)| {
        let mut rng = OutcomeRng::new(seed);
        let rank = ((n as f64 * rank_frac).round() as usize).min(n);
        random_psd_with_spectrum(&mut rng, n, rank, 0.05, 20.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eig_reconstructs_and_is_orthonormal(a in psd_strategy()) {
        let s = symmetric_eig(&a).unwrap();
        let scale = s.lambda_max().max(1.0);
        let recon = s.reconstruct().sub(&a).unwrap().frobenius_norm();
        prop_assert!(recon <= EIG_RECONSTRUCTION * scale, "reconstruction {recon:e}");
        prop_assert!(s.orthogonality_residual() <= EIG_RECONSTRUCTION);
        let v = s.eigenvectors();
        let vvt = v.matmul(&v.transpose()).unwrap().sub(&Matrix::identity(a.rows())).unwrap();
        prop_assert!(vvt.frobenius_norm() <= EIG_RECONSTRUCTION);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_sign_convention(a in psd_strategy()) {
        let s = symmetric_eig(&a).unwrap();
        for j in 0..a.rows() {
            let v = s.eigenvector(j);
            let mut best = 0;
            for i in 0..v.len() {
                if v[i].abs() > v[best].abs() {
                    best = i;
                }
            }
            prop_assert!(v[best] > 0.0);
        }
    }

    #[test]
    fn pinv_satisfies_moore_penrose(a in conditioned_psd_strategy()) {
        let p = pinv(&a, RankPolicy::default()).unwrap();
        let r = mp_property_check(&a, p.dagger()).unwrap();
        let limit = MOORE_PENROSE * p.source().lambda_max().max(1.0);
        prop_assert!(r.max() <= limit, "{r:?} > {limit:e}");
        prop_assert!(p.dagger().asymmetry() == 0.0);
        let tau = p.tolerance();
        for (j, &l) in p.source().eigenvalues().iter().enumerate() {
            prop_assert_eq!(j < p.retained_rank(), l > tau);
        }
    }

    #[test]
    fn pinv_is_an_involution_on_full_rank(n in 1usize..=8, seed in any::<u64>()) {
        let mut rng = OutcomeRng::new(seed);
        // Diagonal shift keeps the condition number moderate.
        let a = random_psd(&mut rng, n, n).add(&Matrix::identity(n).scale(0.5)).unwrap();
        let once = pinv(&a, RankPolicy::default()).unwrap();
        let twice = pinv(once.dagger(), RankPolicy::default()).unwrap();
        prop_assert!(twice.dagger().sub(&a).unwrap().max_abs() <= PINV_INVOLUTION);
    }

    #[test]
    fn slow_series_bound_and_growth(raw in prop::collection::vec(1e-6f64..10.0, 1..60), tail in 0.0f64..1.0) {
        let mut lambdas = raw;
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let s = slow_series(&lambdas, tail).unwrap();
        prop_assert!(s.kappa_sum() <= s.bound);
        let growth = s.growth();
        for w in growth.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
    }
}

#[test]
fn pinv_matches_independent_svd_oracle() {
    let mut rng = OutcomeRng::new(7);
    for _ in 0..20 {
        let a = random_psd(&mut rng, 5, 5);
        let ours = pinv(&a, RankPolicy::default()).unwrap();
        let svd = to_nalgebra(&a).svd(true, true);
        let oracle = from_nalgebra(&svd.pseudo_inverse(ours.tolerance()).unwrap());
        let scale = oracle.max_abs().max(1.0);
        assert!(ours.dagger().sub(&oracle).unwrap().max_abs() <= 1e-9 * scale);
    }
}

#[test]
fn pinv_of_rank_deficient_matches_oracle_on_range() {
    let mut rng = OutcomeRng::new(8);
    let a = random_psd(&mut rng, 6, 3);
    let ours = pinv(&a, RankPolicy::default()).unwrap();
    assert_eq!(ours.retained_rank(), 3);
    let svd = to_nalgebra(&a).svd(true, true);
    let oracle = from_nalgebra(&svd.pseudo_inverse(1e-10).unwrap());
    assert!(ours.dagger().sub(&oracle).unwrap().max_abs() <= 1e-9 * oracle.max_abs().max(1.0));
}

#[test]
fn leading_truncation_dagger_shows_boundary_effect() {
    // Leading truncation to n odd coordinates: on the odd block
    // E_ff = (1/3) D⁻¹ T D⁻¹ with T = tridiag(1, 2, 1), D = diag(2k−1), and
    // T⁻¹_{kl} = (−1)^{k+l} min(k,l)(n+1−max(k,l))/(n+1). So the (1,1) entry
    // of the dagger is 3·n/(n+1), approaching the infinite value 3.
    for n in [4usize, 8, 16, 32] {
        let t = build_triple(&ExampleModel::new(n).with_truncation(Truncation::Leading));
        let d = pinv(t.e_ff(), RankPolicy::default()).unwrap();
        let expected = 3.0 * n as f64 / (n + 1) as f64;
        let got = d.dagger()[(0, 0)];
        assert!((got - expected).abs() <= 1e-9 * expected, "n={n}: {got} vs {expected}");
        let deviation = (3.0 - got) / 3.0;
        assert!((deviation - 1.0 / (n + 1) as f64).abs() < 1e-9);
    }
    // 16×16 truncation: 8 odd coordinates, entry 8/3 instead of 3.
    let t = build_triple(&ExampleModel::new(8).with_truncation(Truncation::Leading));
    let d = pinv(t.e_ff(), RankPolicy::default()).unwrap();
    assert!((d.dagger()[(0, 0)] - 8.0 / 3.0).abs() < 1e-12);
}

#[test]
fn ldl_reassembles_example_family() {
    for n_odd in 1..=32 {
        for truncation in [Truncation::Leading, Truncation::Proximate] {
            let t = build_triple(&ExampleModel::new(n_odd).with_truncation(truncation));
            let r = ldl_reduce(t.e_ff()).unwrap();
            let err = r.reassemble().sub(t.e_ff()).unwrap().max_abs();
            assert!(err <= LDL_REASSEMBLY, "n_odd={n_odd}: {err:e}");
            assert!(r.diag().iter().all(|d| *d >= -1e-12));
        }
    }
}

#[test]
fn ldl_first_multiplier_on_example() {
    let t = build_triple(&ExampleModel::new(5).with_truncation(Truncation::Leading));
    let r = ldl_reduce(t.e_ff()).unwrap();
    let c31 = r.multipliers()[0];
    assert!((c31 * c31 - 1.0 / 54.0).abs() < 1e-15);
    assert!(c31 > 0.0);
}

#[test]
fn slow_series_on_example_diagonal() {
    let n = 2000;
    let lambdas: Vec<f64> = (1..=n).map(|k| 2.0 / (3.0 * ((2 * k - 1) as f64).powi(2))).collect();
    let prefix: f64 = lambdas.iter().rev().sum();
    let rho1 = std::f64::consts::PI.powi(2) / 12.0;
    let s = slow_series(&lambdas, rho1 - prefix).unwrap();
    assert!((s.bound - std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-12);
    assert!(s.kappa_sum() <= s.bound);
    assert!(s.growth().windows(2).all(|w| w[1] > w[0]));
}
