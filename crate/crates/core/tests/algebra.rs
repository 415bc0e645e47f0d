use g2flow::forms7::basis::{self, Blade};
use g2flow::forms7::{metric_from_phi, phi0, PhiConvention, PointForm};
use g2flow::g2_product::{pointwise_star_residual, AnsatzFields, AnsatzMode, FormField};
use g2flow::linalg::SmallMat;
use g2flow::torus_cy::{FourierMode, PotentialField, Spectral, TorusGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd(dim: usize, seed: &[f64]) -> SmallMat<f64> {
    let a = SmallMat::from_fn(dim, |i, j| seed[(i * dim + j) % seed.len()] * 0.4);
    a.transpose().mul(&a).add(&SmallMat::identity(dim))
}

/// Hodge star through an orthonormal coframe `θ = Lᵀ dx`, `g = L Lᵀ`.
fn star_oracle(alpha: &PointForm<f64>, g: &SmallMat<f64>) -> PointForm<f64> {
    let dim = g.dim();
    let l = g.cholesky().unwrap();
    let lt_inv = l.transpose().inverse().unwrap();
    let a = alpha.pullback(&lt_inv);
    let full = basis::top(dim);
    let mut b = PointForm::zero(dim, dim - alpha.degree());
    for &bl in alpha.blades() {
        let c = a.get_blade(bl);
        let comp: Blade = full & !bl;
        b.set_blade(comp, c * basis::wedge_sign(bl, comp) as f64);
    }
    b.pullback(&l.transpose())
}

fn form_strategy(dim: usize, k: usize) -> impl Strategy<Value = PointForm<f64>> {
    prop::collection::vec(-1.0..1.0f64, basis::count(dim, k)).prop_map(move |c| PointForm::from_coeffs(dim, k, &c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_matches_orthonormal_frame_oracle(
        (k, alpha) in (0usize..=7).prop_flat_map(|k| (Just(k), form_strategy(7, k))),
        seed in prop::collection::vec(-1.0..1.0f64, 49),
    ) {
        let g = spd(7, &seed);
        let ginv = g.inverse().unwrap();
        let fast = alpha.hodge_star_with(&g, &ginv, g.det().sqrt());
        let slow = star_oracle(&alpha, &g);
        prop_assert!((fast - slow).max_abs() < 1e-10, "degree {k}");
    }

    #[test]
    fn star_squared_is_identity_in_dimension_seven(
        (_k, alpha) in (0usize..=7).prop_flat_map(|k| (Just(k), form_strategy(7, k))),
        seed in prop::collection::vec(-1.0..1.0f64, 49),
    ) {
        let g = spd(7, &seed);
        let ginv = g.inverse().unwrap();
        let vol = g.det().sqrt();
        let twice = alpha.hodge_star_with(&g, &ginv, vol).hodge_star_with(&g, &ginv, vol);
        prop_assert!((twice - alpha).max_abs() < 1e-10);
    }

    #[test]
    fn pullback_is_a_wedge_homomorphism(
        a in form_strategy(6, 2),
        b in form_strategy(6, 3),
        seed in prop::collection::vec(-1.0..1.0f64, 36),
    ) {
        let m = SmallMat::from_fn(6, |i, j| seed[i * 6 + j]);
        let lhs = a.wedge(&b).pullback(&m);
        let rhs = a.pullback(&m).wedge(&b.pullback(&m));
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    #[test]
    fn d_squared_vanishes(k in 0usize..=5, coeffs in prop::collection::vec(-1.0..1.0f64, 16)) {
        let grid = TorusGrid::new(2, 6);
        let sp = Spectral::<f64>::new(grid);
        let mut f = FormField::<f64>::zero(grid, 3, k);
        for (j, &b) in basis::blades(7, k).iter().enumerate() {
            let modes = vec![FourierMode { k: vec![1, (j % 3) as i64 - 1, 0, 1], amplitude: coeffs[j % 16], phase: coeffs[(j + 5) % 16] }];
            f.set_component(b, PotentialField::<f64>::from_modes(grid, &modes).values);
        }
        prop_assert!(f.d(&sp).d(&sp).max_abs() < 1e-10);
    }
}

#[test]
fn metric_of_standard_form_is_identity() {
    for conv in [PhiConvention::Flow, PhiConvention::Bryant] {
        let m = metric_from_phi(&phi0::<f64>(), conv).unwrap();
        assert!(m.g.sub(&SmallMat::identity(7)).max_abs() <= 1e-12);
    }
}

/// The product star tables against the pointwise star of the metric
/// induced by `φ`, on 50 random forms of every degree.
#[test]
fn product_star_tables_agree_with_pointwise_star() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, size) in [(2, 4), (3, 4)] {
        let grid = TorusGrid::new(n, size);
        let sp = Spectral::<f64>::new(grid);
        let mut k = vec![0; 2 * n];
        k[0] = 1;
        k[2] = 1;
        let w = PotentialField::<f64>::single_mode(grid, &k, 0.05).values;
        for mode in [AnsatzMode::Flow, AnsatzMode::Coflow] {
            let a = AnsatzFields::from_potential(&sp, &w, mode).unwrap();
            let star = a.star();
            let circles = if n == 2 { 3 } else { 1 };
            for degree in 0..=7 {
                let mut worst = 0.0f64;
                for _ in 0..50 {
                    let mut alpha = FormField::zero(grid, circles, degree);
                    for &b in basis::blades(7, degree) {
                        alpha.set_component(b, (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
                    }
                    worst = worst.max(pointwise_star_residual(&a, &star, &alpha));
                }
                assert!(worst <= 1e-9, "n={n} {mode} degree {degree}: {worst:e}");
            }
        }
    }
}

#[test]
fn single_precision_instantiation() {
    let a = g2flow::PointForm32::basis(7, &[0, 1]);
    let b = g2flow::PointForm32::basis(7, &[2, 3, 4]);
    assert_eq!(a.wedge(&b).get(&[0, 1, 2, 3, 4]), 1.0f32);
    let g = SmallMat::<f32>::identity(7);
    let s = a.hodge_star_with(&g, &g, 1.0);
    assert_eq!(s.get(&[2, 3, 4, 5, 6]), 1.0f32);
}
