use augbound_core::assemble_bound_thm4;
use augbound_core::discrete::{
    kl_slices, mutual_information_as_expected_kl, mutual_information_exact, tv_slices, verify_reverse_pinsker,
    DiscreteDistribution,
};
use augbound_core::gaussian::{aug_mi_per_pair, kl_shift, orbit_mi_per_sample, GaussianSetting};
use augbound_core::geometry::{apply_affine, prop1_circle_check, TransformParams};
use augbound_core::linalg::Matrix;
use augbound_core::nn::{softmax_rows, Head, Network};
use augbound_core::stats::spearman;
use proptest::prelude::*;

fn weights(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len)
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn pair(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    k.prop_flat_map(|k| (weights(k..=k), weights(k..=k))).prop_map(|(a, b)| (normalized(&a), normalized(&b)))
}

proptest! {
    #[test]
    fn kl_and_tv_ranges_and_pinsker((p, q) in pair(2..=8)) {
        let kl = kl_slices(&p, &q).unwrap();
        let tv = tv_slices(&p, &q).unwrap();
        prop_assert!(kl >= -1e-15);
        prop_assert!((0.0..=1.0).contains(&tv));
        prop_assert!(2.0 * tv * tv <= kl + 1e-12);
        let rp = verify_reverse_pinsker(
            &DiscreteDistribution::new(p.clone()).unwrap(),
            &DiscreteDistribution::new(q.clone()).unwrap(),
        ).unwrap();
        prop_assert!(rp.corrected_holds);
    }

    #[test]
    fn mutual_information_two_ways(w in weights(12..=12)) {
        let p = normalized(&w);
        let joint = Matrix::from_vec(3, 4, p).unwrap();
        let a = mutual_information_exact(&joint).unwrap();
        let b = mutual_information_as_expected_kl(&joint).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() < 1e-12);
        // I(X;Y) ≤ min(H(X), H(Y)) ≤ log 3
        prop_assert!(a <= 3f64.ln() + 1e-12);
    }

    #[test]
    fn gaussian_information_nonnegative_and_linear_in_d(
        d in 1usize..5, m in 2usize..20, n in 2usize..10,
        s2 in 0.1f64..4.0, t2 in 0.0f64..8.0, nu2 in 0.001f64..1.0,
    ) {
        let one = GaussianSetting::new(1, m, n, s2, t2, nu2);
        let many = GaussianSetting::new(d, m, n, s2, t2, nu2);
        for f in [kl_shift, orbit_mi_per_sample, aug_mi_per_pair] {
            let a = f(&one).unwrap();
            let b = f(&many).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((b - d as f64 * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn gaussian_kl_grows_and_orbit_mi_shrinks_with_strength(
        m in 2usize..20, n in 1usize..10, s2 in 0.1f64..4.0, t2 in 0.01f64..8.0, dt in 0.01f64..4.0,
    ) {
        let lo = GaussianSetting::new(1, m, n, s2, t2, 0.01);
        let hi = GaussianSetting::new(1, m, n, s2, t2 + dt, 0.01);
        prop_assert!(kl_shift(&hi).unwrap() > kl_shift(&lo).unwrap());
        prop_assert!(orbit_mi_per_sample(&hi).unwrap() < orbit_mi_per_sample(&lo).unwrap());
    }

    #[test]
    fn bound_total_is_r_times_terms(
        r in 0.01f64..10.0, kl in 0.0f64..3.0,
        per in prop::collection::vec(0.0f64..2.0, 1..6), aug in 0.0f64..2.0, n in 1usize..5,
    ) {
        let pairs = vec![vec![aug; n]; per.len()];
        let b = assemble_bound_thm4(r, kl, &per, &pairs).unwrap();
        prop_assert!((b.total - r * (b.term1 + b.term2 + b.term3)).abs() <= 1e-12 * (1.0 + b.total));
        prop_assert_eq!(b.recompute_thm4().unwrap().total, b.total);
        let bigger = assemble_bound_thm4(r, kl + 0.1, &per, &pairs).unwrap();
        prop_assert!(bigger.total > b.total);
    }

    #[test]
    fn spearman_is_rank_invariant(xs in prop::collection::vec(-10.0f64..10.0, 3..20)) {
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x + 2.0 * x).collect();
        let rho = spearman(&xs, &ys);
        prop_assert!((rho - 1.0).abs() < 1e-12 || xs.windows(2).all(|w| w[0] == w[1]));
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        prop_assert!((spearman(&xs, &neg) + rho).abs() < 1e-12);
    }

    #[test]
    fn identity_warp_is_exact(pixels in prop::collection::vec(0.0f64..1.0, 36)) {
        prop_assert_eq!(apply_affine(&pixels, 6, 6, &TransformParams::IDENTITY).unwrap(), pixels);
    }

    #[test]
    fn integer_shift_moves_pixels(dx in -3i32..=3, dy in -3i32..=3, pixels in prop::collection::vec(0.0f64..1.0, 49)) {
        let params = TransformParams { angle_rad: 0.0, shift_x: dx as f64, shift_y: dy as f64 };
        let out = apply_affine(&pixels, 7, 7, &params).unwrap();
        for y in 0..7i32 {
            for x in 0..7i32 {
                let (sx, sy) = (x - dx, y - dy);
                let expected = if (0..7).contains(&sx) && (0..7).contains(&sy) { pixels[(sy * 7 + sx) as usize] } else { 0.0 };
                prop_assert!((out[(y * 7 + x) as usize] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circle_bound_holds(a in 0.0f64..0.99) {
        let c = prop1_circle_check(a, 512).unwrap();
        prop_assert!(c.holds);
        prop_assert!(c.kl <= a * std::f64::consts::PI / 2.0 + 1e-15);
    }

    #[test]
    fn softmax_rows_are_distributions(seed in 0u64..1000, rows in 1usize..6) {
        let net = Network::new(&[4, 5, 3], Head::Softmax, seed).unwrap();
        let x = Matrix::from_fn(rows, 4, |r, c| ((seed as usize + r * 4 + c) % 7) as f64 - 3.0);
        let probs = net.forward(&x).unwrap();
        for r in 0..rows {
            let row = probs.row(r);
            prop_assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let logits = Matrix::from_fn(rows, 3, |r, c| 500.0 * (r as f64 - c as f64));
        prop_assert!(softmax_rows(&logits).is_finite());
    }

    #[test]
    fn transposed_products_agree(seed in 0u64..1000) {
        let a = Matrix::from_fn(4, 3, |r, c| ((seed as usize * 31 + r * 3 + c) % 11) as f64 - 5.0);
        let b = Matrix::from_fn(4, 2, |r, c| ((seed as usize * 17 + r * 2 + c) % 13) as f64 - 6.0);
        prop_assert_eq!(a.t_matmul(&b).unwrap(), a.transpose().matmul(&b).unwrap());
        prop_assert_eq!(b.transpose().matmul_t(&a.transpose()).unwrap(), b.transpose().matmul(&a).unwrap());
    }
}
