//! Property tests for the measurement and objective invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use rwf_core::prelude::*;
use rwf_core::rng::Rng as CoreRng;

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im)),
        n,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_identity_gaussian(
        n in 1usize..32,
        m_factor in 1usize..4,
        seed in 0u64..1_000_000,
    ) {
        let m = n * m_factor;
        let e = gen_gaussian_ensemble(n, m, FieldKind::Complex, seed).unwrap();
        let mut rng = CoreRng::seed_from_u64(seed ^ 0xabcd);
        let z = Signal::random(n, FieldKind::Complex, &mut rng).unwrap();
        let c: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.next_normal(), rng.next_normal()))
            .collect();

        let lhs = inner(&e.forward(&z).unwrap(), &c);
        let rhs = inner(z.values(), &e.adjoint_accumulate(&c).unwrap());
        let scale = z.norm() * c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn adjoint_identity_cdp(
        log_n in 1u32..6,
        masks in 1usize..4,
        seed in 0u64..1_000_000,
    ) {
        let n = 1usize << log_n;
        let e = gen_cdp_ensemble(n, masks, seed).unwrap();
        let mut rng = CoreRng::seed_from_u64(seed ^ 0x1234);
        let z = Signal::random(n, FieldKind::Complex, &mut rng).unwrap();
        let c: Vec<Complex64> = (0..e.m())
            .map(|_| Complex64::new(rng.next_normal(), rng.next_normal()))
            .collect();

        let lhs = inner(&e.forward(&z).unwrap(), &c);
        let rhs = inner(z.values(), &e.adjoint_accumulate(&c).unwrap());
        let scale = z.norm() * c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn fft_parseval_and_round_trip(log_n in 0u32..10, seed in 0u64..1_000_000) {
        let n = 1usize << log_n;
        let mut rng = CoreRng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.next_normal(), rng.next_normal()))
            .collect();

        let out = fft(&v, Direction::Forward).unwrap();
        let energy_in: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let energy_out: f64 = out.iter().map(|x| x.norm_sqr()).sum();
        prop_assert!((energy_out - n as f64 * energy_in).abs() <= 1e-10 * (n as f64 * energy_in).max(1.0));

        let back = fft(&out, Direction::Inverse).unwrap();
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn weights_bounded_by_eta(values in complex_vec(6), seed in 0u64..1_000_000) {
        // With eta = 0.9 every weight lies in (0, 10/9]; equality only at
        // zero residual.
        let e = gen_gaussian_ensemble(6, 24, FieldKind::Complex, seed).unwrap();
        let mut rng = CoreRng::seed_from_u64(seed ^ 0x77);
        let x = Signal::random(6, FieldKind::Complex, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let z_prev = Signal::complex(values).unwrap();
        let w = compute_weights_uniform(&e, &y, &z_prev, 0.9).unwrap();
        for &omega in w.omegas() {
            prop_assert!(omega > 0.0);
            prop_assert!(omega <= 10.0 / 9.0 + 1e-15);
        }
    }

    #[test]
    fn weights_inside_region_e(seed in 0u64..1_000_000, scale in 0.0f64..0.002) {
        // Points inside E(z) have weights in [1, 10/9].
        let n = 8;
        let e = gen_gaussian_ensemble(n, 4 * n, FieldKind::Real, seed).unwrap();
        let mut rng = CoreRng::seed_from_u64(seed ^ 0x99);
        let x = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let h = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let z = x.axpy(Complex64::new(scale / h.norm(), 0.0), h.values()).unwrap();
        prop_assume!(in_region_e(&e, &y, &z).unwrap());
        let w = compute_weights_uniform(&e, &y, &z, 0.9).unwrap();
        for &omega in w.omegas() {
            prop_assert!((1.0..=10.0 / 9.0 + 1e-15).contains(&omega), "omega {omega}");
        }
    }

    #[test]
    fn dist_phase_invariance(values in complex_vec(5), theta in 0.0f64..6.283) {
        let z = Signal::complex(values.clone()).unwrap();
        let mut rng = CoreRng::seed_from_u64(42);
        let x = Signal::random(5, FieldKind::Complex, &mut rng).unwrap();
        let base = dist(&z, &x).unwrap();
        let rotated = z.scale(Complex64::from_polar(1.0, theta));
        let turned = dist(&rotated, &x).unwrap();
        prop_assert!((base - turned).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn objective_zero_iff_weighted_residuals_zero(values in complex_vec(4), seed in 0u64..1_000_000) {
        let e = gen_gaussian_ensemble(4, 12, FieldKind::Complex, seed).unwrap();
        let z = Signal::complex(values).unwrap();
        let y = e.intensities(&z, None).unwrap();
        let w = WeightVector::unit(12);
        // Exact data: objective is identically zero.
        prop_assert_eq!(objective_value(&e, &y, &w, &z).unwrap(), 0.0);
    }
}
