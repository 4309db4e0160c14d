//! Cross-checks between the two independent root paths and the solver
//! invariants that only make sense over many random instances.

use proptest::prelude::*;
use zerodist::ensemble::make_distribution;
use zerodist::num::Cplx;
use zerodist::rng::{tag, Stream};
use zerodist::roots::{matched_distance, roots, roots_companion, vieta_check};

type C = Cplx<f64>;

fn gaussian_coeffs(seed: u64, degree: usize) -> Vec<C> {
    let dist = make_distribution::<f64>("gaussian", None).unwrap();
    let stream = Stream::new(seed).derive(tag::COEFFICIENTS);
    (0..=degree)
        .map(|j| {
            let (l, a) = dist.sample_log(&stream, j as u64);
            C::from_polar(l.exp(), a)
        })
        .collect()
}

#[test]
fn oracle_agreement_gaussian_degree_30() {
    for seed in 0..100u64 {
        let zeta = gaussian_coeffs(seed, 30);
        let primary = roots(&zeta).unwrap().roots;
        let oracle = roots_companion(&zeta).unwrap();
        let d = matched_distance(&primary, &oracle);
        assert!(d < 1e-6, "seed {seed}: matched distance {d:e}");
    }
}

#[test]
fn oracle_agreement_500_seeds_varied_degree() {
    for seed in 0..500u64 {
        let degree = 2 + (seed as usize * 7) % 39;
        let zeta = gaussian_coeffs(seed.wrapping_mul(0x9E37_79B9), degree);
        let primary = roots(&zeta).unwrap().roots;
        let oracle = roots_companion(&zeta).unwrap();
        let d = matched_distance(&primary, &oracle);
        assert!(d < 1e-6, "seed {seed} degree {degree}: matched distance {d:e}");
    }
}

#[test]
fn residual_invariant_on_random_instances() {
    for seed in 200..260u64 {
        let zeta = gaussian_coeffs(seed, 24);
        let res = roots(&zeta).unwrap();
        assert!(
            res.diagnostics.max_residual <= 1e-8,
            "seed {seed}: max backward error {:e}",
            res.diagnostics.max_residual
        );
        assert!(!vieta_check(&zeta, &res.roots).flagged, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Roots are invariant under coefficient scaling across the full
    // representable range, and real coefficients force conjugate closure.
    #[test]
    fn scaling_and_conjugacy(
        raw in prop::collection::vec(-10.0f64..10.0, 4..12),
        scale_pow in -200i32..=200,
    ) {
        prop_assume!(raw.last().map(|x| x.abs() > 1e-3) == Some(true));
        let zeta: Vec<C> = raw.iter().map(|&x| C::new(x, 0.0)).collect();
        let reference = roots(&zeta).unwrap().roots;

        let c = 10f64.powi(scale_pow);
        let scaled: Vec<C> = zeta.iter().map(|z| z * c).collect();
        let got = roots(&scaled).unwrap().roots;
        prop_assert!(matched_distance(&got, &reference) < 1e-10);

        let conj: Vec<C> = reference.iter().map(|z| z.conj()).collect();
        prop_assert!(matched_distance(&reference, &conj) < 1e-10);
    }
}
