//! Cross-module invariants: identities that tie the discrepancy backends,
//! the certificates, and the space constants together.

use cursekit_core::discrepancy::{
    discrepancy, qmc_worst_case_error, BackendChoice, DiscrepancyKind, DiscrepancySettings, Family,
};
use cursekit_core::fooling::{certify_thm1, certify_thm3, closed_form_thm1};
use cursekit_core::numerics::QuadSettings;
use cursekit_core::points::{anchor_transform, generate, GeneratorKind, PointSet, SplitMix64};
use cursekit_core::positive::{dp_plus_constants, positive_rule_bound};
use cursekit_core::spaces::{initial_error, worst_case_function, Exponent, SpaceSpec};

use proptest::prelude::*;

fn st() -> DiscrepancySettings {
    DiscrepancySettings::default()
}

/// The equal-weight rule's worst-case error equals both the anchored
/// discrepancy of the transformed set and the quadrant discrepancy of the
/// set itself, so the two must agree for every set, anchor, and exponent.
#[test]
fn anchored_of_transformed_equals_quadrant_of_original() {
    let mut rng = SplitMix64::new(404);
    for _ in 0..20 {
        let d = 1 + (rng.next_u64() % 3) as usize;
        let n = (rng.next_u64() % 10) as usize;
        let a = 0.2 + 0.6 * rng.next_f64();
        let p = [1.0, 2.0, 2.7][(rng.next_u64() % 3) as usize];
        let coords: Vec<f64> = (0..d * n).map(|_| rng.next_f64()).collect();
        let ps = PointSet::new(d, coords, None).unwrap();
        let transformed = anchor_transform(&ps, a).unwrap();
        let anchored = DiscrepancyKind::new(Family::Anchored, false, p, a).unwrap();
        let quadrant = DiscrepancyKind::new(Family::Quadrant, false, p, a).unwrap();
        let va = discrepancy(&anchored, &transformed, &BackendChoice::BoxExact, &st())
            .unwrap()
            .value;
        let vq = discrepancy(&quadrant, &ps, &BackendChoice::BoxExact, &st())
            .unwrap()
            .value;
        assert!(
            (va - vq).abs() < 1e-9,
            "d={d} n={n} a={a} p={p}: anchored {va} vs quadrant {vq}"
        );
    }
}

/// Certificates from every route stay below the error of one concrete rule.
#[test]
fn all_bounds_sandwiched_by_equal_weight_rule() {
    let s = QuadSettings::default();
    let spec = SpaceSpec::no_anchor_sobolev(2.0, 0.5).unwrap();
    let dec = worst_case_function(&spec, &s).unwrap();
    let consts = dp_plus_constants(&dec, &s).unwrap();
    let mut rng = SplitMix64::new(808);
    for _ in 0..15 {
        let d = 1 + (rng.next_u64() % 3) as usize;
        let n = (rng.next_u64() % 9) as usize;
        let coords: Vec<f64> = (0..d * n).map(|_| rng.next_f64()).collect();
        let ps = PointSet::new(d, coords, None).unwrap();
        let qmc = qmc_worst_case_error(
            &spec,
            Family::Anchored,
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        let thm3 = certify_thm3(&dec, &ps).unwrap().bound_absolute;
        assert!(thm3 <= qmc + 1e-8, "thm3 {thm3} vs rule error {qmc}");
        // The positive-rule bound holds for the equal-weight rule too.
        let thm5 = positive_rule_bound(&consts, n as u64, d as u32)
            .unwrap()
            .bound_absolute;
        assert!(thm5 <= qmc + 1e-8, "thm5 {thm5} vs rule error {qmc}");
    }
}

/// Empty-set discrepancies agree with the tensorized initial error for all
/// three built-in generators' dimensions.
#[test]
fn initial_error_ties_spaces_to_discrepancy() {
    let s = QuadSettings::default();
    for d in 1..=4u32 {
        for (q, a) in [(2.0, 0.5), (1.5, 0.3)] {
            let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(q), a).unwrap();
            let e0 = initial_error(&spec, d, &s).unwrap();
            let kind = DiscrepancyKind::new(Family::Anchored, false, spec.p(), a).unwrap();
            let v = discrepancy(
                &kind,
                &PointSet::empty(d as usize),
                &BackendChoice::BoxExact,
                &st(),
            )
            .unwrap()
            .value;
            assert!((v - e0).abs() < 1e-12, "d={d} q={q} a={a}");
        }
    }
}

/// Structured low-discrepancy constructions certify lower bounds consistent
/// with their measured discrepancy.
#[test]
fn generated_sets_sandwich_consistently() {
    let s = QuadSettings::default();
    let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap();
    let dec = worst_case_function(&spec, &s).unwrap();
    for kind in [
        GeneratorKind::Grid,
        GeneratorKind::VdcProduct,
        GeneratorKind::Rank1Lattice,
    ] {
        let ps = generate(kind, 2, 16, 0).unwrap();
        let cert = certify_thm1(&dec, &ps).unwrap();
        let qmc = qmc_worst_case_error(
            &spec,
            Family::Anchored,
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap();
        assert!(cert.bound_absolute <= qmc.value + 1e-10, "{kind:?}");
        let closed = closed_form_thm1(0.5, 16, 2).unwrap();
        assert!(closed <= cert.bound_normalized + 1e-12, "{kind:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The involution property of the anchor transform on arbitrary cube
    /// points (up to one rounding step of the modular arithmetic).
    #[test]
    fn anchor_transform_involution(
        xs in prop::collection::vec(0.0f64..1.0, 1..24),
        a in 0.05f64..0.95,
    ) {
        let ps = PointSet::new(1, xs.clone(), None).unwrap();
        let twice = anchor_transform(&anchor_transform(&ps, a).unwrap(), a).unwrap();
        for (k, &x) in xs.iter().enumerate() {
            prop_assert!((twice.node(k)[0] - x).abs() <= 1e-15);
        }
    }

    /// Adding a node never increases the decomposable certificate.
    #[test]
    fn certificate_monotone_in_nodes(
        coords in prop::collection::vec(0.0f64..1.0, 2..40),
        extra in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let s = QuadSettings::default();
        let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap();
        let dec = worst_case_function(&spec, &s).unwrap();
        let n_pairs = coords.len() / 2;
        let base: Vec<f64> = coords[..n_pairs * 2].to_vec();
        let ps = PointSet::new(2, base.clone(), None).unwrap();
        let mut grown = base;
        grown.extend_from_slice(&extra);
        let ps2 = PointSet::new(2, grown, None).unwrap();
        let c1 = certify_thm1(&dec, &ps).unwrap().bound_normalized;
        let c2 = certify_thm1(&dec, &ps2).unwrap().bound_normalized;
        prop_assert!(c2 <= c1 + 1e-12);
    }

    /// Discrepancy values are nonnegative and permutation-invariant.
    #[test]
    fn discrepancy_nonnegative_and_symmetric(
        coords in prop::collection::vec(0.0f64..1.0, 0..30),
        a in 0.1f64..0.9,
    ) {
        let n = coords.len() / 2;
        let ps = PointSet::new(2, coords[..n * 2].to_vec(), None).unwrap();
        let swapped: Vec<f64> = ps
            .iter_nodes()
            .flat_map(|node| [node[1], node[0]])
            .collect();
        let ps_swapped = PointSet::new(2, swapped, None).unwrap();
        for family in [Family::Anchored, Family::Quadrant] {
            let kind = DiscrepancyKind::new(family, false, 2.0, a).unwrap();
            let v = discrepancy(&kind, &ps, &BackendChoice::ClosedFormP2, &st())
                .unwrap()
                .value;
            let w = discrepancy(&kind, &ps_swapped, &BackendChoice::ClosedFormP2, &st())
                .unwrap()
                .value;
            prop_assert!(v >= 0.0);
            prop_assert!((v - w).abs() < 1e-12);
        }
    }
}
