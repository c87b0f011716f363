use proptest::prelude::*;
use spinboson_core::fock::{
    annihilation, creation, displacement, multimode_displacement, number, parity, phase_operator, restrict,
};
use spinboson_core::linalg::{identity, kron, unitarity_error};
use spinboson_core::{FockSpace, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn vacuum_amplitude_converges_to_gaussian() {
    let f = c(0.3, 0.0);
    let analytic = (-f.norm_sqr() / 2.0).exp();
    let mut previous: Option<C64> = None;
    for d in [30, 60] {
        let space = FockSpace::single(d).unwrap();
        let amp = displacement(&space, 0, f).unwrap()[(0, 0)];
        assert!((amp - c(analytic, 0.0)).norm() < 1e-10, "d={d}: {amp}");
        if let Some(prev) = previous {
            assert!((amp - prev).norm() < 1e-12);
        }
        previous = Some(amp);
    }
}

#[test]
fn displacement_has_exact_inverse_at_d30() {
    let space = FockSpace::single(30).unwrap();
    let d = displacement(&space, 0, c(0.3, 0.0)).unwrap();
    let dm = displacement(&space, 0, c(-0.3, 0.0)).unwrap();
    assert!((&d * &dm - identity(30)).norm() < 1e-12);
}

#[test]
fn multimode_displacement_collapses_to_single_mode() {
    let space = FockSpace::single(12).unwrap();
    let f = c(0.25, -0.4);
    assert_eq!(
        multimode_displacement(&space, &[f]).unwrap(),
        displacement(&space, 0, f).unwrap()
    );
}

#[test]
fn multimode_displacement_factorizes_over_modes() {
    let (f0, f1) = (c(0.2, 0.0), c(0.0, 0.1));
    let single = FockSpace::single(8).unwrap();
    let expected = kron(
        &displacement(&single, 0, f0).unwrap(),
        &displacement(&single, 0, f1).unwrap(),
    );
    let space = FockSpace::new(vec![8, 8]).unwrap();
    let d = multimode_displacement(&space, &[f0, f1]).unwrap();
    assert!((&d - expected).norm() < 1e-10);
    assert!(unitarity_error(&d) < 1e-10);
}

#[test]
fn phase_conjugation_rotates_displacement() {
    let space = FockSpace::single(30).unwrap();
    let (phi, f) = (1.1, c(0.3, 0.0));
    let lhs = phase_operator(&space, 0, phi).unwrap()
        * displacement(&space, 0, f).unwrap()
        * phase_operator(&space, 0, -phi).unwrap();
    let rhs = displacement(&space, 0, f * C64::from_polar(1.0, phi)).unwrap();
    assert!((lhs - rhs).norm() < 1e-10);
}

#[test]
fn phase_operators_compose_exactly() {
    let space = FockSpace::single(9).unwrap();
    let (phi, psi) = (0.75, 2.0);
    let product = phase_operator(&space, 0, phi).unwrap() * phase_operator(&space, 0, psi).unwrap();
    let direct = phase_operator(&space, 0, phi + psi).unwrap();
    // Products of unit phases agree with the phase of the sum to rounding.
    assert!((product - direct).norm() < 1e-14);
}

#[test]
fn parity_is_tensor_product_of_mode_parities() {
    let space = FockSpace::new(vec![3, 4, 2]).unwrap();
    let mut expected = identity(1);
    for &d in space.cutoffs() {
        let single = FockSpace::single(d).unwrap();
        expected = kron(&expected, &phase_operator(&single, 0, std::f64::consts::PI).unwrap());
    }
    assert_eq!(parity(&space), expected);
}

#[test]
fn parity_conjugation_negates_displacement_exactly() {
    let space = FockSpace::single(30).unwrap();
    let p = parity(&space);
    for f in [c(0.3, 0.0), c(-0.2, 0.45), c(0.9, -1.3)] {
        let d = displacement(&space, 0, f).unwrap();
        assert_eq!(&p * d * &p, displacement(&space, 0, -f).unwrap());
    }
}

/// Error of the composition law on the leading half-block of levels; the
/// top-level corner of the truncated matrix is dominated by truncation.
fn composition_error(d: usize, f: C64, g: C64) -> (f64, f64) {
    let space = FockSpace::single(d).unwrap();
    let lhs = displacement(&space, 0, f).unwrap() * displacement(&space, 0, g).unwrap();
    let phase = C64::from_polar(1.0, (f * g.conj()).im);
    let rhs = displacement(&space, 0, f + g).unwrap() * phase;
    let diff = lhs - rhs;
    (restrict(&diff, &space.leading_block()).norm(), diff.norm())
}

#[test]
fn displacement_composition_law_within_truncation() {
    let grid = [-0.5, -0.2, 0.0, 0.3, 0.5];
    let mut worst_block = 0.0f64;
    let mut worst_full = 0.0f64;
    for &fr in &grid {
        for &gi in &grid {
            for (f, g) in [(c(fr, 0.0), c(0.0, gi)), (c(fr, gi) * 0.7, c(gi, -fr) * 0.7)] {
                let (block, full) = composition_error(30, f, g);
                worst_block = worst_block.max(block);
                worst_full = worst_full.max(full);
            }
        }
    }
    assert!(worst_block <= 1e-8, "leading-block error {worst_block:e}");
    // The full-matrix error is O(1): documents why the comparison is restricted.
    assert!(worst_full > 1e-3, "full-matrix error {worst_full:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn truncated_commutator_is_exact(cutoffs in proptest::collection::vec(2usize..6, 1..4), mode_seed in 0usize..8) {
        let space = FockSpace::new(cutoffs.clone()).unwrap();
        let mode = mode_seed % cutoffs.len();
        let a = annihilation(&space, mode).unwrap();
        let ad = creation(&space, mode).unwrap();
        let comm = &a * &ad - &ad * &a;
        let d = cutoffs[mode];
        for i in 0..space.dim() {
            let expected = if space.level(i, mode) == d - 1 { 1.0 - d as f64 } else { 1.0 };
            // (√n)² differs from n by at most a few ulps.
            prop_assert!((comm[(i, i)] - c(expected, 0.0)).norm() <= 1e-14 * d as f64);
        }
        let off: f64 = (0..space.dim())
            .flat_map(|r| (0..space.dim()).map(move |col| (r, col)))
            .filter(|(r, col)| r != col)
            .map(|(r, col)| comm[(r, col)].norm())
            .sum();
        prop_assert_eq!(off, 0.0);
    }

    #[test]
    fn number_equals_adag_a(cutoffs in proptest::collection::vec(2usize..6, 1..3)) {
        let space = FockSpace::new(cutoffs.clone()).unwrap();
        for mode in 0..cutoffs.len() {
            let a = annihilation(&space, mode).unwrap();
            prop_assert!((a.adjoint() * a - number(&space, mode).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn parity_conjugation_exact_for_random_amplitudes(
        re in -1.5f64..1.5, im in -1.5f64..1.5, d in 4usize..24
    ) {
        let space = FockSpace::single(d).unwrap();
        let p = parity(&space);
        let f = c(re, im);
        let d_f = displacement(&space, 0, f).unwrap();
        prop_assert_eq!(&p * &p, identity(d));
        prop_assert_eq!(&p * d_f * &p, displacement(&space, 0, -f).unwrap());
    }

    #[test]
    fn displacements_are_unitary(re in -1.0f64..1.0, im in -1.0f64..1.0, d in 4usize..32) {
        let space = FockSpace::single(d).unwrap();
        prop_assert!(unitarity_error(&displacement(&space, 0, c(re, im)).unwrap()) < 1e-12);
    }
}
