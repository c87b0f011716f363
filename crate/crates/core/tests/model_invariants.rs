use spinboson_core::fock::{displacement, number, parity, restrict};
use spinboson_core::linalg::{identity, max_spectrum_gap, CMatrix, HermitianEigen};
use spinboson_core::model::{
    assemble_block, assemble_total, commutator, parity_constant_of_motion, rescale_reference, riccati_residual,
    sigma_y, similarity_transform, spectral_obstruction_check, total_parity,
};
use spinboson_core::sampling::{ParamSampler, SampleRanges};
use spinboson_core::{FockSpace, Mode, ModelParams, Norm, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Riccati residual evaluated entry by entry with explicit loops.
fn elementwise_riccati(x: &CMatrix, h_plus: &CMatrix, h_minus: &CMatrix, alpha: f64) -> CMatrix {
    let n = x.nrows();
    CMatrix::from_fn(n, n, |r, col| {
        let mut acc = if r == col { c(-alpha, 0.0) } else { c(0.0, 0.0) };
        for k in 0..n {
            acc += x[(r, k)] * x[(k, col)] * alpha;
            acc += x[(r, k)] * h_plus[(k, col)];
            acc -= h_minus[(r, k)] * x[(k, col)];
        }
        acc
    })
}

fn seeded_sets(seed: u64, beta: f64) -> Vec<ModelParams> {
    ParamSampler::new(seed, SampleRanges { beta, ..SampleRanges::default() })
        .mixed_sets(25, 12, 25, (4, 4))
        .unwrap()
}

#[test]
fn tensor_and_block_constructions_agree() {
    for p in seeded_sets(11, 0.0).iter().chain(&seeded_sets(12, 0.6)) {
        let tensor = assemble_total(p);
        let block = assemble_block(p).to_total();
        assert!((&tensor.entries - &block.entries).norm() <= 1e-14 * tensor.entries.norm());
        assert_eq!((&tensor.entries - tensor.entries.adjoint()).norm(), 0.0);
    }
}

#[test]
fn parity_solves_riccati_for_zero_beta() {
    for p in seeded_sets(21, 0.0) {
        let bh = assemble_block(&p);
        let pp = parity(p.space());
        assert_eq!(&pp * &bh.h_plus * &pp, bh.h_minus);
        let residual = riccati_residual(&pp, &bh, Norm::Frobenius).unwrap();
        assert!(residual <= 1e-12 * bh.h_plus.norm(), "residual {residual:e}");
    }
}

#[test]
fn broken_parity_residual_is_two_beta_parity() {
    let (beta, alpha) = (0.5, 1.0);
    let p = ModelParams::single_mode(alpha, beta, 1.0, c(0.4, 0.2), 10).unwrap();
    let bh = assemble_block(&p);
    let pp = parity(p.space());
    let oracle = elementwise_riccati(&pp, &bh.h_plus, &bh.h_minus, alpha);
    let expected_norm = 2.0 * beta * (10f64).sqrt();
    assert!((oracle.norm() - expected_norm).abs() < 1e-12);
    let residual = riccati_residual(&pp, &bh, Norm::Frobenius).unwrap();
    assert!((residual - oracle.norm()).abs() < 1e-12);
    assert!((oracle - &pp * c(2.0 * beta, 0.0)).norm() < 1e-12);
}

#[test]
fn parity_block_diagonalizes_hamiltonian() {
    for p in seeded_sets(31, 0.0) {
        let bh = assemble_block(&p);
        let pp = parity(p.space());
        let h_norm = bh.to_total().entries.norm();
        let st = similarity_transform(&bh, &pp, 1e-12).unwrap();
        let diag = &st.diagonalized;
        assert!(diag.block(0, 1).norm() <= 1e-12 * h_norm);
        assert!(diag.block(1, 0).norm() <= 1e-12 * h_norm);
        let alpha_p = &pp * c(p.alpha(), 0.0);
        assert!((diag.block(0, 0) - (&bh.h_plus + &alpha_p)).norm() <= 1e-12 * h_norm);
        assert!((diag.block(1, 1) - (&bh.h_minus - &alpha_p)).norm() <= 1e-12 * h_norm);
    }
}

#[test]
fn parity_transform_inverse_has_closed_form() {
    let p = ModelParams::single_mode(1.3, 0.0, 0.8, c(0.2, 0.5), 9).unwrap();
    let bh = assemble_block(&p);
    let pp = parity(p.space());
    let st = similarity_transform(&bh, &pp, 1e-12).unwrap();
    let one = identity(9);
    let half = c(0.5, 0.0);
    let expected = spinboson_core::TotalOperator::from_blocks(&(&one * half), &(&pp * half), &(-&pp * half), &(&one * half));
    assert!((&st.s_inverse.entries - &expected.entries).norm() < 1e-14);
    assert!((&st.s.entries * &st.s_inverse.entries - identity(18)).norm() < 1e-14);
}

#[test]
fn block_spectra_reproduce_full_spectrum() {
    for p in seeded_sets(41, 0.0).into_iter().step_by(5) {
        let bh = assemble_block(&p);
        let alpha_p = parity(p.space()) * c(p.alpha(), 0.0);
        let mut union = HermitianEigen::new(&(&bh.h_plus + &alpha_p)).sorted_values();
        union.extend(HermitianEigen::new(&(&bh.h_minus - &alpha_p)).sorted_values());
        union.sort_by(f64::total_cmp);
        let h = assemble_total(&p).entries;
        let full = HermitianEigen::new(&h).sorted_values();
        assert!(max_spectrum_gap(&union, &full) <= 1e-10 * h.norm());
    }
}

#[test]
fn constant_of_motion_iff_zero_beta() {
    for beta in [0.0, 0.3, 1.0] {
        for p in seeded_sets(51, beta).into_iter().step_by(5) {
            let h_norm = assemble_total(&p).entries.norm();
            let comm = parity_constant_of_motion(&p, Norm::Frobenius);
            if beta == 0.0 {
                assert!(comm <= 1e-12 * h_norm, "β=0 commutator {comm:e}");
            } else {
                assert!(comm > 1e-12 * h_norm, "β={beta} commutator {comm:e}");
            }
        }
    }
}

#[test]
fn broken_parity_commutator_matches_brute_force() {
    let (beta, d) = (1.0, 7);
    let p = ModelParams::single_mode(0.0, beta, 1.0, c(0.0, 0.0), d).unwrap();
    let h = assemble_total(&p).entries;
    let j = total_parity(p.space()).entries;
    // Brute force [J, H] by explicit loops.
    let n = h.nrows();
    let mut brute = CMatrix::zeros(n, n);
    for r in 0..n {
        for col in 0..n {
            for k in 0..n {
                brute[(r, col)] += j[(r, k)] * h[(k, col)] - h[(r, k)] * j[(k, col)];
            }
        }
    }
    let measured = parity_constant_of_motion(&p, Norm::Frobenius);
    assert!((measured - brute.norm()).abs() < 1e-12);
    // [σ_x, βσ_z] ⊗ P = −2iβ σ_y ⊗ P.
    let analytic = sigma_y().kronecker(&parity(p.space())) * c(0.0, -2.0 * beta);
    assert!((commutator(&j, &h) - analytic).norm() < 1e-12);
    assert!((measured - 2.0 * beta * (2.0 * d as f64).sqrt()).abs() < 1e-12);
}

#[test]
fn spectra_match_only_without_splitting() {
    let modes = vec![Mode::new(1.1, c(0.35, -0.2)), Mode::new(0.7, c(0.1, 0.3))];
    let space = FockSpace::new(vec![5, 5]).unwrap();
    let p0 = ModelParams::new(0.9, 0.0, modes, space).unwrap();
    let cmp0 = spectral_obstruction_check(&p0, 1e-10);
    assert!(cmp0.matched, "gap {:e}", cmp0.max_gap);

    let beta = 0.7;
    let p1 = p0.with_beta(beta).unwrap();
    let cmp1 = spectral_obstruction_check(&p1, 1e-10);
    assert!(!cmp1.matched);
    let shifted: Vec<f64> = cmp1.spectrum_plus.iter().map(|l| l - 2.0 * beta).collect();
    assert!(max_spectrum_gap(&shifted, &cmp1.spectrum_minus) < 1e-10);

    let bh = assemble_block(&p1);
    let pp = parity(p1.space());
    let conj = &pp * &bh.h_plus * &pp - identity(25) * c(2.0 * beta, 0.0);
    assert!((conj - &bh.h_minus).norm() < 1e-14);
}

#[test]
fn rescaled_block_is_displaced_number_operator() {
    let (w, g, d) = (1.0, c(0.3, 0.0), 40);
    let p = ModelParams::single_mode(0.6, 0.0, w, g, d).unwrap();
    let rescaled = rescale_reference(&assemble_block(&p), &p).unwrap();
    let space = p.space();
    let f = g / w;
    let rhs = displacement(space, 0, f).unwrap()
        * number(space, 0).unwrap()
        * displacement(space, 0, -f).unwrap()
        * c(w, 0.0);
    let block = space.leading_block();
    let err = restrict(&(&rescaled.h_plus - &rhs), &block).norm();
    assert!(err <= 1e-8, "leading-block error {err:e}");

    let spectrum = HermitianEigen::new(&rescaled.h_plus).sorted_values();
    for (n, lambda) in spectrum.iter().take(10).enumerate() {
        assert!((lambda - n as f64 * w).abs() < 1e-8, "level {n}: {lambda}");
    }
}

#[test]
fn rescaled_blocks_share_the_harmonic_spectrum_without_tunneling() {
    // α=0: both rescaled blocks are unitarily equivalent to ω a†a.
    let (w, g) = (1.4, c(0.25, 0.3));
    let p = ModelParams::single_mode(0.0, 0.0, w, g, 36).unwrap();
    let rescaled = rescale_reference(&assemble_block(&p), &p).unwrap();
    for block in [&rescaled.h_plus, &rescaled.h_minus] {
        let spectrum = HermitianEigen::new(block).sorted_values();
        for (n, lambda) in spectrum.iter().take(8).enumerate() {
            assert!((lambda - n as f64 * w).abs() < 1e-8);
        }
    }
}
