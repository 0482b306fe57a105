mod oracle;

use abtqft_core::compare::{cs_closed, verify_reciprocity_dt};
use abtqft_core::corpus::{random_nondegenerate, random_symmetric};
use abtqft_core::extended::{boundary_vector, ExtendedBordism};
use abtqft_core::intlinalg::{signature, IntMatrix, IntSymMatrix};
use abtqft_core::numeric::{approx_eq, ApproxComplex, UnitPhase};
use abtqft_core::surgery::{rt_raw_closed, rt_state_sum, SurgeryPresentation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c((re, im): (f64, f64)) -> ApproxComplex {
    ApproxComplex::new(re, im)
}

#[test]
fn residue_counted_sum_matches_term_by_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..150 {
        let m = rng.gen_range(0..=3);
        let k = [2u64, 4, 6, 8][rng.gen_range(0..4)];
        let l = random_symmetric(&mut rng, m, 4);
        let fast = rt_state_sum(&SurgeryPresentation::closed(l.clone()), k).unwrap();
        let slow = c(oracle::naive_state_sum(&l, k));
        assert!(
            approx_eq(fast, slow, 1e-9 * (k as f64).powi(m as i32).sqrt()),
            "{l:?} k={k}"
        );
    }
}

#[test]
fn cs_gauss_sum_matches_hermite_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..150 {
        let m = rng.gen_range(1..=3);
        let k = [2u64, 4, 6, 8][rng.gen_range(0..4)];
        let l = random_nondegenerate(&mut rng, m, 4);
        let ours = cs_closed(&l, k).unwrap();
        let theirs = c(oracle::box_gauss_sum(&l, k));
        assert!(
            approx_eq(ours.gauss, theirs, 1e-9),
            "{l:?} k={k}: {} vs {theirs}",
            ours.gauss
        );
        assert_eq!(ours.torsion_order as i64, oracle::adjugate(&l).1.abs());
    }
}

#[test]
fn reciprocity_right_side_matches_hermite_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let r = [2u64, 4, 6][rng.gen_range(0..3)];
        let l = random_nondegenerate(&mut rng, m, 4);
        let res = verify_reciprocity_dt(&l, r).unwrap();
        let box_sum = c(oracle::box_gauss_sum(&l, r));
        let rhs = UnitPhase::from_ratio(signature(&l), 8).eval()
            * box_sum.scale((r as f64).powf(m as f64 / 2.0));
        assert!(approx_eq(res.rhs, rhs, 1e-8), "{l:?} r={r}");
    }
}

#[test]
fn boundary_coefficients_match_closure_oracle() {
    let k = 2;
    let zero = ExtendedBordism::new(
        SurgeryPresentation::closed(IntSymMatrix::of(&[&[0]])),
        IntMatrix::zeros(1, 1),
        IntMatrix::zeros(0, 1),
        IntSymMatrix::of(&[&[0]]),
        0,
    )
    .unwrap();
    let v = boundary_vector(&zero, k).unwrap();
    assert_eq!(v.dim(), 2);
    for x in 0..2 {
        let filled = zero.fill(&[x]).unwrap();
        let sum = c(oracle::naive_colored_sum(&filled.block_matrix(), &[x], k));
        // one surgery component with σ = 0
        let want = sum.scale(1.0 / k as f64);
        assert!(approx_eq(v.get(&[x]), want, 1e-12), "x={x}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let k = [2u64, 4, 6][rng.gen_range(0..3)];
        let m = rng.gen_range(1..=2);
        let l = random_symmetric(&mut rng, m, 3);
        let mixed = IntMatrix::from_fn(m, 1, |_, _| rng.gen_range(-2..=2).into());
        let own = IntSymMatrix::diagonal(&[rng.gen_range(-2..=2)]);
        let b = ExtendedBordism::new(
            SurgeryPresentation::closed(l.clone()),
            mixed,
            IntMatrix::zeros(0, 1),
            own,
            0,
        )
        .unwrap();
        let v = boundary_vector(&b, k).unwrap();
        let sigma = signature(&l);
        let norm = (k as f64).powf(-(m as f64 + 1.0) / 2.0);
        for x in 0..k as i64 {
            let filled = b.fill(&[x]).unwrap();
            let sum = c(oracle::naive_colored_sum(&filled.block_matrix(), &[x], k));
            let want = UnitPhase::from_ratio(-sigma, 8).eval() * sum.scale(norm);
            assert!(approx_eq(v.get(&[x]), want, 1e-9));
            assert!(approx_eq(
                v.get(&[x]),
                rt_raw_closed(&filled, k).unwrap(),
                1e-12
            ));
        }
    }
}

#[test]
fn closure_count_matches_determinant() {
    for (rows, det) in [
        (vec![vec![2, 1], vec![1, 4]], 7u64),
        (vec![vec![2, 0], vec![0, 3]], 6),
        (vec![vec![4, 2], vec![2, 4]], 12),
        (vec![vec![0, 3], vec![3, 0]], 9),
    ] {
        let l = IntSymMatrix::from_rows(&rows).unwrap();
        assert_eq!(oracle::cokernel_order_by_closure(&l), det);
    }
    assert_eq!(oracle::cokernel_order_by_closure(&IntSymMatrix::e8()), 1);
}
