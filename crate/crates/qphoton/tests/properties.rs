//! Randomized structural invariants of the state/process layer.

use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;
use qphoton::fisher::{basis_euler, BasisChangeSpec};
use qphoton::states::{
    euler_from_su2, su2_from_euler, EulerAngles, PolarizationBasis, outcome_probs,
    Su2Matrix, TwoModePureState,
};

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

fn arb_angles() -> impl Strategy<Value = EulerAngles> {
    (0.0..TAU, 1e-3..PI - 1e-3, 0.0..TAU)
        .prop_map(|(p1, p2, p3)| EulerAngles::new(p1, p2, p3).unwrap())
}

fn arb_state() -> impl Strategy<Value = TwoModePureState> {
    (1usize..=6, proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7))
        .prop_filter_map("zero amplitude vector", |(n, raw)| {
            let amps: Vec<Complex64> =
                raw[..=n].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            let amps = amps.into_iter().map(|c| c / norm).collect();
            TwoModePureState::new(n, amps).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outcome_probs_form_a_distribution(state in arb_state(), psi in arb_angles()) {
        let p = outcome_probs(&state, psi);
        prop_assert_eq!(p.len(), state.n_total + 1);
        for &x in &p {
            prop_assert!(x >= -1e-14, "negative probability {}", x);
        }
        let total: f64 = p.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "Σp = {}", total);
    }

    #[test]
    fn euler_matrix_is_special_unitary(psi in arb_angles()) {
        let m = su2_from_euler(psi).entries;
        let defect = (m.adjoint() * m - Matrix2::identity()).norm();
        prop_assert!(defect < 1e-10, "unitarity defect {}", defect);
        let det = m.determinant();
        prop_assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-10, "det = {}", det);
    }

    #[test]
    fn euler_angles_round_trip(psi in arb_angles()) {
        let m = su2_from_euler(psi);
        let dec = euler_from_su2(&m);
        prop_assert!(!dec.degenerate);
        let back = su2_from_euler(dec.angles);
        // Recovery is exact up to the global half-angle sign of SU(2).
        let d_plus = (back.entries - m.entries).norm();
        let d_minus = (back.entries + m.entries).norm();
        prop_assert!(d_plus.min(d_minus) < 1e-9, "round-trip defect {}", d_plus.min(d_minus));
    }

    #[test]
    fn basis_euler_agrees_with_matrix_conjugation(psi in arb_angles()) {
        for &basis in &[PolarizationBasis::Da, PolarizationBasis::Rl] {
            let r = BasisChangeSpec::for_basis(basis).matrix();
            let conjugated = r.adjoint() * su2_from_euler(psi).entries * r;
            let via_angles = su2_from_euler(basis_euler(psi, basis)).entries;
            let d_plus = (via_angles - conjugated).norm();
            let d_minus = (via_angles + conjugated).norm();
            prop_assert!(
                d_plus.min(d_minus) < 1e-9,
                "{:?}: conjugation defect {}",
                basis,
                d_plus.min(d_minus)
            );
        }
    }
}

// Non-proptest spot check: the basis-change constants map H/V onto the
// diagonal and circular bases.
#[test]
fn basis_change_columns_are_the_expected_states() {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let da = BasisChangeSpec::for_basis(PolarizationBasis::Da).matrix();
    // First column |D⟩ = (|H⟩ + |V⟩)/√2, second |A⟩ = (|H⟩ − |V⟩)/√2 up to phase.
    assert!((da[(0, 0)].re - inv_sqrt2).abs() < 1e-14);
    assert!((da[(1, 0)].re - inv_sqrt2).abs() < 1e-14);
    let rl = BasisChangeSpec::for_basis(PolarizationBasis::Rl).matrix();
    // First column ∝ (|H⟩ + i|V⟩)/√2 up to global phase: component ratio is i.
    let ratio = rl[(1, 0)] / rl[(0, 0)];
    assert!((ratio - Complex64::new(0.0, 1.0)).norm() < 1e-14, "ratio = {ratio}");
    // Columns orthonormal.
    for m in [da, rl] {
        assert!((m.adjoint() * m - Matrix2::identity()).norm() < 1e-14);
    }
}
