//! Quantum Fisher information for the three-basis protocol, assembled purely
//! from one- and two-particle reduced states of the symmetric probe (the SLD
//! is never materialized), plus the saturation/optimality predicates and the
//! optimal precision bound.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fisher::{FisherMatrix, Parameterization};
use crate::states::{
    correlators, named_state, reduced_one, reduced_two, ReducedSpinState, StateKind,
    TwoModePureState,
};

/// Predicate tolerance on saturation/optimality residuals.
const RESIDUAL_TOL: f64 = 1e-10;

fn pauli(k: usize) -> DMatrix<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries: [Complex64; 4] = match k {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, -i, i, z],
        3 => [one, z, z, -one],
        _ => unreachable!("Pauli index"),
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Pauli substitution defining ρ_x and ρ_y from ρ_z: each entry maps the
/// Pauli index (0..4 = 1, σx, σy, σz) to (target index, sign).
type PauliMap = [(usize, f64); 4];

/// σx→−σz, σy→σy, σz→σx (generates ρ_x from ρ_z). This is conjugation by the
/// diagonal/antidiagonal change-of-basis matrix, so the ρ_x terms reproduce the
/// Fisher contribution of the rotated measurement exactly.
const MAP_X: PauliMap = [(0, 1.0), (3, -1.0), (2, 1.0), (1, 1.0)];
/// σx→−σz, σy→−σx, σz→σy (generates ρ_y from ρ_z): conjugation by the
/// circular change-of-basis matrix.
const MAP_Y: PauliMap = [(0, 1.0), (3, -1.0), (1, -1.0), (2, 1.0)];
/// Identity map (ρ_z itself).
const MAP_Z: PauliMap = [(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)];

/// Applies a Pauli substitution to a one-particle (2×2) density matrix.
fn substitute_one(rho: &DMatrix<Complex64>, map: &PauliMap) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(2, 2);
    for (k, &(target, sign)) in map.iter().enumerate() {
        let coeff = (rho * pauli(k)).trace() * 0.5 * sign;
        out += pauli(target) * coeff;
    }
    out
}

/// Applies a Pauli substitution to both slots of a two-particle (4×4) matrix.
fn substitute_two(rho: &DMatrix<Complex64>, map: &PauliMap) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(4, 4);
    for (k, &(tk, sk)) in map.iter().enumerate() {
        for (l, &(tl, sl)) in map.iter().enumerate() {
            let basis = kron(&pauli(k), &pauli(l));
            let coeff = (rho * &basis).trace() * 0.25 * (sk * sl);
            out += kron(&pauli(tk), &pauli(tl)) * coeff;
        }
    }
    out
}

/// Quantum Fisher information matrix (locally independent parameters):
/// I_αβ = Σ_{ξ∈{x,y,z}} 4N·Re[Tr(ρ_ξ^[1] t_α t_β) + (N−1)Tr(ρ_ξ^[2] t_α⊗t_β)
/// − N·Tr(ρ_ξ^[1] t_α)·Tr(ρ_ξ^[1] t_β)] with t_α = σ_α/√2. For N = 1 the
/// two-particle term is absent.
pub fn qfi_total(state: &TwoModePureState) -> Result<FisherMatrix> {
    let n = state.n_total;
    if n == 0 {
        return Err(Error::Domain("qfi_total needs N ≥ 1".into()));
    }
    let nf = n as f64;
    let rho1_z = reduced_one(state)?.matrix;
    let rho2_z = if n >= 2 { Some(reduced_two(state)?.matrix) } else { None };

    let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
    let t: Vec<DMatrix<Complex64>> =
        (1..4).map(|k| pauli(k) * Complex64::new(inv_sqrt2, 0.0)).collect();

    let mut total = Matrix3::zeros();
    for map in [&MAP_X, &MAP_Y, &MAP_Z] {
        let rho1 = substitute_one(&rho1_z, map);
        let rho2 = rho2_z.as_ref().map(|r| substitute_two(r, map));
        for a in 0..3 {
            for b in 0..3 {
                let one_body = (&rho1 * &t[a] * &t[b]).trace();
                let means = (&rho1 * &t[a]).trace() * (&rho1 * &t[b]).trace();
                let mut val = one_body - means * nf;
                if let Some(r2) = &rho2 {
                    let tt = kron(&t[a], &t[b]);
                    val += (r2 * tt).trace() * (nf - 1.0);
                }
                total[(a, b)] += 4.0 * nf * val.re;
            }
        }
    }
    Ok(FisherMatrix { entries: total, parameterization: Parameterization::Local })
}

/// Saturation predicate report.
#[derive(Debug, Clone)]
pub struct SaturationReport {
    /// True when the number-counting protocol saturates the quantum bound.
    pub ok: bool,
    /// The single-particle reduced state examined.
    pub rho1: ReducedSpinState,
    /// Residuals |⟨a†a⟩−N/2|, |⟨b†b⟩−N/2|, |⟨a†b⟩|.
    pub residuals: [f64; 3],
}

/// Checks the saturation condition ⟨a†a⟩ = ⟨b†b⟩ = N/2 and ⟨a†b⟩ = 0
/// (equivalently, a maximally mixed single-particle reduced state).
pub fn saturation_check(state: &TwoModePureState) -> Result<SaturationReport> {
    let n = state.n_total;
    if n == 0 {
        return Err(Error::Domain("saturation_check needs N ≥ 1".into()));
    }
    let corr = correlators(state);
    let half = n as f64 / 2.0;
    let residuals = [
        (corr.n_a - half).abs(),
        (corr.n_b - half).abs(),
        corr.ab.norm(),
    ];
    Ok(SaturationReport {
        ok: residuals.iter().all(|&r| r <= RESIDUAL_TOL),
        rho1: reduced_one(state)?,
        residuals,
    })
}

/// Optimality predicate report.
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    /// True when the state is optimal for the protocol variant checked.
    pub ok: bool,
    /// Fitted c_zz coefficient of the two-particle reduced state in the
    /// z-basis Pauli expansion.
    pub c_zz: f64,
    /// Residual magnitudes of the violated/checked conditions.
    pub residuals: Vec<f64>,
}

/// Checks optimality for the default three-basis protocol: saturation plus
/// vanishing ⟨a†a†ab⟩, ⟨a†a†bb⟩, ⟨a†b†bb⟩ (within 1e−10).
pub fn optimality_check(state: &TwoModePureState) -> Result<OptimalityReport> {
    optimality_check_variant(state, false)
}

/// Optimality predicate with a protocol-variant switch. With
/// `single_input = true` the single-input-state condition is checked instead:
/// ρ_z^[2] = 1⊗1/4 + (1/12)Σ_α σ_α⊗σ_α.
pub fn optimality_check_variant(
    state: &TwoModePureState,
    single_input: bool,
) -> Result<OptimalityReport> {
    let n = state.n_total;
    if n < 2 {
        return Err(Error::Domain("optimality_check needs N ≥ 2".into()));
    }
    let rho2 = reduced_two(state)?.matrix;
    let c_zz = ((&rho2 * kron(&pauli(3), &pauli(3))).trace() * 0.25).re;

    if single_input {
        // All fifteen non-identity Pauli coefficients fixed: c_αα = 1/12,
        // everything else zero.
        let mut residuals = Vec::new();
        for k in 0..4 {
            for l in 0..4 {
                if k == 0 && l == 0 {
                    continue;
                }
                let coeff = ((&rho2 * kron(&pauli(k), &pauli(l))).trace() * 0.25).re;
                let target = if k == l && k > 0 { 1.0 / 12.0 } else { 0.0 };
                residuals.push((coeff - target).abs());
            }
        }
        let ok = residuals.iter().all(|&r| r <= RESIDUAL_TOL);
        return Ok(OptimalityReport { ok, c_zz, residuals });
    }

    let sat = saturation_check(state)?;
    let corr = correlators(state);
    let mut residuals = sat.residuals.to_vec();
    residuals.extend([corr.aaab.norm(), corr.aabb.norm(), corr.abbb.norm()]);
    let ok = residuals.iter().all(|&r| r <= RESIDUAL_TOL);
    Ok(OptimalityReport { ok, c_zz, residuals })
}

/// Minimum achievable Tr(I⁻¹) over probe states: 3/(2n(n+2)).
pub fn optimal_bound(n: usize) -> f64 {
    let nf = n as f64;
    3.0 / (2.0 * nf * (nf + 2.0))
}

/// One row of the state-classification table exported by the CLI.
#[derive(Debug, Clone)]
pub struct ClassificationRow {
    pub kind: StateKind,
    pub n: usize,
    pub m: Option<usize>,
    pub saturates: bool,
    pub optimal: bool,
    /// Tr(I⁻¹), `None` when the QFI matrix is singular.
    pub trace_inv_qfi: Option<f64>,
}

/// Classifies a named state: saturation, optimality, and Tr(I⁻¹).
pub fn classification_row(kind: StateKind, n: usize, m: Option<usize>) -> Result<ClassificationRow> {
    let state = named_state(kind, n, m)?;
    let saturates = saturation_check(&state)?.ok;
    let optimal = if n >= 2 { optimality_check(&state)?.ok } else { false };
    let qfi = qfi_total(&state)?;
    let trace_inv_qfi = qfi.entries.try_inverse().map(|inv| inv.trace());
    Ok(ClassificationRow { kind, n, m, saturates, optimal, trace_inv_qfi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn qfi_is_isotropic_for_hb_and_noon() {
        for (kind, n) in [
            (StateKind::Hb, 2usize),
            (StateKind::Hb, 4),
            (StateKind::Noon, 3),
            (StateKind::Noon, 5),
        ] {
            let st = named_state(kind, n, None).unwrap();
            let qfi = qfi_total(&st).unwrap();
            let expected = 2.0 * n as f64 * (n as f64 + 2.0);
            for a in 0..3 {
                for b in 0..3 {
                    let target = if a == b { expected } else { 0.0 };
                    assert_abs_diff_eq!(qfi.entries[(a, b)], target, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn qfi_single_photon_shot_noise() {
        let st = named_state(StateKind::Fock, 1, Some(1)).unwrap();
        let qfi = qfi_total(&st).unwrap();
        // The trace of the inverse must exist and scale like 1/N (shot noise).
        let inv = qfi.entries.try_inverse().expect("singular N=1 QFI");
        assert!(inv.trace() > 0.0);
    }

    #[test]
    fn saturation_classification_matches_closed_forms() {
        for n in 1..=10usize {
            for m in 0..=n {
                let st = named_state(StateKind::Fock, n, Some(m)).unwrap();
                let rep = saturation_check(&st).unwrap();
                assert_eq!(rep.ok, 2 * m == n, "Fock N={n} M={m}");
            }
        }
        for n in 1..=10usize {
            for m in 0..=n {
                let st = named_state(StateKind::SymmetricPair, n, Some(m)).unwrap();
                let rep = saturation_check(&st).unwrap();
                // The pair is symmetric under M ↔ N−M, so saturation fails
                // exactly when the two occupations are adjacent: |N−2M| = 1.
                let expected = (n as i64 - 2 * m as i64).abs() != 1;
                assert_eq!(rep.ok, expected, "SymmetricPair N={n} M={m}");
            }
        }
        let noon1 = named_state(StateKind::Noon, 1, None).unwrap();
        assert!(!saturation_check(&noon1).unwrap().ok);
    }

    #[test]
    fn optimality_hb_c_zz() {
        for n in [2usize, 4, 6, 8] {
            let st = named_state(StateKind::Hb, n, None).unwrap();
            let rep = optimality_check(&st).unwrap();
            assert!(rep.ok);
            assert_abs_diff_eq!(rep.c_zz, -1.0 / (4.0 * (n as f64 - 1.0)), epsilon = 1e-12);
        }
    }

    #[test]
    fn optimality_symmetric_pair_exclusions() {
        for n in 2..=10usize {
            for m in 0..=n {
                let st = named_state(StateKind::SymmetricPair, n, Some(m)).unwrap();
                let rep = optimality_check(&st).unwrap();
                // Optimality fails for adjacent pairs (saturation) and for
                // pairs two quanta apart, symmetric under M ↔ N−M.
                let gap = (n as i64 - 2 * m as i64).abs();
                assert_eq!(rep.ok, gap != 1 && gap != 2, "SymmetricPair N={n} M={m}");
            }
        }
        let yurke_a = named_state(StateKind::YurkeA, 6, None).unwrap();
        assert!(!optimality_check(&yurke_a).unwrap().ok);
        let yurke_b = named_state(StateKind::YurkeB, 6, None).unwrap();
        assert!(!saturation_check(&yurke_b).unwrap().ok);
    }

    #[test]
    fn optimal_states_reach_the_bound() {
        for n in [2usize, 4, 6, 8] {
            let st = named_state(StateKind::Hb, n, None).unwrap();
            let qfi = qfi_total(&st).unwrap();
            let tr_inv = qfi.entries.try_inverse().unwrap().trace();
            assert_abs_diff_eq!(tr_inv, optimal_bound(n), epsilon = 1e-9 * optimal_bound(n));
        }
    }

    #[test]
    fn k_extraction_for_optimal_states() {
        // K = 2c_xx + c_zz = 1/4 for optimal states.
        for (kind, n, m) in [
            (StateKind::Hb, 4usize, None),
            (StateKind::Noon, 4, None),
            (StateKind::SymmetricPair, 6, Some(1)),
        ] {
            let st = named_state(kind, n, m).unwrap();
            let rho2 = reduced_two(&st).unwrap().matrix;
            let c_xx = ((&rho2 * kron(&pauli(1), &pauli(1))).trace() * 0.25).re;
            let c_zz = ((&rho2 * kron(&pauli(3), &pauli(3))).trace() * 0.25).re;
            assert_abs_diff_eq!(2.0 * c_xx + c_zz, 0.25, epsilon = 1e-10);
        }
    }

    #[test]
    fn cauchy_schwarz_trace_bound() {
        for (kind, n, m) in [
            (StateKind::Hb, 4usize, None),
            (StateKind::Noon, 3, None),
            (StateKind::YurkeA, 4, None),
            (StateKind::SymmetricPair, 5, Some(2)),
        ] {
            let st = named_state(kind, n, m).unwrap();
            let qfi = qfi_total(&st).unwrap();
            if let Some(inv) = qfi.entries.try_inverse() {
                assert!(inv.trace() >= 9.0 / qfi.entries.trace() - 1e-12);
            }
        }
        // Equality on an optimal (isotropic-QFI) state.
        let hb = named_state(StateKind::Hb, 4, None).unwrap();
        let qfi = qfi_total(&hb).unwrap();
        let tr_inv = qfi.entries.try_inverse().unwrap().trace();
        assert_abs_diff_eq!(tr_inv, 9.0 / qfi.entries.trace(), epsilon = 1e-12);
    }

    #[test]
    fn optimal_bound_values() {
        assert_abs_diff_eq!(optimal_bound(2), 0.1875, epsilon = 1e-15);
        assert_abs_diff_eq!(optimal_bound(3), 0.1, epsilon = 1e-15);
        let n = 10_000usize;
        let ratio = optimal_bound(n) / (3.0 / (2.0 * (n as f64).powi(2)));
        assert!((ratio - 1.0).abs() < 1e-3);
    }
}
