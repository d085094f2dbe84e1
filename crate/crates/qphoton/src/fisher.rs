//! Classical Fisher information for the three-basis number-counting protocol:
//! Euler-angle basis changes, the locally independent reparameterization of
//! the precision trace, global minimization of Tr(F⁻¹) over processes, and a
//! seeded maximum-likelihood estimation harness.

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optim::nelder_mead;
use crate::states::{
    euler_from_su2, outcome_probs, su2_from_euler, wrap_2pi, wrap_pi, EulerAngles,
    PolarizationBasis, Su2Matrix, TwoModePureState, I,
};

/// Finite-difference step for all probability/angle derivatives.
const FD_STEP: f64 = 1e-5;
/// Outcomes with probability below this floor are excluded from Fisher sums.
const P_FLOOR: f64 = 1e-12;
/// ψ2 margin excluded from the minimization domain (gimbal-lock singularity).
const PSI2_MARGIN: f64 = 0.05;
/// Repetitions used to build the empirical MLE covariance.
const MLE_REPS: usize = 200;

/// Which parameter chart a Fisher matrix refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    /// Euler angles (ψ1, ψ2, ψ3).
    Euler,
    /// Locally independent parameters (generators σ_α/√2).
    Local,
}

/// 3×3 (classical or quantum) Fisher information matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub entries: Matrix3<f64>,
    pub parameterization: Parameterization,
}

/// Change-of-basis data (α′, β′, ζ) defining the unitary
/// r = [[α′, −e^{iζ}β′*], [β′, e^{iζ}α′*]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisChangeSpec {
    pub alpha_p: Complex64,
    pub beta_p: Complex64,
    pub zeta: f64,
}

impl BasisChangeSpec {
    /// The change-of-basis data for a measurement basis (identity for HV).
    pub fn for_basis(basis: PolarizationBasis) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match basis {
            PolarizationBasis::Hv => BasisChangeSpec {
                alpha_p: Complex64::new(1.0, 0.0),
                beta_p: Complex64::new(0.0, 0.0),
                zeta: 0.0,
            },
            PolarizationBasis::Da => BasisChangeSpec {
                alpha_p: Complex64::new(s, 0.0),
                beta_p: Complex64::new(s, 0.0),
                zeta: 0.0,
            },
            PolarizationBasis::Rl => BasisChangeSpec {
                alpha_p: Complex64::new(0.0, -s),
                beta_p: Complex64::new(s, 0.0),
                zeta: -std::f64::consts::FRAC_PI_2,
            },
        }
    }

    /// The 2×2 unitary r built from (α′, β′, ζ): the columns are the two
    /// basis states (α′, β′) and (−e^{iζ}β′*, e^{iζ}α′*) in the HV basis.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let phase = (I * self.zeta).exp();
        Matrix2::new(
            self.alpha_p,
            -phase * self.beta_p.conj(),
            self.beta_p,
            phase * self.alpha_p.conj(),
        )
    }
}

/// Euler angles of the process as seen from a measurement basis:
/// ψ′ with su2_from_euler(ψ′) = r† · su2_from_euler(ψ) · r (up to the global
/// SU(2) sign). HV returns the canonicalized input unchanged.
pub fn basis_euler(psi: EulerAngles, basis: PolarizationBasis) -> EulerAngles {
    if basis == PolarizationBasis::Hv {
        return EulerAngles {
            psi1: wrap_2pi(psi.psi1),
            psi2: psi.psi2,
            psi3: wrap_2pi(psi.psi3),
        };
    }
    let r = BasisChangeSpec::for_basis(basis).matrix();
    let m = su2_from_euler(psi).entries;
    let conjugated = r.adjoint() * m * r;
    euler_from_su2(&Su2Matrix { entries: conjugated }).angles
}

/// Jacobian ∂ψ′_i/∂ψ_k of the basis change, by central differences with one
/// Richardson refinement; angle differences are wrapped so that branch cuts of
/// ψ′1, ψ′3 at 2π do not contaminate the derivative.
pub fn basis_jacobian(psi: EulerAngles, basis: PolarizationBasis) -> Matrix3<f64> {
    let diff_at = |h: f64, k: usize| -> [f64; 3] {
        let mut plus = psi.as_array();
        let mut minus = psi.as_array();
        plus[k] += h;
        minus[k] -= h;
        let pp = basis_euler(EulerAngles { psi1: plus[0], psi2: plus[1], psi3: plus[2] }, basis);
        let pm = basis_euler(EulerAngles { psi1: minus[0], psi2: minus[1], psi3: minus[2] }, basis);
        [
            wrap_pi(pp.psi1 - pm.psi1) / (2.0 * h),
            (pp.psi2 - pm.psi2) / (2.0 * h),
            wrap_pi(pp.psi3 - pm.psi3) / (2.0 * h),
        ]
    };
    let mut j = Matrix3::zeros();
    for k in 0..3 {
        let d1 = diff_at(FD_STEP, k);
        let d2 = diff_at(FD_STEP / 2.0, k);
        for i in 0..3 {
            j[(i, k)] = (4.0 * d2[i] - d1[i]) / 3.0;
        }
    }
    j
}

/// The per-basis rank-one building blocks W^B_kl = (∂ψ′2/∂ψ_k)(∂ψ′2/∂ψ_l)
/// for B ∈ {HV, DA, RL} — the only blocks needed when the single-basis Fisher
/// matrix has support on ψ′2 alone (Fock-input probes).
pub fn w_matrices(psi: EulerAngles) -> Result<[Matrix3<f64>; 3]> {
    if psi.psi2 < 1e-6 || psi.psi2 > std::f64::consts::PI - 1e-6 {
        return Err(Error::Numerical(format!(
            "w_matrices singular at ψ2 = {} (gimbal lock)",
            psi.psi2
        )));
    }
    let mut out = [Matrix3::zeros(); 3];
    for (slot, &basis) in PolarizationBasis::ALL.iter().enumerate() {
        let j = basis_jacobian(psi, basis);
        for k in 0..3 {
            for l in 0..3 {
                out[slot][(k, l)] = j[(1, k)] * j[(1, l)];
            }
        }
    }
    Ok(out)
}

/// Gradient of the outcome probabilities of the composed map
/// ψ → basis_euler(ψ, basis) → outcome_probs, central differences with one
/// Richardson refinement. Returns (p at ψ, [∂p/∂ψ_k; k = 0..3]).
fn prob_and_grad(
    state: &TwoModePureState,
    psi: EulerAngles,
    basis: PolarizationBasis,
) -> (Vec<f64>, [Vec<f64>; 3]) {
    let probs_at = |x: [f64; 3]| -> Vec<f64> {
        let angles = EulerAngles { psi1: x[0], psi2: x[1], psi3: x[2] };
        outcome_probs(state, basis_euler(angles, basis))
    };
    let p0 = probs_at(psi.as_array());
    let n_out = p0.len();
    let mut grad = [vec![0.0; n_out], vec![0.0; n_out], vec![0.0; n_out]];
    for k in 0..3 {
        let central = |h: f64| -> Vec<f64> {
            let mut plus = psi.as_array();
            let mut minus = psi.as_array();
            plus[k] += h;
            minus[k] -= h;
            let pp = probs_at(plus);
            let pm = probs_at(minus);
            (0..n_out).map(|o| (pp[o] - pm[o]) / (2.0 * h)).collect()
        };
        let d1 = central(FD_STEP);
        let d2 = central(FD_STEP / 2.0);
        for o in 0..n_out {
            grad[k][o] = (4.0 * d2[o] - d1[o]) / 3.0;
        }
    }
    (p0, grad)
}

/// Classical Fisher matrix of one measurement basis, in Euler parameters:
/// F_kl = Σ_{M′} (∂p/∂ψ_k)(∂p/∂ψ_l)/p with outcomes below the probability
/// floor excluded.
pub fn fisher_single_basis(
    state: &TwoModePureState,
    psi: EulerAngles,
    basis: PolarizationBasis,
) -> Result<FisherMatrix> {
    let (p, grad) = prob_and_grad(state, psi, basis);
    let mut used = 0usize;
    let mut f = Matrix3::zeros();
    for (o, &po) in p.iter().enumerate() {
        if po < P_FLOOR {
            continue;
        }
        used += 1;
        for k in 0..3 {
            for l in 0..3 {
                f[(k, l)] += grad[k][o] * grad[l][o] / po;
            }
        }
    }
    if used == 0 {
        return Err(Error::Numerical(
            "degenerate distribution: every outcome below probability floor".into(),
        ));
    }
    Ok(FisherMatrix { entries: f, parameterization: Parameterization::Euler })
}

/// Total Fisher matrix of the three-basis protocol (sum over HV, DA, RL).
pub fn fisher_total(state: &TwoModePureState, psi: EulerAngles) -> Result<FisherMatrix> {
    let mut f = Matrix3::zeros();
    for &basis in &PolarizationBasis::ALL {
        f += fisher_single_basis(state, psi, basis)?.entries;
    }
    Ok(FisherMatrix { entries: f, parameterization: Parameterization::Euler })
}

/// Precision figure of merit in locally independent parameters:
/// Σ_kl V_kl (F⁻¹)_lk with V = ½[[1, 0, cosψ2], [0, 1, 0], [cosψ2, 0, 1]].
pub fn trace_inverse_local(f: &FisherMatrix, psi: EulerAngles) -> Result<f64> {
    if f.parameterization != Parameterization::Euler {
        return Err(Error::Domain(
            "trace_inverse_local expects an Euler-parameter Fisher matrix".into(),
        ));
    }
    let inv = f
        .entries
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Fisher matrix: unbounded variance".into()))?;
    let cond = f.entries.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::Numerical(format!(
            "ill-conditioned Fisher matrix (cond ≈ {cond:.3e})"
        )));
    }
    let c = psi.psi2.cos();
    let v = Matrix3::new(0.5, 0.0, 0.5 * c, 0.0, 0.5, 0.0, 0.5 * c, 0.0, 0.5);
    Ok((v * inv).trace())
}

/// Jacobian ∂x/∂ψ of the locally independent coordinates with respect to the
/// Euler angles: U(ψ + dψ) = U(ψ)·e^{i Σ_α dx_α t_α} with generators
/// t_α = σ_α/√2 in the order (x, y, z). The perturbation acts on the input
/// side of the process, matching the frame of the quantum Fisher information.
/// Satisfies JᵀJ = V with V as in [`trace_inverse_local`].
fn euler_to_local_jacobian(psi: EulerAngles) -> Matrix3<f64> {
    let (s1, c1) = psi.psi1.sin_cos();
    let (s2, c2) = psi.psi2.sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Matrix3::new(
        0.0,
        r * s1,
        -r * s2 * c1,
        0.0,
        -r * c1,
        -r * s2 * s1,
        r,
        0.0,
        r * c2,
    )
}

/// Re-expresses an Euler-parameter Fisher matrix in locally independent
/// coordinates: F_local = J⁻ᵀ F J⁻¹ with J the Euler-to-local Jacobian.
///
/// Errors near the gimbal-lock singularity (sinψ2 ≈ 0), where the Euler
/// chart degenerates and J is not invertible.
pub fn fisher_local(f: &FisherMatrix, psi: EulerAngles) -> Result<FisherMatrix> {
    if f.parameterization != Parameterization::Euler {
        return Err(Error::Domain(
            "fisher_local expects an Euler-parameter Fisher matrix".into(),
        ));
    }
    if psi.psi2.sin().abs() < 1e-6 {
        return Err(Error::Numerical(
            "Euler chart degenerate: sin ψ2 ≈ 0".into(),
        ));
    }
    let j = euler_to_local_jacobian(psi);
    let j_inv = j
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Euler-to-local Jacobian".into()))?;
    let entries = j_inv.transpose() * f.entries * j_inv;
    Ok(FisherMatrix { entries, parameterization: Parameterization::Local })
}

/// One sampled point of the minimization landscape.
#[derive(Debug, Clone, Copy)]
pub struct LandscapeSample {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    /// Figure of merit; +∞ where the evaluation failed a numerical guard.
    pub trace_inv: f64,
}

/// Result of the global search over processes.
#[derive(Debug, Clone)]
pub struct MinTraceResult {
    /// Location of the best minimum found.
    pub psi_star: EulerAngles,
    /// Minimum of trace_inverse_local(fisher_total(·)).
    pub value: f64,
    /// Coarse-grid samples (for figure reproduction).
    pub landscape: Vec<LandscapeSample>,
}

/// Global minimization of the local precision trace over canonical ψ:
/// uniform grid (ψ2 restricted to [0.05, π−0.05] away from the gimbal-lock
/// singularity), then Nelder-Mead refinement from the 5 best grid cells.
/// Deterministic for a given seed.
pub fn min_trace_search(
    state: &TwoModePureState,
    grid_n: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<MinTraceResult> {
    if grid_n < 8 {
        return Err(Error::Domain(format!("grid_n = {grid_n} < 8")));
    }
    let lo = PSI2_MARGIN;
    let hi = std::f64::consts::PI - PSI2_MARGIN;
    let objective = |x: &[f64]| -> f64 {
        if x[1] < lo || x[1] > hi {
            return f64::INFINITY;
        }
        let psi = EulerAngles { psi1: x[0], psi2: x[1], psi3: x[2] };
        match fisher_total(state, psi).and_then(|f| trace_inverse_local(&f, psi)) {
            Ok(v) if v.is_finite() && v > 0.0 => v,
            _ => f64::INFINITY,
        }
    };

    let tau = std::f64::consts::TAU;
    let step13 = tau / grid_n as f64;
    let step2 = (hi - lo) / (grid_n - 1) as f64;
    let mut landscape = Vec::with_capacity(grid_n * grid_n * grid_n);
    for i1 in 0..grid_n {
        for i2 in 0..grid_n {
            for i3 in 0..grid_n {
                let x = [i1 as f64 * step13, lo + i2 as f64 * step2, i3 as f64 * step13];
                let v = objective(&x);
                landscape.push(LandscapeSample {
                    psi1: x[0],
                    psi2: x[1],
                    psi3: x[2],
                    trace_inv: v,
                });
            }
        }
    }
    let mut order: Vec<usize> = (0..landscape.len())
        .filter(|&i| landscape[i].trace_inv.is_finite())
        .collect();
    if order.is_empty() {
        return Err(Error::Search("every grid point failed evaluation".into()));
    }
    order.sort_by(|&a, &b| {
        landscape[a]
            .trace_inv
            .partial_cmp(&landscape[b].trace_inv)
            .unwrap()
    });

    // Deterministic restarts from the best grid cells, with a seed-derived
    // jitter of the initial simplex edge.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_x = [
        landscape[order[0]].psi1,
        landscape[order[0]].psi2,
        landscape[order[0]].psi3,
    ];
    let mut best_v = landscape[order[0]].trace_inv;
    for &cell in order.iter().take(5) {
        let s = &landscape[cell];
        let jitter = 1.0 + 0.05 * (rng.gen::<f64>() - 0.5);
        let steps = [0.5 * step13 * jitter, 0.5 * step2 * jitter, 0.5 * step13 * jitter];
        let r = nelder_mead(
            objective,
            &[s.psi1, s.psi2, s.psi3],
            &steps,
            refine_iters,
            1e-8,
        );
        if r.fx < best_v {
            best_v = r.fx;
            best_x = [r.x[0], r.x[1], r.x[2]];
        }
    }
    let psi_star = EulerAngles {
        psi1: wrap_2pi(best_x[0]),
        psi2: best_x[1].clamp(0.0, std::f64::consts::PI),
        psi3: wrap_2pi(best_x[2]),
    };
    Ok(MinTraceResult { psi_star, value: best_v, landscape })
}

/// Maximizes the joint multinomial log-likelihood over ψ for given per-basis
/// outcome counts, starting the simplex at `start`.
pub fn fit_mle(
    state: &TwoModePureState,
    counts: &[Vec<f64>; 3],
    start: EulerAngles,
) -> Result<EulerAngles> {
    let neg_loglik = |x: &[f64]| -> f64 {
        let psi = EulerAngles { psi1: x[0], psi2: x[1], psi3: x[2] };
        if psi.psi2 < 0.0 || psi.psi2 > std::f64::consts::PI {
            return f64::INFINITY;
        }
        let mut nll = 0.0;
        for (b, &basis) in PolarizationBasis::ALL.iter().enumerate() {
            let p = outcome_probs(state, basis_euler(psi, basis));
            for (o, &c) in counts[b].iter().enumerate() {
                if c > 0.0 {
                    nll -= c * p[o].max(1e-300).ln();
                }
            }
        }
        nll
    };
    let coarse = nelder_mead(neg_loglik, &start.as_array(), &[0.05, 0.05, 0.05], 400, 1e-10);
    // Restart with a fresh small simplex: a collapsed simplex can stall a few
    // parts in 1e6 away from the optimum.
    let r = nelder_mead(neg_loglik, &coarse.x, &[1e-4, 1e-4, 1e-4], 200, 1e-12);
    if !r.fx.is_finite() {
        return Err(Error::Search("likelihood optimizer diverged".into()));
    }
    Ok(EulerAngles {
        psi1: wrap_2pi(r.x[0]),
        psi2: r.x[1].clamp(0.0, std::f64::consts::PI),
        psi3: wrap_2pi(r.x[2]),
    })
}

/// Result of the maximum-likelihood simulation.
#[derive(Debug, Clone)]
pub struct MleResult {
    /// Estimate from the first repetition.
    pub psi_hat: EulerAngles,
    /// Empirical covariance of the Euler-angle estimates over all
    /// repetitions (deviations wrapped into (−π, π] around the truth).
    pub emp_cov: Matrix3<f64>,
    /// Number of repetitions used.
    pub reps: usize,
}

/// Simulates the full estimation experiment: multinomial counts per basis
/// (counter-based RNG streams keyed by (seed, basis, repetition)), joint MLE
/// per repetition, and the empirical covariance over repetitions.
pub fn mle_estimate(
    state: &TwoModePureState,
    psi_true: EulerAngles,
    shots_per_basis: usize,
    seed: u64,
) -> Result<MleResult> {
    if shots_per_basis < 100 {
        return Err(Error::Domain(format!(
            "shots_per_basis = {shots_per_basis} < 100"
        )));
    }
    let probs: Vec<Vec<f64>> = PolarizationBasis::ALL
        .iter()
        .map(|&b| outcome_probs(state, basis_euler(psi_true, b)))
        .collect();

    let mut deviations: Vec<[f64; 3]> = Vec::with_capacity(MLE_REPS);
    let mut psi_hat = psi_true;
    for rep in 0..MLE_REPS {
        let mut counts: [Vec<f64>; 3] = [
            vec![0.0; probs[0].len()],
            vec![0.0; probs[1].len()],
            vec![0.0; probs[2].len()],
        ];
        for (b, basis_counts) in counts.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(3 * rep as u64 + b as u64);
            for _ in 0..shots_per_basis {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut outcome = probs[b].len() - 1;
                for (o, &po) in probs[b].iter().enumerate() {
                    acc += po;
                    if u < acc {
                        outcome = o;
                        break;
                    }
                }
                basis_counts[outcome] += 1.0;
            }
        }
        let est = fit_mle(state, &counts, psi_true)?;
        if rep == 0 {
            psi_hat = est;
        }
        deviations.push([
            wrap_pi(est.psi1 - psi_true.psi1),
            wrap_pi(est.psi2 - psi_true.psi2),
            wrap_pi(est.psi3 - psi_true.psi3),
        ]);
    }

    let n = deviations.len() as f64;
    let mut mean = [0.0; 3];
    for d in &deviations {
        for i in 0..3 {
            mean[i] += d[i] / n;
        }
    }
    let mut cov = Matrix3::zeros();
    for d in &deviations {
        for i in 0..3 {
            for j in 0..3 {
                cov[(i, j)] += (d[i] - mean[i]) * (d[j] - mean[j]) / (n - 1.0);
            }
        }
    }
    Ok(MleResult { psi_hat, emp_cov: cov, reps: MLE_REPS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{named_state, StateKind};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn basis_euler_hv_is_identity() {
        let psi = EulerAngles::new(0.4, 1.0, 2.2).unwrap();
        assert_eq!(basis_euler(psi, PolarizationBasis::Hv), psi);
    }

    #[test]
    fn basis_euler_da_simple_angle() {
        let psi = EulerAngles::new(0.0, FRAC_PI_2, 0.0).unwrap();
        let p = basis_euler(psi, PolarizationBasis::Da);
        assert_abs_diff_eq!(p.psi2, FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn basis_euler_matches_conjugation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let psi = EulerAngles::new(
                rng.gen::<f64>() * std::f64::consts::TAU,
                0.1 + rng.gen::<f64>() * (PI - 0.2),
                rng.gen::<f64>() * std::f64::consts::TAU,
            )
            .unwrap();
            for &basis in &[PolarizationBasis::Da, PolarizationBasis::Rl] {
                let r = BasisChangeSpec::for_basis(basis).matrix();
                let target = r.adjoint() * su2_from_euler(psi).entries * r;
                let back = su2_from_euler(basis_euler(psi, basis)).entries;
                let same = (back - target).norm();
                let flipped = (back + target).norm();
                assert!(
                    same.min(flipped) < 1e-9,
                    "conjugation mismatch: {} / {}",
                    same,
                    flipped
                );
            }
        }
    }

    #[test]
    fn w_matrix_hv_is_unit_at_22() {
        let psi = EulerAngles::new(0.3, 1.2, 0.8).unwrap();
        let [wh, _, _] = w_matrices(psi).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let expected = if k == 1 && l == 1 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(wh[(k, l)], expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn w_matrices_reject_gimbal_lock() {
        assert!(w_matrices(EulerAngles { psi1: 0.0, psi2: 1e-9, psi3: 0.0 }).is_err());
    }

    #[test]
    fn fisher_single_basis_fock_formula() {
        // F22-equivalent diagonal = N(1+2M) − 2M² for |M, N−M⟩ probes.
        let psi = EulerAngles::new(0.0, 1.1, 0.0).unwrap();
        for (n, m) in [(1usize, 1usize), (2, 1), (3, 2), (4, 2), (5, 1)] {
            let st = named_state(StateKind::Fock, n, Some(m)).unwrap();
            let f = fisher_single_basis(&st, psi, PolarizationBasis::Hv).unwrap();
            let expected = (n as f64) * (1.0 + 2.0 * m as f64) - 2.0 * (m as f64).powi(2);
            assert_abs_diff_eq!(f.entries[(1, 1)], expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn fisher_total_is_sum_of_bases() {
        let st = named_state(StateKind::Hb, 2, None).unwrap();
        let psi = EulerAngles::new(0.5, 1.0, 1.5).unwrap();
        let total = fisher_total(&st, psi).unwrap();
        let mut sum = Matrix3::zeros();
        for &b in &PolarizationBasis::ALL {
            sum += fisher_single_basis(&st, psi, b).unwrap().entries;
        }
        assert!((total.entries - sum).norm() < 1e-12);
    }

    #[test]
    fn hb_total_fisher_is_f22_times_w_total() {
        let st = named_state(StateKind::Hb, 2, None).unwrap();
        let psi = EulerAngles::new(0.7, 1.3, 2.0).unwrap();
        let total = fisher_total(&st, psi).unwrap();
        let [wh, wd, wr] = w_matrices(psi).unwrap();
        let f22 = 2.0 * 4.0 / 2.0; // N(N+2)/2 at N = 2
        let model = (wh + wd + wr) * f22;
        assert!(
            (total.entries - model).norm() < 1e-4,
            "defect {}",
            (total.entries - model).norm()
        );
    }

    #[test]
    fn trace_inverse_local_identity_fisher() {
        let f = FisherMatrix {
            entries: Matrix3::identity() * 4.0,
            parameterization: Parameterization::Euler,
        };
        let psi = EulerAngles::new(0.0, FRAC_PI_2, 0.0).unwrap();
        assert_abs_diff_eq!(trace_inverse_local(&f, psi).unwrap(), 3.0 / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_inverse_local_rejects_singular() {
        let f = FisherMatrix {
            entries: Matrix3::zeros(),
            parameterization: Parameterization::Euler,
        };
        let psi = EulerAngles::new(0.0, 1.0, 0.0).unwrap();
        assert!(trace_inverse_local(&f, psi).is_err());
    }

    #[test]
    fn repetitions_scale_fisher_and_trace() {
        let st = named_state(StateKind::Hb, 2, None).unwrap();
        let psi = EulerAngles::new(0.9, 1.4, 0.3).unwrap();
        let f = fisher_total(&st, psi).unwrap();
        let k = 3.0;
        let fk = FisherMatrix {
            entries: f.entries * k,
            parameterization: Parameterization::Euler,
        };
        let t1 = trace_inverse_local(&f, psi).unwrap();
        let tk = trace_inverse_local(&fk, psi).unwrap();
        assert_abs_diff_eq!(tk, t1 / k, epsilon = 1e-10 * t1);
    }

    #[test]
    fn jacobian_gram_matches_weight_matrix() {
        // JᵀJ must equal V = ½[[1, 0, cosψ2], [0, 1, 0], [cosψ2, 0, 1]],
        // so Tr(F_local⁻¹) agrees with the weighted Euler-chart trace.
        for (p1, p2, p3) in [(0.3, 1.1, 2.0), (2.7, 0.4, 5.1), (4.0, 2.9, 0.7)] {
            let psi = EulerAngles::new(p1, p2, p3).unwrap();
            let j = euler_to_local_jacobian(psi);
            let c = psi.psi2.cos();
            let v = Matrix3::new(0.5, 0.0, 0.5 * c, 0.0, 0.5, 0.0, 0.5 * c, 0.0, 0.5);
            assert!((j.transpose() * j - v).norm() < 1e-14);
        }
    }

    #[test]
    fn jacobian_matches_input_side_perturbation() {
        // U†·∂U/∂ψ_k must equal i·Σ_α J[α,k]·σ_α/√2 (finite differences).
        use nalgebra::Matrix2;
        use num_complex::Complex64;
        let sigma = [
            Matrix2::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ),
            Matrix2::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ),
            Matrix2::new(
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ),
        ];
        let psi = EulerAngles::new(0.7, 1.3, 2.1).unwrap();
        let j = euler_to_local_jacobian(psi);
        let u = su2_from_euler(psi).entries;
        let h = 1e-6;
        for k in 0..3 {
            let mut plus = psi.as_array();
            let mut minus = psi.as_array();
            plus[k] += h;
            minus[k] -= h;
            let up = su2_from_euler(EulerAngles { psi1: plus[0], psi2: plus[1], psi3: plus[2] });
            let um = su2_from_euler(EulerAngles { psi1: minus[0], psi2: minus[1], psi3: minus[2] });
            let du = (up.entries - um.entries) / Complex64::new(2.0 * h, 0.0);
            let lhs = u.adjoint() * du;
            let mut rhs = Matrix2::zeros();
            for a in 0..3 {
                rhs += sigma[a]
                    * Complex64::new(0.0, j[(a, k)] / std::f64::consts::SQRT_2);
            }
            assert!((lhs - rhs).norm() < 1e-8, "column {k}: defect {}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn fisher_local_trace_matches_weighted_euler_trace() {
        let st = named_state(StateKind::Hb, 4, None).unwrap();
        let psi = EulerAngles::new(0.9, 1.4, 0.3).unwrap();
        let f = fisher_total(&st, psi).unwrap();
        let fl = fisher_local(&f, psi).unwrap();
        assert_eq!(fl.parameterization, Parameterization::Local);
        let direct = fl.entries.try_inverse().unwrap().trace();
        let weighted = trace_inverse_local(&f, psi).unwrap();
        assert_abs_diff_eq!(direct, weighted, epsilon = 1e-10 * weighted);
    }

    #[test]
    fn fisher_local_rejects_gimbal_lock() {
        let st = named_state(StateKind::Hb, 2, None).unwrap();
        let psi = EulerAngles::new(0.9, 1e-9, 0.3).unwrap();
        let f = fisher_total(&st, psi).unwrap();
        assert!(fisher_local(&f, psi).is_err());
    }

    #[test]
    fn mle_zero_noise_fixed_point() {
        // With exact probabilities as frequencies the MLE must sit at truth.
        let st = named_state(StateKind::Hb, 2, None).unwrap();
        let psi = EulerAngles::new(0.8, 1.2, 2.5).unwrap();
        let counts: [Vec<f64>; 3] = [
            outcome_probs(&st, basis_euler(psi, PolarizationBasis::Hv)),
            outcome_probs(&st, basis_euler(psi, PolarizationBasis::Da)),
            outcome_probs(&st, basis_euler(psi, PolarizationBasis::Rl)),
        ];
        let est = fit_mle(&st, &counts, EulerAngles::new(0.85, 1.15, 2.45).unwrap()).unwrap();
        assert_abs_diff_eq!(est.psi1, psi.psi1, epsilon = 1e-6);
        assert_abs_diff_eq!(est.psi2, psi.psi2, epsilon = 1e-6);
        assert_abs_diff_eq!(est.psi3, psi.psi3, epsilon = 1e-6);
    }
}
