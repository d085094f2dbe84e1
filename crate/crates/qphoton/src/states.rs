//! Two-mode Fock-state algebra, SU(2)/Euler machinery, Wigner d-matrices,
//! photon↔spin reduced-state extraction, and number-counting outcome
//! probabilities.
//!
//! A pure N-photon two-mode state is stored as the amplitude vector `c_M`
//! over the Fock basis |M, N−M⟩. Under the photon↔spin mapping the state is
//! the symmetric spin-N/2 state with J_z eigenvalue m = M − N/2, which is why
//! all process probabilities reduce to Wigner d-matrix elements.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex unit `i`.
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut y = x % tau;
    if y < 0.0 {
        y += tau;
    }
    // `% tau` can return exactly tau through rounding of tiny negatives.
    if y >= tau {
        y -= tau;
    }
    y
}

/// Wraps an angle difference into `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = wrap_2pi(x);
    if y > std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Pure N-photon state of two bosonic modes: amplitudes `c_M` over |M, N−M⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModePureState {
    /// Total photon number N.
    pub n_total: usize,
    /// Complex amplitudes `c_M` for M = 0..=N (M photons in mode a).
    pub amplitudes: Vec<Complex64>,
}

impl TwoModePureState {
    /// Builds a state, checking length and normalization (1e−12).
    pub fn new(n_total: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != n_total + 1 {
            return Err(Error::Domain(format!(
                "amplitude vector has length {}, expected {}",
                amplitudes.len(),
                n_total + 1
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "state is not normalized: Σ|c|² = {norm2}"
            )));
        }
        Ok(Self { n_total, amplitudes })
    }
}

/// Euler angles (ψ1, ψ2, ψ3) of the decomposition U = e^{iψ3Jz} e^{−iψ2Jy} e^{iψ1Jz}
/// (ψ1 innermost, as in [`su2_from_euler`]).
///
/// Canonical ranges are ψ1, ψ3 ∈ [0, 2π) and ψ2 ∈ [0, π]; [`EulerAngles::new`]
/// canonicalizes. The fields are public so that numerical code (finite
/// differences) can step slightly outside the canonical box where the
/// trigonometric formulas remain well defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
}

impl EulerAngles {
    /// Builds canonical angles: ψ1, ψ3 wrapped mod 2π; ψ2 must lie in [0, π]
    /// (a tolerance of 1e−12 outside is clamped).
    pub fn new(psi1: f64, psi2: f64, psi3: f64) -> Result<Self> {
        if !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&psi2) {
            return Err(Error::Domain(format!("psi2 = {psi2} outside [0, π]")));
        }
        Ok(Self {
            psi1: wrap_2pi(psi1),
            psi2: psi2.clamp(0.0, std::f64::consts::PI),
            psi3: wrap_2pi(psi3),
        })
    }

    /// Angles as an array `[ψ1, ψ2, ψ3]`.
    pub fn as_array(&self) -> [f64; 3] {
        [self.psi1, self.psi2, self.psi3]
    }
}

/// A 2×2 special-unitary matrix (the photon-mode process in matrix form).
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Matrix {
    /// Matrix entries, row major.
    pub entries: Matrix2<Complex64>,
}

impl Su2Matrix {
    /// Wraps a matrix, checking unitarity and det = 1 within 1e−10.
    pub fn new(entries: Matrix2<Complex64>) -> Result<Self> {
        let gram = entries.adjoint() * entries;
        let defect = (gram - Matrix2::identity()).norm();
        if defect > 1e-10 {
            return Err(Error::Domain(format!("matrix not unitary: defect {defect}")));
        }
        let det = entries.determinant();
        if (det - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Domain(format!("determinant {det} ≠ 1")));
        }
        Ok(Self { entries })
    }
}

/// Measurement (polarization) basis of the three-basis protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarizationBasis {
    /// The computational (horizontal/vertical) basis.
    Hv,
    /// Diagonal/antidiagonal basis.
    Da,
    /// Right/left circular basis.
    Rl,
}

impl PolarizationBasis {
    /// All three bases in protocol order.
    pub const ALL: [PolarizationBasis; 3] =
        [PolarizationBasis::Hv, PolarizationBasis::Da, PolarizationBasis::Rl];
}

/// One- or two-particle reduced state in the spin picture (dim 2 or 4).
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpinState {
    /// 2 for single-particle, 4 for two-particle.
    pub dim: usize,
    /// Hermitian density matrix. The two-particle matrix is ordered
    /// {|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩} with ↑ ≡ one photon in mode a.
    pub matrix: DMatrix<Complex64>,
}

impl ReducedSpinState {
    fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > 1e-12 {
            return Err(Error::Numerical(format!(
                "reduced state not Hermitian: defect {herm}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "reduced state trace {trace} ≠ 1"
            )));
        }
        Ok(Self { dim, matrix })
    }
}

// ---------------------------------------------------------------------------
// Wigner rotation machinery
// ---------------------------------------------------------------------------

/// Matrix of exp(iβ J_y) in the |j, m⟩ basis ordered m = j, j−1, …, −j.
///
/// `two_j` is the doubled angular momentum 2j. Computation: J_y is similar to
/// a real symmetric tridiagonal matrix via the diagonal phase D = diag(i^k),
/// so exp(iβ J_y) = D† · V e^{iβΛ} Vᵀ · D from one real symmetric
/// eigendecomposition — no factorial sums, stable for large j.
pub(crate) fn rot_y_plus(two_j: usize, beta: f64) -> DMatrix<Complex64> {
    let dim = two_j + 1;
    // Real symmetric image of J_y: off-diagonal s_k = −√(k(2j+1−k))/2.
    let mut s = DMatrix::<f64>::zeros(dim, dim);
    for k in 1..dim {
        let v = -0.5 * ((k as f64) * ((two_j + 1 - k) as f64)).sqrt();
        s[(k - 1, k)] = v;
        s[(k, k - 1)] = v;
    }
    let eig = s.symmetric_eigen();
    // E = V diag(e^{iβλ}) Vᵀ, then undo the phase similarity.
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    let phases: Vec<Complex64> =
        eig.eigenvalues.iter().map(|&l| (I * beta * l).exp()).collect();
    for r in 0..dim {
        for c in 0..dim {
            let mut e = Complex64::new(0.0, 0.0);
            for v in 0..dim {
                e += phases[v] * eig.eigenvectors[(r, v)] * eig.eigenvectors[(c, v)];
            }
            // D† on the left (row phase (−i)^r), D on the right (col phase i^c).
            let phase = I.powi(c as i32 - r as i32);
            out[(r, c)] = phase * e;
        }
    }
    out
}

/// Wigner d-matrix element d^j_{m_out, m_in}(β) = ⟨j, m_out| e^{−iβJ_y} |j, m_in⟩.
///
/// Quantum numbers are passed as doubled integers (`two_j` = 2j etc.) so that
/// half-integer spins need no floating-point encoding.
pub fn wigner_d(two_j: usize, two_m_out: i64, two_m_in: i64, beta: f64) -> Result<f64> {
    let tj = two_j as i64;
    for &tm in &[two_m_out, two_m_in] {
        if tm.abs() > tj {
            return Err(Error::Domain(format!("|2m| = {} exceeds 2j = {tj}", tm.abs())));
        }
        if (tj - tm) % 2 != 0 {
            return Err(Error::Domain(format!(
                "2m = {tm} has wrong parity for 2j = {tj}"
            )));
        }
    }
    let rot = rot_y_plus(two_j, -beta);
    let k_out = ((tj - two_m_out) / 2) as usize;
    let k_in = ((tj - two_m_in) / 2) as usize;
    Ok(rot[(k_out, k_in)].re)
}

// ---------------------------------------------------------------------------
// SU(2) ↔ Euler
// ---------------------------------------------------------------------------

/// SU(2) matrix of the Euler angles:
/// M = [[e^{i(ψ1+ψ3)/2} cos(ψ2/2), −e^{i(ψ3−ψ1)/2} sin(ψ2/2)],
///      [e^{−i(ψ3−ψ1)/2} sin(ψ2/2), e^{−i(ψ1+ψ3)/2} cos(ψ2/2)]].
pub fn su2_from_euler(psi: EulerAngles) -> Su2Matrix {
    let half_sum = 0.5 * (psi.psi1 + psi.psi3);
    let half_dif = 0.5 * (psi.psi3 - psi.psi1);
    let c = (0.5 * psi.psi2).cos();
    let s = (0.5 * psi.psi2).sin();
    let entries = Matrix2::new(
        (I * half_sum).exp() * c,
        -(I * half_dif).exp() * s,
        (-I * half_dif).exp() * s,
        (-I * half_sum).exp() * c,
    );
    // Unitary with det = 1 by construction.
    Su2Matrix { entries }
}

/// Result of [`euler_from_su2`]: recovered angles plus a gimbal-lock flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecomposition {
    /// Recovered canonical angles.
    pub angles: EulerAngles,
    /// True when ψ2 ∈ {0, π}: only one of ψ1±ψ3 is determined, and the
    /// convention ψ3 = 0 is applied to the free angle.
    pub degenerate: bool,
}

/// Recovers Euler angles from an SU(2) matrix.
///
/// ψ2 = 2·acos(|m₁₁|); ψ1 and ψ3 follow from arg(m₁₁) = (ψ1+ψ3)/2 and
/// arg(m₂₁) = (ψ1−ψ3)/2 (both sin and cos of ψ2/2 are nonnegative on the
/// canonical range, so no quadrant correction beyond the principal args is
/// needed). The result reproduces the input up to the global half-angle sign:
/// su2_from_euler(result) = ±m.
pub fn euler_from_su2(m: &Su2Matrix) -> EulerDecomposition {
    let m11 = m.entries[(0, 0)];
    let m21 = m.entries[(1, 0)];
    let a = m11.norm().clamp(0.0, 1.0);
    let psi2 = 2.0 * a.acos();
    const DEGEN: f64 = 1e-9;
    if a <= DEGEN {
        // ψ2 = π: only ψ1 − ψ3 is fixed; convention ψ3 = 0.
        let angles = EulerAngles {
            psi1: wrap_2pi(2.0 * m21.arg()),
            psi2: std::f64::consts::PI,
            psi3: 0.0,
        };
        return EulerDecomposition { angles, degenerate: true };
    }
    if a >= 1.0 - DEGEN {
        // ψ2 = 0: only ψ1 + ψ3 is fixed; convention ψ3 = 0.
        let angles = EulerAngles {
            psi1: wrap_2pi(2.0 * m11.arg()),
            psi2: 0.0,
            psi3: 0.0,
        };
        return EulerDecomposition { angles, degenerate: true };
    }
    let half_sum = m11.arg();
    let half_dif = m21.arg();
    let angles = EulerAngles {
        psi1: wrap_2pi(half_sum + half_dif),
        psi2,
        psi3: wrap_2pi(half_sum - half_dif),
    };
    EulerDecomposition { angles, degenerate: false }
}

// ---------------------------------------------------------------------------
// Named probe states
// ---------------------------------------------------------------------------

/// Families of probe states used throughout the estimation analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// (|N,0⟩ + |0,N⟩)/√2.
    Noon,
    /// Twin Fock |N/2, N/2⟩ (Holland-Burnett).
    Hb,
    /// (|N/2−1, N/2+1⟩ + |N/2+1, N/2−1⟩)/√2.
    YurkeA,
    /// (|N/2+1, N/2−1⟩ + |N/2, N/2⟩)/√2.
    YurkeB,
    /// |M, N−M⟩.
    Fock,
    /// (|M, N−M⟩ + |N−M, M⟩)/√2, collapsing to |M, M⟩ when M = N−M.
    SymmetricPair,
}

/// Constructs one of the named probe states.
///
/// `m` is required for `Fock` and `SymmetricPair` and ignored otherwise.
pub fn named_state(kind: StateKind, n: usize, m: Option<usize>) -> Result<TwoModePureState> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut c = vec![zero; n + 1];
    match kind {
        StateKind::Noon => {
            if n == 0 {
                return Err(Error::Domain("NOON state needs N ≥ 1".into()));
            }
            c[0] = inv_sqrt2;
            c[n] = inv_sqrt2;
        }
        StateKind::Hb => {
            if n == 0 || n % 2 != 0 {
                return Err(Error::Domain(format!("HB state needs even N ≥ 2, got {n}")));
            }
            c[n / 2] = one;
        }
        StateKind::YurkeA => {
            if n < 2 || n % 2 != 0 {
                return Err(Error::Domain(format!("Yurke state needs even N ≥ 2, got {n}")));
            }
            c[n / 2 - 1] = inv_sqrt2;
            c[n / 2 + 1] = inv_sqrt2;
        }
        StateKind::YurkeB => {
            if n < 2 || n % 2 != 0 {
                return Err(Error::Domain(format!("Yurke state needs even N ≥ 2, got {n}")));
            }
            c[n / 2 + 1] = inv_sqrt2;
            c[n / 2] = inv_sqrt2;
        }
        StateKind::Fock => {
            let m = m.ok_or_else(|| Error::Domain("Fock state needs M".into()))?;
            if m > n {
                return Err(Error::Domain(format!("M = {m} exceeds N = {n}")));
            }
            c[m] = one;
        }
        StateKind::SymmetricPair => {
            let m = m.ok_or_else(|| Error::Domain("SymmetricPair needs M".into()))?;
            if m > n {
                return Err(Error::Domain(format!("M = {m} exceeds N = {n}")));
            }
            if 2 * m == n {
                c[m] = one;
            } else {
                c[m] = inv_sqrt2;
                c[n - m] = inv_sqrt2;
            }
        }
    }
    TwoModePureState::new(n, c)
}

// ---------------------------------------------------------------------------
// Outcome probabilities
// ---------------------------------------------------------------------------

/// Number-counting outcome probabilities after the process U(ψ):
/// P(M′) = |Σ_M c_M e^{i(ψ3 m′ + ψ1 m)} ⟨m′| e^{−iψ2 J_y} |m⟩|² with
/// m = M − N/2, m′ = M′ − N/2.
///
/// ψ1 is the innermost z-phase and ψ3 the outermost, and the middle rotation
/// carries the −iψ2J_y sign: these are the choices consistent with
/// [`su2_from_euler`] acting on a single photon (tested against the 2×2
/// route for N = 1). Only moduli enter, so the global phase of the amplitude
/// is irrelevant.
pub fn outcome_probs(state: &TwoModePureState, psi: EulerAngles) -> Vec<f64> {
    let n = state.n_total;
    // The middle factor of the process unitary is e^{−iψ2 J_y} in the
    // m-descending basis, matching `su2_from_euler` at n = 1.
    let rot = rot_y_plus(n, -psi.psi2);
    let mut probs = vec![0.0; n + 1];
    for m_out in 0..=n {
        let k_out = n - m_out;
        let two_m_out = 2.0 * m_out as f64 - n as f64;
        let mut amp = Complex64::new(0.0, 0.0);
        for m_in in 0..=n {
            let k_in = n - m_in;
            let two_m_in = 2.0 * m_in as f64 - n as f64;
            // ψ1 is the innermost z-phase and ψ3 the outermost, matching the
            // 2×2 matrix convention.
            let phase = (I * 0.5 * (psi.psi3 * two_m_out + psi.psi1 * two_m_in)).exp();
            amp += state.amplitudes[m_in] * phase * rot[(k_out, k_in)];
        }
        probs[m_out] = amp.norm_sqr();
    }
    probs
}

// ---------------------------------------------------------------------------
// Correlators and reduced states
// ---------------------------------------------------------------------------

/// Expectation ⟨a†^p b†^q a^u b^v⟩ for a number-conserving monomial
/// (p + q = u + v). Falling-factorial products keep everything in f64.
pub(crate) fn expect_monomial(
    state: &TwoModePureState,
    p: usize,
    q: usize,
    u: usize,
    v: usize,
) -> Complex64 {
    debug_assert_eq!(p + q, u + v, "monomial must conserve photon number");
    let n = state.n_total;
    let falling = |x: usize, k: usize| -> f64 {
        (0..k).map(|i| (x - i) as f64).product()
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..=n {
        if m < u || n - m < v {
            continue;
        }
        let m2 = m - u + p;
        let b2 = n - m - v + q;
        if m2 + b2 != n || m2 > n {
            continue;
        }
        // a^u b^v then a†^p b†^q on |M, N−M⟩.
        let f_down = falling(m, u) * falling(n - m, v);
        let f_up = falling(m2, p) * falling(b2, q);
        acc += state.amplitudes[m2].conj() * state.amplitudes[m] * (f_down * f_up).sqrt();
    }
    acc
}

/// Ladder-operator expectation values of a probe state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlators {
    /// ⟨a†a⟩.
    pub n_a: f64,
    /// ⟨b†b⟩.
    pub n_b: f64,
    /// ⟨a†b⟩.
    pub ab: Complex64,
    /// ⟨a†a†ab⟩.
    pub aaab: Complex64,
    /// ⟨a†a†bb⟩.
    pub aabb: Complex64,
    /// ⟨a†b†bb⟩.
    pub abbb: Complex64,
    /// ⟨(a†a)²⟩.
    pub na2: f64,
    /// ⟨(a†a)(b†b)⟩.
    pub nanb: f64,
}

/// Computes the first- and second-order correlators that drive the reduced
/// states and the saturation/optimality predicates.
pub fn correlators(state: &TwoModePureState) -> Correlators {
    let n_a = expect_monomial(state, 1, 0, 1, 0).re;
    let n_b = expect_monomial(state, 0, 1, 0, 1).re;
    Correlators {
        n_a,
        n_b,
        ab: expect_monomial(state, 1, 0, 0, 1),
        aaab: expect_monomial(state, 2, 0, 1, 1),
        aabb: expect_monomial(state, 2, 0, 0, 2),
        abbb: expect_monomial(state, 1, 1, 0, 2),
        na2: expect_monomial(state, 2, 0, 2, 0).re + n_a,
        nanb: expect_monomial(state, 1, 1, 1, 1).re,
    }
}

/// Single-particle reduced state (2×2) in the spin basis {|↑⟩ ≡ a, |↓⟩ ≡ b}:
/// diag(⟨a†a⟩, ⟨b†b⟩)/N with off-diagonal ⟨a†b⟩/N.
pub fn reduced_one(state: &TwoModePureState) -> Result<ReducedSpinState> {
    let n = state.n_total;
    if n == 0 {
        return Err(Error::Domain("reduced_one needs N ≥ 1".into()));
    }
    let nf = n as f64;
    let corr = correlators(state);
    let mut m = DMatrix::<Complex64>::zeros(2, 2);
    m[(0, 0)] = Complex64::new(corr.n_a / nf, 0.0);
    m[(1, 1)] = Complex64::new(corr.n_b / nf, 0.0);
    // Row ↑ / column ↓ entry is ⟨b†a⟩/N; its conjugate sits below.
    m[(0, 1)] = corr.ab.conj() / nf;
    m[(1, 0)] = corr.ab / nf;
    ReducedSpinState::new(m)
}

/// Two-particle reduced state (4×4) in the basis {|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩}.
///
/// Entry ⟨s₁s₂| ρ |t₁t₂⟩ = ⟨A†_{t₁} A†_{t₂} A_{s₂} A_{s₁}⟩ / (N(N−1)) with
/// A_↑ = a, A_↓ = b — the standard second-order reduced density matrix of the
/// symmetric bosonic state, assembled directly from photonic correlators.
pub fn reduced_two(state: &TwoModePureState) -> Result<ReducedSpinState> {
    let n = state.n_total;
    if n < 2 {
        return Err(Error::Domain("reduced_two needs N ≥ 2".into()));
    }
    let scale = 1.0 / (n as f64 * (n - 1) as f64);
    let spins = [(true, true), (true, false), (false, true), (false, false)];
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for (row, &(s1, s2)) in spins.iter().enumerate() {
        for (col, &(t1, t2)) in spins.iter().enumerate() {
            let p = t1 as usize + t2 as usize;
            let q = 2 - p;
            let u = s1 as usize + s2 as usize;
            let v = 2 - u;
            if p + q != u + v {
                continue; // cannot happen; all monomials are 2↑2 here
            }
            m[(row, col)] = expect_monomial(state, p, q, u, v) * scale;
        }
    }
    ReducedSpinState::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn wigner_d_identity_and_half_angle() {
        assert_abs_diff_eq!(wigner_d(1, 1, 1, 0.0).unwrap(), 1.0, epsilon = 1e-12);
        let beta = PI / 3.0;
        assert_abs_diff_eq!(
            wigner_d(1, 1, 1, beta).unwrap(),
            (beta / 2.0).cos(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn wigner_d_spin_one_entry() {
        // d^1_{1,0}(π/2) = −sin(π/2)/√2 = −0.7071…
        assert_abs_diff_eq!(
            wigner_d(2, 2, 0, FRAC_PI_2).unwrap(),
            -std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn wigner_d_matrix_is_orthogonal() {
        for two_j in 1..=8usize {
            let beta = 0.7;
            let dim = two_j + 1;
            let mut d = DMatrix::<f64>::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    let tm_out = two_j as i64 - 2 * r as i64;
                    let tm_in = two_j as i64 - 2 * c as i64;
                    d[(r, c)] = wigner_d(two_j, tm_out, tm_in, beta).unwrap();
                }
            }
            let defect = (&d * d.transpose() - DMatrix::<f64>::identity(dim, dim)).norm();
            assert!(defect < 1e-10, "2j = {two_j}: orthogonality defect {defect}");
        }
    }

    #[test]
    fn wigner_d_rejects_bad_quantum_numbers() {
        assert!(wigner_d(1, 3, 1, 0.1).is_err());
        assert!(wigner_d(2, 1, 0, 0.1).is_err()); // parity mismatch
    }

    #[test]
    fn su2_from_euler_identity_and_pi() {
        let id = su2_from_euler(EulerAngles::new(0.0, 0.0, 0.0).unwrap());
        assert!((id.entries - Matrix2::identity()).norm() < 1e-12);
        let flip = su2_from_euler(EulerAngles::new(0.0, PI, 0.0).unwrap());
        let expected = Matrix2::new(re(0.0), re(-1.0), re(1.0), re(0.0));
        assert!((flip.entries - expected).norm() < 1e-12);
    }

    #[test]
    fn euler_su2_round_trip() {
        let psi = EulerAngles::new(0.3, 1.1, 2.0).unwrap();
        let dec = euler_from_su2(&su2_from_euler(psi));
        assert!(!dec.degenerate);
        assert_abs_diff_eq!(dec.angles.psi1, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.angles.psi2, 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.angles.psi3, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn euler_from_su2_degenerate_branch() {
        let m = Su2Matrix::new(Matrix2::new(re(0.0), re(-1.0), re(1.0), re(0.0))).unwrap();
        let dec = euler_from_su2(&m);
        assert!(dec.degenerate);
        assert_abs_diff_eq!(dec.angles.psi2, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.angles.psi3, 0.0, epsilon = 1e-12);

        let id = Su2Matrix::new(Matrix2::identity()).unwrap();
        let dec = euler_from_su2(&id);
        assert!(dec.degenerate);
        assert_abs_diff_eq!(dec.angles.psi1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.angles.psi2, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn named_states_match_definitions() {
        let noon = named_state(StateKind::Noon, 2, None).unwrap();
        assert_abs_diff_eq!(noon.amplitudes[0].re, std::f64::consts::FRAC_1_SQRT_2);
        assert_abs_diff_eq!(noon.amplitudes[2].re, std::f64::consts::FRAC_1_SQRT_2);
        assert_abs_diff_eq!(noon.amplitudes[1].norm(), 0.0);

        let hb = named_state(StateKind::Hb, 4, None).unwrap();
        assert_abs_diff_eq!(hb.amplitudes[2].re, 1.0);

        let sp = named_state(StateKind::SymmetricPair, 2, Some(1)).unwrap();
        assert_abs_diff_eq!(sp.amplitudes[1].re, 1.0);

        assert!(named_state(StateKind::Hb, 3, None).is_err());
        assert!(named_state(StateKind::YurkeA, 5, None).is_err());
    }

    #[test]
    fn outcome_probs_identity_process() {
        let hb = named_state(StateKind::Hb, 2, None).unwrap();
        let p = outcome_probs(&hb, EulerAngles::new(0.0, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn outcome_probs_single_photon_rotation() {
        let st = named_state(StateKind::Fock, 1, Some(1)).unwrap();
        for &beta in &[0.2, 0.9, 2.4] {
            let p = outcome_probs(&st, EulerAngles::new(0.0, beta, 0.0).unwrap());
            assert_abs_diff_eq!(p[1], (beta / 2.0).cos().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn outcome_probs_noon_diagonal_process() {
        let noon = named_state(StateKind::Noon, 2, None).unwrap();
        for &psi3 in &[0.0, 1.0, 4.2] {
            let p = outcome_probs(&noon, EulerAngles::new(0.0, 0.0, psi3).unwrap());
            assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(p[2], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn outcome_probs_matches_su2_matrix_for_single_photon() {
        // The documented phase convention must agree with the 2×2 matrix route:
        // U|10⟩ = M11|10⟩ + M21|01⟩, U|01⟩ = M12|10⟩ + M22|01⟩.
        let amp = |x: f64, y: f64| Complex64::new(x, y);
        let state = TwoModePureState::new(
            1,
            vec![amp(0.6, 0.0), amp(0.0, 0.8)],
        )
        .unwrap();
        let psi = EulerAngles::new(0.7, 1.3, 2.1).unwrap();
        let m = su2_from_euler(psi).entries;
        // amplitudes ordering: c_0 multiplies |0,1⟩, c_1 multiplies |1,0⟩.
        let out_up = state.amplitudes[1] * m[(0, 0)] + state.amplitudes[0] * m[(0, 1)];
        let out_dn = state.amplitudes[1] * m[(1, 0)] + state.amplitudes[0] * m[(1, 1)];
        let p = outcome_probs(&state, psi);
        assert_abs_diff_eq!(p[1], out_up.norm_sqr(), epsilon = 1e-12);
        assert_abs_diff_eq!(p[0], out_dn.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn correlators_examples() {
        let hb = named_state(StateKind::Hb, 2, None).unwrap();
        let c = correlators(&hb);
        assert_abs_diff_eq!(c.n_a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.n_b, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.ab.norm(), 0.0, epsilon = 1e-12);

        let fock = named_state(StateKind::Fock, 3, Some(3)).unwrap();
        let c = correlators(&fock);
        assert_abs_diff_eq!(c.n_a, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.n_b, 0.0, epsilon = 1e-12);

        let noon1 = named_state(StateKind::Noon, 1, None).unwrap();
        let c = correlators(&noon1);
        assert_abs_diff_eq!(c.ab.re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn reduced_one_examples() {
        let hb = named_state(StateKind::Hb, 4, None).unwrap();
        let r = reduced_one(&hb).unwrap();
        assert!((0..2).all(|i| (r.matrix[(i, i)].re - 0.5).abs() < 1e-12));
        assert!(r.matrix[(0, 1)].norm() < 1e-12);

        let fock = named_state(StateKind::Fock, 3, Some(3)).unwrap();
        let r = reduced_one(&fock).unwrap();
        assert_abs_diff_eq!(r.matrix[(0, 0)].re, 1.0, epsilon = 1e-12);

        let noon1 = named_state(StateKind::Noon, 1, None).unwrap();
        let r = reduced_one(&noon1).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_abs_diff_eq!(r.matrix[(i, j)].re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn reduced_two_traces_to_reduced_one() {
        for (kind, n, m) in [
            (StateKind::Hb, 4, None),
            (StateKind::Noon, 3, None),
            (StateKind::SymmetricPair, 5, Some(1)),
            (StateKind::YurkeB, 4, None),
        ] {
            let st = named_state(kind, n, m).unwrap();
            let r1 = reduced_one(&st).unwrap();
            let r2 = reduced_two(&st).unwrap();
            // Trace out the second slot.
            for a in 0..2 {
                for b in 0..2 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for s in 0..2 {
                        acc += r2.matrix[(2 * a + s, 2 * b + s)];
                    }
                    assert!(
                        (acc - r1.matrix[(a, b)]).norm() < 1e-12,
                        "{kind:?} N={n}: partial trace mismatch at ({a},{b})"
                    );
                }
            }
        }
    }
}

