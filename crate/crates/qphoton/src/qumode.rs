//! Measurement statistics of the power-of-one-qumode model: Gaussian-mixture
//! momentum densities of a squeezed probe coupled to a target unitary,
//! normalized-trace estimation, phase-estimation success probabilities,
//! eigenvector posteriors, and integer factoring via order finding.
//!
//! Units: the probe position scale x0 is fixed to 1 and the momentum variable
//! is the rescaled p_E, so the density depends only on the product s0·τ.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Squeezed (s0 > 1) or coherent (s0 = 1) probe driving the measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QumodeProbe {
    /// Momentum-quadrature squeezing factor, ≥ 1 (1 = coherent probe).
    pub s0: f64,
    /// Gate running time τ > 0 in units of x0 = 1.
    pub tau: f64,
    /// Target register size n (dimension 2^n), informational.
    pub n_qubits: u32,
}

impl QumodeProbe {
    /// Builds a probe, validating s0 ≥ 1 and τ > 0.
    pub fn new(s0: f64, tau: f64, n_qubits: u32) -> Result<Self> {
        if !(s0 >= 1.0) {
            return Err(Error::Domain(format!("s0 = {s0} < 1")));
        }
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau = {tau} ≤ 0")));
        }
        Ok(Self { s0, tau, n_qubits })
    }

    /// The width product s0·τ controlling every Gaussian in the model.
    pub fn s0_tau(&self) -> f64 {
        self.s0 * self.tau
    }
}

/// Multiset of unitary eigenphases with integer multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseSpectrum {
    /// (phase in radians, multiplicity ≥ 1) pairs.
    pub entries: Vec<(f64, u64)>,
    /// Total dimension (2^n for a register, N−1 for factoring).
    pub dim: u64,
}

impl EigenphaseSpectrum {
    /// Builds a spectrum, checking Σ multiplicities = dim.
    pub fn new(entries: Vec<(f64, u64)>, dim: u64) -> Result<Self> {
        let total: u64 = entries.iter().map(|&(_, w)| w).sum();
        if total != dim || entries.iter().any(|&(_, w)| w == 0) {
            return Err(Error::Domain(format!(
                "multiplicities sum to {total}, expected {dim}"
            )));
        }
        Ok(Self { entries, dim })
    }

    /// The exact normalized trace Σ c_m e^{iφ_m} / dim.
    pub fn normalized_trace(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(phi, w) in &self.entries {
            acc += Complex64::new(0.0, phi).exp() * w as f64;
        }
        acc / self.dim as f64
    }
}

/// Momentum probability density of the probe after coupling to the target:
/// P(p_E) = (s0τ/(dim·√π)) Σ_m c_m exp(−(s0τ)²(p_E − φ_m)²).
#[derive(Debug, Clone)]
pub struct MomentumPdf {
    spectrum: EigenphaseSpectrum,
    s0_tau: f64,
}

impl MomentumPdf {
    /// Evaluates the density at `p_e`.
    pub fn density(&self, p_e: f64) -> f64 {
        let st = self.s0_tau;
        let mut acc = 0.0;
        for &(phi, w) in &self.spectrum.entries {
            acc += w as f64 * (-(st * (p_e - phi)).powi(2)).exp();
        }
        st / (self.spectrum.dim as f64 * std::f64::consts::PI.sqrt()) * acc
    }
}

/// Builds the momentum density evaluator for a spectrum and probe.
pub fn momentum_pdf(spec: &EigenphaseSpectrum, probe: &QumodeProbe) -> MomentumPdf {
    MomentumPdf { spectrum: spec.clone(), s0_tau: probe.s0_tau() }
}

/// A reproducible batch of momentum samples.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    /// Sampled p_E values.
    pub values: Vec<f64>,
    /// Seed that produced the batch.
    pub seed: u64,
}

/// Draws i.i.d. samples from the Gaussian mixture: component m with
/// probability c_m/dim, then a Gaussian of standard deviation 1/(√2·s0τ)
/// centered on φ_m. Deterministic per seed.
pub fn sample_momentum(
    spec: &EigenphaseSpectrum,
    probe: &QumodeProbe,
    shots: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if shots == 0 {
        return Err(Error::Domain("shots must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = 1.0 / (std::f64::consts::SQRT_2 * probe.s0_tau());
    let dim = spec.dim as f64;
    let mut values = Vec::with_capacity(shots);
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * dim;
        let mut acc = 0.0;
        let mut center = spec.entries[spec.entries.len() - 1].0;
        for &(phi, w) in &spec.entries {
            acc += w as f64;
            if u < acc {
                center = phi;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        values.push(center + sigma * z);
    }
    Ok(SampleBatch { values, seed })
}

/// Bias-corrected normalized-trace estimate plus its analytic target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEstimate {
    /// e^{1/(4s0²)} · mean(e^{ip_E}) over the batch.
    pub estimate: Complex64,
    /// Exact Σ c_m e^{iφ_m} / dim.
    pub analytic: Complex64,
    /// Number of samples used.
    pub shots: usize,
}

/// Estimates the normalized trace Tr(U)/dim from momentum samples (τ = 1
/// trace-mode convention): the Gaussian blur multiplies the characteristic
/// function by e^{−1/(4s0²)}, which is divided back out.
pub fn estimate_trace(
    spec: &EigenphaseSpectrum,
    probe: &QumodeProbe,
    shots: usize,
    seed: u64,
) -> Result<TraceEstimate> {
    let batch = sample_momentum(spec, probe, shots, seed)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &p in &batch.values {
        acc += Complex64::new(0.0, p).exp();
    }
    acc /= shots as f64;
    let bias = (1.0 / (4.0 * probe.s0 * probe.s0)).exp();
    Ok(TraceEstimate {
        estimate: acc * bias,
        analytic: spec.normalized_trace(),
        shots,
    })
}

/// Shots sufficient for additive error δ on the normalized trace:
/// ⌈F(s0)/δ²⌉ with F(s0) = sinh(1/(2s0²)) + e^{−1/(2s0²)}.
pub fn trace_shots_for_error(s0: f64, delta: f64) -> usize {
    let x = 1.0 / (2.0 * s0 * s0);
    ((x.sinh() + (-x).exp()) / (delta * delta)).ceil() as usize
}

/// Probability that the measured phase bin matches the true eigenphase:
/// erf(s0·τ·Δ_E) for level spacing Δ_E.
pub fn phase_success_prob(probe: &QumodeProbe, delta_e: f64) -> Result<f64> {
    if !(delta_e > 0.0) {
        return Err(Error::Domain(format!("delta_e = {delta_e} ≤ 0")));
    }
    Ok(erf(probe.s0_tau() * delta_e))
}

/// The dimensionless time-energy product T_bound·τ·s0·Δ_E; the model requires
/// it to be ≳ 1, with the constant left unspecified, so it is reported rather
/// than enforced.
pub fn time_energy_product(probe: &QumodeProbe, t_bound: f64, delta_e: f64) -> f64 {
    t_bound * probe.s0_tau() * delta_e
}

/// Posterior weights over spectrum components given one momentum outcome:
/// weight_m ∝ c_m·exp(−(s0τ)²(p_E − φ_m)²), normalized.
pub fn eigen_posterior(spec: &EigenphaseSpectrum, probe: &QumodeProbe, p_e: f64) -> Vec<f64> {
    let st2 = probe.s0_tau().powi(2);
    // Shift exponents by the maximum for numerical stability at large s0τ.
    let logs: Vec<f64> = spec
        .entries
        .iter()
        .map(|&(phi, w)| (w as f64).ln() - st2 * (p_e - phi).powi(2))
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Cycle decomposition of l ↦ l·q mod N on {1, …, N−1} and the eigenphase
/// spectrum it induces.
#[derive(Debug, Clone)]
pub struct ModCycles {
    /// (representative element, cycle length) pairs.
    pub cycles: Vec<(u64, u64)>,
    /// Eigenphases 2π·m_d/r_d with multiplicities accumulated over reduced
    /// fractions.
    pub spectrum: EigenphaseSpectrum,
    /// Multiplicative order of q modulo N (lcm of the cycle lengths).
    pub order: u64,
    /// Set when gcd(q, N) > 1: the gcd itself, an immediate factor.
    pub shortcut_factor: Option<u64>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Decomposes the multiplication-by-q permutation into cycles. Each cycle of
/// length r_d contributes eigenphases 2π·m_d/r_d (m_d = 0..r_d−1); weights of
/// equal reduced fractions m/r are accumulated.
pub fn mod_cycles(n_comp: u64, q: u64) -> Result<ModCycles> {
    if n_comp < 3 || q <= 1 || q >= n_comp {
        return Err(Error::Domain(format!("need 1 < q < N, got q = {q}, N = {n_comp}")));
    }
    let g = gcd(q, n_comp);
    if g != 1 {
        return Ok(ModCycles {
            cycles: Vec::new(),
            spectrum: EigenphaseSpectrum::new(vec![(0.0, n_comp - 1)], n_comp - 1)?,
            order: 1,
            shortcut_factor: Some(g),
        });
    }
    let n = n_comp as usize;
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    let mut order = 1u64;
    // Accumulate weights on reduced fractions (num, den) of m_d/r_d.
    let mut weights: std::collections::BTreeMap<(u64, u64), u64> = std::collections::BTreeMap::new();
    for start in 1..n_comp {
        if visited[start as usize] {
            continue;
        }
        let mut len = 0u64;
        let mut l = start;
        loop {
            visited[l as usize] = true;
            len += 1;
            l = l * q % n_comp;
            if l == start {
                break;
            }
        }
        cycles.push((start, len));
        order = lcm(order, len);
        for m_d in 0..len {
            let g = gcd(m_d, len);
            *weights.entry((m_d / g, len / g)).or_insert(0) += 1;
        }
    }
    let entries: Vec<(f64, u64)> = weights
        .iter()
        .map(|(&(num, den), &w)| (std::f64::consts::TAU * num as f64 / den as f64, w))
        .collect();
    let spectrum = EigenphaseSpectrum::new(entries, n_comp - 1)?;
    Ok(ModCycles { cycles, spectrum, order, shortcut_factor: None })
}

/// Best rational approximation m/r of `x` ∈ [0, 1) with r ≤ `denom_max`,
/// from the continued-fraction convergents. Exact recovery is guaranteed when
/// |x − m/r| ≤ 1/(2·denom_max²).
pub fn continued_fraction(x: f64, denom_max: u64) -> (u64, u64) {
    debug_assert!((0.0..1.0).contains(&x));
    let mut best = (0u64, 1u64);
    let mut best_err = x.abs();
    // Convergent recurrence on the continued-fraction digits of x.
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, 0u64, 1u64); // p/q: h_{-2}, h_{-1}
    let mut frac = x;
    for _ in 0..64 {
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !(a >= 0.0) || a > u64::MAX as f64 {
            break;
        }
        let a = a as u64;
        let p2 = match a.checked_mul(p1).and_then(|v| v.checked_add(p0)) {
            Some(v) => v,
            None => break,
        };
        let q2 = match a.checked_mul(q1).and_then(|v| v.checked_add(q0)) {
            Some(v) => v,
            None => break,
        };
        if q2 > denom_max {
            break;
        }
        let err = (x - p2 as f64 / q2 as f64).abs();
        if err < best_err {
            best = (p2, q2);
            best_err = err;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        frac = inv - a as f64;
    }
    best
}

/// One round of the factoring loop (for transcripts).
#[derive(Debug, Clone)]
pub struct FactorRound {
    pub round: usize,
    /// Random base q used this round.
    pub q: u64,
    /// Sampled momentum value.
    pub p_e: f64,
    /// Continued-fraction output (m, r).
    pub cf: (u64, u64),
    /// What happened: the candidate order and the resolution.
    pub note: String,
    /// Factor found this round, if any.
    pub factor: Option<u64>,
}

/// Result of the order-finding factoring loop.
#[derive(Debug, Clone)]
pub struct FactorOutcome {
    /// A nontrivial factor of N, or `None` if every round failed.
    pub factor: Option<u64>,
    /// Rounds consumed.
    pub rounds_used: usize,
    /// Per-round transcript.
    pub transcript: Vec<FactorRound>,
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns a factor when N is even or a perfect prime power (the classical
/// preconditions of order-finding).
fn classical_shortcut(n: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    // Perfect power check: n = b^k for some k ≥ 2.
    for k in 2..=n.ilog2() {
        let b = (n as f64).powf(1.0 / k as f64).round() as u64;
        for cand in b.saturating_sub(1)..=b + 1 {
            if cand >= 2 && cand.pow(k) == n {
                return Some(cand);
            }
        }
    }
    None
}

/// Factors an odd composite N by sampling eigenphases of the
/// multiplication-by-q operator, recovering the order r via continued
/// fractions, and applying the standard gcd(q^{r/2} ± 1, N) split.
///
/// Each round draws a fresh coprime base q (uniform over coprime residues)
/// and one momentum sample; a gcd(q, N) > 1 draw counts as a flagged
/// classical success.
pub fn factor(
    n_comp: u64,
    probe: &QumodeProbe,
    seed: u64,
    max_rounds: usize,
) -> Result<FactorOutcome> {
    if n_comp < 4 {
        return Err(Error::Domain(format!("N = {n_comp} is not composite")));
    }
    if is_prime(n_comp) {
        return Err(Error::Domain(format!("N = {n_comp} is prime")));
    }
    if let Some(f) = classical_shortcut(n_comp) {
        return Ok(FactorOutcome {
            factor: Some(f),
            rounds_used: 0,
            transcript: vec![FactorRound {
                round: 0,
                q: 0,
                p_e: 0.0,
                cf: (0, 1),
                note: "even or prime power: classical shortcut".into(),
                factor: Some(f),
            }],
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = Vec::new();
    for round in 1..=max_rounds {
        let q = rng.gen_range(2..n_comp);
        if gcd(q, n_comp) != 1 {
            let f = gcd(q, n_comp);
            transcript.push(FactorRound {
                round,
                q,
                p_e: 0.0,
                cf: (0, 1),
                note: "gcd(q, N) > 1: classical factor".into(),
                factor: Some(f),
            });
            return Ok(FactorOutcome { factor: Some(f), rounds_used: round, transcript });
        }
        let cycles = mod_cycles(n_comp, q)?;
        let batch = sample_momentum(&cycles.spectrum, probe, 1, seed.wrapping_add(round as u64))?;
        let p_e = batch.values[0];
        let x = (p_e / std::f64::consts::TAU).rem_euclid(1.0);
        let (m, r) = continued_fraction(x, n_comp);
        let mut note;
        let mut found = None;
        if r >= 2 && r % 2 == 0 {
            let half = pow_mod(q, r / 2, n_comp);
            if half != 1 && half != n_comp - 1 {
                for cand in [gcd(half + 1, n_comp), gcd(half + n_comp - 1, n_comp)] {
                    if cand > 1 && cand < n_comp && n_comp % cand == 0 {
                        found = Some(cand);
                        break;
                    }
                }
                note = if found.is_some() {
                    format!("r = {r}: split succeeded")
                } else {
                    format!("r = {r}: gcd split trivial")
                };
            } else {
                note = format!("r = {r}: q^(r/2) ≡ ±1, unusable");
            }
        } else {
            note = format!("r = {r}: odd or trivial order candidate");
        }
        if pow_mod(q, r.max(1), n_comp) != 1 {
            note.push_str(" (candidate r does not divide the true order)");
        }
        transcript.push(FactorRound { round, q, p_e, cf: (m, r), note, factor: found });
        if let Some(f) = found {
            return Ok(FactorOutcome { factor: Some(f), rounds_used: round, transcript });
        }
    }
    Ok(FactorOutcome { factor: None, rounds_used: max_rounds, transcript })
}
