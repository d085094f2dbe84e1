//! Helpers shared between integration-test binaries.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qphoton::states::TwoModePureState;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Random normalized N-photon state with complex amplitudes uniform in the
/// unit square.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> TwoModePureState {
    let mut amps: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    TwoModePureState::new(n, amps).unwrap()
}

/// Full 2^N-dimensional symmetric-qubit vector: |M, N−M⟩ maps to the Dicke
/// state with M up-spins (↑ ≡ one photon in mode a), so each bitstring with
/// popcount M carries amplitude c_M/√C(N,M).
pub fn symmetric_embedding(state: &TwoModePureState) -> Vec<Complex64> {
    let n = state.n_total;
    (0..1usize << n)
        .map(|bits| {
            let m = bits.count_ones() as usize;
            state.amplitudes[m] / binomial(n, m).sqrt()
        })
        .collect()
}

/// Partial trace of |Ψ⟩⟨Ψ| keeping the lowest `keep` qubits, with spin
/// index 0 ≡ ↑ ≡ bit 1 (matching the {|↑…⟩, …, |↓…⟩} row ordering of the
/// library's reduced states).
pub fn brute_reduced(vector: &[Complex64], n: usize, keep: usize) -> DMatrix<Complex64> {
    let dim = 1usize << keep;
    let rest = 1usize << (n - keep);
    let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for row in 0..dim {
        for col in 0..dim {
            // Spin index s: bit (keep−1−q) of s is the spin of kept qubit q,
            // with 0 ≡ ↑. Qubit q lives at bit q of the full index; flip to
            // get the bit value (↑ is bit 1).
            let kept_bits = |s: usize| -> usize {
                let mut b = 0usize;
                for q in 0..keep {
                    let spin = (s >> (keep - 1 - q)) & 1;
                    b |= (1 - spin) << q;
                }
                b
            };
            let (rb, cb) = (kept_bits(row), kept_bits(col));
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rest {
                let tail = r << keep;
                acc += vector[tail | rb] * vector[tail | cb].conj();
            }
            rho[(row, col)] = acc;
        }
    }
    rho
}
