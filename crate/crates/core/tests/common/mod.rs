#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

/// Largest entrywise difference after aligning the global phase of `b` to `a`.
pub fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - y * phase).norm()).fold(0.0, f64::max)
}

pub fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in v.iter_mut() {
        *a /= norm;
    }
}

/// Random normalized state on `n` qubits; with `sparse`, a random subset of
/// the amplitudes is zeroed first.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, sparse: bool) -> Vec<Complex64> {
    let dim = 1 << n;
    loop {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if sparse {
            let keep = rng.random_range(1..=dim);
            for i in 0..dim - keep {
                let j = rng.random_range(0..dim);
                v[(j + i) % dim] = Complex64::new(0.0, 0.0);
            }
        }
        if v.iter().any(|a| a.norm() > 1e-3) {
            normalize(&mut v);
            return v;
        }
    }
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}
