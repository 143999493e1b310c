#![allow(dead_code)]

use bellopt::quantum::ComplexMatrix2;
use bellopt::{ComplexMatrix4, PulseSequence};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pulse(rng: &mut ChaCha8Rng, slices: usize, duration: f64, amp: f64) -> PulseSequence {
    let amps = (0..slices).map(|_| std::array::from_fn(|_| rng.gen_range(-amp..amp))).collect();
    PulseSequence::new(duration, amps).unwrap()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-random SU(2) from a uniform unit quaternion.
pub fn random_su2(rng: &mut ChaCha8Rng) -> ComplexMatrix2<f64> {
    let q: [f64; 4] = std::array::from_fn(|_| gaussian(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    ComplexMatrix2::new([
        [Complex64::new(a, b), Complex64::new(c, d)],
        [Complex64::new(-c, d), Complex64::new(a, -b)],
    ])
}

/// Haar-random U(4) by Gram-Schmidt on a complex Gaussian matrix.
pub fn random_u4(rng: &mut ChaCha8Rng) -> ComplexMatrix4 {
    let mut cols: Vec<[Complex64; 4]> = (0..4)
        .map(|_| std::array::from_fn(|_| Complex64::new(gaussian(rng), gaussian(rng))))
        .collect();
    for j in 0..4 {
        for k in 0..j {
            let (head, tail) = cols.split_at_mut(j);
            let proj: Complex64 = (0..4).map(|i| head[k][i].conj() * tail[0][i]).sum();
            for i in 0..4 {
                tail[0][i] -= proj * head[k][i];
            }
        }
        let n = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= n;
        }
    }
    let mut m = ComplexMatrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = cols[j][i];
        }
    }
    m
}

pub fn random_local(rng: &mut ChaCha8Rng) -> ComplexMatrix4 {
    random_su2(rng).kron(&random_su2(rng))
}
