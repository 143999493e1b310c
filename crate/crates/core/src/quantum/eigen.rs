//! Cyclic Jacobi eigensolver for 4×4 Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix4;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition `A = V diag(values) V†`, values ascending,
/// eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Copy, Debug)]
pub struct Eigh<T: Real> {
    pub values: [T; 4],
    pub vectors: ComplexMatrix4<T>,
}

impl<T: Real> Eigh<T> {
    pub fn reconstruct(&self) -> ComplexMatrix4<T> {
        self.map_values(|x| Complex::new(x, T::zero()))
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix4<T> {
        let v = &self.vectors;
        let fv: [Complex<T>; 4] = std::array::from_fn(|k| f(self.values[k]));
        let mut out = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex::zero();
                for k in 0..4 {
                    acc = acc + v.data[i][k] * fv[k] * v.data[j][k].conj();
                }
                out.data[i][j] = acc;
            }
        }
        out
    }
}

/// Diagonalize a Hermitian matrix. Only the upper triangle's Hermitian
/// part matters; callers are expected to have validated Hermiticity.
/// Real symmetric input yields real eigenvectors.
pub fn eigh<T: Real>(matrix: &ComplexMatrix4<T>) -> Eigh<T> {
    let mut a = matrix.data;
    // Symmetrize so that rounding in the input cannot leak into the result.
    for i in 0..4 {
        a[i][i] = Complex::new(a[i][i].re, T::zero());
        for j in (i + 1)..4 {
            let avg = (a[i][j] + a[j][i].conj()) * T::lit(0.5);
            a[i][j] = avg;
            a[j][i] = avg.conj();
        }
    }
    let mut v = ComplexMatrix4::<T>::identity().data;

    let scale = matrix.frobenius_norm();
    let floor = T::epsilon() * T::lit(1e-3) * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..4)
            .flat_map(|p| ((p + 1)..4).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q].norm_sqr())
            .sum();
        if off.sqrt() <= floor || off.is_zero() {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let z = a[p][q];
                let mag = z.norm();
                if mag <= floor {
                    continue;
                }
                let w = z.conj() / mag;
                let theta = (a[q][q].re - a[p][p].re) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                // A ← A J
                for row in a.iter_mut() {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = akp * c - akq * w * s;
                    row[q] = akp * s + akq * w * c;
                }
                // A ← J† A
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = apk * c - aqk * w.conj() * s;
                    a[q][k] = apk * s + aqk * w.conj() * c;
                }
                a[p][q] = Complex::zero();
                a[q][p] = Complex::zero();
                a[p][p].im = T::zero();
                a[q][q].im = T::zero();
                // V ← V J
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = vkp * c - vkq * w * s;
                    row[q] = vkp * s + vkq * w * c;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[i][i].re.partial_cmp(&a[j][j].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.map(|k| a[k][k].re);
    let mut vectors = ComplexMatrix4::zeros();
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..4 {
            vectors.data[row][new_col] = v[row][old_col];
        }
    }
    Eigh { values, vectors }
}
