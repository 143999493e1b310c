//! Fixed-size dense complex matrices and two-qubit state vectors.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Dense 2×2 complex matrix (single-spin operator).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix2<T: Real> {
    pub data: [[Complex<T>; 2]; 2],
}

/// Dense 4×4 complex matrix. Row/column order is |00⟩,|01⟩,|10⟩,|11⟩
/// with spin 1 as the left tensor factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix4<T: Real> {
    pub data: [[Complex<T>; 4]; 4],
}

/// Two-qubit pure state in the |00⟩,|01⟩,|10⟩,|11⟩ basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector4<T: Real> {
    pub amplitudes: [Complex<T>; 4],
}

#[inline]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

impl<T: Real> ComplexMatrix2<T> {
    pub fn new(data: [[Complex<T>; 2]; 2]) -> Self {
        Self { data }
    }

    pub fn zeros() -> Self {
        Self::new([[Complex::zero(); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        m.data[0][0] = Complex::one();
        m.data[1][1] = Complex::one();
        m
    }

    pub fn adjoint(&self) -> Self {
        let d = &self.data;
        Self::new([[d[0][0].conj(), d[1][0].conj()], [d[0][1].conj(), d[1][1].conj()]])
    }

    pub fn determinant(&self) -> Complex<T> {
        let d = &self.data;
        d[0][0] * d[1][1] - d[0][1] * d[1][0]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.data.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * s;
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> ComplexMatrix4<T> {
        let mut out = ComplexMatrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.data[2 * i + k][2 * j + l] = self.data[i][j] * rhs.data[k][l];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.data[i][j] - other.data[i][j]).norm());
            }
        }
        m
    }
}

impl<T: Real> Mul for ComplexMatrix2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.data[i][j] = self.data[i][0] * rhs.data[0][j] + self.data[i][1] * rhs.data[1][j];
            }
        }
        out
    }
}

impl<T: Real> ComplexMatrix4<T> {
    pub fn new(data: [[Complex<T>; 4]; 4]) -> Self {
        Self { data }
    }

    pub fn zeros() -> Self {
        Self::new([[Complex::zero(); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.data[i][i] = Complex::one();
        }
        m
    }

    pub fn from_diagonal(diag: [Complex<T>; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, z) in diag.into_iter().enumerate() {
            m.data[i][i] = z;
        }
        m
    }

    /// Build from a row-major slice of 16 entries.
    pub fn from_rows(rows: [[(f64, f64); 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.data[i][j] = c(rows[i][j].0, rows[i][j].1);
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.data[i][j] = self.data[j][i].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.data[i][j] = self.data[j][i];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        for row in out.data.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..4).map(|i| self.data[i][i]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.data.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * s;
            }
        }
        out
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.data[i][j] - other.data[i][j]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> T {
        self.max_abs_diff(&Self::zeros())
    }

    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Determinant by cofactor expansion over 2×2 minors.
    pub fn determinant(&self) -> Complex<T> {
        let m = &self.data;
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        // Laplace expansion along the first two rows.
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut det = Complex::zero();
        for &(a, b) in &pairs {
            let (c, d) = complement(a, b);
            let sign = if (a + b + 1) % 2 == 0 { T::one() } else { -T::one() };
            det = det + minor(0, 1, a, b) * minor(2, 3, c, d) * sign;
        }
        det
    }

    pub fn apply(&self, v: &StateVector4<T>) -> StateVector4<T> {
        let mut out = [Complex::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..4 {
                *o = *o + self.data[i][j] * v.amplitudes[j];
            }
        }
        StateVector4 { amplitudes: out }
    }

    /// Split into the 2×2 blocks `M[2p..2p+2, 2q..2q+2]`.
    pub fn block(&self, p: usize, q: usize) -> ComplexMatrix2<T> {
        let mut b = ComplexMatrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                b.data[i][j] = self.data[2 * p + i][2 * q + j];
            }
        }
        b
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn complement(a: usize, b: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&k| k != a && k != b);
    (rest.next().unwrap(), rest.next().unwrap())
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix4<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i][j]
    }
}

impl<T: Real> Mul for ComplexMatrix4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..4 {
                    out.data[i][j] = out.data[i][j] + a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for ComplexMatrix4<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.data[i][j] = self.data[i][j] + rhs.data[i][j];
            }
        }
        self
    }
}

impl<T: Real> Sub for ComplexMatrix4<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.data[i][j] = self.data[i][j] - rhs.data[i][j];
            }
        }
        self
    }
}

impl<T: Real> Neg for ComplexMatrix4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-T::one())
    }
}

impl<T: Real> StateVector4<T> {
    /// Wrap amplitudes without checking normalization.
    pub fn from_amplitudes(amplitudes: [Complex<T>; 4]) -> Self {
        Self { amplitudes }
    }

    /// Computational basis state |index⟩ (0 = |00⟩ … 3 = |11⟩).
    pub fn basis(index: usize) -> Self {
        let mut a = [Complex::zero(); 4];
        a[index] = Complex::one();
        Self { amplitudes: a }
    }

    /// The singlet (|10⟩ − |01⟩)/√2.
    pub fn singlet() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self {
            amplitudes: [
                Complex::zero(),
                Complex::new(-h, T::zero()),
                Complex::new(h, T::zero()),
                Complex::zero(),
            ],
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let mut out = *self;
        for z in out.amplitudes.iter_mut() {
            *z = *z / n;
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for z in out.amplitudes.iter_mut() {
            *z = *z * s;
        }
        out
    }

    /// |self⟩⟨self|.
    pub fn projector(&self) -> ComplexMatrix4<T> {
        let mut m = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.data[i][j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }
}
