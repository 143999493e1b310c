//! Canonical two-qubit (KAK) decomposition and minimum-time bounds.
//!
//! Every two-qubit unitary factors as `U = V · exp[−i(a_x XX + a_y YY + a_z ZZ)] · W`
//! with local `V`, `W`. In the magic basis local unitaries become real
//! orthogonal matrices and the interaction core becomes diagonal, so the
//! coordinates follow from the spectrum of `Uᵀ_B U_B` and the local factors
//! from its (real) eigenvectors.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::quantum::{eigh, expm_hermitian, ComplexMatrix2, ComplexMatrix4, Hermitian, PauliString};
use crate::Unitary;

/// Chamber inequalities are checked to this tolerance.
pub const CHAMBER_TOL: f64 = 1e-9;
/// Maximum entry-wise reconstruction error accepted from [`kak_factorize`].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

const BOUNDARY_SNAP: f64 = 1e-10;
const EIGENBASIS_MIXES: [f64; 6] = [0.618_033_988_749_895, 1.732_050_807_568_877, -0.414_213_562_373_095, std::f64::consts::E, -PI, std::f64::consts::LOG10_2];

/// Cartan coordinates (radians) in the Weyl chamber π/4 ≥ a_x ≥ a_y ≥ |a_z|,
/// with a_z ≥ 0 whenever a_x = π/4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartanCoordinates {
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
}

impl CartanCoordinates {
    /// Validated chamber point.
    pub fn new(a_x: f64, a_y: f64, a_z: f64) -> Result<Self> {
        let c = Self { a_x, a_y, a_z };
        if !c.in_chamber() {
            return Err(Error::Domain(format!(
                "({a_x}, {a_y}, {a_z}) is outside the Weyl chamber π/4 ≥ a_x ≥ a_y ≥ |a_z|"
            )));
        }
        Ok(c)
    }

    pub fn in_chamber(&self) -> bool {
        let t = CHAMBER_TOL;
        FRAC_PI_4 + t >= self.a_x && self.a_x + t >= self.a_y && self.a_y + t >= self.a_z.abs()
    }

    /// Map arbitrary interaction coefficients to their chamber representative.
    ///
    /// Uses the local symmetries of the core: shifting any coefficient by π/2,
    /// permuting them, and flipping the sign of any two at once.
    pub fn canonicalize(raw: [f64; 3]) -> Self {
        let mut negatives = 0;
        let mut mags = raw.map(|a| {
            let mut r = a - FRAC_PI_2 * (a / FRAC_PI_2).round();
            if r <= -FRAC_PI_4 + BOUNDARY_SNAP {
                r += FRAC_PI_2;
            }
            if r < 0.0 {
                negatives += 1;
            }
            r.abs()
        });
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let [mut a_x, a_y, mut a_z] = mags;
        if negatives % 2 == 1 {
            a_z = -a_z;
        }
        if (a_x - FRAC_PI_4).abs() <= BOUNDARY_SNAP {
            a_x = FRAC_PI_4;
            a_z = a_z.abs();
        }
        if a_z.abs() <= BOUNDARY_SNAP {
            a_z = 0.0;
        }
        Self { a_x, a_y, a_z }
    }

    /// Σ_j |a_j|.
    pub fn interaction_content(&self) -> f64 {
        self.a_x.abs() + self.a_y.abs() + self.a_z.abs()
    }

    /// exp[−i(a_x XX + a_y YY + a_z ZZ)].
    pub fn core_unitary(&self) -> Unitary {
        interaction_core([self.a_x, self.a_y, self.a_z])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a_x, self.a_y, self.a_z]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a_x - other.a_x)
            .abs()
            .max((self.a_y - other.a_y).abs())
            .max((self.a_z - other.a_z).abs())
    }
}

/// exp[−i(a_x XX + a_y YY + a_z ZZ)] for any coefficients.
pub fn interaction_core(a: [f64; 3]) -> Unitary {
    let h = PauliString::XX.matrix::<f64>().scale_real(a[0])
        + PauliString::YY.matrix().scale_real(a[1])
        + PauliString::ZZ.matrix().scale_real(a[2]);
    expm_hermitian(&Hermitian::new(h).expect("sum of Pauli strings is Hermitian"), 1.0)
}

/// `V · core · W` together with the single-spin factors of `V` and `W`.
#[derive(Clone, Debug)]
pub struct KakFactorization {
    pub local_v: Unitary,
    pub v_factors: (ComplexMatrix2<f64>, ComplexMatrix2<f64>),
    pub coordinates: CartanCoordinates,
    pub local_w: Unitary,
    pub w_factors: (ComplexMatrix2<f64>, ComplexMatrix2<f64>),
    /// `U = global_phase · V · core · W`.
    pub global_phase: Complex64,
    /// Max entry-wise |U − global_phase · V core W|.
    pub residual: f64,
}

impl KakFactorization {
    pub fn reconstruct(&self) -> ComplexMatrix4<f64> {
        (*self.local_v.matrix() * *self.coordinates.core_unitary().matrix() * *self.local_w.matrix()).scale(self.global_phase)
    }
}

/// Magic (Bell) basis: columns map real orthogonal matrices to SU(2)⊗SU(2).
pub fn magic_basis() -> ComplexMatrix4<f64> {
    let h = FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x * h, 0.0);
    let i = |x: f64| Complex64::new(0.0, x * h);
    let z = Complex64::zero();
    ComplexMatrix4::new([
        [r(1.0), i(1.0), z, z],
        [z, z, i(1.0), r(1.0)],
        [z, z, i(1.0), r(-1.0)],
        [r(1.0), i(-1.0), z, z],
    ])
}

fn to_magic(u: &ComplexMatrix4<f64>) -> ComplexMatrix4<f64> {
    let b = magic_basis();
    b.adjoint() * *u * b
}

fn from_magic(u: &ComplexMatrix4<f64>) -> ComplexMatrix4<f64> {
    let b = magic_basis();
    b * *u * b.adjoint()
}

/// `signs[j][k]`: eigenvalue of σ_jσ_j on magic-basis vector k.
fn bell_signs() -> [[f64; 4]; 3] {
    [PauliString::XX, PauliString::YY, PauliString::ZZ].map(|p| {
        let d = to_magic(&p.matrix());
        std::array::from_fn(|k| d.data[k][k].re.round())
    })
}

fn validate_unitary(u: &ComplexMatrix4<f64>) -> Result<()> {
    Unitary::new(*u).map(|_| ())
}

/// Special-unitary representative `U / det(U)^{1/4}` and the factor removed.
fn special_unitary(u: &ComplexMatrix4<f64>) -> (ComplexMatrix4<f64>, Complex64) {
    let det = u.determinant();
    let root = Complex64::from_polar(det.norm().powf(0.25), det.arg() / 4.0);
    (u.scale(root.inv()), root)
}

/// Real orthogonal eigenbasis of the complex symmetric unitary `m`.
/// Returns the basis (as columns) and the eigenvalues, or `None` when the
/// chosen real combination failed to separate the spectrum.
fn real_eigenbasis(m: &ComplexMatrix4<f64>, mix: f64) -> Option<(ComplexMatrix4<f64>, [Complex64; 4])> {
    let mut a = ComplexMatrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let z = (m.data[i][j] + m.data[j][i]) * 0.5;
            a.data[i][j] = Complex64::new(z.re + mix * z.im, 0.0);
        }
    }
    let e = eigh(&a);
    let mut p = e.vectors;
    for row in p.data.iter_mut() {
        for z in row.iter_mut() {
            z.im = 0.0;
        }
    }
    let d = p.transpose() * *m * p;
    let mut off = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                off = off.max(d.data[i][j].norm());
            }
        }
    }
    if off > 1e-9 {
        return None;
    }
    Some((p, std::array::from_fn(|k| d.data[k][k])))
}

fn coordinates_from_spectrum(eigenvalues: &[Complex64; 4]) -> CartanCoordinates {
    let mut theta: Vec<f64> = eigenvalues.iter().map(|l| -l.arg() / 2.0).collect();
    // the phases are only defined mod π; their true sum is zero
    let shifts = (theta.iter().sum::<f64>() / PI).round() as i64;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| theta[j].partial_cmp(&theta[i]).unwrap_or(std::cmp::Ordering::Equal));
    if shifts > 0 {
        for &k in order.iter().take(shifts as usize) {
            theta[k] -= PI;
        }
    } else if shifts < 0 {
        for &k in order.iter().rev().take((-shifts) as usize) {
            theta[k] += PI;
        }
    }
    let signs = bell_signs();
    let raw: [f64; 3] = std::array::from_fn(|j| 0.25 * (0..4).map(|k| signs[j][k] * theta[k]).sum::<f64>());
    CartanCoordinates::canonicalize(raw)
}

fn magic_symmetric(u: &ComplexMatrix4<f64>) -> ComplexMatrix4<f64> {
    let up = to_magic(u);
    up.transpose() * up
}

/// Canonical Cartan coordinates of a two-qubit unitary (any global phase).
pub fn cartan_coordinates(u: &ComplexMatrix4<f64>) -> Result<CartanCoordinates> {
    validate_unitary(u)?;
    let (su, _) = special_unitary(u);
    let m = magic_symmetric(&su);
    for mix in EIGENBASIS_MIXES {
        if let Some((_, spectrum)) = real_eigenbasis(&m, mix) {
            return Ok(coordinates_from_spectrum(&spectrum));
        }
    }
    Err(Error::NumericalDegeneracy { residual: f64::NAN })
}

/// Split a 4×4 matrix as `A ⊗ B`; returns the factors (with det B = 1) and
/// the entry-wise residual.
pub fn factor_tensor_product(m: &ComplexMatrix4<f64>) -> (ComplexMatrix2<f64>, ComplexMatrix2<f64>, f64) {
    let mut best = (0, 0);
    let mut best_norm = -1.0;
    for p in 0..2 {
        for q in 0..2 {
            let b = m.block(p, q);
            let n: f64 = b.data.iter().flat_map(|r| r.iter()).map(|z| z.norm_sqr()).sum();
            if n > best_norm {
                best_norm = n;
                best = (p, q);
            }
        }
    }
    let b_raw = m.block(best.0, best.1);
    let mut a = ComplexMatrix2::zeros();
    for p in 0..2 {
        for q in 0..2 {
            let blk = m.block(p, q);
            let mut acc = Complex64::zero();
            for i in 0..2 {
                for j in 0..2 {
                    acc += b_raw.data[i][j].conj() * blk.data[i][j];
                }
            }
            a.data[p][q] = acc / best_norm;
        }
    }
    let root = b_raw.determinant().sqrt();
    let (a, b) = if root.norm() > 0.0 {
        (a.scale(root), b_raw.scale(root.inv()))
    } else {
        (a, b_raw)
    };
    let residual = m.max_abs_diff(&a.kron(&b));
    (a, b, residual)
}

fn match_spectrum(spectrum: &[Complex64; 4], target: &[Complex64; 4]) -> (Complex64, [usize; 4], f64) {
    // returns (sign s with spectrum ≈ s·target∘perm, perm, error)
    let mut best = (Complex64::new(1.0, 0.0), [0, 1, 2, 3], f64::INFINITY);
    for s in [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)] {
        for perm in permutations4() {
            let err = (0..4)
                .map(|k| (spectrum[k] - s * target[perm[k]]).norm())
                .fold(0.0, f64::max);
            if err < best.2 {
                best = (s, perm, err);
            }
        }
    }
    best
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Full KAK factorization `U = phase · V · exp[−i Σ a_j σ_jσ_j] · W` with
/// canonical coordinates.
pub fn kak_factorize(u: &ComplexMatrix4<f64>) -> Result<KakFactorization> {
    validate_unitary(u)?;
    let (su, root) = special_unitary(u);
    let up = to_magic(&su);
    let m = up.transpose() * up;

    let mut best_residual = f64::INFINITY;
    for mix in EIGENBASIS_MIXES {
        let Some((p, spectrum)) = real_eigenbasis(&m, mix) else {
            continue;
        };
        let coordinates = coordinates_from_spectrum(&spectrum);
        let core = coordinates.core_unitary();
        let core_magic = to_magic(core.matrix());
        let core_diag: [Complex64; 4] = std::array::from_fn(|k| core_magic.data[k][k]);
        let core_sq = core_diag.map(|d| d * d);

        let (s, perm, _) = match_spectrum(&spectrum, &core_sq);
        // reorder eigenvectors so column perm[k] of P' is column k of P
        let mut pp = ComplexMatrix4::zeros();
        for k in 0..4 {
            for row in 0..4 {
                pp.data[row][perm[k]] = p.data[row][k];
            }
        }
        if pp.determinant().re < 0.0 {
            for row in 0..4 {
                pp.data[row][0] = -pp.data[row][0];
            }
        }
        let sqrt_s = s.sqrt();
        let d_inv = ComplexMatrix4::from_diagonal(core_diag.map(|d| (sqrt_s * d).inv()));
        let o1 = up * pp * d_inv;

        let v = from_magic(&o1);
        let w = from_magic(&pp.transpose());
        let phase = root * sqrt_s;
        let reconstructed = (v * *core.matrix() * w).scale(phase);
        let residual = u.max_abs_diff(&reconstructed);

        let (va, vb, v_res) = factor_tensor_product(&v);
        let (wa, wb, w_res) = factor_tensor_product(&w);
        let total = residual.max(v_res).max(w_res);
        if total <= RECONSTRUCTION_TOL {
            return Ok(KakFactorization {
                local_v: Unitary::new_unchecked(v),
                v_factors: (va, vb),
                coordinates,
                local_w: Unitary::new_unchecked(w),
                w_factors: (wa, wb),
                global_phase: phase,
                residual,
            });
        }
        best_residual = best_residual.min(total);
    }
    Err(Error::NumericalDegeneracy { residual: best_residual })
}

/// Shortest time for the ZZ drift with coupling `g` (Hz) to accumulate the
/// interaction content Σ|a_j|, with unconstrained local controls.
pub fn minimum_time_unitary(coords: &CartanCoordinates, coupling_g: f64) -> f64 {
    coords.interaction_content() / (FRAC_PI_2 * coupling_g)
}

/// 1/(2g): minimum preparation time of the singlet from |00⟩.
pub fn minimum_time_bell(coupling_g: f64) -> f64 {
    1.0 / (2.0 * coupling_g)
}
