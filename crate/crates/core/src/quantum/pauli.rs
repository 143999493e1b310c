use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix2, ComplexMatrix4};
use crate::error::Error;
use crate::scalar::Real;

/// Single-spin Pauli axis or identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> ComplexMatrix2<T> {
        let o = Complex::<T>::one();
        let z = Complex::<T>::zero();
        let i = Complex::<T>::i();
        let data = match self {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        };
        ComplexMatrix2::new(data)
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self, Error> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Usage(format!("invalid Pauli label '{other}' (expected I, X, Y or Z)"))),
        }
    }
}

/// Two-spin Pauli string `first ⊗ second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString(pub Pauli, pub Pauli);

impl PauliString {
    pub fn matrix<T: Real>(self) -> ComplexMatrix4<T> {
        pauli_string(self.0, self.1)
    }

    pub fn is_identity(self) -> bool {
        self.0 == Pauli::I && self.1 == Pauli::I
    }

    /// The 15 non-identity two-spin Pauli strings, in lexicographic order.
    pub fn nontrivial() -> impl Iterator<Item = PauliString> {
        Pauli::ALL
            .into_iter()
            .flat_map(|a| Pauli::ALL.into_iter().map(move |b| PauliString(a, b)))
            .filter(|p| !p.is_identity())
    }

    pub const XX: PauliString = PauliString(Pauli::X, Pauli::X);
    pub const YY: PauliString = PauliString(Pauli::Y, Pauli::Y);
    pub const ZZ: PauliString = PauliString(Pauli::Z, Pauli::Z);
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.label(), self.1.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 2 {
            return Err(Error::Usage(format!("Pauli string '{s}' must have exactly two labels")));
        }
        Ok(PauliString(Pauli::try_from(chars[0])?, Pauli::try_from(chars[1])?))
    }
}

/// Kronecker product of two single-spin Paulis (spin 1 on the left).
pub fn pauli_string<T: Real>(first: Pauli, second: Pauli) -> ComplexMatrix4<T> {
    first.matrix::<T>().kron(&second.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::c;

    #[test]
    fn identity_pair() {
        assert_eq!(pauli_string::<f64>(Pauli::I, Pauli::I), ComplexMatrix4::identity());
    }

    #[test]
    fn zz_is_diagonal() {
        let zz = pauli_string::<f64>(Pauli::Z, Pauli::Z);
        let d = ComplexMatrix4::from_diagonal([c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(zz, d);
    }

    #[test]
    fn every_string_is_an_involution_and_hermitian() {
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let p = pauli_string::<f64>(a, b);
                assert!((p * p).max_abs_diff(&ComplexMatrix4::identity()) < 1e-15);
                assert!(p.hermiticity_defect() < 1e-15);
                assert!(p.unitarity_defect() < 1e-15);
            }
        }
    }

    #[test]
    fn parse_labels() {
        assert_eq!("xz".parse::<PauliString>().unwrap(), PauliString(Pauli::X, Pauli::Z));
        assert!(matches!("XQ".parse::<PauliString>(), Err(Error::Usage(_))));
        assert!(matches!("XYZ".parse::<PauliString>(), Err(Error::Usage(_))));
        assert_eq!(PauliString::nontrivial().count(), 15);
    }
}
