use num_traits::{One, Zero};

use super::Operator;
use crate::error::QuantumError;
use crate::{Complex, Real};

/// Largest register the engine accepts: one block of four EPR pairs.
pub const MAX_QUBITS: usize = 8;

/// Dense amplitude vector over `n_qubits` qubits, big-endian by qubit index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QuantumError> {
        check_qubit_count(n_qubits)?;
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(QuantumError::Dimension {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Ok(Self { n_qubits, amps })
    }

    /// Product state with qubit `q` set to `bits[q]`.
    pub fn from_bits(bits: &[bool]) -> Result<Self, QuantumError> {
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        Self::basis(bits.len(), index)
    }

    /// Wraps `amps`, which must have unit norm within `T::NORM_TOL`.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self, QuantumError> {
        let n_qubits = qubits_for_len(amps.len())?;
        let s = Self { n_qubits, amps };
        let norm = s.norm().to_f64_lossy();
        if (norm - 1.0).abs() > T::NORM_TOL {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self, QuantumError> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm = amps
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt();
        if norm <= T::from_f64_lossy(T::NORM_TOL) {
            return Err(QuantumError::DegenerateCollapse(norm.to_f64_lossy()));
        }
        let inv = T::one() / norm;
        Ok(Self {
            n_qubits,
            amps: amps.into_iter().map(|z| z * inv).collect(),
        })
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "state dimensions differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `self ⊗ other`; `self`'s qubits come first.
    pub fn tensor(&self, other: &Self) -> Result<Self, QuantumError> {
        let n = self.n_qubits + other.n_qubits;
        check_qubit_count(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Ok(Self { n_qubits: n, amps })
    }

    /// Born probabilities of the computational basis states.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Bit mask of `qubit` within an amplitude index.
    pub fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub fn check_qubit(&self, qubit: usize) -> Result<(), QuantumError> {
        if qubit >= self.n_qubits {
            return Err(QuantumError::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn check_pair(&self, i: usize, j: usize) -> Result<(), QuantumError> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        if i == j {
            return Err(QuantumError::SameQubit(i));
        }
        Ok(())
    }

    /// Applies a 2×2 operator to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, op: &Operator<T>) -> Result<(), QuantumError> {
        self.check_qubit(qubit)?;
        if op.dim() != 2 {
            return Err(QuantumError::Dimension {
                expected: 2,
                got: op.dim(),
            });
        }
        let m = self.mask(qubit);
        let (a, b, c, d) = (op.get(0, 0), op.get(0, 1), op.get(1, 0), op.get(1, 1));
        for i0 in (0..self.dim()).filter(|i| i & m == 0) {
            let i1 = i0 | m;
            let (x, y) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = a * x + b * y;
            self.amps[i1] = c * x + d * y;
        }
        Ok(())
    }

    /// Applies a 4×4 operator to the ordered qubit pair `(i, j)`; `i` is the
    /// more significant qubit of the operator's basis.
    pub fn apply_pair(&mut self, i: usize, j: usize, op: &Operator<T>) -> Result<(), QuantumError> {
        self.check_pair(i, j)?;
        if op.dim() != 4 {
            return Err(QuantumError::Dimension {
                expected: 4,
                got: op.dim(),
            });
        }
        let (mi, mj) = (self.mask(i), self.mask(j));
        for base in (0..self.dim()).filter(|b| b & (mi | mj) == 0) {
            let idx = pair_indices(base, mi, mj);
            let v = idx.map(|k| self.amps[k]);
            let w = op.apply(&v);
            for (k, z) in idx.iter().zip(w) {
                self.amps[*k] = z;
            }
        }
        Ok(())
    }
}

/// Amplitude indices of `|00⟩, |01⟩, |10⟩, |11⟩` on the pair with masks
/// `(mi, mj)` at the given base index.
pub(crate) fn pair_indices(base: usize, mi: usize, mj: usize) -> [usize; 4] {
    [base, base | mj, base | mi, base | mi | mj]
}

fn check_qubit_count(n: usize) -> Result<(), QuantumError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QuantumError::QubitCount(n));
    }
    Ok(())
}

fn qubits_for_len(len: usize) -> Result<usize, QuantumError> {
    if len < 2 || !len.is_power_of_two() {
        return Err(QuantumError::AmplitudeLength(len));
    }
    let n = len.trailing_zeros() as usize;
    check_qubit_count(n)?;
    Ok(n)
}
