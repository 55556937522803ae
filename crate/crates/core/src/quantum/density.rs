use num_traits::Zero;

use super::{bell_state, hermitian_eigenvalues, BellSymbol, Operator, StateVector};
use crate::error::QuantumError;
use crate::{Complex, Real};

/// Which qubit of a pair survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Density operator of one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    op: Operator<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(op: Operator<T>) -> Result<Self, QuantumError> {
        let rho = Self::from_operator_unchecked(op)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the dimension (2 or 4).
    pub fn from_operator_unchecked(op: Operator<T>) -> Result<Self, QuantumError> {
        if op.dim() != 2 && op.dim() != 4 {
            return Err(QuantumError::Dimension {
                expected: 4,
                got: op.dim(),
            });
        }
        Ok(Self { op })
    }

    pub fn from_pure(state: &StateVector<T>) -> Result<Self, QuantumError> {
        Self::from_operator_unchecked(Operator::projector(state.amplitudes()))
    }

    /// Uniform mixture of Bell states.
    pub fn bell_mixture(symbols: &[BellSymbol]) -> Result<Self, QuantumError> {
        if symbols.is_empty() {
            return Err(QuantumError::EmptyEnsemble);
        }
        let w = T::one() / T::from_usize(symbols.len()).unwrap_or_else(T::one);
        let mut acc = Operator::zeros(4);
        for s in symbols {
            acc = acc.add(&Operator::projector(bell_state::<T>(*s).amplitudes()).scale(w));
        }
        Ok(Self { op: acc })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, QuantumError> {
        let w = T::one() / T::from_usize(dim).unwrap_or_else(T::one);
        Self::from_operator_unchecked(Operator::diagonal(&vec![w; dim]))
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        let herm = self.op.hermiticity_defect().to_f64_lossy();
        if herm > T::EXACT_TOL {
            return Err(QuantumError::NotHermitian(herm));
        }
        self.check_trace()?;
        let min = hermitian_eigenvalues(&self.op)
            .first()
            .copied()
            .unwrap_or_else(T::zero)
            .to_f64_lossy();
        if min < -T::NORM_TOL {
            return Err(QuantumError::NotPositive(min));
        }
        Ok(())
    }

    fn check_trace(&self) -> Result<(), QuantumError> {
        let tr = self.op.trace();
        let dev = (tr - Complex::new(T::one(), T::zero()))
            .norm()
            .to_f64_lossy();
        if dev > T::EXACT_TOL {
            return Err(QuantumError::NonUnitTrace(tr.re.to_f64_lossy()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator<T> {
        &self.op
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.op.get(row, col)
    }

    pub fn kron(&self, other: &Self) -> Result<Self, QuantumError> {
        Self::from_operator_unchecked(self.op.kron(&other.op))
    }

    /// `Tr(ρ O)`.
    pub fn trace_with(&self, o: &Operator<T>) -> Complex<T> {
        self.op.matmul(o).trace()
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.op.max_abs_diff(&other.op)
    }
}

/// Reduced density matrix of one qubit of a two-qubit state.
pub fn partial_trace<T: Real>(
    rho: &DensityMatrix<T>,
    keep: Keep,
) -> Result<DensityMatrix<T>, QuantumError> {
    if rho.dim() != 4 {
        return Err(QuantumError::Dimension {
            expected: 4,
            got: rho.dim(),
        });
    }
    rho.check_trace()?;
    let mut out = Operator::zeros(2);
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = Complex::zero();
            for k in 0..2 {
                acc = acc
                    + match keep {
                        // index = 2·first + second
                        Keep::First => rho.get(2 * r + k, 2 * c + k),
                        Keep::Second => rho.get(2 * k + r, 2 * k + c),
                    };
            }
            out.set(r, c, acc);
        }
    }
    DensityMatrix::from_operator_unchecked(out)
}

/// Joint state of particle A of one pair and particle B of another when both
/// pairs are drawn independently from `ensemble`: the product of the two
/// reduced states.
pub fn mismatched_pair_density<T: Real>(
    ensemble: &[BellSymbol],
) -> Result<DensityMatrix<T>, QuantumError> {
    let pair = DensityMatrix::<T>::bell_mixture(ensemble)?;
    let a1 = partial_trace(&pair, Keep::First)?;
    let b2 = partial_trace(&pair, Keep::Second)?;
    a1.kron(&b2)
}

/// Reduced state of the ordered qubit pair `(i, j)` of a pure register, with
/// `i` as the first qubit.
pub fn reduced_pair_density<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
) -> Result<DensityMatrix<T>, QuantumError> {
    register.check_pair(i, j)?;
    let (mi, mj) = (register.mask(i), register.mask(j));
    let amps = register.amplitudes();
    let mut out = Operator::zeros(4);
    for base in (0..register.dim()).filter(|b| b & (mi | mj) == 0) {
        let idx = [base, base | mj, base | mi, base | mi | mj];
        for r in 0..4 {
            for c in 0..4 {
                let v = out.get(r, c) + amps[idx[r]] * amps[idx[c]].conj();
                out.set(r, c, v);
            }
        }
    }
    DensityMatrix::from_operator_unchecked(out)
}
