use gaussian::standard_normal;
use num_traits::{One, Zero};
use rand::Rng;

use super::{DensityMatrix, Operator, StateVector};
use crate::error::QuantumError;
use crate::{Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> Operator<T> {
        let o = Complex::<T>::zero();
        let l = Complex::<T>::one();
        let i = Complex::<T>::i();
        let rows = match self {
            Pauli::I => vec![l, o, o, l],
            Pauli::X => vec![o, l, l, o],
            Pauli::Y => vec![o, -i, i, o],
            Pauli::Z => vec![l, o, o, -l],
        };
        Operator::from_rows(2, rows).expect("2x2")
    }
}

/// Unit measurement direction in Bloch space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T> {
    x: T,
    y: T,
    z: T,
}

impl<T: Real> Direction<T> {
    /// Rejects vectors whose norm deviates from 1 by more than
    /// `T::DIRECTION_TOL`.
    pub fn new(x: T, y: T, z: T) -> Result<Self, QuantumError> {
        let norm = (x * x + y * y + z * z).sqrt().to_f64_lossy();
        if !norm.is_finite() || (norm - 1.0).abs() > T::DIRECTION_TOL {
            return Err(QuantumError::NonUnitDirection(norm));
        }
        Ok(Self { x, y, z })
    }

    pub fn normalized(x: T, y: T, z: T) -> Result<Self, QuantumError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm <= T::epsilon() || !norm.is_finite() {
            return Err(QuantumError::NonUnitDirection(norm.to_f64_lossy()));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn x_axis() -> Self {
        Self {
            x: T::one(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    pub fn y_axis() -> Self {
        Self {
            x: T::zero(),
            y: T::one(),
            z: T::zero(),
        }
    }

    pub fn z_axis() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
            z: T::one(),
        }
    }

    /// Uniformly distributed on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let (x, y, z) = (
                standard_normal(rng),
                standard_normal(rng),
                standard_normal(rng),
            );
            if let Ok(d) = Self::normalized(
                T::from_f64_lossy(x),
                T::from_f64_lossy(y),
                T::from_f64_lossy(z),
            ) {
                return d;
            }
        }
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// `σ·n = n_x σ_x + n_y σ_y + n_z σ_z`.
    pub fn pauli(&self) -> Operator<T> {
        Pauli::X
            .matrix()
            .scale(self.x)
            .add(&Pauli::Y.matrix().scale(self.y))
            .add(&Pauli::Z.matrix().scale(self.z))
    }
}

/// `σ·a ⊗ σ·b`, the two-party spin correlation observable.
pub fn correlation_operator<T: Real>(
    a: &Direction<T>,
    b: &Direction<T>,
) -> Result<Operator<T>, QuantumError> {
    for d in [a, b] {
        let n = d.dot(d).sqrt().to_f64_lossy();
        if (n - 1.0).abs() > T::DIRECTION_TOL {
            return Err(QuantumError::NonUnitDirection(n));
        }
    }
    Ok(a.pauli().kron(&b.pauli()))
}

/// A two-qubit state an observable can be averaged over.
pub trait TwoQubitState<T: Real> {
    /// `⟨O⟩` for a 4×4 observable `O`.
    fn expect(&self, o: &Operator<T>) -> Result<T, QuantumError>;
}

impl<T: Real> TwoQubitState<T> for StateVector<T> {
    fn expect(&self, o: &Operator<T>) -> Result<T, QuantumError> {
        if self.n_qubits() != 2 {
            return Err(QuantumError::Dimension {
                expected: 4,
                got: self.dim(),
            });
        }
        let ov = o.apply(self.amplitudes());
        let v = self
            .amplitudes()
            .iter()
            .zip(ov)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b);
        Ok(v.re)
    }
}

impl<T: Real> TwoQubitState<T> for DensityMatrix<T> {
    fn expect(&self, o: &Operator<T>) -> Result<T, QuantumError> {
        if self.dim() != 4 {
            return Err(QuantumError::Dimension {
                expected: 4,
                got: self.dim(),
            });
        }
        Ok(self.trace_with(o).re)
    }
}

/// `⟨σ·a ⊗ σ·b⟩` in `state`.
pub fn expectation<T: Real, S: TwoQubitState<T> + ?Sized>(
    state: &S,
    a: &Direction<T>,
    b: &Direction<T>,
) -> Result<T, QuantumError> {
    state.expect(&correlation_operator(a, b)?)
}

// Box–Muller.
mod gaussian {
    use rand::Rng;

    pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{bell_state, BellSymbol};
    use crate::rng::seeded;

    #[test]
    fn pauli_matrices_square_to_identity() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let m = p.matrix::<f64>();
            assert!(m.matmul(&m).max_abs_diff(&Operator::identity(2)) < 1e-15);
            assert!(m.hermiticity_defect() < 1e-15);
            assert!(m.trace().norm() < 1e-15);
        }
    }

    #[test]
    fn zz_correlation_is_diagonal() {
        let z = Direction::<f64>::z_axis();
        let e = correlation_operator(&z, &z).unwrap();
        assert!(e.max_abs_diff(&Operator::diagonal(&[1.0, -1.0, -1.0, 1.0])) < 1e-15);
    }

    #[test]
    fn non_unit_direction_rejected() {
        assert!(matches!(
            Direction::new(1.0, 1.0, 0.0),
            Err(QuantumError::NonUnitDirection(_))
        ));
        assert!(Direction::new(1.0 + 1e-10, 0.0, 0.0).is_ok());
        assert!(Direction::new(1.0 + 1e-8, 0.0, 0.0).is_err());
        assert!(Direction::<f64>::normalized(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn singlet_is_perfectly_anticorrelated() {
        let mut rng = seeded(3);
        let s = bell_state::<f64>(BellSymbol::PsiMinus);
        for _ in 0..20 {
            let a = Direction::random(&mut rng);
            let e = expectation(&s, &a, &a).unwrap();
            assert!((e + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_rejects_wrong_size() {
        let s = StateVector::<f64>::basis(3, 0).unwrap();
        let z = Direction::z_axis();
        assert!(expectation(&s, &z, &z).is_err());
    }

    #[test]
    fn random_directions_are_unit() {
        let mut rng = seeded(11);
        for _ in 0..100 {
            let d = Direction::<f64>::random(&mut rng);
            assert!((d.dot(&d) - 1.0).abs() < 1e-12);
        }
    }
}
