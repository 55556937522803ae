use num_traits::{One, Zero};

use crate::error::QuantumError;
use crate::{Complex, Real};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> Operator<T> {
    pub fn from_rows(dim: usize, entries: Vec<Complex<T>>) -> Result<Self, QuantumError> {
        if entries.len() != dim * dim {
            return Err(QuantumError::Dimension {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex::one();
        }
        m
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = Complex::new(d, T::zero());
        }
        m
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn projector(v: &[Complex<T>]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.entries[r * dim + c] = v[r] * v[c].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut m = Self::zeros(d);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        m.entries[(r1 * other.dim + r2) * d + c1 * other.dim + c2] =
                            a * other.get(r2, c2);
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let d = self.dim;
        let mut m = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                for c in 0..d {
                    m.entries[r * d + c] = m.entries[r * d + c] + a * other.get(k, c);
                }
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                m.entries[c * d + r] = self.get(r, c).conj();
            }
        }
        m
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length differs from operator dimension"
        );
        (0..self.dim)
            .map(|r| (0..self.dim).fold(Complex::zero(), |acc, c| acc + self.get(r, c) * v[c]))
            .collect()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entry-wise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }
}

/// Eigenvalues of a Hermitian operator, ascending.
///
/// The `d×d` Hermitian matrix `H = A + iB` is embedded into the `2d×2d` real
/// symmetric matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H` with
/// every eigenvalue doubled, and diagonalized by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues<T: Real>(op: &Operator<T>) -> Vec<T> {
    let d = op.dim();
    let n = 2 * d;
    let mut a = vec![T::zero(); n * n];
    for r in 0..d {
        for c in 0..d {
            let z = op.get(r, c);
            a[r * n + c] = z.re;
            a[(r + d) * n + c + d] = z.re;
            a[(r + d) * n + c] = z.im;
            a[r * n + c + d] = -z.im;
        }
    }
    jacobi_symmetric(&mut a, n);
    let mut eig: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    eig.into_iter().step_by(2).collect()
}

fn jacobi_symmetric<T: Real>(a: &mut [T], n: usize) {
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + a[p * n + q] * a[p * n + q]);
        let diag: T = (0..n).fold(T::zero(), |acc, p| acc + a[p * n + p] * a[p * n + p]);
        if off <= eps * eps * (diag + off) || off == T::zero() {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let two = T::one() + T::one();
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Operator::<f64>::identity(2);
        assert_eq!(i2.kron(&i2), Operator::identity(4));
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        let y = Operator::from_rows(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let e = hermitian_eigenvalues(&y);
        assert!(
            (e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12,
            "{e:?}"
        );
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let d = Operator::diagonal(&[0.5, -0.25, 0.125, 0.625]);
        let e = hermitian_eigenvalues(&d);
        let want = [-0.25f64, 0.125, 0.5, 0.625];
        for (x, w) in e.iter().zip(want) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_complex_hermitian_4x4() {
        // H = [[2, 1-i], [1+i, 3]] has eigenvalues (5 ± sqrt(9)) / 2 = 1, 4.
        let h = Operator::from_rows(2, vec![c(2., 0.), c(1., -1.), c(1., 1.), c(3., 0.)]).unwrap();
        let e = hermitian_eigenvalues(&h.kron(&Operator::identity(2)));
        let want = [1.0, 1.0, 4.0, 4.0];
        for (x, w) in e.iter().zip(want) {
            assert!((x - w).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn adjoint_reverses_matmul() {
        let a = Operator::from_rows(2, vec![c(1., 2.), c(0., 1.), c(3., 0.), c(-1., 1.)]).unwrap();
        let b = Operator::from_rows(2, vec![c(0., 1.), c(2., 0.), c(1., -1.), c(0., 0.)]).unwrap();
        let lhs = a.matmul(&b).adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint());
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }
}
