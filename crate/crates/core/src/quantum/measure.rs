//! Projective measurements with Born-rule sampling and collapse.
//!
//! Sampling is inverse-CDF over the branch probabilities with one uniform
//! draw per measurement, so a seeded generator yields reproducible outcomes.

use num_traits::Zero;
use rand::Rng;

use super::state::pair_indices;
use super::{BellSymbol, Operator, StateVector};
use crate::error::QuantumError;
use crate::{Complex, Real};

/// Inverse-CDF sampling of a branch index from `probs` with `u ∈ [0, 1)`.
///
/// Zero-probability branches are never returned, even when rounding leaves
/// the cumulative sum short of `u`.
pub fn sample_branch(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_live = None;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last_live = Some(k);
        if u < acc {
            return k;
        }
    }
    last_live.expect("at least one branch has positive probability")
}

type Branch<T> = (Vec<Complex<T>>, T);

/// Bell-basis projection coefficients of the pair `(i, j)`.
///
/// Returns, for each Bell symbol, the amplitudes of the remaining register
/// (indexed by base index with bits `i, j` cleared) and the branch weight.
fn bell_branches<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
) -> Result<[Branch<T>; 4], QuantumError> {
    register.check_pair(i, j)?;
    let (mi, mj) = (register.mask(i), register.mask(j));
    let amps = register.amplitudes();
    let bases: Vec<usize> = (0..register.dim()).filter(|b| b & (mi | mj) == 0).collect();
    let branch = |s: BellSymbol| {
        let bell = s.amplitudes::<T>();
        let coeffs: Vec<Complex<T>> = bases
            .iter()
            .map(|&b| {
                pair_indices(b, mi, mj)
                    .iter()
                    .zip(bell)
                    .fold(Complex::zero(), |acc, (&k, e)| acc + e.conj() * amps[k])
            })
            .collect();
        let w = coeffs.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        (coeffs, w)
    };
    Ok(BellSymbol::ALL.map(branch))
}

/// Born probabilities of the four Bell outcomes on qubits `(i, j)`, in
/// [`BellSymbol::ALL`] order. Qubit `i` plays particle A.
pub fn bell_probabilities<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
) -> Result<[T; 4], QuantumError> {
    Ok(bell_branches(register, i, j)?.map(|(_, w)| w))
}

/// Bell-basis measurement of qubits `(i, j)`: samples an outcome and returns
/// it with the collapsed, renormalized register.
pub fn bell_measure<T: Real, R: Rng + ?Sized>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<(BellSymbol, StateVector<T>), QuantumError> {
    let branches = bell_branches(register, i, j)?;
    let probs = branches.clone().map(|(_, w)| w.to_f64_lossy());
    let k = sample_branch(&probs, rng.random());
    let (coeffs, w) = &branches[k];
    let symbol = BellSymbol::ALL[k];
    let norm = w.sqrt();
    if norm.to_f64_lossy() <= T::NORM_TOL {
        return Err(QuantumError::DegenerateCollapse(w.to_f64_lossy()));
    }
    Ok((symbol, collapse_onto(register, i, j, symbol, coeffs, norm)))
}

/// Projects the pair `(i, j)` onto `symbol` without sampling. Returns the
/// branch probability and the renormalized post-state, or `None` when the
/// branch has zero weight.
pub fn bell_project<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
    symbol: BellSymbol,
) -> Result<Option<(T, StateVector<T>)>, QuantumError> {
    let branches = bell_branches(register, i, j)?;
    let k = BellSymbol::ALL
        .iter()
        .position(|&s| s == symbol)
        .expect("listed");
    let (coeffs, w) = &branches[k];
    if w.sqrt().to_f64_lossy() <= T::NORM_TOL {
        return Ok(None);
    }
    Ok(Some((
        *w,
        collapse_onto(register, i, j, symbol, coeffs, w.sqrt()),
    )))
}

fn collapse_onto<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
    symbol: BellSymbol,
    coeffs: &[Complex<T>],
    norm: T,
) -> StateVector<T> {
    let (mi, mj) = (register.mask(i), register.mask(j));
    let bell = symbol.amplitudes::<T>();
    let mut out = vec![Complex::zero(); register.dim()];
    let bases = (0..register.dim()).filter(|b| b & (mi | mj) == 0);
    for (b, c) in bases.zip(coeffs) {
        let c = *c / norm;
        for (k, e) in pair_indices(b, mi, mj).iter().zip(bell) {
            out[*k] = e * c;
        }
    }
    StateVector::from_parts_unchecked(register.n_qubits(), out)
}

/// Probability, outcomes in measurement order, post-measurement register.
pub type OutcomeBranch<T> = (T, Vec<BellSymbol>, StateVector<T>);

/// Every joint outcome of Bell measurements on `duos`, in order, with its
/// exact probability and post-measurement register. Zero-weight branches are
/// pruned.
pub fn bell_outcome_tree<T: Real>(
    register: &StateVector<T>,
    duos: &[(usize, usize)],
) -> Result<Vec<OutcomeBranch<T>>, QuantumError> {
    let mut level = vec![(T::one(), Vec::new(), register.clone())];
    for &(i, j) in duos {
        let mut next = Vec::with_capacity(level.len() * 4);
        for (p, outcomes, state) in level {
            for s in BellSymbol::ALL {
                if let Some((w, post)) = bell_project(&state, i, j, s)? {
                    let mut o = outcomes.clone();
                    o.push(s);
                    next.push((p * w, o, post));
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Probabilities of reading `0` and `1` on `qubit`.
pub fn z_probabilities<T: Real>(
    register: &StateVector<T>,
    qubit: usize,
) -> Result<[T; 2], QuantumError> {
    register.check_qubit(qubit)?;
    let m = register.mask(qubit);
    let mut p = [T::zero(); 2];
    for (k, z) in register.amplitudes().iter().enumerate() {
        let bit = usize::from(k & m != 0);
        p[bit] = p[bit] + z.norm_sqr();
    }
    Ok(p)
}

/// Computational-basis measurement of one qubit.
pub fn z_measure<T: Real, R: Rng + ?Sized>(
    register: &StateVector<T>,
    qubit: usize,
    rng: &mut R,
) -> Result<(bool, StateVector<T>), QuantumError> {
    let p = z_probabilities(register, qubit)?;
    let bit = sample_branch(&p.map(Real::to_f64_lossy), rng.random()) == 1;
    let w = p[usize::from(bit)];
    if w.sqrt().to_f64_lossy() <= T::NORM_TOL {
        return Err(QuantumError::DegenerateCollapse(w.to_f64_lossy()));
    }
    let inv = T::one() / w.sqrt();
    let m = register.mask(qubit);
    let amps = register
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, z)| {
            if (k & m != 0) == bit {
                *z * inv
            } else {
                Complex::zero()
            }
        })
        .collect();
    Ok((
        bit,
        StateVector::from_parts_unchecked(register.n_qubits(), amps),
    ))
}

/// `(P₊ψ, P₋ψ)` for the ±1 eigenspaces of a two-outcome pair observable,
/// `P± = (1 ± O) / 2`.
fn observable_branches<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
    o: &Operator<T>,
) -> Result<[Vec<Complex<T>>; 2], QuantumError> {
    let mut applied = register.clone();
    applied.apply_pair(i, j, o)?;
    let half = T::from_f64_lossy(0.5);
    let plus = register
        .amplitudes()
        .iter()
        .zip(applied.amplitudes())
        .map(|(a, b)| (*a + *b) * half)
        .collect();
    let minus = register
        .amplitudes()
        .iter()
        .zip(applied.amplitudes())
        .map(|(a, b)| (*a - *b) * half)
        .collect();
    Ok([plus, minus])
}

/// Probabilities of the `+1` and `-1` outcomes of an involutive observable
/// `o` (`o² = 1`) on the pair `(i, j)`.
pub fn pair_observable_probabilities<T: Real>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
    o: &Operator<T>,
) -> Result<[T; 2], QuantumError> {
    Ok(observable_branches(register, i, j, o)?
        .map(|v| v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())))
}

/// Measures an involutive two-qubit observable (eigenvalues ±1) on `(i, j)`.
pub fn measure_pair_observable<T: Real, R: Rng + ?Sized>(
    register: &StateVector<T>,
    i: usize,
    j: usize,
    o: &Operator<T>,
    rng: &mut R,
) -> Result<(i8, StateVector<T>), QuantumError> {
    let [plus, minus] = observable_branches(register, i, j, o)?;
    let w = |v: &[Complex<T>]| v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let probs = [w(&plus).to_f64_lossy(), w(&minus).to_f64_lossy()];
    let k = sample_branch(&probs, rng.random());
    let (outcome, v) = if k == 0 { (1, plus) } else { (-1, minus) };
    let collapsed = StateVector::normalized(v)?;
    Ok((outcome, collapsed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{bell_state, correlation_operator, Direction};
    use crate::rng::seeded;

    fn plus_state() -> StateVector<f64> {
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateVector::from_amplitudes(vec![h, h]).unwrap()
    }

    #[test]
    fn sample_branch_skips_zero_weight() {
        assert_eq!(sample_branch(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(
            sample_branch(&[0.5, 0.5 - 1e-17, 0.0], 0.999_999_999_999_999_9),
            1
        );
        assert_eq!(sample_branch(&[0.25, 0.25, 0.25, 0.25], 0.5), 2);
    }

    #[test]
    fn bell_eigenstate_measures_deterministically() {
        let mut rng = seeded(1);
        for s in BellSymbol::ALL {
            for _ in 0..50 {
                let (out, post) = bell_measure(&bell_state::<f64>(s), 0, 1, &mut rng).unwrap();
                assert_eq!(out, s);
                assert!((post.inner(&bell_state(s)).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn swapped_pair_order_reads_as_particle_a_first() {
        // Measuring (1, 0) treats qubit 1 as A: ψ⁻ is antisymmetric, so the
        // outcome is still ψ⁻, and φ± are symmetric.
        let p = bell_probabilities(&bell_state::<f64>(BellSymbol::PsiMinus), 1, 0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_measure_on_basis_state() {
        let mut rng = seeded(2);
        let zero = StateVector::<f64>::basis(1, 0).unwrap();
        for _ in 0..100 {
            assert!(!z_measure(&zero, 0, &mut rng).unwrap().0);
        }
    }

    #[test]
    fn z_measure_plus_state_is_fair() {
        let mut rng = seeded(4);
        let plus = plus_state();
        let n = 100_000;
        let ones = (0..n)
            .filter(|_| z_measure(&plus, 0, &mut rng).unwrap().0)
            .count();
        let f = ones as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.01, "{f}");
    }

    #[test]
    fn z_measure_half_singlet_collapses_partner() {
        let mut rng = seeded(5);
        let s = bell_state::<f64>(BellSymbol::PsiMinus);
        let p = z_probabilities(&s, 0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        for _ in 0..200 {
            let (bit, post) = z_measure(&s, 0, &mut rng).unwrap();
            let q = z_probabilities(&post, 1).unwrap();
            assert!((q[usize::from(!bit)] - 1.0).abs() < 1e-12);
            assert!((post.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn observable_measurement_on_eigenstate() {
        let mut rng = seeded(6);
        let z = Direction::<f64>::z_axis();
        let o = correlation_operator(&z, &z).unwrap();
        let s = bell_state::<f64>(BellSymbol::PsiMinus);
        for _ in 0..50 {
            let (out, post) = measure_pair_observable(&s, 0, 1, &o, &mut rng).unwrap();
            assert_eq!(out, -1);
            assert!((post.inner(&s).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outcome_tree_of_mismatched_pairs_is_uniform() {
        // Pairs (A0,B0), (A1,B1) in ψ⁻ and φ⁺; measure (A0,B1) then (A1,B0).
        let reg = bell_state::<f64>(BellSymbol::PsiMinus)
            .tensor(&bell_state(BellSymbol::PhiPlus))
            .unwrap();
        let tree = bell_outcome_tree(&reg, &[(0, 3), (2, 1)]).unwrap();
        let total: f64 = tree.iter().map(|(p, _, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut first = [0.0; 4];
        for (p, o, post) in &tree {
            first[o[0].key_value() as usize] += p;
            assert!((post.norm() - 1.0).abs() < 1e-10);
        }
        for f in first {
            assert!((f - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_project_zero_branch_is_none() {
        let s = bell_state::<f64>(BellSymbol::PhiPlus);
        assert!(bell_project(&s, 0, 1, BellSymbol::PsiMinus)
            .unwrap()
            .is_none());
        let (w, _) = bell_project(&s, 0, 1, BellSymbol::PhiPlus)
            .unwrap()
            .unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_register_rejected() {
        let s = StateVector::<f64>::basis(2, 0).unwrap();
        assert!(matches!(
            bell_measure(&s, 0, 0, &mut seeded(0)),
            Err(QuantumError::SameQubit(0))
        ));
    }
}
