use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::{Complex, Real};

/// One of the four Bell states, each carrying two key bits:
/// `ψ⁻ → 00`, `ψ⁺ → 01`, `φ⁻ → 10`, `φ⁺ → 11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellSymbol {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellSymbol {
    pub const ALL: [BellSymbol; 4] = [
        BellSymbol::PsiMinus,
        BellSymbol::PsiPlus,
        BellSymbol::PhiMinus,
        BellSymbol::PhiPlus,
    ];

    /// Two-bit key value in `0..4`.
    pub fn key_value(self) -> u8 {
        match self {
            BellSymbol::PsiMinus => 0b00,
            BellSymbol::PsiPlus => 0b01,
            BellSymbol::PhiMinus => 0b10,
            BellSymbol::PhiPlus => 0b11,
        }
    }

    /// Key bits, most significant first.
    pub fn key_bits(self) -> [bool; 2] {
        let v = self.key_value();
        [v & 0b10 != 0, v & 0b01 != 0]
    }

    pub fn from_key_value(v: u8) -> Option<Self> {
        Self::ALL.get(usize::from(v)).copied()
    }

    /// Amplitudes on `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes<T: Real>(self) -> [Complex<T>; 4] {
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        let z = Complex::zero();
        match self {
            BellSymbol::PsiMinus => [z, h, -h, z],
            BellSymbol::PsiPlus => [z, h, h, z],
            BellSymbol::PhiMinus => [h, z, z, -h],
            BellSymbol::PhiPlus => [h, z, z, h],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellSymbol::PsiMinus => "psi-",
            BellSymbol::PsiPlus => "psi+",
            BellSymbol::PhiMinus => "phi-",
            BellSymbol::PhiPlus => "phi+",
        }
    }
}

impl std::fmt::Display for BellSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Two-qubit state vector of `symbol`, qubit 0 being particle A.
pub fn bell_state<T: Real>(symbol: BellSymbol) -> StateVector<T> {
    StateVector::from_parts_unchecked(2, symbol.amplitudes().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_minus_amplitudes() {
        let s = bell_state::<f64>(BellSymbol::PsiMinus);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [0.0, h, -h, 0.0];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn phi_plus_amplitudes() {
        let s = bell_state::<f64>(BellSymbol::PhiPlus);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, 0.0, h];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn normalized_and_orthogonal() {
        for (i, a) in BellSymbol::ALL.iter().enumerate() {
            let sa = bell_state::<f64>(*a);
            assert!((sa.norm() - 1.0).abs() < 1e-12);
            for b in &BellSymbol::ALL[i + 1..] {
                assert!(sa.inner(&bell_state(*b)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn key_encoding() {
        let bits: Vec<[bool; 2]> = BellSymbol::ALL.iter().map(|s| s.key_bits()).collect();
        assert_eq!(
            bits,
            vec![[false, false], [false, true], [true, false], [true, true]]
        );
        for s in BellSymbol::ALL {
            assert_eq!(BellSymbol::from_key_value(s.key_value()), Some(s));
        }
        assert_eq!(BellSymbol::from_key_value(4), None);
    }

    #[test]
    fn single_precision_bell_state() {
        let s = bell_state::<f32>(BellSymbol::PhiMinus);
        assert!((s.norm() - 1.0).abs() < 1e-6);
    }
}
