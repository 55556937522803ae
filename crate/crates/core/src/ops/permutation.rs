use serde::{Deserialize, Serialize};

use super::BLOCK_SIZE;
use crate::error::CoreError;

/// Bijection on block positions. Position `p` of a rearranged block carries
/// the input element at `self[p]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, CoreError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(CoreError::NotAPermutation(images));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `p ↦ (p + k) mod n`.
    pub fn cyclic_shift(n: usize, k: usize) -> Self {
        Self((0..n).map(|p| (p + k) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn image(&self, p: usize) -> usize {
        self.0[p]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (p, &q) in self.0.iter().enumerate() {
            inv[q] = p;
        }
        Self(inv)
    }

    /// `self ∘ other`: `p ↦ self(other(p))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&q| self.0[q]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(p, &q)| p == q)
    }

    pub fn is_derangement(&self) -> bool {
        self.0.iter().enumerate().all(|(p, &q)| p != q)
    }

    /// `out[p] = items[self(p)]`.
    pub fn rearrange<T: Clone>(&self, items: &[T]) -> Result<Vec<T>, CoreError> {
        self.check_len(items.len())?;
        Ok(self.0.iter().map(|&q| items[q].clone()).collect())
    }

    /// Undoes [`rearrange`](Self::rearrange): `out[self(p)] = items[p]`.
    pub fn restore<T: Clone>(&self, items: &[T]) -> Result<Vec<T>, CoreError> {
        self.check_len(items.len())?;
        let mut out = items.to_vec();
        for (p, &q) in self.0.iter().enumerate() {
            out[q] = items[p].clone();
        }
        Ok(out)
    }

    fn check_len(&self, got: usize) -> Result<(), CoreError> {
        if got != self.len() {
            return Err(CoreError::BlockLength {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = CoreError;

    fn try_from(v: Vec<usize>) -> Result<Self, CoreError> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in &self.0 {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A rearrangement operation selected by a two-bit key value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoreOp {
    index: u8,
    perm: Permutation,
}

impl CoreOp {
    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }
}

/// Rearranges the lower-channel block under `op`.
pub fn apply_core<T: Clone>(op: &CoreOp, block: &[T]) -> Result<Vec<T>, CoreError> {
    op.perm.rearrange(block)
}

/// Restores a block rearranged under `op`.
pub fn invert_core<T: Clone>(op: &CoreOp, block: &[T]) -> Result<Vec<T>, CoreError> {
    op.perm.restore(block)
}

/// The four operations `E0..E3`.
///
/// `E0` is the identity; `E1..E3` are pairwise distinct derangements of the
/// same length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Permutation>", into = "Vec<Permutation>")]
pub struct PermutationSet {
    ops: [CoreOp; 4],
}

impl PermutationSet {
    pub fn new(perms: Vec<Permutation>) -> Result<Self, CoreError> {
        let bad = |m: &str| Err(CoreError::PermutationSet(m.to_string()));
        let Ok(perms): Result<[Permutation; 4], _> = perms.try_into() else {
            return bad("exactly four permutations are required");
        };
        let n = perms[0].len();
        if perms.iter().any(|p| p.len() != n) {
            return bad("permutations differ in length");
        }
        if !perms[0].is_identity() {
            return bad("E0 must be the identity");
        }
        if let Some(k) = (1..4).find(|&k| !perms[k].is_derangement()) {
            return Err(CoreError::PermutationSet(format!(
                "E{k} = {} has a fixed point",
                perms[k]
            )));
        }
        if perms[1] == perms[2] || perms[1] == perms[3] || perms[2] == perms[3] {
            return bad("E1..E3 must be pairwise distinct");
        }
        let mut index = 0u8;
        let ops = perms.map(|perm| {
            let op = CoreOp { index, perm };
            index += 1;
            op
        });
        Ok(Self { ops })
    }

    /// Cyclic shifts by 0, 1, 2 and 3 of a four-pair block.
    pub fn cyclic() -> Self {
        Self::new(
            (0..4)
                .map(|k| Permutation::cyclic_shift(BLOCK_SIZE, k))
                .collect(),
        )
        .expect("cyclic shifts form a valid set")
    }

    pub fn block_size(&self) -> usize {
        self.ops[0].perm.len()
    }

    /// Operation for key value `index` (taken mod 4).
    pub fn op(&self, index: u8) -> &CoreOp {
        &self.ops[usize::from(index & 0b11)]
    }

    pub fn ops(&self) -> &[CoreOp; 4] {
        &self.ops
    }

    /// Whether the inverse of every operation is again in the set.
    pub fn closed_under_inverse(&self) -> bool {
        self.ops
            .iter()
            .all(|op| self.ops.iter().any(|o| o.perm == op.perm.inverse()))
    }
}

impl Default for PermutationSet {
    fn default() -> Self {
        Self::cyclic()
    }
}

impl TryFrom<Vec<Permutation>> for PermutationSet {
    type Error = CoreError;

    fn try_from(v: Vec<Permutation>) -> Result<Self, CoreError> {
        Self::new(v)
    }
}

impl From<PermutationSet> for Vec<Permutation> {
    fn from(s: PermutationSet) -> Self {
        s.ops.into_iter().map(|o| o.perm).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAGS: [&str; 4] = ["B1", "B2", "B3", "B4"];

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn e0_keeps_order() {
        let set = PermutationSet::cyclic();
        assert_eq!(apply_core(set.op(0), &TAGS).unwrap(), TAGS);
    }

    #[test]
    fn e1_is_shift_by_one() {
        let set = PermutationSet::cyclic();
        assert_eq!(
            apply_core(set.op(1), &TAGS).unwrap(),
            ["B2", "B3", "B4", "B1"]
        );
    }

    #[test]
    fn shift_one_inverse_is_shift_three() {
        let set = PermutationSet::cyclic();
        assert_eq!(set.op(1).perm().inverse(), *set.op(3).perm());
        assert_eq!(set.op(2).perm().inverse(), *set.op(2).perm());
        assert!(set.closed_under_inverse());
    }

    #[test]
    fn default_ops_are_derangements_by_exhaustion() {
        let set = PermutationSet::cyclic();
        let derangements: Vec<Vec<usize>> = all_perms(4)
            .into_iter()
            .filter(|p| p.iter().enumerate().all(|(i, &x)| i != x))
            .collect();
        assert_eq!(derangements.len(), 9);
        for k in 1..4 {
            assert!(derangements.contains(&set.op(k).perm().images().to_vec()));
        }
    }

    #[test]
    fn round_trip_on_every_arrangement_of_tags() {
        let set = PermutationSet::cyclic();
        for p in all_perms(4) {
            let block: Vec<&str> = p.iter().map(|&i| TAGS[i]).collect();
            for op in set.ops() {
                let there = apply_core(op, &block).unwrap();
                assert_eq!(invert_core(op, &there).unwrap(), block);
            }
        }
    }

    #[test]
    fn wrong_block_length() {
        let set = PermutationSet::cyclic();
        assert_eq!(
            apply_core(set.op(1), &TAGS[..3]),
            Err(CoreError::BlockLength {
                expected: 4,
                got: 3
            })
        );
        assert!(invert_core(set.op(1), &[1, 2, 3, 4, 5]).is_err());
    }

    #[test]
    fn set_validation() {
        let p = |v: &[usize]| Permutation::new(v.to_vec()).unwrap();
        assert!(PermutationSet::new(vec![p(&[0, 1, 2, 3]); 3]).is_err());
        assert!(PermutationSet::new(vec![
            p(&[1, 0, 2, 3]),
            p(&[1, 2, 3, 0]),
            p(&[2, 3, 0, 1]),
            p(&[3, 0, 1, 2])
        ])
        .is_err());
        // fixed point in E2
        assert!(PermutationSet::new(vec![
            p(&[0, 1, 2, 3]),
            p(&[1, 2, 3, 0]),
            p(&[0, 3, 1, 2]),
            p(&[3, 0, 1, 2])
        ])
        .is_err());
        // duplicate
        assert!(PermutationSet::new(vec![
            p(&[0, 1, 2, 3]),
            p(&[1, 2, 3, 0]),
            p(&[1, 2, 3, 0]),
            p(&[3, 0, 1, 2])
        ])
        .is_err());
        // a non-cyclic valid set
        let s = PermutationSet::new(vec![
            p(&[0, 1, 2, 3]),
            p(&[1, 0, 3, 2]),
            p(&[2, 3, 0, 1]),
            p(&[3, 2, 1, 0]),
        ])
        .unwrap();
        assert!(s.closed_under_inverse());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        for v in all_perms(4) {
            let p = Permutation::new(v).unwrap();
            assert!(p.compose(&p.inverse()).is_identity());
        }
    }
}
