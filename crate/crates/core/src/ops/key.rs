use serde::{Deserialize, Serialize};

use super::{CoreOp, PermutationSet};
use crate::error::CoreError;

/// Pre-shared key of `2·N_k` bits, read as `N_k` two-bit operation indices
/// and reused cyclically over a session.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ControlKey {
    bits: Vec<bool>,
}

impl ControlKey {
    pub fn new(bits: Vec<bool>) -> Result<Self, CoreError> {
        if bits.len() < 2 || !bits.len().is_multiple_of(2) {
            return Err(CoreError::ControlKey(format!(
                "length {} is not a positive even number",
                bits.len()
            )));
        }
        Ok(Self { bits })
    }

    /// Key whose successive two-bit values are `values` (each `< 4`).
    pub fn from_values(values: &[u8]) -> Result<Self, CoreError> {
        if let Some(v) = values.iter().find(|&&v| v > 3) {
            return Err(CoreError::ControlKey(format!("value {v} exceeds two bits")));
        }
        Self::new(
            values
                .iter()
                .flat_map(|&v| [v & 2 != 0, v & 1 != 0])
                .collect(),
        )
    }

    /// Parses a string of `0`/`1` characters; `_` and spaces are ignored.
    pub fn parse(s: &str) -> Result<Self, CoreError> {
        let bits = s
            .chars()
            .filter(|c| *c != '_' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CoreError::ControlKey(format!(
                    "unexpected character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `N_k`, the number of operation indices.
    pub fn n_values(&self) -> usize {
        self.bits.len() / 2
    }

    pub fn value(&self, i: usize) -> u8 {
        (u8::from(self.bits[2 * i]) << 1) | u8::from(self.bits[2 * i + 1])
    }

    pub fn values(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.n_values()).map(|i| self.value(i))
    }

    /// Operation index used for block `block` under `group`.
    pub fn op_index_for_block(&self, block: usize, group: GroupConfig) -> u8 {
        self.value((block / group.group_size()) % self.n_values())
    }
}

impl std::fmt::Display for ControlKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl TryFrom<String> for ControlKey {
    type Error = CoreError;

    fn try_from(s: String) -> Result<Self, CoreError> {
        Self::parse(&s)
    }
}

impl From<ControlKey> for String {
    fn from(k: ControlKey) -> Self {
        k.to_string()
    }
}

/// Number of consecutive blocks governed by one key value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GroupConfig {
    group_size: usize,
}

impl GroupConfig {
    pub fn new(group_size: usize) -> Result<Self, CoreError> {
        if group_size == 0 {
            return Err(CoreError::GroupSize);
        }
        Ok(Self { group_size })
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }
}

impl Default for GroupConfig {
    fn default() -> Self {
        Self { group_size: 1 }
    }
}

impl TryFrom<usize> for GroupConfig {
    type Error = CoreError;

    fn try_from(n: usize) -> Result<Self, CoreError> {
        Self::new(n)
    }
}

impl From<GroupConfig> for usize {
    fn from(g: GroupConfig) -> Self {
        g.group_size
    }
}

/// Endless stream of the operation applied to blocks `0, 1, 2, …`.
pub fn key_stream<'a>(
    key: &'a ControlKey,
    group: GroupConfig,
    set: &'a PermutationSet,
) -> impl Iterator<Item = &'a CoreOp> + 'a {
    (0..).map(move |block| set.op(key.op_index_for_block(block, group)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indices(key: &ControlKey, group: usize, n: usize) -> Vec<u8> {
        let set = PermutationSet::cyclic();
        key_stream(key, GroupConfig::new(group).unwrap(), &set)
            .take(n)
            .map(CoreOp::index)
            .collect()
    }

    #[test]
    fn single_value_repeats() {
        let key = ControlKey::parse("01").unwrap();
        assert_eq!(indices(&key, 1, 5), vec![1; 5]);
    }

    #[test]
    fn values_cycle() {
        let key = ControlKey::parse("0011").unwrap();
        assert_eq!(indices(&key, 1, 5), vec![0, 3, 0, 3, 0]);
    }

    #[test]
    fn groups_of_four_blocks() {
        let key = ControlKey::parse("01").unwrap();
        assert_eq!(indices(&key, 4, 8), vec![1; 8]);
        let key = ControlKey::from_values(&[1, 2]).unwrap();
        assert_eq!(indices(&key, 4, 10), vec![1, 1, 1, 1, 2, 2, 2, 2, 1, 1]);
    }

    #[test]
    fn key_validation() {
        assert!(ControlKey::parse("0").is_err());
        assert!(ControlKey::parse("011").is_err());
        assert!(ControlKey::parse("01x1").is_err());
        assert!(ControlKey::from_values(&[4]).is_err());
        assert_eq!(ControlKey::parse("01_10").unwrap().to_string(), "0110");
        assert_eq!(
            ControlKey::from_values(&[2, 3]).unwrap().to_string(),
            "1011"
        );
        assert_eq!(GroupConfig::new(0), Err(CoreError::GroupSize));
    }
}
