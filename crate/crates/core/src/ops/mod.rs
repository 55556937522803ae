//! Order-rearrangement operations.
//!
//! A block holds four EPR pairs. The upper halves travel in preparation order;
//! the lower halves are reordered by one of four operations selected by two
//! bits of the control key. Operation 0 is the identity, the other three are
//! derangements, so under a wrong operation every upper particle travels next
//! to a lower particle from a different pair.

mod device;
mod key;
mod permutation;

pub use device::{
    perm_to_schedule, schedule_to_perm, DeviceModel, SwitchPosition, SwitchSchedule, SwitchSetting,
};
pub use key::{key_stream, ControlKey, GroupConfig};
pub use permutation::{apply_core, invert_core, CoreOp, Permutation, PermutationSet};

/// Pairs per block.
pub const BLOCK_SIZE: usize = 4;
