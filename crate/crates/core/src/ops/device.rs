//! Switch-and-delay-loop device that physically realizes the rearrangements.
//!
//! Geometry (time is counted in slots; particle `k` of a block reaches the
//! device at slot `k`):
//!
//! ```text
//!            S1 up (line)                    S2 bar: line -> out
//!   in ──S1──────────────────────────────S2────────────────── out
//!         │ S1 down                       │ cross: line -> loop,
//!         ▼                               │        loop -> out
//!       loop entry ◄──────────────────────┘ bar:   loop -> loop entry
//!         │                    ▲
//!         └── delay L slots ──S3 up (recirculate)
//!                              S3 down (release to S2)
//! ```
//!
//! * S1 routes the arriving particle onto the straight line (up) or into the
//!   loop (down). The line has no delay.
//! * S3 sits at the end of the loop: up sends the particle round again, down
//!   releases it toward S2.
//! * S2 is a 2×2 junction of the line and the released particle. Down (bar)
//!   emits the line particle and feeds the released one back into the loop;
//!   up (cross) emits the released particle and sends the line particle into
//!   the loop.
//!
//! The three switches take the schedule's setting for slot `t` while
//! `t < block size`, then stay in the idle setting (up, up, down). Output
//! order is the order of emission; equal spacing of the emitted particles is
//! assumed to be restored downstream. Two particles entering the loop in the
//! same slot is a collision.

use serde::{Deserialize, Serialize};

use super::Permutation;
use crate::error::DeviceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchPosition {
    Up,
    Down,
}

use SwitchPosition::{Down, Up};

/// Positions of switches 1, 2 and 3 during one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchSetting(pub [SwitchPosition; 3]);

impl SwitchSetting {
    /// (up, up, down): every particle passes through the loop exactly once.
    pub const PASS_THROUGH: SwitchSetting = SwitchSetting([Up, Up, Down]);

    /// All eight settings, pass-through first, the rest in lexicographic order
    /// with up before down.
    pub fn all() -> [SwitchSetting; 8] {
        let mut out = [Self::PASS_THROUGH; 8];
        let mut k = 1;
        for code in 0..8u8 {
            let pos = |bit: u8| if code & bit == 0 { Up } else { Down };
            let s = SwitchSetting([pos(4), pos(2), pos(1)]);
            if s != Self::PASS_THROUGH {
                out[k] = s;
                k += 1;
            }
        }
        out
    }
}

impl std::fmt::Display for SwitchSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = |p: SwitchPosition| match p {
            Up => "up",
            Down => "down",
        };
        write!(
            f,
            "({}, {}, {})",
            name(self.0[0]),
            name(self.0[1]),
            name(self.0[2])
        )
    }
}

/// One switch setting per block position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchSchedule(pub Vec<SwitchSetting>);

impl SwitchSchedule {
    pub fn uniform(setting: SwitchSetting, len: usize) -> Self {
        Self(vec![setting; len])
    }

    /// The schedule given for `E1`: (down, up, down), (up, down, up),
    /// (up, down, down), (up, down, up).
    pub fn e1_reference() -> Self {
        Self(vec![
            SwitchSetting([Down, Up, Down]),
            SwitchSetting([Up, Down, Up]),
            SwitchSetting([Up, Down, Down]),
            SwitchSetting([Up, Down, Up]),
        ])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parameters of the device geometry described in the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceModel {
    /// Slots a particle spends on one round of the loop.
    pub loop_delay: usize,
    /// Setting held once the schedule is exhausted.
    pub idle: SwitchSetting,
    pub block_size: usize,
}

impl DeviceModel {
    pub fn new(loop_delay: usize) -> Self {
        Self {
            loop_delay: loop_delay.max(1),
            ..Self::default()
        }
    }

    /// Runs `schedule` and returns the emission slot of every particle.
    pub fn exit_slots(&self, schedule: &SwitchSchedule) -> Result<Vec<usize>, DeviceError> {
        let n = self.block_size;
        if schedule.len() != n {
            return Err(DeviceError::ScheduleLength {
                expected: n,
                got: schedule.len(),
            });
        }
        let delay = self.loop_delay.max(1);
        let horizon = n + (n + 2) * delay;
        let mut exits: Vec<Option<usize>> = vec![None; n];
        // (particle, slot at which it reaches S3)
        let mut in_loop: Vec<(usize, usize)> = Vec::new();
        let mut emitted = 0;

        for t in 0..horizon {
            if emitted == n {
                break;
            }
            let SwitchSetting([s1, s2, s3]) = schedule.0.get(t).copied().unwrap_or(self.idle);
            let mut entering: Vec<usize> = Vec::new();
            let mut line = None;
            if t < n {
                match s1 {
                    Up => line = Some(t),
                    Down => entering.push(t),
                }
            }
            let mut released = None;
            if let Some(pos) = in_loop.iter().position(|&(_, at)| at == t) {
                let (p, _) = in_loop.swap_remove(pos);
                match s3 {
                    Up => entering.push(p),
                    Down => released = Some(p),
                }
            }
            let (out, back) = match s2 {
                Down => (line, released),
                Up => (released, line),
            };
            if let Some(p) = out {
                exits[p] = Some(t);
                emitted += 1;
            }
            entering.extend(back);
            match entering.as_slice() {
                [] => {}
                [p] => in_loop.push((*p, t + delay)),
                _ => return Err(DeviceError::Collision { slot: t }),
            }
        }
        exits
            .iter()
            .enumerate()
            .map(|(p, e)| e.ok_or(DeviceError::Stuck { particle: p }))
            .collect()
    }
}

impl Default for DeviceModel {
    /// Loop delay of four slots, one full block.
    fn default() -> Self {
        Self {
            loop_delay: 4,
            idle: SwitchSetting::PASS_THROUGH,
            block_size: super::BLOCK_SIZE,
        }
    }
}

/// Output order induced by `schedule`: position `p` of the result is the
/// particle emitted `p`-th.
pub fn schedule_to_perm(
    schedule: &SwitchSchedule,
    device: &DeviceModel,
) -> Result<Permutation, DeviceError> {
    let exits = device.exit_slots(schedule)?;
    let mut order: Vec<usize> = (0..exits.len()).collect();
    order.sort_by_key(|&p| exits[p]);
    Ok(Permutation::new(order).expect("emission order is a permutation"))
}

/// Finds a schedule realizing `perm` by exhaustive search over the `8^n`
/// schedules, in the order given by [`SwitchSetting::all`] with the first
/// slot most significant.
pub fn perm_to_schedule(
    perm: &Permutation,
    device: &DeviceModel,
) -> Result<SwitchSchedule, DeviceError> {
    let n = device.block_size;
    let unrealizable = || DeviceError::Unrealizable {
        perm: perm.images().to_vec(),
        block_size: n,
        loop_delay: device.loop_delay,
    };
    if perm.len() != n {
        return Err(unrealizable());
    }
    let settings = SwitchSetting::all();
    let total = 8usize.pow(n as u32);
    let mut schedule = SwitchSchedule::uniform(SwitchSetting::PASS_THROUGH, n);
    for code in 0..total {
        let mut c = code;
        for slot in (0..n).rev() {
            schedule.0[slot] = settings[c % 8];
            c /= 8;
        }
        if schedule_to_perm(&schedule, device).ok().as_ref() == Some(perm) {
            return Ok(schedule);
        }
    }
    Err(unrealizable())
}
