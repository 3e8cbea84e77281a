//! Allocation of pumping slots over a 24-hour cycle.
//!
//! The day is divided into equal slots. Every `emergent_period`-th slot is a
//! shared relief slot open to any unit above its warning level; the rest are
//! regular slots, each owned by exactly one unit. Ownership is assigned
//! round-robin over a seeded permutation, so per-unit counts differ by at
//! most one and the layout is reproducible from the seed.

use crate::error::{Error, Result};
use crate::rng;

pub const SECONDS_PER_DAY: u64 = 86_400;

/// What happens in a given slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    /// Owned by one unit for its scheduled drawing.
    Regular(usize),
    /// Shared relief slot for all units above the warning level.
    Emergent,
}

/// Position within the daily cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotInfo {
    /// Slot index within the day, `0..slots_per_day`.
    pub index: u64,
    pub kind: SlotKind,
    /// Seconds elapsed since the slot began; 0 exactly at entry.
    pub t_into_slot: u64,
}

/// One day of slot assignments, repeated over the whole horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSchedule {
    n_units: usize,
    slot_len: u64,
    emergent_period: u64,
    slots_per_day: u64,
    /// Owner of the i-th regular slot of the day.
    owners: Vec<u32>,
}

/// Builds the daily slot layout.
///
/// Regular slots are dealt round-robin over a seeded permutation of the
/// units, repeating until the day is filled. Fails when the day has fewer
/// regular slots than units, because some unit would never pump.
pub fn build_schedule(
    n_units: usize,
    slot_len: u64,
    emergent_period: u64,
    seed: u64,
) -> Result<SlotSchedule> {
    if n_units == 0 {
        return Err(Error::invalid("n_units", "must be >= 1"));
    }
    if slot_len == 0 || SECONDS_PER_DAY % slot_len != 0 {
        return Err(Error::invalid(
            "control.slot_len",
            format!("must divide 86400 s, got {slot_len} s"),
        ));
    }
    let slots_per_day = SECONDS_PER_DAY / slot_len;
    let emergent_count = if emergent_period > 0 {
        slots_per_day / emergent_period
    } else {
        0
    };
    let regular_count = slots_per_day - emergent_count;
    if (regular_count as usize) < n_units {
        return Err(Error::invalid(
            "control.slot_len",
            format!(
                "only {regular_count} regular slots per day for {n_units} units; \
                 some unit would never pump"
            ),
        ));
    }
    let perm = rng::shuffled_indices(n_units, rng::mix(&[seed, rng::STREAM_SCHEDULE]));
    let owners = (0..regular_count as usize)
        .map(|i| perm[i % n_units] as u32)
        .collect();
    Ok(SlotSchedule {
        n_units,
        slot_len,
        emergent_period,
        slots_per_day,
        owners,
    })
}

/// Builds a layout with hand-picked ownership.
///
/// `owners[i]` is the owner of the i-th regular slot of the day. Every unit
/// must own at least one slot; ownership of each slot is exclusive by
/// construction.
pub fn schedule_with_owners(
    n_units: usize,
    slot_len: u64,
    emergent_period: u64,
    owners: Vec<usize>,
) -> Result<SlotSchedule> {
    let template = build_schedule(n_units, slot_len, emergent_period, 0)?;
    if owners.len() as u64 != template.regular_slots_per_day() {
        return Err(Error::invalid(
            "control.owners",
            format!(
                "expected one owner per regular slot ({}), got {}",
                template.regular_slots_per_day(),
                owners.len()
            ),
        ));
    }
    let mut seen = vec![false; n_units];
    for &o in &owners {
        if o >= n_units {
            return Err(Error::invalid(
                "control.owners",
                format!("unit {o} out of range for {n_units} units"),
            ));
        }
        seen[o] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(
            "control.owners",
            format!("unit {missing} owns no regular slot and would never pump"),
        ));
    }
    Ok(SlotSchedule {
        owners: owners.into_iter().map(|o| o as u32).collect(),
        ..template
    })
}

impl SlotSchedule {
    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn slot_len(&self) -> u64 {
        self.slot_len
    }

    pub fn emergent_period(&self) -> u64 {
        self.emergent_period
    }

    pub fn slots_per_day(&self) -> u64 {
        self.slots_per_day
    }

    pub fn regular_slots_per_day(&self) -> u64 {
        self.owners.len() as u64
    }

    /// Every `emergent_period`-th slot is the shared one.
    #[inline]
    pub fn is_emergent(&self, slot_index: u64) -> bool {
        self.emergent_period > 0 && slot_index % self.emergent_period == self.emergent_period - 1
    }

    /// Rank of a regular slot among the regular slots of the day.
    #[inline]
    fn regular_rank(&self, slot_index: u64) -> u64 {
        if self.emergent_period > 0 {
            slot_index - (slot_index + 1) / self.emergent_period
        } else {
            slot_index
        }
    }

    /// Owner of a regular slot.
    pub fn owner_of(&self, slot_index: u64) -> Option<usize> {
        if self.is_emergent(slot_index) {
            None
        } else {
            Some(self.owners[self.regular_rank(slot_index) as usize] as usize)
        }
    }

    /// Number of regular slots owned by `unit` per day.
    pub fn regular_slots_of(&self, unit: usize) -> usize {
        self.owners.iter().filter(|&&o| o as usize == unit).count()
    }

    /// Mean regular slots per unit per day; the municipal mass balance uses
    /// this to size the base pump time.
    pub fn mean_slots_per_unit(&self) -> f64 {
        self.owners.len() as f64 / self.n_units as f64
    }

    /// Slot containing sim-time `t`. Pure; days wrap.
    pub fn slot_at(&self, t: u64) -> SlotInfo {
        let day_t = t % SECONDS_PER_DAY;
        let index = day_t / self.slot_len;
        let t_into_slot = day_t % self.slot_len;
        let kind = match self.owner_of(index) {
            None => SlotKind::Emergent,
            Some(owner) => SlotKind::Regular(owner),
        };
        SlotInfo {
            index,
            kind,
            t_into_slot,
        }
    }

    /// Start of the next slot after time `t`.
    pub fn next_boundary(&self, t: u64) -> u64 {
        (t / self.slot_len + 1) * self.slot_len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_layout_counts() {
        // 600 s slots: 144 per day; every 10th emergent -> 14 emergent,
        // 130 regular shared by 12 units as 10 or 11 each.
        let s = build_schedule(12, 600, 10, 1).unwrap();
        assert_eq!(s.slots_per_day(), 144);
        assert_eq!(s.regular_slots_per_day(), 130);

        let mut emergent = Vec::new();
        let mut per_unit = vec![0usize; 12];
        for idx in 0..s.slots_per_day() {
            match s.owner_of(idx) {
                None => emergent.push(idx),
                Some(u) => per_unit[u] += 1,
            }
        }
        let expected: Vec<u64> = (0..14).map(|k| 9 + 10 * k).collect();
        assert_eq!(emergent, expected);
        assert!(per_unit.iter().all(|&c| c == 10 || c == 11));
        assert_eq!(per_unit.iter().sum::<usize>(), 130);
        for unit in 0..12 {
            assert_eq!(s.regular_slots_of(unit), per_unit[unit]);
        }
    }

    #[test]
    fn ownership_is_a_partition() {
        let s = build_schedule(7, 300, 6, 5).unwrap();
        // Every slot is either emergent or owned by exactly one valid unit.
        for idx in 0..s.slots_per_day() {
            match s.owner_of(idx) {
                None => assert!(s.is_emergent(idx)),
                Some(u) => assert!(u < 7),
            }
        }
        // Fairness: counts differ by at most one.
        let counts: Vec<usize> = (0..7).map(|u| s.regular_slots_of(u)).collect();
        let min = counts.iter().min().unwrap();
        let max = counts.iter().max().unwrap();
        assert!(max - min <= 1, "counts: {counts:?}");
    }

    #[test]
    fn single_unit_owns_every_regular_slot() {
        let s = build_schedule(1, 600, 10, 3).unwrap();
        for idx in 0..s.slots_per_day() {
            if !s.is_emergent(idx) {
                assert_eq!(s.owner_of(idx), Some(0));
            }
        }
    }

    #[test]
    fn every_tenth_slot_is_emergent() {
        let s = build_schedule(2, 600, 10, 0).unwrap();
        assert!(s.is_emergent(9));
        assert!(!s.is_emergent(10));
    }

    #[test]
    fn slot_lookup() {
        let s = build_schedule(3, 600, 10, 0).unwrap();
        let at0 = s.slot_at(0);
        assert_eq!(at0.index, 0);
        assert_eq!(at0.t_into_slot, 0);

        let at = s.slot_at(5400);
        assert_eq!(at.index, 9);
        assert_eq!(at.kind, SlotKind::Emergent);
        assert_eq!(at.t_into_slot, 0);

        // The day wraps.
        let wrapped = s.slot_at(86_400);
        assert_eq!(wrapped.index, 0);
        assert_eq!(wrapped.t_into_slot, 0);

        let mid = s.slot_at(86_400 + 650);
        assert_eq!(mid.index, 1);
        assert_eq!(mid.t_into_slot, 50);
    }

    #[test]
    fn rejects_undersized_day() {
        // 3600 s slots -> 24 slots, 2 emergent with period 12 -> 22 regular.
        let err = build_schedule(30, 3600, 12, 0).unwrap_err().to_string();
        assert!(err.contains("slot_len"), "got: {err}");
        // And slot lengths that do not divide the day.
        assert!(build_schedule(2, 7000, 10, 0).is_err());
    }

    #[test]
    fn explicit_owners_are_validated() {
        // 600 s slots, no emergent: 144 regular slots.
        let owners: Vec<usize> = (0..144).map(|i| i % 3).collect();
        let s = schedule_with_owners(3, 600, 0, owners).unwrap();
        assert_eq!(s.owner_of(5), Some(2));

        assert!(schedule_with_owners(3, 600, 0, vec![0; 10]).is_err());
        assert!(schedule_with_owners(3, 600, 0, vec![7; 144]).is_err());
        // A unit owning nothing is rejected.
        assert!(schedule_with_owners(3, 600, 0, vec![0; 144]).is_err());
    }

    #[test]
    fn zero_period_disables_emergent_slots() {
        let s = build_schedule(4, 600, 0, 2).unwrap();
        assert_eq!(s.regular_slots_per_day(), s.slots_per_day());
        for idx in 0..s.slots_per_day() {
            assert!(!s.is_emergent(idx));
        }
    }

    #[test]
    fn layout_is_seed_deterministic() {
        let a = build_schedule(9, 450, 8, 42).unwrap();
        let b = build_schedule(9, 450, 8, 42).unwrap();
        let c = build_schedule(9, 450, 8, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
