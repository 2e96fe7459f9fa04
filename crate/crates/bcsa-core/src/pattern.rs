//! Canonical slot-overlap patterns.
//!
//! A *pattern* abstracts a set of users and the slots they share: users are
//! relabeled 0..M-1, slots are forgotten, and only the multiset of occupied
//! "cells" remains, where a cell is the subset of users transmitting in one
//! slot. Patterns are the common currency between the decoder's residual
//! structures, the analytic catalog of unresolvable sets, and Monte-Carlo
//! harvesting: two collision configurations are "the same" exactly when
//! their canonical patterns compare equal.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// Above this many users, exact canonicalization (which tries every
/// degree-preserving user relabeling) is replaced by a coarse key.
pub const MAX_EXACT_USERS: usize = 6;

/// Canonical form of a slot-overlap pattern. Usable as an ordered map key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternKey {
    /// Full isomorphism class: per-user degrees (non-decreasing) and the
    /// lexicographically minimal sorted cell list over all degree-preserving
    /// user relabelings. Cells are bitmasks over user indices.
    Exact { degrees: Vec<u8>, cells: Vec<u16> },
    /// Coarse class for components larger than [`MAX_EXACT_USERS`]: sorted
    /// degrees and sorted cell sizes only.
    Coarse { degrees: Vec<u8>, cell_sizes: Vec<u8> },
}

impl PatternKey {
    /// Number of users in the pattern.
    pub fn user_count(&self) -> usize {
        match self {
            PatternKey::Exact { degrees, .. } | PatternKey::Coarse { degrees, .. } => {
                degrees.len()
            }
        }
    }

    /// Number of distinct occupied slots in the pattern.
    pub fn cell_count(&self) -> usize {
        match self {
            PatternKey::Exact { cells, .. } => cells.len(),
            PatternKey::Coarse { cell_sizes, .. } => cell_sizes.len(),
        }
    }

    /// Degree-vector entry: how many users have degree `d`.
    pub fn degree_multiplicity(&self, d: u8) -> usize {
        match self {
            PatternKey::Exact { degrees, .. } | PatternKey::Coarse { degrees, .. } => {
                degrees.iter().filter(|&&x| x == d).count()
            }
        }
    }
}

/// Calls `visit` once per permutation of `0..k` (as a relabeling slice).
fn for_each_permutation(k: usize, visit: &mut impl FnMut(&[u8])) {
    let mut items: Vec<u8> = (0..k as u8).collect();
    // Heap's algorithm, iterative.
    let mut c = alloc::vec![0usize; k];
    visit(&items);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(&items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Iterates every degree-preserving relabeling of users whose degrees are
/// given (already non-decreasing). `visit` receives `perm` where
/// `perm[old_index] = new_label`.
fn for_each_degree_preserving_perm(degrees: &[u8], visit: &mut impl FnMut(&[u8])) {
    // Group boundaries of equal degrees.
    let m = degrees.len();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=m {
        if i == m || degrees[i] != degrees[start] {
            groups.push((start, i));
            start = i;
        }
    }
    // Depth-first product of per-group permutations.
    fn recurse(
        groups: &[(usize, usize)],
        gi: usize,
        perm: &mut Vec<u8>,
        visit: &mut impl FnMut(&[u8]),
    ) {
        if gi == groups.len() {
            visit(perm);
            return;
        }
        let (s, e) = groups[gi];
        for_each_permutation(e - s, &mut |local| {
            for (off, &l) in local.iter().enumerate() {
                perm[s + off] = (s + l as usize) as u8;
            }
            recurse(groups, gi + 1, perm, visit);
        });
    }
    let mut perm: Vec<u8> = (0..m as u8).collect();
    recurse(&groups, 0, &mut perm, visit);
}

fn remap_cells(cells: &[u16], perm: &[u8]) -> Vec<u16> {
    let mut out: Vec<u16> = cells
        .iter()
        .map(|&mask| {
            let mut new_mask = 0u16;
            let mut m = mask;
            while m != 0 {
                let bit = m.trailing_zeros() as usize;
                new_mask |= 1 << perm[bit];
                m &= m - 1;
            }
            new_mask
        })
        .collect();
    out.sort_unstable();
    out
}

/// Canonicalizes a pattern given per-user degrees and the cell multiset
/// (cells as bitmasks over the given user indexing). Degrees need not be
/// sorted on input.
pub fn canonical_pattern(degrees: &[u8], cells: &[u16]) -> PatternKey {
    let m = degrees.len();
    debug_assert!(m <= 16, "patterns support at most 16 users");
    if m > MAX_EXACT_USERS {
        let mut ds = degrees.to_vec();
        ds.sort_unstable();
        let mut sizes: Vec<u8> = cells.iter().map(|c| c.count_ones() as u8).collect();
        sizes.sort_unstable();
        return PatternKey::Coarse { degrees: ds, cell_sizes: sizes };
    }
    // Relabel users so degrees are non-decreasing, then minimize over all
    // degree-preserving relabelings.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&u| degrees[u]);
    let mut base_perm = alloc::vec![0u8; m];
    for (new, &old) in order.iter().enumerate() {
        base_perm[old] = new as u8;
    }
    let sorted_degrees: Vec<u8> = order.iter().map(|&u| degrees[u]).collect();
    let base_cells = remap_cells(cells, &base_perm);

    let mut best: Option<Vec<u16>> = None;
    for_each_degree_preserving_perm(&sorted_degrees, &mut |perm| {
        let candidate = remap_cells(&base_cells, perm);
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    });
    PatternKey::Exact { degrees: sorted_degrees, cells: best.unwrap() }
}

/// Canonicalizes directly from per-user slot lists (slot ids arbitrary).
pub fn pattern_of_slots(slots_per_user: &[&[u16]]) -> PatternKey {
    let degrees: Vec<u8> = slots_per_user.iter().map(|s| s.len() as u8).collect();
    if slots_per_user.len() > MAX_EXACT_USERS {
        // Coarse path: only occupancy counts are needed, so the component may
        // hold arbitrarily many users (no per-user bitmasks involved).
        let mut occupancy: alloc::collections::BTreeMap<u16, u8> =
            alloc::collections::BTreeMap::new();
        for slots in slots_per_user {
            for &s in *slots {
                *occupancy.entry(s).or_insert(0) += 1;
            }
        }
        let mut ds = degrees;
        ds.sort_unstable();
        let mut sizes: Vec<u8> = occupancy.into_values().collect();
        sizes.sort_unstable();
        return PatternKey::Coarse { degrees: ds, cell_sizes: sizes };
    }
    let mut cell_map: alloc::collections::BTreeMap<u16, u16> = alloc::collections::BTreeMap::new();
    for (u, slots) in slots_per_user.iter().enumerate() {
        for &s in *slots {
            *cell_map.entry(s).or_insert(0) |= 1 << u;
        }
    }
    let cells: Vec<u16> = cell_map.into_values().collect();
    canonical_pattern(&degrees, &cells)
}

/// Enumerates every cell multiset over users with the given degrees where
/// each cell contains at least `min_cell_size` users and user `u` appears in
/// exactly `degrees[u]` cells. Returns each multiset as a sorted cell list.
///
/// Intended for the tiny sizes of the analytic catalog (at most 4 users).
pub fn enumerate_cell_multisets(degrees: &[u8], min_cell_size: u32) -> Vec<Vec<u16>> {
    let m = degrees.len();
    assert!(m <= 8, "cell enumeration supports at most 8 users");
    let full = (1u16 << m) - 1;
    let masks: Vec<u16> = (1..=full).filter(|mask| mask.count_ones() >= min_cell_size).collect();
    let mut remaining: Vec<u8> = degrees.to_vec();
    let mut current: Vec<u16> = Vec::new();
    let mut out: Vec<Vec<u16>> = Vec::new();

    fn recurse(
        masks: &[u16],
        idx: usize,
        remaining: &mut [u8],
        current: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(current.clone());
            return;
        }
        if idx == masks.len() {
            return;
        }
        let mask = masks[idx];
        // Maximum multiplicity for this cell: limited by each member's
        // remaining degree.
        let mut cap = u8::MAX;
        let mut mm = mask;
        while mm != 0 {
            let bit = mm.trailing_zeros() as usize;
            cap = cap.min(remaining[bit]);
            mm &= mm - 1;
        }
        for count in 0..=cap {
            if count > 0 {
                let mut mm = mask;
                while mm != 0 {
                    let bit = mm.trailing_zeros() as usize;
                    remaining[bit] -= 1;
                    mm &= mm - 1;
                }
                current.push(mask);
            }
            recurse(masks, idx + 1, remaining, current, out);
            if count == cap {
                // Undo all `cap` pushes for this mask.
                for _ in 0..cap {
                    current.pop();
                    let mut mm = mask;
                    while mm != 0 {
                        let bit = mm.trailing_zeros() as usize;
                        remaining[bit] += 1;
                        mm &= mm - 1;
                    }
                }
                break;
            }
        }
    }
    recurse(&masks, 0, &mut remaining, &mut current, &mut out);
    out
}

/// Counts the distinct user-labeled realizations of a canonical pattern on a
/// fixed slot set `{0..D-1}` with every slot occupied: the number of slot-set
/// tuples `(A_0, .., A_{M-1})` whose overlap structure is isomorphic to the
/// pattern. Used as the `labelings` factor of occurrence probabilities.
pub fn count_labelings(degrees: &[u8], cells: &[u16]) -> u64 {
    let d = cells.len();
    assert!(d <= 8, "labeling count supports at most 8 distinct slots");
    let mut outcomes: BTreeSet<Vec<Vec<u16>>> = BTreeSet::new();
    for_each_degree_preserving_perm(degrees, &mut |user_perm| {
        let permuted = remap_cells(cells, user_perm);
        for_each_permutation(d, &mut |slot_perm| {
            let mut outcome: Vec<Vec<u16>> = alloc::vec![Vec::new(); degrees.len()];
            for (cell_idx, &mask) in permuted.iter().enumerate() {
                let slot = slot_perm[cell_idx] as u16;
                let mut mm = mask;
                while mm != 0 {
                    let bit = mm.trailing_zeros() as usize;
                    outcome[bit].push(slot);
                    mm &= mm - 1;
                }
            }
            for slots in &mut outcome {
                slots.sort_unstable();
            }
            outcomes.insert(outcome);
        });
    });
    outcomes.len() as u64
}
