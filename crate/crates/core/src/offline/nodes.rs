//! Fixed node sets for scheduled jobs.
//!
//! Capacity per slot is necessary but not sufficient for a preemptive
//! schedule to keep every job on the same nodes: with two nodes, unit jobs on
//! slots `{0,1}`, `{1,2}` and `{0,2}` pairwise overlap and would need three.
//! The search below finds an assignment or proves none exists.

use std::collections::BTreeMap;

use crate::model::Placement;

/// Longest horizon the busy-mask representation supports.
pub(crate) const MAX_SLOTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAssignment {
    pub job_id: u64,
    /// Ascending node indices, `nodes.len() == job.nodes`.
    pub nodes: Vec<usize>,
}

fn slot_mask(p: &Placement) -> u128 {
    p.active_slots.iter().fold(0u128, |m, &t| m | (1u128 << t))
}

/// Assigns each placement a fixed set of `nodes` machines so that no machine
/// runs two jobs in the same slot. Returns `None` when impossible.
///
/// Panics if a placement uses a slot at or beyond [`MAX_SLOTS`].
pub fn assign_nodes(placements: &[Placement], machines: usize) -> Option<Vec<NodeAssignment>> {
    let mut order: Vec<usize> = (0..placements.len()).collect();
    order.sort_by_key(|&i| (placements[i].start(), std::cmp::Reverse(placements[i].nodes)));
    let masks: Vec<u128> = placements
        .iter()
        .map(|p| {
            assert!(p.active_slots.iter().all(|&t| t < MAX_SLOTS), "slot beyond {MAX_SLOTS}");
            slot_mask(p)
        })
        .collect();
    let mut busy = vec![0u128; machines];
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); placements.len()];
    if !search(0, &order, placements, &masks, &mut busy, &mut chosen) {
        return None;
    }
    Some(
        placements
            .iter()
            .zip(chosen)
            .map(|(p, nodes)| NodeAssignment {
                job_id: p.job_id,
                nodes,
            })
            .collect(),
    )
}

fn search(
    k: usize,
    order: &[usize],
    placements: &[Placement],
    masks: &[u128],
    busy: &mut [u128],
    chosen: &mut [Vec<usize>],
) -> bool {
    let Some(&i) = order.get(k) else {
        return true;
    };
    let need = placements[i].nodes;
    let mask = masks[i];
    // Free machines grouped by their busy pattern; machines in one group are
    // interchangeable for every later job.
    let mut groups: BTreeMap<u128, Vec<usize>> = BTreeMap::new();
    for (m, &b) in busy.iter().enumerate() {
        if b & mask == 0 {
            groups.entry(b).or_default().push(m);
        }
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    if groups.iter().map(Vec::len).sum::<usize>() < need {
        return false;
    }
    let mut counts = vec![0; groups.len()];
    split(0, need, &groups, &mut counts, &mut |counts| {
        let nodes: Vec<usize> = groups
            .iter()
            .zip(counts)
            .flat_map(|(g, &c)| g[..c].iter().copied())
            .collect();
        for &m in &nodes {
            busy[m] |= mask;
        }
        let ok = search(k + 1, order, placements, masks, busy, chosen);
        if ok {
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            chosen[i] = sorted;
        } else {
            for &m in &nodes {
                busy[m] &= !mask;
            }
        }
        ok
    })
}

/// Enumerates ways to take `left` machines across groups; stops at the first
/// `visit` that returns true.
fn split(
    g: usize,
    left: usize,
    groups: &[Vec<usize>],
    counts: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if g == groups.len() {
        return left == 0 && visit(counts);
    }
    let rest: usize = groups[g + 1..].iter().map(Vec::len).sum();
    let lo = left.saturating_sub(rest);
    let hi = left.min(groups[g].len());
    for c in (lo..=hi).rev() {
        counts[g] = c;
        if split(g + 1, left - c, groups, counts, visit) {
            return true;
        }
    }
    counts[g] = 0;
    false
}
