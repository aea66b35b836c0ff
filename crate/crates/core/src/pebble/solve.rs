//! Realizability and solvability of pebble positions.
//!
//! A placed pebble is *available* in a position with `f` free pebbles when
//! another pebble (node 0 included) sits at most `2^f` positions to its
//! left; an available pebble can be lifted with the free pebbles' help, a
//! single big step standing for the primitive move sequence. A position is
//! weakly solvable when some order of removing available pebbles frees them
//! all, strongly solvable when every maximal order does, and realizable
//! when its pebbles can be numbered `f, f+1, ..., n-1` such that pebble `i`
//! has a higher-numbered pebble (node 0 counting as infinity) at most `2^i`
//! positions to its left.

use super::{PebbleState, ResourceLimit};
use std::collections::HashMap;

const MAX_PLACED: usize = 8;

fn guard(state: &PebbleState, what: &str) -> Result<(), ResourceLimit> {
    if state.occupied.len() > MAX_PLACED {
        return Err(ResourceLimit(format!(
            "{what} limited to {MAX_PLACED} placed pebbles (got {})",
            state.occupied.len()
        )));
    }
    Ok(())
}

/// Numbering condition for one pebble: some strictly higher-numbered
/// pebble within `2^number` positions to its left.
fn supported(positions: &[u64], numbers: &[u32], idx: usize) -> bool {
    let p = positions[idx];
    let reach = 1u128 << numbers[idx].min(127);
    if u128::from(p) <= reach {
        return true; // node 0, numbered infinity
    }
    positions.iter().zip(numbers).any(|(&q, &num)| {
        q < p && u128::from(p - q) <= reach && num > numbers[idx]
    })
}

fn numbering_works(positions: &[u64], numbers: &[u32]) -> bool {
    (0..positions.len()).all(|i| supported(positions, numbers, i))
}

/// Whether the position can arise from the empty board under the game
/// rules without erasures.
///
/// A greedy assignment (highest numbers to the leftmost pebbles) is tried
/// first; if it fails, all numberings of up to [`MAX_PLACED`] pebbles are
/// searched. Greedy success is a witness, so only completeness relies on
/// the exhaustive fallback.
pub fn is_realizable(state: &PebbleState) -> Result<bool, ResourceLimit> {
    guard(state, "realizability check")?;
    let positions: Vec<u64> = state.occupied.iter().copied().collect();
    let m = positions.len();
    if m == 0 {
        return Ok(true);
    }
    let f = state.free();
    // positions is sorted ascending; leftmost gets n - 1.
    let greedy: Vec<u32> = (0..m).map(|i| state.total - 1 - i as u32).collect();
    if numbering_works(&positions, &greedy) {
        return Ok(true);
    }
    let mut numbers: Vec<u32> = (f..state.total).collect();
    Ok(permutations(&mut numbers, 0, &mut |perm| {
        numbering_works(&positions, perm)
    }))
}

fn permutations(items: &mut [u32], k: usize, accept: &mut impl FnMut(&[u32]) -> bool) -> bool {
    if k == items.len() {
        return accept(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        if permutations(items, k + 1, accept) {
            return true;
        }
        items.swap(k, i);
    }
    false
}

fn available(positions: &[u64], free: u32) -> Vec<usize> {
    let reach = 1u128 << free.min(127);
    positions
        .iter()
        .enumerate()
        .filter(|&(_, &p)| {
            u128::from(p) <= reach
                || positions.iter().any(|&q| q < p && u128::from(p - q) <= reach)
        })
        .map(|(i, _)| i)
        .collect()
}

fn search(
    positions: Vec<u64>,
    free: u32,
    universal: bool,
    memo: &mut HashMap<Vec<u64>, bool>,
) -> bool {
    if positions.is_empty() {
        return true;
    }
    if let Some(&known) = memo.get(&positions) {
        return known;
    }
    let candidates = available(&positions, free);
    let result = if candidates.is_empty() {
        false // dead end with pebbles still placed
    } else if universal {
        candidates.iter().all(|&i| {
            let mut next = positions.clone();
            next.remove(i);
            search(next, free + 1, universal, memo)
        })
    } else {
        candidates.iter().any(|&i| {
            let mut next = positions.clone();
            next.remove(i);
            search(next, free + 1, universal, memo)
        })
    };
    memo.insert(positions, result);
    result
}

/// Whether some order of repeatedly removing an available pebble frees
/// them all.
pub fn is_weakly_solvable(state: &PebbleState) -> Result<bool, ResourceLimit> {
    guard(state, "solvability search")?;
    let positions: Vec<u64> = state.occupied.iter().copied().collect();
    Ok(search(positions, state.free(), false, &mut HashMap::new()))
}

/// Whether every order of repeatedly removing an available pebble frees
/// them all.
pub fn is_strongly_solvable(state: &PebbleState) -> Result<bool, ResourceLimit> {
    guard(state, "solvability search")?;
    let positions: Vec<u64> = state.occupied.iter().copied().collect();
    Ok(search(positions, state.free(), true, &mut HashMap::new()))
}
