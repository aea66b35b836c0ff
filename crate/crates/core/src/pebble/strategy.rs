//! Strategy generators: the recursive checkpointing plays and the erasure
//! springboard variant.

use super::{PebbleId, PebbleMove, Strategy};

fn invert(moves: &[PebbleMove]) -> Vec<PebbleMove> {
    moves
        .iter()
        .rev()
        .map(|m| m.inverse().expect("erasure-free sequence"))
        .collect()
}

/// Appends the chain play for a segment of `2^m - 1` nodes after `base`:
/// starting from a pebble (or node 0) on `base`, it leaves pebbles on the
/// chain `base + 2^{m-1}, base + 2^{m-1} + 2^{m-2}, ..., base + 2^m - 1`,
/// peaking at `m` pebbles above `base`. Uses `(3^m - 1) / 2` moves.
///
/// Each level plays the half-length chain, banks the midpoint, undoes the
/// half-length chain to free its pebbles, and recurses past the midpoint.
pub fn chain_out(m: u32, base: u64, out: &mut Vec<PebbleMove>) {
    if m == 0 {
        return;
    }
    let half = 1u64 << (m - 1);
    let mark = out.len();
    chain_out(m - 1, base, out);
    let left = out[mark..].to_vec();
    out.push(PebbleMove::Place(base + half));
    out.extend(invert(&left));
    chain_out(m - 1, base + half, out);
}

/// The canonical demonstration play for the board of `2^n - 1` nodes with
/// `n` pebbles: chain out to the final node, unwind back to the empty
/// board, chain out again, and lift the final pebble. The move count
/// satisfies `t(n) = 3 t(n-1) + 1` with `t(0) = 1`, i.e. `(3^{n+1} - 1)/2`,
/// while never holding more than `n` pebbles (`n >= 1`) nor touching a node
/// beyond `2^n - 1`.
///
/// For `n = 0` the play is the single placement of node 1 by the lone
/// pebble.
pub fn bennett_strategy(n: u32) -> Strategy {
    if n == 0 {
        return Strategy {
            moves: vec![PebbleMove::Place(1)],
            pebbles: 1,
            erasures: 0,
            board: 1,
        };
    }
    let goal = (1u64 << n) - 1;
    let mut out = Vec::new();
    chain_out(n, 0, &mut out);
    let outward = out.clone();
    out.extend(invert(&outward));
    out.extend(outward.iter().copied());
    out.push(PebbleMove::Remove(goal));
    Strategy {
        moves: out,
        pebbles: n,
        erasures: 0,
        board: goal,
    }
}

/// Appends the clean round trip that toggles a single pebble onto
/// `base + 2^j`, restoring every temporary: play the half span, play the
/// half span from the midpoint, then undo the first half span. `3^j` moves,
/// peaking at `j + 1` pebbles above `base`.
fn place_span(j: u32, base: u64, out: &mut Vec<PebbleMove>) {
    if j == 0 {
        out.push(PebbleMove::Place(base + 1));
        return;
    }
    let half = 1u64 << (j - 1);
    let mark = out.len();
    place_span(j - 1, base, out);
    let first = out[mark..].to_vec();
    place_span(j - 1, base + half, out);
    out.extend(invert(&first));
}

/// The springboard strategy: wins the board of `m * 2^n` nodes with `n + 2`
/// pebbles and `m - 1` erasures (`n >= 1`). Two pebbles alternate as
/// springboards placed `2^n` apart, the remaining `n` bridge the gap; once
/// a new springboard stands, the old one has no support left and is erased.
///
/// For `n = 0` springboards sit on adjacent nodes, the first hand-over is
/// an ordinary removal (node 1 always has support from node 0), and only
/// `max(0, m - 3)` erasures are spent.
pub fn erasure_strategy(n: u32, m: u64) -> Strategy {
    assert!(m >= 1, "segment count must be positive");
    let seg = 1u64 << n;
    let mut out = Vec::new();
    if n == 0 {
        out.push(PebbleMove::Place(1));
        for j in 2..=m {
            if j == 3 {
                out.push(PebbleMove::Remove(1));
            } else if j > 3 {
                out.push(PebbleMove::Erase(j - 2));
            }
            out.push(PebbleMove::Place(j));
        }
    } else {
        place_span(n, 0, &mut out);
        for j in 2..=m {
            place_span(n, (j - 1) * seg, &mut out);
            out.push(PebbleMove::Erase((j - 1) * seg));
        }
    }
    let erasures = out
        .iter()
        .filter(|mv| matches!(mv, PebbleMove::Erase(_)))
        .count() as u32;
    Strategy {
        moves: out,
        pebbles: if n == 0 { 2 } else { n + 2 },
        erasures,
        board: m * seg,
    }
}

/// One checkpoint hand-over in the recursive schedule: starting from the
/// checkpoint of pebble `src` (sitting on segment boundary `src_node`),
/// toggle the checkpoint of pebble `dst` on boundary `src_node + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BridgeCall {
    pub src: PebbleId,
    pub dst: PebbleId,
    /// Segment boundary index the source checkpoint sits on; the target
    /// boundary is `src_node + 1`.
    pub src_node: u64,
}

/// The recursive checkpoint schedule over `2^k` segments: the exact
/// sequence of `3^k` bridge calls produced by the self-inverse recursion
/// that toggles pebble `k` onto the final boundary using pebbles
/// `0..k-1` as temporaries, with pebble `-1` fixed on boundary 0.
pub fn bridge_schedule(k: u32) -> Vec<BridgeCall> {
    fn rec(src: PebbleId, dst: PebbleId, level: u32, src_node: u64, out: &mut Vec<BridgeCall>) {
        if level == 0 {
            out.push(BridgeCall {
                src,
                dst,
                src_node,
            });
            return;
        }
        let mid = level as PebbleId - 1;
        let half = 1u64 << (level - 1);
        rec(src, mid, level - 1, src_node, out);
        rec(mid, dst, level - 1, src_node + half, out);
        rec(src, mid, level - 1, src_node, out);
    }
    let mut out = Vec::new();
    rec(-1, k as PebbleId, k, 0, &mut out);
    out
}
