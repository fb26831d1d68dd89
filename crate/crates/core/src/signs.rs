//! Exhaustive enumeration of Rademacher sign patterns.
//!
//! Integrals of Rademacher chaos over [0,1]^k are uniform averages over the
//! 2^{n·k} sign patterns, so everything here is exact up to floating point.
//! The data layout is a flat array of `rest · n^slots` entries whose `slots`
//! fastest indices get contracted against sign vectors; each leaf of the
//! enumeration hands the remaining `rest` entries to a visitor.
//!
//! The last slot's sign vector is normalised to ε₀ = +1, which halves the
//! work. Visitors must therefore be invariant under flipping a whole sign
//! vector, which holds for everything built from moduli.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest log₂ of the number of sign patterns any enumeration may visit.
pub const MAX_PATTERN_BITS: u32 = 24;

/// Number of contiguous chunks the top-level patterns are split into. Fixed,
/// so floating point merge order does not depend on the thread count.
const CHUNKS: usize = 256;

/// ±1 for bit `j` of `mask` (set bit means −1).
#[inline]
pub fn sign_at(mask: u32, j: usize) -> f64 {
    if mask >> j & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Sign vector encoded by `mask` as scalars.
pub fn sign_vector<S: Scalar>(mask: u32, n: usize) -> Vec<S> {
    (0..n)
        .map(|j| if mask >> j & 1 == 1 { -S::one() } else { S::one() })
        .collect()
}

/// Checks that 2^{n·slots} patterns fit in the budget.
pub fn check_budget(n: usize, slots: usize, what: &'static str) -> Result<()> {
    let bits = (n as u128) * (slots as u128);
    if bits > MAX_PATTERN_BITS as u128 {
        return Err(Error::BudgetExceeded {
            what,
            needed: 1u128.checked_shl(bits.min(127) as u32).unwrap_or(u128::MAX),
            limit: 1u128 << MAX_PATTERN_BITS,
        });
    }
    Ok(())
}

/// out[i] = Σ_j data[i·n + j] ε_j.
#[inline]
fn contract_signs<S: Scalar>(data: &[S], n: usize, mask: u32, out: &mut Vec<S>) {
    out.clear();
    out.extend(data.chunks_exact(n).map(|row| {
        let mut acc = S::zero();
        for (j, &a) in row.iter().enumerate() {
            if mask >> j & 1 == 1 {
                acc = acc - a;
            } else {
                acc += a;
            }
        }
        acc
    }));
}

/// Result of a [`sign_fold`]: the merged accumulator and how many patterns
/// it averaged over.
pub struct Folded<A> {
    pub acc: A,
    pub patterns: u64,
}

/// Folds `visit` over every sign pattern of the `slots` fastest indices of
/// `data`.
///
/// `visit` receives the contracted leaf (length `data.len() / n^slots`) and
/// the masks of the sign vectors, one per slot in slot order. Partial
/// results are merged with `merge` in a fixed left-to-right order.
pub fn sign_fold<S, A, I, V, M>(data: &[S], n: usize, slots: usize, init: I, visit: V, merge: M) -> Result<Folded<A>>
where
    S: Scalar,
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &[S], &[u32]) + Sync,
    M: Fn(A, A) -> A,
{
    check_budget(n, slots, "sign patterns")?;
    if slots == 0 {
        let mut acc = init();
        visit(&mut acc, data, &[]);
        return Ok(Folded { acc, patterns: 1 });
    }
    let top = 1u64 << (n - 1);
    let patterns = 1u64 << (n * slots - 1);
    let chunk = top.div_ceil(CHUNKS as u64).max(1);
    let ranges: Vec<(u64, u64)> = (0..top)
        .step_by(chunk as usize)
        .map(|lo| (lo, (lo + chunk).min(top)))
        .collect();
    let parts: Vec<A> = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = init();
            let mut masks = vec![0u32; slots];
            let mut bufs: Vec<Vec<S>> = vec![Vec::new(); slots];
            for k in lo..hi {
                // Bit 0 of the last slot stays clear.
                let mask = (k as u32) << 1;
                masks[slots - 1] = mask;
                let (head, tail) = bufs.split_at_mut(slots - 1);
                contract_signs(data, n, mask, &mut tail[0]);
                descend(&tail[0], n, slots - 1, head, &mut masks, &mut acc, &visit);
            }
            acc
        })
        .collect();
    let acc = parts.into_iter().reduce(&merge).unwrap_or_else(&init);
    Ok(Folded { acc, patterns })
}

fn descend<S, A, V>(
    data: &[S],
    n: usize,
    remaining: usize,
    bufs: &mut [Vec<S>],
    masks: &mut [u32],
    acc: &mut A,
    visit: &V,
) where
    S: Scalar,
    V: Fn(&mut A, &[S], &[u32]),
{
    if remaining == 0 {
        visit(acc, data, masks);
        return;
    }
    let slot = remaining - 1;
    let (head, tail) = bufs.split_at_mut(slot);
    let buf = &mut tail[0];
    for mask in 0..(1u32 << n) {
        masks[slot] = mask;
        contract_signs(data, n, mask, buf);
        descend(buf, n, slot, head, masks, acc, visit);
    }
}
