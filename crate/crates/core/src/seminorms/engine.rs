//! Best-first exact sup search over (center, radius) candidates.
//!
//! Every candidate carries a certified upper bound from row prefix sums.
//! Candidates are evaluated exactly, in descending bound order, until the
//! next bound falls below the best exact value. Exact evaluation sums cells
//! in grid order, so values equal a brute-force enumeration bit for bit.

use std::cell::Cell;

use crate::par;

thread_local! {
    static EXHAUSTIVE: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with bound pruning disabled on this thread: every candidate is
/// evaluated exactly.
pub fn exhaustive<T>(f: impl FnOnce() -> T) -> T {
    let prev = EXHAUSTIVE.with(|e| e.replace(true));
    let out = f();
    EXHAUSTIVE.with(|e| e.set(prev));
    out
}

#[derive(Clone, Copy, Debug)]
pub struct Candidate {
    pub ub: f64,
    /// Radius ladder index.
    pub k: u16,
    /// Cell or face index.
    pub center: u32,
    /// Shape index into the caller's shape table.
    pub shape: u16,
    /// Center offset id (tie-break key after `center`).
    pub off: u16,
}

impl Candidate {
    #[inline]
    pub fn key(&self) -> (u16, u32, u16) {
        (self.k, self.center, self.off)
    }
}

pub struct SupResult {
    pub value: f64,
    pub best: Option<Candidate>,
    pub evaluated: usize,
    pub candidates: usize,
}

const BATCH: usize = 128;

/// Exact maximum of `eval` over `cands`; ties go to the smallest key.
pub fn sup_search<F>(mut cands: Vec<Candidate>, eval: F) -> SupResult
where
    F: Fn(&Candidate) -> f64 + Sync + Send,
{
    let total = cands.len();
    let prune = !EXHAUSTIVE.with(|e| e.get());
    cands.sort_unstable_by(|a, b| b.ub.total_cmp(&a.ub).then(a.key().cmp(&b.key())));
    let mut best_v = f64::NEG_INFINITY;
    let mut best: Option<Candidate> = None;
    let mut evaluated = 0usize;
    let mut i = 0usize;
    while i < total {
        if prune && cands[i].ub < best_v {
            break;
        }
        let mut end = (i + BATCH).min(total);
        // Skip the tail of the batch that is already dominated.
        while prune && end > i + 1 && cands[end - 1].ub < best_v {
            end -= 1;
        }
        let vals = par::map_slice(&cands[i..end], &eval);
        for (c, v) in cands[i..end].iter().zip(vals) {
            evaluated += 1;
            let better = match best {
                None => true,
                Some(b) => v > best_v || (v == best_v && c.key() < b.key()),
            };
            if better {
                best_v = v;
                best = Some(*c);
            }
        }
        i = end;
    }
    SupResult { value: if best.is_some() { best_v } else { 0.0 }, best, evaluated, candidates: total }
}

pub const EPS: f64 = f64::EPSILON;

/// Bound on the exact floating sum of a nonnegative quantity given its
/// prefix-sum estimate `s`, the touched row totals `t`, the row length `w`
/// and the cell count `n`.
#[inline]
pub fn nonneg_sum_bound(s: f64, t: f64, w: usize, n: usize) -> f64 {
    s + 4.0 * (w as f64) * EPS * t + 4.0 * (n as f64 + 2.0) * EPS * s.abs() + f64::MIN_POSITIVE
}
