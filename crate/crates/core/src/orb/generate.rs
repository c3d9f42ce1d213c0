//! Offline enumeration of γ-ordered abstract patterns.

use super::{AbstractPatternSet, Gamma};
use crate::error::{Error, Result};

/// The first `t` patterns of length `n` in non-decreasing γ-weight. Within a
/// weight class, patterns with fewer flips come first, then lexicographic
/// order of their (ascending) rank-index lists.
pub fn generate_pattern_set(n: usize, t: usize, gamma: Gamma) -> Result<AbstractPatternSet> {
    let weights = gamma.weights(n)?;
    if n < 128 && (t as u128) > (1u128 << n) {
        return Err(Error::PatternSet(format!(
            "requested {t} patterns but only 2^{n} exist"
        )));
    }
    if t == 0 {
        return Err(Error::PatternSet("pattern set must not be empty".into()));
    }

    // prefix[i] = sum of the first i weights, for range bounds.
    let mut prefix = vec![0u64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + weights[i];
    }
    let total = prefix[n];

    let mut out = Builder::new(n, t);
    out.push(&[]);
    let mut stack = Vec::with_capacity(n);
    let mut target = 0u64;
    while !out.full() && target < total {
        target += 1;
        for h in 1..=n {
            // The h smallest weights already exceed the target.
            if prefix[h] > target {
                break;
            }
            // The h largest weights cannot reach it.
            if total - prefix[n - h] < target {
                continue;
            }
            let mut search = Search {
                weights: &weights,
                prefix: &prefix,
                stack: &mut stack,
                out: &mut out,
            };
            search.run(0, h, target);
            if out.full() {
                break;
            }
        }
    }
    Ok(out.finish(gamma))
}

struct Builder {
    n: usize,
    limit: usize,
    offsets: Vec<u32>,
    indices: Vec<u16>,
}

impl Builder {
    fn new(n: usize, limit: usize) -> Self {
        let mut offsets = Vec::with_capacity(limit + 1);
        offsets.push(0);
        Self {
            n,
            limit,
            offsets,
            indices: Vec::new(),
        }
    }

    fn full(&self) -> bool {
        self.offsets.len() > self.limit
    }

    fn push(&mut self, pattern: &[u16]) {
        self.indices.extend_from_slice(pattern);
        self.offsets.push(self.indices.len() as u32);
    }

    fn finish(self, gamma: Gamma) -> AbstractPatternSet {
        AbstractPatternSet::from_parts_unchecked(self.n, gamma, self.offsets, self.indices)
    }
}

struct Search<'a> {
    weights: &'a [u64],
    prefix: &'a [u64],
    stack: &'a mut Vec<u16>,
    out: &'a mut Builder,
}

impl Search<'_> {
    /// Emits, in lexicographic order, every choice of `h` indices from
    /// `start..n` whose weights sum to `target`.
    fn run(&mut self, start: usize, h: usize, target: u64) {
        if self.out.full() {
            return;
        }
        if h == 0 {
            if target == 0 {
                self.out.push(self.stack);
            }
            return;
        }
        let n = self.weights.len();
        for i in start..=n - h {
            // Smallest completion uses the next h weights.
            let min = self.prefix[i + h] - self.prefix[i];
            if min > target {
                break;
            }
            // Largest completion uses the last h weights.
            let max = self.prefix[n] - self.prefix[n - h];
            if max < target {
                break;
            }
            self.stack.push(i as u16);
            self.run(i + 1, h - 1, target - self.weights[i]);
            self.stack.pop();
            if self.out.full() {
                return;
            }
        }
    }
}
