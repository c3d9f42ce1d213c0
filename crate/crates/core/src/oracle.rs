//! Exhaustive reference decoders for small codes.
//!
//! None of these use the EP tree. They serve as ground truth for the
//! search-based decoders: codebook enumeration (two equivalent metrics), a
//! syndrome trellis for codes with few parity checks, Euclidean nearest
//! codeword, and a sorted listing of all error patterns.

use std::cmp::Ordering;

use crate::bits::BitVec;
use crate::channel::ReliabilityProfile;
use crate::code::LinearCode;
use crate::error::{Error, Result};

/// Largest dimension accepted by codebook enumeration.
pub const MAX_ENUM_K: usize = 20;
/// Largest redundancy accepted by the syndrome trellis.
pub const MAX_TRELLIS_R: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct MlSolution {
    pub codeword: BitVec,
    pub error_pattern: BitVec,
    pub zeta: f64,
}

/// Compares two positional patterns by the shared tie rule: the one whose
/// highest-ranked differing position is clear is smaller.
pub fn tie_cmp(a: &BitVec, b: &BitVec, ranking: &[usize]) -> Ordering {
    for &pos in ranking.iter().rev() {
        match (a.get(pos), b.get(pos)) {
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
    }
    Ordering::Equal
}

fn zeta_of(e: &BitVec, ell: &[f64]) -> f64 {
    e.iter_ones().map(|i| ell[i]).sum()
}

/// Visits every codeword, in Gray-code order over the generator rows.
fn for_each_codeword(code: &LinearCode, mut f: impl FnMut(&BitVec)) -> Result<()> {
    let k = code.k();
    if k > MAX_ENUM_K {
        return Err(Error::TooLarge(format!("2^{k} codewords")));
    }
    let mut c = BitVec::zeros(code.n());
    f(&c);
    for step in 1u64..(1u64 << k) {
        c ^= &code.generator()[step.trailing_zeros() as usize];
        f(&c);
    }
    Ok(())
}

/// Minimizes `zeta(hard xor c)` over the codebook.
pub fn ml_decode_bruteforce(profile: &ReliabilityProfile, code: &LinearCode) -> Result<MlSolution> {
    let ell = profile.ell();
    let mut best: Option<(BitVec, f64)> = None;
    for_each_codeword(code, |c| {
        let e = profile.hard() ^ c;
        let z = zeta_of(&e, ell);
        let better = match &best {
            None => true,
            Some((b, bz)) => match z.total_cmp(bz) {
                Ordering::Less => true,
                Ordering::Equal => tie_cmp(&e, b, profile.ranking()) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((e, z));
        }
    })?;
    let (e, zeta) = best.expect("codebook contains zero");
    Ok(MlSolution {
        codeword: profile.hard() ^ &e,
        error_pattern: e,
        zeta,
    })
}

/// Maximizes the correlation `sum_i (1 - 2 c_i) llr_i` over the codebook.
/// Returns the codeword; ties keep the first in enumeration order.
pub fn ml_decode_correlation(llr: &[f64], code: &LinearCode) -> Result<BitVec> {
    let mut best: Option<(BitVec, f64)> = None;
    for_each_codeword(code, |c| {
        let corr: f64 = llr
            .iter()
            .enumerate()
            .map(|(i, l)| if c.get(i) { -l } else { *l })
            .sum();
        if best.as_ref().is_none_or(|(_, b)| corr > *b) {
            best = Some((c.clone(), corr));
        }
    })?;
    Ok(best.expect("codebook contains zero").0)
}

/// Codeword whose BPSK image is closest to `y`.
pub fn nearest_codeword_euclidean(y: &[f64], code: &LinearCode) -> Result<BitVec> {
    if y.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            got: y.len(),
        });
    }
    let mut best: Option<(BitVec, f64)> = None;
    for_each_codeword(code, |c| {
        let d: f64 = y
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = if c.get(i) { -1.0 } else { 1.0 };
                (v - x) * (v - x)
            })
            .sum();
        if best.as_ref().is_none_or(|(_, b)| d < *b) {
            best = Some((c.clone(), d));
        }
    })?;
    Ok(best.expect("codebook contains zero").0)
}

/// Minimum soft-weight pattern with syndrome `H hard` by dynamic
/// programming over partial syndromes, visiting positions in rank order.
/// On equal cost the path with a clear bit at the later stage wins, which
/// reproduces the shared tie rule.
pub fn ml_decode_trellis(profile: &ReliabilityProfile, code: &LinearCode) -> Result<MlSolution> {
    let r = code.redundancy();
    if r > MAX_TRELLIS_R {
        return Err(Error::TooLarge(format!("2^{r} trellis states")));
    }
    if profile.n() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            got: profile.n(),
        });
    }
    let to_int = |s: &BitVec| s.iter_ones().fold(0usize, |acc, i| acc | 1 << i);
    let states = 1usize << r;
    let ranking = profile.ranking();
    let ell = profile.ell();
    let target = to_int(code.syndrome_unchecked(profile.hard()).bits());

    let mut cost = vec![f64::INFINITY; states];
    let mut next = vec![f64::INFINITY; states];
    cost[0] = 0.0;
    // took[stage][state]: whether the survivor into `state` flips the stage.
    let mut took = vec![vec![false; states]; ranking.len()];
    for (stage, &pos) in ranking.iter().enumerate() {
        let h = to_int(code.column(pos).bits());
        let l = ell[pos];
        for s in 0..states {
            let stay = cost[s];
            let flip = cost[s ^ h] + l;
            if flip < stay {
                next[s] = flip;
                took[stage][s] = true;
            } else {
                next[s] = stay;
            }
        }
        std::mem::swap(&mut cost, &mut next);
    }

    let mut e = BitVec::zeros(code.n());
    let mut s = target;
    for stage in (0..ranking.len()).rev() {
        if took[stage][s] {
            let pos = ranking[stage];
            e.set(pos, true);
            s ^= to_int(code.column(pos).bits());
        }
    }
    debug_assert_eq!(s, 0);
    let zeta = zeta_of(&e, ell);
    Ok(MlSolution {
        codeword: profile.hard() ^ &e,
        error_pattern: e,
        zeta,
    })
}

/// Exact ML with whichever exhaustive method fits the code.
pub fn ml_decode(profile: &ReliabilityProfile, code: &LinearCode) -> Result<MlSolution> {
    if code.k() <= 16 || code.k() <= code.redundancy() {
        ml_decode_bruteforce(profile, code)
    } else {
        ml_decode_trellis(profile, code)
    }
}

/// Every pattern of length `n` with its soft weight, sorted by soft weight
/// and then the shared tie rule.
pub fn enumerate_all_eps_sorted(profile: &ReliabilityProfile) -> Result<Vec<(BitVec, f64)>> {
    let n = profile.n();
    if n > 20 {
        return Err(Error::TooLarge(format!("2^{n} patterns")));
    }
    let ell = profile.ell();
    let mut all: Vec<(BitVec, f64)> = (0u64..1 << n)
        .map(|m| {
            let e = BitVec::from_ones(n, (0..n).filter(|i| m >> i & 1 == 1));
            let z = zeta_of(&e, ell);
            (e, z)
        })
        .collect();
    all.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then_with(|| tie_cmp(&a.0, &b.0, profile.ranking()))
    });
    Ok(all)
}
