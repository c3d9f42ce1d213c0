//! Binary linear block codes: construction, encoding and syndromes.

pub mod bch;

use std::fmt;
use std::fs;
use std::ops::BitXorAssign;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Largest dimension for which the minimum distance is found by enumeration.
pub const EXHAUSTIVE_DMIN_MAX_K: usize = 24;

/// `H·v` for some vector `v`; all-zero exactly when `v` is a codeword.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Syndrome(BitVec);

impl Syndrome {
    pub fn zero(len: usize) -> Self {
        Self(BitVec::zeros(len))
    }

    pub fn from_bits(bits: BitVec) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl BitXorAssign<&Syndrome> for Syndrome {
    #[inline]
    fn bitxor_assign(&mut self, rhs: &Syndrome) {
        self.0 ^= &rhs.0;
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome({})", self.0)
    }
}

/// Which code to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Bch { n: usize, k: usize },
    Hamming { n: usize, k: usize },
    /// Explicit parity-check matrix file.
    File(PathBuf),
}

impl FromStr for CodeSpec {
    type Err = Error;

    /// Accepts `bch:127,106`, `hamming:7,4` or `file:path/to/H.txt`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("code descriptor `{s}` lacks a `kind:` prefix")))?;
        let pair = || -> Result<(usize, usize)> {
            let (n, k) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected `n,k` in `{s}`")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad integer `{v}` in `{s}`")))
            };
            Ok((parse(n)?, parse(k)?))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "bch" => pair().map(|(n, k)| CodeSpec::Bch { n, k }),
            "hamming" => pair().map(|(n, k)| CodeSpec::Hamming { n, k }),
            "file" => Ok(CodeSpec::File(PathBuf::from(rest))),
            other => Err(Error::Parse(format!("unknown code kind `{other}`"))),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Bch { n, k } => write!(f, "bch:{n},{k}"),
            CodeSpec::Hamming { n, k } => write!(f, "hamming:{n},{k}"),
            CodeSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// An (n, k) binary linear code with its parity-check and generator matrices.
///
/// Immutable after construction. The parity-check matrix is kept both
/// row-major (row-wise checks) and column-major (incremental syndromes).
#[derive(Debug, Clone)]
pub struct LinearCode {
    n: usize,
    k: usize,
    rows: Vec<BitVec>,
    columns: Vec<Syndrome>,
    generator: Vec<BitVec>,
    info_positions: Vec<usize>,
    d_min: usize,
    descriptor: String,
}

impl LinearCode {
    /// Builds a code from its descriptor.
    pub fn build(spec: &CodeSpec) -> Result<Self> {
        match spec {
            CodeSpec::Bch { n, k } => Self::bch(*n, *k),
            CodeSpec::Hamming { n, k } => {
                let m = (n + 1).trailing_zeros() as usize;
                if (1usize << m) != n + 1 || n.checked_sub(m) != Some(*k) || m < 2 {
                    return Err(Error::UnsupportedCode {
                        n: *n,
                        k: *k,
                        reason: "Hamming codes need n = 2^m - 1, k = n - m".into(),
                    });
                }
                if m == 2 {
                    // Length-3 repetition code; no BCH field table for m = 2.
                    let rows = vec![BitVec::parse("110").unwrap(), BitVec::parse("011").unwrap()];
                    return Self::from_parity_check(3, rows, Some(3), spec.to_string());
                }
                let mut code = Self::bch(*n, *k)?;
                code.descriptor = format!("{spec} ({})", code.descriptor);
                Ok(code)
            }
            CodeSpec::File(path) => Self::load_matrix(path),
        }
    }

    /// Narrow-sense primitive BCH code in systematic cyclic form: parity bits
    /// occupy positions `0..n-k`, message bits positions `n-k..n`.
    pub fn bch(n: usize, k: usize) -> Result<Self> {
        let g = bch::generator(n, k)?;
        let r = n - k;
        // Row i of P: x^(r+i) mod g(x).
        let mut rem: Vec<u8> = vec![0; r];
        let mut p_rows = Vec::with_capacity(k);
        // x^r mod g = g - x^r (binary).
        rem.copy_from_slice(&g.coefficients[..r]);
        for i in 0..k {
            if i > 0 {
                // Multiply by x and reduce.
                let carry = rem[r - 1];
                for j in (1..r).rev() {
                    rem[j] = rem[j - 1];
                }
                rem[0] = 0;
                if carry == 1 {
                    for j in 0..r {
                        rem[j] ^= g.coefficients[j];
                    }
                }
            }
            p_rows.push(rem.clone());
        }
        // H = [I_r | P^T].
        let rows = (0..r)
            .map(|row| {
                let mut v = BitVec::zeros(n);
                v.set(row, true);
                for (i, p) in p_rows.iter().enumerate() {
                    if p[row] == 1 {
                        v.set(r + i, true);
                    }
                }
                v
            })
            .collect();
        let descriptor = format!(
            "bch:{n},{k} g={} prim={:#x} t={}",
            g.to_hex(),
            g.primitive_poly,
            g.t
        );
        Self::from_parity_check(n, rows, Some(g.designed_distance()), descriptor)
    }

    /// Builds a code from parity-check rows, deriving a systematic generator.
    ///
    /// When `d_min` is `None` it is computed by enumeration for small `k`;
    /// otherwise a cheap structural lower bound is used.
    pub fn from_parity_check(
        n: usize,
        rows: Vec<BitVec>,
        d_min: Option<usize>,
        descriptor: String,
    ) -> Result<Self> {
        let r = rows.len();
        if let Some(bad) = rows.iter().find(|row| row.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        if r == 0 || r >= n {
            return Err(Error::UnsupportedCode {
                n,
                k: n.saturating_sub(r),
                reason: "need 1 <= k < n".into(),
            });
        }
        let (reduced, pivots) = rref(&rows, n);
        if pivots.len() != r {
            return Err(Error::RankDeficient {
                rank: pivots.len(),
                expected: r,
            });
        }
        let k = n - r;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        // Null-space basis: one vector per free column.
        let generator: Vec<BitVec> = info_positions
            .iter()
            .map(|&f| {
                let mut g = BitVec::zeros(n);
                g.set(f, true);
                for (row, &p) in reduced.iter().zip(&pivots) {
                    if row.get(f) {
                        g.set(p, true);
                    }
                }
                g
            })
            .collect();
        let columns = (0..n)
            .map(|c| {
                let mut s = BitVec::zeros(r);
                for (i, row) in rows.iter().enumerate() {
                    if row.get(c) {
                        s.set(i, true);
                    }
                }
                Syndrome(s)
            })
            .collect();
        let mut code = Self {
            n,
            k,
            rows,
            columns,
            generator,
            info_positions,
            d_min: 1,
            descriptor,
        };
        code.d_min = match d_min {
            Some(d) => d.max(1),
            None if k <= EXHAUSTIVE_DMIN_MAX_K => code.min_weight_exhaustive(),
            None => code.structural_distance_bound(),
        };
        Ok(code)
    }

    /// Reads the plain-text matrix format: a line `n k`, then `n-k` rows of
    /// `n` characters from `{0,1}`.
    pub fn load_matrix(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_matrix(&text, format!("file:{}", path.display()))
    }

    pub fn parse_matrix(text: &str, descriptor: String) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header `{header}`"))))
            .collect::<Result<_>>()?;
        let [n, k] = dims[..] else {
            return Err(Error::Parse(format!("header must be `n k`, got `{header}`")));
        };
        if k >= n {
            return Err(Error::UnsupportedCode {
                n,
                k,
                reason: "need k < n".into(),
            });
        }
        let rows: Vec<BitVec> = lines
            .map(|l| BitVec::parse(l).ok_or_else(|| Error::Parse(format!("bad matrix row `{l}`"))))
            .collect::<Result<_>>()?;
        if rows.len() != n - k {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                n - k,
                rows.len()
            )));
        }
        Self::from_parity_check(n, rows, None, descriptor)
    }

    pub fn to_matrix_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k);
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }

    pub fn save_matrix(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_matrix_text()).map_err(|e| Error::io(path, e))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity checks, `n - k`.
    #[inline]
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// Column `h(i)` of the parity-check matrix (0-based).
    #[inline]
    pub fn column(&self, i: usize) -> &Syndrome {
        &self.columns[i]
    }

    pub fn generator(&self) -> &[BitVec] {
        &self.generator
    }

    /// Codeword positions carrying the message bits.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, message: &BitVec) -> Result<BitVec> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: message.len(),
            });
        }
        let mut c = BitVec::zeros(self.n);
        for i in message.iter_ones() {
            c ^= &self.generator[i];
        }
        Ok(c)
    }

    pub fn syndrome(&self, v: &BitVec) -> Result<Syndrome> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(self.syndrome_unchecked(v))
    }

    /// Row-major `H·v`.
    pub fn syndrome_unchecked(&self, v: &BitVec) -> Syndrome {
        let mut s = BitVec::zeros(self.redundancy());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                s.set(i, true);
            }
        }
        Syndrome(s)
    }

    pub fn is_codeword(&self, v: &BitVec) -> bool {
        self.rows.iter().all(|row| !row.dot(v))
    }

    /// Checks parity rows in order, stopping at the first failing one.
    /// Returns whether `v` is a codeword and how many rows were evaluated.
    #[inline]
    pub fn check_rows_sequential(&self, v: &BitVec) -> (bool, usize) {
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                return (false, i + 1);
            }
        }
        (true, self.rows.len())
    }

    /// Minimum nonzero codeword weight by Gray-code enumeration of all
    /// `2^k - 1` nonzero messages.
    pub fn min_weight_exhaustive(&self) -> usize {
        let mut c = BitVec::zeros(self.n);
        let mut best = usize::MAX;
        for i in 1u64..(1u64 << self.k) {
            let flip = i.trailing_zeros() as usize;
            c ^= &self.generator[flip];
            best = best.min(c.count_ones());
        }
        best
    }

    /// 1 always; 2 without zero columns; 3 when columns are also distinct.
    fn structural_distance_bound(&self) -> usize {
        if self.columns.iter().any(Syndrome::is_zero) {
            return 1;
        }
        let mut seen = std::collections::HashSet::new();
        if self.columns.iter().all(|c| seen.insert(c.clone())) {
            3
        } else {
            2
        }
    }
}

/// Reduced row echelon form over GF(2); returns the reduced rows (one per
/// pivot) and their pivot columns.
fn rref(rows: &[BitVec], n: usize) -> (Vec<BitVec>, Vec<usize>) {
    let mut m: Vec<BitVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == m.len() {
            break;
        }
        let Some(sel) = (r..m.len()).find(|&i| m[i].get(col)) else {
            continue;
        };
        m.swap(r, sel);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(col) {
                *row ^= &pivot_row;
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}
