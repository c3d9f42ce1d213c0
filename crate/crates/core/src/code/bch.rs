//! Narrow-sense primitive BCH generator polynomials over GF(2^m).

use crate::error::{Error, Result};

/// Primitive polynomials (bit i = coefficient of x^i) for GF(2^m), m = 3..=10.
fn primitive_poly(m: u32) -> Option<u32> {
    Some(match m {
        3 => 0b1011,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x89, // x^7 + x^3 + 1
        8 => 0x11d,
        9 => 0x211,
        10 => 0x409,
        _ => return None,
    })
}

struct Field {
    exp: Vec<u16>,
    log: Vec<u16>,
    order: usize,
}

impl Field {
    fn new(m: u32, poly: u32) -> Self {
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut x = 1u32;
        for i in 0..order {
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Self { exp, log, order }
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order]
    }
}

/// A BCH generator polynomial together with its construction parameters.
#[derive(Debug, Clone)]
pub struct BchGenerator {
    pub m: u32,
    pub primitive_poly: u32,
    /// Designed error-correction capability; designed distance is `2t + 1`.
    pub t: usize,
    /// Coefficients, index i = coefficient of x^i.
    pub coefficients: Vec<u8>,
}

impl BchGenerator {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn designed_distance(&self) -> usize {
        2 * self.t + 1
    }

    /// Hex rendering of the polynomial, highest degree first.
    pub fn to_hex(&self) -> String {
        let mut digits = String::new();
        let deg = self.degree();
        let mut nibble = 0u8;
        for i in (0..=deg).rev() {
            nibble = (nibble << 1) | self.coefficients[i];
            if i % 4 == 0 {
                digits.push(char::from_digit(nibble as u32, 16).unwrap());
                nibble = 0;
            }
        }
        let trimmed = digits.trim_start_matches('0');
        format!("0x{}", if trimmed.is_empty() { "0" } else { trimmed })
    }
}

/// Finds the generator polynomial of the narrow-sense BCH code with length
/// `n = 2^m - 1` and dimension `k`.
pub fn generator(n: usize, k: usize) -> Result<BchGenerator> {
    let unsupported = |reason: &str| Error::UnsupportedCode {
        n,
        k,
        reason: reason.to_string(),
    };
    if k == 0 || k >= n {
        return Err(unsupported("need 1 <= k < n"));
    }
    let m = (n + 1).trailing_zeros();
    if (1usize << m) != n + 1 {
        return Err(unsupported("length must be 2^m - 1"));
    }
    let poly = primitive_poly(m).ok_or_else(|| unsupported("field size outside 2^3..2^10"))?;
    let field = Field::new(m, poly);

    let mut in_roots = vec![false; n];
    let mut roots = Vec::new();
    for t in 1..=n / 2 {
        for i in [2 * t - 1, 2 * t] {
            // Add the whole cyclotomic coset of i.
            let mut j = i % n;
            while !in_roots[j] {
                in_roots[j] = true;
                roots.push(j);
                j = (2 * j) % n;
            }
        }
        if roots.len() == n - k {
            let coefficients = expand_roots(&field, &roots)?;
            return Ok(BchGenerator {
                m,
                primitive_poly: poly,
                t,
                coefficients,
            });
        }
        if roots.len() > n - k {
            break;
        }
    }
    Err(unsupported("no narrow-sense BCH code has this dimension"))
}

/// Multiplies out prod (x - alpha^j) and checks the result is binary.
fn expand_roots(field: &Field, roots: &[usize]) -> Result<Vec<u8>> {
    let mut coeffs: Vec<u16> = vec![1];
    for &j in roots {
        let a = field.alpha_pow(j);
        let mut next = vec![0u16; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= field.mul(c, a);
        }
        coeffs = next;
    }
    coeffs
        .into_iter()
        .map(|c| match c {
            0 | 1 => Ok(c as u8),
            _ => Err(Error::Parse("generator polynomial is not binary".into())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_7_4_is_primitive_poly() {
        let g = generator(7, 4).unwrap();
        assert_eq!(g.coefficients, vec![1, 1, 0, 1]);
        assert_eq!(g.t, 1);
        assert_eq!(g.to_hex(), "0xb");
    }

    #[test]
    fn bch_127_degrees() {
        let g = generator(127, 106).unwrap();
        assert_eq!(g.degree(), 21);
        assert_eq!(g.designed_distance(), 7);
        let g = generator(127, 113).unwrap();
        assert_eq!(g.degree(), 14);
        assert_eq!(g.designed_distance(), 5);
    }

    #[test]
    fn bch_31_21_and_15_7() {
        assert_eq!(generator(31, 21).unwrap().t, 2);
        // Known generator of BCH(15,7): x^8 + x^7 + x^6 + x^4 + 1.
        let g = generator(15, 7).unwrap();
        assert_eq!(g.coefficients, vec![1, 0, 0, 0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn rejects_unsupported_pairs() {
        assert!(generator(127, 100).is_err());
        assert!(generator(100, 50).is_err());
        assert!(generator(7, 7).is_err());
    }
}
