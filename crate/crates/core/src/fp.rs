//! Arithmetic in the prime field F_p for small p.

use crate::error::{param, Result};

/// A small prime, the characteristic of every ring in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=46_337).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return param(format!("{p} is not a supported prime"));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// p^e, panicking on overflow.
    pub fn pow(self, e: u32) -> u32 {
        self.0.checked_pow(e).expect("prime power overflows u32")
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow_elem(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "zero has no inverse");
        self.pow_elem(a, self.0 as u64 - 2)
    }

    /// Reduce any integer into [0, p).
    #[inline]
    pub fn reduce(self, a: i128) -> u32 {
        a.rem_euclid(self.0 as i128) as u32
    }

    /// binom(a, b) mod p via Lucas' theorem.
    pub fn binom(self, mut a: u64, mut b: u64) -> u32 {
        let p = self.0 as u64;
        let mut acc = 1u32;
        while b > 0 {
            let (ad, bd) = (a % p, b % p);
            if bd > ad {
                return 0;
            }
            acc = self.mul(acc, small_binom_mod(ad, bd, self));
            a /= p;
            b /= p;
        }
        acc
    }
}

fn small_binom_mod(a: u64, b: u64, p: Prime) -> u32 {
    // a < p, so the numerator and denominator are units.
    let mut num = 1u32;
    let mut den = 1u32;
    for k in 0..b {
        num = p.mul(num, ((a - k) % p.get() as u64) as u32);
        den = p.mul(den, ((k + 1) % p.get() as u64) as u32);
    }
    p.mul(num, p.inv(den))
}

/// Exact binomial coefficient over the integers.
pub fn binom_int(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for k in 0..b {
        acc = acc * (a - k) as u128 / (k + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(Prime::new(4).is_err());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
        for p in [2, 3, 5, 7, 11, 13] {
            assert!(Prime::new(p).is_ok());
        }
    }

    #[test]
    fn lucas_matches_integer_binomials() {
        for p in [2u32, 3, 5, 7] {
            let pr = Prime::new(p).unwrap();
            for a in 0..60u64 {
                for b in 0..=a {
                    let exact = (binom_int(a, b) % p as u128) as u32;
                    assert_eq!(pr.binom(a, b), exact, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn inverses() {
        let p = Prime::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(p.mul(a, p.inv(a)), 1);
        }
    }
}
