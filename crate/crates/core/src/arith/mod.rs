//! Integer and local-symbol arithmetic.
//!
//! Everything here is a pure function on machine integers. Products that can
//! leave the `i128` range go through checked operations and surface
//! [`Error::Overflow`] instead of wrapping.

mod rational;

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use rational::ExactRational;

/// A value in `{+1, -1}`: the range of a Hilbert symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn from_bool(plus: bool) -> Self {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Sign of a nonzero integer.
    pub fn of(n: i128) -> Self {
        debug_assert!(n != 0);
        Sign::from_bool(n > 0)
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_bool(self == Sign::Minus)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A rational prime. Construction checks primality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::Domain("not a prime"))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A place of the rational numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Prime(Prime),
}

impl Place {
    pub fn prime(p: u64) -> Result<Self> {
        Prime::new(p).map(Place::Prime)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// Largest `e` with `p^e | n`.
pub fn valuation(n: i128, p: Prime) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("valuation of zero"));
    }
    if p.is_two() {
        return Ok(n.trailing_zeros());
    }
    let p = p.get() as i128;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// `n / 2^v_2(n)`, sign preserved.
pub fn odd_part(n: i128) -> Result<i128> {
    if n == 0 {
        return Err(Error::Domain("odd part of zero"));
    }
    Ok(n >> n.trailing_zeros())
}

/// The Hilbert symbol `(-1, n)_v`.
pub fn hilbert_minus_one(n: i128, place: Place) -> Result<Sign> {
    if n == 0 {
        return Err(Error::Domain("Hilbert symbol of zero"));
    }
    Ok(match place {
        Place::Real => Sign::of(n),
        Place::Prime(p) if p.is_two() => Sign::from_bool(odd_part(n)?.rem_euclid(4) == 1),
        Place::Prime(p) if p.get() % 4 == 1 => Sign::Plus,
        Place::Prime(p) => Sign::from_bool(valuation(n, p)? % 2 == 0),
    })
}

/// Exhaustive test for a primitive solution of `x^2 + y^2 = n z^2` modulo `p^k`.
///
/// Independent of [`hilbert_minus_one`]; used only to check it. A primitive
/// solution can be rescaled by a unit so that `z` is a power of `p` (or zero),
/// so only those `z` are tried, with every `x` and a table lookup for `y`.
pub fn conic_oracle(n: i128, p: Prime, k: u32) -> Result<bool> {
    let pv = p.get();
    if (p.is_two() && k < 3) || k == 0 {
        return Err(Error::Domain("conic oracle precision too small"));
    }
    let modulus = pv
        .checked_pow(k)
        .filter(|m| *m <= 1 << 24)
        .ok_or_else(|| Error::Budget(format!("conic oracle modulus {pv}^{k}")))?;
    let m = modulus as i128;

    // square_of_unit[r]: r = y^2 for some y prime to p; square_of_nonunit likewise.
    let mut square_of_unit = vec![false; modulus as usize];
    let mut square_of_nonunit = vec![false; modulus as usize];
    for y in 0..modulus {
        let r = ((y as u128 * y as u128) % modulus as u128) as usize;
        if y % pv == 0 {
            square_of_nonunit[r] = true;
        } else {
            square_of_unit[r] = true;
        }
    }

    let n = n.rem_euclid(m);
    let mut zs = vec![0i128];
    zs.extend((0..k).map(|j| (pv as i128).pow(j)));
    for z in zs {
        let z_unit = z == 1;
        let rhs = (n * (z * z % m)) % m;
        for x in 0..m {
            let r = (rhs - x * x % m).rem_euclid(m) as usize;
            let primitive_with_nonunit_y = z_unit || x % pv as i128 != 0;
            if square_of_unit[r] || (primitive_with_nonunit_y && square_of_nonunit[r]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Extended Euclid: `(g, s, t)` with `g = gcd(a, b) > 0` and `s a + t b = g`.
pub fn xgcd(a: i128, b: i128) -> Result<(i128, i128, i128)> {
    if a == 0 && b == 0 {
        return Err(Error::Domain("gcd of (0, 0)"));
    }
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        Ok((-r0, -s0, -t0))
    } else {
        Ok((r0, s0, t0))
    }
}

/// Distinct odd primes dividing `n`, ascending. Trial division.
pub fn odd_prime_factors(n: i128) -> Vec<u64> {
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    m >>= m.trailing_zeros();
    let mut q: u128 = 3;
    while q * q <= m {
        if m % q == 0 {
            out.push(q as u64);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 2;
    }
    if m > 1 {
        out.push(m as u64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(48, p(2)).unwrap(), 4);
        assert_eq!(valuation(-5, p(2)).unwrap(), 0);
        assert_eq!(valuation(54, p(3)).unwrap(), 3);
        assert!(matches!(valuation(0, p(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn odd_part_examples() {
        assert_eq!(odd_part(48).unwrap(), 3);
        assert_eq!(odd_part(-12).unwrap(), -3);
        assert_eq!(odd_part(7).unwrap(), 7);
        assert!(odd_part(0).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let h = |n, q| hilbert_minus_one(n, Place::prime(q).unwrap()).unwrap();
        assert_eq!(h(3, 3), Sign::Minus);
        assert_eq!(h(10, 5), Sign::Plus);
        assert_eq!(h(5, 2), Sign::Plus);
        assert_eq!(h(3, 2), Sign::Minus);
        assert_eq!(hilbert_minus_one(-7, Place::Real).unwrap(), Sign::Minus);
        assert!(hilbert_minus_one(0, Place::Real).is_err());
    }

    #[test]
    fn conic_oracle_examples() {
        assert!(conic_oracle(5, p(2), 6).unwrap());
        assert!(!conic_oracle(3, p(2), 6).unwrap());
        assert!(conic_oracle(2, p(3), 2).unwrap());
        assert!(conic_oracle(1, p(2), 2).is_err());
    }

    #[test]
    fn xgcd_examples() {
        let (g, s, t) = xgcd(240, 46).unwrap();
        assert_eq!(g, 2);
        assert_eq!(240 * s + 46 * t, 2);
        assert_eq!(xgcd(1, 0).unwrap(), (1, 1, 0));
        let (g, s, t) = xgcd(3, 7).unwrap();
        assert_eq!((g, 3 * s + 7 * t), (1, 1));
        let (g, s, t) = xgcd(-4, 6).unwrap();
        assert_eq!((g, -4 * s + 6 * t), (2, 2));
        assert!(xgcd(0, 0).is_err());
    }

    #[test]
    fn odd_prime_factor_examples() {
        assert_eq!(odd_prime_factors(48), vec![3]);
        assert_eq!(odd_prime_factors(-35), vec![5, 7]);
        assert!(odd_prime_factors(1).is_empty());
        assert_eq!(odd_prime_factors(2 * 9 * 49 * 1999), vec![3, 7, 1999]);
    }

    #[test]
    fn prime_rejects_composites() {
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(13).is_ok());
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
        assert_eq!(Sign::Minus.to_i64(), -1);
    }
}
