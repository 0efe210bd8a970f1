//! Valuation-level arithmetic on the rationals: ν_p, the p-adic norm and
//! metric, and the unit part of a rational number.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational prime, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if is_prime_u64(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    pub const TWO: Prime = Prime(2);

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` if it fits in a `u64`.
    pub fn power(self, k: u32) -> Result<u64> {
        self.0
            .checked_pow(k)
            .ok_or_else(|| Error::InvalidParameter(format!("{}^{} overflows u64", self.0, k)))
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(value: u64) -> Result<Self> {
        Prime::new(value)
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

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin; the base set below is exact for all 64-bit inputs.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// ν_p of a rational, or +∞ for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtendedValuation {
    Finite(i64),
    Infinity,
}

impl ExtendedValuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedValuation::Finite(v) => Some(v),
            ExtendedValuation::Infinity => None,
        }
    }
}

impl PartialOrd for ExtendedValuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValuation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use ExtendedValuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinity) => std::cmp::Ordering::Less,
            (Infinity, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinity, Infinity) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtendedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValuation::Finite(v) => write!(f, "{v}"),
            ExtendedValuation::Infinity => write!(f, "+inf"),
        }
    }
}

/// Strips every factor of `p` from a nonzero integer, returning the count and the cofactor.
pub(crate) fn strip_prime(n: &BigInt, p: Prime) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = p.to_bigint();
    let mut count = 0i64;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        rest = q;
        count += 1;
    }
    (count, rest)
}

/// The exponent `t` with `x = (a/b)·p^t`, `p ∤ ab`.
pub fn valuation(x: &BigRational, p: Prime) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let (vn, _) = strip_prime(x.numer(), p);
    let (vd, _) = strip_prime(x.denom(), p);
    Ok(vn - vd)
}

pub fn valuation_or_infinity(x: &BigRational, p: Prime) -> ExtendedValuation {
    match valuation(x, p) {
        Ok(v) => ExtendedValuation::Finite(v),
        Err(_) => ExtendedValuation::Infinity,
    }
}

/// `p^e` as an exact rational, for any sign of `e`.
pub(crate) fn prime_power(p: Prime, e: i64) -> BigRational {
    let base = p.to_bigint();
    let mag: BigInt = Pow::pow(&base, e.unsigned_abs());
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

pub fn padic_norm(x: &BigRational, p: Prime) -> BigRational {
    match valuation(x, p) {
        Ok(v) => prime_power(p, -v),
        Err(_) => BigRational::zero(),
    }
}

pub fn padic_distance(x: &BigRational, y: &BigRational, p: Prime) -> BigRational {
    padic_norm(&(x - y), p)
}

/// `x·p^(−ν_p(x))`, a rational whose numerator and denominator are prime to `p`.
pub fn unit_part(x: &BigRational, p: Prime) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let (_, num) = strip_prime(x.numer(), p);
    let (_, den) = strip_prime(x.denom(), p);
    Ok(BigRational::new(num, den))
}

/// The unit part of `x` reduced modulo `p^k`, in `[0, p^k)`.
pub fn unit_residue(x: &BigRational, p: Prime, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidParameter("precision k must be positive".into()));
    }
    let modulus = p.power(k)?;
    let u = unit_part(x, p)?;
    let m = BigInt::from(modulus);
    let num = u.numer().mod_floor(&m).to_u64().expect("reduced below a u64 modulus");
    let den = u.denom().mod_floor(&m).to_u64().expect("reduced below a u64 modulus");
    let inv = inv_mod(den, modulus).expect("denominator of a unit part is prime to p");
    Ok(mul_mod(num, inv, modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn brute_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000 {
            assert_eq!(is_prime_u64(n), brute_is_prime(n), "n = {n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(18_446_744_073_709_551_555));
        // strong pseudoprime to bases 2, 3, 5 and 7
        assert!(!is_prime_u64(3_215_031_751));
        assert!(Prime::new(1).is_err());
        assert_eq!(Prime::new(91), Err(Error::NotPrime(91)));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(12, 1), p(2)).unwrap(), 2);
        for q in [2, 3, 5, 7, 101] {
            assert_eq!(valuation(&rat(1, 1), p(q)).unwrap(), 0);
        }
        assert_eq!(valuation(&rat(9, 50), p(5)).unwrap(), -2);
        assert_eq!(valuation(&rat(0, 1), p(5)), Err(Error::ZeroArgument));
    }

    #[test]
    fn extended_valuation_examples() {
        assert_eq!(valuation_or_infinity(&rat(0, 1), p(7)), ExtendedValuation::Infinity);
        assert_eq!(valuation_or_infinity(&rat(7, 1), p(7)), ExtendedValuation::Finite(1));
        assert_eq!(valuation_or_infinity(&rat(3, 4), p(2)), ExtendedValuation::Finite(-2));
        assert!(ExtendedValuation::Finite(1_000) < ExtendedValuation::Infinity);
    }

    #[test]
    fn norm_and_distance_examples() {
        assert_eq!(padic_norm(&rat(0, 1), p(3)), rat(0, 1));
        assert_eq!(padic_norm(&rat(18, 1), p(3)), rat(1, 9));
        assert_eq!(padic_norm(&rat(1, 2), p(2)), rat(2, 1));
        assert_eq!(padic_distance(&rat(5, 1), &rat(5, 1), p(3)), rat(0, 1));
        assert_eq!(padic_distance(&rat(1, 1), &rat(10, 1), p(3)), rat(1, 9));
        assert_eq!(padic_distance(&rat(1, 3), &rat(2, 3), p(3)), rat(3, 1));
    }

    #[test]
    fn unit_part_examples() {
        assert_eq!(unit_part(&rat(-4, 1), p(2)).unwrap(), rat(-1, 1));
        assert_eq!(unit_part(&rat(5, 1), p(3)).unwrap(), rat(5, 1));
        assert_eq!(unit_part(&rat(9, 2), p(3)).unwrap(), rat(1, 2));
        assert!(unit_part(&rat(0, 1), p(3)).is_err());
    }

    #[test]
    fn unit_residue_examples() {
        assert_eq!(unit_residue(&rat(-4, 1), p(2), 3).unwrap(), 7);
        assert_eq!(unit_residue(&rat(1, 1), p(5), 2).unwrap(), 1);
        assert_eq!(unit_residue(&rat(1, 3), p(5), 1).unwrap(), 2);
        assert!(unit_residue(&rat(0, 1), p(5), 1).is_err());
        assert!(unit_residue(&rat(1, 1), p(5), 0).is_err());
    }

    #[test]
    fn inverse_mod_small() {
        for m in 2..60u64 {
            for a in 0..m {
                match inv_mod(a, m) {
                    Some(i) => assert_eq!(a * i % m, 1),
                    None => assert_ne!(a.gcd(&m), 1),
                }
            }
        }
    }
}
