//! The square-class group Q_p*/(Q_p*)², Legendre symbols and Hilbert symbols.
//!
//! A class is stored as a small F₂ vector packed into a byte:
//!
//! * bit 0: parity of ν_p;
//! * odd p, bit 1: the unit part is a quadratic non-residue mod p;
//! * p = 2, bit 1: the unit part is ≡ 3 (mod 4);
//! * p = 2, bit 2: the unit part is ≡ ±3 (mod 8).
//!
//! Both unit maps are group homomorphisms, so multiplication of classes is
//! XOR of the packed bits and the identity class is zero.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{pow_mod, unit_residue, valuation, Prime};

/// Residue precision that determines the square class of a unit: mod p for
/// odd p, mod 8 for p = 2.
pub fn hensel_precision(p: Prime) -> u32 {
    if p.is_two() {
        3
    } else {
        1
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre_symbol(a: i64, p: Prime) -> Result<i8> {
    if p.is_two() {
        return Err(Error::EvenPrime);
    }
    let m = p.get();
    let r = a.rem_euclid(m as i64) as u64;
    Ok(legendre_residue(r, m))
}

/// Euler's criterion on a residue already reduced mod `p`.
fn legendre_residue(r: u64, p: u64) -> i8 {
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn smallest_nonresidue(p: Prime) -> u64 {
    debug_assert!(!p.is_two());
    (2..p.get())
        .find(|&a| legendre_residue(a, p.get()) == -1)
        .expect("every odd prime has a non-residue")
}

/// True iff `x` is a square in Q_p (zero counts as `0²`).
pub fn is_square(x: &BigRational, p: Prime) -> bool {
    if x.is_zero() {
        return true;
    }
    square_class(x, p).map(|c| c.is_identity()).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    p: Prime,
    bits: u8,
}

impl SquareClass {
    pub fn identity(p: Prime) -> Self {
        SquareClass { p, bits: 0 }
    }

    /// Builds the class from ν_p and the unit part reduced mod `p^hensel_precision(p)`.
    pub fn from_parts(p: Prime, valuation: i64, unit_residue: u64) -> Self {
        let parity = (valuation.rem_euclid(2)) as u8;
        let unit_bits = if p.is_two() {
            let u = unit_residue % 8;
            debug_assert!(u % 2 == 1, "2-adic unit residue must be odd");
            let eps = u8::from(u % 4 == 3);
            let omega = u8::from(u == 3 || u == 5);
            (eps << 1) | (omega << 2)
        } else {
            let u = unit_residue % p.get();
            debug_assert!(u != 0, "unit residue must be prime to p");
            u8::from(legendre_residue(u, p.get()) == -1) << 1
        };
        SquareClass {
            p,
            bits: parity | unit_bits,
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// The F₂ coordinates: length 2 for odd p, length 3 for p = 2.
    pub fn bits(&self) -> Vec<bool> {
        (0..self.dimension()).map(|i| self.bits >> i & 1 == 1).collect()
    }

    pub fn packed(&self) -> u8 {
        self.bits
    }

    fn dimension(&self) -> u32 {
        if self.p.is_two() {
            3
        } else {
            2
        }
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    pub fn valuation_parity(&self) -> u8 {
        self.bits & 1
    }

    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass> {
        class_mul(*self, *other)
    }

    pub fn representative(&self) -> u64 {
        class_representative(*self)
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

pub fn square_class(x: &BigRational, p: Prime) -> Result<SquareClass> {
    let v = valuation(x, p)?;
    let u = unit_residue(x, p, hensel_precision(p))?;
    Ok(SquareClass::from_parts(p, v, u))
}

pub fn class_mul(c1: SquareClass, c2: SquareClass) -> Result<SquareClass> {
    if c1.p != c2.p {
        return Err(Error::PrimeMismatch(c1.p.get(), c2.p.get()));
    }
    Ok(SquareClass {
        p: c1.p,
        bits: c1.bits ^ c2.bits,
    })
}

const TWO_ADIC_REPRESENTATIVES: [u64; 8] = [1, 3, 5, 7, 2, 6, 10, 14];

fn representatives(p: Prime) -> Vec<u64> {
    if p.is_two() {
        TWO_ADIC_REPRESENTATIVES.to_vec()
    } else {
        let u = smallest_nonresidue(p);
        vec![1, u, p.get(), u * p.get()]
    }
}

fn class_of_integer(n: u64, p: Prime) -> SquareClass {
    let mut v = 0;
    let mut m = n;
    while m % p.get() == 0 {
        m /= p.get();
        v += 1;
    }
    let modulus = if p.is_two() { 8 } else { p.get() };
    SquareClass::from_parts(p, v, m % modulus)
}

/// The canonical positive integer in the class.
pub fn class_representative(c: SquareClass) -> u64 {
    representatives(c.p)
        .into_iter()
        .find(|&r| class_of_integer(r, c.p) == c)
        .expect("representative list covers every class")
}

/// Every class of Q_p*/(Q_p*)², identity first, in representative order.
pub fn all_classes(p: Prime) -> Vec<SquareClass> {
    representatives(p)
        .into_iter()
        .map(|r| class_of_integer(r, p))
        .collect()
}

/// A place of Q: the archimedean one or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Place {
    Real,
    Finite(Prime),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Hilbert symbol `(a, b)_v`: 1 iff `z² = a·x² + b·y²` has a nonzero solution
/// over the completion at `v`.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let p = match place {
        Place::Real => {
            return Ok(if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            })
        }
        Place::Finite(p) => p,
    };
    let alpha = valuation(a, p)?;
    let beta = valuation(b, p)?;
    let prec = hensel_precision(p);
    let u = unit_residue(a, p, prec)?;
    let v = unit_residue(b, p, prec)?;
    let exponent = if p.is_two() {
        let eps = |t: u64| ((t - 1) / 2) % 2;
        let omega = |t: u64| ((t * t - 1) / 8) % 2;
        eps(u) * eps(v) + (alpha.rem_euclid(2) as u64) * omega(v) + (beta.rem_euclid(2) as u64) * omega(u)
    } else {
        let pm = p.get();
        let eps_p = ((pm - 1) / 2) % 2;
        let leg = |t: u64| u64::from(legendre_residue(t, pm) == -1);
        (alpha.rem_euclid(2) as u64) * (beta.rem_euclid(2) as u64) * eps_p
            + (beta.rem_euclid(2) as u64) * leg(u)
            + (alpha.rem_euclid(2) as u64) * leg(v)
    };
    Ok(if exponent % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(1, p(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(2, p(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(2, p(3)).unwrap(), -1);
        assert_eq!(legendre_symbol(-14, p(7)).unwrap(), 0);
        assert_eq!(legendre_symbol(3, Prime::TWO), Err(Error::EvenPrime));
    }

    #[test]
    fn legendre_matches_squares_table() {
        for q in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            let squares: Vec<u64> = (1..q).map(|y| y * y % q).collect();
            for a in -40i64..40 {
                let r = a.rem_euclid(q as i64) as u64;
                let expected = if r == 0 {
                    0
                } else if squares.contains(&r) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_symbol(a, p(q)).unwrap(), expected, "a={a} p={q}");
            }
        }
    }

    #[test]
    fn is_square_examples() {
        assert!(!is_square(&rat(-4, 1), p(2)));
        for q in [2, 3, 5, 7, 11] {
            assert!(is_square(&rat(9, 1), p(q)));
            assert!(is_square(&rat(0, 1), p(q)));
        }
        assert!(is_square(&rat(17, 1), p(2)));
        assert!(!is_square(&rat(2, 1), p(3)));
        assert!(is_square(&rat(-1, 1), p(5)));
    }

    #[test]
    fn square_class_examples() {
        assert!(square_class(&rat(4, 1), p(5)).unwrap().is_identity());
        assert_eq!(square_class(&rat(10, 1), p(5)).unwrap().bits(), vec![true, true]);
        let minus_one = square_class(&rat(-1, 1), p(2)).unwrap();
        assert_eq!(minus_one, square_class(&rat(7, 1), p(2)).unwrap());
        assert_eq!(minus_one.valuation_parity(), 0);
        assert_eq!(square_class(&rat(0, 1), p(5)), Err(Error::ZeroArgument));
    }

    #[test]
    fn class_mul_examples() {
        for q in [2, 3, 5, 7] {
            for c in all_classes(p(q)) {
                assert!(class_mul(c, c).unwrap().is_identity());
            }
        }
        let c = |n: i64, q: u64| square_class(&rat(n, 1), p(q)).unwrap();
        assert_eq!(class_mul(c(2, 2), c(3, 2)).unwrap(), c(6, 2));
        assert_eq!(class_mul(c(5, 7), c(7, 7)).unwrap(), c(35, 7));
        assert_eq!(
            class_mul(c(5, 7), c(5, 3)),
            Err(Error::PrimeMismatch(7, 3))
        );
    }

    #[test]
    fn representatives_examples() {
        assert_eq!(class_representative(SquareClass::identity(p(5))), 1);
        let nonres = square_class(&rat(2, 1), p(3)).unwrap();
        assert_eq!(class_representative(nonres), 2);
        assert_eq!(class_representative(square_class(&rat(-1, 1), p(2)).unwrap()), 7);
    }

    #[test]
    fn all_classes_counts() {
        assert_eq!(all_classes(p(3)).len(), 4);
        assert_eq!(all_classes(p(2)).len(), 8);
        let reps: Vec<u64> = all_classes(p(5)).iter().map(|c| c.representative()).collect();
        assert_eq!(reps, vec![1, 2, 5, 10]);
        for q in [2, 3, 5, 7, 11, 13] {
            let classes = all_classes(p(q));
            assert!(classes[0].is_identity());
            let mut dedup = classes.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), classes.len());
            for c in &classes {
                let r = rat(c.representative() as i64, 1);
                assert_eq!(square_class(&r, p(q)).unwrap(), *c);
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        for b in [-7i64, -1, 2, 3, 10] {
            for place in [Place::Real, Place::Finite(p(2)), Place::Finite(p(5))] {
                assert_eq!(hilbert_symbol(&rat(1, 1), &rat(b, 1), place).unwrap(), 1);
            }
        }
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-1, 1), Place::Real).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(2, 1), &rat(5, 1), Place::Finite(p(5))).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-1, 1), Place::Finite(p(2))).unwrap(), -1);
        assert!(hilbert_symbol(&rat(0, 1), &rat(1, 1), Place::Real).is_err());
    }
}
