//! Density of quotient sets `R(Q(Zⁿ))` in Q_p, and the variants restricted to
//! nonnegative values.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::form::{diagonalize_unchecked, is_isotropic, quotient_class_set, rational_determinant, QuadraticForm};
use crate::padic::{unit_residue, Prime};
use crate::square_class::{all_classes, hensel_precision, is_square};

/// Which criterion decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    RankAtLeast3,
    BinaryDiscSquare,
    BinaryDiscNonSquare,
    Rank1,
    IsotropicShortcut,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::RankAtLeast3 => "RankAtLeast3",
            Branch::BinaryDiscSquare => "BinaryDiscSquare",
            Branch::BinaryDiscNonSquare => "BinaryDiscNonSquare",
            Branch::Rank1 => "Rank1",
            Branch::IsotropicShortcut => "IsotropicShortcut",
        }
    }

    pub fn explanation(self) -> &'static str {
        match self {
            Branch::RankAtLeast3 => "every nonsingular form in three or more variables has a dense quotient set",
            Branch::BinaryDiscSquare => "the discriminant b^2-4ac is a nonzero square in Q_p, so the form is isotropic",
            Branch::BinaryDiscNonSquare => {
                "the discriminant b^2-4ac is not a square in Q_p; the quotients miss some square classes"
            }
            Branch::Rank1 => "quotients of a*x^2 are squares, one class out of many",
            Branch::IsotropicShortcut => "the form is isotropic over Q_p and represents every element",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Discriminant data behind a binary verdict. `unit_residue` is the unit part
/// of the discriminant mod p (odd p) or mod 8 (p = 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryWitness {
    pub discriminant: BigRational,
    pub unit_residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityVerdict {
    pub dense: bool,
    pub branch: Branch,
    pub witness: Option<BinaryWitness>,
}

/// Tri-state answer for questions that are only semi-decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl Decision {
    pub fn and(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::No, _) | (_, Decision::No) => Decision::No,
            (Decision::Yes, Decision::Yes) => Decision::Yes,
            _ => Decision::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Unknown => "unknown",
        }
    }
}

impl From<bool> for Decision {
    fn from(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

/// Whether `Q` attains a positive value on the chosen domain; `Yes` always
/// carries an integer witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityStatus {
    pub value: Decision,
    pub witness: Option<Vec<BigInt>>,
}

impl PositivityStatus {
    fn yes(witness: Vec<BigInt>) -> Self {
        PositivityStatus {
            value: Decision::Yes,
            witness: Some(witness),
        }
    }

    fn no() -> Self {
        PositivityStatus {
            value: Decision::No,
            witness: None,
        }
    }
}

/// Argument domain for the nonnegative-value variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Z,
    N,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedVerdict {
    pub density: DensityVerdict,
    pub positivity: PositivityStatus,
    pub dense: Decision,
}

/// Classifies `(Q, p)` by rank and, for binary forms, by whether `b² − 4ac`
/// is a nonzero square in Q_p.
pub fn is_dense(q: &QuadraticForm, p: Prime) -> Result<DensityVerdict> {
    q.require_nonsingular()?;
    Ok(match q.dim() {
        1 => DensityVerdict {
            dense: false,
            branch: Branch::Rank1,
            witness: None,
        },
        2 => {
            let disc = q.binary_discriminant()?;
            let dense = is_square(&disc, p);
            DensityVerdict {
                dense,
                branch: if dense {
                    Branch::BinaryDiscSquare
                } else {
                    Branch::BinaryDiscNonSquare
                },
                witness: Some(BinaryWitness {
                    unit_residue: unit_residue(&disc, p, hensel_precision(p))?,
                    discriminant: disc,
                }),
            }
        }
        _ => DensityVerdict {
            dense: true,
            branch: Branch::RankAtLeast3,
            witness: None,
        },
    })
}

/// Density decided from the square classes met by the quotient set.
pub fn is_dense_via_classes(q: &QuadraticForm, p: Prime) -> Result<bool> {
    Ok(quotient_class_set(q, p)? == all_classes(p))
}

/// Like [`is_dense_via_classes`] but tagged with the branch that explains it.
pub fn verdict_via_classes(q: &QuadraticForm, p: Prime) -> Result<DensityVerdict> {
    let dense = is_dense_via_classes(q, p)?;
    let branch = if is_isotropic(q, p)? {
        Branch::IsotropicShortcut
    } else {
        match q.dim() {
            1 => Branch::Rank1,
            2 => Branch::BinaryDiscNonSquare,
            _ => Branch::RankAtLeast3,
        }
    };
    Ok(DensityVerdict {
        dense,
        branch,
        witness: None,
    })
}

/// True iff `−Q` is positive semidefinite, i.e. every principal minor of `−G` is ≥ 0.
pub fn is_negative_semidefinite(q: &QuadraticForm) -> bool {
    let n = q.dim();
    let neg: Vec<Vec<BigRational>> = q.gram().iter().map(|r| r.iter().map(|g| -g).collect()).collect();
    (1u64..1 << n).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<BigRational>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| neg[i][j].clone()).collect())
            .collect();
        !rational_determinant(&sub).is_negative()
    })
}

/// Integer vectors in lexicographic order with the first coordinate slowest,
/// covering the shell `max|xᵢ| = r`. Coordinates run through `0, 1, −1, 2, −2, …`
/// for `Z` and `0, 1, 2, …` for `N`.
fn shell(n: usize, r: u64, domain: Domain) -> impl Iterator<Item = Vec<i64>> {
    let digits: Vec<i64> = match domain {
        Domain::Z => std::iter::once(0)
            .chain((1..=r as i64).flat_map(|k| [k, -k]))
            .collect(),
        Domain::N => (0..=r as i64).collect(),
    };
    let base = digits.len();
    let total = (base as u128).pow(n as u32);
    (0..total).filter_map(move |mut code| {
        let mut x = vec![0i64; n];
        for slot in x.iter_mut().rev() {
            *slot = digits[(code % base as u128) as usize];
            code /= base as u128;
        }
        (x.iter().map(|v| v.unsigned_abs()).max() == Some(r)).then_some(x)
    })
}

fn first_positive(q: &QuadraticForm, candidates: impl Iterator<Item = Vec<i64>>) -> Option<Vec<BigInt>> {
    candidates
        .into_iter()
        .find(|x| q.evaluate_integers(x).map(|v| v.is_positive()).unwrap_or(false))
        .map(|x| x.into_iter().map(BigInt::from).collect())
}

fn unit_vectors(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..n).map(move |i| {
        let mut e = vec![0; n];
        e[i] = 1;
        e
    })
}

/// Exact: `No` iff `−Q` is positive semidefinite, otherwise `Yes` with an
/// integer witness.
pub fn represents_positive_over_z(q: &QuadraticForm) -> PositivityStatus {
    let n = q.dim();
    if let Some(w) = first_positive(q, unit_vectors(n).chain(shell(n, 1, Domain::Z))) {
        return PositivityStatus::yes(w);
    }
    if is_negative_semidefinite(q) {
        return PositivityStatus::no();
    }
    // Some diagonal coefficient is positive (Sylvester); its basis vector,
    // cleared of denominators, is the witness.
    let diag = diagonalize_unchecked(q);
    let i = diag
        .entries()
        .iter()
        .position(|d| d.is_positive())
        .expect("a form that is not negative semidefinite has a positive diagonal coefficient");
    let column: Vec<BigRational> = diag.basis().iter().map(|row| row[i].clone()).collect();
    let lcm = column.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let witness: Vec<BigInt> = column
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    debug_assert!(q
        .evaluate(&witness.iter().cloned().map(BigRational::from_integer).collect::<Vec<_>>())
        .map(|v| v.is_positive())
        .unwrap_or(false));
    PositivityStatus::yes(witness)
}

/// Semi-decision over `Nⁿ`: a bounded search in `{0..radius}ⁿ` for a positive
/// value, then two certificates of nonpositivity; `Unknown` otherwise.
pub fn represents_positive_over_n(q: &QuadraticForm, radius: u64) -> PositivityStatus {
    let n = q.dim();
    let candidates = unit_vectors(n).chain((1..=radius).flat_map(move |r| shell(n, r, Domain::N)));
    if let Some(w) = first_positive(q, candidates) {
        return PositivityStatus::yes(w);
    }
    if is_negative_semidefinite(q) || q.gram().iter().flatten().all(|g| !g.is_positive()) {
        return PositivityStatus::no();
    }
    PositivityStatus {
        value: Decision::Unknown,
        witness: None,
    }
}

/// Density of the quotients of the positive values of `Q` on `domainⁿ`: the
/// unrestricted verdict and the existence of a positive value must both hold.
pub fn is_dense_nonnegative_restricted(
    q: &QuadraticForm,
    p: Prime,
    domain: Domain,
    radius: u64,
) -> Result<RestrictedVerdict> {
    let density = is_dense(q, p)?;
    let positivity = match domain {
        Domain::Z => represents_positive_over_z(q),
        Domain::N => represents_positive_over_n(q, radius),
    };
    let dense = Decision::from(density.dense).and(positivity.value);
    Ok(RestrictedVerdict {
        density,
        positivity,
        dense,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Error};

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn form(n: usize, coeffs: &[i64]) -> QuadraticForm {
        let c: Vec<BigRational> = coeffs.iter().map(|&v| rat(v, 1)).collect();
        QuadraticForm::from_upper_triangle(n, &c).unwrap()
    }

    fn big(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn is_dense_examples() {
        let three = form(3, &[1, 0, 0, 1, 0, 1]);
        for q in [2, 3, 5, 7] {
            let v = is_dense(&three, p(q)).unwrap();
            assert!(v.dense);
            assert_eq!(v.branch, Branch::RankAtLeast3);
        }
        let sum2 = form(2, &[1, 0, 1]);
        let v5 = is_dense(&sum2, p(5)).unwrap();
        assert!(v5.dense);
        assert_eq!(v5.branch, Branch::BinaryDiscSquare);
        assert_eq!(
            v5.witness,
            Some(BinaryWitness {
                discriminant: rat(-4, 1),
                unit_residue: 1
            })
        );
        let v2 = is_dense(&sum2, p(2)).unwrap();
        assert!(!v2.dense);
        assert_eq!(v2.witness.unwrap().unit_residue, 7);
        let r1 = is_dense(&form(1, &[5]), p(5)).unwrap();
        assert_eq!((r1.dense, r1.branch), (false, Branch::Rank1));
        assert_eq!(is_dense(&form(2, &[1, 2, 1]), p(5)), Err(Error::SingularForm));
    }

    #[test]
    fn via_classes_examples() {
        for q in [2, 3, 5, 7] {
            assert!(is_dense_via_classes(&form(2, &[0, 1, 0]), p(q)).unwrap());
            assert!(!is_dense_via_classes(&form(1, &[1]), p(q)).unwrap());
            assert_eq!(
                verdict_via_classes(&form(2, &[0, 1, 0]), p(q)).unwrap().branch,
                Branch::IsotropicShortcut
            );
        }
        assert!(!is_dense_via_classes(&form(2, &[1, 0, 1]), p(3)).unwrap());
    }

    #[test]
    fn positivity_over_z_examples() {
        assert_eq!(represents_positive_over_z(&form(2, &[1, 0, 1])), PositivityStatus::yes(big(&[1, 0])));
        assert_eq!(represents_positive_over_z(&form(2, &[-1, 0, -1])).value, Decision::No);
        assert_eq!(represents_positive_over_z(&form(2, &[0, -1, 0])), PositivityStatus::yes(big(&[1, -1])));
        // singular and negative semidefinite
        assert_eq!(represents_positive_over_z(&form(2, &[-1, 2, -1])).value, Decision::No);
    }

    #[test]
    fn positivity_witness_beyond_small_box() {
        // -x² + 7xy - 13y²: disc 49 - 52 < 0 and leading -1, negative definite
        assert_eq!(represents_positive_over_z(&form(2, &[-1, 7, -13])).value, Decision::No);
        // -x² + 9xy - 20y² = -(x - 4y)(x - 5y) is positive only strictly between x = 4y and x = 5y
        let q = form(2, &[-1, 9, -20]);
        let s = represents_positive_over_z(&q);
        assert_eq!(s.value, Decision::Yes);
        let w: Vec<BigRational> = s.witness.unwrap().into_iter().map(BigRational::from_integer).collect();
        assert!(q.evaluate(&w).unwrap().is_positive());
    }

    #[test]
    fn positivity_over_n_examples() {
        for radius in [1, 3, 10] {
            assert_eq!(represents_positive_over_n(&form(2, &[0, -1, 0]), radius).value, Decision::No);
        }
        assert_eq!(represents_positive_over_n(&form(1, &[1]), 2), PositivityStatus::yes(big(&[1])));
        assert_eq!(represents_positive_over_n(&form(2, &[1, -3, 1]), 4), PositivityStatus::yes(big(&[1, 0])));
        // -x² + 3xy - 3y² ... negative definite
        assert_eq!(represents_positive_over_n(&form(2, &[-1, 3, -3]), 4).value, Decision::No);
        // -(x - 4y)(x - 5y) positive on the orthant but beyond radius 3
        let q = form(2, &[-1, 9, -20]);
        assert_eq!(represents_positive_over_n(&q, 3).value, Decision::Unknown);
        assert_eq!(represents_positive_over_n(&q, 10).value, Decision::Yes);
    }

    #[test]
    fn restricted_examples() {
        let q = form(2, &[0, -1, 0]);
        for prime in [2, 3, 5, 7] {
            let z = is_dense_nonnegative_restricted(&q, p(prime), Domain::Z, 5).unwrap();
            assert_eq!(z.dense, Decision::Yes);
            let n = is_dense_nonnegative_restricted(&q, p(prime), Domain::N, 5).unwrap();
            assert_eq!(n.dense, Decision::No);
            let neg = form(3, &[-1, 0, 0, -1, 0, -1]);
            let r = is_dense_nonnegative_restricted(&neg, p(prime), Domain::Z, 5).unwrap();
            assert!(r.density.dense);
            assert_eq!(r.dense, Decision::No);
        }
    }

    #[test]
    fn decision_conjunction() {
        use Decision::*;
        assert_eq!(Yes.and(Yes), Yes);
        assert_eq!(Yes.and(Unknown), Unknown);
        assert_eq!(No.and(Unknown), No);
        assert_eq!(Unknown.and(No), No);
    }
}
