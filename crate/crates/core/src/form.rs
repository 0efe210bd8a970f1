//! Quadratic forms with exact rational Gram matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::square_class::{
    all_classes, class_mul, class_representative, hilbert_symbol, is_square, Place, SquareClass,
};

type Matrix = Vec<Vec<BigRational>>;

/// `Q(x) = Σ a_ij x_i x_j` with a symmetric Gram matrix `(a_ij)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    gram: Matrix,
}

impl QuadraticForm {
    /// Builds a form from a symmetric Gram matrix.
    pub fn from_gram(gram: Matrix) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::EmptyForm);
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if gram.iter().flatten().all(Zero::is_zero) {
            return Err(Error::ZeroForm);
        }
        Ok(QuadraticForm { gram })
    }

    /// Builds a form from monomial coefficients keyed by 0-based `(i, j)` with
    /// `i ≤ j`. A coefficient on `X_iX_j`, `i < j`, lands as half in each of the
    /// two off-diagonal Gram entries.
    pub fn from_coefficients(n: usize, coeffs: &BTreeMap<(usize, usize), BigRational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyForm);
        }
        let mut gram = vec![vec![BigRational::zero(); n]; n];
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for (&(i, j), c) in coeffs {
            if i > j || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "monomial index ({}, {}) is not an upper-triangle entry of a {n}x{n} form",
                    i + 1,
                    j + 1
                )));
            }
            if i == j {
                gram[i][i] += c;
            } else {
                let h = c * &half;
                gram[i][j] += &h;
                gram[j][i] += h;
            }
        }
        Self::from_gram(gram)
    }

    /// Coefficients listed row-major over monomials `X_iX_j`, `i ≤ j`
    /// (for `n = 2` this is `a, b, c` of `aX₁² + bX₁X₂ + cX₂²`).
    pub fn from_upper_triangle(n: usize, coeffs: &[BigRational]) -> Result<Self> {
        let expected = n * (n + 1) / 2;
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        let map = upper_triangle_indices(n).zip(coeffs.iter().cloned()).collect();
        Self::from_coefficients(n, &map)
    }

    pub fn diagonal(entries: &[BigRational]) -> Result<Self> {
        let n = entries.len();
        let mut gram = vec![vec![BigRational::zero(); n]; n];
        for (i, d) in entries.iter().enumerate() {
            gram[i][i] = d.clone();
        }
        Self::from_gram(gram)
    }

    /// `aX₁² + bX₁X₂ + cX₂²`.
    pub fn binary(a: BigRational, b: BigRational, c: BigRational) -> Result<Self> {
        Self::from_upper_triangle(2, &[a, b, c])
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    /// Inverse of [`QuadraticForm::from_upper_triangle`].
    pub fn coefficients(&self) -> Vec<BigRational> {
        upper_triangle_indices(self.dim())
            .map(|(i, j)| {
                if i == j {
                    self.gram[i][i].clone()
                } else {
                    &self.gram[i][j] * BigRational::from_integer(BigInt::from(2))
                }
            })
            .collect()
    }

    fn check_len(&self, x: &[BigRational]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[BigRational]) -> Result<BigRational> {
        self.bilinear(x, x)
    }

    pub fn evaluate_integers(&self, x: &[i64]) -> Result<BigRational> {
        let v: Vec<BigRational> = x.iter().map(|&t| BigRational::from_integer(t.into())).collect();
        self.evaluate(&v)
    }

    /// `B(x, y) = xᵀ·G·y`, so that `Q(x + y) = Q(x) + 2B(x, y) + Q(y)`.
    pub fn bilinear(&self, x: &[BigRational], y: &[BigRational]) -> Result<BigRational> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut acc = BigRational::zero();
        for (i, row) in self.gram.iter().enumerate() {
            if x[i].is_zero() {
                continue;
            }
            let mut inner = BigRational::zero();
            for (g, yj) in row.iter().zip(y) {
                if !g.is_zero() && !yj.is_zero() {
                    inner += g * yj;
                }
            }
            acc += &x[i] * inner;
        }
        Ok(acc)
    }

    /// Exact determinant of the Gram matrix.
    pub fn determinant(&self) -> BigRational {
        rational_determinant(&self.gram)
    }

    pub fn is_nonsingular(&self) -> bool {
        !self.determinant().is_zero()
    }

    pub(crate) fn require_nonsingular(&self) -> Result<()> {
        if self.is_nonsingular() {
            Ok(())
        } else {
            Err(Error::SingularForm)
        }
    }

    /// `b² − 4ac` for `aX₁² + bX₁X₂ + cX₂²`.
    pub fn binary_discriminant(&self) -> Result<BigRational> {
        if self.dim() != 2 {
            return Err(Error::NotBinary(self.dim()));
        }
        let four = BigRational::from_integer(BigInt::from(4));
        let b2 = &self.gram[0][1] * &self.gram[0][1] * &four;
        Ok(b2 - four * &self.gram[0][0] * &self.gram[1][1])
    }

    /// `λ·Q`.
    pub fn scaled(&self, lambda: &BigRational) -> Result<Self> {
        Self::from_gram(
            self.gram
                .iter()
                .map(|row| row.iter().map(|g| g * lambda).collect())
                .collect(),
        )
    }

    /// The form `x ↦ Q(U·x)` for a square matrix `U`.
    pub fn substituted(&self, u: &[Vec<BigRational>]) -> Result<Self> {
        let n = self.dim();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        Self::from_gram(congruent(&self.gram, u))
    }

    /// `Q ⊥ ⟨d⟩`: one extra variable with coefficient `d`.
    pub fn with_extra_square(&self, d: BigRational) -> Result<Self> {
        let n = self.dim();
        let mut gram = self.gram.clone();
        for row in &mut gram {
            row.push(BigRational::zero());
        }
        let mut last = vec![BigRational::zero(); n + 1];
        last[n] = d;
        gram.push(last);
        Self::from_gram(gram)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), c) in upper_triangle_indices(self.dim()).zip(self.coefficients()) {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            if i == j {
                write!(f, "X{}^2", i + 1)?;
            } else {
                write!(f, "X{}*X{}", i + 1, j + 1)?;
            }
        }
        Ok(())
    }
}

/// Row-major `(i, j)` pairs with `i ≤ j`.
pub fn upper_triangle_indices(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
}

/// Determinant by fraction-free (Bareiss) elimination after clearing denominators.
pub(crate) fn rational_determinant(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    if n == 0 {
        return BigRational::one();
    }
    let scale = a.iter().flatten().fold(BigInt::one(), |acc, g| acc.lcm(g.denom()));
    let scale_q = BigRational::from_integer(scale.clone());
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| row.iter().map(|g| (g * &scale_q).to_integer()).collect())
        .collect();
    let det = bareiss_determinant(&mut m);
    BigRational::new(det, num_traits::pow(scale, n))
}

fn bareiss_determinant(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !bk[j].is_zero() {
                    out[i][j] += &a[i][k] * &bk[j];
                }
            }
        }
    }
    out
}

fn transpose(a: &[Vec<BigRational>]) -> Matrix {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

/// `Uᵀ·G·U`.
fn congruent(g: &[Vec<BigRational>], u: &[Vec<BigRational>]) -> Matrix {
    mat_mul(&transpose(u), &mat_mul(g, u))
}

/// How `diagonalize` picks its next pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotStrategy {
    /// First usable diagonal pivot, else the first nonzero off-diagonal entry.
    #[default]
    First,
    /// Last usable diagonal pivot, else the last nonzero off-diagonal entry.
    Last,
}

/// Diagonal model of a form: `Q(x) = Σ dᵢ·yᵢ²` with `y = T·x`, `x = C·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    entries: Vec<BigRational>,
    coordinates: Matrix,
    basis: Matrix,
}

impl DiagonalForm {
    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// The matrix `T` mapping original coordinates to diagonal ones.
    pub fn coordinates(&self) -> &[Vec<BigRational>] {
        &self.coordinates
    }

    /// The matrix `C = T⁻¹`; its columns are an orthogonal basis.
    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn product(&self) -> BigRational {
        self.entries.iter().fold(BigRational::one(), |acc, d| acc * d)
    }

    pub fn to_diagonal_coordinates(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.coordinates
            .iter()
            .map(|row| row.iter().zip(x).fold(BigRational::zero(), |acc, (t, xi)| acc + t * xi))
            .collect()
    }

    /// `Σ dᵢ·yᵢ²` evaluated at `y = T·x`.
    pub fn evaluate_original(&self, x: &[BigRational]) -> BigRational {
        self.to_diagonal_coordinates(x)
            .iter()
            .zip(&self.entries)
            .fold(BigRational::zero(), |acc, (y, d)| acc + d * y * y)
    }

    /// Product of `(dᵢ, dⱼ)_p` over `i < j`.
    pub fn hasse_invariant(&self, p: Prime) -> Result<i8> {
        let mut acc = 1i8;
        for i in 0..self.entries.len() {
            for j in i + 1..self.entries.len() {
                acc *= hilbert_symbol(&self.entries[i], &self.entries[j], Place::Finite(p))?;
            }
        }
        Ok(acc)
    }
}

/// Congruence diagonalization; singular input yields trailing zero entries.
fn diagonalize_any(q: &QuadraticForm, strategy: PivotStrategy) -> DiagonalForm {
    let n = q.dim();
    let mut a = q.gram.clone();
    let mut coords = identity(n);
    let mut basis = identity(n);

    // Substitute x = E·x'; the new Gram is EᵀAE and x' = E⁻¹x.
    let mut apply = |a: &mut Matrix, coords: &mut Matrix, e: &Matrix, e_inv: &Matrix| {
        *a = congruent(a, e);
        *coords = mat_mul(e_inv, coords);
        basis = mat_mul(&basis, e);
    };
    let swap = |i: usize, j: usize| {
        let mut e = identity(n);
        e.swap(i, j);
        e
    };

    for k in 0..n {
        let diag: Vec<usize> = (k..n).filter(|&j| !a[j][j].is_zero()).collect();
        let pivot = match strategy {
            PivotStrategy::First => diag.first().copied(),
            PivotStrategy::Last => diag.last().copied(),
        };
        let pivot = match pivot {
            Some(j) => j,
            None => {
                let off: Vec<(usize, usize)> = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| !a[i][j].is_zero())
                    .collect();
                let pick = match strategy {
                    PivotStrategy::First => off.first().copied(),
                    PivotStrategy::Last => off.last().copied(),
                };
                let Some((i, j)) = pick else { break };
                // x_j ← x_j + x_i turns the (i, i) entry into 2·a_ij ≠ 0.
                let mut e = identity(n);
                e[j][i] = BigRational::one();
                let mut e_inv = identity(n);
                e_inv[j][i] = -BigRational::one();
                apply(&mut a, &mut coords, &e, &e_inv);
                i
            }
        };
        if pivot != k {
            let e = swap(k, pivot);
            apply(&mut a, &mut coords, &e, &e);
        }
        let mut e = identity(n);
        let mut e_inv = identity(n);
        for j in k + 1..n {
            if !a[k][j].is_zero() {
                let r = &a[k][j] / &a[k][k];
                e[k][j] = -r.clone();
                e_inv[k][j] = r;
            }
        }
        apply(&mut a, &mut coords, &e, &e_inv);
    }
    DiagonalForm {
        entries: (0..n).map(|i| a[i][i].clone()).collect(),
        coordinates: coords,
        basis,
    }
}

pub fn diagonalize(q: &QuadraticForm) -> Result<DiagonalForm> {
    diagonalize_with(q, PivotStrategy::First)
}

pub fn diagonalize_with(q: &QuadraticForm, strategy: PivotStrategy) -> Result<DiagonalForm> {
    q.require_nonsingular()?;
    Ok(diagonalize_any(q, strategy))
}

/// Diagonalization that tolerates singular forms (zero entries for the radical).
pub(crate) fn diagonalize_unchecked(q: &QuadraticForm) -> DiagonalForm {
    diagonalize_any(q, PivotStrategy::First)
}

pub fn hasse_invariant(q: &QuadraticForm, p: Prime) -> Result<i8> {
    diagonalize(q)?.hasse_invariant(p)
}

/// Whether `Q` has a nonzero zero over Q_p.
pub fn is_isotropic(q: &QuadraticForm, p: Prime) -> Result<bool> {
    q.require_nonsingular()?;
    let finite = Place::Finite(p);
    let minus_one = -BigRational::one();
    match q.dim() {
        1 => Ok(false),
        2 => {
            let disc = q.binary_discriminant()?;
            Ok(!disc.is_zero() && is_square(&disc, p))
        }
        3 => {
            let diag = diagonalize(q)?;
            let d = diag.product();
            Ok(diag.hasse_invariant(p)? == hilbert_symbol(&minus_one, &-d, finite)?)
        }
        4 => {
            let diag = diagonalize(q)?;
            let d = diag.product();
            if !is_square(&d, p) {
                return Ok(true);
            }
            Ok(diag.hasse_invariant(p)? == hilbert_symbol(&minus_one, &minus_one, finite)?)
        }
        _ => Ok(true),
    }
}

fn check_class_prime(c: SquareClass, p: Prime) -> Result<()> {
    if c.prime() != p {
        return Err(Error::PrimeMismatch(c.prime().get(), p.get()));
    }
    Ok(())
}

/// Whether `Q` takes some value in the square class `c` over Q_p.
pub fn represents_class(q: &QuadraticForm, c: SquareClass, p: Prime) -> Result<bool> {
    check_class_prime(c, p)?;
    if is_isotropic(q, p)? {
        return Ok(true);
    }
    let r = BigRational::from_integer(BigInt::from(class_representative(c)));
    is_isotropic(&q.with_extra_square(-r)?, p)
}

/// Classes of Q_p*/(Q_p*)² met by `Q(Q_pⁿ) \ {0}`, in `all_classes` order.
pub fn represented_classes(q: &QuadraticForm, p: Prime) -> Result<Vec<SquareClass>> {
    q.require_nonsingular()?;
    let mut out = Vec::new();
    for c in all_classes(p) {
        if represents_class(q, c, p)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Classes met by the quotient set `R(Q(Q_pⁿ)) \ {0}`, in `all_classes` order.
pub fn quotient_class_set(q: &QuadraticForm, p: Prime) -> Result<Vec<SquareClass>> {
    let represented = represented_classes(q, p)?;
    let mut found = std::collections::BTreeSet::new();
    for a in &represented {
        for b in &represented {
            found.insert(class_mul(*a, *b)?);
        }
    }
    Ok(all_classes(p).into_iter().filter(|c| found.contains(c)).collect())
}
