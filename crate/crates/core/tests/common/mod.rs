#![allow(dead_code)]

use quotient_density::{rat, BigRational, Prime, QuadraticForm};
use rand::Rng;

pub fn p(v: u64) -> Prime {
    Prime::new(v).unwrap()
}

pub fn form(n: usize, coeffs: &[i64]) -> QuadraticForm {
    let c: Vec<BigRational> = coeffs.iter().map(|&v| rat(v, 1)).collect();
    QuadraticForm::from_upper_triangle(n, &c).unwrap()
}

pub fn ints(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&t| rat(t, 1)).collect()
}

/// Every nonsingular `aX² + bXY + cY²` with `a, b, c ∈ [−r, r]`, lexicographic.
pub fn binary_corpus(r: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                if b * b - 4 * a * c != 0 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// Random nonsingular form with integer monomial coefficients in `[−r, r]`.
pub fn random_form<R: Rng>(rng: &mut R, n: usize, r: i64) -> QuadraticForm {
    loop {
        let coeffs: Vec<i64> = (0..n * (n + 1) / 2).map(|_| rng.gen_range(-r..=r)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let q = form(n, &coeffs);
        if q.is_nonsingular() {
            return q;
        }
    }
}

/// Random nonsingular form whose coefficients are rationals `num/den`.
pub fn random_rational_form<R: Rng>(rng: &mut R, n: usize) -> QuadraticForm {
    loop {
        let coeffs: Vec<BigRational> = (0..n * (n + 1) / 2)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    rat(0, 1)
                } else {
                    rat(rng.gen_range(-12..=12), rng.gen_range(1..=6))
                }
            })
            .collect();
        if let Ok(q) = QuadraticForm::from_upper_triangle(n, &coeffs) {
            if q.is_nonsingular() {
                return q;
            }
        }
    }
}

pub fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    loop {
        let r = rat(rng.gen_range(-60..=60), rng.gen_range(1..=40));
        if r != rat(0, 1) {
            return r;
        }
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=5))).collect()
}

/// A random integer matrix of determinant ±1: a permutation followed by shears.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        m.swap(i, j);
    }
    if n > 1 {
        for _ in 0..3 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                continue;
            }
            let k = rng.gen_range(-2..=2);
            for row in 0..n {
                m[row][j] += k * m[row][i];
            }
        }
    }
    m.into_iter().map(|row| row.into_iter().map(|v| rat(v, 1)).collect()).collect()
}
