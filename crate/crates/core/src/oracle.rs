//! Brute-force cross-check of the classifier.
//!
//! The oracle evaluates `Q` on every integer vector of a box `[−B, B]ⁿ`,
//! forms all quotients of the nonzero values, and records which square classes
//! and which residue balls `p^v·(u + p^k·Z_p)` those quotients reach. It shares
//! no code with the classifier beyond valuations and class encoding.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::QuadraticForm;
use crate::padic::{inv_mod, mul_mod, strip_prime, unit_residue, valuation, Prime};
use crate::square_class::{all_classes, hensel_precision, square_class, SquareClass};

pub const DEFAULT_BOX: u64 = 50;
pub const DEFAULT_WINDOW: i64 = 2;
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub box_radius: u64,
    /// Unit precision `k`: residues are taken mod `p^k`.
    pub precision: u32,
    /// Valuation window `V`: cells with `v ∈ [−V, V]`.
    pub window: i64,
    /// Maximum number of argument vectors.
    pub budget: u64,
    pub jobs: usize,
}

impl OracleConfig {
    /// Box 50, window 2, and the Hensel precision of `p` (1 for odd p, 3 for p = 2).
    pub fn for_prime(p: Prime) -> Self {
        OracleConfig {
            box_radius: DEFAULT_BOX,
            precision: hensel_precision(p),
            window: DEFAULT_WINDOW,
            budget: DEFAULT_BUDGET,
            jobs: 1,
        }
    }

    pub fn with_box(mut self, b: u64) -> Self {
        self.box_radius = b;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.box_radius == 0 {
            return Err(Error::InvalidParameter("box radius must be at least 1".into()));
        }
        if self.precision == 0 {
            return Err(Error::InvalidParameter("unit precision must be at least 1".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidParameter("valuation window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SampleCounts {
    pub points: u64,
    pub distinct_values: u64,
    pub nonzero_values: u64,
    pub value_cells: u64,
    pub quotient_cells: u64,
}

/// Distinct values of `Q` on an integer box, each with the first argument
/// (in enumeration order) that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    /// Values of the integral model `s·Q`.
    scaled: BTreeMap<BigInt, Vec<i64>>,
    /// `s`, the least common denominator of the Gram entries.
    scale: BigInt,
    points: u64,
}

impl ValueSet {
    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }

    pub fn points(&self) -> u64 {
        self.points
    }

    /// `(Q(x), x)` in increasing order of value.
    pub fn iter(&self) -> impl Iterator<Item = (BigRational, &[i64])> + '_ {
        self.scaled
            .iter()
            .map(|(v, w)| (BigRational::new(v.clone(), self.scale.clone()), w.as_slice()))
    }

    pub fn values(&self) -> Vec<BigRational> {
        self.iter().map(|(v, _)| v).collect()
    }

    fn nonzero_scaled(&self) -> impl Iterator<Item = &BigInt> {
        self.scaled.keys().filter(|v| !v.is_zero())
    }
}

/// `s·G` with integer entries, plus `s`.
fn integral_model(q: &QuadraticForm) -> (Vec<Vec<BigInt>>, BigInt) {
    let scale = q.gram().iter().flatten().fold(BigInt::one(), |acc, g| acc.lcm(g.denom()));
    let s = BigRational::from_integer(scale.clone());
    let m = q
        .gram()
        .iter()
        .map(|row| row.iter().map(|g| (g * &s).to_integer()).collect())
        .collect();
    (m, scale)
}

/// `s·Q(x) = Σ gᵢᵢxᵢ² + 2Σ_{i<j} gᵢⱼxᵢxⱼ` on the integral model.
enum Evaluator {
    Small(Vec<(usize, usize, i128)>),
    Big(Vec<(usize, usize, BigInt)>),
}

impl Evaluator {
    fn new(model: &[Vec<BigInt>], box_radius: u64) -> Self {
        let n = model.len();
        let terms: Vec<(usize, usize, BigInt)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !model[i][j].is_zero())
            .map(|(i, j)| {
                let c = if i == j { model[i][i].clone() } else { &model[i][j] * 2 };
                (i, j, c)
            })
            .collect();
        let b2 = BigInt::from(box_radius) * BigInt::from(box_radius);
        let bound: BigInt = terms.iter().map(|(_, _, c)| c.abs() * &b2).sum();
        if bound < BigInt::one() << 120 {
            Evaluator::Small(
                terms
                    .into_iter()
                    .map(|(i, j, c)| (i, j, c.to_i128().expect("bounded above")))
                    .collect(),
            )
        } else {
            Evaluator::Big(terms)
        }
    }
}

/// Decodes the `index`-th point of the slice in odometer order.
fn slice_point(n: usize, b: i64, lead: i64, mut index: u64) -> Vec<i64> {
    let side = 2 * b as u64 + 1;
    let mut x = vec![0; n];
    x[0] = lead;
    for slot in x[1..].iter_mut().rev() {
        *slot = (index % side) as i64 - b;
        index /= side;
    }
    x
}

/// Enumerates `[−B, B]ⁿ` with the first coordinate fixed to `lead`.
fn enumerate_slice(eval: &Evaluator, n: usize, b: i64, lead: i64) -> Slice {
    match eval {
        Evaluator::Small(terms) => Slice::Small(enumerate_slice_small(terms, n, b, lead)),
        Evaluator::Big(terms) => Slice::Big(enumerate_slice_big(terms, n, b, lead)),
    }
}

/// Distinct values of one slice with their first witness; small values carry
/// the witness as an odometer index.
enum Slice {
    Small(Vec<(i128, u64)>),
    Big(Vec<(BigInt, Vec<i64>)>),
}

/// Along the last coordinate `t` the value is `A + L·t + C·t²`, so each row
/// costs one full evaluation and then additions only.
fn enumerate_slice_small(terms: &[(usize, usize, i128)], n: usize, b: i64, lead: i64) -> Vec<(i128, u64)> {
    let last = n - 1;
    let mut x = vec![-b; n];
    x[0] = lead;
    let mut seen: FxHashMap<i128, u64> = FxHashMap::default();
    let mut index = 0u64;
    loop {
        if n == 1 {
            let c = terms.iter().map(|&(_, _, c)| c).sum::<i128>();
            seen.insert(c * lead as i128 * lead as i128, 0);
        } else {
            let (mut a, mut l, mut c) = (0i128, 0i128, 0i128);
            for &(i, j, coef) in terms {
                match (i == last, j == last) {
                    (true, true) => c += coef,
                    (false, true) => l += coef * x[i] as i128,
                    _ => a += coef * x[i] as i128 * x[j] as i128,
                }
            }
            for t in -b..=b {
                let t = t as i128;
                seen.entry(a + t * (l + c * t)).or_insert(index);
                index += 1;
            }
        }
        // odometer over coordinates 1..n−1; the last one is swept above
        let mut pos = last;
        loop {
            if pos <= 1 {
                return seen.into_iter().collect();
            }
            pos -= 1;
            if x[pos] < b {
                x[pos] += 1;
                break;
            }
            x[pos] = -b;
        }
    }
}

fn enumerate_slice_big(terms: &[(usize, usize, BigInt)], n: usize, b: i64, lead: i64) -> Vec<(BigInt, Vec<i64>)> {
    let mut x = vec![-b; n];
    x[0] = lead;
    let mut seen: BTreeMap<BigInt, Vec<i64>> = BTreeMap::new();
    loop {
        let v: BigInt = terms
            .iter()
            .map(|(i, j, c)| c * BigInt::from(x[*i]) * BigInt::from(x[*j]))
            .sum();
        seen.entry(v).or_insert_with(|| x.clone());
        let mut pos = n;
        loop {
            if pos == 1 {
                return seen.into_iter().collect();
            }
            pos -= 1;
            if x[pos] < b {
                x[pos] += 1;
                break;
            }
            x[pos] = -b;
        }
    }
}

fn check_budget(n: usize, b: u64, budget: u64) -> Result<u64> {
    let side = 2 * b as u128 + 1;
    let points = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(side)).unwrap_or(u128::MAX);
    if points > budget as u128 {
        return Err(Error::BudgetExceeded { points, budget });
    }
    Ok(points as u64)
}

/// All values of `Q` on `[−B, B]ⁿ`, deduplicated. Fails fast when `(2B+1)ⁿ`
/// exceeds the configured budget.
pub fn enumerate_values(q: &QuadraticForm, config: &OracleConfig) -> Result<ValueSet> {
    if config.box_radius == 0 {
        return Err(Error::InvalidParameter("box radius must be at least 1".into()));
    }
    let n = q.dim();
    let points = check_budget(n, config.box_radius, config.budget)?;
    let (model, scale) = integral_model(q);
    let eval = Evaluator::new(&model, config.box_radius);
    let b = config.box_radius as i64;
    let leads: Vec<i64> = (-b..=b).collect();
    let slices: Vec<Slice> = if config.jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| leads.par_iter().map(|&l| enumerate_slice(&eval, n, b, l)).collect())
    } else {
        leads.iter().map(|&l| enumerate_slice(&eval, n, b, l)).collect()
    };
    // Slices come in increasing order of the first coordinate, so the
    // smallest (value, slice, index) triple holds the lexicographically first witness.
    let mut small: Vec<(i128, usize, u64)> = Vec::new();
    let mut scaled: BTreeMap<BigInt, Vec<i64>> = BTreeMap::new();
    for (k, slice) in slices.into_iter().enumerate() {
        match slice {
            Slice::Small(entries) => small.extend(entries.into_iter().map(|(v, i)| (v, k, i))),
            Slice::Big(entries) => {
                for (v, w) in entries {
                    scaled.entry(v).or_insert(w);
                }
            }
        }
    }
    small.sort_unstable();
    small.dedup_by_key(|e| e.0);
    scaled.extend(
        small
            .into_iter()
            .map(|(v, k, i)| (BigInt::from(v), slice_point(n, b, leads[k], i))),
    );
    Ok(ValueSet { scaled, scale, points })
}

/// Convenience form of [`enumerate_values`] with the default budget.
pub fn enumerate_values_in_box(q: &QuadraticForm, box_radius: u64) -> Result<ValueSet> {
    let config = OracleConfig {
        box_radius,
        precision: 1,
        window: DEFAULT_WINDOW,
        budget: DEFAULT_BUDGET,
        jobs: 1,
    };
    enumerate_values(q, &config)
}

/// `(ν_p(w), unit part of w mod p^k)` for a nonzero integer.
fn cell_of(w: &BigInt, p: Prime, modulus: u64) -> (i64, u64) {
    let (v, unit) = strip_prime(w, p);
    let r = unit.mod_floor(&BigInt::from(modulus)).to_u64().expect("reduced");
    (v, r)
}

/// Quotient cells `(ν, u)` reached by `a/b` for nonzero values `a, b`, with
/// residues mod `modulus`.
fn quotient_cells(values: &ValueSet, p: Prime, modulus: u64) -> Result<(BTreeSet<(i64, u64)>, u64)> {
    let cells: BTreeSet<(i64, u64)> = values.nonzero_scaled().map(|w| cell_of(w, p, modulus)).collect();
    if cells.is_empty() {
        return Err(Error::EmptyQuotientSet);
    }
    let mut out = BTreeSet::new();
    for &(va, ua) in &cells {
        for &(vb, ub) in &cells {
            let inv = inv_mod(ub, modulus).expect("units are invertible");
            out.insert((va - vb, mul_mod(ua, inv, modulus)));
        }
    }
    Ok((out, cells.len() as u64))
}

fn classes_of_cells(cells: &BTreeSet<(i64, u64)>, p: Prime) -> Vec<SquareClass> {
    let found: BTreeSet<SquareClass> = cells
        .iter()
        .map(|&(v, u)| SquareClass::from_parts(p, v, u))
        .collect();
    all_classes(p).into_iter().filter(|c| found.contains(c)).collect()
}

fn hensel_modulus(p: Prime) -> u64 {
    p.power(hensel_precision(p)).expect("p or 8 fits in u64")
}

/// Square classes of the quotients `Q(x)/Q(y)` over the box, in `all_classes` order.
pub fn observed_quotient_classes(q: &QuadraticForm, p: Prime, config: &OracleConfig) -> Result<Vec<SquareClass>> {
    let values = enumerate_values(q, config)?;
    observed_quotient_classes_of(&values, p)
}

pub fn observed_quotient_classes_of(values: &ValueSet, p: Prime) -> Result<Vec<SquareClass>> {
    let (cells, _) = quotient_cells(values, p, hensel_modulus(p))?;
    Ok(classes_of_cells(&cells, p))
}

/// Square classes of the nonzero values `Q(x)` over the box.
pub fn represented_classes_bruteforce(q: &QuadraticForm, p: Prime, config: &OracleConfig) -> Result<Vec<SquareClass>> {
    let values = enumerate_values(q, config)?;
    represented_classes_of(&values, p)
}

pub fn represented_classes_of(values: &ValueSet, p: Prime) -> Result<Vec<SquareClass>> {
    let found: BTreeSet<SquareClass> = values
        .nonzero_scaled()
        .map(|w| square_class(&BigRational::new(w.clone(), values.scale.clone()), p))
        .collect::<Result<_>>()?;
    if found.is_empty() {
        return Err(Error::EmptyQuotientSet);
    }
    Ok(all_classes(p).into_iter().filter(|c| found.contains(c)).collect())
}

/// Finite-precision picture of the quotient set: which balls
/// `p^v·(u + p^k·Z_p)`, `|v| ≤ V`, `u` a unit mod `p^k`, contain a quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub prime: Prime,
    pub box_radius: u64,
    pub precision: u32,
    pub window: i64,
    #[serde(serialize_with = "serialize_classes")]
    pub observed_classes: Vec<SquareClass>,
    #[serde(serialize_with = "serialize_coverage")]
    pub coverage: BTreeMap<(i64, u64), bool>,
    pub counts: SampleCounts,
}

fn serialize_classes<S: serde::Serializer>(classes: &[SquareClass], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(classes.iter().map(|c| c.representative()))
}

#[derive(Serialize)]
struct CellJson {
    v: i64,
    u: u64,
    covered: bool,
}

fn serialize_coverage<S: serde::Serializer>(
    coverage: &BTreeMap<(i64, u64), bool>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(coverage.iter().map(|(&(v, u), &covered)| CellJson { v, u, covered }))
}

impl OracleReport {
    pub fn full_coverage(&self) -> bool {
        self.coverage.values().all(|&c| c)
    }

    pub fn covered_cells(&self) -> usize {
        self.coverage.values().filter(|&&c| c).count()
    }

    pub fn all_classes_observed(&self) -> bool {
        self.observed_classes == all_classes(self.prime)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Enumerates the box and builds the coverage grid for `p`.
pub fn density_report(q: &QuadraticForm, p: Prime, config: &OracleConfig) -> Result<OracleReport> {
    config.validate()?;
    let values = enumerate_values(q, config)?;
    density_report_of(&values, p, config)
}

/// [`density_report`] on an already enumerated value set.
pub fn density_report_of(values: &ValueSet, p: Prime, config: &OracleConfig) -> Result<OracleReport> {
    config.validate()?;
    let cell_modulus = p.power(config.precision)?;
    let fine = p.power(config.precision.max(hensel_precision(p)))?;
    let (cells, value_cells) = quotient_cells(values, p, fine)?;
    let reached: BTreeSet<(i64, u64)> = cells.iter().map(|&(v, u)| (v, u % cell_modulus)).collect();
    let mut coverage = BTreeMap::new();
    for v in -config.window..=config.window {
        for u in (1..cell_modulus).filter(|u| u % p.get() != 0) {
            coverage.insert((v, u), reached.contains(&(v, u)));
        }
    }
    let hensel = hensel_modulus(p);
    let class_cells: BTreeSet<(i64, u64)> = cells.iter().map(|&(v, u)| (v, u % hensel)).collect();
    Ok(OracleReport {
        prime: p,
        box_radius: config.box_radius,
        precision: config.precision,
        window: config.window,
        observed_classes: classes_of_cells(&class_cells, p),
        coverage,
        counts: SampleCounts {
            points: values.points,
            distinct_values: values.len() as u64,
            nonzero_values: values.nonzero_scaled().count() as u64,
            value_cells,
            quotient_cells: cells.len() as u64,
        },
    })
}

/// Square test by exhaustive search of square roots mod `p^k`.
pub fn is_square_bruteforce(x: &BigRational, p: Prime, k: u32) -> Result<bool> {
    let min_k = hensel_precision(p);
    if k < min_k {
        return Err(Error::InvalidParameter(format!(
            "precision k = {k} is below {min_k}, too coarse to decide squares at p = {p}"
        )));
    }
    if valuation(x, p)? % 2 != 0 {
        return Ok(false);
    }
    let m = p.power(k)?;
    let u = unit_residue(x, p, k)?;
    Ok((0..m).any(|y| mul_mod(y, y, m) == u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn form(n: usize, coeffs: &[i64]) -> QuadraticForm {
        let c: Vec<BigRational> = coeffs.iter().map(|&v| rat(v, 1)).collect();
        QuadraticForm::from_upper_triangle(n, &c).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&t| rat(t, 1)).collect()
    }

    fn cfg(prime: u64, b: u64) -> OracleConfig {
        OracleConfig::for_prime(p(prime)).with_box(b)
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_values_in_box(&form(1, &[1]), 2).unwrap().values(), ints(&[0, 1, 4]));
        assert_eq!(enumerate_values_in_box(&form(2, &[0, 1, 0]), 1).unwrap().values(), ints(&[-1, 0, 1]));
        assert_eq!(
            enumerate_values_in_box(&form(2, &[1, 0, 1]), 2).unwrap().values(),
            ints(&[0, 1, 2, 4, 5, 8])
        );
    }

    #[test]
    fn enumerate_keeps_first_witness_and_exact_rationals() {
        let vs = enumerate_values_in_box(&form(2, &[0, 1, 0]), 1).unwrap();
        let w: Vec<Vec<i64>> = vs.iter().map(|(_, w)| w.to_vec()).collect();
        assert_eq!(w, vec![vec![-1, 1], vec![-1, 0], vec![-1, -1]]);
        let half = QuadraticForm::from_upper_triangle(2, &[rat(1, 2), rat(1, 3), rat(0, 1)]).unwrap();
        for (v, x) in enumerate_values_in_box(&half, 3).unwrap().iter() {
            assert_eq!(v, half.evaluate_integers(x).unwrap());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let q = form(3, &[1, 0, 0, 1, 0, 1]);
        let config = OracleConfig {
            budget: 1000,
            ..cfg(3, 10)
        };
        assert_eq!(
            enumerate_values(&q, &config),
            Err(Error::BudgetExceeded {
                points: 9261,
                budget: 1000
            })
        );
    }

    #[test]
    fn parallel_enumeration_matches_serial() {
        let q = form(3, &[2, -3, 1, 5, 0, -7]);
        let serial = enumerate_values(&q, &cfg(5, 6)).unwrap();
        for jobs in [2, 3, 8] {
            let par = enumerate_values(&q, &OracleConfig { jobs, ..cfg(5, 6) }).unwrap();
            assert_eq!(par, serial);
        }
    }

    #[test]
    fn observed_classes_examples() {
        for prime in [2, 3, 5, 7] {
            assert_eq!(
                observed_quotient_classes(&form(1, &[1]), p(prime), &cfg(prime, 3)).unwrap(),
                vec![SquareClass::identity(p(prime))]
            );
        }
        let sum2 = form(2, &[1, 0, 1]);
        assert_eq!(observed_quotient_classes(&sum2, p(5), &cfg(5, 10)).unwrap(), all_classes(p(5)));
        assert_eq!(observed_quotient_classes(&sum2, p(3), &cfg(3, 20)).unwrap().len(), 2);
    }

    #[test]
    fn empty_quotient_set() {
        let xy = form(2, &[0, 1, 0]);
        let vs = ValueSet {
            scaled: [(BigInt::zero(), vec![0, 0])].into_iter().collect(),
            scale: BigInt::one(),
            points: 1,
        };
        assert_eq!(observed_quotient_classes_of(&vs, p(3)), Err(Error::EmptyQuotientSet));
        assert_eq!(represented_classes_of(&vs, p(3)), Err(Error::EmptyQuotientSet));
        assert!(observed_quotient_classes(&xy, p(3), &cfg(3, 1)).is_ok());
    }

    #[test]
    fn density_report_examples() {
        let xy = form(2, &[0, 1, 0]);
        let r = density_report(&xy, p(2), &OracleConfig { precision: 3, window: 2, ..cfg(2, 16) }).unwrap();
        assert!(r.full_coverage());
        assert_eq!(r.coverage.len(), 5 * 4);

        let sq = form(1, &[1]);
        let r = density_report(&sq, p(3), &OracleConfig { precision: 1, window: 1, ..cfg(3, 30) }).unwrap();
        let covered: Vec<(i64, u64)> = r.coverage.iter().filter(|(_, &c)| c).map(|(&k, _)| k).collect();
        assert_eq!(covered, vec![(0, 1)]);

        let sum2 = form(2, &[1, 0, 1]);
        let r = density_report(&sum2, p(2), &OracleConfig { precision: 3, window: 2, ..cfg(2, 30) }).unwrap();
        assert!(!r.full_coverage());
        assert!(!r.all_classes_observed());
    }

    #[test]
    fn is_square_bruteforce_examples() {
        assert!(is_square_bruteforce(&rat(17, 1), p(2), 3).unwrap());
        assert!(!is_square_bruteforce(&rat(5, 1), p(2), 3).unwrap());
        assert!(is_square_bruteforce(&rat(4, 1), p(7), 1).unwrap());
        assert!(!is_square_bruteforce(&rat(7, 1), p(7), 1).unwrap());
        assert!(is_square_bruteforce(&rat(1, 1), p(2), 2).is_err());
    }

    #[test]
    fn represented_bruteforce_examples() {
        for prime in [2, 3, 5] {
            assert_eq!(
                represented_classes_bruteforce(&form(1, &[1]), p(prime), &cfg(prime, 5)).unwrap(),
                vec![SquareClass::identity(p(prime))]
            );
        }
        let reps: Vec<u64> = represented_classes_bruteforce(&form(2, &[1, 0, 1]), p(2), &cfg(2, 20))
            .unwrap()
            .iter()
            .map(|c| c.representative())
            .collect();
        assert_eq!(reps, vec![1, 5, 2, 10]);
    }
}
