//! Batch classification over a box of integer coefficients.

use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;

use crate::density::{is_dense, Branch};
use crate::error::{Error, Result};
use crate::form::{represented_classes, upper_triangle_indices, QuadraticForm};
use crate::oracle::{density_report_of, enumerate_values, OracleConfig};
use crate::padic::Prime;

use super::render::{rational_string, representatives};

/// Upper limit on the number of coefficient tuples in one atlas.
pub const MAX_FORMS: u64 = 5_000_000;

#[derive(Debug, Clone)]
pub struct AtlasSpec {
    pub dim: usize,
    pub min: i64,
    pub max: i64,
    pub primes: Vec<Prime>,
    /// Oracle settings for `--verify`; precision is taken per prime.
    pub verify: Option<OracleConfig>,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasRow {
    pub coeffs: Vec<i64>,
    pub p: Prime,
    pub dense: bool,
    pub branch: Branch,
    pub disc: Option<BigRational>,
    pub represented: Vec<u64>,
    pub agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atlas {
    pub dim: usize,
    pub rows: Vec<AtlasRow>,
    pub forms: u64,
    pub singular_skipped: u64,
}

impl Atlas {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| r.agree == Some(false)).count()
    }

    pub fn verified(&self) -> bool {
        self.rows.iter().any(|r| r.agree.is_some())
    }

    pub fn summary(&self) -> String {
        format!(
            "forms={} nonsingular={} singular_skipped={} rows={} disagreements={}",
            self.forms,
            self.forms - self.singular_skipped,
            self.singular_skipped,
            self.rows.len(),
            self.disagreements()
        )
    }
}

fn coefficient_tuple(index: u64, width: usize, min: i64, side: u64) -> Vec<i64> {
    let mut out = vec![0; width];
    let mut code = index;
    for slot in out.iter_mut().rev() {
        *slot = min + (code % side) as i64;
        code /= side;
    }
    out
}

fn rows_for(coeffs: &[i64], spec: &AtlasSpec) -> Result<Option<Vec<AtlasRow>>> {
    let rationals: Vec<BigRational> = coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect();
    let q = match QuadraticForm::from_upper_triangle(spec.dim, &rationals) {
        Ok(q) if q.is_nonsingular() => q,
        Ok(_) | Err(Error::ZeroForm) => return Ok(None),
        Err(e) => return Err(e),
    };
    let values = match &spec.verify {
        Some(config) => Some(enumerate_values(&q, &OracleConfig { jobs: 1, ..config.clone() })?),
        None => None,
    };
    let mut rows = Vec::with_capacity(spec.primes.len());
    for &p in &spec.primes {
        let verdict = is_dense(&q, p)?;
        let agree = match (&values, &spec.verify) {
            (Some(values), Some(config)) => {
                let per_prime = OracleConfig {
                    precision: crate::square_class::hensel_precision(p),
                    ..config.clone()
                };
                Some(density_report_of(values, p, &per_prime)?.full_coverage() == verdict.dense)
            }
            _ => None,
        };
        rows.push(AtlasRow {
            coeffs: coeffs.to_vec(),
            p,
            dense: verdict.dense,
            branch: verdict.branch,
            disc: verdict.witness.map(|w| w.discriminant),
            represented: representatives(&represented_classes(&q, p)?),
            agree,
        });
    }
    Ok(Some(rows))
}

/// Classifies every coefficient tuple in `[min, max]^(n(n+1)/2)` against every
/// prime. Rows come out in lexicographic order of `(coefficients, prime)`
/// whatever the number of jobs.
pub fn build_atlas(spec: &AtlasSpec) -> Result<Atlas> {
    if spec.primes.is_empty() {
        return Err(Error::InvalidParameter("the prime list is empty".into()));
    }
    if spec.dim == 0 || spec.min > spec.max {
        return Err(Error::InvalidParameter("empty coefficient range".into()));
    }
    let mut spec = spec.clone();
    spec.primes.sort_unstable();
    spec.primes.dedup();
    let width = spec.dim * (spec.dim + 1) / 2;
    let side = (spec.max - spec.min) as u64 + 1;
    let forms = (0..width)
        .try_fold(1u64, |acc, _| acc.checked_mul(side))
        .filter(|&f| f <= MAX_FORMS)
        .ok_or_else(|| Error::InvalidParameter(format!("more than {MAX_FORMS} coefficient tuples")))?;

    let work = |i: u64| rows_for(&coefficient_tuple(i, width, spec.min, side), &spec);
    let per_form: Vec<Result<Option<Vec<AtlasRow>>>> = if spec.jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..forms).into_par_iter().map(work).collect())
    } else {
        (0..forms).map(work).collect()
    };

    let mut rows = Vec::new();
    let mut singular_skipped = 0;
    for r in per_form {
        match r? {
            Some(mut form_rows) => rows.append(&mut form_rows),
            None => singular_skipped += 1,
        }
    }
    Ok(Atlas {
        dim: spec.dim,
        rows,
        forms,
        singular_skipped,
    })
}

fn coefficient_names(dim: usize) -> Vec<String> {
    if dim == 2 {
        return vec!["a".into(), "b".into(), "c".into()];
    }
    upper_triangle_indices(dim)
        .map(|(i, j)| format!("c{}{}", i + 1, j + 1))
        .collect()
}

pub fn write_csv<W: Write>(atlas: &Atlas, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = coefficient_names(atlas.dim);
    header.extend(["p", "dense", "branch", "disc"].map(String::from));
    let verified = atlas.verified();
    if verified {
        header.push("agree".into());
    }
    w.write_record(&header)?;
    for row in &atlas.rows {
        let mut rec: Vec<String> = row.coeffs.iter().map(|c| c.to_string()).collect();
        rec.push(row.p.to_string());
        rec.push(row.dense.to_string());
        rec.push(row.branch.to_string());
        rec.push(row.disc.as_ref().map(rational_string).unwrap_or_default());
        if verified {
            rec.push(row.agree.map(|a| a.to_string()).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct RowJson<'a> {
    coeffs: &'a [i64],
    p: u64,
    dense: bool,
    branch: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    disc: Option<String>,
    represented: &'a [u64],
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
}

pub fn to_json(atlas: &Atlas) -> String {
    let rows: Vec<RowJson> = atlas
        .rows
        .iter()
        .map(|r| RowJson {
            coeffs: &r.coeffs,
            p: r.p.get(),
            dense: r.dense,
            branch: r.branch.as_str(),
            disc: r.disc.as_ref().map(rational_string),
            represented: &r.represented,
            agree: r.agree,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}
