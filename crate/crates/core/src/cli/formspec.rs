//! Textual form descriptions: a dimension plus comma-separated coefficients of
//! the monomials `X_iX_j`, `i ≤ j`, row-major. Coefficients are integers or
//! `num/den` rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::form::QuadraticForm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSpecError {
    /// 1-based coefficient index, when the error is local to one coefficient.
    pub index: Option<usize>,
    /// 1-based character column in the coefficient string.
    pub column: Option<usize>,
    pub message: String,
    /// The form parsed but is not usable (zero form).
    pub invalid_form: bool,
}

impl fmt::Display for FormSpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.index, self.column) {
            (Some(i), Some(c)) => write!(f, "coefficient {i} (column {c}): {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for FormSpecError {}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `"7"`, `"-3"` or `"num/den"`.
pub fn parse_rational(token: &str) -> Result<BigRational, String> {
    let t = token.trim();
    if t.is_empty() {
        return Err("empty coefficient".into());
    }
    match t.split_once('/') {
        None => parse_int(t)
            .map(BigRational::from_integer)
            .ok_or_else(|| format!("`{t}` is not an integer or num/den rational")),
        Some((num, den)) => {
            let n = parse_int(num.trim()).ok_or_else(|| format!("bad numerator in `{t}`"))?;
            let d = parse_int(den.trim()).ok_or_else(|| format!("bad denominator in `{t}`"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{t}`"));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Splits and parses the coefficient list, reporting the position of the first bad entry.
pub fn parse_coefficients(text: &str) -> Result<Vec<BigRational>, FormSpecError> {
    let mut out = Vec::new();
    let mut column = 1;
    for (i, token) in text.split(',').enumerate() {
        let lead = token.len() - token.trim_start().len();
        match parse_rational(token) {
            Ok(c) => out.push(c),
            Err(message) => {
                return Err(FormSpecError {
                    index: Some(i + 1),
                    column: Some(column + lead),
                    message,
                    invalid_form: false,
                })
            }
        }
        column += token.chars().count() + 1;
    }
    Ok(out)
}

pub fn parse_form(n: usize, text: &str) -> Result<QuadraticForm, FormSpecError> {
    if n == 0 {
        return Err(FormSpecError {
            index: None,
            column: None,
            message: "dimension n must be at least 1".into(),
            invalid_form: false,
        });
    }
    let coeffs = parse_coefficients(text)?;
    let expected = n * (n + 1) / 2;
    if coeffs.len() != expected {
        return Err(FormSpecError {
            index: None,
            column: None,
            message: format!(
                "n = {n} needs {expected} coefficients (monomials X_iX_j with i <= j, row-major), got {}",
                coeffs.len()
            ),
            invalid_form: false,
        });
    }
    QuadraticForm::from_upper_triangle(n, &coeffs).map_err(|e| FormSpecError {
        index: None,
        column: None,
        message: e.to_string(),
        invalid_form: matches!(e, Error::ZeroForm),
    })
}
