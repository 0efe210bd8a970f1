//! Stable JSON documents (`schema: 1`) and their builders.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::density::{Decision, DensityVerdict, Domain, PositivityStatus};
use crate::form::QuadraticForm;
use crate::oracle::OracleReport;
use crate::padic::Prime;
use crate::square_class::SquareClass;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub coeffs: Vec<String>,
}

impl FormJson {
    pub fn of(q: &QuadraticForm) -> Self {
        FormJson {
            n: q.dim(),
            coeffs: q.coefficients().iter().map(rational_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityJson {
    pub domain: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassesJson {
    pub represented: Vec<u64>,
    pub quotient: Vec<u64>,
}

/// `classify` output. `dense` is `null` when positivity over `Nⁿ` is undecided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictJson {
    pub schema: u32,
    pub form: FormJson,
    pub p: u64,
    pub dense: Option<bool>,
    pub branch: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc_unit_residue: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivityJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<ClassesJson>,
}

impl VerdictJson {
    pub fn new(q: &QuadraticForm, p: Prime, verdict: &DensityVerdict) -> Self {
        VerdictJson {
            schema: SCHEMA_VERSION,
            form: FormJson::of(q),
            p: p.get(),
            dense: Some(verdict.dense),
            branch: verdict.branch.as_str().to_string(),
            disc: verdict.witness.as_ref().map(|w| rational_string(&w.discriminant)),
            disc_unit_residue: verdict.witness.as_ref().map(|w| w.unit_residue),
            positivity: None,
            classes: None,
        }
    }

    pub fn with_positivity(mut self, domain: Domain, status: &PositivityStatus, radius: Option<u64>, dense: Decision) -> Self {
        self.positivity = Some(positivity_json(domain, status, radius));
        self.dense = match dense {
            Decision::Yes => Some(true),
            Decision::No => Some(false),
            Decision::Unknown => None,
        };
        self
    }

    pub fn with_classes(mut self, represented: &[SquareClass], quotient: &[SquareClass]) -> Self {
        self.classes = Some(ClassesJson {
            represented: representatives(represented),
            quotient: representatives(quotient),
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

pub fn positivity_json(domain: Domain, status: &PositivityStatus, radius: Option<u64>) -> PositivityJson {
    PositivityJson {
        domain: domain_str(domain).to_string(),
        value: status.value.as_str().to_string(),
        witness: status
            .witness
            .as_ref()
            .map(|w| w.iter().map(|x| x.to_string()).collect()),
        radius,
    }
}

pub fn domain_str(domain: Domain) -> &'static str {
    match domain {
        Domain::Z => "Z",
        Domain::N => "N",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotropyJson {
    pub schema: u32,
    pub form: FormJson,
    pub p: u64,
    pub isotropic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassesDocJson {
    pub schema: u32,
    pub form: FormJson,
    pub p: u64,
    pub classes: ClassesJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct HilbertJson {
    pub schema: u32,
    pub a: String,
    pub b: String,
    pub place: String,
    pub symbol: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleJson<'a> {
    pub schema: u32,
    pub form: FormJson,
    pub p: u64,
    pub dense: bool,
    pub branch: String,
    pub full_coverage: bool,
    pub agree: bool,
    pub report: &'a OracleReport,
}

pub fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn representatives(classes: &[SquareClass]) -> Vec<u64> {
    classes.iter().map(|c| c.representative()).collect()
}

pub fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

/// Text rendering of the oracle coverage grid: one row per valuation, one
/// column per unit residue.
pub fn coverage_grid(report: &OracleReport) -> String {
    let mut units: Vec<u64> = report.coverage.keys().map(|&(_, u)| u).collect();
    units.sort_unstable();
    units.dedup();
    let width = units.iter().map(|u| u.to_string().len()).max().unwrap_or(1).max(1);
    let mut out = format!("{:>5} |", "v\\u");
    for u in &units {
        out.push_str(&format!(" {u:>width$}"));
    }
    out.push('\n');
    for v in -report.window..=report.window {
        out.push_str(&format!("{v:>5} |"));
        for u in &units {
            let mark = if report.coverage.get(&(v, *u)).copied().unwrap_or(false) {
                "#"
            } else {
                "."
            };
            out.push_str(&format!(" {mark:>width$}"));
        }
        out.push('\n');
    }
    out
}
