//! Radial weights on the unit disk or the plane.
//!
//! Three families are supported:
//!
//! * the Mittag-Leffler family `W(r) = r^n exp(-α r^{2m}) / (2π)` on the plane,
//! * the truncated disk family `ν_q(r) = min(q, 1/r²)` on the unit disk,
//! * tabulated radial profiles, interpolated linearly in log-density.
//!
//! Specs serialize to a flat JSON object with a `family` tag and an optional
//! `domain` object; a missing domain takes the family's natural default.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for deciding that the order parameter `m` is an integer.
pub const INTEGER_M_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawDomain")]
pub enum DomainSpec {
    Disk { radius: f64 },
    Plane,
}

// serde ignores `deny_unknown_fields` on unit variants of tagged enums, so
// `{"kind":"plane","radius":1}` needs an explicit check.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    kind: String,
    radius: Option<f64>,
}

impl TryFrom<RawDomain> for DomainSpec {
    type Error = String;

    fn try_from(raw: RawDomain) -> std::result::Result<Self, String> {
        match (raw.kind.as_str(), raw.radius) {
            ("disk", Some(radius)) => Ok(DomainSpec::Disk { radius }),
            ("disk", None) => Err("disk domain needs a radius".into()),
            ("plane", None) => Ok(DomainSpec::Plane),
            ("plane", Some(_)) => Err("plane domain takes no radius".into()),
            (other, _) => Err(format!("unknown domain kind {other:?}")),
        }
    }
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk { radius: 1.0 }
    }

    /// Radius of the domain, `+∞` for the plane.
    pub fn radius(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } => radius,
            DomainSpec::Plane => f64::INFINITY,
        }
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        r >= 0.0 && r < self.radius()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLWeightParams {
    pub n: f64,
    pub alpha: f64,
    pub m: f64,
}

impl MLWeightParams {
    pub fn new(n: f64, alpha: f64, m: f64) -> Self {
        Self { n, alpha, m }
    }

    /// `m` within [`INTEGER_M_TOL`] of an integer. The infinitely-many-zeros
    /// guarantee does not apply to such weights.
    pub fn integer_m(&self) -> bool {
        (self.m - self.m.round()).abs() < INTEGER_M_TOL
    }

    pub fn check(&self) -> Result<()> {
        let report = validate_ml(self);
        if report.admissible {
            Ok(())
        } else {
            Err(Error::InvalidParameter(report.issues.join("; ")))
        }
    }

    /// ln W(r) at r > 0.
    pub fn ln_density(&self, r: f64) -> f64 {
        self.n * r.ln() - self.alpha * r.powf(2.0 * self.m) - (2.0 * PI).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedDiskWeightParams {
    pub q: f64,
}

impl TruncatedDiskWeightParams {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation level q must be a finite real >= 1, got {q}"
            )));
        }
        Ok(Self { q })
    }

    /// Radius at which `min(q, 1/r²)` switches branches.
    pub fn kink(&self) -> f64 {
        self.q.sqrt().recip()
    }

    pub fn density(&self, r: f64) -> f64 {
        if r * r * self.q <= 1.0 {
            self.q
        } else {
            1.0 / (r * r)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRadialWeight {
    samples: Vec<(f64, f64)>,
}

impl TabulatedRadialWeight {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(
                "a tabulated weight needs at least two samples".into(),
            ));
        }
        for (i, &(r, w)) in samples.iter().enumerate() {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::InvalidParameter(format!("sample {i}: bad radius {r}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sample {i}: density must be positive and finite, got {w}"
                )));
            }
            if i > 0 && r <= samples[i - 1].0 {
                return Err(Error::InvalidParameter(format!(
                    "sample radii must be strictly increasing (sample {i})"
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Piecewise-linear interpolation of ln w, held constant outside the
    /// sampled range.
    pub fn ln_density(&self, r: f64) -> f64 {
        let s = &self.samples;
        if r <= s[0].0 {
            return s[0].1.ln();
        }
        let last = s[s.len() - 1];
        if r >= last.0 {
            return last.1.ln();
        }
        let idx = s.partition_point(|&(ri, _)| ri <= r);
        let (r0, w0) = s[idx - 1];
        let (r1, w1) = s[idx];
        let t = (r - r0) / (r1 - r0);
        (1.0 - t) * w0.ln() + t * w1.ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    MittagLeffler(MLWeightParams),
    TruncatedDisk(TruncatedDiskWeightParams),
    Tabulated(TabulatedRadialWeight),
}

/// A radial weight together with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWeightSpec {
    pub family: WeightFamily,
    pub domain: DomainSpec,
}

impl RadialWeightSpec {
    pub fn mittag_leffler(n: f64, alpha: f64, m: f64) -> Self {
        Self {
            family: WeightFamily::MittagLeffler(MLWeightParams::new(n, alpha, m)),
            domain: DomainSpec::Plane,
        }
    }

    pub fn truncated_disk(q: f64) -> Result<Self> {
        Ok(Self {
            family: WeightFamily::TruncatedDisk(TruncatedDiskWeightParams::new(q)?),
            domain: DomainSpec::unit_disk(),
        })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, radius: f64) -> Result<Self> {
        Ok(Self {
            family: WeightFamily::Tabulated(TabulatedRadialWeight::new(samples)?),
            domain: DomainSpec::Disk { radius },
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawWeight = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawWeight::from(self)).expect("weight specs always serialize")
    }

    pub fn ml_params(&self) -> Option<&MLWeightParams> {
        match &self.family {
            WeightFamily::MittagLeffler(p) => Some(p),
            _ => None,
        }
    }

    /// ln of the density at radius r > 0 (no domain check).
    pub(crate) fn ln_density(&self, r: f64) -> f64 {
        match &self.family {
            WeightFamily::MittagLeffler(p) => p.ln_density(r),
            WeightFamily::TruncatedDisk(p) => p.density(r).ln(),
            WeightFamily::Tabulated(t) => t.ln_density(r),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<DomainSpec>,
}

impl RawWeight {
    fn only(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("n", self.n.is_some()),
            ("alpha", self.alpha.is_some()),
            ("m", self.m.is_some()),
            ("q", self.q.is_some()),
            ("samples", self.samples.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(Error::Parse(format!(
                    "field `{name}` is not valid for family `{}`",
                    self.family
                )));
            }
        }
        Ok(())
    }
}

fn required(value: Option<f64>, name: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Parse(format!("missing field `{name}`")))
}

impl TryFrom<RawWeight> for RadialWeightSpec {
    type Error = Error;

    fn try_from(raw: RawWeight) -> Result<Self> {
        let spec = match raw.family.as_str() {
            "mittag_leffler" => {
                raw.only(&["n", "alpha", "m"])?;
                let params = MLWeightParams::new(
                    required(raw.n, "n")?,
                    required(raw.alpha, "alpha")?,
                    required(raw.m, "m")?,
                );
                RadialWeightSpec {
                    family: WeightFamily::MittagLeffler(params),
                    domain: raw.domain.unwrap_or(DomainSpec::Plane),
                }
            }
            "truncated_disk" => {
                raw.only(&["q"])?;
                let params = TruncatedDiskWeightParams::new(required(raw.q, "q")?)?;
                RadialWeightSpec {
                    family: WeightFamily::TruncatedDisk(params),
                    domain: raw.domain.unwrap_or_else(DomainSpec::unit_disk),
                }
            }
            "tabulated" => {
                raw.only(&["samples"])?;
                let samples: Vec<(f64, f64)> = raw
                    .samples
                    .ok_or_else(|| Error::Parse("missing field `samples`".into()))?
                    .into_iter()
                    .map(|[r, w]| (r, w))
                    .collect();
                let table = TabulatedRadialWeight::new(samples)?;
                let outer = table.samples().last().map(|s| s.0).unwrap_or(1.0);
                RadialWeightSpec {
                    family: WeightFamily::Tabulated(table),
                    domain: raw.domain.unwrap_or(DomainSpec::Disk { radius: outer }),
                }
            }
            other => return Err(Error::Parse(format!("unknown weight family `{other}`"))),
        };
        Ok(spec)
    }
}

impl From<&RadialWeightSpec> for RawWeight {
    fn from(spec: &RadialWeightSpec) -> Self {
        let mut raw = RawWeight {
            family: String::new(),
            n: None,
            alpha: None,
            m: None,
            q: None,
            samples: None,
            domain: Some(spec.domain),
        };
        match &spec.family {
            WeightFamily::MittagLeffler(p) => {
                raw.family = "mittag_leffler".into();
                raw.n = Some(p.n);
                raw.alpha = Some(p.alpha);
                raw.m = Some(p.m);
            }
            WeightFamily::TruncatedDisk(p) => {
                raw.family = "truncated_disk".into();
                raw.q = Some(p.q);
            }
            WeightFamily::Tabulated(t) => {
                raw.family = "tabulated".into();
                raw.samples = Some(t.samples().iter().map(|&(r, w)| [r, w]).collect());
            }
        }
        raw
    }
}

impl Serialize for RadialWeightSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawWeight::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RadialWeightSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawWeight::deserialize(deserializer)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

/// Density at radius `r`.
///
/// At `r = 0` a Mittag-Leffler weight with `n < 0` is unbounded; the result
/// is then `f64::INFINITY` rather than an error.
pub fn weight_value(spec: &RadialWeightSpec, r: f64) -> Result<f64> {
    if !spec.domain.contains_radius(r) {
        return Err(Error::Domain(format!(
            "radius {r} is outside the domain (radius {})",
            spec.domain.radius()
        )));
    }
    let value = match &spec.family {
        WeightFamily::MittagLeffler(p) => {
            if r == 0.0 {
                match p.n.partial_cmp(&0.0) {
                    Some(std::cmp::Ordering::Less) => f64::INFINITY,
                    Some(std::cmp::Ordering::Equal) => 1.0 / (2.0 * PI),
                    _ => 0.0,
                }
            } else {
                r.powf(p.n) * (-p.alpha * r.powf(2.0 * p.m)).exp() / (2.0 * PI)
            }
        }
        WeightFamily::TruncatedDisk(p) => p.density(r),
        WeightFamily::Tabulated(t) => t.ln_density(r).exp(),
    };
    Ok(value)
}

/// Outcome of [`validate`]. Failures are carried in `issues`, never raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub admissible: bool,
    /// Exponent c > 0 for which W^{-c} is locally integrable.
    pub c_exponent: Option<f64>,
    pub integer_m: bool,
    pub issues: Vec<String>,
}

fn validate_ml(p: &MLWeightParams) -> ValidationReport {
    let mut issues = Vec::new();
    if !p.n.is_finite() || p.n <= -2.0 {
        issues.push(format!(
            "n = {} must exceed -2 (the zeroth moment diverges at the origin)",
            p.n
        ));
    }
    if !(p.alpha.is_finite() && p.alpha > 0.0) {
        issues.push(format!("alpha = {} must be positive", p.alpha));
    }
    if !(p.m.is_finite() && p.m > 0.0) {
        issues.push(format!("m = {} must be positive", p.m));
    }
    let admissible = issues.is_empty();
    let integer_m = p.m.is_finite() && p.integer_m();
    if admissible && integer_m {
        issues.push(format!(
            "m = {} is an integer: the kernel need not have infinitely many zeros",
            p.m
        ));
    }
    ValidationReport {
        admissible,
        c_exponent: admissible.then(|| if p.n > 0.0 { 1.0 / p.n } else { 1.0 }),
        integer_m,
        issues,
    }
}

/// Admissibility check via local integrability of `W^{-c}`.
pub fn validate(spec: &RadialWeightSpec) -> ValidationReport {
    let mut report = match &spec.family {
        WeightFamily::MittagLeffler(p) => validate_ml(p),
        WeightFamily::TruncatedDisk(p) => {
            let mut issues = Vec::new();
            if !(p.q.is_finite() && p.q >= 1.0) {
                issues.push(format!("q = {} must be >= 1", p.q));
            }
            if spec.domain != DomainSpec::unit_disk() {
                issues.push("the truncated family lives on the unit disk".into());
            }
            let admissible = issues.is_empty();
            ValidationReport {
                admissible,
                // bounded above and below on the disk
                c_exponent: admissible.then_some(1.0),
                integer_m: false,
                issues,
            }
        }
        WeightFamily::Tabulated(_) => {
            let mut issues = Vec::new();
            if spec.domain == DomainSpec::Plane {
                issues.push("a tabulated weight needs a bounded (disk) domain".into());
            }
            let admissible = issues.is_empty();
            ValidationReport {
                admissible,
                c_exponent: admissible.then_some(1.0),
                integer_m: false,
                issues,
            }
        }
    };
    if let DomainSpec::Disk { radius } = spec.domain {
        if !(radius.is_finite() && radius > 0.0) {
            report.admissible = false;
            report.c_exponent = None;
            report.issues.push(format!("disk radius {radius} must be positive"));
        }
    }
    report
}

/// Validation as a `Result`, for callers that cannot proceed otherwise.
pub fn ensure_admissible(spec: &RadialWeightSpec) -> Result<ValidationReport> {
    let report = validate(spec);
    if report.admissible {
        Ok(report)
    } else {
        Err(Error::InvalidParameter(report.issues.join("; ")))
    }
}
