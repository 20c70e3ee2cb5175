//! Moment sequences `W_k = 2π ∫ r^{2k+1} W(r) dr` of radial weights.
//!
//! Closed forms exist for the Mittag-Leffler family on the plane and the
//! truncated disk family; everything else (and the independent check of the
//! closed forms) goes through adaptive quadrature.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lgamma::{ln_gamma, ln_gamma_abs_error};
use crate::quadrature::{gauss_kronrod, radial_integral, QuadOptions};
use crate::report::{format_f64, to_csv, to_json};
use crate::weights::{ensure_admissible, DomainSpec, MLWeightParams, RadialWeightSpec, WeightFamily};

/// ln of the largest finite double; moments above it are carried in log space.
const LN_MAX_FINITE: f64 = 709.782_712_893_384;

/// Default relative tolerance for production moment tables.
pub const DEFAULT_TABLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
        }
    }
}

/// A positive moment, kept in log space as well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    /// `exp(ln_value)`, or `+∞` when that overflows.
    pub value: f64,
    pub ln_value: f64,
    /// True when `value` overflowed and only `ln_value` is meaningful.
    pub scaled: bool,
    /// Relative accuracy estimate.
    pub rel_error: f64,
}

impl MomentValue {
    fn from_ln(ln_value: f64, rel_error: f64) -> Self {
        let scaled = ln_value > LN_MAX_FINITE;
        Self {
            value: if scaled { f64::INFINITY } else { ln_value.exp() },
            ln_value,
            scaled,
            rel_error,
        }
    }
}

/// `W_k = Γ((2k+2+n)/(2m)) / (2m · α^{(2k+2+n)/(2m)})`, from the substitution
/// `t = α r^{2m}` in `∫₀^∞ r^{2k+1+n} e^{-α r^{2m}} dr`.
pub fn ml_moment_closed_form(params: &MLWeightParams, k: usize) -> Result<MomentValue> {
    params.check()?;
    let x = (2.0 * k as f64 + 2.0 + params.n) / (2.0 * params.m);
    let ln_value = ln_gamma(x) - (2.0 * params.m).ln() - x * params.alpha.ln();
    let rel_error = ln_gamma_abs_error(x) + 4.0 * f64::EPSILON * (1.0 + (x * params.alpha.ln()).abs());
    Ok(MomentValue::from_ln(ln_value, rel_error))
}

/// Moments of `ν_q = min(q, 1/r²)` on the unit disk:
/// `W_0 = π(1 + ln q)` and `W_k = 2π[q^{-k}/(2k+2) + (1 − q^{-k})/(2k)]`.
pub fn truncated_disk_moment(q: f64, k: usize) -> Result<f64> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation level q must be a finite real >= 1, got {q}"
        )));
    }
    if k == 0 {
        return Ok(PI * (1.0 + q.ln()));
    }
    let kf = k as f64;
    let decay = -kf * q.ln();
    Ok(2.0 * PI * (decay.exp() / (2.0 * kf + 2.0) - decay.exp_m1() / (2.0 * kf)))
}

/// Bound on the Mittag-Leffler moment tail `∫_R^∞ r^a e^{-α r^{2m}} dr`
/// (a = 2k+1+n), returned as a logarithm:
/// `e^{-αR^{2m}/2} · ∫₀^∞ r^a e^{-α r^{2m}/2} dr`.
pub fn ml_tail_bound_ln(params: &MLWeightParams, k: usize, radius: f64) -> f64 {
    let a = 2.0 * k as f64 + 1.0 + params.n;
    let x = (a + 1.0) / (2.0 * params.m);
    let half_alpha = 0.5 * params.alpha;
    -half_alpha * radius.powf(2.0 * params.m) + ln_gamma(x) - (2.0 * params.m).ln() - x * half_alpha.ln()
}

/// Smallest radius at which the certified tail is below `exp(ln_target)`.
pub fn ml_tail_radius(params: &MLWeightParams, k: usize, ln_target: f64) -> f64 {
    let full = ml_tail_bound_ln(params, k, 0.0);
    if full <= ln_target {
        return 0.0;
    }
    ((2.0 / params.alpha) * (full - ln_target)).powf(0.5 / params.m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoment {
    pub moment: MomentValue,
    /// Estimated relative error, quadrature and tail combined.
    pub rel_error: f64,
    /// Where a plane integral was cut off, if it was.
    pub tail_radius: Option<f64>,
}

/// The layout of a radial moment integral: first (possibly singular) panel,
/// interior breakpoints, upper limit and a log-scale that keeps the scaled
/// integrand near unity.
struct RadialLayout {
    first_panel_end: f64,
    breakpoints: Vec<f64>,
    end: f64,
    ln_scale: f64,
}

fn ln_moment_integrand(weight: &RadialWeightSpec, k: usize, r: f64) -> f64 {
    (2.0 * PI).ln() + (2.0 * k as f64 + 1.0) * r.ln() + weight.ln_density(r)
}

fn ml_peak(params: &MLWeightParams, k: usize) -> (f64, f64) {
    let a = 2.0 * k as f64 + 1.0 + params.n;
    let scale = params.alpha.powf(-0.5 / params.m);
    let peak = if a > 0.0 {
        scale * (a / (2.0 * params.m)).powf(0.5 / params.m)
    } else {
        0.0
    };
    let width = if a > 0.0 {
        peak / (2.0 * params.m * a).sqrt()
    } else {
        scale
    };
    (peak, width)
}

fn layout(weight: &RadialWeightSpec, k: usize) -> RadialLayout {
    let outer = weight.domain.radius();
    let mut layout = match &weight.family {
        WeightFamily::MittagLeffler(p) => {
            let (peak, width) = ml_peak(p, k);
            let scale = p.alpha.powf(-0.5 / p.m);
            let first = if peak > 0.0 { 0.5 * peak.min(scale) } else { 0.5 * scale };
            let end = outer.min(peak + 12.0 * width + scale);
            let mut breakpoints = vec![];
            if peak > first {
                breakpoints.push(peak);
            }
            let ln_at = if peak > 0.0 { peak } else { first };
            RadialLayout {
                first_panel_end: first,
                breakpoints,
                end,
                ln_scale: ln_moment_integrand(weight, k, ln_at.min(end)),
            }
        }
        WeightFamily::TruncatedDisk(p) => {
            let kink = p.kink();
            RadialLayout {
                first_panel_end: kink,
                breakpoints: vec![kink],
                end: outer,
                ln_scale: 0.0,
            }
        }
        WeightFamily::Tabulated(t) => {
            let radii: Vec<f64> = t
                .samples()
                .iter()
                .map(|s| s.0)
                .filter(|&r| r > 0.0 && r < outer)
                .collect();
            let first = radii.first().copied().unwrap_or(outer);
            RadialLayout {
                first_panel_end: first,
                breakpoints: radii,
                end: outer,
                ln_scale: 0.0,
            }
        }
    };
    if !matches!(weight.family, WeightFamily::MittagLeffler(_)) {
        // largest log-integrand over the panel edges
        layout.ln_scale = layout
            .breakpoints
            .iter()
            .chain(std::iter::once(&outer))
            .map(|&r| ln_moment_integrand(weight, k, r * (1.0 - 1e-12)))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    layout
}

/// `W_k` by adaptive quadrature with relative tolerance `tol`.
///
/// Plane integrals are truncated where the analytic tail bound drops below
/// a tenth of the tolerance times the partial integral.
pub fn quadrature_moment(weight: &RadialWeightSpec, k: usize, tol: f64) -> Result<QuadratureMoment> {
    ensure_admissible(weight)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let lay = layout(weight, k);
    let ln_scale = lay.ln_scale;
    let integrand = |r: f64| (ln_moment_integrand(weight, k, r) - ln_scale).exp();
    let opts = QuadOptions::relative(0.5 * tol);
    let head = radial_integral(integrand, lay.first_panel_end, lay.end, &lay.breakpoints, &opts)?;
    let mut value = head.value;
    let mut error = head.error;
    let mut tail_radius = None;

    if let (WeightFamily::MittagLeffler(p), DomainSpec::Plane) = (&weight.family, weight.domain) {
        let mut upper = lay.end;
        // extend until the certified tail is negligible
        for _ in 0..8 {
            let ln_target = (0.1 * tol * value).ln() + ln_scale;
            if ml_tail_bound_ln(p, k, upper) <= ln_target {
                break;
            }
            let next = ml_tail_radius(p, k, ln_target).max(upper * 1.5);
            let piece = gauss_kronrod(integrand, upper, next, &[], &opts)?;
            value += piece.value;
            error += piece.error;
            upper = next;
        }
        let ln_target = (0.1 * tol * value).ln() + ln_scale;
        let tail_ln = ml_tail_bound_ln(p, k, upper);
        if tail_ln > ln_target {
            return Err(Error::accuracy(
                format!("moment tail for k={k} not certified below tolerance"),
                Some([(value.ln() + ln_scale).exp(), 0.0]),
            ));
        }
        error += (tail_ln - ln_scale).exp();
        tail_radius = Some(upper);
    }

    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::accuracy(
            format!("moment quadrature for k={k} produced {value}"),
            None,
        ));
    }
    let rel_error = error / value;
    Ok(QuadratureMoment {
        moment: MomentValue::from_ln(value.ln() + ln_scale, rel_error),
        rel_error,
        tail_radius,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEntry {
    pub k: usize,
    #[serde(rename = "W_k")]
    pub value: f64,
    #[serde(rename = "log_W_k")]
    pub ln_value: f64,
    pub provenance: Provenance,
    #[serde(skip)]
    pub rel_error: f64,
}

/// `W_0..W_K` for one weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    weight: RadialWeightSpec,
    entries: Vec<MomentEntry>,
}

impl MomentSequence {
    pub fn weight(&self) -> &RadialWeightSpec {
        &self.weight
    }

    pub fn entries(&self) -> &[MomentEntry] {
        &self.entries
    }

    pub fn k_max(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn ln_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.ln_value).collect()
    }

    /// Indices k where `W_k² ≤ W_{k−1} W_{k+1}` fails beyond the combined
    /// accuracy of the three entries.
    pub fn log_convexity_violations(&self) -> Vec<usize> {
        self.entries
            .windows(3)
            .filter(|w| {
                let slack = 2.0 * (w[0].rel_error + 2.0 * w[1].rel_error + w[2].rel_error) + 1e-14;
                2.0 * w[1].ln_value > w[0].ln_value + w[2].ln_value + slack
            })
            .map(|w| w[1].k)
            .collect()
    }

    pub fn is_log_convex(&self) -> bool {
        self.log_convexity_violations().is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        to_csv(
            &["k", "W_k", "log_W_k", "provenance"],
            self.entries.iter().map(|e| {
                vec![
                    e.k.to_string(),
                    format_f64(e.value),
                    format_f64(e.ln_value),
                    e.provenance.as_str().to_string(),
                ]
            }),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(&self.entries)
    }
}

/// Moments up to `k_max`, closed-form where the family has one.
pub fn moment_table(weight: &RadialWeightSpec, k_max: usize, tol: f64) -> Result<MomentSequence> {
    ensure_admissible(weight)?;
    let mut entries = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let (moment, provenance) = match (&weight.family, weight.domain) {
            (WeightFamily::MittagLeffler(p), DomainSpec::Plane) => {
                (ml_moment_closed_form(p, k)?, Provenance::ClosedForm)
            }
            (WeightFamily::TruncatedDisk(p), _) => {
                let v = truncated_disk_moment(p.q, k)?;
                (
                    MomentValue {
                        value: v,
                        ln_value: v.ln(),
                        scaled: false,
                        rel_error: 8.0 * f64::EPSILON,
                    },
                    Provenance::ClosedForm,
                )
            }
            _ => (quadrature_moment(weight, k, tol)?.moment, Provenance::Quadrature),
        };
        entries.push(MomentEntry {
            k,
            value: moment.value,
            ln_value: moment.ln_value,
            provenance,
            rel_error: moment.rel_error,
        });
    }
    Ok(MomentSequence {
        weight: weight.clone(),
        entries,
    })
}
