//! Weighted Bergman kernels of radial weights.
//!
//! A radial weight has orthogonal monomials, so its kernel depends on
//! `s = z·conj(w)` only: `K(z, w) = f(s) = Σ s^k / W_k`. Everything here
//! goes through that scalar profile.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{ml_moment_closed_form, ml_tail_bound_ln, moment_table, MomentSequence, DEFAULT_TABLE_TOL};
use crate::quadrature::{radial_integral, QuadOptions};
use crate::series::{Accuracy, GammaProgression, PowerSeries, ReciprocalMoments, ScaledValue, DEFAULT_MAX_TERMS};
use crate::weights::{ensure_admissible, weight_value, DomainSpec, MLWeightParams, RadialWeightSpec, WeightFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPath {
    Series,
    Closed,
    DiskLimit,
}

/// Moment-table length used when a kernel is built straight from a weight.
///
/// Closed-form tables are cheap, so they are long enough to cover
/// `|s| < 0.99` on the disk; quadrature tables are kept short.
pub fn default_table_len(spec: &RadialWeightSpec) -> usize {
    match (&spec.family, spec.domain) {
        (WeightFamily::MittagLeffler(_), DomainSpec::Plane) => 400,
        (WeightFamily::TruncatedDisk(_), _) => 8000,
        _ => 120,
    }
}

/// One profile evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub value: ScaledValue,
    pub terms: usize,
    /// Certified truncation bound, absolute.
    pub tail_bound: f64,
    pub precision: u32,
}

/// A kernel evaluation at a point pair, in plain numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub value: [f64; 2],
    pub terms: usize,
    pub tail_bound: f64,
    /// Truncation plus rounding.
    pub error_bound: f64,
}

impl KernelEval {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

enum Kind {
    Series {
        moments: MomentSequence,
        series: PowerSeries,
    },
    Closed {
        params: MLWeightParams,
        series: PowerSeries,
        ln_prefactor: f64,
        arg_scale: f64,
    },
    DiskLimit,
}

/// Immutable kernel evaluator; safe to share across threads.
pub struct KernelEvaluator {
    kind: Kind,
    domain: DomainSpec,
}

impl std::fmt::Debug for KernelEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelEvaluator")
            .field("path", &self.path())
            .field("domain", &self.domain)
            .finish()
    }
}

impl KernelEvaluator {
    /// Series path from a moment table.
    pub fn series(moments: MomentSequence) -> Result<Self> {
        let entries = moments.entries();
        if entries.iter().any(|e| !(e.ln_value.is_finite())) {
            return Err(Error::InvalidParameter(
                "series kernel needs finite positive moments".into(),
            ));
        }
        let coeffs = ReciprocalMoments::new(
            entries.iter().map(|e| e.ln_value).collect(),
            entries.iter().map(|e| e.rel_error).collect(),
        )?;
        let domain = moments.weight().domain;
        Ok(Self {
            kind: Kind::Series {
                series: PowerSeries::new(Arc::new(coeffs), DEFAULT_MAX_TERMS),
                moments,
            },
            domain,
        })
    }

    /// Closed Mittag-Leffler form
    /// `K = 2m·α^{(2+n)/(2m)}·E_{1/m,(2+n)/(2m)}(α^{1/m}·s)`.
    pub fn closed(params: MLWeightParams) -> Result<Self> {
        ensure_admissible(&RadialWeightSpec::mittag_leffler(params.n, params.alpha, params.m))?;
        // The coefficients 1/Γ((2k+2+n)/(2m)) are built from the exact inputs.
        let coeffs = GammaProgression::new(2.0 + params.n, 2.0, 2.0 * params.m)?;
        let ln_prefactor = (2.0 * params.m).ln() + (2.0 + params.n) / (2.0 * params.m) * params.alpha.ln();
        Ok(Self {
            kind: Kind::Closed {
                params,
                series: PowerSeries::new(Arc::new(coeffs), DEFAULT_MAX_TERMS),
                ln_prefactor,
                arg_scale: params.alpha.powf(1.0 / params.m),
            },
            domain: DomainSpec::Plane,
        })
    }

    /// The exact limit kernel `s/(π(1−s)²)` on the unit disk.
    pub fn disk_limit() -> Self {
        Self {
            kind: Kind::DiskLimit,
            domain: DomainSpec::unit_disk(),
        }
    }

    /// Kernel of a weight: closed form for Mittag-Leffler weights on the
    /// plane unless `path` asks for the series, otherwise a moment table.
    pub fn for_weight(spec: &RadialWeightSpec, path: Option<KernelPath>) -> Result<Self> {
        let want_closed = matches!(path, Some(KernelPath::Closed))
            || (path.is_none() && spec.ml_params().is_some() && spec.domain == DomainSpec::Plane);
        match path {
            Some(KernelPath::DiskLimit) => return Ok(Self::disk_limit()),
            _ if want_closed => {
                let Some(p) = spec.ml_params().filter(|_| spec.domain == DomainSpec::Plane) else {
                    return Err(Error::InvalidParameter(
                        "the closed kernel form needs a Mittag-Leffler weight on the plane".into(),
                    ));
                };
                return Self::closed(*p);
            }
            _ => {}
        }
        Self::series(moment_table(spec, default_table_len(spec) - 1, DEFAULT_TABLE_TOL)?)
    }

    pub fn path(&self) -> KernelPath {
        match self.kind {
            Kind::Series { .. } => KernelPath::Series,
            Kind::Closed { .. } => KernelPath::Closed,
            Kind::DiskLimit => KernelPath::DiskLimit,
        }
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn moments(&self) -> Option<&MomentSequence> {
        match &self.kind {
            Kind::Series { moments, .. } => Some(moments),
            _ => None,
        }
    }

    pub fn ml_params(&self) -> Option<MLWeightParams> {
        match &self.kind {
            Kind::Closed { params, .. } => Some(*params),
            _ => None,
        }
    }

    /// `ln(1/W_0)`, the profile value at the origin.
    pub fn ln_origin_value(&self) -> f64 {
        match &self.kind {
            Kind::Series { moments, .. } => -moments.entries()[0].ln_value,
            Kind::Closed {
                series, ln_prefactor, ..
            } => ln_prefactor + series.ln_coeff(0),
            Kind::DiskLimit => f64::NEG_INFINITY,
        }
    }

    /// Index of the dominant series term on |s| = radius.
    pub fn peak_index(&self, radius: f64) -> usize {
        match &self.kind {
            Kind::Series { series, .. } => series.peak_index(radius),
            Kind::Closed { series, arg_scale, .. } => series.peak_index(radius * arg_scale),
            Kind::DiskLimit => (1.0 / (1.0 - radius.min(0.999_999))).ceil() as usize,
        }
    }

    /// Profile samples `f(radius·e^{2πij/n})`, `j < n`, resolved down to
    /// `e^{ln_floor}`, from one high-precision transform. `None` when the
    /// path has no such fast route.
    pub fn circle_samples(&self, radius: f64, n: usize, ln_floor: f64) -> Result<Option<Vec<ScaledValue>>> {
        match &self.kind {
            Kind::Closed {
                series,
                ln_prefactor,
                arg_scale,
                ..
            } => Ok(series
                .circle_samples(radius * arg_scale, n, ln_floor - ln_prefactor)?
                .map(|v| v.into_iter().map(|x| x.scale_by(*ln_prefactor)).collect())),
            _ => Ok(None),
        }
    }

    /// The profile with its truncation certified against `acc` but no
    /// precision escalation on the moment-table path: rounding is reported
    /// in the error instead.
    pub fn profile_double(&self, s: Complex64, acc: Accuracy) -> Result<ProfileEval> {
        self.profile_impl(s, acc, true)
    }

    /// The profile `f(s)` to the requested accuracy.
    pub fn profile(&self, s: Complex64, acc: Accuracy) -> Result<ProfileEval> {
        self.profile_impl(s, acc, false)
    }

    fn profile_impl(&self, s: Complex64, acc: Accuracy, tail_only: bool) -> Result<ProfileEval> {
        match &self.kind {
            Kind::Series { series, .. } => {
                if let DomainSpec::Disk { radius } = self.domain {
                    if s.norm() >= radius * radius {
                        return Err(Error::Domain(format!(
                            "|s| = {} is outside the bidisk of radius {radius}",
                            s.norm()
                        )));
                    }
                }
                let r = if tail_only {
                    series.eval_double(s, acc)?
                } else {
                    series.eval(s, acc)?
                };
                Ok(ProfileEval {
                    value: r.value,
                    terms: r.terms,
                    tail_bound: r.tail_bound * r.value.ln_scale.exp(),
                    precision: r.precision,
                })
            }
            Kind::Closed {
                series,
                ln_prefactor,
                arg_scale,
                ..
            } => {
                let inner = Accuracy::either(acc.rel, acc.ln_abs - ln_prefactor);
                let r = series.eval(s * *arg_scale, inner)?;
                let value = r.value.scale_by(*ln_prefactor);
                Ok(ProfileEval {
                    value,
                    terms: r.terms,
                    tail_bound: r.tail_bound * value.ln_scale.exp(),
                    precision: r.precision,
                })
            }
            Kind::DiskLimit => {
                if s.norm() >= 1.0 {
                    return Err(Error::Domain(format!("|s| = {} is outside the unit bidisk", s.norm())));
                }
                let one_minus = Complex64::new(1.0, 0.0) - s;
                let v = s / (PI * one_minus * one_minus);
                Ok(ProfileEval {
                    value: ScaledValue {
                        mantissa: v,
                        ln_scale: 0.0,
                        error: 8.0 * f64::EPSILON * v.norm(),
                    },
                    terms: 0,
                    tail_bound: 0.0,
                    precision: 53,
                })
            }
        }
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite point {z}")));
        }
        if let DomainSpec::Disk { radius } = self.domain {
            if z.norm() >= radius {
                return Err(Error::Domain(format!(
                    "point {z} lies outside the disk of radius {radius}"
                )));
            }
        }
        Ok(())
    }

    /// `K(z, w)` with truncation error below `tol`.
    ///
    /// The moment-table path certifies its tail against `tol` and reports
    /// the rounding bound alongside; the closed path escalates precision
    /// until the total error is below `tol`.
    pub fn eval(&self, z: Complex64, w: Complex64, tol: f64) -> Result<KernelEval> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        self.check_point(z)?;
        self.check_point(w)?;
        let s = z * w.conj();
        let tail_only = matches!(self.kind, Kind::Series { .. });
        let r = self.profile_impl(s, Accuracy::absolute(tol), tail_only)?;
        let v = r.value.value();
        Ok(KernelEval {
            value: [v.re, v.im],
            terms: r.terms,
            tail_bound: r.tail_bound,
            error_bound: r.value.abs_error(),
        })
    }
}

/// `K(z, w)` along the moment-series path.
pub fn kernel_eval_series(ev: &KernelEvaluator, z: Complex64, w: Complex64, tol: f64) -> Result<KernelEval> {
    if ev.path() != KernelPath::Series {
        return Err(Error::InvalidParameter(
            "evaluator is not a moment-series kernel".into(),
        ));
    }
    ev.eval(z, w, tol)
}

/// `K(z, w)` through the Mittag-Leffler closed form.
pub fn kernel_eval_closed(params: &MLWeightParams, z: Complex64, w: Complex64, tol: f64) -> Result<KernelEval> {
    KernelEvaluator::closed(*params)?.eval(z, w, tol)
}

/// The limit kernel `z·conj(w) / (π(1 − z·conj(w))²)` of the truncated disk
/// weights `min(q, 1/r²)` as `q → ∞`.
pub fn limit_disk_kernel(z: Complex64, w: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::Domain(format!("({z}, {w}) is outside the unit bidisk")));
    }
    let s = z * w.conj();
    let one_minus = Complex64::new(1.0, 0.0) - s;
    Ok(s / (PI * one_minus * one_minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub residual: f64,
    pub integral: [f64; 2],
    pub expected: [f64; 2],
    pub quadrature_error: f64,
    pub angular_nodes: usize,
    pub radial_cutoff: f64,
}

fn horner(poly: &[Complex64], z: Complex64) -> Complex64 {
    poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Checks `p(z) = ∫ p(ζ)·conj(K(ζ, z))·W(|ζ|) dA(ζ)` by polar tensor
/// quadrature: trapezoid in angle, adaptive in radius. Returns the report;
/// the residual is `|integral − p(z)|`.
pub fn reproduce_check(
    ev: &KernelEvaluator,
    weight: &RadialWeightSpec,
    poly: &[Complex64],
    z: Complex64,
    quad_tol: f64,
) -> Result<ReproduceReport> {
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {quad_tol}"
        )));
    }
    if poly.is_empty() {
        return Err(Error::InvalidParameter("polynomial has no coefficients".into()));
    }
    let deg = poly.len() - 1;
    if let Some(m) = ev.moments() {
        if deg > m.k_max() {
            return Err(Error::InvalidParameter(format!(
                "polynomial degree {deg} exceeds the moment table (k_max = {})",
                m.k_max()
            )));
        }
    }
    ensure_admissible(weight)?;
    if !weight.domain.contains_radius(z.norm()) {
        return Err(Error::Domain(format!("point {z} lies outside the weight's domain")));
    }
    ev.check_point(z)?;

    let (cutoff, breakpoints, first_panel) = match (&weight.family, weight.domain) {
        (WeightFamily::MittagLeffler(p), DomainSpec::Plane) => {
            let r = plane_cutoff(p, poly, z, 0.01 * quad_tol)?;
            (r, vec![0.125 * r, 0.25 * r, 0.5 * r], (0.125 * r).min(1.0))
        }
        (WeightFamily::TruncatedDisk(p), DomainSpec::Disk { radius }) => {
            let kink = p.kink().min(radius);
            (radius, vec![kink], 0.5 * kink)
        }
        (_, domain) => {
            let r = domain.radius();
            (r, vec![], 0.5 * r)
        }
    };

    // Harmonics present: p up to deg, conj(K) truncated where its tail is
    // negligible. A trapezoid rule with more nodes than the total degree
    // integrates them exactly.
    let kernel_acc = Accuracy::either(1e-15, (1e-4 * quad_tol).ln());
    let k_trunc = ev
        .profile_double(Complex64::new(cutoff * z.norm(), 0.0) * 0.999_999_999, kernel_acc)?
        .terms;
    let nodes = 4 * (deg + k_trunc) + 8;
    let angles: Vec<Complex64> = (0..nodes)
        .map(|l| Complex64::from_polar(1.0, 2.0 * PI * l as f64 / nodes as f64))
        .collect();

    let mut failure: Option<Error> = None;
    let mut integrand = |r: f64| -> Complex64 {
        if failure.is_some() {
            return Complex64::new(0.0, 0.0);
        }
        let w = match weight_value(weight, r) {
            Ok(w) => w,
            Err(e) => {
                failure = Some(e);
                return Complex64::new(0.0, 0.0);
            }
        };
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for &u in &angles {
            let zeta = u * r;
            match ev.profile_double(zeta * z.conj(), kernel_acc) {
                Ok(k) => sum += horner(poly, zeta) * k.value.value().conj(),
                Err(e) => {
                    failure = Some(e);
                    return Complex64::new(0.0, 0.0);
                }
            }
        }
        sum * (2.0 * PI / nodes as f64) * (r * w)
    };
    let opts = QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 0.1 * quad_tol,
        max_subdivisions: 4000,
    };
    let result = radial_integral(&mut integrand, first_panel, cutoff, &breakpoints, &opts);
    if let Some(e) = failure {
        return Err(e);
    }
    let result = result?;
    let expected = horner(poly, z);
    Ok(ReproduceReport {
        residual: (result.value - expected).norm(),
        integral: [result.value.re, result.value.im],
        expected: [expected.re, expected.im],
        quadrature_error: result.error,
        angular_nodes: nodes,
        radial_cutoff: cutoff,
    })
}

/// Radius beyond which the plane integral contributes less than `budget`.
///
/// By orthogonality the outer part equals `Σ_j p_j z^j tail_j(R)/W_j`, and
/// each tail has a certified bound.
fn plane_cutoff(p: &MLWeightParams, poly: &[Complex64], z: Complex64, budget: f64) -> Result<f64> {
    let outer = |r: f64| -> Result<f64> {
        let mut total = 0.0;
        for (j, c) in poly.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let w = ml_moment_closed_form(p, j)?;
            let ln_term = c.norm().ln() + j as f64 * z.norm().ln() + ml_tail_bound_ln(p, j, r) - w.ln_value;
            total += ln_term.exp();
        }
        Ok(total)
    };
    let mut r = 1.0;
    while outer(r)? >= budget {
        r *= 1.25;
        if r > 1e6 {
            return Err(Error::accuracy("plane reproduce check: no radial cutoff found", None));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cos_kernel() -> KernelEvaluator {
        KernelEvaluator::closed(MLWeightParams::new(-1.0, 1.0, 0.5)).unwrap()
    }

    fn cos_series() -> KernelEvaluator {
        KernelEvaluator::for_weight(
            &RadialWeightSpec::mittag_leffler(-1.0, 1.0, 0.5),
            Some(KernelPath::Series),
        )
        .unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cos_kernel_examples() {
        for ev in [cos_kernel(), cos_series()] {
            let k = ev.eval(c(4.0, 0.0), c(1.0, 0.0), 1e-13).unwrap();
            assert!((k.value[0] - 2f64.cosh()).abs() < 1e-13, "{:?}", ev.path());
            let k = ev.eval(c(1.0, 0.0), c(1.0, 0.0), 1e-13).unwrap();
            assert!((k.value[0] - 1f64.cosh()).abs() < 1e-13);
            assert_eq!(ev.eval(c(0.0, 0.0), c(3.0, 1.0), 1e-13).unwrap().value, [1.0, 0.0]);
            let zero = PI / 2.0;
            let k = ev.eval(c(0.0, zero), c(0.0, -zero), 1e-13).unwrap();
            assert!(k.complex().norm() < 1e-13);
        }
    }

    #[test]
    fn closed_origin_is_leading_coefficient() {
        let p = MLWeightParams::new(0.3, 1.7, 1.5);
        let k = kernel_eval_closed(&p, c(2.0, 1.0), c(0.0, 0.0), 1e-14).unwrap();
        let x = (2.0 + p.n) / (2.0 * p.m);
        let expected = 2.0 * p.m * p.alpha.powf(x) / crate::lgamma::gamma(x);
        assert!((k.value[0] - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn unweighted_disk_kernel() {
        let ev = KernelEvaluator::for_weight(&RadialWeightSpec::truncated_disk(1.0).unwrap(), None).unwrap();
        let k = ev.eval(c(0.0, 0.0), c(0.0, 0.0), 1e-14).unwrap();
        assert!((k.value[0] - 1.0 / PI).abs() < 1e-15);
        let (z, w) = (c(0.3, 0.4), c(-0.5, 0.2));
        let s = z * w.conj();
        let exact = 1.0 / (PI * (1.0 - s) * (1.0 - s));
        assert!((ev.eval(z, w, 1e-13).unwrap().complex() - exact).norm() < 1e-13);
        assert!(ev.eval(c(1.0, 0.0), c(0.1, 0.0), 1e-10).unwrap_err().is_validation());
    }

    #[test]
    fn limit_kernel_values() {
        assert_eq!(limit_disk_kernel(c(0.0, 0.0), c(0.7, 0.1)).unwrap(), c(0.0, 0.0));
        let v = limit_disk_kernel(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v.re - 4.0 / (9.0 * PI)).abs() < 1e-16);
        let v = limit_disk_kernel(c(0.5, 0.0), c(-0.5, 0.0)).unwrap();
        assert!((v.re + 4.0 / (25.0 * PI)).abs() < 1e-16);
        assert!(limit_disk_kernel(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn limit_kernel_matches_its_series() {
        // Σ_{k≥1} (k/π) s^k, summed directly
        let s = c(0.3, -0.2);
        let mut sum = c(0.0, 0.0);
        let mut p = s;
        for k in 1..400 {
            sum += p * (k as f64 / PI);
            p *= s;
        }
        let v = limit_disk_kernel(s, c(1.0, 0.0) * 0.999_999_999_999).unwrap();
        assert!((v - sum).norm() < 1e-12);
    }

    #[test]
    fn reproduce_constants_on_the_disk() {
        let w = RadialWeightSpec::truncated_disk(1.0).unwrap();
        let ev = KernelEvaluator::for_weight(&w, None).unwrap();
        let r = reproduce_check(&ev, &w, &[c(1.0, 0.0)], c(0.3, 0.0), 1e-8).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn reproduce_on_the_plane() {
        let w = RadialWeightSpec::mittag_leffler(-1.0, 1.0, 0.5);
        let ev = cos_kernel();
        let p = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let r = reproduce_check(&ev, &w, &p, c(1.0, 0.0), 1e-8).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn reproduce_monomial_truncated_q100() {
        let w = RadialWeightSpec::truncated_disk(100.0).unwrap();
        let ev = KernelEvaluator::for_weight(&w, None).unwrap();
        let r = reproduce_check(&ev, &w, &[c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.4), 1e-8).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    fn point(max: f64) -> impl Strategy<Value = Complex64> {
        (0.0..max, 0.0..(2.0 * PI)).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn hermitian_and_rotation_invariant(z in point(3.0), w in point(3.0), theta in 0.0..(2.0 * PI)) {
            let ev = cos_kernel();
            let a = ev.eval(z, w, 1e-13).unwrap().complex();
            let b = ev.eval(w, z, 1e-13).unwrap().complex();
            prop_assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
            let u = Complex64::from_polar(1.0, theta);
            let r = ev.eval(u * z, u * w, 1e-13).unwrap().complex();
            prop_assert!((a - r).norm() < 1e-12 * a.norm().max(1.0));
        }

        #[test]
        fn diagonal_dominates_origin(z in point(0.95)) {
            let w = RadialWeightSpec::truncated_disk(10.0).unwrap();
            let ev = KernelEvaluator::for_weight(&w, None).unwrap();
            let k = ev.eval(z, z, 1e-12).unwrap();
            prop_assert!(k.value[0] >= ev.ln_origin_value().exp() * (1.0 - 1e-15));
            prop_assert!(k.value[1].abs() < 1e-12 * k.value[0]);
        }

        #[test]
        fn cosh_identity(s in point(25.0)) {
            for ev in [cos_kernel(), cos_series()] {
                let k = ev.eval(s, Complex64::new(1.0, 0.0), 1e-13).unwrap().complex();
                prop_assert!((k - s.sqrt().cosh()).norm() < 1e-12);
            }
        }
    }
}
