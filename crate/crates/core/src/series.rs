//! Certified summation of power series `Σ c_k s^k` with positive, log-concave
//! coefficients.
//!
//! Every kernel profile and Mittag-Leffler function here has this shape. Log-
//! concavity (`c_{k+1}/c_k` nonincreasing) turns any term ratio below one into
//! a geometric majorant for the whole tail, so truncation is certified from
//! the terms themselves.
//!
//! Evaluation first runs in double precision, with terms formed in log-polar
//! form `exp(ln c_k + k ln|s| − L + i k arg s)` and Kahan-compensated. Along
//! directions where the series cancels (the negative real axis of an
//! exponential-type function, say) the terms can exceed the sum by hundreds of
//! orders of magnitude. When the double-precision error bound misses the
//! requested accuracy the sum is redone with MPFR at a precision chosen from
//! that bound, escalating until the target is met.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::lgamma::{ln_gamma, ln_gamma_abs_error};

const EPS: f64 = f64::EPSILON;
/// Working precisions are rounded up to a multiple of this many bits so that
/// cached coefficients are reused and results do not depend on call history.
const PRECISION_QUANTUM: u32 = 256;
pub const MAX_PRECISION_BITS: u32 = 1 << 16;
pub const DEFAULT_MAX_TERMS: usize = 20_000;

/// Requested accuracy: the returned error bound must not exceed
/// `max(exp(ln_abs), rel·|value|)`. The absolute part is a logarithm because
/// the profiles evaluated here routinely exceed the double-precision range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel: f64,
    pub ln_abs: f64,
}

impl Accuracy {
    pub fn absolute(abs: f64) -> Self {
        Self {
            rel: 0.0,
            ln_abs: abs.ln(),
        }
    }

    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            ln_abs: f64::NEG_INFINITY,
        }
    }

    /// Absolute tolerance `exp(ln_abs)` or relative `rel`, whichever is looser.
    pub fn either(rel: f64, ln_abs: f64) -> Self {
        Self { rel, ln_abs }
    }
}

/// A complex number stored as `mantissa · exp(ln_scale)`, with an absolute
/// error bound expressed in mantissa units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub ln_scale: f64,
    pub error: f64,
}

impl ScaledValue {
    pub fn exact(value: Complex64) -> Self {
        Self {
            mantissa: value,
            ln_scale: 0.0,
            error: 0.0,
        }
    }

    /// The value as a plain complex number (may overflow to infinity).
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.ln_scale.exp()
    }

    pub fn abs_error(&self) -> f64 {
        self.error * self.ln_scale.exp()
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.ln_scale
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Mantissa re-expressed against another scale.
    pub fn rescaled(&self, ln_scale: f64) -> Complex64 {
        self.mantissa * (self.ln_scale - ln_scale).exp()
    }

    pub fn scale_by(self, ln_factor: f64) -> Self {
        Self {
            ln_scale: self.ln_scale + ln_factor,
            ..self
        }
    }
}

/// Positive coefficients `c_k`, log-concave in `k`.
pub trait Coefficients: Send + Sync {
    /// Number of available coefficients; `None` when unbounded.
    fn len(&self) -> Option<usize>;

    fn ln_coeff(&self, k: usize) -> f64;

    /// Absolute error bound on [`Coefficients::ln_coeff`].
    fn ln_coeff_error(&self, k: usize) -> f64;

    /// `c_0..c_{count−1}` correctly rounded to at least `prec` bits, when the
    /// source can produce them.
    fn mp_coeffs(&self, count: usize, prec: u32) -> Option<Vec<Float>>;
}

/// `c_k = 1/Γ((a + k·b)/d)` with exact binary inputs a, b, d.
///
/// Both the Mittag-Leffler coefficients `1/Γ(γ + βk)` (a=γ, b=β, d=1) and the
/// kernel coefficients of the weight family, `1/Γ((2k+2+n)/(2m))`, are of this
/// form. Keeping the three numbers separate lets the high-precision path use
/// the exact arguments rather than a rounded step `1/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaProgression {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl GammaProgression {
    pub fn new(a: f64, b: f64, d: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && d > 0.0 && a.is_finite() && b.is_finite() && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma progression needs positive finite a, b, d (got {a}, {b}, {d})"
            )));
        }
        Ok(Self { a, b, d })
    }

    fn arg(&self, k: usize) -> f64 {
        (self.a + k as f64 * self.b) / self.d
    }

    fn arg_mp(&self, k: usize, prec: u32) -> Float {
        let mut x = Float::with_val(prec, self.b);
        x *= k as u64;
        x += self.a;
        x /= self.d;
        x
    }

    /// Smallest `(q, p)` with `q·b = p·d` exactly, so that
    /// `x_{k+q} = x_k + p` and `Γ(x_{k+q}) = Γ(x_k)·x_k(x_k+1)…(x_k+p−1)`.
    fn recurrence(&self) -> Option<(usize, usize)> {
        let exact_mul = |x: f64, y: f64| {
            let prod = x * y;
            (x.mul_add(y, -prod) == 0.0).then_some(prod)
        };
        for q in 1..=64usize {
            let Some(bq) = exact_mul(self.b, q as f64) else {
                continue;
            };
            let p = (bq / self.d).round();
            if !(1.0..=64.0).contains(&p) {
                continue;
            }
            if exact_mul(p, self.d) == Some(bq) {
                return Some((q, p as usize));
            }
        }
        None
    }
}

impl Coefficients for GammaProgression {
    fn len(&self) -> Option<usize> {
        None
    }

    fn ln_coeff(&self, k: usize) -> f64 {
        -ln_gamma(self.arg(k))
    }

    fn ln_coeff_error(&self, k: usize) -> f64 {
        let x = self.arg(k);
        // argument rounding moves lnΓ by about ψ(x)·x·eps
        ln_gamma_abs_error(x) + 2.0 * EPS * x * x.ln().abs().max(1.0)
    }

    fn mp_coeffs(&self, count: usize, prec: u32) -> Option<Vec<Float>> {
        let wp = prec + 64;
        let mut out: Vec<Float> = Vec::with_capacity(count);
        match self.recurrence() {
            Some((q, p)) => {
                for k in 0..count {
                    if k < q {
                        out.push(self.arg_mp(k, wp).gamma().recip());
                    } else {
                        let x = self.arg_mp(k - q, wp);
                        let mut c = out[k - q].clone();
                        for j in 0..p {
                            let f = Float::with_val(wp, &x + j as u32);
                            c /= &f;
                        }
                        out.push(c);
                    }
                }
            }
            None => {
                for k in 0..count {
                    out.push(self.arg_mp(k, wp).gamma().recip());
                }
            }
        }
        Some(out)
    }
}

/// Coefficients `1/W_k` read from a finite moment table (logarithms).
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalMoments {
    ln_moments: Vec<f64>,
    rel_errors: Vec<f64>,
}

impl ReciprocalMoments {
    pub fn new(ln_moments: Vec<f64>, rel_errors: Vec<f64>) -> Result<Self> {
        if ln_moments.is_empty() || ln_moments.len() != rel_errors.len() {
            return Err(Error::InvalidParameter("moment table is empty or ragged".into()));
        }
        if ln_moments.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("moment table has non-finite entries".into()));
        }
        Ok(Self { ln_moments, rel_errors })
    }
}

impl Coefficients for ReciprocalMoments {
    fn len(&self) -> Option<usize> {
        Some(self.ln_moments.len())
    }

    fn ln_coeff(&self, k: usize) -> f64 {
        -self.ln_moments[k]
    }

    fn ln_coeff_error(&self, k: usize) -> f64 {
        self.rel_errors[k] + EPS * self.ln_moments[k].abs()
    }

    fn mp_coeffs(&self, _count: usize, _prec: u32) -> Option<Vec<Float>> {
        None
    }
}

/// Result of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: ScaledValue,
    /// Certified truncation bound, mantissa units (included in `value.error`).
    pub tail_bound: f64,
    pub terms: usize,
    /// 53 for the double-precision path, MPFR bits otherwise.
    pub precision: u32,
}

struct Plan {
    /// index of the last summed term
    last: usize,
    /// ln of the largest term magnitude
    ln_peak: f64,
    /// Σ |t_k| e^{-L} over the summed terms
    abs_sum: f64,
    /// ln of the tail bound
    ln_tail: f64,
}

impl Plan {
    /// Tail bound in units of e^L.
    fn tail(&self) -> f64 {
        (self.ln_tail - self.ln_peak).exp()
    }
}

/// A power series with positive log-concave coefficients.
pub struct PowerSeries {
    coeffs: Arc<dyn Coefficients>,
    max_terms: usize,
    ln_cache: Mutex<(Vec<f64>, Vec<f64>)>,
    mp_cache: Mutex<BTreeMap<u32, Arc<Vec<Float>>>>,
}

impl std::fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PowerSeries")
            .field("len", &self.coeffs.len())
            .field("max_terms", &self.max_terms)
            .finish()
    }
}

impl PowerSeries {
    pub fn new(coeffs: Arc<dyn Coefficients>, max_terms: usize) -> Self {
        Self {
            coeffs,
            max_terms: max_terms.max(1),
            ln_cache: Mutex::new((Vec::new(), Vec::new())),
            mp_cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    fn available(&self) -> usize {
        self.coeffs.len().unwrap_or(usize::MAX).min(self.max_terms)
    }

    /// ln c_k and its error for k < n (n capped by availability).
    fn with_ln_coeffs<R>(&self, n: usize, f: impl FnOnce(&[f64], &[f64]) -> R) -> R {
        let n = n.min(self.available());
        let mut guard = self.ln_cache.lock().expect("coefficient cache poisoned");
        let (ln, err) = &mut *guard;
        while ln.len() < n {
            let k = ln.len();
            ln.push(self.coeffs.ln_coeff(k));
            err.push(self.coeffs.ln_coeff_error(k));
        }
        f(&ln[..n], &err[..n])
    }

    /// ln c_k.
    pub fn ln_coeff(&self, k: usize) -> f64 {
        self.with_ln_coeffs(k + 1, |ln, _| ln[k])
    }

    /// Index of the largest term on the circle |s| = radius.
    pub fn peak_index(&self, radius: f64) -> usize {
        if radius <= 0.0 {
            return 0;
        }
        let lr = radius.ln();
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut k = 0usize;
        let mut chunk = 256usize;
        loop {
            let n = (k + chunk).min(self.available());
            let done = self.with_ln_coeffs(n, |ln, _| {
                for (j, &c) in ln.iter().enumerate().skip(k) {
                    let l = c + j as f64 * lr;
                    if l > best.1 {
                        best = (j, l);
                    } else if j > best.0 + 4 && l < best.1 - 40.0 {
                        return true;
                    }
                }
                false
            });
            if done || n >= self.available() {
                return best.0;
            }
            k = n;
            chunk *= 2;
        }
    }

    fn plan(&self, ln_radius: f64, ln_tail_target: Option<f64>, ln_tail_rel: f64) -> Result<Plan> {
        let avail = self.available();
        let mut chunk = 64usize;
        let mut ln_peak = f64::NEG_INFINITY;
        let mut k = 0usize;
        let mut prev = f64::NAN;
        let mut terms: Vec<f64> = Vec::new();
        loop {
            let n = (k + chunk).min(avail);
            let verdict = self.with_ln_coeffs(n, |ln, _| {
                for (j, &c) in ln.iter().enumerate().skip(k) {
                    let l = c + j as f64 * ln_radius;
                    terms.push(l);
                    if l > ln_peak {
                        ln_peak = l;
                    }
                    if j > 0 {
                        let ln_ratio = l - prev;
                        // ratios never increase, so past the peak with ratio
                        // rho < 1 the tail is at most t_j/(1 - rho)
                        if ln_ratio < -1e-3 {
                            let ln_tail = l - (-ln_ratio.exp_m1()).ln();
                            let target = ln_tail_target.unwrap_or(f64::NEG_INFINITY).max(ln_peak + ln_tail_rel);
                            if ln_tail <= target {
                                // summing up to j-1 leaves tail Σ_{i>=j} t_i <= 2 t_j
                                return Some((j - 1, ln_tail));
                            }
                        }
                    }
                    prev = l;
                }
                None
            });
            if let Some(done) = verdict {
                let (last, ln_tail): (usize, f64) = done;
                return Ok(self.finish_plan(&terms[..=last], ln_peak, ln_tail, last));
            }
            if n >= avail {
                break;
            }
            k = n;
            chunk *= 2;
        }
        // Out of coefficients. A finite table still certifies its tail through
        // the last coefficient ratio when that ratio times |s| is below one.
        if self.coeffs.len().map_or(false, |len| avail == len && len >= 2) {
            let last = avail - 1;
            let ln_ratio = terms[last] - terms[last - 1];
            if ln_ratio < 0.0 {
                // t_last · r/(1 − r)
                let ln_tail = terms[last] - (-ln_ratio).exp_m1().ln();
                let target = ln_tail_target.unwrap_or(f64::NEG_INFINITY).max(ln_peak + ln_tail_rel);
                if ln_tail <= target {
                    return Ok(self.finish_plan(&terms, ln_peak, ln_tail, last));
                }
            }
            return Err(Error::accuracy(
                format!(
                    "series tail not certifiable from {} coefficients at |s| = {:.6e}",
                    avail,
                    ln_radius.exp()
                ),
                None,
            ));
        }
        Err(Error::accuracy(
            format!(
                "series did not certify its tail within {} terms at |s| = {:.6e}",
                self.max_terms,
                ln_radius.exp()
            ),
            None,
        ))
    }

    fn finish_plan(&self, terms: &[f64], ln_peak: f64, ln_tail: f64, last: usize) -> Plan {
        let abs_sum = terms.iter().map(|&l| (l - ln_peak).exp()).sum();
        Plan {
            last,
            ln_peak,
            abs_sum,
            ln_tail,
        }
    }

    /// Double-precision log-polar summation; returns (mantissa, rounding bound).
    fn sum_f64(&self, s: Complex64, plan: &Plan) -> (Complex64, f64) {
        let ln_r = s.norm().ln();
        let theta = s.arg();
        self.with_ln_coeffs(plan.last + 1, |ln, err| {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut comp = Complex64::new(0.0, 0.0);
            let mut bound = 0.0;
            for (k, (&c, &e)) in ln.iter().zip(err).enumerate() {
                let kf = k as f64;
                let x = c + kf * ln_r - plan.ln_peak;
                let mag = x.exp();
                let (sin, cos) = (kf * theta).sin_cos();
                let term = Complex64::new(mag * cos, mag * sin);
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
                let delta = e + 2.0 * EPS * (3.0 + c.abs() + 2.0 * kf * ln_r.abs() + x.abs() + kf * theta.abs());
                bound += delta * mag;
            }
            bound += 4.0 * EPS * plan.abs_sum;
            (sum, bound)
        })
    }

    fn mp_coefficients(&self, count: usize, prec: u32) -> Option<Arc<Vec<Float>>> {
        let mut cache = self.mp_cache.lock().expect("coefficient cache poisoned");
        if let Some(v) = cache.get(&prec) {
            if v.len() >= count {
                return Some(v.clone());
            }
        }
        let want = (count + count / 4 + 16).min(self.available());
        let v = Arc::new(self.coeffs.mp_coeffs(want, prec)?);
        cache.insert(prec, v.clone());
        Some(v)
    }

    /// Horner evaluation at `prec` bits. Returns a value renormalised to its
    /// own magnitude: (mantissa, ln_scale, ln of the absolute rounding bound).
    fn sum_mp(&self, s: Complex64, plan: &Plan, prec: u32) -> Option<(Complex64, f64, f64)> {
        let coeffs = self.mp_coefficients(plan.last + 1, prec)?;
        let sr = Float::with_val(prec, s.re);
        let si = Float::with_val(prec, s.im);
        let mut vr = Float::with_val(prec, &coeffs[plan.last]);
        let mut vi = Float::new(prec);
        let mut tr = Float::new(prec);
        let mut ti = Float::new(prec);
        for k in (0..plan.last).rev() {
            tr.assign(&vr * &sr - &vi * &si);
            ti.assign(&vr * &si + &vi * &sr);
            tr += &coeffs[k];
            std::mem::swap(&mut vr, &mut tr);
            std::mem::swap(&mut vi, &mut ti);
        }
        let ln_rounding =
            (16.0 * (plan.last as f64 + 2.0) * plan.abs_sum).ln() - prec as f64 * std::f64::consts::LN_2 + plan.ln_peak;
        let norm = Float::with_val(64, vr.hypot_ref(&vi));
        if norm.is_zero() {
            return Some((Complex64::new(0.0, 0.0), plan.ln_peak, ln_rounding));
        }
        let ln_scale = norm.ln().to_f64();
        let scale = Float::with_val(prec + 16, -ln_scale).exp();
        vr *= &scale;
        vi *= &scale;
        Some((Complex64::new(vr.to_f64(), vi.to_f64()), ln_scale, ln_rounding))
    }

    /// Double-precision evaluation only: the tail is certified against `acc`,
    /// and the rounding bound is reported in the error without escalation.
    pub fn eval_double(&self, s: Complex64, acc: Accuracy) -> Result<SeriesEval> {
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite series argument {s}")));
        }
        if s == Complex64::new(0.0, 0.0) {
            let (c0, e0) = self.with_ln_coeffs(1, |ln, err| (ln[0], err[0]));
            return Ok(SeriesEval {
                value: ScaledValue {
                    mantissa: Complex64::new(1.0, 0.0),
                    ln_scale: c0,
                    error: e0 + EPS,
                },
                tail_bound: 0.0,
                terms: 1,
                precision: 53,
            });
        }
        let ln_abs = (acc.ln_abs > f64::NEG_INFINITY).then_some(acc.ln_abs);
        // tail pushed well under the rounding level
        let plan = self.plan(
            s.norm().ln(),
            ln_abs.map(|a| a - 2.0 * std::f64::consts::LN_2),
            (1e-3 * EPS).ln(),
        )?;
        let (mantissa, rounding) = self.sum_f64(s, &plan);
        let tail = plan.tail();
        Ok(SeriesEval {
            value: ScaledValue {
                mantissa,
                ln_scale: plan.ln_peak,
                error: rounding + tail,
            },
            tail_bound: tail,
            terms: plan.last + 1,
            precision: 53,
        })
    }

    /// Evaluate at `s` to the requested accuracy.
    pub fn eval(&self, s: Complex64, acc: Accuracy) -> Result<SeriesEval> {
        let mut best = self.eval_double(s, acc)?;
        if best.terms == 1 && s == Complex64::new(0.0, 0.0) {
            return Ok(best);
        }
        let ln_r = s.norm().ln();
        let ln_abs = acc.ln_abs;
        let floor_rel = acc.rel.max(4.0 * EPS);
        let target = |v: &SeriesEval| {
            let abs_units = (ln_abs - v.value.ln_scale).exp();
            // A double-precision result cannot be closer than its own rounding.
            abs_units
                .max(acc.rel * v.value.mantissa.norm())
                .max(8.0 * EPS * v.value.mantissa.norm())
        };
        if best.value.error <= target(&best) {
            return Ok(best);
        }
        // ln of the absolute error still worth asking for, given the current result
        let next_needed = |v: &SeriesEval, prev: f64, bits: f64| {
            let m = v.value.mantissa.norm();
            let want = if m > 2.0 * v.value.error {
                (floor_rel * (m - v.value.error)).ln() + v.value.ln_scale - std::f64::consts::LN_2
            } else {
                // unresolved: roughly double the precision
                (v.value.error.ln() + v.value.ln_scale).min(prev) - bits * std::f64::consts::LN_2
            };
            want.max(ln_abs)
        };

        let mut ln_needed = next_needed(&best, f64::INFINITY, 64.0);
        loop {
            let plan = self.plan(ln_r, Some(ln_needed - 4f64.ln()), f64::NEG_INFINITY)?;
            let bits_needed = (((16.0 * (plan.last as f64 + 2.0) * plan.abs_sum).ln() + plan.ln_peak - ln_needed)
                / std::f64::consts::LN_2)
                .ceil()
                + 9.0;
            let prec = quantize(bits_needed.clamp(64.0, 2.0 * MAX_PRECISION_BITS as f64) as u32);
            if prec > MAX_PRECISION_BITS {
                return Err(Error::accuracy(
                    format!(
                        "series at s = {s} needs more than {MAX_PRECISION_BITS} bits (cancellation of {:.0} orders of magnitude)",
                        (plan.ln_peak - ln_needed) / std::f64::consts::LN_10
                    ),
                    Some(scaled_pair(&best.value)),
                ));
            }
            let Some((mantissa, ln_scale, ln_rounding)) = self.sum_mp(s, &plan, prec) else {
                return Err(Error::accuracy(
                    format!("double-precision error bound {:.3e} misses the target and the coefficients have no high-precision form", best.value.error),
                    Some(scaled_pair(&best.value)),
                ));
            };
            let tail = (plan.ln_tail - ln_scale).exp();
            best = SeriesEval {
                value: ScaledValue {
                    mantissa,
                    ln_scale,
                    error: (ln_rounding - ln_scale).exp() + tail + 4.0 * EPS * mantissa.norm(),
                },
                tail_bound: tail,
                terms: plan.last + 1,
                precision: prec,
            };
            if best.value.error <= target(&best) {
                return Ok(best);
            }
            let next = next_needed(&best, ln_needed, prec as f64);
            // always make progress
            ln_needed = next.min(ln_needed - std::f64::consts::LN_2);
            if ln_needed < ln_abs {
                ln_needed = ln_abs;
            }
        }
    }

    /// `f(radius·e^{2πij/n})` for `j < n` from one MPFR transform of the
    /// coefficients; `n` must be a power of two. Samples are resolved down to
    /// `e^{ln_floor}`, and each carries its own certified error. Returns
    /// `None` when the coefficients have no high-precision form.
    pub fn circle_samples(&self, radius: f64, n: usize, ln_floor: f64) -> Result<Option<Vec<ScaledValue>>> {
        if !(radius > 0.0 && radius.is_finite()) || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "circle sampling needs a positive radius and a power-of-two count (got {radius}, {n})"
            )));
        }
        let ln_r = radius.ln();
        let plan = self.plan(ln_r, Some(ln_floor - 8.0), f64::NEG_INFINITY)?;
        let spread = 16.0 * (n as f64 + plan.last as f64 + 2.0) * plan.abs_sum;
        let bits = ((spread.ln() + plan.ln_peak - ln_floor) / std::f64::consts::LN_2).ceil() + 12.0;
        let prec = quantize(bits.clamp(64.0, 2.0 * MAX_PRECISION_BITS as f64) as u32);
        if prec > MAX_PRECISION_BITS {
            return Err(Error::accuracy(
                format!("circle sampling at radius {radius} needs more than {MAX_PRECISION_BITS} bits"),
                None,
            ));
        }
        let Some(coeffs) = self.mp_coefficients(plan.last + 1, prec) else {
            return Ok(None);
        };
        let mut re = vec![Float::new(prec); n];
        let mut im = vec![Float::new(prec); n];
        let r = Float::with_val(prec, radius);
        let mut pow = Float::with_val(prec, 1);
        let mut term = Float::new(prec);
        for (k, c) in coeffs.iter().take(plan.last + 1).enumerate() {
            term.assign(c * &pow);
            re[k % n] += &term;
            pow *= &r;
        }
        crate::mpfft::dft(&mut re, &mut im, prec);
        let ln_rounding = spread.ln() - prec as f64 * std::f64::consts::LN_2 + plan.ln_peak;
        let ln_err = ln_rounding.max(plan.ln_tail) + std::f64::consts::LN_2;
        let out = re
            .iter()
            .zip(&im)
            .map(|(x, y)| {
                let e = match (x.get_exp(), y.get_exp()) {
                    (Some(a), Some(b)) => a.max(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => {
                        return ScaledValue {
                            mantissa: Complex64::new(0.0, 0.0),
                            ln_scale: ln_err,
                            error: 1.0,
                        }
                    }
                };
                let mantissa = Complex64::new(
                    Float::with_val(prec, x >> e).to_f64(),
                    Float::with_val(prec, y >> e).to_f64(),
                );
                let ln_scale = e as f64 * std::f64::consts::LN_2;
                ScaledValue {
                    mantissa,
                    ln_scale,
                    error: (ln_err - ln_scale).exp() + 4.0 * EPS * mantissa.norm(),
                }
            })
            .collect();
        Ok(Some(out))
    }
}

fn quantize(bits: u32) -> u32 {
    bits.div_ceil(PRECISION_QUANTUM) * PRECISION_QUANTUM
}

fn scaled_pair(v: &ScaledValue) -> [f64; 2] {
    let z = v.value();
    [z.re, z.im]
}
