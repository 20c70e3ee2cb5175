//! Zeros of kernel profiles by the argument principle.
//!
//! Winding numbers come from tracking the phase of `f` along a contour with
//! steps small enough that consecutive phase increments stay below π/4, so the
//! unwrapped total is unambiguous. Zeros are then isolated by quadrisection of
//! the bounding square and polished with Newton's method.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelEvaluator;
use crate::series::{Accuracy, ScaledValue};

/// A function whose zeros are sought.
pub trait Profile: Sync {
    fn eval(&self, s: Complex64, acc: Accuracy) -> Result<ScaledValue>;

    /// The most accurate value cheaply available, with its honest error, for
    /// when `eval` cannot meet a target (near a zero of a profile whose
    /// coefficients are only known in double precision).
    fn eval_best_effort(&self, s: Complex64) -> Result<ScaledValue> {
        self.eval(s, Accuracy::relative(1e-3))
    }

    /// Rough number of phase turns of `f` once around |s| = radius; used only
    /// to pick initial step sizes.
    fn phase_rate(&self, radius: f64) -> f64 {
        let _ = radius;
        1.0
    }

    /// `f(radius·e^{2πij/n})` for `j < n` in one batch, when the profile has
    /// a route faster than `n` separate evaluations.
    fn circle_samples(&self, radius: f64, n: usize) -> Option<Result<Vec<ScaledValue>>> {
        let _ = (radius, n);
        None
    }
}

impl Profile for KernelEvaluator {
    fn eval(&self, s: Complex64, acc: Accuracy) -> Result<ScaledValue> {
        Ok(self.profile(s, acc)?.value)
    }

    fn eval_best_effort(&self, s: Complex64) -> Result<ScaledValue> {
        Ok(self.profile_double(s, Accuracy::relative(1e-3))?.value)
    }

    fn phase_rate(&self, radius: f64) -> f64 {
        self.peak_index(radius) as f64 + 1.0
    }

    fn circle_samples(&self, radius: f64, n: usize) -> Option<Result<Vec<ScaledValue>>> {
        // resolve everything above e^{-40} times the value at the origin
        self.circle_samples(radius, n, self.ln_origin_value() - 40.0)
            .transpose()
    }
}

/// A plain closure as a profile, exact to rounding.
pub struct FnProfile<F> {
    f: F,
    rate: f64,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> FnProfile<F> {
    /// `rate` is the degree (or a guess at the phase turns per circle).
    pub fn new(f: F, rate: f64) -> Self {
        Self { f, rate }
    }
}

impl<F: Fn(Complex64) -> Complex64 + Sync> Profile for FnProfile<F> {
    fn eval(&self, s: Complex64, _acc: Accuracy) -> Result<ScaledValue> {
        let v = (self.f)(s);
        Ok(ScaledValue {
            mantissa: v,
            ln_scale: 0.0,
            error: 16.0 * f64::EPSILON * v.norm(),
        })
    }

    fn phase_rate(&self, _radius: f64) -> f64 {
        self.rate.max(1.0)
    }
}

/// `c·f` for a nonzero constant `c`.
pub struct ScaledProfile<'a, P: ?Sized> {
    inner: &'a P,
    factor: Complex64,
}

impl<'a, P: Profile + ?Sized> ScaledProfile<'a, P> {
    pub fn new(inner: &'a P, factor: Complex64) -> Self {
        Self { inner, factor }
    }
}

impl<P: Profile + ?Sized> Profile for ScaledProfile<'_, P> {
    fn eval(&self, s: Complex64, acc: Accuracy) -> Result<ScaledValue> {
        let v = self.inner.eval(s, acc)?;
        let norm = self.factor.norm();
        let unit = self.factor / norm;
        Ok(ScaledValue {
            mantissa: v.mantissa * unit,
            ln_scale: v.ln_scale + norm.ln(),
            error: v.error,
        })
    }

    fn eval_best_effort(&self, s: Complex64) -> Result<ScaledValue> {
        let v = self.inner.eval_best_effort(s)?;
        let norm = self.factor.norm();
        Ok(ScaledValue {
            mantissa: v.mantissa * (self.factor / norm),
            ln_scale: v.ln_scale + norm.ln(),
            error: v.error,
        })
    }

    fn phase_rate(&self, radius: f64) -> f64 {
        self.inner.phase_rate(radius)
    }

    fn circle_samples(&self, radius: f64, n: usize) -> Option<Result<Vec<ScaledValue>>> {
        let norm = self.factor.norm();
        let unit = self.factor / norm;
        Some(self.inner.circle_samples(radius, n)?.map(|v| {
            v.into_iter()
                .map(|x| ScaledValue {
                    mantissa: x.mantissa * unit,
                    ln_scale: x.ln_scale + norm.ln(),
                    error: x.error,
                })
                .collect()
        }))
    }
}

/// Relative accuracy asked of every contour sample; enough to pin the phase
/// to about 0.1 rad.
const PHASE_ACCURACY: f64 = 0.1;
/// Smallest contour step, as a fraction of the contour piece.
const MIN_STEP: f64 = 1e-11;
const MAX_RADIUS_RETRIES: usize = 5;

enum Sample {
    /// unit phase and ln|f|
    Unit(Complex64, f64),
    Unresolved,
}

fn sample<P: Profile + ?Sized>(f: &P, s: Complex64) -> Result<Sample> {
    match f.eval(s, Accuracy::relative(PHASE_ACCURACY)) {
        Ok(v) => {
            let n = v.mantissa.norm();
            if n > 2.0 * v.error && n.is_finite() && n > 0.0 {
                Ok(Sample::Unit(v.mantissa / n, n.ln() + v.ln_scale))
            } else {
                Ok(Sample::Unresolved)
            }
        }
        Err(e) if e.is_accuracy() => Ok(Sample::Unresolved),
        Err(e) => Err(e),
    }
}

/// Unwrapped phase change of `f` along `path(t)`, t ∈ [0, 1].
///
/// Each step must change `log f` by less than π/4 in both its imaginary part
/// (the phase) and its real part. Bounding the magnitude too stops the step
/// from carrying over from a slowly varying sector into a fast one, where
/// the phase alone could alias by whole turns.
fn phase_change<P: Profile + ?Sized>(f: &P, path: &dyn Fn(f64) -> Complex64, initial_step: f64) -> Result<f64> {
    let boundary = |t: f64| Error::BoundaryZero(format!("cannot resolve the phase of f near s = {}", path(t)));
    let Sample::Unit(mut v, mut ln_v) = sample(f, path(0.0))? else {
        return Err(boundary(0.0));
    };
    let mut t = 0.0;
    let mut h = initial_step.clamp(MIN_STEP, 0.25);
    let mut total = 0.0;
    while t < 1.0 {
        let tn = (t + h).min(1.0);
        if let Sample::Unit(u, ln_u) = sample(f, path(tn))? {
            let d = (u * v.conj()).arg();
            let dm = ln_u - ln_v;
            let worst = d.abs().max(dm.abs());
            if worst <= PI / 4.0 {
                total += d;
                t = tn;
                v = u;
                ln_v = ln_u;
                if worst < PI / 8.0 {
                    h *= 1.5;
                }
                continue;
            }
        }
        h *= 0.5;
        if h < MIN_STEP {
            return Err(boundary(tn));
        }
    }
    Ok(total)
}

fn to_count(total: f64, what: &str) -> Result<i64> {
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() > 0.25 {
        return Err(Error::BoundaryZero(format!(
            "phase change around {what} is {turns:.3} turns, not near an integer"
        )));
    }
    Ok(n as i64)
}

fn circle_winding<P: Profile + ?Sized>(f: &P, center: Complex64, radius: f64) -> Result<i64> {
    let rate = f.phase_rate(center.norm() + radius);
    if center == Complex64::new(0.0, 0.0) && rate >= BATCH_MIN_RATE {
        let n = ((8.0 * rate) as usize)
            .next_power_of_two()
            .clamp(256, BATCH_MAX_SAMPLES);
        if let Some(samples) = f.circle_samples(radius, n) {
            return to_count(batched_circle_phase(f, radius, &samples?, rate)?, "the circle");
        }
    }
    let path = |t: f64| center + Complex64::from_polar(radius, TAU * t);
    let total = phase_change(f, &path, 1.0 / (16.0 * rate))?;
    to_count(total, "the circle")
}

/// Profiles turning faster than this use batched circle samples.
const BATCH_MIN_RATE: f64 = 64.0;
const BATCH_MAX_SAMPLES: usize = 1 << 17;

/// Phase change around |s| = radius from equispaced samples. Neighbouring
/// samples that satisfy the step criterion of [`phase_change`] are used
/// directly; runs between them that do not are marched adaptively.
fn batched_circle_phase<P: Profile + ?Sized>(f: &P, radius: f64, samples: &[ScaledValue], rate: f64) -> Result<f64> {
    let n = samples.len();
    let unit: Vec<Option<(Complex64, f64)>> = samples
        .iter()
        .map(|v| {
            let m = v.mantissa.norm();
            (m.is_finite() && m > 0.0 && v.error <= PHASE_ACCURACY * m).then(|| (v.mantissa / m, m.ln() + v.ln_scale))
        })
        .collect();
    let Some(first) = unit.iter().position(Option::is_some) else {
        let path = |t: f64| Complex64::from_polar(radius, TAU * t);
        return phase_change(f, &path, 1.0 / (16.0 * rate));
    };
    let mut total = 0.0;
    let mut i = first;
    let (mut v, mut ln_v) = unit[first].unwrap();
    while i < first + n {
        let j = i + 1;
        if let Some((u, ln_u)) = unit[j % n] {
            let d = (u * v.conj()).arg();
            if d.abs() <= PI / 4.0 && (ln_u - ln_v).abs() <= PI / 4.0 {
                total += d;
                (v, ln_v, i) = (u, ln_u, j);
                continue;
            }
        }
        // march from sample i to the next resolved sample
        let mut k = j;
        while unit[k % n].is_none() {
            k += 1;
        }
        let (a, b) = (i as f64 / n as f64, k as f64 / n as f64);
        let path = move |t: f64| Complex64::from_polar(radius, TAU * (a + (b - a) * t));
        total += phase_change(f, &path, 1.0 / (16.0 * rate * (b - a)))?;
        let (u, ln_u) = unit[k % n].unwrap();
        (v, ln_v, i) = (u, ln_u, k);
    }
    Ok(total)
}

/// Winding count of `f` on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub count: usize,
    /// The radius actually used (perturbed when a zero sat near the first).
    pub radius: f64,
}

/// Number of zeros of `f` in `|s − center| < radius`.
///
/// A zero too close to the circle makes the phase unresolvable; the radius is
/// then perturbed by 1% (alternately outward and inward) up to five times.
pub fn winding_count<P: Profile + ?Sized>(f: &P, center: Complex64, radius: f64, _tol: f64) -> Result<Winding> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut last = None;
    for attempt in 0..=MAX_RADIUS_RETRIES {
        let step = attempt.div_ceil(2) as f64 * 0.01;
        let r = if attempt % 2 == 1 {
            radius * (1.0 + step)
        } else {
            radius * (1.0 - step)
        };
        match circle_winding(f, center, r) {
            Ok(n) if n >= 0 => {
                return Ok(Winding {
                    count: n as usize,
                    radius: r,
                })
            }
            Ok(n) => {
                return Err(Error::Domain(format!(
                    "negative winding {n}: the function has poles inside the circle"
                )))
            }
            Err(e @ Error::BoundaryZero(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::BoundaryZero("retries exhausted".into())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rect {
    lo: Complex64,
    hi: Complex64,
}

impl Rect {
    fn width(&self) -> f64 {
        (self.hi.re - self.lo.re).max(self.hi.im - self.lo.im)
    }

    fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    fn contains(&self, s: Complex64, margin: f64) -> bool {
        s.re >= self.lo.re - margin
            && s.re <= self.hi.re + margin
            && s.im >= self.lo.im - margin
            && s.im <= self.hi.im + margin
    }

    /// Distance from the origin to the nearest point of the rectangle.
    fn min_abs(&self) -> f64 {
        let dx = if self.lo.re > 0.0 {
            self.lo.re
        } else if self.hi.re < 0.0 {
            -self.hi.re
        } else {
            0.0
        };
        let dy = if self.lo.im > 0.0 {
            self.lo.im
        } else if self.hi.im < 0.0 {
            -self.hi.im
        } else {
            0.0
        };
        dx.hypot(dy)
    }

    fn max_abs(&self) -> f64 {
        self.lo
            .re
            .abs()
            .max(self.hi.re.abs())
            .hypot(self.lo.im.abs().max(self.hi.im.abs()))
    }

    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let mx = self.lo.re + fx * (self.hi.re - self.lo.re);
        let my = self.lo.im + fy * (self.hi.im - self.lo.im);
        [
            Rect {
                lo: self.lo,
                hi: Complex64::new(mx, my),
            },
            Rect {
                lo: Complex64::new(mx, self.lo.im),
                hi: Complex64::new(self.hi.re, my),
            },
            Rect {
                lo: Complex64::new(self.lo.re, my),
                hi: Complex64::new(mx, self.hi.im),
            },
            Rect {
                lo: Complex64::new(mx, my),
                hi: self.hi,
            },
        ]
    }
}

fn rect_winding<P: Profile + ?Sized>(f: &P, rect: &Rect) -> Result<usize> {
    let corners = [
        rect.lo,
        Complex64::new(rect.hi.re, rect.lo.im),
        rect.hi,
        Complex64::new(rect.lo.re, rect.hi.im),
    ];
    let rate = f.phase_rate(rect.max_abs());
    let mut total = 0.0;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let path = move |t: f64| a + (b - a) * t;
        total += phase_change(f, &path, 1.0 / (16.0 * rate))?;
    }
    let n = to_count(total, "a cell")?;
    if n < 0 {
        return Err(Error::Domain("negative winding on a cell".into()));
    }
    Ok(n as usize)
}

/// Split points tried in turn; slightly off-centre so that symmetric zero
/// sets (on the real axis, say) do not land on cell edges.
const SPLITS: [(f64, f64); 5] = [
    (0.5123, 0.4871),
    (0.4629, 0.5317),
    (0.5591, 0.4433),
    (0.4211, 0.5789),
    (0.5, 0.5),
];

#[derive(Debug, Clone, Default)]
struct Found {
    zeros: Vec<(Complex64, usize)>,
    failures: Vec<String>,
}

impl Found {
    fn merge(mut self, other: Found) -> Found {
        self.zeros.extend(other.zeros);
        self.failures.extend(other.failures);
        self
    }
}

struct Search<'a, P: ?Sized> {
    f: &'a P,
    radius: f64,
    tol: f64,
}

impl<P: Profile + ?Sized> Search<'_, P> {
    fn locate(&self, rect: Rect, count: usize) -> Found {
        if count == 0 || rect.min_abs() >= self.radius {
            return Found::default();
        }
        if rect.width() <= self.tol {
            return Found {
                zeros: vec![(rect.center(), count)],
                failures: vec![],
            };
        }
        if count == 1 {
            match newton(self.f, rect.center(), self.tol, &rect) {
                Newton::Converged(z) => {
                    return Found {
                        zeros: vec![(z, 1)],
                        failures: vec![],
                    }
                }
                // subdividing further cannot help
                Newton::Noisy(z, noise) => {
                    return Found {
                        zeros: vec![],
                        failures: vec![format!(
                            "zero near {z}: profile values only locate it to within {noise:.1e}, above tol {:.1e}",
                            self.tol
                        )],
                    }
                }
                Newton::Failed => {}
            }
        }
        let mut last_err = String::new();
        for (fx, fy) in SPLITS {
            let cells = rect.split(fx, fy);
            let counts: Vec<Result<usize>> = cells.par_iter().map(|c| rect_winding(self.f, c)).collect();
            let mut ok = Vec::with_capacity(4);
            for c in counts {
                match c {
                    Ok(n) => ok.push(n),
                    Err(e) => {
                        last_err = e.to_string();
                        break;
                    }
                }
            }
            if ok.len() < 4 {
                continue;
            }
            if ok.iter().sum::<usize>() != count {
                last_err = format!("child counts {ok:?} do not add up to {count}");
                continue;
            }
            return cells
                .into_par_iter()
                .zip(ok)
                .map(|(c, n)| self.locate(c, n))
                .reduce(Found::default, Found::merge);
        }
        Found {
            zeros: vec![],
            failures: vec![format!("cell around {} ({count} zeros): {last_err}", rect.center())],
        }
    }
}

/// Value of `f` at `s` against a common scale.
fn eval_at<P: Profile + ?Sized>(f: &P, s: Complex64, acc: Accuracy) -> Option<ScaledValue> {
    let v = match f.eval(s, acc) {
        Err(e) if e.is_accuracy() => f.eval_best_effort(s),
        v => v,
    };
    v.ok()
        .filter(|v| v.mantissa.re.is_finite() && v.mantissa.im.is_finite())
}

enum Newton {
    Converged(Complex64),
    /// Converged, but the error in f puts the zero anywhere within this
    /// distance, which exceeds the tolerance.
    Noisy(Complex64, f64),
    Failed,
}

/// Newton iteration with a central-difference derivative.
fn newton<P: Profile + ?Sized>(f: &P, start: Complex64, tol: f64, cell: &Rect) -> Newton {
    newton_steps(f, start, tol, cell).unwrap_or(Newton::Failed)
}

fn newton_steps<P: Profile + ?Sized>(f: &P, start: Complex64, tol: f64, cell: &Rect) -> Option<Newton> {
    // the iterate may wander a little, but the result must lie in the cell
    let margin = 0.5 * cell.width();
    let mut s = start;
    let mut acc = Accuracy::relative(1e-6);
    for _ in 0..60 {
        let h = (1e-7 * s.norm()).max(1e-7);
        let v = eval_at(f, s, acc)?;
        let vp = eval_at(f, s + h, acc)?;
        let vm = eval_at(f, s - h, acc)?;
        let scale = v.ln_scale.max(vp.ln_scale).max(vm.ln_scale);
        let d = (vp.rescaled(scale) - vm.rescaled(scale)) / (2.0 * h);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return None;
        }
        let step = v.rescaled(scale) / d;
        // how far the zero may sit from s given the error in f(s)
        let noise = v.error * (v.ln_scale - scale).exp() / d.norm();
        s -= step;
        if !cell.contains(s, margin) {
            return None;
        }
        // next values accurate enough that the step is good to tol/1000
        acc = Accuracy::either(1e-6, d.norm().ln() + scale + (1e-3 * tol).ln());
        if step.norm() <= (1e-3 * tol).max(4.0 * f64::EPSILON * s.norm()).max(2.0 * noise) {
            if noise > 0.25 * tol {
                return Some(Newton::Noisy(s, 3.0 * noise));
            }
            return cell.contains(s, tol).then_some(Newton::Converged(s));
        }
    }
    None
}

/// Largest |f| on eight points of a small circle around `s`, and |f(s)|, both
/// as logarithms.
fn residual_and_scale<P: Profile + ?Sized>(f: &P, s: Complex64) -> Result<(f64, f64)> {
    let rho = 1e-3 * s.norm().max(1.0);
    let mut ln_scale = f64::NEG_INFINITY;
    for j in 0..8 {
        let p = s + Complex64::from_polar(rho, TAU * j as f64 / 8.0);
        let v = f.eval(p, Accuracy::relative(1e-3))?;
        ln_scale = ln_scale.max(v.ln_abs());
    }
    let v = match f.eval(s, Accuracy::either(1e-3, ln_scale + (1e-14f64).ln())) {
        Err(e) if e.is_accuracy() => f.eval_best_effort(s)?,
        v => v?,
    };
    let ln_res = if v.mantissa.norm() == 0.0 {
        f64::NEG_INFINITY
    } else {
        v.ln_abs()
    };
    Ok((ln_res, ln_scale))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub radius: f64,
    /// Winding number on the outer circle.
    pub count: usize,
    /// Zero locations, sorted by modulus then argument; repeated per multiplicity.
    pub zeros: Vec<[f64; 2]>,
    /// |f(zero)|.
    pub residuals: Vec<f64>,
    /// max |f| on a circle of radius 1e-3·max(1, |zero|) around each zero.
    pub local_scales: Vec<f64>,
    /// residual / local scale, computed in log space (finite even when the
    /// two overflow).
    pub relative_residuals: Vec<f64>,
    pub order_estimate: Option<f64>,
    /// Cells that could not be resolved.
    pub failures: Vec<String>,
}

impl ZeroReport {
    pub fn zeros_complex(&self) -> Vec<Complex64> {
        self.zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect()
    }

    /// Expresses a profile report in the first kernel variable: with
    /// `s = z·conj(w)`, zeros become `s/conj(w)` and the radius `R/|w|`.
    pub fn in_first_variable(&self, w: Complex64) -> ZeroReport {
        let wc = w.conj();
        let mut out = self.clone();
        out.radius = self.radius / w.norm();
        out.zeros = self
            .zeros_complex()
            .into_iter()
            .map(|s| {
                let z = s / wc;
                [z.re, z.im]
            })
            .collect();
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows = self.zeros.iter().zip(&self.residuals).map(|(z, r)| {
            vec![
                crate::report::format_f64(z[0]),
                crate::report::format_f64(z[1]),
                crate::report::format_f64(*r),
            ]
        });
        crate::report::to_csv(&["re_zero", "im_zero", "residual"], rows)
    }
}

/// All zeros of `f` in `|s| < radius`, located to `tol`.
pub fn find_zeros_in_disk<P: Profile + ?Sized>(f: &P, radius: f64, tol: f64) -> Result<ZeroReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let outer = winding_count(f, Complex64::new(0.0, 0.0), radius, tol)?;
    let radius = outer.radius;
    let search = Search { f, radius, tol };
    let mut found = Found::default();
    let mut boxed = false;
    for pad in [1.0137, 1.0411, 1.0779] {
        let half = radius * pad;
        let rect = Rect {
            lo: Complex64::new(-half, -half),
            hi: Complex64::new(half, half),
        };
        match rect_winding(f, &rect) {
            Ok(n) => {
                found = search.locate(rect, n);
                boxed = true;
                break;
            }
            Err(Error::BoundaryZero(msg)) => found.failures.push(msg),
            Err(e) => return Err(e),
        }
    }
    if !boxed {
        return Err(Error::BoundaryZero(format!(
            "no bounding square avoids the zeros: {}",
            found.failures.join("; ")
        )));
    }

    // Keep the disk's zeros, merging near-duplicates.
    let mut zeros: Vec<(Complex64, usize)> = found.zeros.into_iter().filter(|(z, _)| z.norm() < radius).collect();
    zeros.sort_by(|a, b| order_key(a.0).partial_cmp(&order_key(b.0)).expect("finite zeros"));
    let mut merged: Vec<(Complex64, usize)> = Vec::new();
    for (z, m) in zeros {
        match merged.iter_mut().find(|(y, _)| (*y - z).norm() < 10.0 * tol) {
            Some(entry) => entry.1 = entry.1.max(m),
            None => merged.push((z, m)),
        }
    }

    let stats: Vec<Result<(f64, f64)>> = merged.par_iter().map(|(z, _)| residual_and_scale(f, *z)).collect();
    let mut report = ZeroReport {
        radius,
        count: outer.count,
        zeros: vec![],
        residuals: vec![],
        local_scales: vec![],
        relative_residuals: vec![],
        order_estimate: None,
        failures: found.failures,
    };
    for ((z, m), st) in merged.into_iter().zip(stats) {
        let (ln_res, ln_scale) = st?;
        for _ in 0..m {
            report.zeros.push([z.re, z.im]);
            report.residuals.push(ln_res.exp());
            report.local_scales.push(ln_scale.exp());
            report.relative_residuals.push((ln_res - ln_scale).exp());
        }
    }
    if report.zeros.len() != report.count {
        report.failures.push(format!(
            "located {} zeros but the outer winding count is {}",
            report.zeros.len(),
            report.count
        ));
    }
    Ok(report)
}

fn order_key(z: Complex64) -> (f64, f64) {
    (z.norm(), z.arg())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub radius: f64,
    /// Radius actually used for the count.
    pub radius_used: Option<f64>,
    pub count: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthScan {
    pub entries: Vec<ScanEntry>,
    pub order_estimate: Option<f64>,
}

impl GrowthScan {
    pub fn counts(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(|e| e.count).collect()
    }
}

/// Winding counts on a sequence of radii, with a log-log growth estimate.
pub fn zero_growth_scan<P: Profile + ?Sized>(f: &P, radii: &[f64], tol: f64) -> Result<GrowthScan> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("scan radii must be strictly increasing".into()));
    }
    let entries: Vec<ScanEntry> = radii
        .par_iter()
        .map(|&r| match winding_count(f, Complex64::new(0.0, 0.0), r, tol) {
            Ok(w) => Ok(ScanEntry {
                radius: r,
                radius_used: Some(w.radius),
                count: Some(w.count),
                error: None,
            }),
            Err(e @ Error::BoundaryZero(_)) => Ok(ScanEntry {
                radius: r,
                radius_used: None,
                count: None,
                error: Some(e.to_string()),
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| e.count.map(|c| (e.radius, c)))
        .filter(|&(_, c)| c >= 2)
        .map(|(r, c)| (r, c as f64))
        .collect();
    Ok(GrowthScan {
        order_estimate: order_estimate(&points),
        entries,
    })
}

/// Least-squares slope of ln(count) against ln(R) over the largest decade.
pub fn order_estimate(points: &[(f64, f64)]) -> Option<f64> {
    let r_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 >= r_max / 10.0 && p.1 > 0.0)
        .map(|&(r, c)| (r.ln(), c.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Zeros of `z ↦ K(z, w)` in `|z| < radius`.
pub fn kernel_zeros(ev: &KernelEvaluator, w: Complex64, radius: f64, tol: f64) -> Result<ZeroReport> {
    if w.norm() == 0.0 {
        return Err(Error::InvalidParameter("K(·, 0) is constant; choose w ≠ 0".into()));
    }
    let report = find_zeros_in_disk(ev, radius * w.norm(), tol * w.norm())?;
    Ok(report.in_first_variable(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::MLWeightParams;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cos_kernel() -> KernelEvaluator {
        KernelEvaluator::closed(MLWeightParams::new(-1.0, 1.0, 0.5)).unwrap()
    }

    #[test]
    fn simple_windings() {
        let id = FnProfile::new(|s| s, 1.0);
        assert_eq!(winding_count(&id, c(0.0, 0.0), 1.0, 1e-8).unwrap().count, 1);
        let quad = FnProfile::new(|s| (s - 1.0) * (s - 2.0), 2.0);
        assert_eq!(winding_count(&quad, c(0.0, 0.0), 1.5, 1e-8).unwrap().count, 1);
        let cosh = FnProfile::new(|s: Complex64| s.sqrt().cosh(), 2.0);
        assert_eq!(winding_count(&cosh, c(0.0, 0.0), 5.0, 1e-8).unwrap().count, 1);
    }

    #[test]
    fn zero_on_the_circle_is_dodged() {
        let f = FnProfile::new(|s| s - 1.0, 1.0);
        let w = winding_count(&f, c(0.0, 0.0), 1.0, 1e-8).unwrap();
        assert_ne!(w.radius, 1.0);
        assert_eq!(w.count, usize::from(w.radius > 1.0));
    }

    #[test]
    fn cos_kernel_zeros() {
        let report = find_zeros_in_disk(&cos_kernel(), 30.0, 1e-10).unwrap();
        assert_eq!(report.count, 2);
        let z = report.zeros_complex();
        assert!((z[0] - c(-(PI / 2.0).powi(2), 0.0)).norm() < 1e-8, "{z:?}");
        assert!((z[1] - c(-(1.5 * PI).powi(2), 0.0)).norm() < 1e-8);
        assert!(report.relative_residuals.iter().all(|&r| r < 1e-8));
        let report = find_zeros_in_disk(&cos_kernel(), 100.0, 1e-10).unwrap();
        assert_eq!(report.count, 3);
        assert!((report.zeros_complex()[2] - c(-(2.5 * PI).powi(2), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn exponential_control_has_no_zeros() {
        let ev = KernelEvaluator::closed(MLWeightParams::new(0.0, 1.0, 1.0)).unwrap();
        let report = find_zeros_in_disk(&ev, 50.0, 1e-8).unwrap();
        assert_eq!(report.count, 0);
        assert!(report.zeros.is_empty());
        let scan = zero_growth_scan(&ev, &[5.0, 30.0, 100.0], 1e-8).unwrap();
        assert_eq!(scan.counts(), vec![Some(0); 3]);
    }

    /// Hides the batched route so only the adaptive march is used.
    struct Pointwise<'a>(&'a KernelEvaluator);

    impl Profile for Pointwise<'_> {
        fn eval(&self, s: Complex64, acc: Accuracy) -> Result<ScaledValue> {
            Profile::eval(self.0, s, acc)
        }

        fn phase_rate(&self, radius: f64) -> f64 {
            Profile::phase_rate(self.0, radius)
        }
    }

    #[test]
    fn batched_and_marched_windings_agree() {
        let ev = KernelEvaluator::closed(MLWeightParams::new(0.0, 1.0, 1.5)).unwrap();
        for r in [40.0, 64.0] {
            assert!(ev.phase_rate(r) >= BATCH_MIN_RATE);
            let fast = winding_count(&ev, c(0.0, 0.0), r, 1e-8).unwrap();
            let slow = winding_count(&Pointwise(&ev), c(0.0, 0.0), r, 1e-8).unwrap();
            assert_eq!(fast, slow, "R = {r}");
        }
    }

    #[test]
    fn cos_growth_scan() {
        let scan = zero_growth_scan(&cos_kernel(), &[5.0, 30.0, 100.0], 1e-8).unwrap();
        assert_eq!(scan.counts(), vec![Some(1), Some(2), Some(3)]);
        assert!(zero_growth_scan(&cos_kernel(), &[5.0, 5.0], 1e-8).is_err());
    }

    #[test]
    fn zeros_scale_with_conjugate_w() {
        let ev = cos_kernel();
        let one = kernel_zeros(&ev, c(1.0, 0.0), 30.0, 1e-10).unwrap();
        let two = kernel_zeros(&ev, c(2.0, 0.0), 15.0, 1e-10).unwrap();
        assert_eq!(one.count, two.count);
        for (a, b) in one.zeros_complex().iter().zip(two.zeros_complex()) {
            assert!((a / 2.0 - b).norm() < 1e-9, "{a} {b}");
        }
        let wi = kernel_zeros(&ev, c(0.0, 1.0), 30.0, 1e-10).unwrap();
        // s = z·conj(i) = −i z, so z = i s
        assert!((wi.zeros_complex()[0] - c(0.0, -(PI / 2.0).powi(2))).norm() < 1e-8);
    }

    #[test]
    fn order_estimate_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&r: &f64| (r, 3.0 * r.powf(1.5)))
            .collect();
        assert!((order_estimate(&pts).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(order_estimate(&[(1.0, 2.0)]), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn polynomial_roots_recovered(
            roots in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=8),
            lead in (0.5f64..2.0, 0.0..TAU),
        ) {
            let roots: Vec<Complex64> = roots.into_iter().map(|(a, b)| c(a, b)).collect();
            let radius = 1.7;
            // keep the circle and cell edges clear of the roots, and roots apart
            prop_assume!(roots.iter().all(|r| (r.norm() - radius).abs() > 0.05));
            for i in 0..roots.len() {
                for j in 0..i {
                    prop_assume!((roots[i] - roots[j]).norm() > 1e-3);
                }
            }
            let k = Complex64::from_polar(lead.0, lead.1);
            let rs = roots.clone();
            let f = FnProfile::new(move |s| rs.iter().fold(k, |acc, r| acc * (s - r)), roots.len() as f64);
            let tol = 1e-9;
            let report = find_zeros_in_disk(&f, radius, tol).unwrap();
            let inside: Vec<&Complex64> = roots.iter().filter(|r| r.norm() < report.radius).collect();
            prop_assert_eq!(report.count, inside.len());
            prop_assert_eq!(report.zeros.len(), inside.len());
            for r in inside {
                prop_assert!(report.zeros_complex().iter().any(|z| (z - r).norm() < tol * 10.0),
                             "root {} missing from {:?}", r, report.zeros);
            }
        }

        #[test]
        fn winding_invariant_under_constant_multiples(
            mag in 1e-3f64..1e3, arg in 0.0..TAU, radius in 3.0f64..60.0
        ) {
            let ev = cos_kernel();
            let scaled = ScaledProfile::new(&ev, Complex64::from_polar(mag, arg));
            let a = winding_count(&ev, c(0.0, 0.0), radius, 1e-8).unwrap();
            let b = winding_count(&scaled, c(0.0, 0.0), radius, 1e-8).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
