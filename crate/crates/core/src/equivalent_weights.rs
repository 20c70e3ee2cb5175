//! Truncated disk weights `ν_q = min(q, 1/r²)` and their kernels.
//!
//! As `q → ∞` the weights increase to `1/r²`, whose kernel is the rational
//! `s/(π(1−s)²)`. That limit vanishes at the origin while every `K_q(0, ·)` is
//! positive, so the profiles must develop a zero that moves in towards 0.
//! This module measures the convergence and tracks that zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{limit_disk_kernel, KernelEvaluator};
use crate::moments::truncated_disk_moment;
use crate::report::{format_f64, to_csv};
use crate::series::Accuracy;
use crate::weights::{weight_value, RadialWeightSpec};

/// Furthest point of the negative real axis searched for a zero.
const SEARCH_LIMIT: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisViolation {
    pub r: f64,
    pub nu_q1: f64,
    pub nu_q2: f64,
    pub limit: f64,
}

/// Outcome of [`hypothesis_check`]; failures are listed, never raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub q1: f64,
    pub q2: f64,
    pub passed: bool,
    pub violations: Vec<HypothesisViolation>,
}

/// Checks `ν_{q1}(r) ≤ ν_{q2}(r) ≤ 1/r²` at each sample radius.
pub fn hypothesis_check(q1: f64, q2: f64, sample_radii: &[f64]) -> Result<HypothesisReport> {
    let w1 = RadialWeightSpec::truncated_disk(q1)?;
    let w2 = RadialWeightSpec::truncated_disk(q2)?;
    let mut violations = Vec::new();
    for &r in sample_radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("sample radius {r} is not in (0, 1)")));
        }
        let (a, b) = (weight_value(&w1, r)?, weight_value(&w2, r)?);
        let limit = 1.0 / (r * r);
        if !(a <= b && b <= limit) {
            violations.push(HypothesisViolation {
                r,
                nu_q1: a,
                nu_q2: b,
                limit,
            });
        }
    }
    Ok(HypothesisReport {
        q1,
        q2,
        passed: violations.is_empty(),
        violations,
    })
}

fn truncated_kernel(q: f64) -> Result<KernelEvaluator> {
    KernelEvaluator::for_weight(&RadialWeightSpec::truncated_disk(q)?, None)
}

/// Radii `grid_radius·i/(grid_n − 1)`; a single node means the origin.
fn grid_radii(grid_radius: f64, grid_n: usize) -> Vec<f64> {
    if grid_n == 1 {
        return vec![0.0];
    }
    (0..grid_n)
        .map(|i| grid_radius * i as f64 / (grid_n - 1) as f64)
        .collect()
}

/// `sup |K_q(z, w) − K_limit(z, w)|` over the polar grid of pairs with
/// `|z|, |w|` on `grid_n` equispaced radii up to `grid_radius` and
/// `grid_n` equispaced angles each.
///
/// Both kernels depend on `z·conj(w)` only, so the sup runs over
/// `s = r_i r_j e^{2πil/grid_n}`.
pub fn ramadanov_distance(q: f64, grid_radius: f64, grid_n: usize, tol: f64) -> Result<f64> {
    if !(grid_radius > 0.0 && grid_radius < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grid radius must lie in (0, 1), got {grid_radius}"
        )));
    }
    if grid_n == 0 {
        return Err(Error::InvalidParameter("grid needs at least one node".into()));
    }
    let ev = truncated_kernel(q)?;
    sup_distance(&ev, grid_radius, grid_n, tol)
}

fn sup_distance(ev: &KernelEvaluator, grid_radius: f64, grid_n: usize, tol: f64) -> Result<f64> {
    let radii = grid_radii(grid_radius, grid_n);
    let mut sup = 0.0f64;
    for &ri in &radii {
        for &rj in &radii {
            for l in 0..grid_n {
                let z = Complex64::new(ri, 0.0);
                let w = Complex64::from_polar(rj, -2.0 * PI * l as f64 / grid_n as f64);
                let k = ev.eval(z, w, tol)?.complex();
                sup = sup.max((k - limit_disk_kernel(z, w)?).norm());
            }
        }
    }
    Ok(sup)
}

/// Where the zero of `f_q` nearest the origin sits, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EmergentZero {
    /// `z = s/conj(w)` lies in the unit disk.
    Inside { z: [f64; 2], s: f64, residual: f64 },
    /// The profile vanishes at `s`, but `s/conj(w)` is outside the disk.
    NotInside { z: [f64; 2], s: f64, residual: f64 },
    /// No sign change on `[−0.99, 0]`.
    NoZero,
}

impl EmergentZero {
    pub fn z(&self) -> Option<Complex64> {
        match self {
            EmergentZero::Inside { z, .. } | EmergentZero::NotInside { z, .. } => Some(Complex64::new(z[0], z[1])),
            EmergentZero::NoZero => None,
        }
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, EmergentZero::Inside { .. })
    }
}

/// `f_q(x)` on the real axis with its error bound.
fn real_profile(ev: &KernelEvaluator, x: f64, tol: f64) -> Result<(f64, f64)> {
    let v = ev
        .profile_double(Complex64::new(x, 0.0), Accuracy::absolute(1e-3 * tol))?
        .value;
    Ok((v.value().re, v.abs_error()))
}

/// The zero of `f_q(s) = Σ s^k / W_k(q)` nearest the origin on the negative
/// real axis, returned in the first variable as `z = s/conj(w)`.
///
/// The march starts from the first-order estimate `s ≈ −W_1/W_0` and works
/// outward from the origin in steps of a sixteenth of it, so the first sign
/// change found is the nearest zero; bisection then closes the bracket.
pub fn emergent_zero(q: f64, w: Complex64, tol: f64) -> Result<EmergentZero> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(w.norm() > 0.0 && w.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "w = {w} must be nonzero and inside the unit disk"
        )));
    }
    let ev = truncated_kernel(q)?;
    find_zero(&ev, q, w, tol)
}

fn find_zero(ev: &KernelEvaluator, q: f64, w: Complex64, tol: f64) -> Result<EmergentZero> {
    let estimate = truncated_disk_moment(q, 1)? / truncated_disk_moment(q, 0)?;
    let step = (estimate / 16.0).clamp(1e-4, 0.01);
    let (mut hi, mut f_hi) = (0.0, real_profile(ev, 0.0, tol)?.0);
    let mut bracket = None;
    while hi > -SEARCH_LIMIT {
        let lo = (hi - step).max(-SEARCH_LIMIT);
        let (f_lo, err) = real_profile(ev, lo, tol)?;
        if f_lo.abs() <= err {
            bracket = Some((lo, lo));
            break;
        }
        if (f_lo < 0.0) != (f_hi < 0.0) {
            bracket = Some((lo, hi));
            break;
        }
        (hi, f_hi) = (lo, f_lo);
    }
    let Some((mut a, mut b)) = bracket else {
        return Ok(EmergentZero::NoZero);
    };
    // f(a) and f(b) have opposite signs, a < b
    let f_b_negative = real_profile(ev, b, tol)?.0 < 0.0;
    while b - a > f64::EPSILON * a.abs().max(b.abs()) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let (fm, err) = real_profile(ev, mid, tol)?;
        if fm.abs() <= err {
            (a, b) = (mid, mid);
            break;
        }
        if (fm < 0.0) == f_b_negative {
            b = mid;
        } else {
            a = mid;
        }
    }
    let (fa, fb) = (real_profile(ev, a, tol)?.0, real_profile(ev, b, tol)?.0);
    let (s, residual) = if fa.abs() <= fb.abs() {
        (a, fa.abs())
    } else {
        (b, fb.abs())
    };
    if residual >= tol {
        return Err(Error::accuracy(
            format!("profile residual {residual:.3e} at the bracketed zero s = {s} misses tolerance {tol:.3e}"),
            Some([s, 0.0]),
        ));
    }
    let z = Complex64::new(s, 0.0) / w.conj();
    let z = [z.re, z.im];
    Ok(if (Complex64::new(s, 0.0) / w.conj()).norm() < 1.0 {
        EmergentZero::Inside { z, s, residual }
    } else {
        EmergentZero::NotInside { z, s, residual }
    })
}

/// Per-q summary of the convergence `K_q → K_limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub q_values: Vec<f64>,
    pub sup_distances: Vec<f64>,
    /// `K_q(0, w) = 1/W_0(q)`.
    pub origin_values: Vec<f64>,
    pub emergent_zeros: Vec<EmergentZero>,
    /// Smallest ladder entry whose zero lies inside the disk.
    pub first_inside_q: Option<f64>,
    /// The weight ordering holds for every ordered pair of the ladder.
    pub hypothesis_ok: bool,
    pub grid_radius: f64,
    pub grid_n: usize,
    pub w: [f64; 2],
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> Result<String> {
        to_csv(
            &["q", "sup_distance", "origin_value", "re_zero", "im_zero"],
            self.q_values.iter().enumerate().map(|(i, &q)| {
                let (re, im) = match self.emergent_zeros[i].z() {
                    Some(z) => (format_f64(z.re), format_f64(z.im)),
                    None => (String::new(), String::new()),
                };
                vec![
                    format_f64(q),
                    format_f64(self.sup_distances[i]),
                    format_f64(self.origin_values[i]),
                    re,
                    im,
                ]
            }),
        )
    }
}

/// Radii at which the ladder's weight ordering is sampled.
const HYPOTHESIS_RADII: [f64; 9] = [0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];

/// Runs the whole ladder: sup distances, origin values, emergent zeros.
pub fn convergence_report(
    q_ladder: &[f64],
    grid_radius: f64,
    grid_n: usize,
    w: Complex64,
    tol: f64,
) -> Result<ConvergenceReport> {
    if q_ladder.is_empty() {
        return Err(Error::InvalidParameter("empty q ladder".into()));
    }
    if q_ladder.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidParameter("q ladder must be strictly increasing".into()));
    }
    if !(grid_radius > 0.0 && grid_radius < 1.0) || grid_n == 0 {
        return Err(Error::InvalidParameter(format!(
            "grid needs radius in (0, 1) and at least one node (got {grid_radius}, {grid_n})"
        )));
    }
    if !(w.norm() > 0.0 && w.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "w = {w} must be nonzero and inside the unit disk"
        )));
    }
    let rows: Vec<(f64, f64, EmergentZero)> = q_ladder
        .par_iter()
        .map(|&q| {
            let ev = truncated_kernel(q)?;
            let origin = ev.eval(Complex64::new(0.0, 0.0), w, tol)?.value[0];
            Ok((
                sup_distance(&ev, grid_radius, grid_n, tol)?,
                origin,
                find_zero(&ev, q, w, tol)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut hypothesis_ok = true;
    for (i, &q1) in q_ladder.iter().enumerate() {
        for &q2 in &q_ladder[i..] {
            hypothesis_ok &= hypothesis_check(q1, q2, &HYPOTHESIS_RADII)?.passed;
        }
    }
    let first_inside_q = q_ladder
        .iter()
        .zip(&rows)
        .find(|(_, r)| r.2.is_inside())
        .map(|(&q, _)| q);
    Ok(ConvergenceReport {
        q_values: q_ladder.to_vec(),
        sup_distances: rows.iter().map(|r| r.0).collect(),
        origin_values: rows.iter().map(|r| r.1).collect(),
        emergent_zeros: rows.iter().map(|r| r.2).collect(),
        first_inside_q,
        hypothesis_ok,
        grid_radius,
        grid_n,
        w: [w.re, w.im],
    })
}
