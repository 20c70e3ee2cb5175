//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) with global
//! bisection, and double-exponential (tanh-sinh) for integrable endpoint
//! singularities.
//!
//! Both rules are generic over the integrand's value type so the same code
//! integrates real moments and complex reproducing-property integrands.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
    fn as_pair(&self) -> [f64; 2];
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn as_pair(&self) -> [f64; 2] {
        [*self, 0.0]
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn as_pair(&self) -> [f64; 2] {
        [self.re, self.im]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the number of subintervals (Gauss–Kronrod) or refinement
    /// levels (tanh-sinh).
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 0.0,
            max_subdivisions: 4000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

// Kronrod abscissae (positive half) and weights; odd indices are the
// embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Panel { a, b, value, error }
}

/// Globally adaptive Gauss–Kronrod quadrature over `[a, b]`.
///
/// `breakpoints` strictly inside the interval seed the initial partition
/// (kinks, peaks). The interval with the largest error estimate is bisected
/// until the summed estimate meets the tolerance.
pub fn gauss_kronrod<T, F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidParameter(format!(
            "quadrature bounds [{a}, {b}] are not a finite interval"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut panels: Vec<Panel<T>> = edges.windows(2).map(|w| kronrod15(&mut f, w[0], w[1])).collect();
    let mut evaluations = 15 * panels.len();

    loop {
        let total = panels.iter().fold(T::default(), |acc, p| acc + p.value);
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= opts.target(total.magnitude()) {
            return Ok(QuadResult {
                value: total,
                error,
                evaluations,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if panels.len() >= opts.max_subdivisions || mid <= pa || mid >= pb {
            return Err(Error::accuracy(
                format!(
                    "adaptive quadrature on [{a}, {b}] stalled at error {error:.3e} after {} panels",
                    panels.len()
                ),
                Some(total.as_pair()),
            ));
        }
        panels[worst] = kronrod15(&mut f, pa, mid);
        panels.push(kronrod15(&mut f, mid, pb));
        evaluations += 30;
    }
}

/// Tanh-sinh quadrature over `[a, b]`, tolerant of integrable singularities
/// at either endpoint. Nodes are placed by their distance to the nearer
/// endpoint so they crowd the ends without cancellation.
pub fn tanh_sinh<T, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidParameter(format!(
            "quadrature bounds [{a}, {b}] are not a finite interval"
        )));
    }
    let width = b - a;
    if width == 0.0 {
        return Ok(QuadResult {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
        });
    }

    // Contribution of the node pair at parameter t (t > 0), or the centre.
    let node_pair = |t: f64, f: &mut F| -> Option<T> {
        let u = 0.5 * PI * t.sinh();
        let e = (-2.0 * u).exp();
        let d = width * e / (1.0 + e);
        let w = width * PI * t.cosh() * e / ((1.0 + e) * (1.0 + e));
        if d == 0.0 || w == 0.0 {
            return None;
        }
        // A node that rounds onto its endpoint is dropped on that side only.
        let mut v = T::default();
        if a + d != a {
            v = v + f(a + d);
        }
        if b - d != b {
            v = v + f(b - d);
        }
        Some(v * w)
    };

    let mut h = 0.5;
    let mut sum = f(0.5 * (a + b)) * (0.25 * PI * width);
    let mut evaluations = 1usize;
    // Level 0: t = j/2 for j >= 1.
    let mut j = 1;
    while let Some(c) = node_pair(j as f64 * h, &mut f) {
        sum = sum + c;
        evaluations += 2;
        if j > 8 && c.magnitude() <= 1e-20 * sum.magnitude() {
            break;
        }
        j += 1;
    }
    let mut estimate = sum * h;
    let levels = opts.max_subdivisions.min(14);
    for _ in 0..levels {
        h *= 0.5;
        let mut j = 1;
        loop {
            let t = j as f64 * h;
            match node_pair(t, &mut f) {
                Some(c) => {
                    sum = sum + c;
                    evaluations += 2;
                    if t > 4.0 && c.magnitude() <= 1e-20 * sum.magnitude() {
                        break;
                    }
                }
                None => break,
            }
            j += 2;
        }
        let refined = sum * h;
        let change = (refined - estimate).magnitude();
        estimate = refined;
        if change <= opts.target(refined.magnitude()) {
            return Ok(QuadResult {
                value: refined,
                error: change,
                evaluations,
            });
        }
    }
    Err(Error::accuracy(
        format!("tanh-sinh on [{a}, {b}] did not converge"),
        Some(estimate.as_pair()),
    ))
}

/// Integral over `[0, end]` with a tanh-sinh first panel `[0, edges[0]]`
/// and adaptive Gauss–Kronrod over the remaining panels separated by `edges`.
///
/// This is the shape of every radial integral here: the integrand may carry
/// an integrable power singularity at r = 0 and is smooth elsewhere apart
/// from the listed kinks.
pub fn radial_integral<T, F>(
    mut f: F,
    first_panel_end: f64,
    end: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let split = first_panel_end.min(end);
    let head = tanh_sinh(&mut f, 0.0, split, opts)?;
    if split >= end {
        return Ok(head);
    }
    let tail = gauss_kronrod(&mut f, split, end, breakpoints, opts)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
    })
}
