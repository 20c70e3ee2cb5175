//! The two-parameter Mittag-Leffler function `E_{β,γ}(z) = Σ z^k / Γ(βk + γ)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{Accuracy, GammaProgression, PowerSeries, ScaledValue};

/// Term cap for [`ml_eval`].
pub const DEFAULT_ML_MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLFunctionParams {
    pub beta: f64,
    pub gamma_param: f64,
}

impl MLFunctionParams {
    pub fn new(beta: f64, gamma_param: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) || !(gamma_param > 0.0 && gamma_param.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Mittag-Leffler parameters need beta > 0 and gamma > 0 (got {beta}, {gamma_param})"
            )));
        }
        Ok(Self { beta, gamma_param })
    }

    /// Growth order `1/β` of the entire function.
    pub fn order(&self) -> f64 {
        1.0 / self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MLEval {
    pub value: [f64; 2],
    pub terms: usize,
    pub tail_bound: f64,
    /// Certified bound on |value − E(z)|, truncation and rounding together.
    pub error_bound: f64,
    /// Working precision in bits (53 = plain double precision).
    pub precision: u32,
}

/// `E_{β,γ}` with cached coefficients; reuse it for many evaluations.
#[derive(Debug)]
pub struct MittagLeffler {
    params: MLFunctionParams,
    series: PowerSeries,
}

impl MittagLeffler {
    pub fn new(params: MLFunctionParams, max_terms: usize) -> Result<Self> {
        let coeffs = GammaProgression::new(params.gamma_param, params.beta, 1.0)?;
        Ok(Self {
            params,
            series: PowerSeries::new(Arc::new(coeffs), max_terms),
        })
    }

    pub fn params(&self) -> MLFunctionParams {
        self.params
    }

    /// Scaled evaluation, for arguments where the value leaves f64 range.
    pub fn eval_scaled(&self, z: Complex64, acc: Accuracy) -> Result<(ScaledValue, usize, f64, u32)> {
        let r = self.series.eval(z, acc)?;
        Ok((r.value, r.terms, r.tail_bound * r.value.ln_scale.exp(), r.precision))
    }

    /// `E(z)` with total error below the absolute tolerance `tol`.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<MLEval> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let r = self.series.eval(z, Accuracy::absolute(tol))?;
        let scale = r.value.ln_scale.exp();
        let value = r.value.value();
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::accuracy(
                format!("|E(z)| = e^{:.6} overflows double precision", r.value.ln_abs()),
                None,
            ));
        }
        Ok(MLEval {
            value: [value.re, value.im],
            terms: r.terms,
            tail_bound: r.tail_bound * scale,
            error_bound: r.value.error * scale,
            precision: r.precision,
        })
    }
}

/// One-shot evaluation with the default term cap.
pub fn ml_eval(params: MLFunctionParams, z: Complex64, tol: f64) -> Result<MLEval> {
    MittagLeffler::new(params, DEFAULT_ML_MAX_TERMS)?.eval(z, tol)
}
