//! Numerical admissibility criteria for the majorant `Q` of a degenerate
//! Beltrami equation.
//!
//! Every test here is an asymptotic statement as `r -> 0`. A finite sample can
//! only estimate the limit, so each verdict is decided by regression over the
//! deepest decades against the cutoffs in [`Thresholds`], and `Inconclusive`
//! is returned when the evidence falls between them.

mod annular;
mod circle;
mod divergence;
mod oscillation;
mod phi;

pub use annular::{
    annular_weighted_integral, exp_integrability, psi_family_test, AnnularResult, AnnularWeight,
    ExpIntegral, PsiFamily, PsiResult,
};
pub use circle::{circle_norm, log_radii, CircleNorm, QuadratureOptions};
pub use divergence::{circle_average_growth, divergence_test, GrowthModel};
pub use oscillation::{bmo_norm, disk_mean, fmo_estimate, BmoEstimate, FmoReport, FmoStatus};
pub use phi::{phi_condition_suite, PhiCondition, PhiConditionResult, PhiSpec, PhiSuite};

use crate::beltrami::{
    dilatation_of, tangent_dilatation_of, BeltramiCoefficient, CoefficientFamily,
};
use crate::error::Result;
use crate::geometry::C64;
use crate::grid::ScalarGrid;
use crate::quad::fit_line;
use serde::{Deserialize, Serialize};

/// A real function of a point in the plane.
pub trait Density: Sync {
    fn value(&self, z: C64) -> f64;
}

impl<F: Fn(C64) -> f64 + Sync> Density for F {
    fn value(&self, z: C64) -> f64 {
        self(z)
    }
}

impl Density for ScalarGrid {
    fn value(&self, z: C64) -> f64 {
        self.sample(z)
    }
}

/// Catalog of scalar functions used as majorants `Q` or as oscillation inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarSpec {
    Constant { value: f64 },
    /// `log(1/|z - c|)`.
    LogInverse { center: C64 },
    /// `1/|z - c|`.
    InverseRadius { center: C64 },
    /// `log^2(1/|z - c|)`.
    LogInverseSquared { center: C64 },
    /// `1 + log(1/|z - c|)`.
    OnePlusLogInverse { center: C64 },
    /// `K_mu(z)`.
    Dilatation { coefficient: CoefficientFamily },
    /// `K^T_mu(z, c)`.
    TangentDilatation {
        coefficient: CoefficientFamily,
        center: C64,
    },
    Scaled { factor: f64, inner: Box<ScalarSpec> },
}

impl ScalarSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarSpec::Constant { .. } => "constant",
            ScalarSpec::LogInverse { .. } => "log_inverse",
            ScalarSpec::InverseRadius { .. } => "inverse_radius",
            ScalarSpec::LogInverseSquared { .. } => "log_inverse_squared",
            ScalarSpec::OnePlusLogInverse { .. } => "one_plus_log_inverse",
            ScalarSpec::Dilatation { .. } => "dilatation",
            ScalarSpec::TangentDilatation { .. } => "tangent_dilatation",
            ScalarSpec::Scaled { .. } => "scaled",
        }
    }

    pub fn build(&self) -> Result<ScalarFn> {
        Ok(match self {
            ScalarSpec::Constant { value } => ScalarFn::Constant(*value),
            ScalarSpec::LogInverse { center } => ScalarFn::LogInverse(*center),
            ScalarSpec::InverseRadius { center } => ScalarFn::InverseRadius(*center),
            ScalarSpec::LogInverseSquared { center } => ScalarFn::LogInverseSquared(*center),
            ScalarSpec::OnePlusLogInverse { center } => ScalarFn::OnePlusLogInverse(*center),
            ScalarSpec::Dilatation { coefficient } => {
                ScalarFn::Dilatation(BeltramiCoefficient::new(coefficient.clone())?)
            }
            ScalarSpec::TangentDilatation {
                coefficient,
                center,
            } => ScalarFn::TangentDilatation(BeltramiCoefficient::new(coefficient.clone())?, *center),
            ScalarSpec::Scaled { factor, inner } => {
                ScalarFn::Scaled(*factor, Box::new(inner.build()?))
            }
        })
    }
}

/// Evaluable form of a [`ScalarSpec`].
#[derive(Debug, Clone)]
pub enum ScalarFn {
    Constant(f64),
    LogInverse(C64),
    InverseRadius(C64),
    LogInverseSquared(C64),
    OnePlusLogInverse(C64),
    Dilatation(BeltramiCoefficient),
    TangentDilatation(BeltramiCoefficient, C64),
    Scaled(f64, Box<ScalarFn>),
}

impl Density for ScalarFn {
    fn value(&self, z: C64) -> f64 {
        match self {
            ScalarFn::Constant(v) => *v,
            ScalarFn::LogInverse(c) => -(z - c).norm().ln(),
            ScalarFn::InverseRadius(c) => 1.0 / (z - c).norm(),
            ScalarFn::LogInverseSquared(c) => (z - c).norm().ln().powi(2),
            ScalarFn::OnePlusLogInverse(c) => 1.0 - (z - c).norm().ln(),
            ScalarFn::Dilatation(coef) => coef
                .eval_flagged(z)
                .and_then(|(mu, _)| dilatation_of(mu))
                .unwrap_or(f64::NAN),
            ScalarFn::TangentDilatation(coef, c) => coef
                .eval_flagged(z)
                .and_then(|(mu, _)| tangent_dilatation_of(mu, z, *c))
                .unwrap_or(f64::NAN),
            ScalarFn::Scaled(f, inner) => f * inner.value(z),
        }
    }
}

/// Cutoffs used to turn finite-sample evidence into verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Decades of radii (counted from the smallest) used for every fit.
    pub fit_decades: f64,
    /// A divergence integrand decaying like `u^s` in `u = log 1/r` counts as
    /// divergent when `s >= -1 - harmonic_margin`.
    pub harmonic_margin: f64,
    /// ... and as convergent when `s <= -convergent_exponent`.
    pub convergent_exponent: f64,
    /// Cauchy criterion: the last-decade increment is below `tail` times the total.
    pub tail: f64,
    /// An `o(.)` ratio is vanishing when its log-log slope is `<= -o_small`.
    pub o_small: f64,
    /// ... and non-vanishing when the slope is `>= -o_flat`.
    pub o_flat: f64,
    /// An `O(.)` ratio is bounded when its log-log slope is `<= bounded`.
    pub bounded: f64,
    /// ... and unbounded when the slope is `>= unbounded`.
    pub unbounded: f64,
    /// FMO: the last decade may exceed the previous one by at most this factor.
    pub fmo_bounded_ratio: f64,
    /// FMO: growth by at least this factor per decade signals infinite oscillation.
    pub fmo_growth_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            fit_decades: 2.0,
            harmonic_margin: 0.1,
            convergent_exponent: 1.5,
            tail: 1e-3,
            o_small: 0.25,
            o_flat: 0.15,
            bounded: 0.1,
            unbounded: 0.5,
            fmo_bounded_ratio: 2.0,
            fmo_growth_ratio: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn letter(self) -> char {
        match self {
            Status::Satisfied => 'S',
            Status::Fails => 'F',
            Status::Inconclusive => 'I',
        }
    }
}

/// Numeric evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Scale in which the growth was measured, e.g. `"log"` or `"loglog"`.
    pub scale: String,
    /// Fitted log-log exponent against `u = log(1/r)` over the fit window.
    pub exponent: f64,
    /// Linear-fit slopes of the partial sequence against `log 1/r` and `loglog 1/r`.
    pub slope_log: f64,
    pub slope_loglog: f64,
    /// `(r, value)` pairs of the partial sequence, largest radius first.
    pub partial: Vec<(f64, f64)>,
    /// Radii spanned by the fit window.
    pub radii_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub status: Status,
    pub evidence: Evidence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CriterionVerdict {
    pub fn inconclusive(evidence: Evidence, reason: impl Into<String>) -> Self {
        CriterionVerdict {
            status: Status::Inconclusive,
            evidence,
            reason: Some(reason.into()),
        }
    }
}

/// Indices of samples (radii sorted decreasingly) inside the fit window.
pub(crate) fn fit_window(radii: &[f64], decades: f64) -> std::ops::Range<usize> {
    let smallest = *radii.last().expect("non-empty radii");
    let cutoff = smallest * 10f64.powf(decades);
    let start = radii.iter().position(|&r| r <= cutoff * (1.0 + 1e-12)).unwrap_or(0);
    start..radii.len()
}

/// Log-log slope of `values` against `u = log(1/r)` over a window.
pub(crate) fn loglog_exponent(radii: &[f64], values: &[f64]) -> Option<f64> {
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for (&r, &v) in radii.iter().zip(values) {
        let u = -r.ln();
        if u <= 0.0 || !(v > 0.0) || !v.is_finite() {
            return None;
        }
        xs.push(u.ln());
        ys.push(v.ln());
    }
    if xs.len() < 3 {
        return None;
    }
    Some(fit_line(&xs, &ys).0)
}

/// Slopes of `values` against `log 1/r` and `loglog 1/r`.
pub(crate) fn scale_slopes(radii: &[f64], values: &[f64]) -> (f64, f64) {
    let logs: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let loglogs: Vec<f64> = logs.iter().map(|u| u.max(1e-300).ln()).collect();
    (fit_line(&logs, values).0, fit_line(&loglogs, values).0)
}
