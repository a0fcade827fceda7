use super::{
    fit_window, loglog_exponent, scale_slopes, CircleNorm, CriterionVerdict, Evidence, Status,
    Thresholds,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Partial integrals `I(eps_k) = int_{eps_k}^{eps_0} dr / ||Q||(r)` (trapezoid in `log r`).
pub(crate) fn partial_inverse_integrals(norm: &CircleNorm) -> (Vec<f64>, Vec<f64>) {
    let g: Vec<f64> = norm
        .radii
        .iter()
        .zip(&norm.values)
        .map(|(r, v)| if *v == 0.0 { f64::INFINITY } else { r / v })
        .collect();
    let mut partial = vec![0.0; g.len()];
    for k in 1..g.len() {
        let dlog = (norm.radii[k - 1] / norm.radii[k]).ln();
        partial[k] = partial[k - 1] + 0.5 * (g[k - 1] + g[k]) * dlog;
    }
    (g, partial)
}

fn require_span(norm: &CircleNorm) -> Result<()> {
    if norm.radii.len() < 20 || norm.decades() < 4.0 - 1e-9 {
        return Err(Error::Precondition(format!(
            "need >= 20 radii over >= 4 decades, got {} over {:.2}",
            norm.radii.len(),
            norm.decades()
        )));
    }
    Ok(())
}

/// Decides whether `int_0 dr / ||Q||(r)` diverges.
///
/// The integrand in `u = log(1/r)` is `r / ||Q||(r)`. Its log-log exponent
/// against `u` separates the divergent regime (`>= -1`, e.g. `Q = 1` gives
/// `0`, `Q = log 1/r` gives `-1`) from the convergent one (`< -1`).
pub fn divergence_test(norm: &CircleNorm, th: &Thresholds) -> Result<CriterionVerdict> {
    require_span(norm)?;
    let (g, partial) = partial_inverse_integrals(norm);
    let win = fit_window(&norm.radii, th.fit_decades);
    let radii = &norm.radii[win.clone()];
    let series: Vec<(f64, f64)> = norm.radii.iter().copied().zip(partial.iter().copied()).collect();
    let radii_range = (radii[0], radii[radii.len() - 1]);

    if norm.values.iter().any(|v| *v == 0.0) {
        return Ok(CriterionVerdict {
            status: Status::Satisfied,
            evidence: Evidence {
                scale: "infinite".into(),
                exponent: f64::INFINITY,
                slope_log: f64::INFINITY,
                slope_loglog: f64::INFINITY,
                partial: series,
                radii_range,
            },
            reason: Some("||Q||(r) = 0 on sampled radii; a/0 = +inf".into()),
        });
    }

    let (slope_log, slope_loglog) = scale_slopes(radii, &partial[win.clone()]);
    let exponent = loglog_exponent(radii, &g[win.clone()]);
    let total = *partial.last().unwrap();
    let decade_ago = fit_window(&norm.radii, 1.0).start;
    let tail_increment = (total - partial[decade_ago]) / total;

    let Some(exponent) = exponent else {
        return Ok(CriterionVerdict::inconclusive(
            Evidence {
                scale: "none".into(),
                exponent: f64::NAN,
                slope_log,
                slope_loglog,
                partial: series,
                radii_range,
            },
            "fit window has radii >= 1 or non-positive integrand",
        ));
    };
    let scale = if exponent > -0.5 { "log" } else { "loglog" };
    let evidence = Evidence {
        scale: scale.into(),
        exponent,
        slope_log,
        slope_loglog,
        partial: series,
        radii_range,
    };
    let status = if exponent >= -1.0 - th.harmonic_margin {
        Status::Satisfied
    } else if exponent <= -th.convergent_exponent || tail_increment < th.tail {
        Status::Fails
    } else {
        return Ok(CriterionVerdict::inconclusive(
            evidence,
            format!("integrand exponent {exponent:.3} between divergence and convergence cutoffs"),
        ));
    };
    Ok(CriterionVerdict {
        status,
        evidence,
        reason: None,
    })
}

/// Growth model for the circle average `q(r) = ||Q||(r) / (2 pi r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// `q(r) = O(log 1/r)`.
    BigOLog,
    /// `q(r) = o(log(1/r) loglog(1/r))`.
    LittleOLogLogLog,
}

/// Compares the circle average against a growth model.
pub fn circle_average_growth(
    norm: &CircleNorm,
    model: GrowthModel,
    th: &Thresholds,
) -> Result<CriterionVerdict> {
    require_span(norm)?;
    let ratio: Vec<f64> = norm
        .radii
        .iter()
        .zip(&norm.values)
        .map(|(r, v)| {
            let q = v / (2.0 * PI * r);
            let u = -r.ln();
            let m = match model {
                GrowthModel::BigOLog => u,
                GrowthModel::LittleOLogLogLog => u * u.ln(),
            };
            if m > 0.0 {
                q / m
            } else {
                f64::NAN
            }
        })
        .collect();
    let win = fit_window(&norm.radii, th.fit_decades);
    let radii = &norm.radii[win.clone()];
    let (slope_log, slope_loglog) = scale_slopes(radii, &ratio[win.clone()]);
    let series: Vec<(f64, f64)> = norm.radii.iter().copied().zip(ratio.iter().copied()).collect();
    let radii_range = (radii[0], radii[radii.len() - 1]);
    let exponent = if ratio[win.clone()].iter().all(|v| *v == 0.0) {
        Some(f64::NEG_INFINITY)
    } else {
        loglog_exponent(radii, &ratio[win])
    };
    let Some(exponent) = exponent else {
        return Ok(CriterionVerdict::inconclusive(
            Evidence {
                scale: "none".into(),
                exponent: f64::NAN,
                slope_log,
                slope_loglog,
                partial: series,
                radii_range,
            },
            "model undefined on fit window (radii too large)",
        ));
    };
    let evidence = Evidence {
        scale: match model {
            GrowthModel::BigOLog => "log".into(),
            GrowthModel::LittleOLogLogLog => "log*loglog".into(),
        },
        exponent,
        slope_log,
        slope_loglog,
        partial: series,
        radii_range,
    };
    let status = match model {
        GrowthModel::BigOLog if exponent <= th.bounded => Status::Satisfied,
        GrowthModel::BigOLog if exponent >= th.unbounded => Status::Fails,
        GrowthModel::LittleOLogLogLog if exponent <= -th.o_small => Status::Satisfied,
        GrowthModel::LittleOLogLogLog if exponent >= -th.o_flat => Status::Fails,
        _ => {
            return Ok(CriterionVerdict::inconclusive(
                evidence,
                format!("ratio exponent {exponent:.3} between cutoffs"),
            ))
        }
    };
    Ok(CriterionVerdict {
        status,
        evidence,
        reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{circle_norm, log_radii, QuadratureOptions, ScalarFn};
    use crate::geometry::{c, C64};
    use crate::grid::Domain;

    fn norm_of(q: &ScalarFn) -> CircleNorm {
        let radii = log_radii(0.5, 5.0, 12);
        circle_norm(q, &Domain::unit_disk(), c(0.0, 0.0), &radii, &QuadratureOptions::default())
            .unwrap()
    }

    fn z() -> C64 {
        c(0.0, 0.0)
    }

    #[test]
    fn partial_integral_matches_closed_form_for_unit_density() {
        let n = norm_of(&ScalarFn::Constant(1.0));
        let (_, p) = partial_inverse_integrals(&n);
        let eps = *n.radii.last().unwrap();
        let want = (0.5 / eps).ln() / (2.0 * PI);
        assert!((p.last().unwrap() - want).abs() < 1e-3 * want);
    }

    #[test]
    fn divergence_examples() {
        let th = Thresholds::default();
        let v = divergence_test(&norm_of(&ScalarFn::Constant(1.0)), &th).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        assert_eq!(v.evidence.scale, "log");
        let v = divergence_test(&norm_of(&ScalarFn::InverseRadius(z())), &th).unwrap();
        assert_eq!(v.status, Status::Fails);
        let v = divergence_test(&norm_of(&ScalarFn::LogInverse(z())), &th).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        assert_eq!(v.evidence.scale, "loglog");
    }

    #[test]
    fn short_radius_range_is_rejected() {
        let radii = log_radii(0.5, 2.0, 12);
        let n = circle_norm(&|_: C64| 1.0, &Domain::unit_disk(), z(), &radii, &QuadratureOptions::default())
            .unwrap();
        assert!(matches!(
            divergence_test(&n, &Thresholds::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vanishing_norm_counts_as_divergent() {
        let mut n = norm_of(&ScalarFn::InverseRadius(z()));
        n.values[30] = 0.0;
        let v = divergence_test(&n, &Thresholds::default()).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        assert!(v.reason.is_some());
    }

    #[test]
    fn circle_average_examples() {
        let th = Thresholds::default();
        let log = norm_of(&ScalarFn::LogInverse(z()));
        assert_eq!(
            circle_average_growth(&log, GrowthModel::BigOLog, &th).unwrap().status,
            Status::Satisfied
        );
        assert_eq!(
            circle_average_growth(&log, GrowthModel::LittleOLogLogLog, &th).unwrap().status,
            Status::Satisfied
        );
        let one = norm_of(&ScalarFn::Constant(1.0));
        assert_eq!(
            circle_average_growth(&one, GrowthModel::BigOLog, &th).unwrap().status,
            Status::Satisfied
        );
        let inv = norm_of(&ScalarFn::InverseRadius(z()));
        for m in [GrowthModel::BigOLog, GrowthModel::LittleOLogLogLog] {
            assert_eq!(circle_average_growth(&inv, m, &th).unwrap().status, Status::Fails);
        }
    }
}
