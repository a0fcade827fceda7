use super::circle::{check_radii, circle_integral};
use super::{
    circle_norm, fit_window, log_radii, loglog_exponent, scale_slopes, CriterionVerdict, Density,
    Evidence, QuadratureOptions, Status, Thresholds,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::C64;
use crate::grid::Domain;
use crate::quad::gauss_legendre;
use serde::{Deserialize, Serialize};

const PER_DECADE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnularWeight {
    /// `|z - z0|^-2`, compared against `log^2(1/eps)`.
    InverseSquare,
    /// `(|z - z0| log(1/|z - z0|))^-2`, compared against `(loglog 1/eps)^2`.
    InverseSquareLog,
}

impl AnnularWeight {
    fn weight(self, r: f64) -> f64 {
        match self {
            AnnularWeight::InverseSquare => 1.0 / (r * r),
            AnnularWeight::InverseSquareLog => {
                let l = -r.ln();
                1.0 / (r * r * l * l)
            }
        }
    }

    /// Derivative of the comparison model with respect to `u = log 1/eps`.
    fn model_derivative(self, u: f64) -> f64 {
        match self {
            AnnularWeight::InverseSquare => 2.0 * u,
            AnnularWeight::InverseSquareLog => 2.0 * u.ln() / u,
        }
    }

    fn model(self, u: f64) -> f64 {
        match self {
            AnnularWeight::InverseSquare => u * u,
            AnnularWeight::InverseSquareLog => u.ln().powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnularResult {
    /// `int_{eps < |z - z0| < eps0} Q w dm`.
    pub value: f64,
    /// `(eps_k, A(eps_k))` on the log lattice from `eps0` down to `eps`.
    pub sequence: Vec<(f64, f64)>,
    /// Whether `A(eps) = o(model(eps))`.
    pub verdict: CriterionVerdict,
}

/// Radial lattice plus cumulative `int_{r_k}^{eps0} f(r) dr` for a radial
/// integrand built from circle norms at Gauss nodes in `log r`.
struct RadialIntegrals {
    radii: Vec<f64>,
    norms: Vec<f64>,
    /// Cumulative integrals, one vector per integrand.
    cumulative: Vec<Vec<f64>>,
}

fn radial_integrals(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    eps: f64,
    eps0: f64,
    opts: &QuadratureOptions,
    integrands: &[&(dyn Fn(f64, f64) -> f64 + Sync)],
) -> Result<RadialIntegrals> {
    if !(eps > 0.0 && eps < eps0) {
        return Err(Error::arg(format!("need 0 < eps < eps0, got {eps}, {eps0}")));
    }
    let decades = (eps0 / eps).log10();
    let count = ((decades * PER_DECADE as f64).ceil() as usize).max(1);
    let radii: Vec<f64> = (0..=count)
        .map(|k| eps0 * (eps / eps0).powf(k as f64 / count as f64))
        .collect();
    check_radii(&radii, domain, z0)?;
    let lattice = circle_norm(q, domain, z0, &radii, opts)?;

    // Gauss nodes in s = log r on each lattice interval.
    let nodes: Vec<(usize, f64, f64)> = (0..count)
        .flat_map(|k| {
            let (a, b) = (radii[k + 1].ln(), radii[k].ln());
            gauss_legendre(a, b).map(move |(s, w)| (k, s.exp(), w))
        })
        .collect();
    let node_norms = exec::map_collect(opts.exec, nodes.len(), |i| {
        let r = nodes[i].1;
        circle_integral(q, domain, z0, r, opts.nodes_for(r)).map(|(v, _)| v)
    });
    let node_norms: Vec<f64> = node_norms.into_iter().collect::<Result<_>>()?;

    let mut cumulative = vec![vec![0.0; count + 1]; integrands.len()];
    for (c, f) in integrands.iter().enumerate() {
        let mut per_interval = vec![0.0; count];
        for (i, &(k, r, w)) in nodes.iter().enumerate() {
            per_interval[k] += w * r * f(r, node_norms[i]);
        }
        for k in 0..count {
            cumulative[c][k + 1] = cumulative[c][k] + per_interval[k];
        }
    }
    Ok(RadialIntegrals {
        radii,
        norms: lattice.values,
        cumulative,
    })
}

fn o_verdict(
    radii: &[f64],
    lambda: &[f64],
    ratio_series: Vec<(f64, f64)>,
    scale: &str,
    th: &Thresholds,
) -> CriterionVerdict {
    let win = fit_window(radii, th.fit_decades);
    let wr = &radii[win.clone()];
    let ratios: Vec<f64> = ratio_series[win.clone()].iter().map(|p| p.1).collect();
    let (slope_log, slope_loglog) = scale_slopes(wr, &ratios);
    let radii_range = (wr[0], wr[wr.len() - 1]);
    let exponent = if lambda[win.clone()].iter().all(|v| *v == 0.0) {
        Some(f64::NEG_INFINITY)
    } else {
        loglog_exponent(wr, &lambda[win])
    };
    let decades = (radii[0] / radii[radii.len() - 1]).log10();
    let mut evidence = Evidence {
        scale: scale.into(),
        exponent: exponent.unwrap_or(f64::NAN),
        slope_log,
        slope_loglog,
        partial: ratio_series,
        radii_range,
    };
    let Some(exponent) = exponent else {
        return CriterionVerdict::inconclusive(evidence, "growth ratio undefined on fit window");
    };
    if decades < 3.0 - 1e-9 {
        return CriterionVerdict::inconclusive(evidence, "fewer than 3 decades of radii");
    }
    evidence.exponent = exponent;
    let status = if exponent <= -th.o_small {
        Status::Satisfied
    } else if exponent >= -th.o_flat {
        Status::Fails
    } else {
        return CriterionVerdict::inconclusive(
            evidence,
            format!("growth-ratio exponent {exponent:.3} between cutoffs"),
        );
    };
    CriterionVerdict {
        status,
        evidence,
        reason: None,
    }
}

/// Weighted annular integral of `Q` and its `o(model)` verdict.
///
/// The verdict compares the growth rates `dA/du` and `dM/du` (`u = log 1/eps`);
/// their ratio tends to zero exactly when `A = o(M)` for the monotone models used.
#[allow(clippy::too_many_arguments)]
pub fn annular_weighted_integral(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    eps: f64,
    eps0: f64,
    weight: AnnularWeight,
    opts: &QuadratureOptions,
    th: &Thresholds,
) -> Result<AnnularResult> {
    let f = move |r: f64, norm: f64| weight.weight(r) * norm;
    let ri = radial_integrals(q, domain, z0, eps, eps0, opts, &[&f])?;
    let a = &ri.cumulative[0];
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature {
            radius: eps,
            angle: f64::NAN,
        });
    }
    let lambda: Vec<f64> = ri
        .radii
        .iter()
        .zip(&ri.norms)
        .map(|(&r, &norm)| r * weight.weight(r) * norm / weight.model_derivative(-r.ln()))
        .collect();
    let ratio: Vec<(f64, f64)> = ri
        .radii
        .iter()
        .zip(a)
        .map(|(&r, &v)| (r, v / weight.model(-r.ln())))
        .collect();
    let scale = match weight {
        AnnularWeight::InverseSquare => "log^2",
        AnnularWeight::InverseSquareLog => "loglog^2",
    };
    let verdict = o_verdict(&ri.radii, &lambda, ratio, scale, th);
    Ok(AnnularResult {
        value: *a.last().unwrap(),
        sequence: ri.radii.iter().copied().zip(a.iter().copied()).collect(),
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiFamily {
    /// `psi(t) = 1/t`.
    Inverse,
    /// `psi(t) = 1/(t log(1/t))`.
    InverseLog,
    /// `psi(t) = 1/||Q||(t)`.
    InverseNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiResult {
    pub verdict: CriterionVerdict,
    /// `int_{eps < |z - z0| < eps0} Q psi^2 dm`.
    pub area_integral: f64,
    /// `I(eps) = int_eps^eps0 psi`.
    pub psi_integral: f64,
    /// For `psi = 1/||Q||`: independent polar area quadrature of `Q psi^2`
    /// and its relative deviation from `I(eps)`.
    pub fubini: Option<(f64, f64)>,
}

/// Checks `int Q psi^2 dm = o(I(eps)^2)` for a family of `psi`.
#[allow(clippy::too_many_arguments)]
pub fn psi_family_test(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    family: PsiFamily,
    eps: f64,
    eps0: f64,
    opts: &QuadratureOptions,
    th: &Thresholds,
) -> Result<PsiResult> {
    let psi = move |r: f64, norm: f64| match family {
        PsiFamily::Inverse => 1.0 / r,
        PsiFamily::InverseLog => 1.0 / (r * (-r.ln())),
        PsiFamily::InverseNorm => {
            if norm == 0.0 {
                f64::INFINITY
            } else {
                1.0 / norm
            }
        }
    };
    if family == PsiFamily::InverseLog && eps0 >= 1.0 {
        return Err(Error::arg("psi = 1/(t log 1/t) needs eps0 < 1"));
    }
    let area = move |r: f64, norm: f64| {
        let p = psi(r, norm);
        if norm == 0.0 {
            0.0
        } else {
            p * p * norm
        }
    };
    let ri = radial_integrals(q, domain, z0, eps, eps0, opts, &[&psi, &area])?;
    let (i_seq, a_seq) = (&ri.cumulative[0], &ri.cumulative[1]);
    let total_i = *i_seq.last().unwrap();
    if total_i == 0.0 {
        return Err(Error::arg("I(eps) = 0"));
    }
    // Skip the first lattice point where I = 0.
    let radii = &ri.radii[1..];
    let lambda: Vec<f64> = (1..ri.radii.len())
        .map(|k| psi(ri.radii[k], ri.norms[k]) * ri.norms[k] / (2.0 * i_seq[k]))
        .collect();
    let ratio: Vec<(f64, f64)> = (1..ri.radii.len())
        .map(|k| (ri.radii[k], a_seq[k] / (i_seq[k] * i_seq[k])))
        .collect();
    let verdict = o_verdict(radii, &lambda, ratio, "I^2", th);

    let fubini = if family == PsiFamily::InverseNorm {
        let area_2d = polar_area_check(q, domain, z0, eps, eps0, opts)?;
        Some((area_2d, (area_2d - total_i).abs() / total_i))
    } else {
        None
    };
    Ok(PsiResult {
        verdict,
        area_integral: *a_seq.last().unwrap(),
        psi_integral: total_i,
        fubini,
    })
}

/// `int Q / ||Q||^2 dm` over the annulus by a tensor polar rule that differs
/// from the circle-norm quadrature: Gauss panels in `r` and 3/2 as many
/// angular nodes.
fn polar_area_check(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    eps: f64,
    eps0: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let panels = log_radii(eps0, (eps0 / eps).log10(), 2 * PER_DECADE);
    let mut nodes = Vec::new();
    for w in panels.windows(2) {
        nodes.extend(gauss_legendre(w[1], w[0]));
    }
    let last = *panels.last().unwrap();
    if last > eps * (1.0 + 1e-12) {
        nodes.extend(gauss_legendre(eps, last));
    }
    let terms = exec::map_collect(opts.exec, nodes.len(), |i| -> Result<f64> {
        let (r, w) = nodes[i];
        let (norm, _) = circle_integral(q, domain, z0, r, opts.nodes_for(r))?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        let m = (opts.nodes_for(r) * 3 / 2).div_ceil(4) * 4;
        let (ring, _) = circle_integral(q, domain, z0, r, m)?;
        Ok(w * ring / (norm * norm))
    });
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpIntegral {
    /// `int_{D ∩ B(z0, eps0)} e^{alpha Q} dm`, `+inf` when divergent.
    pub value: f64,
    /// Contribution of each decade `[eps0 10^-(d+1), eps0 10^-d]`.
    pub decade_sums: Vec<f64>,
    pub finite: bool,
}

/// Exponential integrability of `Q` near `z0`.
#[allow(clippy::too_many_arguments)]
pub fn exp_integrability(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    alpha: f64,
    eps0: f64,
    decades: usize,
    opts: &QuadratureOptions,
    th: &Thresholds,
) -> Result<ExpIntegral> {
    if !(alpha > 0.0) {
        return Err(Error::arg("alpha must be positive"));
    }
    check_radii(&[eps0], domain, z0)?;
    let e = |z: C64| (alpha * q.value(z)).exp();
    let sub = 4;
    let nodes: Vec<(usize, f64, f64)> = (0..decades)
        .flat_map(|d| {
            let hi = eps0 * 10f64.powi(-(d as i32));
            (0..sub).flat_map(move |s| {
                let a = (hi * 10f64.powf(-((s + 1) as f64) / sub as f64)).ln();
                let b = (hi * 10f64.powf(-(s as f64) / sub as f64)).ln();
                gauss_legendre(a, b).map(move |(x, w)| (d, x.exp(), w))
            })
        })
        .collect();
    let vals = exec::map_collect(opts.exec, nodes.len(), |i| {
        let (_, r, w) = nodes[i];
        // Overflow of e^{alpha Q} surfaces as a non-finite sample: +inf.
        match circle_integral(&e, domain, z0, r, opts.nodes_for(r)) {
            Ok((v, _)) => Ok(w * r * v),
            Err(Error::Quadrature { .. }) => Ok(f64::INFINITY),
            Err(other) => Err(other),
        }
    });
    let mut decade_sums = vec![0.0; decades];
    for (i, v) in vals.into_iter().enumerate() {
        decade_sums[nodes[i].0] += v?;
    }
    let total: f64 = decade_sums.iter().sum();
    if !total.is_finite() {
        return Ok(ExpIntegral {
            value: f64::INFINITY,
            decade_sums,
            finite: false,
        });
    }
    let last = decade_sums[decades - 1];
    let prev = decade_sums[decades.saturating_sub(2)];
    let (value, finite) = if total == 0.0 || last <= th.tail * total {
        (total, true)
    } else if prev > 0.0 && last / prev < 0.9 {
        let rho = last / prev;
        (total + last * rho / (1.0 - rho), true)
    } else {
        (f64::INFINITY, false)
    };
    Ok(ExpIntegral {
        value,
        decade_sums,
        finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::ScalarFn;
    use crate::geometry::c;
    use std::f64::consts::PI;

    fn z() -> C64 {
        c(0.0, 0.0)
    }
    fn d() -> Domain {
        Domain::unit_disk()
    }
    fn o() -> QuadratureOptions {
        QuadratureOptions::default()
    }
    fn th() -> Thresholds {
        Thresholds::default()
    }

    #[test]
    fn annular_closed_forms() {
        let (eps, eps0) = (0.5e-5, 0.5);
        let one = annular_weighted_integral(
            &ScalarFn::Constant(1.0), &d(), z(), eps, eps0, AnnularWeight::InverseSquare, &o(), &th(),
        )
        .unwrap();
        let want = 2.0 * PI * (eps0 / eps).ln();
        assert!((one.value - want).abs() < 1e-6 * want);
        assert_eq!(one.verdict.status, Status::Satisfied);

        let log = annular_weighted_integral(
            &ScalarFn::LogInverse(z()), &d(), z(), eps, eps0, AnnularWeight::InverseSquare, &o(), &th(),
        )
        .unwrap();
        let (u, u0) = (-eps.ln(), -eps0.ln());
        let want = PI * (u * u - u0 * u0);
        assert!((log.value - want).abs() < 1e-6 * want);
        assert_eq!(log.verdict.status, Status::Fails);

        let loglog = annular_weighted_integral(
            &ScalarFn::LogInverse(z()), &d(), z(), eps, eps0, AnnularWeight::InverseSquareLog, &o(), &th(),
        )
        .unwrap();
        let want = 2.0 * PI * (u / u0).ln();
        assert!((loglog.value - want).abs() < 1e-6 * want);
        assert_eq!(loglog.verdict.status, Status::Satisfied);
    }

    #[test]
    fn psi_families() {
        let (eps, eps0) = (0.5e-5, 0.5);
        let r = psi_family_test(&ScalarFn::Constant(1.0), &d(), z(), PsiFamily::Inverse, eps, eps0, &o(), &th())
            .unwrap();
        assert_eq!(r.verdict.status, Status::Satisfied);
        let r = psi_family_test(&ScalarFn::LogInverse(z()), &d(), z(), PsiFamily::InverseLog, eps, eps0, &o(), &th())
            .unwrap();
        assert_eq!(r.verdict.status, Status::Satisfied);
        for q in [ScalarFn::Constant(1.0), ScalarFn::LogInverse(z()), ScalarFn::InverseRadius(z())] {
            let r = psi_family_test(&q, &d(), z(), PsiFamily::InverseNorm, eps, eps0, &o(), &th()).unwrap();
            assert!((r.area_integral - r.psi_integral).abs() <= 1e-12 * r.psi_integral);
            let (_, rel) = r.fubini.unwrap();
            assert!(rel < 0.01, "fubini deviation {rel}");
        }
    }

    #[test]
    fn exp_integrability_examples() {
        let one = exp_integrability(&ScalarFn::Constant(1.0), &d(), z(), 1.0, 0.5, 12, &o(), &th()).unwrap();
        let want = 1f64.exp() * PI * 0.25;
        assert!(one.finite && (one.value - want).abs() < 1e-3 * want);
        let log = exp_integrability(&ScalarFn::LogInverse(z()), &d(), z(), 1.0, 0.5, 12, &o(), &th()).unwrap();
        assert!(log.finite && (log.value - 2.0 * PI * 0.5).abs() < 1e-3 * PI);
        let two = ScalarFn::Scaled(2.0, Box::new(ScalarFn::LogInverse(z())));
        let r = exp_integrability(&two, &d(), z(), 1.0, 0.5, 12, &o(), &th()).unwrap();
        assert!(!r.finite && r.value.is_infinite());
    }
}
