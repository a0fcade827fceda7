use super::{CriterionVerdict, Evidence, Status, Thresholds};
use crate::error::{Error, Result};
use crate::quad::{fit_line, gauss_legendre};
use serde::{Deserialize, Serialize};

/// Largest argument used on any integration lattice.
const T_MAX: f64 = 1e300;
const PER_DECADE: usize = 24;

/// A nondecreasing convex `Phi: [0, inf) -> [0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PhiSpec {
    /// `t^p`, `p >= 1`.
    Power { p: f64 },
    /// `e^{alpha t}`.
    Exponential { alpha: f64 },
    /// `exp(alpha (1 + t)^beta)`; convex on `[0, inf)` when `alpha beta >= 1 - beta`.
    StretchedExponential { alpha: f64, beta: f64 },
    /// `t log^beta(e + t)`.
    TLog { beta: f64 },
    /// Power law between knots `(t, Phi)` (linear on a segment touching
    /// `t = 0` or `Phi = 0`); the first knot is at `t = 0` and the last segment's power
    /// law continues to infinity.
    Table { points: Vec<(f64, f64)> },
}

impl PhiSpec {
    pub fn name(&self) -> String {
        match self {
            PhiSpec::Power { p } => format!("t^{p}"),
            PhiSpec::Exponential { alpha } => format!("exp({alpha} t)"),
            PhiSpec::StretchedExponential { alpha, beta } => format!("exp({alpha} (1+t)^{beta})"),
            PhiSpec::TLog { beta } => format!("t log^{beta}(e+t)"),
            PhiSpec::Table { points } => format!("table[{}]", points.len()),
        }
    }

    /// `H(t) = log Phi(t)`, computed without forming `Phi`.
    pub fn h(&self, t: f64) -> f64 {
        match self {
            PhiSpec::Power { p } => p * t.ln(),
            PhiSpec::Exponential { alpha } => alpha * t,
            PhiSpec::StretchedExponential { alpha, beta } => alpha * (1.0 + t).powf(*beta),
            PhiSpec::TLog { beta } => t.ln() + beta * (std::f64::consts::E + t).ln().ln(),
            PhiSpec::Table { points } => table_h(points, t),
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match self {
            PhiSpec::Power { p } => t.powf(*p),
            PhiSpec::TLog { beta } => t * (std::f64::consts::E + t).ln().powf(*beta),
            _ => self.h(t).exp(),
        }
    }

    /// `sup { t : Phi(t) = 0 }`, or 0 when `Phi(0) > 0`.
    pub fn zero_set_end(&self) -> f64 {
        match self {
            PhiSpec::Table { points } => points
                .iter()
                .take_while(|p| p.1 == 0.0)
                .last()
                .map_or(0.0, |p| p.0),
            _ => 0.0,
        }
    }

    /// Generalised inverse `inf { t : Phi(t) >= tau }`.
    pub fn phi_inv(&self, tau: f64) -> f64 {
        invert(|t| self.phi(t), tau, self.zero_set_end())
    }

    /// Inverse of `H`.
    pub fn h_inv(&self, eta: f64) -> f64 {
        invert(|t| self.h(t), eta, self.zero_set_end())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhiSpec::Power { p } if !(*p >= 1.0 && p.is_finite()) => {
                return Err(Error::validation("power exponent must be >= 1"))
            }
            PhiSpec::Exponential { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                return Err(Error::validation("exponential rate must be positive"))
            }
            PhiSpec::StretchedExponential { alpha, beta }
                if !(*alpha > 0.0 && *beta > 0.0 && *beta <= 1.0) =>
            {
                return Err(Error::validation("stretched exponential needs alpha > 0, 0 < beta <= 1"))
            }
            PhiSpec::TLog { beta } if !(*beta >= 0.0 && beta.is_finite()) => {
                return Err(Error::validation("t log^beta needs beta >= 0"))
            }
            PhiSpec::Table { points } => {
                if points.len() < 2 || points[0].0 != 0.0 {
                    return Err(Error::validation("table needs >= 2 knots starting at t = 0"));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::validation("table knots must be strictly increasing in t"));
                }
                if points.iter().any(|p| !(p.1 >= 0.0 && p.1.is_finite())) {
                    return Err(Error::validation("table values must be finite and non-negative"));
                }
                let last = points[points.len() - 1];
                let prev = points[points.len() - 2];
                if !(prev.1 > 0.0 && last.1 > prev.1 && prev.0 > 0.0) {
                    return Err(Error::validation("table must end strictly increasing with positive values"));
                }
            }
            _ => {}
        }
        self.check_shape()
    }

    /// Monotonicity and convexity on a sample lattice.
    fn check_shape(&self) -> Result<()> {
        let mut ts: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
        ts.extend((1..=200).map(|k| 20.0 * 10f64.powf(k as f64 / 50.0)));
        let vals: Vec<f64> = ts.iter().map(|&t| self.phi(t)).collect();
        for i in 1..ts.len() {
            let (a, b) = (vals[i - 1], vals[i]);
            if !b.is_finite() {
                break;
            }
            if b < a * (1.0 - 1e-12) {
                return Err(Error::validation(format!("Phi decreases near t = {}", ts[i])));
            }
            if i + 1 < ts.len() && vals[i + 1].is_finite() {
                let (t0, t1, t2) = (ts[i - 1], ts[i], ts[i + 1]);
                let c = vals[i + 1];
                // Chord slope must not decrease.
                let s1 = (b - a) / (t1 - t0);
                let s2 = (c - b) / (t2 - t1);
                if s2 < s1 - 1e-9 * s1.abs().max(c.abs() / (t2 - t1)).max(1e-300) {
                    return Err(Error::validation(format!("Phi is not convex near t = {t1}")));
                }
            }
        }
        Ok(())
    }
}

fn table_h(points: &[(f64, f64)], t: f64) -> f64 {
    let n = points.len();
    let k = (points.partition_point(|p| p.0 <= t).max(1) - 1).min(n - 2);
    let (t0, p0) = points[k];
    let (t1, p1) = points[k + 1];
    if p0 == 0.0 || t0 == 0.0 {
        // Linear in Phi on a segment touching zero.
        return (p0 + (p1 - p0) * (t - t0) / (t1 - t0)).ln();
    }
    let exponent = (p1 / p0).ln() / (t1 / t0).ln();
    p0.ln() + exponent * (t / t0).ln()
}

/// Smallest `t >= lo` with `f(t) >= y` for nondecreasing `f`, `+inf` past `T_MAX`.
fn invert(f: impl Fn(f64) -> f64, y: f64, lo: f64) -> f64 {
    let mut a = lo;
    let mut b = lo.max(1.0);
    while f(b) < y {
        a = b;
        b *= 2.0;
        if b > T_MAX {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let m = if a > 0.0 && b / a > 4.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
        if m <= a || m >= b {
            break;
        }
        if f(m) >= y {
            b = m;
        } else {
            a = m;
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiCondition {
    /// `int dtau / (tau Phi^{-1}(tau))`.
    InverseTau,
    /// `int H'(t) dt / t`.
    HPrime,
    /// `int dH(t) / t`, Stieltjes.
    HStieltjes,
    /// `int H(t) dt / t^2`.
    HOverSquare,
    /// `int_0^Delta H(1/t) dt`.
    HReciprocal,
    /// `int d eta / H^{-1}(eta)`.
    HInverse,
    /// `int log Phi(t) dt / t^2`.
    LogPhi,
}

impl PhiCondition {
    pub const ALL: [PhiCondition; 7] = [
        PhiCondition::InverseTau,
        PhiCondition::HPrime,
        PhiCondition::HStieltjes,
        PhiCondition::HOverSquare,
        PhiCondition::HReciprocal,
        PhiCondition::HInverse,
        PhiCondition::LogPhi,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiConditionResult {
    pub condition: PhiCondition,
    /// `Satisfied` when the integral diverges.
    pub verdict: CriterionVerdict,
    /// Partial integral up to the lattice end.
    pub partial_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSuite {
    pub phi: String,
    /// Lower limit in `t` used by the `t`-integrals.
    pub t_lower: f64,
    pub results: Vec<PhiConditionResult>,
    /// Every condition received the same status, and none is inconclusive.
    pub agreement: bool,
}

/// Evaluates the divergence integral in every equivalent form.
///
/// `delta` is the lower limit of the `tau`-integral and must exceed `Phi(0)`.
/// The other lower limits are derived from it and pushed up, if necessary,
/// so that `H >= e` on the whole lattice; lower limits never affect
/// divergence. Each integral is sampled on a geometric lattice in its own
/// log-variable `y` and decided by the power of `y` at which its integrand
/// decays over the last two decades.
pub fn phi_condition_suite(spec: &PhiSpec, delta: f64, th: &Thresholds) -> Result<PhiSuite> {
    spec.validate()?;
    let phi0 = spec.phi(0.0);
    if !(delta > phi0) || !delta.is_finite() {
        return Err(Error::arg(format!("delta = {delta} must exceed Phi(0) = {phi0}")));
    }
    let e = std::f64::consts::E;
    let mut t_lo = spec.phi_inv(delta).max(e).max(spec.zero_set_end() * 2.0);
    while spec.h(t_lo) < e {
        t_lo *= 2.0;
    }
    let y_lo = t_lo.ln();
    let y_hi = T_MAX.ln();

    let mut results = Vec::with_capacity(PhiCondition::ALL.len());
    for cond in PhiCondition::ALL {
        let (lo, hi, g): (f64, f64, Box<dyn Fn(f64) -> f64>) = match cond {
            // y = log tau; dtau/(tau Phi^{-1}) = dy / Phi^{-1}(e^y).
            PhiCondition::InverseTau => {
                let lo = spec.phi(t_lo).max(delta).ln();
                (lo, y_hi, Box::new(|y: f64| 1.0 / spec.phi_inv(y.exp())))
            }
            // y = log t; H'(t) dt / t = H'(e^y) dy.
            PhiCondition::HPrime => (
                y_lo,
                y_hi,
                Box::new(|y: f64| {
                    let t = y.exp();
                    let h = 1e-6 * t;
                    (spec.h(t + h) - spec.h(t - h)) / (2.0 * h)
                }),
            ),
            PhiCondition::HStieltjes => (y_lo, y_hi, Box::new(|_| f64::NAN)),
            // H(t) dt / t^2 = H(e^y) e^{-y} dy.
            PhiCondition::HOverSquare => (y_lo, y_hi, Box::new(|y: f64| spec.h(y.exp()) * (-y).exp())),
            // y = log(1/t): H(1/t) dt = H(e^y) e^{-y} dy, integrated over t directly.
            PhiCondition::HReciprocal => (
                y_lo,
                y_hi,
                Box::new(|y: f64| {
                    let t = (-y).exp();
                    spec.h(1.0 / t) * t
                }),
            ),
            // y = log eta; d eta / H^{-1}(eta) = eta / H^{-1}(eta) dy.
            PhiCondition::HInverse => {
                let lo = spec.h(t_lo).ln();
                let hi = spec.h(T_MAX).min(T_MAX).ln();
                (lo, hi, Box::new(|y: f64| y.exp() / spec.h_inv(y.exp())))
            }
            // log Phi(t) dt / t^2, with H taking over where Phi overflows.
            PhiCondition::LogPhi => (
                y_lo,
                y_hi,
                Box::new(|y: f64| {
                    let t = y.exp();
                    let p = spec.phi(t);
                    let l = if p.is_finite() { p.ln() } else { spec.h(t) };
                    l / t
                }),
            ),
        };
        let lattice = geometric(lo, hi);
        let increments: Vec<f64> = if cond == PhiCondition::HStieltjes {
            lattice
                .windows(2)
                .map(|w| {
                    // Fine Stieltjes sum sum dH / t on 64 geometric steps in y.
                    let mut acc = 0.0;
                    let ratio = (w[1] / w[0]).powf(1.0 / 64.0);
                    let mut ya = w[0];
                    let mut ha = spec.h(ya.exp());
                    for _ in 0..64 {
                        let yb = ya * ratio;
                        let hb = spec.h(yb.exp());
                        acc += (hb - ha) * (-(0.5 * (ya + yb))).exp();
                        ya = yb;
                        ha = hb;
                    }
                    acc
                })
                .collect()
        } else {
            lattice
                .windows(2)
                .map(|w| {
                    gauss_legendre(w[0].ln(), w[1].ln())
                        .map(|(s, wt)| {
                            let y = s.exp();
                            let v = g(y);
                            if v == 0.0 { 0.0 } else { wt * y * v }
                        })
                        .sum()
                })
                .collect()
        };
        let (verdict, total) = decide(&lattice, &increments, th);
        results.push(PhiConditionResult {
            condition: cond,
            verdict,
            partial_integral: total,
        });
    }
    let first = results[0].verdict.status;
    let agreement = first != Status::Inconclusive && results.iter().all(|r| r.verdict.status == first);
    Ok(PhiSuite {
        phi: spec.name(),
        t_lower: t_lo,
        results,
        agreement,
    })
}

fn geometric(lo: f64, hi: f64) -> Vec<f64> {
    let n = (((hi / lo).log10() * PER_DECADE as f64).ceil() as usize).max(2);
    (0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)).collect()
}

/// Divergence of `sum increments` from the decay rate of the per-unit-`y`
/// increments over the last two decades of `y`.
fn decide(lattice: &[f64], increments: &[f64], th: &Thresholds) -> (CriterionVerdict, f64) {
    let mut partial = Vec::with_capacity(lattice.len());
    let mut acc = 0.0;
    partial.push((lattice[0], 0.0));
    for (k, inc) in increments.iter().enumerate() {
        acc += inc;
        partial.push((lattice[k + 1], acc));
    }
    let y_hi = lattice[lattice.len() - 1];
    let y_lo = lattice[0];
    let window_lo = (y_hi / 10f64.powf(th.fit_decades)).max(y_lo);
    let tail_lo = (y_hi / 10.0).max(y_lo);

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut tail = 0.0;
    let mut bad = false;
    for (k, inc) in increments.iter().enumerate() {
        let (a, b) = (lattice[k], lattice[k + 1]);
        if a >= tail_lo * (1.0 - 1e-12) {
            tail += inc;
        }
        if a >= window_lo * (1.0 - 1e-12) {
            let g = inc / (b - a);
            if g > 0.0 && g.is_finite() {
                xs.push((0.5 * (a + b)).ln());
                ys.push(g.ln());
            } else if g < 0.0 || !g.is_finite() {
                bad = true;
            }
        }
    }
    let (slope_log, _, _) = fit_line(
        &partial.iter().map(|p| p.0).collect::<Vec<_>>(),
        &partial.iter().map(|p| p.1).collect::<Vec<_>>(),
    );
    let (slope_loglog, _, _) = fit_line(
        &partial.iter().map(|p| p.0.ln()).collect::<Vec<_>>(),
        &partial.iter().map(|p| p.1).collect::<Vec<_>>(),
    );
    let exponent = if xs.len() >= 3 { fit_line(&xs, &ys).0 } else { f64::NEG_INFINITY };
    let evidence = Evidence {
        scale: "y".into(),
        exponent,
        slope_log,
        slope_loglog,
        partial,
        radii_range: (window_lo, y_hi),
    };
    if bad || !acc.is_finite() {
        return (
            CriterionVerdict::inconclusive(evidence, "non-positive or non-finite integrand on fit window"),
            acc,
        );
    }
    let status = if acc > 0.0 && tail < th.tail * acc {
        Status::Fails
    } else if exponent >= -1.0 - th.harmonic_margin {
        Status::Satisfied
    } else if exponent <= -th.convergent_exponent {
        Status::Fails
    } else {
        return (
            CriterionVerdict::inconclusive(evidence, format!("decay exponent {exponent:.3} between cutoffs")),
            acc,
        );
    };
    (
        CriterionVerdict {
            status,
            evidence,
            reason: None,
        },
        acc,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn statuses(spec: &PhiSpec) -> (Vec<Status>, bool) {
        let s = phi_condition_suite(spec, spec.phi(0.0) + 2.0, &Thresholds::default()).unwrap();
        (s.results.iter().map(|r| r.verdict.status).collect(), s.agreement)
    }

    #[test]
    fn exponential_diverges_everywhere() {
        let (s, agree) = statuses(&PhiSpec::Exponential { alpha: 1.0 });
        assert!(agree, "{s:?}");
        assert_eq!(s[0], Status::Satisfied);
    }

    #[test]
    fn powers_converge_everywhere() {
        for p in [1.0, 2.0, 5.0] {
            let (s, agree) = statuses(&PhiSpec::Power { p });
            assert!(agree, "p={p}: {s:?}");
            assert_eq!(s[0], Status::Fails);
        }
    }

    #[test]
    fn sub_exponential_families_converge() {
        // H = sqrt(1+t): int sqrt(t)/t^2 dt < inf.
        let (s, agree) = statuses(&PhiSpec::StretchedExponential { alpha: 1.0, beta: 0.5 });
        assert!(agree, "{s:?}");
        assert_eq!(s[0], Status::Fails);
        let (s, agree) = statuses(&PhiSpec::TLog { beta: 1.0 });
        assert!(agree, "{s:?}");
        assert_eq!(s[0], Status::Fails);
    }

    #[test]
    fn table_and_validation() {
        let table = PhiSpec::Table {
            points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 4.0), (4.0, 16.0)],
        };
        table.validate().unwrap();
        let (s, agree) = statuses(&table);
        assert!(agree && s[0] == Status::Fails, "{s:?}");
        let concave = PhiSpec::Table {
            points: vec![(0.0, 0.0), (1.0, 4.0), (2.0, 5.0)],
        };
        assert!(matches!(concave.validate(), Err(Error::Validation(_))));
        assert!(phi_condition_suite(&PhiSpec::Exponential { alpha: 1.0 }, 0.5, &Thresholds::default()).is_err());
    }

    #[test]
    fn inverses() {
        let s = PhiSpec::Power { p: 2.0 };
        assert!((s.phi_inv(9.0) - 3.0).abs() < 1e-9);
        assert!((PhiSpec::Exponential { alpha: 1.0 }.h_inv(5.0) - 5.0).abs() < 1e-9);
    }
}
