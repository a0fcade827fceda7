use crate::beltrami::{BeltramiCoefficient, CoefficientFamily};
use crate::criteria::{PhiSpec, ScalarSpec, Thresholds};
use crate::dirichlet::BoundaryDatum;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::C64;
use crate::grid::Domain;
use crate::maps::MapSpec;
use crate::modulus::Plate;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A complete run description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: TaskSpec,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Admissibility tests for a majorant `Q` at `z0`. Give either `q`, or
    /// `coefficient` to test its tangent dilatation about `z0`.
    Criteria {
        #[serde(default)]
        q: Option<ScalarSpec>,
        #[serde(default)]
        coefficient: Option<CoefficientFamily>,
        #[serde(default)]
        z0: C64,
        #[serde(default = "Domain::unit_disk")]
        domain: Domain,
        #[serde(default)]
        phi: Vec<PhiSpec>,
    },
    /// Beltrami solve on the fitted grid of `domain`.
    Solve {
        coefficient: CoefficientFamily,
        #[serde(default = "Domain::unit_disk")]
        domain: Domain,
        /// Compose with the conformal map of the image.
        #[serde(default)]
        normalize: bool,
        /// Known solution to compare against (the normalised map when
        /// `normalize` is set).
        #[serde(default)]
        reference: Option<MapSpec>,
        /// Cells around `exclude_center` skipped by the comparison.
        #[serde(default)]
        exclude_cells: f64,
        #[serde(default)]
        exclude_center: C64,
    },
    /// Dirichlet problem: `datum` on simply connected domains, `inner` and
    /// `outer` on annuli.
    Dirichlet {
        #[serde(default = "zero_family")]
        coefficient: CoefficientFamily,
        #[serde(default = "Domain::unit_disk")]
        domain: Domain,
        #[serde(default)]
        datum: Option<BoundaryDatum>,
        #[serde(default)]
        inner: Option<BoundaryDatum>,
        #[serde(default)]
        outer: Option<BoundaryDatum>,
        /// Prime ends whose approach residuals are reported.
        #[serde(default)]
        ends: Vec<usize>,
    },
    Modulus {
        check: ModulusCheck,
    },
    Primeends {
        domain: Domain,
        /// Pairs of end ids whose distance is reported.
        #[serde(default)]
        pairs: Vec<(usize, usize)>,
        /// Points on a slit: the upper and lower ends there are compared.
        #[serde(default)]
        slit_points: Vec<f64>,
        /// Maps whose boundary extension is checked.
        #[serde(default)]
        continuity: Vec<ContinuityMap>,
    },
}

fn zero_family() -> CoefficientFamily {
    CoefficientFamily::Constant { k: C64::new(0.0, 0.0) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusCheck {
    /// Capacity of `(e, f; domain)`; with `conformal`, also the modulus of
    /// the doubly connected `domain` from its conformal map.
    Capacity {
        domain: Domain,
        e: Plate,
        f: Plate,
        #[serde(default)]
        estimate: bool,
        #[serde(default)]
        conformal: bool,
    },
    /// Ring inequality for `map` with majorant `q` about `z0`.
    Ring {
        map: MapSpec,
        #[serde(default = "Domain::unit_disk")]
        domain: Domain,
        #[serde(default)]
        z0: C64,
        r1: f64,
        r2: f64,
        q: ScalarSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContinuityMap {
    /// An explicit map, checked against the unit circle.
    Explicit { spec: MapSpec },
    /// The conformal reference map of the prime-end space.
    Reference,
    /// The normalised Beltrami solution for a coefficient.
    Solution { coefficient: CoefficientFamily },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numeric {
    /// Grid cells per side.
    pub n: usize,
    /// Solver truncation `|mu| <= 1 - delta`.
    pub delta: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Largest radius of the criteria lattices and prime-end chains.
    pub eps0: f64,
    pub decades: f64,
    pub per_decade: usize,
    /// Fourier terms of the Schwarz operator.
    pub fourier_terms: usize,
    /// Cross-cut chain depth.
    pub depth: usize,
    /// Smallest cross-cut radius in continuity checks.
    pub min_radius: f64,
    /// Prime ends per boundary circle or slit side.
    pub ends_per_side: usize,
    pub thresholds: Thresholds,
    pub execution: Execution,
}

impl Default for Numeric {
    fn default() -> Self {
        Numeric {
            n: 128,
            delta: 1e-3,
            tol: 1e-8,
            max_iter: 2000,
            eps0: 0.5,
            decades: 5.0,
            per_decade: 12,
            fourier_terms: 128,
            depth: 12,
            min_radius: 1e-4,
            ends_per_side: 64,
            thresholds: Thresholds::default(),
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    /// Report file name inside the output directory.
    pub report: String,
    /// Write CSV artifacts next to the report.
    pub csv: bool,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            report: "report.json".into(),
            csv: true,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be positive, got {v}")))
    }
}

fn plain_name(name: &str) -> Result<()> {
    let p = Path::new(name);
    if name.is_empty() || p.components().count() != 1 || p.file_name().is_none() {
        return Err(Error::validation(format!("output name {name:?} must be a plain file name")));
    }
    Ok(())
}

impl Numeric {
    pub fn validate(&self) -> Result<()> {
        if self.n < 16 || self.n % 2 != 0 {
            return Err(Error::validation(format!("n must be an even integer >= 16, got {}", self.n)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::validation(format!("delta must lie in (0, 0.5], got {}", self.delta)));
        }
        positive("tol", self.tol)?;
        positive("eps0", self.eps0)?;
        positive("decades", self.decades)?;
        positive("min_radius", self.min_radius)?;
        let th = &self.thresholds;
        for (name, v) in [
            ("thresholds.fit_decades", th.fit_decades),
            ("thresholds.harmonic_margin", th.harmonic_margin),
            ("thresholds.convergent_exponent", th.convergent_exponent),
            ("thresholds.tail", th.tail),
            ("thresholds.o_small", th.o_small),
            ("thresholds.o_flat", th.o_flat),
            ("thresholds.bounded", th.bounded),
            ("thresholds.unbounded", th.unbounded),
            ("thresholds.fmo_bounded_ratio", th.fmo_bounded_ratio),
            ("thresholds.fmo_growth_ratio", th.fmo_growth_ratio),
        ] {
            positive(name, v)?;
        }
        for (name, v) in [
            ("max_iter", self.max_iter),
            ("per_decade", self.per_decade),
            ("fourier_terms", self.fourier_terms),
            ("depth", self.depth),
            ("ends_per_side", self.ends_per_side),
        ] {
            if v == 0 {
                return Err(Error::validation(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks everything that can be checked without running the task.
    pub fn validate(&self) -> Result<()> {
        self.numeric.validate()?;
        plain_name(&self.output.report)?;
        match &self.task {
            TaskSpec::Criteria { q, coefficient, domain, phi, .. } => {
                domain.validate()?;
                match (q, coefficient) {
                    (Some(q), None) => drop(q.build()?),
                    (None, Some(c)) => drop(BeltramiCoefficient::new(c.clone())?),
                    _ => return Err(Error::validation("criteria needs exactly one of `q` and `coefficient`")),
                }
                for p in phi {
                    p.validate()?;
                }
            }
            TaskSpec::Solve { coefficient, domain, reference, exclude_cells, .. } => {
                domain.validate()?;
                BeltramiCoefficient::new(coefficient.clone())?;
                if let Some(r) = reference {
                    r.validate()?;
                }
                if !(*exclude_cells >= 0.0) {
                    return Err(Error::validation("exclude_cells must be non-negative"));
                }
            }
            TaskSpec::Dirichlet { coefficient, domain, datum, inner, outer, .. } => {
                domain.validate()?;
                BeltramiCoefficient::new(coefficient.clone())?;
                match (datum, inner, outer) {
                    (Some(d), None, None) => d.validate()?,
                    (None, Some(a), Some(b)) => {
                        a.validate()?;
                        b.validate()?;
                    }
                    _ => return Err(Error::validation("dirichlet needs either `datum` or both `inner` and `outer`")),
                }
            }
            TaskSpec::Modulus { check } => match check {
                ModulusCheck::Capacity { domain, e, f, .. } => {
                    domain.validate()?;
                    e.validate()?;
                    f.validate()?;
                }
                ModulusCheck::Ring { map, domain, r1, r2, q, .. } => {
                    map.validate()?;
                    domain.validate()?;
                    q.build()?;
                    if !(*r1 > 0.0 && r2 > r1) {
                        return Err(Error::validation("ring radii need 0 < r1 < r2"));
                    }
                }
            },
            TaskSpec::Primeends { domain, continuity, .. } => {
                domain.validate()?;
                for m in continuity {
                    match m {
                        ContinuityMap::Explicit { spec } => spec.validate()?,
                        ContinuityMap::Reference => {}
                        ContinuityMap::Solution { coefficient } => drop(BeltramiCoefficient::new(coefficient.clone())?),
                    }
                }
            }
        }
        Ok(())
    }

    pub fn task_name(&self) -> &'static str {
        match self.task {
            TaskSpec::Criteria { .. } => "criteria",
            TaskSpec::Solve { .. } => "solve",
            TaskSpec::Dirichlet { .. } => "dirichlet",
            TaskSpec::Modulus { .. } => "modulus",
            TaskSpec::Primeends { .. } => "primeends",
        }
    }
}
