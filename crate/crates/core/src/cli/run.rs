use super::config::{ContinuityMap, ModulusCheck, Numeric, RunConfig, TaskSpec};
use crate::beltrami::{BeltramiCoefficient, CoefficientFamily};
use crate::criteria::{
    annular_weighted_integral, circle_average_growth, circle_norm, divergence_test, fmo_estimate, log_radii,
    phi_condition_suite, psi_family_test, AnnularResult, AnnularWeight, CircleNorm, CriterionVerdict, FmoReport,
    FmoStatus, GrowthModel, PhiSuite, PsiFamily, PsiResult, QuadratureOptions, ScalarSpec, Status,
};
use crate::dirichlet::{
    boundary_residual, multivalent_solution, solve_dirichlet_sc, write_residual_csv, BoundaryDatum,
    DirichletOptions, PeriodReport, ResidualRow, WindingReport,
};
use crate::error::{Error, Result};
use crate::geometry::{c, C64};
use crate::grid::{Domain, DomainMask};
use crate::modulus::{
    condenser_capacity, condenser_capacity_with_estimate, ring_inequality_check, CapacityResult, CondenserSpec,
    RingOptions, RingReport, SolveOptions,
};
use crate::primeends::{
    extension_continuity_check, prime_end_metric, ContinuityOptions, ContinuityReport, PrimeEndSpace, Side,
};
use crate::qcsolver::{
    annulus_map, jacobian_check, normalize, solve_beltrami, sup_error, JacobianReport, Normalization,
    SolverOptions,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

/// A CSV file produced by a run.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Deterministic for a fixed config; `sha256` is its digest.
    pub hashed: HashedSection,
    pub sha256: String,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashedSection {
    pub config: RunConfig,
    pub provenance: Provenance,
    pub status: RunStatus,
    pub results: Option<Value>,
    /// `(file name, sha256)` of each CSV artifact.
    pub artifacts: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub task: String,
    pub grid_n: usize,
    /// Reserved: every pipeline is deterministic.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatus {
    pub exit_code: i32,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Checks that ended `Inconclusive`.
    pub inconclusive: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::Degeneracy { .. } => "degeneracy",
        Error::Argument(_) => "argument",
        Error::Quadrature { .. } => "quadrature",
        Error::Validation(_) => "validation",
        Error::Solver { .. } => "solver",
        Error::Geometry(_) => "geometry",
        Error::Topology(_) => "topology",
        Error::Unsupported(_) => "unsupported",
        Error::Precondition(_) => "precondition",
        Error::Composition(_) => "composition",
        Error::Continuation(_) => "continuation",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
    }
}

/// 2 for bad input, 3 for everything that failed while computing.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Argument(_) | Error::Json(_) => EXIT_VALIDATION,
        _ => EXIT_SOLVER,
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

#[derive(Default)]
struct Outcome {
    results: Value,
    artifacts: Vec<Artifact>,
    inconclusive: Vec<String>,
}

impl Outcome {
    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut bytes = Vec::new();
        write(&mut bytes)?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            bytes,
        });
        Ok(())
    }

    fn verdict(&mut self, name: &str, v: &CriterionVerdict) {
        if v.status == Status::Inconclusive {
            self.inconclusive.push(name.to_string());
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs a validated config. Errors are recorded in the report, never returned.
pub fn execute(cfg: &RunConfig, seed: u64) -> (Report, Vec<Artifact>) {
    let start = Instant::now();
    let outcome = match &cfg.task {
        TaskSpec::Criteria { .. } => run_criteria(cfg),
        TaskSpec::Solve { .. } => run_solve(cfg),
        TaskSpec::Dirichlet { .. } => run_dirichlet(cfg),
        TaskSpec::Modulus { check } => run_modulus(check, &cfg.numeric),
        TaskSpec::Primeends { .. } => run_primeends(cfg),
    };
    let (status, results, artifacts) = match outcome {
        Ok(o) => {
            let code = if o.inconclusive.is_empty() { EXIT_OK } else { EXIT_INCONCLUSIVE };
            let state = if code == EXIT_OK { "ok" } else { "inconclusive" };
            let status = RunStatus {
                exit_code: code,
                state: state.into(),
                error: None,
                inconclusive: o.inconclusive,
            };
            (status, Some(o.results), if cfg.output.csv { o.artifacts } else { Vec::new() })
        }
        Err(e) => {
            let status = RunStatus {
                exit_code: exit_code(&e),
                state: "error".into(),
                error: Some(ErrorInfo {
                    kind: error_kind(&e).into(),
                    message: e.to_string(),
                }),
                inconclusive: Vec::new(),
            };
            (status, None, Vec::new())
        }
    };
    let hashed = HashedSection {
        config: cfg.clone(),
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            task: cfg.task_name().into(),
            grid_n: cfg.numeric.n,
            seed,
        },
        status,
        results,
        artifacts: artifacts.iter().map(|a| (a.name.clone(), sha256_hex(&a.bytes))).collect(),
    };
    let bytes = serde_json::to_vec(&hashed).expect("report serialises");
    let report = Report {
        sha256: sha256_hex(&bytes),
        hashed,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
        },
    };
    (report, artifacts)
}

/// Writes the report and artifacts into `out`.
pub fn write_outputs(cfg: &RunConfig, report: &Report, artifacts: &[Artifact], out: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let path = out.join(&cfg.output.report);
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    written.push(path);
    for a in artifacts {
        let path = out.join(&a.name);
        std::fs::write(&path, &a.bytes)?;
        written.push(path);
    }
    Ok(written)
}

/// `beltrami run`: load, execute, write. Returns the process exit code.
pub fn run(config: &Path, out: &Path, verbosity: u8, seed: u64) -> i32 {
    let cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e).max(EXIT_VALIDATION);
        }
    };
    let (report, artifacts) = execute(&cfg, seed);
    let status = &report.hashed.status;
    match write_outputs(&cfg, &report, &artifacts, out) {
        Ok(paths) => {
            if verbosity >= 2 {
                for p in &paths {
                    eprintln!("wrote {}", p.display());
                }
                for name in &status.inconclusive {
                    eprintln!("inconclusive: {name}");
                }
            }
        }
        Err(e) => {
            eprintln!("error: cannot write outputs: {e}");
            return EXIT_SOLVER;
        }
    }
    if let Some(err) = &status.error {
        eprintln!("error ({}): {}", err.kind, err.message);
    }
    if verbosity >= 1 {
        eprintln!(
            "{}: {} (exit {}) in {:.2}s, sha256 {}",
            cfg.task_name(),
            status.state,
            status.exit_code,
            report.timings.total_seconds,
            report.sha256
        );
    }
    status.exit_code
}

fn quad(num: &Numeric) -> QuadratureOptions {
    QuadratureOptions {
        exec: num.execution,
        ..Default::default()
    }
}

fn solver(num: &Numeric) -> SolverOptions {
    SolverOptions {
        delta: num.delta,
        max_iter: num.max_iter,
        tol: num.tol,
        exec: num.execution,
    }
}

#[derive(Serialize)]
struct CriteriaResult {
    q: ScalarSpec,
    z0: C64,
    radii: usize,
    divergence: CriterionVerdict,
    growth_big_o_log: CriterionVerdict,
    growth_little_o_log_loglog: CriterionVerdict,
    annular_log2: AnnularResult,
    annular_loglog2: AnnularResult,
    psi_inverse_norm: PsiResult,
    fmo: FmoReport,
    phi: Vec<PhiSuite>,
}

fn write_norm_csv(norm: &CircleNorm, w: &mut Vec<u8>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["radius", "norm", "average"])?;
    for ((r, v), a) in norm.radii.iter().zip(&norm.values).zip(norm.averages()) {
        out.serialize((r, v, a))?;
    }
    out.flush()?;
    Ok(())
}

fn run_criteria(cfg: &RunConfig) -> Result<Outcome> {
    let TaskSpec::Criteria { q, coefficient, z0, domain, phi } = &cfg.task else {
        unreachable!()
    };
    let num = &cfg.numeric;
    let th = &num.thresholds;
    let spec = match (q, coefficient) {
        (Some(q), _) => q.clone(),
        (None, Some(c)) => ScalarSpec::TangentDilatation {
            coefficient: c.clone(),
            center: *z0,
        },
        (None, None) => return Err(Error::validation("criteria needs `q` or `coefficient`")),
    };
    let qf = spec.build()?;
    let quad = quad(num);
    let radii = log_radii(num.eps0, num.decades, num.per_decade);
    let eps = *radii.last().unwrap();
    let norm = circle_norm(&qf, domain, *z0, &radii, &quad)?;
    let mut o = Outcome::default();
    let divergence = divergence_test(&norm, th)?;
    let growth_big_o_log = circle_average_growth(&norm, GrowthModel::BigOLog, th)?;
    let growth_little = circle_average_growth(&norm, GrowthModel::LittleOLogLogLog, th)?;
    let annular_log2 = annular_weighted_integral(&qf, domain, *z0, eps, num.eps0, AnnularWeight::InverseSquare, &quad, th)?;
    let annular_loglog2 =
        annular_weighted_integral(&qf, domain, *z0, eps, num.eps0, AnnularWeight::InverseSquareLog, &quad, th)?;
    let psi = psi_family_test(&qf, domain, *z0, PsiFamily::InverseNorm, eps, num.eps0, &quad, th)?;
    let fmo = fmo_estimate(&qf, domain, *z0, &log_radii(num.eps0, num.decades, 3), num.execution, th)?;
    let mut suites = Vec::new();
    for p in phi {
        suites.push(phi_condition_suite(p, p.phi(0.0) + 1.0, th)?);
    }
    for (name, v) in [
        ("divergence", &divergence),
        ("growth_big_o_log", &growth_big_o_log),
        ("growth_little_o_log_loglog", &growth_little),
        ("annular_log2", &annular_log2.verdict),
        ("annular_loglog2", &annular_loglog2.verdict),
        ("psi_inverse_norm", &psi.verdict),
    ] {
        o.verdict(name, v);
    }
    if fmo.status == FmoStatus::Inconclusive {
        o.inconclusive.push("fmo".into());
    }
    for s in &suites {
        for r in &s.results {
            o.verdict(&format!("phi[{}].{:?}", s.phi, r.condition), &r.verdict);
        }
    }
    o.csv("circle_norm.csv", |w| write_norm_csv(&norm, w))?;
    o.results = to_value(&CriteriaResult {
        q: spec,
        z0: *z0,
        radii: radii.len(),
        divergence,
        growth_big_o_log,
        growth_little_o_log_loglog: growth_little,
        annular_log2,
        annular_loglog2,
        psi_inverse_norm: psi,
        fmo,
        phi: suites,
    })?;
    Ok(o)
}

#[derive(Serialize)]
struct ResidualSummary {
    l2: f64,
    linf: f64,
    relative: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct NormalizedSummary {
    degree: usize,
    boundary_error: f64,
    cr_defect: f64,
}

#[derive(Serialize)]
struct SolveResult {
    n: usize,
    spacing: f64,
    normalization: Normalization,
    truncated_cells: usize,
    residual: ResidualSummary,
    jacobian: JacobianReport,
    normalized: Option<NormalizedSummary>,
    reference_error: Option<f64>,
}

fn run_solve(cfg: &RunConfig) -> Result<Outcome> {
    let TaskSpec::Solve { coefficient, domain, normalize: norm, reference, exclude_cells, exclude_center } = &cfg.task
    else {
        unreachable!()
    };
    let num = &cfg.numeric;
    let mask = DomainMask::fitted(domain.clone(), num.n)?;
    let h = mask.grid.spacing();
    let coef = BeltramiCoefficient::new(coefficient.clone())?;
    let sol = solve_beltrami(&coef, &mask, &solver(num))?;
    let jacobian = jacobian_check(&sol);
    let mut o = Outcome::default();
    o.csv("solution.csv", |w| sol.write_csv(w))?;
    o.csv("residual_history.csv", |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "increment"])?;
        for (k, v) in sol.residual.history.iter().enumerate() {
            out.serialize((k + 1, v))?;
        }
        out.flush()?;
        Ok(())
    })?;
    let exclude = (*exclude_cells > 0.0).then_some((*exclude_center, exclude_cells * h));
    let (normalized, reference_error) = if *norm {
        let g = normalize(&sol, num.execution)?;
        if let Some(t) = g.boundary.first() {
            o.csv("boundary.csv", |w| t.write_csv(w))?;
        }
        let err = reference.as_ref().map(|r| sup_error(&g.values, r, exclude)).transpose()?;
        let summary = NormalizedSummary {
            degree: g.mapper.degree,
            boundary_error: g.mapper.boundary_error,
            cr_defect: g.mapper.cr_defect,
        };
        (Some(summary), err)
    } else {
        (None, reference.as_ref().map(|r| sup_error(&sol.f, r, exclude)).transpose()?)
    };
    o.results = to_value(&SolveResult {
        n: num.n,
        spacing: h,
        normalization: sol.normalization,
        truncated_cells: sol.truncated,
        residual: ResidualSummary {
            l2: sol.residual.l2,
            linf: sol.residual.linf,
            relative: sol.residual.relative,
            iterations: sol.residual.iterations,
        },
        jacobian,
        normalized,
        reference_error,
    })?;
    Ok(o)
}

#[derive(Serialize)]
struct DirichletResult {
    warnings: Vec<String>,
    beltrami_residual: f64,
    schwarz_terms: usize,
    datum_range: (f64, f64),
    value_range: Option<(f64, f64)>,
    residuals: Vec<ResidualRow>,
    /// Largest extrapolated residual at the deepest cut of each end.
    max_boundary_residual: Option<f64>,
    residual_note: Option<String>,
}

#[derive(Serialize)]
struct MultivalentResult {
    inner_radius: f64,
    period: PeriodReport,
    winding: Option<WindingReport>,
}

fn dirichlet_options(num: &Numeric) -> DirichletOptions {
    DirichletOptions {
        n: num.n,
        terms: num.fourier_terms,
        solver: solver(num),
        exec: num.execution,
    }
}

fn default_ends(space: &PrimeEndSpace) -> Vec<usize> {
    let n = space.ends.len();
    let mut ids: Vec<usize> = (0..4).map(|k| k * n / 4).collect();
    ids.dedup();
    ids
}

fn run_dirichlet(cfg: &RunConfig) -> Result<Outcome> {
    let TaskSpec::Dirichlet { coefficient, domain, datum, inner, outer, ends } = &cfg.task else {
        unreachable!()
    };
    let num = &cfg.numeric;
    let coef = BeltramiCoefficient::new(coefficient.clone())?;
    let opts = dirichlet_options(num);
    let mut o = Outcome::default();
    if let (Some(a), Some(b)) = (inner, outer) {
        let sol = multivalent_solution(&coef, domain, a, b, &opts)?;
        let winding = match domain {
            Domain::Annulus { .. } => Some(sol.winding_check(256)?),
            _ => None,
        };
        o.results = to_value(&MultivalentResult {
            inner_radius: sol.harmonic.r,
            period: sol.harmonic.period.clone(),
            winding,
        })?;
        return Ok(o);
    }
    let datum: &BoundaryDatum = datum.as_ref().ok_or_else(|| Error::validation("missing `datum`"))?;
    let sol = solve_dirichlet_sc(&coef, domain, datum, &opts)?;
    let min_radius = sol.values.as_ref().map_or(0.0, |v| 4.0 * v.grid.spacing());
    let (residuals, note) = match PrimeEndSpace::build(domain, num.ends_per_side) {
        Ok(space) => {
            let ids = if ends.is_empty() { default_ends(&space) } else { ends.clone() };
            (boundary_residual(&sol, datum, &space, &ids, num.eps0, num.depth, min_radius)?, None)
        }
        Err(Error::Unsupported(msg)) => (Vec::new(), Some(format!("no prime-end chains: {msg}"))),
        Err(e) => return Err(e),
    };
    let mut ids: Vec<usize> = residuals.iter().map(|r| r.end).collect();
    ids.dedup();
    let max_boundary_residual = ids
        .iter()
        .filter_map(|id| residuals.iter().filter(|r| r.end == *id).last())
        .map(|r| r.extrapolated.unwrap_or(r.residual))
        .reduce(f64::max);
    if !residuals.is_empty() {
        o.csv("boundary_residual.csv", |w| write_residual_csv(&residuals, w))?;
    }
    o.results = to_value(&DirichletResult {
        warnings: sol.warnings.clone(),
        beltrami_residual: sol.beltrami_residual,
        schwarz_terms: sol.h.terms(),
        datum_range: datum.range(),
        value_range: sol.value_range(),
        residuals,
        max_boundary_residual,
        residual_note: note,
    })?;
    Ok(o)
}

#[derive(Serialize)]
struct CapacityOutcome {
    capacity: CapacityResult,
    /// Modulus `log(1/r*) / 2 pi` from the conformal map and its product with
    /// the capacity (1 in exact arithmetic).
    conformal_modulus: Option<f64>,
    modulus_times_capacity: Option<f64>,
}

fn run_modulus(check: &ModulusCheck, num: &Numeric) -> Result<Outcome> {
    let solve = SolveOptions {
        exec: num.execution,
        ..Default::default()
    };
    let mut o = Outcome::default();
    match check {
        ModulusCheck::Capacity { domain, e, f, estimate, conformal } => {
            let spec = CondenserSpec {
                domain: domain.clone(),
                e: e.clone(),
                f: f.clone(),
                n: num.n,
            };
            let capacity = if *estimate {
                condenser_capacity_with_estimate(&spec, &solve)?
            } else {
                condenser_capacity(&spec, &solve)?
            };
            if let Some(p) = &capacity.potential {
                o.csv("potential.csv", |w| {
                    let mut out = csv::Writer::from_writer(w);
                    out.write_record(["x", "y", "potential"])?;
                    for (k, v) in p.values.iter().enumerate() {
                        if v.is_finite() {
                            let z = p.grid.point(k);
                            out.serialize((z.re, z.im, v))?;
                        }
                    }
                    out.flush()?;
                    Ok(())
                })?;
            }
            let conformal_modulus = if *conformal {
                let mask = DomainMask::fitted(domain.clone(), num.n)?;
                annulus_map(&mask, num.execution)?.modulus()
            } else {
                None
            };
            o.results = to_value(&CapacityOutcome {
                modulus_times_capacity: conformal_modulus.map(|m| m * capacity.value),
                conformal_modulus,
                capacity,
            })?;
        }
        ModulusCheck::Ring { map, domain, z0, r1, r2, q } => {
            let qf = q.build()?;
            let opts = RingOptions {
                n: num.n,
                solve,
                ..Default::default()
            };
            let report: RingReport = ring_inequality_check(map, domain, *z0, *r1, *r2, &qf, &quad(num), &opts)?;
            o.results = to_value(&report)?;
        }
    }
    Ok(o)
}

#[derive(Serialize)]
struct SlitPair {
    x: f64,
    upper: usize,
    lower: usize,
    rho: f64,
    support_distance: f64,
}

#[derive(Serialize)]
struct ContinuityOutcome {
    map: ContinuityMap,
    min_radius: f64,
    report: ContinuityReport,
}

#[derive(Serialize)]
struct PrimeEndsResult {
    ends: usize,
    pairs: Vec<(usize, usize, f64)>,
    slit_pairs: Vec<SlitPair>,
    continuity: Vec<ContinuityOutcome>,
}

fn run_primeends(cfg: &RunConfig) -> Result<Outcome> {
    let TaskSpec::Primeends { domain, pairs, slit_points, continuity } = &cfg.task else {
        unreachable!()
    };
    let num = &cfg.numeric;
    let space = PrimeEndSpace::build(domain, num.ends_per_side)?;
    let mut o = Outcome::default();
    o.csv("prime_ends.csv", |w| space.write_csv(w))?;
    let mut metric = Vec::new();
    for &(p, q) in pairs {
        metric.push((p, q, prime_end_metric(&space, p, q)?));
    }
    let mut slit_pairs = Vec::new();
    for &x in slit_points {
        let z = c(x, 0.0);
        let (Some(u), Some(l)) = (space.nearest(z, Side::Upper), space.nearest(z, Side::Lower)) else {
            return Err(Error::Unsupported(format!("{} has no slit sides", domain.name())));
        };
        slit_pairs.push(SlitPair {
            x,
            upper: u.id,
            lower: l.id,
            rho: prime_end_metric(&space, u.id, l.id)?,
            support_distance: (u.support - l.support).norm(),
        });
    }
    let mut checks = Vec::new();
    for (k, m) in continuity.iter().enumerate() {
        if domain.connectivity() != Some(1) {
            return Err(Error::Unsupported("continuity checks need a simply connected domain".into()));
        }
        let base = ContinuityOptions {
            eps0: num.eps0.min(0.25),
            depth: num.depth,
            min_radius: num.min_radius,
            exec: num.execution,
            ..Default::default()
        };
        let (report, min_radius) = match m {
            ContinuityMap::Explicit { spec } => (extension_continuity_check(spec, &space, &base)?, base.min_radius),
            ContinuityMap::Reference => (extension_continuity_check(&space, &space, &base)?, base.min_radius),
            // the solution is a trigonometric series, evaluable between cells
            ContinuityMap::Solution { coefficient } => {
                let g = solution_map(coefficient, domain, num)?;
                (extension_continuity_check(&g, &space, &base)?, base.min_radius)
            }
        };
        o.csv(&format!("continuity_{k}.csv"), |w| {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["prime_end_id", "radius", "oscillation"])?;
            for e in &report.ends {
                for (r, osc) in e.radii.iter().zip(&e.oscillations) {
                    out.serialize((e.id, r, osc))?;
                }
            }
            out.flush()?;
            Ok(())
        })?;
        checks.push(ContinuityOutcome {
            map: m.clone(),
            min_radius,
            report,
        });
    }
    o.results = to_value(&PrimeEndsResult {
        ends: space.ends.len(),
        pairs: metric,
        slit_pairs,
        continuity: checks,
    })?;
    Ok(o)
}

fn solution_map(coefficient: &CoefficientFamily, domain: &Domain, num: &Numeric) -> Result<crate::qcsolver::ComposedMap> {
    let mask = DomainMask::fitted(domain.clone(), num.n)?;
    let coef = BeltramiCoefficient::new(coefficient.clone())?;
    let sol = solve_beltrami(&coef, &mask, &solver(num))?;
    normalize(&sol, num.execution)
}
