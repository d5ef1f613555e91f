//! Named fixtures with closed-form or structural oracles. `verify` runs them
//! and reports every check with its measured value and threshold.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{two_arc, RunConfig, TWO_ARC_BAND, TWO_ARC_DECAY};
use crate::domain::{GridDomain, ScalarField, Shape};
use crate::error::{Error, Result};
use crate::finsler::{dijkstra, DijkstraOptions, Direction, Metric};
use crate::geometry::Vec2;
use crate::hamiltonian::{HamiltonianSpec, WeightField};
use crate::io;
use crate::pointwise::{
    ascent_chain, attainment_set, default_radii, pointwise_h, verify_inclusion, ChainCheck, ChainDirection,
    ChainOptions, PointwiseField,
};
use crate::solver::{absolutize, feasibility_tolerance, solve_mu, AbsolutizeOptions, SolveResult, SolverOptions};

pub const SCHEMA_VERSION: u32 = 1;

pub const FIXTURES: [&str; 8] = [
    "eikonal-1d",
    "eikonal-2d",
    "metric-equivalence",
    "monotonicity",
    "envelope",
    "pointwise",
    "plateau",
    "two-arc",
];

/// Bisection tolerance for local values `μ(x, r)`.
const LOCAL_TOL_LAMBDA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Le,
    Lt,
    Ge,
}

impl Comparison {
    /// False for `NaN`.
    pub fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Comparison::Le => measured <= threshold,
            Comparison::Lt => measured < threshold,
            Comparison::Ge => measured >= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// `fixture/check`.
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub passed: bool,
    /// Informational values (grid size, μ, sweep counts, ...).
    pub notes: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub passed: bool,
    pub n_checks: usize,
    pub failed: Vec<String>,
    pub fixtures: Vec<FixtureReport>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.fixtures.iter().flat_map(|f| &f.checks)
    }
}

#[derive(Debug, Clone)]
pub struct VerifySettings {
    /// Cells per unit length; each fixture has its own default.
    pub cells: Option<usize>,
    /// Field files go under `<out_dir>/<fixture>/`; `None` writes nothing.
    pub out_dir: Option<PathBuf>,
    pub overrides: BTreeMap<String, f64>,
    pub rng_seed: u64,
    pub tol_lambda: f64,
    pub tol_fix: f64,
    pub n_sweeps: usize,
}

impl VerifySettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            cells: cfg.verify.cells,
            out_dir: None,
            overrides: cfg.verify.tolerance_overrides.clone(),
            rng_seed: cfg.solver.rng_seed,
            tol_lambda: cfg.solver.tol_lambda,
            tol_fix: cfg.solver.tol_fix,
            n_sweeps: cfg.solver.n_sweeps,
        }
    }
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self::from_config(&RunConfig::default())
    }
}

struct Fixture<'s> {
    name: &'static str,
    settings: &'s VerifySettings,
    notes: BTreeMap<String, f64>,
    checks: Vec<Check>,
    rng: ChaCha8Rng,
}

impl<'s> Fixture<'s> {
    fn new(name: &'static str, index: usize, settings: &'s VerifySettings) -> Self {
        Self {
            name,
            settings,
            notes: BTreeMap::new(),
            checks: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(settings.rng_seed.wrapping_add(index as u64)),
        }
    }

    fn cells(&self, default: usize) -> usize {
        self.settings.cells.unwrap_or(default)
    }

    fn push(&mut self, check: &str, measured: f64, threshold: f64, comparison: Comparison) {
        let name = format!("{}/{check}", self.name);
        let threshold = self.settings.overrides.get(&name).copied().unwrap_or(threshold);
        let passed = comparison.holds(measured, threshold);
        log::info!(
            "{} {name}: {measured:.6e} {comparison:?} {threshold:.6e}",
            if passed { "pass" } else { "FAIL" }
        );
        self.checks.push(Check {
            name,
            measured,
            threshold,
            comparison,
            passed,
        });
    }

    fn le(&mut self, check: &str, measured: f64, threshold: f64) {
        self.push(check, measured, threshold, Comparison::Le);
    }

    fn lt(&mut self, check: &str, measured: f64, threshold: f64) {
        self.push(check, measured, threshold, Comparison::Lt);
    }

    fn ge(&mut self, check: &str, measured: f64, threshold: f64) {
        self.push(check, measured, threshold, Comparison::Ge);
    }

    fn note(&mut self, key: &str, value: f64) {
        self.notes.insert(key.to_string(), value);
    }

    fn write_fields(&self, sub: &str, dom: &GridDomain, fields: &[&ScalarField]) -> Result<()> {
        let Some(out) = &self.settings.out_dir else {
            return Ok(());
        };
        let dir = out.join(self.name).join(sub);
        for f in fields {
            io::write_field(f, dom, &dir.join(format!("{}.csv", f.name)))?;
        }
        Ok(())
    }

    fn finish(self) -> FixtureReport {
        FixtureReport {
            name: self.name.to_string(),
            passed: self.checks.iter().all(|c| c.passed),
            notes: self.notes,
            checks: self.checks,
        }
    }
}

/// Runs one named fixture.
pub fn run_fixture(name: &str, settings: &VerifySettings) -> Result<FixtureReport> {
    let index = FIXTURES
        .iter()
        .position(|&f| f == name)
        .ok_or_else(|| Error::ConfigValue {
            path: "verify.fixtures".into(),
            message: format!("unknown fixture `{name}`"),
        })?;
    let mut fx = Fixture::new(FIXTURES[index], index, settings);
    match index {
        0 => eikonal_1d(&mut fx)?,
        1 => eikonal_2d(&mut fx)?,
        2 => metric_equivalence(&mut fx)?,
        3 => monotonicity(&mut fx)?,
        4 => envelope(&mut fx)?,
        5 => pointwise_consistency(&mut fx)?,
        6 => plateau(&mut fx)?,
        _ => two_arc_inclusion(&mut fx)?,
    }
    Ok(fx.finish())
}

/// Runs the configured fixtures (all when the list is empty), writing field
/// files and `report.json` under `out_dir`.
pub fn run_verify(cfg: &RunConfig, out_dir: &Path) -> Result<VerifyReport> {
    let mut settings = VerifySettings::from_config(cfg);
    settings.out_dir = Some(out_dir.to_path_buf());
    let names: Vec<&str> = if cfg.verify.fixtures.is_empty() {
        FIXTURES.to_vec()
    } else {
        cfg.verify.fixtures.iter().map(String::as_str).collect()
    };
    let fixtures = names
        .iter()
        .map(|name| run_fixture(name, &settings))
        .collect::<Result<Vec<_>>>()?;
    let report = assemble(fixtures);
    io::write_json(&out_dir.join("report.json"), &report)?;
    Ok(report)
}

pub fn assemble(fixtures: Vec<FixtureReport>) -> VerifyReport {
    let failed: Vec<String> = fixtures
        .iter()
        .flat_map(|f| &f.checks)
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .collect();
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        passed: failed.is_empty(),
        n_checks: fixtures.iter().map(|f| f.checks.len()).sum(),
        failed,
        fixtures,
    }
}

struct Minimizers {
    solve: SolveResult,
    u_abs: ScalarField,
}

fn minimizers(fx: &mut Fixture, prefix: &str, metric: &Metric, g: &ScalarField) -> Result<Minimizers> {
    let s = fx.settings;
    let solve = solve_mu(
        metric,
        g,
        &SolverOptions {
            tol_lambda: s.tol_lambda,
            ..Default::default()
        },
    )?;
    let v0 = ScalarField::midpoint(&solve.s_minus, &solve.s_plus, "u0");
    let abs = absolutize(
        metric,
        &v0,
        &AbsolutizeOptions {
            n_sweeps: s.n_sweeps,
            tol_fix: s.tol_fix,
            rng_seed: s.rng_seed,
            ..Default::default()
        },
    )?;
    fx.note(&format!("{prefix}mu"), solve.mu);
    fx.note(&format!("{prefix}sweeps"), abs.sweeps as f64);
    Ok(Minimizers { solve, u_abs: abs.field })
}

fn max_error(dom: &GridDomain, field: &ScalarField, exact: impl Fn(Vec2) -> f64) -> f64 {
    dom.inside_nodes()
        .map(|n| (field.values[n] - exact(dom.position(n))).abs())
        .fold(0.0, f64::max)
}

/// `S^− ≤ u_abs ≤ S^+` and `u(y) − u(x) ≤ d_{μ+tol}(x, y)` on 500 random pairs.
fn envelope_checks(fx: &mut Fixture, prefix: &str, metric: &Metric, g: &ScalarField, m: &Minimizers) {
    let dom = metric.dom;
    let u = &m.u_abs.values;
    let slack = feasibility_tolerance(dom, g);
    let violation = dom
        .inside_nodes()
        .map(|n| (m.solve.s_minus.values[n] - u[n]).max(u[n] - m.solve.s_plus.values[n]))
        .fold(0.0, f64::max);
    fx.le(&format!("{prefix}envelope_violation"), violation, slack);

    let lambda = m.solve.mu * (1.0 + fx.settings.tol_lambda);
    let nodes: Vec<usize> = dom.inside_nodes().collect();
    let mut violations = 0usize;
    for _ in 0..25 {
        let x = *nodes.choose(&mut fx.rng).expect("non-empty domain");
        let d = metric.from_node(lambda, x);
        for _ in 0..20 {
            let y = *nodes.choose(&mut fx.rng).expect("non-empty domain");
            if u[y] - u[x] > d.dist[y] + slack {
                violations += 1;
            }
        }
    }
    fx.le(&format!("{prefix}certificate_violations"), violations as f64, 0.0);
}

/// Slope equality per step, endpoints on ∂Ω, and total cost against `d_μ(x₋, x₊)`.
fn chain_checks(fx: &mut Fixture, prefix: &str, dom: &GridDomain, chains: &[ChainCheck]) {
    let defect = chains.iter().map(|c| c.max_slope_defect).fold(0.0, f64::max);
    fx.le(&format!("{prefix}chain_slope_defect"), defect, 1e-6);
    let off_boundary = chains
        .iter()
        .flat_map(|c| [c.up.end(), c.down.end()])
        .filter(|&n| !dom.is_boundary[n])
        .count();
    fx.le(&format!("{prefix}chain_endpoints_off_boundary"), off_boundary as f64, 0.0);
    let length_error = chains
        .iter()
        .map(|c| (c.chain_cost - c.endpoint_distance).abs() / c.endpoint_distance.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    fx.le(&format!("{prefix}chain_length_rel_error"), length_error, 0.01);
    fx.note(&format!("{prefix}chains"), chains.len() as f64);
}

/// Runs [`verify_inclusion`], turning a stalled chain into a failed check.
#[allow(clippy::too_many_arguments)]
fn inclusion_report(
    fx: &mut Fixture,
    prefix: &str,
    metric: &Metric,
    u: &ScalarField,
    pw: &PointwiseField,
    others: &[(String, PointwiseField)],
    mu: f64,
    seeds: &[usize],
) -> Result<Option<crate::pointwise::AttainmentReport>> {
    let tau = 0.05 * pw.sup().0;
    match verify_inclusion(metric, u, pw, others, tau, 2.0 * tau, mu, seeds, &ChainOptions::default()) {
        Ok(r) => Ok(Some(r)),
        Err(Error::ChainStall { node, .. }) => {
            fx.note(&format!("{prefix}stalled_at"), node as f64);
            fx.le(&format!("{prefix}chain_stalls"), 1.0, 0.0);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn eikonal_1d(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(64);
    let dom = GridDomain::build(Shape::unit_interval(), 1.0 / n as f64, 16)?;
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| p.x);
    fx.note("h", dom.h);
    let m = minimizers(fx, "", &metric, &g)?;
    fx.le("mu_error", (m.solve.mu - 1.0).abs(), 1e-3);
    fx.le("s_minus_error", max_error(&dom, &m.solve.s_minus, |p| p.x), dom.h);
    fx.le("s_plus_error", max_error(&dom, &m.solve.s_plus, |p| p.x), dom.h);
    envelope_checks(fx, "", &metric, &g, &m);

    let pw = pointwise_h(&metric, &m.u_abs, &default_radii(&dom), LOCAL_TOL_LAMBDA)?;
    let tau = 0.05 * pw.sup().0;
    let set = attainment_set(&pw, tau);
    let n_interior = dom.interior_nodes().count();
    fx.ge("attainment_fraction", set.len() as f64 / n_interior as f64, 1.0);

    let mid = dom.node(n / 2, 0);
    if let Some(report) = inclusion_report(fx, "", &metric, &m.u_abs, &pw, &[], m.solve.mu, &[mid])? {
        let c = &report.chains[0];
        let additivity = (c.chain_cost - c.endpoint_distance)
            .abs()
            .max((c.endpoint_rise - c.endpoint_distance).abs());
        fx.le("chain_additivity_error", additivity, 1e-6);
        let ends = [c.down.end(), c.up.end()];
        let missed = [dom.node(0, 0), dom.node(n, 0)].iter().filter(|e| !ends.contains(e)).count();
        fx.le("chain_endpoints_missed", missed as f64, 0.0);
        chain_checks(fx, "", &dom, &report.chains);
    }
    fx.write_fields("", &dom, &[&m.solve.s_minus, &m.solve.s_plus, &m.u_abs, &pw.h_du_field("h_du")])
}

fn eikonal_2d(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(64);
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / n as f64, 16)?;
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| p.x);
    fx.note("h", dom.h);
    let m = minimizers(fx, "", &metric, &g)?;
    fx.le("mu_rel_error", (m.solve.mu - 1.0).abs(), 0.03);
    fx.le("s_minus_error", max_error(&dom, &m.solve.s_minus, |p| p.x), 0.03);
    fx.le("s_plus_error", max_error(&dom, &m.solve.s_plus, |p| p.x), 0.03);
    envelope_checks(fx, "", &metric, &g, &m);

    let pw = pointwise_h(&metric, &m.u_abs, &default_radii(&dom), LOCAL_TOL_LAMBDA)?;
    let depth = 3.0 * dom.h * (1.0 - 1e-9);
    let h_du_error = dom
        .interior_nodes()
        .filter(|&x| dom.dist_to_boundary(x) >= depth)
        .map(|x| (pw.h_du[x] - 1.0).abs())
        .fold(0.0, f64::max);
    fx.le("h_du_rel_error", h_du_error, 0.05);
    if let Some(report) = inclusion_report(fx, "", &metric, &m.u_abs, &pw, &[], m.solve.mu, &[])? {
        chain_checks(fx, "", &dom, &report.chains);
    }
    fx.write_fields("", &dom, &[&m.solve.s_minus, &m.solve.s_plus, &m.u_abs, &pw.h_du_field("h_du")])
}

struct Case {
    name: &'static str,
    shape: Shape,
    spec: HamiltonianSpec,
}

fn metric_cases(include_power: bool) -> Result<Vec<Case>> {
    let unit = Shape::unit_box();
    let (lo, hi) = unit.bounds();
    let mut cases = vec![
        Case {
            name: "eikonal-box",
            shape: unit.clone(),
            spec: HamiltonianSpec::eikonal(),
        },
        Case {
            name: "anisotropic-box",
            shape: unit.clone(),
            spec: HamiltonianSpec::anisotropic([[4.0, 0.0], [0.0, 1.0]])?,
        },
        Case {
            name: "weighted-box",
            shape: unit.clone(),
            spec: HamiltonianSpec::weighted(
                WeightField::Affine {
                    c0: 1.0,
                    cx: 0.5,
                    cy: 0.0,
                },
                lo,
                hi,
            )?,
        },
        Case {
            name: "plateau-disc",
            shape: Shape::Disc {
                center: Vec2::ZERO,
                radius: 1.0,
            },
            spec: HamiltonianSpec::plateau(0.5, 0.75)?,
        },
        Case {
            name: "eikonal-slit",
            shape: Shape::slit_annulus(),
            spec: HamiltonianSpec::eikonal(),
        },
    ];
    if include_power {
        cases.push(Case {
            name: "power2-annulus",
            shape: Shape::Annulus {
                center: Vec2::ZERO,
                r_in: 0.5,
                r_out: 1.0,
            },
            spec: HamiltonianSpec::isotropic_power(2.0)?,
        });
    }
    Ok(cases)
}

/// `sources × per_source` random pairs of interior nodes in one component, with
/// the intrinsic distance of each pair.
fn random_pairs(rng: &mut ChaCha8Rng, dom: &GridDomain, sources: usize, per_source: usize) -> Vec<(usize, Vec<(usize, f64)>)> {
    let nodes: Vec<usize> = dom.interior_nodes().collect();
    (0..sources)
        .map(|_| {
            let x = *nodes.choose(rng).expect("non-empty interior");
            let intrinsic = dijkstra(dom, dom.edge_lengths(), &[(x, 0.0)], Direction::Forward, &DijkstraOptions::default());
            let mut targets = Vec::with_capacity(per_source);
            while targets.len() < per_source {
                let y = *nodes.choose(rng).expect("non-empty interior");
                if y != x && intrinsic.dist[y].is_finite() {
                    targets.push((y, intrinsic.dist[y]));
                }
            }
            (x, targets)
        })
        .collect()
}

fn metric_equivalence(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(32);
    for case in metric_cases(true)? {
        let dom = GridDomain::build(case.shape, 1.0 / n as f64, 16)?;
        let metric = Metric::new(&case.spec, &dom);
        let pairs = random_pairs(&mut fx.rng, &dom, 20, 10);
        let mut violations = 0usize;
        let mut worst: f64 = 0.0;
        for lambda in [0.5, 1.0, 2.0] {
            let (alpha, big_m) = (case.spec.inner_radius(lambda), case.spec.outer_radius(lambda));
            for (x, targets) in &pairs {
                let d = metric.from_node(lambda, *x);
                for &(y, intrinsic) in targets {
                    let eps = 1e-9 * (1.0 + big_m * intrinsic);
                    let below = alpha * intrinsic - eps - d.dist[y];
                    let above = d.dist[y] - big_m * intrinsic - eps;
                    worst = worst.max(below).max(above);
                    if below > 0.0 || above > 0.0 {
                        violations += 1;
                    }
                }
            }
        }
        fx.note(&format!("{}/worst_excess", case.name), worst);
        fx.le(&format!("{}/violations", case.name), violations as f64, 0.0);
    }
    Ok(())
}

fn monotonicity(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(32);
    let grid = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0];
    let delta = 0.05;
    let mut cases = metric_cases(false)?;
    cases.push(Case {
        name: "power2-box",
        shape: Shape::unit_box(),
        spec: HamiltonianSpec::isotropic_power(2.0)?,
    });
    for case in cases {
        let dom = GridDomain::build(case.shape, 1.0 / n as f64, 16)?;
        let metric = Metric::new(&case.spec, &dom);
        let pairs = random_pairs(&mut fx.rng, &dom, 10, 5);
        let mut monotone_violations = 0usize;
        let mut continuity_violations = 0usize;
        let has_modulus = case.spec.continuity_modulus(1.0, delta).is_some();
        for (x, targets) in &pairs {
            let fields: Vec<Vec<f64>> = grid.iter().map(|&l| metric.from_node(l, *x).dist).collect();
            for &(y, _) in targets {
                for k in 1..grid.len() {
                    let (a, b) = (fields[k - 1][y], fields[k][y]);
                    if a > b + 1e-12 * (1.0 + b.abs()) {
                        monotone_violations += 1;
                    }
                }
            }
            if has_modulus {
                for (k, &lambda) in grid.iter().enumerate() {
                    let below = metric.from_node(lambda - delta, *x).dist;
                    let beta = case.spec.continuity_modulus(lambda, delta).unwrap_or(f64::INFINITY);
                    for &(y, intrinsic) in targets {
                        let gap = (below[y] - fields[k][y]).abs();
                        if gap > beta * intrinsic + 1e-9 * (1.0 + fields[k][y]) {
                            continuity_violations += 1;
                        }
                    }
                }
            }
        }
        fx.le(&format!("{}/monotonicity_violations", case.name), monotone_violations as f64, 0.0);
        if has_modulus {
            fx.le(&format!("{}/continuity_violations", case.name), continuity_violations as f64, 0.0);
        }
    }
    Ok(())
}

fn envelope(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(32);
    let unit = Shape::unit_box();
    let (lo, hi) = unit.bounds();
    let cases: Vec<(Case, fn(Vec2) -> f64, usize)> = vec![
        (
            Case {
                name: "anisotropic-box",
                shape: unit.clone(),
                spec: HamiltonianSpec::anisotropic([[4.0, 0.0], [0.0, 1.0]])?,
            },
            |p| p.x,
            n,
        ),
        (
            Case {
                name: "weighted-box",
                shape: unit.clone(),
                spec: HamiltonianSpec::weighted(
                    WeightField::Affine {
                        c0: 1.0,
                        cx: 0.5,
                        cy: 0.0,
                    },
                    lo,
                    hi,
                )?,
            },
            |p| p.x + p.y * p.y,
            n,
        ),
        (
            Case {
                name: "eikonal-slit",
                shape: Shape::slit_annulus(),
                spec: HamiltonianSpec::eikonal(),
            },
            |p| p.y.atan2(p.x),
            (n / 2).max(4),
        ),
    ];
    for (case, g_fn, cells) in cases {
        let dom = GridDomain::build(case.shape, 1.0 / cells as f64, 16)?;
        let metric = Metric::new(&case.spec, &dom);
        let g = ScalarField::from_fn(&dom, "g", g_fn);
        let prefix = format!("{}/", case.name);
        let m = minimizers(fx, &prefix, &metric, &g)?;
        envelope_checks(fx, &prefix, &metric, &g, &m);
        fx.write_fields(case.name, &dom, &[&m.solve.s_minus, &m.solve.s_plus, &m.u_abs])?;
    }
    Ok(())
}

fn pointwise_consistency(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(32);
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / n as f64, 16)?;
    let (lo, hi) = dom.shape.bounds();
    let eik = HamiltonianSpec::eikonal();
    let weighted = HamiltonianSpec::weighted(
        WeightField::Affine {
            c0: 1.0,
            cx: 0.5,
            cy: 0.0,
        },
        lo,
        hi,
    )?;
    let apex = Vec2::new(-0.5, 0.5);
    type Exact = fn(Vec2) -> f64;
    let cases: [(&str, &HamiltonianSpec, Exact, Exact); 3] = [
        ("linear", &eik, |p| 0.3 * p.x + 0.4 * p.y, |_| 0.5),
        ("cone", &eik, |p| (p - Vec2::new(-0.5, 0.5)).norm(), |_| 1.0),
        ("weighted-linear", &weighted, |p| p.x, |p| 1.0 / (1.0 + 0.5 * p.x)),
    ];
    debug_assert!(!dom.shape.contains(apex, 0.0));
    for (name, spec, u_fn, h_exact) in cases {
        let metric = Metric::new(spec, &dom);
        let u = ScalarField::from_fn(&dom, name, u_fn);
        let pw = pointwise_h(&metric, &u, &default_radii(&dom), LOCAL_TOL_LAMBDA)?;
        let mut worst: f64 = 0.0;
        let mut sup_exact: f64 = 0.0;
        for x in dom.interior_nodes() {
            let exact = h_exact(dom.position(x));
            worst = worst.max((pw.h_du[x] - exact).abs());
            sup_exact = sup_exact.max(exact);
        }
        let c = worst / dom.h;
        let c_sup = (pw.sup().0 - sup_exact).abs() / dom.h;
        fx.note(&format!("{name}/C"), c);
        fx.le(&format!("{name}/error_over_h"), c, 5.0);
        fx.le(&format!("{name}/sup_error_over_h"), c_sup, 5.0);
    }
    Ok(())
}

fn plateau(fx: &mut Fixture) -> Result<()> {
    let n = fx.cells(32);
    let shape = Shape::Box {
        lo: Vec2::new(-1.5, -1.5),
        hi: Vec2::new(1.5, 1.5),
    };
    let dom = GridDomain::build(shape, 1.0 / n as f64, 16)?;
    let spec = HamiltonianSpec::plateau(0.5, 0.75)?;
    let metric = Metric::new(&spec, &dom);
    let conj_error = (0..16)
        .map(|k| {
            let q = Vec2::from_angle(2.0 * PI * k as f64 / 16.0 + 0.1);
            (spec.conjugate(Vec2::ZERO, q, 0.5) - 0.75).abs()
        })
        .fold(0.0, f64::max);
    fx.le("conjugate_error", conj_error, 1e-3);

    let slope = 0.6;
    let u = ScalarField::from_fn(&dom, "u", |p| slope * p.x);
    let origin = dom.nearest_node(Vec2::ZERO).ok_or(Error::EmptyInterior)?;
    let d = metric.from_node(0.5, origin);
    let sphere_max = dom
        .inside_nodes()
        .filter(|&y| (dom.position(y).norm() - 1.0).abs() <= 0.5 * dom.h)
        .map(|y| u.values[y] - d.dist[y])
        .fold(f64::NEG_INFINITY, f64::max);
    let expected = slope - 0.75;
    fx.note("sphere_max", sphere_max);
    fx.le("sphere_max_rel_error", (sphere_max - expected).abs() / expected.abs(), 0.02);
    fx.lt("sphere_max", sphere_max, 0.0);

    let stalled = match ascent_chain(&metric, &u, origin, 0.5, ChainDirection::Up, &ChainOptions::default()) {
        Err(Error::ChainStall { .. }) => 1.0,
        Ok(_) => 0.0,
        Err(e) => return Err(e),
    };
    fx.ge("chain_stall_detected", stalled, 1.0);
    Ok(())
}

fn two_arc_inclusion(fx: &mut Fixture) -> Result<()> {
    let coarse = fx.cells(64);
    let spec = HamiltonianSpec::eikonal();
    let mut fractions = Vec::new();
    for n in [coarse, 2 * coarse] {
        let prefix = format!("n{n}/");
        let dom = GridDomain::build(Shape::unit_box(), 1.0 / n as f64, 16)?;
        let metric = Metric::new(&spec, &dom);
        let g = ScalarField::from_fn(&dom, "g", |p| two_arc(p, TWO_ARC_BAND, TWO_ARC_DECAY));
        let m = minimizers(fx, &prefix, &metric, &g)?;
        let gap = m.solve.s_plus.max_abs_diff(&m.solve.s_minus, &dom);
        fx.ge(&format!("{prefix}extremal_gap"), gap, 1e-2);
        envelope_checks(fx, &prefix, &metric, &g, &m);

        let radii = default_radii(&dom);
        let pw_abs = pointwise_h(&metric, &m.u_abs, &radii, LOCAL_TOL_LAMBDA)?;
        let others = vec![
            ("s_minus".to_string(), pointwise_h(&metric, &m.solve.s_minus, &radii, LOCAL_TOL_LAMBDA)?),
            ("s_plus".to_string(), pointwise_h(&metric, &m.solve.s_plus, &radii, LOCAL_TOL_LAMBDA)?),
        ];
        let Some(report) = inclusion_report(fx, &prefix, &metric, &m.u_abs, &pw_abs, &others, m.solve.mu, &[])? else {
            continue;
        };
        fx.note(&format!("{prefix}attainment_size"), report.set.len() as f64);
        for v in &report.inclusion_verdicts {
            fx.ge(&format!("{prefix}inclusion_in_{}", v.name), v.fraction, 0.95);
            fx.lt(&format!("{prefix}reverse_inclusion_from_{}", v.name), v.reverse_fraction, 0.5);
        }
        fractions.push(report.inclusion_verdicts.iter().map(|v| v.fraction).collect::<Vec<_>>());
        chain_checks(fx, &prefix, &dom, &report.chains);
        let sub = format!("n{n}");
        fx.write_fields(&sub, &dom, &[&m.solve.s_minus, &m.solve.s_plus, &m.u_abs, &pw_abs.h_du_field("h_du")])?;
    }
    if let [coarse_f, fine_f] = fractions.as_slice() {
        for (k, name) in ["s_minus", "s_plus"].iter().enumerate() {
            fx.ge(&format!("refinement_gain_{name}"), fine_f[k] - coarse_f[k], 0.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> VerifySettings {
        VerifySettings {
            cells: Some(16),
            ..Default::default()
        }
    }

    #[test]
    fn eikonal_1d_fixture_passes() {
        let report = run_fixture("eikonal-1d", &coarse()).unwrap();
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }

    #[test]
    fn plateau_fixture_detects_the_stall() {
        let report = run_fixture("plateau", &coarse()).unwrap();
        let stall = report.checks.iter().find(|c| c.name == "plateau/chain_stall_detected").unwrap();
        assert!(stall.passed);
    }

    #[test]
    fn zero_tolerance_override_fails_by_name() {
        let mut settings = coarse();
        settings.overrides.insert("eikonal-1d/mu_error".into(), 0.0);
        settings.overrides.insert("eikonal-1d/s_minus_error".into(), -1.0);
        let report = assemble(vec![run_fixture("eikonal-1d", &settings).unwrap()]);
        assert_eq!(report.exit_code(), 1);
        assert!(report.failed.contains(&"eikonal-1d/s_minus_error".to_string()));
    }
}
