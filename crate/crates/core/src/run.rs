//! Subcommand orchestration: build the problem from a config, run a stage,
//! write its files.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::domain::{GridDomain, ScalarField};
use crate::error::{Error, Result};
use crate::finsler::{DijkstraOptions, Direction, Metric};
use crate::hamiltonian::HamiltonianSpec;
use crate::io;
use crate::pointwise::{
    ascent_chain, chain_check, default_radii, pointwise_h, verify_inclusion, AttainmentReport, Chain, ChainCheck,
    ChainDirection, ChainOptions, InclusionVerdict, PointwiseField,
};
use crate::solver::{absolutize, local_optimality_residual, solve_mu, AbsolutizeOutcome, Probe, SolveResult};
use crate::verify::{self, VerifyReport};

/// Domain, Hamiltonian and boundary data of a config.
pub struct Problem {
    pub dom: GridDomain,
    pub spec: HamiltonianSpec,
    pub g: ScalarField,
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let dom = cfg.build_domain()?;
        let spec = cfg.build_hamiltonian(&dom)?;
        let g = cfg.boundary_field(&dom)?;
        Ok(Self { dom, spec, g })
    }

    pub fn metric(&self) -> Metric<'_> {
        Metric::new(&self.spec, &self.dom)
    }
}

/// Node `(i, j)` from `"i,j"`.
pub fn parse_node(dom: &GridDomain, text: &str) -> Result<usize> {
    let bad = || Error::ConfigValue {
        path: "node".into(),
        message: format!("expected `i,j`, got `{text}`"),
    };
    let (i, j) = text.split_once(',').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    if i >= dom.nx || j >= dom.ny {
        return Err(Error::ConfigValue {
            path: "node".into(),
            message: format!("({i}, {j}) is off the {}×{} grid", dom.nx, dom.ny),
        });
    }
    let node = dom.node(i, j);
    dom.check_inside(node)?;
    Ok(node)
}

fn write_field(cfg: &RunConfig, dom: &GridDomain, field: &ScalarField, out: &Path) -> Result<PathBuf> {
    let path = out.join(format!("{}.csv", field.name));
    io::write_field(field, dom, &path)?;
    if cfg.output.emit_heatmaps {
        io::write_heatmap(field, dom, &out.join(&field.name))?;
    }
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveTrace {
    pub mu: f64,
    pub bracket: (f64, f64),
    pub boundary_residual: f64,
    pub probes: Vec<Probe>,
    pub sweeps: usize,
    pub converged: bool,
    pub last_update: f64,
    /// `max_V (sup_V H(x, ∇_h u) − μ_V)` over sampled patches.
    pub local_optimality_residual: f64,
    pub residual_patch_radius: f64,
}

pub struct SolveOutput {
    pub solve: SolveResult,
    pub abs: AbsolutizeOutcome,
    pub trace: SolveTrace,
}

/// `μ`, `S^±` and `u_abs`; writes `mu.txt`, `s_minus.csv`, `s_plus.csv`,
/// `u_abs.csv` and `trace.json`.
pub fn solve(cfg: &RunConfig, problem: &Problem, out: &Path) -> Result<SolveOutput> {
    let metric = problem.metric();
    let dom = &problem.dom;
    let solve = solve_mu(&metric, &problem.g, &cfg.solver_options())?;
    log::info!("μ = {:.9e} after {} probes", solve.mu, solve.bisection_trace.len());
    let v0 = ScalarField::midpoint(&solve.s_minus, &solve.s_plus, "u0");
    let abs = absolutize(&metric, &v0, &cfg.absolutize_options())?;
    if !abs.converged {
        log::warn!("absolutize stopped after {} sweeps without reaching tol_fix", abs.sweeps);
    }
    let residual_radius = cfg.solver.residual_radius.unwrap_or(4.0 * dom.h);
    let (residual, _) = local_optimality_residual(&metric, &abs.field, residual_radius, 4)?;
    let trace = SolveTrace {
        mu: solve.mu,
        bracket: solve.bracket,
        boundary_residual: solve.residual,
        probes: solve.bisection_trace.clone(),
        sweeps: abs.sweeps,
        converged: abs.converged,
        last_update: abs.max_updates.last().copied().unwrap_or(0.0),
        local_optimality_residual: residual,
        residual_patch_radius: residual_radius,
    };
    io::write_bytes(&out.join("mu.txt"), format!("{}\n", io::fmt_f64(solve.mu)).as_bytes())?;
    for f in [&solve.s_minus, &solve.s_plus, &abs.field] {
        write_field(cfg, dom, f, out)?;
    }
    io::write_json(&out.join("trace.json"), &trace)?;
    Ok(SolveOutput { solve, abs, trace })
}

pub enum DistanceSource {
    Node(usize),
    /// Boundary values `c(y)`: the transform is `min_y c(y) + d_λ(y, x)`.
    Boundary(ScalarField),
}

/// Forward (or reverse) transform at `λ` from one node or from boundary data.
pub fn distance(
    cfg: &RunConfig,
    problem: &Problem,
    lambda: f64,
    source: &DistanceSource,
    reverse: bool,
    out_file: &Path,
) -> Result<ScalarField> {
    let dom = &problem.dom;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::ConfigValue {
            path: "lambda".into(),
            message: format!("must be finite and non-negative, got {lambda}"),
        });
    }
    let seeds: Vec<(usize, f64)> = match source {
        DistanceSource::Node(n) => vec![(*n, 0.0)],
        DistanceSource::Boundary(c) => dom.boundary_nodes.iter().map(|&b| (b, c.values[b])).collect(),
    };
    if let Some(&(b, _)) = seeds.iter().find(|(_, c)| !c.is_finite()) {
        let (i, j) = dom.ij(b);
        return Err(Error::Format {
            what: "boundary CSV",
            message: format!("no finite value for boundary node ({i}, {j})"),
        });
    }
    let direction = if reverse { Direction::Reverse } else { Direction::Forward };
    let field = problem.metric().transform(lambda, &seeds, direction, &DijkstraOptions::default());
    let values = (0..dom.n_nodes()).map(|n| if dom.inside[n] { field.dist[n] } else { f64::NAN }).collect();
    let result = ScalarField::new("distance", values);
    io::write_field(&result, dom, out_file)?;
    if cfg.output.emit_heatmaps {
        io::write_heatmap(&result, dom, &out_file.with_extension(""))?;
    }
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseSummary {
    pub radii: Vec<f64>,
    pub sup: f64,
    pub argmax: Option<(usize, usize)>,
    /// Largest increase of `μ(x, r)` as `r` shrinks.
    pub monotonicity_defect: f64,
}

/// `h_du` for a field; writes `h_du.csv` and `pointwise.json`.
pub fn pointwise(cfg: &RunConfig, problem: &Problem, u: &ScalarField, out: &Path) -> Result<PointwiseField> {
    let metric = problem.metric();
    let radii = cfg.pointwise.radii.clone().unwrap_or_else(|| default_radii(&problem.dom));
    let pw = pointwise_h(&metric, u, &radii, cfg.solver.tol_lambda.min(1e-6))?;
    let (sup, arg) = pw.sup();
    let summary = PointwiseSummary {
        radii,
        sup,
        argmax: arg.map(|n| problem.dom.ij(n)),
        monotonicity_defect: pw.monotonicity_defect(),
    };
    write_field(cfg, &problem.dom, &pw.h_du_field("h_du"), out)?;
    io::write_json(&out.join("pointwise.json"), &summary)?;
    Ok(pw)
}

/// Optimal value from `--mu`, or solved from the config's boundary data.
pub fn resolve_mu(cfg: &RunConfig, problem: &Problem, mu: Option<f64>) -> Result<f64> {
    match mu {
        Some(m) => Ok(m),
        None => Ok(solve_mu(&problem.metric(), &problem.g, &cfg.solver_options())?.mu),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttainSummary {
    pub mu: f64,
    pub sup_value: f64,
    pub tau: f64,
    pub tau_fat: f64,
    pub set_size: usize,
    pub inclusion_verdicts: Vec<InclusionVerdict>,
}

/// Attainment set of `u` and inclusion verdicts against other fields; writes
/// `attain_set.csv`, `chains.json` and `report.json`.
pub fn attain(
    cfg: &RunConfig,
    problem: &Problem,
    u: &ScalarField,
    others: &[ScalarField],
    mu: f64,
    out: &Path,
) -> Result<AttainmentReport> {
    let metric = problem.metric();
    let dom = &problem.dom;
    let radii = cfg.pointwise.radii.clone().unwrap_or_else(|| default_radii(dom));
    let tol = cfg.solver.tol_lambda.min(1e-6);
    let pw = pointwise_h(&metric, u, &radii, tol)?;
    let other_pw = others
        .iter()
        .map(|f| Ok((f.name.clone(), pointwise_h(&metric, f, &radii, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    let tau = cfg.pointwise.tau.unwrap_or_else(|| 0.05 * pw.sup().0);
    let tau_fat = cfg.pointwise.tau_fat.unwrap_or(2.0 * tau);
    let report = verify_inclusion(&metric, u, &pw, &other_pw, tau, tau_fat, mu, &[], &ChainOptions::default())?;
    io::write_bytes(&out.join("attain_set.csv"), io::attain_set_csv(dom, &report.set, &pw.h_du).as_bytes())?;
    io::write_json(&out.join("chains.json"), &report.chains)?;
    let summary = AttainSummary {
        mu,
        sup_value: report.sup_value,
        tau,
        tau_fat,
        set_size: report.set.len(),
        inclusion_verdicts: report.inclusion_verdicts.clone(),
    };
    io::write_json(&out.join("report.json"), &summary)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ChainOutput {
    Both(Box<ChainCheck>),
    One(Chain),
}

/// One chain (or both directions) from `seed` at level `mu`; writes `chains.json`.
pub fn chain(
    problem: &Problem,
    u: &ScalarField,
    seed: usize,
    mu: f64,
    direction: Option<ChainDirection>,
    out_file: &Path,
) -> Result<ChainOutput> {
    let metric = problem.metric();
    let opts = ChainOptions::default();
    let output = match direction {
        Some(d) => ChainOutput::One(ascent_chain(&metric, u, seed, mu, d, &opts)?),
        None => ChainOutput::Both(Box::new(chain_check(&metric, u, &[], seed, mu, &opts)?)),
    };
    io::write_json(out_file, &output)?;
    Ok(output)
}

/// Runs the fixture suite; writes field files and `report.json` under `out`.
pub fn verify(cfg: &RunConfig, out: &Path) -> Result<VerifyReport> {
    verify::run_verify(cfg, out)
}
