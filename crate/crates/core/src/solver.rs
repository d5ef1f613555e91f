//! Optimal value `μ`, the extremal minimizers `S_μ^±` and a local re-solve
//! iteration towards an absolute minimizer.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{GridDomain, ScalarField};
use crate::error::{Error, Result};
use crate::finsler::{dijkstra_with, DijkstraOptions, Direction, Metric, Workspace};
use crate::geometry::Vec2;
use crate::hamiltonian::HamiltonianSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Bisection width relative to the first feasible `λ`.
    pub tol_lambda: f64,
    pub lambda_cap: f64,
    pub initial_lambda: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_lambda: 1e-4,
            lambda_cap: 1e6,
            initial_lambda: 1.0,
        }
    }
}

/// One probe of the boundary compatibility test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub lambda: f64,
    pub feasible: bool,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub mu: f64,
    /// Largest infeasible and smallest feasible `λ` tested.
    pub bracket: (f64, f64),
    pub s_minus: ScalarField,
    pub s_plus: ScalarField,
    /// `max_{x ∈ ∂} max_y (g(y) − d_μ(x, y)) − g(x)`.
    pub residual: f64,
    pub bisection_trace: Vec<Probe>,
}

fn boundary_scale(dom: &GridDomain, g: &ScalarField) -> f64 {
    dom.boundary_nodes.iter().map(|&b| g.values[b].abs()).fold(0.0, f64::max)
}

/// Feasibility threshold for the boundary residual.
pub fn feasibility_tolerance(dom: &GridDomain, g: &ScalarField) -> f64 {
    1e-9 * (1.0 + boundary_scale(dom, g))
}

/// Tests `g(y) − g(x) ≤ d_λ(x, y)` for all boundary pairs with one reverse
/// transform seeded by `(y, −g(y))`.
pub fn feasible(metric: &Metric, g: &ScalarField, lambda: f64) -> Result<Probe> {
    let dom = metric.dom;
    let seeds: Vec<(usize, f64)> = dom.boundary_nodes.iter().map(|&y| (y, -g.values[y])).collect();
    if let Some(&(y, _)) = seeds.iter().find(|(_, c)| !c.is_finite()) {
        return Err(Error::Domain(format!("boundary value at node {y} is not finite")));
    }
    let field = metric.transform(lambda, &seeds, Direction::Reverse, &DijkstraOptions::default());
    let residual = dom
        .boundary_nodes
        .iter()
        .map(|&x| -field.dist[x] - g.values[x])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Probe {
        lambda,
        feasible: residual <= feasibility_tolerance(dom, g),
        residual,
    })
}

/// `S_λ^−(g)(x) = max_y g(y) − d_λ(x, y)` and `S_λ^+(g)(x) = min_y g(y) + d_λ(y, x)`.
pub fn extremal_fields(metric: &Metric, g: &ScalarField, lambda: f64) -> (ScalarField, ScalarField) {
    let dom = metric.dom;
    let opts = DijkstraOptions::default();
    let lower: Vec<(usize, f64)> = dom.boundary_nodes.iter().map(|&y| (y, -g.values[y])).collect();
    let upper: Vec<(usize, f64)> = dom.boundary_nodes.iter().map(|&y| (y, g.values[y])).collect();
    let rev = metric.transform(lambda, &lower, Direction::Reverse, &opts);
    let fwd = metric.transform(lambda, &upper, Direction::Forward, &opts);
    let pick = |n: usize, v: f64| if dom.inside[n] { v } else { f64::NAN };
    let s_minus = (0..dom.n_nodes()).map(|n| pick(n, -rev.dist[n])).collect();
    let s_plus = (0..dom.n_nodes()).map(|n| pick(n, fwd.dist[n])).collect();
    (ScalarField::new("s_minus", s_minus), ScalarField::new("s_plus", s_plus))
}

/// Smallest `λ` (to the bisection tolerance) at which the boundary data is
/// compatible with `d_λ`, together with `S_μ^±`.
pub fn solve_mu(metric: &Metric, g: &ScalarField, opts: &SolverOptions) -> Result<SolveResult> {
    if !(opts.tol_lambda > 0.0) {
        return Err(Error::ConfigValue {
            path: "solver.tol_lambda".into(),
            message: "must be positive".into(),
        });
    }
    let mut trace = Vec::new();
    let probe = |lambda: f64, trace: &mut Vec<Probe>| -> Result<Probe> {
        let p = feasible(metric, g, lambda)?;
        log::debug!("λ = {lambda:.9e}: residual {:.3e}", p.residual);
        trace.push(p);
        Ok(p)
    };

    let at_zero = probe(0.0, &mut trace)?;
    let (mut lo, mut hi, mut hi_probe) = if at_zero.feasible {
        (0.0, 0.0, at_zero)
    } else {
        let mut lambda = opts.initial_lambda.max(1e-8);
        let mut lo = 0.0;
        loop {
            let p = probe(lambda, &mut trace)?;
            if p.feasible {
                break (lo, lambda, p);
            }
            if lambda > opts.lambda_cap {
                return Err(Error::Unbounded {
                    cap: opts.lambda_cap,
                    residual: p.residual,
                });
            }
            lo = lambda;
            lambda *= 2.0;
        }
    };
    let width = opts.tol_lambda * hi;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid, &mut trace)?;
        if p.feasible {
            hi = mid;
            hi_probe = p;
        } else {
            lo = mid;
        }
    }
    let mu = hi;
    let (s_minus, s_plus) = extremal_fields(metric, g, mu);
    Ok(SolveResult {
        mu,
        bracket: (lo, hi),
        s_minus,
        s_plus,
        residual: hi_probe.residual,
        bisection_trace: trace,
    })
}

/// Least-squares gradient of `v` at `node` over its stencil neighbours.
pub fn ls_gradient(dom: &GridDomain, v: &ScalarField, node: usize) -> Option<Vec2> {
    let adj = &dom.adjacency;
    let p0 = dom.position(node);
    let v0 = v.values[node];
    let (mut sxx, mut sxy, mut syy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for e in adj.edges_of(node) {
        let n = adj.targets[e];
        let d = dom.position(n) - p0;
        let dv = v.values[n] - v0;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
        bx += d.x * dv;
        by += d.y * dv;
    }
    if dom.shape.is_one_dimensional() {
        return (sxx > 0.0).then(|| Vec2::new(bx / sxx, 0.0));
    }
    let det = sxx * syy - sxy * sxy;
    if det <= 1e-12 * (sxx * syy).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(Vec2::new((syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det))
}

/// `max` over interior nodes of `H(x, ∇_h v(x))` and a node attaining it.
pub fn sup_h_of_field(spec: &HamiltonianSpec, dom: &GridDomain, v: &ScalarField) -> Result<(f64, Option<usize>)> {
    let mut best = (0.0, None);
    for node in dom.interior_nodes() {
        if let Some(grad) = ls_gradient(dom, v, node) {
            let val = spec.eval_h(dom.position(node), grad)?;
            if val > best.0 || best.1.is_none() {
                best = (val, Some(node));
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsolutizeOptions {
    /// Patches are the interior nodes within this intrinsic distance of a
    /// centre; `None` means single-node patches.
    pub patch_radius: Option<f64>,
    pub n_sweeps: usize,
    /// Stop once a sweep changes no value by more than this.
    pub tol_fix: f64,
    pub rng_seed: u64,
    /// Relative tolerance for local `λ` bisections (non-separable kinds).
    pub tol_lambda: f64,
}

impl Default for AbsolutizeOptions {
    fn default() -> Self {
        Self {
            patch_radius: None,
            n_sweeps: 20_000,
            tol_fix: 1e-9,
            rng_seed: 0,
            tol_lambda: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbsolutizeOutcome {
    pub field: ScalarField,
    pub sweeps: usize,
    /// Largest update of each sweep.
    pub max_updates: Vec<f64>,
    pub converged: bool,
}

/// Interior nodes of a patch and the nodes adjacent to it.
#[derive(Debug, Clone)]
struct Patch {
    interior: Vec<usize>,
    rim: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    None,
    Interior,
    Rim,
}

/// Per-thread scratch space for local problems.
struct Local {
    ws: Workspace,
    role: Vec<Role>,
}

impl Local {
    fn new(n: usize) -> Self {
        Self {
            ws: Workspace::new(n),
            role: vec![Role::None; n],
        }
    }

    fn mark(&mut self, patch: &Patch) {
        for &n in &patch.interior {
            self.role[n] = Role::Interior;
        }
        for &n in &patch.rim {
            self.role[n] = Role::Rim;
        }
    }

    fn unmark(&mut self, patch: &Patch) {
        for &n in patch.interior.iter().chain(&patch.rim) {
            self.role[n] = Role::None;
        }
    }
}

fn build_patch(dom: &GridDomain, center: usize, radius: Option<f64>) -> Patch {
    let adj = &dom.adjacency;
    let interior: Vec<usize> = match radius {
        Some(r) if r >= dom.h * (1.0 - 1e-9) => {
            let ball = dom.intrinsic_ball(center, r);
            (0..dom.n_nodes()).filter(|&n| ball[n] <= r && dom.is_interior(n)).collect()
        }
        _ => vec![center],
    };
    let mut rim: Vec<usize> = interior
        .iter()
        .flat_map(|&n| adj.edges_of(n).map(|e| adj.targets[e]))
        .filter(|n| interior.binary_search(n).is_err())
        .collect();
    rim.sort_unstable();
    rim.dedup();
    Patch { interior, rim }
}

/// Chebyshev half-width of a patch's interior.
fn patch_reach(dom: &GridDomain, radius: Option<f64>) -> usize {
    match radius {
        Some(r) if r >= dom.h * (1.0 - 1e-9) => (r / dom.h + 1e-9).floor() as usize,
        _ => 0,
    }
}

/// Solution of the local problem on one patch.
struct LocalSolution {
    mu: f64,
    /// `S_V^−` and `S_V^+` on the patch interior, aligned with `Patch::interior`.
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Local edge weight accessor for one level: rim-to-rim edges and edges leaving
/// the patch are removed.
fn local_weight<'a>(metric: &'a Metric, role: &'a [Role], lambda: f64) -> impl Fn(usize) -> f64 + 'a {
    let adj = &metric.dom.adjacency;
    let scaled = metric.scale_profile().map(|_| metric.weights(lambda));
    move |e: usize| {
        let (a, b) = (role[adj.sources[e]], role[adj.targets[e]]);
        if a == Role::None || b == Role::None || (a == Role::Rim && b == Role::Rim) {
            return f64::INFINITY;
        }
        match &scaled {
            Some(w) => w.get(e),
            None => metric.edge_weight_uncached(e, lambda),
        }
    }
}

/// `max_{x,y ∈ rim} v(y) − v(x) − d^V_λ(x, y)` through one reverse transform.
fn local_residual(metric: &Metric, v: &[f64], patch: &Patch, lambda: f64, local: &mut Local) -> f64 {
    let seeds: Vec<(usize, f64)> = patch.rim.iter().map(|&y| (y, -v[y])).collect();
    let Local { ws, role } = local;
    let weight = local_weight(metric, role, lambda);
    dijkstra_with(metric.dom, weight, &seeds, Direction::Reverse, &DijkstraOptions::default(), ws);
    patch
        .rim
        .iter()
        .map(|&x| -ws.dist[x] - v[x])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn solve_patch(metric: &Metric, v: &[f64], patch: &Patch, opts: &AbsolutizeOptions, local: &mut Local) -> LocalSolution {
    let dom = metric.dom;
    let adj = &dom.adjacency;
    let scale = patch.rim.iter().map(|&y| v[y].abs()).fold(0.0, f64::max);
    let tol = 1e-12 * (1.0 + scale);

    if patch.interior.len() == 1 {
        let c = patch.interior[0];
        // Star graph: rim → c → rim, with b_x = w(x → c) and a_y = w(c → y).
        let edges: Vec<(usize, usize)> = adj.edges_of(c).map(|e| (adj.targets[e], e)).collect();
        if let (Some(profile), Some(base)) = (metric.scale_profile(), metric.unit_weights()) {
            let mut k_star: f64 = 0.0;
            for &(x, ex) in &edges {
                let b = base.get(adj.reverse[ex]);
                for &(y, ey) in &edges {
                    let dv = v[y] - v[x];
                    if dv > tol {
                        k_star = k_star.max(dv / (b + base.get(ey)));
                    }
                }
            }
            let lower = edges.iter().map(|&(y, ey)| v[y] - k_star * base.get(ey)).fold(f64::NEG_INFINITY, f64::max);
            let upper = edges
                .iter()
                .map(|&(x, ex)| v[x] + k_star * base.get(adj.reverse[ex]))
                .fold(f64::INFINITY, f64::min);
            return LocalSolution {
                mu: profile.level(k_star),
                lower: vec![lower],
                upper: vec![upper],
            };
        }
        let bounds = |lambda: f64| {
            let lower = edges
                .iter()
                .map(|&(y, ey)| v[y] - metric.edge_weight_uncached(ey, lambda))
                .fold(f64::NEG_INFINITY, f64::max);
            let upper = edges
                .iter()
                .map(|&(x, ex)| v[x] + metric.edge_weight_uncached(adj.reverse[ex], lambda))
                .fold(f64::INFINITY, f64::min);
            (lower, upper)
        };
        let mu = bisect_level(|l| {
            let (lo, up) = bounds(l);
            lo <= up + tol
        }, opts.tol_lambda);
        let (lower, upper) = bounds(mu);
        return LocalSolution {
            mu,
            lower: vec![lower],
            upper: vec![upper],
        };
    }

    local.mark(patch);
    let mu = bisect_level(|l| local_residual(metric, v, patch, l, local) <= tol, opts.tol_lambda);
    let seeds_lo: Vec<(usize, f64)> = patch.rim.iter().map(|&y| (y, -v[y])).collect();
    let seeds_up: Vec<(usize, f64)> = patch.rim.iter().map(|&y| (y, v[y])).collect();
    let none = DijkstraOptions::default();
    let (lower, upper) = {
        let Local { ws, role } = local;
        dijkstra_with(dom, local_weight(metric, role, mu), &seeds_lo, Direction::Reverse, &none, ws);
        let lower: Vec<f64> = patch.interior.iter().map(|&n| -ws.dist[n]).collect();
        dijkstra_with(dom, local_weight(metric, role, mu), &seeds_up, Direction::Forward, &none, ws);
        let upper: Vec<f64> = patch.interior.iter().map(|&n| ws.dist[n]).collect();
        (lower, upper)
    };
    local.unmark(patch);
    LocalSolution { mu, lower, upper }
}

/// Smallest `λ ≥ 0` with `ok(λ)`, for a predicate monotone in `λ`.
fn bisect_level(mut ok: impl FnMut(f64) -> bool, rel_tol: f64) -> f64 {
    if ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    let mut lo = 0.0;
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let width = rel_tol.max(1e-15) * hi;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Gauss–Seidel sweeps of local re-solves. Each patch's interior is replaced by
/// the midpoint of the local extremal minimizers for its own rim data.
/// Patches are grouped in colour classes with disjoint read and write sets;
/// classes are visited in a per-sweep order drawn from the seeded generator,
/// and patches within a class are solved in parallel.
pub fn absolutize(metric: &Metric, v0: &ScalarField, opts: &AbsolutizeOptions) -> Result<AbsolutizeOutcome> {
    let dom = metric.dom;
    let n = dom.n_nodes();
    let mut v = v0.values.clone();
    if let Some(bad) = dom.inside_nodes().find(|&k| !v[k].is_finite()) {
        return Err(Error::Domain(format!("initial field is not finite at node {bad}")));
    }
    let reach = dom.stencil.reach();
    let m = 2 * patch_reach(dom, opts.patch_radius) + reach + 1;
    let mut classes: Vec<Vec<Patch>> = (0..m * m).map(|_| Vec::new()).collect();
    let centres: Vec<usize> = dom.interior_nodes().collect();
    let patches: Vec<Patch> = centres.par_iter().map(|&c| build_patch(dom, c, opts.patch_radius)).collect();
    for (c, patch) in centres.into_iter().zip(patches) {
        let (i, j) = dom.ij(c);
        classes[(j % m) * m + (i % m)].push(patch);
    }
    classes.retain(|c| !c.is_empty());

    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut order: Vec<usize> = (0..classes.len()).collect();
    let mut max_updates = Vec::new();
    let mut converged = false;
    for _ in 0..opts.n_sweeps {
        order.shuffle(&mut rng);
        let mut sweep_max: f64 = 0.0;
        for &k in &order {
            let updates: Vec<LocalSolution> = classes[k]
                .par_iter()
                .map_init(|| Local::new(n), |local, patch| solve_patch(metric, &v, patch, opts, local))
                .collect();
            for (patch, sol) in classes[k].iter().zip(updates) {
                for (t, &node) in patch.interior.iter().enumerate() {
                    let val = 0.5 * (sol.lower[t] + sol.upper[t]);
                    sweep_max = sweep_max.max((val - v[node]).abs());
                    v[node] = val;
                }
            }
        }
        max_updates.push(sweep_max);
        if sweep_max < opts.tol_fix {
            converged = true;
            break;
        }
    }
    log::info!(
        "absolutize: {} sweeps, last update {:.3e}",
        max_updates.len(),
        max_updates.last().copied().unwrap_or(0.0)
    );
    Ok(AbsolutizeOutcome {
        field: ScalarField::new("u_abs", v),
        sweeps: max_updates.len(),
        max_updates,
        converged,
    })
}

/// Per-patch comparison of the discrete sup of `H(x, ∇_h v)` over the patch
/// interior with the local optimal value `μ_V` of the rim data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatchResidual {
    pub center: usize,
    pub sup_h: f64,
    pub mu_local: f64,
}

/// `max_V (sup_h over V − μ_V)` over patches centred at every `stride`-th
/// interior node in each direction.
pub fn local_optimality_residual(
    metric: &Metric,
    v: &ScalarField,
    patch_radius: f64,
    stride: usize,
) -> Result<(f64, Vec<PatchResidual>)> {
    let dom = metric.dom;
    let stride = stride.max(1);
    let opts = AbsolutizeOptions::default();
    let reach = patch_reach(dom, Some(patch_radius));
    let centres: Vec<usize> = dom
        .interior_nodes()
        .filter(|&c| {
            let (i, j) = dom.ij(c);
            i % stride == 0 && j % stride == 0 && dom.dist_to_boundary(c) > reach as f64 * dom.h
        })
        .collect();
    let n = dom.n_nodes();
    let rows: Vec<Result<PatchResidual>> = centres
        .par_iter()
        .map_init(
            || Local::new(n),
            |local, &c| {
                let patch = build_patch(dom, c, Some(patch_radius));
                let sol = solve_patch(metric, &v.values, &patch, &opts, local);
                let mut sup_h: f64 = 0.0;
                for &node in &patch.interior {
                    if let Some(grad) = ls_gradient(dom, v, node) {
                        sup_h = sup_h.max(metric.spec.eval_h(dom.position(node), grad)?);
                    }
                }
                Ok(PatchResidual {
                    center: c,
                    sup_h,
                    mu_local: sol.mu,
                })
            },
        )
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.sup_h - r.mu_local).fold(f64::NEG_INFINITY, f64::max);
    Ok((if rows.is_empty() { 0.0 } else { worst }, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Shape;
    use approx::assert_abs_diff_eq;

    fn line(h: f64) -> GridDomain {
        GridDomain::build(Shape::unit_interval(), h, 16).unwrap()
    }

    fn linear_data(dom: &GridDomain) -> ScalarField {
        ScalarField::from_fn(dom, "g", |p| p.x)
    }

    #[test]
    fn feasibility_examples() {
        let dom = line(1.0 / 16.0);
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let g = linear_data(&dom);
        let p = feasible(&metric, &g, 1.0).unwrap();
        assert!(p.feasible);
        assert!(p.residual.abs() < 1e-12);
        let p = feasible(&metric, &g, 0.5).unwrap();
        assert!(!p.feasible);
        assert_abs_diff_eq!(p.residual, 0.5, epsilon = 1e-12);
        let c = ScalarField::constant(&dom, "g", 3.0);
        assert!(feasible(&metric, &c, 0.0).unwrap().feasible);
    }

    #[test]
    fn one_dimensional_extension_is_the_identity() {
        let dom = line(1.0 / 32.0);
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let res = solve_mu(&metric, &linear_data(&dom), &SolverOptions::default()).unwrap();
        assert!((res.mu - 1.0).abs() <= 1e-4);
        for n in dom.inside_nodes() {
            let x = dom.position(n).x;
            assert!((res.s_minus.values[n] - x).abs() <= dom.h);
            assert!((res.s_plus.values[n] - x).abs() <= dom.h);
        }
        let lambdas: Vec<f64> = res.bisection_trace.iter().filter(|p| p.feasible).map(|p| p.lambda).collect();
        let min_feasible = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(res
            .bisection_trace
            .iter()
            .all(|p| p.feasible == (p.lambda >= min_feasible)));
    }

    #[test]
    fn constant_data_has_zero_value() {
        let dom = GridDomain::build(Shape::unit_box(), 0.125, 16).unwrap();
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let g = ScalarField::constant(&dom, "g", 2.0);
        let res = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
        assert_eq!(res.mu, 0.0);
        assert!(dom.inside_nodes().all(|n| res.s_minus.values[n] == 2.0 && res.s_plus.values[n] == 2.0));
        let out = absolutize(&metric, &res.s_minus, &AbsolutizeOptions::default()).unwrap();
        assert_eq!(out.field.values, res.s_minus.values);
        assert_eq!(out.sweeps, 1);
    }

    #[test]
    fn sup_h_examples() {
        let dom = GridDomain::build(Shape::unit_box(), 0.1, 16).unwrap();
        let eik = HamiltonianSpec::eikonal();
        let v = ScalarField::from_fn(&dom, "v", |p| p.x);
        let (s, node) = sup_h_of_field(&eik, &dom, &v).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        assert!(node.is_some());
        let zero = ScalarField::constant(&dom, "v", 0.0);
        assert_eq!(sup_h_of_field(&eik, &dom, &zero).unwrap().0, 0.0);
    }

    #[test]
    fn linear_field_is_a_fixed_point() {
        let dom = line(1.0 / 16.0);
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let v = linear_data(&dom);
        let out = absolutize(&metric, &v, &AbsolutizeOptions::default()).unwrap();
        assert!(out.converged);
        assert!(out.max_updates[0] < 1e-12);
        let (r, _) = local_optimality_residual(&metric, &v, 2.0 * dom.h, 1).unwrap();
        assert!(r.abs() < 1e-9, "{r}");
    }

    #[test]
    fn unbounded_problem_is_reported() {
        let dom = line(0.25);
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let g = ScalarField::from_fn(&dom, "g", |p| 1e9 * p.x);
        let opts = SolverOptions {
            lambda_cap: 10.0,
            ..Default::default()
        };
        assert!(matches!(solve_mu(&metric, &g, &opts), Err(Error::Unbounded { .. })));
    }
}
