//! Pointwise representative `H(x, Du)(x)` through local optimal values on
//! shrinking balls, attainment sets, ascent chains and the inclusion check
//! between attainment sets of different minimizers.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{GridDomain, ScalarField};
use crate::error::{Error, Result};
use crate::finsler::{dijkstra_with, DijkstraOptions, Direction, EdgeWeights, Metric, Workspace};

/// Relative slack in `u(x′) − u(x) ≤ d_λ(x, x′)`.
const COMPARE_SLACK: f64 = 1e-12;

/// Relative tie window for chain candidates.
const TIE_WINDOW: f64 = 1e-12;

/// Per-thread scratch for local transforms.
pub struct LocalScratch {
    ws: Workspace,
    ball_ws: Workspace,
}

impl LocalScratch {
    pub fn new(dom: &GridDomain) -> Self {
        Self {
            ws: Workspace::new(dom.n_nodes()),
            ball_ws: Workspace::new(dom.n_nodes()),
        }
    }
}

fn intrinsic_ball(dom: &GridDomain, x: usize, r: f64, ws: &mut Workspace) -> Vec<usize> {
    let lengths = dom.edge_lengths();
    let opts = DijkstraOptions {
        cutoff: Some(r * (1.0 + 1e-12)),
        ..Default::default()
    };
    let mut ball = dijkstra_with(dom, |e| lengths[e], &[(x, 0.0)], Direction::Forward, &opts, ws);
    ball.sort_unstable();
    ball
}

/// `μ(x, r) = inf { λ : u(x′) − u(x) ≤ d_λ(x, x′) for |x − x′|_Ω ≤ r }`.
pub fn mu_local(metric: &Metric, u: &ScalarField, x: usize, r: f64, tol_lambda: f64) -> Result<f64> {
    metric.dom.check_inside(x)?;
    let mut scratch = LocalScratch::new(metric.dom);
    Ok(mu_local_with(metric, u, x, r, tol_lambda, &mut scratch))
}

fn mu_local_with(metric: &Metric, u: &ScalarField, x: usize, r: f64, tol_lambda: f64, scratch: &mut LocalScratch) -> f64 {
    let dom = metric.dom;
    let ball = intrinsic_ball(dom, x, r, &mut scratch.ball_ws);
    let ux = u.values[x];
    let slack = |v: f64| COMPARE_SLACK * (1.0 + v.abs().max(ux.abs()));
    let rises: Vec<(usize, f64)> = ball
        .iter()
        .map(|&n| (n, u.values[n] - ux))
        .filter(|&(n, du)| du > slack(u.values[n]))
        .collect();
    if rises.is_empty() {
        return 0.0;
    }
    let top = rises.iter().map(|r| r.1).fold(0.0, f64::max);

    if let (Some(profile), Some(unit)) = (metric.scale_profile(), metric.unit_weights()) {
        let targets: Vec<usize> = rises.iter().map(|r| r.0).collect();
        let opts = DijkstraOptions {
            targets: Some(targets),
            ..Default::default()
        };
        dijkstra_with(dom, |e| unit.get(e), &[(x, 0.0)], Direction::Forward, &opts, &mut scratch.ws);
        let k = rises
            .iter()
            .map(|&(n, du)| du / scratch.ws.dist[n])
            .fold(0.0, f64::max);
        return profile.level(k);
    }

    let mut ok = |lambda: f64| -> bool {
        let opts = DijkstraOptions {
            cutoff: Some(top),
            ..Default::default()
        };
        dijkstra_with(dom, |e| metric.edge_weight_uncached(e, lambda), &[(x, 0.0)], Direction::Forward, &opts, &mut scratch.ws);
        rises.iter().all(|&(n, du)| {
            let d = if scratch.ws.is_settled(n) { scratch.ws.dist[n] } else { f64::INFINITY };
            du <= d + slack(u.values[n])
        })
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let width = tol_lambda * hi;
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

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseField {
    /// Decreasing radii.
    pub radii: Vec<f64>,
    /// `mu_of_r[k][node]` at `radii[k]`; `NaN` off the interior.
    pub mu_of_r: Vec<Vec<f64>>,
    /// `μ` at the smallest radius.
    pub h_du: Vec<f64>,
}

impl PointwiseField {
    pub fn h_du_field(&self, name: &str) -> ScalarField {
        ScalarField::new(name, self.h_du.clone())
    }

    /// Largest `h_du` over the interior and a node attaining it.
    pub fn sup(&self) -> (f64, Option<usize>) {
        let mut best = (f64::NEG_INFINITY, None);
        for (n, &v) in self.h_du.iter().enumerate() {
            if v.is_finite() && v > best.0 {
                best = (v, Some(n));
            }
        }
        best
    }

    /// Largest decrease of `μ(x, r)` from a smaller to a larger radius.
    pub fn monotonicity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..self.radii.len() {
            for (big, small) in self.mu_of_r[k - 1].iter().zip(&self.mu_of_r[k]) {
                if big.is_finite() && small.is_finite() {
                    worst = worst.max(small - big);
                }
            }
        }
        worst
    }
}

/// Default radii `[6h, 4h, 3h]`.
pub fn default_radii(dom: &GridDomain) -> Vec<f64> {
    vec![6.0 * dom.h, 4.0 * dom.h, 3.0 * dom.h]
}

/// `μ(x, r)` at every interior node and radius.
pub fn pointwise_h(metric: &Metric, u: &ScalarField, radii: &[f64], tol_lambda: f64) -> Result<PointwiseField> {
    let dom = metric.dom;
    if radii.is_empty() || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ConfigValue {
            path: "pointwise.radii".into(),
            message: "radii must be non-empty and strictly decreasing".into(),
        });
    }
    if let Some(&r) = radii.iter().find(|&&r| r < 2.0 * dom.h * (1.0 - 1e-9)) {
        return Err(Error::ConfigValue {
            path: "pointwise.radii".into(),
            message: format!("radius {r} is below 2h = {}", 2.0 * dom.h),
        });
    }
    let nodes: Vec<usize> = dom.interior_nodes().collect();
    let rows: Vec<Vec<f64>> = nodes
        .par_iter()
        .map_init(
            || LocalScratch::new(dom),
            |scratch, &x| radii.iter().map(|&r| mu_local_with(metric, u, x, r, tol_lambda, scratch)).collect(),
        )
        .collect();
    let n = dom.n_nodes();
    let mut mu_of_r = vec![vec![f64::NAN; n]; radii.len()];
    for (&x, row) in nodes.iter().zip(rows) {
        for (k, v) in row.into_iter().enumerate() {
            mu_of_r[k][x] = v;
        }
    }
    let h_du = mu_of_r.last().cloned().unwrap_or_default();
    Ok(PointwiseField {
        radii: radii.to_vec(),
        mu_of_r,
        h_du,
    })
}

/// `{x : h_du(x) ≥ sup − τ}` over interior nodes, ascending.
pub fn attainment_set(pw: &PointwiseField, tau: f64) -> Vec<usize> {
    let (sup, _) = pw.sup();
    if !sup.is_finite() {
        return Vec::new();
    }
    attainment_set_at(pw, sup - tau)
}

fn attainment_set_at(pw: &PointwiseField, level: f64) -> Vec<usize> {
    pw.h_du
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.is_finite() && v >= level)
        .map(|(n, _)| n)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainDirection {
    /// Towards larger values of `u`.
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainStep {
    pub from: usize,
    pub to: usize,
    /// `u(to) − u(from)` for up-chains, `u(from) − u(to)` for down-chains.
    pub rise: f64,
    /// `d_μ(from, to)` for up-chains, `d_μ(to, from)` for down-chains.
    pub cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Chain {
    pub direction: ChainDirection,
    pub lambda: f64,
    /// Visited nodes, starting at the seed and ending on the boundary.
    pub nodes: Vec<usize>,
    pub steps: Vec<ChainStep>,
}

impl Chain {
    pub fn total_cost(&self) -> f64 {
        self.steps.iter().map(|s| s.cost).sum()
    }

    pub fn end(&self) -> usize {
        *self.nodes.last().expect("chains are never empty")
    }

    /// `max |rise − cost|` over the steps.
    pub fn max_slope_defect(&self) -> f64 {
        self.steps.iter().map(|s| (s.rise - s.cost).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainOptions {
    /// A step is accepted when its objective is within this of `u(y_k)`.
    pub stall_tol: f64,
    pub max_steps: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            stall_tol: 1e-9,
            max_steps: 10_000,
        }
    }
}

/// Iterated maximal-slope steps from `x0` to the boundary: each step moves to the
/// point of the `d_μ`-shell of radius `R_k = max(α²/(2M)·dist(y_k, ∂Ω), 2hM)`
/// (thickness `±hM`) that maximises `u(z) − d_μ(y_k, z)` (up) or minimises
/// `u(z) + d_μ(z, y_k)` (down).
pub fn ascent_chain(
    metric: &Metric,
    u: &ScalarField,
    x0: usize,
    mu: f64,
    direction: ChainDirection,
    opts: &ChainOptions,
) -> Result<Chain> {
    let dom = metric.dom;
    dom.check_inside(x0)?;
    let weights = metric.weights(mu);
    let mut ws = Workspace::new(dom.n_nodes());
    let scale = dom.inside_nodes().map(|n| u.values[n].abs()).fold(0.0, f64::max);
    let tie = TIE_WINDOW * (1.0 + scale);
    let sign = match direction {
        ChainDirection::Up => 1.0,
        ChainDirection::Down => -1.0,
    };
    let dijkstra_dir = match direction {
        ChainDirection::Up => Direction::Forward,
        ChainDirection::Down => Direction::Reverse,
    };
    let mut nodes = vec![x0];
    let mut steps = Vec::new();
    let mut y = x0;
    loop {
        if dom.is_boundary[y] {
            break;
        }
        let dist_y = dom.dist_to_boundary(y);
        let (alpha, big_m) = metric.spec.local_radii(dom.position(y), dist_y, mu);
        let level = sign * u.values[y];
        let floor = level - opts.stall_tol * (1.0 + scale);
        let mut at_edge = dist_y <= 2.0 * dom.h * (1.0 + 1e-9);
        let mut best = None;
        if at_edge {
            // Snap to the best boundary node nearby; if none continues the
            // slope (the chain is heading away from this part of ∂Ω), take a
            // regular step instead.
            let reach = 3.0 * dom.h * big_m.max(f64::MIN_POSITIVE);
            best = best_candidate(dom, &weights, u, y, (0.0, reach), 0.0, true, sign, dijkstra_dir, tie, &mut ws)
                .filter(|&(_, obj, _)| obj >= floor);
            at_edge = best.is_some();
        }
        if best.is_none() {
            let r = (alpha * alpha / (2.0 * big_m) * dist_y).max(2.0 * dom.h * big_m);
            let shell = (r - dom.h * big_m, r + dom.h * big_m);
            best = best_candidate(dom, &weights, u, y, shell, r, false, sign, dijkstra_dir, tie, &mut ws);
        }
        let Some((z, obj, cost)) = best else {
            return Err(Error::ChainStall {
                node: y,
                steps: steps.len(),
                best: f64::NEG_INFINITY,
                level,
            });
        };
        if obj < floor {
            return Err(Error::ChainStall {
                node: y,
                steps: steps.len(),
                best: obj,
                level,
            });
        }
        steps.push(ChainStep {
            from: y,
            to: z,
            rise: sign * (u.values[z] - u.values[y]),
            cost,
        });
        nodes.push(z);
        y = z;
        if at_edge || steps.len() >= opts.max_steps {
            break;
        }
    }
    if !dom.is_boundary[y] {
        return Err(Error::ChainStall {
            node: y,
            steps: steps.len(),
            best: f64::NAN,
            level: sign * u.values[y],
        });
    }
    Ok(Chain {
        direction,
        lambda: mu,
        nodes,
        steps,
    })
}

/// Best node in the shell `lo ≤ d ≤ hi` (or the best boundary node within `hi`
/// when snapping). Ties: larger objective, then `|d − target|`, then index.
#[allow(clippy::too_many_arguments)]
fn best_candidate(
    dom: &GridDomain,
    weights: &EdgeWeights,
    u: &ScalarField,
    y: usize,
    (lo, hi): (f64, f64),
    target: f64,
    snap: bool,
    sign: f64,
    direction: Direction,
    tie: f64,
    ws: &mut Workspace,
) -> Option<(usize, f64, f64)> {
    let opts = DijkstraOptions {
        cutoff: Some(hi),
        ..Default::default()
    };
    let settled = dijkstra_with(dom, |e| weights.get(e), &[(y, 0.0)], direction, &opts, ws);
    let mut best: Option<(usize, f64, f64)> = None;
    for z in settled {
        if z == y {
            continue;
        }
        let d = ws.dist[z];
        let eligible = if snap { dom.is_boundary[z] } else { d >= lo };
        if !eligible {
            continue;
        }
        let obj = sign * u.values[z] - d;
        let better = match best {
            None => true,
            Some((bz, bobj, bd)) => {
                if obj > bobj + tie {
                    true
                } else if obj < bobj - tie {
                    false
                } else {
                    let (da, db) = ((d - target).abs(), (bd - target).abs());
                    da < db || (da == db && z < bz)
                }
            }
        };
        if better {
            best = Some((z, obj, d));
        }
    }
    best
}

/// Fraction of `a` contained in `b` (both ascending); 1 for empty `a`.
pub fn inclusion_fraction(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let hits = a.iter().filter(|n| b.binary_search(n).is_ok()).count();
    hits as f64 / a.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionVerdict {
    pub name: String,
    pub sup_value: f64,
    pub set_size: usize,
    /// `|𝒜_τ(u) ∩ 𝒜_τ′(v)| / |𝒜_τ(u)|`.
    pub fraction: f64,
    /// `|𝒜_τ(v) ∩ 𝒜_τ′(u)| / |𝒜_τ(v)|`.
    pub reverse_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCheck {
    pub seed: usize,
    pub up: Chain,
    pub down: Chain,
    /// Largest `|rise − cost|` over both chains.
    pub max_slope_defect: f64,
    /// Fraction of the interior chain vertices inside `𝒜_τ′(u)`.
    pub in_attainment: f64,
    /// `cost(down) + cost(up)`.
    pub chain_cost: f64,
    /// `d_μ(x₋, x₊)`.
    pub endpoint_distance: f64,
    /// `u(x₊) − u(x₋)`.
    pub endpoint_rise: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttainmentReport {
    pub sup_value: f64,
    pub tau: f64,
    pub tau_fat: f64,
    pub set: Vec<usize>,
    pub chains: Vec<ChainCheck>,
    pub inclusion_verdicts: Vec<InclusionVerdict>,
}

/// Up- and down-chains through `seed` with the checks used in reports.
pub fn chain_check(
    metric: &Metric,
    u: &ScalarField,
    fat_set: &[usize],
    seed: usize,
    mu: f64,
    opts: &ChainOptions,
) -> Result<ChainCheck> {
    let up = ascent_chain(metric, u, seed, mu, ChainDirection::Up, opts)?;
    let down = ascent_chain(metric, u, seed, mu, ChainDirection::Down, opts)?;
    let dom = metric.dom;
    let interior: Vec<usize> = up
        .nodes
        .iter()
        .chain(&down.nodes)
        .copied()
        .filter(|&n| dom.is_interior(n))
        .collect();
    let in_attainment = {
        let mut sorted = interior.clone();
        sorted.sort_unstable();
        sorted.dedup();
        inclusion_fraction(&sorted, fat_set)
    };
    let (x_minus, x_plus) = (down.end(), up.end());
    Ok(ChainCheck {
        seed,
        max_slope_defect: up.max_slope_defect().max(down.max_slope_defect()),
        in_attainment,
        chain_cost: up.total_cost() + down.total_cost(),
        endpoint_distance: metric.pairwise_distance(mu, x_minus, x_plus)?,
        endpoint_rise: u.values[x_plus] - u.values[x_minus],
        up,
        down,
    })
}

/// Node of `set` farthest from the boundary (smallest index on ties).
pub fn deepest(dom: &GridDomain, set: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &n in set {
        let d = dom.dist_to_boundary(n);
        if best.map_or(true, |(_, bd)| d > bd) {
            best = Some((n, d));
        }
    }
    best.map(|b| b.0)
}

/// Compares `𝒜_τ(u_abs)` with the fattened attainment sets of other minimizers
/// and checks chains through the given seeds (the deepest node of `𝒜_τ(u_abs)`
/// when `seeds` is empty).
#[allow(clippy::too_many_arguments)]
pub fn verify_inclusion(
    metric: &Metric,
    u_abs: &ScalarField,
    pw_abs: &PointwiseField,
    others: &[(String, PointwiseField)],
    tau: f64,
    tau_fat: f64,
    mu: f64,
    seeds: &[usize],
    chain_opts: &ChainOptions,
) -> Result<AttainmentReport> {
    let (sup_value, _) = pw_abs.sup();
    let set = attainment_set(pw_abs, tau);
    if set.is_empty() {
        return Err(Error::EmptyAttainment);
    }
    let fat = attainment_set(pw_abs, tau_fat);
    let inclusion_verdicts = others
        .iter()
        .map(|(name, pw)| {
            let (sup_v, _) = pw.sup();
            let own = attainment_set(pw, tau);
            let own_fat = attainment_set(pw, tau_fat);
            InclusionVerdict {
                name: name.clone(),
                sup_value: sup_v,
                set_size: own.len(),
                fraction: inclusion_fraction(&set, &own_fat),
                reverse_fraction: inclusion_fraction(&own, &fat),
            }
        })
        .collect();
    let seeds: Vec<usize> = if seeds.is_empty() {
        deepest(metric.dom, &set).into_iter().collect()
    } else {
        seeds.to_vec()
    };
    let chains = if mu > 0.0 {
        seeds
            .iter()
            .map(|&s| chain_check(metric, u_abs, &fat, s, mu, chain_opts))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(AttainmentReport {
        sup_value,
        tau,
        tau_fat,
        set,
        chains,
        inclusion_verdicts,
    })
}
