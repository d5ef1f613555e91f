//! Hamiltonian families `H(x, p)`, the radial extent of their sublevel sets and
//! the quasi-convex conjugate
//!
//! ```text
//! L_λ(x, q) = sup { p·q : H(x, p) ≤ λ }
//! ```
//!
//! which is the support function of the convex sublevel `{H(x,·) ≤ λ}`. Every
//! built-in kind has star-shaped (in fact convex) sublevels around the origin, so
//! a sublevel is fully described by its radial extent `ρ(x, e, λ)` along unit
//! directions `e`, and the conjugate is evaluated as a maximum of `ρ(e)·(e·q)`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::domain::Shape;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Default number of sampled directions in [`HamiltonianSpec::conjugate_l`].
pub const DEFAULT_N_DIRS: usize = 64;

/// Slack added to `λ` in sublevel membership tests.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Relative tolerance of the membership bisection in
/// [`HamiltonianSpec::radial_extent_by_search`].
pub const RHO_REL_TOL: f64 = 1e-10;

/// Status of the uniform-in-`x` inclusion `{H ≤ μ} + B(0, α) ⊂ {H ≤ λ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inclusion {
    Global,
    /// Holds only on compactly contained subsets.
    LocalOnly,
    Fails,
}

/// Which of the standing structural assumptions a Hamiltonian satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssumptionFlags {
    /// `H ≥ 0`, `H(·, 0) = 0`, quasi-convex in `p`.
    pub a: bool,
    /// Uniform coercivity.
    pub b: bool,
    /// Continuity.
    pub c: bool,
    /// Uniform strict growth of sublevels.
    pub d: Inclusion,
    /// Sublevels of `{H < λ}` vary continuously in `λ`; no flat level sets.
    pub e: bool,
}

impl AssumptionFlags {
    pub const ALL: AssumptionFlags = AssumptionFlags {
        a: true,
        b: true,
        c: true,
        d: Inclusion::Global,
        e: true,
    };
}

/// Spatial weight `w(x) > 0` for [`HamiltonianKind::WeightedIsotropic`].
#[derive(Debug, Clone, PartialEq)]
pub enum WeightField {
    /// `w(x, y) = c0 + cx·x + cy·y`.
    Affine { c0: f64, cx: f64, cy: f64 },
    /// `w(x) = dist(x, ∂Ω)` for the given analytic shape.
    BoundaryDistance(Shape),
}

impl WeightField {
    pub fn eval(&self, x: Vec2) -> f64 {
        match self {
            WeightField::Affine { c0, cx, cy } => c0 + cx * x.x + cy * x.y,
            WeightField::BoundaryDistance(shape) => shape.boundary_distance(x),
        }
    }

    /// Gradient magnitude bound, used to decide on quadrature refinement.
    fn vanishes_on_boundary(&self) -> bool {
        matches!(self, WeightField::BoundaryDistance(_))
    }
}

/// Per-node radial profiles `ρ(node, direction, λ)` on a regular grid.
///
/// Directions are uniform, `θ_k = 2πk / n_dirs`; `ρ` is interpolated linearly in
/// angle and in `λ`, and the profile at `λ = 0` is taken to be 0 unless the first
/// tabulated level is already 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub lambdas: Vec<f64>,
    pub n_dirs: usize,
    /// Indexed `[(node * n_dirs + dir) * lambdas.len() + k]`.
    pub rho: Vec<f64>,
}

impl RadialTable {
    /// Builds a table from `(node, dir, λ index, ρ)` records. Nodes without any
    /// record copy the profile of the nearest node that has one.
    pub fn from_records(
        origin: Vec2,
        h: f64,
        nx: usize,
        ny: usize,
        lambdas: Vec<f64>,
        n_dirs: usize,
        records: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let bad = |m: String| Error::Hamiltonian(format!("radial table: {m}"));
        if lambdas.is_empty() || n_dirs < 3 {
            return Err(bad("needs at least one λ level and three directions".into()));
        }
        if lambdas[0] < 0.0 || lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("λ levels must be non-negative and strictly increasing".into()));
        }
        let n_nodes = nx * ny;
        let nl = lambdas.len();
        let mut rho = vec![f64::NAN; n_nodes * n_dirs * nl];
        let mut have = vec![false; n_nodes];
        for &(node, dir, k, value) in records {
            if node >= n_nodes || dir >= n_dirs || k >= nl {
                return Err(bad(format!("record ({node}, {dir}, {k}) out of range")));
            }
            if !(value.is_finite() && value >= 0.0) {
                return Err(bad(format!("ρ at ({node}, {dir}, {k}) must be finite and ≥ 0")));
            }
            rho[(node * n_dirs + dir) * nl + k] = value;
            have[node] = true;
        }
        for node in (0..n_nodes).filter(|&n| have[n]) {
            let block = &rho[node * n_dirs * nl..(node + 1) * n_dirs * nl];
            if block.iter().any(|v| v.is_nan()) {
                return Err(bad(format!("node {node} has an incomplete profile")));
            }
            for dir in 0..n_dirs {
                let prof = &block[dir * nl..(dir + 1) * nl];
                if prof.windows(2).any(|w| w[1] < w[0]) {
                    return Err(bad(format!("ρ must be non-decreasing in λ (node {node}, dir {dir})")));
                }
            }
        }
        if !have.iter().any(|&b| b) {
            return Err(bad("no records".into()));
        }
        // Fill gaps by breadth-first copying from filled 4-neighbours.
        let mut queue: std::collections::VecDeque<usize> = (0..n_nodes).filter(|&n| have[n]).collect();
        while let Some(n) = queue.pop_front() {
            let (i, j) = (n % nx, n / nx);
            let mut nbrs = Vec::with_capacity(4);
            if i > 0 {
                nbrs.push(n - 1);
            }
            if i + 1 < nx {
                nbrs.push(n + 1);
            }
            if j > 0 {
                nbrs.push(n - nx);
            }
            if j + 1 < ny {
                nbrs.push(n + nx);
            }
            for m in nbrs {
                if !have[m] {
                    have[m] = true;
                    let (src, dst) = (n * n_dirs * nl, m * n_dirs * nl);
                    for t in 0..n_dirs * nl {
                        rho[dst + t] = rho[src + t];
                    }
                    queue.push_back(m);
                }
            }
        }
        Ok(Self {
            origin,
            h,
            nx,
            ny,
            lambdas,
            n_dirs,
            rho,
        })
    }

    fn node_of(&self, x: Vec2) -> usize {
        let fi = ((x.x - self.origin.x) / self.h).round();
        let fj = ((x.y - self.origin.y) / self.h).round();
        let i = fi.clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = fj.clamp(0.0, (self.ny - 1) as f64) as usize;
        j * self.nx + i
    }

    fn profile(&self, node: usize, dir: usize) -> &[f64] {
        let nl = self.lambdas.len();
        let start = (node * self.n_dirs + dir) * nl;
        &self.rho[start..start + nl]
    }

    /// Piecewise-linear `ρ(λ)` through `(0, 0)` and the tabulated levels,
    /// extended proportionally beyond the last level.
    fn interp_lambda(&self, prof: &[f64], lambda: f64) -> f64 {
        let ls = &self.lambdas;
        let last = ls.len() - 1;
        if lambda >= ls[last] {
            return if ls[last] > 0.0 {
                prof[last] * lambda / ls[last]
            } else {
                prof[last]
            };
        }
        let k = ls.partition_point(|&l| l <= lambda);
        let (l0, r0) = if k == 0 { (0.0, 0.0) } else { (ls[k - 1], prof[k - 1]) };
        let (l1, r1) = (ls[k], prof[k]);
        if l1 <= l0 {
            return r1;
        }
        r0 + (r1 - r0) * (lambda - l0) / (l1 - l0)
    }

    fn dir_weights(&self, e: Vec2) -> (usize, usize, f64) {
        let theta = e.y.atan2(e.x).rem_euclid(TAU);
        let pos = theta / TAU * self.n_dirs as f64;
        let k0 = (pos.floor() as usize) % self.n_dirs;
        let t = pos - pos.floor();
        (k0, (k0 + 1) % self.n_dirs, t)
    }

    fn radial(&self, x: Vec2, e: Vec2, lambda: f64) -> f64 {
        let node = self.node_of(x);
        let (k0, k1, t) = self.dir_weights(e);
        let r0 = self.interp_lambda(self.profile(node, k0), lambda);
        let r1 = self.interp_lambda(self.profile(node, k1), lambda);
        r0 + (r1 - r0) * t
    }

    /// Smallest `λ` with `|p| ≤ ρ(x, p/|p|, λ)`.
    fn gauge(&self, x: Vec2, p: Vec2) -> f64 {
        let r = p.norm();
        if r == 0.0 {
            return 0.0;
        }
        let e = p * (1.0 / r);
        let node = self.node_of(x);
        let (k0, k1, t) = self.dir_weights(e);
        let (p0, p1) = (self.profile(node, k0), self.profile(node, k1));
        let blend = |k: usize| p0[k] + (p1[k] - p0[k]) * t;
        let ls = &self.lambdas;
        let mut prev = (0.0, 0.0);
        for (k, &l) in ls.iter().enumerate() {
            let rho = blend(k);
            if rho >= r {
                let (l0, r0) = prev;
                if rho <= r0 {
                    return l0;
                }
                return l0 + (l - l0) * (r - r0) / (rho - r0);
            }
            prev = (l, rho);
        }
        let (l_last, r_last) = prev;
        if r_last > 0.0 {
            l_last * r / r_last
        } else {
            f64::INFINITY
        }
    }

    /// `(min, max)` of `ρ` over all nodes and directions at `λ`.
    fn extent_bounds(&self, lambda: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for node in 0..self.nx * self.ny {
            for dir in 0..self.n_dirs {
                let r = self.interp_lambda(self.profile(node, dir), lambda);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        (lo, hi)
    }

    fn max_increment(&self, lambda: f64, delta: f64) -> f64 {
        let lower = (lambda - delta).max(0.0);
        let mut worst: f64 = 0.0;
        for node in 0..self.nx * self.ny {
            for dir in 0..self.n_dirs {
                let prof = self.profile(node, dir);
                worst = worst.max(self.interp_lambda(prof, lambda) - self.interp_lambda(prof, lower));
            }
        }
        worst
    }
}

/// The family a Hamiltonian belongs to, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    /// `H = |p|^s / s` (for `s = 1`, `H = |p|`).
    IsotropicPower { exponent: f64 },
    /// `H = |p| / w(x)`.
    WeightedIsotropic {
        weight: WeightField,
        w_min: f64,
        w_max: f64,
    },
    /// `H = sqrt(p·A p)` for a symmetric positive-definite `A`.
    AnisotropicNorm { matrix: [[f64; 2]; 2] },
    /// Radial with a flat shelf:
    /// `|p|` below `level`, `level` on `[level, shelf_end]`,
    /// `|p| − (shelf_end − level)` above.
    PlateauRadial { level: f64, shelf_end: f64 },
    TabulatedRadial(RadialTable),
}

/// `ρ(x, e, λ) = φ(λ)·ρ̂(x, e)`: the sublevels are rescalings of one another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleProfile {
    /// `φ(λ) = λ`.
    Linear,
    /// `φ(λ) = (sλ)^{1/s}`.
    Power(f64),
}

impl ScaleProfile {
    pub fn scale(self, lambda: f64) -> f64 {
        match self {
            ScaleProfile::Linear => lambda,
            ScaleProfile::Power(s) if s == 1.0 => lambda,
            ScaleProfile::Power(s) => (s * lambda).powf(1.0 / s),
        }
    }

    /// Inverse of [`scale`](Self::scale).
    pub fn level(self, scale: f64) -> f64 {
        match self {
            ScaleProfile::Linear => scale,
            ScaleProfile::Power(s) if s == 1.0 => scale,
            ScaleProfile::Power(s) => scale.powf(s) / s,
        }
    }
}

/// A Hamiltonian together with its structural metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub flags: AssumptionFlags,
    /// Directions sampled by the conjugate for non-radial kinds.
    pub n_dirs: usize,
}

impl HamiltonianSpec {
    pub fn isotropic_power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Hamiltonian(format!("exponent must be > 0, got {exponent}")));
        }
        Ok(Self::with_kind(HamiltonianKind::IsotropicPower { exponent }, AssumptionFlags::ALL))
    }

    /// `H(p) = |p|`.
    pub fn eikonal() -> Self {
        Self::with_kind(HamiltonianKind::IsotropicPower { exponent: 1.0 }, AssumptionFlags::ALL)
    }

    /// `H = |p| / w(x)`; the weight must be positive on the box `[lo, hi]`
    /// (affine weights) or is the distance to the boundary of `shape`.
    pub fn weighted(weight: WeightField, lo: Vec2, hi: Vec2) -> Result<Self> {
        let (w_min, w_max, d) = match &weight {
            WeightField::Affine { .. } => {
                let corners = [lo, Vec2::new(hi.x, lo.y), Vec2::new(lo.x, hi.y), hi];
                let vals = corners.map(|c| weight.eval(c));
                let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !(min > 0.0) {
                    return Err(Error::Domain(format!("weight must be positive on the domain, min is {min}")));
                }
                (min, max, Inclusion::Global)
            }
            WeightField::BoundaryDistance(shape) => (0.0, shape.inradius(), Inclusion::LocalOnly),
        };
        let flags = AssumptionFlags { d, ..AssumptionFlags::ALL };
        Ok(Self::with_kind(HamiltonianKind::WeightedIsotropic { weight, w_min, w_max }, flags))
    }

    pub fn anisotropic(matrix: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        if (b - c).abs() > 1e-12 * (1.0 + b.abs().max(c.abs())) {
            return Err(Error::Hamiltonian("anisotropic matrix must be symmetric".into()));
        }
        if !(a > 0.0 && a * d - b * c > 0.0) {
            return Err(Error::Hamiltonian("anisotropic matrix must be positive definite".into()));
        }
        Ok(Self::with_kind(HamiltonianKind::AnisotropicNorm { matrix }, AssumptionFlags::ALL))
    }

    pub fn plateau(level: f64, shelf_end: f64) -> Result<Self> {
        if !(level > 0.0 && shelf_end > level) {
            return Err(Error::Hamiltonian(format!(
                "plateau needs 0 < level < shelf_end, got {level}, {shelf_end}"
            )));
        }
        let flags = AssumptionFlags { e: false, ..AssumptionFlags::ALL };
        Ok(Self::with_kind(HamiltonianKind::PlateauRadial { level, shelf_end }, flags))
    }

    pub fn tabulated(table: RadialTable) -> Self {
        Self::with_kind(HamiltonianKind::TabulatedRadial(table), AssumptionFlags::ALL)
    }

    fn with_kind(kind: HamiltonianKind, flags: AssumptionFlags) -> Self {
        Self {
            kind,
            flags,
            n_dirs: DEFAULT_N_DIRS,
        }
    }

    pub fn with_n_dirs(mut self, n_dirs: usize) -> Self {
        self.n_dirs = n_dirs.max(8);
        self
    }

    /// `H(x, p)`.
    pub fn eval_h(&self, x: Vec2, p: Vec2) -> Result<f64> {
        let r = p.norm();
        Ok(match &self.kind {
            HamiltonianKind::IsotropicPower { exponent } => {
                if *exponent == 1.0 {
                    r
                } else {
                    r.powf(*exponent) / exponent
                }
            }
            HamiltonianKind::WeightedIsotropic { weight, .. } => {
                let w = weight.eval(x);
                if !(w > 0.0) {
                    return Err(Error::Domain(format!(
                        "weight is {w} at ({}, {}); it must be positive",
                        x.x, x.y
                    )));
                }
                r / w
            }
            HamiltonianKind::AnisotropicNorm { matrix } => quad_form(matrix, p).max(0.0).sqrt(),
            HamiltonianKind::PlateauRadial { level, shelf_end } => {
                if r < *level {
                    r
                } else if r <= *shelf_end {
                    *level
                } else {
                    r - (shelf_end - level)
                }
            }
            HamiltonianKind::TabulatedRadial(table) => table.gauge(x, p),
        })
    }

    /// `sup { t ≥ 0 : H(x, t·e) ≤ λ }` from the closed form of each kind.
    pub fn radial_extent(&self, x: Vec2, e: Vec2, lambda: f64) -> f64 {
        let lambda = lambda.max(0.0);
        match &self.kind {
            HamiltonianKind::IsotropicPower { exponent } => ScaleProfile::Power(*exponent).scale(lambda),
            HamiltonianKind::WeightedIsotropic { weight, .. } => lambda * weight.eval(x).max(0.0),
            HamiltonianKind::AnisotropicNorm { matrix } => lambda / quad_form(matrix, e).sqrt(),
            HamiltonianKind::PlateauRadial { level, shelf_end } => {
                if lambda + MEMBERSHIP_SLACK < *level {
                    lambda
                } else {
                    shelf_end + (lambda - level).max(0.0)
                }
            }
            HamiltonianKind::TabulatedRadial(table) => table.radial(x, e, lambda),
        }
    }

    /// Radial extent found by exponential search up to `M(λ)` followed by
    /// bisection on the membership test `H(x, t·e) ≤ λ + 1e-12`. Uses nothing
    /// but [`eval_h`](Self::eval_h).
    pub fn radial_extent_by_search(&self, x: Vec2, e: Vec2, lambda: f64) -> Result<f64> {
        let lambda = lambda.max(0.0);
        let cap = self.outer_radius(lambda);
        let inside = |t: f64| -> Result<bool> { Ok(self.eval_h(x, e * t)? <= lambda + MEMBERSHIP_SLACK) };
        if cap <= 0.0 {
            return Ok(0.0);
        }
        let tol = RHO_REL_TOL * cap;
        // Exponential search for the first point outside the sublevel.
        let mut lo = 0.0;
        let mut hi = (self.inner_radius(lambda)).max(tol).min(cap);
        loop {
            if !inside(hi)? {
                break;
            }
            lo = hi;
            if hi >= cap {
                // Coercivity bound reached; extend slightly in case of roundoff.
                let over = cap * (1.0 + 1e-9) + tol;
                if inside(over)? {
                    return Ok(over);
                }
                hi = over;
                break;
            }
            hi = (hi * 2.0).min(cap);
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if inside(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// True when every sublevel is a disc centred at the origin.
    pub fn is_radially_symmetric(&self) -> bool {
        matches!(
            self.kind,
            HamiltonianKind::IsotropicPower { .. }
                | HamiltonianKind::WeightedIsotropic { .. }
                | HamiltonianKind::PlateauRadial { .. }
        )
    }

    /// `L_λ(x, q)` as the maximum of `ρ(x, e, λ)·(e·q)` over `n_dirs` uniform
    /// directions and `q/|q|`, clamped below at 0.
    pub fn conjugate_l(&self, x: Vec2, q: Vec2, lambda: f64, n_dirs: usize) -> f64 {
        let Some(qhat) = q.normalized() else {
            return 0.0;
        };
        let qn = q.norm();
        if self.is_radially_symmetric() {
            // The disc's support is attained along q itself.
            return self.radial_extent(x, qhat, lambda) * qn;
        }
        let mut best = self.radial_extent(x, qhat, lambda) * qn;
        let n = n_dirs.max(8);
        for k in 0..n {
            let e = Vec2::from_angle(TAU * k as f64 / n as f64);
            let v = self.radial_extent(x, e, lambda) * e.dot(q);
            if v > best {
                best = v;
            }
        }
        best.max(0.0)
    }

    /// [`conjugate_l`](Self::conjugate_l) using the configured `n_dirs`.
    pub fn conjugate(&self, x: Vec2, q: Vec2, lambda: f64) -> f64 {
        self.conjugate_l(x, q, lambda, self.n_dirs)
    }

    /// `α(λ)`: a radius with `B(0, α) ⊂ {H(x,·) ≤ λ}` for every `x`.
    pub fn inner_radius(&self, lambda: f64) -> f64 {
        let lambda = lambda.max(0.0);
        match &self.kind {
            HamiltonianKind::WeightedIsotropic { w_min, .. } => lambda * w_min,
            HamiltonianKind::AnisotropicNorm { matrix } => lambda / eigen_max(matrix).sqrt(),
            HamiltonianKind::TabulatedRadial(t) => t.extent_bounds(lambda).0,
            _ => self.radial_extent(Vec2::ZERO, Vec2::new(1.0, 0.0), lambda),
        }
    }

    /// `M(λ)`: a radius with `{H(x,·) ≤ λ} ⊂ B(0, M)` for every `x`.
    pub fn outer_radius(&self, lambda: f64) -> f64 {
        let lambda = lambda.max(0.0);
        match &self.kind {
            HamiltonianKind::WeightedIsotropic { w_max, .. } => lambda * w_max,
            HamiltonianKind::AnisotropicNorm { matrix } => lambda / eigen_min(matrix).sqrt(),
            HamiltonianKind::TabulatedRadial(t) => t.extent_bounds(lambda).1,
            _ => self.radial_extent(Vec2::ZERO, Vec2::new(1.0, 0.0), lambda),
        }
    }

    /// `(α, M)` valid on the closed ball `B(center, radius)`. Differs from the
    /// global pair only for weights that degenerate at the boundary.
    pub fn local_radii(&self, center: Vec2, radius: f64, lambda: f64) -> (f64, f64) {
        match &self.kind {
            HamiltonianKind::WeightedIsotropic {
                weight: weight @ WeightField::BoundaryDistance(_),
                w_max,
                ..
            } => {
                let w = weight.eval(center);
                // dist(·, ∂Ω) is 1-Lipschitz.
                ((w - radius).max(0.0) * lambda, (w + radius).min(*w_max) * lambda)
            }
            _ => (self.inner_radius(lambda), self.outer_radius(lambda)),
        }
    }

    /// `ρ(λ) = φ(λ)·ρ̂` when it factorises.
    pub fn scale_profile(&self) -> Option<ScaleProfile> {
        match &self.kind {
            HamiltonianKind::IsotropicPower { exponent } => Some(ScaleProfile::Power(*exponent)),
            HamiltonianKind::WeightedIsotropic { .. } | HamiltonianKind::AnisotropicNorm { .. } => {
                Some(ScaleProfile::Linear)
            }
            _ => None,
        }
    }

    /// Bound `β` with `L_λ ≤ L_{λ−δ} + β|q|`, i.e. the largest growth of the
    /// radial extent between `λ − δ` and `λ`. `None` when assumption (E) fails.
    pub fn continuity_modulus(&self, lambda: f64, delta: f64) -> Option<f64> {
        if !self.flags.e {
            return None;
        }
        let lower = (lambda - delta).max(0.0);
        Some(match &self.kind {
            HamiltonianKind::TabulatedRadial(t) => t.max_increment(lambda, delta),
            _ => self.outer_radius(lambda) - self.outer_radius(lower),
        })
    }

    /// True when the integrand varies steeply near the boundary and edge
    /// quadrature should be refined there.
    pub fn needs_boundary_refinement(&self) -> bool {
        matches!(&self.kind, HamiltonianKind::WeightedIsotropic { weight, .. } if weight.vanishes_on_boundary())
    }

    /// True when `H` does not depend on `x`.
    pub fn is_homogeneous_in_space(&self) -> bool {
        matches!(
            self.kind,
            HamiltonianKind::IsotropicPower { .. }
                | HamiltonianKind::AnisotropicNorm { .. }
                | HamiltonianKind::PlateauRadial { .. }
        )
    }

    /// Even in `p`, so that `d_λ` is symmetric.
    pub fn is_even(&self) -> bool {
        !matches!(self.kind, HamiltonianKind::TabulatedRadial(_))
    }
}

fn quad_form(m: &[[f64; 2]; 2], p: Vec2) -> f64 {
    m[0][0] * p.x * p.x + (m[0][1] + m[1][0]) * p.x * p.y + m[1][1] * p.y * p.y
}

fn eigen_pair(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean - r, mean + r)
}

fn eigen_min(m: &[[f64; 2]; 2]) -> f64 {
    eigen_pair(m).0
}

fn eigen_max(m: &[[f64; 2]; 2]) -> f64 {
    eigen_pair(m).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn shelf_plateau() -> HamiltonianSpec {
        HamiltonianSpec::plateau(0.5, 0.75).unwrap()
    }

    #[test]
    fn eval_examples() {
        let x = Vec2::ZERO;
        assert_eq!(HamiltonianSpec::eikonal().eval_h(x, Vec2::new(3.0, 4.0)).unwrap(), 5.0);
        assert_eq!(shelf_plateau().eval_h(x, Vec2::new(0.6, 0.0)).unwrap(), 0.5);
        let quad = HamiltonianSpec::isotropic_power(2.0).unwrap();
        assert_eq!(quad.eval_h(x, Vec2::new(2.0, 0.0)).unwrap(), 2.0);
    }

    #[test]
    fn zero_at_origin_for_every_kind() {
        let kinds = [
            HamiltonianSpec::eikonal(),
            HamiltonianSpec::isotropic_power(3.0).unwrap(),
            HamiltonianSpec::anisotropic([[4.0, 0.0], [0.0, 1.0]]).unwrap(),
            shelf_plateau(),
            HamiltonianSpec::weighted(
                WeightField::Affine { c0: 1.0, cx: 0.5, cy: 0.0 },
                Vec2::ZERO,
                Vec2::new(1.0, 1.0),
            )
            .unwrap(),
        ];
        for spec in &kinds {
            assert_eq!(spec.eval_h(Vec2::new(0.3, 0.4), Vec2::ZERO).unwrap(), 0.0);
        }
    }

    #[test]
    fn non_positive_weight_is_a_domain_error() {
        let spec = HamiltonianSpec::weighted(
            WeightField::BoundaryDistance(Shape::unit_box()),
            Vec2::ZERO,
            Vec2::new(1.0, 1.0),
        )
        .unwrap();
        let err = spec.eval_h(Vec2::new(0.0, 0.5), Vec2::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert_eq!(spec.flags.d, Inclusion::LocalOnly);
    }

    #[test]
    fn radial_extent_examples() {
        let e = Vec2::from_angle(0.7);
        let x = Vec2::ZERO;
        assert_abs_diff_eq!(HamiltonianSpec::eikonal().radial_extent(x, e, 1.0), 1.0);
        let quad = HamiltonianSpec::isotropic_power(2.0).unwrap();
        assert_abs_diff_eq!(quad.radial_extent(x, e, 2.0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(shelf_plateau().radial_extent(x, e, 0.5), 0.75);
    }

    #[test]
    fn quadratic_extent_matches_dense_scan() {
        // Independent oracle: scan H(t e) on a fine t-grid for the last t inside.
        let quad = HamiltonianSpec::isotropic_power(2.0).unwrap();
        let e = Vec2::from_angle(1.1);
        let step = 1e-5;
        let mut t: f64 = 0.0;
        while quad.eval_h(Vec2::ZERO, e * (t + step)).unwrap() <= 2.0 {
            t += step;
        }
        assert!((t - 2.0).abs() < 2.0 * step);
        assert_abs_diff_eq!(quad.radial_extent(Vec2::ZERO, e, 2.0), t, epsilon = 2.0 * step);
    }

    #[test]
    fn search_agrees_with_closed_forms() {
        let specs = [
            HamiltonianSpec::eikonal(),
            HamiltonianSpec::isotropic_power(2.0).unwrap(),
            HamiltonianSpec::isotropic_power(0.5).unwrap(),
            HamiltonianSpec::anisotropic([[4.0, 1.0], [1.0, 2.0]]).unwrap(),
            shelf_plateau(),
            HamiltonianSpec::weighted(
                WeightField::Affine { c0: 1.0, cx: 0.5, cy: -0.25 },
                Vec2::ZERO,
                Vec2::new(1.0, 1.0),
            )
            .unwrap(),
        ];
        let x = Vec2::new(0.3, 0.6);
        for spec in &specs {
            for &lambda in &[0.0, 0.2, 0.5, 0.75, 1.0, 3.0] {
                for k in 0..12 {
                    let e = Vec2::from_angle(0.37 + k as f64 * 0.5);
                    let closed = spec.radial_extent(x, e, lambda);
                    let searched = spec.radial_extent_by_search(x, e, lambda).unwrap();
                    let tol = 1e-8 * spec.outer_radius(lambda).max(1e-12);
                    assert!(
                        (closed - searched).abs() <= tol,
                        "{:?} λ={lambda}: closed {closed} vs search {searched}",
                        spec.kind
                    );
                }
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        let x = Vec2::ZERO;
        let l = HamiltonianSpec::eikonal().conjugate_l(x, Vec2::new(1.0, 0.0), 2.0, 64);
        assert_abs_diff_eq!(l, 2.0, epsilon = 1e-12);
        let l = shelf_plateau().conjugate_l(x, Vec2::from_angle(2.0), 0.5, 64);
        assert_abs_diff_eq!(l, 0.75, epsilon = 1e-12);
        let aniso = HamiltonianSpec::anisotropic([[4.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(aniso.conjugate_l(x, Vec2::new(1.0, 0.0), 1.0, 64), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn anisotropic_conjugate_matches_dense_boundary_maximization() {
        // Oracle: sample the boundary {p·Ap = λ²} densely and maximise p·q.
        let m = [[4.0, 1.0], [1.0, 2.0]];
        let aniso = HamiltonianSpec::anisotropic(m).unwrap();
        let lambda = 1.3;
        for k in 0..9 {
            let q = Vec2::from_angle(0.2 + 0.7 * k as f64) * 1.7;
            let mut best = f64::NEG_INFINITY;
            let n = 200_000;
            for t in 0..n {
                let e = Vec2::from_angle(TAU * t as f64 / n as f64);
                let p = e * (lambda / quad_form(&m, e).sqrt());
                best = best.max(p.dot(q));
            }
            let sampled = aniso.conjugate_l(Vec2::ZERO, q, lambda, 64);
            // Polygonal support underestimates by O(n_dirs^-2).
            assert!(sampled <= best + 1e-9);
            assert!((best - sampled) / best < 5e-3, "{sampled} vs {best}");
        }
    }

    #[test]
    fn plateau_extent_jumps_at_the_shelf() {
        let p = shelf_plateau();
        let e = Vec2::new(0.0, 1.0);
        assert_abs_diff_eq!(p.radial_extent(Vec2::ZERO, e, 0.5 - 1e-6), 0.5 - 1e-6);
        assert_abs_diff_eq!(p.radial_extent(Vec2::ZERO, e, 0.5), 0.75);
        assert_abs_diff_eq!(p.radial_extent(Vec2::ZERO, e, 0.6), 0.85, epsilon = 1e-15);
        assert!(!p.flags.e);
        assert!(p.continuity_modulus(0.5, 0.01).is_none());
    }

    #[test]
    fn tabulated_reproduces_a_sampled_isotropic_kind() {
        let lambdas = vec![0.5, 1.0, 2.0];
        let n_dirs = 16;
        let mut records = Vec::new();
        for node in 0..4 {
            for d in 0..n_dirs {
                for (k, &l) in lambdas.iter().enumerate() {
                    records.push((node, d, k, l));
                }
            }
        }
        let t = RadialTable::from_records(Vec2::ZERO, 1.0, 2, 2, lambdas, n_dirs, &records).unwrap();
        let spec = HamiltonianSpec::tabulated(t);
        let x = Vec2::new(0.4, 0.7);
        let p = Vec2::new(0.6, -0.8);
        assert_abs_diff_eq!(spec.eval_h(x, p).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.radial_extent(x, Vec2::from_angle(1.0), 1.5), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.inner_radius(0.75), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.outer_radius(3.0), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn table_rejects_decreasing_profiles() {
        let records = vec![(0, 0, 0, 1.0), (0, 0, 1, 0.5), (0, 1, 0, 1.0), (0, 1, 1, 1.0), (0, 2, 0, 1.0), (0, 2, 1, 1.0)];
        let err = RadialTable::from_records(Vec2::ZERO, 1.0, 1, 1, vec![1.0, 2.0], 3, &records);
        assert!(err.is_err());
    }

    #[test]
    fn scale_profile_round_trips() {
        for s in [0.5, 1.0, 2.0, 3.0] {
            let p = ScaleProfile::Power(s);
            for l in [0.1, 1.0, 4.0] {
                assert_abs_diff_eq!(p.level(p.scale(l)), l, epsilon = 1e-12 * l.max(1.0));
            }
        }
    }

    #[test]
    fn anisotropic_bounds_are_eigen_radii() {
        let a = HamiltonianSpec::anisotropic([[4.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(a.inner_radius(1.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a.outer_radius(1.0), 1.0, epsilon = 1e-15);
        assert!(HamiltonianSpec::anisotropic([[1.0, 2.0], [2.0, 1.0]]).is_err());
    }
}
