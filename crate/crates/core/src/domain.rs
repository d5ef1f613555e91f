//! Masked uniform grids over bounded planar domains, their stencil graphs and
//! per-node scalar fields.

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segments_intersect, Vec2};

/// Relative tolerance (in units of `h`) for closed-set membership.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// Node mask read from an image; node `(i, j)` sits at `(i·h, j·h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub inside: Vec<bool>,
    /// Centres of outside nodes that touch an inside node, including the
    /// virtual ring just beyond the image.
    frontier: Vec<Vec2>,
    inradius: f64,
}

impl Mask {
    pub fn new(h: f64, nx: usize, ny: usize, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != nx * ny {
            return Err(Error::Domain(format!(
                "mask has {} entries, expected {nx}×{ny}",
                inside.len()
            )));
        }
        let at = |i: isize, j: isize| -> bool {
            i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && inside[j as usize * nx + i as usize]
        };
        let mut frontier = Vec::new();
        for j in -1..=ny as isize {
            for i in -1..=nx as isize {
                if at(i, j) {
                    continue;
                }
                let touches = (-1..=1).any(|dj| (-1..=1).any(|di| at(i + di, j + dj)));
                if touches {
                    frontier.push(Vec2::new(i as f64 * h, j as f64 * h));
                }
            }
        }
        let mut mask = Self {
            h,
            nx,
            ny,
            inside,
            frontier,
            inradius: 0.0,
        };
        let mut r: f64 = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                if mask.inside[j * nx + i] {
                    r = r.max(mask.boundary_distance(Vec2::new(i as f64 * h, j as f64 * h)));
                }
            }
        }
        mask.inradius = r;
        Ok(mask)
    }

    fn contains(&self, p: Vec2) -> bool {
        let i = (p.x / self.h).round();
        let j = (p.y / self.h).round();
        i >= 0.0 && j >= 0.0 && (i as usize) < self.nx && (j as usize) < self.ny && self.inside[j as usize * self.nx + i as usize]
    }

    fn boundary_distance(&self, p: Vec2) -> f64 {
        let d = self
            .frontier
            .iter()
            .map(|&f| (f - p).norm())
            .fold(f64::INFINITY, f64::min);
        (d - 0.5 * self.h).max(0.0)
    }
}

/// Analytic description of the bounded open set.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned rectangle `[lo, hi]`.
    Box { lo: Vec2, hi: Vec2 },
    /// One-dimensional segment `[a, b]` on the x-axis.
    Interval { a: f64, b: f64 },
    Disc { center: Vec2, radius: f64 },
    Annulus { center: Vec2, r_in: f64, r_out: f64 },
    /// Origin-centred annulus with the radial cut `{0} × (−r_out, −r_in)` removed.
    SlitAnnulus { r_in: f64, r_out: f64 },
    MaskFile(Arc<Mask>),
}

impl Shape {
    pub fn unit_box() -> Self {
        Shape::Box {
            lo: Vec2::ZERO,
            hi: Vec2::new(1.0, 1.0),
        }
    }

    pub fn unit_interval() -> Self {
        Shape::Interval { a: 0.0, b: 1.0 }
    }

    /// `1 < |x| < 2` with the cut along the negative y-axis.
    pub fn slit_annulus() -> Self {
        Shape::SlitAnnulus { r_in: 1.0, r_out: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Shape::Box { lo, hi } => lo.is_finite() && hi.is_finite() && hi.x > lo.x && hi.y > lo.y,
            Shape::Interval { a, b } => a.is_finite() && b.is_finite() && b > a,
            Shape::Disc { center, radius } => center.is_finite() && *radius > 0.0,
            Shape::Annulus { center, r_in, r_out } => center.is_finite() && 0.0 < *r_in && r_in < r_out,
            Shape::SlitAnnulus { r_in, r_out } => 0.0 < *r_in && r_in < r_out,
            Shape::MaskFile(m) => m.h > 0.0 && m.nx > 0 && m.ny > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid shape parameters: {self:?}")))
        }
    }

    pub fn is_one_dimensional(&self) -> bool {
        matches!(self, Shape::Interval { .. })
    }

    /// Bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        match self {
            Shape::Box { lo, hi } => (*lo, *hi),
            Shape::Interval { a, b } => (Vec2::new(*a, 0.0), Vec2::new(*b, 0.0)),
            Shape::Disc { center, radius } => {
                let r = Vec2::new(*radius, *radius);
                (*center - r, *center + r)
            }
            Shape::Annulus { center, r_out, .. } => {
                let r = Vec2::new(*r_out, *r_out);
                (*center - r, *center + r)
            }
            Shape::SlitAnnulus { r_out, .. } => (Vec2::new(-r_out, -r_out), Vec2::new(*r_out, *r_out)),
            Shape::MaskFile(m) => (
                Vec2::ZERO,
                Vec2::new((m.nx - 1) as f64 * m.h, (m.ny - 1) as f64 * m.h),
            ),
        }
    }

    fn slit(&self) -> Option<(Vec2, Vec2)> {
        match self {
            Shape::SlitAnnulus { r_in, r_out } => Some((Vec2::new(0.0, -r_out), Vec2::new(0.0, -r_in))),
            _ => None,
        }
    }

    /// Membership in the closure of the set, except that points of an internal
    /// cut count as outside.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        match self {
            Shape::Box { lo, hi } => {
                p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol && p.y <= hi.y + tol
            }
            Shape::Interval { a, b } => p.y.abs() <= tol && p.x >= a - tol && p.x <= b + tol,
            Shape::Disc { center, radius } => (p - *center).norm() <= radius + tol,
            Shape::Annulus { center, r_in, r_out } => {
                let r = (p - *center).norm();
                r >= r_in - tol && r <= r_out + tol
            }
            Shape::SlitAnnulus { r_in, r_out } => {
                let r = p.norm();
                let on_cut = p.x.abs() <= tol && p.y <= -r_in + tol && p.y >= -r_out - tol;
                r >= r_in - tol && r <= r_out + tol && !on_cut
            }
            Shape::MaskFile(m) => m.contains(p),
        }
    }

    /// True when the segment `[a, b]` crosses an internal cut or leaves the set
    /// between sample points in a way the shape can detect exactly.
    pub fn blocks_segment(&self, a: Vec2, b: Vec2, tol: f64) -> bool {
        if let Some((s0, s1)) = self.slit() {
            if segments_intersect(a, b, s0, s1) {
                return true;
            }
        }
        match self {
            Shape::Annulus { center, r_in, .. } => point_segment_distance(*center, a, b) < r_in - tol,
            Shape::SlitAnnulus { r_in, .. } => point_segment_distance(Vec2::ZERO, a, b) < r_in - tol,
            _ => false,
        }
    }

    /// `dist(p, ∂Ω)` for points of the closure; 0 outside.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let d = match self {
            Shape::Box { lo, hi } => (p.x - lo.x).min(hi.x - p.x).min(p.y - lo.y).min(hi.y - p.y),
            Shape::Interval { a, b } => (p.x - a).min(b - p.x),
            Shape::Disc { center, radius } => radius - (p - *center).norm(),
            Shape::Annulus { center, r_in, r_out } => {
                let r = (p - *center).norm();
                (r - r_in).min(r_out - r)
            }
            Shape::SlitAnnulus { r_in, r_out } => {
                let r = p.norm();
                let (s0, s1) = (Vec2::new(0.0, -r_out), Vec2::new(0.0, -r_in));
                (r - r_in).min(r_out - r).min(point_segment_distance(p, s0, s1))
            }
            Shape::MaskFile(m) => m.boundary_distance(p),
        };
        d.max(0.0)
    }

    /// `max_x dist(x, ∂Ω)`.
    pub fn inradius(&self) -> f64 {
        match self {
            Shape::Box { lo, hi } => 0.5 * (hi.x - lo.x).min(hi.y - lo.y),
            Shape::Interval { a, b } => 0.5 * (b - a),
            Shape::Disc { radius, .. } => *radius,
            Shape::Annulus { r_in, r_out, .. } | Shape::SlitAnnulus { r_in, r_out } => 0.5 * (r_out - r_in),
            Shape::MaskFile(m) => m.inradius,
        }
    }
}

/// Integer neighbour offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    pub offsets: Vec<(i32, i32)>,
}

impl Stencil {
    pub const ALLOWED: [usize; 3] = [8, 16, 32];

    /// King moves (8), plus knight moves (16), plus the `(3,1)` and `(3,2)`
    /// families (32).
    pub fn new(k: usize) -> Result<Self> {
        let mut gens: Vec<(i32, i32)> = match k {
            8 => vec![(1, 0), (1, 1)],
            16 => vec![(1, 0), (1, 1), (2, 1)],
            32 => vec![(1, 0), (1, 1), (2, 1), (3, 1), (3, 2)],
            _ => {
                return Err(Error::Domain(format!(
                    "stencil_k must be one of {{8, 16, 32}}, got {k}"
                )))
            }
        };
        let mut offsets = Vec::with_capacity(k);
        for (a, b) in gens.drain(..) {
            let mut orbit = vec![(a, b), (b, a), (-a, b), (-b, a), (a, -b), (b, -a), (-a, -b), (-b, -a)];
            orbit.sort_unstable();
            orbit.dedup();
            offsets.extend(orbit);
        }
        offsets.sort_by(|p, q| {
            let (ap, aq) = ((p.1 as f64).atan2(p.0 as f64), (q.1 as f64).atan2(q.0 as f64));
            ap.total_cmp(&aq)
        });
        debug_assert_eq!(offsets.len(), k);
        Ok(Self { offsets })
    }

    pub fn line() -> Self {
        Self {
            offsets: vec![(-1, 0), (1, 0)],
        }
    }

    /// `max_{(i,j)} max(|i|, |j|)`.
    pub fn reach(&self) -> usize {
        self.offsets
            .iter()
            .map(|&(i, j)| i.unsigned_abs().max(j.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Directed edges in compressed-row form. The edge set is symmetric:
/// `reverse[e]` is the index of the opposite edge.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub offsets: Vec<usize>,
    pub targets: Vec<usize>,
    pub sources: Vec<usize>,
    pub reverse: Vec<usize>,
}

impl Adjacency {
    pub fn edges_of(&self, node: usize) -> std::ops::Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    pub fn n_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn find(&self, a: usize, b: usize) -> Option<usize> {
        self.edges_of(a).find(|&e| self.targets[e] == b)
    }
}

/// A discretised domain.
#[derive(Debug)]
pub struct GridDomain {
    pub shape: Shape,
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub inside: Vec<bool>,
    pub boundary_nodes: Vec<usize>,
    pub is_boundary: Vec<bool>,
    pub stencil: Stencil,
    pub adjacency: Adjacency,
    /// Connected-component label per node (`usize::MAX` outside).
    pub component: Vec<usize>,
    pub n_components: usize,
    edge_lengths: Vec<f64>,
    boundary_dist: OnceLock<Vec<f64>>,
}

impl GridDomain {
    /// Builds the grid with nodes at `origin + (i·h, j·h)` covering the shape's
    /// bounding box. `stencil_k` is ignored for one-dimensional shapes.
    pub fn build(shape: Shape, h: f64, stencil_k: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("grid spacing must be positive, got {h}")));
        }
        shape.validate()?;
        let stencil = if shape.is_one_dimensional() {
            Stencil::line()
        } else {
            Stencil::new(stencil_k)?
        };
        let (lo, hi) = shape.bounds();
        let count = |w: f64| (w / h + 1e-9).floor() as usize + 1;
        let (nx, ny) = match &shape {
            Shape::MaskFile(m) => (m.nx, m.ny),
            _ if shape.is_one_dimensional() => (count(hi.x - lo.x), 1),
            _ => (count(hi.x - lo.x), count(hi.y - lo.y)),
        };
        let n = nx * ny;
        let tol = MEMBERSHIP_TOL * h;
        let pos = |node: usize| Vec2::new(lo.x + (node % nx) as f64 * h, lo.y + (node / nx) as f64 * h);
        let inside: Vec<bool> = (0..n).map(|k| shape.contains(pos(k), tol)).collect();
        if !inside.iter().any(|&b| b) {
            return Err(Error::EmptyInterior);
        }

        let edge_ok = |a: usize, b: usize| -> bool {
            let (pa, pb) = (pos(a), pos(b));
            inside[a]
                && inside[b]
                && shape.contains(pa.lerp(pb, 0.5), tol)
                && !shape.blocks_segment(pa, pb, tol)
        };
        let neighbour = |node: usize, (di, dj): (i32, i32)| -> Option<usize> {
            let i = (node % nx) as i64 + di as i64;
            let j = (node / nx) as i64 + dj as i64;
            (i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny).then(|| j as usize * nx + i as usize)
        };

        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut sources = Vec::new();
        offsets.push(0);
        for a in 0..n {
            if inside[a] {
                for &off in &stencil.offsets {
                    if let Some(b) = neighbour(a, off) {
                        if edge_ok(a, b) {
                            targets.push(b);
                            sources.push(a);
                        }
                    }
                }
            }
            offsets.push(targets.len());
        }
        let mut adjacency = Adjacency {
            offsets,
            targets,
            sources,
            reverse: Vec::new(),
        };
        adjacency.reverse = (0..adjacency.n_edges())
            .map(|e| {
                adjacency
                    .find(adjacency.targets[e], adjacency.sources[e])
                    .expect("edge validity is symmetric")
            })
            .collect();

        // Boundary: inside nodes with a missing or blocked nearest neighbour.
        let near: &[(i32, i32)] = if shape.is_one_dimensional() {
            &[(-1, 0), (1, 0)]
        } else {
            &[(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
        };
        let mut is_boundary = vec![false; n];
        for a in (0..n).filter(|&a| inside[a]) {
            let exposed = near.iter().any(|&off| match neighbour(a, off) {
                None => true,
                Some(b) => !edge_ok(a, b),
            });
            is_boundary[a] = exposed || shape.boundary_distance(pos(a)) <= tol;
        }
        let boundary_nodes: Vec<usize> = (0..n).filter(|&a| is_boundary[a]).collect();

        let mut component = vec![usize::MAX; n];
        let mut n_components = 0;
        for start in 0..n {
            if !inside[start] || component[start] != usize::MAX {
                continue;
            }
            component[start] = n_components;
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                for e in adjacency.edges_of(a) {
                    let b = adjacency.targets[e];
                    if component[b] == usize::MAX {
                        component[b] = n_components;
                        queue.push_back(b);
                    }
                }
            }
            n_components += 1;
        }
        if n_components > 1 {
            log::warn!("domain interior has {n_components} connected components");
        }

        let edge_lengths = (0..adjacency.n_edges())
            .map(|e| (pos(adjacency.targets[e]) - pos(adjacency.sources[e])).norm())
            .collect();

        Ok(Self {
            shape,
            origin: lo,
            h,
            nx,
            ny,
            inside,
            boundary_nodes,
            is_boundary,
            stencil,
            adjacency,
            component,
            n_components,
            edge_lengths,
            boundary_dist: OnceLock::new(),
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, node: usize) -> (usize, usize) {
        (node % self.nx, node / self.nx)
    }

    pub fn position(&self, node: usize) -> Vec2 {
        let (i, j) = self.ij(node);
        Vec2::new(self.origin.x + i as f64 * self.h, self.origin.y + j as f64 * self.h)
    }

    /// Inside node closest to `p`, if any lies within one spacing.
    pub fn nearest_node(&self, p: Vec2) -> Option<usize> {
        let i = ((p.x - self.origin.x) / self.h).round();
        let j = ((p.y - self.origin.y) / self.h).round();
        if i < 0.0 || j < 0.0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        let node = self.node(i as usize, j as usize);
        self.inside[node].then_some(node)
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.inside[node] && !self.is_boundary[node]
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_nodes()).filter(|&n| self.is_interior(n))
    }

    pub fn inside_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_nodes()).filter(|&n| self.inside[n])
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        self.edge_lengths[edge]
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    /// Euclidean distance from `node` to the nearest boundary node.
    pub fn dist_to_boundary(&self, node: usize) -> f64 {
        self.boundary_dist.get_or_init(|| {
            let bpos: Vec<Vec2> = self.boundary_nodes.iter().map(|&b| self.position(b)).collect();
            (0..self.n_nodes())
                .map(|n| {
                    if !self.inside[n] {
                        return f64::NAN;
                    }
                    let p = self.position(n);
                    bpos.iter().map(|&b| (b - p).norm()).fold(f64::INFINITY, f64::min)
                })
                .collect()
        })[node]
    }

    /// Shortest-path length between two nodes with Euclidean edge lengths;
    /// `+∞` across components.
    pub fn intrinsic_distance(&self, x: usize, y: usize) -> Result<f64> {
        self.check_inside(x)?;
        self.check_inside(y)?;
        if self.component[x] != self.component[y] {
            return Ok(f64::INFINITY);
        }
        let opts = crate::finsler::DijkstraOptions {
            targets: Some(vec![y]),
            ..Default::default()
        };
        let field = crate::finsler::dijkstra(self, &self.edge_lengths, &[(x, 0.0)], crate::finsler::Direction::Forward, &opts);
        Ok(field.dist[y])
    }

    /// Intrinsic distances from `x`, truncated at `radius` (`+∞` beyond).
    pub fn intrinsic_ball(&self, x: usize, radius: f64) -> Vec<f64> {
        let opts = crate::finsler::DijkstraOptions {
            cutoff: Some(radius),
            ..Default::default()
        };
        crate::finsler::dijkstra(self, &self.edge_lengths, &[(x, 0.0)], crate::finsler::Direction::Forward, &opts).dist
    }

    pub fn check_inside(&self, node: usize) -> Result<()> {
        if node < self.n_nodes() && self.inside[node] {
            Ok(())
        } else {
            Err(Error::NotInside(node))
        }
    }
}

/// A scalar per node, `NaN` outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub name: String,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    /// Samples `f` at inside nodes.
    pub fn from_fn(dom: &GridDomain, name: impl Into<String>, f: impl Fn(Vec2) -> f64) -> Self {
        let values = (0..dom.n_nodes())
            .map(|n| if dom.inside[n] { f(dom.position(n)) } else { f64::NAN })
            .collect();
        Self::new(name, values)
    }

    pub fn constant(dom: &GridDomain, name: impl Into<String>, c: f64) -> Self {
        Self::from_fn(dom, name, |_| c)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Pointwise `(a + b) / 2`.
    pub fn midpoint(a: &ScalarField, b: &ScalarField, name: impl Into<String>) -> Self {
        let values = a.values.iter().zip(&b.values).map(|(x, y)| 0.5 * (x + y)).collect();
        Self::new(name, values)
    }

    pub fn max_abs_diff(&self, other: &ScalarField, dom: &GridDomain) -> f64 {
        dom.inside_nodes()
            .map(|n| (self.values[n] - other.values[n]).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box_quarter_spacing() {
        let dom = GridDomain::build(Shape::unit_box(), 0.25, 16).unwrap();
        assert_eq!((dom.nx, dom.ny), (5, 5));
        assert_eq!(dom.inside.iter().filter(|&&b| b).count(), 25);
        assert_eq!(dom.boundary_nodes.len(), 16);
        assert_eq!(dom.n_components, 1);
    }

    #[test]
    fn interval_half_spacing() {
        let dom = GridDomain::build(Shape::unit_interval(), 0.5, 16).unwrap();
        assert_eq!((dom.nx, dom.ny), (3, 1));
        let xs: Vec<f64> = dom.boundary_nodes.iter().map(|&b| dom.position(b).x).collect();
        assert_eq!(xs, vec![0.0, 1.0]);
        assert_eq!(dom.stencil.offsets.len(), 2);
    }

    #[test]
    fn stencil_sizes_and_errors() {
        for k in Stencil::ALLOWED {
            let s = Stencil::new(k).unwrap();
            assert_eq!(s.offsets.len(), k);
            let mut sorted = s.offsets.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), k);
        }
        let err = Stencil::new(7).unwrap_err().to_string();
        assert!(err.contains("{8, 16, 32}"), "{err}");
    }

    #[test]
    fn slit_annulus_edges_avoid_the_cut() {
        let dom = GridDomain::build(Shape::slit_annulus(), 0.05, 16).unwrap();
        let adj = &dom.adjacency;
        let (s0, s1) = (Vec2::new(0.0, -2.0), Vec2::new(0.0, -1.0));
        for e in 0..adj.n_edges() {
            let (a, b) = (dom.position(adj.sources[e]), dom.position(adj.targets[e]));
            assert!(!segments_intersect(a, b, s0, s1));
        }
        assert_eq!(dom.n_components, 1);
    }

    #[test]
    fn edges_are_symmetric() {
        let dom = GridDomain::build(
            Shape::Annulus {
                center: Vec2::ZERO,
                r_in: 0.4,
                r_out: 1.0,
            },
            0.1,
            32,
        )
        .unwrap();
        let adj = &dom.adjacency;
        for e in 0..adj.n_edges() {
            let r = adj.reverse[e];
            assert_eq!(adj.sources[r], adj.targets[e]);
            assert_eq!(adj.targets[r], adj.sources[e]);
        }
    }

    #[test]
    fn empty_shape_is_rejected() {
        let mask = Mask::new(1.0, 2, 2, vec![false; 4]).unwrap();
        let err = GridDomain::build(Shape::MaskFile(Arc::new(mask)), 1.0, 8).unwrap_err();
        assert!(matches!(err, Error::EmptyInterior));
        assert!(GridDomain::build(Shape::unit_box(), 0.0, 16).is_err());
        assert!(GridDomain::build(Shape::Annulus { center: Vec2::ZERO, r_in: 2.0, r_out: 1.0 }, 0.1, 16).is_err());
    }

    #[test]
    fn disconnected_mask_reports_components() {
        let mut inside = vec![true; 7 * 3];
        for j in 0..3 {
            inside[j * 7 + 3] = false;
        }
        let mask = Mask::new(1.0, 7, 3, inside).unwrap();
        let dom = GridDomain::build(Shape::MaskFile(Arc::new(mask)), 1.0, 16).unwrap();
        assert_eq!(dom.n_components, 2);
        let (a, b) = (dom.node(0, 1), dom.node(6, 1));
        assert_eq!(dom.intrinsic_distance(a, b).unwrap(), f64::INFINITY);
    }

    #[test]
    fn boundary_distance_of_nodes() {
        let dom = GridDomain::build(Shape::unit_box(), 0.25, 8).unwrap();
        assert_eq!(dom.dist_to_boundary(dom.node(2, 2)), 0.5);
        assert_eq!(dom.dist_to_boundary(dom.node(0, 3)), 0.0);
    }
}
