use std::fmt;
use std::fmt::Write as _;

use super::domain::{Domain2D, DomainKind, Role, BOUNDARY_EPS};
use super::front::{advancing_front_fill, Rect};
use super::radius::{Radius, RadiusParams};
use crate::error::{invalid, Result};
use crate::stencils::KdTree;
use crate::{dist, Point};

/// Which family a layout belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    Cartesian,
    Adapted,
    Smooth,
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutKind::Cartesian => "cartesian",
            LayoutKind::Adapted => "adapted",
            LayoutKind::Smooth => "smooth",
        })
    }
}

impl std::str::FromStr for LayoutKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartesian" => Ok(LayoutKind::Cartesian),
            "adapted" => Ok(LayoutKind::Adapted),
            "smooth" => Ok(LayoutKind::Smooth),
            other => invalid(format!("unknown layout '{other}'")),
        }
    }
}

/// One-dimensional sinh stretching of `[0, 1]` that clusters points around
/// `center` with density parameter `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinhMap {
    pub center: f64,
    pub h: f64,
    z0: f64,
    z1: f64,
}

impl SinhMap {
    pub fn new(center: f64, h: f64) -> Result<Self> {
        if !(center > 0.0 && center < 1.0) {
            return invalid(format!("clustering point must lie in (0, 1), got {center}"));
        }
        if !(h > 0.0) {
            return invalid(format!("density parameter H must be positive, got {h}"));
        }
        Ok(Self {
            center,
            h,
            z0: (-center / h).asinh(),
            z1: ((1.0 - center) / h).asinh(),
        })
    }

    /// `t ∈ [0,1]` (uniform parameter) → mapped coordinate; endpoints exact.
    pub fn forward(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            self.center + self.h * (self.z0 + t * (self.z1 - self.z0)).sinh()
        }
    }

    pub fn inverse(&self, x: f64) -> f64 {
        (((x - self.center) / self.h).asinh() - self.z0) / (self.z1 - self.z0)
    }

    /// Derivative of `forward` at `t = 0`.
    fn slope_at_zero(&self) -> f64 {
        self.h * self.z0.cosh() * (self.z1 - self.z0)
    }
}

/// `n` points `x_i = K̂ + H sinh(z_i)` with equispaced `z_i`, so that
/// `x_0 = 0` and `x_{n-1} = 1` exactly.
pub fn sinh_nodes(n: usize, h: f64, k_hat: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return invalid("need at least two nodes");
    }
    let map = SinhMap::new(k_hat, h)?;
    Ok((0..n)
        .map(|i| map.forward(i as f64 / (n - 1) as f64))
        .collect())
}

/// Smooth map from a uniform parameter grid onto a structured layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridMapping {
    Identity,
    /// Stretches the sum `x₁ + x₂` along rays from the origin (triangle).
    DiagonalSinh(SinhMap),
    /// Stretches the first coordinate only.
    AxisSinh(SinhMap),
}

impl GridMapping {
    pub fn forward(&self, xi: &Point) -> Point {
        match self {
            GridMapping::Identity => *xi,
            GridMapping::AxisSinh(m) => [m.forward(xi[0]), xi[1]],
            GridMapping::DiagonalSinh(m) => {
                let s = xi[0] + xi[1];
                let f = if s <= 0.0 {
                    m.slope_at_zero()
                } else {
                    m.forward(s) / s
                };
                [xi[0] * f, xi[1] * f]
            }
        }
    }

    pub fn inverse(&self, p: &Point) -> Point {
        match self {
            GridMapping::Identity => *p,
            GridMapping::AxisSinh(m) => [m.inverse(p[0]), p[1]],
            GridMapping::DiagonalSinh(m) => {
                let s = p[0] + p[1];
                let f = if s <= 0.0 {
                    1.0 / m.slope_at_zero()
                } else {
                    m.inverse(s) / s
                };
                [p[0] * f, p[1] * f]
            }
        }
    }
}

/// Structured parameterisation of a cartesian or adapted layout: node
/// `(i, j)` sits at `mapping(i/(k-1), j/(k-1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    pub per_axis: usize,
    pub mapping: GridMapping,
    index: Vec<Option<usize>>,
}

impl GridMap {
    pub fn node(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.per_axis || j >= self.per_axis {
            return None;
        }
        self.index[j * self.per_axis + i]
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.per_axis - 1) as f64
    }
}

/// Scattered nodes on a scaled domain together with their roles.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    pub domain: Domain2D,
    pub kind: LayoutKind,
    pub nodes: Vec<Point>,
    pub roles: Vec<Role>,
    /// Present for cartesian and adapted layouts.
    pub grid: Option<GridMap>,
    /// Indices of pinned evaluation nodes, in the order they were requested.
    pub eval_nodes: Vec<usize>,
    /// Radius function used to build a smooth layout.
    pub radius: Option<RadiusParams>,
}

impl NodeLayout {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dirichlet_mask(&self) -> Vec<bool> {
        self.roles.iter().map(|r| r.is_dirichlet()).collect()
    }

    pub fn count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    /// Smallest distance between two distinct nodes.
    pub fn min_separation(&self) -> f64 {
        let tree = KdTree::build(&self.nodes).expect("non-empty layout");
        self.nodes
            .iter()
            .map(|p| {
                tree.nearest(p, 2)
                    .map(|nb| nb[1].1)
                    .unwrap_or(f64::INFINITY)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Text form: header `# N=<count> domain=<kind>`, then `x y role` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# N={} domain={}", self.len(), self.domain.kind);
        for (p, r) in self.nodes.iter().zip(&self.roles) {
            let _ = writeln!(s, "{} {} {}", p[0], p[1], r.code());
        }
        s
    }
}

/// Parsed content of a layout file.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutFile {
    pub domain: DomainKind,
    pub nodes: Vec<Point>,
    pub roles: Vec<Role>,
}

pub fn parse_layout_text(text: &str) -> Result<LayoutFile> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let mut count = None;
    let mut domain = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = field.strip_prefix("N=") {
            count = v.parse::<usize>().ok();
        } else if let Some(v) = field.strip_prefix("domain=") {
            domain = Some(v.parse::<DomainKind>()?);
        }
    }
    let (Some(count), Some(domain)) = (count, domain) else {
        return invalid(format!("malformed layout header '{header}'"));
    };
    let mut nodes = Vec::with_capacity(count);
    let mut roles = Vec::with_capacity(count);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return invalid(format!("malformed layout line '{line}'"));
        }
        let x = f[0].parse::<f64>();
        let y = f[1].parse::<f64>();
        let (Ok(x), Ok(y)) = (x, y) else {
            return invalid(format!("bad coordinates in '{line}'"));
        };
        nodes.push([x, y]);
        roles.push(Role::from_code(f[2])?);
    }
    if nodes.len() != count {
        return invalid(format!("header says {count} nodes, found {}", nodes.len()));
    }
    Ok(LayoutFile {
        domain,
        nodes,
        roles,
    })
}

fn grid_layout(
    domain: &Domain2D,
    k: usize,
    mapping: GridMapping,
    kind: LayoutKind,
) -> Result<NodeLayout> {
    if k < 2 {
        return invalid(format!("need at least 2 nodes per axis, got {k}"));
    }
    let last = k - 1;
    let h = 1.0 / last as f64;
    let tri = domain.kind == DomainKind::Triangle;
    let mut nodes = Vec::new();
    let mut roles = Vec::new();
    let mut index = vec![None; k * k];
    for j in 0..k {
        for i in 0..k {
            if tri && i + j > last {
                continue;
            }
            let xi = [i as f64 * h, j as f64 * h];
            let mut p = mapping.forward(&xi);
            if i == 0 {
                p[0] = 0.0;
            }
            if j == 0 {
                p[1] = 0.0;
            }
            let role = if tri {
                if i + j == last {
                    p[1] = 1.0 - p[0];
                    Role::FarField
                } else if i == 0 && j == 0 {
                    Role::CloseField
                } else {
                    Role::Interior
                }
            } else {
                if j == last {
                    p[1] = 1.0;
                }
                if i == last {
                    p[0] = 1.0;
                    Role::FarField
                } else if i == 0 {
                    Role::CloseField
                } else {
                    Role::Interior
                }
            };
            index[j * k + i] = Some(nodes.len());
            nodes.push(p);
            roles.push(role);
        }
    }
    Ok(NodeLayout {
        domain: *domain,
        kind,
        nodes,
        roles,
        grid: Some(GridMap {
            per_axis: k,
            mapping,
            index,
        }),
        eval_nodes: Vec::new(),
        radius: None,
    })
}

/// Equidistant grid with `nodes_per_axis` nodes along each axis; on the
/// triangle only nodes with `x₁ + x₂ ≤ 1` are kept.
pub fn cartesian_layout(domain: &Domain2D, nodes_per_axis: usize) -> Result<NodeLayout> {
    grid_layout(
        domain,
        nodes_per_axis,
        GridMapping::Identity,
        LayoutKind::Cartesian,
    )
}

/// Sinh-clustered grid. On the triangle the sum `x₁ + x₂` is clustered around
/// the strike line `x₁ + x₂ = 2K̂`; on the rectangle the first axis is
/// clustered around `K̂` and the second stays uniform.
pub fn adapted_layout(
    domain: &Domain2D,
    nodes_per_axis: usize,
    h: f64,
    k_hat: f64,
) -> Result<NodeLayout> {
    if !(k_hat > 0.0 && k_hat < 1.0) {
        return invalid(format!("scaled strike must lie in (0, 1), got {k_hat}"));
    }
    let mapping = match domain.kind {
        DomainKind::Triangle => GridMapping::DiagonalSinh(SinhMap::new(2.0 * k_hat, h)?),
        DomainKind::Rectangle => GridMapping::AxisSinh(SinhMap::new(k_hat, h)?),
    };
    grid_layout(domain, nodes_per_axis, mapping, LayoutKind::Adapted)
}

/// Nodes per axis giving roughly `target` nodes on the domain.
pub fn nodes_per_axis_for(domain: &Domain2D, target: usize) -> usize {
    let t = target.max(3) as f64;
    let k = match domain.kind {
        DomainKind::Triangle => ((1.0 + 8.0 * t).sqrt() - 1.0) / 2.0,
        DomainKind::Rectangle => t.sqrt(),
    };
    (k.round() as usize).max(2)
}

/// Boundary nodes placed edge by edge with spacing following `radius`;
/// corners are always included.
pub fn boundary_nodes(domain: &Domain2D, radius: &Radius) -> Vec<Point> {
    const SAMPLES: usize = 4000;
    let verts = domain.vertices();
    let mut out = Vec::new();
    for e in 0..verts.len() {
        let a = verts[e];
        let b = verts[(e + 1) % verts.len()];
        let len = dist(&a, &b);
        let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        // cumulative ∫ ds / R along the edge
        let mut cum = vec![0.0; SAMPLES + 1];
        let mut prev = 1.0 / radius.at(&a);
        for s in 1..=SAMPLES {
            let t = s as f64 / SAMPLES as f64;
            let cur = 1.0 / radius.at(&at(t));
            cum[s] = cum[s - 1] + 0.5 * (prev + cur) * len / SAMPLES as f64;
            prev = cur;
        }
        let total = cum[SAMPLES];
        let segments = (total.round() as usize).max(1);
        out.push(a);
        let mut s = 0;
        for m in 1..segments {
            let target = total * m as f64 / segments as f64;
            while cum[s + 1] < target {
                s += 1;
            }
            let frac = (target - cum[s]) / (cum[s + 1] - cum[s]);
            let t = (s as f64 + frac) / SAMPLES as f64;
            let mut p = at(t);
            // keep the point exactly on its edge
            if a[0] == b[0] {
                p[0] = a[0];
            }
            if a[1] == b[1] {
                p[1] = a[1];
            }
            if domain.kind == DomainKind::Triangle && e == 1 {
                p[1] = 1.0 - p[0];
            }
            out.push(p);
        }
    }
    out
}

/// Superposes an advancing-front fill with fixed boundary and pinned nodes,
/// culls fill nodes outside the domain or within `R/2` of a fixed node, and
/// runs `repel_iters` repel sweeps on the `neighbours` nearest free nodes of
/// every boundary node.
pub fn smooth_layout(
    domain: &Domain2D,
    boundary: &[Point],
    pinned: &[Point],
    radius: &Radius,
    repel_iters: usize,
    neighbours: usize,
) -> Result<NodeLayout> {
    for p in pinned {
        if !domain.contains(p, 0.0) || domain.boundary_distance(p) <= 0.0 {
            return invalid(format!("pinned node {p:?} is not inside the domain"));
        }
    }
    if boundary.is_empty() {
        return invalid("smooth layout needs boundary nodes");
    }
    let margin = 2.0
        * [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
            .iter()
            .map(|v| radius.at(v))
            .fold(0.0, f64::max);
    let rect = Rect::new([-margin, -margin], [1.0 + margin, 1.0 + margin])?;
    let fill = advancing_front_fill(&rect, radius)?;

    let mut fixed: Vec<Point> = boundary.to_vec();
    fixed.extend_from_slice(pinned);
    let fixed_tree = KdTree::build(&fixed)?;
    let mut free: Vec<Point> = Vec::with_capacity(fill.len());
    for p in fill {
        if !domain.contains(&p, 0.0) || domain.boundary_distance(&p) <= BOUNDARY_EPS {
            continue;
        }
        let (_, d) = fixed_tree.nearest(&p, 1)?[0];
        if d >= 0.5 * radius.at(&p) {
            free.push(p);
        }
    }

    let nfixed = fixed.len();
    let mut nodes = fixed;
    nodes.extend(free);
    repel(
        domain,
        &mut nodes,
        boundary.len(),
        nfixed,
        radius,
        repel_iters,
        neighbours,
    )?;

    let mut roles = Vec::with_capacity(nodes.len());
    roles.extend(boundary.iter().map(|p| domain.role_at(p)));
    roles.extend(std::iter::repeat_n(Role::Evaluation, pinned.len()));
    roles.extend(std::iter::repeat_n(Role::Interior, nodes.len() - nfixed));
    let eval_nodes = (boundary.len()..nfixed).collect();
    Ok(NodeLayout {
        domain: *domain,
        kind: LayoutKind::Smooth,
        nodes,
        roles,
        grid: None,
        eval_nodes,
        radius: match radius {
            Radius::Elliptic(p) => Some(*p),
            Radius::Constant(_) => None,
        },
    })
}

/// Free nodes among the `neighbours` nearest of any boundary node.
pub(crate) fn near_boundary_free_nodes(
    nodes: &[Point],
    nboundary: usize,
    nfixed: usize,
    neighbours: usize,
) -> Result<Vec<usize>> {
    let tree = KdTree::build(nodes)?;
    let k = (neighbours + 1).min(nodes.len());
    let mut flag = vec![false; nodes.len()];
    for p in &nodes[..nboundary] {
        for i in tree.nearest_indices(p, k)? {
            if i >= nfixed {
                flag[i] = true;
            }
        }
    }
    Ok((0..nodes.len()).filter(|&i| flag[i]).collect())
}

/// Repel sweeps with an `r⁻³` force among `neighbours` nearest nodes. Only
/// free nodes close to the boundary move; each step is capped at `0.1 R(x)`
/// and moves that would leave the domain are rejected.
fn repel(
    domain: &Domain2D,
    nodes: &mut [Point],
    nboundary: usize,
    nfixed: usize,
    radius: &Radius,
    iters: usize,
    neighbours: usize,
) -> Result<()> {
    const GAIN: f64 = 0.05;
    const CAP: f64 = 0.1;
    for _ in 0..iters {
        let movable = near_boundary_free_nodes(nodes, nboundary, nfixed, neighbours)?;
        let tree = KdTree::build(nodes)?;
        let k = (neighbours + 1).min(nodes.len());
        let mut moves = Vec::with_capacity(movable.len());
        for &i in &movable {
            let p = nodes[i];
            let r = radius.at(&p);
            let mut force = [0.0, 0.0];
            for (j, d) in tree.nearest(&p, k)? {
                if j == i || d == 0.0 {
                    continue;
                }
                let w = (r / d).powi(3) / d;
                force[0] += w * (p[0] - nodes[j][0]);
                force[1] += w * (p[1] - nodes[j][1]);
            }
            let mut step = [GAIN * r * force[0], GAIN * r * force[1]];
            let len = step[0].hypot(step[1]);
            if len > CAP * r {
                step[0] *= CAP * r / len;
                step[1] *= CAP * r / len;
            }
            moves.push((i, [p[0] + step[0], p[1] + step[1]]));
        }
        for (i, q) in moves {
            if domain.contains(&q, 0.0) && domain.boundary_distance(&q) > BOUNDARY_EPS {
                nodes[i] = q;
            }
        }
    }
    Ok(())
}

/// Hexagonal-packing estimate of the node count per unit density parameter.
fn predicted_count_per_density(domain: &Domain2D, shape: &RadiusParams) -> f64 {
    const M: usize = 200;
    let hex = 2.0 / 3f64.sqrt();
    let cell = 1.0 / (M * M) as f64;
    let mut total = 0.0;
    for a in 0..M {
        for b in 0..M {
            let p = [(a as f64 + 0.5) / M as f64, (b as f64 + 0.5) / M as f64];
            if domain.contains(&p, 0.0) {
                let s = shape.shape(&p);
                total += hex / (s * s) * cell;
            }
        }
    }
    total
}

/// Smooth layout whose density parameter is tuned so that the node count is
/// close to `target`. `shape` supplies the centre, axes and rotation; its
/// density field is ignored.
pub fn smooth_layout_with_count(
    domain: &Domain2D,
    shape: &RadiusParams,
    pinned: &[Point],
    target: usize,
    repel_iters: usize,
    neighbours: usize,
) -> Result<NodeLayout> {
    if target < 10 {
        return invalid(format!("target node count {target} is too small"));
    }
    let mut n = (target as f64 / predicted_count_per_density(domain, shape)).max(1.0);
    let build = |n: f64| -> Result<NodeLayout> {
        let radius = Radius::Elliptic(shape.with_density(n));
        let boundary = boundary_nodes(domain, &radius);
        smooth_layout(domain, &boundary, pinned, &radius, repel_iters, neighbours)
    };
    let mut layout = build(n)?;
    for _ in 0..2 {
        let ratio = target as f64 / layout.len() as f64;
        if (ratio - 1.0).abs() < 0.02 {
            break;
        }
        n = (n * ratio).max(1.0);
        layout = build(n)?;
    }
    Ok(layout)
}
