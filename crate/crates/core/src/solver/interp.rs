use crate::error::{invalid, Error, Result};
use crate::nodegen::{GridMap, NodeLayout};
use crate::{dist, Point};

/// Tolerance for matching a requested point against a node.
const PIN_TOL: f64 = 1e-12;

/// Values of the nodal field `u` at `points` (scaled coordinates).
///
/// A point that coincides with a node is read directly; otherwise the
/// layout's grid parameterisation is used for tensor-product cubic
/// interpolation over the surrounding 4×4 nodes.
pub fn evaluate_at(layout: &NodeLayout, u: &[f64], points: &[Point]) -> Result<Vec<f64>> {
    if u.len() != layout.len() {
        return invalid(format!(
            "field has {} values for {} nodes",
            u.len(),
            layout.len()
        ));
    }
    points
        .iter()
        .map(|p| {
            if let Some(i) = coincident_node(layout, p) {
                return Ok(u[i]);
            }
            match &layout.grid {
                Some(grid) => cubic_patch(grid, u, p),
                None => invalid(format!(
                    "point {p:?} is not a node of this scattered layout"
                )),
            }
        })
        .collect()
}

fn coincident_node(layout: &NodeLayout, p: &Point) -> Option<usize> {
    let hit = |&i: &usize| dist(&layout.nodes[i], p) <= PIN_TOL;
    layout.eval_nodes.iter().copied().find(hit).or_else(|| {
        if layout.grid.is_some() {
            None
        } else {
            (0..layout.len()).find(hit)
        }
    })
}

fn lagrange4(t: f64, start: usize, h: f64) -> [f64; 4] {
    let nodes: [f64; 4] = std::array::from_fn(|a| (start + a) as f64 * h);
    std::array::from_fn(|a| {
        (0..4)
            .filter(|&b| b != a)
            .map(|b| (t - nodes[b]) / (nodes[a] - nodes[b]))
            .product()
    })
}

fn cubic_patch(grid: &GridMap, u: &[f64], p: &Point) -> Result<f64> {
    let k = grid.per_axis;
    let outside = || Error::OutsidePatch { x: p[0], y: p[1] };
    if k < 4 {
        return Err(outside());
    }
    let h = grid.spacing();
    let xi = grid.mapping.inverse(p);
    let start = |t: f64| -> usize {
        let cell = (t / h).floor() as isize - 1;
        cell.clamp(0, k as isize - 4) as usize
    };
    let (i0, j0) = (start(xi[0]), start(xi[1]));
    let lo = |s: usize| s as f64 * h - 1e-12;
    let hi = |s: usize| (s + 3) as f64 * h + 1e-12;
    if xi[0] < lo(i0) || xi[0] > hi(i0) || xi[1] < lo(j0) || xi[1] > hi(j0) {
        return Err(outside());
    }
    let wx = lagrange4(xi[0], i0, h);
    let wy = lagrange4(xi[1], j0, h);
    let mut acc = 0.0;
    for (b, wyb) in wy.iter().enumerate() {
        for (a, wxa) in wx.iter().enumerate() {
            let idx = grid.node(i0 + a, j0 + b).ok_or_else(outside)?;
            acc += wxa * wyb * u[idx];
        }
    }
    Ok(acc)
}
