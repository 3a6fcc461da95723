//! Nearest-neighbour search and stencil construction.

mod kdtree;

pub use kdtree::{brute_force_nearest, KdTree};

use crate::error::{invalid, Result};
use crate::nodegen::NodeLayout;
use crate::{dist, Point};

/// A node together with its `n − 1` nearest neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub center: usize,
    /// Member node indices, nearest first; `members[0] == center`.
    pub members: Vec<usize>,
    /// Distance from the centre to the farthest member.
    pub scale: f64,
}

impl Stencil {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member coordinates shifted to the centre and divided by `scale`.
    pub fn local_coordinates(&self, points: &[Point]) -> Vec<Point> {
        let c = points[self.center];
        self.members
            .iter()
            .map(|&i| {
                let p = points[i];
                [(p[0] - c[0]) / self.scale, (p[1] - c[1]) / self.scale]
            })
            .collect()
    }
}

/// Stencils of size `n` around the given centres.
pub fn stencils_for(points: &[Point], centers: &[usize], n: usize) -> Result<Vec<Stencil>> {
    if n > points.len() {
        return invalid(format!(
            "stencil size {n} exceeds node count {}",
            points.len()
        ));
    }
    if n == 0 {
        return invalid("stencil size must be positive");
    }
    let tree = KdTree::build(points)?;
    centers
        .iter()
        .map(|&c| {
            let nb = tree.nearest(&points[c], n)?;
            let members: Vec<usize> = nb.iter().map(|&(i, _)| i).collect();
            if members[0] != c {
                return invalid(format!("node {c} coincides with node {}", members[0]));
            }
            let scale = members
                .iter()
                .map(|&i| dist(&points[c], &points[i]))
                .fold(0.0, f64::max);
            Ok(Stencil {
                center: c,
                members,
                scale: if scale > 0.0 { scale } else { 1.0 },
            })
        })
        .collect()
}

/// One stencil per node that needs an operator row (everything except
/// Dirichlet nodes).
pub fn make_stencils(layout: &NodeLayout, n: usize) -> Result<Vec<Stencil>> {
    let centers: Vec<usize> = (0..layout.len())
        .filter(|&i| !layout.roles[i].is_dirichlet())
        .collect();
    stencils_for(&layout.nodes, &centers, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodegen::{cartesian_layout, Domain2D};

    #[test]
    fn full_size_stencils_contain_everything() {
        let l = cartesian_layout(&Domain2D::rectangle(1.0, 1.0).unwrap(), 4).unwrap();
        let st = make_stencils(&l, l.len()).unwrap();
        for s in &st {
            let mut m = s.members.clone();
            m.sort_unstable();
            assert_eq!(m, (0..l.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn oversized_stencil_is_rejected() {
        let l = cartesian_layout(&Domain2D::rectangle(1.0, 1.0).unwrap(), 3).unwrap();
        assert!(make_stencils(&l, 10).is_err());
    }

    #[test]
    fn five_point_cross_on_grid() {
        let l = cartesian_layout(&Domain2D::rectangle(1.0, 1.0).unwrap(), 7).unwrap();
        let g = l.grid.as_ref().unwrap();
        let c = g.node(3, 3).unwrap();
        let st = stencils_for(&l.nodes, &[c], 5).unwrap();
        // brute force ordering with index tie-break
        assert_eq!(st[0].members, brute_force_nearest(&l.nodes, &l.nodes[c], 5));
        let mut got = st[0].members.clone();
        got.sort_unstable();
        let mut want = vec![
            c,
            g.node(2, 3).unwrap(),
            g.node(4, 3).unwrap(),
            g.node(3, 2).unwrap(),
            g.node(3, 4).unwrap(),
        ];
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn centre_is_first_and_scale_positive() {
        let l = cartesian_layout(&Domain2D::triangle(1.0).unwrap(), 12).unwrap();
        let st = make_stencils(&l, 15).unwrap();
        assert_eq!(
            st.len(),
            l.len() - l.dirichlet_mask().iter().filter(|&&d| d).count()
        );
        for s in &st {
            assert_eq!(s.members[0], s.center);
            assert!(s.scale > 0.0);
            let mut m = s.members.clone();
            m.dedup();
            assert_eq!(m.len(), 15);
        }
    }
}
