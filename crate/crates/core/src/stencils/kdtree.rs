use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Result};
use crate::{dist2, Point};

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static 2D k-d tree. Queries return neighbours ordered by `(distance,
/// index)`, so ties are broken towards the smaller point index.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Point>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    d2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    pub fn build(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return invalid("k-d tree needs at least one point");
        }
        let mut tree = KdTree {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, points.len());
        Ok(tree)
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for &i in &self.order[start..end] {
            for a in 0..2 {
                lo[a] = lo[a].min(self.points[i][a]);
                hi[a] = hi[a].max(self.points[i][a]);
            }
        }
        let axis = if hi[0] - lo[0] >= hi[1] - lo[1] { 0 } else { 1 };
        let mid = start + (end - start) / 2;
        let pts = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a][axis].total_cmp(&pts[b][axis]).then(a.cmp(&b))
        });
        let value = self.points[self.order[mid]][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The `k` nearest points to `p` as `(index, distance)`, nearest first.
    pub fn nearest(&self, p: &Point, k: usize) -> Result<Vec<(usize, f64)>> {
        if k > self.len() {
            return invalid(format!(
                "requested {k} neighbours from a tree of {} points",
                self.len()
            ));
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if k > 0 {
            self.search(0, p, k, &mut heap);
        }
        let mut found = heap.into_sorted_vec();
        found.truncate(k);
        Ok(found.into_iter().map(|c| (c.index, c.d2.sqrt())).collect())
    }

    /// Indices only, nearest first.
    pub fn nearest_indices(&self, p: &Point, k: usize) -> Result<Vec<usize>> {
        Ok(self.nearest(p, k)?.into_iter().map(|(i, _)| i).collect())
    }

    fn search(&self, node: usize, p: &Point, k: usize, heap: &mut BinaryHeap<Candidate>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let c = Candidate {
                        d2: dist2(p, &self.points[i]),
                        index: i,
                    };
                    if heap.len() < k {
                        heap.push(c);
                    } else if c < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(c);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = p[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, p, k, heap);
                // equal distances may still hide a smaller index on the far side
                if heap.len() < k || diff * diff <= heap.peek().unwrap().d2 {
                    self.search(far, p, k, heap);
                }
            }
        }
    }
}

/// Brute-force reference with the same ordering contract as [`KdTree::nearest`].
pub fn brute_force_nearest(points: &[Point], p: &Point, k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, q)| (dist2(p, q), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_point() {
        let t = KdTree::build(&[[0.3, 0.4]]).unwrap();
        assert_eq!(t.nearest(&[0.3, 0.4], 1).unwrap(), vec![(0, 0.0)]);
    }

    #[test]
    fn empty_input_and_oversized_query_fail() {
        assert!(KdTree::build(&[]).is_err());
        let t = KdTree::build(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(t.nearest(&[0.0, 0.0], 3).is_err());
    }

    #[test]
    fn hundred_random_points_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Point> = (0..100).map(|_| [rng.gen(), rng.gen()]).collect();
        let t = KdTree::build(&pts).unwrap();
        for _ in 0..50 {
            let q = [rng.gen(), rng.gen()];
            assert_eq!(
                t.nearest_indices(&q, 10).unwrap(),
                brute_force_nearest(&pts, &q, 10)
            );
        }
    }

    #[test]
    fn grid_ties_go_to_smaller_index() {
        let mut pts = Vec::new();
        for i in 0..9 {
            for j in 0..9 {
                pts.push([i as f64, j as f64]);
            }
        }
        let t = KdTree::build(&pts).unwrap();
        for (c, q) in pts.iter().enumerate() {
            let got = t.nearest_indices(q, 13).unwrap();
            assert_eq!(got[0], c);
            assert_eq!(got, brute_force_nearest(&pts, q, 13));
        }
    }

    proptest! {
        #[test]
        fn query_equals_brute_force(
            pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..120),
            q in (-0.2f64..1.2, -0.2f64..1.2),
            k in 1usize..40,
        ) {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            let k = k.min(pts.len());
            let t = KdTree::build(&pts).unwrap();
            let q = [q.0, q.1];
            prop_assert_eq!(t.nearest_indices(&q, k).unwrap(), brute_force_nearest(&pts, &q, k));
        }
    }
}
