use super::{candidate_cmp, NeighborResult, NormKind, Points};

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static KD-tree over a borrowed point set.
///
/// Nodes split at the median of the dimension with the widest spread. Every
/// node keeps its bounding box; a subtree is skipped only when the box lies
/// strictly farther than the current kth candidate, so equal-distance points
/// with lower indices are never missed.
#[derive(Debug)]
pub struct KdTree<'a> {
    points: Points<'a>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    // per node: dim minima followed by dim maxima
    bounds: Vec<f64>,
}

impl<'a> KdTree<'a> {
    pub fn build(points: Points<'a>) -> Self {
        let mut tree = KdTree {
            points,
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
            bounds: Vec::new(),
        };
        if !points.is_empty() {
            tree.build_node(0, points.len());
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let dim = self.points.dim();
        let id = self.nodes.len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &self.order[start..end] {
            for (d, &x) in self.points.point(i).iter().enumerate() {
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
        }
        self.bounds.extend_from_slice(&lo);
        self.bounds.extend_from_slice(&hi);
        self.nodes.push(Node::Leaf { start, end });

        let (split_dim, spread) =
            (0..dim)
                .map(|d| (d, hi[d] - lo[d]))
                .fold((0, f64::NEG_INFINITY), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
        if end - start <= LEAF_SIZE || spread <= 0.0 {
            return id;
        }

        let mid = start + (end - start) / 2;
        let points = self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.point(a)[split_dim]
                .total_cmp(&points.point(b)[split_dim])
                .then(a.cmp(&b))
        });
        let value = points.point(self.order[mid])[split_dim];
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            dim: split_dim,
            value,
            left,
            right,
        };
        id
    }

    /// Lower bound on the distance from `q` to anything inside node `id`.
    /// Uses the same arithmetic as [`NormKind::distance`] so the bound never
    /// exceeds a real distance after rounding.
    fn box_distance(&self, id: usize, q: &[f64], norm: NormKind) -> f64 {
        let dim = q.len();
        let lo = &self.bounds[2 * dim * id..2 * dim * id + dim];
        let hi = &self.bounds[2 * dim * id + dim..2 * dim * (id + 1)];
        let gap = |d: usize| {
            if q[d] < lo[d] {
                lo[d] - q[d]
            } else if q[d] > hi[d] {
                q[d] - hi[d]
            } else {
                0.0
            }
        };
        match norm {
            NormKind::Chebyshev => (0..dim).fold(0.0, |acc: f64, d| acc.max(gap(d))),
            NormKind::Euclidean => (0..dim)
                .fold(0.0, |acc, d| {
                    let g = gap(d);
                    acc + g * g
                })
                .sqrt(),
        }
    }

    /// k nearest neighbors of the indexed point, excluding itself.
    pub fn query(&self, query_index: usize, k: usize, norm: NormKind) -> NeighborResult {
        let q = self.points.point(query_index);
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        if !self.nodes.is_empty() {
            self.search(0, q, query_index, k, norm, &mut best);
        }
        NeighborResult {
            query_index,
            kth_distance: best.last().map_or(f64::INFINITY, |c| c.0),
            neighbor_indices: best.into_iter().map(|(_, j)| j).collect(),
        }
    }

    fn search(
        &self,
        id: usize,
        q: &[f64],
        skip: usize,
        k: usize,
        norm: NormKind,
        best: &mut Vec<(f64, usize)>,
    ) {
        if best.len() == k && self.box_distance(id, q, norm) > best[k - 1].0 {
            return;
        }
        match self.nodes[id] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == skip {
                        continue;
                    }
                    let cand = (norm.distance(q, self.points.point(j)), j);
                    if best.len() == k && candidate_cmp(cand, best[k - 1]).is_ge() {
                        continue;
                    }
                    let pos = best.partition_point(|&c| candidate_cmp(c, cand).is_lt());
                    best.insert(pos, cand);
                    best.truncate(k);
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let (near, far) = if q[dim] <= value {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, q, skip, k, norm, best);
                self.search(far, q, skip, k, norm, best);
            }
        }
    }
}
