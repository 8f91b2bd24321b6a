//! Spatial accelerator for nearest-neighbor queries over embedded
//! states. Results are bit-identical to exhaustive search: candidate
//! distances use the same accumulation order, ties resolve toward the
//! smallest state index, and subtrees are pruned only when every point
//! in them is strictly worse than the current best.

use super::{dist_sq, Embedding};

struct Node {
    point: usize,
    axis: usize,
    left: i32,
    right: i32,
}

pub(crate) struct KdTree<'a> {
    states: &'a Embedding,
    nodes: Vec<Node>,
    root: i32,
}

impl<'a> KdTree<'a> {
    /// Builds over states `0..limit` with median splits on cycling
    /// axes; ties on the split coordinate order by state index.
    pub(crate) fn build(states: &'a Embedding, limit: usize) -> Self {
        let mut index: Vec<usize> = (0..limit).collect();
        let mut nodes = Vec::with_capacity(limit);
        let root = build_rec(states, &mut index, 0, &mut nodes);
        Self {
            states,
            nodes,
            root,
        }
    }

    /// Nearest admissible neighbor of state `index`: Theiler-excluded,
    /// squared distance at least `floor_sq`, ties toward the smallest
    /// state index.
    pub(crate) fn nearest(&self, index: usize, theiler: usize, floor_sq: f64) -> Option<usize> {
        let query = self.states.state(index);
        let mut best: Option<(f64, usize)> = None;
        self.visit(self.root, query, index, theiler, floor_sq, &mut best);
        best.map(|(_, j)| j)
    }

    fn visit(
        &self,
        node: i32,
        query: &[f64],
        index: usize,
        theiler: usize,
        floor_sq: f64,
        best: &mut Option<(f64, usize)>,
    ) {
        if node < 0 {
            return;
        }
        let nd = &self.nodes[node as usize];
        let point = self.states.state(nd.point);
        if index.abs_diff(nd.point) > theiler {
            let d = dist_sq(query, point);
            if d >= floor_sq {
                let better = match *best {
                    None => true,
                    Some((bd, bj)) => d < bd || (d == bd && nd.point < bj),
                };
                if better {
                    *best = Some((d, nd.point));
                }
            }
        }
        let diff = query[nd.axis] - point[nd.axis];
        let (near, far) = if diff < 0.0 {
            (nd.left, nd.right)
        } else {
            (nd.right, nd.left)
        };
        self.visit(near, query, index, theiler, floor_sq, best);
        // Every far-side point is at least `diff` away along this axis,
        // and the accumulated squared distance can never round below a
        // single term, so pruning on strict excess is exact.
        let explore_far = match *best {
            None => true,
            Some((bd, _)) => diff * diff <= bd,
        };
        if explore_far {
            self.visit(far, query, index, theiler, floor_sq, best);
        }
    }
}

fn build_rec(states: &Embedding, index: &mut [usize], depth: usize, nodes: &mut Vec<Node>) -> i32 {
    if index.is_empty() {
        return -1;
    }
    let axis = depth % states.dim();
    let mid = index.len() / 2;
    index.select_nth_unstable_by(mid, |&a, &b| {
        states.state(a)[axis]
            .partial_cmp(&states.state(b)[axis])
            .expect("embedded coordinates are finite")
            .then(a.cmp(&b))
    });
    let point = index[mid];
    let slot = nodes.len();
    nodes.push(Node {
        point,
        axis,
        left: -1,
        right: -1,
    });
    let (lo, rest) = index.split_at_mut(mid);
    let hi = &mut rest[1..];
    let left = build_rec(states, lo, depth + 1, nodes);
    let right = build_rec(states, hi, depth + 1, nodes);
    nodes[slot].left = left;
    nodes[slot].right = right;
    slot as i32
}
