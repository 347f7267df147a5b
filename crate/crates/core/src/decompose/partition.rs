//! Partitions of the window into boxes inside admissible balls, with a
//! spanning tree of adjacent boxes used for summation by parts.

use std::collections::VecDeque;

use super::cz::circumscribed_ball;
use super::scale_for;
use crate::atoms::GaussianAtom;
use crate::error::Result;
use crate::func_repr::{BoxSumFunctionND, Func, StepFunction1D};
use crate::geometry::maximal_radius;
use crate::measure::AxisBox;

pub(crate) struct TreePartition {
    pub cells: Vec<AxisBox>,
    pub parent: Vec<Option<usize>>,
    /// Breadth-first order, root first.
    pub order: Vec<usize>,
    pub window: AxisBox,
}

impl TreePartition {
    /// Intervals between consecutive nodes sign(k)√|k|, |k| <= ⌈extent²⌉,
    /// rooted at [0, 1]; parents point toward the root.
    pub fn intervals(extent: f64) -> Result<TreePartition> {
        let (_, pou) = crate::geometry::covering_1d(extent)?;
        let nodes = match pou {
            crate::geometry::PartitionOfUnity::Nodes1D { nodes } => nodes,
            _ => unreachable!("one-dimensional covering"),
        };
        let big_j = (nodes.len() - 1) / 2;
        let cells: Vec<AxisBox> =
            nodes.windows(2).map(|w| AxisBox { lo: vec![w[0]], hi: vec![w[1]] }).collect();
        let root = big_j;
        let parent = (0..cells.len())
            .map(|i| match i.cmp(&root) {
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(i - 1),
                std::cmp::Ordering::Less => Some(i + 1),
            })
            .collect();
        let mut order = vec![root];
        for k in 1..=big_j {
            if root >= k {
                order.push(root - k);
            }
            if root + k < cells.len() {
                order.push(root + k);
            }
        }
        let window = AxisBox { lo: vec![nodes[0]], hi: vec![*nodes.last().unwrap()] };
        Ok(TreePartition { cells, parent, order, window })
    }

    /// Dyadic cubes of [−extent, extent]ⁿ, split until the circumscribed
    /// ball is admissible; the tree is a breadth-first spanning tree of
    /// the face-adjacency graph.
    pub fn dyadic(dim: usize, extent: f64) -> Result<TreePartition> {
        let window = AxisBox::cube(&vec![0.0; dim], extent);
        let mut nodes: Vec<Node> = vec![Node { bx: window.clone(), children: None, leaf: None }];
        let mut cells = Vec::new();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let b = nodes[i].bx.clone();
            let ball = circumscribed_ball(&b);
            if ball.radius <= maximal_radius(ball.center.norm()) {
                nodes[i].leaf = Some(cells.len());
                cells.push(b);
                continue;
            }
            let mid: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(l, h)| 0.5 * (l + h)).collect();
            let mut kids = Vec::with_capacity(1 << dim);
            for mask in 0..(1usize << dim) {
                let mut c = b.clone();
                for d in 0..dim {
                    if mask >> d & 1 == 1 {
                        c.lo[d] = mid[d];
                    } else {
                        c.hi[d] = mid[d];
                    }
                }
                kids.push(nodes.len());
                nodes.push(Node { bx: c, children: None, leaf: None });
            }
            nodes[i].children = Some(kids.clone());
            stack.extend(kids.into_iter().rev());
        }
        let locate = |x: &[f64]| -> Option<usize> {
            if !window.contains(x) {
                return None;
            }
            let mut i = 0;
            loop {
                match &nodes[i].children {
                    None => return nodes[i].leaf,
                    Some(kids) => {
                        i = *kids.iter().find(|&&k| half_open(&nodes[k].bx, x))?;
                    }
                }
            }
        };
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for (i, c) in cells.iter().enumerate() {
            let h = c.hi[0] - c.lo[0];
            let center: Vec<f64> = c.lo.iter().zip(&c.hi).map(|(l, h)| 0.5 * (l + h)).collect();
            for d in 0..dim {
                for sign in [-1.0, 1.0] {
                    let mut p = center.clone();
                    p[d] += sign * 0.75 * h;
                    if let Some(j) = locate(&p) {
                        if j != i {
                            adj[i].push(j);
                            adj[j].push(i);
                        }
                    }
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let root = locate(&vec![1e-9 * extent; dim]).expect("origin cell");
        let mut parent = vec![None; cells.len()];
        let mut seen = vec![false; cells.len()];
        let mut order = Vec::with_capacity(cells.len());
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    parent[j] = Some(i);
                    queue.push_back(j);
                }
            }
        }
        debug_assert_eq!(order.len(), cells.len());
        Ok(TreePartition { cells, parent, order, window })
    }

    /// Σ_Q β_Q 1_Q/m_Q = Σ_{Q ≠ root} S_Q (1_Q/m_Q − 1_P/m_P) + S_root 1_root/m_root
    /// with S_Q the sum of β over the subtree of Q and P the parent of Q.
    /// Returns the atoms of the first sum and |S_root|, which vanishes up
    /// to rounding when Σ β = 0.
    pub fn sum_by_parts(&self, beta: &[f64], masses: &[f64]) -> Result<(Vec<(f64, GaussianAtom)>, f64)> {
        let mut s = beta.to_vec();
        for &i in self.order.iter().rev() {
            if let Some(p) = self.parent[i] {
                s[p] += s[i];
            }
        }
        let root = self.order[0];
        let mut out = Vec::new();
        for &i in &self.order[1..] {
            if s[i] == 0.0 {
                continue;
            }
            let p = self.parent[i].expect("non-root cell");
            let (qi, qp) = (&self.cells[i], &self.cells[p]);
            let payload = pair(qi, s[i] / masses[i], qp, -s[i] / masses[p])?;
            let hull = AxisBox {
                lo: qi.lo.iter().zip(&qp.lo).map(|(a, b)| a.min(*b)).collect(),
                hi: qi.hi.iter().zip(&qp.hi).map(|(a, b)| a.max(*b)).collect(),
            };
            let ball = circumscribed_ball(&hull);
            let scale = scale_for(&ball);
            out.push(GaussianAtom::from_bounded(payload, ball, scale)?);
        }
        Ok((out, s[root].abs()))
    }
}

struct Node {
    bx: AxisBox,
    children: Option<Vec<usize>>,
    leaf: Option<usize>,
}

fn half_open(b: &AxisBox, x: &[f64]) -> bool {
    (0..b.dim()).all(|d| x[d] >= b.lo[d] && x[d] < b.hi[d])
}

/// a·1_A + b·1_B for disjoint boxes A, B.
fn pair(a: &AxisBox, va: f64, b: &AxisBox, vb: f64) -> Result<Func> {
    if a.dim() == 1 {
        let (first, second) = if a.lo[0] < b.lo[0] { ((a, va), (b, vb)) } else { ((b, vb), (a, va)) };
        if first.0.hi[0] == second.0.lo[0] {
            return Ok(Func::Step(StepFunction1D::new(
                vec![first.0.lo[0], first.0.hi[0], second.0.hi[0]],
                vec![first.1, second.1],
            )?));
        }
        return Ok(Func::Step(
            StepFunction1D::indicator(a.lo[0], a.hi[0], va).add(&StepFunction1D::indicator(b.lo[0], b.hi[0], vb)),
        ));
    }
    Ok(Func::BoxSum(BoxSumFunctionND::new(a.dim(), vec![(a.clone(), va), (b.clone(), vb)])?))
}
