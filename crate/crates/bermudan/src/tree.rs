//! Regression trees: axis-aligned binary splits with constant leaf values.
//!
//! A node is split by picking a direction (uniformly at random, or by
//! scanning all directions for the lowest MSE) and a threshold. The
//! threshold is either the exact MSE-optimal cut over all midpoints of
//! consecutive distinct sorted sample values, or, with probability
//! `midpoint_prob`, the midpoint of the node's sample range on that axis.
//! Either way the two child values are the arithmetic means of the
//! responses routed to each side.
//!
//! Growth stops at `max_depth`, when a node holds fewer than
//! `2 * min_samples_leaf` samples, when no admissible threshold exists, or
//! when the best split no longer strictly reduces the node MSE.
//!
//! Each node draws its randomness from a seed derived from its position in
//! the tree, so deepening a tree never perturbs the decisions made on the
//! shallower, shared part of the structure.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rng::derive_seed;

/// Direction-selection rule for node splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStrategy {
    /// Draw the split axis uniformly, then use the best threshold on it.
    RandomDirection,
    /// Scan every axis and keep the (axis, threshold) pair of lowest MSE.
    BestDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeFitConfig {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub split_strategy: SplitStrategy,
    /// Probability of cutting at the midpoint of the node's sample range
    /// instead of optimizing the threshold.
    pub midpoint_prob: f64,
    pub seed: u64,
}

impl TreeFitConfig {
    pub fn new(max_depth: usize, min_samples_leaf: usize) -> Self {
        Self {
            max_depth,
            min_samples_leaf,
            split_strategy: SplitStrategy::RandomDirection,
            midpoint_prob: 0.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn assert_valid(&self) {
        assert!(
            self.max_depth >= 1 && self.max_depth <= 1000,
            "max_depth out of range"
        );
        assert!(self.min_samples_leaf >= 1, "min_samples_leaf must be >= 1");
        assert!(
            (0.0..=1.0).contains(&self.midpoint_prob),
            "midpoint_prob must be in [0, 1]"
        );
    }
}

/// Node of a fitted tree. Left children receive samples with
/// x\[axis\] <= threshold, right children the rest.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        axis: usize,
        threshold: f64,
        count: usize,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        count: usize,
    },
}

/// Fitted regression tree over d-dimensional inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
    dimension: usize,
    depth: usize,
}

impl RegressionTree {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Deepest leaf level actually reached (root = 0).
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Node arena; index 0 is the root.
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Value of the unique leaf whose cell contains `x`.
    ///
    /// Panics if `x` does not match the training dimension.
    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_for(x)] {
            TreeNode::Leaf { value, .. } => value,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    /// Index of the leaf node reached by `x`.
    pub fn leaf_for(&self, x: &[f64]) -> usize {
        assert_eq!(x.len(), self.dimension, "query dimension mismatch");
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { .. } => return at,
                TreeNode::Split {
                    axis,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if x[axis] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Indented text rendering of the tree, one node per line:
    /// `split axis=.. threshold=.. count=..` / `leaf value=.. count=..`.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "tree dimension={} depth={} leaves={}\n",
            self.dimension,
            self.depth,
            self.num_leaves()
        );
        self.dump_node(0, 0, &mut out);
        out
    }

    fn dump_node(&self, at: usize, indent: usize, out: &mut String) {
        for _ in 0..indent {
            out.push_str("  ");
        }
        match &self.nodes[at] {
            TreeNode::Leaf { value, count } => {
                out.push_str(&format!("leaf value={value} count={count}\n"));
            }
            TreeNode::Split {
                axis,
                threshold,
                count,
                left,
                right,
            } => {
                out.push_str(&format!(
                    "split axis={axis} threshold={threshold} count={count}\n"
                ));
                self.dump_node(*left, indent + 1, out);
                self.dump_node(*right, indent + 1, out);
            }
        }
    }
}

/// MSE-optimal cut on a single axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSplit {
    /// Midpoint between two consecutive distinct sorted sample values.
    pub threshold: f64,
    /// Mean response on {x <= threshold}.
    pub left_mean: f64,
    /// Mean response on {x > threshold}.
    pub right_mean: f64,
    /// Mean squared error of the two-piece fit over all n samples.
    pub split_mse: f64,
}

/// Scans all admissible thresholds on one axis and returns the MSE-optimal
/// one, or `None` when no threshold leaves `min_samples_leaf` samples on
/// both sides (e.g. all xs equal). Ties are broken towards the smallest
/// threshold.
pub fn best_split_1d(xs: &[f64], ys: &[f64], min_samples_leaf: usize) -> Option<BestSplit> {
    assert_eq!(xs.len(), ys.len(), "xs and ys must have the same length");
    let n = xs.len();
    if min_samples_leaf == 0 || n < 2 * min_samples_leaf {
        return None;
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| xs[a as usize].total_cmp(&xs[b as usize]).then(a.cmp(&b)));
    let sorted_x: Vec<f64> = order.iter().map(|&i| xs[i as usize]).collect();
    let sorted_y: Vec<f64> = order.iter().map(|&i| ys[i as usize]).collect();
    let (k, threshold, sse) = sweep_best_split(&sorted_x, &sorted_y, min_samples_leaf)?;
    let left_sum: f64 = sorted_y[..k].iter().sum();
    let right_sum: f64 = sorted_y[k..].iter().sum();
    Some(BestSplit {
        threshold,
        left_mean: left_sum / k as f64,
        right_mean: right_sum / (n - k) as f64,
        split_mse: sse / n as f64,
    })
}

/// Core sweep over sorted samples: returns (left count, threshold, total SSE)
/// of the optimal admissible cut.
fn sweep_best_split(
    sorted_x: &[f64],
    sorted_y: &[f64],
    min_leaf: usize,
) -> Option<(usize, f64, f64)> {
    let n = sorted_x.len();
    let total_sum: f64 = sorted_y.iter().sum();
    let total_sumsq: f64 = sorted_y.iter().map(|y| y * y).sum();

    let mut best: Option<(usize, f64, f64)> = None;
    let mut left_sum = 0.0;
    let mut left_sumsq = 0.0;
    for k in 1..n {
        let y = sorted_y[k - 1];
        left_sum += y;
        left_sumsq += y * y;
        if k < min_leaf || n - k < min_leaf || sorted_x[k - 1] == sorted_x[k] {
            continue;
        }
        let right_sum = total_sum - left_sum;
        let right_sumsq = total_sumsq - left_sumsq;
        let sse_left = (left_sumsq - left_sum * left_sum / k as f64).max(0.0);
        let sse_right = (right_sumsq - right_sum * right_sum / (n - k) as f64).max(0.0);
        let sse = sse_left + sse_right;
        if best.is_none_or(|(_, _, b)| sse < b) {
            best = Some((k, 0.5 * (sorted_x[k - 1] + sorted_x[k]), sse));
        }
    }
    best
}

/// SSE of the two-piece constant fit when cutting the sorted samples at
/// position k.
fn sse_at_position(sorted_y: &[f64], k: usize) -> f64 {
    let n = sorted_y.len();
    let left_sum: f64 = sorted_y[..k].iter().sum();
    let left_sumsq: f64 = sorted_y[..k].iter().map(|y| y * y).sum();
    let right_sum: f64 = sorted_y[k..].iter().sum();
    let right_sumsq: f64 = sorted_y[k..].iter().map(|y| y * y).sum();
    (left_sumsq - left_sum * left_sum / k as f64).max(0.0)
        + (right_sumsq - right_sum * right_sum / (n - k) as f64).max(0.0)
}

struct CandidateSplit {
    axis: usize,
    /// Left child size in the axis-sorted order.
    k: usize,
    threshold: f64,
    sse: f64,
}

struct Grower<'a> {
    x: &'a [f64],
    y: &'a [f64],
    d: usize,
    cfg: &'a TreeFitConfig,
    nodes: Vec<TreeNode>,
    scratch: Vec<(f64, u32)>,
    depth_seen: usize,
}

impl<'a> Grower<'a> {
    /// Sorts `scratch` by (value on `axis`, sample index) for the rows in
    /// `idx` and returns the best admissible cut on that axis.
    fn split_on_axis(
        &mut self,
        idx: &[u32],
        axis: usize,
        midpoint: bool,
    ) -> Option<CandidateSplit> {
        let min_leaf = self.cfg.min_samples_leaf;
        self.scratch.clear();
        self.scratch
            .extend(idx.iter().map(|&i| (self.x[i as usize * self.d + axis], i)));
        self.scratch
            .sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let n = idx.len();
        let sorted_x: Vec<f64> = self.scratch.iter().map(|&(v, _)| v).collect();
        let sorted_y: Vec<f64> = self
            .scratch
            .iter()
            .map(|&(_, i)| self.y[i as usize])
            .collect();

        if midpoint {
            let lo = sorted_x[0];
            let hi = sorted_x[n - 1];
            if lo == hi {
                return None;
            }
            let threshold = 0.5 * (lo + hi);
            let k = sorted_x.partition_point(|&v| v <= threshold);
            if k < min_leaf || n - k < min_leaf {
                return None;
            }
            Some(CandidateSplit {
                axis,
                k,
                threshold,
                sse: sse_at_position(&sorted_y, k),
            })
        } else {
            sweep_best_split(&sorted_x, &sorted_y, min_leaf).map(|(k, threshold, sse)| {
                CandidateSplit {
                    axis,
                    k,
                    threshold,
                    sse,
                }
            })
        }
    }

    fn grow(&mut self, idx: &mut [u32], depth: usize, node_seed: u64) -> usize {
        let n = idx.len();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for &i in idx.iter() {
            let y = self.y[i as usize];
            sum += y;
            sumsq += y * y;
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let mean = sum / n as f64;
        let node_sse = (sumsq - sum * sum / n as f64).max(0.0);

        let make_leaf = |grower: &mut Self| {
            grower.depth_seen = grower.depth_seen.max(depth);
            grower.nodes.push(TreeNode::Leaf {
                value: mean,
                count: n,
            });
            grower.nodes.len() - 1
        };

        if depth >= self.cfg.max_depth
            || n < 2 * self.cfg.min_samples_leaf
            || ymin == ymax
            || node_sse == 0.0
        {
            return make_leaf(self);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(node_seed);
        let candidate = match self.cfg.split_strategy {
            SplitStrategy::RandomDirection => {
                let axis = rng.random_range(0..self.d);
                let midpoint = rng.random::<f64>() < self.cfg.midpoint_prob;
                self.split_on_axis(idx, axis, midpoint)
            }
            SplitStrategy::BestDirection => {
                let midpoint = rng.random::<f64>() < self.cfg.midpoint_prob;
                let mut best: Option<CandidateSplit> = None;
                for axis in 0..self.d {
                    if let Some(c) = self.split_on_axis(idx, axis, midpoint) {
                        if best.as_ref().is_none_or(|b| c.sse < b.sse) {
                            best = Some(c);
                        }
                    }
                }
                best
            }
        };
        let left_seed = rng.next_u64();
        let right_seed = rng.next_u64();

        let Some(cand) = candidate else {
            return make_leaf(self);
        };
        // require a strict MSE improvement (relative 1e-12)
        if cand.sse >= node_sse * (1.0 - 1e-12) {
            return make_leaf(self);
        }

        // order idx along the winning axis; the cut position k then realizes
        // the chosen threshold exactly
        self.scratch.clear();
        self.scratch.extend(
            idx.iter()
                .map(|&i| (self.x[i as usize * self.d + cand.axis], i)),
        );
        self.scratch
            .sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (slot, &(_, i)) in idx.iter_mut().zip(self.scratch.iter()) {
            *slot = i;
        }

        let at = self.nodes.len();
        self.nodes.push(TreeNode::Split {
            axis: cand.axis,
            threshold: cand.threshold,
            count: n,
            left: usize::MAX,
            right: usize::MAX,
        });
        let (left_idx, right_idx) = idx.split_at_mut(cand.k);
        let left = self.grow(left_idx, depth + 1, left_seed);
        let right = self.grow(right_idx, depth + 1, right_seed);
        if let TreeNode::Split {
            left: l, right: r, ..
        } = &mut self.nodes[at]
        {
            *l = left;
            *r = right;
        }
        at
    }
}

/// Fits a regression tree on `x` (flat row-major, `y.len()` rows of
/// `dimension` columns). Deterministic given (x, y, config).
pub fn fit_tree(x: &[f64], y: &[f64], dimension: usize, config: &TreeFitConfig) -> RegressionTree {
    config.assert_valid();
    assert!(dimension >= 1, "dimension must be >= 1");
    assert!(!y.is_empty(), "training set must not be empty");
    assert_eq!(x.len(), y.len() * dimension, "x/y size mismatch");

    let mut idx: Vec<u32> = (0..y.len() as u32).collect();
    let mut grower = Grower {
        x,
        y,
        d: dimension,
        cfg: config,
        nodes: Vec::new(),
        scratch: Vec::with_capacity(y.len()),
        depth_seen: 0,
    };
    // node seeds derive from the position in the tree, starting at the root
    let root_seed = derive_seed(config.seed, 0x7265_6772_6573_7300);
    grower.grow(&mut idx, 0, root_seed);
    RegressionTree {
        nodes: grower.nodes,
        dimension,
        depth: grower.depth_seen,
    }
}

/// Mean of (y_i - predict(x_i))^2 over the given rows.
pub fn training_mse(tree: &RegressionTree, x: &[f64], y: &[f64]) -> f64 {
    let d = tree.dimension();
    assert_eq!(x.len(), y.len() * d, "x/y size mismatch");
    let sq: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, &yi)| {
            let e = yi - tree.predict(&x[i * d..(i + 1) * d]);
            e * e
        })
        .collect();
    crate::stats::pairwise_sum(&sq) / y.len() as f64
}
