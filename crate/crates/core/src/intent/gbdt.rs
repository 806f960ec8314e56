use serde::{Deserialize, Serialize};

use super::dataset::{sparse_value, TrainingMatrix};
use crate::{Error, Result};

const PRIOR_CLAMP: f64 = 1e-6;
const GAIN_EPSILON: f64 = 1e-12;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtParams {
    pub rounds: usize,
    pub depth: usize,
    pub lr: f64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        Self {
            rounds: 100,
            depth: 3,
            lr: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(f64),
}

/// Regression tree; rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    fn leaf_index(&self, value: impl Fn(usize) -> f64) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf(_) => return i,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if value(feature) <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    fn zero_leaves(&mut self) {
        for node in &mut self.nodes {
            if let TreeNode::Leaf(v) = node {
                *v = 0.0;
            }
        }
    }

    pub fn predict(&self, row: &[(usize, f64)]) -> f64 {
        match self.nodes[self.leaf_index(|f| sparse_value(row, f))] {
            TreeNode::Leaf(v) => v,
            TreeNode::Split { .. } => unreachable!(),
        }
    }
}

/// One-vs-rest logistic gradient boosting over regression trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gbdt {
    width: usize,
    params: GbdtParams,
    init: Vec<f64>,
    /// `trees[class][round]`
    trees: Vec<Vec<RegressionTree>>,
    loss_history: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Logistic loss of margin `z` for target `y` ∈ {0, 1}, computed stably.
fn log_loss(y: f64, z: f64) -> f64 {
    let softplus = |x: f64| {
        if x > 0.0 {
            x + (-x).exp().ln_1p()
        } else {
            x.exp().ln_1p()
        }
    };
    if y > 0.5 {
        softplus(-z)
    } else {
        softplus(z)
    }
}

/// Column-major nonzeros sorted by value, shared by every tree.
struct Presorted {
    columns: Vec<Vec<(f64, u32)>>,
    /// Index of the first positive entry in each column.
    first_positive: Vec<usize>,
}

impl Presorted {
    fn new(data: &TrainingMatrix) -> Self {
        let mut columns: Vec<Vec<(f64, u32)>> = vec![Vec::new(); data.width];
        for (r, row) in data.rows.iter().enumerate() {
            for &(c, v) in row {
                if v != 0.0 {
                    columns[c].push((v, r as u32));
                }
            }
        }
        for col in &mut columns {
            col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let first_positive = columns
            .iter()
            .map(|c| c.partition_point(|(v, _)| *v < 0.0))
            .collect();
        Self {
            columns,
            first_positive,
        }
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Per-node accumulators for one column: negatives are scanned upwards from
/// the smallest value, positives downwards from the largest.
#[derive(Clone, Copy, Default)]
struct Scan {
    neg_sum: f64,
    neg_count: usize,
    last_neg: f64,
    pos_sum: f64,
    pos_count: usize,
    last_pos: f64,
}

struct NodeStats {
    sum: f64,
    count: usize,
}

impl NodeStats {
    /// Variance reduction of splitting off `left_count` rows summing to `left_sum`.
    fn gain(&self, left_sum: f64, left_count: usize) -> f64 {
        let (rs, rc) = (self.sum - left_sum, (self.count - left_count) as f64);
        left_sum * left_sum / left_count as f64 + rs * rs / rc
            - self.sum * self.sum / self.count as f64
    }
}

fn consider(best: &mut Option<Candidate>, candidate: Candidate) {
    let better = match best {
        None => true,
        Some(b) => candidate.gain > b.gain + GAIN_EPSILON,
    };
    if better {
        *best = Some(candidate);
    }
}

impl Gbdt {
    pub fn fit(data: &TrainingMatrix, params: GbdtParams) -> Result<Self> {
        let GbdtParams { rounds, lr, depth } = params;
        if rounds == 0 || !(lr > 0.0 && lr <= 1.0) {
            return Err(Error::Config(format!(
                "invalid gbdt parameters rounds={rounds} depth={depth} lr={lr}"
            )));
        }
        data.validate()?;
        let n = data.len();
        let k = data.classes;
        let counts = data.class_counts();
        let init: Vec<f64> = counts
            .iter()
            .map(|&c| {
                let p = (c as f64 / n as f64).clamp(PRIOR_CLAMP, 1.0 - PRIOR_CLAMP);
                (p / (1.0 - p)).ln()
            })
            .collect();
        let targets: Vec<Vec<f64>> = (0..k)
            .map(|class| {
                data.labels
                    .iter()
                    .map(|&y| if y == class { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut margins: Vec<Vec<f64>> = init.iter().map(|&f| vec![f; n]).collect();
        let presorted = Presorted::new(data);
        let total_loss = |margins: &[Vec<f64>]| -> f64 {
            margins
                .iter()
                .zip(&targets)
                .map(|(m, t)| m.iter().zip(t).map(|(z, y)| log_loss(*y, *z)).sum::<f64>())
                .sum()
        };
        let mut loss_history = vec![total_loss(&margins)];
        let mut trees: Vec<Vec<RegressionTree>> = vec![Vec::with_capacity(rounds); k];
        for _ in 0..rounds {
            let before = margins.clone();
            let mut round: Vec<RegressionTree> = (0..k)
                .map(|class| {
                    grow_tree(
                        data,
                        &presorted,
                        &targets[class],
                        &mut margins[class],
                        depth,
                        lr,
                    )
                })
                .collect();
            let mut loss = total_loss(&margins);
            let previous = loss_history.last().copied().unwrap_or(f64::INFINITY);
            if loss > previous {
                // drop a round that raised the loss
                margins = before;
                round.iter_mut().for_each(RegressionTree::zero_leaves);
                loss = previous;
            }
            for (class, tree) in round.into_iter().enumerate() {
                trees[class].push(tree);
            }
            loss_history.push(loss);
        }
        Ok(Self {
            width: data.width,
            params,
            init,
            trees,
            loss_history,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.init.len()
    }

    pub fn params(&self) -> GbdtParams {
        self.params
    }

    /// Summed one-vs-rest training loss before boosting and after each round.
    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    pub fn margins(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.init
            .iter()
            .zip(&self.trees)
            .map(|(f0, trees)| f0 + trees.iter().map(|t| t.predict(row)).sum::<f64>())
            .collect()
    }

    /// Per-class probabilities `σ(F_k)` normalized to sum to one.
    pub fn predict_scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        let probs: Vec<f64> = self.margins(row).into_iter().map(sigmoid).collect();
        let sum: f64 = probs.iter().sum();
        if sum > 0.0 {
            probs.into_iter().map(|p| p / sum).collect()
        } else {
            vec![1.0 / self.classes() as f64; self.classes()]
        }
    }
}

/// Grows one tree level by level on the logistic residuals and applies its
/// damped Newton leaf values to `margins`.
fn grow_tree(
    data: &TrainingMatrix,
    presorted: &Presorted,
    target: &[f64],
    margins: &mut [f64],
    depth: usize,
    lr: f64,
) -> RegressionTree {
    let n = data.len();
    let residual: Vec<f64> = margins
        .iter()
        .zip(target)
        .map(|(z, y)| y - sigmoid(*z))
        .collect();
    let mut nodes = vec![TreeNode::Leaf(0.0)];
    let mut node_of = vec![0usize; n];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut slot_of = vec![usize::MAX; nodes.len()];
        for (s, &id) in frontier.iter().enumerate() {
            slot_of[id] = s;
        }
        let slot = |node: usize| Some(slot_of[node]).filter(|&s| s != usize::MAX);
        let mut stats: Vec<NodeStats> = frontier
            .iter()
            .map(|_| NodeStats { sum: 0.0, count: 0 })
            .collect();
        for (r, &node) in node_of.iter().enumerate() {
            if let Some(s) = slot(node) {
                stats[s].sum += residual[r];
                stats[s].count += 1;
            }
        }
        let mut best: Vec<Option<Candidate>> = vec![None; frontier.len()];
        let mut scans = vec![Scan::default(); frontier.len()];
        for (feature, column) in presorted.columns.iter().enumerate() {
            if column.is_empty() {
                continue;
            }
            scans.iter_mut().for_each(|s| *s = Scan::default());
            let split = presorted.first_positive[feature];
            for &(value, r) in &column[..split] {
                let Some(s) = slot(node_of[r as usize]) else {
                    continue;
                };
                let scan = &mut scans[s];
                if scan.neg_count > 0 && value > scan.last_neg {
                    let gain = stats[s].gain(scan.neg_sum, scan.neg_count);
                    let threshold = scan.last_neg + (value - scan.last_neg) / 2.0;
                    consider(
                        &mut best[s],
                        Candidate {
                            gain,
                            feature,
                            threshold,
                        },
                    );
                }
                scan.neg_sum += residual[r as usize];
                scan.neg_count += 1;
                scan.last_neg = value;
            }
            for &(value, r) in column[split..].iter().rev() {
                let Some(s) = slot(node_of[r as usize]) else {
                    continue;
                };
                let scan = &mut scans[s];
                if scan.pos_count > 0 && value < scan.last_pos {
                    let st = &stats[s];
                    let gain = st.gain(st.sum - scan.pos_sum, st.count - scan.pos_count);
                    let threshold = value + (scan.last_pos - value) / 2.0;
                    consider(
                        &mut best[s],
                        Candidate {
                            gain,
                            feature,
                            threshold,
                        },
                    );
                }
                scan.pos_sum += residual[r as usize];
                scan.pos_count += 1;
                scan.last_pos = value;
            }
            for (s, scan) in scans.iter().enumerate() {
                let st = &stats[s];
                let zero_count = st.count - scan.neg_count - scan.pos_count;
                let upper = if zero_count > 0 { 0.0 } else { scan.last_pos };
                if scan.neg_count > 0 && (zero_count > 0 || scan.pos_count > 0) {
                    let gain = st.gain(scan.neg_sum, scan.neg_count);
                    let threshold = scan.last_neg + (upper - scan.last_neg) / 2.0;
                    consider(
                        &mut best[s],
                        Candidate {
                            gain,
                            feature,
                            threshold,
                        },
                    );
                }
                if zero_count > 0 && scan.pos_count > 0 {
                    let gain = st.gain(st.sum - scan.pos_sum, st.count - scan.pos_count);
                    consider(
                        &mut best[s],
                        Candidate {
                            gain,
                            feature,
                            threshold: scan.last_pos / 2.0,
                        },
                    );
                }
            }
        }
        let mut next = Vec::new();
        let mut child_of: Vec<Option<(usize, usize, usize, f64)>> = vec![None; frontier.len()];
        for (s, &id) in frontier.iter().enumerate() {
            if let Some(c) = best[s] {
                let left = nodes.len();
                nodes.push(TreeNode::Leaf(0.0));
                nodes.push(TreeNode::Leaf(0.0));
                nodes[id] = TreeNode::Split {
                    feature: c.feature,
                    threshold: c.threshold,
                    left,
                    right: left + 1,
                };
                child_of[s] = Some((left, left + 1, c.feature, c.threshold));
                next.push(left);
                next.push(left + 1);
            }
        }
        for (r, node) in node_of.iter_mut().enumerate() {
            if let Some(s) = slot(*node) {
                if let Some((left, right, feature, threshold)) = child_of[s] {
                    *node = if sparse_value(&data.rows[r], feature) <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (r, &node) in node_of.iter().enumerate() {
        members[node].push(r);
    }
    for (id, rows) in members.iter().enumerate() {
        if !matches!(nodes[id], TreeNode::Leaf(_)) || rows.is_empty() {
            continue;
        }
        let (mut g, mut h) = (0.0, 0.0);
        for &r in rows {
            let p = sigmoid(margins[r]);
            g += residual[r];
            h += p * (1.0 - p);
        }
        let mut gamma = if h > 1e-12 { lr * g / h } else { 0.0 };
        let leaf_loss = |shift: f64| -> f64 {
            rows.iter()
                .map(|&r| log_loss(target[r], margins[r] + shift))
                .sum()
        };
        let base = leaf_loss(0.0);
        let mut halvings = 0;
        while gamma != 0.0 && leaf_loss(gamma) > base {
            gamma /= 2.0;
            halvings += 1;
            if halvings >= MAX_HALVINGS {
                gamma = 0.0;
            }
        }
        nodes[id] = TreeNode::Leaf(gamma);
        for &r in rows {
            margins[r] += gamma;
        }
    }
    RegressionTree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> TrainingMatrix {
        TrainingMatrix::from_dense(
            &[
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
            vec![0, 1, 1, 0],
            2,
        )
        .unwrap()
    }

    fn argmax(s: &[f64]) -> usize {
        let mut best = 0;
        for (i, v) in s.iter().enumerate() {
            if *v > s[best] {
                best = i;
            }
        }
        best
    }

    #[test]
    fn depth_zero_predicts_priors() {
        let data = TrainingMatrix::from_dense(
            &[vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![0, 1, 1, 1],
            2,
        )
        .unwrap();
        let model = Gbdt::fit(
            &data,
            GbdtParams {
                rounds: 1,
                depth: 0,
                lr: 0.1,
            },
        )
        .unwrap();
        for x in [0.0, 1.0, 10.0] {
            let s = model.predict_scores(&[(0, x)]);
            assert!((s[0] - 0.25).abs() < 1e-9, "{s:?}");
            assert!((s[1] - 0.75).abs() < 1e-9);
        }
    }

    #[test]
    fn learns_xor() {
        let data = xor();
        let model = Gbdt::fit(
            &data,
            GbdtParams {
                rounds: 20,
                depth: 2,
                lr: 0.3,
            },
        )
        .unwrap();
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            assert_eq!(argmax(&model.predict_scores(row)), y);
        }
    }

    #[test]
    fn loss_never_increases() {
        let data = TrainingMatrix::from_dense(
            &[
                vec![0.1, -0.3, 0.0],
                vec![0.5, 0.2, 1.0],
                vec![-0.2, 0.0, 1.0],
                vec![0.9, 0.9, 0.0],
                vec![0.0, -0.7, 0.0],
                vec![0.3, 0.3, 1.0],
            ],
            vec![0, 1, 2, 1, 0, 2],
            3,
        )
        .unwrap();
        let model = Gbdt::fit(
            &data,
            GbdtParams {
                rounds: 100,
                depth: 3,
                lr: 0.5,
            },
        )
        .unwrap();
        let h = model.loss_history();
        assert_eq!(h.len(), 101);
        let bad: Vec<_> = h
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn deterministic() {
        let a = Gbdt::fit(&xor(), GbdtParams::default()).unwrap();
        let b = Gbdt::fit(&xor(), GbdtParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn splits_on_negative_values_and_zero_block() {
        // class depends only on the sign of the single feature
        let data = TrainingMatrix::from_dense(
            &[vec![-2.0], vec![-1.0], vec![0.0], vec![0.0], vec![1.0]],
            vec![0, 0, 1, 1, 1],
            2,
        )
        .unwrap();
        let model = Gbdt::fit(
            &data,
            GbdtParams {
                rounds: 30,
                depth: 1,
                lr: 0.5,
            },
        )
        .unwrap();
        assert_eq!(argmax(&model.predict_scores(&[(0, -1.5)])), 0);
        assert_eq!(argmax(&model.predict_scores(&[])), 1);
        match model.trees[0][0].nodes()[0] {
            TreeNode::Split { threshold, .. } => assert_eq!(threshold, -0.5),
            ref other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Gbdt::fit(
            &xor(),
            GbdtParams {
                rounds: 0,
                depth: 1,
                lr: 0.1
            }
        )
        .is_err());
        assert!(Gbdt::fit(
            &xor(),
            GbdtParams {
                rounds: 1,
                depth: 1,
                lr: 1.5
            }
        )
        .is_err());
    }
}
