//! Gradient-boosted decision trees for binary classification under log loss.
//!
//! Training uses second-order boosting: each round fits a regression tree to
//! the current gradient/hessian pairs with exact greedy split enumeration
//! (every midpoint between adjacent distinct feature values is a candidate),
//! and leaves take the Newton step −G/(H+λ). Split gains and leaf weights use
//! an L2 penalty λ = 1 on leaf weights. Ties between equally-gaining splits
//! resolve to the lowest feature index, then the lowest threshold, which
//! makes training deterministic and independent of row order whenever no two
//! rows share a value on a split feature.

use super::{log_loss, sigmoid, GbtConfig, LabelledDataset};
use serde::{Deserialize, Serialize};

/// L2 penalty on leaf weights, used in both gain and the Newton step.
const LAMBDA: f64 = 1.0;

/// Minimum gain for a split to beat staying a leaf.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Split {
        feature: usize,
        /// Rows go left iff `x[feature] < threshold`.
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// A fitted gradient-boosted-tree classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    base_score: f64,
    trees: Vec<Tree>,
    learning_rate: f64,
    n_features: usize,
    train_loss_trace: Vec<f64>,
}

impl GbtModel {
    /// Feature dimension the model was trained on.
    pub fn dim(&self) -> usize {
        self.n_features
    }

    /// Unclamped class-1 probability.
    pub(crate) fn predict_raw(&self, x: &[f64]) -> f64 {
        self.predict_raw_with_rounds(x, self.trees.len())
    }

    /// Unclamped probability using only the first `rounds` trees; `rounds = 0`
    /// returns the pre-boosting base rate.
    pub(crate) fn predict_raw_with_rounds(&self, x: &[f64], rounds: usize) -> f64 {
        let score: f64 = self.base_score
            + self
                .trees
                .iter()
                .take(rounds)
                .map(|t| self.learning_rate * t.predict(x))
                .sum::<f64>();
        sigmoid(score)
    }

    /// Clamped probability from a truncated ensemble of the first `rounds`
    /// trees, useful for inspecting how the fit evolves over boosting.
    pub fn predict_proba_with_rounds(&self, x: &[f64], rounds: usize) -> crate::Result<f64> {
        if x.len() != self.n_features {
            return Err(crate::Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        if rounds > self.trees.len() {
            return Err(crate::Error::InvalidArgument(format!(
                "model has {} trees, cannot predict with {rounds}",
                self.trees.len()
            )));
        }
        Ok(self
            .predict_raw_with_rounds(x, rounds)
            .clamp(super::PROB_CLAMP, 1.0 - super::PROB_CLAMP))
    }

    /// Number of boosting rounds actually trained.
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub(crate) fn train_loss_trace(&self) -> &[f64] {
        &self.train_loss_trace
    }
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// One row order per feature, each sorted ascending by that feature's value
/// (ties in ascending row order). Features are presorted once per fit; node
/// splits partition the orders stably, so no node ever sorts again.
type FeatureOrders = Vec<Vec<usize>>;

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    grad: &'a [f64],
    hess: &'a [f64],
    config: &'a GbtConfig,
    nodes: Vec<Node>,
    /// Scratch split mask indexed by row id.
    goes_left: Vec<bool>,
}

impl<'a> TreeBuilder<'a> {
    fn leaf_weight(&self, rows: &[usize]) -> f64 {
        let g: f64 = rows.iter().map(|&i| self.grad[i]).sum();
        let h: f64 = rows.iter().map(|&i| self.hess[i]).sum();
        -g / (h + LAMBDA)
    }

    fn best_split(&self, orders: &FeatureOrders) -> Option<SplitCandidate> {
        let rows = &orders[0];
        let total_g: f64 = rows.iter().map(|&i| self.grad[i]).sum();
        let total_h: f64 = rows.iter().map(|&i| self.hess[i]).sum();
        let parent_score = total_g * total_g / (total_h + LAMBDA);
        let mut best: Option<SplitCandidate> = None;
        for (feature, order) in orders.iter().enumerate() {
            let mut g_left = 0.0;
            let mut h_left = 0.0;
            for w in 0..order.len() - 1 {
                let row = order[w];
                g_left += self.grad[row];
                h_left += self.hess[row];
                let here = self.x[row][feature];
                let next = self.x[order[w + 1]][feature];
                if here == next {
                    continue;
                }
                let h_right = total_h - h_left;
                if h_left < self.config.min_child_weight || h_right < self.config.min_child_weight
                {
                    continue;
                }
                let g_right = total_g - g_left;
                let gain = 0.5
                    * (g_left * g_left / (h_left + LAMBDA) + g_right * g_right / (h_right + LAMBDA)
                        - parent_score);
                let threshold = 0.5 * (here + next);
                let better = match &best {
                    None => gain > MIN_GAIN,
                    Some(b) => gain > b.gain,
                };
                if better {
                    best = Some(SplitCandidate {
                        feature,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, orders: FeatureOrders, depth: usize) -> usize {
        let n = orders[0].len();
        let can_split = depth < self.config.max_depth && n >= 2;
        let split = if can_split { self.best_split(&orders) } else { None };
        match split {
            None => {
                self.nodes.push(Node::Leaf {
                    weight: self.leaf_weight(&orders[0]),
                });
                self.nodes.len() - 1
            }
            Some(s) => {
                for &i in &orders[0] {
                    self.goes_left[i] = self.x[i][s.feature] < s.threshold;
                }
                let mut left_orders = FeatureOrders::with_capacity(orders.len());
                let mut right_orders = FeatureOrders::with_capacity(orders.len());
                for order in &orders {
                    let mut left = Vec::with_capacity(n);
                    let mut right = Vec::with_capacity(n);
                    for &i in order {
                        if self.goes_left[i] {
                            left.push(i);
                        } else {
                            right.push(i);
                        }
                    }
                    left_orders.push(left);
                    right_orders.push(right);
                }
                let here = self.nodes.len();
                self.nodes.push(Node::Leaf { weight: 0.0 }); // placeholder
                let left = self.build(left_orders, depth + 1);
                let right = self.build(right_orders, depth + 1);
                self.nodes[here] = Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
                here
            }
        }
    }
}

/// Train a boosted ensemble. The caller guarantees both classes are present.
pub(super) fn fit_gbt(dataset: &LabelledDataset, config: &GbtConfig) -> GbtModel {
    let t = dataset.len();
    let z = dataset.z();
    let p1 = dataset.class1_fraction();
    let base_score = (p1 / (1.0 - p1)).ln();

    let mut scores = vec![base_score; t];
    let mut probs = vec![p1; t];
    let mut trace = Vec::with_capacity(config.n_rounds + 1);
    trace.push(log_loss(z, &probs).expect("base-rate probabilities lie in (0,1)"));

    // Feature values never change across rounds, so every tree can reuse one
    // presorted order per feature.
    let base_orders: FeatureOrders = (0..dataset.dim())
        .map(|feature| {
            let mut order: Vec<usize> = (0..t).collect();
            order.sort_by(|&a, &b| {
                dataset.x()[a][feature].total_cmp(&dataset.x()[b][feature])
            });
            order
        })
        .collect();

    let mut trees = Vec::with_capacity(config.n_rounds);
    let mut grad = vec![0.0; t];
    let mut hess = vec![0.0; t];
    for _ in 0..config.n_rounds {
        for i in 0..t {
            grad[i] = probs[i] - z[i] as f64;
            hess[i] = probs[i] * (1.0 - probs[i]);
        }
        let mut builder = TreeBuilder {
            x: dataset.x(),
            grad: &grad,
            hess: &hess,
            config,
            nodes: Vec::new(),
            goes_left: vec![false; t],
        };
        let root = builder.build(base_orders.clone(), 0);
        debug_assert_eq!(root, 0);
        let tree = Tree { nodes: builder.nodes };
        for i in 0..t {
            scores[i] += config.learning_rate * tree.predict(&dataset.x()[i]);
            // Keep training probabilities strictly inside (0,1) so the loss
            // trace stays finite even once the fit is effectively perfect.
            probs[i] = sigmoid(scores[i]).clamp(1e-15, 1.0 - 1e-15);
        }
        trees.push(tree);
        trace.push(log_loss(z, &probs).expect("probabilities clamped inside (0,1)"));
    }

    GbtModel {
        base_score,
        trees,
        learning_rate: config.learning_rate,
        n_features: dataset.dim(),
        train_loss_trace: trace,
    }
}
