//! CART classification trees grown on Gini impurity.
//!
//! Split thresholds are training values: a row goes left when its feature is
//! `<=` the threshold. Because thresholds never interpolate between values,
//! the fitted partition is unchanged by any strictly increasing transform of
//! a feature column applied to both training and test data.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Smallest number of training rows allowed in a leaf.
    pub min_leaf: usize,
    pub max_depth: usize,
    /// Features examined per split; `None` examines all of them.
    pub mtry: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            min_leaf: 5,
            max_depth: 30,
            mtry: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        counts: Vec<usize>,
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        counts: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub n_classes: usize,
}

/// Node impurity scaled by node size: `n·(1 − Σ p²) = n − Σ c²/n`.
fn weighted_gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sq / n as f64
}

/// Majority class; ties go to the lowest class index.
pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

struct Grower<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    params: TreeParams,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
    importance: Vec<f64>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    /// Rows in the left child (the first `n_left` entries after sorting).
    order: Vec<usize>,
    n_left: usize,
    decrease: f64,
}

impl<R: Rng> Grower<'_, R> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &r in rows {
            c[self.y[r]] += 1;
        }
        c
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let p = self.x.first().map_or(0, Vec::len);
        match (self.params.mtry, self.rng.as_deref_mut()) {
            (Some(k), Some(rng)) if k < p => sample(rng, p, k).into_vec(),
            _ => (0..p).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize], parent: &[usize]) -> Option<BestSplit> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf.max(1);
        let parent_impurity = weighted_gini(parent, n);
        let mut best: Option<BestSplit> = None;
        for f in self.candidate_features() {
            let mut order = rows.to_vec();
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            // Running class counts and sums of squared counts on each side.
            let mut left = vec![0usize; self.n_classes];
            let mut right = parent.to_vec();
            let mut sq_left = 0usize;
            let mut sq_right: usize = parent.iter().map(|c| c * c).sum();
            let mut best_here: Option<(usize, f64)> = None;
            for i in 0..n - 1 {
                let c = self.y[order[i]];
                sq_left += 2 * left[c] + 1;
                sq_right -= 2 * right[c] - 1;
                left[c] += 1;
                right[c] -= 1;
                let n_left = i + 1;
                let v = self.x[order[i]][f];
                let v_next = self.x[order[i + 1]][f];
                if v_next <= v || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let n_right = n - n_left;
                let child = (n_left as f64 - sq_left as f64 / n_left as f64)
                    + (n_right as f64 - sq_right as f64 / n_right as f64);
                if best_here.is_none_or(|(_, c)| child < c) {
                    best_here = Some((n_left, child));
                }
            }
            if let Some((n_left, child)) = best_here {
                let decrease = parent_impurity - child;
                if decrease > 1e-12 * n as f64 && best.as_ref().is_none_or(|b| decrease > b.decrease) {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: self.x[order[n_left - 1]][f],
                        order,
                        n_left,
                        decrease,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: &[usize], depth: usize) -> usize {
        let counts = self.counts(rows);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: argmax_first(&counts),
            counts: counts.clone(),
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let Some(split) = self.best_split(rows, &counts) else {
            return id;
        };
        self.importance[split.feature] += split.decrease;
        let (l, r) = split.order.split_at(split.n_left);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            counts,
        };
        id
    }
}

impl DecisionTree {
    /// Grows a tree on `rows` of `(x, y)` (rows may repeat, as in a
    /// bootstrap sample). Returns the tree and the total impurity decrease
    /// credited to each feature.
    pub fn grow<R: Rng>(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        rows: &[usize],
        params: TreeParams,
        rng: Option<&mut R>,
    ) -> (Self, Vec<f64>) {
        let n_features = x.first().map_or(0, Vec::len);
        let mut g = Grower {
            x,
            y,
            n_classes,
            params,
            rng,
            nodes: Vec::new(),
            importance: vec![0.0; n_features],
        };
        g.grow(rows, 0);
        (
            Self {
                nodes: g.nodes,
                n_features,
                n_classes,
            },
            g.importance,
        )
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}
