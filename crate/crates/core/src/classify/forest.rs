use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{argmax_first, DecisionTree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `floor(sqrt(p))`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            mtry: None,
            min_leaf: 1,
            max_depth: 30,
        }
    }
}

impl ForestParams {
    pub fn mtry_for(&self, p: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| (p as f64).sqrt().floor() as usize)
            .clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
    /// Mean over trees of the Gini decrease credited to each feature,
    /// normalized by the bootstrap sample size.
    pub importance: Vec<f64>,
}

fn grow_one(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &ForestParams, seed: u64, tree: usize) -> (DecisionTree, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    let n = x.len();
    let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let tp = TreeParams {
        min_leaf: params.min_leaf,
        max_depth: params.max_depth,
        mtry: Some(params.mtry_for(x.first().map_or(0, Vec::len))),
    };
    let (t, mut imp) = DecisionTree::grow(x, y, n_classes, &rows, tp, Some(&mut rng));
    for v in &mut imp {
        *v /= n as f64;
    }
    (t, imp)
}

impl RandomForest {
    /// Bagged trees on bootstrap samples of all `n` rows. Tree `b` draws
    /// from stream `b` of a ChaCha generator keyed by `seed`, so the result
    /// does not depend on how trees are scheduled across threads.
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &ForestParams, seed: u64) -> Self {
        let grown: Vec<(DecisionTree, Vec<f64>)> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..params.n_trees)
                    .into_par_iter()
                    .map(|b| grow_one(x, y, n_classes, params, seed, b))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..params.n_trees)
                    .map(|b| grow_one(x, y, n_classes, params, seed, b))
                    .collect()
            }
        };
        let p = x.first().map_or(0, Vec::len);
        let mut importance = vec![0.0; p];
        let mut trees = Vec::with_capacity(grown.len());
        for (t, imp) in grown {
            for (acc, v) in importance.iter_mut().zip(imp) {
                *acc += v;
            }
            trees.push(t);
        }
        let b = trees.len().max(1) as f64;
        for v in &mut importance {
            *v /= b;
        }
        Self {
            trees,
            n_classes,
            importance,
        }
    }

    pub fn votes(&self, row: &[f64]) -> Vec<usize> {
        let mut votes = vec![0; self.n_classes];
        for t in &self.trees {
            votes[t.predict(row)] += 1;
        }
        votes
    }

    /// Majority vote; ties go to the earliest class.
    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_first(&self.votes(row))
    }

    pub fn vote_shares(&self, row: &[f64]) -> Vec<f64> {
        let b = self.trees.len() as f64;
        self.votes(row).into_iter().map(|v| v as f64 / b).collect()
    }
}
