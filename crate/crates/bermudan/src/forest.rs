//! Random forests: regression trees fitted on resampled rows, aggregated by
//! an unweighted mean.
//!
//! Each member sees ceil(max_samples * M) rows, drawn with replacement when
//! `bootstrap` is set and without otherwise. Member randomness (subsample
//! and tree seeds) derives from (forest seed, member index), so members can
//! be fitted in parallel with a schedule-independent result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::rng::derive_seed;
use crate::stats::pairwise_sum;
use crate::tree::{fit_tree, RegressionTree, TreeFitConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestFitConfig {
    pub num_trees: usize,
    pub tree_config: TreeFitConfig,
    /// Sample rows with replacement (bagging) when true.
    pub bootstrap: bool,
    /// Fraction of training rows given to each member, in (0, 1].
    pub max_samples: f64,
    pub seed: u64,
}

impl ForestFitConfig {
    pub fn new(num_trees: usize, tree_config: TreeFitConfig) -> Self {
        Self {
            num_trees,
            tree_config,
            bootstrap: true,
            max_samples: 1.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn assert_valid(&self) {
        assert!(self.num_trees >= 1, "num_trees must be >= 1");
        assert!(
            self.max_samples > 0.0 && self.max_samples <= 1.0,
            "max_samples must be in (0, 1]"
        );
    }
}

/// Seed of member `k`'s tree fit; a forest of one tree with `bootstrap`
/// off and `max_samples` 1 is identical to `fit_tree` under this seed.
pub fn member_tree_seed(forest_seed: u64, k: usize) -> u64 {
    derive_seed(forest_seed, 2 * k as u64 + 1)
}

fn member_sample_seed(forest_seed: u64, k: usize) -> u64 {
    derive_seed(forest_seed, 2 * k as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
    config: ForestFitConfig,
}

impl RandomForest {
    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn config(&self) -> &ForestFitConfig {
        &self.config
    }

    pub fn dimension(&self) -> usize {
        self.trees[0].dimension()
    }

    /// Arithmetic mean of the member predictions.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let values: Vec<f64> = self.trees.iter().map(|t| t.predict(x)).collect();
        pairwise_sum(&values) / values.len() as f64
    }
}

/// Row indices for member `k`: with replacement under bootstrap, a random
/// subset otherwise. Sorted so downstream summation order is canonical.
fn subsample_rows(rows: usize, take: usize, bootstrap: bool, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<u32> = if bootstrap {
        (0..take)
            .map(|_| rng.random_range(0..rows) as u32)
            .collect()
    } else {
        // partial Fisher-Yates, first `take` entries
        let mut pool: Vec<u32> = (0..rows as u32).collect();
        for i in 0..take {
            let j = rng.random_range(i..rows);
            pool.swap(i, j);
        }
        pool.truncate(take);
        pool
    };
    picked.sort_unstable();
    picked
}

/// Fits `num_trees` members on independent subsamples.
pub fn fit_forest(
    x: &[f64],
    y: &[f64],
    dimension: usize,
    config: &ForestFitConfig,
) -> RandomForest {
    config.assert_valid();
    assert_eq!(x.len(), y.len() * dimension, "x/y size mismatch");
    let rows = y.len();
    let take = (config.max_samples * rows as f64).ceil() as usize;
    let take = take.clamp(1, rows.max(1));

    let trees: Vec<RegressionTree> = (0..config.num_trees)
        .into_par_iter()
        .map(|k| {
            let rows_k = subsample_rows(
                rows,
                take,
                config.bootstrap,
                member_sample_seed(config.seed, k),
            );
            let mut xk = Vec::with_capacity(take * dimension);
            let mut yk = Vec::with_capacity(take);
            for &r in &rows_k {
                let r = r as usize;
                xk.extend_from_slice(&x[r * dimension..(r + 1) * dimension]);
                yk.push(y[r]);
            }
            let tree_cfg = config
                .tree_config
                .clone()
                .with_seed(member_tree_seed(config.seed, k));
            fit_tree(&xk, &yk, dimension, &tree_cfg)
        })
        .collect();

    RandomForest {
        trees,
        config: config.clone(),
    }
}
