//! Engine-facing regressor abstraction: a tree, a forest, or a polynomial,
//! all fitted on (state, realized payoff) rows and queried pointwise.

use thiserror::Error;

use crate::forest::{fit_forest, ForestFitConfig, RandomForest};
use crate::poly::{fit_polynomial, monomial_count, PolynomialModel};
use crate::tree::{fit_tree, RegressionTree, TreeFitConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressorError {
    #[error("need at least {needed} samples, got {available}")]
    InsufficientSamples { needed: usize, available: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Which regressor family to fit at each exercise date.
#[derive(Debug, Clone, PartialEq)]
pub enum RegressorSpec {
    Tree(TreeFitConfig),
    Forest(ForestFitConfig),
    Polynomial { degree: usize },
}

impl RegressorSpec {
    /// Copy of the spec with all internal seeds replaced by `seed`.
    pub fn reseeded(&self, seed: u64) -> RegressorSpec {
        match self {
            RegressorSpec::Tree(cfg) => RegressorSpec::Tree(cfg.clone().with_seed(seed)),
            RegressorSpec::Forest(cfg) => RegressorSpec::Forest(cfg.clone().with_seed(seed)),
            RegressorSpec::Polynomial { degree } => RegressorSpec::Polynomial { degree: *degree },
        }
    }

    /// Smallest training set this spec can be fitted on.
    pub fn min_training_rows(&self, dimension: usize) -> usize {
        match self {
            RegressorSpec::Tree(_) | RegressorSpec::Forest(_) => 1,
            RegressorSpec::Polynomial { degree } => monomial_count(dimension, *degree),
        }
    }

    /// Short human-readable description, used in result rows.
    pub fn describe(&self) -> String {
        match self {
            RegressorSpec::Tree(cfg) => format!(
                "tree(depth={} min_leaf={} strategy={} q={})",
                cfg.max_depth,
                cfg.min_samples_leaf,
                match cfg.split_strategy {
                    crate::tree::SplitStrategy::RandomDirection => "random",
                    crate::tree::SplitStrategy::BestDirection => "best",
                },
                cfg.midpoint_prob
            ),
            RegressorSpec::Forest(cfg) => format!(
                "forest(trees={} max_samples={} depth={} min_leaf={} bootstrap={})",
                cfg.num_trees,
                cfg.max_samples,
                cfg.tree_config.max_depth,
                cfg.tree_config.min_samples_leaf,
                cfg.bootstrap
            ),
            RegressorSpec::Polynomial { degree } => format!("poly(degree={degree})"),
        }
    }

    /// Fits this spec on `y.len()` rows of `dimension` columns.
    pub fn fit(
        &self,
        x: &[f64],
        y: &[f64],
        dimension: usize,
    ) -> Result<FittedRegressor, RegressorError> {
        if y.is_empty() {
            return Err(RegressorError::InsufficientSamples {
                needed: self.min_training_rows(dimension),
                available: 0,
            });
        }
        Ok(match self {
            RegressorSpec::Tree(cfg) => FittedRegressor::Tree(fit_tree(x, y, dimension, cfg)),
            RegressorSpec::Forest(cfg) => FittedRegressor::Forest(fit_forest(x, y, dimension, cfg)),
            RegressorSpec::Polynomial { degree } => {
                FittedRegressor::Polynomial(fit_polynomial(x, y, dimension, *degree)?)
            }
        })
    }
}

/// A fitted continuation-value model for one exercise date.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedRegressor {
    Tree(RegressionTree),
    Forest(RandomForest),
    Polynomial(PolynomialModel),
}

impl FittedRegressor {
    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            FittedRegressor::Tree(t) => t.predict(x),
            FittedRegressor::Forest(f) => f.predict(x),
            FittedRegressor::Polynomial(p) => p.predict(x),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            FittedRegressor::Tree(t) => t.dimension(),
            FittedRegressor::Forest(f) => f.dimension(),
            FittedRegressor::Polynomial(p) => p.dimension(),
        }
    }
}
