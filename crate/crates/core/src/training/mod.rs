//! Distortion-loss embedding training with stochastic Riemannian gradient
//! descent: retraction steps, burn-in, learning-rate reduction on plateaus,
//! gradient clipping, projection back into the model, early stopping.

pub mod checkpoint;
mod loss;
mod optim;
mod trainer;

pub use loss::{distortion_loss, pair_loss_terms};
pub use optim::{rsgd_step, StepStats};
pub use trainer::{train, RunReport};

use crate::error::{Error, Result};
use crate::geometry::{random_point, ManifoldPoint, SpaceDescriptor};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Relative improvement of the monitored distortion required to reset the
/// patience counters.
pub const REL_IMPROVEMENT: f64 = 1e-4;

/// One embedding point per graph node.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub space: SpaceDescriptor,
    pub points: Vec<ManifoldPoint>,
    pub epoch: usize,
}

impl EmbeddingTable {
    /// Initialize every node near the basepoint, drawing from `rng` in
    /// node order.
    pub fn random_init(space: &SpaceDescriptor, node_count: usize, rng: &mut impl Rng) -> Self {
        let points = (0..node_count).map(|_| random_point(space, rng)).collect();
        Self { space: space.clone(), points, epoch: 0 }
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, node: u32) -> Result<&ManifoldPoint> {
        self.points
            .get(node as usize)
            .ok_or_else(|| Error::Data(format!("no embedding for node {node}")))
    }

    /// Smallest invariant margin across all points.
    pub fn min_invariant_margin(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for p in &self.points {
            min = min.min(p.invariant_margin()?);
        }
        Ok(min)
    }
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_grad_norm: f64,
    pub epochs: usize,
    pub burnin_epochs: usize,
    pub burnin_factor: f64,
    pub lr_reduce_factor: f64,
    pub lr_patience: usize,
    pub early_stop_patience: usize,
    pub epsilon_projection: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            batch_size: 512,
            max_grad_norm: 300.0,
            epochs: 3000,
            burnin_epochs: 10,
            burnin_factor: 10.0,
            lr_reduce_factor: 5.0,
            lr_patience: 50,
            early_stop_patience: 150,
            epsilon_projection: crate::geometry::DEFAULT_PROJECTION_EPSILON,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("learning_rate", self.learning_rate),
            ("max_grad_norm", self.max_grad_norm),
            ("burnin_factor", self.burnin_factor),
            ("lr_reduce_factor", self.lr_reduce_factor),
            ("epsilon_projection", self.epsilon_projection),
        ];
        for (name, value) in positives {
            if !(value > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::InvalidArgument("batch_size and epochs must be positive".into()));
        }
        if self.burnin_epochs > self.epochs {
            return Err(Error::InvalidArgument(
                "burnin_epochs cannot exceed the epoch budget".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_init_is_deterministic_and_valid() {
        let space: SpaceDescriptor = "siegel:3".parse().unwrap();
        let mut rng1 = ChaCha8Rng::seed_from_u64(4);
        let mut rng2 = ChaCha8Rng::seed_from_u64(4);
        let t1 = EmbeddingTable::random_init(&space, 10, &mut rng1);
        let t2 = EmbeddingTable::random_init(&space, 10, &mut rng2);
        for (a, b) in t1.points.iter().zip(&t2.points) {
            assert_eq!(a, b);
        }
        assert!(t1.min_invariant_margin().unwrap() > 0.9);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
        assert!(bad.validate().is_err());
        let base = TrainConfig::default();
        let bad = TrainConfig { burnin_epochs: base.epochs + 1, ..base };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn missing_embedding_is_a_data_error() {
        let space: SpaceDescriptor = "euclidean:2".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let table = EmbeddingTable::random_init(&space, 3, &mut rng);
        assert!(table.point(2).is_ok());
        assert!(table.point(3).is_err());
    }
}
