//! The training loop: seeded shuffling, batching, per-epoch evaluation on
//! the full triplet set, learning-rate reduction on plateaus, burn-in and
//! early stopping. The best-distortion table is kept in memory and
//! returned.

use super::{optim::rsgd_step, EmbeddingTable, TrainConfig, REL_IMPROVEMENT};
use crate::error::{Error, Result};
use crate::geometry::SpaceDescriptor;
use crate::graphs::TripletSet;
use crate::metrics::average_distortion;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Everything a run reports: the configuration echo, per-epoch curves and
/// final metrics. Serialized as JSON next to the checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: TrainConfig,
    pub space: SpaceDescriptor,
    pub free_params: usize,
    pub node_count: usize,
    pub triplet_count: usize,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_distortion: f64,
    pub final_loss: f64,
    pub loss_curve: Vec<f64>,
    pub distortion_curve: Vec<f64>,
    /// `(epoch, new_learning_rate)` plateau reductions.
    pub lr_reductions: Vec<(usize, f64)>,
    /// Optimizer steps whose update had to be projected back into the model.
    pub projection_warnings: usize,
    /// Node updates clipped to the maximum gradient norm.
    pub clip_events: usize,
    pub diverged: bool,
    pub wall_clock_secs: f64,
}

/// Train one configuration on one dataset.
///
/// Divergence (a non-finite loss or gradient) aborts the run and returns
/// the last good checkpoint with `diverged` set in the report.
pub fn train(
    triplets: &TripletSet,
    space: &SpaceDescriptor,
    config: &TrainConfig,
) -> Result<(EmbeddingTable, RunReport)> {
    config.validate()?;
    space.validate()?;
    if triplets.records.is_empty() {
        return Err(Error::Data("cannot train on an empty triplet set".into()));
    }

    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut table = EmbeddingTable::random_init(space, triplets.node_count, &mut rng);

    let mut report = RunReport {
        config: config.clone(),
        space: space.clone(),
        free_params: space.free_params(),
        node_count: triplets.node_count,
        triplet_count: triplets.records.len(),
        epochs_run: 0,
        best_epoch: 0,
        best_distortion: f64::INFINITY,
        final_loss: f64::NAN,
        loss_curve: Vec::new(),
        distortion_curve: Vec::new(),
        lr_reductions: Vec::new(),
        projection_warnings: 0,
        clip_events: 0,
        diverged: false,
        wall_clock_secs: 0.0,
    };

    let mut best_table = table.clone();
    let mut current_lr = config.learning_rate;
    let mut plateau = 0usize;
    let mut stale = 0usize;
    let mut order: Vec<usize> = (0..triplets.records.len()).collect();
    let mut batch = Vec::with_capacity(config.batch_size);

    'epochs: for epoch in 1..=config.epochs {
        let effective_lr = if epoch <= config.burnin_epochs {
            current_lr / config.burnin_factor
        } else {
            current_lr
        };

        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| triplets.records[i]));
            match rsgd_step(&mut table, &batch, effective_lr, config) {
                Ok(stats) => {
                    epoch_loss += stats.loss;
                    report.projection_warnings += stats.projected_nodes;
                    report.clip_events += stats.clipped_nodes;
                }
                Err(Error::NonFiniteGradient { node }) => {
                    log::error!("non-finite gradient for node {node} at epoch {epoch}; aborting");
                    report.diverged = true;
                    report.epochs_run = epoch;
                    break 'epochs;
                }
                // Kernel-level numerical failures on degenerate states are
                // treated like divergence: keep the last good checkpoint.
                Err(
                    err @ (Error::NotSymmetric { .. }
                    | Error::NotHermitian { .. }
                    | Error::Singular { .. }
                    | Error::NoConvergence { .. }
                    | Error::SimultaneousDiagonalization { .. }
                    | Error::InvariantViolation { .. }),
                ) => {
                    log::error!("numerical failure at epoch {epoch}: {err}; aborting");
                    report.diverged = true;
                    report.epochs_run = epoch;
                    break 'epochs;
                }
                Err(other) => return Err(other),
            }
        }

        let distortion = average_distortion(&table, triplets)?;
        table.epoch = epoch;
        report.epochs_run = epoch;
        report.final_loss = epoch_loss;
        report.loss_curve.push(epoch_loss);
        report.distortion_curve.push(distortion);

        if !epoch_loss.is_finite() || !distortion.is_finite() {
            log::error!("non-finite loss at epoch {epoch}; aborting with the last checkpoint");
            report.diverged = true;
            break;
        }

        if distortion < report.best_distortion * (1.0 - REL_IMPROVEMENT) {
            report.best_distortion = distortion;
            report.best_epoch = epoch;
            best_table = table.clone();
            plateau = 0;
            stale = 0;
        } else {
            report.best_distortion = report.best_distortion.min(distortion);
            if distortion <= report.best_distortion {
                best_table = table.clone();
                report.best_epoch = epoch;
            }
            plateau += 1;
            stale += 1;
        }

        if plateau >= config.lr_patience {
            current_lr /= config.lr_reduce_factor;
            report.lr_reductions.push((epoch, current_lr));
            log::info!("epoch {epoch}: reducing learning rate to {current_lr:.6}");
            plateau = 0;
        }
        if stale >= config.early_stop_patience {
            log::info!("epoch {epoch}: early stopping after {stale} stale epochs");
            break;
        }
    }

    report.wall_clock_secs = started.elapsed().as_secs_f64();
    if report.best_distortion.is_infinite() {
        // Divergence before the first full epoch evaluation.
        report.best_distortion = f64::NAN;
    }
    Ok((best_table, report))
}
