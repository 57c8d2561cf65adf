//! Multi-objective black-box optimisation toolkit.
//!
//! The crate provides two mono-surrogate Bayesian optimisation loops over
//! scalarised objectives — a classifier-based loop (gradient-boosted trees or
//! a small MLP trained to separate the best γ-fraction of observations, with
//! the class posterior maximised as the acquisition function) and a classic
//! Gaussian-process loop with expected improvement — together with the pieces
//! needed to study them:
//!
//! - [`pareto`]: dominance, non-dominated sorting into shells, and exact /
//!   Monte-Carlo hypervolume.
//! - [`scalarise`]: archive normalisation, simplex weight sets, and the
//!   augmented Tchebycheff, hypervolume-improvement, dominance-rank, and
//!   Pareto-hypervolume-contribution scalarisers (all smaller-is-better).
//! - [`classify`]: from-scratch gradient-boosted trees and MLP probabilistic
//!   classifiers trained under log loss.
//! - [`gp`]: zero-mean Gaussian process with ARD Matérn-5/2 kernel, MLE
//!   hyperparameter fitting, and PI/EI closed forms.
//! - [`acquire`]: γ-quantile labelling, CMA-ES with restarts for acquisition
//!   maximisation, and the optimisation loops themselves.
//! - [`problems`]: DTLZ1–7 and WFG1–9 benchmarks on the unit cube, maximin
//!   Latin hypercube designs, and tabulated ideal/reference points.
//! - [`indicators`]: normalised hypervolume and IGD+ run-quality indicators.
//! - [`harness`]: batch experiment driver, JSONL record persistence,
//!   Wilcoxon/Holm statistics, and summary tables.
//!
//! Everything is deterministic given a seed: runs with identical configs and
//! seeds produce bit-identical traces (wall-clock timings aside).

pub mod acquire;
pub mod classify;
mod error;
pub mod gp;
pub mod harness;
pub mod indicators;
pub mod pareto;
pub mod problems;
pub mod scalarise;

pub use error::{Error, Result};
