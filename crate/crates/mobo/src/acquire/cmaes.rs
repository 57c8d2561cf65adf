//! Restarted covariance-matrix-adaptation evolution strategy for maximising
//! a black-box function over the unit cube under a hard evaluation budget.
//!
//! The core is the standard (μ/μ_w, λ) strategy: rank-weighted recombination
//! of the best half of each population, cumulative step-size control against
//! the expected length of an isotropic Gaussian path, and rank-one plus
//! rank-μ covariance updates with lazily refreshed eigendecompositions.
//! Restarts alternate between enlarged populations (doubling schedule) and
//! small populations with randomly shrunk initial steps, so both global
//! structure and local basins get probed. The evaluation counter is global
//! and hard: the engine never calls the objective more than `budget` times.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

const INITIAL_STEP: f64 = 0.25;
const BOX_RESAMPLES: usize = 10;
const STEP_FLOOR: f64 = 1e-12;
const CONDITION_CAP: f64 = 1e7;

/// Maximise `objective` over `[0,1]^d` with at most `budget` calls spread
/// over `n_restarts` runs. Returns the best point evaluated. Deterministic
/// given the seed.
pub(crate) fn maximise_in_unit_cube(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    d: usize,
    budget: usize,
    n_restarts: usize,
    seed: u64,
) -> Vec<f64> {
    assert!(d >= 1, "dimension must be positive");
    assert!(n_restarts >= 1, "need at least one restart");
    assert!(budget >= n_restarts, "budget must cover every restart");

    let mut rng = StdRng::seed_from_u64(seed);
    let lambda_base = 4 + (3.0 * (d as f64).ln()).floor() as usize;
    let mut best_x: Option<Vec<f64>> = None;
    let mut best_value = f64::NEG_INFINITY;
    let mut used = 0usize;

    for restart in 0..n_restarts {
        let remaining = budget - used;
        if remaining == 0 {
            break;
        }
        let slice = (remaining / (n_restarts - restart)).max(1);

        // Alternating restart regimes: odd restarts double the population
        // (global search), even restarts ≥ 2 shrink the initial step
        // (local search); the first restart is the plain baseline.
        let mut lambda = if restart % 2 == 1 {
            lambda_base * (1usize << restart.div_ceil(2).min(8))
        } else {
            lambda_base
        };
        let mut sigma = if restart >= 2 && restart % 2 == 0 {
            INITIAL_STEP * 10f64.powf(-2.0 * rng.gen_range(0.0..1.0))
        } else {
            INITIAL_STEP
        };
        lambda = lambda.min(slice).max(2);

        let mut state = CmaState::new(d, lambda);
        let mut mean: DVector<f64> =
            DVector::from_iterator(d, (0..d).map(|_| rng.gen_range(0.0..1.0)));
        let mut taken_here = 0usize;

        'generations: loop {
            if taken_here >= slice || used >= budget {
                break;
            }
            state.refresh_eigen_if_stale();
            if state.condition() > CONDITION_CAP || sigma < STEP_FLOOR {
                break;
            }

            let mut population: Vec<(f64, DVector<f64>, DVector<f64>)> =
                Vec::with_capacity(lambda);
            for _ in 0..lambda {
                if used >= budget || taken_here >= slice {
                    break 'generations;
                }
                let (x, z) = state.sample_in_box(&mean, sigma, &mut rng);
                let value = objective(x.as_slice());
                used += 1;
                taken_here += 1;
                if value > best_value {
                    best_value = value;
                    best_x = Some(x.as_slice().to_vec());
                }
                // Internally minimise the negated objective.
                population.push((-value, x, z));
            }
            population.sort_by(|a, b| a.0.total_cmp(&b.0));
            mean = state.update(&population, mean, &mut sigma);
        }
    }

    best_x.expect("budget ≥ restarts guarantees at least one evaluation")
}

struct CmaState {
    d: usize,
    mu: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
    covariance: DMatrix<f64>,
    eigen_basis: DMatrix<f64>,
    eigen_scale: DVector<f64>,
    path_sigma: DVector<f64>,
    path_c: DVector<f64>,
    generation: usize,
    last_eigen_generation: usize,
    eigen_stale: bool,
}

impl CmaState {
    fn new(d: usize, lambda: usize) -> CmaState {
        let n = d as f64;
        let mu = (lambda / 2).max(1);
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((mu as f64) + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
        let c_mu = (1.0 - c_1)
            .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
        CmaState {
            d,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
            covariance: DMatrix::identity(d, d),
            eigen_basis: DMatrix::identity(d, d),
            eigen_scale: DVector::from_element(d, 1.0),
            path_sigma: DVector::zeros(d),
            path_c: DVector::zeros(d),
            generation: 0,
            last_eigen_generation: 0,
            eigen_stale: false,
        }
    }

    fn condition(&self) -> f64 {
        let max = self.eigen_scale.max();
        let min = self.eigen_scale.min();
        (max * max) / (min * min).max(f64::MIN_POSITIVE)
    }

    fn refresh_eigen_if_stale(&mut self) {
        let gap = (self.generation - self.last_eigen_generation) as f64;
        let cadence = 1.0 / ((self.c_1 + self.c_mu) * self.d as f64 * 10.0);
        if self.eigen_stale && gap > cadence {
            let symmetric = (&self.covariance + self.covariance.transpose()) * 0.5;
            let eigen = symmetric.symmetric_eigen();
            self.eigen_basis = eigen.eigenvectors;
            self.eigen_scale =
                eigen.eigenvalues.map(|v| v.max(f64::MIN_POSITIVE).sqrt());
            self.last_eigen_generation = self.generation;
            self.eigen_stale = false;
        }
    }

    /// Draw x = mean + σ·B·diag(scale)·z, resampling a bounded number of
    /// times to land inside the unit cube before clipping.
    fn sample_in_box(
        &self,
        mean: &DVector<f64>,
        sigma: f64,
        rng: &mut StdRng,
    ) -> (DVector<f64>, DVector<f64>) {
        let mut last: Option<(DVector<f64>, DVector<f64>)> = None;
        for _ in 0..BOX_RESAMPLES {
            let z: DVector<f64> =
                DVector::from_iterator(self.d, (0..self.d).map(|_| rng.sample(StandardNormal)));
            let scaled = &self.eigen_basis * z.component_mul(&self.eigen_scale);
            let x = mean + scaled * sigma;
            let inside = x.iter().all(|v| (0.0..=1.0).contains(v));
            if inside {
                return (x, z);
            }
            last = Some((x, z));
        }
        let (mut x, z) = last.expect("at least one draw was made");
        for v in x.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        (x, z)
    }

    /// One generation of mean/path/covariance/step updates; `population`
    /// must be sorted ascending by internal (minimised) fitness.
    fn update(
        &mut self,
        population: &[(f64, DVector<f64>, DVector<f64>)],
        old_mean: DVector<f64>,
        sigma: &mut f64,
    ) -> DVector<f64> {
        self.generation += 1;
        let mu = self.mu.min(population.len());
        if mu == 0 {
            return old_mean;
        }
        let weights = &self.weights[..mu];
        let weight_total: f64 = weights.iter().sum();

        let mut new_mean = DVector::zeros(self.d);
        let mut z_weighted = DVector::zeros(self.d);
        for (w, (_, x, z)) in weights.iter().zip(population) {
            new_mean += x * (*w / weight_total);
            z_weighted += z * (*w / weight_total);
        }
        let y_weighted = (&new_mean - &old_mean) / *sigma;

        // Step-size path compares against an isotropic random walk; using
        // the whitened coordinates avoids forming C^(-1/2) explicitly.
        let path_scale = (self.c_sigma * (2.0 - self.c_sigma) * self.mu_eff).sqrt();
        self.path_sigma =
            &self.path_sigma * (1.0 - self.c_sigma) + &self.eigen_basis * &z_weighted * path_scale;

        let path_norm = self.path_sigma.norm();
        let unbiased = path_norm
            / (1.0 - (1.0 - self.c_sigma).powi(2 * self.generation as i32))
                .sqrt()
                .max(f64::MIN_POSITIVE);
        let h_sigma = unbiased < (1.4 + 2.0 / (self.d as f64 + 1.0)) * self.chi_n;

        let cc_scale = (self.c_c * (2.0 - self.c_c) * self.mu_eff).sqrt();
        self.path_c = &self.path_c * (1.0 - self.c_c)
            + if h_sigma {
                &y_weighted * cc_scale
            } else {
                DVector::zeros(self.d)
            };

        let mut rank_mu = DMatrix::zeros(self.d, self.d);
        for (w, (_, x, _)) in weights.iter().zip(population) {
            let y = (x - &old_mean) / *sigma;
            rank_mu += &y * y.transpose() * (*w / weight_total);
        }
        let hs_correction = if h_sigma {
            0.0
        } else {
            self.c_c * (2.0 - self.c_c)
        };
        self.covariance = &self.covariance
            * (1.0 - self.c_1 - self.c_mu + self.c_1 * hs_correction)
            + (&self.path_c * self.path_c.transpose()) * self.c_1
            + rank_mu * self.c_mu;
        self.eigen_stale = true;

        *sigma *= ((self.c_sigma / self.d_sigma) * (unbiased / self.chi_n - 1.0)).exp();
        new_mean
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peaked(centre: &[f64]) -> impl FnMut(&[f64]) -> f64 + '_ {
        move |x: &[f64]| {
            let d2: f64 = x
                .iter()
                .zip(centre)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (-d2 / 0.02).exp()
        }
    }

    #[test]
    fn finds_a_smooth_unimodal_peak() {
        let centre = [0.5, 0.5];
        let mut objective = peaked(&centre);
        let best = maximise_in_unit_cube(&mut objective, 2, 2048, 10, 1);
        let dist: f64 = best
            .iter()
            .zip(&centre)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 0.05, "returned {best:?}, distance {dist}");
    }

    #[test]
    fn finds_an_off_centre_peak_in_higher_dimension() {
        let centre = [0.8, 0.15, 0.6, 0.35];
        let mut objective = peaked(&centre);
        let best = maximise_in_unit_cube(&mut objective, 4, 4096, 10, 3);
        let dist: f64 = best
            .iter()
            .zip(&centre)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 0.1, "returned {best:?}, distance {dist}");
    }

    #[test]
    fn respects_the_evaluation_budget_exactly() {
        for budget in [10, 57, 333] {
            let mut calls = 0usize;
            let mut objective = |x: &[f64]| {
                calls += 1;
                -x[0]
            };
            let _ = maximise_in_unit_cube(&mut objective, 3, budget, 10, 5);
            assert!(calls <= budget, "{calls} calls exceeded budget {budget}");
        }
    }

    #[test]
    fn is_deterministic_given_a_seed() {
        let run = |seed| {
            let mut objective = |x: &[f64]| -((x[0] - 0.3).powi(2) + (x[1] - 0.7).powi(2));
            maximise_in_unit_cube(&mut objective, 2, 500, 10, seed)
        };
        let a = run(9);
        let b = run(9);
        assert_eq!(a, b);
        let c = run(10);
        assert_ne!(a, c, "different seeds should explore differently");
    }

    #[test]
    fn stays_inside_the_unit_cube() {
        // A peak outside the box pulls the mean against the boundary.
        let objective = |x: &[f64]| -(x[0] - 1.4).powi(2) - (x[1] + 0.3).powi(2);
        let mut all_inside = true;
        let mut checked = 0;
        {
            let mut wrapped = |x: &[f64]| {
                checked += 1;
                all_inside &= x.iter().all(|v| (0.0..=1.0).contains(v));
                objective(x)
            };
            let best = maximise_in_unit_cube(&mut wrapped, 2, 600, 6, 2);
            assert!(best.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        assert!(all_inside, "an out-of-box point was evaluated");
        assert!(checked > 0);
    }
}
