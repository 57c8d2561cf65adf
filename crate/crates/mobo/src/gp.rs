//! Zero-mean Gaussian-process surrogate with an ARD Matérn-5/2 kernel,
//! maximum-likelihood hyperparameter fitting, and the probability-of-
//! improvement / expected-improvement acquisition values used by the
//! single-surrogate baseline loop.
//!
//! Targets are standardised internally (mean 0, sd 1) and all posterior
//! quantities are reported on that standardised scale; improvement-based
//! acquisition maximisation is invariant to the affine rescaling, so
//! callers simply standardise their threshold with the same model.
//!
//! Hyperparameters live in hard boxes (lengthscales in [1e-4, √d], output
//! scale in [1e-4, 10]) and are fitted by multi-restart projected
//! adaptive-moment ascent on the log marginal likelihood in log-parameter
//! space, with analytic gradients. The best value seen across every
//! restart — including each restart's starting point — is kept, so the
//! returned likelihood is never worse than any initialisation.

use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::distribution::{ContinuousCDF, Normal};

/// Lower box edge for every lengthscale.
pub const LENGTHSCALE_MIN: f64 = 1e-4;
/// Box for the kernel output scale.
pub const OUTPUT_SCALE_MIN: f64 = 1e-4;
/// Upper box edge for the kernel output scale.
pub const OUTPUT_SCALE_MAX: f64 = 10.0;
/// Posterior variances are floored here to keep downstream ratios finite.
pub const VARIANCE_FLOOR: f64 = 1e-12;
/// Default number of random restarts for hyperparameter fitting.
pub const DEFAULT_RESTARTS: usize = 10;

const JITTER_INITIAL: f64 = 1e-6;
const JITTER_MAX: f64 = 1e-2;
const ADAM_STEPS: usize = 60;
const ADAM_STEP_SIZE: f64 = 0.08;
const GRAD_TOLERANCE: f64 = 1e-3;

/// Upper box edge for lengthscales in `d` dimensions.
pub fn lengthscale_max(d: usize) -> f64 {
    (d as f64).sqrt()
}

/// ARD Matérn-5/2 kernel parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelHyperparameters {
    /// Per-dimension lengthscales ω.
    pub lengthscales: Vec<f64>,
    /// Output scale σ_o; the kernel value at zero distance is σ_o².
    pub output_scale: f64,
}

impl KernelHyperparameters {
    /// Validates the box constraints.
    pub fn new(lengthscales: Vec<f64>, output_scale: f64) -> Result<Self> {
        if lengthscales.is_empty() {
            return Err(Error::EmptyInput("need at least one lengthscale"));
        }
        let upper = lengthscale_max(lengthscales.len());
        for &w in &lengthscales {
            if !w.is_finite() || !(LENGTHSCALE_MIN..=upper).contains(&w) {
                return Err(Error::InvalidArgument(format!(
                    "lengthscale {w} outside [{LENGTHSCALE_MIN}, {upper}]"
                )));
            }
        }
        if !output_scale.is_finite()
            || !(OUTPUT_SCALE_MIN..=OUTPUT_SCALE_MAX).contains(&output_scale)
        {
            return Err(Error::InvalidArgument(format!(
                "output scale {output_scale} outside [{OUTPUT_SCALE_MIN}, {OUTPUT_SCALE_MAX}]"
            )));
        }
        Ok(KernelHyperparameters {
            lengthscales,
            output_scale,
        })
    }
}

/// Matérn-5/2 covariance σ_o²·(1 + √5·r + 5r²/3)·e^(−√5·r) with
/// r² = Σ (a_i − b_i)²/ω_i².
pub fn matern52(a: &[f64], b: &[f64], hp: &KernelHyperparameters) -> f64 {
    assert_eq!(
        a.len(),
        b.len(),
        "kernel inputs must share a dimension"
    );
    assert_eq!(
        a.len(),
        hp.lengthscales.len(),
        "kernel inputs must match the lengthscale count"
    );
    let mut r2 = 0.0;
    for ((&ai, &bi), &w) in a.iter().zip(b).zip(&hp.lengthscales) {
        let scaled = (ai - bi) / w;
        r2 += scaled * scaled;
    }
    let u = (5.0 * r2).sqrt();
    hp.output_scale * hp.output_scale * (1.0 + u + u * u / 3.0) * (-u).exp()
}

/// A fitted Gaussian-process model over standardised targets.
#[derive(Debug, Clone)]
pub struct GpModel {
    x_train: Vec<Vec<f64>>,
    y_standardised: DVector<f64>,
    y_mean: f64,
    y_sd: f64,
    hp: KernelHyperparameters,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
    lml: f64,
    restart_initial_lmls: Vec<f64>,
}

impl GpModel {
    /// Build a model at fixed hyperparameters (no fitting). Useful for
    /// oracle comparisons and synthetic acquisition landscapes.
    pub fn with_hyperparameters(
        x: &[Vec<f64>],
        y: &[f64],
        hp: KernelHyperparameters,
    ) -> Result<GpModel> {
        let d = validate_training_data(x, y)?;
        if hp.lengthscales.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: hp.lengthscales.len(),
            });
        }
        let (y_s, y_mean, y_sd) = standardise(y);
        let parts = factorise(x, &y_s, &hp)?;
        Ok(GpModel {
            x_train: x.to_vec(),
            y_standardised: y_s,
            y_mean,
            y_sd,
            hp,
            chol: parts.chol,
            alpha: parts.alpha,
            jitter: parts.jitter,
            lml: parts.lml,
            restart_initial_lmls: Vec::new(),
        })
    }

    /// Posterior mean and variance at `x`, on the standardised target scale.
    /// The variance is floored at [`VARIANCE_FLOOR`].
    pub fn posterior(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let t = self.x_train.len();
        let mut k_star = DVector::zeros(t);
        for (i, row) in self.x_train.iter().enumerate() {
            k_star[i] = matern52(x, row, &self.hp);
        }
        let mean = k_star.dot(&self.alpha);
        let solved = self.chol.solve(&k_star);
        let prior_var = self.hp.output_scale * self.hp.output_scale;
        let var = (prior_var - k_star.dot(&solved)).max(VARIANCE_FLOOR);
        Ok((mean, var))
    }

    /// Map a raw target value onto the model's standardised scale.
    pub fn standardise_target(&self, y: f64) -> f64 {
        (y - self.y_mean) / self.y_sd
    }

    /// Map a standardised posterior mean back to raw target units.
    pub fn destandardise_mean(&self, mean: f64) -> f64 {
        mean * self.y_sd + self.y_mean
    }

    /// Smallest standardised training target.
    pub fn min_standardised_target(&self) -> f64 {
        self.y_standardised.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Log marginal likelihood of the standardised targets at the fitted
    /// hyperparameters.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    /// Log marginal likelihood at each restart's initial hyperparameters
    /// (empty for models built with fixed hyperparameters).
    pub fn restart_initial_lmls(&self) -> &[f64] {
        &self.restart_initial_lmls
    }

    /// Fitted kernel hyperparameters.
    pub fn hyperparameters(&self) -> &KernelHyperparameters {
        &self.hp
    }

    /// Diagonal jitter that made the Cholesky factorisation succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Number of training rows.
    pub fn len(&self) -> usize {
        self.x_train.len()
    }

    /// Always false: fitting requires at least two rows.
    pub fn is_empty(&self) -> bool {
        self.x_train.is_empty()
    }

    /// Input dimension.
    pub fn dim(&self) -> usize {
        self.x_train[0].len()
    }
}

/// Probability that a normal posterior N(mean, variance) lands below the
/// threshold τ: Φ((τ − mean)/σ). Non-positive variance falls back to the
/// deterministic indicator `mean < τ`.
pub fn pi_value(mean: f64, variance: f64, tau: f64) -> f64 {
    if variance <= 0.0 || variance.is_nan() {
        return if mean < tau { 1.0 } else { 0.0 };
    }
    let sigma = variance.sqrt();
    let s = (tau - mean) / sigma;
    standard_normal().cdf(s)
}

/// Expected improvement below τ of a normal posterior:
/// σ·[s·Φ(s) + φ(s)] with s = (τ − mean)/σ. Non-positive variance falls
/// back to max(τ − mean, 0).
pub fn ei_value(mean: f64, variance: f64, tau: f64) -> f64 {
    if variance <= 0.0 || variance.is_nan() {
        return (tau - mean).max(0.0);
    }
    let sigma = variance.sqrt();
    let s = (tau - mean) / sigma;
    let phi = (-0.5 * s * s).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (sigma * (s * standard_normal().cdf(s) + phi)).max(0.0)
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is well-formed")
}

/// Fit hyperparameters by maximum likelihood with `n_restarts` random
/// initialisations inside the constraint boxes. Deterministic given
/// (X, y, n_restarts, seed).
pub fn gp_fit(x: &[Vec<f64>], y: &[f64], n_restarts: usize, seed: u64) -> Result<GpModel> {
    let d = validate_training_data(x, y)?;
    if n_restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let (y_s, y_mean, y_sd) = standardise(y);
    let mut rng = StdRng::seed_from_u64(seed);

    let log_lo: Vec<f64> = (0..=d)
        .map(|i| if i < d { LENGTHSCALE_MIN.ln() } else { OUTPUT_SCALE_MIN.ln() })
        .collect();
    let log_hi: Vec<f64> = (0..=d)
        .map(|i| {
            if i < d {
                lengthscale_max(d).ln()
            } else {
                OUTPUT_SCALE_MAX.ln()
            }
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut initial_lmls = Vec::with_capacity(n_restarts);
    for _ in 0..n_restarts {
        let mut params: Vec<f64> = (0..=d)
            .map(|i| rng.gen_range(log_lo[i]..log_hi[i]))
            .collect();
        let mut recorded_init = false;
        let mut adam_m = vec![0.0; d + 1];
        let mut adam_v = vec![0.0; d + 1];
        for step in 0..=ADAM_STEPS {
            let eval = match evaluate_log_params(x, &y_s, &params) {
                Ok(e) => e,
                Err(_) => break,
            };
            if !recorded_init {
                initial_lmls.push(eval.lml);
                recorded_init = true;
            }
            if best.as_ref().is_none_or(|(l, _)| eval.lml > *l) {
                best = Some((eval.lml, params.clone()));
            }
            if step == ADAM_STEPS {
                break;
            }
            let grad_norm = eval.grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if grad_norm < GRAD_TOLERANCE {
                break;
            }
            let t_step = (step + 1) as i32;
            let corr1 = 1.0 - 0.9f64.powi(t_step);
            let corr2 = 1.0 - 0.999f64.powi(t_step);
            for i in 0..=d {
                let g = eval.grad[i];
                adam_m[i] = 0.9 * adam_m[i] + 0.1 * g;
                adam_v[i] = 0.999 * adam_v[i] + 0.001 * g * g;
                // Ascent on the likelihood, then projection into the box.
                params[i] += ADAM_STEP_SIZE * (adam_m[i] / corr1)
                    / ((adam_v[i] / corr2).sqrt() + 1e-8);
                params[i] = params[i].clamp(log_lo[i], log_hi[i]);
            }
        }
        if !recorded_init {
            initial_lmls.push(f64::NEG_INFINITY);
        }
    }

    let (_, best_params) =
        best.ok_or_else(|| Error::Numerical("every hyperparameter restart failed".into()))?;
    let hp = hyperparameters_from_log(&best_params, d);
    let parts = factorise(x, &y_s, &hp)?;
    Ok(GpModel {
        x_train: x.to_vec(),
        y_standardised: y_s,
        y_mean,
        y_sd,
        hp,
        chol: parts.chol,
        alpha: parts.alpha,
        jitter: parts.jitter,
        lml: parts.lml,
        restart_initial_lmls: initial_lmls,
    })
}

fn validate_training_data(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() < 2 {
        return Err(Error::EmptyInput("GP fitting needs at least two rows"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::EmptyInput("GP rows need at least one feature"));
    }
    for row in x {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        for &v in row {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "GP inputs must lie in [0,1], got {v}"
                )));
            }
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("GP target".into()));
    }
    Ok(d)
}

fn standardise(y: &[f64]) -> (DVector<f64>, f64, f64) {
    let t = y.len() as f64;
    let mean = y.iter().sum::<f64>() / t;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t;
    let sd = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    let standardised = DVector::from_iterator(y.len(), y.iter().map(|v| (v - mean) / sd));
    (standardised, mean, sd)
}

fn hyperparameters_from_log(params: &[f64], d: usize) -> KernelHyperparameters {
    KernelHyperparameters {
        lengthscales: params[..d].iter().map(|p| p.exp()).collect(),
        output_scale: params[d].exp(),
    }
}

struct Factorised {
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
    lml: f64,
}

fn build_kernel_matrix(x: &[Vec<f64>], hp: &KernelHyperparameters) -> DMatrix<f64> {
    let t = x.len();
    let mut k = DMatrix::zeros(t, t);
    for p in 0..t {
        for q in 0..=p {
            let v = matern52(&x[p], &x[q], hp);
            k[(p, q)] = v;
            k[(q, p)] = v;
        }
    }
    k
}

/// Factorise K + jitter·I, escalating the jitter tenfold from 1e-6 up to
/// 1e-2 until the Cholesky succeeds.
fn factorise(x: &[Vec<f64>], y_s: &DVector<f64>, hp: &KernelHyperparameters) -> Result<Factorised> {
    let t = x.len();
    let k = build_kernel_matrix(x, hp);
    let mut jitter = JITTER_INITIAL;
    loop {
        let mut k_j = k.clone();
        for i in 0..t {
            k_j[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(k_j) {
            let alpha = chol.solve(y_s);
            let log_det: f64 = (0..t).map(|i| chol.l_dirty()[(i, i)].ln()).sum();
            let lml = -0.5 * y_s.dot(&alpha)
                - log_det
                - 0.5 * t as f64 * (2.0 * std::f64::consts::PI).ln();
            return Ok(Factorised {
                chol,
                alpha,
                jitter,
                lml,
            });
        }
        jitter *= 10.0;
        if jitter > JITTER_MAX * (1.0 + 1e-9) {
            return Err(Error::Numerical(
                "kernel matrix not positive definite even with maximal jitter".into(),
            ));
        }
    }
}

struct FitEvaluation {
    lml: f64,
    /// Gradient with respect to (log ω_1, …, log ω_d, log σ_o).
    grad: Vec<f64>,
}

/// Log marginal likelihood and its analytic log-space gradient.
///
/// With W = ααᵀ − (K + jI)⁻¹, each derivative is ½·tr(W·∂K/∂θ);
/// for the Matérn-5/2 kernel ∂κ/∂log ω_j = σ_o²·(5/3)·(1+u)·e^(−u)·Δ_j²/ω_j²
/// (u = √5·r) and ∂K/∂log σ_o = 2K.
fn evaluate_log_params(x: &[Vec<f64>], y_s: &DVector<f64>, params: &[f64]) -> Result<FitEvaluation> {
    let t = x.len();
    let d = x[0].len();
    let hp = hyperparameters_from_log(params, d);
    let parts = factorise(x, y_s, &hp)?;
    let k_inv = parts.chol.inverse();

    let sigma2 = hp.output_scale * hp.output_scale;
    let mut grad = vec![0.0; d + 1];
    for p in 0..t {
        for q in 0..t {
            let w = parts.alpha[p] * parts.alpha[q] - k_inv[(p, q)];
            let mut r2 = 0.0;
            for ((a, b), l) in x[p].iter().zip(&x[q]).zip(&hp.lengthscales) {
                let scaled = (a - b) / l;
                r2 += scaled * scaled;
            }
            let u = (5.0 * r2).sqrt();
            let decay = (-u).exp();
            let kernel_value = sigma2 * (1.0 + u + u * u / 3.0) * decay;
            let common = sigma2 * (5.0 / 3.0) * (1.0 + u) * decay;
            for j in 0..d {
                let delta = x[p][j] - x[q][j];
                let wj = hp.lengthscales[j];
                grad[j] += 0.5 * w * common * delta * delta / (wj * wj);
            }
            grad[d] += w * kernel_value;
        }
    }
    Ok(FitEvaluation {
        lml: parts.lml,
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp1(w: f64, s: f64) -> KernelHyperparameters {
        KernelHyperparameters::new(vec![w], s).unwrap()
    }

    #[test]
    fn kernel_hand_worked_unit_distance() {
        let v = matern52(&[0.0], &[1.0], &hp1(1.0, 1.0));
        let sqrt5 = 5.0f64.sqrt();
        let expected = (1.0 + sqrt5 + 5.0 / 3.0) * (-sqrt5).exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.5240).abs() < 1e-4);
    }

    #[test]
    fn kernel_at_zero_distance_is_squared_output_scale() {
        let hp = KernelHyperparameters::new(vec![0.3, 0.7], 2.5).unwrap();
        let v = matern52(&[0.4, 0.9], &[0.4, 0.9], &hp);
        assert!((v - 6.25).abs() < 1e-12);
    }

    #[test]
    fn kernel_decays_with_distance() {
        let hp = hp1(0.05, 1.0);
        assert!(matern52(&[0.0], &[1.0], &hp) < 1e-12);
        let near = matern52(&[0.0], &[0.01], &hp);
        let far = matern52(&[0.0], &[0.1], &hp);
        assert!(near > far);
    }

    #[test]
    fn hyperparameter_boxes_are_enforced() {
        assert!(KernelHyperparameters::new(vec![1e-5], 1.0).is_err());
        assert!(KernelHyperparameters::new(vec![2.0], 1.0).is_err()); // > √1
        assert!(KernelHyperparameters::new(vec![0.5], 11.0).is_err());
        assert!(KernelHyperparameters::new(vec![0.5, 1.2], 1.0).is_ok()); // √2 ≈ 1.414
    }

    fn training_case() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = [0.05, 0.2, 0.45, 0.6, 0.85]
            .iter()
            .map(|&v| vec![v])
            .collect();
        let y = x
            .iter()
            .map(|r| (3.0 * r[0]).sin() + 0.5 * r[0])
            .collect();
        (x, y)
    }

    #[test]
    fn fit_is_deterministic() {
        let (x, y) = training_case();
        let a = gp_fit(&x, &y, DEFAULT_RESTARTS, 42).unwrap();
        let b = gp_fit(&x, &y, DEFAULT_RESTARTS, 42).unwrap();
        assert_eq!(
            a.hyperparameters().output_scale.to_bits(),
            b.hyperparameters().output_scale.to_bits()
        );
        for (p, q) in a
            .hyperparameters()
            .lengthscales
            .iter()
            .zip(&b.hyperparameters().lengthscales)
        {
            assert_eq!(p.to_bits(), q.to_bits());
        }
        let (ma, va) = a.posterior(&[0.3]).unwrap();
        let (mb, vb) = b.posterior(&[0.3]).unwrap();
        assert_eq!(ma.to_bits(), mb.to_bits());
        assert_eq!(va.to_bits(), vb.to_bits());
    }

    #[test]
    fn fitted_likelihood_dominates_every_restart_initialisation() {
        let (x, y) = training_case();
        let model = gp_fit(&x, &y, DEFAULT_RESTARTS, 7).unwrap();
        assert_eq!(model.restart_initial_lmls().len(), DEFAULT_RESTARTS);
        for &init in model.restart_initial_lmls() {
            assert!(
                model.log_marginal_likelihood() >= init - 1e-9,
                "final {} < initial {}",
                model.log_marginal_likelihood(),
                init
            );
        }
    }

    #[test]
    fn posterior_interpolates_training_points() {
        let (x, y) = training_case();
        let model = gp_fit(&x, &y, DEFAULT_RESTARTS, 3).unwrap();
        for (row, &target) in x.iter().zip(&y) {
            let (mean, var) = model.posterior(row).unwrap();
            let standardised_target = model.standardise_target(target);
            assert!(
                (mean - standardised_target).abs() < 1e-4,
                "mean {mean} vs target {standardised_target}"
            );
            assert!(var < 1e-3, "variance at a training point should be tiny, got {var}");
        }
    }

    #[test]
    fn posterior_reverts_to_prior_far_from_data() {
        // Short fixed lengthscales make 0.9 effectively infinitely far from
        // the data cluster near the origin.
        let x = vec![vec![0.02], vec![0.05], vec![0.08]];
        let y = vec![1.0, 2.0, 0.5];
        let model = GpModel::with_hyperparameters(&x, &y, hp1(0.01, 1.5)).unwrap();
        let (mean, var) = model.posterior(&[0.9]).unwrap();
        assert!(mean.abs() < 1e-6, "prior mean is zero, got {mean}");
        assert!((var - 2.25).abs() < 1e-6, "prior variance is σ_o², got {var}");
    }

    #[test]
    fn posterior_variance_never_exceeds_prior_plus_jitter() {
        let (x, y) = training_case();
        let model = gp_fit(&x, &y, DEFAULT_RESTARTS, 11).unwrap();
        let prior = model.hyperparameters().output_scale.powi(2);
        for i in 0..50 {
            let q = [i as f64 / 49.0];
            let (_, var) = model.posterior(&q).unwrap();
            assert!(var <= prior + model.jitter() + 1e-9);
            assert!(var >= VARIANCE_FLOOR);
        }
    }

    #[test]
    fn two_point_posterior_matches_hand_solved_system() {
        // Explicit 2×2 solve: K = [[a, b], [b, a]], inverse known in closed
        // form; compare against the Cholesky path.
        let x = vec![vec![0.2], vec![0.7]];
        let y = vec![1.0, -1.0];
        let hp = hp1(0.5, 1.0);
        let model = GpModel::with_hyperparameters(&x, &y, hp.clone()).unwrap();
        let jitter = model.jitter();
        let a = matern52(&x[0], &x[0], &hp) + jitter;
        let b = matern52(&x[0], &x[1], &hp);
        let det = a * a - b * b;
        // Standardised targets for y = (1, -1): mean 0, sd 1 → unchanged.
        let (y0, y1) = (1.0, -1.0);
        let query = [0.4];
        let k0 = matern52(&query, &x[0], &hp);
        let k1 = matern52(&query, &x[1], &hp);
        let alpha0 = (a * y0 - b * y1) / det;
        let alpha1 = (a * y1 - b * y0) / det;
        let expected_mean = k0 * alpha0 + k1 * alpha1;
        let quad = (a * k0 * k0 - 2.0 * b * k0 * k1 + a * k1 * k1) / det;
        let expected_var = (1.0 - quad).max(VARIANCE_FLOOR);
        let (mean, var) = model.posterior(&query).unwrap();
        assert!(
            (mean - expected_mean).abs() <= 1e-8 * expected_mean.abs().max(1.0),
            "{mean} vs {expected_mean}"
        );
        assert!(
            (var - expected_var).abs() <= 1e-8 * expected_var.abs().max(1.0),
            "{var} vs {expected_var}"
        );
    }

    #[test]
    fn constant_targets_fit_cleanly_with_zero_posterior_mean() {
        let x = vec![vec![0.1], vec![0.5], vec![0.9]];
        let y = vec![4.2, 4.2, 4.2];
        let model = gp_fit(&x, &y, 3, 0).unwrap();
        let (mean, _) = model.posterior(&[0.3]).unwrap();
        assert!(mean.abs() < 1e-9);
        assert!((model.destandardise_mean(mean) - 4.2).abs() < 1e-9);
    }

    #[test]
    fn pi_hand_worked_values() {
        assert!((pi_value(1.0, 1.0, 1.0) - 0.5).abs() < 1e-12);
        assert!((pi_value(0.0, 1.0, 1.0) - 0.841_344_746_068_543).abs() < 1e-9);
        assert_eq!(pi_value(0.5, 0.0, 1.0), 1.0);
        assert_eq!(pi_value(1.5, 0.0, 1.0), 0.0);
    }

    #[test]
    fn ei_hand_worked_values() {
        let density_at_zero = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((ei_value(1.0, 1.0, 1.0) - density_at_zero).abs() < 1e-9);
        assert!((ei_value(1.0, 1.0, 1.0) - 0.39894).abs() < 1e-4);
        assert_eq!(ei_value(2.0, 0.0, 1.0), 0.0);
        assert_eq!(ei_value(0.25, 0.0, 1.0), 0.75);
    }

    #[test]
    fn ei_dominates_mean_improvement_times_pi() {
        let cases = [
            (0.3, 0.5, 0.6),
            (1.2, 0.01, 1.0),
            (-0.4, 2.0, 0.0),
            (0.0, 1.0, -0.5),
        ];
        for (mean, var, tau) in cases {
            let ei = ei_value(mean, var, tau);
            let bound = (tau - mean) * pi_value(mean, var, tau);
            assert!(ei >= bound - 1e-12, "EI {ei} < bound {bound}");
            assert!(ei >= 0.0);
        }
    }

    #[test]
    fn pi_monotonicity_spot_checks() {
        // Decreasing in the mean.
        assert!(pi_value(0.2, 1.0, 1.0) > pi_value(0.4, 1.0, 1.0));
        // For mean above τ, increasing in σ.
        assert!(pi_value(2.0, 4.0, 1.0) > pi_value(2.0, 1.0, 1.0));
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        assert!(gp_fit(&[vec![0.1]], &[1.0], 10, 0).is_err());
        assert!(gp_fit(&[vec![0.1], vec![0.2]], &[1.0], 10, 0).is_err());
        assert!(gp_fit(&[vec![0.1], vec![1.7]], &[1.0, 2.0], 10, 0).is_err());
        assert!(gp_fit(&[vec![0.1], vec![0.2]], &[1.0, f64::NAN], 10, 0).is_err());
    }
}
