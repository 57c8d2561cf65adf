//! Archive scalarisation: AT, HypI, DomRank, and PHC.
//!
//! Every scalariser maps the archive's objective vectors to scalar fitness
//! values in a canonical smaller-is-better orientation, so downstream code
//! (labelling, surrogates) always minimises. HypI, DomRank, and PHC are
//! larger-is-better as raw quantities and are negated at this boundary; the
//! augmented Tchebycheff value is already a minimisation target.
//!
//! A scalarised value only means something relative to the archive it was
//! computed against; archives are re-scalarised from scratch every iteration
//! of the optimisation loops.

use crate::pareto::{dominates, hv_contributions, hypervolume, pareto_shells};
use crate::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// Default augmentation coefficient for the augmented Tchebycheff scalariser.
pub const DEFAULT_RHO: f64 = 0.05;

/// Margin added to the all-ones reference point when HypI/PHC run on
/// normalised objectives inside the optimisation loops: boundary points at
/// 1.0 keep a positive contribution.
pub const INTERNAL_REF_MARGIN: f64 = 0.1;

/// Scalariser selector. Serialises as its canonical upper-case name
/// (`"AT"`, `"HYPI"`, `"DOMRANK"`, `"PHC"`), matching [`fmt::Display`] and
/// [`str::parse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ScalariserId {
    /// Augmented Tchebycheff over normalised objectives with sampled weights.
    At,
    /// Hypervolume improvement against the first non-dominating shell.
    HypI,
    /// Fraction of the archive not dominating the point.
    DomRank,
    /// Pareto hypervolume contribution with shell-offset accumulation.
    Phc,
}

impl ScalariserId {
    /// All scalarisers, in the canonical grid order.
    pub const ALL: [ScalariserId; 4] = [
        ScalariserId::At,
        ScalariserId::HypI,
        ScalariserId::DomRank,
        ScalariserId::Phc,
    ];
}

impl std::fmt::Display for ScalariserId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ScalariserId::At => "AT",
            ScalariserId::HypI => "HYPI",
            ScalariserId::DomRank => "DOMRANK",
            ScalariserId::Phc => "PHC",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for ScalariserId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AT" => Ok(ScalariserId::At),
            "HYPI" => Ok(ScalariserId::HypI),
            "DOMRANK" => Ok(ScalariserId::DomRank),
            "PHC" => Ok(ScalariserId::Phc),
            other => Err(Error::InvalidArgument(format!(
                "unknown scalariser '{other}' (expected AT, HYPI, DOMRANK or PHC)"
            ))),
        }
    }
}

impl From<ScalariserId> for String {
    fn from(id: ScalariserId) -> String {
        id.to_string()
    }
}

impl TryFrom<String> for ScalariserId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A point on the unit simplex: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Validates non-negativity and Σw = 1 within 1e-9.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::EmptyInput("weight vector must have length ≥ 1"));
        }
        if w.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidArgument(
                "weight entries must be finite and ≥ 0".into(),
            ));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "weights must sum to 1 (got {sum})"
            )));
        }
        Ok(WeightVector(w))
    }

    /// The weight entries.
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Number of objectives the weights apply to.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: construction rejects empty vectors.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Scalar fitness per archive member, smaller-is-better, tagged with the
/// scalariser that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarisedArchive {
    /// Fitness values, one per archive row; smaller is better.
    pub g: Vec<f64>,
    /// Which scalariser produced the values.
    pub scalariser: ScalariserId,
}

/// Archive objectives min-max scaled to [0,1] per column.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalisedObjectives {
    rows: Vec<Vec<f64>>,
}

impl NormalisedObjectives {
    /// The normalised rows.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// A single normalised row.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Archive size.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True for an empty archive (never produced by `normalise_archive`).
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn validate_archive(f: &[Vec<f64>]) -> Result<usize> {
    if f.is_empty() {
        return Err(Error::EmptyInput("archive must contain at least one row"));
    }
    let m = f[0].len();
    if m == 0 {
        return Err(Error::EmptyInput("objective vectors must have length ≥ 1"));
    }
    for row in f {
        if row.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData("archive objective value".into()));
        }
    }
    Ok(m)
}

/// Column-wise min-max scaling to [0,1]; a constant column maps to zeros.
pub fn normalise_archive(f: &[Vec<f64>]) -> Result<NormalisedObjectives> {
    let m = validate_archive(f)?;
    let mut mins = vec![f64::INFINITY; m];
    let mut maxs = vec![f64::NEG_INFINITY; m];
    for row in f {
        for (i, &v) in row.iter().enumerate() {
            mins[i] = mins[i].min(v);
            maxs[i] = maxs[i].max(v);
        }
    }
    let rows = f
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(i, &v)| {
                    let span = maxs[i] - mins[i];
                    if span > 0.0 {
                        (v - mins[i]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(NormalisedObjectives { rows })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Default size of the fixed weight-vector set for a given objective count.
///
/// These counts match the sizes of standard structured simplex lattices used
/// for decomposition methods at each M; configurations beyond M = 9 fall back
/// to a single generous count.
pub fn default_weight_count(m: usize) -> usize {
    match m {
        2 => 100,
        3 => 105,
        4 => 120,
        5 => 126,
        6 => 132,
        7 => 112,
        8 => 156,
        9 => 90,
        _ => 275,
    }
}

/// `n` approximately evenly spread weight vectors on the unit simplex,
/// always including the `m` vertices; deterministic given the seed.
///
/// M = 2 uses the exact even spacing (w, 1−w). Higher M greedily selects a
/// maximin subset from a seeded uniform-simplex candidate pool and then
/// refines non-vertex members by coordinate exchange, minimising a Riesz
/// energy (s = 2) so the set spreads out.
pub fn generate_weights(m: usize, n: usize, seed: u64) -> Result<Vec<WeightVector>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "weight vectors need M ≥ 2 (got {m})"
        )));
    }
    if n < m {
        return Err(Error::InvalidArgument(format!(
            "need at least M = {m} weight vectors to include the vertices (got n = {n})"
        )));
    }
    if m == 2 {
        let step = 1.0 / (n - 1) as f64;
        return (0..n)
            .map(|i| {
                let w = (i as f64 * step).min(1.0);
                WeightVector::new(vec![w, 1.0 - w])
            })
            .collect();
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let pool_size = (40 * n).max(2000);
    let mut pool: Vec<Vec<f64>> = Vec::with_capacity(pool_size);
    for _ in 0..pool_size {
        // Exponential spacings normalised to the simplex are uniform on it.
        let mut w: Vec<f64> = (0..m)
            .map(|_| -f64::ln(1.0 - rng.gen::<f64>()))
            .collect();
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= sum);
        pool.push(w);
    }

    // Vertices first; then greedy maximin selection from the pool.
    let mut chosen: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut v = vec![0.0; m];
            v[i] = 1.0;
            v
        })
        .collect();
    let mut min_dist: Vec<f64> = pool
        .iter()
        .map(|c| {
            chosen
                .iter()
                .map(|p| squared_distance(c, p))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    while chosen.len() < n {
        let best = min_dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("pool is non-empty");
        let picked = pool[best].clone();
        for (c, d) in pool.iter().zip(min_dist.iter_mut()) {
            *d = d.min(squared_distance(c, &picked));
        }
        min_dist[best] = f64::NEG_INFINITY; // never pick the same index twice
        chosen.push(picked);
    }

    // Coordinate-exchange refinement on the non-vertex members: accept a
    // candidate swap when it lowers the Riesz energy against the rest.
    let energy_to_rest = |set: &[Vec<f64>], skip: usize, point: &[f64]| -> f64 {
        set.iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, q)| 1.0 / squared_distance(point, q).max(1e-18))
            .sum()
    };
    let tries_per_slot = 128.min(pool.len());
    for _pass in 0..2 {
        for i in m..n {
            let current = energy_to_rest(&chosen, i, &chosen[i].clone());
            let mut best_energy = current;
            let mut best_candidate: Option<usize> = None;
            for _ in 0..tries_per_slot {
                let c = rng.gen_range(0..pool.len());
                let e = energy_to_rest(&chosen, i, &pool[c]);
                if e < best_energy {
                    best_energy = e;
                    best_candidate = Some(c);
                }
            }
            if let Some(c) = best_candidate {
                chosen[i] = pool[c].clone();
            }
        }
    }

    chosen.into_iter().map(WeightVector::new).collect()
}

/// Augmented Tchebycheff value of a normalised objective row:
/// max_i(w_i·f̄_i) + ρ·Σ_i w_i·f̄_i. Smaller is better.
///
/// # Panics
///
/// Panics when the row and weights have different lengths.
pub fn at_scalarise(fbar_row: &[f64], w: &WeightVector, rho: f64) -> f64 {
    assert_eq!(
        fbar_row.len(),
        w.len(),
        "augmented Tchebycheff needs matching row and weight lengths"
    );
    let mut max_term = f64::NEG_INFINITY;
    let mut sum_term = 0.0;
    for (&f, &wi) in fbar_row.iter().zip(w.values()) {
        let t = wi * f;
        max_term = max_term.max(t);
        sum_term += t;
    }
    max_term + rho * sum_term
}

/// Hypervolume-improvement scalariser.
///
/// For each point, the raw value is the hypervolume of the point united with
/// the first Pareto shell containing no solution that dominates it; the
/// canonical output is the negated raw value (smaller-is-better).
pub fn hypi_scalarise(f: &[Vec<f64>], ref_point: &[f64]) -> Result<ScalarisedArchive> {
    validate_archive(f)?;
    let ranking = pareto_shells(f)?;
    // H(shell) memoised per shell: when the first non-dominating shell
    // contains the point itself (always true for archive members), the union
    // adds nothing new.
    let mut shell_hv: Vec<Option<f64>> = vec![None; ranking.len()];
    let mut g = vec![0.0; f.len()];
    for i in 0..f.len() {
        let mut raw = None;
        for (lambda, shell) in ranking.shells().iter().enumerate() {
            let dominated = shell.iter().any(|&j| dominates(&f[j], &f[i]));
            if dominated {
                continue;
            }
            raw = Some(if shell.contains(&i) {
                if shell_hv[lambda].is_none() {
                    let members: Vec<Vec<f64>> =
                        shell.iter().map(|&j| f[j].clone()).collect();
                    shell_hv[lambda] = Some(hypervolume(&members, ref_point)?);
                }
                shell_hv[lambda].expect("just memoised")
            } else {
                let mut members: Vec<Vec<f64>> =
                    shell.iter().map(|&j| f[j].clone()).collect();
                members.push(f[i].clone());
                hypervolume(&members, ref_point)?
            });
            break;
        }
        let raw = raw.expect("a point's own shell never dominates it");
        g[i] = -raw;
    }
    Ok(ScalarisedArchive {
        g,
        scalariser: ScalariserId::HypI,
    })
}

/// Dominance-rank scalariser: raw_i = 1 − |dominators of i| / (t − 1),
/// negated to the canonical smaller-is-better orientation.
pub fn domrank_scalarise(f: &[Vec<f64>]) -> Result<ScalarisedArchive> {
    validate_archive(f)?;
    let t = f.len();
    if t < 2 {
        return Err(Error::InvalidArgument(
            "dominance rank needs an archive of at least 2 points".into(),
        ));
    }
    let g = (0..t)
        .map(|i| {
            let dominators = (0..t).filter(|&j| j != i && dominates(&f[j], &f[i])).count();
            -(1.0 - dominators as f64 / (t - 1) as f64)
        })
        .collect();
    Ok(ScalarisedArchive {
        g,
        scalariser: ScalariserId::DomRank,
    })
}

/// Pareto-hypervolume-contribution scalariser.
///
/// Raw value of a point in shell λ: its own hypervolume contribution within
/// shell λ plus, for every later shell, that shell's largest contribution.
/// Canonical output is negated (smaller-is-better).
pub fn phc_scalarise(f: &[Vec<f64>], ref_point: &[f64]) -> Result<ScalarisedArchive> {
    validate_archive(f)?;
    let ranking = pareto_shells(f)?;
    let n_shells = ranking.len();
    let mut contributions: Vec<Vec<f64>> = Vec::with_capacity(n_shells);
    for shell in ranking.shells() {
        let members: Vec<Vec<f64>> = shell.iter().map(|&j| f[j].clone()).collect();
        contributions.push(hv_contributions(&members, ref_point)?);
    }
    // suffix_max[λ] = Σ over shells after λ of that shell's max contribution.
    let mut suffix_max = vec![0.0; n_shells + 1];
    for lambda in (0..n_shells).rev() {
        let shell_max = contributions[lambda].iter().fold(0.0f64, |a, &b| a.max(b));
        suffix_max[lambda] = suffix_max[lambda + 1] + shell_max;
    }
    let mut g = vec![0.0; f.len()];
    for (lambda, shell) in ranking.shells().iter().enumerate() {
        for (pos, &i) in shell.iter().enumerate() {
            g[i] = -(contributions[lambda][pos] + suffix_max[lambda + 1]);
        }
    }
    Ok(ScalarisedArchive {
        g,
        scalariser: ScalariserId::Phc,
    })
}

/// One optimisation-loop scalarisation step: normalise the archive, then
/// apply the selected scalariser.
///
/// AT draws one weight vector uniformly from `weights` using `rng` and
/// scalarises every row with it; HypI and PHC run on the normalised
/// objectives against the reference point (1 + margin)·**1**; DomRank needs
/// neither weights nor a reference point.
pub fn scalarise_archive(
    f: &[Vec<f64>],
    id: ScalariserId,
    weights: &[WeightVector],
    rho: f64,
    rng: &mut StdRng,
) -> Result<ScalarisedArchive> {
    let m = validate_archive(f)?;
    let fbar = normalise_archive(f)?;
    match id {
        ScalariserId::At => {
            if weights.is_empty() {
                return Err(Error::EmptyInput(
                    "augmented Tchebycheff needs a non-empty weight set",
                ));
            }
            let w = &weights[rng.gen_range(0..weights.len())];
            if w.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: w.len(),
                });
            }
            let g = fbar.rows().iter().map(|row| at_scalarise(row, w, rho)).collect();
            Ok(ScalarisedArchive {
                g,
                scalariser: ScalariserId::At,
            })
        }
        ScalariserId::HypI => {
            let ref_point = vec![1.0 + INTERNAL_REF_MARGIN; m];
            hypi_scalarise(fbar.rows(), &ref_point)
        }
        ScalariserId::DomRank => domrank_scalarise(fbar.rows()),
        ScalariserId::Phc => {
            let ref_point = vec![1.0 + INTERNAL_REF_MARGIN; m];
            phc_scalarise(fbar.rows(), &ref_point)
        }
    }
}
