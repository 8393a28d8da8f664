//! Finite ontological models.
//!
//! A preparation `ψᵢ` induces a distribution `μ(λ|ψᵢ)` over a finite ontic space.
//! The best guess of the preparation from `λ` picks the largest weighted joint
//! `wᵢ(λ) = pᵢ μ(λ|ψᵢ)`, so the optimal success is `Σ_λ maxᵢ wᵢ(λ)`. The checks
//! here confirm, on arbitrary finite models, the inequalities that turn this
//! success into the noncontextual bounds:
//!
//! - two preparations: `S ≤ 1 − min(p₁, p₂)·Σ_λ min(μ₁, μ₂)`
//! - three preparations: `S ≤ 1 − min(p₁, p₂)·ov₁₂ − min(p₁, p₃)·ov₁₃`, via the
//!   exact decomposition `max(a,b,c) = a+b+c − min(a,b) − min(a,c) − min(b,c) + min(a,b,c)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::qcore::PriorDistribution;
use crate::{Error, Result};

/// Normalisation tolerance for distributions and response functions.
pub const DISTRIBUTION_TOL: f64 = 1e-12;
/// Slack allowed when comparing a success probability with its bound.
pub const BOUND_TOL: f64 = 1e-12;
/// Default tolerance for [`check_mixing_constraint`].
pub const MIXING_TOL: f64 = 1e-9;

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::domain(format!("{what} has invalid entry {v}")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(Error::domain(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

/// Epistemic distributions of several preparations over a finite ontic space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOnticModel {
    distributions: Vec<Vec<f64>>,
    priors: PriorDistribution,
}

impl FiniteOnticModel {
    pub fn new(distributions: Vec<Vec<f64>>, priors: PriorDistribution) -> Result<Self> {
        if distributions.is_empty() {
            return Err(Error::domain("model has no preparations"));
        }
        if priors.len() != distributions.len() {
            return Err(Error::DimensionMismatch {
                expected: distributions.len(),
                found: priors.len(),
            });
        }
        let num_lambdas = distributions[0].len();
        if num_lambdas == 0 {
            return Err(Error::domain("ontic space is empty"));
        }
        for (i, row) in distributions.iter().enumerate() {
            if row.len() != num_lambdas {
                return Err(Error::DimensionMismatch {
                    expected: num_lambdas,
                    found: row.len(),
                });
            }
            check_distribution(row, &format!("distribution of preparation {i}"))?;
        }
        Ok(FiniteOnticModel {
            distributions,
            priors,
        })
    }

    /// Rows are normalised uniform draws; priors are either normalised draws or,
    /// with `mirror_priors` and three preparations, `(p, p, 1 − 2p)`.
    pub fn random<R: Rng>(rng: &mut R, preparations: usize, num_lambdas: usize, mirror_priors: bool) -> Result<Self> {
        if preparations == 0 || num_lambdas == 0 {
            return Err(Error::domain("random model needs preparations and ontic states"));
        }
        let distributions = (0..preparations).map(|_| random_simplex_point(rng, num_lambdas)).collect();
        let priors = if mirror_priors && preparations == 3 {
            let p = rng.gen_range(0.0..=0.5);
            vec![p, p, 1.0 - 2.0 * p]
        } else {
            random_simplex_point(rng, preparations)
        };
        FiniteOnticModel::new(distributions, PriorDistribution::new(priors)?)
    }

    pub fn num_lambdas(&self) -> usize {
        self.distributions[0].len()
    }

    pub fn num_preparations(&self) -> usize {
        self.distributions.len()
    }

    pub fn distribution(&self, i: usize) -> &[f64] {
        &self.distributions[i]
    }

    pub fn priors(&self) -> &PriorDistribution {
        &self.priors
    }

    /// `wᵢ(λ) = pᵢ μ(λ|ψᵢ)`.
    pub fn weighted_joint(&self, i: usize) -> Vec<f64> {
        let p = self.priors.as_slice()[i];
        self.distributions[i].iter().map(|m| p * m).collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.num_preparations() {
            return Err(Error::domain(format!(
                "preparation index {i} out of range (model has {})",
                self.num_preparations()
            )));
        }
        Ok(())
    }
}

fn random_simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            let mut v: Vec<f64> = raw.iter().map(|x| x / total).collect();
            // push the rounding residue into the largest entry
            let residue = 1.0 - v.iter().sum::<f64>();
            let imax = (0..n).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
            v[imax] += residue;
            return v;
        }
    }
}

/// Outcome probabilities `ξ(k|λ)`, one row per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFunction {
    values: Vec<Vec<f64>>,
}

impl ResponseFunction {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() || values[0].is_empty() {
            return Err(Error::domain("response function is empty"));
        }
        let num_lambdas = values[0].len();
        for row in &values {
            if row.len() != num_lambdas {
                return Err(Error::DimensionMismatch {
                    expected: num_lambdas,
                    found: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::domain(format!("response value {v} outside [0, 1]")));
            }
        }
        for lambda in 0..num_lambdas {
            let sum: f64 = values.iter().map(|row| row[lambda]).sum();
            if (sum - 1.0).abs() > DISTRIBUTION_TOL {
                return Err(Error::domain(format!(
                    "responses at ontic state {lambda} sum to {sum}, not 1"
                )));
            }
        }
        Ok(ResponseFunction { values })
    }

    pub fn num_outcomes(&self) -> usize {
        self.values.len()
    }

    pub fn num_lambdas(&self) -> usize {
        self.values[0].len()
    }
}

/// `Σ_λ μ(λ|ψᵢ) ξ(k|λ)`.
pub fn operational_probability(
    model: &FiniteOnticModel,
    prep_index: usize,
    response: &ResponseFunction,
    outcome: usize,
) -> Result<f64> {
    model.check_index(prep_index)?;
    if response.num_lambdas() != model.num_lambdas() {
        return Err(Error::DimensionMismatch {
            expected: model.num_lambdas(),
            found: response.num_lambdas(),
        });
    }
    if outcome >= response.num_outcomes() {
        return Err(Error::domain(format!(
            "outcome {outcome} out of range ({} outcomes)",
            response.num_outcomes()
        )));
    }
    let value = model.distributions[prep_index]
        .iter()
        .zip(&response.values[outcome])
        .map(|(m, x)| m * x)
        .sum::<f64>();
    Ok(value.clamp(0.0, 1.0))
}

/// `Σ_λ maxᵢ pᵢ μ(λ|ψᵢ)`.
pub fn ontic_success(model: &FiniteOnticModel) -> f64 {
    let priors = model.priors.as_slice();
    (0..model.num_lambdas())
        .map(|l| {
            model
                .distributions
                .iter()
                .zip(priors)
                .map(|(row, p)| p * row[l])
                .fold(0.0, f64::max)
        })
        .sum()
}

/// The same success written with posteriors: `Σ_λ p(λ) maxᵢ p(ψᵢ|λ)`.
pub fn ontic_success_via_posteriors(model: &FiniteOnticModel) -> f64 {
    let priors = model.priors.as_slice();
    (0..model.num_lambdas())
        .map(|l| {
            let joint: Vec<f64> = model.distributions.iter().zip(priors).map(|(row, p)| p * row[l]).collect();
            let marginal: f64 = joint.iter().sum();
            if marginal == 0.0 {
                return 0.0;
            }
            let max_posterior = joint.iter().map(|w| w / marginal).fold(0.0, f64::max);
            marginal * max_posterior
        })
        .sum()
}

/// `Σ_λ min{μ(λ|ψᵢ), μ(λ|ψⱼ)}`.
pub fn min_overlap(model: &FiniteOnticModel, i: usize, j: usize) -> Result<f64> {
    model.check_index(i)?;
    model.check_index(j)?;
    if i == j {
        return Err(Error::domain(format!("overlap needs two distinct preparations, got {i} twice")));
    }
    Ok(sum_of_min(&model.distributions[i], &model.distributions[j]).clamp(0.0, 1.0))
}

fn sum_of_min(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStateBoundReport {
    pub success: f64,
    pub overlap: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn check_two_state_bound(model: &FiniteOnticModel) -> Result<TwoStateBoundReport> {
    if model.num_preparations() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: model.num_preparations(),
        });
    }
    let priors = model.priors.as_slice();
    let success = ontic_success(model);
    let overlap = min_overlap(model, 0, 1)?;
    let bound = 1.0 - priors[0].min(priors[1]) * overlap;
    Ok(TwoStateBoundReport {
        success,
        overlap,
        bound,
        pass: success <= bound + BOUND_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeStateBoundReport {
    pub success: f64,
    pub overlap_12: f64,
    pub overlap_13: f64,
    pub bound: f64,
    /// `1 − Σ_{i<j} Σ_λ min(wᵢ, wⱼ) + Σ_λ min(w₁, w₂, w₃)`.
    pub decomposition: f64,
    pub identity_residual: f64,
    pub pass: bool,
}

impl ThreeStateBoundReport {
    pub fn identity_holds(&self) -> bool {
        self.identity_residual <= BOUND_TOL
    }
}

pub fn check_three_state_bound(model: &FiniteOnticModel) -> Result<ThreeStateBoundReport> {
    if model.num_preparations() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: model.num_preparations(),
        });
    }
    let priors = model.priors.as_slice();
    let w: Vec<Vec<f64>> = (0..3).map(|i| model.weighted_joint(i)).collect();
    let pairwise = sum_of_min(&w[0], &w[1]) + sum_of_min(&w[0], &w[2]) + sum_of_min(&w[1], &w[2]);
    let triple: f64 = (0..model.num_lambdas()).map(|l| w[0][l].min(w[1][l]).min(w[2][l])).sum();
    let decomposition = 1.0 - pairwise + triple;

    let success = ontic_success(model);
    let overlap_12 = min_overlap(model, 0, 1)?;
    let overlap_13 = min_overlap(model, 0, 2)?;
    let bound = 1.0 - priors[0].min(priors[1]) * overlap_12 - priors[0].min(priors[2]) * overlap_13;
    Ok(ThreeStateBoundReport {
        success,
        overlap_12,
        overlap_13,
        bound,
        decomposition,
        identity_residual: (success - decomposition).abs(),
        pass: success <= bound + BOUND_TOL,
    })
}

/// Whether `(μ₁ + μ̄₁)/2` and `(μ₂ + μ̄₂)/2` agree entrywise within `tol`.
pub fn check_mixing_constraint(mu1: &[f64], mu1bar: &[f64], mu2: &[f64], mu2bar: &[f64], tol: f64) -> Result<bool> {
    let n = mu1.len();
    for (row, name) in [(mu1, "mu1"), (mu1bar, "mu1bar"), (mu2, "mu2"), (mu2bar, "mu2bar")] {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        check_distribution(row, name)?;
    }
    Ok((0..n).all(|l| (0.5 * (mu1[l] + mu1bar[l]) - 0.5 * (mu2[l] + mu2bar[l])).abs() <= tol))
}

/// Tallies from a seeded batch of random models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub models: usize,
    pub two_state_pass: usize,
    pub three_state_pass: usize,
    pub identity_pass: usize,
    pub posterior_pass: usize,
}

impl BatchSummary {
    pub fn all_pass(&self) -> bool {
        [self.two_state_pass, self.three_state_pass, self.identity_pass, self.posterior_pass]
            .iter()
            .all(|&n| n == self.models)
    }

    pub fn failures(&self) -> usize {
        4 * self.models - self.two_state_pass - self.three_state_pass - self.identity_pass - self.posterior_pass
    }
}

/// Per-case outcome of [`run_property_batch`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub index: usize,
    pub num_lambdas: usize,
    pub two_state: TwoStateBoundReport,
    pub three_state: ThreeStateBoundReport,
    pub posterior_residual: f64,
}

/// Generates case `index` of the batch seeded by `seed`.
pub fn property_case(seed: u64, index: usize) -> Result<CaseReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let num_lambdas = rng.gen_range(2..=32);
    let two = FiniteOnticModel::random(&mut rng, 2, num_lambdas, false)?;
    let three = FiniteOnticModel::random(&mut rng, 3, num_lambdas, index % 2 == 0)?;
    let two_state = check_two_state_bound(&two)?;
    let three_state = check_three_state_bound(&three)?;
    let posterior_residual = (ontic_success(&three) - ontic_success_via_posteriors(&three)).abs();
    Ok(CaseReport {
        index,
        num_lambdas,
        two_state,
        three_state,
        posterior_residual,
    })
}

/// Runs `num_models` random two- and three-preparation models through every check.
pub fn run_property_batch(num_models: usize, seed: u64) -> Result<(BatchSummary, Vec<CaseReport>)> {
    use rayon::prelude::*;
    let cases = (0..num_models)
        .into_par_iter()
        .map(|k| property_case(seed, k))
        .collect::<Result<Vec<_>>>()?;
    let count = |f: &dyn Fn(&CaseReport) -> bool| cases.iter().filter(|c| f(c)).count();
    let summary = BatchSummary {
        models: num_models,
        two_state_pass: count(&|c| c.two_state.pass),
        three_state_pass: count(&|c| c.three_state.pass),
        identity_pass: count(&|c| c.three_state.identity_holds()),
        posterior_pass: count(&|c| c.posterior_residual <= BOUND_TOL),
    };
    Ok((summary, cases))
}
