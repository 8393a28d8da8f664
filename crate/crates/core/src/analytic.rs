//! Closed-form success probabilities.
//!
//! Two states with priors `(p, 1 − p)` and confusability `c`:
//!
//! - quantum (Helstrom): `½(1 + √(1 − 4p(1−p)c))`
//! - noncontextual bound: `1 − min(p, 1−p)·c`
//!
//! Mirror-symmetric triple `cos θ|0⟩ ± sin θ|1⟩, |0⟩` with priors `(p, p, 1 − 2p)`:
//!
//! - quantum optimum, two branches split at `p*(θ) = 1/(2 + cos θ(cos θ + sin θ))`
//! - noncontextual bound `1 − p·c₁₂ − min(p, 1−2p)·c₁₃` with `c₁₂ = cos²2θ`,
//!   `c₁₃ = cos²θ`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::qcore::{PriorDistribution, PureState};
use crate::{Error, Result};

/// A gap must exceed this to count as a contextual advantage.
pub const ADVANTAGE_THRESHOLD: f64 = 1e-12;

/// Guard for the vanishing denominator of the low-prior quantum branch.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Three states `ψ₁,₂ = cos θ|0⟩ ± sin θ|1⟩`, `ψ₃ = |0⟩` with priors `(p, p, 1 − 2p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MirrorEnsemble {
    theta: f64,
    prior_p: f64,
}

impl MirrorEnsemble {
    pub fn new(theta: f64, prior_p: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(0.0..=0.5).contains(&prior_p) {
            return Err(Error::domain(format!("prior p = {prior_p} outside [0, 1/2]")));
        }
        Ok(MirrorEnsemble { theta, prior_p })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn prior_p(&self) -> f64 {
        self.prior_p
    }

    pub fn states(&self) -> [PureState; 3] {
        // θ is finite by construction
        [
            PureState::new(self.theta).expect("finite angle"),
            PureState::new(-self.theta).expect("finite angle"),
            PureState::zero(),
        ]
    }

    pub fn priors(&self) -> [f64; 3] {
        let p = self.prior_p;
        [p, p, 1.0 - 2.0 * p]
    }

    pub fn prior_distribution(&self) -> PriorDistribution {
        PriorDistribution::new(self.priors().to_vec()).expect("mirror priors are normalised")
    }

    /// `c₁₂ = |⟨ψ₁|ψ₂⟩|² = cos²2θ`.
    pub fn confusability_12(&self) -> f64 {
        (2.0 * self.theta).cos().powi(2)
    }

    /// `c₁₃ = |⟨ψ₁|ψ₃⟩|² = cos²θ`.
    pub fn confusability_13(&self) -> f64 {
        self.theta.cos().powi(2)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("theta = {theta} outside [0, π/2]")));
    }
    Ok(())
}

/// Two states with priors `(p, 1 − p)` and confusability `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStateScenario {
    prior_p: f64,
    confusability: f64,
}

impl TwoStateScenario {
    pub fn new(prior_p: f64, confusability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prior_p) {
            return Err(Error::domain(format!("prior p = {prior_p} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&confusability) {
            return Err(Error::domain(format!(
                "confusability c = {confusability} outside [0, 1]"
            )));
        }
        Ok(TwoStateScenario {
            prior_p,
            confusability,
        })
    }

    pub fn prior_p(&self) -> f64 {
        self.prior_p
    }

    pub fn confusability(&self) -> f64 {
        self.confusability
    }
}

/// Quantum optimum against the noncontextual bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPair {
    pub quantum: f64,
    pub noncontextual: f64,
    pub gap: f64,
}

impl BoundPair {
    pub fn new(quantum: f64, noncontextual: f64) -> Self {
        BoundPair {
            quantum,
            noncontextual,
            gap: quantum - noncontextual,
        }
    }

    pub fn has_advantage(&self) -> bool {
        self.gap > ADVANTAGE_THRESHOLD
    }
}

pub fn helstrom_two(scenario: &TwoStateScenario) -> f64 {
    let p = scenario.prior_p;
    let radicand = 1.0 - 4.0 * p * (1.0 - p) * scenario.confusability;
    (0.5 * (1.0 + radicand.max(0.0).sqrt())).clamp(0.0, 1.0)
}

pub fn nc_two_bound(scenario: &TwoStateScenario) -> f64 {
    let p = scenario.prior_p;
    let weight = if p <= 0.5 { p } else { 1.0 - p };
    (1.0 - weight * scenario.confusability).clamp(0.0, 1.0)
}

/// Prior at which the optimal three-state measurement switches branch.
pub fn threshold_prior(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let (s, c) = theta.sin_cos();
    Ok(1.0 / (2.0 + c * (c + s)))
}

/// Which closed form [`quantum_three`] evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantumBranch {
    /// `p ≥ p*(θ)`: `p(1 + sin 2θ)`; the third state is never guessed.
    HighPrior,
    /// `p < p*(θ)`.
    LowPrior,
}

impl QuantumBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuantumBranch::HighPrior => "high-prior",
            QuantumBranch::LowPrior => "low-prior",
        }
    }
}

/// `p(1 + sin 2θ)`, evaluated regardless of which branch applies.
pub fn quantum_three_high_branch(ensemble: &MirrorEnsemble) -> f64 {
    ensemble.prior_p * (1.0 + (2.0 * ensemble.theta).sin())
}

/// `(1−2p)(p sin²θ + 1 − 2p − p cos²θ)/(1 − 2p − p cos²θ)`, evaluated regardless
/// of which branch applies.
pub fn quantum_three_low_branch(ensemble: &MirrorEnsemble) -> Result<f64> {
    let p = ensemble.prior_p;
    let (s, c) = ensemble.theta.sin_cos();
    let q = 1.0 - 2.0 * p;
    let denominator = q - p * c * c;
    if denominator <= DEGENERACY_TOL {
        return Err(Error::NumericDegeneracy(format!(
            "low-prior branch denominator {denominator:e} at theta = {}, p = {p}",
            ensemble.theta
        )));
    }
    Ok(q * (p * s * s + denominator) / denominator)
}

/// Optimal quantum success probability together with the branch used.
pub fn quantum_three_with_branch(ensemble: &MirrorEnsemble) -> Result<(f64, QuantumBranch)> {
    let threshold = threshold_prior(ensemble.theta)?;
    let (value, branch) = if ensemble.prior_p >= threshold {
        (quantum_three_high_branch(ensemble), QuantumBranch::HighPrior)
    } else {
        (quantum_three_low_branch(ensemble)?, QuantumBranch::LowPrior)
    };
    Ok((value.clamp(0.0, 1.0), branch))
}

pub fn quantum_three(ensemble: &MirrorEnsemble) -> Result<f64> {
    quantum_three_with_branch(ensemble).map(|(v, _)| v)
}

/// `1 − p·c₁₂ − p·c₁₃`, the `p ≤ 1/3` form.
pub fn nc_three_low_branch(ensemble: &MirrorEnsemble) -> f64 {
    let p = ensemble.prior_p;
    1.0 - p * ensemble.confusability_12() - p * ensemble.confusability_13()
}

/// `1 − p·c₁₂ − (1 − 2p)·c₁₃`, the `p > 1/3` form.
pub fn nc_three_high_branch(ensemble: &MirrorEnsemble) -> f64 {
    let p = ensemble.prior_p;
    1.0 - p * ensemble.confusability_12() - (1.0 - 2.0 * p) * ensemble.confusability_13()
}

pub fn nc_three_bound(ensemble: &MirrorEnsemble) -> f64 {
    let value = if ensemble.prior_p <= 1.0 / 3.0 {
        nc_three_low_branch(ensemble)
    } else {
        nc_three_high_branch(ensemble)
    };
    value.clamp(0.0, 1.0)
}

pub fn advantage_two(scenario: &TwoStateScenario) -> BoundPair {
    BoundPair::new(helstrom_two(scenario), nc_two_bound(scenario))
}

pub fn advantage_three(ensemble: &MirrorEnsemble) -> Result<BoundPair> {
    Ok(BoundPair::new(quantum_three(ensemble)?, nc_three_bound(ensemble)))
}
