//! Brute-force maximisation of the discrimination success functional over
//! measurements in the real plane.
//!
//! Two states: projective measurements `{|φ⟩⟨φ|, I − |φ⟩⟨φ|}` scanned over the
//! angle of `φ`, then polished by golden-section search.
//!
//! Three states: weighted projectors `aᵢ|φᵢ⟩⟨φᵢ|`. The three angles are free and
//! the weights follow from completeness, `Σ aᵢ = 2`, `Σ aᵢ(cos 2φᵢ, sin 2φᵢ) = 0`,
//! whose solution is `aᵢ ∝ sin(2φₖ − 2φⱼ)` for `(i, j, k)` cyclic. Triples whose
//! weights change sign are infeasible. The search is a uniform grid over the
//! angle cube, Nelder–Mead from the best grid point and from seeded random
//! starts, plus an explicit sweep of two-outcome measurements that ignore one
//! hypothesis.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::MirrorEnsemble;
use crate::qcore::{
    born_probability, confusability, normalize_angle, Mat2, Povm, PureState,
    COMPLETENESS_TOL,
};
use crate::{Error, Result};

pub const DEFAULT_GRID_TWO: usize = 1024;
pub const DEFAULT_REFINE_TWO: usize = 100;
pub const DEFAULT_GRID_THREE: usize = 64;
pub const DEFAULT_REFINE_THREE: usize = 200;
pub const DEFAULT_RESTARTS: usize = 8;

const MIN_GRID_TWO: usize = 64;
const MIN_GRID_THREE: usize = 16;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Orientation of a two-outcome projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementParams2 {
    angle: f64,
}

impl MeasurementParams2 {
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::domain(format!("measurement angle must be finite, got {angle}")));
        }
        Ok(MeasurementParams2 {
            angle: normalize_angle(angle),
        })
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// A three-outcome measurement `πᵢ = aᵢ|φᵢ⟩⟨φᵢ|` with in-plane directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementParams3 {
    weights: [f64; 3],
    angles: [f64; 3],
}

impl MeasurementParams3 {
    /// Checks non-negativity and completeness of explicitly given weights.
    pub fn new(weights: [f64; 3], angles: [f64; 3]) -> Result<Self> {
        if weights.iter().chain(angles.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("measurement parameters must be finite"));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0) {
            return Err(Error::domain(format!("negative effect weight {w}")));
        }
        let angles = angles.map(normalize_angle);
        let (trace, x, y) = completeness_residual(&weights, &angles);
        let deviation = (trace - 2.0).abs().max(x.abs()).max(y.abs());
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(MeasurementParams3 { weights, angles })
    }

    /// Solves completeness for the weights; `None` when the directions are
    /// degenerate or a weight would be negative.
    pub fn from_angles(angles: [f64; 3]) -> Option<Self> {
        let weights = weights_for(&angles)?;
        Some(MeasurementParams3 {
            weights,
            angles: angles.map(normalize_angle),
        })
    }

    /// Projective measurement onto `φ` and `φ⊥`, assigned to hypotheses
    /// `first` and `second`; the remaining outcome gets the zero effect.
    pub fn two_outcome(first: usize, second: usize, angle: f64) -> Result<Self> {
        if first >= 3 || second >= 3 || first == second {
            return Err(Error::domain(format!("invalid outcome pair ({first}, {second})")));
        }
        let mut weights = [0.0; 3];
        let mut angles = [0.0; 3];
        weights[first] = 1.0;
        weights[second] = 1.0;
        angles[first] = angle;
        angles[second] = angle + FRAC_PI_2;
        MeasurementParams3::new(weights, angles)
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }

    pub fn to_povm(&self) -> Result<Povm> {
        let matrices = (0..3)
            .map(|i| Ok(PureState::new(self.angles[i])?.projector().scale(self.weights[i])))
            .collect::<Result<Vec<Mat2>>>()?;
        Povm::new(matrices)
    }
}

fn completeness_residual(weights: &[f64; 3], angles: &[f64; 3]) -> (f64, f64, f64) {
    let mut trace = 0.0;
    let mut x = 0.0;
    let mut y = 0.0;
    for i in 0..3 {
        let (s, c) = (2.0 * angles[i]).sin_cos();
        trace += weights[i];
        x += weights[i] * c;
        y += weights[i] * s;
    }
    (trace, x, y)
}

fn weights_for(angles: &[f64; 3]) -> Option<[f64; 3]> {
    let raw = [
        (2.0 * (angles[2] - angles[1])).sin(),
        (2.0 * (angles[0] - angles[2])).sin(),
        (2.0 * (angles[1] - angles[0])).sin(),
    ];
    let total: f64 = raw.iter().sum();
    if total.abs() < 1e-12 {
        return None;
    }
    let weights = raw.map(|r| 2.0 * r / total);
    if weights.iter().any(|w| *w < -1e-12) {
        return None;
    }
    Some(weights.map(|w| w.max(0.0)))
}

/// Parameters of the best measurement found by an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OracleParams {
    Two(MeasurementParams2),
    Three(MeasurementParams3),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub success: f64,
    pub params: OracleParams,
    pub evaluations: u64,
}

/// `p·⟨ψ₂|E₂|ψ₂⟩ + (1 − p)·⟨ψ₁|E₁|ψ₁⟩` with `E₁` the projector at `m.angle()`
/// and `E₂ = I − E₁`.
pub fn success_two(s1: &PureState, s2: &PureState, p: f64, m: &MeasurementParams2) -> f64 {
    let phi = PureState::new(m.angle).expect("normalised angle is finite");
    let hit_1 = confusability(&phi, s1);
    let hit_2 = 1.0 - confusability(&phi, s2);
    (p * hit_2 + (1.0 - p) * hit_1).clamp(0.0, 1.0)
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximise [`success_two`] over the measurement angle.
pub fn optimize_two(
    s1: &PureState,
    s2: &PureState,
    p: f64,
    grid_n: usize,
    refine_iters: usize,
) -> Result<OracleResult> {
    if grid_n < MIN_GRID_TWO {
        return Err(Error::domain(format!("grid_n must be at least {MIN_GRID_TWO}, got {grid_n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("prior p = {p} outside [0, 1]")));
    }
    let objective = |angle: f64| {
        success_two(s1, s2, p, &MeasurementParams2::new(angle).expect("finite angle"))
    };
    // the objective has period π in the measurement angle
    let step = PI / grid_n as f64;
    let (best_k, best_val) = (0..grid_n)
        .map(|k| (k, objective(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    let center = best_k as f64 * step;
    let (x, v) = golden_section_max(objective, center - step, center + step, refine_iters);
    let (angle, success) = if v > best_val { (x, v) } else { (center, best_val) };
    Ok(OracleResult {
        success,
        params: OracleParams::Two(MeasurementParams2::new(angle)?),
        evaluations: (grid_n + refine_iters + 2) as u64,
    })
}

/// `Σᵢ pᵢ⟨ψᵢ|πᵢ|ψᵢ⟩`, evaluated through the Born rule on the effects.
pub fn success_three(ensemble: &MirrorEnsemble, m: &MeasurementParams3) -> Result<f64> {
    success_three_povm(ensemble, &m.to_povm()?)
}

/// As [`success_three`] for an arbitrary three-outcome POVM, outcome `i`
/// guessing `ψᵢ`.
pub fn success_three_povm(ensemble: &MirrorEnsemble, povm: &Povm) -> Result<f64> {
    if povm.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: povm.len(),
        });
    }
    let states = ensemble.states();
    let priors = ensemble.priors();
    let mut total = 0.0;
    for i in 0..3 {
        total += priors[i] * born_probability(&states[i], &povm.effects()[i])?;
    }
    Ok(total.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy)]
struct Objective3 {
    priors: [f64; 3],
    state_angles: [f64; 3],
}

impl Objective3 {
    fn new(ensemble: &MirrorEnsemble) -> Self {
        Objective3 {
            priors: ensemble.priors(),
            state_angles: [ensemble.theta(), -ensemble.theta(), 0.0],
        }
    }

    fn value(&self, weights: &[f64; 3], angles: &[f64; 3]) -> f64 {
        (0..3)
            .map(|i| self.priors[i] * weights[i] * (angles[i] - self.state_angles[i]).cos().powi(2))
            .sum()
    }

    fn at_angles(&self, angles: &[f64; 3]) -> Option<Candidate> {
        let weights = weights_for(angles)?;
        Some(Candidate {
            success: self.value(&weights, angles),
            angles: angles.map(normalize_angle),
            weights,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    success: f64,
    angles: [f64; 3],
    weights: [f64; 3],
}

impl Candidate {
    /// Higher success wins; ties go to the lexicographically smaller angle triple.
    fn cmp_rank(&self, other: &Candidate) -> Ordering {
        self.success
            .total_cmp(&other.success)
            .then_with(|| {
                for i in 0..3 {
                    match other.angles[i].total_cmp(&self.angles[i]) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }

    fn best(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.cmp_rank(&a) == Ordering::Greater { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

/// Nelder–Mead maximisation over the angle triple; infeasible points rank last.
fn nelder_mead(obj: &Objective3, start: [f64; 3], step: f64, max_iters: usize, evals: &mut u64) -> Option<Candidate> {
    let mut eval = |x: [f64; 3]| -> (f64, [f64; 3]) {
        *evals += 1;
        let v = obj.at_angles(&x).map_or(f64::NEG_INFINITY, |c| c.success);
        (v, x)
    };
    let mut simplex: Vec<(f64, [f64; 3])> = Vec::with_capacity(4);
    simplex.push(eval(start));
    for d in 0..3 {
        let mut x = start;
        x[d] += step;
        simplex.push(eval(x));
    }
    let by_value_desc = |a: &(f64, [f64; 3]), b: &(f64, [f64; 3])| b.0.total_cmp(&a.0);
    for _ in 0..max_iters {
        simplex.sort_by(by_value_desc);
        let spread = simplex[0].0 - simplex[3].0;
        let size = (1..4)
            .map(|k| (0..3).map(|d| (simplex[k].1[d] - simplex[0].1[d]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= 1e-16 && size <= 1e-10 {
            break;
        }
        let mut centroid = [0.0; 3];
        for (_, x) in &simplex[..3] {
            for d in 0..3 {
                centroid[d] += x[d] / 3.0;
            }
        }
        let worst = simplex[3];
        let along = |t: f64| -> [f64; 3] {
            let mut p = [0.0; 3];
            for d in 0..3 {
                p[d] = centroid[d] + t * (worst.1[d] - centroid[d]);
            }
            p
        };
        let reflected = eval(along(-1.0));
        if reflected.0 > simplex[0].0 {
            let expanded = eval(along(-2.0));
            simplex[3] = if expanded.0 > reflected.0 { expanded } else { reflected };
        } else if reflected.0 > simplex[2].0 {
            simplex[3] = reflected;
        } else {
            let contracted = if reflected.0 > worst.0 {
                eval(along(-0.5))
            } else {
                eval(along(0.5))
            };
            if contracted.0 > worst.0.max(reflected.0) {
                simplex[3] = contracted;
            } else {
                let best = simplex[0].1;
                for k in 1..4 {
                    let mut x = simplex[k].1;
                    for d in 0..3 {
                        x[d] = best[d] + 0.5 * (x[d] - best[d]);
                    }
                    simplex[k] = eval(x);
                }
            }
        }
    }
    simplex.sort_by(by_value_desc);
    obj.at_angles(&simplex[0].1)
}

/// Settings for the three-state brute-force search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeStateSearch {
    pub grid_n: usize,
    pub refine_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ThreeStateSearch {
    fn default() -> Self {
        ThreeStateSearch {
            grid_n: DEFAULT_GRID_THREE,
            refine_iters: DEFAULT_REFINE_THREE,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

impl ThreeStateSearch {
    pub fn run(&self, ensemble: &MirrorEnsemble) -> Result<OracleResult> {
        if self.grid_n < MIN_GRID_THREE {
            return Err(Error::domain(format!(
                "grid_n must be at least {MIN_GRID_THREE}, got {}",
                self.grid_n
            )));
        }
        let obj = Objective3::new(ensemble);
        let n = self.grid_n;
        let step = PI / n as f64;
        let mut evaluations = (n * n * n) as u64;

        let grid_best = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = None;
                for j in 0..n {
                    for k in 0..n {
                        let angles = [i as f64 * step, j as f64 * step, k as f64 * step];
                        best = Candidate::best(best, obj.at_angles(&angles));
                    }
                }
                best
            })
            .reduce(|| None, Candidate::best);

        let mut best = grid_best;
        if let Some(start) = grid_best {
            best = Candidate::best(best, self.polish(&obj, start.angles, step, &mut evaluations));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.restarts {
            let start = (0..1000).find_map(|_| {
                let angles = [rng.gen_range(0.0..PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..PI)];
                evaluations += 1;
                obj.at_angles(&angles).map(|_| angles)
            });
            if let Some(start) = start {
                best = Candidate::best(best, self.polish(&obj, start, 0.25, &mut evaluations));
            }
        }

        best = Candidate::best(best, self.two_outcome_sweep(&obj, &mut evaluations));

        let best = best.ok_or_else(|| Error::domain("no feasible measurement found"))?;
        let params = MeasurementParams3::new(best.weights, best.angles)?;
        Ok(OracleResult {
            success: best.success.clamp(0.0, 1.0),
            params: OracleParams::Three(params),
            evaluations,
        })
    }

    /// Nelder–Mead, restarted from its own optimum with a shrinking simplex.
    fn polish(&self, obj: &Objective3, start: [f64; 3], step: f64, evals: &mut u64) -> Option<Candidate> {
        let mut best = obj.at_angles(&start);
        let mut x = start;
        let mut h = step;
        for _ in 0..3 {
            let found = nelder_mead(obj, x, h, self.refine_iters, evals);
            best = Candidate::best(best, found);
            if let Some(c) = best {
                x = c.angles;
            }
            h *= 0.1;
        }
        best
    }

    /// Projective measurements that never guess one of the three hypotheses.
    fn two_outcome_sweep(&self, obj: &Objective3, evals: &mut u64) -> Option<Candidate> {
        const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
        let n = 4 * self.grid_n;
        let step = PI / n as f64;
        let mut best = None;
        for (a, b) in PAIRS {
            let candidate_at = |beta: f64| {
                let mut weights = [0.0; 3];
                let mut angles = [0.0; 3];
                weights[a] = 1.0;
                weights[b] = 1.0;
                angles[a] = normalize_angle(beta);
                angles[b] = normalize_angle(beta + FRAC_PI_2);
                Candidate {
                    success: obj.value(&weights, &angles),
                    angles,
                    weights,
                }
            };
            let (k_best, _) = (0..n)
                .map(|k| (k, candidate_at(k as f64 * step).success))
                .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
            let center = k_best as f64 * step;
            let (beta, _) = golden_section_max(
                |x| candidate_at(x).success,
                center - step,
                center + step,
                self.refine_iters,
            );
            *evals += (n + self.refine_iters + 2) as u64;
            best = Candidate::best(best, Some(candidate_at(center)));
            best = Candidate::best(best, Some(candidate_at(beta)));
        }
        best
    }
}

/// Maximise the three-state success over in-plane measurements.
pub fn optimize_three(
    ensemble: &MirrorEnsemble,
    grid_n: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<OracleResult> {
    ThreeStateSearch {
        grid_n,
        refine_iters,
        restarts: DEFAULT_RESTARTS,
        seed,
    }
    .run(ensemble)
}
