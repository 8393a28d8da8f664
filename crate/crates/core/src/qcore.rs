//! Qubit linear algebra restricted to the real great circle of the Bloch sphere.
//!
//! States are `cos a |0⟩ + sin a |1⟩`. Operators stay complex so the Born rule
//! is generic in the effect it is handed.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance for hermiticity and positivity of exactly constructed effects.
pub const EFFECT_TOL: f64 = 1e-12;
/// Tolerance for the completeness sum of a POVM.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on the unit norm of state amplitudes.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on prior normalisation.
pub const PRIOR_TOL: f64 = 1e-12;

/// Reduce an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Complex64::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Self {
        Mat2::real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    /// `|v⟩⟨v|` for a real vector `v`.
    pub fn outer_real(v: [f64; 2]) -> Self {
        Mat2::real([[v[0] * v[0], v[0] * v[1]], [v[1] * v[0], v[1] * v[1]]])
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        d.0.iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        let off = (m[0][1] - m[1][0].conj()).norm();
        off.max(m[0][0].im.abs()).max(m[1][1].im.abs())
    }

    /// Eigenvalues `(min, max)` of the Hermitian part of the matrix.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let m = &self.0;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let b = (m[0][1] + m[1][0].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// `⟨v|M|v⟩` for a real vector `v`.
    pub fn expectation_real(&self, v: [f64; 2]) -> Complex64 {
        let m = &self.0;
        m[0][0] * (v[0] * v[0]) + m[0][1] * (v[0] * v[1]) + m[1][0] * (v[1] * v[0]) + m[1][1] * (v[1] * v[1])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// A pure qubit state `cos a |0⟩ + sin a |1⟩` on the real great circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    angle: f64,
    amplitudes: [f64; 2],
}

impl PureState {
    /// Builds the state at `angle` radians from `|0⟩`, normalised into `[0, 2π)`.
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::domain(format!("state angle must be finite, got {angle}")));
        }
        let angle = normalize_angle(angle);
        let state = PureState {
            angle,
            amplitudes: [angle.cos(), angle.sin()],
        };
        debug_assert!((state.norm_sqr() - 1.0).abs() <= NORM_TOL);
        Ok(state)
    }

    pub fn zero() -> Self {
        PureState {
            angle: 0.0,
            amplitudes: [1.0, 0.0],
        }
    }

    pub fn one() -> Self {
        PureState {
            angle: PI / 2.0,
            amplitudes: [0.0, 1.0],
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn amplitudes(&self) -> [f64; 2] {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes[0].powi(2) + self.amplitudes[1].powi(2)
    }

    /// The state orthogonal to `self` within the plane (angle + π/2).
    pub fn orthogonal(&self) -> PureState {
        let [c, s] = self.amplitudes;
        PureState {
            angle: normalize_angle(self.angle + PI / 2.0),
            amplitudes: [-s, c],
        }
    }

    /// Inner product `⟨self|other⟩` (real in this plane).
    pub fn inner(&self, other: &PureState) -> f64 {
        self.amplitudes[0] * other.amplitudes[0] + self.amplitudes[1] * other.amplitudes[1]
    }

    /// Density matrix `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Mat2 {
        Mat2::outer_real(self.amplitudes)
    }
}

/// Same as [`PureState::new`].
pub fn make_state(angle: f64) -> Result<PureState> {
    PureState::new(angle)
}

/// `|⟨a|b⟩|²`.
pub fn confusability(a: &PureState, b: &PureState) -> f64 {
    a.inner(b).powi(2).clamp(0.0, 1.0)
}

/// The reflection `|0⟩ ↦ |0⟩`, `|1⟩ ↦ −|1⟩`: angle ↦ −angle.
pub fn mirror_reflect(state: &PureState) -> PureState {
    let [c, s] = state.amplitudes;
    PureState {
        angle: normalize_angle(-state.angle),
        amplitudes: [c, -s],
    }
}

/// A Hermitian positive semidefinite 2×2 operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    matrix: Mat2,
}

impl Effect {
    pub fn new(matrix: Mat2) -> Result<Self> {
        Self::checked(matrix, 0)
    }

    fn checked(matrix: Mat2, index: usize) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if !(defect <= EFFECT_TOL) {
            return Err(Error::domain(format!(
                "effect {index} is not Hermitian (defect {defect:e})"
            )));
        }
        let (min_eigenvalue, _) = matrix.hermitian_eigenvalues();
        if !(min_eigenvalue >= -EFFECT_TOL) {
            return Err(Error::NonPositiveEffect {
                index,
                min_eigenvalue,
            });
        }
        Ok(Effect { matrix })
    }

    /// `weight · |ψ⟩⟨ψ|`; `weight` must be non-negative.
    pub fn weighted_projector(state: &PureState, weight: f64) -> Result<Self> {
        Effect::new(state.projector().scale(weight))
    }

    pub fn identity() -> Self {
        Effect {
            matrix: Mat2::identity(),
        }
    }

    pub fn zero() -> Self {
        Effect { matrix: Mat2::ZERO }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }
}

/// `Tr[|ψ⟩⟨ψ| E]`, clamped to `[0, 1]` after a tolerance check.
pub fn born_probability(state: &PureState, effect: &Effect) -> Result<f64> {
    let value = effect.matrix.expectation_real(state.amplitudes).re;
    if !(-EFFECT_TOL..=1.0 + EFFECT_TOL).contains(&value) {
        return Err(Error::domain(format!(
            "effect yields Born probability {value} outside [0, 1]"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// A finite list of effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
    labels: Vec<String>,
}

impl Povm {
    /// Validates raw matrices as a POVM with outcome labels `0, 1, …`.
    pub fn new(matrices: Vec<Mat2>) -> Result<Self> {
        let labels = (0..matrices.len()).map(|k| k.to_string()).collect();
        Self::with_labels(matrices, labels)
    }

    pub fn with_labels(matrices: Vec<Mat2>, labels: Vec<String>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::domain("a POVM needs at least one effect"));
        }
        if labels.len() != matrices.len() {
            return Err(Error::DimensionMismatch {
                expected: matrices.len(),
                found: labels.len(),
            });
        }
        let effects = matrices
            .into_iter()
            .enumerate()
            .map(|(k, m)| Effect::checked(m, k))
            .collect::<Result<Vec<_>>>()?;
        let total = effects.iter().fold(Mat2::ZERO, |acc, e| acc + e.matrix);
        let deviation = total.max_abs_diff(&Mat2::identity());
        if !(deviation <= COMPLETENESS_TOL) {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Povm { effects, labels })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome distribution of `state` under this measurement.
    pub fn probabilities(&self, state: &PureState) -> Result<Vec<f64>> {
        self.effects.iter().map(|e| born_probability(state, e)).collect()
    }
}

/// Validates already-constructed effects as a POVM.
pub fn validate_povm(effects: &[Effect]) -> Result<Povm> {
    Povm::new(effects.iter().map(|e| e.matrix).collect())
}

/// Prior probabilities over a finite set of hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorDistribution {
    probabilities: Vec<f64>,
}

impl PriorDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::domain("prior distribution is empty"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::domain(format!("prior {p} outside [0, 1]")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PRIOR_TOL {
            return Err(Error::domain(format!("priors sum to {sum}, not 1")));
        }
        Ok(PriorDistribution { probabilities })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("prior distribution is empty"));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_and_trig_states() {
        let s = make_state(0.0).unwrap();
        assert_eq!(s.amplitudes(), [1.0, 0.0]);
        let s = make_state(FRAC_PI_2).unwrap();
        assert!(close(s.amplitudes()[0], 0.0, 1e-15));
        assert!(close(s.amplitudes()[1], 1.0, 1e-15));
        let s = make_state(PI / 3.0).unwrap();
        assert!(close(s.amplitudes()[0], 0.5, 1e-12));
        assert!(close(s.amplitudes()[1], 0.8660254, 1e-7));
    }

    #[test]
    fn angles_are_normalized() {
        let s = make_state(-PI / 3.0).unwrap();
        assert!(close(s.angle(), 5.0 * PI / 3.0, 1e-12));
        let s = make_state(7.0 * PI).unwrap();
        assert!(close(s.angle(), PI, 1e-12));
        assert!(make_state(-1e-300).unwrap().angle() < TAU);
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert!(matches!(make_state(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(make_state(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn confusability_examples() {
        let psi = make_state(0.7).unwrap();
        assert!(close(confusability(&psi, &psi), 1.0, 1e-15));
        assert!(close(confusability(&psi, &psi.orthogonal()), 0.0, 1e-15));
        let theta = PI / 3.0;
        let psi1 = make_state(theta).unwrap();
        let psi2 = make_state(-theta).unwrap();
        assert!(close(confusability(&psi1, &psi2), 0.25, 1e-12));
    }

    #[test]
    fn born_rule_examples() {
        let psi = make_state(1.1).unwrap();
        let own = Effect::new(psi.projector()).unwrap();
        let perp = Effect::new(psi.orthogonal().projector()).unwrap();
        let half = Effect::new(Mat2::identity().scale(0.5)).unwrap();
        assert!(close(born_probability(&psi, &own).unwrap(), 1.0, 1e-12));
        assert!(close(born_probability(&psi, &perp).unwrap(), 0.0, 1e-12));
        assert!(close(born_probability(&psi, &half).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn born_rule_rejects_oversized_effect() {
        let big = Effect::new(Mat2::identity().scale(2.0)).unwrap();
        assert!(matches!(
            born_probability(&PureState::zero(), &big),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mirror_examples() {
        let theta = 0.4;
        let psi1 = make_state(theta).unwrap();
        let psi2 = make_state(-theta).unwrap();
        let r = mirror_reflect(&psi1);
        assert!(close(r.angle(), psi2.angle(), 1e-12));
        assert_eq!(mirror_reflect(&PureState::zero()), PureState::zero());
        let back = mirror_reflect(&mirror_reflect(&psi1));
        assert!(close(back.angle(), psi1.angle(), 1e-12));
        assert!(close(back.amplitudes()[1], psi1.amplitudes()[1], 1e-15));
    }

    #[test]
    fn projective_basis_is_valid_povm() {
        let povm = Povm::new(vec![PureState::zero().projector(), PureState::one().projector()]).unwrap();
        assert_eq!(povm.len(), 2);
        assert_eq!(povm.labels(), ["0", "1"]);
    }

    #[test]
    fn trine_povm_is_valid() {
        let effects: Vec<Effect> = (0..3)
            .map(|k| {
                let phi = make_state(k as f64 * 2.0 * PI / 3.0).unwrap();
                Effect::weighted_projector(&phi, 2.0 / 3.0).unwrap()
            })
            .collect();
        let povm = validate_povm(&effects).unwrap();
        assert_eq!(povm.len(), 3);
    }

    #[test]
    fn negative_completion_is_non_positive() {
        let p0 = PureState::zero().projector();
        let p1 = PureState::one().projector();
        let rest = Mat2::identity() - p0.scale(1.5);
        assert!(close(rest.max_abs_diff(&(p1 - p0.scale(0.5))), 0.0, 1e-15));
        let err = Povm::new(vec![p0.scale(1.5), rest]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveEffect { index: 1, .. }));
    }

    #[test]
    fn incomplete_povm_rejected() {
        let err = Povm::new(vec![PureState::zero().projector()]).unwrap_err();
        assert!(matches!(err, Error::IncompletePovm { .. }));
    }

    #[test]
    fn non_hermitian_effect_rejected() {
        let mut m = Mat2::identity().scale(0.5);
        m.0[0][1] = Complex64::new(0.1, 0.0);
        assert!(matches!(Effect::new(m), Err(Error::Domain(_))));
    }

    #[test]
    fn complex_effect_born_rule() {
        // (I + σ_y)/2 gives 1/2 on every real state
        let mut m = Mat2::identity().scale(0.5);
        m.0[0][1] = Complex64::new(0.0, -0.5);
        m.0[1][0] = Complex64::new(0.0, 0.5);
        let e = Effect::new(m).unwrap();
        let p = born_probability(&make_state(0.3).unwrap(), &e).unwrap();
        assert!(close(p, 0.5, 1e-15));
    }

    #[test]
    fn priors_validated() {
        assert!(PriorDistribution::new(vec![0.2, 0.8]).is_ok());
        assert!(PriorDistribution::new(vec![0.2, 0.7]).is_err());
        assert!(PriorDistribution::new(vec![-0.1, 1.1]).is_err());
        assert!(PriorDistribution::new(vec![]).is_err());
        assert_eq!(PriorDistribution::uniform(4).unwrap().as_slice(), [0.25; 4]);
    }
}
