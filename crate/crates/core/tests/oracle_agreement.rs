//! Brute-force measurement search against the closed-form optima.

use std::f64::consts::PI;

use mesd_core::analytic::{helstrom_two, quantum_three, MirrorEnsemble, TwoStateScenario};
use mesd_core::oracle::{optimize_three, optimize_two, DEFAULT_GRID_THREE, DEFAULT_REFINE_THREE, DEFAULT_GRID_TWO, DEFAULT_REFINE_TWO};
use mesd_core::qcore::{confusability, PureState};

#[test]
fn two_state_oracle_matches_helstrom_on_grid() {
    let mut worst: f64 = 0.0;
    for i in 1..=15 {
        let separation = PI / 2.0 * i as f64 / 16.0;
        for j in 1..=19 {
            let p = j as f64 / 20.0;
            let s1 = PureState::new(0.3).unwrap();
            let s2 = PureState::new(0.3 + separation).unwrap();
            let c = confusability(&s1, &s2);
            let exact = helstrom_two(&TwoStateScenario::new(p, c).unwrap());
            let found = optimize_two(&s1, &s2, p, DEFAULT_GRID_TWO, DEFAULT_REFINE_TWO).unwrap();
            let diff = found.success - exact;
            assert!(diff.abs() <= 1e-4, "sep {separation}, p {p}: {} vs {exact}", found.success);
            worst = worst.max(diff.abs());
        }
    }
    println!("two-state worst |oracle - helstrom| = {worst:e}");
}

#[test]
fn three_state_oracle_matches_closed_form_on_grid() {
    let mut worst: f64 = 0.0;
    for i in 1..=15 {
        let theta = 0.1 * i as f64;
        for j in 0..=10 {
            let p = 0.05 * j as f64;
            let e = MirrorEnsemble::new(theta, p).unwrap();
            let exact = quantum_three(&e).unwrap();
            let found = optimize_three(&e, DEFAULT_GRID_THREE, DEFAULT_REFINE_THREE, 17).unwrap();
            let diff = found.success - exact;
            println!("theta {theta:.1} p {p:.2}: diff {diff:+.3e}");
            assert!(diff.abs() <= 1e-3, "theta {theta}, p {p}: {} vs {exact}", found.success);
            worst = worst.max(diff.abs());
        }
    }
    println!("three-state worst |oracle - closed form| = {worst:e}");
}
