//! The (θ, p) advantage map for mirror-symmetric triples and its file formats.
//!
//! CSV layout, one row per grid cell in θ-major ascending order:
//!
//! ```text
//! theta,prior,s_quantum,s_nc_bound,gap,advantage
//! ```
//!
//! Floats carry 9 significant digits in `%.9g` style; booleans are `true`/`false`.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{advantage_three, MirrorEnsemble, ADVANTAGE_THRESHOLD};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "theta,prior,s_quantum,s_nc_bound,gap,advantage";

/// One grid sample of the quantum optimum against the noncontextual bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvantageCell {
    pub theta: f64,
    #[serde(rename = "prior")]
    pub prior_p: f64,
    pub s_quantum: f64,
    pub s_nc_bound: f64,
    pub gap: f64,
    pub advantage: bool,
}

impl AdvantageCell {
    pub fn evaluate(theta: f64, prior_p: f64) -> Result<Self> {
        let pair = advantage_three(&MirrorEnsemble::new(theta, prior_p)?)?;
        Ok(AdvantageCell {
            theta,
            prior_p,
            s_quantum: pair.quantum,
            s_nc_bound: pair.noncontextual,
            gap: pair.gap,
            advantage: pair.gap > ADVANTAGE_THRESHOLD,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            format_sig9(self.theta),
            format_sig9(self.prior_p),
            format_sig9(self.s_quantum),
            format_sig9(self.s_nc_bound),
            format_sig9(self.gap),
            self.advantage
        )
    }
}

/// Uniform grid over `θ ∈ [0, π/2]` and `p ∈ [0, ½]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MapConfig {
    pub theta_steps: usize,
    pub prior_steps: usize,
}

impl MapConfig {
    pub fn new(theta_steps: usize, prior_steps: usize) -> Result<Self> {
        if theta_steps < 2 || prior_steps < 2 {
            return Err(Error::domain(format!(
                "grid needs at least 2 steps per axis, got {theta_steps} x {prior_steps}"
            )));
        }
        Ok(MapConfig {
            theta_steps,
            prior_steps,
        })
    }

    pub fn theta_at(&self, i: usize) -> f64 {
        if i + 1 == self.theta_steps {
            FRAC_PI_2
        } else {
            FRAC_PI_2 * i as f64 / (self.theta_steps - 1) as f64
        }
    }

    pub fn prior_at(&self, j: usize) -> f64 {
        if j + 1 == self.prior_steps {
            0.5
        } else {
            0.5 * j as f64 / (self.prior_steps - 1) as f64
        }
    }

    pub fn len(&self) -> usize {
        self.theta_steps * self.prior_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates every cell; `threads` pins the worker count, `None` uses the
/// global pool. Row order does not depend on the thread count.
pub fn scan(config: &MapConfig, threads: Option<usize>) -> Result<Vec<AdvantageCell>> {
    let run = || {
        (0..config.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / config.prior_steps, idx % config.prior_steps);
                AdvantageCell::evaluate(config.theta_at(i), config.prior_at(j))
            })
            .collect::<Result<Vec<_>>>()
    };
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    }
}

pub fn write_csv<W: Write>(cells: &[AdvantageCell], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for cell in cells {
        writeln!(out, "{}", cell.csv_row())?;
    }
    out.flush()
}

#[derive(Serialize)]
struct MapDocument<'a> {
    config: &'a MapConfig,
    cells: &'a [AdvantageCell],
}

pub fn write_json<W: Write>(config: &MapConfig, cells: &[AdvantageCell], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &MapDocument { config, cells })?;
    writeln!(out)?;
    out.flush()
}

/// Locates the prior in `[lo, hi]` where the three-state gap changes sign, by
/// bisection. `None` if the gap has the same sign at both ends.
pub fn gap_crossover(theta: f64, lo: f64, hi: f64, tol: f64) -> Result<Option<f64>> {
    let gap = |p: f64| -> Result<f64> { Ok(AdvantageCell::evaluate(theta, p)?.gap) };
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (gap(a)?, gap(b)?);
    if ga == 0.0 {
        return Ok(Some(a));
    }
    if gb == 0.0 {
        return Ok(Some(b));
    }
    if ga.signum() == gb.signum() {
        return Ok(None);
    }
    let mut ga = ga;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let gm = gap(mid)?;
        if gm == 0.0 {
            return Ok(Some(mid));
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// `%.9g`: 9 significant digits, trailing zeros removed, exponent form
/// outside `1e-4 ≤ |x| < 1e9`.
pub fn format_sig9(x: f64) -> String {
    format_sig(x, 9)
}

fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
