//! Lan–DeMets spending functions and two-stage boundaries on the one-sided
//! nominal p-value scale.
//!
//! With one interim look at information fraction `t1` the stage-wise
//! statistics `Z1` (interim) and `Z2` (cumulative) are standard bivariate
//! normal with correlation `√t1`. A boundary pair `(α1, α2)` exhausts a level
//! `α` when
//!
//! ```text
//! (1 − Φ(z1)) + P(Z1 < z1, Z2 >= z2) = α,   z_k = Φ⁻¹(1 − α_k).
//! ```
//!
//! Efficacy boundaries never account for futility stopping (non-binding).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::numerics::{bivariate_upper, roots, std_normal_sf, std_normal_upper_quantile};

/// Residual tolerance of the second-stage root on the probability scale.
pub const ROOT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpendingKind {
    /// O'Brien–Fleming type: `2·(1 − Φ(Φ⁻¹(1 − α/2)/√t))`.
    ObrienFleming,
    /// Pocock type: `α·ln(1 + (e − 1)·t)`.
    Pocock,
}

impl SpendingKind {
    pub fn label(self) -> &'static str {
        match self {
            SpendingKind::ObrienFleming => "OBF",
            SpendingKind::Pocock => "PO",
        }
    }
}

impl fmt::Display for SpendingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SpendingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "obf" | "of" | "obrien-fleming" | "obrien_fleming" => Ok(SpendingKind::ObrienFleming),
            "po" | "pocock" => Ok(SpendingKind::Pocock),
            other => Err(Error::domain(format!("unknown spending function `{other}` (expected obf or po)"))),
        }
    }
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("level must lie in (0, 1), got {alpha}")))
    }
}

fn check_fraction(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("information fraction must lie in (0, 1], got {t}")))
    }
}

/// Cumulative level spent by information fraction `t`.
pub fn spend(kind: SpendingKind, alpha: f64, t: f64) -> Result<f64> {
    check_level(alpha)?;
    check_fraction(t)?;
    if t == 1.0 {
        return Ok(alpha);
    }
    Ok(match kind {
        SpendingKind::ObrienFleming => {
            let z = std_normal_upper_quantile(0.5 * alpha)?;
            2.0 * std_normal_sf(z / t.sqrt())
        }
        SpendingKind::Pocock => alpha * (1.0 + (std::f64::consts::E - 1.0) * t).ln(),
    })
}

/// Interim and final nominal boundaries exhausting `nominal_level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPair {
    pub alpha1: f64,
    pub alpha2: f64,
    pub z1: f64,
    pub z2: f64,
    pub t1: f64,
    pub nominal_level: f64,
}

impl BoundaryPair {
    /// Probability under the null of crossing at either look.
    pub fn crossing_probability(&self) -> Result<f64> {
        crossing_probability(self.z1, self.z2, self.t1)
    }
}

/// `(1 − Φ(z1)) + P(Z1 < z1, Z2 >= z2)` with correlation `√t1`.
pub fn crossing_probability(z1: f64, z2: f64, t1: f64) -> Result<f64> {
    check_fraction(t1)?;
    Ok(std_normal_sf(z1) + bivariate_upper(z1, z2, t1.sqrt())?)
}

// z2 with P(Z1 < z1, Z2 >= z2) = target.
fn second_stage_z(z1: f64, target: f64, total: f64, t1: f64) -> Result<f64> {
    let rho = t1.sqrt();
    let excess = |z2: f64| bivariate_upper(z1, z2, rho).map(|p| p - target);
    // P(Z1 < z1, Z2 >= z) <= P(Z2 >= z), and at z = Φ⁻¹(1 − total) it is >= target.
    let lo = std_normal_upper_quantile(total)?;
    let mut hi = lo.max(0.0) + 8.0;
    while excess(hi)? > 0.0 {
        hi += 4.0;
        if hi > 40.0 {
            return Err(Error::Numerical(format!("cannot bracket second-stage boundary for target {target}")));
        }
    }
    let mut failure = None;
    let root = roots::brent(
        |z2| match excess(z2) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        lo,
        hi,
        1e-13,
        ROOT_TOLERANCE,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

/// Boundary pair for `alpha` with interim spending from `kind` at `t1`.
pub fn solve_two_stage(kind: SpendingKind, alpha: f64, t1: f64) -> Result<BoundaryPair> {
    check_level(alpha)?;
    if !(t1 > 0.0 && t1 < 1.0) {
        return Err(Error::domain(format!("interim information fraction must lie in (0, 1), got {t1}")));
    }
    let alpha1 = spend(kind, alpha, t1)?;
    if !(alpha1 > 0.0 && alpha1 < alpha) {
        return Err(Error::Numerical(format!(
            "{kind} spending at t = {t1} gives interim level {alpha1}, not inside (0, {alpha})"
        )));
    }
    let z1 = std_normal_upper_quantile(alpha1)?;
    let z2 = second_stage_z(z1, alpha - alpha1, alpha, t1)?;
    Ok(BoundaryPair { alpha1, alpha2: std_normal_sf(z2), z1, z2, t1, nominal_level: alpha })
}

/// Final-stage boundary that, together with an interim boundary `alpha1_spent`
/// already applied, exhausts the raised level `alpha_new`.
pub fn exhaust_increment(alpha1_spent: f64, alpha_new: f64, t1: f64) -> Result<f64> {
    check_level(alpha_new)?;
    if !(alpha1_spent > 0.0) {
        return Err(Error::domain(format!("interim boundary must be positive, got {alpha1_spent}")));
    }
    if !(t1 > 0.0 && t1 < 1.0) {
        return Err(Error::domain(format!("interim information fraction must lie in (0, 1), got {t1}")));
    }
    if alpha_new <= alpha1_spent {
        return Err(Error::domain(format!(
            "no increment to spend: new level {alpha_new} does not exceed interim boundary {alpha1_spent}"
        )));
    }
    let z1 = std_normal_upper_quantile(alpha1_spent)?;
    let z2 = second_stage_z(z1, alpha_new - alpha1_spent, alpha_new, t1)?;
    Ok(std_normal_sf(z2))
}

type PairKey = (SpendingKind, u64, u64);
type IncrementKey = (u64, u64, u64);

/// Thread-safe memo of solved boundaries. Cached values are exactly the
/// values a fresh solve returns.
#[derive(Debug, Default)]
pub struct BoundaryCache {
    pairs: RwLock<HashMap<PairKey, BoundaryPair>>,
    increments: RwLock<HashMap<IncrementKey, f64>>,
}

impl BoundaryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve_two_stage(&self, kind: SpendingKind, alpha: f64, t1: f64) -> Result<BoundaryPair> {
        let key = (kind, alpha.to_bits(), t1.to_bits());
        if let Some(pair) = self.pairs.read().expect("boundary cache poisoned").get(&key) {
            return Ok(*pair);
        }
        let pair = solve_two_stage(kind, alpha, t1)?;
        self.pairs.write().expect("boundary cache poisoned").insert(key, pair);
        Ok(pair)
    }

    pub fn exhaust_increment(&self, alpha1_spent: f64, alpha_new: f64, t1: f64) -> Result<f64> {
        let key = (alpha1_spent.to_bits(), alpha_new.to_bits(), t1.to_bits());
        if let Some(v) = self.increments.read().expect("boundary cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = exhaust_increment(alpha1_spent, alpha_new, t1)?;
        self.increments.write().expect("boundary cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.pairs.read().expect("boundary cache poisoned").len()
            + self.increments.read().expect("boundary cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
