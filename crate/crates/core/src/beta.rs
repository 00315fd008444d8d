//! Budget sequences β_i for the LOND rule.
//!
//! The descending sequence is `β_j = Cα·ln(max(j, 2)) / (j·exp(√ln j))`. With an
//! upper bound `N` on the number of hypotheses the first `N` terms are rescaled
//! proportionally so they sum to α.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Calibration constant of the descending sequence.
pub const DEFAULT_C: f64 = 0.077_208_38;

/// Unnormalised descending term.
pub fn beta_unbounded(j: usize, alpha: f64) -> f64 {
    beta_unbounded_with(j, alpha, DEFAULT_C)
}

fn beta_unbounded_with(j: usize, alpha: f64, c: f64) -> f64 {
    assert!(j >= 1, "hypothesis indices start at 1");
    let jf = j as f64;
    let ln_j = jf.ln();
    c * alpha * (jf.max(2.0)).ln() / (jf * ln_j.sqrt().exp())
}

fn descending_sum(n: usize, c: f64) -> f64 {
    let mut acc = NeumaierSum::default();
    for k in 1..=n {
        acc.add(beta_unbounded_with(k, 1.0, c));
    }
    acc.value()
}

/// Descending term rescaled so that the first `n_bound` terms sum to `alpha`.
pub fn beta_bounded(j: usize, alpha: f64, n_bound: usize) -> Result<f64> {
    check_bounded(j, n_bound)?;
    Ok(beta_unbounded_with(j, alpha, DEFAULT_C) / descending_sum(n_bound, DEFAULT_C))
}

/// `alpha / n_bound` for every `j <= n_bound`.
pub fn beta_equal(j: usize, alpha: f64, n_bound: usize) -> Result<f64> {
    check_bounded(j, n_bound)?;
    Ok(alpha / n_bound as f64)
}

/// Adjustment for arbitrary dependence: `base / H_j` with `H_j` the j-th harmonic number.
pub fn beta_dependent(j: usize, base: f64) -> f64 {
    base / harmonic(j)
}

/// `H_j = Σ_{k=1..j} 1/k`.
pub fn harmonic(j: usize) -> f64 {
    let mut acc = NeumaierSum::default();
    for k in 1..=j {
        acc.add(1.0 / k as f64);
    }
    acc.value()
}

fn check_bounded(j: usize, n_bound: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::domain("hypothesis indices start at 1"));
    }
    if n_bound == 0 {
        return Err(Error::domain("upper bound N must be positive"));
    }
    if j > n_bound {
        return Err(Error::domain(format!(
            "hypothesis {j} exceeds the upper bound N = {n_bound}; no budget remains"
        )));
    }
    Ok(())
}

/// The four ways of generating β_i.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaMode {
    UnboundedDescending,
    BoundedDescending(usize),
    Equal(usize),
    DependentAdjusted(Box<BetaMode>),
}

impl BetaMode {
    /// The hypothesis-count bound implied by the mode, if any.
    pub fn bound(&self) -> Option<usize> {
        match self {
            BetaMode::UnboundedDescending => None,
            BetaMode::BoundedDescending(n) | BetaMode::Equal(n) => Some(*n),
            BetaMode::DependentAdjusted(base) => base.bound(),
        }
    }
}

/// An immutable β sequence. Normalising constants are computed once at
/// construction; individual terms are evaluated on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSchedule {
    mode: BetaMode,
    alpha: f64,
    c: f64,
    // α / Σ_{k≤N} (term at α = 1) for the bounded descending mode.
    scale: f64,
}

impl BetaSchedule {
    pub fn new(mode: BetaMode, alpha: f64) -> Result<Self> {
        Self::with_constant(mode, alpha, DEFAULT_C)
    }

    pub fn with_constant(mode: BetaMode, alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("constant C must be positive, got {c}")));
        }
        let scale = match root_mode(&mode)? {
            BetaMode::BoundedDescending(n) => alpha / descending_sum(*n, c),
            _ => alpha,
        };
        Ok(BetaSchedule { mode, alpha, c, scale })
    }

    pub fn unbounded(alpha: f64) -> Result<Self> {
        Self::new(BetaMode::UnboundedDescending, alpha)
    }

    pub fn bounded(alpha: f64, n_bound: usize) -> Result<Self> {
        Self::new(BetaMode::BoundedDescending(n_bound), alpha)
    }

    pub fn equal(alpha: f64, n_bound: usize) -> Result<Self> {
        Self::new(BetaMode::Equal(n_bound), alpha)
    }

    pub fn dependent(base: BetaMode, alpha: f64) -> Result<Self> {
        Self::new(BetaMode::DependentAdjusted(Box::new(base)), alpha)
    }

    pub fn mode(&self) -> &BetaMode {
        &self.mode
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bound(&self) -> Option<usize> {
        self.mode.bound()
    }

    /// β_j for `j >= 1`.
    pub fn beta(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(Error::domain("hypothesis indices start at 1"));
        }
        self.term(&self.mode, j)
    }

    fn term(&self, mode: &BetaMode, j: usize) -> Result<f64> {
        match mode {
            BetaMode::UnboundedDescending => Ok(beta_unbounded_with(j, self.alpha, self.c)),
            BetaMode::BoundedDescending(n) => {
                check_bounded(j, *n)?;
                Ok(beta_unbounded_with(j, 1.0, self.c) * self.scale)
            }
            BetaMode::Equal(n) => beta_equal(j, self.alpha, *n),
            BetaMode::DependentAdjusted(base) => Ok(beta_dependent(j, self.term(base, j)?)),
        }
    }

    /// The first `count` terms.
    pub fn take(&self, count: usize) -> Result<Vec<f64>> {
        (1..=count).map(|j| self.beta(j)).collect()
    }
}

fn root_mode(mode: &BetaMode) -> Result<&BetaMode> {
    match mode {
        BetaMode::DependentAdjusted(base) => match base.as_ref() {
            BetaMode::DependentAdjusted(_) => Err(Error::domain("dependence adjustment cannot be nested")),
            other => {
                check_mode_bound(other)?;
                Ok(other)
            }
        },
        other => {
            check_mode_bound(other)?;
            Ok(other)
        }
    }
}

fn check_mode_bound(mode: &BetaMode) -> Result<()> {
    match mode {
        BetaMode::BoundedDescending(0) | BetaMode::Equal(0) => Err(Error::domain("upper bound N must be positive")),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descending_reported_values() {
        let want = [0.00134, 0.00029, 0.00025];
        for (j, w) in want.iter().enumerate() {
            assert!((beta_unbounded(j + 1, 0.025) - w).abs() < 5e-6);
        }
    }

    #[test]
    fn natural_log_confirmed_by_first_term() {
        assert!((beta_unbounded(1, 0.025) - DEFAULT_C * 0.025 * 2f64.ln()).abs() < 1e-18);
    }

    #[test]
    fn bounded_first_term() {
        assert!((beta_bounded(1, 0.025, 1000).unwrap() - 0.00446).abs() < 5e-6);
        assert!((beta_bounded(3, 0.025, 1000).unwrap() - 0.00083).abs() < 5e-6);
    }

    #[test]
    fn bounded_sums_to_alpha() {
        for &n in &[1usize, 3, 10, 100, 1000] {
            let s = BetaSchedule::bounded(0.025, n).unwrap();
            let mut acc = NeumaierSum::default();
            for b in s.take(n).unwrap() {
                acc.add(b);
            }
            assert!((acc.value() - 0.025).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn bounded_beyond_n_is_error() {
        assert!(beta_bounded(11, 0.025, 10).is_err());
        assert!(BetaSchedule::bounded(0.025, 10).unwrap().beta(11).is_err());
        assert!(BetaSchedule::equal(0.025, 10).unwrap().beta(11).is_err());
    }

    #[test]
    fn equal_values() {
        assert!((beta_equal(1, 0.05, 3).unwrap() - 0.0167).abs() < 5e-5);
        assert_eq!(beta_equal(7, 0.025, 1000).unwrap(), 0.000025);
        assert_eq!(beta_equal(1, 0.025, 1).unwrap(), 0.025);
    }

    #[test]
    fn dependent_values() {
        assert_eq!(beta_dependent(1, 0.004), 0.004);
        assert!((beta_dependent(2, 0.003) - 0.002).abs() < 1e-18);
        let s = BetaSchedule::dependent(BetaMode::Equal(10), 0.025).unwrap();
        // H_4 = 1 + 1/2 + 1/3 + 1/4 = 25/12
        assert!((s.beta(4).unwrap() - 0.0025 / (25.0 / 12.0)).abs() < 1e-16);
    }

    #[test]
    fn descending_partial_sums_stay_below_alpha() {
        let alpha = 0.025;
        let mut acc = NeumaierSum::default();
        for j in 1..=1_000_000 {
            acc.add(beta_unbounded(j, alpha));
        }
        assert!(acc.value() < alpha);
    }

    #[test]
    fn eventually_decreasing() {
        for j in 2..5000 {
            assert!(beta_unbounded(j + 1, 0.025) < beta_unbounded(j, 0.025));
        }
    }

    #[test]
    fn zero_index_rejected() {
        assert!(BetaSchedule::unbounded(0.025).unwrap().beta(0).is_err());
        assert!(BetaSchedule::unbounded(1.5).is_err());
    }
}
