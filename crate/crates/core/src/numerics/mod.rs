//! Numerical kernels: normal and Student t distributions, the bivariate
//! normal orthant used by two-stage boundaries, and the two-sample t-test.

mod bivariate;
mod normal;
pub(crate) mod quadrature;
pub(crate) mod roots;
mod student_t;
mod ttest;

pub use bivariate::{bivariate_lower, bivariate_upper};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf, std_normal_upper_quantile};
pub use student_t::{ln_gamma, reg_inc_beta, student_t_cdf, student_t_sf};
pub use ttest::{pooled_t_pvalue, two_sample_t_pvalue, SampleSummary};

use crate::error::{Error, Result};
use std::fmt;

/// A probability (p-value, level, boundary) in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability must lie in [0, 1], got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}
