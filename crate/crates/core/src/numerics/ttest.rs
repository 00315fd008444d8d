use super::student_t::student_t_sf;
use super::Probability;
use crate::error::{Error, Result};

/// Size, mean and centred sum of squares of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub sum_sq_dev: f64,
}

impl SampleSummary {
    pub fn from_slice(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return SampleSummary { n, mean: 0.0, sum_sq_dev: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sum_sq_dev = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        SampleSummary { n, mean, sum_sq_dev }
    }
}

/// One-sided pooled-variance two-sample t-test of `H0: μ_treatment <= μ_control`.
pub fn two_sample_t_pvalue(treatment: &[f64], control: &[f64]) -> Result<Probability> {
    pooled_t_pvalue(&SampleSummary::from_slice(treatment), &SampleSummary::from_slice(control))
}

/// Same test as [`two_sample_t_pvalue`] from precomputed summaries.
pub fn pooled_t_pvalue(treatment: &SampleSummary, control: &SampleSummary) -> Result<Probability> {
    if treatment.n < 2 || control.n < 2 {
        return Err(Error::DegenerateSample(format!(
            "each group needs at least 2 observations (treatment {}, control {})",
            treatment.n, control.n
        )));
    }
    let df = (treatment.n + control.n - 2) as f64;
    let pooled_var = (treatment.sum_sq_dev + control.sum_sq_dev) / df;
    if !(pooled_var > 0.0) || !pooled_var.is_finite() {
        return Err(Error::DegenerateSample(format!("pooled variance is {pooled_var}")));
    }
    let se = (pooled_var * (1.0 / treatment.n as f64 + 1.0 / control.n as f64)).sqrt();
    let t = (treatment.mean - control.mean) / se;
    Probability::new(student_t_sf(t, df)?)
}
