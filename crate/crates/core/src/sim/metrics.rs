use crate::sum::NeumaierSum;

/// Running first and second moments with compensated sums.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    sum: NeumaierSum,
    sum_sq: NeumaierSum,
}

impl Moments {
    pub fn add(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        Moments {
            count: self.count + other.count,
            sum: self.sum.merge(&other.sum),
            sum_sq: self.sum_sq.merge(&other.sum_sq),
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// NaN when empty.
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum.value() / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let s = self.sum.value();
        ((self.sum_sq.value() - s * s / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Per-replication quantities fed to the accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationMetrics {
    /// `None` when the replication had no true alternative.
    pub power: Option<f64>,
    pub fdp: f64,
    pub saved_pct: f64,
    pub saved_pct_stage2: f64,
    pub rejected_alternatives: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricsAccumulator {
    pub replications: u64,
    pub power: Moments,
    pub fdp: Moments,
    pub saved_pct: Moments,
    pub saved_pct_stage2: Moments,
    pub rejected_alternatives: Moments,
}

impl MetricsAccumulator {
    pub fn add(&mut self, m: &ReplicationMetrics) {
        self.replications += 1;
        if let Some(p) = m.power {
            self.power.add(p);
        }
        self.fdp.add(m.fdp);
        self.saved_pct.add(m.saved_pct);
        self.saved_pct_stage2.add(m.saved_pct_stage2);
        self.rejected_alternatives.add(m.rejected_alternatives);
    }

    pub fn merge(&self, other: &MetricsAccumulator) -> MetricsAccumulator {
        MetricsAccumulator {
            replications: self.replications + other.replications,
            power: self.power.merge(&other.power),
            fdp: self.fdp.merge(&other.fdp),
            saved_pct: self.saved_pct.merge(&other.saved_pct),
            saved_pct_stage2: self.saved_pct_stage2.merge(&other.saved_pct_stage2),
            rejected_alternatives: self.rejected_alternatives.merge(&other.rejected_alternatives),
        }
    }

    pub fn summary(&self) -> MetricsSummary {
        MetricsSummary {
            replications: self.replications,
            power_replications: self.power.count(),
            power: self.power.mean(),
            power_se: self.power.std_error(),
            fdr: self.fdp.mean(),
            fdr_se: self.fdp.std_error(),
            saved_pct: self.saved_pct.mean(),
            saved_pct_se: self.saved_pct.std_error(),
            saved_pct_stage2: self.saved_pct_stage2.mean(),
            mean_rejected_alternatives: self.rejected_alternatives.mean(),
            mean_rejected_alternatives_se: self.rejected_alternatives.std_error(),
        }
    }
}

/// Point estimates with Monte-Carlo standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSummary {
    pub replications: u64,
    /// Replications with at least one alternative; power averages over these.
    pub power_replications: u64,
    pub power: f64,
    pub power_se: f64,
    pub fdr: f64,
    pub fdr_se: f64,
    pub saved_pct: f64,
    pub saved_pct_se: f64,
    pub saved_pct_stage2: f64,
    pub mean_rejected_alternatives: f64,
    pub mean_rejected_alternatives_se: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn metric(x: f64) -> ReplicationMetrics {
        ReplicationMetrics {
            power: if x > 0.5 { Some(x) } else { None },
            fdp: x / 2.0,
            saved_pct: 100.0 * x,
            saved_pct_stage2: 200.0 * x,
            rejected_alternatives: (10.0 * x).floor(),
        }
    }

    fn fold(xs: &[f64]) -> MetricsAccumulator {
        let mut acc = MetricsAccumulator::default();
        for &x in xs {
            acc.add(&metric(x));
        }
        acc
    }

    #[test]
    fn moments_match_two_pass() {
        let xs = [1.0, 2.5, -3.0, 4.25, 0.5];
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.add(x));
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((m.mean() - mean).abs() < 1e-15);
        assert!((m.variance() - var).abs() < 1e-13);
        assert!((m.std_error() - (var / 5.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn empty_power_is_nan() {
        let acc = fold(&[0.1, 0.2]);
        let s = acc.summary();
        assert!(s.power.is_nan());
        assert_eq!(s.power_replications, 0);
        assert_eq!(s.replications, 2);
    }

    proptest! {
        #[test]
        fn merge_commutes(a in prop::collection::vec(0.0f64..1.0, 0..40), b in prop::collection::vec(0.0f64..1.0, 0..40)) {
            let (x, y) = (fold(&a), fold(&b));
            prop_assert_eq!(x.merge(&y), y.merge(&x));
        }

        #[test]
        fn merge_associates(a in prop::collection::vec(0.0f64..1.0, 0..30), b in prop::collection::vec(0.0f64..1.0, 0..30), c in prop::collection::vec(0.0f64..1.0, 0..30)) {
            let (x, y, z) = (fold(&a), fold(&b), fold(&c));
            let left = x.merge(&y).merge(&z).summary();
            let right = x.merge(&y.merge(&z)).summary();
            prop_assert_eq!(left.replications, right.replications);
            for (l, r) in [(left.fdr, right.fdr), (left.saved_pct, right.saved_pct), (left.power, right.power)] {
                prop_assert!((l.is_nan() && r.is_nan()) || (l - r).abs() <= 1e-12 * (1.0 + l.abs()));
            }
        }

        #[test]
        fn merge_matches_sequential(a in prop::collection::vec(0.0f64..1.0, 1..40), b in prop::collection::vec(0.0f64..1.0, 1..40)) {
            let joined: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
            let seq = fold(&joined).summary();
            let merged = fold(&a).merge(&fold(&b)).summary();
            prop_assert!((seq.fdr - merged.fdr).abs() < 1e-13);
            prop_assert!((seq.saved_pct_se - merged.saved_pct_se).abs() < 1e-10);
        }
    }
}
