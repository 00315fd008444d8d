use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::scenario::{AlternativeOrder, TrialScenario};
use crate::numerics::SampleSummary;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Identifies an independent random stream within a replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamId {
    Truth,
    Control,
    Arm(usize),
}

impl StreamId {
    fn code(self) -> u64 {
        match self {
            StreamId::Truth => 0,
            StreamId::Control => 1,
            StreamId::Arm(i) => 2 + i as u64,
        }
    }
}

/// Deterministic generator for `(seed, data key, replication, stream)`.
pub fn stream_rng(master_seed: u64, data_hash: u64, replication: u64, stream: StreamId) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for (k, word) in [master_seed, data_hash, replication, stream.code()].into_iter().enumerate() {
        seed[8 * k..8 * k + 8].copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Null/alternative labels for the `K` planned arms; `true` marks a null.
pub fn assign_truth<R: Rng + ?Sized>(scenario: &TrialScenario, rng: &mut R) -> Vec<bool> {
    let k = scenario.arms;
    match scenario.order {
        AlternativeOrder::Random => (0..k).map(|_| rng.random::<f64>() < scenario.pi0).collect(),
        AlternativeOrder::AlternativesFirst => {
            let m1 = scenario.planned_alternatives();
            (0..k).map(|i| i >= m1).collect()
        }
        AlternativeOrder::AlternativesLast => {
            let m0 = k - scenario.planned_alternatives();
            (0..k).map(|i| i < m0).collect()
        }
    }
}

/// `count` outcomes from `N(mean, 1)`.
pub fn normal_sample<R: Rng + ?Sized>(rng: &mut R, mean: f64, count: usize) -> Vec<f64> {
    (0..count).map(|_| mean + rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Control outcomes indexed by recruitment time, generated on demand.
#[derive(Debug)]
pub struct ControlStream {
    rng: ChaCha8Rng,
    values: Vec<f64>,
    prefix: Vec<f64>,
    prefix_sq: Vec<f64>,
}

impl ControlStream {
    pub fn new(rng: ChaCha8Rng) -> Self {
        ControlStream { rng, values: Vec::new(), prefix: vec![0.0], prefix_sq: vec![0.0] }
    }

    fn extend_to(&mut self, to: usize) {
        while self.values.len() < to {
            let x = self.rng.sample::<f64, _>(StandardNormal);
            self.values.push(x);
            let (s, q) = (self.prefix[self.prefix.len() - 1], self.prefix_sq[self.prefix_sq.len() - 1]);
            self.prefix.push(s + x);
            self.prefix_sq.push(q + x * x);
        }
    }

    /// Controls recruited in `[from, to)`.
    pub fn window(&mut self, from: u64, to: u64) -> &[f64] {
        self.extend_to(to as usize);
        &self.values[from as usize..to as usize]
    }

    /// Summary of `[from, to)` from running sums.
    pub fn summary(&mut self, from: u64, to: u64) -> SampleSummary {
        let (from, to) = (from as usize, to as usize);
        self.extend_to(to);
        let n = to - from;
        if n == 0 {
            return SampleSummary { n, mean: 0.0, sum_sq_dev: 0.0 };
        }
        let sum = self.prefix[to] - self.prefix[from];
        let mean = sum / n as f64;
        let sum_sq_dev = ((self.prefix_sq[to] - self.prefix_sq[from]) - sum * mean).max(0.0);
        SampleSummary { n, mean, sum_sq_dev }
    }

    pub fn recruited(&self) -> usize {
        self.values.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = stream_rng(1, 2, 3, StreamId::Arm(4));
        let mut b = stream_rng(1, 2, 3, StreamId::Arm(4));
        let mut c = stream_rng(1, 2, 3, StreamId::Arm(5));
        let xa: Vec<u64> = (0..8).map(|_| a.random()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.random()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.random()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn deterministic_orders() {
        let s = TrialScenario { arms: 10, pi0: 0.7, order: AlternativeOrder::AlternativesFirst, ..Default::default() };
        let mut rng = stream_rng(0, 0, 0, StreamId::Truth);
        let t = assign_truth(&s, &mut rng);
        assert_eq!(t, [false, false, false, true, true, true, true, true, true, true]);
        let s = TrialScenario { order: AlternativeOrder::AlternativesLast, ..s };
        let t = assign_truth(&s, &mut rng);
        assert_eq!(t, [true, true, true, true, true, true, true, false, false, false]);
    }

    #[test]
    fn random_order_null_fraction() {
        let s = TrialScenario { arms: 200_000, pi0: 0.3, ..Default::default() };
        let mut rng = stream_rng(9, 9, 9, StreamId::Truth);
        let t = assign_truth(&s, &mut rng);
        let frac = t.iter().filter(|&&x| x).count() as f64 / t.len() as f64;
        let se = (0.3f64 * 0.7 / 200_000.0).sqrt();
        assert!((frac - 0.3).abs() < 4.0 * se, "{frac}");
    }

    #[test]
    fn control_windows_are_stable() {
        let mut c = ControlStream::new(stream_rng(1, 1, 1, StreamId::Control));
        let early = c.window(5, 10).to_vec();
        let late = c.window(0, 40).to_vec();
        assert_eq!(&late[5..10], &early[..]);
        assert_eq!(c.recruited(), 40);
    }

    #[test]
    fn running_summary_matches_direct() {
        let mut c = ControlStream::new(stream_rng(2, 2, 2, StreamId::Control));
        for (from, to) in [(0, 25), (100, 150), (0, 2000), (1975, 2000)] {
            let direct = SampleSummary::from_slice(c.window(from, to));
            let fast = c.summary(from, to);
            assert_eq!(fast.n, direct.n);
            assert!((fast.mean - direct.mean).abs() < 1e-12);
            assert!((fast.sum_sq_dev - direct.sum_sq_dev).abs() < 1e-9 * direct.sum_sq_dev.max(1.0));
        }
    }

    #[test]
    fn normal_sample_moments() {
        let mut rng = stream_rng(3, 3, 3, StreamId::Arm(0));
        let xs = normal_sample(&mut rng, 0.6, 100_000);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((mean - 0.6).abs() < 0.015);
        assert!((var - 1.0).abs() < 0.02);
    }
}
