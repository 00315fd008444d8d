//! Standard normal density, distribution and quantile functions.
//!
//! The distribution function is evaluated with Marsaglia's Taylor series in the
//! centre (`|z| < 3`) and with the Laplace continued fraction for the Mills
//! ratio in the tails, which keeps relative accuracy in the extreme lower tail.

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
const SERIES_LIMIT: f64 = 3.0;

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function Φ(z).
///
/// Saturates to exactly 0 or 1 once the tail mass is below the smallest
/// representable increment.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z <= -SERIES_LIMIT {
        lower_tail(z)
    } else if z >= SERIES_LIMIT {
        1.0 - lower_tail(-z)
    } else {
        0.5 + std_normal_pdf(z) * central_series(z)
    }
}

/// Upper-tail probability 1 − Φ(z), accurate in relative terms for large `z`.
pub fn std_normal_sf(z: f64) -> f64 {
    std_normal_cdf(-z)
}

fn central_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 1.0;
    loop {
        term *= z2 / (2.0 * k + 1.0);
        let next = sum + term;
        if next == sum {
            return sum;
        }
        sum = next;
        k += 1.0;
    }
}

// Φ(z) for z <= -3 via φ(|z|) / (|z| + 1/(|z| + 2/(|z| + ...))), modified Lentz.
fn lower_tail(z: f64) -> f64 {
    let x = -z;
    if x > 38.5 {
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..2000 {
        let a = k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    std_normal_pdf(x) / f
}

/// Inverse of [`std_normal_cdf`] on the open interval (0, 1).
///
/// Starts from Acklam's rational approximation and polishes the result with
/// Halley steps against the lower tail so that small probabilities keep full
/// relative precision.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("normal quantile requires 0 < p < 1, got {p}")));
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1].
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

/// `z` such that `1 − Φ(z) = alpha`.
pub fn std_normal_upper_quantile(alpha: f64) -> Result<f64> {
    std_normal_quantile(alpha).map(|z| -z)
}

// p in (0, 0.5].
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam(p);
    for _ in 0..3 {
        let err = std_normal_cdf(x) - p;
        let u = err * SQRT_2PI * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: Maclaurin series of erf, fine for |x| <= 3 in f64.
    fn erf_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut pow = x;
        let mut fact = 1.0;
        for n in 0..200 {
            let term = pow / (fact * (2 * n + 1) as f64);
            if n % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
            pow *= x * x;
            fact *= (n + 1) as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    fn cdf_oracle(z: f64) -> f64 {
        0.5 * (1.0 + erf_series(z / std::f64::consts::SQRT_2))
    }

    #[test]
    fn centre_and_saturation() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(40.0) - 1.0).abs() <= 1e-15);
        assert_eq!(std_normal_cdf(-40.0), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn matches_erf_series() {
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        let mut z = -4.0;
        while z <= 4.0 {
            let want = cdf_oracle(z);
            assert!((std_normal_cdf(z) - want).abs() < 1e-12, "z={z}");
            z += 0.01;
        }
    }

    #[test]
    fn tail_relative_accuracy() {
        // Mills-ratio asymptotics: Φ(-z) ≈ φ(z)/z (1 - 1/z² + 3/z⁴ - 15/z⁶ + 105/z⁸).
        for &z in &[10.0_f64, 15.0, 25.0] {
            let z2 = z * z;
            let approx = std_normal_pdf(z) / z
                * (1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2)
                    + 105.0 / (z2 * z2 * z2 * z2));
            let rel = (std_normal_cdf(-z) - approx).abs() / approx;
            assert!(rel < 1e-6, "z={z} rel={rel}");
        }
    }

    #[test]
    fn series_and_fraction_agree_at_switch() {
        let below = 0.5 + std_normal_pdf(-3.0) * central_series(-3.0);
        assert!((below - lower_tail(-3.0)).abs() < 1e-15);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.975).unwrap() - 1.959964).abs() < 1e-5);
        assert!((std_normal_quantile(std_normal_cdf(1.3)).unwrap() - 1.3).abs() < 1e-9);
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_round_trip_grid() {
        let mut lp = -8.0_f64;
        while lp < 0.0 {
            for p in [10f64.powf(lp), 1.0 - 10f64.powf(lp)] {
                if p <= 0.0 || p >= 1.0 {
                    continue;
                }
                let q = std_normal_quantile(p).unwrap();
                assert!((std_normal_cdf(q) - p).abs() < 1e-10, "p={p}");
            }
            lp += 0.05;
        }
    }
}
