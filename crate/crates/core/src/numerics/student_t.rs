//! Student t distribution via the regularized incomplete beta function.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function I_x(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("incomplete beta requires a, b > 0 (a={a}, b={b})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("incomplete beta requires 0 <= x <= 1, got {x}")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front.exp() * beta_fraction(x, a, b)? / a)
    } else {
        Ok(1.0 - ln_front.exp() * beta_fraction(1.0 - x, b, a)? / b)
    }
}

// Continued fraction for I_x(a,b), modified Lentz.
fn beta_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 20_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Numerical(format!("incomplete beta fraction did not converge (x={x}, a={a}, b={b})")))
}

/// Upper tail P(T >= t) of Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::domain(format!("t distribution requires df > 0, got {df}")));
    }
    if t.is_nan() {
        return Err(Error::domain("t statistic is NaN"));
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 0.0 } else { 1.0 });
    }
    let x = df / (df + t * t);
    let half_tail = 0.5 * reg_inc_beta(x, 0.5 * df, 0.5)?;
    Ok(if t > 0.0 { half_tail } else { 1.0 - half_tail })
}

/// Distribution function P(T <= t) of Student's t.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::domain(format!("t distribution requires df > 0, got {df}")));
    }
    if t.is_nan() {
        return Err(Error::domain("t statistic is NaN"));
    }
    student_t_sf(-t, df)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;

    // Oracle: composite Simpson integration of the t density from 0 to t.
    fn t_cdf_quadrature(t: f64, df: f64) -> f64 {
        let ln_c = ln_gamma((df + 1.0) / 2.0)
            - ln_gamma(df / 2.0)
            - 0.5 * (df * std::f64::consts::PI).ln();
        let dens = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
        let n = 20_000;
        let h = t / n as f64;
        let mut s = dens(0.0) + dens(t);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * dens(k as f64 * h);
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_at_zero() {
        assert_eq!(student_t_cdf(0.0, 10.0).unwrap(), 0.5);
    }

    #[test]
    fn matches_density_quadrature() {
        let want = t_cdf_quadrature(2.0, 50.0);
        assert!((student_t_cdf(2.0, 50.0).unwrap() - want).abs() < 1e-10);
        for &(t, df) in &[(0.7, 3.0), (1.5, 8.0), (-2.3, 48.0), (3.1, 98.0)] {
            let want = t_cdf_quadrature(t, df);
            assert!((student_t_cdf(t, df).unwrap() - want).abs() < 1e-10, "t={t} df={df}");
        }
    }

    #[test]
    fn normal_limit() {
        let got = student_t_cdf(1.96, 1e6).unwrap();
        assert!((got - std_normal_cdf(1.96)).abs() < 1e-4);
    }

    #[test]
    fn cauchy_closed_form() {
        // df = 1: F(t) = 1/2 + atan(t)/π.
        for &t in &[-3.0, -0.4, 0.9, 12.0] {
            let want = 0.5 + f64::atan(t) / std::f64::consts::PI;
            assert!((student_t_cdf(t, 1.0).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_df() {
        assert!(matches!(student_t_cdf(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(student_t_cdf(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn incomplete_beta_edges() {
        assert_eq!(reg_inc_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(reg_inc_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
        // I_x(1, b) = 1 - (1-x)^b
        let x: f64 = 0.3;
        assert!((reg_inc_beta(x, 1.0, 4.0).unwrap() - (1.0 - (1.0 - x).powi(4))).abs() < 1e-14);
    }
}
