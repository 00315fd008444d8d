//! Rectangle probabilities of the standard bivariate normal.
//!
//! Only the mixed orthant `P(Z1 < z1, Z2 >= z2)` is needed for two-stage
//! boundaries. It is computed by conditioning on `Z1`:
//!
//! ```text
//! P(Z1 < z1, Z2 >= z2) = ∫_{-∞}^{z1} φ(x) · (1 − Φ((z2 − ρx) / √(1 − ρ²))) dx
//! ```

use super::normal::{std_normal_cdf, std_normal_pdf, std_normal_sf};
use super::quadrature::integrate;
use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-15;
// Standard normal mass beyond ±12 is below 2e-33.
const MASS_CUTOFF: f64 = 12.0;

/// `P(Z1 < z1, Z2 >= z2)` for a standard bivariate normal with correlation `rho`.
pub fn bivariate_upper(z1: f64, z2: f64, rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(format!("correlation must satisfy |rho| < 1, got {rho}")));
    }
    if z1.is_nan() || z2.is_nan() {
        return Err(Error::domain("bivariate normal limits must not be NaN"));
    }
    if z1 == f64::NEG_INFINITY || z2 == f64::INFINITY {
        return Ok(0.0);
    }
    if z1 == f64::INFINITY {
        return Ok(std_normal_sf(z2));
    }
    if z2 == f64::NEG_INFINITY {
        return Ok(std_normal_cdf(z1));
    }
    let scale = (1.0 - rho * rho).sqrt();
    let integrand = |x: f64| std_normal_pdf(x) * std_normal_sf((z2 - rho * x) / scale);
    let upper = z1.min(MASS_CUTOFF);
    let lower = if z1 > -MASS_CUTOFF { -MASS_CUTOFF } else { z1 - MASS_CUTOFF };
    // The conditional tail switches on around x = z2/ρ; splitting there keeps
    // the adaptive rule from under-resolving the step.
    let knee = if rho != 0.0 { z2 / rho } else { f64::NAN };
    let value = if knee > lower && knee < upper {
        integrate(integrand, lower, knee, 0.5 * TOLERANCE) + integrate(integrand, knee, upper, 0.5 * TOLERANCE)
    } else {
        integrate(integrand, lower, upper, TOLERANCE)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `P(Z1 < z1, Z2 < z2)`, the complementary piece with `Φ(z1)`.
pub fn bivariate_lower(z1: f64, z2: f64, rho: f64) -> Result<f64> {
    Ok((std_normal_cdf(z1) - bivariate_upper(z1, z2, rho)?).max(0.0))
}
