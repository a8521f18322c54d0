//! Closed forms for the Gaussian relay Y = X + Z, Y1 = X + Z1 with equal
//! noise variances and correlation rho = +1 or -1.
//!
//! For rho = -1 the relay description Yhat1 = Y1 + U with U ~ N(0, sigma2)
//! traces the parametric compress-and-forward curve (R0(sigma2), R*(sigma2)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianRelaySpec {
    #[serde(rename = "P")]
    pub power: f64,
    #[serde(rename = "N")]
    pub noise: f64,
    pub rho: f64,
}

impl GaussianRelaySpec {
    pub fn new(power: f64, noise: f64, rho: f64) -> Result<Self> {
        let spec = Self { power, noise, rho };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power P must be positive, got {}",
                self.power
            )));
        }
        if !(self.noise > 0.0) || !self.noise.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise N must be positive, got {}",
                self.noise
            )));
        }
        if self.rho == 1.0 || self.rho == -1.0 {
            Ok(())
        } else if self.rho == 0.0 {
            Err(Error::UnsupportedCorrelation(
                self.rho,
                "the capacity for independent noises is an open problem",
            ))
        } else {
            Err(Error::UnsupportedCorrelation(
                self.rho,
                "only rho = +1 and rho = -1 have known capacity",
            ))
        }
    }

    fn require_anticorrelated(&self) -> Result<()> {
        self.check()?;
        if self.rho != -1.0 {
            return Err(Error::InvalidParameter(
                "the compress-and-forward curve is defined for rho = -1".into(),
            ));
        }
        Ok(())
    }

    fn snr(&self) -> f64 {
        self.power / self.noise
    }
}

/// Point-to-point capacity 0.5 log2(1 + P/N), ignoring the relay.
pub fn gaussian_c0(spec: &GaussianRelaySpec) -> Result<f64> {
    spec.check()?;
    Ok(0.5 * log2_1p(spec.snr()))
}

/// log2(1 + x) without cancellation for small x.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() * std::f64::consts::LOG2_E
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "description noise variance must be positive, got {sigma2}"
        )));
    }
    Ok(())
}

/// R*(sigma2) = 0.5 log2(((P+N) sigma2 + 4PN) / (N sigma2)).
pub fn gaussian_cf_rstar(spec: &GaussianRelaySpec, sigma2: f64) -> Result<f64> {
    spec.require_anticorrelated()?;
    check_sigma2(sigma2)?;
    let (p, n) = (spec.power, spec.noise);
    Ok(0.5 * (((p + n) * sigma2 + 4.0 * p * n) / (n * sigma2)).log2())
}

/// R0(sigma2) = 0.5 log2(((P+N) sigma2 + 4PN) / ((P+N) sigma2)), evaluated as
/// 0.5 log2(1 + 4PN / ((P+N) sigma2)) so large sigma2 keeps full precision.
pub fn gaussian_cf_r0(spec: &GaussianRelaySpec, sigma2: f64) -> Result<f64> {
    spec.require_anticorrelated()?;
    check_sigma2(sigma2)?;
    let (p, n) = (spec.power, spec.noise);
    Ok(0.5 * log2_1p(4.0 * p * n / ((p + n) * sigma2)))
}

/// Description noise sigma0^2 = 4PN / ((P+N)(2^{2 R0} - 1)) meeting link rate `r0`.
pub fn gaussian_invert_r0(spec: &GaussianRelaySpec, r0: f64) -> Result<f64> {
    spec.require_anticorrelated()?;
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "link rate must be positive to invert, got {r0}"
        )));
    }
    let (p, n) = (spec.power, spec.noise);
    // 2^{2 R0} - 1 = expm1(2 R0 ln 2)
    Ok(4.0 * p * n / ((p + n) * (2.0 * r0 * std::f64::consts::LN_2).exp_m1()))
}

/// C(R0): C(0) for rho = +1, C(0) + R0 for rho = -1.
pub fn gaussian_capacity(spec: &GaussianRelaySpec, r0: f64) -> Result<f64> {
    spec.check()?;
    if !(r0 >= 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "link rate must be nonnegative, got {r0}"
        )));
    }
    let c0 = gaussian_c0(spec)?;
    Ok(if spec.rho == 1.0 { c0 } else { c0 + r0 })
}
