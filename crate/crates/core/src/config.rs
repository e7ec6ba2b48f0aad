//! System and code-rate parameters plus the scalars derived from them.
//!
//! Everything downstream (CDFs, outage probabilities, the Monte Carlo engine,
//! the throughput optimizer) consumes these types. All quantities are linear
//! scale; dB conversion belongs at the CLI boundary.

use crate::error::{Error, Result};

/// Full parameter vector of the relay wiretap channel.
///
/// Antenna counts for source / relay / destination / eavesdropper, geometry,
/// transmit powers, noise variances, and the eavesdropper density of the
/// planar Poisson point process.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Source antennas.
    pub n_s: usize,
    /// Relay antennas.
    pub n_r: usize,
    /// Destination antennas.
    pub n_d: usize,
    /// Antennas per eavesdropper.
    pub n_e: usize,
    /// Path-loss exponent.
    pub eta: f64,
    /// Eavesdropper density (nodes per unit area), >= 0.
    pub lambda: f64,
    /// Source-relay distance.
    pub d_sr: f64,
    /// Relay-destination distance.
    pub d_rd: f64,
    /// Source transmit power (linear).
    pub p_s: f64,
    /// Relay transmit power (linear).
    pub p_r: f64,
    /// Noise variance at the relay.
    pub sigma2_r: f64,
    /// Noise variance at the destination.
    pub sigma2_d: f64,
    /// Eavesdropper noise variance in the first hop.
    pub sigma2_i1: f64,
    /// Eavesdropper noise variance in the second hop.
    pub sigma2_i2: f64,
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Violation {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl SystemConfig {
    /// Check every invariant, returning the config unchanged when all hold.
    pub fn validate(self) -> Result<Self> {
        for (field, v) in [
            ("n_s", self.n_s),
            ("n_r", self.n_r),
            ("n_d", self.n_d),
            ("n_e", self.n_e),
        ] {
            if v == 0 {
                return Err(Error::Violation {
                    field,
                    reason: "antenna count must be >= 1".into(),
                });
            }
        }
        if self.n_s <= self.n_e {
            return Err(Error::AntennaCount {
                n_s: self.n_s,
                n_e: self.n_e,
            });
        }
        check_positive("eta", self.eta)?;
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Violation {
                field: "lambda",
                reason: format!("must be finite and >= 0, got {}", self.lambda),
            });
        }
        check_positive("d_sr", self.d_sr)?;
        check_positive("d_rd", self.d_rd)?;
        check_positive("p_s", self.p_s)?;
        check_positive("p_r", self.p_r)?;
        check_positive("sigma2_r", self.sigma2_r)?;
        check_positive("sigma2_d", self.sigma2_d)?;
        check_positive("sigma2_i1", self.sigma2_i1)?;
        check_positive("sigma2_i2", self.sigma2_i2)?;
        Ok(self)
    }
}

/// Wiretap code rate pair and power splits.
///
/// `r_b` is the transmission rate, `r_e` the redundancy rate spent on
/// confusing eavesdroppers. `beta_s`/`beta_r` are the fractions of source and
/// relay power carrying the information signal; the remainder feeds AN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodePoint {
    pub r_b: f64,
    pub r_e: f64,
    pub beta_s: f64,
    pub beta_r: f64,
}

impl CodePoint {
    pub fn new(r_b: f64, r_e: f64, beta_s: f64, beta_r: f64) -> Result<Self> {
        let cp = Self {
            r_b,
            r_e,
            beta_s,
            beta_r,
        };
        cp.validate()?;
        Ok(cp)
    }

    /// Range checks that do not need a [`SystemConfig`].
    pub fn validate(&self) -> Result<()> {
        if !(self.r_b.is_finite() && self.r_b > 0.0) {
            return Err(Error::Violation {
                field: "r_b",
                reason: format!("must be finite and > 0, got {}", self.r_b),
            });
        }
        if !(self.r_e.is_finite() && self.r_e >= 0.0 && self.r_e <= self.r_b) {
            return Err(Error::Violation {
                field: "r_e",
                reason: format!("must satisfy 0 <= r_e <= r_b, got {}", self.r_e),
            });
        }
        for (field, b) in [("beta_s", self.beta_s), ("beta_r", self.beta_r)] {
            if !(b.is_finite() && b > 0.0 && b <= 1.0) {
                return Err(Error::Violation {
                    field,
                    reason: format!("must lie in (0, 1], got {b}"),
                });
            }
        }
        Ok(())
    }

    /// Checks that couple the code point to antenna counts: a single-antenna
    /// node has no null space to carry AN, so its power split must be 1.
    pub fn validate_for(&self, cfg: &SystemConfig) -> Result<()> {
        self.validate()?;
        if cfg.n_s == 1 && self.beta_s < 1.0 {
            return Err(Error::Violation {
                field: "beta_s",
                reason: "must be 1 when n_s = 1 (no AN dimensions exist)".into(),
            });
        }
        if cfg.n_r == 1 && self.beta_r < 1.0 {
            return Err(Error::Violation {
                field: "beta_r",
                reason: "must be 1 when n_r = 1 (no AN dimensions exist)".into(),
            });
        }
        Ok(())
    }

    /// SNR threshold of the transmission outage event, 2^r_b - 1.
    pub fn tau_b(&self) -> f64 {
        (self.r_b * std::f64::consts::LN_2).exp_m1()
    }

    /// SINR threshold of the secrecy outage event, 2^r_e - 1.
    pub fn tau_e(&self) -> f64 {
        (self.r_e * std::f64::consts::LN_2).exp_m1()
    }
}

/// Average SNRs of the two main-link hops and the AN-to-signal ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScalars {
    /// Average source-relay SNR, p_s * d_sr^-eta / sigma2_r.
    pub gbar_sr: f64,
    /// Average relay-destination SNR, p_r * d_rd^-eta / sigma2_d.
    pub gbar_rd: f64,
    /// Source AN-to-signal ratio, (1 - beta_s) / (beta_s (n_s - 1)).
    pub kappa_1: f64,
    /// Relay AN-to-signal ratio, (1 - beta_r) / (beta_r (n_r - 1)).
    pub kappa_2: f64,
}

/// Compute the derived scalars. Pure; expects validated inputs.
pub fn derive(cfg: &SystemConfig, cp: &CodePoint) -> DerivedScalars {
    DerivedScalars {
        gbar_sr: cfg.p_s * cfg.d_sr.powf(-cfg.eta) / cfg.sigma2_r,
        gbar_rd: cfg.p_r * cfg.d_rd.powf(-cfg.eta) / cfg.sigma2_d,
        kappa_1: kappa(cp.beta_s, cfg.n_s),
        kappa_2: kappa(cp.beta_r, cfg.n_r),
    }
}

/// (1 - beta) / (beta (n - 1)); zero when beta = 1 or when n = 1 (validation
/// forces beta = 1 there, so no AN power exists either way).
pub(crate) fn kappa(beta: f64, n: usize) -> f64 {
    if beta >= 1.0 || n <= 1 {
        0.0
    } else {
        (1.0 - beta) / (beta * (n - 1) as f64)
    }
}
