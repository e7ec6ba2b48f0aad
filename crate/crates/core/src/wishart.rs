//! CDF of the largest eigenvalue of a central complex Wishart matrix, and the
//! main-link SNR CDFs built on it.
//!
//! The CDF is a ratio of a determinant of incomplete-gamma entries to a
//! product of gamma factors. Entries are kept as regularized incomplete
//! gammas (all in [0, 1]) with the full gamma scales factored into row
//! prefactors that combine with the normalizer in log space, so the result
//! stays finite at large antenna counts.

use crate::config::{derive, CodePoint, SystemConfig};
use crate::error::{Error, Result};
use crate::special::{ln_gamma_int, ln_multi_gamma, reg_lower_gamma_int, SmallMatrix};

/// Tolerance for CDF values outside [0, 1]; a larger excursion is reported as
/// an inconsistency instead of clamped.
pub const CDF_CONSISTENCY_TOL: f64 = 1e-9;

/// Ordered dimension pair of a Wishart matrix built from an antenna pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WishartDims {
    /// min of the antenna pair.
    pub u: usize,
    /// max of the antenna pair.
    pub v: usize,
    /// v - u.
    pub t: usize,
}

impl WishartDims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::Domain {
                what: "WishartDims",
                detail: "antenna counts must be >= 1".into(),
            });
        }
        let u = a.min(b);
        let v = a.max(b);
        Ok(Self { u, v, t: v - u })
    }

    /// Index map of the determinant entries, g(i, j) = t + i + j - 1 for
    /// 1-based i, j.
    pub fn g(&self, i: usize, j: usize) -> u32 {
        (self.t + i + j - 1) as u32
    }
}

/// CDF of the largest eigenvalue of H^H H at the already-normalized argument
/// x (callers divide their SNR by beta * gbar first). H has unit-variance
/// complex Gaussian entries and shape given by `dims`.
pub fn largest_eig_cdf(dims: WishartDims, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "largest_eig_cdf",
            detail: format!("x must be >= 0, got {x}"),
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let (u, t) = (dims.u, dims.t);

    // Entry (i, j) of the determinant is gamma(g, x) = Gamma(g) P(g, x).
    // Factor Gamma(t + i) out of row i; the remaining entry is the rising
    // product Gamma(g) / Gamma(t + i) times the regularized P(g, x), which
    // stays in a safe range even for hundreds of antennas.
    let mut m = SmallMatrix::zeros(u);
    for i in 1..=u {
        let mut rising = 1.0f64;
        for j in 1..=u {
            if j > 1 {
                rising *= (t + i + j - 2) as f64;
            }
            let p = reg_lower_gamma_int(dims.g(i, j), x)?;
            m.set(i - 1, j - 1, rising * p);
        }
    }
    let (sign, ln_det) = m.log_determinant();
    if sign == 0.0 {
        return Ok(0.0);
    }
    let ln_rows: f64 = (1..=u).map(|i| ln_gamma_int((t + i) as u32)).sum();
    let ln_norm =
        ln_multi_gamma(u as u32, u as u32)? + ln_multi_gamma(dims.v as u32, u as u32)?;
    let f = sign * (ln_rows + ln_det - ln_norm).exp();

    if f < -CDF_CONSISTENCY_TOL || f > 1.0 + CDF_CONSISTENCY_TOL {
        return Err(Error::NumericalInconsistency {
            what: format!("largest_eig_cdf(u = {u}, v = {}, x = {x})", dims.v),
            value: f,
        });
    }
    Ok(f.clamp(0.0, 1.0))
}

/// CDF of the first-hop SNR gamma_sr at threshold `gamma`.
pub fn f_gamma_sr(cfg: &SystemConfig, cp: &CodePoint, gamma: f64) -> Result<f64> {
    let d = derive(cfg, cp);
    let dims = WishartDims::new(cfg.n_s, cfg.n_r)?;
    largest_eig_cdf(dims, normalized_arg(gamma, cp.beta_s, d.gbar_sr)?)
}

/// CDF of the second-hop SNR gamma_rd at threshold `gamma`.
pub fn f_gamma_rd(cfg: &SystemConfig, cp: &CodePoint, gamma: f64) -> Result<f64> {
    let d = derive(cfg, cp);
    let dims = WishartDims::new(cfg.n_r, cfg.n_d)?;
    largest_eig_cdf(dims, normalized_arg(gamma, cp.beta_r, d.gbar_rd)?)
}

fn normalized_arg(gamma: f64, beta: f64, gbar: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain {
            what: "f_gamma",
            detail: format!("gamma must be >= 0, got {gamma}"),
        });
    }
    Ok(gamma / (beta * gbar))
}
