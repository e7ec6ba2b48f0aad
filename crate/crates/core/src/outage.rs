//! Transmission and secrecy outage probabilities, exact and in the
//! large-source-array limit.
//!
//! The secrecy outage assembles one closed-form term with two quadratures;
//! those bundles are memoized on the exact parameter tuple because the
//! throughput optimizer revisits nearby points constantly and the product
//! integral dominates its runtime.

use crate::config::{derive, CodePoint, SystemConfig};
use crate::error::{Error, Result};
use crate::quad::{
    integral_j2, integral_j2_inf, integral_j3, integral_j3_inf, QuadEstimate,
    QuadratureSettings,
};
use crate::special::{binomial, gamma_real};
use crate::wishart::{f_gamma_rd, f_gamma_sr, CDF_CONSISTENCY_TOL};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Provenance of a probability estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Analytic,
    Asymptotic,
    MonteCarlo,
}

/// A probability with its provenance and error half-width; Monte Carlo
/// estimates also carry the trial count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub err: f64,
    pub trials: Option<u64>,
}

/// Transmission outage probability: the end-to-end SNR of the two-hop link
/// falls below tau_b. Expanded as F_sr + F_rd - F_sr F_rd.
pub fn p_to(cfg: &SystemConfig, cp: &CodePoint) -> Result<OutageEstimate> {
    let tau_b = cp.tau_b();
    let f1 = f_gamma_sr(cfg, cp, tau_b)?;
    let f2 = f_gamma_rd(cfg, cp, tau_b)?;
    let value = (f1 + f2 - f1 * f2).clamp(0.0, 1.0);
    Ok(OutageEstimate {
        value,
        kind: EstimateKind::Analytic,
        err: 3.0 * CDF_CONSISTENCY_TOL,
        trials: None,
    })
}

/// Large-source-array limit of `p_to`: only the relay-destination hop can
/// fail once the first hop hardens.
pub fn p_to_asymptotic(cfg: &SystemConfig, cp: &CodePoint) -> Result<OutageEstimate> {
    let value = f_gamma_rd(cfg, cp, cp.tau_b())?;
    Ok(OutageEstimate {
        value,
        kind: EstimateKind::Asymptotic,
        err: CDF_CONSISTENCY_TOL,
        trials: None,
    })
}

/// Closed form of the hop-1 exponent term:
/// (pi/eta) (beta_s p_s / (tau_e sigma2_i1))^(2/eta) (1 + k1 tau_e)^-(n_s-1)
/// * sum_p Gamma(2/eta + p - 1)/Gamma(p) sum_q C(n_s-1, q) (k1 tau_e)^q.
pub fn j1_closed(cfg: &SystemConfig, cp: &CodePoint) -> Result<f64> {
    let tau_e = cp.tau_e();
    if tau_e <= 0.0 {
        return Err(Error::Domain {
            what: "j1_closed",
            detail: "tau_e must be > 0 (the prefactor diverges at 0)".into(),
        });
    }
    let d = derive(cfg, cp);
    let k1t = d.kappa_1 * tau_e;
    let pref = std::f64::consts::PI / cfg.eta
        * (cp.beta_s * cfg.p_s / (tau_e * cfg.sigma2_i1)).powf(2.0 / cfg.eta)
        * (-(cfg.n_s as f64 - 1.0) * k1t.ln_1p()).exp();
    let mut p_sum = 0.0;
    let mut inv_gamma_p = 1.0; // 1 / Gamma(p)
    for p in 1..=cfg.n_e {
        if p > 1 {
            inv_gamma_p /= (p - 1) as f64;
        }
        let mut q_sum = 0.0;
        let mut k_pow = 1.0;
        for q in 0..=(cfg.n_e - p) {
            if q > 0 {
                k_pow *= k1t;
            }
            q_sum += binomial((cfg.n_s - 1) as u32, q as u32) * k_pow;
        }
        p_sum += gamma_real(2.0 / cfg.eta + p as f64 - 1.0)? * inv_gamma_p * q_sum;
    }
    Ok(pref * p_sum)
}

/// Large-array limit of `j1_closed`: the AN power ratio saturates to
/// exp(-(1-beta_s) tau_e / beta_s) and the binomial sum Poissonizes.
pub fn j1_inf_closed(cfg: &SystemConfig, cp: &CodePoint) -> Result<f64> {
    let tau_e = cp.tau_e();
    if tau_e <= 0.0 {
        return Err(Error::Domain {
            what: "j1_inf_closed",
            detail: "tau_e must be > 0".into(),
        });
    }
    let a = (1.0 - cp.beta_s) * tau_e / cp.beta_s;
    let pref = std::f64::consts::PI / cfg.eta
        * (cp.beta_s * cfg.p_s / (tau_e * cfg.sigma2_i1)).powf(2.0 / cfg.eta)
        * (-a).exp();
    let mut p_sum = 0.0;
    let mut inv_gamma_p = 1.0;
    for p in 1..=cfg.n_e {
        if p > 1 {
            inv_gamma_p /= (p - 1) as f64;
        }
        let mut q_sum = 0.0;
        let mut a_pow = 1.0; // a^q / q!
        for q in 0..=(cfg.n_e - p) {
            if q > 0 {
                a_pow *= a / q as f64;
            }
            q_sum += a_pow;
        }
        p_sum += gamma_real(2.0 / cfg.eta + p as f64 - 1.0)? * inv_gamma_p * q_sum;
    }
    Ok(pref * p_sum)
}

/// The three exponent terms of one secrecy outage evaluation.
#[derive(Debug, Clone, Copy)]
pub struct JBundle {
    pub j1: f64,
    pub j2: QuadEstimate,
    pub j3: QuadEstimate,
}

#[derive(PartialEq, Eq, Hash, Clone)]
struct JKey {
    asymptotic: bool,
    n_s: usize, // 0 in asymptotic keys: the limit does not read it
    n_r: usize,
    n_e: usize,
    bits: [u64; 12],
}

impl JKey {
    fn new(cfg: &SystemConfig, cp: &CodePoint, s: &QuadratureSettings, asymptotic: bool) -> Self {
        Self {
            asymptotic,
            n_s: if asymptotic { 0 } else { cfg.n_s },
            n_r: cfg.n_r,
            n_e: cfg.n_e,
            bits: [
                cfg.eta.to_bits(),
                cfg.d_sr.to_bits(),
                cfg.p_s.to_bits(),
                cfg.p_r.to_bits(),
                cfg.sigma2_i1.to_bits(),
                cfg.sigma2_i2.to_bits(),
                cp.beta_s.to_bits(),
                cp.beta_r.to_bits(),
                cp.tau_e().to_bits(),
                s.rel_tol.to_bits(),
                s.abs_tol.to_bits(),
                s.truncation_tol.to_bits(),
            ],
        }
    }
}

fn j_cache() -> &'static RwLock<HashMap<JKey, JBundle>> {
    static CACHE: OnceLock<RwLock<HashMap<JKey, JBundle>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Drop all memoized exponent terms (benchmarks use this to measure cold
/// evaluations).
pub fn clear_j_cache() {
    j_cache().write().unwrap().clear();
}

fn j_bundle(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
    asymptotic: bool,
) -> Result<JBundle> {
    let key = JKey::new(cfg, cp, settings, asymptotic);
    if let Some(b) = j_cache().read().unwrap().get(&key) {
        return Ok(*b);
    }
    let bundle = if asymptotic {
        JBundle {
            j1: j1_inf_closed(cfg, cp)?,
            j2: integral_j2_inf(cfg, cp, settings)?,
            j3: integral_j3_inf(cfg, cp, settings)?,
        }
    } else {
        JBundle {
            j1: j1_closed(cfg, cp)?,
            j2: integral_j2(cfg, cp, settings)?,
            j3: integral_j3(cfg, cp, settings)?,
        }
    };
    // First writer wins; recomputation is deterministic so entries agree.
    j_cache().write().unwrap().entry(key).or_insert(bundle);
    Ok(bundle)
}

fn assemble_p_so(lambda: f64, bundle: &JBundle, kind: EstimateKind) -> Result<OutageEstimate> {
    let s = bundle.j1 + bundle.j2.value - bundle.j3.value;
    let err_s = bundle.j2.err + bundle.j3.err;
    if s < -err_s {
        return Err(Error::NumericalInconsistency {
            what: "secrecy outage exponent j1 + j2 - j3".into(),
            value: s,
        });
    }
    let s = s.max(0.0);
    let value = -(-2.0 * lambda * s).exp_m1();
    let err = 2.0 * lambda * err_s * (-2.0 * lambda * s).exp();
    let est = OutageEstimate {
        value,
        kind,
        err,
        trials: None,
    };
    if !(bundle.j2.converged && bundle.j3.converged) {
        return Err(Error::NonConverged {
            what: "secrecy outage quadrature".into(),
            best: est.value,
            err: est.err,
        });
    }
    Ok(est)
}

/// Secrecy outage probability: the best eavesdropper SINR across the point
/// process exceeds tau_e over either hop.
///
/// At r_e = 0 the redundancy budget is zero and any eavesdropper anywhere
/// wins, so the probability is exactly 1 (the closed form diverges there by
/// the same limit); with no eavesdroppers it is exactly 0.
pub fn p_so(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<OutageEstimate> {
    p_so_inner(cfg, cp, settings, false)
}

/// Large-source-array limit of `p_so`; independent of n_s.
pub fn p_so_asymptotic(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<OutageEstimate> {
    p_so_inner(cfg, cp, settings, true)
}

fn p_so_inner(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
    asymptotic: bool,
) -> Result<OutageEstimate> {
    let kind = if asymptotic {
        EstimateKind::Asymptotic
    } else {
        EstimateKind::Analytic
    };
    if cfg.lambda == 0.0 {
        return Ok(OutageEstimate {
            value: 0.0,
            kind,
            err: 0.0,
            trials: None,
        });
    }
    if cp.tau_e() <= 0.0 {
        return Ok(OutageEstimate {
            value: 1.0,
            kind,
            err: 0.0,
            trials: None,
        });
    }
    let bundle = j_bundle(cfg, cp, settings, asymptotic)?;
    assemble_p_so(cfg.lambda, &bundle, kind)
}
