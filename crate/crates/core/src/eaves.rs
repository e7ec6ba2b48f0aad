//! Conditional SINR CDFs at a fixed-location eavesdropper.
//!
//! Hop 1 sees the source information beam against source AN; hop 2 sees the
//! relay beam against relay AN plus the source's full-power jamming. Both
//! CDFs are kept in survival form 1 - S with S evaluated directly from
//! positive terms, because the radial integrands downstream consume S itself
//! and would lose precision through the complement.

use crate::config::{derive, CodePoint, SystemConfig};
use crate::error::{Error, Result};
use crate::special::{binomial, Kahan};

/// Position of one eavesdropper relative to source and relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EavesGeometry {
    /// Source-eavesdropper distance.
    pub d_si: f64,
    /// Relay-eavesdropper distance.
    pub d_ri: f64,
}

impl EavesGeometry {
    pub fn new(d_si: f64, d_ri: f64) -> Result<Self> {
        for (field, v) in [("d_si", d_si), ("d_ri", d_ri)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Violation {
                    field,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(Self { d_si, d_ri })
    }

    /// Geometry from polar coordinates centered at the source, with the relay
    /// on the axis at distance `d_sr`; d_ri follows from the cosine rule and
    /// satisfies the triangle inequality by construction.
    pub fn from_polar(d_sr: f64, d_si: f64, theta: f64) -> Result<Self> {
        let sq = (d_sr * d_sr + d_si * d_si - 2.0 * d_sr * d_si * theta.cos()).max(0.0);
        Self::new(d_si, sq.sqrt())
    }

    /// Average first-hop SNR at this eavesdropper, p_s d_si^-eta / sigma2_i1.
    pub fn gbar_si(&self, cfg: &SystemConfig) -> f64 {
        cfg.p_s * self.d_si.powf(-cfg.eta) / cfg.sigma2_i1
    }

    /// Average second-hop SNR at this eavesdropper, p_r d_ri^-eta / sigma2_i2.
    pub fn gbar_ri(&self, cfg: &SystemConfig) -> f64 {
        cfg.p_r * self.d_ri.powf(-cfg.eta) / cfg.sigma2_i2
    }

    /// Jamming-to-signal geometry ratio of the second hop,
    /// p_s d_ri^eta / (beta_r p_r n_s d_si^eta).
    pub fn kappa_3(&self, cfg: &SystemConfig, cp: &CodePoint) -> f64 {
        cfg.p_s * (self.d_ri / self.d_si).powf(cfg.eta) / (cp.beta_r * cfg.p_r * cfg.n_s as f64)
    }
}

/// (1 + x)^-n computed through log1p so small x keeps full precision.
#[inline]
pub(crate) fn inv_pow1p(x: f64, n: f64) -> f64 {
    (-n * x.ln_1p()).exp()
}

/// Hop-1 survival kernel: probability that the first-hop SINR exceeds its
/// threshold, parameterized by w = gamma / (beta_s gbar_si) and
/// k1g = kappa_1 * gamma.
pub(crate) fn survival_hop1_raw(w: f64, k1g: f64, n_s: usize, n_e: usize) -> f64 {
    if w > 1e30 || k1g > 1e30 {
        return 0.0;
    }
    let mut outer = Kahan::default();
    let mut w_pow = 1.0; // w^(p-1) / (p-1)!
    for p in 1..=n_e {
        if p > 1 {
            w_pow *= w / (p - 1) as f64;
        }
        let mut inner = Kahan::default();
        let mut k_pow = 1.0; // (k1g)^q
        for q in 0..=(n_e - p) {
            if q > 0 {
                k_pow *= k1g;
            }
            inner.add(binomial((n_s - 1) as u32, q as u32) * k_pow);
        }
        outer.add(w_pow * inner.value());
    }
    (-w).exp() * inv_pow1p(k1g, (n_s - 1) as f64) * outer.value()
}

/// Hop-2 survival kernel with w = gamma / (beta_r gbar_ri),
/// k2g = kappa_2 * gamma, k3g = kappa_3 * gamma.
pub(crate) fn survival_hop2_raw(
    w: f64,
    k2g: f64,
    k3g: f64,
    n_r: usize,
    n_s: usize,
    n_e: usize,
) -> f64 {
    if w > 1e30 || k2g > 1e30 || k3g > 1e30 {
        return 0.0;
    }
    let mut outer = Kahan::default();
    let mut w_pow = 1.0;
    for m in 1..=n_e {
        if m > 1 {
            w_pow *= w / (m - 1) as f64;
        }
        let mut mid = Kahan::default();
        let mut k2_pow = 1.0;
        for n in 0..=(n_e - m) {
            if n > 0 {
                k2_pow *= k2g;
            }
            let mut inner = Kahan::default();
            let mut k3_pow = 1.0;
            for l in 0..=(n_e - m - n) {
                if l > 0 {
                    k3_pow *= k3g;
                }
                inner.add(binomial(n_s as u32, l as u32) * k3_pow);
            }
            mid.add(binomial((n_r - 1) as u32, n as u32) * k2_pow * inner.value());
        }
        outer.add(w_pow * mid.value());
    }
    (-w).exp()
        * inv_pow1p(k2g, (n_r - 1) as f64)
        * inv_pow1p(k3g, n_s as f64)
        * outer.value()
}

/// Large-source-array limit of the hop-1 kernel; `a` replaces kappa_1 * gamma
/// as (1 - beta_s) gamma / beta_s.
pub(crate) fn survival_hop1_asym(w: f64, a: f64, n_e: usize) -> f64 {
    if w > 1e30 || a > 1e30 {
        return 0.0;
    }
    let mut outer = Kahan::default();
    let mut w_pow = 1.0;
    for p in 1..=n_e {
        if p > 1 {
            w_pow *= w / (p - 1) as f64;
        }
        let mut inner = Kahan::default();
        let mut a_pow = 1.0; // a^q / q!
        for q in 0..=(n_e - p) {
            if q > 0 {
                a_pow *= a / q as f64;
            }
            inner.add(a_pow);
        }
        outer.add(w_pow * inner.value());
    }
    (-a - w).exp() * outer.value()
}

/// Large-source-array limit of the hop-2 kernel; `z_inf` replaces
/// kappa_3 * gamma as p_s psi / (d_si^eta sigma2_i2).
pub(crate) fn survival_hop2_asym(w: f64, k2g: f64, z_inf: f64, n_r: usize, n_e: usize) -> f64 {
    if w > 1e30 || k2g > 1e30 || z_inf > 1e30 {
        return 0.0;
    }
    let mut outer = Kahan::default();
    let mut w_pow = 1.0;
    for m in 1..=n_e {
        if m > 1 {
            w_pow *= w / (m - 1) as f64;
        }
        let mut mid = Kahan::default();
        let mut k2_pow = 1.0;
        for n in 0..=(n_e - m) {
            if n > 0 {
                k2_pow *= k2g;
            }
            let mut inner = Kahan::default();
            let mut z_pow = 1.0; // z_inf^l / l!
            for l in 0..=(n_e - m - n) {
                if l > 0 {
                    z_pow *= z_inf / l as f64;
                }
                inner.add(z_pow);
            }
            mid.add(binomial((n_r - 1) as u32, n as u32) * k2_pow * inner.value());
        }
        outer.add(w_pow * mid.value());
    }
    (-w - z_inf).exp() * inv_pow1p(k2g, (n_r - 1) as f64) * outer.value()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "eaves cdf",
            detail: format!("gamma must be >= 0, got {gamma}"),
        })
    }
}

/// Survival function of the hop-1 SINR, Pr(gamma_si > gamma).
pub fn sf_gamma_si(
    cfg: &SystemConfig,
    cp: &CodePoint,
    geo: &EavesGeometry,
    gamma: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    let d = derive(cfg, cp);
    let w = gamma / (cp.beta_s * geo.gbar_si(cfg));
    Ok(survival_hop1_raw(w, d.kappa_1 * gamma, cfg.n_s, cfg.n_e))
}

/// CDF of the hop-1 SINR at a fixed eavesdropper location.
pub fn f_gamma_si(
    cfg: &SystemConfig,
    cp: &CodePoint,
    geo: &EavesGeometry,
    gamma: f64,
) -> Result<f64> {
    Ok(1.0 - sf_gamma_si(cfg, cp, geo, gamma)?)
}

/// Survival function of the hop-2 SINR, Pr(gamma_ri > gamma).
pub fn sf_gamma_ri(
    cfg: &SystemConfig,
    cp: &CodePoint,
    geo: &EavesGeometry,
    gamma: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    let d = derive(cfg, cp);
    let w = gamma / (cp.beta_r * geo.gbar_ri(cfg));
    Ok(survival_hop2_raw(
        w,
        d.kappa_2 * gamma,
        geo.kappa_3(cfg, cp) * gamma,
        cfg.n_r,
        cfg.n_s,
        cfg.n_e,
    ))
}

/// CDF of the hop-2 SINR at a fixed eavesdropper location.
pub fn f_gamma_ri(
    cfg: &SystemConfig,
    cp: &CodePoint,
    geo: &EavesGeometry,
    gamma: f64,
) -> Result<f64> {
    Ok(1.0 - sf_gamma_ri(cfg, cp, geo, gamma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig3_config() -> SystemConfig {
        SystemConfig {
            n_s: 4,
            n_r: 2,
            n_d: 2,
            n_e: 2,
            eta: 4.0,
            lambda: 0.01,
            d_sr: 10.0,
            d_rd: 10.0,
            p_s: 1.0e5,
            p_r: 1.0e5,
            sigma2_r: 1.0,
            sigma2_d: 1.0,
            sigma2_i1: 1.0,
            sigma2_i2: 1.0,
        }
    }

    fn cp_half() -> CodePoint {
        CodePoint::new(2.0, 1.0, 0.5, 0.5).unwrap()
    }

    #[test]
    fn cdfs_vanish_at_zero() {
        let cfg = fig3_config();
        let cp = cp_half();
        let geo = EavesGeometry::new(10.0, 10.0).unwrap();
        assert_eq!(f_gamma_si(&cfg, &cp, &geo, 0.0).unwrap(), 0.0);
        assert_eq!(f_gamma_ri(&cfg, &cp, &geo, 0.0).unwrap(), 0.0);
        assert!(f_gamma_si(&cfg, &cp, &geo, -0.1).is_err());
    }

    #[test]
    fn single_eaves_antenna_closed_form() {
        // n_e = 1 collapses the sums to p = 1, q = 0.
        let cfg = SystemConfig {
            n_e: 1,
            ..fig3_config()
        };
        let cp = cp_half();
        let geo = EavesGeometry::new(12.0, 8.0).unwrap();
        let d = crate::config::derive(&cfg, &cp);
        for gamma in [0.1, 1.0, 5.0] {
            let f = f_gamma_si(&cfg, &cp, &geo, gamma).unwrap();
            let expect = 1.0
                - (-gamma / (cp.beta_s * geo.gbar_si(&cfg))).exp()
                    / (1.0 + d.kappa_1 * gamma).powi(cfg.n_s as i32 - 1);
            assert!((f - expect).abs() < 1e-14, "gamma = {gamma}");
        }
    }

    #[test]
    fn no_source_jamming_removes_n_s_dependence() {
        // With p_s = 0 the second-hop interference from the source vanishes
        // (kappa_3 = 0), so the hop-2 CDF cannot depend on n_s.
        let mut cfg_a = fig3_config();
        cfg_a.p_s = 0.0;
        let mut cfg_b = cfg_a.clone();
        cfg_b.n_s = 9;
        let cp = cp_half();
        let geo = EavesGeometry::new(7.0, 13.0).unwrap();
        for gamma in [0.2, 1.0, 4.0, 20.0] {
            let fa = f_gamma_ri(&cfg_a, &cp, &geo, gamma).unwrap();
            let fb = f_gamma_ri(&cfg_b, &cp, &geo, gamma).unwrap();
            assert_eq!(fa, fb, "gamma = {gamma}");
        }
    }

    #[test]
    fn saturates_to_one() {
        let cfg = fig3_config();
        let cp = cp_half();
        let geo = EavesGeometry::new(10.0, 10.0).unwrap();
        let gamma = 1e3 * (cp.beta_s * geo.gbar_si(&cfg)).max(cp.beta_r * geo.gbar_ri(&cfg));
        assert!((f_gamma_si(&cfg, &cp, &geo, gamma).unwrap() - 1.0).abs() < 1e-12);
        assert!((f_gamma_ri(&cfg, &cp, &geo, gamma).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_geometry_follows_cosine_rule() {
        let geo = EavesGeometry::from_polar(10.0, 10.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((geo.d_ri - 200.0f64.sqrt()).abs() < 1e-12);
        let collinear = EavesGeometry::from_polar(10.0, 4.0, std::f64::consts::PI).unwrap();
        assert!((collinear.d_ri - 14.0).abs() < 1e-12);
        // Eavesdropper on top of the relay: d_ri -> 0 is rejected by new().
        assert!(EavesGeometry::from_polar(10.0, 10.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn hop1_cdf_monotone_in_gamma_kappa_and_distance(
            gammas in proptest::collection::vec(0.0f64..50.0, 2..10),
            k1 in 0.0f64..5.0,
            d_si in 1.0f64..40.0,
        ) {
            let cfg = fig3_config();
            let cp = cp_half();
            let mut gammas = gammas;
            gammas.sort_by(f64::total_cmp);

            // Monotone in gamma at fixed geometry.
            let geo = EavesGeometry::new(d_si, 10.0).unwrap();
            let mut prev = -1.0;
            for &g in &gammas {
                let f = f_gamma_si(&cfg, &cp, &geo, g).unwrap();
                prop_assert!((0.0..=1.0).contains(&f));
                prop_assert!(f >= prev - 1e-12);
                prev = f;
            }

            // More AN (larger kappa_1) stochastically shrinks the SINR, so
            // the CDF value can only grow; checked on the raw kernel.
            let gamma = gammas[gammas.len() - 1];
            let w = gamma / (cp.beta_s * geo.gbar_si(&cfg));
            let s_lo = survival_hop1_raw(w, k1 * gamma, cfg.n_s, cfg.n_e);
            let s_hi = survival_hop1_raw(w, (k1 + 0.7) * gamma, cfg.n_s, cfg.n_e);
            prop_assert!(s_hi <= s_lo + 1e-12);

            // Farther eavesdroppers are weaker: CDF nondecreasing in d_si.
            let nearer = EavesGeometry::new(d_si, 10.0).unwrap();
            let farther = EavesGeometry::new(d_si * 1.5, 10.0).unwrap();
            let f_near = f_gamma_si(&cfg, &cp, &nearer, gamma).unwrap();
            let f_far = f_gamma_si(&cfg, &cp, &farther, gamma).unwrap();
            prop_assert!(f_far >= f_near - 1e-12);
        }

        #[test]
        fn hop2_cdf_monotone_in_gamma_and_an_ratios(
            gammas in proptest::collection::vec(0.0f64..50.0, 2..10),
            k2 in 0.0f64..5.0,
            k3 in 0.0f64..5.0,
        ) {
            let cfg = fig3_config();
            let cp = cp_half();
            let geo = EavesGeometry::new(9.0, 11.0).unwrap();
            let mut gammas = gammas;
            gammas.sort_by(f64::total_cmp);
            let mut prev = -1.0;
            for &g in &gammas {
                let f = f_gamma_ri(&cfg, &cp, &geo, g).unwrap();
                prop_assert!((0.0..=1.0).contains(&f));
                prop_assert!(f >= prev - 1e-12);
                prev = f;
            }

            let gamma = gammas[gammas.len() - 1].max(0.1);
            let w = gamma / (cp.beta_r * geo.gbar_ri(&cfg));
            let base = survival_hop2_raw(w, k2 * gamma, k3 * gamma, cfg.n_r, cfg.n_s, cfg.n_e);
            let more_k2 = survival_hop2_raw(w, (k2 + 0.5) * gamma, k3 * gamma, cfg.n_r, cfg.n_s, cfg.n_e);
            let more_k3 = survival_hop2_raw(w, k2 * gamma, (k3 + 0.5) * gamma, cfg.n_r, cfg.n_s, cfg.n_e);
            prop_assert!(more_k2 <= base + 1e-12);
            prop_assert!(more_k3 <= base + 1e-12);
        }
    }
}
