//! Numerical evaluation of the radial-angular double integrals behind the
//! secrecy outage probability, both exact and in the large-source-array
//! limit, plus the radial integral that cross-checks the closed form of the
//! first term.
//!
//! The radius is substituted as u = d_si^2 and integrated adaptively with a
//! 7-15 Gauss-Kronrod rule on [0, r_max^2]; the angle uses fixed-order
//! Gauss-Legendre, doubled until the whole integral stops moving. r_max is
//! certified from analytic exponential envelopes of the integrands so the
//! discarded tail is provably below the truncation tolerance.

use crate::config::{derive, CodePoint, SystemConfig};
use crate::eaves::{
    survival_hop1_asym, survival_hop1_raw, survival_hop2_asym, survival_hop2_raw,
};
use crate::error::{Error, Result};
use crate::special::{gamma_real, reg_gamma_pair};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Tolerances and budgets of the adaptive scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Target relative error.
    pub rel_tol: f64,
    /// Absolute floor below which refinement stops.
    pub abs_tol: f64,
    /// Maximum bisection depth of any radial panel.
    pub max_refinements: u32,
    /// Bound on the relative mass allowed beyond the truncation radius.
    pub truncation_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-12,
            max_refinements: 20,
            truncation_tol: 1e-10,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.rel_tol < 1.0
            && self.abs_tol > 0.0
            && self.truncation_tol > 0.0
            && self.max_refinements > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Violation {
                field: "quadrature settings",
                reason: "tolerances must be positive, rel_tol < 1, refinements >= 1".into(),
            })
        }
    }
}

/// Point in polar coordinates centered at the source; the relay sits on the
/// axis at distance d_sr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub d_si: f64,
    /// Angle in [0, pi].
    pub theta: f64,
}

/// The hop-2 exponent psi(theta) = tau_e sigma2_i2 / (beta_r p_r) * d_ri^eta,
/// with d_ri^2 from the cosine rule.
pub fn psi(cfg: &SystemConfig, cp: &CodePoint, pt: PolarPoint) -> f64 {
    let base = (cfg.d_sr * cfg.d_sr + pt.d_si * pt.d_si
        - 2.0 * cfg.d_sr * pt.d_si * pt.theta.cos())
    .max(0.0);
    cp.tau_e() * cfg.sigma2_i2 / (cp.beta_r * cfg.p_r) * base.powf(cfg.eta / 2.0)
}

/// Value with an error bound; `converged` is false when a budget ran out and
/// the value is only the best estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub err: f64,
    pub converged: bool,
}

impl QuadEstimate {
    /// Promote a non-converged estimate into an error carrying it.
    pub fn into_result(self, what: &str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConverged {
                what: what.to_string(),
                best: self.value,
                err: self.err,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 panel rule
// ---------------------------------------------------------------------------

// Positive Kronrod abscissae; the rule is symmetric.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Embedded 7-point Gauss weights, matching XGK indices 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod panel: returns (kronrod value, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut result_gauss = WG[3] * f_center;
    let mut result_kronrod = WGK[7] * f_center;
    for j in 0..7 {
        let x = half * XGK[j];
        let sum = f(center - x) + f(center + x);
        result_kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * sum;
        }
    }
    let value = result_kronrod * half;
    let err = ((result_kronrod - result_gauss) * half).abs();
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

/// Worst-panel-first adaptive integration on [a, b].
fn adaptive_gk<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
    max_panels: usize,
) -> QuadEstimate {
    const INITIAL_PANELS: usize = 16;
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels: Vec<Panel> = (0..INITIAL_PANELS)
        .map(|i| {
            let pa = a + i as f64 * width;
            let pb = if i + 1 == INITIAL_PANELS {
                b
            } else {
                a + (i + 1) as f64 * width
            };
            let (value, err) = gk15(f, pa, pb);
            Panel {
                a: pa,
                b: pb,
                value,
                err,
                depth: 0,
            }
        })
        .collect();

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let target = (rel_tol * total.abs()).max(abs_tol);
        if total_err <= target {
            return QuadEstimate {
                value: total,
                err: total_err,
                converged: true,
            };
        }
        // Split the worst panel; stop when the budget or depth is exhausted.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("at least one panel");
        if panels[worst].depth >= max_depth || panels.len() >= max_panels {
            return QuadEstimate {
                value: total,
                err: total_err,
                converged: false,
            };
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let (lv, le) = gk15(f, p.a, mid);
        let (rv, re) = gk15(f, mid, p.b);
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: lv,
            err: le,
            depth: p.depth + 1,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: rv,
            err: re,
            depth: p.depth + 1,
        });
    }
}

const MAX_PANELS: usize = 4096;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes for the angular dimension
// ---------------------------------------------------------------------------

/// Nodes and weights on [-1, 1], cached per order. Newton iteration on the
/// Legendre polynomial recurrence.
fn gl_nodes(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(nodes) = cache.lock().unwrap().get(&order) {
        return nodes.clone();
    }
    let mut nodes = Vec::with_capacity(order);
    let n = order as f64;
    for k in 1..=(order + 1) / 2 {
        let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=order {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push((x, w));
        if 2 * k != order + 1 {
            nodes.push((-x, w));
        }
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let arc = Arc::new(nodes);
    cache.lock().unwrap().insert(order, arc.clone());
    arc
}

// ---------------------------------------------------------------------------
// Integrand context
// ---------------------------------------------------------------------------

/// Which double integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum JKind {
    /// Hop-2 survival alone.
    J2,
    /// Product of hop-1 and hop-2 survivals.
    J3,
    /// Large-array limits of the same.
    J2Inf,
    J3Inf,
}

impl JKind {
    fn asymptotic(self) -> bool {
        matches!(self, JKind::J2Inf | JKind::J3Inf)
    }
    fn has_hop1(self) -> bool {
        matches!(self, JKind::J3 | JKind::J3Inf)
    }
}

/// Precomputed constants shared by every integrand evaluation; the inner
/// loops only touch distances.
struct JContext {
    n_s: usize,
    n_r: usize,
    n_e: usize,
    eta: f64,
    d_sr: f64,
    /// tau_e sigma2_i1 / (beta_s p_s): hop-1 exponent per d_si^eta.
    c1: f64,
    /// tau_e sigma2_i2 / (beta_r p_r): hop-2 exponent per d_ri^eta.
    c2: f64,
    /// kappa_3 tau_e per (d_ri/d_si)^eta.
    zc: f64,
    /// kappa_1 tau_e.
    k1t: f64,
    /// kappa_2 tau_e.
    k2t: f64,
    /// (1 - beta_s) tau_e / beta_s: hop-1 limit parameter.
    a_inf: f64,
}

impl JContext {
    fn new(cfg: &SystemConfig, cp: &CodePoint) -> Result<Self> {
        let tau_e = cp.tau_e();
        if tau_e <= 0.0 {
            return Err(Error::Domain {
                what: "secrecy quadrature",
                detail: "tau_e must be > 0 (r_e > 0)".into(),
            });
        }
        let d = derive(cfg, cp);
        Ok(Self {
            n_s: cfg.n_s,
            n_r: cfg.n_r,
            n_e: cfg.n_e,
            eta: cfg.eta,
            d_sr: cfg.d_sr,
            c1: tau_e * cfg.sigma2_i1 / (cp.beta_s * cfg.p_s),
            c2: tau_e * cfg.sigma2_i2 / (cp.beta_r * cfg.p_r),
            zc: cfg.p_s * tau_e / (cp.beta_r * cfg.p_r * cfg.n_s as f64),
            k1t: d.kappa_1 * tau_e,
            k2t: d.kappa_2 * tau_e,
            a_inf: (1.0 - cp.beta_s) * tau_e / cp.beta_s,
        })
    }

    #[inline]
    fn hop1(&self, d_eta: f64, asymptotic: bool) -> f64 {
        let w = self.c1 * d_eta;
        if asymptotic {
            survival_hop1_asym(w, self.a_inf, self.n_e)
        } else {
            survival_hop1_raw(w, self.k1t, self.n_s, self.n_e)
        }
    }

    #[inline]
    fn hop2(&self, d_eta: f64, ri_eta: f64, asymptotic: bool) -> f64 {
        let w = self.c2 * ri_eta;
        if asymptotic {
            let z_inf = self.zc * self.n_s as f64 * ri_eta / d_eta;
            survival_hop2_asym(w, self.k2t, z_inf, self.n_r, self.n_e)
        } else {
            let z = self.zc * ri_eta / d_eta;
            survival_hop2_raw(w, self.k2t, z, self.n_r, self.n_s, self.n_e)
        }
    }

    #[inline]
    fn hop2_at_theta(&self, d_si: f64, d_eta: f64, theta: f64, asymptotic: bool) -> f64 {
        let ri2 = (self.d_sr * self.d_sr + d_si * d_si - 2.0 * self.d_sr * d_si * theta.cos())
            .max(0.0);
        self.hop2(d_eta, ri2.powf(self.eta / 2.0), asymptotic)
    }

    fn hop1_factor(&self, d_eta: f64, kind: JKind) -> f64 {
        if kind.has_hop1() {
            self.hop1(d_eta, kind.asymptotic())
        } else {
            1.0
        }
    }

    /// Angular integral of the hop-2 factor at fixed radius times the hop-1
    /// radial factor. The leading d_si of the polar Jacobian is NOT included:
    /// integrating in u = d_si^2 absorbs it as du = 2 d_si dd_si.
    fn radial_integrand(&self, d_si: f64, kind: JKind, nodes: &[(f64, f64)]) -> f64 {
        if d_si <= 0.0 {
            return 0.0;
        }
        let d_eta = d_si.powf(self.eta);
        let radial = self.hop1_factor(d_eta, kind);
        if radial == 0.0 {
            return 0.0;
        }
        let half_pi = 0.5 * std::f64::consts::PI;
        let mut acc = 0.0;
        for &(x, w) in nodes {
            let theta = half_pi * (x + 1.0);
            acc += w * self.hop2_at_theta(d_si, d_eta, theta, kind.asymptotic());
        }
        radial * half_pi * acc
    }

    /// Fallback integrand with adaptive panels in the angle. At extreme
    /// thresholds the hop-2 mass collapses to a spot of angular width
    /// ~ tau_e^(-1/eta) around the relay direction, which outgrows any fixed
    /// quadrature order; bisection tracks it at logarithmic cost.
    fn radial_integrand_adaptive(
        &self,
        d_si: f64,
        kind: JKind,
        theta_rel_tol: f64,
        theta_abs_tol: f64,
        max_depth: u32,
    ) -> f64 {
        if d_si <= 0.0 {
            return 0.0;
        }
        let d_eta = d_si.powf(self.eta);
        let radial = self.hop1_factor(d_eta, kind);
        if radial == 0.0 {
            return 0.0;
        }
        let mut f = |theta: f64| self.hop2_at_theta(d_si, d_eta, theta, kind.asymptotic());
        let inner = adaptive_gk(
            &mut f,
            0.0,
            std::f64::consts::PI,
            theta_rel_tol,
            theta_abs_tol,
            max_depth,
            512,
        );
        radial * inner.value
    }

    /// Hop-1 radial tail envelope integrated over [r, inf), including the
    /// angular measure pi. Also the full-domain total at r = 0.
    fn tail_hop1(&self, r: f64) -> Result<f64> {
        poisson_tail_radial(self.c1, self.eta, self.n_e, r, 0.0)
    }

    /// Hop-2 radial tail envelope: for d_si >= r > d_sr the exponent is at
    /// least c2 (d_si - d_sr)^eta, which integrates in closed form.
    fn tail_hop2(&self, r: f64) -> Result<f64> {
        if r < self.d_sr {
            // The envelope is <= 1 wherever d_si <= d_sr.
            let inner = std::f64::consts::PI * 0.5 * (self.d_sr * self.d_sr - r * r);
            return Ok(inner + self.tail_hop2(self.d_sr)?);
        }
        poisson_tail_radial(self.c2, self.eta, self.n_e, r - self.d_sr, self.d_sr)
    }

    fn tail(&self, kind: JKind, r: f64) -> Result<f64> {
        match kind {
            JKind::J2 | JKind::J2Inf => self.tail_hop2(r),
            // The product integrand is below each factor's envelope.
            JKind::J3 | JKind::J3Inf => Ok(self.tail_hop1(r)?.min(self.tail_hop2(r)?)),
        }
    }

    /// Truncation radius such that the envelope tail is below
    /// truncation_tol times the envelope total.
    fn r_max(&self, kind: JKind, settings: &QuadratureSettings) -> Result<f64> {
        let total = self.tail(kind, 0.0)?.max(1e-300);
        let target = settings.truncation_tol * total;
        let mut r = self.d_sr + self.c1.powf(-1.0 / self.eta).min(1e12)
            + self.c2.powf(-1.0 / self.eta).min(1e12);
        for _ in 0..200 {
            if self.tail(kind, r)? <= target {
                return Ok(r);
            }
            r *= 1.5;
        }
        Err(Error::NonConverged {
            what: "truncation radius search".into(),
            best: r,
            err: f64::INFINITY,
        })
    }
}

/// pi * int_r^inf (v + shift) * e^{-c v^eta} sum_{j<n_e} (c v^eta)^j / j! dv,
/// evaluated through upper incomplete gamma functions. This is the analytic
/// envelope mass beyond radius `r + shift` for an integrand whose exponent
/// grows like c v^eta in the shifted radius v.
fn poisson_tail_radial(c: f64, eta: f64, n_e: usize, v0: f64, shift: f64) -> Result<f64> {
    let x = c * v0.powf(eta);
    let mut acc = 0.0;
    let mut inv_fact = 1.0;
    for j in 0..n_e {
        if j > 0 {
            inv_fact /= j as f64;
        }
        let a2 = 2.0 / eta + j as f64;
        let q2 = reg_gamma_pair(a2, x)?.1;
        acc += inv_fact * c.powf(-2.0 / eta) * gamma_real(a2)? * q2 / eta;
        if shift > 0.0 {
            let a1 = 1.0 / eta + j as f64;
            let q1 = reg_gamma_pair(a1, x)?.1;
            acc += inv_fact * shift * c.powf(-1.0 / eta) * gamma_real(a1)? * q1 / eta;
        }
    }
    Ok(std::f64::consts::PI * acc)
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

const ANGULAR_ORDERS: [usize; 4] = [32, 64, 128, 256];

fn double_integral(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
    kind: JKind,
) -> Result<QuadEstimate> {
    settings.validate()?;
    let ctx = JContext::new(cfg, cp)?;
    let mut r_max = ctx.r_max(kind, settings)?;

    for _attempt in 0..5 {
        let radial = |f: &mut dyn FnMut(f64) -> f64| {
            adaptive_gk(
                &mut |u| f(u),
                0.0,
                r_max * r_max,
                settings.rel_tol,
                settings.abs_tol,
                settings.max_refinements,
                MAX_PANELS,
            )
        };

        // Primary path: fixed-order Gauss-Legendre in the angle, order
        // doubled until the whole integral stops moving.
        let mut settled: Option<(QuadEstimate, f64)> = None;
        let mut prev: Option<QuadEstimate> = None;
        for &order in &ANGULAR_ORDERS {
            let nodes = gl_nodes(order);
            let est = radial(&mut |u: f64| {
                0.5 * ctx.radial_integrand(u.max(0.0).sqrt(), kind, &nodes)
            });
            if let Some(p) = prev {
                let delta = (est.value - p.value).abs();
                if delta <= (settings.rel_tol * est.value.abs()).max(settings.abs_tol) {
                    settled = Some((est, delta));
                    break;
                }
            }
            prev = Some(est);
        }

        // Fallback: adaptive angular panels, verified by re-running at a
        // quarter of the angular tolerance.
        let (est, angular_err) = match settled {
            Some(pair) => pair,
            None => {
                let run = |theta_rel: f64| {
                    radial(&mut |u: f64| {
                        0.5 * ctx.radial_integrand_adaptive(
                            u.max(0.0).sqrt(),
                            kind,
                            theta_rel,
                            settings.abs_tol,
                            settings.max_refinements,
                        )
                    })
                };
                let coarse = run(0.1 * settings.rel_tol);
                let fine = run(0.025 * settings.rel_tol);
                let delta = (coarse.value - fine.value).abs();
                let ok =
                    delta <= (settings.rel_tol * fine.value.abs()).max(settings.abs_tol);
                (
                    QuadEstimate {
                        converged: fine.converged && ok,
                        ..fine
                    },
                    delta,
                )
            }
        };

        // The ex-ante radius came from the envelope total; confirm it also
        // certifies against the actual integral value.
        let tail = ctx.tail(kind, r_max)?;
        if tail > settings.truncation_tol * est.value.abs().max(settings.abs_tol) {
            r_max *= 2.0;
            continue;
        }
        return Ok(QuadEstimate {
            value: est.value,
            err: est.err + angular_err + tail,
            converged: est.converged,
        });
    }
    Err(Error::NonConverged {
        what: "double integral truncation".into(),
        best: f64::NAN,
        err: f64::INFINITY,
    })
}

/// Double integral of the hop-2 survival factor (the second term of the
/// secrecy outage exponent).
pub fn integral_j2(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    double_integral(cfg, cp, settings, JKind::J2)
}

/// Double integral of the product of hop-1 and hop-2 survival factors (the
/// subtracted third term).
pub fn integral_j3(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    double_integral(cfg, cp, settings, JKind::J3)
}

/// Large-array limit of `integral_j2`.
pub fn integral_j2_inf(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    double_integral(cfg, cp, settings, JKind::J2Inf)
}

/// Large-array limit of `integral_j3`.
pub fn integral_j3_inf(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    double_integral(cfg, cp, settings, JKind::J3Inf)
}

/// Radial quadrature of the hop-1 survival term. Exists to validate the
/// closed form; the angular integrand is constant so the angle contributes
/// exactly pi.
pub fn integral_j1_oracle(
    cfg: &SystemConfig,
    cp: &CodePoint,
    settings: &QuadratureSettings,
) -> Result<QuadEstimate> {
    settings.validate()?;
    let ctx = JContext::new(cfg, cp)?;
    let total = ctx.tail_hop1(0.0)?.max(1e-300);
    let mut r = ctx.d_sr + ctx.c1.powf(-1.0 / ctx.eta).min(1e12);
    for _ in 0..200 {
        if ctx.tail_hop1(r)? <= settings.truncation_tol * total {
            break;
        }
        r *= 1.5;
    }
    let pi = std::f64::consts::PI;
    let mut f = |u: f64| {
        let d = u.max(0.0).sqrt();
        if d == 0.0 {
            return 0.0;
        }
        // d dd = du / 2: the polar factor is absorbed by the substitution.
        0.5 * pi * ctx.hop1(d.powf(ctx.eta), false)
    };
    let est = adaptive_gk(
        &mut f,
        0.0,
        r * r,
        settings.rel_tol,
        settings.abs_tol,
        settings.max_refinements,
        MAX_PANELS,
    );
    let tail = ctx.tail_hop1(r)?;
    Ok(QuadEstimate {
        value: est.value,
        err: est.err + tail,
        converged: est.converged,
    })
}

/// Envelope mass of the hop-1 term beyond radius r; used to certify the
/// Monte Carlo simulation disk.
pub(crate) fn envelope_tail_hop1(cfg: &SystemConfig, cp: &CodePoint, r: f64) -> Result<f64> {
    JContext::new(cfg, cp)?.tail_hop1(r)
}

/// Envelope mass of the hop-2 term beyond radius r.
pub(crate) fn envelope_tail_hop2(cfg: &SystemConfig, cp: &CodePoint, r: f64) -> Result<f64> {
    JContext::new(cfg, cp)?.tail_hop2(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eaves::EavesGeometry;

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

    fn cp(r_e: f64, beta_s: f64, beta_r: f64) -> CodePoint {
        CodePoint::new(r_e.max(1.0) + 4.0, r_e, beta_s, beta_r).unwrap()
    }

    #[test]
    fn psi_geometry_cases() {
        let cfg = fig3_config();
        let point = cp(1.0, 0.5, 0.5);
        // Eavesdropper sitting on the relay.
        let at_relay = PolarPoint {
            d_si: 10.0,
            theta: 0.0,
        };
        assert_eq!(psi(&cfg, &point, at_relay), 0.0);

        // Collinear on the far side: base (d_sr + d_si)^2.
        let far = PolarPoint {
            d_si: 4.0,
            theta: std::f64::consts::PI,
        };
        let scale = point.tau_e() * cfg.sigma2_i2 / (point.beta_r * cfg.p_r);
        assert!((psi(&cfg, &point, far) - scale * 196.0f64.powf(2.0)).abs() < 1e-9);

        // Right angle at eta = 4: base 200, psi = scale * 200^2.
        let side = PolarPoint {
            d_si: 10.0,
            theta: std::f64::consts::FRAC_PI_2,
        };
        assert!((psi(&cfg, &point, side) / (scale * 4.0e4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrands_match_survival_functions() {
        // The shared-constant context must agree with the per-point CDFs.
        let cfg = fig3_config();
        let point = cp(1.0, 0.6, 0.4);
        let ctx = JContext::new(&cfg, &point).unwrap();
        let tau_e = point.tau_e();
        for (d_si, theta) in [(3.0, 0.4), (10.0, 1.2), (22.0, 2.9), (10.0, 1e-6)] {
            let geo = EavesGeometry::from_polar(cfg.d_sr, d_si, theta).unwrap();
            let s1 = crate::eaves::sf_gamma_si(&cfg, &point, &geo, tau_e).unwrap();
            let s2 = crate::eaves::sf_gamma_ri(&cfg, &point, &geo, tau_e).unwrap();
            let d_eta = d_si.powf(cfg.eta);
            let ri_eta = geo.d_ri.powf(cfg.eta);
            let h1 = ctx.hop1(d_eta, false);
            let h2 = ctx.hop2(d_eta, ri_eta, false);
            assert!((h1 - s1).abs() <= 1e-12 * s1.max(1e-300), "hop1 at {d_si},{theta}");
            assert!((h2 - s2).abs() <= 1e-12 * s2.max(1e-300), "hop2 at {d_si},{theta}");
        }
    }

    #[test]
    fn adaptive_gk_on_known_integrals() {
        let mut f = |x: f64| (-x).exp();
        let est = adaptive_gk(&mut f, 0.0, 30.0, 1e-10, 1e-14, 20, 1024);
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-10);

        let mut g = |x: f64| x.sqrt();
        let est = adaptive_gk(&mut g, 0.0, 1.0, 1e-10, 1e-14, 40, 4096);
        assert!((est.value - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        for order in [4usize, 32, 64] {
            let nodes = gl_nodes(order);
            assert_eq!(nodes.len(), order);
            let int_x2: f64 = nodes.iter().map(|&(x, w)| w * x * x).sum();
            assert!((int_x2 - 2.0 / 3.0).abs() < 1e-13, "order {order}");
            let int_odd: f64 = nodes.iter().map(|&(x, w)| w * x * x * x).sum();
            assert!(int_odd.abs() < 1e-14);
        }
    }

    /// Composite Simpson on a uniform grid in both dimensions; the
    /// independent fine-grid oracle for the adaptive scheme.
    fn simpson_2d(ctx: &JContext, kind: JKind, r_max: f64, n_r: usize, n_t: usize) -> f64 {
        let h_r = r_max / n_r as f64;
        let h_t = std::f64::consts::PI / n_t as f64;
        let mut total = 0.0;
        for i in 0..=n_r {
            let d = i as f64 * h_r;
            let wr = if i == 0 || i == n_r {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            if d == 0.0 {
                continue;
            }
            let d_eta = d.powf(ctx.eta);
            let h1 = if kind.has_hop1() {
                ctx.hop1(d_eta, kind.asymptotic())
            } else {
                1.0
            };
            if h1 == 0.0 {
                continue;
            }
            let mut theta_acc = 0.0;
            for j in 0..=n_t {
                let theta = j as f64 * h_t;
                let wt = if j == 0 || j == n_t {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let ri2 = (ctx.d_sr * ctx.d_sr + d * d - 2.0 * ctx.d_sr * d * theta.cos()).max(0.0);
                theta_acc += wt * ctx.hop2(d_eta, ri2.powf(ctx.eta / 2.0), kind.asymptotic());
            }
            total += wr * d * h1 * theta_acc * h_t / 3.0;
        }
        total * h_r / 3.0
    }

    #[test]
    fn j2_and_j3_match_fine_grid_oracle() {
        let cfg = fig3_config();
        let point = cp(1.0, 0.5, 0.5);
        let settings = QuadratureSettings::default();
        let ctx = JContext::new(&cfg, &point).unwrap();
        for kind in [JKind::J2, JKind::J3] {
            let adaptive = double_integral(&cfg, &point, &settings, kind).unwrap();
            assert!(adaptive.converged, "{kind:?} did not converge");
            let r_max = ctx.r_max(kind, &settings).unwrap();
            let oracle = simpson_2d(&ctx, kind, r_max, 4000, 800);
            let rel = (adaptive.value - oracle).abs() / oracle.abs();
            assert!(
                rel < 1e-5,
                "{kind:?}: adaptive {} vs oracle {} (rel {rel:.2e})",
                adaptive.value,
                oracle
            );
        }
    }

    #[test]
    fn j3_never_exceeds_j2() {
        let cfg = fig3_config();
        let settings = QuadratureSettings::default();
        for (r_e, bs, br) in [(0.5, 0.5, 0.5), (1.0, 0.8, 0.3), (2.0, 0.3, 0.9)] {
            let point = cp(r_e, bs, br);
            let j2 = integral_j2(&cfg, &point, &settings).unwrap();
            let j3 = integral_j3(&cfg, &point, &settings).unwrap();
            assert!(j3.value <= j2.value * (1.0 + 1e-9), "({r_e},{bs},{br})");
            assert!(j3.value >= 0.0 && j2.value >= 0.0);
        }
    }

    #[test]
    fn beta_s_one_removes_hop1_power_term() {
        // kappa_1 = 0: the hop-1 factor is pure exponential times the p-sum.
        let cfg = fig3_config();
        let point = cp(1.0, 1.0, 0.5);
        let ctx = JContext::new(&cfg, &point).unwrap();
        assert_eq!(ctx.k1t, 0.0);
        let j3 = integral_j3(&cfg, &point, &QuadratureSettings::default()).unwrap();
        assert!(j3.converged && j3.value > 0.0);
    }

    #[test]
    fn integrals_decrease_in_tau_e_and_vanish_in_the_limit() {
        let cfg = fig3_config();
        let settings = QuadratureSettings::default();
        let mut prev = f64::INFINITY;
        for r_e in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let point = cp(r_e, 0.5, 0.5);
            let j2 = integral_j2(&cfg, &point, &settings).unwrap();
            assert!(j2.value < prev);
            prev = j2.value;
        }
        // The limit is zero but only polynomially fast: eavesdroppers close
        // to the relay always exceed the threshold, and that disk shrinks
        // like tau_e^(-2/eta). Check the trend at tau_e ~ 1e6 and a 16x step.
        let j2_ref = integral_j2(&cfg, &cp(1.0, 0.5, 0.5), &settings)
            .unwrap()
            .value;
        let big = CodePoint::new(21.0, 20.0, 0.5, 0.5).unwrap(); // tau_e ~ 1.05e6
        let bigger = CodePoint::new(25.0, 22.0, 0.5, 0.5).unwrap(); // 16x tau_e
        let j2_big = integral_j2(&cfg, &big, &settings).unwrap().value;
        let j2_bigger = integral_j2(&cfg, &bigger, &settings).unwrap().value;
        assert!(j2_big < 0.02 * j2_ref, "j2(tau=1e6) = {j2_big}, ref = {j2_ref}");
        assert!(
            j2_bigger < 0.6 * j2_big,
            "expected ~tau^(-1/2) decay: {j2_bigger} vs {j2_big}"
        );
        let j2i_big = integral_j2_inf(&cfg, &big, &settings).unwrap().value;
        let j2i_ref = integral_j2_inf(&cfg, &cp(1.0, 0.5, 0.5), &settings)
            .unwrap()
            .value;
        assert!(j2i_big < 0.02 * j2i_ref);

        // By contrast the hop-1 factor in the product term dies exponentially
        // in tau_e everywhere, so that integral truly collapses.
        let j3_big = integral_j3(&cfg, &big, &settings).unwrap().value;
        assert!(j3_big < 1e-12, "j3 = {j3_big}");
    }

    #[test]
    fn lambda_never_enters_the_integrals() {
        let cfg_a = fig3_config();
        let cfg_b = SystemConfig {
            lambda: 0.5,
            ..fig3_config()
        };
        let point = cp(1.0, 0.5, 0.5);
        let settings = QuadratureSettings::default();
        assert_eq!(
            integral_j2(&cfg_a, &point, &settings).unwrap().value,
            integral_j2(&cfg_b, &point, &settings).unwrap().value
        );
    }

    #[test]
    fn asymptotic_integrals_approach_exact_at_large_n_s() {
        let settings = QuadratureSettings::default();
        let point = cp(1.0, 0.5, 0.5);
        let cfg_inf = fig3_config();
        let cfg_256 = SystemConfig {
            n_s: 256,
            ..fig3_config()
        };
        let j2_inf = integral_j2_inf(&cfg_inf, &point, &settings).unwrap();
        let j2_256 = integral_j2(&cfg_256, &point, &settings).unwrap();
        let rel = (j2_inf.value - j2_256.value).abs() / j2_inf.value;
        assert!(rel < 1e-2, "rel = {rel:.3e}");

        // The limit drops n_s entirely.
        let other = SystemConfig {
            n_s: 17,
            ..fig3_config()
        };
        assert_eq!(
            integral_j2_inf(&other, &point, &settings).unwrap().value,
            j2_inf.value
        );
    }

    #[test]
    fn halving_rel_tol_stays_within_reported_error() {
        let cfg = fig3_config();
        let point = cp(1.0, 0.5, 0.5);
        let loose = QuadratureSettings {
            rel_tol: 1e-6,
            ..Default::default()
        };
        let tight = QuadratureSettings {
            rel_tol: 5e-7,
            ..Default::default()
        };
        for f in [integral_j2, integral_j3] {
            let a = f(&cfg, &point, &loose).unwrap();
            let b = f(&cfg, &point, &tight).unwrap();
            assert!(
                (a.value - b.value).abs() <= a.err.max(1e-14),
                "moved {} vs err {}",
                (a.value - b.value).abs(),
                a.err
            );
        }
    }

    #[test]
    fn tau_e_zero_is_a_domain_error() {
        let cfg = fig3_config();
        let point = CodePoint::new(2.0, 0.0, 0.5, 0.5).unwrap();
        assert!(integral_j2(&cfg, &point, &QuadratureSettings::default()).is_err());
    }
}
