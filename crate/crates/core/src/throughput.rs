//! Secrecy throughput and its constrained maximization.
//!
//! Step one fixes the power splits and finds the code rates: the redundancy
//! rate comes from the secrecy constraint (the outage probability is strictly
//! decreasing in it, so the constraint binds), then the transmission rate
//! maximizes (r_b - r_e)(1 - p_to) by golden section after a coarse grid
//! confirms a single peak. Step two grids over both power splits and keeps
//! the best cell, refined once at half the local step. The result is a local
//! maximum by construction.

use crate::config::{CodePoint, SystemConfig};
use crate::error::{Error, Result};
use crate::exec;
use crate::outage::{p_so, p_to};
use crate::quad::QuadratureSettings;

/// Joint optimum over rates and power splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputSolution {
    pub r_b_star: f64,
    pub r_e_star: f64,
    pub beta_s_star: f64,
    pub beta_r_star: f64,
    /// Achieved secrecy throughput, bits per channel use.
    pub t_s: f64,
    pub p_so_at_opt: f64,
    pub p_to_at_opt: f64,
    /// Constraint level the solution was solved against.
    pub phi: f64,
    /// False when any coarse rate grid showed multiple local maxima.
    pub unimodal: bool,
}

/// Rates optimum at fixed power splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesSolution {
    pub r_b_star: f64,
    pub r_e_star: f64,
    pub t_s_star: f64,
    pub p_to_at_opt: f64,
    pub p_so_at_opt: f64,
    /// False when the coarse grid saw more than one local maximum and the
    /// returned point is only the grid best.
    pub unimodal: bool,
}

/// Budgets of the rate search.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Target |p_so - phi| at the returned redundancy rate.
    pub phi_tol: f64,
    /// Points of the unimodality screen.
    pub coarse_points: usize,
    /// Absolute width at which golden section stops.
    pub rb_tol: f64,
    /// Upper bound of the redundancy-rate bracket search.
    pub re_bracket_max: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            phi_tol: 1e-4,
            coarse_points: 32,
            rb_tol: 1e-4,
            re_bracket_max: 64.0,
        }
    }
}

/// Secrecy throughput (r_b - r_e)(1 - p_to) at a given code point.
pub fn throughput(cfg: &SystemConfig, cp: &CodePoint) -> Result<f64> {
    let outage = p_to(cfg, cp)?.value;
    Ok((cp.r_b - cp.r_e).max(0.0) * (1.0 - outage))
}

fn p_so_at_re(
    cfg: &SystemConfig,
    beta_s: f64,
    beta_r: f64,
    r_e: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let cp = CodePoint::new(r_e + 1.0, r_e, beta_s, beta_r)?;
    cp.validate_for(cfg)?;
    Ok(p_so(cfg, &cp, settings)?.value)
}

/// Redundancy rate at which the secrecy outage constraint binds,
/// p_so(r_e) = phi. Returns 0 when the constraint is slack everywhere
/// (no eavesdroppers, or phi >= 1).
pub fn solve_re_star(
    cfg: &SystemConfig,
    beta_s: f64,
    beta_r: f64,
    phi: f64,
    opts: &SolveOptions,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::Violation {
            field: "phi",
            reason: format!("must lie in (0, 1), got {phi}"),
        });
    }
    if phi >= 1.0 || cfg.lambda == 0.0 {
        return Ok(0.0);
    }
    // p_so(0+) = 1 > phi, p_so is continuous and strictly decreasing, and
    // tends to 0, so one root exists. Double the bracket until it straddles.
    let mut hi = 1.0;
    while p_so_at_re(cfg, beta_s, beta_r, hi, settings)? > phi {
        hi *= 2.0;
        if hi > opts.re_bracket_max {
            return Err(Error::NonConverged {
                what: format!("redundancy-rate bracket search (phi = {phi})"),
                best: hi,
                err: f64::INFINITY,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = p_so_at_re(cfg, beta_s, beta_r, mid, settings)?;
        if (v - phi).abs() <= opts.phi_tol {
            return Ok(mid);
        }
        if v > phi {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi.max(1.0) {
            break;
        }
    }
    Err(Error::NonConverged {
        what: format!("redundancy-rate bisection (phi = {phi})"),
        best: 0.5 * (lo + hi),
        err: hi - lo,
    })
}

fn p_to_at_rb(cfg: &SystemConfig, beta_s: f64, beta_r: f64, r_b: f64) -> Result<f64> {
    let cp = CodePoint::new(r_b.max(1e-12), 0.0, beta_s, beta_r)?;
    Ok(p_to(cfg, &cp)?.value)
}

/// Smallest transmission rate at which p_to has saturated (>= 1 - 1e-6); the
/// throughput objective is provably negligible past it.
fn r_b_max(cfg: &SystemConfig, beta_s: f64, beta_r: f64) -> Result<f64> {
    const SATURATION: f64 = 1.0 - 1e-6;
    let mut hi = 1.0;
    while p_to_at_rb(cfg, beta_s, beta_r, hi)? < SATURATION {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonConverged {
                what: "transmission-rate saturation search".into(),
                best: hi,
                err: f64::INFINITY,
            });
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p_to_at_rb(cfg, beta_s, beta_r, mid)? < SATURATION {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Best code rates at fixed power splits: the redundancy rate binds the
/// secrecy constraint, then golden section maximizes the throughput over the
/// transmission rate after a coarse unimodality screen.
pub fn solve_rates(
    cfg: &SystemConfig,
    beta_s: f64,
    beta_r: f64,
    phi: f64,
    opts: &SolveOptions,
    settings: &QuadratureSettings,
) -> Result<RatesSolution> {
    let r_e_star = solve_re_star(cfg, beta_s, beta_r, phi, opts, settings)?;
    let hi = r_b_max(cfg, beta_s, beta_r)?;
    let finish = |r_b: f64, unimodal: bool| -> Result<RatesSolution> {
        let p_to_v = p_to_at_rb(cfg, beta_s, beta_r, r_b)?;
        let p_so_v = if cfg.lambda == 0.0 || r_e_star == 0.0 {
            if cfg.lambda == 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            p_so_at_re(cfg, beta_s, beta_r, r_e_star, settings)?
        };
        Ok(RatesSolution {
            r_b_star: r_b,
            r_e_star,
            t_s_star: (r_b - r_e_star).max(0.0) * (1.0 - p_to_v),
            p_to_at_opt: p_to_v,
            p_so_at_opt: p_so_v,
            unimodal,
        })
    };
    if hi <= r_e_star {
        // Saturated before any positive-rate margin exists.
        return finish(r_e_star, true);
    }

    let objective = |r_b: f64| -> Result<f64> {
        Ok((r_b - r_e_star) * (1.0 - p_to_at_rb(cfg, beta_s, beta_r, r_b)?))
    };

    // Coarse screen for multiple interior maxima.
    let n = opts.coarse_points.max(8);
    let xs: Vec<f64> = (0..n)
        .map(|i| r_e_star + (hi - r_e_star) * i as f64 / (n - 1) as f64)
        .collect();
    let mut ts = Vec::with_capacity(n);
    for &x in &xs {
        ts.push(objective(x)?);
    }
    let mut best_idx = 0;
    for (i, &t) in ts.iter().enumerate() {
        if t > ts[best_idx] {
            best_idx = i;
        }
    }
    let scale = ts[best_idx].abs().max(1e-12);
    let mut peaks = 0;
    for i in 0..n {
        let left_rise = i == 0 || ts[i] > ts[i - 1] + 1e-9 * scale;
        let right_fall = i == n - 1 || ts[i] > ts[i + 1] + 1e-9 * scale;
        if left_rise && right_fall {
            peaks += 1;
        }
    }
    if peaks > 1 {
        return finish(xs[best_idx], false);
    }

    // Golden section inside the cells flanking the coarse argmax.
    let mut a = xs[best_idx.saturating_sub(1)];
    let mut b = xs[(best_idx + 1).min(n - 1)];
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > opts.rb_tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1)?;
        }
    }
    finish(0.5 * (a + b), true)
}

/// Power-split grids of the joint search.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGrids {
    pub beta_s: Vec<f64>,
    pub beta_r: Vec<f64>,
}

impl JointGrids {
    /// n points per axis: 1 - beta geometric from 0.95 down to 0.01 plus the
    /// no-AN endpoint beta = 1, so the grid is densest where small AN
    /// adjustments matter.
    pub fn log_spaced_near_one(n: usize) -> Self {
        let axis = Self::axis(n);
        Self {
            beta_s: axis.clone(),
            beta_r: axis,
        }
    }

    fn axis(n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let hi = 0.95f64; // 1 - beta at the AN-heavy end
        let lo = 0.01f64;
        let m = n - 1;
        let mut axis: Vec<f64> = (0..m)
            .map(|i| {
                let f = if m == 1 {
                    0.0
                } else {
                    i as f64 / (m - 1) as f64
                };
                1.0 - hi * (lo / hi).powf(f)
            })
            .collect();
        axis.push(1.0);
        axis
    }
}

impl Default for JointGrids {
    fn default() -> Self {
        Self::log_spaced_near_one(20)
    }
}

/// Joint maximization over (r_b, r_e, beta_s, beta_r) subject to the secrecy
/// outage constraint. Exhaustive over the power-split grid with an inner
/// rate solve per cell, then one local refinement at half the cell width.
/// Ties break toward the smallest beta_s, then beta_r, then r_b.
pub fn solve_joint(
    cfg: &SystemConfig,
    phi: f64,
    grids: &JointGrids,
    opts: &SolveOptions,
    settings: &QuadratureSettings,
) -> Result<ThroughputSolution> {
    let evaluate = |cells: &[(f64, f64)]| -> Result<Vec<(f64, f64, RatesSolution)>> {
        let results = exec::map_indexed(cells.len(), |i| {
            let (bs, br) = cells[i];
            solve_rates(cfg, bs, br, phi, opts, settings).map(|r| (bs, br, r))
        });
        results.into_iter().collect()
    };

    let cells: Vec<(f64, f64)> = grids
        .beta_s
        .iter()
        .flat_map(|&bs| grids.beta_r.iter().map(move |&br| (bs, br)))
        .collect();
    let coarse = evaluate(&cells)?;
    let best = pick_best(&coarse).expect("grid is nonempty");

    // One refinement pass: half-step grid spanning the neighbor cells.
    let si = grids.beta_s.iter().position(|&b| b == best.0).unwrap();
    let ri = grids.beta_r.iter().position(|&b| b == best.1).unwrap();
    let lo_s = grids.beta_s[si.saturating_sub(1)];
    let hi_s = grids.beta_s[(si + 1).min(grids.beta_s.len() - 1)];
    let lo_r = grids.beta_r[ri.saturating_sub(1)];
    let hi_r = grids.beta_r[(ri + 1).min(grids.beta_r.len() - 1)];
    let sub_axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
    };
    let fine_cells: Vec<(f64, f64)> = sub_axis(lo_s, hi_s)
        .into_iter()
        .flat_map(|bs| sub_axis(lo_r, hi_r).into_iter().map(move |br| (bs, br)))
        .collect();
    let fine = evaluate(&fine_cells)?;
    let mut all = coarse;
    all.extend(fine);
    let (bs, br, rates) = pick_best(&all).expect("nonempty");

    Ok(ThroughputSolution {
        r_b_star: rates.r_b_star,
        r_e_star: rates.r_e_star,
        beta_s_star: bs,
        beta_r_star: br,
        t_s: rates.t_s_star,
        p_so_at_opt: rates.p_so_at_opt,
        p_to_at_opt: rates.p_to_at_opt,
        phi,
        unimodal: rates.unimodal,
    })
}

fn pick_best(results: &[(f64, f64, RatesSolution)]) -> Option<(f64, f64, RatesSolution)> {
    results
        .iter()
        .copied()
        .max_by(|a, b| {
            a.2.t_s_star
                .total_cmp(&b.2.t_s_star)
                // Reversed comparisons: ties prefer the smallest parameters.
                .then(b.0.total_cmp(&a.0))
                .then(b.1.total_cmp(&a.1))
                .then(b.2.r_b_star.total_cmp(&a.2.r_b_star))
        })
}
