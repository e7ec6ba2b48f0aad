//! Link-level plus stochastic-geometry Monte Carlo simulator: the
//! independent oracle for every analytic result in the crate.
//!
//! Each trial draws Rayleigh channel matrices, builds the eigen-beamformers
//! and AN precoders, evaluates the end-to-end main-link SNR, scatters
//! eavesdroppers on a disk as a Poisson point process, and computes their
//! MMSE SINRs from the interference covariances directly. Trials own
//! counter-based RNG streams keyed by (master seed, trial index), so results
//! are bit-identical regardless of thread count or ordering.

pub mod linalg;

use crate::config::{CodePoint, SystemConfig};
use crate::error::{Error, Result};
use crate::exec;
use crate::outage::{EstimateKind, OutageEstimate};
use crate::quad::{envelope_tail_hop1, envelope_tail_hop2, PolarPoint};
use linalg::{hermitian_eig, quad_form_inv, CMat};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// Secrecy-outage probability mass allowed outside the simulation disk.
pub const TRUNCATION_BUDGET: f64 = 1e-4;

/// Channel draws and eavesdropper placements of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// n_r x n_s source-relay matrix.
    pub h_sr: CMat,
    /// n_d x n_r relay-destination matrix.
    pub h_rd: CMat,
    pub eves: Vec<EveDraw>,
}

/// One eavesdropper: its polar position (source-centered) and its channels
/// from source and relay. The same h_si carries both the hop-1 interception
/// and the hop-2 jamming from the source.
#[derive(Debug, Clone, PartialEq)]
pub struct EveDraw {
    pub pos: PolarPoint,
    /// n_e x n_s.
    pub h_si: CMat,
    /// n_e x n_r.
    pub h_ri: CMat,
}

/// Eigen-beamformers of both hops: information beams, AN precoders spanning
/// the orthogonal complements, and the two largest eigenvalues.
#[derive(Debug, Clone)]
pub struct Beamformers {
    pub w_s: Vec<Complex64>,
    /// n_s x (n_s - 1).
    pub w_san: CMat,
    pub w_r: Vec<Complex64>,
    /// n_r x (n_r - 1).
    pub w_ran: CMat,
    pub lam_sr: f64,
    pub lam_rd: f64,
}

/// Poisson point process sample on the simulation disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PppSample {
    pub positions: Vec<PolarPoint>,
    pub r_sim: f64,
}

/// Options of a Monte Carlo run.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    /// Simulation disk radius; None derives a certified default.
    pub r_sim: Option<f64>,
}

/// Per-trial RNG stream: all trials share the master seed and differ only in
/// the ChaCha stream number.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Unit-variance circularly-symmetric complex Gaussian draw.
#[inline]
fn sample_cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

fn sample_cmat(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, sample_cn(rng));
        }
    }
    m
}

/// Uniform position on the disk of radius r_sim, folded to theta in [0, pi]
/// (the geometry is mirror-symmetric about the source-relay axis).
fn sample_position(r_sim: f64, rng: &mut ChaCha8Rng) -> PolarPoint {
    let d_si = r_sim * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    let theta = if phi > std::f64::consts::PI {
        std::f64::consts::TAU - phi
    } else {
        phi
    };
    PolarPoint { d_si, theta }
}

/// Draw one eavesdropper's channels at a fixed position.
pub fn sample_eve_at(cfg: &SystemConfig, pos: PolarPoint, rng: &mut ChaCha8Rng) -> EveDraw {
    EveDraw {
        pos,
        h_si: sample_cmat(cfg.n_e, cfg.n_s, rng),
        h_ri: sample_cmat(cfg.n_e, cfg.n_r, rng),
    }
}

/// Draw the eavesdropper point process on the disk.
pub fn sample_ppp(lambda: f64, r_sim: f64, rng: &mut ChaCha8Rng) -> PppSample {
    let mean = lambda * std::f64::consts::PI * r_sim * r_sim;
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    } else {
        0
    };
    let positions = (0..count).map(|_| sample_position(r_sim, rng)).collect();
    PppSample { positions, r_sim }
}

/// Draw every channel of one trial. Sampling order is fixed (h_sr, h_rd,
/// eavesdropper count, then per eavesdropper: position, h_si, h_ri) so a
/// seed pins the whole realization.
pub fn sample_realization(
    cfg: &SystemConfig,
    r_sim: f64,
    rng: &mut ChaCha8Rng,
) -> ChannelRealization {
    let h_sr = sample_cmat(cfg.n_r, cfg.n_s, rng);
    let h_rd = sample_cmat(cfg.n_d, cfg.n_r, rng);
    let ppp = sample_ppp(cfg.lambda, r_sim, rng);
    let eves = ppp
        .positions
        .into_iter()
        .map(|pos| EveDraw {
            pos,
            h_si: sample_cmat(cfg.n_e, cfg.n_s, rng),
            h_ri: sample_cmat(cfg.n_e, cfg.n_r, rng),
        })
        .collect();
    ChannelRealization { h_sr, h_rd, eves }
}

/// Rotate a column so its largest-magnitude entry is real positive. SNRs are
/// phase-invariant; this only pins the representation for reproducibility.
fn fix_phase(col: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (i, z) in col.iter().enumerate() {
        let n = z.norm_sqr();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    let z = col[best];
    let n = z.norm();
    if n > 0.0 {
        let rot = z.conj() / n;
        for v in col.iter_mut() {
            *v *= rot;
        }
    }
}

/// Eigen-decompose both Gram matrices and split eigenvectors into the
/// information beam (largest eigenvalue) and the AN precoder (the rest, in
/// descending eigenvalue order). The stacked matrix is unitary because the
/// eigenvectors of a Hermitian matrix are orthonormal.
pub fn build_beamformers(ch: &ChannelRealization) -> Result<Beamformers> {
    let (w_s, w_san, lam_sr) = principal_split(&ch.h_sr.gram())?;
    let (w_r, w_ran, lam_rd) = principal_split(&ch.h_rd.gram())?;
    Ok(Beamformers {
        w_s,
        w_san,
        w_r,
        w_ran,
        lam_sr,
        lam_rd,
    })
}

fn principal_split(gram: &CMat) -> Result<(Vec<Complex64>, CMat, f64)> {
    let n = gram.rows;
    let (vals, vecs) = hermitian_eig(gram)?;
    let lam_max = vals[n - 1].max(0.0);
    let mut w = vecs.col(n - 1);
    fix_phase(&mut w);
    let mut an = CMat::zeros(n, n.saturating_sub(1));
    for (j, src) in (0..n - 1).rev().enumerate() {
        let mut col = vecs.col(src);
        fix_phase(&mut col);
        for (r, v) in col.into_iter().enumerate() {
            an.set(r, j, v);
        }
    }
    Ok((w, an, lam_max))
}

/// Instantaneous SNRs of the two hops for one realization; the end-to-end
/// SNR of the decode-and-forward link is their minimum.
pub fn main_link_snrs(cfg: &SystemConfig, cp: &CodePoint, bf: &Beamformers) -> (f64, f64) {
    let gamma_sr = cp.beta_s * cfg.p_s / (cfg.d_sr.powf(cfg.eta) * cfg.sigma2_r) * bf.lam_sr;
    let gamma_rd = cp.beta_r * cfg.p_r / (cfg.d_rd.powf(cfg.eta) * cfg.sigma2_d) * bf.lam_rd;
    (gamma_sr, gamma_rd)
}

const MIN_DIST: f64 = 1e-9;

/// MMSE SINRs of one eavesdropper over the two hops. The hop-1 covariance
/// holds the source AN leakage; the hop-2 covariance holds relay AN leakage
/// plus the source's isotropic jamming at covariance I / n_s.
pub fn eaves_sinrs(
    cfg: &SystemConfig,
    cp: &CodePoint,
    bf: &Beamformers,
    eve: &EveDraw,
) -> Result<(f64, f64)> {
    let d_si = eve.pos.d_si.max(MIN_DIST);
    let d_ri2 = (cfg.d_sr * cfg.d_sr + d_si * d_si
        - 2.0 * cfg.d_sr * d_si * eve.pos.theta.cos())
    .max(MIN_DIST * MIN_DIST);
    let d_ri = d_ri2.sqrt();
    let path_s = cfg.p_s * d_si.powf(-cfg.eta);
    let path_r = cfg.p_r * d_ri.powf(-cfg.eta);

    // Hop 1.
    let h_w = eve.h_si.mul_vec(&bf.w_s);
    let mut k_si = CMat::zeros(cfg.n_e, cfg.n_e);
    if cp.beta_s < 1.0 && cfg.n_s > 1 {
        let m = eve.h_si.mul(&bf.w_san);
        k_si.axpy(
            (1.0 - cp.beta_s) / (cfg.n_s - 1) as f64 * path_s,
            &m.gram_right(),
        );
    }
    k_si.add_scaled_identity(cfg.sigma2_i1);
    let gamma_si = cp.beta_s * path_s * quad_form_inv(&k_si, &h_w)?;

    // Hop 2.
    let g_w = eve.h_ri.mul_vec(&bf.w_r);
    let mut k_ri = CMat::zeros(cfg.n_e, cfg.n_e);
    if cp.beta_r < 1.0 && cfg.n_r > 1 {
        let m = eve.h_ri.mul(&bf.w_ran);
        k_ri.axpy(
            (1.0 - cp.beta_r) / (cfg.n_r - 1) as f64 * path_r,
            &m.gram_right(),
        );
    }
    k_ri.axpy(
        cfg.p_s / cfg.n_s as f64 * d_si.powf(-cfg.eta),
        &eve.h_si.gram_right(),
    );
    k_ri.add_scaled_identity(cfg.sigma2_i2);
    let gamma_ri = cp.beta_r * path_r * quad_form_inv(&k_ri, &g_w)?;

    Ok((gamma_si, gamma_ri))
}

/// Simulation disk radius such that eavesdroppers beyond it can shift the
/// secrecy outage probability by less than [`TRUNCATION_BUDGET`], certified
/// by the analytic envelope tails of both hops.
pub fn default_r_sim(cfg: &SystemConfig, cp: &CodePoint) -> Result<f64> {
    if cfg.lambda == 0.0 || cp.tau_e() <= 0.0 {
        // No eavesdroppers, or an estimator that short-circuits: the disk is
        // never consulted.
        return Ok(cfg.d_sr);
    }
    let mut r = 2.0 * cfg.d_sr + 1.0;
    for _ in 0..200 {
        let tail = envelope_tail_hop1(cfg, cp, r)? + envelope_tail_hop2(cfg, cp, r)?;
        if 2.0 * cfg.lambda * tail <= TRUNCATION_BUDGET {
            return Ok(r);
        }
        r *= 1.5;
    }
    Err(Error::NonConverged {
        what: "simulation radius search".into(),
        best: r,
        err: f64::INFINITY,
    })
}

/// Wilson score half-width for `successes` out of `trials` at normal
/// quantile `z`.
pub fn wilson_half_width(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

fn mc_estimate(successes: u64, trials: u64) -> OutageEstimate {
    OutageEstimate {
        value: successes as f64 / trials as f64,
        kind: EstimateKind::MonteCarlo,
        err: wilson_half_width(successes, trials, Z95),
        trials: Some(trials),
    }
}

/// Simulate both outage events.
///
/// Returns (transmission outage, secrecy outage) frequencies with 95% Wilson
/// half-widths. r_e = 0 with a positive density is returned as an exact 1:
/// on the infinite plane some eavesdropper always exists and any positive
/// SINR beats tau_e = 0, which no finite disk can reproduce.
pub fn estimate_outage(
    cfg: &SystemConfig,
    cp: &CodePoint,
    opts: &McOptions,
) -> Result<(OutageEstimate, OutageEstimate)> {
    cp.validate_for(cfg)?;
    if opts.trials == 0 {
        return Err(Error::Violation {
            field: "trials",
            reason: "must be >= 1".into(),
        });
    }
    let tau_b = cp.tau_b();
    let tau_e = cp.tau_e();
    let r_sim = match opts.r_sim {
        Some(r) if r > 0.0 => r,
        Some(r) => {
            return Err(Error::Violation {
                field: "r_sim",
                reason: format!("must be > 0, got {r}"),
            })
        }
        None => default_r_sim(cfg, cp)?,
    };
    let degenerate_so = tau_e <= 0.0 && cfg.lambda > 0.0;
    let simulate_eves = cfg.lambda > 0.0 && !degenerate_so;

    let (to_count, so_count) = exec::count_outcomes(opts.trials, |t| {
        let mut rng = trial_rng(opts.seed, t);
        let eff = if simulate_eves { r_sim } else { 0.0 };
        let ch = sample_realization(cfg, eff, &mut rng);
        let bf = build_beamformers(&ch).expect("eigen iteration converges");
        let (g_sr, g_rd) = main_link_snrs(cfg, cp, &bf);
        let to = g_sr.min(g_rd) < tau_b;
        let mut gamma_e = 0.0f64;
        for eve in &ch.eves {
            let (g_si, g_ri) = eaves_sinrs(cfg, cp, &bf, eve).expect("covariance is PD");
            gamma_e = gamma_e.max(g_si).max(g_ri);
        }
        (to, gamma_e > tau_e)
    });

    let p_to = mc_estimate(to_count, opts.trials);
    let p_so = if degenerate_so {
        OutageEstimate {
            value: 1.0,
            kind: EstimateKind::MonteCarlo,
            err: 0.0,
            trials: Some(opts.trials),
        }
    } else {
        mc_estimate(so_count, opts.trials)
    };
    Ok((p_to, p_so))
}

/// Simulate only the transmission outage event (no eavesdropper sampling);
/// the main-link SNRs do not depend on the point process.
pub fn estimate_transmission_outage(
    cfg: &SystemConfig,
    cp: &CodePoint,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    let quiet = SystemConfig {
        lambda: 0.0,
        ..cfg.clone()
    };
    let (p_to, _) = estimate_outage(
        &quiet,
        cp,
        &McOptions {
            trials,
            seed,
            r_sim: Some(quiet.d_sr),
        },
    )?;
    Ok(p_to)
}
