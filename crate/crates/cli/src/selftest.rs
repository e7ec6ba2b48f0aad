//! Reduced oracle-pairing suite: the closed form against its quadrature, the
//! analytic outage probabilities against short Monte Carlo runs, and the two
//! link-level CDFs against sampled statistics. Prints one line per check.

use relaysec::eaves::{f_gamma_ri, f_gamma_si, EavesGeometry};
use relaysec::mc::{
    build_beamformers, eaves_sinrs, estimate_outage, estimate_transmission_outage,
    sample_realization, trial_rng, wilson_half_width, McOptions, Z99,
};
use relaysec::quad::integral_j1_oracle;
use relaysec::wishart::{largest_eig_cdf, WishartDims};
use relaysec::{
    j1_closed, p_so, p_to, CodePoint, PolarPoint, QuadratureSettings, Result, SystemConfig,
};

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

struct Report {
    failures: u32,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if pass {
            println!("[PASS] {name}: {detail}");
        } else {
            println!("[FAIL] {name}: {detail}");
            self.failures += 1;
        }
    }
}

pub fn run(seed: u64) -> Result<i32> {
    let mut report = Report { failures: 0 };
    let cfg = fig3_config();
    let settings = QuadratureSettings::default();

    // Closed form vs radial quadrature.
    let mut worst = 0.0f64;
    for r_e in [0.5, 1.0, 2.0] {
        let cp = CodePoint::new(r_e + 2.0, r_e, 0.5, 0.5)?;
        let closed = j1_closed(&cfg, &cp)?;
        let oracle = integral_j1_oracle(&cfg, &cp, &settings)?.value;
        worst = worst.max(((closed - oracle) / closed).abs());
    }
    report.check(
        "j1 closed form vs quadrature",
        worst < 1e-6,
        format!("max rel diff {worst:.2e} (tol 1e-6)"),
    );

    // Transmission outage vs Monte Carlo.
    let cp = CodePoint::new(2.0, 1.0, 0.5, 0.5)?;
    let analytic = p_to(&cfg, &cp)?.value;
    let mc = estimate_transmission_outage(&cfg, &cp, 20_000, seed)?;
    let hw99 = wilson_half_width(
        (mc.value * mc.trials.unwrap() as f64).round() as u64,
        mc.trials.unwrap(),
        Z99,
    );
    report.check(
        "transmission outage vs mc",
        (mc.value - analytic).abs() <= hw99,
        format!("analytic {analytic:.4} mc {:.4} +-{hw99:.4}", mc.value),
    );

    // Secrecy outage vs Monte Carlo.
    let analytic = p_so(&cfg, &cp, &settings)?.value;
    let (_, mc) = estimate_outage(
        &cfg,
        &cp,
        &McOptions {
            trials: 4000,
            seed: seed ^ 0xA5A5,
            r_sim: None,
        },
    )?;
    let hw99 = wilson_half_width(
        (mc.value * mc.trials.unwrap() as f64).round() as u64,
        mc.trials.unwrap(),
        Z99,
    );
    report.check(
        "secrecy outage vs mc",
        (mc.value - analytic).abs() <= hw99,
        format!("analytic {analytic:.4} mc {:.4} +-{hw99:.4}", mc.value),
    );

    // Largest-eigenvalue CDF vs sampled spectra.
    let dims = WishartDims::new(4, 2)?;
    let n = 50_000u64;
    let xs = [0.5, 1.0, 2.0, 4.0, 8.0];
    let counts = relaysec::parallel_map(n as usize, |t| {
        let mut rng = trial_rng(seed ^ 0x17, t as u64);
        let ch = sample_realization(&cfg, 0.0, &mut rng);
        let bf = build_beamformers(&ch).expect("eig");
        let mut hits = [0u32; 5];
        for (i, &x) in xs.iter().enumerate() {
            hits[i] = (bf.lam_sr <= x) as u32;
        }
        hits
    });
    let mut worst = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let emp = counts.iter().map(|h| h[i] as u64).sum::<u64>() as f64 / n as f64;
        let expect = largest_eig_cdf(dims, x)?;
        let se = (expect * (1.0 - expect) / n as f64).sqrt().max(1e-12);
        worst = worst.max((emp - expect).abs() / se);
    }
    report.check(
        "wishart eigenvalue cdf vs samples",
        worst < 4.0,
        format!("max |z| {worst:.2} (tol 4 sigma)"),
    );

    // Eavesdropper SINR CDFs vs sampled MMSE statistics.
    let geo = EavesGeometry::new(10.0, 12.0)?;
    let cos_theta = (cfg.d_sr * cfg.d_sr + geo.d_si * geo.d_si - geo.d_ri * geo.d_ri)
        / (2.0 * cfg.d_sr * geo.d_si);
    let pos = PolarPoint {
        d_si: geo.d_si,
        theta: cos_theta.acos(),
    };
    let n = 20_000u64;
    let gamma = cp.tau_e();
    let hits = relaysec::parallel_map(n as usize, |t| {
        let mut rng = trial_rng(seed ^ 0x3333, t as u64);
        let ch = sample_realization(&cfg, 0.0, &mut rng);
        let bf = build_beamformers(&ch).expect("eig");
        let eve = relaysec::mc::sample_eve_at(&cfg, pos, &mut rng);
        let (g_si, g_ri) = eaves_sinrs(&cfg, &cp, &bf, &eve).expect("pd");
        ((g_si <= gamma) as u64, (g_ri <= gamma) as u64)
    });
    let si_emp = hits.iter().map(|h| h.0).sum::<u64>() as f64 / n as f64;
    let ri_emp = hits.iter().map(|h| h.1).sum::<u64>() as f64 / n as f64;
    let f_si = f_gamma_si(&cfg, &cp, &geo, gamma)?;
    let f_ri = f_gamma_ri(&cfg, &cp, &geo, gamma)?;
    let se = 0.5 / (n as f64).sqrt();
    let worst = ((si_emp - f_si).abs()).max((ri_emp - f_ri).abs()) / se;
    report.check(
        "eavesdropper sinr cdfs vs samples",
        worst < 4.0,
        format!("max |z| {worst:.2} (tol 4 sigma)"),
    );

    if report.failures == 0 {
        println!("selftest: all checks passed");
        Ok(0)
    } else {
        println!("selftest: {} check(s) failed", report.failures);
        Ok(1)
    }
}
