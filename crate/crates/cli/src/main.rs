//! Experiment runner: analytic and Monte Carlo sweeps, throughput
//! optimization, preset figure reproductions, and a selftest of the
//! oracle pairings. Exit code 0 on success, 1 on invalid parameters, 2 when
//! a quadrature failed to converge (partial output is kept and flagged).

mod args;
mod figures;
mod overrides;
mod runner;
mod selftest;

use args::{Cli, Command, Metric, SweepArgs, SweepVar};
use clap::Parser;
use overrides::{build_params, resolve};
use relaysec::mc::{estimate_outage, McOptions};
use relaysec::throughput::{solve_joint, JointGrids, SolveOptions};
use relaysec::{
    p_so, p_so_asymptotic, p_to, p_to_asymptotic, throughput::throughput, CodePoint, Error,
    QuadratureSettings, Result, SystemConfig,
};
use runner::{
    cell_seed, db_to_linear, default_out, rate_from_tau, run_grid, sweep_range, write_output,
    Row, Schema,
};

fn main() {
    // Usage errors are parameter-validation failures: exit 1, keeping exit 2
    // reserved for non-converged numerics.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            e.exit()
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let jobs = match &cli.cmd {
        Command::Analytic(a) | Command::Montecarlo(a) => a.common.jobs,
        Command::Optimize(c) | Command::Selftest(c) => c.jobs,
        Command::Figure(f) => f.common.jobs,
    };
    let code = relaysec::with_thread_limit(jobs, move || match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConverged { .. } => 2,
                _ => 1,
            }
        }
    });
    std::process::exit(code);
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Command::Analytic(a) => run_sweep(a, false),
        Command::Montecarlo(a) => run_sweep(a, true),
        Command::Optimize(c) => run_optimize(c),
        Command::Figure(f) => figures::run(f),
        Command::Selftest(c) => {
            let common = resolve(c)?;
            selftest::run(common.seed.unwrap_or(1))
        }
    }
}

fn metric_name(metric: Metric) -> &'static str {
    match metric {
        Metric::PTo => "p_to",
        Metric::PSo => "p_so",
        Metric::TS => "t_s",
    }
}

fn sweep_name(var: SweepVar) -> &'static str {
    match var {
        SweepVar::Rb => "r_b",
        SweepVar::Re => "r_e",
        SweepVar::TauBDb => "tau_b_db",
        SweepVar::TauEDb => "tau_e_db",
        SweepVar::BetaS => "beta_s",
        SweepVar::BetaR => "beta_r",
        SweepVar::Lambda => "lambda",
    }
}

fn apply_sweep(
    cfg: &SystemConfig,
    cp: &CodePoint,
    var: SweepVar,
    v: f64,
) -> Result<(SystemConfig, CodePoint)> {
    let mut cfg = cfg.clone();
    let mut cp = *cp;
    match var {
        SweepVar::Rb => cp.r_b = v,
        SweepVar::Re => cp.r_e = v,
        SweepVar::TauBDb => cp.r_b = rate_from_tau(db_to_linear(v)),
        SweepVar::TauEDb => {
            cp.r_e = rate_from_tau(db_to_linear(v));
            cp.r_b = cp.r_b.max(cp.r_e + 1.0);
        }
        SweepVar::BetaS => cp.beta_s = v,
        SweepVar::BetaR => cp.beta_r = v,
        SweepVar::Lambda => cfg.lambda = v,
    }
    let cfg = cfg.validate()?;
    cp.validate_for(&cfg)?;
    Ok((cfg, cp))
}

fn run_sweep(a: &SweepArgs, monte_carlo: bool) -> Result<i32> {
    let common = resolve(&a.common)?;
    let (cfg, cp) = build_params(&common)?;
    let settings = QuadratureSettings {
        rel_tol: common
            .rel_tol
            .unwrap_or(QuadratureSettings::default().rel_tol),
        ..Default::default()
    };
    if monte_carlo && a.metric == Metric::TS {
        return Err(Error::Violation {
            field: "metric",
            reason: "t-s has no Monte Carlo estimator; use p-to or p-so".into(),
        });
    }
    let sweep = sweep_range(a.from, a.to, a.step)?;
    let curves = vec![0.0f64];
    let seed = common.seed.unwrap_or(1);
    let trials = common.trials.unwrap_or(10_000);
    let name = if monte_carlo { "montecarlo" } else { "analytic" };
    let schema = Schema {
        curve: "curve",
        sweep: sweep_name(a.sweep),
        value: metric_name(a.metric),
        asymptotic: a.asymptotic,
        mc: monte_carlo,
        extras: vec![],
    };
    let output = run_grid(&curves, &sweep, |c, s| {
        let (cfg_p, cp_p) = apply_sweep(&cfg, &cp, a.sweep, sweep[s])?;
        // Analytic value rides along in Monte Carlo mode so one file holds
        // the comparison.
        let (value, value_err, flag) = match a.metric {
            Metric::PTo => {
                let est = p_to(&cfg_p, &cp_p)?;
                (est.value, est.err, "")
            }
            Metric::PSo => match p_so(&cfg_p, &cp_p, &settings) {
                Ok(est) => (est.value, est.err, ""),
                Err(Error::NonConverged { best, err, .. }) => (best, err, "nonconverged"),
                Err(e) => return Err(e),
            },
            Metric::TS => (throughput(&cfg_p, &cp_p)?, 0.0, ""),
        };
        let asymptotic = if a.asymptotic {
            Some(match a.metric {
                Metric::PTo => p_to_asymptotic(&cfg_p, &cp_p)?.value,
                Metric::PSo => p_so_asymptotic(&cfg_p, &cp_p, &settings)?.value,
                Metric::TS => f64::NAN,
            })
        } else {
            None
        };
        let mc = if monte_carlo {
            let (to_est, so_est) = estimate_outage(
                &cfg_p,
                &cp_p,
                &McOptions {
                    trials,
                    seed: cell_seed(seed, c, s),
                    r_sim: common.r_sim,
                },
            )?;
            let pick = match a.metric {
                Metric::PTo => to_est,
                _ => so_est,
            };
            Some((pick.value, pick.err, pick.trials.unwrap_or(0)))
        } else {
            None
        };
        Ok(Row {
            curve: curves[c],
            sweep: sweep[s],
            value,
            value_err,
            asymptotic,
            mc,
            extras: vec![],
            flag,
        })
    })?;
    let out = default_out(name, &common.out);
    write_output(&out, &schema, &output, name)?;
    println!("{name}: wrote {} rows to {}", output.rows.len(), out.display());
    Ok(if output.any_nonconverged { 2 } else { 0 })
}

fn run_optimize(c: &args::CommonArgs) -> Result<i32> {
    let common = resolve(c)?;
    let (cfg, _) = build_params(&common)?;
    let settings = QuadratureSettings {
        rel_tol: common
            .rel_tol
            .unwrap_or(QuadratureSettings::default().rel_tol),
        ..Default::default()
    };
    let phi = common.phi.unwrap_or(0.4);
    let grids = JointGrids::log_spaced_near_one(common.grid.unwrap_or(20));
    let opts = SolveOptions::default();
    let sol = solve_joint(&cfg, phi, &grids, &opts, &settings)?;
    let out = default_out("optimize", &common.out);
    let csv = format!(
        "phi,n_s,lambda,r_b_star,r_e_star,beta_s_star,beta_r_star,t_s,p_to,p_so,flag\n\
         {},{},{},{},{},{},{},{},{},{},{}\n",
        sol.phi,
        cfg.n_s,
        cfg.lambda,
        sol.r_b_star,
        sol.r_e_star,
        sol.beta_s_star,
        sol.beta_r_star,
        sol.t_s,
        sol.p_to_at_opt,
        sol.p_so_at_opt,
        if sol.unimodal { "" } else { "nonunimodal" }
    );
    std::fs::write(&out, csv).map_err(|e| Error::Violation {
        field: "out",
        reason: format!("cannot write {}: {e}", out.display()),
    })?;
    println!(
        "optimize: t_s = {:.6} at (r_b, r_e, beta_s, beta_r) = ({:.4}, {:.4}, {:.4}, {:.4}) -> {}",
        sol.t_s,
        sol.r_b_star,
        sol.r_e_star,
        sol.beta_s_star,
        sol.beta_r_star,
        out.display()
    );
    Ok(0)
}
