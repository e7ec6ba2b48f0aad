//! Config-file parsing and the file/flag merge. Files are flat key=value
//! lines with `#` comments; keys mirror the long flag names (dashes and
//! underscores interchangeable). The command line overrides the file.

use crate::args::CommonArgs;
use relaysec::{CodePoint, Error, Result, SystemConfig};
use std::path::Path;

pub fn load_config_file(path: &Path, args: &CommonArgs) -> Result<CommonArgs> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Violation {
        field: "config",
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    let mut from_file = CommonArgs::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Violation {
            field: "config",
            reason: format!("line {}: expected key=value, got `{raw}`", lineno + 1),
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        apply_key(&mut from_file, &key, value).map_err(|reason| Error::Violation {
            field: "config",
            reason: format!("line {}: {reason}", lineno + 1),
        })?;
    }
    Ok(merge(from_file, args))
}

fn apply_key(out: &mut CommonArgs, key: &str, value: &str) -> std::result::Result<(), String> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
        value
            .parse::<T>()
            .map_err(|_| format!("invalid value `{value}` for key `{key}`"))
    }
    match key {
        "seed" => out.seed = Some(parse(key, value)?),
        "trials" => out.trials = Some(parse(key, value)?),
        "jobs" => out.jobs = Some(parse(key, value)?),
        "rel-tol" => out.rel_tol = Some(parse(key, value)?),
        "phi" => out.phi = Some(parse(key, value)?),
        "grid" => out.grid = Some(parse(key, value)?),
        "r-sim" => out.r_sim = Some(parse(key, value)?),
        "out" => out.out = Some(value.into()),
        "ns" => out.ns = Some(parse(key, value)?),
        "nr" => out.nr = Some(parse(key, value)?),
        "nd" => out.nd = Some(parse(key, value)?),
        "ne" => out.ne = Some(parse(key, value)?),
        "eta" => out.eta = Some(parse(key, value)?),
        "lambda" => out.lambda = Some(parse(key, value)?),
        "d-sr" => out.d_sr = Some(parse(key, value)?),
        "d-rd" => out.d_rd = Some(parse(key, value)?),
        "p-s" => out.p_s = Some(parse(key, value)?),
        "p-r" => out.p_r = Some(parse(key, value)?),
        "sigma2-r" => out.sigma2_r = Some(parse(key, value)?),
        "sigma2-d" => out.sigma2_d = Some(parse(key, value)?),
        "sigma2-i1" => out.sigma2_i1 = Some(parse(key, value)?),
        "sigma2-i2" => out.sigma2_i2 = Some(parse(key, value)?),
        "rb" => out.rb = Some(parse(key, value)?),
        "re" => out.re = Some(parse(key, value)?),
        "beta-s" => out.beta_s = Some(parse(key, value)?),
        "beta-r" => out.beta_r = Some(parse(key, value)?),
        "gbar-db" => {
            out.gbar_db = Some(parse_list(key, value)?);
        }
        "gbar-e-db" => {
            out.gbar_e_db = Some(parse_list(key, value)?);
        }
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}

fn parse_list(key: &str, value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid value `{v}` in list for key `{key}`"))
        })
        .collect()
}

/// File values below, CLI values on top.
fn merge(file: CommonArgs, cli: &CommonArgs) -> CommonArgs {
    macro_rules! pick {
        ($field:ident) => {
            cli.$field.clone().or(file.$field)
        };
    }
    CommonArgs {
        config: cli.config.clone(),
        out: pick!(out),
        seed: pick!(seed),
        trials: pick!(trials),
        jobs: pick!(jobs),
        rel_tol: pick!(rel_tol),
        phi: pick!(phi),
        grid: pick!(grid),
        r_sim: pick!(r_sim),
        ns: pick!(ns),
        nr: pick!(nr),
        nd: pick!(nd),
        ne: pick!(ne),
        eta: pick!(eta),
        lambda: pick!(lambda),
        d_sr: pick!(d_sr),
        d_rd: pick!(d_rd),
        p_s: pick!(p_s),
        p_r: pick!(p_r),
        sigma2_r: pick!(sigma2_r),
        sigma2_d: pick!(sigma2_d),
        sigma2_i1: pick!(sigma2_i1),
        sigma2_i2: pick!(sigma2_i2),
        rb: pick!(rb),
        re: pick!(re),
        beta_s: pick!(beta_s),
        beta_r: pick!(beta_r),
        gbar_db: pick!(gbar_db),
        gbar_e_db: pick!(gbar_e_db),
    }
}

/// Resolve the effective CommonArgs: config file first (if any), CLI on top.
pub fn resolve(args: &CommonArgs) -> Result<CommonArgs> {
    match &args.config {
        Some(path) => load_config_file(path, args),
        None => Ok(args.clone()),
    }
}

/// Baseline parameters shared by all presets: eta = 4, antennas (4,2,2,2),
/// unit geometry distance 10, density 0.01, unit noise everywhere.
pub fn baseline_config() -> SystemConfig {
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

pub fn baseline_code_point() -> CodePoint {
    CodePoint {
        r_b: 2.0,
        r_e: 1.0,
        beta_s: 0.5,
        beta_r: 0.5,
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Build the working (config, code point) from defaults plus overrides.
/// dB conversion happens here and only here.
pub fn build_params(args: &CommonArgs) -> Result<(SystemConfig, CodePoint)> {
    let mut cfg = baseline_config();
    let mut cp = baseline_code_point();

    if let Some(v) = args.ns {
        cfg.n_s = v;
    }
    if let Some(v) = args.nr {
        cfg.n_r = v;
    }
    if let Some(v) = args.nd {
        cfg.n_d = v;
    }
    if let Some(v) = args.ne {
        cfg.n_e = v;
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.d_sr {
        cfg.d_sr = v;
    }
    if let Some(v) = args.d_rd {
        cfg.d_rd = v;
    }
    if let Some(v) = args.p_s {
        cfg.p_s = v;
    }
    if let Some(v) = args.p_r {
        cfg.p_r = v;
    }
    if let Some(v) = args.sigma2_r {
        cfg.sigma2_r = v;
    }
    if let Some(v) = args.sigma2_d {
        cfg.sigma2_d = v;
    }
    if let Some(v) = args.sigma2_i1 {
        cfg.sigma2_i1 = v;
    }
    if let Some(v) = args.sigma2_i2 {
        cfg.sigma2_i2 = v;
    }
    if let Some(v) = args.rb {
        cp.r_b = v;
    }
    if let Some(v) = args.re {
        cp.r_e = v;
    }
    if let Some(v) = args.beta_s {
        cp.beta_s = v;
    }
    if let Some(v) = args.beta_r {
        cp.beta_r = v;
    }

    // gbar-db sets transmit powers against the main-link noise at the hop
    // distances; gbar-e-db scales eavesdropper noise from those powers.
    if let Some(list) = &args.gbar_db {
        if let [g] = list.as_slice() {
            apply_gbar(&mut cfg, *g);
        } else if list.len() > 1 {
            return Err(Error::Violation {
                field: "gbar-db",
                reason: "one value here; lists belong to figure presets".into(),
            });
        }
    }
    if let Some(list) = &args.gbar_e_db {
        if let [g] = list.as_slice() {
            apply_gbar_e(&mut cfg, *g);
        } else if list.len() > 1 {
            return Err(Error::Violation {
                field: "gbar-e-db",
                reason: "one value here; lists belong to figure presets".into(),
            });
        }
    }

    let cfg = cfg.validate()?;
    cp.validate_for(&cfg)?;
    Ok((cfg, cp))
}

/// p = gbar * d^eta * sigma2 on both hops.
pub fn apply_gbar(cfg: &mut SystemConfig, gbar_db: f64) {
    let g = db_to_linear(gbar_db);
    cfg.p_s = g * cfg.d_sr.powf(cfg.eta) * cfg.sigma2_r;
    cfg.p_r = g * cfg.d_rd.powf(cfg.eta) * cfg.sigma2_d;
}

/// sigma2_i = p * d^-eta / gbar_e at the reference (hop) distances.
pub fn apply_gbar_e(cfg: &mut SystemConfig, gbar_e_db: f64) {
    let g = db_to_linear(gbar_e_db);
    cfg.sigma2_i1 = cfg.p_s * cfg.d_sr.powf(-cfg.eta) / g;
    cfg.sigma2_i2 = cfg.p_r * cfg.d_rd.powf(-cfg.eta) / g;
}
