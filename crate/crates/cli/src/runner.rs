//! Sweep execution and CSV/metadata output.
//!
//! Rows are computed concurrently (inner Monte Carlo and grid work also fans
//! out over the shared pool) but written strictly in sweep order, and the
//! CSV contains no timing, so identical inputs give byte-identical files.
//! Wall-clock per row goes to a sibling `.meta` file instead.

use relaysec::{Error, Result};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Column layout of one experiment.
#[derive(Debug, Clone)]
pub struct Schema {
    pub curve: &'static str,
    pub sweep: &'static str,
    pub value: &'static str,
    pub asymptotic: bool,
    pub mc: bool,
    pub extras: Vec<&'static str>,
}

/// One output row; `flag` is empty for clean points, "nonconverged" when the
/// value is only a best estimate.
#[derive(Debug, Clone)]
pub struct Row {
    pub curve: f64,
    pub sweep: f64,
    pub value: f64,
    pub value_err: f64,
    pub asymptotic: Option<f64>,
    pub mc: Option<(f64, f64, u64)>,
    pub extras: Vec<f64>,
    pub flag: &'static str,
}

pub struct RunOutput {
    pub rows: Vec<Row>,
    pub wall_ms: Vec<f64>,
    pub any_nonconverged: bool,
}

/// Evaluate every (curve, sweep) cell. Cells run concurrently through the
/// library pool; ordering of the output is (curve-major, sweep-minor)
/// regardless of completion order.
pub fn run_grid<F>(curves: &[f64], sweep: &[f64], eval: F) -> Result<RunOutput>
where
    F: Fn(usize, usize) -> Result<Row> + Sync + Send,
{
    let n = curves.len() * sweep.len();
    let cells: Vec<(usize, usize)> = (0..curves.len())
        .flat_map(|c| (0..sweep.len()).map(move |s| (c, s)))
        .collect();
    let results = relaysec::parallel_map(n, |i| {
        let (c, s) = cells[i];
        let t0 = Instant::now();
        let row = eval(c, s);
        (row, t0.elapsed().as_secs_f64() * 1e3)
    });
    let mut rows = Vec::with_capacity(n);
    let mut wall = Vec::with_capacity(n);
    let mut any_nonconverged = false;
    for (row, ms) in results {
        let row = row?;
        any_nonconverged |= row.flag == "nonconverged";
        rows.push(row);
        wall.push(ms);
    }
    Ok(RunOutput {
        rows,
        wall_ms: wall,
        any_nonconverged,
    })
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "nan".into()
    }
}

/// Write the CSV and its `.meta` sibling. UTF-8, comma-separated, `\n` line
/// endings, shortest round-trip float formatting.
pub fn write_output(path: &Path, schema: &Schema, out: &RunOutput, command: &str) -> Result<()> {
    let mut csv = String::new();
    csv.push_str(schema.curve);
    csv.push(',');
    csv.push_str(schema.sweep);
    csv.push(',');
    csv.push_str(schema.value);
    csv.push(',');
    csv.push_str(&format!("{}_err", schema.value));
    if schema.asymptotic {
        csv.push_str(&format!(",{}_inf", schema.value));
    }
    if schema.mc {
        csv.push_str(&format!(
            ",mc_{v},mc_{v}_half_width,mc_trials",
            v = schema.value
        ));
    }
    for e in &schema.extras {
        csv.push(',');
        csv.push_str(e);
    }
    csv.push_str(",flag\n");

    for row in &out.rows {
        csv.push_str(&fmt(row.curve));
        csv.push(',');
        csv.push_str(&fmt(row.sweep));
        csv.push(',');
        csv.push_str(&fmt(row.value));
        csv.push(',');
        csv.push_str(&fmt(row.value_err));
        if schema.asymptotic {
            csv.push(',');
            csv.push_str(&fmt(row.asymptotic.unwrap_or(f64::NAN)));
        }
        if schema.mc {
            match row.mc {
                Some((v, hw, trials)) => {
                    csv.push_str(&format!(",{},{},{trials}", fmt(v), fmt(hw)));
                }
                None => csv.push_str(",nan,nan,0"),
            }
        }
        for e in &row.extras {
            csv.push(',');
            csv.push_str(&fmt(*e));
        }
        csv.push(',');
        csv.push_str(row.flag);
        csv.push('\n');
    }

    write_file(path, &csv)?;

    let mut meta = String::new();
    meta.push_str("# wall-clock per row, excluded from the CSV so reruns are byte-identical\n");
    meta.push_str(&format!("# command: {command}\n"));
    meta.push_str("row,wall_ms\n");
    for (i, ms) in out.wall_ms.iter().enumerate() {
        meta.push_str(&format!("{i},{ms:.3}\n"));
    }
    write_file(&path.with_extension("meta"), &meta)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::Violation {
        field: "out",
        reason: format!("cannot create {}: {e}", path.display()),
    })?;
    f.write_all(content.as_bytes()).map_err(|e| Error::Violation {
        field: "out",
        reason: format!("cannot write {}: {e}", path.display()),
    })
}

pub fn default_out(name: &str, requested: &Option<PathBuf>) -> PathBuf {
    requested
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")))
}

/// Inclusive float range with fixed step.
pub fn sweep_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Violation {
            field: "step",
            reason: format!("must be > 0, got {step}"),
        });
    }
    if to < from {
        return Err(Error::Violation {
            field: "sweep range",
            reason: format!("empty range: from {from} to {to}"),
        });
    }
    let n = ((to - from) / step).round() as usize + 1;
    Ok((0..n)
        .map(|i| from + i as f64 * step)
        .filter(|v| *v <= to + 1e-9 * step)
        .collect())
}

/// Stable per-cell seed derivation (splitmix64 over the master seed and the
/// cell coordinates).
pub fn cell_seed(master: u64, curve: usize, point: usize) -> u64 {
    let mut z = master ^ ((curve as u64) << 40) ^ (point as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Rate that yields a given SNR threshold: r = log2(1 + tau).
pub fn rate_from_tau(tau: f64) -> f64 {
    (1.0 + tau).log2()
}
