//! Drivers reproducing the four desk-scale numerical experiments, plus the
//! CSV plumbing they share. Each driver returns a structured summary and
//! writes its artifacts (CSV files and the resolved config echo) into the
//! output directory.

mod exp1;
mod exp2;
mod exp3;
mod exp4;

pub use exp1::{run_experiment_1, Exp1Result};
pub use exp2::{run_experiment_2, Exp2Result};
pub use exp3::{run_experiment_3, Exp3Result};
pub use exp4::{build_displaced_plate, run_experiment_4, Exp4Result};

use std::fmt::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::error::{Error, Result};

/// Runs one of the four numbered experiments, writing CSV artifacts and the
/// resolved config echo into `outdir`.
pub fn run_experiment(id: u8, cfg: &RunConfig, outdir: &Path) -> Result<()> {
    std::fs::create_dir_all(outdir)?;
    match id {
        1 => run_experiment_1(cfg, outdir).map(|_| ()),
        2 => run_experiment_2(cfg, outdir).map(|_| ()),
        3 => run_experiment_3(cfg, outdir).map(|_| ()),
        4 => run_experiment_4(cfg, outdir).map(|_| ()),
        other => Err(Error::invalid(format!("unknown experiment id {other} (1-4)"))),
    }
}

/// Formats one value with 17 significant digits.
pub(crate) fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file: fixed headers, comma delimiter, LF endings,
/// 17-significant-digit decimals.
pub(crate) fn write_csv(
    path: &Path,
    headers: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{}", csv_num(v));
            first = false;
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub(crate) fn write_config_echo(cfg: &RunConfig, outdir: &Path) -> Result<()> {
    std::fs::write(outdir.join("config_echo.ini"), cfg.echo())?;
    Ok(())
}

/// Stress-unit label for CSV headers; the unit system tag only relabels.
pub(crate) fn stress_unit(cfg: &RunConfig) -> &'static str {
    match cfg.get("experiment", "unit_system") {
        Some("metal") => "eV_per_A3",
        _ => "eps_per_sigma3",
    }
}
