//! CSV and summary emission. All floating-point values are written with 17
//! significant digits so outputs diff meaningfully across implementations,
//! and identical inputs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::grid::Grid;
use crate::harness::{ConvergenceRow, RunHistory, Snapshot, QUANTITIES};

/// Scientific notation with 17 significant digits.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `convergence.csv`: one line per (resolution, quantity) with the rate
/// column empty where undefined.
pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut out = String::from("h,quantity,error,rate\n");
    for row in rows {
        for name in QUANTITIES {
            let rate = row.rates.get(name).map(|r| fmt_g17(*r)).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", fmt_g17(row.h), name, fmt_g17(row.errors[name]), rate));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// `history.csv`: `t,dt,energy,roughness,mass` per accepted step.
pub fn write_history_csv(path: &Path, history: &RunHistory) -> Result<()> {
    let mut out = String::from("t,dt,energy,roughness,mass\n");
    for k in 0..history.times.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(history.times[k]),
            fmt_g17(history.dts[k]),
            fmt_g17(history.energies[k]),
            fmt_g17(history.roughness[k]),
            fmt_g17(history.masses[k]),
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// `snapshot_t<time>.csv`: header line with `Nx,Ny,hx,hy,t`, then `Ny` rows
/// of `Nx` comma-separated cell values in row-major order.
pub fn write_snapshot_csv(dir: &Path, snapshot: &Snapshot, grid: &Grid) -> Result<PathBuf> {
    let path = dir.join(format!("snapshot_t{}.csv", snapshot.t));
    let mut out = format!(
        "{},{},{},{},{}\n",
        grid.nx,
        grid.ny,
        fmt_g17(grid.hx),
        fmt_g17(grid.hy),
        fmt_g17(snapshot.t)
    );
    for j in 0..grid.ny {
        let row: Vec<String> =
            (0..grid.nx).map(|i| fmt_g17(snapshot.field.at(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_atomic(&path, out.as_bytes())?;
    Ok(path)
}

/// `summary.json`: flat key-value record of the run outcome.
#[allow(clippy::too_many_arguments)]
pub fn write_summary_json(
    path: &Path,
    final_time: f64,
    final_energy: f64,
    final_mass: f64,
    mass_drift: f64,
    min_dt: f64,
    max_dt: f64,
    total_steps: usize,
    wall_time_s: f64,
) -> Result<()> {
    let summary = serde_json::json!({
        "final_time": final_time,
        "final_energy": final_energy,
        "final_mass": final_mass,
        "mass_drift": mass_drift,
        "min_dt": min_dt,
        "max_dt": max_dt,
        "total_steps": total_steps,
        "wall_time_s": wall_time_s,
    });
    write_atomic(path, format!("{:#}\n", summary).as_bytes())
}

/// Echo of the effective configuration, one `key=value` per line.
pub fn write_config_echo(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(&format!("{k}={v}\n"));
    }
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}
