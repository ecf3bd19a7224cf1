//! Report files written under the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::grid::SpatialGrid;
use crate::microlocal::ShellEnergySeries;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Pretty JSON with a trailing newline; output is a pure function of `value`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text)?;
    Ok(())
}

pub fn write_series_csv(path: &Path, series: &ShellEnergySeries, s_grid: &[f64]) -> Result<()> {
    let file = fs::File::create(path)?;
    series.write_csv(std::io::BufWriter::new(file), s_grid)
}

/// `dir/name`, rejecting names that would escape `dir`.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf> {
    let p = Path::new(name);
    if p.is_absolute()
        || p.components()
            .any(|c| matches!(c, std::path::Component::ParentDir))
    {
        return Err(crate::error::Error::config(format!(
            "output name '{name}' must be a relative path inside the output directory"
        )));
    }
    Ok(dir.join(p))
}

/// One row per FFT bin: indices, angular frequencies and `Φ(τ)`.
pub fn write_coverage_csv(path: &Path, sg: &SpatialGrid, phi: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    let (f0, f1) = (sg.angular_freqs(0), sg.angular_freqs(1));
    let n = sg.samples_per_axis;
    wtr.write_record(["m0", "m1", "tau0", "tau1", "phi"])?;
    for r in 0..n {
        for k in 0..n {
            wtr.write_record(&[
                r.to_string(),
                k.to_string(),
                f0[r].to_string(),
                f1[k].to_string(),
                phi[r * n + k].to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
