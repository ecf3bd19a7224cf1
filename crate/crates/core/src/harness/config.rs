//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, Neighborhood, NormKind, Quadrant, SpatialGrid};
use crate::microlocal::{Cone, FitOptions, GAMMA_PSI_RATIO, INNER_RATIO};
use crate::signals::{CutoffSpec, SignalSpec};
use crate::wavelet::{make_wavelet_with_resolution, ProfileKind, WaveletSpec, DEFAULT_RESOLUTION};

pub const DEFAULT_TOLERANCE: f64 = 0.25;
pub const DEFAULT_SMOOTH_CAP: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub samples_per_axis: usize,
    #[serde(default = "unit_extent")]
    pub extent: [f64; 2],
}

fn unit_extent() -> [f64; 2] {
    [1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyConfig {
    pub xi_min: f64,
    pub voices: usize,
    pub octaves: usize,
    pub quadrants: Vec<Quadrant>,
    #[serde(default)]
    pub hermitian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletConfig {
    pub profile: ProfileKind,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            profile: ProfileKind::SmoothBump,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// Radii of a cutoff centred at the query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Radii {
    pub inner_radius: f64,
    pub outer_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrolocalQuery {
    pub name: String,
    pub x0: [f64; 2],
    /// Cone direction `ξ⁰` in the open positive quadrant.
    pub direction: [f64; 2],
    /// Radius of `U(x₀)`.
    pub radius: f64,
    #[serde(default)]
    pub norm: NormKind,
    /// Cutoff `φ` for the Hörmander functional; defaults to radii `(r, 2r)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<Radii>,
    /// Spatial mask used when synthesizing `f₁`; defaults to `cutoff`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1_cutoff: Option<Radii>,
    /// Dyadic shells to fit; defaults to the shells covered by both grids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shells: Option<Vec<i32>>,
    #[serde(default = "default_outer")]
    pub outer_ratio: f64,
    #[serde(default = "default_inner")]
    pub inner_ratio: f64,
}

fn default_outer() -> f64 {
    GAMMA_PSI_RATIO
}

fn default_inner() -> f64 {
    INNER_RATIO
}

impl MicrolocalQuery {
    pub fn neighborhood(&self) -> Result<Neighborhood> {
        Neighborhood::new(self.x0.to_vec(), self.radius, self.norm)
    }

    pub fn outer_cone(&self) -> Result<Cone> {
        Cone::new(self.direction, self.outer_ratio)
    }

    pub fn inner_cone(&self) -> Result<Cone> {
        Cone::new(self.direction, self.inner_ratio)
    }

    pub fn cutoff_spec(&self) -> CutoffSpec {
        let r = self.cutoff.unwrap_or(Radii {
            inner_radius: self.radius,
            outer_radius: 2.0 * self.radius,
        });
        CutoffSpec::new(self.x0, r.inner_radius, r.outer_radius)
    }

    pub fn f1_cutoff_spec(&self) -> CutoffSpec {
        match self.f1_cutoff {
            Some(r) => CutoffSpec::new(self.x0, r.inner_radius, r.outer_radius),
            None => self.cutoff_spec(),
        }
    }

    /// Explicit shells, or every `j` with `2^j ≥ 2√2·xi_min` and `2^{j+1}` inside
    /// both the node range and the Nyquist band.
    pub fn shells(&self, sg: &SpatialGrid, fg: &FrequencyGrid) -> Vec<i32> {
        if let Some(s) = &self.shells {
            return s.clone();
        }
        default_shells(sg, fg)
    }

    fn validate(&self, sg: &SpatialGrid) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::config("query name must not be empty"));
        }
        self.outer_cone()?;
        self.inner_cone()?;
        if self.inner_ratio > self.outer_ratio {
            return Err(Error::config(format!(
                "query '{}': inner cone ratio exceeds outer",
                self.name
            )));
        }
        self.neighborhood()?.check_fits(sg)?;
        self.cutoff_spec().validate(sg)?;
        self.f1_cutoff_spec().validate(sg)?;
        if let Some(s) = &self.shells {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted != *s || s.is_empty() {
                return Err(Error::config(format!(
                    "query '{}': shells must be nonempty, increasing and distinct",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

pub fn default_shells(sg: &SpatialGrid, fg: &FrequencyGrid) -> Vec<i32> {
    let lo = 2.0 * std::f64::consts::SQRT_2 * fg.xi_min;
    let hi = (std::f64::consts::SQRT_2 * fg.xi_max()).min(sg.nyquist(0).min(sg.nyquist(1)));
    (0..64)
        .filter(|&j| (j as f64).exp2() >= lo && ((j + 1) as f64).exp2() <= hi)
        .collect()
}

/// Lattice of query points for the energy-map sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyMapConfig {
    /// Corner points of the lattice and the number of samples per axis.
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub counts: [usize; 2],
    pub directions: Vec<[f64; 2]>,
    pub radius: f64,
    #[serde(default = "default_outer")]
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shells: Option<Vec<i32>>,
}

impl EnergyMapConfig {
    pub fn points(&self) -> Vec<[f64; 2]> {
        let coord = |a: usize, k: usize| {
            if self.counts[a] == 1 {
                self.lo[a]
            } else {
                self.lo[a] + (self.hi[a] - self.lo[a]) * k as f64 / (self.counts[a] - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(self.counts[0] * self.counts[1]);
        for i in 0..self.counts[0] {
            for k in 0..self.counts[1] {
                pts.push([coord(0, i), coord(1, k)]);
            }
        }
        pts
    }

    fn validate(&self, sg: &SpatialGrid) -> Result<()> {
        if self.counts.contains(&0) || self.directions.is_empty() {
            return Err(Error::config(
                "energy map needs at least one point and one direction",
            ));
        }
        for d in &self.directions {
            Cone::new(*d, self.ratio)?;
        }
        for p in self.points() {
            Neighborhood::new(p.to_vec(), self.radius, NormKind::Euclidean)?.check_fits(sg)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputNames {
    #[serde(default = "n_report")]
    pub report: String,
    #[serde(default = "n_volume")]
    pub volume: String,
    #[serde(default = "n_field")]
    pub field: String,
    #[serde(default = "n_reconstruction")]
    pub reconstruction: String,
    #[serde(default = "n_coverage")]
    pub coverage: String,
    #[serde(default = "n_energy_map")]
    pub energy_map: String,
}

fn n_report() -> String {
    "theorem_report.json".into()
}
fn n_volume() -> String {
    "volume.puwv".into()
}
fn n_field() -> String {
    "signal.pufd".into()
}
fn n_reconstruction() -> String {
    "reconstruction.pufd".into()
}
fn n_coverage() -> String {
    "coverage.csv".into()
}
fn n_energy_map() -> String {
    "energy_map.csv".into()
}

impl Default for OutputNames {
    fn default() -> Self {
        OutputNames {
            report: n_report(),
            volume: n_volume(),
            field: n_field(),
            reconstruction: n_reconstruction(),
            coverage: n_coverage(),
            energy_map: n_energy_map(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub signal: SignalSpec,
    pub grid: GridConfig,
    pub frequency: FrequencyConfig,
    #[serde(default)]
    pub wavelet: WaveletConfig,
    #[serde(default)]
    pub queries: Vec<MicrolocalQuery>,
    #[serde(default)]
    pub s_grid: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_fit")]
    pub fit: FitOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_map: Option<EnergyMapConfig>,
    #[serde(default)]
    pub outputs: OutputNames,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_fit() -> FitOptions {
    FitOptions {
        min_shells: 3,
        smooth_cap: Some(DEFAULT_SMOOTH_CAP),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(2, self.grid.extent.to_vec(), self.grid.samples_per_axis)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        let f = &self.frequency;
        let g = FrequencyGrid {
            xi_min: f.xi_min,
            voices: f.voices,
            octaves: f.octaves,
            quadrants: f.quadrants.clone(),
            hermitian: f.hermitian,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn wavelet(&self) -> Result<WaveletSpec> {
        make_wavelet_with_resolution(self.wavelet.profile, 2, self.wavelet.resolution)
    }

    /// Cross-checks grids, signal and queries.
    pub fn validate(&self) -> Result<()> {
        let sg = self.spatial_grid()?;
        let fg = self.frequency_grid()?;
        if fg.n_dims() != 2 {
            return Err(Error::config(
                "run configs are 2-D; quadrants need two signs",
            ));
        }
        fg.check_nyquist(&sg)?;
        if self.wavelet.resolution < 64 {
            return Err(Error::config("wavelet resolution must be at least 64"));
        }
        self.signal.validate(&sg)?;
        if fg.hermitian && !self.signal.is_real() {
            return Err(Error::config(
                "hermitian frequency grids need a real-valued signal",
            ));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::config("tolerance must be a nonnegative number"));
        }
        if self.fit.min_shells < 2 {
            return Err(Error::config("fit.min_shells must be at least 2"));
        }
        if self.s_grid.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::config("s_grid entries must be nonnegative"));
        }
        let mut names: Vec<&str> = self.queries.iter().map(|q| q.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("query names must be unique"));
        }
        for q in &self.queries {
            q.validate(&sg)?;
        }
        if let Some(m) = &self.energy_map {
            m.validate(&sg)?;
        }
        Ok(())
    }
}
