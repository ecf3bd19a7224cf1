//! Test fields with controlled singularities, and smooth radial cutoffs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::SpatialGrid;
use crate::wavelet::smooth_step;

/// Radial window: 1 inside `inner_radius`, 0 from `outer_radius` on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub center: [f64; 2],
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl CutoffSpec {
    pub fn new(center: [f64; 2], inner_radius: f64, outer_radius: f64) -> Self {
        CutoffSpec {
            center,
            inner_radius,
            outer_radius,
        }
    }

    pub fn validate(&self, grid: &SpatialGrid) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return Err(Error::config(format!(
                "cutoff radii must satisfy 0 < inner < outer, got {} and {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if grid.n_dims != 2 {
            return Err(Error::config("cutoffs are defined on 2-D grids"));
        }
        for a in 0..2 {
            let c = self.center[a];
            if c - self.outer_radius < 0.0 || c + self.outer_radius > grid.extent[a] {
                return Err(Error::config(format!(
                    "cutoff ball at {:?} with radius {} does not fit in the grid",
                    self.center, self.outer_radius
                )));
            }
        }
        Ok(())
    }

    /// Pointwise value; uses the same `exp(-1/x)` transition as the wavelet profile.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let r = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        1.0 - smooth_step((r - self.inner_radius) / (self.outer_radius - self.inner_radius))
    }
}

pub fn make_cutoff(
    x0: [f64; 2],
    inner_r: f64,
    outer_r: f64,
    grid: &SpatialGrid,
) -> Result<SampledField> {
    let spec = CutoffSpec::new(x0, inner_r, outer_r);
    spec.validate(grid)?;
    Ok(SampledField::from_fn(grid.clone(), |x| {
        Complex64::new(spec.value(x), 0.0)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Zero,
    /// `exp(-|x-c|²/2σ²)`, optionally times `e^{iτ⁰·x}`.
    Gaussian {
        center: [f64; 2],
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulation: Option<[f64; 2]>,
    },
    /// `e^{iτ⁰·x} · window(x)`, `τ⁰` in angular units.
    PlaneWaveBump {
        modulation: [f64; 2],
        window: CutoffSpec,
    },
    /// `(ν·(x - x_c))₊^α · window(x)`.
    HalfPlanePower {
        center: [f64; 2],
        normal: [f64; 2],
        alpha: f64,
        window: CutoffSpec,
    },
    /// Indicator of a disk with a thin smooth rim between the two radii.
    DiskIndicatorSmoothed {
        disk: CutoffSpec,
    },
    Bump {
        window: CutoffSpec,
    },
}

impl SignalSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SignalSpec::Zero => "zero",
            SignalSpec::Gaussian { .. } => "gaussian",
            SignalSpec::PlaneWaveBump { .. } => "plane_wave_bump",
            SignalSpec::HalfPlanePower { .. } => "half_plane_power",
            SignalSpec::DiskIndicatorSmoothed { .. } => "disk_indicator_smoothed",
            SignalSpec::Bump { .. } => "bump",
        }
    }

    /// True when the generated field is real-valued.
    pub fn is_real(&self) -> bool {
        match self {
            SignalSpec::Gaussian { modulation, .. } => modulation.is_none(),
            SignalSpec::PlaneWaveBump { .. } => false,
            _ => true,
        }
    }

    pub fn validate(&self, grid: &SpatialGrid) -> Result<()> {
        if grid.n_dims != 2 {
            return Err(Error::config("test signals are defined on 2-D grids"));
        }
        match self {
            SignalSpec::Zero => Ok(()),
            SignalSpec::Gaussian {
                width,
                center,
                modulation,
            } => {
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::config("gaussian width must be positive"));
                }
                check_finite(center, "gaussian center")?;
                if let Some(m) = modulation {
                    check_finite(m, "gaussian modulation")?;
                }
                Ok(())
            }
            SignalSpec::PlaneWaveBump { modulation, window } => {
                check_finite(modulation, "plane wave modulation")?;
                window.validate(grid)
            }
            SignalSpec::HalfPlanePower {
                center,
                normal,
                alpha,
                window,
            } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::config("half_plane_power needs alpha > 0"));
                }
                check_finite(center, "edge center")?;
                let norm = normal[0].hypot(normal[1]);
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::config(format!(
                        "edge normal must be a unit vector, |ν| = {norm}"
                    )));
                }
                if normal[0] <= 0.0 || normal[1] <= 0.0 {
                    return Err(Error::config(
                        "edge normal must lie strictly inside the positive quadrant",
                    ));
                }
                window.validate(grid)
            }
            SignalSpec::DiskIndicatorSmoothed { disk } => disk.validate(grid),
            SignalSpec::Bump { window } => window.validate(grid),
        }
    }

    /// Pointwise value without validation.
    pub fn value(&self, x: [f64; 2]) -> Complex64 {
        match self {
            SignalSpec::Zero => Complex64::default(),
            SignalSpec::Gaussian {
                center,
                width,
                modulation,
            } => {
                let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                let g = (-d2 / (2.0 * width * width)).exp();
                match modulation {
                    Some(m) => Complex64::from_polar(g, m[0] * x[0] + m[1] * x[1]),
                    None => Complex64::new(g, 0.0),
                }
            }
            SignalSpec::PlaneWaveBump { modulation, window } => {
                Complex64::from_polar(window.value(x), modulation[0] * x[0] + modulation[1] * x[1])
            }
            SignalSpec::HalfPlanePower {
                center,
                normal,
                alpha,
                window,
            } => {
                let d = normal[0] * (x[0] - center[0]) + normal[1] * (x[1] - center[1]);
                let v = if d > 0.0 { d.powf(*alpha) } else { 0.0 };
                Complex64::new(v * window.value(x), 0.0)
            }
            SignalSpec::DiskIndicatorSmoothed { disk } => Complex64::new(disk.value(x), 0.0),
            SignalSpec::Bump { window } => Complex64::new(window.value(x), 0.0),
        }
    }
}

fn check_finite(v: &[f64; 2], what: &str) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::config(format!("{what} must be finite")))
    }
}

pub fn generate(spec: &SignalSpec, grid: &SpatialGrid) -> Result<SampledField> {
    spec.validate(grid)?;
    let f = SampledField::from_fn(grid.clone(), |x| spec.value(x));
    if !f.is_finite() {
        return Err(Error::data(format!(
            "{} produced non-finite samples",
            spec.kind()
        )));
    }
    Ok(f)
}
