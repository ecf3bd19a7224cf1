//! Spatial sampling and the geometric frequency-parameter grid.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic sampling of `[0, extent_0) × … ` with the same number of samples per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub n_dims: usize,
    pub extent: Vec<f64>,
    pub samples_per_axis: usize,
}

impl SpatialGrid {
    pub fn new(n_dims: usize, extent: Vec<f64>, samples_per_axis: usize) -> Result<Self> {
        let g = SpatialGrid {
            n_dims,
            extent,
            samples_per_axis,
        };
        g.validate()?;
        Ok(g)
    }

    /// Unit square (or interval) with `n` samples per axis.
    pub fn unit(n_dims: usize, n: usize) -> Result<Self> {
        Self::new(n_dims, vec![1.0; n_dims], n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n_dims) {
            return Err(Error::config(format!(
                "n_dims must be 1 or 2, got {}",
                self.n_dims
            )));
        }
        if self.extent.len() != self.n_dims {
            return Err(Error::config("extent length must equal n_dims"));
        }
        if self.extent.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::config("extent must be positive and finite"));
        }
        if self.samples_per_axis < 2 || !self.samples_per_axis.is_power_of_two() {
            return Err(Error::config(format!(
                "samples_per_axis must be a power of two >= 2, got {}",
                self.samples_per_axis
            )));
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.samples_per_axis; self.n_dims]
    }

    pub fn len(&self) -> usize {
        self.samples_per_axis.pow(self.n_dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.samples_per_axis as f64
    }

    /// Measure of one pixel (`∏ spacing`).
    pub fn cell_volume(&self) -> f64 {
        (0..self.n_dims).map(|a| self.spacing(a)).product()
    }

    /// Plancherel measure of one FFT bin, `∏ (Δτ/2π) = ∏ 1/extent`.
    ///
    /// With `f̂ = cell_volume · FFT(f)`, `Σ |f̂|² · spectral_cell_measure = ‖f‖²`.
    pub fn spectral_cell_measure(&self) -> f64 {
        self.extent.iter().map(|e| 1.0 / e).product()
    }

    /// Largest representable angular frequency on an axis, `π / spacing`.
    pub fn nyquist(&self, axis: usize) -> f64 {
        PI / self.spacing(axis)
    }

    /// Coordinate of sample `k` along `axis`.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        k as f64 * self.spacing(axis)
    }

    /// Angular frequencies of the FFT bins along `axis`, in FFT order.
    pub fn angular_freqs(&self, axis: usize) -> Vec<f64> {
        let n = self.samples_per_axis;
        let step = 2.0 * PI / self.extent[axis];
        (0..n)
            .map(|k| {
                let m = if k < n / 2 {
                    k as i64
                } else {
                    k as i64 - n as i64
                };
                m as f64 * step
            })
            .collect()
    }

    /// Multi-index of a flat (row-major, axis 0 slowest) index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        let n = self.samples_per_axis;
        match self.n_dims {
            1 => [idx, 0],
            _ => [idx / n, idx % n],
        }
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let k = self.unflatten(idx);
        match self.n_dims {
            1 => [self.coord(0, k[0]), 0.0],
            _ => [self.coord(0, k[0]), self.coord(1, k[1])],
        }
    }
}

/// Sign vector selecting one orthant of `(ℝ∖{0})ⁿ`.
pub type Quadrant = Vec<i8>;

/// Geometric grid `ξ⁽ᵏ⁾ = xi_min · 2^{k/V}`, `k = 0..K·V`, on every axis and
/// every listed quadrant.
///
/// In log coordinates `dξᵢ/|ξᵢ|` is uniform, so the measure `dξ/|ξ₁⋯ξₙ|`
/// discretizes to the constant weight `∏ ln2/V`.
///
/// With `hermitian` set, each listed quadrant also stands for its negation;
/// this is exact for real inputs, whose coefficients satisfy `W(x,-ξ) = conj W(x,ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub xi_min: f64,
    pub voices: usize,
    pub octaves: usize,
    pub quadrants: Vec<Quadrant>,
    #[serde(default)]
    pub hermitian: bool,
}

/// One node of a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqNode {
    pub index: usize,
    pub quadrant: usize,
    pub k: [usize; 2],
    /// Signed node coordinates; the second entry is zero in 1-D.
    pub xi: [f64; 2],
}

impl FreqNode {
    pub fn magnitude(&self, n_dims: usize) -> f64 {
        self.xi[..n_dims].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn make_frequency_grid(
    xi_min: f64,
    voices: usize,
    octaves: usize,
    quadrants: Vec<Quadrant>,
) -> Result<FrequencyGrid> {
    let g = FrequencyGrid {
        xi_min,
        voices,
        octaves,
        quadrants,
        hermitian: false,
    };
    g.validate()?;
    Ok(g)
}

impl FrequencyGrid {
    /// Grid for real 2-D signals: quadrants `(+,+)` and `(+,-)` with Hermitian mirroring.
    pub fn real_2d(xi_min: f64, voices: usize, octaves: usize) -> Result<Self> {
        let mut g = make_frequency_grid(xi_min, voices, octaves, vec![vec![1, 1], vec![1, -1]])?;
        g.hermitian = true;
        Ok(g)
    }

    pub fn with_hermitian(mut self, hermitian: bool) -> Result<Self> {
        self.hermitian = hermitian;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi_min > 0.0 && self.xi_min.is_finite()) {
            return Err(Error::config("xi_min must be positive"));
        }
        if self.voices < 1 || self.octaves < 1 {
            return Err(Error::config("voices and octaves must be >= 1"));
        }
        if self.quadrants.is_empty() {
            return Err(Error::config("at least one quadrant is required"));
        }
        let n = self.quadrants[0].len();
        if !(1..=2).contains(&n) {
            return Err(Error::config(
                "quadrant sign vectors must have length 1 or 2",
            ));
        }
        for (i, q) in self.quadrants.iter().enumerate() {
            if q.len() != n || q.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::config(format!("invalid quadrant {q:?}")));
            }
            for p in &self.quadrants[..i] {
                if p == q {
                    return Err(Error::config(format!("duplicate quadrant {q:?}")));
                }
                if self.hermitian && p.iter().zip(q).all(|(a, b)| *a == -*b) {
                    return Err(Error::config(format!(
                        "quadrants {p:?} and {q:?} are mirror images; hermitian grids list one of each pair"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_dims(&self) -> usize {
        self.quadrants[0].len()
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.voices * self.octaves
    }

    /// Unsigned per-axis node values, strictly increasing.
    pub fn axis_nodes(&self) -> Vec<f64> {
        (0..self.nodes_per_axis())
            .map(|k| self.xi_min * (k as f64 / self.voices as f64).exp2())
            .collect()
    }

    pub fn xi_max(&self) -> f64 {
        *self.axis_nodes().last().expect("grid is nonempty")
    }

    pub fn log_weight(&self) -> f64 {
        LN_2 / self.voices as f64
    }

    pub fn node_count(&self) -> usize {
        self.quadrants.len() * self.nodes_per_axis().pow(self.n_dims() as u32)
    }

    pub fn node(&self, index: usize) -> FreqNode {
        let m = self.nodes_per_axis();
        let per_q = m.pow(self.n_dims() as u32);
        let quadrant = index / per_q;
        let rest = index % per_q;
        let k = if self.n_dims() == 1 {
            [rest, 0]
        } else {
            [rest / m, rest % m]
        };
        let q = &self.quadrants[quadrant];
        let v = |kk: usize| self.xi_min * (kk as f64 / self.voices as f64).exp2();
        let mut xi = [0.0; 2];
        for a in 0..self.n_dims() {
            xi[a] = q[a] as f64 * v(k[a]);
        }
        FreqNode {
            index,
            quadrant,
            k,
            xi,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = FreqNode> + '_ {
        (0..self.node_count()).map(move |i| self.node(i))
    }

    /// Weight of one node for the measure `dξ/|ξ₁⋯ξₙ|`; the same for every node.
    pub fn quadrature_weight(&self, node_index: usize) -> f64 {
        debug_assert!(node_index < self.node_count());
        self.log_weight().powi(self.n_dims() as i32)
    }

    /// Multiplicity of each computed node in sums over the full parameter set.
    pub fn mirror_factor(&self) -> f64 {
        if self.hermitian {
            2.0
        } else {
            1.0
        }
    }

    /// Every signed support `[ξᵢ/2, 2ξᵢ]` must sit inside the spatial Nyquist band.
    pub fn check_nyquist(&self, sg: &SpatialGrid) -> Result<()> {
        if sg.n_dims != self.n_dims() {
            return Err(Error::config(format!(
                "frequency grid is {}-D but spatial grid is {}-D",
                self.n_dims(),
                sg.n_dims
            )));
        }
        let top = 2.0 * self.xi_max();
        for a in 0..sg.n_dims {
            if top > sg.nyquist(a) {
                return Err(Error::config(format!(
                    "highest frequency support {top:.3} exceeds Nyquist {:.3} on axis {a}",
                    sg.nyquist(a)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    Euclidean,
    Max,
}

/// Open ball `U(x₀)` in the chosen norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default)]
    pub norm: NormKind,
}

impl Neighborhood {
    pub fn new(center: Vec<f64>, radius: f64, norm: NormKind) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::config("neighborhood radius must be positive"));
        }
        Ok(Neighborhood {
            center,
            radius,
            norm,
        })
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        let d = self.center.iter().zip(x).map(|(c, v)| (v - c).abs());
        match self.norm {
            NormKind::Euclidean => d.map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::Max => d.fold(0.0, f64::max),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x) < self.radius
    }

    /// Flat indices of the grid points inside the neighborhood, in increasing order.
    pub fn grid_indices(&self, sg: &SpatialGrid) -> Vec<usize> {
        (0..sg.len())
            .filter(|&i| self.contains(&sg.point(i)[..sg.n_dims]))
            .collect()
    }

    /// Checks that the ball lies inside the (non-wrapped) grid domain.
    pub fn check_fits(&self, sg: &SpatialGrid) -> Result<()> {
        if self.center.len() != sg.n_dims {
            return Err(Error::config("neighborhood center dimension mismatch"));
        }
        for a in 0..sg.n_dims {
            let c = self.center[a];
            if c - self.radius < 0.0 || c + self.radius > sg.extent[a] {
                return Err(Error::config(format!(
                    "neighborhood around {:?} with radius {} leaves the grid",
                    self.center, self.radius
                )));
            }
        }
        Ok(())
    }
}
