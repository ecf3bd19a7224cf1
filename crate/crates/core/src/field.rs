use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::grid::SpatialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Space,
    /// Values indexed by FFT bin; bin `m` maps to angular frequency `2πm/extent`.
    Frequency,
}

/// Complex samples on a [`SpatialGrid`], row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
    pub domain: Domain,
}

impl SampledField {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::data(format!(
                "field has {} values but grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledField {
            grid,
            values,
            domain,
        })
    }

    pub fn zeros(grid: SpatialGrid, domain: Domain) -> Self {
        let values = vec![Complex64::default(); grid.len()];
        SampledField {
            grid,
            values,
            domain,
        }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        SampledField {
            grid,
            values,
            domain: Domain::Space,
        }
    }

    pub fn from_real(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(
            grid,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            Domain::Space,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// `‖f‖²_{L²}` with the pixel measure.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise product with another field on the same grid.
    pub fn multiply(&self, other: &SampledField) -> Result<SampledField> {
        if self.grid != other.grid {
            return Err(Error::data("grid mismatch in pointwise product"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(SampledField {
            grid: self.grid.clone(),
            values,
            domain: self.domain,
        })
    }

    /// Continuous-normalized spectrum `f̂(τ) ≈ ∫ f(t) e^{-it·τ} dt = cell_volume · FFT(f)`.
    pub fn spectrum(&self) -> SampledField {
        let n = self.grid.samples_per_axis;
        let mut v = self.values.clone();
        FftPlan::new(n).forward(&mut v, self.grid.n_dims);
        let cell = self.grid.cell_volume();
        v.iter_mut().for_each(|x| *x *= cell);
        SampledField {
            grid: self.grid.clone(),
            values: v,
            domain: Domain::Frequency,
        }
    }

    /// Circular shift by whole pixels: `g(x) = f(x - shift·h)`.
    pub fn shifted(&self, shift: [isize; 2]) -> SampledField {
        let n = self.grid.samples_per_axis as isize;
        let mut out = vec![Complex64::default(); self.values.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let k = self.grid.unflatten(i);
            let src0 = (k[0] as isize - shift[0]).rem_euclid(n) as usize;
            let src = if self.grid.n_dims == 1 {
                src0
            } else {
                let src1 = (k[1] as isize - shift[1]).rem_euclid(n) as usize;
                src0 * n as usize + src1
            };
            *slot = self.values[src];
        }
        SampledField {
            grid: self.grid.clone(),
            values: out,
            domain: self.domain,
        }
    }

    /// Relative L² distance `‖self - other‖ / ‖other‖`.
    pub fn relative_l2_error(&self, reference: &SampledField) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = reference.values.iter().map(|v| v.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plancherel_normalization() {
        let g = SpatialGrid::new(2, vec![2.0, 0.5], 32).unwrap();
        let f = SampledField::from_fn(g.clone(), |x| {
            Complex64::new((3.0 * x[0]).sin(), x[1] * x[0])
        });
        let spec = f.spectrum();
        let e: f64 =
            spec.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.spectral_cell_measure();
        assert!((e / f.l2_norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_round_trip() {
        let g = SpatialGrid::unit(2, 8).unwrap();
        let f = SampledField::from_fn(g, |x| Complex64::new(x[0] + 10.0 * x[1], 0.0));
        let s = f.shifted([3, -2]);
        assert_eq!(s.values[3 * 8], f.values[2]);
        assert_eq!(s.shifted([-3, 2]), f);
    }

    #[test]
    fn length_mismatch_is_data_error() {
        let g = SpatialGrid::unit(1, 8).unwrap();
        let e = SampledField::new(g, vec![Complex64::default(); 7], Domain::Space).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
