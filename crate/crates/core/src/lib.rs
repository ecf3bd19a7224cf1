//! Separable per-axis-dilation continuous wavelet transform on 2-D grids,
//! local Sobolev energy functionals in the Hörmander and wavelet senses, and a
//! verification harness comparing the two.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod harness;
pub mod io;
pub mod microlocal;
pub mod signals;
pub mod transform;
pub mod wavelet;

pub use error::{Error, Result};
pub use field::{Domain, SampledField};
pub use grid::{make_frequency_grid, FreqNode, FrequencyGrid, Neighborhood, NormKind, SpatialGrid};
pub use microlocal::{
    cone_contains, cone_propagation_check, estimate_sobolev_order, local_decay_check,
    proof_bound_check, shell_energy_hormander, shell_energy_pu, Cone, FitOptions,
    ShellEnergySeries, SobolevFit,
};
pub use signals::{generate, make_cutoff, CutoffSpec, SignalSpec};
pub use transform::{
    coverage_function, forward_transform, inverse_transform, uncovered_energy_fraction, CwtVolume,
    InverseMode, SliceEngine,
};
pub use wavelet::{
    admissibility_constant, make_wavelet, ProfileKind, WaveletSpec, WindowProfile1D,
};
