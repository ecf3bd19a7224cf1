//! Forward and inverse transform, frame/coverage function and coverage diagnostics.
//!
//! A coefficient slice at node `ξ` is computed in the Fourier domain as
//! `Ŵ(·,ξ)(τ) = f̂(τ) · conj ψ̂(τ₁/ξ₁, …, τₙ/ξₙ)`. Because `ψ̂` is separable and
//! band-limited, each slice spectrum is nonzero only on a box of bins, which the
//! [`SliceEngine`] exploits to prune FFT passes.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{Direction, FftPlan};
use crate::field::{Domain, SampledField};
use crate::grid::{FreqNode, FrequencyGrid, SpatialGrid};
use crate::io;
use crate::wavelet::WaveletSpec;

/// Bins with coverage below this fraction of `max Φ` are skipped by the frame inverse.
pub const FRAME_SKIP_RATIO: f64 = 1e-8;

/// Bins with coverage below this fraction of `C_ψ` count as uncovered.
pub const UNCOVERED_RATIO: f64 = 1e-3;

/// Materialized volumes larger than this are refused; use [`SliceEngine`] instead.
pub const MAX_VOLUME_BYTES: usize = 2 << 30;

/// Nonzero bins of one per-axis factor `h(τ/ξ)`, in increasing bin order.
#[derive(Debug, Clone, Default)]
pub struct AxisWindow {
    pub bins: Vec<usize>,
    pub values: Vec<f64>,
}

impl AxisWindow {
    fn build(freqs: &[f64], eval: impl Fn(f64) -> f64, xi: f64) -> Self {
        let mut w = AxisWindow::default();
        for (m, &t) in freqs.iter().enumerate() {
            let v = eval(t / xi);
            if v != 0.0 {
                w.bins.push(m);
                w.values.push(v);
            }
        }
        w
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// Per-axis windows for every node index and both signs.
#[derive(Debug, Clone)]
struct WindowTable {
    // [axis][sign: 0 => +, 1 => -][k]
    table: Vec<[Vec<AxisWindow>; 2]>,
}

impl WindowTable {
    fn new(sg: &SpatialGrid, fg: &FrequencyGrid, w: &WaveletSpec) -> Self {
        let nodes = fg.axis_nodes();
        let table = (0..sg.n_dims)
            .map(|a| {
                let freqs = sg.angular_freqs(a);
                let p = w.axis(a);
                let mk = |sign: f64| {
                    nodes
                        .iter()
                        .map(|&xi| AxisWindow::build(&freqs, |u| p.eval(u), sign * xi))
                        .collect::<Vec<_>>()
                };
                [mk(1.0), mk(-1.0)]
            })
            .collect();
        WindowTable { table }
    }

    fn get(&self, axis: usize, signed_xi: f64, k: usize) -> &AxisWindow {
        let s = if signed_xi > 0.0 { 0 } else { 1 };
        &self.table[axis][s][k]
    }
}

/// Streaming slice computation for one input field.
///
/// Holds the input spectrum and the per-axis windows; slices are produced on
/// demand so memory stays at a few grid-sized buffers regardless of node count.
#[derive(Debug, Clone)]
pub struct SliceEngine {
    sg: SpatialGrid,
    fg: FrequencyGrid,
    c_psi: f64,
    spectrum: Vec<Complex64>,
    plan: FftPlan,
    windows: WindowTable,
}

impl SliceEngine {
    pub fn new(f: &SampledField, fg: &FrequencyGrid, w: &WaveletSpec) -> Result<Self> {
        if f.domain != Domain::Space {
            return Err(Error::data(
                "forward transform expects a space-domain field",
            ));
        }
        if !f.is_finite() {
            return Err(Error::data("input field contains non-finite values"));
        }
        check_dims(&f.grid, fg, w)?;
        fg.check_nyquist(&f.grid)?;
        if fg.hermitian && !f.is_real() {
            return Err(Error::data(
                "hermitian frequency grids require a real-valued input field",
            ));
        }
        let n = f.grid.samples_per_axis;
        let plan = FftPlan::new(n);
        let mut spectrum = f.values.clone();
        plan.forward(&mut spectrum, f.grid.n_dims);
        Ok(SliceEngine {
            sg: f.grid.clone(),
            fg: fg.clone(),
            c_psi: w.c_psi(),
            spectrum,
            windows: WindowTable::new(&f.grid, fg, w),
            plan,
        })
    }

    pub fn spatial_grid(&self) -> &SpatialGrid {
        &self.sg
    }

    pub fn freq_grid(&self) -> &FrequencyGrid {
        &self.fg
    }

    pub fn c_psi(&self) -> f64 {
        self.c_psi
    }

    pub fn plan(&self) -> &FftPlan {
        &self.plan
    }

    /// Unnormalized FFT of the input.
    pub fn input_spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn axis_window(&self, node: &FreqNode, axis: usize) -> &AxisWindow {
        self.windows.get(axis, node.xi[axis], node.k[axis])
    }

    /// True when the node's window misses every FFT bin.
    pub fn is_empty_node(&self, node: &FreqNode) -> bool {
        (0..self.sg.n_dims).any(|a| self.axis_window(node, a).is_empty())
    }

    fn load_slice_spectrum(&self, node: &FreqNode, buf: &mut [Complex64]) {
        buf.iter_mut().for_each(|v| *v = Complex64::default());
        let n = self.sg.samples_per_axis;
        let w0 = self.axis_window(node, 0);
        if self.sg.n_dims == 1 {
            for (&m, &v) in w0.bins.iter().zip(&w0.values) {
                buf[m] = self.spectrum[m] * v;
            }
            return;
        }
        let w1 = self.axis_window(node, 1);
        for (&r, &vr) in w0.bins.iter().zip(&w0.values) {
            for (&c, &vc) in w1.bins.iter().zip(&w1.values) {
                let i = r * n + c;
                buf[i] = self.spectrum[i] * (vr * vc);
            }
        }
    }

    /// Full spatial slice `W(·, ξ)` for one node.
    pub fn slice(&self, node: &FreqNode) -> Vec<Complex64> {
        let mut buf = vec![Complex64::default(); self.sg.len()];
        let mut scratch = self.plan.scratch();
        self.slice_into(node, &mut buf, &mut scratch);
        buf
    }

    pub fn slice_into(&self, node: &FreqNode, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.load_slice_spectrum(node, buf);
        let n = self.sg.samples_per_axis;
        if self.sg.n_dims == 2 {
            let cols = &self.axis_window(node, 1).bins;
            self.plan
                .select_cols(buf, cols, Direction::Inverse, scratch);
        }
        self.plan.rows(buf, Direction::Inverse, scratch);
        let scale = 1.0 / (n as f64).powi(self.sg.n_dims as i32);
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// 2-D only: computes the slice on the listed spatial rows (axis-0 indices).
    ///
    /// Only the listed rows of `buf` hold valid values afterwards.
    pub fn slice_rows_into(
        &self,
        node: &FreqNode,
        rows: &[usize],
        buf: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        debug_assert_eq!(self.sg.n_dims, 2);
        self.load_slice_spectrum(node, buf);
        let n = self.sg.samples_per_axis;
        let cols = &self.axis_window(node, 1).bins;
        self.plan
            .select_cols(buf, cols, Direction::Inverse, scratch);
        self.plan
            .select_rows(buf, rows, Direction::Inverse, scratch);
        let scale = 1.0 / (n * n) as f64;
        for &r in rows {
            buf[r * n..(r + 1) * n].iter_mut().for_each(|v| *v *= scale);
        }
    }

    /// Adds `coef · FFT(g)(τ) · ψ̂(τ/ξ)` into `acc` on the node's window bins.
    ///
    /// `g` is a spatial field that is zero outside `nonzero_rows` (2-D) and is
    /// overwritten. `acc` is in unnormalized FFT units.
    pub fn synthesize_into(
        &self,
        node: &FreqNode,
        g: &mut [Complex64],
        nonzero_rows: &[usize],
        coef: f64,
        acc: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        for (i, v) in self.synthesize_sparse(node, g, nonzero_rows, coef, scratch) {
            acc[i] += v;
        }
    }

    /// As [`SliceEngine::synthesize_into`], returning `(bin, value)` pairs instead.
    pub fn synthesize_sparse(
        &self,
        node: &FreqNode,
        g: &mut [Complex64],
        nonzero_rows: &[usize],
        coef: f64,
        scratch: &mut [Complex64],
    ) -> Vec<(usize, Complex64)> {
        let n = self.sg.samples_per_axis;
        let w0 = self.axis_window(node, 0);
        if self.sg.n_dims == 1 {
            self.plan.rows(g, Direction::Forward, scratch);
            return w0
                .bins
                .iter()
                .zip(&w0.values)
                .map(|(&m, &v)| (m, g[m] * (coef * v)))
                .collect();
        }
        let w1 = self.axis_window(node, 1);
        self.plan
            .select_rows(g, nonzero_rows, Direction::Forward, scratch);
        self.plan
            .select_cols(g, &w1.bins, Direction::Forward, scratch);
        let mut out = Vec::with_capacity(w0.bins.len() * w1.bins.len());
        for (&r, &vr) in w0.bins.iter().zip(&w0.values) {
            for (&c, &vc) in w1.bins.iter().zip(&w1.values) {
                let i = r * n + c;
                out.push((i, g[i] * (coef * vr * vc)));
            }
        }
        out
    }
}

fn check_dims(sg: &SpatialGrid, fg: &FrequencyGrid, w: &WaveletSpec) -> Result<()> {
    if sg.n_dims != fg.n_dims() || sg.n_dims != w.n_dims {
        return Err(Error::config(format!(
            "dimension mismatch: spatial {}-D, frequency grid {}-D, wavelet {}-D",
            sg.n_dims,
            fg.n_dims(),
            w.n_dims
        )));
    }
    Ok(())
}

/// Sampled coefficients `W_ψ f(x, ξ)` for every node of a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CwtVolume {
    pub spatial_grid: SpatialGrid,
    pub freq_grid: FrequencyGrid,
    /// Slice-major: node `i` occupies `[i·len, (i+1)·len)`.
    pub slices: Vec<Complex64>,
}

impl CwtVolume {
    pub fn node_count(&self) -> usize {
        self.freq_grid.node_count()
    }

    pub fn slice(&self, node_index: usize) -> &[Complex64] {
        let len = self.spatial_grid.len();
        &self.slices[node_index * len..(node_index + 1) * len]
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// `Σ_ξ weight(ξ) ‖W(·,ξ)‖²` over the full parameter set (mirrored quadrants included).
    pub fn analysis_energy(&self) -> f64 {
        let cell = self.spatial_grid.cell_volume();
        let mirror = self.freq_grid.mirror_factor();
        self.freq_grid
            .nodes()
            .map(|nd| {
                let e: f64 = self.slice(nd.index).iter().map(|v| v.norm_sqr()).sum();
                self.freq_grid.quadrature_weight(nd.index) * e * cell
            })
            .sum::<f64>()
            * mirror
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::save_volume(
            path,
            &self.spatial_grid.shape(),
            self.node_count(),
            &self.slices,
        )
    }

    /// Reads a `PUWV1` file and checks it against the grids it is paired with.
    pub fn load(path: &Path, sg: &SpatialGrid, fg: &FrequencyGrid) -> Result<Self> {
        let raw = io::load_volume(path)?;
        if raw.dims != sg.shape() {
            return Err(Error::data(format!(
                "volume dims {:?} do not match spatial grid {:?}",
                raw.dims,
                sg.shape()
            )));
        }
        if raw.node_count != fg.node_count() {
            return Err(Error::data(format!(
                "volume has {} nodes, frequency grid has {}",
                raw.node_count,
                fg.node_count()
            )));
        }
        Ok(CwtVolume {
            spatial_grid: sg.clone(),
            freq_grid: fg.clone(),
            slices: raw.data,
        })
    }
}

pub fn forward_transform(
    f: &SampledField,
    fg: &FrequencyGrid,
    w: &WaveletSpec,
) -> Result<CwtVolume> {
    let bytes = fg.node_count() * f.grid.len() * std::mem::size_of::<Complex64>();
    if bytes > MAX_VOLUME_BYTES {
        return Err(Error::config(format!(
            "volume would take {} MiB; reduce the grids or use the streaming slice engine",
            bytes >> 20
        )));
    }
    let engine = SliceEngine::new(f, fg, w)?;
    let slices: Vec<Vec<Complex64>> = (0..fg.node_count())
        .into_par_iter()
        .map(|i| engine.slice(&fg.node(i)))
        .collect();
    Ok(CwtVolume {
        spatial_grid: f.grid.clone(),
        freq_grid: fg.clone(),
        slices: slices.concat(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMode {
    /// Discretized reproducing formula normalized by `C_ψ`.
    PaperCpsi,
    /// Bin-wise division by the discrete frame function `Φ(τ)`.
    DiscreteFrame,
}

impl std::str::FromStr for InverseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "paper_cpsi" => Ok(InverseMode::PaperCpsi),
            "discrete_frame" => Ok(InverseMode::DiscreteFrame),
            other => Err(Error::config(format!("unknown inverse mode '{other}'"))),
        }
    }
}

/// Windowed synthesis `Σ_ξ w · FFT(W(·,ξ)) · ψ̂(τ/ξ)` over the listed nodes, in FFT units.
fn synthesis_spectrum(vol: &CwtVolume, w: &WaveletSpec) -> Result<Vec<Complex64>> {
    let sg = &vol.spatial_grid;
    let fg = &vol.freq_grid;
    check_dims(sg, fg, w)?;
    let windows = WindowTable::new(sg, fg, w);
    let n = sg.samples_per_axis;
    let plan = FftPlan::new(n);
    let all_rows: Vec<usize> = (0..n).collect();
    let weight = fg.quadrature_weight(0);

    // Per-node sparse contributions are computed in parallel and summed in node order.
    let contributions: Vec<Vec<(usize, Complex64)>> = (0..fg.node_count())
        .into_par_iter()
        .map(|i| {
            let node = fg.node(i);
            let mut g = vol.slice(i).to_vec();
            let mut scratch = plan.scratch();
            let w0 = windows.get(0, node.xi[0], node.k[0]);
            let mut out = Vec::new();
            if sg.n_dims == 1 {
                plan.rows(&mut g, Direction::Forward, &mut scratch);
                for (&m, &v) in w0.bins.iter().zip(&w0.values) {
                    out.push((m, g[m] * (weight * v)));
                }
            } else {
                let w1 = windows.get(1, node.xi[1], node.k[1]);
                plan.select_rows(&mut g, &all_rows, Direction::Forward, &mut scratch);
                plan.select_cols(&mut g, &w1.bins, Direction::Forward, &mut scratch);
                for (&r, &vr) in w0.bins.iter().zip(&w0.values) {
                    for (&c, &vc) in w1.bins.iter().zip(&w1.values) {
                        let idx = r * n + c;
                        out.push((idx, g[idx] * (weight * vr * vc)));
                    }
                }
            }
            out
        })
        .collect();
    let mut acc = vec![Complex64::default(); sg.len()];
    for contrib in contributions {
        for (idx, v) in contrib {
            acc[idx] += v;
        }
    }
    Ok(acc)
}

/// Inverse FFT of a synthesis spectrum, folding in the mirrored quadrants.
pub fn finish_synthesis(
    mut acc: Vec<Complex64>,
    sg: &SpatialGrid,
    hermitian: bool,
    plan: &FftPlan,
) -> SampledField {
    plan.inverse(&mut acc, sg.n_dims);
    if hermitian {
        acc.iter_mut()
            .for_each(|v| *v = Complex64::new(2.0 * v.re, 0.0));
    }
    SampledField {
        grid: sg.clone(),
        values: acc,
        domain: Domain::Space,
    }
}

pub fn inverse_transform(
    vol: &CwtVolume,
    w: &WaveletSpec,
    mode: InverseMode,
) -> Result<SampledField> {
    if vol.is_empty() || vol.node_count() == 0 {
        return Err(Error::data("empty coefficient volume"));
    }
    let sg = &vol.spatial_grid;
    if vol.slices.len() != vol.node_count() * sg.len() {
        return Err(Error::data("volume size does not match its grids"));
    }
    let mut acc = synthesis_spectrum(vol, w)?;
    apply_normalization(&mut acc, sg, &vol.freq_grid, w, mode)?;
    let plan = FftPlan::new(sg.samples_per_axis);
    Ok(finish_synthesis(acc, sg, vol.freq_grid.hermitian, &plan))
}

/// Forward transform followed by the inverse without materializing the volume.
///
/// Returns the reconstruction and the analysis energy `Σ_ξ weight ‖W(·,ξ)‖²`
/// (mirrored quadrants included). Each slice goes through the same pruned
/// inverse and forward FFT passes as [`forward_transform`] and [`inverse_transform`].
pub fn round_trip_streaming(
    engine: &SliceEngine,
    w: &WaveletSpec,
    mode: InverseMode,
) -> Result<(SampledField, f64)> {
    let sg = engine.spatial_grid();
    let fg = engine.freq_grid();
    let n = sg.samples_per_axis;
    let all_rows: Vec<usize> = (0..n).collect();
    let weight = fg.quadrature_weight(0);
    let cell = sg.cell_volume();
    let nodes: Vec<FreqNode> = fg.nodes().filter(|nd| !engine.is_empty_node(nd)).collect();
    let mut acc = vec![Complex64::default(); sg.len()];
    let mut energy = 0.0;
    for chunk in nodes.chunks(32) {
        let parts: Vec<(f64, Vec<(usize, Complex64)>)> = chunk
            .par_iter()
            .map_init(
                || {
                    (
                        vec![Complex64::default(); sg.len()],
                        engine.plan().scratch(),
                    )
                },
                |(buf, scratch), nd| {
                    engine.slice_into(nd, buf, scratch);
                    let e = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell * weight;
                    (
                        e,
                        engine.synthesize_sparse(nd, buf, &all_rows, weight, scratch),
                    )
                },
            )
            .collect();
        for (e, contrib) in parts {
            energy += e;
            for (i, v) in contrib {
                acc[i] += v;
            }
        }
    }
    apply_normalization(&mut acc, sg, fg, w, mode)?;
    let plan = FftPlan::new(n);
    Ok((
        finish_synthesis(acc, sg, fg.hermitian, &plan),
        energy * fg.mirror_factor(),
    ))
}

fn apply_normalization(
    acc: &mut [Complex64],
    sg: &SpatialGrid,
    fg: &FrequencyGrid,
    w: &WaveletSpec,
    mode: InverseMode,
) -> Result<()> {
    match mode {
        InverseMode::PaperCpsi => {
            let inv = 1.0 / w.c_psi();
            acc.iter_mut().for_each(|v| *v *= inv);
        }
        InverseMode::DiscreteFrame => {
            let phi = coverage_values(sg, fg, w)?;
            let max = phi.iter().cloned().fold(0.0, f64::max);
            let floor = FRAME_SKIP_RATIO * max;
            for (v, &p) in acc.iter_mut().zip(&phi) {
                *v = if p < floor || p == 0.0 {
                    Complex64::default()
                } else {
                    *v / p
                };
            }
        }
    }
    Ok(())
}

/// Per-axis coverage `Σ_k (ln2/V) h(τ/(σ ξ_k))²` for both signs.
fn axis_coverage(
    sg: &SpatialGrid,
    fg: &FrequencyGrid,
    w: &WaveletSpec,
    axis: usize,
) -> [Vec<f64>; 2] {
    let freqs = sg.angular_freqs(axis);
    let nodes = fg.axis_nodes();
    let lw = fg.log_weight();
    let p = w.axis(axis);
    let one = |sign: f64| {
        freqs
            .iter()
            .map(|&t| {
                nodes
                    .iter()
                    .map(|&xi| {
                        let v = p.eval(t / (sign * xi));
                        v * v
                    })
                    .sum::<f64>()
                    * lw
            })
            .collect::<Vec<f64>>()
    };
    [one(1.0), one(-1.0)]
}

/// Discrete frame function `Φ(τ) = Σ_ξ weight(ξ) |ψ̂(τ/ξ)|²` on the FFT bins.
pub fn coverage_values(sg: &SpatialGrid, fg: &FrequencyGrid, w: &WaveletSpec) -> Result<Vec<f64>> {
    check_dims(sg, fg, w)?;
    let per_axis: Vec<[Vec<f64>; 2]> = (0..sg.n_dims)
        .map(|a| axis_coverage(sg, fg, w, a))
        .collect();
    let sidx = |s: i8| if s > 0 { 0 } else { 1 };
    let mut quads: Vec<Vec<i8>> = fg.quadrants.clone();
    if fg.hermitian {
        quads.extend(
            fg.quadrants
                .iter()
                .map(|q| q.iter().map(|s| -s).collect::<Vec<i8>>()),
        );
    }
    let n = sg.samples_per_axis;
    let mut phi = vec![0.0; sg.len()];
    for q in &quads {
        if sg.n_dims == 1 {
            let c0 = &per_axis[0][sidx(q[0])];
            phi.iter_mut().zip(c0).for_each(|(p, v)| *p += v);
        } else {
            let c0 = &per_axis[0][sidx(q[0])];
            let c1 = &per_axis[1][sidx(q[1])];
            for r in 0..n {
                if c0[r] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    phi[r * n + c] += c0[r] * c1[c];
                }
            }
        }
    }
    Ok(phi)
}

pub fn coverage_function(
    fg: &FrequencyGrid,
    w: &WaveletSpec,
    sg: &SpatialGrid,
) -> Result<SampledField> {
    let phi = coverage_values(sg, fg, w)?;
    SampledField::new(
        sg.clone(),
        phi.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        Domain::Frequency,
    )
}

/// Fraction of `‖f̂‖²` on bins where `Φ < 10⁻³ C_ψ`; zero for the zero field.
pub fn uncovered_energy_fraction(f: &SampledField, phi: &SampledField, c_psi: f64) -> Result<f64> {
    if f.grid != phi.grid {
        return Err(Error::data("field and coverage grids differ"));
    }
    let spec = match f.domain {
        Domain::Space => f.spectrum(),
        Domain::Frequency => f.clone(),
    };
    let threshold = UNCOVERED_RATIO * c_psi;
    let (mut total, mut uncovered) = (0.0, 0.0);
    for (v, p) in spec.values.iter().zip(&phi.values) {
        let e = v.norm_sqr();
        total += e;
        if p.re < threshold {
            uncovered += e;
        }
    }
    Ok(if total == 0.0 { 0.0 } else { uncovered / total })
}

/// `Σ_τ |f̂(τ)|² Φ(τ)` with the Plancherel bin measure.
pub fn weighted_spectral_energy(f: &SampledField, phi: &[f64]) -> f64 {
    let spec = f.spectrum();
    spec.values
        .iter()
        .zip(phi)
        .map(|(v, p)| v.norm_sqr() * p)
        .sum::<f64>()
        * f.grid.spectral_cell_measure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_frequency_grid;
    use crate::wavelet::{make_wavelet, ProfileKind};
    use std::f64::consts::{LN_2, PI};

    fn grid64() -> SpatialGrid {
        SpatialGrid::unit(2, 64).unwrap()
    }

    #[test]
    fn zero_in_zero_out() {
        let sg = grid64();
        let fg = FrequencyGrid::real_2d(4.0, 2, 3).unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 2).unwrap();
        let f = SampledField::zeros(sg, Domain::Space);
        let vol = forward_transform(&f, &fg, &w).unwrap();
        assert!(vol.slices.iter().all(|v| *v == Complex64::default()));
        for mode in [InverseMode::PaperCpsi, InverseMode::DiscreteFrame] {
            let g = inverse_transform(&vol, &w, mode).unwrap();
            assert!(g.values.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn single_bin_exponential() {
        let sg = grid64();
        let all = vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]];
        let fg = make_frequency_grid(4.0, 2, 3, all).unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 2).unwrap();
        let tau0 = [2.0 * PI * 5.0, -2.0 * PI * 7.0];
        let f = SampledField::from_fn(sg.clone(), |x| {
            Complex64::from_polar(1.0, tau0[0] * x[0] + tau0[1] * x[1])
        });
        let vol = forward_transform(&f, &fg, &w).unwrap();
        for node in fg.nodes() {
            let m = w.eval(&[tau0[0] / node.xi[0], tau0[1] / node.xi[1]]);
            let s = vol.slice(node.index);
            for i in (0..sg.len()).step_by(97) {
                assert!((s[i] - f.values[i] * m).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn nyquist_violation_and_bad_input() {
        let sg = SpatialGrid::unit(2, 32).unwrap();
        let fg = FrequencyGrid::real_2d(4.0, 2, 5).unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 2).unwrap();
        let f = SampledField::zeros(sg.clone(), Domain::Space);
        assert_eq!(forward_transform(&f, &fg, &w).unwrap_err().exit_code(), 2);
        let fg = FrequencyGrid::real_2d(2.0, 2, 2).unwrap();
        let mut bad = f.clone();
        bad.values[3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(forward_transform(&bad, &fg, &w).unwrap_err().exit_code(), 3);
        let mut cplx = f;
        cplx.values[3] = Complex64::new(0.0, 1.0);
        assert_eq!(
            forward_transform(&cplx, &fg, &w).unwrap_err().exit_code(),
            3
        );
    }

    #[test]
    fn box_coverage_matches_brute_force_count() {
        // ideal box, 1-D: count nodes whose [ξ/2, 2ξ] contains τ
        let sg = SpatialGrid::unit(1, 1024).unwrap();
        for v in [4usize, 8] {
            let fg = make_frequency_grid(4.0, v, 6, vec![vec![1]]).unwrap();
            let w = make_wavelet(ProfileKind::IdealBox, 1).unwrap();
            let phi = coverage_values(&sg, &fg, &w).unwrap();
            let freqs = sg.angular_freqs(0);
            let nodes = fg.axis_nodes();
            let ln4 = 4f64.ln();
            for (m, &t) in freqs.iter().enumerate() {
                let count = nodes
                    .iter()
                    .filter(|&&xi| t >= 0.5 * xi && t <= 2.0 * xi)
                    .count();
                let brute = count as f64 * LN_2 / v as f64;
                assert!((phi[m] - brute).abs() < 1e-12);
                if t >= 2.0 * nodes[0] && t <= nodes[nodes.len() - 1] / 2.0 {
                    assert!(phi[m] >= ln4 * (1.0 - 1.0 / v as f64) - 1e-12);
                    assert!(phi[m] <= ln4 * (1.0 + 1.0 / v as f64) + 1e-12);
                }
                if t <= 0.0 || t < nodes[0] / 2.0 || t > 2.0 * nodes[nodes.len() - 1] {
                    assert_eq!(phi[m], 0.0);
                }
            }
        }
    }

    #[test]
    fn coverage_vanishes_on_axes() {
        let sg = grid64();
        let fg = FrequencyGrid::real_2d(2.0, 4, 4).unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 2).unwrap();
        let phi = coverage_values(&sg, &fg, &w).unwrap();
        for k in 0..64 {
            assert_eq!(phi[k * 64], 0.0);
            assert_eq!(phi[k], 0.0);
        }
    }

    #[test]
    fn uncovered_fraction_edge_cases() {
        let sg = grid64();
        let fg = FrequencyGrid::real_2d(2.0, 4, 4).unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 2).unwrap();
        let phi = coverage_function(&fg, &w, &sg).unwrap();
        let zero = SampledField::zeros(sg.clone(), Domain::Space);
        assert_eq!(
            uncovered_energy_fraction(&zero, &phi, w.c_psi()).unwrap(),
            0.0
        );
        let ones = SampledField::from_fn(sg, |_| Complex64::new(1.0, 0.0));
        let frac = uncovered_energy_fraction(&ones, &phi, w.c_psi()).unwrap();
        assert!((frac - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_mode_parsing() {
        assert_eq!(
            "paper-cpsi".parse::<InverseMode>().unwrap(),
            InverseMode::PaperCpsi
        );
        assert_eq!(
            "discrete_frame".parse::<InverseMode>().unwrap(),
            InverseMode::DiscreteFrame
        );
        assert!("frame".parse::<InverseMode>().is_err());
    }

    #[test]
    fn one_dimensional_round_trip() {
        let sg = SpatialGrid::unit(1, 512).unwrap();
        let fg = make_frequency_grid(4.0, 8, 6, vec![vec![1]])
            .unwrap()
            .with_hermitian(true)
            .unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 1).unwrap();
        let f = SampledField::from_fn(sg, |x| {
            let d = x[0] - 0.5;
            Complex64::new(
                (-d * d / (2.0 * 0.05f64.powi(2))).exp() * (2.0 * PI * 30.0 * x[0]).cos(),
                0.0,
            )
        });
        let vol = forward_transform(&f, &fg, &w).unwrap();
        let g = inverse_transform(&vol, &w, InverseMode::DiscreteFrame).unwrap();
        assert!(
            g.relative_l2_error(&f) < 1e-8,
            "{}",
            g.relative_l2_error(&f)
        );
    }

    #[test]
    fn volume_file_round_trip() {
        let sg = SpatialGrid::unit(2, 16).unwrap();
        let fg = FrequencyGrid::real_2d(2.0, 1, 2).unwrap();
        let w = make_wavelet(ProfileKind::SmoothBump, 2).unwrap();
        let f = SampledField::from_fn(sg.clone(), |x| {
            Complex64::new((9.0 * x[0] + 4.0 * x[1]).sin(), 0.0)
        });
        let vol = forward_transform(&f, &fg, &w).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.puwv");
        vol.save(&p).unwrap();
        assert_eq!(CwtVolume::load(&p, &sg, &fg).unwrap(), vol);
        let other = FrequencyGrid::real_2d(2.0, 1, 1).unwrap();
        assert!(CwtVolume::load(&p, &sg, &other).is_err());
    }
}
