//! Frequency cones, the two local Sobolev energy functionals as dyadic shell
//! series, decay-order estimation and the proof-level inequality checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Domain, SampledField};
use crate::grid::{FreqNode, FrequencyGrid, Neighborhood};
use crate::transform::{CwtVolume, SliceEngine};
use crate::wavelet::WaveletSpec;

/// Shells with energy at or below this are ignored by the order fit.
pub const ENERGY_FLOOR: f64 = 1e-30;

pub const GAMMA_PSI_RATIO: f64 = 5.0;
pub const INNER_RATIO: f64 = 1.25;

/// `{τ ∈ (0,∞)² : ρ⁻¹ r₀ < τ₁/τ₂ < ρ r₀}` with `r₀ = ξ⁰₁/ξ⁰₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub center: [f64; 2],
    pub ratio_factor: f64,
}

impl Cone {
    pub fn new(center: [f64; 2], ratio_factor: f64) -> Result<Self> {
        let c = Cone {
            center,
            ratio_factor,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center[0] > 0.0 && self.center[1] > 0.0) {
            return Err(Error::config(
                "cone center must lie in the open positive quadrant",
            ));
        }
        if !(self.ratio_factor > 1.0 && self.ratio_factor.is_finite()) {
            return Err(Error::config("cone ratio factor must be > 1"));
        }
        Ok(())
    }

    /// The wavelet cone `Γ_ψ(ξ⁰)` (`ρ = 5`).
    pub fn gamma_psi(center: [f64; 2]) -> Result<Self> {
        Cone::new(center, GAMMA_PSI_RATIO)
    }

    /// The narrower cone `Γ(ξ⁰)` (`ρ = 5/4`).
    pub fn inner(center: [f64; 2]) -> Result<Self> {
        Cone::new(center, INNER_RATIO)
    }

    pub fn center_ratio(&self) -> f64 {
        self.center[0] / self.center[1]
    }

    pub fn contains(&self, tau: [f64; 2]) -> bool {
        cone_contains(self, tau)
    }
}

pub fn cone_contains(c: &Cone, tau: [f64; 2]) -> bool {
    if !(tau[0] > 0.0 && tau[1] > 0.0) {
        return false;
    }
    let r = tau[0] / tau[1];
    let r0 = c.center_ratio();
    r0 / c.ratio_factor < r && r < r0 * c.ratio_factor
}

const PROBE_CENTERS: [[f64; 2]; 4] = [[1.0, 1.0], [2.0, 1.0], [1.0, 3.0], [0.7, 0.2]];

/// Checks that `τ = (ω₁ξ₁, ω₂ξ₂)` lands in `Cone(ξ⁰, ρ_out)` whenever
/// `ω ∈ [1/2,2]²` and `ξ ∈ Cone(ξ⁰, ρ_in)`.
///
/// Corner ω and ξ ratios just inside the inner cone are always tried; `samples`
/// random pairs are added on top.
pub fn cone_propagation_check(rho_in: f64, rho_out: f64, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inside = 1.0 - 1e-12;
    for c0 in PROBE_CENTERS {
        let (Ok(inner), Ok(outer)) = (Cone::new(c0, rho_in), Cone::new(c0, rho_out)) else {
            return false;
        };
        let r0 = inner.center_ratio();
        let ok = |xi: [f64; 2], om: [f64; 2]| {
            !inner.contains(xi) || outer.contains([om[0] * xi[0], om[1] * xi[1]])
        };
        let extreme_ratios = [r0 * rho_in * inside, r0 / (rho_in * inside), r0];
        let extreme_om = [[2.0, 0.5], [0.5, 2.0], [0.5, 0.5], [2.0, 2.0], [1.0, 1.0]];
        for &r in &extreme_ratios {
            for scale in [1e-3, 1.0, 1e4] {
                let xi = [r * scale, scale];
                if extreme_om.iter().any(|&om| !ok(xi, om)) {
                    return false;
                }
            }
        }
        let ln_rho = rho_in.ln();
        for _ in 0..samples {
            let lr = rng.gen_range(-ln_rho..ln_rho) * inside;
            let scale = 10f64.powf(rng.gen_range(-3.0..5.0));
            let xi = [r0 * lr.exp() * scale, scale];
            let om = [rng.gen_range(0.5..=2.0), rng.gen_range(0.5..=2.0)];
            if !ok(xi, om) {
                return false;
            }
        }
    }
    true
}

/// Checks `1 + |ξ|² ≤ 4(1 + |τ|²)` for `τᵢ = ωᵢξᵢ`, `ω ∈ [1/2,2]²`, `ξ ∈ (0,∞)²`.
pub fn proof_bound_check(samples: usize, seed: u64) -> bool {
    let holds = |xi: [f64; 2], om: [f64; 2]| {
        let t = [om[0] * xi[0], om[1] * xi[1]];
        1.0 + xi[0] * xi[0] + xi[1] * xi[1] <= 4.0 * (1.0 + t[0] * t[0] + t[1] * t[1])
    };
    let corners = [[0.5, 0.5], [0.5, 2.0], [2.0, 0.5], [2.0, 2.0]];
    for &m in &[1e-6, 1e-2, 1.0, 10.0, 1e3, 1e8] {
        for xi in [[m, m], [m, 1e-6], [1e-6, m], [m, 3.0 * m]] {
            if corners.iter().any(|&om| !holds(xi, om)) {
                return false;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let xi = [
            10f64.powf(rng.gen_range(-6.0..8.0)),
            10f64.powf(rng.gen_range(-6.0..8.0)),
        ];
        let om = [rng.gen_range(0.5..=2.0), rng.gen_range(0.5..=2.0)];
        holds(xi, om)
    })
}

/// Serializes non-finite orders as strings (`"inf"`), finite ones as numbers.
pub mod order_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "bad order value '{other}'"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub min_shells: usize,
    /// Fitted orders above this are reported as the smooth sentinel.
    pub smooth_cap: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            min_shells: 3,
            smooth_cap: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevFit {
    #[serde(with = "order_serde")]
    pub s_hat: f64,
    /// Least-squares slope of `log₂ a_j` against `j`; NaN when not fitted.
    #[serde(with = "order_serde")]
    pub fitted_slope: f64,
    /// RMS residual of the fit in `log₂` units.
    pub residual: f64,
    /// Standard error of `s_hat` (half the slope's standard error); 0 with fewer than 3 points.
    pub s_stderr: f64,
    pub n_shells_used: usize,
    /// True when a finite fit exceeded the smooth cap.
    pub capped: bool,
}

impl SobolevFit {
    pub fn is_smooth(&self) -> bool {
        self.s_hat == f64::INFINITY
    }

    fn sentinel(n_used: usize) -> Self {
        SobolevFit {
            s_hat: f64::INFINITY,
            fitted_slope: f64::NAN,
            residual: 0.0,
            s_stderr: 0.0,
            n_shells_used: n_used,
            capped: false,
        }
    }
}

/// Least-squares `s_hat = -slope/2` of `log₂ a_j` versus `j`.
///
/// Shells with `a_j ≤ 10⁻³⁰` are dropped; fewer than `min_shells` left gives `+∞`.
pub fn estimate_sobolev_order(j_range: &[i32], a_j: &[f64], opts: &FitOptions) -> SobolevFit {
    let pts: Vec<(f64, f64)> = j_range
        .iter()
        .zip(a_j)
        .filter(|(_, &a)| a > ENERGY_FLOOR && a.is_finite())
        .map(|(&j, &a)| (j as f64, a.log2()))
        .collect();
    let n = pts.len();
    if n < opts.min_shells.max(2) {
        return SobolevFit::sentinel(n);
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).powi(2))
        .sum();
    let residual = (sse / nf).sqrt();
    let s_stderr = if n > 2 {
        0.5 * (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let s_hat = -slope / 2.0;
    if let Some(cap) = opts.smooth_cap {
        if s_hat > cap {
            return SobolevFit {
                fitted_slope: slope,
                residual,
                s_stderr,
                capped: true,
                ..SobolevFit::sentinel(n)
            };
        }
    }
    SobolevFit {
        s_hat,
        fitted_slope: slope,
        residual,
        s_stderr,
        n_shells_used: n,
        capped: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellEnergySeries {
    pub j_range: Vec<i32>,
    pub a_j: Vec<f64>,
    /// Shells where the cone meets no frequency node or bin.
    pub empty_shells: Vec<bool>,
    pub fit: SobolevFit,
}

impl ShellEnergySeries {
    pub fn new(
        j_range: Vec<i32>,
        a_j: Vec<f64>,
        empty_shells: Vec<bool>,
        opts: &FitOptions,
    ) -> Self {
        let fit = estimate_sobolev_order(&j_range, &a_j, opts);
        ShellEnergySeries {
            j_range,
            a_j,
            empty_shells,
            fit,
        }
    }

    pub fn s_hat(&self) -> f64 {
        self.fit.s_hat
    }

    /// `Σ_j a_j 2^{2js}`, the shell form of the weighted energy.
    pub fn weighted_sum(&self, s: f64) -> f64 {
        self.j_range
            .iter()
            .zip(&self.a_j)
            .map(|(&j, &a)| a * (2.0 * j as f64 * s).exp2())
            .sum()
    }

    pub fn refit(&mut self, opts: &FitOptions) {
        self.fit = estimate_sobolev_order(&self.j_range, &self.a_j, opts);
    }

    pub fn write_csv(&self, w: impl std::io::Write, s_grid: &[f64]) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["j".to_string(), "a_j".to_string(), "empty".to_string()];
        header.extend(s_grid.iter().map(|s| format!("weighted_s={s}")));
        out.write_record(&header)?;
        for (i, &j) in self.j_range.iter().enumerate() {
            let mut rec = vec![
                j.to_string(),
                format!("{:e}", self.a_j[i]),
                self.empty_shells[i].to_string(),
            ];
            rec.extend(
                s_grid
                    .iter()
                    .map(|&s| format!("{:e}", self.a_j[i] * (2.0 * j as f64 * s).exp2())),
            );
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Dyadic shell index `j` with `2^j ≤ r < 2^{j+1}`.
pub fn shell_index(r: f64) -> i32 {
    r.log2().floor() as i32
}

/// Drops shells whose outer radius exceeds the grid's Nyquist frequency.
pub fn truncate_to_nyquist(j_range: &[i32], nyquist: f64) -> Vec<i32> {
    let kept: Vec<i32> = j_range
        .iter()
        .copied()
        .filter(|&j| (j as f64 + 1.0).exp2() <= nyquist)
        .collect();
    if kept.len() < j_range.len() {
        log::warn!(
            "shells {:?} extend beyond Nyquist {nyquist:.1}; truncated to {kept:?}",
            j_range
        );
    }
    kept
}

/// Hörmander shell energies `a_j = Σ |(φf)^(τ)|² dτ/(2π)²` over cone bins in each shell.
pub fn shell_energy_hormander(
    f: &SampledField,
    phi: &SampledField,
    cone: &Cone,
    j_range: &[i32],
    opts: &FitOptions,
) -> Result<ShellEnergySeries> {
    let mut out = shell_energy_hormander_multi(f, phi, std::slice::from_ref(cone), j_range, opts)?;
    Ok(out.pop().expect("one cone"))
}

/// As [`shell_energy_hormander`] for several cones sharing one FFT.
pub fn shell_energy_hormander_multi(
    f: &SampledField,
    phi: &SampledField,
    cones: &[Cone],
    j_range: &[i32],
    opts: &FitOptions,
) -> Result<Vec<ShellEnergySeries>> {
    let sg = &f.grid;
    if sg.n_dims != 2 || f.domain != Domain::Space {
        return Err(Error::data(
            "Hörmander energies need a 2-D space-domain field",
        ));
    }
    let js = truncate_to_nyquist(j_range, sg.nyquist(0).min(sg.nyquist(1)));
    let spec = f.multiply(phi)?.spectrum();
    let measure = sg.spectral_cell_measure();
    let (f0, f1) = (sg.angular_freqs(0), sg.angular_freqs(1));
    let n = sg.samples_per_axis;
    let mut a = vec![vec![0.0; js.len()]; cones.len()];
    let mut hit = vec![vec![false; js.len()]; cones.len()];
    for r in 0..n {
        for c in 0..n {
            let tau = [f0[r], f1[c]];
            if !(tau[0] > 0.0 && tau[1] > 0.0) {
                continue;
            }
            let j = shell_index(tau[0].hypot(tau[1]));
            let Some(slot) = js.iter().position(|&x| x == j) else {
                continue;
            };
            let e = spec.values[r * n + c].norm_sqr() * measure;
            for (ci, cone) in cones.iter().enumerate() {
                if cone.contains(tau) {
                    a[ci][slot] += e;
                    hit[ci][slot] = true;
                }
            }
        }
    }
    Ok(a.into_iter()
        .zip(hit)
        .map(|(a, h)| ShellEnergySeries::new(js.clone(), a, h.iter().map(|x| !x).collect(), opts))
        .collect())
}

/// Listed-node orientation relevant to a cone: the node itself, its Hermitian mirror, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeHit {
    Direct,
    Mirror,
}

pub fn node_cone_hit(fg: &FrequencyGrid, node: &FreqNode, cone: &Cone) -> Option<ConeHit> {
    if cone.contains(node.xi) {
        Some(ConeHit::Direct)
    } else if fg.hermitian && cone.contains([-node.xi[0], -node.xi[1]]) {
        Some(ConeHit::Mirror)
    } else {
        None
    }
}

/// Shell slot of the node for each cone, or `None` when it does not contribute.
fn node_slots(
    fg: &FrequencyGrid,
    node: &FreqNode,
    cones: &[Cone],
    js: &[i32],
) -> Vec<Option<usize>> {
    let j = shell_index(node.magnitude(2));
    let slot = js.iter().position(|&x| x == j);
    cones
        .iter()
        .map(|c| node_cone_hit(fg, node, c).and(slot))
        .collect()
}

fn empty_flags(fg: &FrequencyGrid, cones: &[Cone], js: &[i32]) -> Vec<Vec<bool>> {
    let mut empty = vec![vec![true; js.len()]; cones.len()];
    for node in fg.nodes() {
        for (ci, s) in node_slots(fg, &node, cones, js).into_iter().enumerate() {
            if let Some(s) = s {
                empty[ci][s] = false;
            }
        }
    }
    empty
}

fn check_pu_inputs(fg: &FrequencyGrid, u: &Neighborhood, cones: &[Cone]) -> Result<()> {
    if fg.n_dims() != 2 || u.center.len() != 2 {
        return Err(Error::config("PU energies are defined for 2-D grids"));
    }
    cones.iter().try_for_each(Cone::validate)
}

/// PU shell energies from a materialized volume:
/// `a_j = Σ_{ξ ∈ cone, shell j} weight(ξ) Σ_{x ∈ U} |W(x,ξ)|² · pixel area`.
pub fn shell_energy_pu(
    vol: &CwtVolume,
    u: &Neighborhood,
    cone: &Cone,
    j_range: &[i32],
    opts: &FitOptions,
) -> Result<ShellEnergySeries> {
    let fg = &vol.freq_grid;
    let cones = std::slice::from_ref(cone);
    check_pu_inputs(fg, u, cones)?;
    let idx = u.grid_indices(&vol.spatial_grid);
    let cell = vol.spatial_grid.cell_volume();
    let mut a = vec![0.0; j_range.len()];
    for node in fg.nodes() {
        if let Some(s) = node_slots(fg, &node, cones, j_range)[0] {
            let sl = vol.slice(node.index);
            let e: f64 = idx.iter().map(|&i| sl[i].norm_sqr()).sum();
            a[s] += fg.quadrature_weight(node.index) * e * cell;
        }
    }
    let empty = empty_flags(fg, cones, j_range).pop().expect("one cone");
    Ok(ShellEnergySeries::new(j_range.to_vec(), a, empty, opts))
}

/// PU shell energies for several cones, computing only the spatial rows that meet `U`.
pub fn shell_energy_pu_streaming(
    engine: &SliceEngine,
    u: &Neighborhood,
    cones: &[Cone],
    j_range: &[i32],
    opts: &FitOptions,
) -> Result<Vec<ShellEnergySeries>> {
    use rayon::prelude::*;

    let fg = engine.freq_grid();
    let sg = engine.spatial_grid();
    check_pu_inputs(fg, u, cones)?;
    let idx = u.grid_indices(sg);
    let n = sg.samples_per_axis;
    let mut rows: Vec<usize> = idx.iter().map(|&i| i / n).collect();
    rows.dedup();
    let cell = sg.cell_volume();
    let work: Vec<(FreqNode, Vec<Option<usize>>)> = fg
        .nodes()
        .map(|nd| {
            let slots = node_slots(fg, &nd, cones, j_range);
            (nd, slots)
        })
        .filter(|(nd, s)| s.iter().any(Option::is_some) && !engine.is_empty_node(nd))
        .collect();
    let energies: Vec<f64> = work
        .par_iter()
        .map_init(
            || {
                (
                    vec![Complex64::default(); sg.len()],
                    engine.plan().scratch(),
                )
            },
            |(buf, scratch), (nd, _)| {
                engine.slice_rows_into(nd, &rows, buf, scratch);
                let e: f64 = idx.iter().map(|&i| buf[i].norm_sqr()).sum();
                fg.quadrature_weight(nd.index) * e * cell
            },
        )
        .collect();
    let mut a = vec![vec![0.0; j_range.len()]; cones.len()];
    for ((_, slots), e) in work.iter().zip(energies) {
        for (ci, s) in slots.iter().enumerate() {
            if let Some(s) = s {
                a[ci][*s] += e;
            }
        }
    }
    let empty = empty_flags(fg, cones, j_range);
    Ok(a.into_iter()
        .zip(empty)
        .map(|(a, e)| ShellEnergySeries::new(j_range.to_vec(), a, e, opts))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDecay {
    #[serde(with = "order_serde")]
    pub p_hat: f64,
    pub shells: Vec<i32>,
    pub sup_abs: Vec<f64>,
    /// Shells actually used in the fit (upper half of peak through last complete shell).
    pub fit_shells: Vec<i32>,
}

impl LocalDecay {
    pub fn passes(&self, min_order: f64) -> bool {
        self.p_hat >= min_order
    }
}

/// Fits `sup_{x∈U} |W(x,ξ)| ~ |ξ|^{-p}` over dyadic shells for `x₀` away from `supp f`.
///
/// Shells run from the peak of the sup profile through the last shell fully
/// covered by the grid (`2^{j+1} ≤ max |ξ|`); the fit uses the upper half of
/// that range, and never fewer than 3 shells.
pub fn local_decay_check(
    f: &SampledField,
    u: &Neighborhood,
    fg: &FrequencyGrid,
    w: &WaveletSpec,
) -> Result<LocalDecay> {
    let sg = &f.grid;
    if sg.n_dims != 2 {
        return Err(Error::config("local decay check is defined for 2-D grids"));
    }
    u.check_fits(sg)?;
    let max = f.max_abs();
    if max > 0.0 {
        let thresh = 1e-14 * max;
        let dist = f
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > thresh)
            .map(|(i, _)| u.distance(&sg.point(i)))
            .fold(f64::INFINITY, f64::min);
        if dist <= 2.0 * u.radius {
            return Err(Error::config(format!(
                "x0 {:?} is within {dist:.3} of the signal support; need more than {}",
                u.center,
                2.0 * u.radius
            )));
        }
    }
    let engine = SliceEngine::new(f, fg, w)?;
    let idx = u.grid_indices(sg);
    let n = sg.samples_per_axis;
    let mut rows: Vec<usize> = idx.iter().map(|&i| i / n).collect();
    rows.dedup();

    let top = fg.xi_max() * std::f64::consts::SQRT_2;
    let j_lo = shell_index(fg.xi_min * std::f64::consts::SQRT_2);
    let j_hi = shell_index(top);
    let shells: Vec<i32> = (j_lo..=j_hi).collect();
    let mut sup = vec![0.0f64; shells.len()];
    let mut buf = vec![Complex64::default(); sg.len()];
    let mut scratch = engine.plan().scratch();
    for nd in fg.nodes() {
        if engine.is_empty_node(&nd) {
            continue;
        }
        let s = (shell_index(nd.magnitude(2)) - j_lo) as usize;
        engine.slice_rows_into(&nd, &rows, &mut buf, &mut scratch);
        let m = idx.iter().map(|&i| buf[i].norm()).fold(0.0, f64::max);
        sup[s] = sup[s].max(m);
    }
    let complete: Vec<usize> = (0..shells.len())
        .filter(|&k| (shells[k] as f64 + 1.0).exp2() <= top)
        .collect();
    let peak = complete
        .iter()
        .copied()
        .max_by(|&a, &b| sup[a].partial_cmp(&sup[b]).expect("finite"))
        .unwrap_or(0);
    // decay past the peak accelerates for smooth data; fit the asymptotic upper half
    let past: Vec<usize> = complete
        .into_iter()
        .filter(|&k| k >= peak && sup[k] > 0.0)
        .collect();
    let keep = past.len().div_ceil(2).max(3).min(past.len());
    let used = past[past.len() - keep..].to_vec();
    let fit_shells: Vec<i32> = used.iter().map(|&k| shells[k]).collect();
    let p_hat = if sup.iter().all(|&v| v == 0.0) {
        f64::INFINITY
    } else if used.len() < 3 {
        return Err(Error::config(
            "frequency grid resolves fewer than 3 shells past the peak; widen it",
        ));
    } else {
        // sup ~ 2^{-p j}
        let a: Vec<f64> = used.iter().map(|&k| sup[k] * sup[k]).collect();
        let fit = estimate_sobolev_order(&fit_shells, &a, &FitOptions::default());
        fit.s_hat
    };
    Ok(LocalDecay {
        p_hat,
        shells,
        sup_abs: sup,
        fit_shells,
    })
}
