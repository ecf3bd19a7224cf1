//! End-to-end comparison of the two local Sobolev orders at each query.
//!
//! Direction (a): Hörmander regularity on the wide cone should carry over to the
//! wavelet energy on the narrow cone. Direction (b): wavelet regularity on the
//! wide cone should carry over to Hörmander regularity on the narrow cone, and
//! to the localized reconstruction `f₁` synthesized from the masked coefficients.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{MicrolocalQuery, RunConfig};
use crate::error::Result;
use crate::field::SampledField;
use crate::grid::{FreqNode, FrequencyGrid, SpatialGrid};
use crate::microlocal::{
    node_cone_hit, order_serde, shell_energy_hormander_multi, shell_index, truncate_to_nyquist,
    ConeHit, FitOptions, ShellEnergySeries,
};
use crate::signals::generate;
use crate::transform::{coverage_function, uncovered_energy_fraction, SliceEngine};

const NODE_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// `lhs ≥ rhs − tol`, with `+∞ ≥ +∞` holding.
    pub fn at_least(lhs: f64, rhs: f64, tol: f64) -> Self {
        if lhs == f64::INFINITY || lhs >= rhs - tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySeries {
    pub hormander_outer: ShellEnergySeries,
    pub hormander_inner: ShellEnergySeries,
    pub pu_outer: ShellEnergySeries,
    pub pu_inner: ShellEnergySeries,
    pub f1: ShellEnergySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub name: String,
    pub x0: [f64; 2],
    pub direction: [f64; 2],
    pub radius: f64,
    pub outer_ratio: f64,
    pub inner_ratio: f64,
    pub shells: Vec<i32>,
    #[serde(with = "order_serde")]
    pub s_hat_hormander: f64,
    #[serde(with = "order_serde")]
    pub s_hat_hormander_inner: f64,
    #[serde(with = "order_serde")]
    pub s_hat_pu_outer: f64,
    #[serde(with = "order_serde")]
    pub s_hat_pu_inner: f64,
    #[serde(with = "order_serde")]
    pub s_hat_f1: f64,
    pub direction_a: Verdict,
    pub direction_b: Verdict,
    /// `s_f1 ≥ s_pu_outer − tol`; part of direction (b).
    pub f1_check: Verdict,
    pub direction_a_pass: bool,
    pub direction_b_pass: bool,
    /// Outer-cone Hörmander and wavelet orders within `tol` (or both smooth).
    pub orders_agree: bool,
    pub series: QuerySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub signal_kind: String,
    pub samples_per_axis: usize,
    pub node_count: usize,
    pub c_psi: f64,
    pub tolerance: f64,
    pub fit: FitOptions,
    pub uncovered_energy_fraction: f64,
    pub queries: Vec<QueryReport>,
    pub all_pass: bool,
}

impl TheoremReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Wavelet shell energies on `U` for the outer and inner cones, plus the
/// shell energies of `f̂₁` built from the outer cone and the `f₁` mask.
pub fn pu_and_f1_energies(
    engine: &SliceEngine,
    q: &MicrolocalQuery,
    shells: &[i32],
    fit: &FitOptions,
) -> Result<[ShellEnergySeries; 3]> {
    let sg = engine.spatial_grid();
    let fg = engine.freq_grid();
    let n = sg.samples_per_axis;
    let outer = q.outer_cone()?;
    let inner = q.inner_cone()?;
    let u_idx = q.neighborhood()?.grid_indices(sg);
    let mask = q.f1_cutoff_spec();
    mask.validate(sg)?;
    let mask_vals: Vec<f64> = (0..sg.len()).map(|i| mask.value(sg.point(i))).collect();
    let mask_rows: Vec<usize> = (0..n)
        .filter(|&r| mask_vals[r * n..(r + 1) * n].iter().any(|&v| v != 0.0))
        .collect();
    let mut rows: Vec<usize> = u_idx
        .iter()
        .map(|&i| i / n)
        .chain(mask_rows.iter().copied())
        .collect();
    rows.sort_unstable();
    rows.dedup();

    let nodes: Vec<(FreqNode, ConeHit)> = fg
        .nodes()
        .filter(|nd| !engine.is_empty_node(nd))
        .filter_map(|nd| node_cone_hit(fg, &nd, &outer).map(|h| (nd, h)))
        .collect();
    let cell = sg.cell_volume();
    let weight = fg.quadrature_weight(0);

    let slot = |nd: &FreqNode| {
        shells
            .iter()
            .position(|&j| j == shell_index(nd.magnitude(2)))
    };
    let mut pu = [vec![0.0; shells.len()], vec![0.0; shells.len()]];
    let mut acc = vec![Complex64::default(); sg.len()];
    let mut acc_mirror = vec![Complex64::default(); sg.len()];
    for chunk in nodes.chunks(NODE_CHUNK) {
        let results: Vec<(f64, Vec<(usize, Complex64)>)> = chunk
            .par_iter()
            .map_init(
                || {
                    (
                        vec![Complex64::default(); sg.len()],
                        vec![Complex64::default(); sg.len()],
                        engine.plan().scratch(),
                    )
                },
                |(buf, g, scratch), (nd, _)| {
                    engine.slice_rows_into(nd, &rows, buf, scratch);
                    let e: f64 =
                        u_idx.iter().map(|&i| buf[i].norm_sqr()).sum::<f64>() * cell * weight;
                    g.iter_mut().for_each(|v| *v = Complex64::default());
                    for &r in &mask_rows {
                        for i in r * n..(r + 1) * n {
                            g[i] = buf[i] * mask_vals[i];
                        }
                    }
                    let contrib = engine.synthesize_sparse(nd, g, &mask_rows, weight, scratch);
                    (e, contrib)
                },
            )
            .collect();
        for ((nd, hit), (e, contrib)) in chunk.iter().zip(results) {
            if let Some(s) = slot(nd) {
                pu[0][s] += e;
                if node_cone_hit(fg, nd, &inner).is_some() {
                    pu[1][s] += e;
                }
            }
            let target = match hit {
                ConeHit::Direct => &mut acc,
                ConeHit::Mirror => &mut acc_mirror,
            };
            for (i, v) in contrib {
                target[i] += v;
            }
        }
    }
    // a mirrored node contributes conj(C(-τ)) at τ
    if fg.hermitian {
        for i in 0..sg.len() {
            let [r, c] = sg.unflatten(i);
            let j = ((n - r) % n) * n + (n - c) % n;
            acc[i] += acc_mirror[j].conj();
        }
    }
    let scale = cell / engine.c_psi();
    let f1 = full_plane_shells(sg, &acc, scale, shells);

    let empty = |cone: &crate::microlocal::Cone| {
        let mut e = vec![true; shells.len()];
        for nd in fg.nodes() {
            if node_cone_hit(fg, &nd, cone).is_some() {
                if let Some(s) = slot(&nd) {
                    e[s] = false;
                }
            }
        }
        e
    };
    let [pu_o, pu_i] = pu;
    Ok([
        ShellEnergySeries::new(shells.to_vec(), pu_o, empty(&outer), fit),
        ShellEnergySeries::new(shells.to_vec(), pu_i, empty(&inner), fit),
        ShellEnergySeries::new(shells.to_vec(), f1, vec![false; shells.len()], fit),
    ])
}

/// Shell energies of a spectrum given in FFT units times `scale`, over all bins.
fn full_plane_shells(sg: &SpatialGrid, spec: &[Complex64], scale: f64, shells: &[i32]) -> Vec<f64> {
    let (f0, f1) = (sg.angular_freqs(0), sg.angular_freqs(1));
    let n = sg.samples_per_axis;
    let measure = sg.spectral_cell_measure();
    let mut a = vec![0.0; shells.len()];
    for r in 0..n {
        for c in 0..n {
            let rad = f0[r].hypot(f1[c]);
            if rad == 0.0 {
                continue;
            }
            if let Some(s) = shells.iter().position(|&j| j == shell_index(rad)) {
                a[s] += (spec[r * n + c] * scale).norm_sqr() * measure;
            }
        }
    }
    a
}

pub fn check_query(
    f: &SampledField,
    engine: &SliceEngine,
    q: &MicrolocalQuery,
    fit: &FitOptions,
    tol: f64,
) -> Result<QueryReport> {
    let sg = engine.spatial_grid();
    let fg: &FrequencyGrid = engine.freq_grid();
    let shells = truncate_to_nyquist(&q.shells(sg, fg), sg.nyquist(0).min(sg.nyquist(1)));
    let phi = {
        let c = q.cutoff_spec();
        crate::signals::make_cutoff(c.center, c.inner_radius, c.outer_radius, sg)?
    };
    let cones = [q.outer_cone()?, q.inner_cone()?];
    let mut horm = shell_energy_hormander_multi(f, &phi, &cones, &shells, fit)?;
    let hormander_inner = horm.pop().expect("two cones");
    let hormander_outer = horm.pop().expect("two cones");
    let [pu_outer, pu_inner, f1] = pu_and_f1_energies(engine, q, &shells, fit)?;

    let resolvable = |s: &ShellEnergySeries| s.empty_shells.iter().filter(|e| !**e).count();
    let inconclusive = shells.len() < fit.min_shells
        || resolvable(&pu_inner) < fit.min_shells
        || resolvable(&hormander_inner) < fit.min_shells;

    let (sh, shi, spo, spi, sf1) = (
        hormander_outer.s_hat(),
        hormander_inner.s_hat(),
        pu_outer.s_hat(),
        pu_inner.s_hat(),
        f1.s_hat(),
    );
    let (direction_a, direction_b, f1_check) = if inconclusive {
        (
            Verdict::Inconclusive,
            Verdict::Inconclusive,
            Verdict::Inconclusive,
        )
    } else {
        let a = Verdict::at_least(spi, sh, tol);
        let b_h = Verdict::at_least(shi, spo, tol);
        let b_f1 = Verdict::at_least(sf1, spo, tol);
        let b = if b_h.passed() && b_f1.passed() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        (a, b, b_f1)
    };
    let orders_agree = (sh.is_infinite() && spo.is_infinite()) || (sh - spo).abs() <= tol;
    Ok(QueryReport {
        name: q.name.clone(),
        x0: q.x0,
        direction: q.direction,
        radius: q.radius,
        outer_ratio: q.outer_ratio,
        inner_ratio: q.inner_ratio,
        shells,
        s_hat_hormander: sh,
        s_hat_hormander_inner: shi,
        s_hat_pu_outer: spo,
        s_hat_pu_inner: spi,
        s_hat_f1: sf1,
        direction_a,
        direction_b,
        f1_check,
        direction_a_pass: direction_a.passed(),
        direction_b_pass: direction_b.passed(),
        orders_agree,
        series: QuerySeries {
            hormander_outer,
            hormander_inner,
            pu_outer,
            pu_inner,
            f1,
        },
    })
}

pub fn theorem_check(cfg: &RunConfig) -> Result<TheoremReport> {
    cfg.validate()?;
    let sg = cfg.spatial_grid()?;
    let fg = cfg.frequency_grid()?;
    let w = cfg.wavelet()?;
    let f = generate(&cfg.signal, &sg)?;
    let engine = SliceEngine::new(&f, &fg, &w)?;
    let phi = coverage_function(&fg, &w, &sg)?;
    let uncovered = uncovered_energy_fraction(&f, &phi, w.c_psi())?;
    let queries = cfg
        .queries
        .iter()
        .map(|q| {
            log::info!("theorem check: query '{}'", q.name);
            check_query(&f, &engine, q, &cfg.fit, cfg.tolerance)
        })
        .collect::<Result<Vec<_>>>()?;
    let all_pass = queries
        .iter()
        .all(|q| q.direction_a_pass && q.direction_b_pass);
    Ok(TheoremReport {
        signal_kind: cfg.signal.kind().to_string(),
        samples_per_axis: sg.samples_per_axis,
        node_count: fg.node_count(),
        c_psi: w.c_psi(),
        tolerance: cfg.tolerance,
        fit: cfg.fit,
        uncovered_energy_fraction: uncovered,
        queries,
        all_pass,
    })
}
