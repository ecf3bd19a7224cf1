//! Sweep of the wavelet-side local order over a lattice of points and directions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{default_shells, EnergyMapConfig, RunConfig};
use crate::error::{Error, Result};
use crate::grid::{Neighborhood, NormKind};
use crate::microlocal::{
    node_cone_hit, order_serde, shell_index, truncate_to_nyquist, Cone, ShellEnergySeries,
};
use crate::signals::generate;
use crate::transform::SliceEngine;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMapEntry {
    pub x0: [f64; 2],
    pub direction: [f64; 2],
    #[serde(with = "order_serde")]
    pub s_hat: f64,
    pub n_shells_used: usize,
}

pub fn energy_map(cfg: &RunConfig) -> Result<Vec<EnergyMapEntry>> {
    cfg.validate()?;
    let m = cfg
        .energy_map
        .as_ref()
        .ok_or_else(|| Error::config("config has no energy_map section"))?;
    let sg = cfg.spatial_grid()?;
    let fg = cfg.frequency_grid()?;
    let w = cfg.wavelet()?;
    let f = generate(&cfg.signal, &sg)?;
    let engine = SliceEngine::new(&f, &fg, &w)?;
    sweep(&engine, m, &cfg.fit)
}

pub fn sweep(
    engine: &SliceEngine,
    m: &EnergyMapConfig,
    fit: &crate::microlocal::FitOptions,
) -> Result<Vec<EnergyMapEntry>> {
    let sg = engine.spatial_grid();
    let fg = engine.freq_grid();
    let shells = truncate_to_nyquist(
        &m.shells.clone().unwrap_or_else(|| default_shells(sg, fg)),
        sg.nyquist(0).min(sg.nyquist(1)),
    );
    let points = m.points();
    let regions: Vec<Vec<usize>> = points
        .iter()
        .map(|p| {
            Neighborhood::new(p.to_vec(), m.radius, NormKind::Euclidean).map(|u| u.grid_indices(sg))
        })
        .collect::<Result<_>>()?;
    let cones: Vec<Cone> = m
        .directions
        .iter()
        .map(|d| Cone::new(*d, m.ratio))
        .collect::<Result<_>>()?;
    let n = sg.samples_per_axis;
    let mut rows: Vec<usize> = regions.iter().flatten().map(|&i| i / n).collect();
    rows.sort_unstable();
    rows.dedup();

    let work: Vec<_> = fg
        .nodes()
        .filter(|nd| !engine.is_empty_node(nd))
        .filter_map(|nd| {
            let slot = shells
                .iter()
                .position(|&j| j == shell_index(nd.magnitude(2)))?;
            let hits: Vec<bool> = cones
                .iter()
                .map(|c| node_cone_hit(fg, &nd, c).is_some())
                .collect();
            hits.iter().any(|h| *h).then_some((nd, slot, hits))
        })
        .collect();
    let cell = sg.cell_volume();
    let weight = fg.quadrature_weight(0);
    // energies[node][point]
    let energies: Vec<Vec<f64>> = work
        .par_iter()
        .map_init(
            || {
                (
                    vec![Complex64::default(); sg.len()],
                    engine.plan().scratch(),
                )
            },
            |(buf, scratch), (nd, _, _)| {
                engine.slice_rows_into(nd, &rows, buf, scratch);
                regions
                    .iter()
                    .map(|idx| idx.iter().map(|&i| buf[i].norm_sqr()).sum::<f64>() * cell * weight)
                    .collect()
            },
        )
        .collect();
    let mut a = vec![vec![vec![0.0; shells.len()]; cones.len()]; points.len()];
    for ((_, slot, hits), e) in work.iter().zip(&energies) {
        for (ci, hit) in hits.iter().enumerate() {
            if *hit {
                for (pi, v) in e.iter().enumerate() {
                    a[pi][ci][*slot] += v;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(points.len() * cones.len());
    for (pi, p) in points.iter().enumerate() {
        for (ci, d) in m.directions.iter().enumerate() {
            let s = ShellEnergySeries::new(
                shells.clone(),
                a[pi][ci].clone(),
                vec![false; shells.len()],
                fit,
            );
            out.push(EnergyMapEntry {
                x0: *p,
                direction: *d,
                s_hat: s.s_hat(),
                n_shells_used: s.fit.n_shells_used,
            });
        }
    }
    Ok(out)
}

pub fn write_energy_map_csv(entries: &[EnergyMapEntry], w: impl std::io::Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "x0_0",
        "x0_1",
        "direction_0",
        "direction_1",
        "s_hat",
        "n_shells_used",
    ])?;
    for e in entries {
        out.write_record(&[
            e.x0[0].to_string(),
            e.x0[1].to_string(),
            e.direction[0].to_string(),
            e.direction[1].to_string(),
            if e.s_hat.is_finite() {
                e.s_hat.to_string()
            } else {
                "inf".into()
            },
            e.n_shells_used.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
