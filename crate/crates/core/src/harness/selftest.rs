//! Invariant suites run by `puwt selftest`.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::{make_frequency_grid, SpatialGrid};
use crate::microlocal::{cone_propagation_check, proof_bound_check};
use crate::transform::{
    coverage_values, round_trip_streaming, weighted_spectral_energy, InverseMode, SliceEngine,
};
use crate::wavelet::{
    admissibility_constant, make_wavelet, ProfileKind, Smoothness, WaveletSpec, WindowProfile1D,
    SUPPORT_HI, SUPPORT_LO,
};

const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelftestLevel {
    Fast,
    Full,
}

/// Deliberate corruptions used to confirm that the suites catch them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Profile leaks outside `[1/2, 2]`.
    Support,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "support" => Ok(Fault::Support),
            other => Err(Error::config(format!("unknown fault '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub level: SelftestLevel,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl SelftestReport {
    /// `Err(Invariant)` naming the first failed check.
    pub fn into_result(self) -> Result<SelftestReport> {
        match self.checks.iter().find(|c| !c.passed) {
            Some(c) => Err(Error::invariant(c.name.clone(), c.detail.clone())),
            None => Ok(self),
        }
    }
}

fn corrupted_wavelet() -> Result<WaveletSpec> {
    let leaky =
        WindowProfile1D::from_fn_unchecked(SUPPORT_LO, SUPPORT_HI, Smoothness::Infinite, |w| {
            let base = WindowProfile1D::new(ProfileKind::SmoothBump).eval(w);
            if (2.0..2.2).contains(&w) {
                base + 1e-3
            } else {
                base
            }
        });
    WaveletSpec::from_profiles(vec![leaky.clone(), leaky], 512)
}

pub fn selftest(level: SelftestLevel, fault: Option<Fault>) -> Result<SelftestReport> {
    let w = match fault {
        None => make_wavelet(ProfileKind::SmoothBump, 2)?,
        Some(Fault::Support) => corrupted_wavelet()?,
    };
    selftest_with(level, &w)
}

pub fn selftest_with(level: SelftestLevel, w: &WaveletSpec) -> Result<SelftestReport> {
    let mut checks = vec![
        check_support(w),
        check_endpoints(w),
        check_admissibility(w)?,
        named(
            "proof_bound",
            proof_bound_check(100_000, SEED),
            "1+|ξ|² ≤ 4(1+|τ|²) over 1e5 samples",
        ),
        named(
            "cone_propagation",
            cone_propagation_check(1.25, 5.0, 100_000, SEED)
                && !cone_propagation_check(1.25, 4.9, 100_000, SEED),
            "5/4 → 5 holds, 5/4 → 4.9 fails",
        ),
        check_coverage(w)?,
    ];
    let n = match level {
        SelftestLevel::Fast => 128,
        SelftestLevel::Full => 256,
    };
    checks.extend(check_transform_pair(w, n, level)?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelftestReport {
        level,
        checks,
        passed,
    })
}

fn named(name: &str, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn check_support(w: &WaveletSpec) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = None;
    let outside = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            rng.gen_range(-4.0..SUPPORT_LO)
        } else {
            rng.gen_range(SUPPORT_HI + f64::EPSILON * 4.0..8.0)
        }
    };
    for _ in 0..10_000 {
        let k = rng.gen_range(0..w.n_dims);
        let mut om: Vec<f64> = (0..w.n_dims).map(|_| rng.gen_range(-4.0..8.0)).collect();
        om[k] = outside(&mut rng);
        if w.eval(&om) != 0.0 {
            bad = Some(om);
            break;
        }
    }
    match bad {
        None => named("support", true, "ψ̂ = 0 at 10⁴ points outside [1/2,2]ⁿ"),
        Some(om) => named(
            "support",
            false,
            format!("ψ̂({om:?}) ≠ 0 outside the support"),
        ),
    }
}

fn check_endpoints(w: &WaveletSpec) -> CheckOutcome {
    if !w.admissible_for_theory() {
        return named(
            "endpoint_derivatives",
            true,
            "skipped for the non-smooth test window",
        );
    }
    let ok = (0..w.n_dims).all(|a| {
        let p = w.axis(a);
        p.endpoint_derivatives_vanish(p.smoothness.required_vanishing())
    });
    named(
        "endpoint_derivatives",
        ok,
        "profile derivatives vanish at 1/2 and 2",
    )
}

fn check_admissibility(w: &WaveletSpec) -> Result<CheckOutcome> {
    let a = admissibility_constant(w, 256)?;
    let b = admissibility_constant(w, 512)?;
    let rel = ((b - a) / b).abs();
    Ok(named(
        "admissibility",
        b > 0.0 && b.is_finite() && rel < 1e-6,
        format!("C_ψ = {b:.12}, change 256 → 512 nodes {rel:.2e}"),
    ))
}

fn check_coverage(w: &WaveletSpec) -> Result<CheckOutcome> {
    let sg = SpatialGrid::unit(2, 64)?;
    let fg = crate::grid::FrequencyGrid::real_2d(2.0, 4, 4)?;
    let phi = coverage_values(&sg, &fg, w)?;
    let axes_zero = (0..64).all(|k| phi[k] == 0.0 && phi[k * 64] == 0.0);
    // 1-D box window: coverage inside the band within ln4·(1 ± 1/V)
    let sg1 = SpatialGrid::unit(1, 1024)?;
    let box1 = make_wavelet(ProfileKind::IdealBox, 1)?;
    let v = 4;
    let fg1 = make_frequency_grid(4.0, v, 6, vec![vec![1]])?;
    let phi1 = coverage_values(&sg1, &fg1, &box1)?;
    let nodes = fg1.axis_nodes();
    let ln4 = 4f64.ln();
    let (lo, hi) = (ln4 * (1.0 - 1.0 / v as f64), ln4 * (1.0 + 1.0 / v as f64));
    let band_ok = sg1
        .angular_freqs(0)
        .iter()
        .zip(&phi1)
        .filter(|(t, _)| **t >= 2.0 * nodes[0] && **t <= nodes[nodes.len() - 1] / 2.0)
        .all(|(_, p)| (lo - 1e-12..=hi + 1e-12).contains(p));
    Ok(named(
        "coverage",
        axes_zero && band_ok,
        format!("Φ vanishes on the axes: {axes_zero}; box coverage within ln4(1±1/V): {band_ok}"),
    ))
}

fn check_transform_pair(
    w: &WaveletSpec,
    n: usize,
    level: SelftestLevel,
) -> Result<Vec<CheckOutcome>> {
    let sg = SpatialGrid::unit(2, n)?;
    // modulated Gaussian whose spectrum sits well inside the covered band
    let (sigma, m) = if n == 128 { (0.07, 16.0) } else { (0.06, 20.0) };
    let tau0 = 2.0 * PI * m;
    let f = SampledField::from_fn(sg.clone(), |x| {
        let d2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
        Complex64::from_polar((-d2 / (2.0 * sigma * sigma)).exp(), tau0 * (x[0] + x[1]))
    });
    let (xi_min, k, v) = if n == 128 { (4.0, 5, 4) } else { (3.0, 7, 8) };
    let fg = make_frequency_grid(xi_min, v, k, vec![vec![1, 1]])?;
    let engine = SliceEngine::new(&f, &fg, w)?;
    let phi = coverage_values(&sg, &fg, w)?;
    let (g, lhs) = round_trip_streaming(&engine, w, InverseMode::DiscreteFrame)?;
    let rhs = weighted_spectral_energy(&f, &phi);
    let rel = ((lhs - rhs) / rhs).abs();
    let mut out = vec![named(
        "parseval",
        rel < 1e-10,
        format!("analysis energy vs Σ|f̂|²Φ: relative {rel:.2e}"),
    )];
    let err = g.relative_l2_error(&f);
    out.push(named(
        "reconstruction",
        err < 1e-8,
        format!("discrete-frame inverse relative L² error {err:.2e}"),
    ));
    if level == SelftestLevel::Full {
        let c_rel = ((lhs - w.c_psi() * f.l2_norm_sq()) / (w.c_psi() * f.l2_norm_sq())).abs();
        out.push(named(
            "parseval_c_psi",
            c_rel < 0.02,
            format!("analysis energy vs C_ψ‖f‖²: relative {c_rel:.2e}"),
        ));
        let (g, _) = round_trip_streaming(&engine, w, InverseMode::PaperCpsi)?;
        let err = g.relative_l2_error(&f);
        out.push(named(
            "reconstruction_c_psi",
            err < 1e-2,
            format!("C_ψ-normalized inverse relative L² error {err:.2e}"),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_selftest_passes() {
        let r = selftest(SelftestLevel::Fast, None).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert!(r.into_result().is_ok());
    }

    #[test]
    fn support_fault_is_named() {
        let r = selftest(SelftestLevel::Fast, Some(Fault::Support)).unwrap();
        assert!(!r.passed);
        let err = r.into_result().unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("support"));
    }
}
