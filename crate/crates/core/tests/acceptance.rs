#![allow(clippy::needless_range_loop)]

//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always show up in
//! `cargo test` output. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use puwt_core::harness::config::RunConfig;
use puwt_core::harness::theorem::{theorem_check, QueryReport, TheoremReport};
use puwt_core::microlocal::shell_energy_hormander;
use puwt_core::transform::{coverage_values, round_trip_streaming, weighted_spectral_energy};
use puwt_core::{
    admissibility_constant, cone_propagation_check, forward_transform, generate, local_decay_check,
    make_cutoff, make_frequency_grid, make_wavelet, proof_bound_check, Cone, CutoffSpec, Domain,
    FitOptions, FrequencyGrid, InverseMode, Neighborhood, NormKind, ProfileKind, SampledField,
    SignalSpec, SliceEngine, SpatialGrid,
};

type Outcome = Result<(bool, String), puwt_core::Error>;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Criterion 1

fn admissibility() -> Outcome {
    let one = admissibility_constant(&make_wavelet(ProfileKind::IdealBox, 1)?, 512)?;
    let two = admissibility_constant(&make_wavelet(ProfileKind::IdealBox, 2)?, 512)?;
    let ln4 = 4f64.ln();
    let (r1, r2) = (rel(one, ln4), rel(two, ln4 * ln4));
    Ok((
        r1 <= 1e-6 && r2 <= 1e-6,
        format!("box C_ψ 1-D {one:.12} (rel {r1:.1e}), 2-D {two:.12} (rel {r2:.1e})"),
    ))
}

// Criterion 2

fn fourier_identity() -> Outcome {
    let sg = SpatialGrid::unit(2, 128)?;
    let spec = SignalSpec::PlaneWaveBump {
        modulation: [2.0 * PI * 10.0, 2.0 * PI * 10.0],
        window: CutoffSpec::new([0.5, 0.5], 0.1, 0.3),
    };
    let f = generate(&spec, &sg)?;
    let fg = make_frequency_grid(4.0, 4, 5, vec![vec![1, 1]])?;
    let w = make_wavelet(ProfileKind::SmoothBump, 2)?;
    let vol = forward_transform(&f, &fg, &w)?;
    let fhat = f.spectrum();
    let peak = fhat.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (t0, t1) = (sg.angular_freqs(0), sg.angular_freqs(1));
    let n = sg.samples_per_axis;
    let mut worst = 0.0f64;
    let (mut outside, mut total) = (0.0, 0.0);
    for node in fg.nodes() {
        let s = SampledField::new(sg.clone(), vol.slice(node.index).to_vec(), Domain::Space)?
            .spectrum();
        for r in 0..n {
            for c in 0..n {
                let i = r * n + c;
                let om = [t0[r] / node.xi[0], t1[c] / node.xi[1]];
                let want = fhat.values[i] * w.eval(&om);
                worst = worst.max((s.values[i] - want).norm() / peak);
                let e = s.values[i].norm_sqr();
                total += e;
                if !om.iter().all(|o| (0.5..=2.0).contains(o)) {
                    outside += e;
                }
            }
        }
    }
    let leak = outside / total;
    Ok((
        worst <= 1e-10 && leak <= 1e-24,
        format!("max bin deviation {worst:.1e} of max|f̂|, leakage {leak:.1e}"),
    ))
}

/// Modulated Gaussian whose spectrum sits inside the covered band of
/// `xi_min = 3`, 7 octaves; periodic to machine precision on the unit square.
fn covered_signal() -> puwt_core::Result<SampledField> {
    let sg = SpatialGrid::unit(2, 256)?;
    let (sigma, tau0) = (0.06, 2.0 * PI * 20.0);
    Ok(SampledField::from_fn(sg, |x| {
        let d2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
        Complex64::from_polar((-d2 / (2.0 * sigma * sigma)).exp(), tau0 * (x[0] + x[1]))
    }))
}

// Criterion 3

fn parseval() -> Outcome {
    let w = make_wavelet(ProfileKind::SmoothBump, 2)?;
    let f = covered_signal()?;
    let fg = make_frequency_grid(3.0, 8, 7, vec![vec![1, 1]])?;
    let engine = SliceEngine::new(&f, &fg, &w)?;
    let phi = coverage_values(&f.grid, &fg, &w)?;
    let (_, streamed) = round_trip_streaming(&engine, &w, InverseMode::DiscreteFrame)?;
    let exact = weighted_spectral_energy(&f, &phi);
    let r_exact = rel(streamed, exact);
    // materialized volume on a smaller real signal with Hermitian mirroring
    let sg = SpatialGrid::unit(2, 128)?;
    let g = generate(
        &SignalSpec::Gaussian {
            center: [0.5, 0.5],
            width: 0.05,
            modulation: None,
        },
        &sg,
    )?;
    let fg_real = FrequencyGrid::real_2d(4.0, 4, 5)?;
    let vol = forward_transform(&g, &fg_real, &w)?;
    let r_vol = rel(
        vol.analysis_energy(),
        weighted_spectral_energy(&g, &coverage_values(&sg, &fg_real, &w)?),
    );
    let target = w.c_psi() * f.l2_norm_sq();
    let r_cpsi = rel(streamed, target);
    Ok((
        r_exact <= 1e-10 && r_vol <= 1e-10 && r_cpsi <= 0.02,
        format!("vs Σ|f̂|²Φ: streamed {r_exact:.1e}, volume {r_vol:.1e}; vs C_ψ‖f‖² at V=8: {r_cpsi:.2e}"),
    ))
}

// Criterion 4

fn inversion() -> Outcome {
    let w = make_wavelet(ProfileKind::SmoothBump, 2)?;
    let f = covered_signal()?;
    let mut frame = Vec::new();
    let mut paper = Vec::new();
    for v in [2, 4, 8] {
        let fg = make_frequency_grid(3.0, v, 7, vec![vec![1, 1]])?;
        let engine = SliceEngine::new(&f, &fg, &w)?;
        frame.push(
            round_trip_streaming(&engine, &w, InverseMode::DiscreteFrame)?
                .0
                .relative_l2_error(&f),
        );
        paper.push(
            round_trip_streaming(&engine, &w, InverseMode::PaperCpsi)?
                .0
                .relative_l2_error(&f),
        );
    }
    let monotone = paper.windows(2).all(|p| p[1] < p[0]);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|e| format!("{e:.2e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let ok = frame.iter().all(|&e| e <= 1e-8) && paper[2] <= 1e-2 && monotone;
    Ok((
        ok,
        format!(
            "discrete_frame V=2,4,8 [{}]; paper_cpsi [{}]",
            fmt(&frame),
            fmt(&paper)
        ),
    ))
}

// Criterion 5

fn proof_inequalities() -> Outcome {
    let n = 100_000;
    let bound = proof_bound_check(n, 7);
    let cone = cone_propagation_check(1.25, 5.0, n, 7);
    let control = cone_propagation_check(1.25, 4.9, n, 7);
    Ok((
        bound && cone && !control,
        format!(
            "bound {bound}, 5/4 → 5 {cone}, 5/4 → 4.9 {control} (expected false); {n} samples each"
        ),
    ))
}

// Criterion 6

fn local_property() -> Outcome {
    let sg = SpatialGrid::unit(2, 512)?;
    let f = generate(
        &SignalSpec::Bump {
            window: CutoffSpec::new([0.3, 0.3], 0.05, 0.1),
        },
        &sg,
    )?;
    let x0 = [0.8, 0.8];
    let dist = ((x0[0] - 0.3f64).powi(2) + (x0[1] - 0.3f64).powi(2)).sqrt() - 0.1;
    let u = Neighborhood::new(x0.to_vec(), 0.1, NormKind::Euclidean)?;
    let fg = FrequencyGrid::real_2d(2.0, 4, 8)?;
    let w = make_wavelet(ProfileKind::SmoothBump, 2)?;
    let d = local_decay_check(&f, &u, &fg, &w)?;
    Ok((
        dist >= 0.4 && d.p_hat >= 4.0,
        format!(
            "x0 {dist:.3} from the support, p_hat {:.2} over shells {:?}",
            d.p_hat, d.fit_shells
        ),
    ))
}

// Criterion 7

struct Frozen {
    s: [f64; 5],
    a: [[f64; 3]; 5],
}

// Order: hormander_outer, hormander_inner, pu_outer, pu_inner, f1.
// 512², V = 8, shells 6..8, smooth_bump window; independent numpy run.
const EDGE_A05: Frozen = Frozen {
    s: [
        0.973063340481829,
        0.9313065915909632,
        0.9577840148824205,
        0.9583945375290979,
        0.8903230500668394,
    ],
    a: [
        [
            4.076728981891207e-06,
            1.05122152459054e-06,
            2.745534011888253e-07,
        ],
        [
            3.6305586846520795e-06,
            1.0394536394525094e-06,
            2.7451658285145365e-07,
        ],
        [
            1.5571246814681036e-06,
            4.08305699310409e-07,
            1.0940483543913681e-07,
        ],
        [
            8.856066885560519e-07,
            2.3216014081819565e-07,
            6.211820161762401e-08,
        ],
        [
            2.57815143450274e-06,
            8.008057088676313e-07,
            2.184000068178297e-07,
        ],
    ],
};
const OFF_A05: [[f64; 3]; 3] = [
    [
        1.6221393029324299e-09,
        7.997804332753852e-12,
        1.1366114083331316e-14,
    ],
    [
        7.308888674560723e-10,
        1.4931719521476992e-12,
        2.0892616726161515e-15,
    ],
    [
        1.1498121680615197e-11,
        1.5874257203883813e-15,
        1.90647912288744e-17,
    ],
];
const EDGE_A10: Frozen = Frozen {
    s: [
        1.579956510739489,
        1.498086995540471,
        1.5392351732637544,
        1.492704518247945,
        1.4133799531434716,
    ],
    a: [
        [
            7.938204381652839e-08,
            8.052307840813553e-09,
            9.93722378088235e-10,
        ],
        [
            6.325234236731242e-08,
            7.943081354599388e-09,
            9.935737886119238e-10,
        ],
        [
            3.048924243979849e-08,
            3.3104185135892657e-09,
            4.2729007332615904e-10,
        ],
        [
            1.5245328001386203e-08,
            1.8851163549209395e-09,
            2.430756378068842e-10,
        ],
        [
            3.987000817025584e-08,
            6.068433267398892e-09,
            7.92076776366215e-10,
        ],
    ],
};
const OFF_A10: [[f64; 3]; 3] = [
    [
        6.068476671251229e-11,
        1.0448933916752613e-13,
        7.716150719684957e-17,
    ],
    [
        1.7341861436070374e-11,
        2.0471169335737628e-14,
        1.5170900961361828e-17,
    ],
    [
        5.594840514737144e-13,
        2.347298553221015e-17,
        8.530570236233642e-20,
    ],
];

fn series_a(q: &QueryReport) -> [&[f64]; 5] {
    let s = &q.series;
    [
        &s.hormander_outer.a_j,
        &s.hormander_inner.a_j,
        &s.pu_outer.a_j,
        &s.pu_inner.a_j,
        &s.f1.a_j,
    ]
}

fn energies_match(got: &[f64], want: &[f64]) -> bool {
    got.len() == want.len()
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| (g - w).abs() <= 1e-6 * w.abs() + 1e-22)
}

fn theorem_case(
    file: &str,
    edge_ref: &Frozen,
    off_ref: &[[f64; 3]; 3],
) -> puwt_core::Result<(bool, String, TheoremReport)> {
    let cfg = RunConfig::load(&config(file))?;
    let rep = theorem_check(&cfg)?;
    let edge = rep
        .queries
        .iter()
        .find(|q| q.name == "edge")
        .expect("edge query");
    let off = rep
        .queries
        .iter()
        .find(|q| q.name == "off_edge")
        .expect("off_edge query");
    let s_edge = [
        edge.s_hat_hormander,
        edge.s_hat_hormander_inner,
        edge.s_hat_pu_outer,
        edge.s_hat_pu_inner,
        edge.s_hat_f1,
    ];
    let s_ok = s_edge
        .iter()
        .zip(&edge_ref.s)
        .all(|(g, w)| (g - w).abs() <= 1e-6);
    let a_ok = series_a(edge)
        .iter()
        .zip(&edge_ref.a)
        .all(|(g, w)| energies_match(g, w))
        && series_a(off)[..2]
            .iter()
            .all(|a| a.iter().all(|&v| v == 0.0))
        && series_a(off)[2..]
            .iter()
            .zip(off_ref)
            .all(|(g, w)| energies_match(g, w));
    let verdicts = rep
        .queries
        .iter()
        .all(|q| q.direction_a_pass && q.direction_b_pass);
    let agree = (edge.s_hat_hormander - edge.s_hat_pu_outer).abs() <= cfg.tolerance;
    let sentinel = off.s_hat_hormander.is_infinite() && off.s_hat_pu_outer.is_infinite();
    let off_dist = (1.0 - off.x0[0] - off.x0[1]).abs() / 2f64.sqrt();
    let ok = s_ok && a_ok && verdicts && agree && sentinel && (off_dist - 0.3).abs() < 1e-9;
    let detail = format!(
        "{file}: edge s_horm {:.3} s_pu {:.3} s_f1 {:.3}, verdicts {:?}/{:?}; off-edge ({off_dist:.2} away) {} / {}; oracle match s {s_ok} a_j {a_ok}",
        edge.s_hat_hormander,
        edge.s_hat_pu_outer,
        edge.s_hat_f1,
        edge.direction_a,
        edge.direction_b,
        off.s_hat_hormander,
        off.s_hat_pu_outer,
    );
    Ok((ok, detail, rep))
}

// Criterion 8

fn corpus() -> Vec<(&'static str, SignalSpec)> {
    let diag = [0.5f64.sqrt(), 0.5f64.sqrt()];
    let hp = |alpha| SignalSpec::HalfPlanePower {
        center: [0.5, 0.5],
        normal: diag,
        alpha,
        window: CutoffSpec::new([0.5, 0.5], 0.36, 0.48),
    };
    vec![
        (
            "gaussian",
            SignalSpec::Gaussian {
                center: [0.5, 0.5],
                width: 0.05,
                modulation: None,
            },
        ),
        (
            "plane_wave_bump",
            SignalSpec::PlaneWaveBump {
                modulation: [2.0 * PI * 8.0, 2.0 * PI * 8.0],
                window: CutoffSpec::new([0.5, 0.5], 0.1, 0.3),
            },
        ),
        ("half_plane a=0.5", hp(0.5)),
        ("half_plane a=1.0", hp(1.0)),
        (
            "disk",
            SignalSpec::DiskIndicatorSmoothed {
                disk: CutoffSpec::new([0.5, 0.5], 0.2, 0.25),
            },
        ),
        (
            "bump",
            SignalSpec::Bump {
                window: CutoffSpec::new([0.3, 0.3], 0.05, 0.1),
            },
        ),
    ]
}

fn resolution_equivalence() -> Outcome {
    let coarse = SpatialGrid::unit(2, 256)?;
    let fine = SpatialGrid::unit(2, 512)?;
    // covered shells: 2^{j+1} within a quarter of the coarse Nyquist
    let limit = coarse.nyquist(0) / 4.0;
    let shells: Vec<i32> = (1..12).filter(|&j| 2f64.powi(j + 1) <= limit).collect();
    let cone = Cone::new([1.0, 1.0], 5.0)?;
    let opts = FitOptions::default();
    let mut worst = (0.0f64, String::new());
    let mut compared = 0;
    for (name, spec) in corpus() {
        let energies = |sg: &SpatialGrid| -> puwt_core::Result<Vec<f64>> {
            let f = generate(&spec, sg)?;
            let phi = make_cutoff([0.5, 0.5], 0.05, 0.35, sg)?;
            Ok(shell_energy_hormander(&f, &phi, &cone, &shells, &opts)?.a_j)
        };
        let (a, b) = (energies(&coarse)?, energies(&fine)?);
        let total: f64 = b.iter().sum();
        for ((j, x), y) in shells.iter().zip(&a).zip(&b) {
            if *y <= 1e-12 * total {
                continue;
            }
            compared += 1;
            let r = rel(*x, *y);
            if r > worst.0 {
                worst = (r, format!("{name} j={j}"));
            }
        }
    }
    Ok((
        worst.0 <= 0.05 && compared > 0,
        format!(
            "{compared} shell energies over shells {shells:?}, worst relative gap {:.2e} ({})",
            worst.0, worst.1
        ),
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, bool, String)> = Vec::new();
    let mut record = |id: usize, name: &'static str, out: Outcome, t: Instant| {
        let (ok, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
        let line = format!(
            "{} criterion {id} ({name}): {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        println!("{line}");
        results.push((id, name, ok, line));
    };

    let t = Instant::now();
    record(1, "admissibility", admissibility(), t);
    let t = Instant::now();
    record(2, "fourier identity", fourier_identity(), t);
    let t = Instant::now();
    record(3, "parseval", parseval(), t);
    let t = Instant::now();
    record(4, "inversion", inversion(), t);
    let t = Instant::now();
    record(5, "proof inequalities", proof_inequalities(), t);
    let t = Instant::now();
    record(6, "local property", local_property(), t);

    let t = Instant::now();
    let a05 = theorem_case("theorem_half_plane_a05.json", &EDGE_A05, &OFF_A05);
    let a10 = theorem_case("theorem_half_plane_a10.json", &EDGE_A10, &OFF_A10);
    let first_report = a05.as_ref().ok().map(|r| r.2.clone());
    let theorem = match (a05, a10) {
        (Ok(x), Ok(y)) => Ok((x.0 && y.0, format!("{}; {}", x.1, y.1))),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    record(7, "theorem end-to-end", theorem, t);

    let t = Instant::now();
    record(
        8,
        "estimator resolution equivalence",
        resolution_equivalence(),
        t,
    );

    let t = Instant::now();
    let determinism = (|| -> Outcome {
        let cfg = RunConfig::load(&config("theorem_half_plane_a05.json"))?;
        let again = theorem_check(&cfg)?.to_json()?;
        let first = match &first_report {
            Some(r) => r.to_json()?,
            None => theorem_check(&cfg)?.to_json()?,
        };
        Ok((
            first == again,
            format!(
                "two theorem reports, {} bytes, identical: {}",
                first.len(),
                first == again
            ),
        ))
    })();
    record(9, "determinism", determinism, t);

    let failed: Vec<usize> = results.iter().filter(|r| !r.2).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
