use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use puwt_core::harness::config::RunConfig;
use puwt_core::harness::energy_map::write_energy_map_csv;
use puwt_core::harness::report::{
    ensure_dir, output_path, write_coverage_csv, write_json, write_series_csv,
};
use puwt_core::harness::theorem::{check_query, Verdict};
use puwt_core::harness::{energy_map, selftest, theorem_check, Fault, SelftestLevel};
use puwt_core::io;
use puwt_core::transform::coverage_values;
use puwt_core::{
    coverage_function, forward_transform, generate, inverse_transform, uncovered_energy_fraction,
    CwtVolume, Error, InverseMode, SliceEngine,
};

#[derive(Parser)]
#[command(
    name = "puwt",
    version,
    about = "Per-axis dilation wavelet transform and local Sobolev order checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PaperCpsi,
    DiscreteFrame,
}

impl From<Mode> for InverseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::PaperCpsi => InverseMode::PaperCpsi,
            Mode::DiscreteFrame => InverseMode::DiscreteFrame,
        }
    }
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving every output file
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Forward transform of the configured signal into a PUWV1 volume
    Analyze(Common),
    /// Reconstruct a field from a PUWV1 volume
    Invert {
        #[command(flatten)]
        common: Common,
        /// Volume to invert; defaults to the configured volume name in the output directory
        #[arg(long)]
        volume: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "discrete-frame")]
        mode: Mode,
    },
    /// Shell energy series for each configured query
    Energy(Common),
    /// Sweep of the wavelet-side order over the configured lattice
    EnergyMap(Common),
    /// Compare the two local Sobolev orders at each query
    TheoremCheck(Common),
    /// Coverage function of the frequency grid, with the signal's uncovered fraction
    Coverage(Common),
    /// Run the invariant suites
    Selftest {
        #[arg(long)]
        full: bool,
        /// Corrupt the wavelet before testing (only `support` is available)
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map(Error::exit_code).unwrap_or(3);
            ExitCode::from(code as u8)
        }
    }
}

fn load(common: &Common) -> anyhow::Result<RunConfig> {
    let cfg = RunConfig::load(&common.config)?;
    ensure_dir(&common.out_dir)?;
    Ok(cfg)
}

fn out(common: &Common, name: &str) -> anyhow::Result<PathBuf> {
    Ok(output_path(&common.out_dir, name)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze(c) => analyze(&c),
        Command::Invert {
            common,
            volume,
            mode,
        } => invert(&common, volume.as_deref(), mode.into()),
        Command::Energy(c) => energy(&c),
        Command::EnergyMap(c) => {
            let cfg = load(&c)?;
            let entries = energy_map(&cfg)?;
            let path = out(&c, &cfg.outputs.energy_map)?;
            write_energy_map_csv(&entries, fs::File::create(&path)?)?;
            println!("wrote {} ({} entries)", path.display(), entries.len());
            Ok(())
        }
        Command::TheoremCheck(c) => theorem(&c),
        Command::Coverage(c) => coverage(&c),
        Command::Selftest {
            full,
            inject_fault,
            out_dir,
        } => run_selftest(full, inject_fault.as_deref(), out_dir.as_deref()),
    }
}

fn analyze(c: &Common) -> anyhow::Result<()> {
    let cfg = load(c)?;
    let sg = cfg.spatial_grid()?;
    let fg = cfg.frequency_grid()?;
    let w = cfg.wavelet()?;
    let f = generate(&cfg.signal, &sg)?;
    let vol = forward_transform(&f, &fg, &w)?;
    let field_path = out(c, &cfg.outputs.field)?;
    io::save_field(&field_path, &sg.shape(), &f.values)?;
    let vol_path = out(c, &cfg.outputs.volume)?;
    vol.save(&vol_path)?;
    println!(
        "wrote {} and {} ({} nodes, C_psi = {:.12})",
        field_path.display(),
        vol_path.display(),
        fg.node_count(),
        w.c_psi()
    );
    Ok(())
}

fn invert(c: &Common, volume: Option<&Path>, mode: InverseMode) -> anyhow::Result<()> {
    let cfg = load(c)?;
    let sg = cfg.spatial_grid()?;
    let fg = cfg.frequency_grid()?;
    let w = cfg.wavelet()?;
    let vol_path = match volume {
        Some(p) => p.to_path_buf(),
        None => out(c, &cfg.outputs.volume)?,
    };
    let vol = CwtVolume::load(&vol_path, &sg, &fg)
        .with_context(|| format!("reading {}", vol_path.display()))?;
    let g = inverse_transform(&vol, &w, mode)?;
    let path = out(c, &cfg.outputs.reconstruction)?;
    io::save_field(&path, &sg.shape(), &g.values)?;
    let f = generate(&cfg.signal, &sg)?;
    println!(
        "wrote {} (relative L2 error against the configured signal: {:.3e})",
        path.display(),
        g.relative_l2_error(&f)
    );
    Ok(())
}

fn energy(c: &Common) -> anyhow::Result<()> {
    let cfg = load(c)?;
    if cfg.queries.is_empty() {
        return Err(Error::config("config has no queries").into());
    }
    let sg = cfg.spatial_grid()?;
    let fg = cfg.frequency_grid()?;
    let w = cfg.wavelet()?;
    let f = generate(&cfg.signal, &sg)?;
    let engine = SliceEngine::new(&f, &fg, &w)?;
    for q in &cfg.queries {
        let rep = check_query(&f, &engine, q, &cfg.fit, cfg.tolerance)?;
        let s = &rep.series;
        for (tag, series) in [
            ("hormander_outer", &s.hormander_outer),
            ("hormander_inner", &s.hormander_inner),
            ("pu_outer", &s.pu_outer),
            ("pu_inner", &s.pu_inner),
            ("f1", &s.f1),
        ] {
            write_series_csv(
                &out(c, &format!("energy_{}_{tag}.csv", q.name))?,
                series,
                &cfg.s_grid,
            )?;
        }
        write_json(&out(c, &format!("energy_{}.json", q.name))?, s)?;
        println!("query {}: energies written", q.name);
    }
    Ok(())
}

fn theorem(c: &Common) -> anyhow::Result<()> {
    let cfg = load(c)?;
    let report = theorem_check(&cfg)?;
    let path = out(c, &cfg.outputs.report)?;
    fs::write(&path, report.to_json()?)?;
    let fmt = |v: f64| {
        if v.is_finite() {
            format!("{v:.3}")
        } else {
            "inf".into()
        }
    };
    for q in &report.queries {
        println!(
            "{}: hormander {} / {} (outer/inner), pu {} / {}, f1 {}; direction a {:?}, direction b {:?}",
            q.name,
            fmt(q.s_hat_hormander),
            fmt(q.s_hat_hormander_inner),
            fmt(q.s_hat_pu_outer),
            fmt(q.s_hat_pu_inner),
            fmt(q.s_hat_f1),
            q.direction_a,
            q.direction_b
        );
    }
    println!("wrote {}", path.display());
    let failed: Vec<&str> = report
        .queries
        .iter()
        .filter(|q| q.direction_a == Verdict::Fail || q.direction_b == Verdict::Fail)
        .map(|q| q.name.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(
            Error::invariant("theorem", format!("verdict failed for queries {failed:?}")).into(),
        );
    }
    Ok(())
}

fn coverage(c: &Common) -> anyhow::Result<()> {
    let cfg = load(c)?;
    let sg = cfg.spatial_grid()?;
    let fg = cfg.frequency_grid()?;
    let w = cfg.wavelet()?;
    let phi = coverage_values(&sg, &fg, &w)?;
    let path = out(c, &cfg.outputs.coverage)?;
    write_coverage_csv(&path, &sg, &phi)?;
    let f = generate(&cfg.signal, &sg)?;
    let phi_field = coverage_function(&fg, &w, &sg)?;
    let frac = uncovered_energy_fraction(&f, &phi_field, w.c_psi())?;
    let summary = serde_json::json!({
        "c_psi": w.c_psi(),
        "max_phi": phi.iter().cloned().fold(0.0, f64::max),
        "uncovered_energy_fraction": frac,
    });
    write_json(&out(c, "coverage.json")?, &summary)?;
    println!(
        "wrote {}; uncovered energy fraction {frac:.3e}",
        path.display()
    );
    Ok(())
}

fn run_selftest(full: bool, fault: Option<&str>, out_dir: Option<&Path>) -> anyhow::Result<()> {
    let level = if full {
        SelftestLevel::Full
    } else {
        SelftestLevel::Fast
    };
    let fault: Option<Fault> = fault.map(str::parse).transpose()?;
    let report = selftest(level, fault)?;
    for c in &report.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        write_json(&dir.join("selftest.json"), &report)?;
    }
    report.into_result()?;
    Ok(())
}
