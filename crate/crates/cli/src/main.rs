use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use airspiral::config::{self, SpecConfig};
use airspiral::deembed::{self, SpotInductance};
use airspiral::em::{self, QCurve};
use airspiral::explorer;
use airspiral::geometry::{DielectricMode, SpiralSpec};
use airspiral::material::MaterialTable;
use airspiral::mech::{self, FactoredFrame, MechReport, MechSettings, XBeamMode};
use airspiral::network::s_to_y;
use airspiral::report::{self, sci, ElectricalSummary, SpecEcho};
use airspiral::touchstone::parse_touchstone;
use airspiral::Exec;

#[derive(Parser)]
#[command(name = "airspiral", version, about = "Suspended spiral inductor analysis")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Regenerate the synthetic .s2p fixtures into DIR and exit.
    #[arg(long, value_name = "DIR", hide = true)]
    seed_fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Oxide,
    Airgap,
}

#[derive(Clone, Copy, ValueEnum)]
enum XBeamArg {
    On,
    Off,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Electrical analysis: Q curve CSV and JSON summary.
    Analyze {
        spec: PathBuf,
        /// Override the dielectric mode from the spec file.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Report effective inductance at this frequency (GHz).
        #[arg(long)]
        spot_ghz: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Structural analysis: stiffness, shock, resonance and impact force.
    Mech {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        xbeam: XBeamArg,
        /// Deflection limit for the impact force, µm.
        #[arg(long)]
        limit: Option<f64>,
        /// Beam elements per layout segment.
        #[arg(long)]
        elements: Option<usize>,
        /// Also write node displacements under the critical load.
        #[arg(long)]
        dump_displacements: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Parameter sweep with Pareto front.
    Sweep {
        grid: PathBuf,
        /// Separate [constraints] file; overrides the grid file's section.
        constraints: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Open de-embedding of a measured device.
    Deembed {
        complete: PathBuf,
        open: PathBuf,
        #[arg(long)]
        spot_ghz: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Oxide vs air-gap side by side.
    Compare {
        spec: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn out_dir(dir: &Path) -> Result<&Path> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn load_spec(path: &Path, table: &MaterialTable) -> Result<SpecConfig> {
    let text = config::read_file(path)?;
    config::parse_spec(&text, table).with_context(|| format!("{}", path.display()))
}

fn exec() -> Exec {
    Exec::default()
}

fn analyze(spec: PathBuf, mode: Option<ModeArg>, spot_ghz: Option<f64>, out: PathBuf, table: &MaterialTable) -> Result<()> {
    let mut cfg = load_spec(&spec, table)?;
    if let Some(m) = mode {
        cfg.spec.dielectric_mode = match m {
            ModeArg::Oxide => DielectricMode::Oxide,
            ModeArg::Airgap => DielectricMode::Airgap,
        };
    }
    let a = em::analyze(&cfg.spec, &cfg.settings.em, exec())?;
    let summary = ElectricalSummary {
        spec: SpecEcho::from(&cfg.spec),
        l_total: a.l_total(),
        q_max: a.curve.q_max,
        f_peak: a.curve.f_peak,
        spot: spot(&a.curve, spot_ghz),
        pi_model: a.pi,
    };
    let dir = out_dir(&out)?;
    write(dir, "qcurve.csv", &report::qcurve_csv(&a.curve)?)?;
    write(dir, "summary.json", &report::to_json(&summary)?)
}

fn spot(curve: &QCurve, ghz: Option<f64>) -> Option<SpotInductance> {
    ghz.map(|g| {
        let (used, l) = curve.l_at(g * 1e9);
        SpotInductance {
            requested_hz: g * 1e9,
            used_hz: used,
            l_eff: l,
        }
    })
}

#[derive(Serialize)]
struct MechOutput<'a> {
    spec: SpecEcho,
    settings: &'a MechSettings,
    report: &'a MechReport,
}

fn mech_cmd(
    spec: PathBuf,
    xbeam: XBeamArg,
    limit: Option<f64>,
    elements: Option<usize>,
    dump: bool,
    out: PathBuf,
    table: &MaterialTable,
) -> Result<()> {
    let cfg = load_spec(&spec, table)?;
    let mut settings = cfg.settings.mech;
    if let Some(l) = limit {
        if !(l > 0.0) {
            bail!("--limit must be positive");
        }
        settings.deflection_limit = l * 1e-6;
    }
    if let Some(n) = elements {
        if n == 0 {
            bail!("--elements must be at least 1");
        }
        settings.elements_per_segment = n;
    }
    let mode = match xbeam {
        XBeamArg::On => XBeamMode::On,
        XBeamArg::Off => XBeamMode::Off,
        XBeamArg::Both => XBeamMode::Both,
    };
    let r = mech::analyze(&cfg.spec, &settings, mode, exec())?;
    let dir = out_dir(&out)?;
    write(
        dir,
        "mech.json",
        &report::to_json(&MechOutput {
            spec: SpecEcho::from(&cfg.spec),
            settings: &settings,
            report: &r,
        })?,
    )?;
    if dump {
        let cases: &[(bool, &str)] = match mode {
            XBeamMode::Off => &[(false, "displacements_pillar.csv")],
            XBeamMode::On => &[(true, "displacements_xbeam.csv")],
            XBeamMode::Both => &[(false, "displacements_pillar.csv"), (true, "displacements_xbeam.csv")],
        };
        for &(xb, name) in cases {
            write(dir, name, &displacement_csv(&cfg.spec, xb, &settings)?)?;
        }
    }
    Ok(())
}

/// `node_id,x_m,y_m,z_m,uz_m` under the limiting force at the critical node.
fn displacement_csv(spec: &SpiralSpec, xbeam: bool, settings: &MechSettings) -> Result<String> {
    let model = mech::frame_for(spec, xbeam, settings.elements_per_segment)?;
    let hit = mech::max_impact_force(&model, settings.deflection_limit, exec())?;
    let mut f = vec![0.0; model.dof_count()];
    f[6 * hit.critical_node + 2] = hit.force;
    let sol = FactoredFrame::new(&model)?.solve(&f)?;
    let mut s = String::from("node_id,x_m,y_m,z_m,uz_m\n");
    for (i, p) in model.nodes.iter().enumerate() {
        s.push_str(&format!("{i},{},{},{},{}\n", sci(p.x), sci(p.y), sci(p.z), sci(sol.uz(i))));
    }
    Ok(s)
}

fn sweep(grid: PathBuf, constraints: Option<PathBuf>, out: PathBuf, table: &MaterialTable) -> Result<()> {
    let text = config::read_file(&grid)?;
    let mut cfg = config::parse_grid(&text, table).with_context(|| format!("{}", grid.display()))?;
    if let Some(c) = constraints {
        let t = config::read_file(&c)?;
        cfg.constraints = config::parse_constraints(&t).with_context(|| format!("{}", c.display()))?;
    }
    let points = explorer::sweep(&cfg.grid, &cfg.constraints, &cfg.settings, exec());
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} of {} design points failed to evaluate", points.len());
    }
    let front = explorer::pareto_front(&points, &cfg.objectives);
    let dir = out_dir(&out)?;
    write(dir, "sweep.csv", &report::sweep_csv(&points)?)?;
    write(
        dir,
        "pareto.json",
        &report::sweep_json(&points, &front, &cfg.constraints, &cfg.objectives)?,
    )
}

#[derive(Serialize)]
struct DeembedSummary {
    complete: String,
    open: String,
    points: usize,
    q_max: f64,
    f_peak: f64,
    spot: Option<SpotInductance>,
}

fn read_s2p(path: &Path) -> Result<airspiral::network::TwoPortNetwork> {
    let text = config::read_file(path)?;
    let rec = parse_touchstone(&text).with_context(|| format!("{}", path.display()))?;
    Ok(s_to_y(&rec.network()?).with_context(|| format!("{}", path.display()))?)
}

fn deembed_cmd(complete: PathBuf, open: PathBuf, spot_ghz: Option<f64>, out: PathBuf) -> Result<()> {
    let yc = read_s2p(&complete)?;
    let yo = read_s2p(&open)?;
    let dut = deembed::open_deembed(&yc, &yo)?;
    if deembed::is_all_zero(&dut) {
        log::warn!("de-embedded Y is zero at every frequency: complete and open measurements are identical");
    }
    let m = deembed::extract_metrics(&dut, spot_ghz.map(|g| g * 1e9))?;
    let dir = out_dir(&out)?;
    write(dir, "qcurve.csv", &report::qcurve_csv(&m.curve)?)?;
    write(
        dir,
        "summary.json",
        &report::to_json(&DeembedSummary {
            complete: complete.display().to_string(),
            open: open.display().to_string(),
            points: dut.len(),
            q_max: m.q_max,
            f_peak: m.f_peak,
            spot: m.spot,
        })?,
    )
}

#[derive(Serialize)]
struct Column {
    spec: SpecEcho,
    l_total: f64,
    q_max: f64,
    f_peak: f64,
    cox: f64,
}

#[derive(Serialize)]
struct Comparison {
    oxide: Column,
    airgap: Column,
    q_max_ratio: f64,
    f_peak_ratio: f64,
    cox_ratio: f64,
}

fn compare(spec: PathBuf, out: PathBuf, table: &MaterialTable) -> Result<()> {
    let cfg = load_spec(&spec, table)?;
    let run = |mode| -> Result<(SpiralSpec, em::ElectricalAnalysis)> {
        let s = cfg.spec.with_mode(mode);
        let a = em::analyze(&s, &cfg.settings.em, exec())?;
        Ok((s, a))
    };
    let (so, ao) = run(DielectricMode::Oxide)?;
    let (sa, aa) = run(DielectricMode::Airgap)?;
    let col = |s: &SpiralSpec, a: &em::ElectricalAnalysis| Column {
        spec: SpecEcho::from(s),
        l_total: a.l_total(),
        q_max: a.curve.q_max,
        f_peak: a.curve.f_peak,
        cox: a.pi.cox[0] + a.pi.cox[1],
    };
    let c = Comparison {
        q_max_ratio: aa.curve.q_max / ao.curve.q_max,
        f_peak_ratio: aa.curve.f_peak / ao.curve.f_peak,
        cox_ratio: aa.pi.cox[0] / ao.pi.cox[0],
        oxide: col(&so, &ao),
        airgap: col(&sa, &aa),
    };
    // Both curves share the grid; a sample is blank where Q was undefined.
    let mut csv = String::from("freq_hz,q_oxide,q_airgap\n");
    for f in cfg.settings.em.grid.frequencies()? {
        let q = |cv: &QCurve| {
            cv.frequencies
                .iter()
                .position(|&x| x == f)
                .map_or(String::new(), |i| sci(cv.q_values[i]))
        };
        csv.push_str(&format!("{},{},{}\n", sci(f), q(&ao.curve), q(&aa.curve)));
    }
    let dir = out_dir(&out)?;
    write(dir, "compare.csv", &csv)?;
    write(dir, "compare.json", &report::to_json(&c)?)
}

fn seed_fixtures(dir: &Path) -> Result<()> {
    let f = deembed::fixture_set()?;
    let dir = out_dir(dir)?;
    write(dir, "dut.s2p", &f.dut)?;
    write(dir, "open.s2p", &f.open)?;
    write(dir, "complete.s2p", &f.complete)
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        bail!("--threads must be at least 1");
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    #[cfg(not(feature = "parallel"))]
    log::warn!("built without the parallel feature; --threads {n} ignored");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    if let Some(dir) = cli.seed_fixtures {
        return seed_fixtures(&dir);
    }
    let table = MaterialTable::from_env()?;
    match cli.command {
        None => bail!("no command given (analyze, mech, sweep, deembed, compare)"),
        Some(Command::Analyze { spec, mode, spot_ghz, out }) => analyze(spec, mode, spot_ghz, out, &table),
        Some(Command::Mech {
            spec,
            xbeam,
            limit,
            elements,
            dump_displacements,
            out,
        }) => mech_cmd(spec, xbeam, limit, elements, dump_displacements, out, &table),
        Some(Command::Sweep { grid, constraints, out }) => sweep(grid, constraints, out, &table),
        Some(Command::Deembed {
            complete,
            open,
            spot_ghz,
            out,
        }) => deembed_cmd(complete, open, spot_ghz, out),
        Some(Command::Compare { spec, out }) => compare(spec, out, &table),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
