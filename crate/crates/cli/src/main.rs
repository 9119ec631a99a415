mod presets;
mod seeds;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use svlogic::analysis::{SwitchReport, WiringModel};
use svlogic::devices::{load_config, Device, DeviceConfig};
use svlogic::transient::{run_transient, TransientParams};

use presets::Preset;

#[derive(Parser)]
#[command(name = "svlogic", version, about = "Spin-valve logic transient simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one transient and write its trace, report and resolved config.
    Run {
        /// INI config; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Apply a preset's fixed settings and its first sweep point.
        #[arg(long)]
        preset: Option<String>,
        /// Override one key, e.g. `--set drive.current=-200uA`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Temperature in K.
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Run every point of a preset, `--seeds` times each.
    Sweep {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Repetitions per point.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// List the built-in presets.
    ListPresets,
}

/// Failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn config(msg: impl ToString) -> Self {
        Failure { code: 2, msg: msg.to_string() }
    }
    fn physics(msg: impl ToString) -> Self {
        Failure { code: 3, msg: msg.to_string() }
    }
    fn io(msg: impl ToString) -> Self {
        Failure { code: 1, msg: msg.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            preset,
            set,
            out,
            seed,
            temperature,
        } => cmd_run(config.as_deref(), preset.as_deref(), &set, &out, seed, temperature),
        Command::Sweep {
            preset,
            out,
            jobs,
            seeds,
            master_seed,
            config,
            set,
            temperature,
        } => cmd_sweep(&preset, &out, jobs, seeds, master_seed, config.as_deref(), &set, temperature),
        Command::ListPresets => {
            for p in presets::all() {
                println!("{:<26} {:<8} {:>3} points  {}", p.name, p.anchor, p.points().len(), p.description);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn base_config(path: Option<&Path>) -> Result<DeviceConfig, Failure> {
    match path {
        Some(p) => load_config(p).map_err(|e| Failure::config(format!("{}: {e}", p.display()))),
        None => Ok(DeviceConfig::default()),
    }
}

fn parse_sets(set: &[String]) -> Result<Vec<(String, String)>, Failure> {
    set.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::config(format!("`--set {s}`: expected KEY=VALUE")))
        })
        .collect()
}

fn apply(cfg: &mut DeviceConfig, overrides: &[(String, String)]) -> Result<(), Failure> {
    for (k, v) in overrides {
        cfg.set(k, v).map_err(Failure::config)?;
    }
    Ok(())
}

fn find_preset(name: &str) -> Result<Preset, Failure> {
    presets::find(name).ok_or_else(|| {
        let names: Vec<&str> = presets::all().iter().map(|p| p.name).collect();
        Failure::config(format!("unknown preset `{name}` (known: {})", names.join(", ")))
    })
}

/// Write `bytes` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| Failure::io(format!("{}: {e}", tmp.display())))?;
    f.write_all(bytes)
        .and_then(|_| f.sync_all())
        .map_err(|e| Failure::io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

struct RunFiles {
    trace: PathBuf,
    report: PathBuf,
    config: PathBuf,
}

/// Simulate `cfg` and write `<stem>.trace.csv`, `<stem>.report.csv` and
/// `<stem>.ini` into `dir`.
fn simulate(cfg: &DeviceConfig, dir: &Path, stem: &str) -> Result<(RunFiles, SwitchReport), Failure> {
    let mut device = Device::build(cfg).map_err(Failure::config)?;
    let trace = run_transient(&mut device, &TransientParams::from_config(cfg)).map_err(Failure::physics)?;
    let report = SwitchReport::from_run(&device, &trace, 0.9, &WiringModel::default());
    let files = RunFiles {
        trace: dir.join(format!("{stem}.trace.csv")),
        report: dir.join(format!("{stem}.report.csv")),
        config: dir.join(format!("{stem}.ini")),
    };
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).map_err(Failure::io)?;
    write_atomic(&files.trace, &buf)?;
    buf.clear();
    report.write_csv(&mut buf).map_err(Failure::io)?;
    write_atomic(&files.report, &buf)?;
    write_atomic(&files.config, cfg.to_ini_string().as_bytes())?;
    Ok((files, report))
}

fn cmd_run(
    config: Option<&Path>,
    preset: Option<&str>,
    set: &[String],
    out: &Path,
    seed: Option<u64>,
    temperature: Option<f64>,
) -> Result<(), Failure> {
    let mut cfg = base_config(config)?;
    if let Some(name) = preset {
        let p = find_preset(name)?;
        apply(&mut cfg, &p.fixed)?;
        if let Some(first) = p.points().first() {
            for v in first {
                apply(&mut cfg, &v.overrides)?;
            }
        }
    }
    apply(&mut cfg, &parse_sets(set)?)?;
    if let Some(s) = seed {
        cfg.sim.seed = s;
    }
    if let Some(t) = temperature {
        cfg.sim.temperature = t;
    }
    cfg.validate().map_err(Failure::config)?;
    fs::create_dir_all(out).map_err(|e| Failure::io(format!("{}: {e}", out.display())))?;
    let (files, report) = simulate(&cfg, out, "run")?;
    println!("{}", report.summary());
    println!("{}", files.trace.display());
    println!("{}", files.report.display());
    Ok(())
}

/// One planned sweep run.
struct Job {
    stem: String,
    labels: Vec<String>,
    point: String,
    repetition: u64,
    config: DeviceConfig,
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        let c = if c.is_ascii_alphanumeric() || "=.+-".contains(c) { c } else { '_' };
        if !(c == '_' && out.ends_with('_')) {
            out.push(c);
        }
    }
    out.trim_matches('_').to_string()
}

fn plan(
    preset: &Preset,
    base: &DeviceConfig,
    sets: &[(String, String)],
    temperature: Option<f64>,
    seeds: u64,
    master: u64,
) -> Result<Vec<Job>, Failure> {
    let mut jobs = Vec::new();
    for point in preset.points() {
        let overrides: Vec<&(String, String)> = point.iter().flat_map(|v| &v.overrides).collect();
        let canonical = overrides
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let name = if point.is_empty() {
            preset.name.to_string()
        } else {
            point
                .iter()
                .zip(&preset.axes)
                .map(|(v, a)| slug(&format!("{}={}", a.name, v.label)))
                .collect::<Vec<_>>()
                .join("_")
        };
        for rep in 0..seeds {
            let mut cfg = base.clone();
            apply(&mut cfg, &preset.fixed)?;
            for (k, v) in &overrides {
                cfg.set(k, v).map_err(Failure::config)?;
            }
            apply(&mut cfg, sets)?;
            if let Some(t) = temperature {
                cfg.sim.temperature = t;
            }
            cfg.sim.seed = seeds::run_seed(master, &canonical, rep);
            cfg.validate().map_err(Failure::config)?;
            jobs.push(Job {
                stem: format!("{name}-r{rep}"),
                labels: point.iter().map(|v| v.label.clone()).collect(),
                point: canonical.clone(),
                repetition: rep,
                config: cfg,
            });
        }
    }
    Ok(jobs)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    preset: &str,
    out: &Path,
    jobs: usize,
    seeds: u64,
    master: u64,
    config: Option<&Path>,
    set: &[String],
    temperature: Option<f64>,
) -> Result<(), Failure> {
    let preset = find_preset(preset)?;
    if seeds == 0 {
        return Err(Failure::config("--seeds must be at least 1"));
    }
    let base = base_config(config)?;
    let planned = plan(&preset, &base, &parse_sets(set)?, temperature, seeds, master)?;
    fs::create_dir_all(out).map_err(|e| Failure::io(format!("{}: {e}", out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(Failure::io)?;
    let results: Vec<Result<(RunFiles, SwitchReport), Failure>> = pool.install(|| {
        planned
            .par_iter()
            .map(|job| {
                let r = simulate(&job.config, out, &job.stem);
                match &r {
                    Ok((_, rep)) => eprintln!("{}: {}", job.stem, rep.summary()),
                    Err(f) => eprintln!("{}: error: {}", job.stem, f.msg),
                }
                r
            })
            .collect()
    });

    let axis_names: Vec<String> = preset.axes.iter().map(|a| a.name.clone()).collect();
    let mut manifest = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["run".to_string(), "preset".into(), "repetition".into(), "seed".into()];
    header.extend(axis_names.iter().cloned());
    header.extend(["point", "trace", "report", "config"].map(String::from));
    header.extend(SwitchReport::CSV_HEADER.split(',').map(String::from));
    manifest.write_record(&header).map_err(Failure::io)?;
    let mut failed = 0;
    for (job, r) in planned.iter().zip(&results) {
        let Ok((files, report)) = r else {
            failed += 1;
            continue;
        };
        let mut row = vec![
            job.stem.clone(),
            preset.name.to_string(),
            job.repetition.to_string(),
            job.config.sim.seed.to_string(),
        ];
        row.extend(job.labels.iter().cloned());
        row.push(job.point.clone());
        row.extend([file_name(&files.trace), file_name(&files.report), file_name(&files.config)]);
        row.extend(report.csv_row().split(',').map(String::from));
        manifest.write_record(&row).map_err(Failure::io)?;
    }
    let bytes = manifest.into_inner().map_err(|e| Failure::io(e.to_string()))?;
    write_atomic(&out.join("manifest.csv"), &bytes)?;

    println!("{} ({}): {} runs", preset.name, preset.anchor, planned.len());
    for (job, r) in planned.iter().zip(&results) {
        if let Ok((_, report)) = r {
            println!("  {:<40} {}", job.stem, report.summary());
        }
    }
    if failed > 0 {
        let first = results.into_iter().find_map(Result::err).expect("a failure");
        return Err(Failure {
            code: first.code,
            msg: format!("{failed} of {} runs failed; first: {}", planned.len(), first.msg),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("device=SV (40nm, 20nm)"), "device=SV_40nm_20nm");
        assert_eq!(slug("drive.current=-200uA"), "drive.current=-200uA");
    }

    #[test]
    fn adding_points_keeps_existing_seeds() {
        let base = DeviceConfig::default();
        let p = presets::find("fig7-current").unwrap();
        let before = plan(&p, &base, &[], None, 2, 9).unwrap();
        let mut bigger = p.clone();
        let extra = presets::AxisValue {
            label: "300uA".into(),
            overrides: vec![("drive.current".into(), "300uA".into())],
        };
        bigger.axes[0].values.insert(0, extra);
        let after = plan(&bigger, &base, &[], None, 3, 9).unwrap();
        for j in &before {
            let k = after.iter().find(|k| k.stem == j.stem).unwrap();
            assert_eq!(k.config.sim.seed, j.config.sim.seed);
        }
        assert_eq!(after.len(), 15);
    }
}
