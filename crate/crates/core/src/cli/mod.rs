//! Command-line front end.

pub mod modelfile;
pub mod svg;

use crate::dynsys::{builtin, builtin_names, fixture, make_system, ModelError, VectorField};
use crate::equilibria::{find_equilibria, SearchBox};
use crate::flow::{analyze_flow, basin_map};
use crate::region::{builtin_region, Region, RegionError};
use crate::verifier::{analyze, sweep, RegionSource, Status, VerifyOptions};
use clap::{Parser, Subcommand};
use modelfile::{ModelFile, ModelFileError, RegionSpec};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    ModelFile(#[from] ModelFileError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("{0}")]
    Analysis(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Model(_) | CliError::ModelFile(_) | CliError::Region(_) => 2,
            CliError::Analysis(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bistable", version, about = "Bistability analysis of planar and scalar ODE models")]
struct Cli {
    /// Seed for every random draw; defaults to 42.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override a parameter, e.g. --set K=4 (repeatable).
    #[arg(long = "set", global = true, value_name = "NAME=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List builtin models.
    Models,
    /// Table of equilibria with their classes.
    Equilibria { model: String },
    /// Draw a phase portrait.
    Portrait {
        model: String,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value_t = 12)]
        trajectories: usize,
        /// Shade basins on an N×N grid.
        #[arg(long, value_name = "N")]
        basins: Option<usize>,
        #[arg(long)]
        no_nullclines: bool,
    },
    /// Run every check and print a summary; optionally write JSON.
    Verify {
        model: String,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write saddle branches as `branch_id,t,x,y`.
        #[arg(long)]
        separatrix: Option<PathBuf>,
    },
    /// Label a grid of initial conditions by attractor.
    Basin {
        model: String,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Repeat the analysis over parameter values.
    Sweep {
        model: String,
        #[arg(long)]
        param: String,
        /// Comma-separated increasing values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

struct Loaded {
    field: VectorField,
    region: Region,
    builtin_region: bool,
    search: SearchBox,
    opts: VerifyOptions,
}

fn parse_sets(sets: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    sets.iter()
        .map(|s| {
            let (n, v) = s
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects NAME=VALUE, got `{s}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--set {n}: `{v}` is not a number")))?;
            Ok((n.trim().to_string(), v))
        })
        .collect()
}

fn looks_like_path(s: &str) -> bool {
    s.contains('/') || s.contains('\\') || s.contains('.') || Path::new(s).is_file()
}

fn load(model: &str, sets: &[String], seed: Option<u64>) -> Result<Loaded, CliError> {
    let overrides = parse_sets(sets)?;
    let mut opts = VerifyOptions::default();
    let (field, region_spec) = if looks_like_path(model) {
        let text = std::fs::read_to_string(model)
            .map_err(|e| CliError::Usage(format!("cannot read model file {model}: {e}")))?;
        let file = ModelFile::parse(&text)?;
        let a = &file.analysis;
        let f = &mut opts.flow;
        f.tol = a.tol.unwrap_or(f.tol);
        f.t_max = a.t_max.unwrap_or(f.t_max);
        f.eq_grid = a.grid.unwrap_or(f.eq_grid);
        f.boundary_samples = a.boundary_samples.unwrap_or(f.boundary_samples);
        f.rays = a.rays.unwrap_or(f.rays);
        f.cycle_scan = a.cycle_scan.unwrap_or(f.cycle_scan);
        opts.side_samples = a.side_samples.unwrap_or(opts.side_samples);
        opts.seed = a.seed.unwrap_or(opts.seed);
        let field = make_system(file.model)?.with_params(&overrides)?;
        (field, file.region)
    } else {
        (builtin(model, &overrides)?, RegionSpec::Builtin)
    };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let region = match &region_spec {
        RegionSpec::Builtin => builtin_region(&field)?,
        RegionSpec::Polygon(v) => Region::polygon(field.name(), v.clone())?,
        RegionSpec::Interval(lo, hi) => Region::interval(field.name(), *lo, *hi)?,
        RegionSpec::Circle { center, radius } => Region::circle(field.name(), *center, *radius, 256),
    };
    if region.dim() != field.dim() {
        return Err(CliError::Usage(format!(
            "region is {}-dimensional but the model has {} states",
            region.dim(),
            field.dim()
        )));
    }
    let search = match fixture(field.name()) {
        Ok(fx) if region_spec == RegionSpec::Builtin => SearchBox::new(fx.search_box.0, fx.search_box.1),
        _ => {
            let (lo, hi) = region.bbox();
            let pad = 0.02 * region.diameter();
            SearchBox::new([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad])
        }
    };
    Ok(Loaded {
        field,
        region,
        builtin_region: region_spec == RegionSpec::Builtin,
        search,
        opts,
    })
}

fn eigen_text(ev: &[num_complex::Complex64]) -> String {
    ev.iter()
        .map(|z| {
            if z.im == 0.0 {
                format!("{:.6}", z.re)
            } else {
                format!("{:.6}{:+.6}i", z.re, z.im)
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

/// Parse `argv` (program name first) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Same as [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let w = |out: &mut dyn Write, s: String| {
        let _ = out.write_all(s.as_bytes());
    };
    match cli.command {
        Command::Models => {
            for name in builtin_names() {
                let fx = fixture(name)?;
                let tag = if fx.synthetic { " [synthetic]" } else { "" };
                w(out, format!("{name:<16} {}-d  {}{tag}\n", fx.states.len(), fx.summary));
            }
            Ok(0)
        }
        Command::Equilibria { model } => {
            let l = load(&model, &cli.set, cli.seed)?;
            let found = find_equilibria(&l.field, &l.search, [l.opts.flow.eq_grid; 2]);
            let dim = l.field.dim();
            let names = l.field.states().to_vec();
            let mut head = String::new();
            for n in &names {
                head.push_str(&format!("{n:>20} "));
            }
            w(out, format!("{head} {:<34} class          unstable  in_region\n", "eigenvalues"));
            for e in &found.equilibria {
                let mut row = String::new();
                for k in 0..dim {
                    row.push_str(&format!("{:>20.12} ", e.point[k]));
                }
                w(
                    out,
                    format!(
                        "{row} {:<34} {:<14} {:>8}  {}\n",
                        eigen_text(&e.eigenvalues),
                        e.class.name(),
                        e.unstable_dim,
                        if l.region.signed_distance(&e.point) <= 1e-9 * l.region.diameter().max(1.0) {
                            "yes"
                        } else {
                            "no"
                        }
                    ),
                );
            }
            for d in &found.degenerate {
                w(out, format!("# degenerate zero near {d:?}\n"));
            }
            Ok(0)
        }
        Command::Portrait {
            model,
            svg: path,
            trajectories,
            basins,
            no_nullclines,
        } => {
            let l = load(&model, &cli.set, cli.seed)?;
            let fs = analyze_flow(&l.field, &l.region, &l.opts.flow).map_err(|e| CliError::Analysis(e.to_string()))?;
            let opts = svg::PortraitOptions {
                trajectories,
                nullclines: !no_nullclines,
                basins,
            };
            let text = svg::render_portrait(&l.field, &l.region, &fs, &opts);
            write_atomic(&path, &text)?;
            w(
                out,
                format!(
                    "wrote {} ({} equilibria, {trajectories} trajectories, seed {})\n",
                    path.display(),
                    fs.equilibria.len(),
                    l.opts.seed
                ),
            );
            Ok(0)
        }
        Command::Verify {
            model,
            json,
            separatrix,
        } => {
            let l = load(&model, &cli.set, cli.seed)?;
            let report = analyze(&l.field, &l.region, &l.opts);
            w(
                out,
                format!(
                    "model {}  region {} ({})  seed {}  case {}\n",
                    report.model.name,
                    report.region.name,
                    report.region.certification,
                    report.seed,
                    serde_json::to_string(&report.case).unwrap_or_default().trim_matches('"')
                ),
            );
            for c in &report.checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Inapplicable => "n/a ",
                };
                w(out, format!("{tag} {:<4} {:<24} {}\n", c.id, c.name, c.evidence));
            }
            if let Some(p) = json {
                write_atomic(&p, &report.to_json())?;
            }
            if let Some(p) = separatrix {
                let fs = analyze_flow(&l.field, &l.region, &l.opts.flow)
                    .map_err(|e| CliError::Analysis(e.to_string()))?;
                write_atomic(&p, &fs.separatrix_csv())?;
            }
            Ok(if report.all_applicable_pass() { 0 } else { 1 })
        }
        Command::Basin { model, grid, csv } => {
            let l = load(&model, &cli.set, cli.seed)?;
            let fs = analyze_flow(&l.field, &l.region, &l.opts.flow).map_err(|e| CliError::Analysis(e.to_string()))?;
            if fs.attractors.len() < 2 {
                return Err(CliError::Analysis(format!(
                    "basin map needs at least two attractors, found {}",
                    fs.attractors.len()
                )));
            }
            let map = basin_map(&l.field, &l.region, &fs, grid);
            for (label, n) in &map.counts {
                w(out, format!("label {label:>3}: {n} cells\n"));
            }
            w(
                out,
                format!(
                    "seed {}; undecided fraction {:.4}; boundary transitions {}\n",
                    l.opts.seed, map.bottom_fraction, map.boundary_transitions
                ),
            );
            if let Some(p) = csv {
                write_atomic(&p, &map.to_csv())?;
            }
            Ok(0)
        }
        Command::Sweep {
            model,
            param,
            values,
            csv,
        } => {
            let l = load(&model, &cli.set, cli.seed)?;
            let vals: Vec<f64> = values
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("--values: `{s}` is not a number")))
                })
                .collect::<Result<_, _>>()?;
            let source = if l.builtin_region {
                RegionSource::Builtin
            } else {
                RegionSource::Fixed(l.region.clone())
            };
            let rows = sweep(&l.field, &param, &vals, &source, &l.opts).map_err(|e| match e {
                crate::verifier::VerifyError::Unordered => CliError::Usage(e.to_string()),
                other => CliError::Analysis(other.to_string()),
            })?;
            let mut table = String::from("value,attractors,cycles,loop,passed,failed,changed,equilibria\n");
            for r in &rows {
                table.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.value,
                    r.attractors,
                    r.cycle_attractors,
                    r.loop_present,
                    r.passed,
                    r.failed,
                    r.changed,
                    r.error.clone().unwrap_or_else(|| r.equilibria.join(" "))
                ));
            }
            w(out, table.clone());
            if let Some(p) = csv {
                write_atomic(&p, &table)?;
            }
            Ok(0)
        }
    }
}
