//! Command-line front end.
//!
//! Settings come from an optional `key = value` file (`--config`) and from
//! flags; flags win. Keys use the long flag names, e.g. `mortar-degree = 3`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::geometry::{Continuity, MortarScaling, Pattern};
use crate::verification::cases::CaseId;
use crate::verification::raster::PorosityRaster;
use crate::verification::run::{run, GridKind, LevelResult, Method, RunSpec};
use crate::verification::study::{convergence_study, fit_exponent, pretty_table, to_csv, CSV_HEADER};
use crate::{Error, Result};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "ELASTDD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "elastdd", version, about = "Mortar domain decomposition for mixed elasticity with weak stress symmetry")]
pub struct Cli {
    /// Plain-text `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (overrides the environment).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one level and print its error row.
    Solve(RunArgs),
    /// Refinement ladder with observed rates; with several patterns, an iteration matrix.
    Convergence(RunArgs),
    /// Iteration counts and condition estimates over levels, with fitted exponents.
    Condnum(RunArgs),
    /// Subdomain solve counts with and without the multiscale stress basis.
    MsbCompare(RunArgs),
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// ex1 | ex2 | ex4 | ex5 | patch | rigid (or 1, 2, 4, 5).
    #[arg(long)]
    pub example: Option<String>,
    /// 1 (displacement mortar) or 2 (normal stress, matching grids).
    #[arg(long)]
    pub method: Option<u8>,
    #[arg(long)]
    pub mortar_degree: Option<usize>,
    /// 2h | sqrt | trace | explicit H such as 1/8.
    #[arg(long)]
    pub scaling: Option<String>,
    /// discontinuous | continuous.
    #[arg(long)]
    pub continuity: Option<String>,
    /// legendre | orthonormal | lobatto.
    #[arg(long)]
    pub mortar_basis: Option<String>,
    /// checkerboard | matching.
    #[arg(long)]
    pub grid: Option<String>,
    /// Single level (nominal h = 1 / (4 * 2^level)).
    #[arg(long)]
    pub level: Option<u32>,
    /// Comma-separated levels, e.g. 0,1,2 or 0..4.
    #[arg(long)]
    pub levels: Option<String>,
    /// Subdomain pattern such as 2x2.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Comma-separated patterns for the subdomain sweep.
    #[arg(long)]
    pub patterns: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub msb: bool,
    /// Porosity raster for ex5.
    #[arg(long)]
    pub raster: Option<PathBuf>,
    /// Seed of the synthetic raster used when no raster file is given.
    #[arg(long)]
    pub raster_seed: Option<u64>,
    /// Fine cells per side for ex5.
    #[arg(long)]
    pub fine_cells: Option<usize>,
    /// Mortar configurations for msb-compare, e.g. "2:1/8,3:1/8".
    #[arg(long)]
    pub mortars: Option<String>,
    /// Skip the mortar error (saves two rounds of subdomain solves).
    #[arg(long)]
    pub no_mortar_error: bool,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: RunSpec,
    pub levels: Vec<u32>,
    pub patterns: Vec<Pattern>,
    pub mortars: Vec<(usize, MortarScaling)>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Parse a `key = value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
        out.insert(k.trim().replace('_', "-").to_ascii_lowercase(), v.trim().to_string());
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::Config(format!("{key} = {v}: {e}")))
}

/// `0,1,2` or `0..3` (inclusive).
pub fn parse_levels(s: &str) -> Result<Vec<u32>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u32, u32) = (parse("levels", a.trim())?, parse("levels", b.trim().trim_start_matches('='))?);
        if b < a {
            return Err(Error::Config(format!("empty level range {s}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| parse("levels", t.trim())).collect()
}

/// `2:1/8,3:1/16` -> (degree, scaling) pairs.
pub fn parse_mortars(s: &str) -> Result<Vec<(usize, MortarScaling)>> {
    s.split(',')
        .map(|t| {
            let (d, h) = t.split_once(':').ok_or_else(|| Error::Config(format!("mortar '{t}' must be degree:H")))?;
            Ok((parse("mortars", d.trim())?, h.trim().parse()?))
        })
        .collect()
}

fn merged(args: &RunArgs, file: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    let mut m = file.clone();
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    };
    set("example", args.example.clone());
    set("method", args.method.map(|v| v.to_string()));
    set("mortar-degree", args.mortar_degree.map(|v| v.to_string()));
    set("scaling", args.scaling.clone());
    set("continuity", args.continuity.clone());
    set("mortar-basis", args.mortar_basis.clone());
    set("grid", args.grid.clone());
    set("level", args.level.map(|v| v.to_string()));
    set("levels", args.levels.clone());
    set("pattern", args.pattern.clone());
    set("patterns", args.patterns.clone());
    set("tol", args.tol.map(|v| v.to_string()));
    set("raster", args.raster.as_ref().map(|p| p.display().to_string()));
    set("raster-seed", args.raster_seed.map(|v| v.to_string()));
    set("fine-cells", args.fine_cells.map(|v| v.to_string()));
    set("mortars", args.mortars.clone());
    set("output", args.output.as_ref().map(|p| p.display().to_string()));
    if args.msb {
        m.insert("msb".into(), "true".into());
    }
    if args.no_mortar_error {
        m.insert("mortar-error".into(), "false".into());
    }
    m
}

const KNOWN_KEYS: [&str; 21] = [
    "example", "method", "mortar-degree", "scaling", "continuity", "mortar-basis", "grid", "level", "levels",
    "pattern", "patterns", "tol", "msb", "raster", "raster-seed", "fine-cells", "mortars", "mortar-error",
    "output", "threads", "config",
];

/// Resolve settings from file entries and flags.
pub fn resolve(args: &RunArgs, file: &BTreeMap<String, String>, threads: Option<usize>) -> Result<RunConfig> {
    let m = merged(args, file);
    if let Some(k) = m.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown setting '{k}'")));
    }
    let get = |k: &str| m.get(k).map(String::as_str);
    let mut spec = RunSpec::default();
    if let Some(v) = get("example") {
        spec.case = v.parse()?;
    }
    if spec.case == CaseId::Ex5 {
        spec.pattern = Pattern::square(8);
        spec.scaling = MortarScaling::Explicit(0.125);
        spec.mortar_error = false;
    }
    if let Some(v) = get("method") {
        spec.method = match v {
            "1" => Method::Displacement,
            "2" => Method::NormalStress,
            other => return Err(Error::Config(format!("method must be 1 or 2, got {other}"))),
        };
    }
    if let Some(v) = get("mortar-degree") {
        spec.degree = parse("mortar-degree", v)?;
    }
    if spec.method == Method::Displacement && spec.degree == 0 {
        return Err(Error::Config("mortar-degree must be at least 1".into()));
    }
    if let Some(v) = get("scaling") {
        spec.scaling = v.parse()?;
    }
    if let Some(v) = get("continuity") {
        spec.continuity = match v.to_ascii_lowercase().as_str() {
            "discontinuous" | "dg" => Continuity::Discontinuous,
            "continuous" | "cg" => Continuity::Continuous,
            other => return Err(Error::Config(format!("unknown continuity '{other}'"))),
        };
    }
    if let Some(v) = get("mortar-basis") {
        spec.mortar_basis = v.parse()?;
    }
    if let Some(v) = get("grid") {
        spec.grid = match v.to_ascii_lowercase().as_str() {
            "checkerboard" => GridKind::Checkerboard,
            "matching" => GridKind::Matching,
            other => return Err(Error::Config(format!("unknown grid '{other}'"))),
        };
    }
    if let Some(v) = get("pattern") {
        spec.pattern = v.parse()?;
    }
    if let Some(v) = get("tol") {
        spec.tol = parse("tol", v)?;
        if !(spec.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
    }
    if let Some(v) = get("msb") {
        spec.msb = parse("msb", v)?;
    }
    if let Some(v) = get("mortar-error") {
        spec.mortar_error = parse("mortar-error", v)?;
    }
    if let Some(v) = get("fine-cells") {
        spec.fine_cells = parse("fine-cells", v)?;
    }
    if spec.case == CaseId::Ex5 {
        spec.raster = Some(match get("raster") {
            Some(path) => PorosityRaster::read(Path::new(path))?,
            None => {
                let seed = get("raster-seed").map(|v| parse("raster-seed", v)).transpose()?.unwrap_or(2);
                PorosityRaster::synthetic(spec.fine_cells, spec.fine_cells, seed)
            }
        });
    }
    let levels = match (get("levels"), get("level")) {
        (Some(v), _) => parse_levels(v)?,
        (None, Some(v)) => vec![parse("level", v)?],
        (None, None) => vec![spec.level],
    };
    spec.level = levels[0];
    let patterns = match get("patterns") {
        Some(v) => v.split(',').map(|p| p.trim().parse()).collect::<Result<Vec<Pattern>>>()?,
        None => vec![spec.pattern],
    };
    let mortars = match get("mortars") {
        Some(v) => parse_mortars(v)?,
        None => vec![(spec.degree, spec.scaling)],
    };
    let threads = match threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(parse(THREADS_ENV, &v)?),
            Err(_) => get("threads").map(|v| parse("threads", v)).transpose()?,
        },
    };
    Ok(RunConfig { spec, levels, patterns, mortars, output: get("output").map(PathBuf::from), threads })
}

/// Text written by one command: CSV plus a human-readable table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub table: String,
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<CommandOutput> {
    let r = run(&cfg.spec)?;
    let results = [r];
    let mut table = pretty_table(&results);
    for w in &results[0].warnings {
        let _ = writeln!(table, "warning: {w}");
    }
    Ok(CommandOutput { csv: to_csv(&results), table })
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<CommandOutput> {
    if cfg.patterns.len() > 1 {
        return subdomain_sweep(cfg);
    }
    let results = convergence_study(&cfg.spec, &cfg.levels)?;
    Ok(CommandOutput { csv: to_csv(&results), table: pretty_table(&results) })
}

/// Iteration counts for every `(level, pattern)` pair.
pub fn subdomain_sweep(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut grid: Vec<Vec<LevelResult>> = Vec::new();
    for &level in &cfg.levels {
        let mut row = Vec::new();
        for &p in &cfg.patterns {
            let mut spec = cfg.spec.clone();
            spec.level = level;
            spec.pattern = p;
            spec.mortar_error = false;
            row.push(run(&spec)?);
        }
        grid.push(row);
    }
    let names: Vec<String> = cfg.patterns.iter().map(|p| p.to_string()).collect();
    let mut csv = format!("level,h,{}\n", names.join(","));
    let mut table = format!("{:>7} | {}\n", "h", names.iter().map(|n| format!("{n:>6}")).collect::<Vec<_>>().join(" | "));
    for row in &grid {
        let iters: Vec<String> = row.iter().map(|r| r.cg_iters.to_string()).collect();
        let _ = writeln!(csv, "{},{},{}", row[0].level, row[0].h, iters.join(","));
        let _ = writeln!(
            table,
            "{:>7} | {}",
            format!("1/{}", (1.0 / row[0].h).round()),
            iters.iter().map(|n| format!("{n:>6}")).collect::<Vec<_>>().join(" | ")
        );
    }
    if cfg.patterns.len() > 1 {
        let _ = writeln!(table, "subdomain-size exponent per row (iterations ~ A^p):");
        for row in &grid {
            let area: Vec<f64> = cfg.patterns.iter().map(|p| 1.0 / p.count() as f64).collect();
            let it: Vec<f64> = row.iter().map(|r| r.cg_iters as f64).collect();
            let _ = writeln!(table, "  h = 1/{}: p = {:.2}", (1.0 / row[0].h).round(), fit_exponent(&area, &it));
        }
    }
    if grid.len() > 1 {
        let _ = writeln!(table, "mesh exponent per pattern (iterations ~ h^q):");
        for (k, name) in names.iter().enumerate() {
            let h: Vec<f64> = grid.iter().map(|row| row[k].h).collect();
            let it: Vec<f64> = grid.iter().map(|row| row[k].cg_iters as f64).collect();
            let _ = writeln!(table, "  {name}: q = {:.2}", fit_exponent(&h, &it));
        }
    }
    Ok(CommandOutput { csv, table })
}

pub fn cmd_condnum(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut spec = cfg.spec.clone();
    spec.mortar_error = false;
    let results = convergence_study(&spec, &cfg.levels)?;
    let mut csv = String::from("level,h,cg_iters,cond_est\n");
    let mut table = format!("{:>7} | {:>5} | {:>10}\n", "h", "iter", "cond");
    for r in &results {
        let _ = writeln!(csv, "{},{},{},{}", r.level, r.h, r.cg_iters, r.cond_est);
        let _ = writeln!(table, "{:>7} | {:>5} | {:>10.3E}", format!("1/{}", (1.0 / r.h).round()), r.cg_iters, r.cond_est);
    }
    if results.len() > 1 {
        let h: Vec<f64> = results.iter().map(|r| r.h).collect();
        let it: Vec<f64> = results.iter().map(|r| r.cg_iters as f64).collect();
        let k: Vec<f64> = results.iter().map(|r| r.cond_est).collect();
        let _ = writeln!(table, "iterations ~ h^{:.2}, condition ~ h^{:.2}", fit_exponent(&h, &it), fit_exponent(&h, &k));
    }
    Ok(CommandOutput { csv, table })
}

pub fn cmd_msb_compare(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut csv = String::from("degree,H,local_mortar_dim,cg_iters,solves_no_msb,solves_msb\n");
    let mut table = format!("{:>6} | {:>7} | {:>9} | {:>5} | {:>13} | {:>10}\n", "degree", "H", "dim_local", "iter", "solves no MSB", "solves MSB");
    for &(degree, scaling) in &cfg.mortars {
        let mut spec = cfg.spec.clone();
        spec.degree = degree;
        spec.scaling = scaling;
        spec.mortar_error = false;
        spec.msb = false;
        let plain = run(&spec)?;
        spec.msb = true;
        let msb = run(&spec)?;
        let big_h = if plain.big_h.is_finite() { format!("1/{}", (1.0 / plain.big_h).round()) } else { "trace".into() };
        let _ = writeln!(
            csv,
            "{degree},{},{},{},{},{}",
            plain.big_h, plain.max_local_dim, plain.cg_iters, plain.solves_per_subdomain, msb.solves_per_subdomain
        );
        let _ = writeln!(
            table,
            "{degree:>6} | {big_h:>7} | {:>9} | {:>5} | {:>13} | {:>10}",
            plain.max_local_dim, plain.cg_iters, plain.solves_per_subdomain, msb.solves_per_subdomain
        );
    }
    Ok(CommandOutput { csv, table })
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("threads must be positive".into()));
        }
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.table);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command. CSV goes to the configured output file, or is
/// prepended to the returned table when there is none.
pub fn execute(cli: &Cli) -> Result<CommandOutput> {
    let file = match &cli.config {
        Some(p) => parse_config_file(&std::fs::read_to_string(p)?)?,
        None => BTreeMap::new(),
    };
    let (args, f): (&RunArgs, fn(&RunConfig) -> Result<CommandOutput>) = match &cli.command {
        Command::Solve(a) => (a, cmd_solve),
        Command::Convergence(a) => (a, cmd_convergence),
        Command::Condnum(a) => (a, cmd_condnum),
        Command::MsbCompare(a) => (a, cmd_msb_compare),
    };
    let cfg = resolve(args, &file, cli.threads)?;
    configure_threads(cfg.threads)?;
    let mut out = f(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &out.csv)?,
        None => out.table = format!("{}\n{}", out.csv, out.table),
    }
    Ok(out)
}

/// Header of the error CSV.
pub fn csv_header() -> &'static str {
    CSV_HEADER
}
