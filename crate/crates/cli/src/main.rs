//! `qdchain` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration / usage error, 2 numerical
//! failure, 3 nothing detected.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qdchain::analysis::{
    find_factorization, fit_exponential_plus_constant, fit_factorization_law, fit_log_linear, fit_power_law,
    locate_extremum, numerical_derivative, Extremum, FitModel, FitResult,
};
use qdchain::config::ConfigMap;
use qdchain::correlations::analyze;
use qdchain::family::{family_states, FamilySettings, StateFamily};
use qdchain::sweep::{read_table, run_sweep, to_csv_string, to_json_string, Format, Selection, SweepConfig, SweepTable};
use qdchain::witness::{witness, WitnessProfile, CLASSICALITY_TOL};
use qdchain::{critical_field, factorizing_field, Boundary, Error, ErrorKind, ModelPreset};

#[derive(Parser)]
#[command(name = "qdchain", version, about = "Quantum discord and witnesses in spin-1/2 chain ground states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and emit one row per (L, h, r, family).
    Sweep(SweepArgs),
    /// Numerical h-derivative of a column, optionally with its extremum per series.
    Derive(DeriveArgs),
    /// Least-squares fit of tabulated data.
    Fit(FitArgs),
    /// Detect factorization crossings, critical extrema or witness zeros.
    Detect(DetectArgs),
    /// Full correlation report for single parameter points (JSON).
    Report(ReportArgs),
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// Config file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// xy, ising, xxz, xyx or custom.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Chain sizes, comma separated.
    #[arg(long)]
    sites: Option<String>,
    #[arg(long)]
    hx: Option<f64>,
    /// thermal, broken, closed_form (comma separated).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rmax: Option<usize>,
    /// Field grid: values and `start:stop:step` ranges, comma separated.
    #[arg(long)]
    hgrid: Option<String>,
    #[arg(long)]
    boundary: Option<String>,
    #[arg(long)]
    convention: Option<String>,
    /// discord, symmetric_discord, concurrence, witness, correlators, energy.
    #[arg(long)]
    observables: Option<String>,
}

impl ModelArgs {
    /// Config file overlaid with the explicit flags.
    fn config_map(&self) -> anyhow::Result<ConfigMap> {
        let mut map = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                ConfigMap::parse(&text)?
            }
            None => ConfigMap::default(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.set(k, v);
            }
        };
        set("preset", self.preset.clone());
        set("gamma", self.gamma.map(|v| v.to_string()));
        set("delta", self.delta.map(|v| v.to_string()));
        set("n_sites", self.sites.clone());
        set("hx", self.hx.map(|v| v.to_string()));
        set("family", self.family.clone());
        set("rmax", self.rmax.map(|v| v.to_string()));
        set("hgrid", self.hgrid.clone());
        set("boundary", self.boundary.clone());
        set("convention", self.convention.clone());
        set("observables", self.observables.clone());
        Ok(map)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

impl OutputArgs {
    fn format(&self) -> anyhow::Result<Format> {
        Ok(self.format.parse::<Format>().map_err(Error::Config)?)
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Clone, Default)]
struct SelectArgs {
    /// Sweep table (CSV or JSON) written by `sweep`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    family: Option<String>,
    /// Keep only this chain size.
    #[arg(long)]
    sites: Option<usize>,
    /// Keep only this distance.
    #[arg(long)]
    r: Option<usize>,
}

impl SelectArgs {
    fn load(&self) -> anyhow::Result<SweepTable> {
        let text = fs::read_to_string(&self.input).map_err(|e| Error::Io(format!("{}: {e}", self.input.display())))?;
        Ok(read_table(&text)?)
    }

    fn selection(&self) -> anyhow::Result<Selection> {
        Ok(Selection {
            family: self.family.as_deref().map(|f| f.parse::<StateFamily>().map_err(Error::Config)).transpose()?,
            n_sites: self.sites,
            r: self.r,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtremumArg {
    Min,
    Max,
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    select: SelectArgs,
    /// Column to differentiate.
    #[arg(long, default_value = "discord")]
    column: String,
    /// Report the extremum of each derivative series instead of the series.
    #[arg(long, value_enum)]
    extremum: Option<ExtremumArg>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FitArgs {
    /// Table with a header row (CSV, `#` comments allowed) or a sweep JSON.
    #[arg(long)]
    input: PathBuf,
    /// log_linear, power_law, exponential_plus_constant, quadratic_factorization.
    #[arg(long)]
    model: String,
    #[arg(long, default_value = "n_sites")]
    x: String,
    #[arg(long, default_value = "value")]
    y: String,
    /// Row filters `column=value`, repeatable.
    #[arg(long = "where")]
    filters: Vec<String>,
    /// Factorizing field for quadratic_factorization (default: from the gamma column).
    #[arg(long)]
    hf: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    window: f64,
    /// Discord values at or below this are ignored by quadratic_factorization.
    #[arg(long, default_value_t = 1e-13)]
    floor: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectKind {
    /// Crossings of Q(h; r) curves.
    Factorization,
    /// Extremum of dC/dh (or --column) per chain size.
    Critical,
    /// Zeros of the witness norm.
    Classical,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(value_enum)]
    kind: DetectKind,
    #[command(flatten)]
    select: SelectArgs,
    #[arg(long)]
    column: Option<String>,
    /// Search window `lo,hi` for crossings.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Skip the two-sided discord.
    #[arg(long)]
    fast: bool,
}

fn write_records(header: &[&str], rows: &[Vec<String>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for r in rows {
                s.push_str(&r.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let list: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let m: serde_json::Map<String, serde_json::Value> = header
                        .iter()
                        .zip(r)
                        .map(|(k, v)| {
                            let val = v.parse::<f64>().map(|x| json!(x)).unwrap_or_else(|_| json!(v));
                            (k.to_string(), val)
                        })
                        .collect();
                    serde_json::Value::Object(m)
                })
                .collect();
            serde_json::to_string_pretty(&list).expect("serializable") + "\n"
        }
    }
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "null".into())
}

/// Distinct (family, L, r) groups of the selected rows.
fn groups(table: &SweepTable, sel: &Selection) -> Vec<Selection> {
    let mut keys: Vec<(StateFamily, Option<usize>, usize)> =
        table.rows.iter().filter(|r| sel.matches(r)).map(|r| (r.family, r.n_sites, r.r)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().map(|(family, n_sites, r)| Selection { family: Some(family), n_sites, r: Some(r) }).collect()
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let cfg = SweepConfig::from_config(&args.model.config_map()?)?;
    let rows = run_sweep(&cfg)?;
    let table = SweepTable::new(&cfg, rows);
    let text = match args.output.format()? {
        Format::Csv => to_csv_string(&table),
        Format::Json => to_json_string(&table),
    };
    args.output.emit(&text)
}

fn cmd_derive(args: &DeriveArgs) -> anyhow::Result<()> {
    let table = args.select.load()?;
    let sel = args.select.selection()?;
    let mut out = Vec::new();
    let header: &[&str] = if args.extremum.is_some() {
        &["family", "n_sites", "r", "h", "value", "step"]
    } else {
        &["family", "n_sites", "r", "h", "value", "derivative", "step"]
    };
    for g in groups(&table, &sel) {
        let s = qdchain::sweep::series(&table.rows, &g, &args.column);
        if s.is_empty() {
            continue;
        }
        let d = numerical_derivative(&s)?;
        let tag = |row: &mut Vec<String>| {
            row.push(g.family.map(|x| x.to_string()).unwrap_or_default());
            row.push(opt(g.n_sites));
            row.push(opt(g.r));
        };
        match args.extremum {
            Some(kind) => {
                let kind = match kind {
                    ExtremumArg::Min => Extremum::Min,
                    ExtremumArg::Max => Extremum::Max,
                };
                let (h, v) = locate_extremum(&d.points, kind)?;
                let mut row = Vec::new();
                tag(&mut row);
                row.extend([f(h), f(v), f(d.step)]);
                out.push(row);
            }
            None => {
                for (p, q) in s.iter().zip(&d.points) {
                    let mut row = Vec::new();
                    tag(&mut row);
                    row.extend([f(p.0), f(p.1), f(q.1), f(d.step)]);
                    out.push(row);
                }
            }
        }
    }
    if out.is_empty() {
        bail!(Error::InsufficientData(format!("no rows with a `{}` value match the selection", args.column)));
    }
    args.output.emit(&write_records(header, &out, args.output.format()?))
}

/// Generic header-addressed table (sweep output, derive output, or any CSV).
fn load_records(path: &PathBuf) -> anyhow::Result<Vec<BTreeMap<String, String>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = if text.trim_start().starts_with('{') {
        to_csv_string(&read_table(&text)?)
    } else if text.trim_start().starts_with('[') {
        let v: Vec<BTreeMap<String, serde_json::Value>> =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid JSON table: {e}")))?;
        return Ok(v
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|(k, v)| (k, v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())))
                    .collect()
            })
            .collect());
    } else {
        text
    };
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> =
        reader.headers().map_err(|e| Error::Config(format!("bad table header: {e}")))?.iter().map(str::to_string).collect();
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Config(format!("bad table row: {e}")))?;
        out.push(header.iter().cloned().zip(rec.iter().map(str::to_string)).collect());
    }
    Ok(out)
}

fn number(rec: &BTreeMap<String, String>, col: &str) -> anyhow::Result<Option<f64>> {
    match rec.get(col).map(String::as_str) {
        None => Err(Error::Config(format!("column `{col}` not found")).into()),
        Some("null") | Some("") => Ok(None),
        Some(v) => Ok(Some(v.parse::<f64>().map_err(|_| Error::Config(format!("column `{col}`: `{v}` is not a number")))?)),
    }
}

fn cmd_fit(args: &FitArgs) -> anyhow::Result<()> {
    let model = args.model.parse::<FitModel>().map_err(Error::Config)?;
    let mut recs = load_records(&args.input)?;
    for filt in &args.filters {
        let (k, v) = filt.split_once('=').ok_or_else(|| Error::Config(format!("filter `{filt}` is not `column=value`")))?;
        let target = v.parse::<f64>().ok();
        recs.retain(|r| match (r.get(k), target) {
            (Some(x), Some(t)) => x.parse::<f64>().map(|x| (x - t).abs() <= 1e-9 * t.abs().max(1.0)).unwrap_or(false),
            (Some(x), None) => x == v,
            (None, _) => false,
        });
    }
    let fit: FitResult = match model {
        FitModel::QuadraticFactorization => {
            let mut samples = Vec::new();
            let mut gamma = None;
            for r in &recs {
                let (Some(rr), Some(h), Some(q)) = (number(r, "r")?, number(r, "h")?, number(r, &args.y_or("discord"))?) else {
                    continue;
                };
                gamma = gamma.or(r.get("gamma").and_then(|g| g.parse::<f64>().ok()));
                samples.push((rr as usize, h, q));
            }
            let hf = match (args.hf, gamma) {
                (Some(h), _) => h,
                (None, Some(g)) => (1.0 - g * g).sqrt(),
                (None, None) => bail!(Error::Config("give --hf (no gamma column to derive it from)".into())),
            };
            fit_factorization_law(&samples, hf, args.window, args.floor)?
        }
        _ => {
            let mut pts = Vec::new();
            for r in &recs {
                if let (Some(x), Some(y)) = (number(r, &args.x)?, number(r, &args.y)?) {
                    pts.push((x, y));
                }
            }
            match model {
                FitModel::LogLinear => fit_log_linear(&pts)?,
                FitModel::PowerLaw => fit_power_law(&pts)?,
                _ => fit_exponential_plus_constant(&pts)?,
            }
        }
    };
    let text = match args.output.format()? {
        Format::Json => serde_json::to_string_pretty(&fit)? + "\n",
        Format::Csv => {
            let mut row = vec![fit.model.to_string()];
            row.extend(fit.coefficients.iter().map(|&c| f(c)));
            let mut header = vec!["model".to_string()];
            header.extend((0..fit.coefficients.len()).map(|i| format!("c{i}")));
            header.extend(["residual_norm", "x_min", "x_max", "n_points"].map(String::from));
            row.extend([f(fit.residual_norm), f(fit.range.0), f(fit.range.1), fit.n_points.to_string()]);
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
    };
    args.output.emit(&text)
}

impl FitArgs {
    fn y_or(&self, default: &str) -> String {
        if self.y == "value" {
            default.to_string()
        } else {
            self.y.clone()
        }
    }
}

fn parse_window(w: &Option<String>, default: (f64, f64)) -> anyhow::Result<(f64, f64)> {
    match w {
        None => Ok(default),
        Some(s) => {
            let parts: Vec<f64> = s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad window `{s}`"))))
                .collect::<Result<_, _>>()?;
            if parts.len() != 2 || parts[0] >= parts[1] {
                bail!(Error::Config(format!("window must be `lo,hi` with lo < hi, got `{s}`")));
            }
            Ok((parts[0], parts[1]))
        }
    }
}

fn cmd_detect(args: &DetectArgs) -> anyhow::Result<()> {
    let table = args.select.load()?;
    let sel = args.select.selection()?;
    let report = match args.kind {
        DetectKind::Factorization => {
            let column = args.column.clone().unwrap_or_else(|| "discord".into());
            let rows: Vec<_> = table.rows.iter().filter(|r| sel.matches(r)).collect();
            let mut sizes: Vec<(StateFamily, Option<usize>)> = rows.iter().map(|r| (r.family, r.n_sites)).collect();
            sizes.sort();
            sizes.dedup();
            if sizes.len() != 1 {
                bail!(Error::Config(format!(
                    "factorization detection needs one family and chain size, found {}; use --family/--sites",
                    sizes.len()
                )));
            }
            let mut rs: Vec<usize> = rows.iter().map(|r| r.r).collect();
            rs.sort();
            rs.dedup();
            let curves: Vec<(usize, Vec<(f64, f64)>)> = rs
                .iter()
                .map(|&r| (r, qdchain::sweep::series(&table.rows, &Selection { r: Some(r), ..sel.clone() }, &column)))
                .collect();
            let gamma = rows.first().and_then(|r| r.gamma);
            let expected = gamma.and_then(|g| ModelPreset::xy(g).ok()).and_then(|p| {
                p.spec(0.0, 4, Boundary::Periodic).ok().and_then(|s| factorizing_field(&s)).filter(|&h| h > 0.0)
            });
            let window = parse_window(&args.window, (0.0, 1.0))?;
            let est = find_factorization(&curves, window, expected)?;
            serde_json::to_value(&est)?
        }
        DetectKind::Critical => {
            let column = args.column.clone().unwrap_or_else(|| "classical_correlation".into());
            let mut found = Vec::new();
            for g in groups(&table, &sel) {
                let s = qdchain::sweep::series(&table.rows, &g, &column);
                if s.len() < 3 {
                    continue;
                }
                let d = numerical_derivative(&s)?;
                if let Ok((h, v)) = locate_extremum(&d.points, Extremum::Min) {
                    found.push(json!({"family": g.family.map(|x| x.to_string()), "n_sites": g.n_sites, "r": g.r, "h_m": h, "derivative": v}));
                }
            }
            if found.is_empty() {
                bail!(Error::NotFound(format!("no interior extremum of d{column}/dh")));
            }
            json!({ "column": column, "extrema": found })
        }
        DetectKind::Classical => {
            let mut found = Vec::new();
            for g in groups(&table, &sel) {
                let s = qdchain::sweep::series(&table.rows, &g, "witness_norm");
                if s.is_empty() {
                    continue;
                }
                let p = WitnessProfile::from_series(s.iter().map(|x| x.0).collect(), s.iter().map(|x| x.1).collect(), CLASSICALITY_TOL);
                found.push(json!({"family": g.family.map(|x| x.to_string()), "n_sites": g.n_sites, "r": g.r, "zeros": p.zeros, "kink": p.kink}));
            }
            if found.iter().all(|v| v["zeros"].as_array().map_or(true, |z| z.is_empty())) {
                bail!(Error::NotFound("witness norm has no zero on the grid".into()));
            }
            json!({ "tolerance": CLASSICALITY_TOL, "profiles": found })
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> anyhow::Result<()> {
    let cfg = SweepConfig::from_config(&args.model.config_map()?)?;
    let mut out = Vec::new();
    for &family in &cfg.families {
        let sizes: Vec<usize> = if family == StateFamily::ClosedForm { vec![0] } else { cfg.sizes.clone() };
        for n in sizes {
            let settings = FamilySettings { n_sites: n, boundary: cfg.boundary, hx: cfg.hx, convention: cfg.convention, ..FamilySettings::default() };
            for &h in &cfg.fields {
                let p = family_states(&cfg.preset, family, h, &settings, &cfg.distances)?;
                for pair in &p.pairs {
                    let rep = analyze(&pair.state, !args.fast);
                    out.push(json!({
                        "family": family.to_string(),
                        "n_sites": if family == StateFamily::ClosedForm { None } else { Some(n) },
                        "h": h,
                        "r": pair.r,
                        "report": rep,
                        "witness": witness(&pair.state),
                        "correlators": pair.correlators,
                        "purity": pair.state.purity(),
                        "energy_density": p.energy_density,
                        "gap": p.gap,
                    }));
                }
            }
        }
    }
    let spec = cfg.preset.spec(0.0, 4, Boundary::Periodic)?;
    let doc = json!({
        "preset": cfg.preset,
        "factorizing_field": factorizing_field(&spec),
        "critical_field": critical_field(&cfg.preset),
        "points": out,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) => match e.kind() {
            ErrorKind::Config => 1,
            ErrorKind::Numerical => 2,
            ErrorKind::NotFound => 3,
        },
        None if err.downcast_ref::<std::io::Error>().is_some() => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Derive(a) => cmd_derive(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.root_cause());
            ExitCode::from(exit_code(&e))
        }
    }
}
