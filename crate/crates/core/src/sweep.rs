//! Parameter sweeps over (L, h, r, family) and their CSV / JSON emission.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{parse_f64, ConfigMap};
use crate::correlations::{concurrence, one_way, symmetric_discord};
use crate::ed::{pair_sites, EdOptions, DEFAULT_DEGENERACY_TOL, MAX_SITES};
use crate::error::{Error, Result};
use crate::family::{family_states, FamilySettings, PairData, PointStates, StateFamily};
use crate::model::{text_enum, Boundary, Convention, ModelPreset, DEFAULT_PINNING};
use crate::witness::witness;
use crate::xy::MAX_DISTANCE;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "QDCHAIN_WORKERS";

const KNOWN_KEYS: &[&str] = &[
    "preset", "gamma", "delta", "jx", "jy", "jz", "convention", "h", "hgrid", "n_sites", "boundary", "hx", "family",
    "rmax", "r", "observables", "degeneracy_tol", "workers",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// I, C and Q together (one optimization).
    Discord,
    SymmetricDiscord,
    Concurrence,
    Witness,
    Correlators,
    Energy,
}

text_enum!(Observable {
    Observable::Discord => "discord",
    Observable::SymmetricDiscord => "symmetric_discord",
    Observable::Concurrence => "concurrence",
    Observable::Witness => "witness",
    Observable::Correlators => "correlators",
    Observable::Energy => "energy",
});

/// Everything but the (slow) two-sided discord.
pub fn default_observables() -> BTreeSet<Observable> {
    [Observable::Discord, Observable::Concurrence, Observable::Witness, Observable::Correlators, Observable::Energy]
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub preset: ModelPreset,
    /// Run convention; `None` is the preset's canonical one. Fields are in this convention.
    pub convention: Option<Convention>,
    pub fields: Vec<f64>,
    pub sizes: Vec<usize>,
    pub boundary: Boundary,
    /// Pinning field of the broken family.
    pub hx: f64,
    pub families: Vec<StateFamily>,
    pub distances: Vec<usize>,
    pub observables: BTreeSet<Observable>,
    pub degeneracy_tol: f64,
    /// Worker threads; `None` uses the environment override or all cores.
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn new(preset: ModelPreset, fields: Vec<f64>) -> Self {
        Self {
            preset,
            convention: None,
            fields,
            sizes: vec![12],
            boundary: Boundary::Periodic,
            hx: DEFAULT_PINNING,
            families: vec![StateFamily::Thermal],
            distances: vec![1],
            observables: default_observables(),
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            workers: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_config(&ConfigMap::parse(text)?)
    }

    pub fn from_config(map: &ConfigMap) -> Result<Self> {
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key) {
                return Err(map.error(key, format!("unknown key (known keys: {})", KNOWN_KEYS.join(", "))));
            }
        }
        let preset = ModelPreset::from_config_map(map)?;
        let convention = match map.raw("convention") {
            Some(v) => Some(v.parse::<Convention>().map_err(|m| map.error("convention", m))?),
            None => None,
        };
        let fields = match (map.raw("hgrid"), map.raw("h")) {
            (Some(_), Some(_)) => return Err(map.error("h", "give either `h` or `hgrid`, not both")),
            (Some(g), None) => parse_hgrid(g).map_err(|m| map.error("hgrid", m))?,
            (None, Some(h)) => parse_hgrid(h).map_err(|m| map.error("h", m))?,
            (None, None) => return Err(Error::Config("missing key `hgrid` (or `h`)".into())),
        };
        let mut cfg = SweepConfig::new(preset, fields);
        cfg.convention = convention;
        if let Some(s) = map.usize_list("n_sites")? {
            cfg.sizes = s;
        }
        if let Some(b) = map.raw("boundary") {
            cfg.boundary = b.parse().map_err(|m: String| map.error("boundary", m))?;
        }
        if let Some(hx) = map.f64("hx")? {
            cfg.hx = hx;
        }
        if let Some(items) = map.list("family") {
            cfg.families = items
                .iter()
                .map(|s| s.parse::<StateFamily>().map_err(|m| map.error("family", m)))
                .collect::<Result<_>>()?;
        }
        cfg.distances = match (map.usize("rmax")?, map.usize_list("r")?) {
            (Some(_), Some(_)) => return Err(map.error("r", "give either `r` or `rmax`, not both")),
            (Some(m), None) => (1..=m).collect(),
            (None, Some(r)) => r,
            (None, None) => vec![1],
        };
        if let Some(items) = map.list("observables") {
            cfg.observables = items
                .iter()
                .map(|s| s.parse::<Observable>().map_err(|m| map.error("observables", m)))
                .collect::<Result<_>>()?;
        }
        if let Some(t) = map.f64("degeneracy_tol")? {
            cfg.degeneracy_tol = t;
        }
        cfg.workers = map.usize("workers")?;
        cfg.validate().map_err(|e| match e {
            Error::Config(m) => {
                let key = m.split(':').next().unwrap_or("").to_string();
                if map.contains(&key) {
                    map.error(&key, m.split_once(": ").map(|x| x.1).unwrap_or(&m).to_string())
                } else {
                    Error::Config(m)
                }
            }
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if self.fields.is_empty() {
            return bad("hgrid", "no field values".into());
        }
        if let Some(h) = self.fields.iter().find(|h| !h.is_finite()) {
            return bad("hgrid", format!("non-finite field {h}"));
        }
        if self.families.is_empty() {
            return bad("family", "no state family".into());
        }
        if self.distances.is_empty() || self.distances.contains(&0) {
            return bad("r", "distances must be positive".into());
        }
        if !(self.hx >= 0.0) {
            return bad("hx", "must be non-negative".into());
        }
        if self.families.contains(&StateFamily::Broken) && self.hx == 0.0 {
            return bad("hx", "the broken family needs hx > 0".into());
        }
        if !(self.degeneracy_tol >= 0.0) {
            return bad("degeneracy_tol", "must be non-negative".into());
        }
        if self.workers == Some(0) {
            return bad("workers", "must be at least 1".into());
        }
        let r_max = *self.distances.iter().max().expect("non-empty");
        if self.families.iter().any(|f| *f != StateFamily::ClosedForm) {
            if self.sizes.is_empty() {
                return bad("n_sites", "no chain sizes".into());
            }
            for &n in &self.sizes {
                if n < 2 || n > MAX_SITES {
                    return bad("n_sites", format!("{n} is outside 2..={MAX_SITES}"));
                }
                if pair_sites(n, self.boundary, r_max).is_err() {
                    return bad("r", format!("distance {r_max} does not fit a {} chain of {n} sites", self.boundary));
                }
            }
        }
        if self.families.contains(&StateFamily::ClosedForm) && r_max > MAX_DISTANCE {
            return bad("r", format!("closed_form distances are capped at {MAX_DISTANCE}"));
        }
        Ok(())
    }

    /// Normalized config text (the hashed provenance record).
    pub fn to_config(&self) -> ConfigMap {
        let mut m = self.preset.to_config();
        if let Some(c) = self.convention {
            m.set("convention", c.to_string());
        }
        m.set("hgrid", self.fields.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(", "));
        m.set("n_sites", self.sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "));
        m.set("boundary", self.boundary.to_string());
        m.set("hx", self.hx.to_string());
        m.set("family", self.families.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", "));
        m.set("r", self.distances.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "));
        m.set("observables", self.observables.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(", "));
        m.set("degeneracy_tol", self.degeneracy_tol.to_string());
        m
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_config().canonical().as_bytes()))
    }

    fn settings(&self, n_sites: usize) -> FamilySettings {
        FamilySettings {
            n_sites,
            boundary: self.boundary,
            hx: self.hx,
            convention: self.convention,
            ed: EdOptions { degeneracy_tol: self.degeneracy_tol, ..EdOptions::default() },
        }
    }
}

/// `start:stop:step` ranges and single values, comma separated; the
/// result is sorted with duplicates (within 1e-12) removed.
pub fn parse_hgrid(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.len() {
            1 => out.push(parse_f64(parts[0])?),
            3 => {
                let (a, b, s) = (parse_f64(parts[0])?, parse_f64(parts[1])?, parse_f64(parts[2])?);
                if !(s > 0.0) || b < a {
                    return Err(format!("range `{item}` needs start <= stop and step > 0"));
                }
                let n = ((b - a) / s + 1e-9).floor() as usize;
                if n > 1_000_000 {
                    return Err(format!("range `{item}` has too many points"));
                }
                // Rounded to 12 decimals so that e.g. 0.1 * 7 prints as 0.7.
                out.extend((0..=n).map(|i| ((a + i as f64 * s) * 1e12).round() / 1e12));
            }
            _ => return Err(format!("expected `value` or `start:stop:step`, found `{item}`")),
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub preset: String,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub convention: Convention,
    pub family: StateFamily,
    /// `None` for the infinite-chain closed form.
    pub n_sites: Option<usize>,
    pub boundary: Option<Boundary>,
    pub hx: Option<f64>,
    pub h: f64,
    pub r: usize,
    pub mutual_information: Option<f64>,
    pub classical_correlation: Option<f64>,
    pub discord: Option<f64>,
    pub symmetric_discord: Option<f64>,
    pub concurrence: Option<f64>,
    pub witness_norm: Option<f64>,
    pub gx: Option<f64>,
    pub gz: Option<f64>,
    pub gxx: Option<f64>,
    pub gyy: Option<f64>,
    pub gzz: Option<f64>,
    pub gxz: Option<f64>,
    pub energy_density: Option<f64>,
    pub gap: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub upper_bound: Option<bool>,
    pub error: Option<String>,
}

/// CSV column order.
pub const COLUMNS: &[&str] = &[
    "preset", "gamma", "delta", "convention", "family", "n_sites", "boundary", "hx", "h", "r",
    "mutual_information", "classical_correlation", "discord", "symmetric_discord", "concurrence", "witness_norm",
    "gx", "gz", "gxx", "gyy", "gzz", "gxz", "energy_density", "gap", "theta", "phi", "upper_bound", "error",
];

const NULL: &str = "null";

fn fmt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_else(|| NULL.into())
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| NULL.into())
}

impl SweepRow {
    fn blank(cfg: &SweepConfig, family: StateFamily, n_sites: Option<usize>, h: f64, r: usize) -> Self {
        let ed = family != StateFamily::ClosedForm;
        SweepRow {
            preset: cfg.preset.tag().to_string(),
            gamma: cfg.preset.gamma(),
            delta: cfg.preset.delta(),
            convention: cfg.convention.unwrap_or_else(|| cfg.preset.canonical_convention()),
            family,
            n_sites,
            boundary: if ed { Some(cfg.boundary) } else { None },
            hx: match family {
                StateFamily::Broken => Some(cfg.hx),
                StateFamily::Thermal => Some(0.0),
                StateFamily::ClosedForm => None,
            },
            h,
            r,
            mutual_information: None,
            classical_correlation: None,
            discord: None,
            symmetric_discord: None,
            concurrence: None,
            witness_norm: None,
            gx: None,
            gz: None,
            gxx: None,
            gyy: None,
            gzz: None,
            gxz: None,
            energy_density: None,
            gap: None,
            theta: None,
            phi: None,
            upper_bound: None,
            error: None,
        }
    }

    /// Numeric column by name (parameters and observables).
    pub fn value(&self, column: &str) -> Option<f64> {
        match column {
            "gamma" => self.gamma,
            "delta" => self.delta,
            "n_sites" => self.n_sites.map(|n| n as f64),
            "hx" => self.hx,
            "h" => Some(self.h),
            "r" => Some(self.r as f64),
            "mutual_information" => self.mutual_information,
            "classical_correlation" => self.classical_correlation,
            "discord" => self.discord,
            "symmetric_discord" => self.symmetric_discord,
            "concurrence" => self.concurrence,
            "witness_norm" => self.witness_norm,
            "gx" => self.gx,
            "gz" => self.gz,
            "gxx" => self.gxx,
            "gyy" => self.gyy,
            "gzz" => self.gzz,
            "gxz" => self.gxz,
            "energy_density" => self.energy_density,
            "gap" => self.gap,
            "theta" => self.theta,
            "phi" => self.phi,
            _ => None,
        }
    }

    fn sort_key(&self) -> (Option<usize>, f64, usize, StateFamily) {
        (self.n_sites, self.h, self.r, self.family)
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.preset.clone(),
            fmt_f(self.gamma),
            fmt_f(self.delta),
            self.convention.to_string(),
            self.family.to_string(),
            fmt_opt(&self.n_sites),
            fmt_opt(&self.boundary),
            fmt_f(self.hx),
            fmt_f(Some(self.h)),
            self.r.to_string(),
            fmt_f(self.mutual_information),
            fmt_f(self.classical_correlation),
            fmt_f(self.discord),
            fmt_f(self.symmetric_discord),
            fmt_f(self.concurrence),
            fmt_f(self.witness_norm),
            fmt_f(self.gx),
            fmt_f(self.gz),
            fmt_f(self.gxx),
            fmt_f(self.gyy),
            fmt_f(self.gzz),
            fmt_f(self.gxz),
            fmt_f(self.energy_density),
            fmt_f(self.gap),
            fmt_f(self.theta),
            fmt_f(self.phi),
            fmt_opt(&self.upper_bound),
            fmt_opt(&self.error),
        ]
    }
}

fn fill_pair(row: &mut SweepRow, pair: &PairData, point: &PointStates, obs: &BTreeSet<Observable>) {
    if obs.contains(&Observable::Discord) {
        let ow = one_way(&pair.state);
        row.mutual_information = Some(ow.mutual_information);
        row.classical_correlation = Some(ow.classical_correlation);
        row.discord = Some(ow.discord);
        row.theta = Some(ow.basis.theta);
        row.phi = Some(ow.basis.phi);
        row.upper_bound = Some(ow.upper_bound);
    }
    if obs.contains(&Observable::SymmetricDiscord) {
        row.symmetric_discord = Some(symmetric_discord(&pair.state).bits);
    }
    if obs.contains(&Observable::Concurrence) {
        row.concurrence = Some(concurrence(&pair.state));
    }
    if obs.contains(&Observable::Witness) {
        row.witness_norm = Some(witness(&pair.state).trace_norm);
    }
    if obs.contains(&Observable::Correlators) {
        let c = &pair.correlators;
        row.gx = Some(c.gx);
        row.gz = Some(c.gz);
        row.gxx = Some(c.gxx);
        row.gyy = Some(c.gyy);
        row.gzz = Some(c.gzz);
        row.gxz = Some(c.gxz);
    }
    if obs.contains(&Observable::Energy) {
        row.energy_density = point.energy_density;
        row.gap = point.gap;
    }
}

fn run_point(cfg: &SweepConfig, family: StateFamily, n_sites: Option<usize>, h: f64) -> Vec<SweepRow> {
    let settings = cfg.settings(n_sites.unwrap_or(0));
    match family_states(&cfg.preset, family, h, &settings, &cfg.distances) {
        Ok(point) => point
            .pairs
            .iter()
            .map(|pair| {
                let mut row = SweepRow::blank(cfg, family, n_sites, h, pair.r);
                fill_pair(&mut row, pair, &point, &cfg.observables);
                row
            })
            .collect(),
        Err(e) => cfg
            .distances
            .iter()
            .map(|&r| SweepRow { error: Some(e.to_string()), ..SweepRow::blank(cfg, family, n_sites, h, r) })
            .collect(),
    }
}

/// Worker count: `QDCHAIN_WORKERS`, then `cfg.workers`, then rayon's default.
pub fn worker_count(cfg: &SweepConfig) -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(cfg.workers),
    }
}

/// Runs every (family, L, h) point; rows come back sorted by (L, h, r, family),
/// independent of scheduling. Per-point failures land in the `error` column.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut tasks: Vec<(StateFamily, Option<usize>, f64)> = Vec::new();
    for &family in &cfg.families {
        let sizes: Vec<Option<usize>> =
            if family == StateFamily::ClosedForm { vec![None] } else { cfg.sizes.iter().map(|&n| Some(n)).collect() };
        for n in sizes {
            for &h in &cfg.fields {
                tasks.push((family, n, h));
            }
        }
    }
    let work = || -> Vec<SweepRow> { tasks.par_iter().flat_map_iter(|&(f, n, h)| run_point(cfg, f, n, h)).collect() };
    let mut rows = match worker_count(cfg)? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    };
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.cmp(&kb.2)).then(ka.3.cmp(&kb.3))
    });
    Ok(rows)
}

/// Sweep output plus the provenance hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub config_sha256: Option<String>,
    /// Normalized config lines, when known.
    pub config: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(cfg: &SweepConfig, rows: Vec<SweepRow>) -> Self {
        let config = cfg.to_config().canonical().lines().map(str::to_string).collect();
        Self { config_sha256: Some(cfg.sha256()), config, rows }
    }

    pub fn from_rows(rows: Vec<SweepRow>) -> Self {
        Self { config_sha256: None, config: vec![], rows }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

text_enum!(Format { Format::Csv => "csv", Format::Json => "json" });

fn io_err(e: impl fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(table: &SweepTable, mut out: W) -> Result<()> {
    if let Some(h) = &table.config_sha256 {
        writeln!(out, "# config_sha256 = {h}").map_err(io_err)?;
    }
    for line in &table.config {
        writeln!(out, "# config: {line}").map_err(io_err)?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS).map_err(io_err)?;
    for row in &table.rows {
        w.write_record(row.fields()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn to_csv_string(table: &SweepTable) -> String {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

pub fn write_json<W: Write>(table: &SweepTable, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, table).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}

pub fn to_json_string(table: &SweepTable) -> String {
    let mut buf = Vec::new();
    write_json(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

fn parse_cell<T: FromStr>(cell: &str, column: &str, line: usize) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    if cell == NULL {
        return Ok(None);
    }
    cell.parse::<T>().map(Some).map_err(|e| Error::ConfigLine { line, message: format!("column `{column}`: {e}") })
}

pub fn read_csv<R: Read>(input: R) -> Result<SweepTable> {
    let mut text = String::new();
    std::io::BufReader::new(input).read_to_string(&mut text).map_err(io_err)?;
    let mut hash = None;
    let mut config = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some(h) = line.strip_prefix("# config_sha256 = ") {
            hash = Some(h.trim().to_string());
        } else if let Some(c) = line.strip_prefix("# config: ") {
            config.push(c.to_string());
        }
    }
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(io_err)?.iter().map(str::to_string).collect();
    let idx = |name: &str| header.iter().position(|h| h == name);
    for required in ["preset", "family", "h", "r"] {
        if idx(required).is_none() {
            return Err(Error::Config(format!("CSV lacks the `{required}` column")));
        }
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(io_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell = |name: &str| idx(name).and_then(|i| rec.get(i)).unwrap_or(NULL);
        let f = |name: &str| parse_cell::<f64>(cell(name), name, line);
        let required = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::ConfigLine { line, message: format!("column `{name}` may not be null") })
        };
        rows.push(SweepRow {
            preset: cell("preset").to_string(),
            gamma: f("gamma")?,
            delta: f("delta")?,
            convention: parse_cell::<Convention>(cell("convention"), "convention", line)?.unwrap_or(Convention::Pauli),
            family: parse_cell::<StateFamily>(cell("family"), "family", line)?
                .ok_or_else(|| Error::ConfigLine { line, message: "column `family` may not be null".into() })?,
            n_sites: parse_cell::<usize>(cell("n_sites"), "n_sites", line)?,
            boundary: parse_cell::<Boundary>(cell("boundary"), "boundary", line)?,
            hx: f("hx")?,
            h: required("h", f("h")?)?,
            r: parse_cell::<usize>(cell("r"), "r", line)?
                .ok_or_else(|| Error::ConfigLine { line, message: "column `r` may not be null".into() })?,
            mutual_information: f("mutual_information")?,
            classical_correlation: f("classical_correlation")?,
            discord: f("discord")?,
            symmetric_discord: f("symmetric_discord")?,
            concurrence: f("concurrence")?,
            witness_norm: f("witness_norm")?,
            gx: f("gx")?,
            gz: f("gz")?,
            gxx: f("gxx")?,
            gyy: f("gyy")?,
            gzz: f("gzz")?,
            gxz: f("gxz")?,
            energy_density: f("energy_density")?,
            gap: f("gap")?,
            theta: f("theta")?,
            phi: f("phi")?,
            upper_bound: parse_cell::<bool>(cell("upper_bound"), "upper_bound", line)?,
            error: match cell("error") {
                NULL => None,
                s => Some(s.to_string()),
            },
        });
    }
    Ok(SweepTable { config_sha256: hash, config, rows })
}

pub fn read_json<R: Read>(input: R) -> Result<SweepTable> {
    serde_json::from_reader(input).map_err(|e| Error::Config(format!("invalid sweep JSON: {e}")))
}

/// Reads either format, sniffing JSON by its leading brace.
pub fn read_table(text: &str) -> Result<SweepTable> {
    if text.trim_start().starts_with('{') {
        read_json(text.as_bytes())
    } else {
        read_csv(text.as_bytes())
    }
}

/// Row filter used to cut (h, value) series out of a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Selection {
    pub family: Option<StateFamily>,
    pub n_sites: Option<usize>,
    pub r: Option<usize>,
}

impl Selection {
    pub fn matches(&self, row: &SweepRow) -> bool {
        self.family.map_or(true, |f| row.family == f)
            && self.n_sites.map_or(true, |n| row.n_sites == Some(n))
            && self.r.map_or(true, |r| row.r == r)
    }
}

/// (h, column) pairs of the selected rows, ascending in h; rows with a
/// null value are skipped.
pub fn series(rows: &[SweepRow], sel: &Selection, column: &str) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> =
        rows.iter().filter(|r| sel.matches(r)).filter_map(|r| r.value(column).map(|v| (r.h, v))).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
