//! Chain specification, unit conventions, presets and special fields.
//!
//! The canonical (`pauli`) Hamiltonian is
//!
//! ```text
//! H = Σ_bonds [jx σx σx + jy σy σy + jz σz σz] − h Σ σz − hx Σ σx
//! ```
//!
//! The `spin_half` convention writes the exchange with S = σ/2 operators,
//! `H = Σ_bonds J_α S_α S_α − (h/2) Σ S_z − (hx/2) Σ S_x`, so that
//! `J = 4 j` and `h = 4 h_pauli`. The field normalization is the one under
//! which the factorizing field reads `2 √((Jx − Jz)(Jy − Jz))` in both
//! conventions. Both conventions describe the same operator, so ground
//! states and reduced matrices coincide.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::config::ConfigMap;
use crate::error::{Error, Result};

/// Default symmetry-breaking pinning field for broken-state runs.
pub const DEFAULT_PINNING: f64 = 1e-6;

/// Ratio between `spin_half` and `pauli` parameter values.
const SPIN_HALF_SCALE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Pauli,
    SpinHalf,
}

impl Convention {
    /// Multiplier taking a pauli-convention value into this convention.
    fn scale(self) -> f64 {
        match self {
            Convention::Pauli => 1.0,
            Convention::SpinHalf => SPIN_HALF_SCALE,
        }
    }
}

macro_rules! text_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.trim() {
                    $($name => Ok($variant),)+
                    other => Err(format!("unknown value `{other}` (expected one of: {})", [$($name),+].join(", "))),
                }
            }
        }
    };
}

pub(crate) use text_enum;

text_enum!(Boundary { Boundary::Periodic => "periodic", Boundary::Open => "open" });
text_enum!(Convention { Convention::Pauli => "pauli", Convention::SpinHalf => "spin_half" });

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    /// Transverse field along z.
    pub h: f64,
    /// Longitudinal pinning field along x (broken-symmetry runs only).
    pub hx: f64,
    pub n_sites: usize,
    pub boundary: Boundary,
    pub convention: Convention,
}

impl ChainSpec {
    pub fn new(jx: f64, jy: f64, jz: f64, h: f64, n_sites: usize, boundary: Boundary, convention: Convention) -> Result<Self> {
        let spec = Self { jx, jy, jz, h, hx: 0.0, n_sites, boundary, convention };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!("n_sites must be at least 2, got {}", self.n_sites)));
        }
        for (name, v) in [("jx", self.jx), ("jy", self.jy), ("jz", self.jz), ("h", self.h), ("hx", self.hx)] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite")));
            }
        }
        if self.hx < 0.0 {
            return Err(Error::InvalidSpec(format!("hx must be non-negative, got {}", self.hx)));
        }
        Ok(())
    }

    pub fn with_field(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_pinning(mut self, hx: f64) -> Self {
        self.hx = hx;
        self
    }

    pub fn with_sites(mut self, n_sites: usize) -> Self {
        self.n_sites = n_sites;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Same operator expressed in the pauli convention.
    pub fn to_pauli(&self) -> ChainSpec {
        convert_convention(self, Convention::Pauli)
    }

    /// Number of bonds: L for a ring, L − 1 for an open chain.
    pub fn n_bonds(&self) -> usize {
        match self.boundary {
            Boundary::Periodic if self.n_sites > 2 => self.n_sites,
            _ => self.n_sites - 1,
        }
    }

    pub fn to_config(&self) -> ConfigMap {
        let mut m = ConfigMap::default();
        m.set("jx", self.jx.to_string());
        m.set("jy", self.jy.to_string());
        m.set("jz", self.jz.to_string());
        m.set("h", self.h.to_string());
        m.set("hx", self.hx.to_string());
        m.set("n_sites", self.n_sites.to_string());
        m.set("boundary", self.boundary.to_string());
        m.set("convention", self.convention.to_string());
        m
    }

    /// Reads a spec from config keys. Either `preset` (with `gamma` / `delta`)
    /// or explicit `jx`, `jy`, `jz` must be present; `n_sites` must be a single value.
    pub fn from_config(map: &ConfigMap) -> Result<Self> {
        let n_sites = map.usize("n_sites")?.ok_or_else(|| Error::Config("missing key `n_sites`".into()))?;
        let preset = ModelPreset::from_config(map)?;
        let boundary = match map.raw("boundary") {
            Some(v) => v.parse().map_err(|m: String| map.error("boundary", m))?,
            None => Boundary::Periodic,
        };
        let spec = preset.spec_in(map, n_sites, boundary)?;
        spec.validate().map_err(|e| map.error("n_sites", e.to_string()))?;
        Ok(spec)
    }
}

/// Rescales couplings and fields so that the same operator is described in `target`.
pub fn convert_convention(spec: &ChainSpec, target: Convention) -> ChainSpec {
    if spec.convention == target {
        return *spec;
    }
    let f = target.scale() / spec.convention.scale();
    ChainSpec {
        jx: spec.jx * f,
        jy: spec.jy * f,
        jz: spec.jz * f,
        h: spec.h * f,
        hx: spec.hx * f,
        convention: target,
        ..*spec
    }
}

/// Field at which the nearest-neighbour ground state factorizes, in the units of `spec`.
///
/// An in-plane antiferromagnetic chain (jx + jy > 0) is first mapped onto its
/// ferromagnetic counterpart by the sublattice rotation (jx, jy) → (−jx, −jy).
/// Returns `None` when the radicand is negative.
pub fn factorizing_field(spec: &ChainSpec) -> Option<f64> {
    let (mut jx, mut jy, jz) = (spec.jx, spec.jy, spec.jz);
    if jx + jy > 0.0 {
        jx = -jx;
        jy = -jy;
    }
    let radicand = (jx - jz) * (jy - jz);
    if radicand < 0.0 || !radicand.is_finite() {
        return None;
    }
    Some(2.0 * radicand.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum ModelPreset {
    Xy { gamma: f64 },
    Ising,
    Xxz { delta: f64 },
    Xyx,
    Custom { jx: f64, jy: f64, jz: f64, convention: Convention },
}

impl ModelPreset {
    pub fn xy(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidSpec(format!("xy preset requires 0 <= gamma <= 1, got {gamma}")));
        }
        Ok(ModelPreset::Xy { gamma })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ModelPreset::Xy { .. } => "xy",
            ModelPreset::Ising => "ising",
            ModelPreset::Xxz { .. } => "xxz",
            ModelPreset::Xyx => "xyx",
            ModelPreset::Custom { .. } => "custom",
        }
    }

    /// Anisotropy γ for xy/ising presets.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            ModelPreset::Xy { gamma } => Some(*gamma),
            ModelPreset::Ising => Some(1.0),
            _ => None,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            ModelPreset::Xxz { delta } => Some(*delta),
            _ => None,
        }
    }

    pub fn canonical_convention(&self) -> Convention {
        match self {
            ModelPreset::Xyx => Convention::SpinHalf,
            ModelPreset::Custom { convention, .. } => *convention,
            _ => Convention::Pauli,
        }
    }

    /// (jx, jy, jz) in the preset's canonical convention.
    pub fn couplings(&self) -> (f64, f64, f64) {
        match *self {
            ModelPreset::Xy { gamma } => (-(1.0 + gamma) / 2.0, -(1.0 - gamma) / 2.0, 0.0),
            ModelPreset::Ising => (-1.0, 0.0, 0.0),
            ModelPreset::Xxz { delta } => (-0.5, -0.5, -delta / 2.0),
            ModelPreset::Xyx => (1.0, 0.25, 1.0),
            ModelPreset::Custom { jx, jy, jz, .. } => (jx, jy, jz),
        }
    }

    /// Spec in the canonical convention, field `h` in that convention.
    pub fn spec(&self, h: f64, n_sites: usize, boundary: Boundary) -> Result<ChainSpec> {
        let (jx, jy, jz) = self.couplings();
        ChainSpec::new(jx, jy, jz, h, n_sites, boundary, self.canonical_convention())
    }

    fn from_config(map: &ConfigMap) -> Result<Self> {
        let convention = match map.raw("convention") {
            Some(v) => Some(v.parse::<Convention>().map_err(|m| map.error("convention", m))?),
            None => None,
        };
        let preset = map.raw("preset").unwrap_or("custom");
        let need = |key: &str| -> Result<f64> {
            map.f64(key)?.ok_or_else(|| map.error("preset", format!("preset `{preset}` requires `{key}`")))
        };
        let p = match preset {
            "xy" => {
                let gamma = need("gamma")?;
                ModelPreset::xy(gamma).map_err(|e| map.error("gamma", e.to_string()))?
            }
            "ising" => ModelPreset::Ising,
            "xxz" => ModelPreset::Xxz { delta: need("delta")? },
            "xyx" => ModelPreset::Xyx,
            "custom" => ModelPreset::Custom {
                jx: need("jx")?,
                jy: need("jy")?,
                jz: need("jz")?,
                convention: convention.unwrap_or(Convention::Pauli),
            },
            other => return Err(map.error("preset", format!("unknown preset `{other}` (expected xy, ising, xxz, xyx, custom)"))),
        };
        if preset != "custom" {
            for key in ["jx", "jy", "jz"] {
                if map.contains(key) {
                    return Err(map.error(key, format!("explicit couplings conflict with preset `{preset}`")));
                }
            }
        }
        Ok(p)
    }

    /// Builds a spec from the preset, honouring `convention`, `h` and `hx` keys
    /// (fields are read in the requested convention).
    fn spec_in(&self, map: &ConfigMap, n_sites: usize, boundary: Boundary) -> Result<ChainSpec> {
        let target = match map.raw("convention") {
            Some(v) => v.parse::<Convention>().map_err(|m| map.error("convention", m))?,
            None => self.canonical_convention(),
        };
        let mut spec = convert_convention(&self.spec(0.0, n_sites.max(2), boundary)?, target);
        spec.n_sites = n_sites;
        spec.h = map.f64("h")?.unwrap_or(0.0);
        spec.hx = map.f64("hx")?.unwrap_or(0.0);
        if spec.hx < 0.0 {
            return Err(map.error("hx", "must be non-negative"));
        }
        Ok(spec)
    }

    pub fn to_config(&self) -> ConfigMap {
        let mut m = ConfigMap::default();
        m.set("preset", self.tag());
        match *self {
            ModelPreset::Xy { gamma } => m.set("gamma", gamma.to_string()),
            ModelPreset::Xxz { delta } => m.set("delta", delta.to_string()),
            ModelPreset::Custom { jx, jy, jz, convention } => {
                m.set("jx", jx.to_string());
                m.set("jy", jy.to_string());
                m.set("jz", jz.to_string());
                m.set("convention", convention.to_string());
            }
            _ => {}
        }
        m
    }

    pub fn from_config_map(map: &ConfigMap) -> Result<Self> {
        Self::from_config(map)
    }
}

/// Critical field in the preset's canonical convention.
///
/// The xyx value is an approximate landmark used to seed search windows.
pub fn critical_field(preset: &ModelPreset) -> Option<f64> {
    match *preset {
        ModelPreset::Xy { gamma } if gamma > 0.0 => Some(1.0),
        ModelPreset::Ising => Some(1.0),
        ModelPreset::Xyx => Some(3.21),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(gamma: f64) -> ChainSpec {
        ModelPreset::xy(gamma).unwrap().spec(0.0, 8, Boundary::Periodic).unwrap()
    }

    #[test]
    fn factorizing_field_examples() {
        assert!((factorizing_field(&xy(0.7)).unwrap() - 0.51f64.sqrt()).abs() < 1e-15);
        assert!((factorizing_field(&xy(0.7)).unwrap() - 0.714).abs() < 1e-3);
        assert_eq!(factorizing_field(&xy(1.0)), Some(0.0));
        let xyx = ModelPreset::Xyx.spec(0.0, 8, Boundary::Periodic).unwrap();
        assert!((factorizing_field(&xyx).unwrap() - 3.16).abs() < 5e-3);
        for g in [0.1, 0.3, 0.5, 0.9] {
            assert!((factorizing_field(&xy(g)).unwrap() - (1.0 - g * g).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn factorizing_field_units_follow_convention() {
        let xyx = ModelPreset::Xyx.spec(0.0, 8, Boundary::Periodic).unwrap();
        let p = convert_convention(&xyx, Convention::Pauli);
        assert!((factorizing_field(&p).unwrap() * 4.0 - factorizing_field(&xyx).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn negative_radicand_is_none() {
        let s = ChainSpec::new(1.0, -1.0, 0.0, 0.0, 4, Boundary::Open, Convention::Pauli).unwrap();
        assert_eq!(factorizing_field(&s), None);
    }

    #[test]
    fn critical_fields() {
        assert_eq!(critical_field(&ModelPreset::Ising), Some(1.0));
        assert_eq!(critical_field(&ModelPreset::Xy { gamma: 0.5 }), Some(1.0));
        assert_eq!(critical_field(&ModelPreset::Xyx), Some(3.21));
        assert_eq!(critical_field(&ModelPreset::Xy { gamma: 0.0 }), None);
        assert_eq!(critical_field(&ModelPreset::Xxz { delta: 0.5 }), None);
    }

    #[test]
    fn conversion_round_trip_and_zero_couplings() {
        let s = xy(0.3).with_field(0.77).with_pinning(1e-6);
        let back = convert_convention(&convert_convention(&s, Convention::SpinHalf), Convention::Pauli);
        assert_eq!(s, back);
        let z = ChainSpec::new(0.0, 0.0, 0.0, 1.0, 4, Boundary::Open, Convention::Pauli).unwrap();
        let c = convert_convention(&z, Convention::SpinHalf);
        assert_eq!((c.jx, c.jy, c.jz), (0.0, 0.0, 0.0));
        assert_eq!(c.h, 4.0);
    }

    #[test]
    fn presets() {
        assert!(ModelPreset::xy(1.2).is_err());
        assert_eq!(ModelPreset::Ising.couplings(), ModelPreset::Xy { gamma: 1.0 }.couplings());
        assert!(ChainSpec::new(1.0, 1.0, 1.0, 0.0, 1, Boundary::Open, Convention::Pauli).is_err());
        assert!(xy(0.5).with_pinning(-1.0).validate().is_err());
    }

    #[test]
    fn config_round_trip() {
        let s = xy(0.7).with_field(0.25).with_pinning(1e-6);
        let parsed = ChainSpec::from_config(&ConfigMap::parse(&s.to_config().canonical()).unwrap()).unwrap();
        assert_eq!(s, parsed);
        let m = ConfigMap::parse("preset = xyx\nh = 3.0\nn_sites = 10\nboundary = open\n").unwrap();
        let x = ChainSpec::from_config(&m).unwrap();
        assert_eq!((x.jx, x.jy, x.jz, x.convention), (1.0, 0.25, 1.0, Convention::SpinHalf));
        let m = ConfigMap::parse("preset = xy\ngamma = 0.5\nconvention = spin_half\nn_sites = 4\n").unwrap();
        assert_eq!(ChainSpec::from_config(&m).unwrap().jx, -3.0);
        let bad = ConfigMap::parse("preset = xy\nn_sites = 4\ngamma = 2\n").unwrap();
        assert!(matches!(ChainSpec::from_config(&bad), Err(Error::ConfigLine { line: 3, .. })));
    }
}
