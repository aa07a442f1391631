//! Pair states of the three state families: symmetric (thermal) ED ground
//! states, symmetry-broken ED ground states with a pinning field, and the
//! infinite-chain closed form.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::correlations::closed_form::xstate_from_correlators;
use crate::ed::{
    build_hamiltonian, correlators_at, ground_state_with, pair_sites, reduce_two_site, thermal_state, EdOptions,
};
use crate::error::{Error, Result};
use crate::model::{convert_convention, text_enum, Boundary, ChainSpec, Convention, ModelPreset, DEFAULT_PINNING};
use crate::state::{CorrelatorSet, StateSource, TwoSiteState};
use crate::xy::{xy_correlators, XYPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    Thermal,
    Broken,
    ClosedForm,
}

text_enum!(StateFamily {
    StateFamily::Thermal => "thermal",
    StateFamily::Broken => "broken",
    StateFamily::ClosedForm => "closed_form",
});

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySettings {
    pub n_sites: usize,
    pub boundary: Boundary,
    /// Pinning field of the broken family, in the run convention.
    pub hx: f64,
    /// Run convention; `None` uses the preset's canonical one.
    pub convention: Option<Convention>,
    pub ed: EdOptions,
}

impl Default for FamilySettings {
    fn default() -> Self {
        Self { n_sites: 12, boundary: Boundary::Periodic, hx: DEFAULT_PINNING, convention: None, ed: EdOptions::default() }
    }
}

impl FamilySettings {
    pub fn convention_for(&self, preset: &ModelPreset) -> Convention {
        self.convention.unwrap_or_else(|| preset.canonical_convention())
    }

    /// Chain spec at field `h` (and pinning `hx`), both in the run convention.
    pub fn spec(&self, preset: &ModelPreset, h: f64, hx: f64) -> Result<ChainSpec> {
        let base = preset.spec(0.0, self.n_sites, self.boundary)?;
        let mut spec = convert_convention(&base, self.convention_for(preset));
        spec.h = h;
        spec.hx = hx;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairData {
    pub r: usize,
    pub state: TwoSiteState,
    pub correlators: CorrelatorSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointStates {
    pub pairs: Vec<PairData>,
    /// Ground energy per site (ED families only).
    pub energy_density: Option<f64>,
    pub gap: Option<f64>,
}

/// Pair states at distances `r_list` for one field value.
pub fn family_states(
    preset: &ModelPreset,
    family: StateFamily,
    h: f64,
    settings: &FamilySettings,
    r_list: &[usize],
) -> Result<PointStates> {
    match family {
        StateFamily::ClosedForm => closed_form_states(preset, h, settings, r_list),
        StateFamily::Thermal | StateFamily::Broken => ed_states(preset, family, h, settings, r_list),
    }
}

fn ed_states(
    preset: &ModelPreset,
    family: StateFamily,
    h: f64,
    settings: &FamilySettings,
    r_list: &[usize],
) -> Result<PointStates> {
    let (hx, source) = match family {
        StateFamily::Broken => {
            if settings.hx <= 0.0 {
                return Err(Error::InvalidSpec("broken family requires hx > 0".into()));
            }
            (settings.hx, StateSource::Broken)
        }
        _ => (0.0, StateSource::Thermal),
    };
    let spec = settings.spec(preset, h, hx)?;
    let bundle = ground_state_with(&build_hamiltonian(&spec)?, &settings.ed)?;
    let chain = match family {
        StateFamily::Broken => bundle.ground(),
        _ => thermal_state(&bundle)?,
    };
    let mut pairs = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let (i, j) = pair_sites(spec.n_sites, spec.boundary, r)?;
        let mut correlators = correlators_at(&chain, i, j)?;
        correlators.r = r;
        let state = reduce_two_site(&chain, i, j, source)?.with_distance(r);
        pairs.push(PairData { r, state, correlators });
    }
    Ok(PointStates { pairs, energy_density: Some(bundle.energy_density), gap: Some(bundle.gap) })
}

fn closed_form_states(preset: &ModelPreset, h: f64, settings: &FamilySettings, r_list: &[usize]) -> Result<PointStates> {
    let gamma = preset
        .gamma()
        .filter(|&g| g > 0.0)
        .ok_or_else(|| Error::Unsupported(format!("closed_form family needs an xy preset with gamma > 0, got `{}`", preset.tag())))?;
    if settings.convention_for(preset) != Convention::Pauli {
        return Err(Error::Unsupported("closed_form family runs in the pauli convention".into()));
    }
    let r_max = r_list.iter().cloned().max().unwrap_or(1);
    let c = xy_correlators(&XYPoint::new(gamma, h)?, r_max)?;
    let mut pairs = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let correlators = c.at(r).ok_or_else(|| Error::InvalidSpec(format!("distance {r} out of range")))?;
        let state = xstate_from_correlators(&correlators)?;
        pairs.push(PairData { r, state, correlators });
    }
    Ok(PointStates { pairs, energy_density: None, gap: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names() {
        for f in [StateFamily::Thermal, StateFamily::Broken, StateFamily::ClosedForm] {
            assert_eq!(f.to_string().parse::<StateFamily>().unwrap(), f);
        }
        assert!("warm".parse::<StateFamily>().is_err());
    }

    #[test]
    fn thermal_states_are_x_states() {
        let s = FamilySettings { n_sites: 8, ..FamilySettings::default() };
        let p = family_states(&ModelPreset::xy(0.7).unwrap(), StateFamily::Thermal, 0.5, &s, &[1, 2]).unwrap();
        for pair in &p.pairs {
            assert!(pair.state.x_violation() < 1e-10);
            assert_eq!(pair.correlators.gx, 0.0);
        }
        assert!(p.energy_density.is_some());
    }

    #[test]
    fn broken_states_carry_magnetization() {
        // At L = 8 the doublet splitting (~1e-3) swamps hx = 1e-6; use a stronger pin.
        let s = FamilySettings { n_sites: 8, hx: 1e-2, ..FamilySettings::default() };
        let p = family_states(&ModelPreset::xy(0.7).unwrap(), StateFamily::Broken, 0.3, &s, &[1]).unwrap();
        assert!(p.pairs[0].correlators.gx > 0.5);
    }

    #[test]
    fn closed_form_needs_xy() {
        let s = FamilySettings::default();
        assert!(family_states(&ModelPreset::Xyx, StateFamily::ClosedForm, 1.0, &s, &[1]).is_err());
        let p = family_states(&ModelPreset::Ising, StateFamily::ClosedForm, 1.5, &s, &[1, 3]).unwrap();
        assert_eq!(p.pairs[1].r, 3);
    }
}
