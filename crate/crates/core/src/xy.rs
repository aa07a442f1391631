//! Infinite-chain magnetization and two-point correlators of the
//! transverse-field XY chain H = −Σ [(1+γ)/2 σxσx + (1−γ)/2 σyσy] − h Σ σz,
//! from the free-fermion solution (Toeplitz determinants of the kernel G).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::correlations::closed_form::{discord_closed_form_xy, XyClosedForm};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::state::CorrelatorSet;

pub const MAX_DISTANCE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYPoint {
    pub gamma: f64,
    pub h: f64,
}

impl XYPoint {
    pub fn new(gamma: f64, h: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidSpec(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidSpec(format!("h must be finite and non-negative, got {h}")));
        }
        Ok(Self { gamma, h })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XYCorrelators {
    pub point: XYPoint,
    pub sigma_z: f64,
    /// Index r − 1 holds distance r.
    pub gxx: Vec<f64>,
    pub gyy: Vec<f64>,
    pub gzz: Vec<f64>,
}

impl XYCorrelators {
    pub fn r_max(&self) -> usize {
        self.gxx.len()
    }

    pub fn at(&self, r: usize) -> Option<CorrelatorSet> {
        if r == 0 || r > self.r_max() {
            return None;
        }
        Some(CorrelatorSet::symmetric(r, self.sigma_z, self.gxx[r - 1], self.gyy[r - 1], self.gzz[r - 1]))
    }
}

/// G(n) = (1/π) ∫₀^π [cos(kn)(cos k − h) + γ sin(kn) sin k] / Λ(k) dk,
/// Λ = √((cos k − h)² + γ² sin² k), for n = −n_max..=n_max (index n + n_max).
fn kernel(p: &XYPoint, n_max: usize) -> Result<Vec<f64>> {
    let dim = 2 * n_max + 1;
    let (g, h) = (p.gamma, p.h);
    let f = |k: f64, out: &mut [f64]| {
        let (s, c) = k.sin_cos();
        let lam = ((c - h).powi(2) + g * g * s * s).sqrt();
        if lam == 0.0 {
            // Only at h = 1, k = 0 where the integrand has a finite limit of measure zero.
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let (a, b) = ((c - h) / lam, g * s / lam);
        for (idx, v) in out.iter_mut().enumerate() {
            let n = idx as f64 - n_max as f64;
            let (sn, cn) = (k * n).sin_cos();
            *v = cn * a + sn * b;
        }
    };
    let r = integrate(f, 0.0, PI, dim, &QuadOptions { abs_tol: 1e-12 * PI, accept_tol: 1e-10 * PI, ..QuadOptions::default() })?;
    Ok(r.values.into_iter().map(|v| v / PI).collect())
}

pub fn xy_magnetization(p: &XYPoint) -> Result<f64> {
    Ok(-kernel(p, 0)?[0])
}

fn toeplitz_det(g: &[f64], n_max: usize, r: usize, shift: i64) -> Result<f64> {
    let m = DMatrix::from_fn(r, r, |i, j| g[(j as i64 - i as i64 + shift + n_max as i64) as usize]);
    let d = m.determinant();
    if !d.is_finite() || d.abs() > 1.0 + 1e-8 {
        return Err(Error::Determinant { r, value: d });
    }
    Ok(d)
}

/// ⟨σz⟩ and gxx, gyy, gzz for r = 1..=r_max.
pub fn xy_correlators(p: &XYPoint, r_max: usize) -> Result<XYCorrelators> {
    if r_max == 0 || r_max > MAX_DISTANCE {
        return Err(Error::InvalidSpec(format!("r_max must lie in 1..={MAX_DISTANCE}, got {r_max}")));
    }
    let n_max = r_max + 1;
    let g = kernel(p, n_max)?;
    let at = |n: i64| g[(n + n_max as i64) as usize];
    let sigma_z = -at(0);
    let mut out = XYCorrelators { point: *p, sigma_z, gxx: vec![], gyy: vec![], gzz: vec![] };
    for r in 1..=r_max {
        out.gxx.push(toeplitz_det(&g, n_max, r, 1)?);
        out.gyy.push(toeplitz_det(&g, n_max, r, -1)?);
        out.gzz.push(sigma_z * sigma_z - at(r as i64) * at(-(r as i64)));
    }
    Ok(out)
}

/// Closed-form one-way correlations for r = 1..=r_max.
pub fn xy_discord_profile(p: &XYPoint, r_max: usize) -> Result<Vec<XyClosedForm>> {
    let c = xy_correlators(p, r_max)?;
    (1..=r_max).map(|r| discord_closed_form_xy(&c.at(r).expect("r in range"))).collect()
}
