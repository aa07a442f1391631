//! Derivatives, extremum location, least-squares fits and factorization
//! detection on (x, y) series taken from sweep rows.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::text_enum;

/// Relative deviation of a step from the mean step tolerated as "uniform".
pub const UNIFORM_GRID_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub points: Vec<(f64, f64)>,
    pub step: f64,
}

/// dy/dx: central differences inside, second-order one-sided differences at the ends.
pub fn numerical_derivative(series: &[(f64, f64)]) -> Result<Derivative> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("derivative needs at least 3 points, got {n}")));
    }
    let step = (series[n - 1].0 - series[0].0) / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::NonUniformGrid("grid must be strictly increasing".into()));
    }
    for w in series.windows(2) {
        let d = w[1].0 - w[0].0;
        if (d - step).abs() > UNIFORM_GRID_TOL * step {
            return Err(Error::NonUniformGrid(format!("step {d} between {} and {} differs from {step}", w[0].0, w[1].0)));
        }
    }
    let y: Vec<f64> = series.iter().map(|p| p.1).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if i == 0 {
            (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * step)
        } else if i == n - 1 {
            (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * step)
        } else {
            (y[i + 1] - y[i - 1]) / (2.0 * step)
        };
        out.push((series[i].0, d));
    }
    Ok(Derivative { points: out, step })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    Min,
    Max,
}

text_enum!(Extremum { Extremum::Min => "min", Extremum::Max => "max" });

/// Vertex of the parabola through the extremal sample and its neighbours.
pub fn locate_extremum(series: &[(f64, f64)], kind: Extremum) -> Result<(f64, f64)> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!("extremum needs at least 3 points, got {}", series.len())));
    }
    let better = |a: f64, b: f64| match kind {
        Extremum::Min => a < b,
        Extremum::Max => a > b,
    };
    let mut k = 0;
    for (i, p) in series.iter().enumerate() {
        if better(p.1, series[k].1) {
            k = i;
        }
    }
    if k == 0 || k == series.len() - 1 {
        return Err(Error::ExtremumAtBoundary(series[k].0));
    }
    let ((x0, y0), (x1, y1), (x2, y2)) = (series[k - 1], series[k], series[k + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if curv == 0.0 {
        return Ok((x1, y1));
    }
    // y = y1 + s (x − x1) + curv (x − x1)² with s the derivative at x1.
    let s = d01 + curv * (x1 - x0);
    let dx = -s / (2.0 * curv);
    Ok((x1 + dx, y1 + s * dx + curv * dx * dx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// y = a + b ln x; coefficients [a, b].
    LogLinear,
    /// y = A x^p; coefficients [A, p].
    PowerLaw,
    /// y = a + b e^{−c x}; coefficients [a, b, c].
    ExponentialPlusConstant,
    /// Q = A |h − h_f|^p q^r; coefficients [A, p, q].
    QuadraticFactorization,
}

text_enum!(FitModel {
    FitModel::LogLinear => "log_linear",
    FitModel::PowerLaw => "power_law",
    FitModel::ExponentialPlusConstant => "exponential_plus_constant",
    FitModel::QuadraticFactorization => "quadratic_factorization",
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub coefficients: Vec<f64>,
    /// Euclidean norm of the residuals of the fitted quantity.
    pub residual_norm: f64,
    /// Smallest and largest abscissa used.
    pub range: (f64, f64),
    pub n_points: usize,
}

fn least_squares(design: DMatrix<f64>, rhs: DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let (rows, cols) = design.shape();
    if rows < cols {
        return Err(Error::InsufficientData(format!("{rows} points for {cols} coefficients")));
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= 1e-12 * smax {
        return Err(Error::DegenerateDesign(format!("singular values {smax:e} .. {smin:e}")));
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::DegenerateDesign(e.to_string()))?;
    let resid = (design * &coef - rhs).norm();
    Ok((coef, resid))
}

fn range_of(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn check_finite(points: &[(f64, f64)]) -> Result<()> {
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InsufficientData("non-finite data".into()));
    }
    Ok(())
}

/// Least squares y = a + b ln x.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<FitResult> {
    check_finite(points)?;
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("log-linear fit needs at least 3 sizes, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| p.0 <= 0.0) {
        return Err(Error::InvalidSpec(format!("log-linear fit needs positive x, got {}", p.0)));
    }
    let design = DMatrix::from_fn(points.len(), 2, |i, j| if j == 0 { 1.0 } else { points[i].0.ln() });
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let (c, resid) = least_squares(design, rhs)?;
    Ok(FitResult {
        model: FitModel::LogLinear,
        coefficients: vec![c[0], c[1]],
        residual_norm: resid,
        range: range_of(points.iter().map(|p| p.0)),
        n_points: points.len(),
    })
}

/// y = A x^p by least squares on (ln x, ln y); residual in log space.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    check_finite(points)?;
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!("power-law fit needs at least 2 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| p.0 <= 0.0 || p.1 <= 0.0) {
        return Err(Error::InvalidSpec(format!("power-law fit needs positive data, got ({}, {})", p.0, p.1)));
    }
    let design = DMatrix::from_fn(points.len(), 2, |i, j| if j == 0 { 1.0 } else { points[i].0.ln() });
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1.ln()));
    let (c, resid) = least_squares(design, rhs)?;
    Ok(FitResult {
        model: FitModel::PowerLaw,
        coefficients: vec![c[0].exp(), c[1]],
        residual_norm: resid,
        range: range_of(points.iter().map(|p| p.0)),
        n_points: points.len(),
    })
}

/// Linear (a, b) and residual for fixed rate c.
fn exp_linear_part(points: &[(f64, f64)], c: f64) -> Result<(f64, f64, f64)> {
    let design = DMatrix::from_fn(points.len(), 2, |i, j| if j == 0 { 1.0 } else { (-c * points[i].0).exp() });
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let (coef, resid) = least_squares(design, rhs)?;
    Ok((coef[0], coef[1], resid))
}

/// y = a + b e^{−c x}: (a, b) solved exactly for each c, c found by a
/// log-spaced scan over [1e-3, 50] followed by golden-section refinement.
pub fn fit_exponential_plus_constant(points: &[(f64, f64)]) -> Result<FitResult> {
    check_finite(points)?;
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!("exponential fit needs at least 4 points, got {}", points.len())));
    }
    let obj = |lc: f64| exp_linear_part(points, lc.exp()).map(|r| r.2).unwrap_or(f64::INFINITY);
    let (lo, hi) = (1e-3f64.ln(), 50f64.ln());
    let n = 400;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&g| obj(g)).collect();
    let k = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty grid");
    if !vals[k].is_finite() {
        return Err(Error::DegenerateDesign("no admissible decay rate".into()));
    }
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(n)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (obj(x1), obj(x2));
    for _ in 0..200 {
        if b - a < 1e-12 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = obj(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = obj(x2);
        }
    }
    let mut lc = 0.5 * (a + b);
    if obj(lc) > vals[k] {
        lc = grid[k];
    }
    let c = lc.exp();
    let (ca, cb, resid) = exp_linear_part(points, c)?;
    Ok(FitResult {
        model: FitModel::ExponentialPlusConstant,
        coefficients: vec![ca, cb, c],
        residual_norm: resid,
        range: range_of(points.iter().map(|p| p.0)),
        n_points: points.len(),
    })
}

/// Samples (r, h, Q) near h_f. Points with |h − h_f| > window, h = h_f or
/// Q ≤ q_floor are dropped; the law is fitted in log space.
pub fn fit_factorization_law(samples: &[(usize, f64, f64)], h_f: f64, window: f64, q_floor: f64) -> Result<FitResult> {
    let used: Vec<&(usize, f64, f64)> = samples
        .iter()
        .filter(|s| s.2.is_finite() && s.1.is_finite())
        .filter(|s| (s.1 - h_f).abs() <= window && s.1 != h_f && s.2 > q_floor)
        .collect();
    let mut rs: Vec<usize> = used.iter().map(|s| s.0).collect();
    rs.sort();
    rs.dedup();
    if used.len() < 4 || rs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "factorization fit needs at least 4 points over 2 distances, got {} points over {} distances",
            used.len(),
            rs.len()
        )));
    }
    let design = DMatrix::from_fn(used.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => (used[i].1 - h_f).abs().ln(),
        _ => used[i].0 as f64,
    });
    let rhs = DVector::from_iterator(used.len(), used.iter().map(|s| s.2.ln()));
    let (c, resid) = least_squares(design, rhs)?;
    Ok(FitResult {
        model: FitModel::QuadraticFactorization,
        coefficients: vec![c[0].exp(), c[1], c[2].exp()],
        residual_norm: resid,
        range: range_of(used.iter().map(|s| s.1)),
        n_points: used.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub r1: usize,
    pub r2: usize,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationEstimate {
    /// Every pairwise crossing in the window.
    pub crossings: Vec<Crossing>,
    /// One crossing per pair, all close together: the common intersection.
    pub common: Vec<Crossing>,
    pub mean: f64,
    /// max − min of the common crossing fields.
    pub spread: f64,
    /// Analytic value, when the caller knows it.
    pub expected: Option<f64>,
}

/// Differences smaller than this count as equal curves, not as a sign change.
pub const CROSSING_NOISE: f64 = 1e-12;

/// Crossings of two curves sampled on the same grid, inside (lo, hi).
fn pair_crossings(a: &[(f64, f64)], b: &[(f64, f64)], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if a.len() != b.len() || a.iter().zip(b).any(|(p, q)| (p.0 - q.0).abs() > 1e-12 * p.0.abs().max(1.0)) {
        return Err(Error::InvalidSpec("curves must share the same field grid".into()));
    }
    let d: Vec<(f64, f64)> = a.iter().zip(b).map(|(p, q)| (p.0, p.1 - q.1)).collect();
    let sign = |v: f64| if v > CROSSING_NOISE { 1 } else if v < -CROSSING_NOISE { -1 } else { 0 };
    let mut out = Vec::new();
    let mut last: Option<(f64, f64, i32)> = None;
    let mut zero_run: Vec<f64> = Vec::new();
    for &(h, v) in &d {
        let s = sign(v);
        if s == 0 {
            zero_run.push(h);
            continue;
        }
        if let Some((h0, v0, s0)) = last {
            if s != s0 {
                let x = if zero_run.is_empty() {
                    h0 + (h - h0) * v0 / (v0 - v)
                } else {
                    zero_run.iter().sum::<f64>() / zero_run.len() as f64
                };
                if x > lo && x < hi {
                    out.push(x);
                }
            }
        }
        zero_run.clear();
        last = Some((h, v, s));
    }
    Ok(out)
}

/// Pairwise crossings of Q(h; r) curves inside the open window (lo, hi).
///
/// Curves may cross more than once; the factorization point is the place
/// where every pair crosses. Each crossing of the first pair seeds a
/// cluster made of the nearest crossing of every other pair; clusters
/// wider than three grid steps are discarded and the tightest one is kept.
pub fn find_factorization(curves: &[(usize, Vec<(f64, f64)>)], window: (f64, f64), expected: Option<f64>) -> Result<FactorizationEstimate> {
    if curves.len() < 2 {
        return Err(Error::InsufficientData(format!("need curves for at least 2 distances, got {}", curves.len())));
    }
    let grid = &curves[0].1;
    let step = if grid.len() > 1 { (grid[grid.len() - 1].0 - grid[0].0) / (grid.len() - 1) as f64 } else { 0.0 };
    let mut per_pair: Vec<Vec<Crossing>> = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let xs = pair_crossings(&curves[i].1, &curves[j].1, window.0, window.1)?;
            per_pair.push(xs.into_iter().map(|h| Crossing { r1: curves[i].0, r2: curves[j].0, h }).collect());
        }
    }
    let crossings: Vec<Crossing> = per_pair.iter().flatten().cloned().collect();
    let mut best: Option<(f64, Vec<Crossing>)> = None;
    for seed in &per_pair[0] {
        let mut cluster = vec![seed.clone()];
        for other in &per_pair[1..] {
            match other.iter().min_by(|a, b| (a.h - seed.h).abs().total_cmp(&(b.h - seed.h).abs())) {
                Some(c) => cluster.push(c.clone()),
                None => break,
            }
        }
        if cluster.len() != per_pair.len() {
            continue;
        }
        let (lo, hi) = range_of(cluster.iter().map(|c| c.h));
        if hi - lo > 3.0 * step {
            continue;
        }
        if best.as_ref().map_or(true, |b| hi - lo < b.0) {
            best = Some((hi - lo, cluster));
        }
    }
    let Some((spread, common)) = best else {
        return Err(Error::NotFound(format!("no common crossing of the curves in ({}, {})", window.0, window.1)));
    };
    let mean = common.iter().map(|c| c.h).sum::<f64>() / common.len() as f64;
    Ok(FactorizationEstimate { crossings, common, mean, spread, expected })
}
