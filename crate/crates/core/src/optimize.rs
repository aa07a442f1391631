//! Deterministic minimization over measurement directions: coarse angle
//! grid followed by Nelder–Mead refinement.

use std::f64::consts::PI;

use crate::state::canonical_angles;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop when every vertex lies within `xtol` of the best one (per coordinate).
    pub xtol: f64,
    /// ... and the vertex values differ by at most `ftol`.
    pub ftol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { xtol: 1e-7, ftol: 1e-14, max_evals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let converged = loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread_x = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread_f = values[n] - values[0];
        if spread_x <= opts.xtol && spread_f <= opts.ftol.max(4.0 * f64::EPSILON * values[0].abs()) {
            break true;
        }
        if evals >= opts.max_evals {
            break false;
        }

        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
        let towards = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect() };
        let xr = towards(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = towards(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = towards(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = towards(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let v: Vec<f64> = (0..n).map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k])).collect();
                    values[i] = f(&v);
                    simplex[i] = v;
                }
                evals += n;
            }
        }
    };
    NelderMeadResult { x: simplex[0].clone(), value: values[0], evaluations: evals, converged }
}

/// Grid over measurement directions. Only the upper hemisphere is
/// sampled: (θ, φ) and (π − θ, φ + π) give the same projector pair.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    pub step: f64,
    /// (θ, φ) pairs, sorted by θ then φ; the pole appears once.
    pub points: Vec<(f64, f64)>,
    n_theta: usize,
    n_phi: usize,
}

impl DirectionGrid {
    /// `divisions` steps per π.
    pub fn new(divisions: usize) -> Self {
        let step = PI / divisions as f64;
        let n_theta = divisions / 2 + 1;
        let n_phi = 2 * divisions;
        let mut points = vec![(0.0, 0.0)];
        for i in 1..n_theta {
            for j in 0..n_phi {
                points.push((i as f64 * step, j as f64 * step));
            }
        }
        Self { step, points, n_theta, n_phi }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            0
        } else {
            1 + (i - 1) * self.n_phi + j % self.n_phi
        }
    }

    fn neighbours(&self, idx: usize) -> Vec<usize> {
        if idx == 0 {
            return (0..self.n_phi).map(|j| self.index(1, j)).collect();
        }
        let i = 1 + (idx - 1) / self.n_phi;
        let j = (idx - 1) % self.n_phi;
        let mut out = vec![self.index(i, j + 1), self.index(i, j + self.n_phi - 1), self.index(i - 1, j)];
        if i + 1 < self.n_theta {
            out.push(self.index(i + 1, j));
        } else {
            // Across the equator: (θ + step, φ) ≡ (θ − step, φ + π).
            out.push(self.index(i - 1, j + self.n_phi / 2));
        }
        out
    }

    /// Indices of up to `k` grid local minima, best first (ties: smaller θ, then φ);
    /// padded with the best remaining points if there are fewer minima.
    pub fn best_seeds(&self, values: &[f64], k: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut seeds: Vec<usize> = order
            .iter()
            .cloned()
            .filter(|&idx| self.neighbours(idx).iter().all(|&nb| values[idx] <= values[nb]))
            .take(k)
            .collect();
        for idx in order {
            if seeds.len() >= k {
                break;
            }
            if !seeds.contains(&idx) {
                seeds.push(idx);
            }
        }
        seeds
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMinimum {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f(θ, φ)` over directions: grid with `divisions` steps per π,
/// then Nelder–Mead from the best `seeds` grid minima.
pub fn minimize_direction<F: Fn(f64, f64) -> f64>(f: F, divisions: usize, seeds: usize, nm: &NelderMeadOptions) -> SphereMinimum {
    let grid = DirectionGrid::new(divisions);
    let values: Vec<f64> = grid.points.iter().map(|&(t, p)| f(t, p)).collect();
    let mut evaluations = values.len();
    let starts = grid.best_seeds(&values, seeds);
    let (t0, p0) = grid.points[starts[0]];
    let mut best = SphereMinimum { value: values[starts[0]], theta: t0, phi: p0, evaluations: 0, converged: false };
    let mut all_converged = true;
    for &s in &starts {
        let (t, p) = grid.points[s];
        let r = nelder_mead(|x| f(x[0], x[1]), &[t, p], &[grid.step, grid.step], nm);
        evaluations += r.evaluations;
        all_converged &= r.converged;
        let (theta, phi) = canonical_angles(r.x[0], r.x[1]);
        let better = r.value < best.value
            || (r.value == best.value && (theta, phi) < (best.theta, best.phi));
        if better {
            best = SphereMinimum { value: r.value, theta, phi, evaluations: 0, converged: false };
        }
    }
    best.evaluations = evaluations;
    best.converged = all_converged;
    best
}
