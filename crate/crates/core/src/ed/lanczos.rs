//! Extremal eigenpairs of real symmetric operators: dense diagonalization
//! for small problems, thick-restarted block Lanczos with full
//! re-orthogonalization otherwise.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// y = A x. `y` is fully overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    /// Converged when ‖A y − θ y‖ ≤ tol · max(1, |θ|).
    pub tol: f64,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub block: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_basis: 160, max_restarts: 200, block: 2, seed: 0x5eed_0001 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub matvecs: usize,
}

/// Lowest `count` eigenpairs of a dense symmetric matrix.
pub fn dense_lowest(m: &DMatrix<f64>, count: usize) -> EigenPairs {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let count = count.min(order.len());
    EigenPairs {
        values: order[..count].iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order[..count].iter().map(|&i| eig.eigenvectors.column(i).iter().cloned().collect()).collect(),
        matvecs: 0,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram–Schmidt against `basis`.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|q| dot(q, v)).collect();
        for (c, q) in coeffs.iter().zip(basis) {
            axpy(-c, q, v);
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) - 0.5).collect()
}

/// Lowest `count` eigenpairs of `op`.
pub fn lowest_eigenpairs<O: LinearOperator>(op: &O, count: usize, opts: &LanczosOptions) -> Result<EigenPairs> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::NonConvergence("empty operator".into()));
    }
    let count = count.min(n);
    if n <= 64 {
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut y = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            op.apply(&e, &mut y);
            m.column_mut(j).copy_from_slice(&y);
        }
        let mut r = dense_lowest(&m, count);
        r.matvecs = n;
        return Ok(r);
    }

    let block = opts.block.max(count).max(1);
    // Keep the Krylov basis within ~400 MB.
    let mem_cap = (50_000_000 / n).max(3 * block + count + 2);
    let max_basis = opts.max_basis.min(mem_cap).min(n).max(2 * block + count + 2);
    let keep = (count + block).min(max_basis - block);
    let check_every = 4 * block;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ n as u64);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
    // Projected matrix T = Vᵀ A V, stored densely, row-major by basis index.
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
    let mut pending: Vec<Vec<f64>> = (0..block).map(|_| random_vector(&mut rng, n)).collect();
    let mut matvecs = 0usize;
    let mut restarts = 0usize;
    let mut since_check = 0usize;

    loop {
        // Extend the basis with the pending block.
        let mut images = Vec::with_capacity(pending.len());
        for mut v in pending.drain(..) {
            orthogonalize(&mut v, &basis);
            let mut nv = norm(&v);
            if nv < 1e-10 {
                // Invariant subspace reached in this direction; continue with a fresh one.
                v = random_vector(&mut rng, n);
                orthogonalize(&mut v, &basis);
                nv = norm(&v);
                if nv < 1e-10 {
                    continue;
                }
            }
            v.iter_mut().for_each(|x| *x /= nv);
            let mut w = vec![0.0; n];
            op.apply(&v, &mut w);
            matvecs += 1;
            basis.push(v);
            let col: Vec<f64> = basis.iter().map(|q| dot(q, &w)).collect();
            for (row, &c) in t.iter_mut().zip(&col) {
                row.push(c);
            }
            t.push(col);
            images.push(w);
        }
        let m = basis.len();
        since_check += images.len();

        // Residual directions: images of the newest vectors outside span(V).
        let mut resid: Vec<Vec<f64>> = images;
        for r in resid.iter_mut() {
            orthogonalize(r, &basis);
        }
        let exhausted = m >= n || resid.is_empty();
        let need_restart = m + block > max_basis;
        if !(exhausted || need_restart || since_check >= check_every) {
            pending = resid;
            continue;
        }
        since_check = 0;

        let tm = DMatrix::from_fn(m, m, |i, j| t[i][j]);
        let eig = SymmetricEigen::new(tm);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let nres = resid.len();
        let last = m - nres;
        let residual_norm = |k: usize| -> f64 {
            let col = eig.eigenvectors.column(order[k]);
            let mut acc = vec![0.0; n];
            for (c, r) in resid.iter().enumerate() {
                axpy(col[last + c], r, &mut acc);
            }
            norm(&acc)
        };
        let converged = exhausted
            || (m >= count && (0..count).all(|k| residual_norm(k) <= opts.tol * eig.eigenvalues[order[k]].abs().max(1.0)));
        let ritz = |k: usize| -> Vec<f64> {
            let col = eig.eigenvectors.column(order[k]);
            let mut y = vec![0.0; n];
            for (c, q) in col.iter().zip(&basis) {
                axpy(*c, q, &mut y);
            }
            let ny = norm(&y);
            y.iter_mut().for_each(|x| *x /= ny);
            y
        };
        if converged {
            let count = count.min(m);
            return Ok(EigenPairs {
                values: (0..count).map(|k| eig.eigenvalues[order[k]]).collect(),
                vectors: (0..count).map(ritz).collect(),
                matvecs,
            });
        }
        if need_restart {
            restarts += 1;
            if restarts > opts.max_restarts {
                return Err(Error::NonConvergence(format!(
                    "block Lanczos: no convergence after {restarts} restarts ({matvecs} matvecs, dim {n})"
                )));
            }
            let keep = keep.min(m);
            let new_basis: Vec<Vec<f64>> = (0..keep).map(ritz).collect();
            let mut new_basis_orth: Vec<Vec<f64>> = Vec::with_capacity(keep);
            for mut y in new_basis {
                orthogonalize(&mut y, &new_basis_orth);
                let ny = norm(&y);
                y.iter_mut().for_each(|x| *x /= ny);
                new_basis_orth.push(y);
            }
            basis = new_basis_orth;
            t = (0..keep)
                .map(|i| (0..keep).map(|j| if i == j { eig.eigenvalues[order[i]] } else { 0.0 }).collect())
                .collect();
        }
        pending = resid;
    }
}
