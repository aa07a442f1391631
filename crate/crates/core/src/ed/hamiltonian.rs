use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{Boundary, ChainSpec};

/// Largest chain handled by the matrix-free engine.
pub const MAX_SITES: usize = 20;
/// Largest chain for which a full dense matrix may be materialized.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Storage {
    Dense,
    Sparse,
}

/// XYZ chain Hamiltonian in the σz product basis.
///
/// Basis state `s` has bit `i` set when site `i` is in the σz = −1 state.
/// The matrix is real symmetric and applied matrix-free; `to_dense` is
/// available for small chains.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    spec: ChainSpec,
    bonds: Vec<(usize, usize)>,
    /// Off-diagonal amplitude of σxσx + σyσy terms: flips of parallel pairs.
    same: f64,
    /// Same, for antiparallel pairs.
    diff: f64,
    jz: f64,
    h: f64,
    hx: f64,
    diag: Vec<f64>,
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    let n = spec.n_sites;
    if n > MAX_SITES {
        return Err(Error::TooLarge { n_sites: n, max: MAX_SITES });
    }
    let p = spec.to_pauli();
    let bonds: Vec<(usize, usize)> = (0..spec.n_bonds()).map(|b| (b, (b + 1) % n)).collect();
    let mut h = HamiltonianMatrix {
        spec: *spec,
        bonds,
        same: p.jx - p.jy,
        diff: p.jx + p.jy,
        jz: p.jz,
        h: p.h,
        hx: p.hx,
        diag: Vec::new(),
    };
    h.diag = (0..1usize << n).map(|s| h.diagonal_element(s)).collect();
    Ok(h)
}

impl HamiltonianMatrix {
    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn n_sites(&self) -> usize {
        self.spec.n_sites
    }

    pub fn dimension(&self) -> usize {
        1 << self.spec.n_sites
    }

    pub fn pinning(&self) -> f64 {
        self.hx
    }

    pub fn storage(&self) -> Storage {
        if self.spec.n_sites <= MAX_DENSE_SITES {
            Storage::Dense
        } else {
            Storage::Sparse
        }
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    fn diagonal_element(&self, s: usize) -> f64 {
        let z = |i: usize| if s >> i & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for &(i, j) in &self.bonds {
            e += self.jz * z(i) * z(j);
        }
        let down = s.count_ones() as f64;
        let n = self.spec.n_sites as f64;
        e - self.h * (n - 2.0 * down)
    }

    #[inline]
    pub fn diagonal(&self, s: usize) -> f64 {
        self.diag[s]
    }

    /// Calls `f(t, H[t, s])` for every nonzero off-diagonal element in column `s`.
    #[inline]
    pub fn for_each_offdiag(&self, s: usize, mut f: impl FnMut(usize, f64)) {
        for &(i, j) in &self.bonds {
            let parallel = (s >> i & 1) == (s >> j & 1);
            let amp = if parallel { self.same } else { self.diff };
            if amp != 0.0 {
                f(s ^ (1 << i) ^ (1 << j), amp);
            }
        }
        if self.hx != 0.0 {
            for i in 0..self.spec.n_sites {
                f(s ^ (1 << i), -self.hx);
            }
        }
    }

    /// y = H x in the full space.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (s, ys) in y.iter_mut().enumerate() {
            let mut acc = self.diag[s] * x[s];
            self.for_each_offdiag(s, |t, a| acc += a * x[t]);
            *ys = acc;
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.spec.n_sites > MAX_DENSE_SITES {
            return Err(Error::TooLarge { n_sites: self.spec.n_sites, max: MAX_DENSE_SITES });
        }
        let d = self.dimension();
        let mut m = DMatrix::zeros(d, d);
        for s in 0..d {
            m[(s, s)] = self.diag[s];
            self.for_each_offdiag(s, |t, a| m[(t, s)] += a);
        }
        Ok(m)
    }

    /// max |H Π − Π H| over matrix elements (Π = ⊗σz, diagonal ±1).
    pub fn parity_commutator_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.dimension() {
            let ps = parity_sign(s);
            self.for_each_offdiag(s, |t, a| {
                worst = worst.max((a * ps - parity_sign(t) * a).abs());
            });
        }
        worst
    }

    /// ⟨ψ|H|ψ⟩ for a normalized real vector.
    pub fn expectation(&self, psi: &[f64]) -> f64 {
        let mut y = vec![0.0; psi.len()];
        self.apply(psi, &mut y);
        psi.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    pub fn boundary(&self) -> Boundary {
        self.spec.boundary
    }
}

#[inline]
pub(crate) fn parity_sign(s: usize) -> f64 {
    if s.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
