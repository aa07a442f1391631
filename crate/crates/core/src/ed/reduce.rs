use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::model::Boundary;
use crate::state::{CorrelatorSet, Mat2, StateSource, TwoSiteState, C64};

/// A pure chain state or a weighted mixture of real pure states.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub n_sites: usize,
    pub members: Vec<(f64, Vec<f64>)>,
}

impl ChainState {
    pub fn pure(n_sites: usize, psi: Vec<f64>) -> Self {
        Self { n_sites, members: vec![(1.0, psi)] }
    }

    pub fn mixture(n_sites: usize, members: Vec<(f64, Vec<f64>)>) -> Self {
        Self { n_sites, members }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= j || j >= self.n_sites {
            return Err(Error::IndexOutOfRange { i, j, n_sites: self.n_sites });
        }
        Ok(())
    }
}

/// Sites of the pair at distance `r`: any pair on a ring, the central pair on an open chain.
pub fn pair_sites(n_sites: usize, boundary: Boundary, r: usize) -> Result<(usize, usize)> {
    let max_r = match boundary {
        Boundary::Periodic => n_sites / 2,
        Boundary::Open => n_sites - 1,
    };
    if r == 0 || r > max_r {
        return Err(Error::IndexOutOfRange { i: 0, j: r, n_sites });
    }
    let i = match boundary {
        Boundary::Periodic => 0,
        Boundary::Open => (n_sites - 1 - r) / 2,
    };
    Ok((i, i + r))
}

/// Partial trace over every site except `i` and `j`.
pub fn reduce_two_site(state: &ChainState, i: usize, j: usize, source: StateSource) -> Result<TwoSiteState> {
    state.check_pair(i, j)?;
    let (bi, bj) = (1usize << i, 1usize << j);
    let mut rho = Matrix4::<f64>::zeros();
    for (w, psi) in &state.members {
        let mut acc = Matrix4::<f64>::zeros();
        for s in 0..psi.len() {
            if s & (bi | bj) != 0 {
                continue;
            }
            let v = [psi[s], psi[s | bj], psi[s | bi], psi[s | bi | bj]];
            for a in 0..4 {
                if v[a] == 0.0 {
                    continue;
                }
                for b in 0..4 {
                    acc[(a, b)] += v[a] * v[b];
                }
            }
        }
        rho += acc * *w;
    }
    Ok(TwoSiteState::from_real(&rho, source)?.with_distance(j - i))
}

pub fn reduce_one_site(state: &ChainState, i: usize) -> Result<Mat2> {
    if i >= state.n_sites {
        return Err(Error::IndexOutOfRange { i, j: i, n_sites: state.n_sites });
    }
    let bi = 1usize << i;
    let mut m = Matrix2::<f64>::zeros();
    for (w, psi) in &state.members {
        for s in 0..psi.len() {
            if s & bi != 0 {
                continue;
            }
            let (u, d) = (psi[s], psi[s | bi]);
            m[(0, 0)] += w * u * u;
            m[(0, 1)] += w * u * d;
            m[(1, 1)] += w * d * d;
        }
    }
    m[(1, 0)] = m[(0, 1)];
    Ok(m.map(|x| C64::new(x, 0.0)))
}

/// Expectation values of σ strings on sites (i, j), evaluated directly on
/// the amplitudes (independently of the partial trace).
pub fn correlators_at(state: &ChainState, i: usize, j: usize) -> Result<CorrelatorSet> {
    state.check_pair(i, j)?;
    let (bi, bj) = (1usize << i, 1usize << j);
    let z = |s: usize, b: usize| if s & b == 0 { 1.0 } else { -1.0 };
    let mut c = [0.0f64; 8];
    for (w, psi) in &state.members {
        let mut t = [0.0f64; 8];
        for (s, &a) in psi.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let p = a * a;
            t[0] += psi[s ^ bi] * a; // σx_i
            t[1] += psi[s ^ bj] * a; // σx_j
            t[2] += p * z(s, bi); // σz_i
            t[3] += p * z(s, bj); // σz_j
            let flip = psi[s ^ bi ^ bj] * a;
            t[4] += flip; // σx σx
            t[5] -= flip * z(s, bi) * z(s, bj); // σy σy
            t[6] += p * z(s, bi) * z(s, bj); // σz σz
            t[7] += psi[s ^ bi] * a * z(s, bj) + psi[s ^ bj] * a * z(s, bi); // σxσz + σzσx
        }
        for k in 0..8 {
            c[k] += w * t[k];
        }
    }
    Ok(CorrelatorSet {
        r: j - i,
        gx: 0.5 * (c[0] + c[1]),
        gz: 0.5 * (c[2] + c[3]),
        gxx: c[4],
        gyy: c[5],
        gzz: c[6],
        gxz: 0.5 * c[7],
    })
}

/// Correlators of the standard pair at distance `r` (see [`pair_sites`]).
pub fn correlators(state: &ChainState, r: usize, boundary: Boundary) -> Result<CorrelatorSet> {
    let (i, j) = pair_sites(state.n_sites, boundary, r)?;
    correlators_at(state, i, j)
}
