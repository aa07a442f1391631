//! Symmetry-adapted bases: Z2 parity (popcount) and, on even rings,
//! translation momenta k = 0 and k = π, both of which keep the
//! Hamiltonian real.

use nalgebra::DMatrix;

use super::hamiltonian::HamiltonianMatrix;
use super::lanczos::LinearOperator;

const NONE: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Momentum {
    Zero,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorLabel {
    pub parity: Option<Parity>,
    pub momentum: Option<Momentum>,
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = match self.parity {
            Some(Parity::Even) => "even",
            Some(Parity::Odd) => "odd",
            None => "any",
        };
        let k = match self.momentum {
            Some(Momentum::Zero) => "k=0",
            Some(Momentum::Pi) => "k=pi",
            None => "k=any",
        };
        write!(f, "{p},{k}")
    }
}

/// Representative states of one sector plus the lookup tables mapping
/// every basis state to (representative index, translation distance).
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub label: SectorLabel,
    n_sites: usize,
    reps: Vec<u32>,
    periods: Vec<u32>,
    lookup: Vec<u32>,
    shifts: Vec<u8>,
}

#[inline]
fn rotate(s: u32, n: usize) -> u32 {
    let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    ((s << 1) | (s >> (n - 1))) & mask
}

impl SectorBasis {
    pub fn new(n_sites: usize, label: SectorLabel) -> Self {
        let dim = 1usize << n_sites;
        let mut lookup = vec![UNSET; dim];
        let mut shifts = vec![0u8; if label.momentum.is_some() { dim } else { 0 }];
        let mut reps = Vec::new();
        let mut periods = Vec::new();
        let parity_ok = |s: u32| match label.parity {
            None => true,
            Some(Parity::Even) => s.count_ones() % 2 == 0,
            Some(Parity::Odd) => s.count_ones() % 2 == 1,
        };
        for s in 0..dim as u32 {
            if lookup[s as usize] != UNSET {
                continue;
            }
            match label.momentum {
                None => {
                    if parity_ok(s) {
                        lookup[s as usize] = reps.len() as u32;
                        reps.push(s);
                        periods.push(1);
                    } else {
                        lookup[s as usize] = NONE;
                    }
                }
                Some(k) => {
                    // s is the smallest member of its orbit since states are visited in order.
                    let mut period = n_sites;
                    let mut t = rotate(s, n_sites);
                    for l in 1..n_sites {
                        if t == s {
                            period = l;
                            break;
                        }
                        t = rotate(t, n_sites);
                    }
                    let compatible = match k {
                        Momentum::Zero => true,
                        Momentum::Pi => period % 2 == 0,
                    };
                    let tag = if compatible && parity_ok(s) { reps.len() as u32 } else { NONE };
                    let mut t = s;
                    for l in 0..period {
                        lookup[t as usize] = tag;
                        shifts[t as usize] = l as u8;
                        t = rotate(t, n_sites);
                    }
                    if tag != NONE {
                        reps.push(s);
                        periods.push(period as u32);
                    }
                }
            }
        }
        Self { label, n_sites, reps, periods, lookup, shifts }
    }

    pub fn dimension(&self) -> usize {
        self.reps.len()
    }

    #[inline]
    fn phase(&self, shift: u8) -> f64 {
        match self.label.momentum {
            Some(Momentum::Pi) if shift % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }

    /// Full-space amplitudes of a sector vector.
    pub fn expand(&self, c: &[f64]) -> Vec<f64> {
        let mut psi = vec![0.0; 1 << self.n_sites];
        for (s, out) in psi.iter_mut().enumerate() {
            let b = self.lookup[s];
            if b == NONE {
                continue;
            }
            let b = b as usize;
            match self.label.momentum {
                None => *out = c[b],
                Some(_) => {
                    let l = self.shifts[s];
                    *out = c[b] * self.phase(l) / (self.periods[b] as f64).sqrt();
                }
            }
        }
        psi
    }

    pub fn operator<'a>(&'a self, h: &'a HamiltonianMatrix) -> SectorOperator<'a> {
        SectorOperator { basis: self, h }
    }
}

/// Hamiltonian restricted to a sector.
pub struct SectorOperator<'a> {
    basis: &'a SectorBasis,
    h: &'a HamiltonianMatrix,
}

impl SectorOperator<'_> {
    /// Calls `f(a, H[b, a])` for the entries of row `b` (may repeat `a`).
    #[inline]
    fn row(&self, b: usize, mut f: impl FnMut(usize, f64)) {
        let bs = self.basis;
        let s = bs.reps[b] as usize;
        f(b, self.h.diagonal(s));
        let rb = bs.periods[b] as f64;
        self.h.for_each_offdiag(s, |t, amp| {
            let a = bs.lookup[t];
            if a == NONE {
                return;
            }
            let a = a as usize;
            match bs.label.momentum {
                None => f(a, amp),
                Some(_) => {
                    let factor = bs.phase(bs.shifts[t]) * (rb / bs.periods[a] as f64).sqrt();
                    f(a, amp * factor);
                }
            }
        });
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.basis.dimension();
        let mut m = DMatrix::zeros(d, d);
        for b in 0..d {
            self.row(b, |a, v| m[(b, a)] += v);
        }
        m
    }
}

impl LinearOperator for SectorOperator<'_> {
    fn dim(&self) -> usize {
        self.basis.dimension()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (b, yb) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            self.row(b, |a, v| acc += v * x[a]);
            *yb = acc;
        }
    }
}
