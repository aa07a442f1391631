//! Random two-qubit states and an independent brute-force discord oracle.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix2, Matrix4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qdchain::state::{Mat4, C64};
use qdchain::TwoSiteState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// ρ = G G† / tr with G a 4×rank complex Ginibre matrix.
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> TwoSiteState {
    let g: Vec<[C64; 4]> = (0..rank).map(|_| [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)]).collect();
    let mut m = Mat4::zeros();
    for col in &g {
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] += col[i] * col[j].conj();
            }
        }
    }
    let tr = m.trace();
    TwoSiteState::synthetic(m / tr).unwrap()
}

/// Random X-state: Dirichlet diagonal plus the two allowed coherences.
pub fn random_x_state(rng: &mut ChaCha8Rng) -> TwoSiteState {
    let w: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / s).collect();
    let z1 = C64::from_polar((p[0] * p[3]).sqrt() * rng.random::<f64>(), rng.random::<f64>() * 2.0 * PI);
    let z2 = C64::from_polar((p[1] * p[2]).sqrt() * rng.random::<f64>(), rng.random::<f64>() * 2.0 * PI);
    let mut m = Mat4::zeros();
    for i in 0..4 {
        m[(i, i)] = C64::new(p[i], 0.0);
    }
    m[(0, 3)] = z1;
    m[(3, 0)] = z1.conj();
    m[(1, 2)] = z2;
    m[(2, 1)] = z2.conj();
    TwoSiteState::synthetic(m).unwrap()
}

/// Mixed bag: Ginibre ranks 1–4 and X-states.
pub fn random_state(rng: &mut ChaCha8Rng) -> TwoSiteState {
    match rng.random_range(0..5) {
        4 => random_x_state(rng),
        k => random_density(rng, k + 1),
    }
}

/// Correlation triple (c1, c2, c3) of a random Bell-diagonal state.
pub fn random_bell_triple(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let w: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    let l: Vec<f64> = w.iter().map(|x| x / s).collect();
    // Inverse of λ = (1 − c1 − c2 − c3, 1 − c1 + c2 + c3, 1 + c1 − c2 + c3, 1 + c1 + c2 − c3)/4.
    let c1 = -l[0] - l[1] + l[2] + l[3];
    let c2 = -l[0] + l[1] - l[2] + l[3];
    let c3 = -l[0] + l[1] + l[2] - l[3];
    (c1, c2, c3)
}

/// Random single-qubit unitary (QR of a Ginibre matrix).
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let g = Matrix2::from_fn(|_, _| gaussian(rng));
    g.qr().q()
}

/// ρ with the two parties exchanged.
pub fn swapped(state: &TwoSiteState) -> TwoSiteState {
    let perm = [0, 2, 1, 3];
    let m = state.matrix();
    TwoSiteState::synthetic(Matrix4::from_fn(|i, j| m[(perm[i], perm[j])])).unwrap()
}

fn h2(p: f64) -> f64 {
    let f = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    f(p) + f(1.0 - p)
}

fn entropy_of(eigs: impl Iterator<Item = f64>) -> f64 {
    eigs.map(|x| if x <= 1e-300 { 0.0 } else { -x * x.log2() }).sum()
}

/// Oracle quantities computed without the library's optimizer.
pub struct BruteForce {
    pub mutual_information: f64,
    /// Smallest discord over the 181 × 360 (1° × 1°) measurement grid on B.
    pub discord: f64,
}

pub fn brute_force_discord(state: &TwoSiteState) -> BruteForce {
    let rho = state.matrix();
    let s_ab = entropy_of(rho.symmetric_eigenvalues().iter().copied());
    let ra = Matrix2::from_fn(|a, ap| rho[(2 * a, 2 * ap)] + rho[(2 * a + 1, 2 * ap + 1)]);
    let rb = Matrix2::from_fn(|b, bp| rho[(b, bp)] + rho[(2 + b, 2 + bp)]);
    let s_a = entropy_of(ra.symmetric_eigenvalues().iter().copied());
    let s_b = entropy_of(rb.symmetric_eigenvalues().iter().copied());
    let mi = s_a + s_b - s_ab;
    let mut best = f64::INFINITY;
    for it in 0..=180 {
        let theta = it as f64 * PI / 180.0;
        for ip in 0..360 {
            let phi = ip as f64 * PI / 180.0;
            // Bloch direction n and its antipode.
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let mut cond = 0.0;
            for sign in [1.0, -1.0] {
                // Π = (I + sign n·σ)/2 on B.
                let pb = Matrix2::new(
                    Complex::new(0.5 * (1.0 + sign * n[2]), 0.0),
                    Complex::new(0.5 * sign * n[0], -0.5 * sign * n[1]),
                    Complex::new(0.5 * sign * n[0], 0.5 * sign * n[1]),
                    Complex::new(0.5 * (1.0 - sign * n[2]), 0.0),
                );
                // Unnormalized ρ_A|k = tr_B[(I ⊗ Π) ρ].
                let m = Matrix2::from_fn(|a, ap| {
                    let mut acc = C64::new(0.0, 0.0);
                    for b in 0..2 {
                        for bp in 0..2 {
                            acc += pb[(bp, b)] * rho[(2 * a + b, 2 * ap + bp)];
                        }
                    }
                    acc
                });
                let p = (m[(0, 0)] + m[(1, 1)]).re;
                if p < 1e-14 {
                    continue;
                }
                let half = 0.5 * (m[(0, 0)] - m[(1, 1)]).re;
                let disc = (half * half + m[(0, 1)].norm_sqr()).sqrt();
                cond += p * h2((0.5 * p + disc) / p);
            }
            best = best.min(cond);
        }
    }
    let c = s_a - best;
    BruteForce { mutual_information: mi, discord: mi - c }
}
