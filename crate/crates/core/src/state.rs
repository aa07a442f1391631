//! Two-qubit states, correlator sets and measurement bases.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Eigenvalues in [−PSD_TOL, 0) are clipped; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues above this are round-off and left untouched.
const ROUNDOFF_NEGATIVE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSource {
    Thermal,
    Broken,
    ClosedForm,
    Synthetic,
}

/// Density matrix of a spin pair in the basis {|00⟩, |01⟩, |10⟩, |11⟩}
/// (|0⟩ is the σz = +1 state, index = 2·a + b, party A first).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteState {
    rho: Mat4,
    pub r: Option<usize>,
    pub source: StateSource,
}

impl TwoSiteState {
    /// Validates Hermiticity, unit trace and positivity; tiny negative
    /// eigenvalues are clipped and the matrix renormalized.
    pub fn new(rho: Mat4, source: StateSource) -> Result<Self> {
        let mut herm_err: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                herm_err = herm_err.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if !herm_err.is_finite() || herm_err > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm_err:e})")));
        }
        let rho = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = SymmetricEigen::new(rho);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let rho = if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        } else if min < -ROUNDOFF_NEGATIVE {
            let clipped = eig.eigenvalues.map(|l| l.max(0.0));
            let total: f64 = clipped.iter().sum();
            let d = Matrix4::from_diagonal(&clipped.map(|l| C64::new(l / total, 0.0)));
            let v = eig.eigenvectors;
            let m = v * d * v.adjoint();
            (m + m.adjoint()) * C64::new(0.5, 0.0)
        } else {
            rho
        };
        Ok(Self { rho, r: None, source })
    }

    pub fn with_distance(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    pub fn synthetic(rho: Mat4) -> Result<Self> {
        Self::new(rho, StateSource::Synthetic)
    }

    pub fn from_real(m: &nalgebra::Matrix4<f64>, source: StateSource) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)), source)
    }

    /// Pure state from amplitudes (normalized internally).
    pub fn pure(psi: [C64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(psi);
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = v / C64::new(n, 0.0);
        Self::synthetic(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut e: Vec<f64> = if self.x_violation() == 0.0 {
            // X-state: two independent 2×2 blocks, {|00⟩,|11⟩} and {|01⟩,|10⟩}.
            let r = &self.rho;
            let mut out = Vec::with_capacity(4);
            for (i, j) in [(0, 3), (1, 2)] {
                let (a, d) = (r[(i, i)].re, r[(j, j)].re);
                let half = 0.5 * (a - d);
                let disc = (half * half + r[(i, j)].norm_sqr()).sqrt();
                out.push(0.5 * (a + d) + disc);
                out.push(0.5 * (a + d) - disc);
            }
            out
        } else {
            SymmetricEigen::new(self.rho).eigenvalues.iter().cloned().collect()
        };
        e.sort_by(f64::total_cmp);
        [e[0], e[1], e[2], e[3]]
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Reduced state of party A (first site).
    pub fn marginal_a(&self) -> Mat2 {
        let r = &self.rho;
        Matrix2::new(
            r[(0, 0)] + r[(1, 1)],
            r[(0, 2)] + r[(1, 3)],
            r[(2, 0)] + r[(3, 1)],
            r[(2, 2)] + r[(3, 3)],
        )
    }

    /// Reduced state of party B (second site).
    pub fn marginal_b(&self) -> Mat2 {
        let r = &self.rho;
        Matrix2::new(
            r[(0, 0)] + r[(2, 2)],
            r[(0, 1)] + r[(2, 3)],
            r[(1, 0)] + r[(3, 2)],
            r[(1, 1)] + r[(3, 3)],
        )
    }

    /// Largest modulus among the entries that vanish for an X-state
    /// (the `a`, `b` elements of a Z2-symmetric pair state).
    pub fn x_violation(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    m = m.max(self.rho[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn is_x_state(&self, tol: f64) -> bool {
        self.x_violation() <= tol
    }

    /// Applies a product unitary U_A ⊗ U_B.
    pub fn transformed(&self, ua: &Mat2, ub: &Mat2) -> Result<Self> {
        let u = kron(ua, ub);
        let mut s = Self::new(u * self.rho * u.adjoint(), self.source)?;
        s.r = self.r;
        Ok(s)
    }

    /// Row-major text dump: one line per element, `re im` at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * 50);
        for i in 0..4 {
            for j in 0..4 {
                let z = self.rho[(i, j)];
                out.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
            }
        }
        out
    }

    pub fn from_text(text: &str, source: StateSource) -> Result<Self> {
        let mut vals = Vec::with_capacity(16);
        for (n, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let mut it = line.split_whitespace();
            let mut next = || -> Result<f64> {
                it.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::InvalidState(format!("malformed dump line {}", n + 1)))
            };
            vals.push(C64::new(next()?, next()?));
        }
        if vals.len() != 16 {
            return Err(Error::InvalidState(format!("expected 16 elements, found {}", vals.len())));
        }
        Self::new(Matrix4::from_row_slice(&vals), source)
    }
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Single-site expectations and two-point correlators of a spin pair.
///
/// `gx`, `gz` are per-site averages over the two sites; `gxz` averages
/// ⟨σx σz⟩ and ⟨σz σx⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub r: usize,
    pub gx: f64,
    pub gz: f64,
    pub gxx: f64,
    pub gyy: f64,
    pub gzz: f64,
    pub gxz: f64,
}

impl CorrelatorSet {
    /// Correlators of a symmetric (thermal) state: gx = gxz = 0.
    pub fn symmetric(r: usize, gz: f64, gxx: f64, gyy: f64, gzz: f64) -> Self {
        Self { r, gx: 0.0, gz, gxx, gyy, gzz, gxz: 0.0 }
    }

    /// Reads the correlators back from a pair state: Tr(ρ σα ⊗ σβ).
    pub fn from_state(state: &TwoSiteState) -> Self {
        let p = pauli();
        let one = Mat2::identity();
        let ev = |a: &Mat2, b: &Mat2| (state.matrix() * kron(a, b)).trace().re;
        Self {
            r: state.r.unwrap_or(0),
            gx: 0.5 * (ev(&p[0], &one) + ev(&one, &p[0])),
            gz: 0.5 * (ev(&p[2], &one) + ev(&one, &p[2])),
            gxx: ev(&p[0], &p[0]),
            gyy: ev(&p[1], &p[1]),
            gzz: ev(&p[2], &p[2]),
            gxz: 0.5 * (ev(&p[0], &p[2]) + ev(&p[2], &p[0])),
        }
    }

    pub fn values(&self) -> [f64; 6] {
        [self.gx, self.gz, self.gxx, self.gyy, self.gzz, self.gxz]
    }
}

/// σx, σy, σz.
pub fn pauli() -> [Mat2; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [Matrix2::new(z, o, o, z), Matrix2::new(z, -i, i, z), Matrix2::new(o, z, z, -o)]
}

/// Projective measurement on one qubit, B_k = V |k⟩⟨k| V†.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// Angles are folded into θ ∈ [0, π], φ ∈ [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Self {
        let (theta, phi) = canonical_angles(theta, phi);
        Self { theta, phi }
    }

    pub fn computational() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// Basis {|−⟩, |+⟩}: θ = π/2, φ = 0.
    pub fn sigma_x() -> Self {
        Self { theta: PI / 2.0, phi: 0.0 }
    }

    /// V|0⟩ and V|1⟩.
    pub fn vectors(&self) -> [Vector2<C64>; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [Vector2::new(C64::new(c, 0.0), -e * s), Vector2::new(e.conj() * s, C64::new(c, 0.0))]
    }

    pub fn projectors(&self) -> [Mat2; 2] {
        let [v0, v1] = self.vectors();
        [v0 * v0.adjoint(), v1 * v1.adjoint()]
    }

    /// Measurement along the Bloch direction of `n` (any nonzero vector).
    pub fn along(n: [f64; 3]) -> Self {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if norm == 0.0 {
            return Self::computational();
        }
        // V|0⟩ has Bloch vector (−sinθ cosφ, −sinθ sinφ, cosθ).
        let theta = (n[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = (-n[1]).atan2(-n[0]);
        Self::new(theta, phi)
    }
}

/// Folds arbitrary angles into θ ∈ [0, π], φ ∈ [0, 2π) describing the same projector pair.
pub fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let two_pi = 2.0 * PI;
    let mut t = theta.rem_euclid(two_pi);
    let mut p = phi;
    if t > PI {
        t = two_pi - t;
        p += PI;
    }
    let mut p = p.rem_euclid(two_pi);
    if p >= two_pi {
        p = 0.0;
    }
    if t == 0.0 || t == PI {
        // Poles: φ is irrelevant.
        p = 0.0;
    }
    (t, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn psd_repair_and_rejection() {
        let mut m = Mat4::zeros();
        m[(0, 0)] = c(1.0 + 5e-11);
        m[(1, 1)] = c(-5e-11);
        let s = TwoSiteState::synthetic(m).unwrap();
        assert!(s.eigenvalues()[0] >= 0.0);
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-15);
        m[(0, 0)] = c(1.0 + 1e-6);
        m[(1, 1)] = c(-1e-6);
        assert!(matches!(TwoSiteState::synthetic(m), Err(Error::NotPositive(_))));
        assert!(TwoSiteState::synthetic(Mat4::identity()).is_err());
    }

    #[test]
    fn basis_vectors() {
        let [v0, v1] = MeasurementBasis::sigma_x().vectors();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v0 - Vector2::new(c(r), c(-r))).norm() < 1e-15);
        assert!((v1 - Vector2::new(c(r), c(r))).norm() < 1e-15);
        assert!(v0.dotc(&v1).norm() < 1e-15);
    }

    #[test]
    fn along_matches_bloch_direction() {
        let p = pauli();
        for n in [[0.3, -0.2, 0.9], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [-0.5, 0.5, 0.1]] {
            let b = MeasurementBasis::along(n);
            let [v0, _] = b.vectors();
            let rho = v0 * v0.adjoint();
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            for k in 0..3 {
                assert!(((rho * p[k]).trace().re - n[k] / norm).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_angles_fold() {
        let (t, p) = canonical_angles(-0.3, 0.1);
        assert!((t - 0.3).abs() < 1e-15 && (p - (0.1 + PI)).abs() < 1e-15);
        let (t, p) = canonical_angles(1.0, -0.5);
        assert!((t - 1.0).abs() < 1e-15 && (p - (2.0 * PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn text_dump_round_trip() {
        let s = TwoSiteState::pure([c(0.6), C64::new(0.0, 0.8), c(0.0), c(0.0)]).unwrap();
        let back = TwoSiteState::from_text(&s.to_text(), StateSource::Synthetic).unwrap();
        assert_eq!(s.matrix(), back.matrix());
    }
}
