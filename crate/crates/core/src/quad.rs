//! Globally adaptive 7/15-point Gauss–Kronrod quadrature for vector-valued integrands.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Target absolute error, max-norm over components.
    pub abs_tol: f64,
    /// Error level still accepted when subdivision runs out.
    pub accept_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, accept_tol: 1e-10, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn rule<F: Fn(f64, &mut [f64])>(f: &F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Piece {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        k[d] = WGK[7] * buf[d];
        g[d] = WG[3] * buf[d];
    }
    for i in 0..7 {
        let dx = half * XGK[i];
        for x in [c - dx, c + dx] {
            f(x, buf);
            for d in 0..dim {
                k[d] += WGK[i] * buf[d];
                if i % 2 == 1 {
                    g[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let errors: Vec<f64> = (0..dim).map(|d| (half * (k[d] - g[d])).abs()).collect();
    let values: Vec<f64> = k.iter().map(|v| v * half).collect();
    let err = errors.iter().cloned().fold(0.0, f64::max);
    Piece { a, b, values, errors, err }
}

/// ∫_a^b f(x) dx for `f` filling a `dim`-component output.
/// Bisects the interval with the worst error until the summed
/// per-component error estimate drops below `abs_tol`.
pub fn integrate<F: Fn(f64, &mut [f64])>(f: F, a: f64, b: f64, dim: usize, opts: &QuadOptions) -> Result<QuadResult> {
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    heap.push(rule(&f, a, b, dim, &mut buf));
    let total_error = |heap: &BinaryHeap<Piece>| -> f64 {
        let mut e = vec![0.0; dim];
        for p in heap.iter() {
            for d in 0..dim {
                e[d] += p.errors[d];
            }
        }
        e.into_iter().fold(0.0, f64::max)
    };
    let mut error = total_error(&heap);
    while error > opts.abs_tol && heap.len() < opts.max_intervals {
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        heap.push(rule(&f, worst.a, mid, dim, &mut buf));
        heap.push(rule(&f, mid, worst.b, dim, &mut buf));
        error = total_error(&heap);
    }
    if !(error <= opts.accept_tol) {
        return Err(Error::Quadrature(format!("error estimate {error:e} after {} intervals", heap.len())));
    }
    let mut values = vec![0.0; dim];
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    for p in &pieces {
        for d in 0..dim {
            values[d] += p.values[d];
        }
    }
    Ok(QuadResult { values, error, intervals: pieces.len() })
}
