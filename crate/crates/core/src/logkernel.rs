//! Averages of `log|x - y|` over cells and cell pairs, and the Toeplitz
//! operator they form on a uniform grid.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// `∬_{[0,t]²}`-type antiderivative: `G'' = log|t|`.
fn g2(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        let t2 = t * t;
        0.5 * t2 * t.abs().ln() - 0.75 * t2
    }
}

/// `F' = log t`, `F(0) = 0`.
fn f1(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln() - t
    }
}

/// Mean of `log|x - y|` for `x, y` uniform on two equal cells of width `h`
/// whose indices differ by `k`.
pub fn uniform_pair_average(k: usize, h: f64) -> f64 {
    let lh = h.ln();
    match k {
        0 => lh - 1.5,
        1 => lh + 2.0 * std::f64::consts::LN_2 - 1.5,
        2 | 3 => {
            let s = 1.0 / k as f64;
            let bracket = (1.0 + s).powi(2) * s.ln_1p() + (1.0 - s).powi(2) * (-s).ln_1p();
            lh + (k as f64).ln() + bracket / (2.0 * s * s) - 1.5
        }
        _ => {
            // log d - Σ_j 2 s^{2j} / ((2j+2)(2j+1)(2j))
            let s2 = 1.0 / (k * k) as f64;
            let mut term = 1.0;
            let mut corr = 0.0;
            for j in 1..40 {
                term *= s2;
                let m = 2.0 * j as f64;
                let c = 2.0 * term / ((m + 2.0) * (m + 1.0) * m);
                corr += c;
                if c < 1e-18 * corr {
                    break;
                }
            }
            lh + (k as f64).ln() - corr
        }
    }
}

/// Mean of `log|x - y|` for `y` uniform on `[a, b]`.
pub fn point_cell_average(x: f64, a: f64, b: f64) -> f64 {
    let h = b - a;
    let d = (x - 0.5 * (a + b)).abs();
    let half = 0.5 * h;
    if d < half {
        return (f1(half + d) + f1(half - d)) / h;
    }
    let s = half / d;
    if s > 0.25 {
        let num = (1.0 + s) * s.ln_1p() - if s < 1.0 { (1.0 - s) * (-s).ln_1p() } else { 0.0 };
        return d.ln() + num / (2.0 * s) - 1.0;
    }
    // log d - Σ_j s^{2j} / ((2j+1)(2j))
    let s2 = s * s;
    let mut term = 1.0;
    let mut corr = 0.0;
    for j in 1..40 {
        term *= s2;
        let m = 2.0 * j as f64;
        let c = term / ((m + 1.0) * m);
        corr += c;
        if c < 1e-18 * corr {
            break;
        }
    }
    d.ln() - corr
}

/// Mean of `log|x - y|` for `x` uniform on `[a1, b1]`, `y` on `[a2, b2]`.
pub fn cell_pair_average(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let (h1, h2) = (b1 - a1, b2 - a2);
    let d = 0.5 * (a1 + b1) - 0.5 * (a2 + b2);
    let hmax = h1.max(h2);
    if d.abs() >= 8.0 * hmax {
        // moment expansion of E log|d + ε|, ε = sum of two centred uniforms
        let (p2, q2) = (h1 * h1, h2 * h2);
        let m2 = (p2 + q2) / 12.0;
        let m4 = (p2 * p2 + q2 * q2) / 80.0 + p2 * q2 / 24.0;
        let m6 = (p2 * p2 * p2 + q2 * q2 * q2) / 448.0 + (p2 * p2 * q2 + p2 * q2 * q2) / 64.0;
        let m8 = (p2.powi(4) + q2.powi(4)) / 2304.0
            + 28.0 * (p2.powi(3) * q2 + p2 * q2.powi(3)) / (448.0 * 12.0)
            + 70.0 * p2 * p2 * q2 * q2 / 6400.0;
        let inv = 1.0 / (d * d);
        return d.abs().ln() - m2 * inv / 2.0 - m4 * inv * inv / 4.0 - m6 * inv.powi(3) / 6.0 - m8 * inv.powi(4) / 8.0;
    }
    if h1 == 0.0 || h2 == 0.0 {
        return if h1 == 0.0 && h2 == 0.0 {
            d.abs().ln()
        } else if h1 == 0.0 {
            point_cell_average(a1, a2, b2)
        } else {
            point_cell_average(a2, a1, b1)
        };
    }
    (g2(b1 - a2) - g2(a1 - a2) - g2(b1 - b2) + g2(a1 - b2)) / (h1 * h2)
}

/// Symmetric Toeplitz matrix `T_ij = t_{|i-j|}` with FFT matrix-vector product.
#[derive(Clone)]
pub struct Toeplitz {
    column: Vec<f64>,
    spectrum: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Toeplitz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Toeplitz").field("n", &self.column.len()).finish()
    }
}

impl Toeplitz {
    pub fn new(column: Vec<f64>) -> Self {
        let n = column.len();
        let m = (2 * n).next_power_of_two().max(2);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut c = vec![Complex::new(0.0, 0.0); m];
        for (i, &t) in column.iter().enumerate() {
            c[i].re = t;
            if i > 0 {
                c[m - i].re = t;
            }
        }
        forward.process(&mut c);
        Self { column, spectrum: c, forward, inverse }
    }

    /// Cell-pair log averages on `n` equal cells of width `h`.
    pub fn log_kernel(n: usize, h: f64) -> Self {
        Self::new((0..n).map(|k| uniform_pair_average(k, h)).collect())
    }

    pub fn len(&self) -> usize {
        self.column.len()
    }

    pub fn is_empty(&self) -> bool {
        self.column.is_empty()
    }

    pub fn column(&self) -> &[f64] {
        &self.column
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.column[i.abs_diff(j)]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.column.len();
        assert_eq!(x.len(), n, "vector length must match the matrix");
        if n <= 64 {
            return (0..n).map(|i| (0..n).map(|j| self.column[i.abs_diff(j)] * x[j]).sum()).collect();
        }
        let m = self.spectrum.len();
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / m as f64;
        buf[..n].iter().map(|c| c.re * scale).collect()
    }

    /// `xᵀ T x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }
}
