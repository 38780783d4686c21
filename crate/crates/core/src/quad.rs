//! Low-level one-dimensional integration helpers shared by the functionals.
//!
//! Most integrands in this crate are smooth on `[0, π]` after the substitution
//! `x = 2cos θ` except for kinks at sign changes (absolute values) and
//! algebraic endpoint behaviour. The helpers here split at sign changes and
//! apply composite Gauss–Legendre rules on the resulting smooth pieces.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 20-point rule used for panel integration.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Shared 8-point rule used for cheap panel integration.
pub fn gl8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

/// Root of `f` in `[a, b]` given a sign change, by bisection polished with
/// the secant step (Illinois variant).
pub fn bracketed_root<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c.is_finite() && c > a.min(b) && c < a.max(b) {
            c
        } else {
            0.5 * (a + b)
        };
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < 4.0 * f64::EPSILON * c.abs().max(1e-300) {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of `f` on `[a, b]` detected on `samples` equal panels.
pub fn sign_changes<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let h = (b - a) / samples as f64;
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for k in 1..=samples {
        let x1 = if k == samples { b } else { a + k as f64 * h };
        let f1 = f(x1);
        if f0 != 0.0 && f1 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
            roots.push(bracketed_root(&mut f, x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// `∫_a^b |f(x)|^p w(x) dx` for `f` smooth on `[a, b]` up to sign changes.
///
/// `panels` equal panels are used, each split further at the roots of `f`.
pub fn integrate_abs_pow<F, W>(f: F, w: W, a: f64, b: f64, p: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let roots = sign_changes(&f, a, b, panels);
    let mut breaks = Vec::with_capacity(panels + roots.len() + 1);
    let h = (b - a) / panels as f64;
    breaks.extend((0..=panels).map(|k| if k == panels { b } else { a + k as f64 * h }));
    breaks.extend(roots);
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let rule = gl20();
    breaks
        .windows(2)
        .filter(|s| s[1] > s[0])
        .map(|s| rule.integrate(s[0], s[1], |x| f(x).abs().powf(p) * w(x)))
        .sum()
}

/// Composite Gauss–Legendre over explicit breakpoints.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(breaks: &[f64], rule: &GaussLegendre, mut f: F) -> f64 {
    breaks
        .windows(2)
        .filter(|s| s[1] > s[0])
        .map(|s| rule.integrate(s[0], s[1], &mut f))
        .sum()
}

/// Merges sorted breakpoint lists, dropping near-duplicates.
pub fn merge_breaks(mut pts: Vec<f64>, tol: f64) -> Vec<f64> {
    pts.retain(|x| x.is_finite());
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|b, a| (*b - *a).abs() <= tol);
    pts
}
