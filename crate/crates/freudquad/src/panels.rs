//! Panel-based Gauss–Legendre primitives shared by the norm estimator and
//! the reference-integral oracle.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence from Chebyshev initial
/// guesses; plenty accurate (~1e-15) for the degrees used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn gl_cache() -> &'static Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss–Legendre rule (concurrent lookups allowed).
pub fn gauss_legendre_cached(n: usize) -> (Vec<f64>, Vec<f64>) {
    let cache = gl_cache();
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = gauss_legendre(n);
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

/// Integrate f over the union of `panels` (disjoint intervals), one
/// Gauss–Legendre rule of `degree` points per panel.
pub fn integrate_panels(f: &dyn Fn(f64) -> f64, panels: &[(f64, f64)], degree: usize) -> f64 {
    let (xs, ws) = gauss_legendre_cached(degree);
    let mut parts: Vec<f64> = Vec::with_capacity(panels.len());
    for &(lo, hi) in panels {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(ws.iter()) {
            acc += w * f(mid + half * x);
        }
        parts.push(acc * half);
    }
    pairwise_sum(&parts)
}

/// Sum with a fixed pairwise (tree) reduction: deterministic and with
/// O(log n) roundoff growth regardless of length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Split [lo, hi] into `count` equal panels.
pub fn equal_panels(lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count);
    let step = (hi - lo) / count as f64;
    for i in 0..count {
        let a = lo + i as f64 * step;
        let b = if i + 1 == count { hi } else { lo + (i + 1) as f64 * step };
        out.push((a, b));
    }
    out
}

/// Panel list from a sorted breakpoint sequence, subdividing each cell
/// into `per_cell` pieces.
pub fn panels_from_breakpoints(breaks: &[f64], per_cell: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            out.extend(equal_panels(pair[0], pair[1], per_cell));
        }
    }
    out
}
