//! B-spline quasi-interpolation and the Smolyak sparse-grid sampling
//! recovery operator for periodic functions.
//!
//! The univariate building block is a local operator
//! `Q(f, x) = sum_s [sum_{|j|<=mu} lambda(j) f(s - j)] M_c(x - s)` with
//! `M_c` the centered cardinal B-spline of order `ell`; it reproduces
//! polynomials of degree `ell - 1`. Dyadic scalings `Q_k` on the torus,
//! their differences `q_k = prod_i (Q_{k_i} - Q_{k_i-1})`, and the partial
//! sums `R_m = sum_{|k|_1 <= m} q_k` form the recovery operator on the
//! Smolyak grid.
//!
//! The periodic dyadic machinery keys the two-scale refinement on the
//! `[0, ell]` knot alignment and therefore requires even spline order;
//! the quadratic (odd-order) scheme is supported for the non-periodic
//! operator only.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::sparse_quad::{simplex_indices, MultiIndex};

/// A quasi-interpolation scheme: spline order, stencil half-width and the
/// even coefficient sequence lambda(-j) = lambda(j).
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiInterpScheme {
    pub ell: usize,
    pub mu: usize,
    /// `stencil[j] = lambda(j - mu)`, j = 0..=2*mu (symmetric).
    pub stencil: Vec<f64>,
}

impl QuasiInterpScheme {
    pub fn new(ell: usize, mu: usize, stencil: Vec<f64>) -> Result<Self> {
        if ell < 2 {
            return Err(Error::Precondition("spline order ell must be >= 2".into()));
        }
        if stencil.len() != 2 * mu + 1 {
            return Err(Error::Precondition(format!(
                "stencil length {} does not match half-width mu = {mu}",
                stencil.len()
            )));
        }
        if mu + 1 < ell / 2 {
            return Err(Error::Precondition(format!(
                "mu = {mu} too small for order ell = {ell}"
            )));
        }
        for j in 0..=mu {
            if (stencil[mu + j] - stencil[mu - j]).abs() > 1e-15 {
                return Err(Error::Precondition("stencil must be an even sequence".into()));
            }
        }
        let scheme = QuasiInterpScheme { ell, mu, stencil };
        // the defining property: exact on polynomials of degree ell - 1
        for deg in 0..ell {
            for &x in &[0.3f64, -1.7, 2.2] {
                let want = x.powi(deg as i32);
                let got = apply_scheme(&scheme, &|t: f64| t.powi(deg as i32), x);
                if (got - want).abs() > 1e-8 * want.abs().max(1.0) {
                    return Err(Error::Precondition(format!(
                        "stencil does not reproduce degree {deg} (got {got} at {x}, want {want})"
                    )));
                }
            }
        }
        Ok(scheme)
    }

    pub fn lambda(&self, j: isize) -> f64 {
        let idx = j + self.mu as isize;
        if idx < 0 || idx as usize >= self.stencil.len() {
            0.0
        } else {
            self.stencil[idx as usize]
        }
    }

    /// Whether the periodic dyadic machinery supports this scheme.
    pub fn supports_periodic(&self) -> bool {
        self.ell % 2 == 0
    }
}

/// The classical named schemes.
pub fn builtin_scheme(name: &str) -> Result<QuasiInterpScheme> {
    match name {
        "linear" => QuasiInterpScheme::new(2, 0, vec![1.0]),
        "quadratic" => QuasiInterpScheme::new(3, 1, vec![-0.125, 1.25, -0.125]),
        "cubic" => QuasiInterpScheme::new(4, 1, vec![-1.0 / 6.0, 8.0 / 6.0, -1.0 / 6.0]),
        other => Err(Error::Parse(format!("unknown quasi-interpolation scheme `{other}`"))),
    }
}

/// Cardinal B-spline of order `ell` with support [0, ell] and integer
/// knots, by the Cox–de Boor recursion.
pub fn bspline(ell: usize, x: f64) -> f64 {
    if x <= 0.0 || x >= ell as f64 {
        return 0.0;
    }
    // values of order-1 splines on the relevant unit cells
    let cell = x.floor() as usize; // 0..ell-1
    let mut vals = vec![0.0f64; ell];
    vals[cell] = 1.0;
    for p in 2..=ell {
        // M_p(x - s) built from M_{p-1}; vals[s] holds M_p(x - s) support shift
        for s in 0..=(ell - p) {
            let t = x - s as f64;
            vals[s] = (t * vals[s] + (p as f64 - t) * vals[s + 1]) / (p as f64 - 1.0);
        }
        // entries past ell - p are stale; zero them for cleanliness
        for v in vals.iter_mut().skip(ell - p + 1) {
            *v = 0.0;
        }
    }
    vals[0]
}

/// Centered cardinal B-spline, support [-ell/2, ell/2] (half-integer knots
/// when ell is odd).
pub fn bspline_centered(ell: usize, t: f64) -> f64 {
    bspline(ell, t + ell as f64 / 2.0)
}

/// The non-periodic quasi-interpolation operator on R.
pub fn apply_scheme(scheme: &QuasiInterpScheme, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let half = scheme.ell as f64 / 2.0;
    let lo = (x - half).floor() as i64 + 1;
    let hi = (x + half).ceil() as i64 - 1;
    let mut acc = 0.0;
    for s in lo..=hi {
        let basis = bspline_centered(scheme.ell, x - s as f64);
        if basis == 0.0 {
            continue;
        }
        let mut lam = 0.0;
        for j in -(scheme.mu as isize)..=(scheme.mu as isize) {
            lam += scheme.lambda(j) * f((s - j as i64) as f64);
        }
        acc += lam * basis;
    }
    acc
}

/// Periodic level-k basis `N_{k,s}(x)`: the 1-periodization of
/// `M_ell(ell 2^k x - s)`, `s` in `I(k) = {0, .., ell 2^k - 1}`.
pub fn n_basis(ell: usize, k: usize, s: usize, x: f64) -> f64 {
    let big_l = (ell << k) as f64;
    let y = (x.rem_euclid(1.0)) * big_l;
    let sf = s as f64;
    bspline(ell, y - sf) + bspline(ell, y + big_l - sf)
}

/// Integral of `N_{k,s}` over the torus.
pub fn n_basis_integral(ell: usize, k: usize) -> f64 {
    1.0 / (ell << k) as f64
}

fn lattice_len(ell: usize, k: usize) -> usize {
    ell << k
}

/// Sample point index -> torus coordinate, `h^{(k)} t` with
/// `h^{(k)} = 1/(ell 2^k)`.
fn lattice_point(ell: usize, k: usize, t: usize) -> f64 {
    t as f64 / lattice_len(ell, k) as f64
}

/// Flattened d-dimensional coefficient grid at a level vector.
#[derive(Debug, Clone)]
pub struct LevelGrid {
    pub level: MultiIndex,
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl LevelGrid {
    fn index(&self, s: &[usize]) -> usize {
        let mut idx = 0usize;
        for (axis, &si) in s.iter().enumerate() {
            idx = idx * self.dims[axis] + si;
        }
        idx
    }
}

fn ensure_even(scheme: &QuasiInterpScheme) -> Result<()> {
    if !scheme.supports_periodic() {
        return Err(Error::Precondition(format!(
            "periodic dyadic machinery requires an even spline order, got ell = {}",
            scheme.ell
        )));
    }
    Ok(())
}

/// a-coefficient grid at a level vector: the tensorized stencil applied to
/// torus samples, `a_{k,s}(f) = prod_i [sum_j lambda(j) f(.. h (s_i - j + ell/2) ..)]`.
fn a_grid(
    scheme: &QuasiInterpScheme,
    level: &[usize],
    f: &dyn Fn(&[f64]) -> f64,
) -> LevelGrid {
    let d = level.len();
    let dims: Vec<usize> = level.iter().map(|&k| lattice_len(scheme.ell, k)).collect();
    let total: usize = dims.iter().product();
    // start from raw samples on the product lattice
    let mut values = vec![0.0f64; total];
    let mut s = vec![0usize; d];
    let mut x = vec![0.0f64; d];
    for (flat, slot) in values.iter_mut().enumerate() {
        let mut rem = flat;
        for axis in (0..d).rev() {
            s[axis] = rem % dims[axis];
            rem /= dims[axis];
        }
        for axis in 0..d {
            x[axis] = lattice_point(scheme.ell, level[axis], s[axis]);
        }
        *slot = f(&x);
    }
    // stencil pass along each axis: a[s] = sum_j lambda(j) samp[(s - j + ell/2) mod L]
    let shift = scheme.ell as isize / 2;
    for axis in 0..d {
        values = axis_transform(&values, &dims, axis, |line, out| {
            let len = line.len() as isize;
            for (si, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in -(scheme.mu as isize)..=(scheme.mu as isize) {
                    let t = (si as isize - j + shift).rem_euclid(len) as usize;
                    acc += scheme.lambda(j) * line[t];
                }
                *slot = acc;
            }
        });
    }
    LevelGrid {
        level: MultiIndex::new(level.to_vec()),
        dims,
        values,
    }
}

/// Apply a 1-D transform along `axis` of a flattened tensor.
fn axis_transform(
    values: &[f64],
    dims: &[usize],
    axis: usize,
    op: impl Fn(&[f64], &mut [f64]),
) -> Vec<f64> {
    let d = dims.len();
    let len = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut out = vec![0.0f64; values.len()];
    let mut line = vec![0.0f64; len];
    let mut res = vec![0.0f64; len];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * len * stride + inner;
            for (s, slot) in line.iter_mut().enumerate() {
                *slot = values[base + s * stride];
            }
            op(&line, &mut res);
            for (s, &v) in res.iter().enumerate() {
                out[base + s * stride] = v;
            }
        }
    }
    let _ = d;
    out
}

/// Binomial refinement mask `m_j = 2^{1-ell} C(ell, j)`, j = 0..=ell.
pub fn refinement_mask(ell: usize) -> Vec<f64> {
    let mut mask = vec![0.0f64; ell + 1];
    let mut c = 1.0f64;
    for (j, slot) in mask.iter_mut().enumerate() {
        *slot = c;
        c = c * (ell - j) as f64 / (j + 1) as f64;
    }
    let scale = 2.0f64.powi(1 - ell as i32);
    for v in &mut mask {
        *v *= scale;
    }
    mask
}

/// Upsample a coarse coefficient line through the two-scale relation:
/// `N_{k-1,s'} = sum_j m_j N_{k, 2s'+j}`.
fn upsample_line(mask: &[f64], coarse: &[f64], fine_len: usize, out: &mut [f64]) {
    let coarse_len = coarse.len() as isize;
    for (s, slot) in out.iter_mut().enumerate().take(fine_len) {
        let mut acc = 0.0;
        let parity = s % 2;
        let mut j = parity;
        while j < mask.len() {
            let t = ((s as isize - j as isize) / 2).rem_euclid(coarse_len) as usize;
            acc += mask[j] * coarse[t];
            j += 2;
        }
        *slot = acc;
    }
}

/// c-coefficient grid of the dyadic component `q_k`: the inclusion-
/// exclusion over axis refinements,
/// `c(k) = sum_{eps subset pos(k)} (-1)^{|eps|} Upsample_eps a(k - eps)`.
pub fn periodic_qk_apply(
    scheme: &QuasiInterpScheme,
    level: &MultiIndex,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<LevelGrid> {
    ensure_even(scheme)?;
    let d = level.dim();
    let dims: Vec<usize> = level
        .components
        .iter()
        .map(|&k| lattice_len(scheme.ell, k))
        .collect();
    let positive: Vec<usize> = (0..d).filter(|&i| level.components[i] > 0).collect();
    let mask = refinement_mask(scheme.ell);
    let mut values = vec![0.0f64; dims.iter().product()];
    for eps in 0..(1usize << positive.len()) {
        let mut coarse_level = level.components.clone();
        let mut sign = 1.0f64;
        for (bit, &axis) in positive.iter().enumerate() {
            if eps & (1 << bit) != 0 {
                coarse_level[axis] -= 1;
                sign = -sign;
            }
        }
        let mut grid = a_grid(scheme, &coarse_level, f);
        // upsample along every eps-axis back to the fine dims
        for (bit, &axis) in positive.iter().enumerate() {
            if eps & (1 << bit) == 0 {
                continue;
            }
            let mut new_dims = grid.dims.clone();
            new_dims[axis] = dims[axis];
            let fine_len = dims[axis];
            let coarse_vals = grid.values;
            let coarse_dims = grid.dims;
            // expand along `axis`
            let stride: usize = coarse_dims[axis + 1..].iter().product();
            let outer: usize = coarse_dims[..axis].iter().product();
            let coarse_len = coarse_dims[axis];
            let mut out = vec![0.0f64; new_dims.iter().product()];
            let mut line = vec![0.0f64; coarse_len];
            let mut res = vec![0.0f64; fine_len];
            for o in 0..outer {
                for inner in 0..stride {
                    let cbase = o * coarse_len * stride + inner;
                    let fbase = o * fine_len * stride + inner;
                    for (s, slot) in line.iter_mut().enumerate() {
                        *slot = coarse_vals[cbase + s * stride];
                    }
                    upsample_line(&mask, &line, fine_len, &mut res);
                    for (s, &v) in res.iter().enumerate() {
                        out[fbase + s * stride] = v;
                    }
                }
            }
            grid = LevelGrid {
                level: MultiIndex::new(vec![]),
                dims: new_dims,
                values: out,
            };
        }
        for (slot, v) in values.iter_mut().zip(grid.values.iter()) {
            *slot += sign * v;
        }
    }
    Ok(LevelGrid {
        level: level.clone(),
        dims,
        values,
    })
}

/// The recovered function `R_m(f) = sum_{|k|_1 <= m} q_k(f)`, evaluable
/// anywhere on the torus.
#[derive(Debug, Clone)]
pub struct RecoveredFn {
    pub scheme: QuasiInterpScheme,
    pub m: usize,
    pub dim: usize,
    pub components: Vec<LevelGrid>,
}

impl RecoveredFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let ell = self.scheme.ell;
        let d = self.dim;
        let mut total = 0.0f64;
        let mut active: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(ell); d];
        for grid in &self.components {
            // per-axis active basis indices and values
            for axis in 0..d {
                let k = grid.level.components[axis];
                let big_l = lattice_len(ell, k);
                let y = x[axis].rem_euclid(1.0) * big_l as f64;
                active[axis].clear();
                let lo = (y - ell as f64).floor() as i64 + 1;
                let hi = y.ceil() as i64 - 1;
                for s_raw in lo..=hi {
                    let v = bspline(ell, y - s_raw as f64);
                    if v != 0.0 {
                        active[axis].push((s_raw.rem_euclid(big_l as i64) as usize, v));
                    }
                }
            }
            // product over active combinations
            let mut idx = vec![0usize; d];
            let mut s = vec![0usize; d];
            'combo: loop {
                let mut basis = 1.0f64;
                for axis in 0..d {
                    let (si, v) = active[axis][idx[axis]];
                    s[axis] = si;
                    basis *= v;
                }
                total += grid.values[grid.index(&s)] * basis;
                for axis in 0..d {
                    idx[axis] += 1;
                    if idx[axis] < active[axis].len() {
                        continue 'combo;
                    }
                    idx[axis] = 0;
                    if axis == d - 1 {
                        break 'combo;
                    }
                }
            }
        }
        total
    }
}

/// Build the Smolyak recovery operator from samples of f on the dyadic
/// lattices of the simplex `|k|_1 <= m`.
///
/// ```
/// use freudquad::bspline_recover::{builtin_scheme, smolyak_recover};
///
/// let scheme = builtin_scheme("cubic").unwrap();
/// let f = |x: &[f64]| (2.0 * std::f64::consts::PI * x[0]).sin().powi(2);
/// let rec = smolyak_recover(&scheme, 5, 1, &f).unwrap();
/// let x = [0.317];
/// assert!((rec.eval(&x) - f(&x)).abs() < 1e-4);
/// ```
pub fn smolyak_recover(
    scheme: &QuasiInterpScheme,
    m: usize,
    d: usize,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<RecoveredFn> {
    ensure_even(scheme)?;
    let mut components = Vec::new();
    for k in simplex_indices(d, m) {
        components.push(periodic_qk_apply(scheme, &k, f)?);
    }
    Ok(RecoveredFn {
        scheme: scheme.clone(),
        m,
        dim: d,
        components,
    })
}

/// The Smolyak grid G^d(m): points `(h^{(k_i)} s_i)_i` over `k` with
/// `k_i >= 1`, `|k|_1 = m`, `s in I(k)`, deduplicated. Empty (with the
/// caller expected to warn) when m < d.
pub fn grid_points(m: usize, d: usize, ell: usize) -> Vec<Vec<f64>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    if m < d {
        return out;
    }
    // k >= 1 per axis with |k|_1 = m  <=>  (k - 1) >= 0 with |k - 1|_1 = m - d
    for k0 in simplex_indices(d, m - d) {
        if k0.l1() != m - d {
            continue;
        }
        let k: Vec<usize> = k0.components.iter().map(|&v| v + 1).collect();
        let dims: Vec<usize> = k.iter().map(|&ki| lattice_len(ell, ki)).collect();
        let mut s = vec![0usize; d];
        'pts: loop {
            let point: Vec<f64> = (0..d)
                .map(|axis| lattice_point(ell, k[axis], s[axis]))
                .collect();
            let key: Vec<u64> = point.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                out.push(point);
            }
            for axis in 0..d {
                s[axis] += 1;
                if s[axis] < dims[axis] {
                    continue 'pts;
                }
                s[axis] = 0;
                if axis == d - 1 {
                    break 'pts;
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// The exact set of torus points `R_m` reads: the union of the sample
/// lattices of all levels in the simplex `|k|_1 <= m` (k in N_0^d).
pub fn sample_points(m: usize, d: usize, ell: usize) -> Vec<Vec<f64>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    for k in simplex_indices(d, m) {
        let dims: Vec<usize> = k
            .components
            .iter()
            .map(|&ki| lattice_len(ell, ki))
            .collect();
        let mut s = vec![0usize; d];
        'pts: loop {
            let point: Vec<f64> = (0..d)
                .map(|axis| lattice_point(ell, k.components[axis], s[axis]))
                .collect();
            let key: Vec<u64> = point.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                out.push(point);
            }
            for axis in 0..d {
                s[axis] += 1;
                if s[axis] < dims[axis] {
                    continue 'pts;
                }
                s[axis] = 0;
                if axis == d - 1 {
                    break 'pts;
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Quadrature weights of `f -> int_{T^d} R_m(f)`: one weight per sample
/// point, accumulated by pushing the basis integrals back through the
/// linear maps that produce the c-coefficients (adjoint accumulation).
pub fn quadrature_weights(
    scheme: &QuasiInterpScheme,
    m: usize,
    d: usize,
) -> Result<Vec<(Vec<f64>, f64)>> {
    ensure_even(scheme)?;
    let ell = scheme.ell;
    let mask = refinement_mask(ell);
    // cotangent per a-grid level vector
    let mut a_cotangent: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
    for k in simplex_indices(d, m) {
        // alpha_{k,s} = prod_i int N_{k_i, s_i} (constant per level)
        let alpha: f64 = k
            .components
            .iter()
            .map(|&ki| n_basis_integral(ell, ki))
            .product();
        let positive: Vec<usize> = (0..d).filter(|&i| k.components[i] > 0).collect();
        for eps in 0..(1usize << positive.len()) {
            let mut target = k.components.clone();
            let mut sign = 1.0f64;
            let mut up_axes = Vec::new();
            for (bit, &axis) in positive.iter().enumerate() {
                if eps & (1 << bit) != 0 {
                    target[axis] -= 1;
                    sign = -sign;
                    up_axes.push(axis);
                }
            }
            // Adjoint of "upsample then sum against constant alpha":
            // each fine index s receives alpha; coarse s' accumulates
            // sum_j m_j alpha over the fine indices it feeds, i.e.
            // alpha * 2 * sum_j m_j / 2 ... computed explicitly below.
            // Because alpha is constant over s, the adjoint through one
            // upsample axis multiplies by sum_j m_j = 2 and halves the
            // index count; net per-axis factor on the cotangent constant
            // is sum_j m_j = 2.
            let factor: f64 = mask.iter().sum::<f64>().powi(up_axes.len() as i32);
            let dims: Vec<usize> = target
                .iter()
                .map(|&ki| lattice_len(ell, ki))
                .collect();
            let total: usize = dims.iter().product();
            let entry = a_cotangent
                .entry(target.clone())
                .or_insert_with(|| vec![0.0; total]);
            let add = sign * alpha * factor;
            for slot in entry.iter_mut() {
                *slot += add;
            }
        }
    }
    // a(k)[s] = sum_j lambda(j) f(lattice[(s - j + ell/2) mod L]) per axis:
    // push the a-cotangent into sample weights.
    let shift = ell as isize / 2;
    let mut acc: HashMap<Vec<u64>, (Vec<f64>, f64)> = HashMap::new();
    for (level, cot) in a_cotangent {
        let dims: Vec<usize> = level.iter().map(|&ki| lattice_len(ell, ki)).collect();
        let mut s = vec![0usize; d];
        let mut flat = 0usize;
        'grid: loop {
            let beta = cot[flat];
            if beta != 0.0 {
                // distribute through the tensor stencil
                let mut j = vec![-(scheme.mu as isize); d];
                'stencil: loop {
                    let mut coef = beta;
                    let mut point = Vec::with_capacity(d);
                    for axis in 0..d {
                        coef *= scheme.lambda(j[axis]);
                        let t = (s[axis] as isize - j[axis] + shift)
                            .rem_euclid(dims[axis] as isize) as usize;
                        point.push(lattice_point(ell, level[axis], t));
                    }
                    if coef != 0.0 {
                        let key: Vec<u64> = point.iter().map(|v| v.to_bits()).collect();
                        let entry = acc.entry(key).or_insert((point, 0.0));
                        entry.1 += coef;
                    }
                    for axis in 0..d {
                        j[axis] += 1;
                        if j[axis] <= scheme.mu as isize {
                            continue 'stencil;
                        }
                        j[axis] = -(scheme.mu as isize);
                        if axis == d - 1 {
                            break 'stencil;
                        }
                    }
                }
            }
            // next s
            for axis in (0..d).rev() {
                s[axis] += 1;
                if s[axis] < dims[axis] {
                    flat = {
                        let mut idx = 0usize;
                        for ax in 0..d {
                            idx = idx * dims[ax] + s[ax];
                        }
                        idx
                    };
                    continue 'grid;
                }
                s[axis] = 0;
            }
            break;
        }
    }
    let mut out: Vec<(Vec<f64>, f64)> = acc.into_values().collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Distinct sample points a single univariate c-functional touches
/// (bounded-locality certificate).
pub fn c_functional_support(scheme: &QuasiInterpScheme, k: usize, s: usize) -> usize {
    let ell = scheme.ell;
    let shift = ell as isize / 2;
    let big_l = lattice_len(ell, k) as isize;
    let mut pts: HashSet<u64> = HashSet::new();
    for j in -(scheme.mu as isize)..=(scheme.mu as isize) {
        let t = (s as isize - j + shift).rem_euclid(big_l);
        pts.insert(lattice_point(ell, k, t as usize).to_bits());
    }
    if k > 0 {
        let coarse_l = lattice_len(ell, k - 1) as isize;
        for jm in 0..=ell {
            if (s as isize - jm as isize) % 2 != 0 {
                continue;
            }
            let sp = ((s as isize - jm as isize) / 2).rem_euclid(coarse_l);
            for j in -(scheme.mu as isize)..=(scheme.mu as isize) {
                let t = (sp - j + shift).rem_euclid(coarse_l);
                pts.insert(lattice_point(ell, k - 1, t as usize).to_bits());
            }
        }
    }
    pts.len()
}
