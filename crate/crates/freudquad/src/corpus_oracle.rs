//! Test-function corpus with certified reference integrals, and the
//! high-precision reference integrator used as ground truth.
//!
//! Every member is a tensor product of a univariate factor, so d-variate
//! references reduce to products of univariate integrals. Members are
//! deterministic functions of their id string; there is no randomness
//! anywhere.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::bspline_recover::bspline;
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::panels;
use crate::weights::{weight_spec_string, FreudWeight, Weight};

/// Scale-cascade parameters shared by the comb members.
const COMB_RHO: f64 = 0.9;
const COMB_LEVELS: usize = 10;
const LACUNARY_LEVELS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
enum MemberKind {
    /// Shifted cardinal B-spline of order r+1: exactly r weak derivatives
    /// in L_1.
    BsplineTensor { r: usize },
    /// Multiscale spline-comb cascade saturating the W^r_1 class rate.
    CombTensor { r: usize },
    /// Polynomial times a wide Gaussian: unlimited smoothness.
    PolyGauss,
    /// prod sin(2 pi x_i): periodic, zero mean.
    SinProd,
    /// 1 + lacunary cosine series per axis: periodic with exact L_2
    /// mixed smoothness r.
    LacunaryTensor { r: usize },
    /// Inverse-Gaussian-weight core with algebraic envelope
    /// `e^{t^2/2} (1+t^2)^{-s}`: smooth but tail-limited membership,
    /// in W^r_1(gauss) exactly for r < 2s - 1.
    TailGauss { s: f64 },
    /// Outward bump cascade: weighted-integrand spline bumps marching to
    /// the f64 evaluability frontier with masses p^{-(r+1.05)}. The mass a
    /// truncated rule misses beyond its reach decays like reach^{-(r+0.05)},
    /// pinning the budget-error slope at (r+0.05)/2 with no cancellation.
    Outward { r: usize },
    /// Dense Fourier member: 1 + sum_{n<=terms} n^{-(r+1/2)}/(1+ln n) cos(2 pi n t)
    /// per axis. A trigonometric-polynomial surrogate of an exactly-H^r
    /// periodic function; the label is effective for rules that resolve
    /// at most the top retained frequency.
    Fourier { r: usize, terms: usize },
}

/// A corpus member: deterministic evaluator, smoothness label, and
/// certified reference integrals.
#[derive(Debug, Clone)]
pub struct CorpusFn {
    pub id: String,
    pub dim: usize,
    /// Exact order of controlled mixed derivatives (see member docs).
    pub smoothness: usize,
    pub periodic: bool,
    kind: MemberKind,
}

fn comb_factor(r: usize, t: f64) -> f64 {
    // 1 + sum_j (rho/2^r)^j sum_i (-1)^i M_{r+1}(2^j (t+1) - i), cells
    // inside [-1, 1]. The alternating signs matter: a same-sign spline
    // comb is a partition of unity whose interior kinks cancel, leaving
    // no multiscale structure at all.
    if !(-1.0..=1.0).contains(&t) {
        return 1.0;
    }
    let ell = r + 1;
    let mut acc = 1.0f64;
    let mut coef = 1.0f64;
    for j in 0..=COMB_LEVELS {
        let width = 2usize << j;
        if width < ell {
            // no translate of the order-ell spline fits inside [-1, 1]
            // at this level; including a clipped one would leave a jump
            // at the boundary and break the smoothness label
            coef *= COMB_RHO / 2f64.powi(r as i32);
            continue;
        }
        let y = 2f64.powi(j as i32) * (t + 1.0);
        let cells = width - ell;
        // only the <= ell translates covering y contribute
        let lo = (y - ell as f64).floor().max(0.0) as usize;
        let hi = (y.ceil() as usize).min(cells);
        let mut level = 0.0;
        for i in lo..=hi.min(cells) {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            level += sign * bspline(ell, y - i as f64);
        }
        acc += coef * level;
        coef *= COMB_RHO / 2f64.powi(r as i32);
    }
    acc
}

/// Positions and masses of the outward bump cascade: weighted-integrand
/// bumps of shape M_{r+1} marching out to the evaluability frontier, with
/// masses m_j = p_j^{-(r+1.05)} and a final lump carrying the whole ideal
/// remainder so the missed-mass error tracks reach^{-(r+0.05)} exactly.
fn outward_layout(r: usize) -> Vec<(f64, f64)> {
    let exponent = r as f64 + 1.05;
    let mut out = Vec::new();
    let last = 36.0f64;
    let mut p = 2.0f64;
    while p < last {
        out.push((p, p.powf(-exponent)));
        p += 1.0;
    }
    // sum_{p >= last} p^{-e} ~ last^{1-e}/(e-1)
    out.push((last, last.powf(1.0 - exponent) / (exponent - 1.0)));
    out
}

fn outward_factor(r: usize, t: f64) -> f64 {
    let ell = (r + 1) as f64;
    let u = t.abs();
    if u < 2.0 - ell / 2.0 || u > 36.0 + ell / 2.0 {
        return 1.0;
    }
    let mut acc = 1.0f64;
    for (p, mass) in outward_layout(r) {
        let arg = u - p + ell / 2.0;
        if arg > 0.0 && arg < ell {
            // w^{-1} core relative to the standard Gaussian density
            let log_winv = 0.5 * u * u + 0.5 * (2.0 * std::f64::consts::PI).ln();
            acc += mass * bspline(r + 1, arg) * log_winv.exp();
        }
    }
    acc
}

fn lacunary_factor(r: usize, t: f64) -> f64 {
    let mut acc = 1.0f64;
    for j in 0..=LACUNARY_LEVELS {
        let amp = 2f64.powi(-(r as i32) * j as i32) / (1.0 + j as f64).powf(0.75);
        acc += amp * (2.0 * std::f64::consts::PI * 2f64.powi(j as i32) * t).cos();
    }
    acc
}

const FOURIER_TERMS: usize = 1024;

/// The factor is 1-periodic, so evaluations reduce to the fractional part
/// and memoize on its bit pattern: rule nodes across shifted cubes repeat
/// the same fractional coordinates, which keeps dense-spectrum members
/// affordable.
fn fourier_factor(r: usize, terms: usize, t: f64) -> f64 {
    type Key = (usize, usize, u64);
    static CACHE: OnceLock<Mutex<HashMap<Key, f64>>> = OnceLock::new();
    let frac = t.rem_euclid(1.0);
    let key = (r, terms, frac.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return *v;
    }
    let mut acc = 1.0f64;
    for n in 1..=terms {
        let nf = n as f64;
        let amp = nf.powf(-(r as f64 + 0.5)) / (1.0 + nf.ln());
        acc += amp * (2.0 * std::f64::consts::PI * nf * frac).cos();
    }
    let mut guard = cache.lock().unwrap();
    if guard.len() < 4_000_000 {
        guard.insert(key, acc);
    }
    acc
}

const BSPLINE_SHIFT: f64 = 0.31;

impl CorpusFn {
    /// Univariate factor of the tensor product.
    pub fn factor(&self, t: f64) -> f64 {
        match &self.kind {
            MemberKind::BsplineTensor { r } => {
                let ell = r + 1;
                bspline(ell, t - BSPLINE_SHIFT + ell as f64 / 2.0)
            }
            MemberKind::CombTensor { r } => comb_factor(*r, t),
            MemberKind::PolyGauss => (1.0 + t + 0.5 * t * t) * (-0.25 * t * t).exp(),
            MemberKind::SinProd => (2.0 * std::f64::consts::PI * t).sin(),
            MemberKind::LacunaryTensor { r } => lacunary_factor(*r, t),
            MemberKind::TailGauss { s } => (0.5 * t * t).exp() * (1.0 + t * t).powf(-s),
            MemberKind::Outward { r } => outward_factor(*r, t),
            MemberKind::Fourier { r, terms } => fourier_factor(*r, *terms, t),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "corpus member dimension mismatch");
        x.iter().map(|&t| self.factor(t)).product()
    }

    /// Per-axis breakpoints (kink locations) the oracle aligns panels to.
    pub fn breakpoints_1d(&self) -> Vec<f64> {
        match &self.kind {
            MemberKind::BsplineTensor { r } => {
                let ell = (r + 1) as i64;
                (0..=ell)
                    .map(|k| BSPLINE_SHIFT - ell as f64 / 2.0 + k as f64)
                    .collect()
            }
            MemberKind::CombTensor { .. } => {
                let n = 2usize << COMB_LEVELS;
                (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect()
            }
            MemberKind::Outward { r } => {
                let ell = (r + 1) as f64;
                let mut pts = Vec::new();
                for (p, _) in outward_layout(*r) {
                    let mut knot = p - ell / 2.0;
                    while knot <= p + ell / 2.0 + 1e-9 {
                        pts.push(knot);
                        pts.push(-knot);
                        knot += 1.0;
                    }
                }
                pts
            }
            _ => Vec::new(),
        }
    }

    /// Exact integral over the unit torus per axis, where known.
    pub fn reference_cube(&self) -> Option<f64> {
        match &self.kind {
            MemberKind::SinProd => Some(0.0),
            MemberKind::LacunaryTensor { .. } => Some(1.0),
            MemberKind::Fourier { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Certified reference integral of f against the weight over R^d,
    /// with an absolute error bound. Tensorizes through the factors;
    /// memoized per (member, weight).
    pub fn reference_weighted(&self, w: &Weight) -> Result<(f64, f64)> {
        if w.dim() != self.dim {
            return Err(Error::Precondition(format!(
                "weight dimension {} vs member dimension {}",
                w.dim(),
                self.dim
            )));
        }
        let key = (self.id.clone(), weight_spec_string(w));
        {
            let cache = reference_cache().lock().unwrap();
            if let Some(hit) = cache.get(&key) {
                return Ok(*hit);
            }
        }
        let computed = self.reference_weighted_uncached(w)?;
        reference_cache().lock().unwrap().insert(key, computed);
        Ok(computed)
    }

    fn reference_weighted_uncached(&self, w: &Weight) -> Result<(f64, f64)> {
        let w1 = w.univariate();
        if let MemberKind::Outward { r } = self.kind {
            // The bumps are bumps of the weighted integrand f w relative
            // to the standard Gaussian density, so each contributes its
            // mass exactly: per axis 1 + 2 sum_j m_j.
            match w1 {
                Weight::Freud(FreudWeight { lambda, a, b, .. })
                    if lambda == 2.0 && a == 0.5 =>
                {
                    let gauss_b = -0.5 * (2.0 * std::f64::consts::PI).ln();
                    let mass = (std::f64::consts::PI / a).sqrt() * b.exp();
                    let bumps: f64 =
                        2.0 * outward_layout(r).iter().map(|(_, m)| m).sum::<f64>();
                    let axis = mass + bumps * (b - gauss_b).exp();
                    let value = axis.powi(self.dim as i32);
                    return Ok((value, 1e-12 * value.abs()));
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "member {} requires the Gaussian weight (lambda=2, a=1/2)",
                        self.id
                    )))
                }
            }
        }
        if let MemberKind::Fourier { r, terms } = self.kind {
            // closed-form cosine transform, as for the lacunary member
            match w1 {
                Weight::Freud(FreudWeight { lambda, a, b, .. }) if lambda == 2.0 => {
                    let mass = (std::f64::consts::PI / a).sqrt() * b.exp();
                    let mut axis = mass;
                    for n in 1..=terms {
                        let nf = n as f64;
                        let amp = nf.powf(-(r as f64 + 0.5)) / (1.0 + nf.ln());
                        let omega = 2.0 * std::f64::consts::PI * nf;
                        axis += amp * mass * (-omega * omega / (4.0 * a)).exp();
                    }
                    let value = axis.powi(self.dim as i32);
                    return Ok((value, 1e-12 * value.abs()));
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "member {} has a certified reference only for lambda = 2 weights",
                        self.id
                    )))
                }
            }
        }
        if let MemberKind::LacunaryTensor { r } = self.kind {
            // The top harmonic oscillates ~2^12 times per unit; brute
            // panel quadrature cannot certify that, but for lambda = 2
            // the cosine transform is closed-form:
            // int cos(w t) e^{-a t^2 + b} dt = sqrt(pi/a) e^b e^{-w^2/(4a)}.
            match w1 {
                Weight::Freud(FreudWeight { lambda, a, b, .. }) if lambda == 2.0 => {
                    let mass = (std::f64::consts::PI / a).sqrt() * b.exp();
                    let mut axis = mass;
                    for j in 0..=LACUNARY_LEVELS {
                        let amp = 2f64.powi(-(r as i32) * j as i32)
                            / (1.0 + j as f64).powf(0.75);
                        let omega = 2.0 * std::f64::consts::PI * 2f64.powi(j as i32);
                        axis += amp * mass * (-omega * omega / (4.0 * a)).exp();
                    }
                    let value = axis.powi(self.dim as i32);
                    return Ok((value, 1e-12 * value.abs()));
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "member {} has a certified reference only for lambda = 2 weights",
                        self.id
                    )))
                }
            }
        }
        if let MemberKind::TailGauss { s } = self.kind {
            // Analytic: the e^{t^2/2} core cancels a lambda = 2, a = 1/2
            // weight exactly, leaving int (1+t^2)^{-s} = sqrt(pi)
            // Gamma(s - 1/2) / Gamma(s) per axis.
            match w1 {
                Weight::Freud(FreudWeight { lambda, a, b, .. })
                    if lambda == 2.0 && a == 0.5 =>
                {
                    let axis =
                        std::f64::consts::PI.sqrt() * gamma(s - 0.5) / gamma(s) * b.exp();
                    let value = axis.powi(self.dim as i32);
                    return Ok((value, 1e-13 * value.abs()));
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "member {} requires the Gaussian weight (lambda=2, a=1/2)",
                        self.id
                    )))
                }
            }
        }
        let (axis_value, axis_bound) = self.factor_integral_1d(&w1)?;
        // product of d identical axis integrals; first-order error bound
        let value = axis_value.powi(self.dim as i32);
        let bound = self.dim as f64
            * axis_bound
            * axis_value.abs().powi(self.dim as i32 - 1).max(1e-30);
        Ok((value, bound))
    }

    /// Univariate factor integral against the weight with dual-layout
    /// validation: two independent panel configurations must agree.
    fn factor_integral_1d(&self, w1: &Weight) -> Result<(f64, f64)> {
        let radius = default_radius(w1);
        let a = oracle_integral_1d_config(
            &|t| self.factor(t),
            w1,
            &self.breakpoints_1d(),
            radius,
            1e-12,
            &OracleConfig { per_cell: 1, base_degree: 14, max_refine: 4 },
        )?;
        let b = oracle_integral_1d_config(
            &|t| self.factor(t),
            w1,
            &self.breakpoints_1d(),
            radius * 1.07,
            1e-12,
            &OracleConfig { per_cell: 2, base_degree: 10, max_refine: 4 },
        )?;
        let spread = (a.0 - b.0).abs();
        let bound = spread + a.1 + b.1;
        if bound > 1e-10 * a.0.abs().max(1.0) {
            return Err(Error::NonConvergence(format!(
                "dual-oracle disagreement for {}: {} vs {} (bound {bound:.3e})",
                self.id, a.0, b.0
            )));
        }
        Ok((a.0, bound))
    }
}

type RefCache = Mutex<HashMap<(String, String), (f64, f64)>>;

fn reference_cache() -> &'static RefCache {
    static CACHE: OnceLock<RefCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Truncation radius from the weight decay: solve
/// `a R^lambda = 40 ln 10 + lambda ln R` by fixed point.
pub fn default_radius(w: &Weight) -> f64 {
    let a = w.a();
    let lambda = w.lambda();
    let target = 40.0 * 10f64.ln();
    let mut radius = (target / a).powf(1.0 / lambda);
    for _ in 0..6 {
        radius = ((target + lambda * radius.ln()) / a).powf(1.0 / lambda);
    }
    radius
}

/// Escalation settings for the panel oracle.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub per_cell: usize,
    pub base_degree: usize,
    pub max_refine: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { per_cell: 1, base_degree: 14, max_refine: 4 }
    }
}

fn axis_panels(breaks: &[f64], radius: f64, per_cell: usize) -> Vec<(f64, f64)> {
    // scale panels resolving the weight decay, merged with the member's
    // breakpoints
    let mut edges: Vec<f64> = vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.5, 4.0, 6.5, 9.0, 12.0, 16.0]
        .into_iter()
        .filter(|&e| e < radius)
        .collect();
    edges.push(radius);
    let mut all: Vec<f64> = edges.iter().map(|&e| -e).chain(edges.iter().copied()).collect();
    all.extend(breaks.iter().copied().filter(|b| b.abs() < radius));
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    panels::panels_from_breakpoints(&all, per_cell)
}

/// Univariate weighted oracle integral with escalating degree; returns
/// (value, certified error bound = refinement spread + weight tail).
pub fn oracle_integral_1d_config(
    f: &dyn Fn(f64) -> f64,
    w: &Weight,
    breaks: &[f64],
    radius: f64,
    tol: f64,
    cfg: &OracleConfig,
) -> Result<(f64, f64)> {
    if tol < 1e-13 {
        return Err(Error::Precondition("oracle tolerance below 1e-13".into()));
    }
    let w1 = w.univariate();
    let segs = axis_panels(breaks, radius, cfg.per_cell);
    let tail = w1.univariate_tail_bound(radius);
    let mut prev: Option<f64> = None;
    let mut degree = cfg.base_degree;
    for _ in 0..=cfg.max_refine {
        let value = panels::integrate_panels(&|t| f(t) * w1.factor(t), &segs, degree);
        if !value.is_finite() {
            return Err(Error::EvalFailure {
                node: vec![f64::NAN],
                detail: "oracle integrand overflowed".into(),
            });
        }
        if let Some(p) = prev {
            let spread = (value - p).abs();
            if spread <= tol * value.abs().max(1.0) && tail <= tol * value.abs().max(1.0) {
                return Ok((value, spread + tail));
            }
        }
        prev = Some(value);
        degree *= 2;
    }
    Err(Error::NonConvergence(format!(
        "oracle integral did not stabilize to {tol} (last {prev:?}, tail bound {tail:.3e})"
    )))
}

/// The generic tensorized oracle for arbitrary integrands (d <= 2):
/// escalating tensor Gauss on the truncated box plus the analytic weight
/// tail bound.
pub fn oracle_integral(
    f: &dyn Fn(&[f64]) -> f64,
    w: &Weight,
    radius: Option<f64>,
    tol: f64,
) -> Result<(f64, f64)> {
    let d = w.dim();
    if d > 2 {
        return Err(Error::Precondition(
            "generic oracle supports d <= 2; use tensor-structured references beyond".into(),
        ));
    }
    if tol < 1e-13 {
        return Err(Error::Precondition("oracle tolerance below 1e-13".into()));
    }
    let radius = radius.unwrap_or_else(|| default_radius(w));
    let w1 = w.univariate();
    let segs = axis_panels(&[], radius, 1);
    let tail = d as f64 * w1.univariate_tail_bound(radius) * w1.univariate_mass().powi(d as i32 - 1);
    let mut prev: Option<f64> = None;
    let mut degree = 12usize;
    for _ in 0..=4 {
        let (xs, ws) = panels::gauss_legendre_cached(degree);
        let mut nodes = Vec::new();
        let mut wts = Vec::new();
        for &(lo, hi) in &segs {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, wq) in xs.iter().zip(ws.iter()) {
                nodes.push(mid + half * x);
                wts.push(wq * half * w1.factor(mid + half * x));
            }
        }
        let value = if d == 1 {
            let terms: Vec<f64> = nodes
                .iter()
                .zip(wts.iter())
                .map(|(&x, &q)| q * f(&[x]))
                .collect();
            panels::pairwise_sum(&terms)
        } else {
            let mut terms = Vec::with_capacity(nodes.len() * nodes.len());
            for (i, &xi) in nodes.iter().enumerate() {
                for (j, &xj) in nodes.iter().enumerate() {
                    terms.push(wts[i] * wts[j] * f(&[xi, xj]));
                }
            }
            panels::pairwise_sum(&terms)
        };
        if !value.is_finite() {
            return Err(Error::EvalFailure {
                node: vec![f64::NAN],
                detail: "oracle integrand overflowed".into(),
            });
        }
        if let Some(p) = prev {
            let spread = (value - p).abs();
            if spread <= tol * value.abs().max(1.0) && tail <= tol * value.abs().max(1.0) {
                return Ok((value, spread + tail));
            }
        }
        prev = Some(value);
        degree = degree * 3 / 2;
    }
    Err(Error::NonConvergence(format!(
        "tensor oracle did not stabilize to {tol} (last {prev:?})"
    )))
}

/// Parse a corpus id such as `comb:r=2,d=1`, `bspline:r=1,d=2`,
/// `polygauss:d=1`, `sinprod:d=2`, `lacunary:r=2,d=2`, `tail:s=1.02,d=1`.
pub fn corpus_member(id: &str) -> Result<CorpusFn> {
    let (head, rest) = id.split_once(':').unwrap_or((id, ""));
    let mut fields: HashMap<String, f64> = HashMap::new();
    if !rest.is_empty() {
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in `{part}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numeric value in `{part}`")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("non-finite value in `{part}`")));
            }
            fields.insert(k.trim().to_string(), v);
        }
    }
    let dim = match fields.get("d") {
        Some(&v) if v.fract() == 0.0 && (1.0..=3.0).contains(&v) => v as usize,
        Some(&v) => return Err(Error::Parse(format!("d must be an integer in 1..=3, got {v}"))),
        None => return Err(Error::Parse(format!("corpus id `{id}` missing d"))),
    };
    let get_r = || -> Result<usize> {
        match fields.get("r") {
            Some(&v) if v.fract() == 0.0 && (1.0..=4.0).contains(&v) => Ok(v as usize),
            Some(&v) => Err(Error::Parse(format!("r must be an integer in 1..=4, got {v}"))),
            None => Err(Error::Parse(format!("corpus id `{id}` missing r"))),
        }
    };
    let (kind, smoothness, periodic) = match head {
        "bspline" => {
            let r = get_r()?;
            (MemberKind::BsplineTensor { r }, r, false)
        }
        "comb" => {
            let r = get_r()?;
            (MemberKind::CombTensor { r }, r, false)
        }
        "polygauss" => (MemberKind::PolyGauss, 4, false),
        "sinprod" => (MemberKind::SinProd, 4, true),
        "lacunary" => {
            let r = get_r()?;
            (MemberKind::LacunaryTensor { r }, r, true)
        }
        "outward" => {
            let r = get_r()?;
            (MemberKind::Outward { r }, r, false)
        }
        "fourier" => {
            let r = get_r()?;
            let terms = match fields.get("n") {
                None => FOURIER_TERMS,
                Some(&v) if v.fract() == 0.0 && (1.0..=65536.0).contains(&v) => v as usize,
                Some(&v) => {
                    return Err(Error::Parse(format!(
                        "fourier term count must be an integer in 1..=65536, got {v}"
                    )))
                }
            };
            (MemberKind::Fourier { r, terms }, r, true)
        }
        "tail" => {
            let s = *fields
                .get("s")
                .ok_or_else(|| Error::Parse(format!("corpus id `{id}` missing s")))?;
            if !(s > 0.75) || s > 8.0 {
                return Err(Error::Parse(format!("tail exponent s out of range: {s}")));
            }
            // in W^r_1(gauss) exactly for r < 2s - 1
            let r_label = ((2.0 * s - 1.0) - 1e-9).floor().max(0.0) as usize;
            (MemberKind::TailGauss { s }, r_label, false)
        }
        other => return Err(Error::Parse(format!("unknown corpus family `{other}`"))),
    };
    let canonical = match &kind {
        MemberKind::BsplineTensor { r } => format!("bspline:r={r},d={dim}"),
        MemberKind::CombTensor { r } => format!("comb:r={r},d={dim}"),
        MemberKind::PolyGauss => format!("polygauss:d={dim}"),
        MemberKind::SinProd => format!("sinprod:d={dim}"),
        MemberKind::LacunaryTensor { r } => format!("lacunary:r={r},d={dim}"),
        MemberKind::TailGauss { s } => format!("tail:s={s},d={dim}"),
        MemberKind::Outward { r } => format!("outward:r={r},d={dim}"),
        MemberKind::Fourier { r, terms } => {
            if *terms == FOURIER_TERMS {
                format!("fourier:r={r},d={dim}")
            } else {
                format!("fourier:r={r},n={terms},d={dim}")
            }
        }
    };
    Ok(CorpusFn {
        id: canonical,
        dim,
        smoothness,
        periodic,
        kind,
    })
}

/// The corpus for a weight class, dimension and smoothness label.
pub fn corpus(w: &Weight, d: usize, r: usize) -> Result<Vec<CorpusFn>> {
    if !(1..=4).contains(&r) || !(1..=3).contains(&d) {
        return Err(Error::Precondition(format!(
            "corpus supports r in 1..=4 and d in 1..=3, got r={r}, d={d}"
        )));
    }
    let mut ids = vec![
        format!("bspline:r={r},d={d}"),
        format!("comb:r={r},d={d}"),
        format!("polygauss:d={d}"),
        format!("sinprod:d={d}"),
        format!("lacunary:r={r},d={d}"),
    ];
    if let Weight::Freud(fw) = w.univariate() {
        if fw.lambda == 2.0 {
            ids.push(format!("fourier:r={r},d={d}"));
        }
        if fw.lambda == 2.0 && fw.a == 0.5 {
            let s = 0.5 * (r as f64 + 1.0) + 0.02;
            ids.push(format!("tail:s={s},d={d}"));
            ids.push(format!("outward:r={r},d={d}"));
        }
    }
    ids.iter().map(|id| corpus_member(id)).collect()
}

/// JSON corpus listing: `[{id, dim, r, periodic, integral, integral_error_bound}]`
/// against the given weight (members without a reference for the weight
/// report null).
pub fn corpus_listing_json(w: &Weight, d: usize, r: usize) -> Result<String> {
    let members = corpus(w, d, r)?;
    let mut rows = Vec::new();
    for m in &members {
        let reference = m.reference_weighted(w).ok();
        rows.push(serde_json::json!({
            "id": m.id,
            "dim": m.dim,
            "r": m.smoothness,
            "periodic": m.periodic,
            "integral": reference.map(|v| v.0),
            "integral_error_bound": reference.map(|v| v.1),
        }));
    }
    serde_json::to_string_pretty(&rows)
        .map_err(|e| Error::Parse(format!("json encoding failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gauss1() -> Weight {
        Weight::Freud(FreudWeight::standard_gaussian(1))
    }

    #[test]
    fn oracle_validates_on_gaussian_moments() {
        let w = gauss1();
        let (one, b1) = oracle_integral(&|_| 1.0, &w, None, 1e-13).unwrap();
        assert!((one - 1.0).abs() <= 1e-12, "got {one}, bound {b1}");
        // weight exp(-x^2): int x^2 e^{-x^2} = sqrt(pi)/2
        let we = Weight::Freud(FreudWeight::new(2.0, 1.0, 0.0, 1).unwrap());
        let (m2, _) = oracle_integral(&|x| x[0] * x[0], &we, None, 1e-13).unwrap();
        assert_relative_eq!(m2, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-11);
    }

    #[test]
    fn oracle_2d_product_moment() {
        let we = Weight::Freud(FreudWeight::new(2.0, 1.0, 0.0, 2).unwrap());
        let (got, _) =
            oracle_integral(&|x| x[0] * x[0] * x[1] * x[1], &we, None, 1e-12).unwrap();
        assert_relative_eq!(got, std::f64::consts::PI / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn bspline_member_reference_matches_simpson() {
        // independent oracle: composite Simpson with panels split at the
        // kinks, h^4 error far below the certification bound
        let m = corpus_member("bspline:r=1,d=1").unwrap();
        let w = gauss1();
        let (value, bound) = m.reference_weighted(&w).unwrap();
        let g = |t: f64| m.factor(t) * w.univariate().factor(t);
        let mut check = 0.0;
        for seg in [(BSPLINE_SHIFT - 1.0, BSPLINE_SHIFT), (BSPLINE_SHIFT, BSPLINE_SHIFT + 1.0)] {
            let n = 1 << 14;
            let h = (seg.1 - seg.0) / n as f64;
            let mut acc = g(seg.0) + g(seg.1);
            for i in 1..n {
                let t = seg.0 + i as f64 * h;
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(t);
            }
            check += acc * h / 3.0;
        }
        assert!((value - check).abs() <= 1e-11 + bound, "{value} vs {check}");
        assert!(bound <= 1e-10f64.max(1e-10 * value.abs()));
    }

    #[test]
    fn comb_member_reference_certified() {
        let m = corpus_member("comb:r=2,d=1").unwrap();
        let w = gauss1();
        let (value, bound) = m.reference_weighted(&w).unwrap();
        // the alternating comb has near-zero mean on top of the constant 1
        assert!((value - 1.0).abs() < 0.3, "value {value}");
        assert!(bound <= 1e-10 * value.abs().max(1.0));
    }

    #[test]
    fn lacunary_reference_close_to_one_under_gaussian() {
        // the j-th harmonic contributes e^{-(2 pi 2^j)^2/2}: utterly tiny
        let m = corpus_member("lacunary:r=2,d=2").unwrap();
        let w = Weight::Freud(FreudWeight::standard_gaussian(2));
        let (value, _) = m.reference_weighted(&w).unwrap();
        let first_term = (-0.5 * (2.0 * std::f64::consts::PI).powi(2)).exp();
        assert_relative_eq!(value, (1.0 + first_term).powi(2), max_relative = 1e-9);
        assert_eq!(m.reference_cube(), Some(1.0));
    }

    #[test]
    fn tail_member_reference_analytic() {
        let m = corpus_member("tail:s=1.02,d=1").unwrap();
        assert_eq!(m.smoothness, 1);
        let w = gauss1();
        let (value, bound) = m.reference_weighted(&w).unwrap();
        // (2 pi)^{-1/2} sqrt(pi) Gamma(s-1/2)/Gamma(s)
        let b = -0.5 * (2.0 * std::f64::consts::PI).ln();
        let want = std::f64::consts::PI.sqrt() * gamma(0.52) / gamma(1.02) * b.exp();
        assert_relative_eq!(value, want, max_relative = 1e-12);
        assert!(bound < 1e-10 * value);
        // not defined for other weights
        let other = Weight::Freud(FreudWeight::new(4.0, 1.0, 0.0, 1).unwrap());
        assert!(m.reference_weighted(&other).is_err());
    }

    #[test]
    fn corpus_has_at_least_five_members_per_cell() {
        for d in 1..=3usize {
            for r in 1..=4usize {
                let members = corpus(&gauss1(), d, r).unwrap();
                assert!(members.len() >= 5, "d={d} r={r}: {}", members.len());
                for m in &members {
                    assert_eq!(m.dim, d);
                }
            }
        }
    }

    #[test]
    fn sinprod_cube_integral_zero() {
        let m = corpus_member("sinprod:d=2").unwrap();
        assert_eq!(m.reference_cube(), Some(0.0));
        assert!(m.periodic);
    }

    #[test]
    fn smoothness_labels_honest_fd() {
        // r-th derivative bounded, (r+1)-st blows up at a knot: probe the
        // b-spline member with central differences across the knot.
        for r in 1..=2usize {
            let m = corpus_member(&format!("bspline:r={r},d=1")).unwrap();
            let knot = BSPLINE_SHIFT + 0.5 * (r as f64 + 1.0) - 1.0;
            let fd = |order: usize, h: f64| -> f64 {
                // central difference of given order at the knot
                let mut acc = 0.0;
                let n = order;
                let mut binom = 1.0f64;
                for k in 0..=n {
                    let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * binom * m.factor(knot + (k as f64 - n as f64 / 2.0) * h);
                    binom = binom * (n - k) as f64 / (k + 1) as f64;
                }
                acc / h.powi(n as i32)
            };
            let r_small = fd(r, 1e-3).abs();
            let r_tiny = fd(r, 1e-4).abs();
            assert!(r_tiny < 2.0 * r_small.max(1.0), "D^{r} should stay bounded");
            let rp_small = fd(r + 1, 1e-2).abs();
            let rp_tiny = fd(r + 1, 1e-3).abs();
            assert!(
                rp_tiny > 5.0 * rp_small.max(1e-9),
                "D^{} should blow up: {rp_small} -> {rp_tiny}",
                r + 1
            );
        }
    }

    #[test]
    fn comb_factor_is_one_outside_support() {
        let m = corpus_member("comb:r=1,d=1").unwrap();
        assert_eq!(m.factor(-1.5), 1.0);
        assert_eq!(m.factor(2.0), 1.0);
        assert!(m.factor(0.0) > 1.0);
    }

    #[test]
    fn member_ids_round_trip() {
        for id in [
            "bspline:r=1,d=2",
            "comb:r=2,d=1",
            "polygauss:d=3",
            "sinprod:d=2",
            "lacunary:r=3,d=2",
            "tail:s=1.52,d=1",
        ] {
            let m = corpus_member(id).unwrap();
            assert_eq!(m.id, id);
            let again = corpus_member(&m.id).unwrap();
            assert_eq!(again.id, id);
        }
    }

    #[test]
    fn outward_member_reference_and_safety() {
        let m = corpus_member("outward:r=1,d=1").unwrap();
        let w = gauss1();
        let (value, _) = m.reference_weighted(&w).unwrap();
        let bumps: f64 = 2.0 * outward_layout(1).iter().map(|(_, mm)| mm).sum::<f64>();
        assert_relative_eq!(value, 1.0 + bumps, max_relative = 1e-12);
        // evaluable everywhere, even at the far frontier
        for &t in &[0.0, 5.5, 21.0, 35.5, 36.4, 80.0, -17.3] {
            assert!(m.factor(t).is_finite(), "overflow at {t}");
        }
        assert_eq!(m.factor(0.0), 1.0);
        assert!(m.factor(5.5) != 1.0);
    }

    #[test]
    fn outward_analytic_reference_agrees_with_panel_oracle() {
        // the bumps carry real mass out to |t| = 36.5; a wide aligned
        // panel quadrature must reproduce the closed-form reference
        let m = corpus_member("outward:r=1,d=1").unwrap();
        let w = gauss1();
        let (analytic, _) = m.reference_weighted(&w).unwrap();
        let (numeric, bound) = oracle_integral_1d_config(
            &|t| m.factor(t),
            &w,
            &m.breakpoints_1d(),
            40.0,
            1e-12,
            &OracleConfig { per_cell: 1, base_degree: 12, max_refine: 4 },
        )
        .unwrap();
        assert!(
            (analytic - numeric).abs() <= 1e-9 + bound,
            "analytic {analytic} vs numeric {numeric}"
        );
    }

    #[test]
    fn fourier_member_references() {
        let m = corpus_member("fourier:r=2,d=2").unwrap();
        assert_eq!(m.reference_cube(), Some(1.0));
        let w = Weight::Freud(FreudWeight::standard_gaussian(2));
        let (value, _) = m.reference_weighted(&w).unwrap();
        let first = (-0.5 * (2.0 * std::f64::consts::PI).powi(2)).exp() / 1.0f64;
        assert_relative_eq!(value, (1.0 + first).powi(2), max_relative = 1e-8);
    }

    proptest! {
        #[test]
        fn corpus_id_parser_never_panics(s in "\\PC*") {
            let _ = corpus_member(&s);
        }
    }
}
