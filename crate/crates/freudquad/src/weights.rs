//! Freud-type and Markov–Sonin weights on R^d, Mhaskar–Rakhmanov–Saff
//! numbers, and weighted Sobolev norm estimation.
//!
//! All weights are tensor products of a univariate factor. Evaluation is
//! done in log-space internally so that the normalization offset `b` and
//! large `a |x|^lambda` never overflow on the way to the final `exp`.

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::panels;

/// Freud-type weight `exp(-a |x|^lambda + b)` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreudWeight {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub dim: usize,
}

impl FreudWeight {
    pub fn new(lambda: f64, a: f64, b: f64, dim: usize) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(Error::Precondition(format!("lambda must be > 1, got {lambda}")));
        }
        if !(a > 0.0) {
            return Err(Error::Precondition(format!("a must be > 0, got {a}")));
        }
        if dim == 0 {
            return Err(Error::Precondition("dim must be >= 1".into()));
        }
        Ok(FreudWeight { lambda, a, b, dim })
    }

    /// The normalized Gaussian density `(2 pi)^{-d/2} exp(-|x|^2/2)`,
    /// i.e. lambda = 2, a = 1/2, b = -ln(2 pi)/2.
    pub fn standard_gaussian(dim: usize) -> Self {
        FreudWeight {
            lambda: 2.0,
            a: 0.5,
            b: -0.5 * (2.0 * std::f64::consts::PI).ln(),
            dim,
        }
    }

    /// ln of the univariate factor at t.
    pub fn log_factor(&self, t: f64) -> f64 {
        -self.a * t.abs().powf(self.lambda) + self.b
    }

    pub fn with_dim(&self, dim: usize) -> Self {
        FreudWeight { dim, ..*self }
    }
}

/// Markov–Sonin weight `|x|^beta exp(-a x^2 + b)` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovSoninWeight {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub dim: usize,
}

impl MarkovSoninWeight {
    pub fn new(beta: f64, a: f64, b: f64, dim: usize) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Precondition(format!("beta must be > 0, got {beta}")));
        }
        if !(a > 0.0) {
            return Err(Error::Precondition(format!("a must be > 0, got {a}")));
        }
        if dim == 0 {
            return Err(Error::Precondition("dim must be >= 1".into()));
        }
        Ok(MarkovSoninWeight { beta, a, b, dim })
    }
}

/// A product weight on R^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Freud(FreudWeight),
    MarkovSonin(MarkovSoninWeight),
}

impl Weight {
    pub fn dim(&self) -> usize {
        match self {
            Weight::Freud(w) => w.dim,
            Weight::MarkovSonin(w) => w.dim,
        }
    }

    /// Univariate restriction of the same weight family.
    pub fn univariate(&self) -> Weight {
        match self {
            Weight::Freud(w) => Weight::Freud(w.with_dim(1)),
            Weight::MarkovSonin(w) => Weight::MarkovSonin(MarkovSoninWeight { dim: 1, ..*w }),
        }
    }

    /// ln of the univariate factor. For Markov–Sonin this is -inf at 0
    /// (the limit value of the factor is 0 there).
    pub fn log_factor(&self, t: f64) -> f64 {
        match self {
            Weight::Freud(w) => w.log_factor(t),
            Weight::MarkovSonin(w) => {
                w.beta * t.abs().ln() - w.a * t * t + w.b
            }
        }
    }

    /// Univariate factor value.
    pub fn factor(&self, t: f64) -> f64 {
        match self {
            Weight::MarkovSonin(w) if t == 0.0 => {
                // Continuous extension: |x|^beta -> 0 as x -> 0 for beta > 0.
                debug_assert!(w.beta > 0.0);
                0.0
            }
            _ => self.log_factor(t).exp(),
        }
    }

    /// ln w(x) over all coordinates (`-inf` where the weight vanishes).
    pub fn log_evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        x.iter().map(|&t| self.log_factor(t)).sum()
    }

    /// w(x) as the exact product of univariate factors, computed in
    /// log-space.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        if let Weight::MarkovSonin(_) = self {
            if x.iter().any(|&t| t == 0.0) {
                return 0.0;
            }
        }
        self.log_evaluate(x).exp()
    }

    /// Exponent lambda governing the tail decay (2 for Markov–Sonin).
    pub fn lambda(&self) -> f64 {
        match self {
            Weight::Freud(w) => w.lambda,
            Weight::MarkovSonin(_) => 2.0,
        }
    }

    pub fn a(&self) -> f64 {
        match self {
            Weight::Freud(w) => w.a,
            Weight::MarkovSonin(w) => w.a,
        }
    }

    pub fn b(&self) -> f64 {
        match self {
            Weight::Freud(w) => w.b,
            Weight::MarkovSonin(w) => w.b,
        }
    }

    /// Total mass of the univariate factor, `int_R w_1(t) dt`.
    pub fn univariate_mass(&self) -> f64 {
        match self {
            Weight::Freud(w) => {
                // int exp(-a|t|^l) dt = 2 Gamma(1 + 1/l) a^{-1/l}
                2.0 * gamma(1.0 + 1.0 / w.lambda) * w.a.powf(-1.0 / w.lambda) * w.b.exp()
            }
            Weight::MarkovSonin(w) => {
                // int |t|^beta exp(-a t^2) dt = Gamma((beta+1)/2) a^{-(beta+1)/2}
                gamma((w.beta + 1.0) / 2.0) * w.a.powf(-(w.beta + 1.0) / 2.0) * w.b.exp()
            }
        }
    }

    /// Upper bound on the univariate tail mass `int_{|t|>radius} w_1`.
    ///
    /// Uses convexity of t^lambda (lambda > 1):
    /// t^l >= R^l + l R^{l-1} (t - R) for t >= R, so the tail is bounded by
    /// `2 e^{b - a R^l} / (a l R^{l-1})`. For Markov–Sonin an extra factor
    /// R^beta covers the algebraic part whenever `R >= sqrt(beta / a)`.
    pub fn univariate_tail_bound(&self, radius: f64) -> f64 {
        assert!(radius > 0.0);
        match self {
            Weight::Freud(w) => {
                let l = w.lambda;
                2.0 * (w.b - w.a * radius.powf(l)).exp() / (w.a * l * radius.powf(l - 1.0))
            }
            Weight::MarkovSonin(w) => {
                assert!(
                    radius * radius >= w.beta / w.a,
                    "tail bound needs radius >= sqrt(beta/a)"
                );
                2.0 * radius.powf(w.beta) * (w.b - w.a * radius * radius).exp()
                    / (2.0 * w.a * radius)
            }
        }
    }
}

/// Derived rate parameters `r_lambda = (1 - 1/lambda) r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub r: usize,
    pub lambda: f64,
    pub r_lambda: f64,
}

impl RateParams {
    pub fn new(r: usize, lambda: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::Precondition("smoothness r must be >= 1".into()));
        }
        if !(lambda > 1.0) {
            return Err(Error::Precondition(format!("lambda must be > 1, got {lambda}")));
        }
        Ok(RateParams {
            r,
            lambda,
            r_lambda: (1.0 - 1.0 / lambda) * r as f64,
        })
    }
}

/// Mhaskar–Rakhmanov–Saff number `a_m = (gamma_lambda m)^{1/lambda}` with
/// `gamma_lambda = 2 Gamma((1+lambda)/2) / (sqrt(pi) Gamma(lambda/2))`.
pub fn mrs_number(w: &FreudWeight, m: usize) -> f64 {
    assert!(m >= 1, "mrs_number: m must be >= 1");
    let l = w.lambda;
    let gamma_lambda = 2.0 * gamma((1.0 + l) / 2.0) / (std::f64::consts::PI.sqrt() * gamma(l / 2.0));
    (gamma_lambda * m as f64).powf(1.0 / l)
}

/// Function with mixed partial derivatives available up to some order.
pub trait MixedDerivatives {
    fn dim(&self) -> usize;
    /// Evaluate `D^k f` at x, where `k[i]` is the derivative order along
    /// axis i.
    fn eval_deriv(&self, k: &[usize], x: &[f64]) -> f64;
    fn eval(&self, x: &[f64]) -> f64 {
        let k = vec![0usize; self.dim()];
        self.eval_deriv(&k, x)
    }
}

/// Configuration for the truncated-domain Sobolev norm estimate.
#[derive(Debug, Clone)]
pub struct NormEstimateConfig {
    /// Truncation radius per axis.
    pub radius: f64,
    /// Panels per axis on [-radius, radius].
    pub panels_per_axis: usize,
    /// Initial Gauss–Legendre degree per panel; refinement doubles it.
    pub base_degree: usize,
    /// Relative agreement target between successive refinements.
    pub tol: f64,
    /// Maximum number of refinements before reporting failure.
    pub max_refine: usize,
}

impl Default for NormEstimateConfig {
    fn default() -> Self {
        NormEstimateConfig {
            radius: 12.0,
            panels_per_axis: 24,
            base_degree: 10,
            tol: 1e-10,
            max_refine: 5,
        }
    }
}

/// l_p aggregation of the weighted L_p norms of all mixed derivatives
/// `D^k f` with `|k|_inf <= r`, integrated over the truncated box
/// `[-radius, radius]^d`. Tagged as an estimate: the domain truncation is
/// not corrected, so the caller picks a radius beyond which the integrand
/// is negligible.
pub fn weighted_sobolev_norm_estimate(
    f: &dyn MixedDerivatives,
    w: &Weight,
    r: usize,
    p: f64,
    cfg: &NormEstimateConfig,
) -> Result<f64> {
    assert_eq!(f.dim(), w.dim(), "dimension mismatch");
    assert!(p >= 1.0);
    let d = w.dim();

    let mut total = 0.0f64;
    let mut k = vec![0usize; d];
    loop {
        let term = lp_term(f, w, &k, p, cfg)?;
        total += term;
        // next multi-order with entries in 0..=r
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(total.powf(1.0 / p));
            }
            if k[axis] < r {
                k[axis] += 1;
                break;
            }
            k[axis] = 0;
            axis += 1;
        }
    }
}

fn lp_term(
    f: &dyn MixedDerivatives,
    w: &Weight,
    k: &[usize],
    p: f64,
    cfg: &NormEstimateConfig,
) -> Result<f64> {
    let d = w.dim();
    let w1 = w.univariate();
    let axis_panels = panels::equal_panels(-cfg.radius, cfg.radius, cfg.panels_per_axis);
    let mut prev: Option<f64> = None;
    let mut degree = cfg.base_degree;
    for _ in 0..=cfg.max_refine {
        let (xs, ws) = panels::gauss_legendre_cached(degree);
        // Per-axis flattened node/weight lists over all panels.
        let mut nodes = Vec::with_capacity(axis_panels.len() * degree);
        let mut wts = Vec::with_capacity(axis_panels.len() * degree);
        for &(lo, hi) in &axis_panels {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, wq) in xs.iter().zip(ws.iter()) {
                nodes.push(mid + half * x);
                wts.push(wq * half);
            }
        }
        let n1 = nodes.len();
        // Tensor sum over d axes.
        let mut idx = vec![0usize; d];
        let mut acc = 0.0f64;
        let mut x = vec![0.0f64; d];
        'outer: loop {
            let mut qw = 1.0f64;
            for (ax, &i) in idx.iter().enumerate() {
                x[ax] = nodes[i];
                qw *= wts[i] * w1.factor(nodes[i]);
            }
            let v = f.eval_deriv(k, &x).abs().powf(p);
            acc += qw * v;
            for ax in 0..d {
                idx[ax] += 1;
                if idx[ax] < n1 {
                    continue 'outer;
                }
                idx[ax] = 0;
                if ax == d - 1 {
                    break 'outer;
                }
            }
        }
        if let Some(prev_val) = prev {
            let scale = prev_val.abs().max(acc.abs()).max(1e-300);
            if (acc - prev_val).abs() / scale < cfg.tol {
                return Ok(acc);
            }
        }
        prev = Some(acc);
        degree *= 2;
    }
    Err(Error::NonConvergence(format!(
        "sobolev norm term for multi-order {k:?} did not stabilize to {} (last two: {:?})",
        cfg.tol, prev
    )))
}

/// Parse a CLI weight specification:
/// `freud:lambda=<f>,a=<f>,b=<f>,d=<int>`, `gauss:d=<int>`,
/// `sonin:beta=<f>,a=<f>,b=<f>,d=<int>`.
///
/// ```
/// use freudquad::weights::parse_weight_spec;
///
/// let w = parse_weight_spec("gauss:d=2").unwrap();
/// assert_eq!(w.dim(), 2);
/// // the normalized Gaussian density integrates to one per axis
/// assert!((w.univariate_mass() - 1.0).abs() < 1e-13);
/// ```
pub fn parse_weight_spec(spec: &str) -> Result<Weight> {
    let (head, rest) = match spec.split_once(':') {
        Some(pair) => pair,
        None => (spec, ""),
    };
    let fields = parse_fields(rest)?;
    let get = |name: &str| -> Result<f64> {
        fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Parse(format!("weight spec missing field `{name}`: `{spec}`")))
    };
    let get_dim = || -> Result<usize> {
        let v = get("d")?;
        if v.fract() != 0.0 || v < 1.0 || v > 64.0 {
            return Err(Error::Parse(format!("d must be an integer in 1..=64, got {v}")));
        }
        Ok(v as usize)
    };
    match head {
        "gauss" => {
            let d = get_dim()?;
            for (k, _) in &fields {
                if k != "d" {
                    return Err(Error::Parse(format!("unknown field `{k}` for gauss weight")));
                }
            }
            Ok(Weight::Freud(FreudWeight::standard_gaussian(d)))
        }
        "freud" => {
            let w = FreudWeight::new(get("lambda")?, get("a")?, get("b")?, get_dim()?)
                .map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Weight::Freud(w))
        }
        "sonin" => {
            let w = MarkovSoninWeight::new(get("beta")?, get("a")?, get("b")?, get_dim()?)
                .map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Weight::MarkovSonin(w))
        }
        other => Err(Error::Parse(format!("unknown weight family `{other}`"))),
    }
}

fn parse_fields(s: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    if s.is_empty() {
        return Ok(out);
    }
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `key=value`, got `{part}`")))?;
        if k.is_empty() {
            return Err(Error::Parse(format!("empty field name in `{part}`")));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numeric value in `{part}`")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite value in `{part}`")));
        }
        out.push((k.trim().to_string(), v));
    }
    Ok(out)
}

/// Canonical spec string for a weight (inverse of `parse_weight_spec` up
/// to the gauss alias).
pub fn weight_spec_string(w: &Weight) -> String {
    match w {
        Weight::Freud(f) => {
            let g = FreudWeight::standard_gaussian(f.dim);
            if (f.lambda, f.a, f.b) == (g.lambda, g.a, g.b) {
                format!("gauss:d={}", f.dim)
            } else {
                format!("freud:lambda={},a={},b={},d={}", f.lambda, f.a, f.b, f.dim)
            }
        }
        Weight::MarkovSonin(s) => {
            format!("sonin:beta={},a={},b={},d={}", s.beta, s.a, s.b, s.dim)
        }
    }
}
