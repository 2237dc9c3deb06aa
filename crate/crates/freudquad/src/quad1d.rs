//! Truncated Gaussian quadrature on R and the adversarial bump
//! construction that certifies lower bounds for arbitrary node sets.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::orthopoly::GaussRule1D;
use crate::panels;
use crate::taylor::Jet;
use crate::weights::{mrs_number, Weight};

/// How the truncation threshold `theta * scale` is anchored.
///
/// `Mrs` uses the Mhaskar–Rakhmanov–Saff number `a_m`; `LargestZero` uses
/// the extreme zero of the rule itself, which is robust to the
/// normalization convention behind the `a_m` formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Mrs,
    LargestZero,
}

/// Whether a Markov–Sonin truncated rule keeps the zero node (the
/// classical case split on `beta` versus `r - 1`). Freud rules always
/// keep it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroNodePolicy {
    Keep,
    Drop,
}

/// Zero-node policy for a Markov–Sonin class with singularity exponent
/// `beta` and smoothness `r`: dropped when `beta > r - 1`, kept when
/// `0 < beta < r - 1` and `beta` is not an integer.
pub fn sonin_zero_policy(beta: f64, r: usize) -> ZeroNodePolicy {
    if beta > r as f64 - 1.0 {
        ZeroNodePolicy::Drop
    } else {
        ZeroNodePolicy::Keep
    }
}

/// A Gaussian rule with the nodes beyond `theta * threshold` discarded.
#[derive(Debug, Clone)]
pub struct TruncatedRule {
    pub base: Arc<GaussRule1D>,
    pub theta: f64,
    pub j_m: usize,
    pub kept_nodes: Vec<f64>,
    pub kept_weights: Vec<f64>,
    pub threshold_mode: ThresholdMode,
}

impl TruncatedRule {
    pub fn len(&self) -> usize {
        self.kept_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept_nodes.is_empty()
    }

    pub fn largest_kept(&self) -> f64 {
        *self.kept_nodes.last().expect("empty truncated rule")
    }
}

/// Truncate a Gaussian rule for a Freud-type weight: retain the nodes
/// `x_{m,k}` with `|k| <= j(m)`, where `j(m)` is the smallest index with
/// `x_{m,j(m)} >= theta * threshold`.
pub fn truncate(
    rule: &Arc<GaussRule1D>,
    w: &Weight,
    theta: f64,
    mode: ThresholdMode,
) -> Result<TruncatedRule> {
    truncate_with_policy(rule, w, theta, mode, ZeroNodePolicy::Keep)
}

/// Truncation with an explicit zero-node policy (Markov–Sonin case split).
pub fn truncate_with_policy(
    rule: &Arc<GaussRule1D>,
    w: &Weight,
    theta: f64,
    mode: ThresholdMode,
    zero_node: ZeroNodePolicy,
) -> Result<TruncatedRule> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Precondition(format!(
            "theta must lie in (0,1), got {theta}"
        )));
    }
    let m = rule.len();
    let threshold = match mode {
        ThresholdMode::LargestZero => rule.largest_node(),
        ThresholdMode::Mrs => match w.univariate() {
            Weight::Freud(fw) => mrs_number(&fw, m),
            Weight::MarkovSonin(_) => (m as f64).sqrt(),
        },
    };
    let cut = theta * threshold;
    // positive zeros start after the (optional) zero node
    let half = m / 2;
    let positives = if m % 2 == 0 { &rule.nodes[half..] } else { &rule.nodes[half + 1..] };
    let j_m = match positives.iter().position(|&x| x >= cut) {
        Some(pos) => pos + 1, // 1-based index of the first zero past the cut
        None => {
            return Err(Error::Precondition(format!(
                "empty truncation: theta*threshold = {cut:.6} exceeds the largest zero {:.6}",
                rule.largest_node()
            )))
        }
    };
    let has_zero_node = m % 2 == 1;
    let keep_zero = has_zero_node && zero_node == ZeroNodePolicy::Keep;
    let count = 2 * j_m + usize::from(keep_zero);
    let mut kept_nodes = Vec::with_capacity(count);
    let mut kept_weights = Vec::with_capacity(count);
    // negative side: indices -j_m..-1 are positions half-1 downto ... in
    // the sorted array; simply take the symmetric slice.
    let first_pos_idx = if m % 2 == 0 { half } else { half + 1 };
    let lo = first_pos_idx - j_m - usize::from(m % 2 == 1); // start of kept block
    for idx in lo..first_pos_idx + j_m {
        let x = rule.nodes[idx];
        if x == 0.0 && !keep_zero {
            continue;
        }
        kept_nodes.push(x);
        kept_weights.push(rule.weights[idx]);
    }
    debug_assert_eq!(kept_nodes.len(), count);
    Ok(TruncatedRule {
        base: rule.clone(),
        theta,
        j_m,
        kept_nodes,
        kept_weights,
        threshold_mode: mode,
    })
}

/// Apply a truncated rule: `sum lambda_{m,k} f(x_{m,k})` over the kept
/// pairs. Zero-weight nodes are skipped without evaluating f (their term
/// is identically zero); a non-finite integrand value is reported with
/// the offending node.
pub fn integrate_tg(rule: &TruncatedRule, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.kept_nodes.len());
    for (&x, &w) in rule.kept_nodes.iter().zip(rule.kept_weights.iter()) {
        if w == 0.0 {
            continue;
        }
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::EvalFailure {
                node: vec![x],
                detail: format!("integrand returned {v}"),
            });
        }
        terms.push(w * v);
    }
    Ok(panels::pairwise_sum(&terms))
}

/// The smooth reference bump `phi(t) = exp(-1/(t(1-t)))` on (0,1).
pub fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

/// Jet of phi at an interior point 0 < t < 1.
fn bump_jet(t: f64, order: usize) -> Jet {
    let tj = Jet::variable(t, order);
    let one_minus = Jet::constant(1.0, order).add(&tj.scale(-1.0));
    let q = tj.mul(&one_minus); // t(1-t)
    q.recip().scale(-1.0).exp()
}

/// `b_0 = int phi` and `b_s = int |phi^(s)|`, s = 1..=r.
pub fn bump_constants(r: usize) -> Vec<f64> {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        let max_r = 6;
        let segs = panels::equal_panels(1e-4, 1.0 - 1e-4, 64);
        (0..=max_r)
            .map(|s| {
                panels::integrate_panels(&|t: f64| bump_jet(t, s).derivative(s).abs(), &segs, 40)
            })
            .collect()
    });
    all[..=r].to_vec()
}

/// Adversarial bump for a node set: supported in a node-free cell of the
/// grid `t_j = delta j` with `delta = n^{1/lambda - 1}`, scaled by
/// `w^{-1}` and normalized by a computed Sobolev-norm bound.
#[derive(Debug, Clone)]
pub struct FoolingBump {
    pub delta: f64,
    /// The node-free cell (t_{i-1}, t_i).
    pub interval: (f64, f64),
    /// Computed upper bound on ||h||_{W^r_1(R; mu)} before normalization.
    pub norm_bound: f64,
    /// Lower bound on the weighted integral of the normalized bump; any
    /// quadrature using the given nodes returns exactly 0 on it.
    pub certified_value: f64,
    r: usize,
    weight: Weight,
}

impl FoolingBump {
    /// Evaluate the normalized fooling function at x.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.interval;
        if x <= lo || x >= hi {
            return 0.0;
        }
        let t = (x - lo) / self.delta;
        bump(t) * (-self.weight.log_factor(x)).exp() / self.norm_bound
    }

    pub fn smoothness(&self) -> usize {
        self.r
    }
}

/// Construct the fooling bump for `nodes` (at most n points), smoothness
/// r, and the univariate weight `w`. The free cell is searched with
/// ascending index i in n+1 ..= 2n+2; the pigeonhole principle guarantees
/// one exists.
pub fn fooling_bump_1d(nodes: &[f64], n: usize, r: usize, w: &Weight) -> Result<FoolingBump> {
    if nodes.len() > n {
        return Err(Error::Precondition(format!(
            "node set of size {} exceeds the budget n = {n}",
            nodes.len()
        )));
    }
    if r == 0 {
        return Err(Error::Precondition("smoothness r must be >= 1".into()));
    }
    let w1 = w.univariate();
    let lambda = w1.lambda();
    let delta = (n as f64).powf(1.0 / lambda - 1.0);
    let mut cell = None;
    for i in (n + 1)..=(2 * n + 2) {
        let lo = delta * (i as f64 - 1.0);
        let hi = delta * i as f64;
        if !nodes.iter().any(|&x| x > lo && x < hi) {
            cell = Some((lo, hi));
            break;
        }
    }
    let (lo, hi) = cell.expect("pigeonhole: a node-free cell always exists in the scanned range");

    // || h ||_{W^r_1(mu)} = sum_{k<=r} int |h^(k)| w over the cell, with
    // h = phi((x-lo)/delta) * w^{-1}(x); derivatives via jets.
    let segs = panels::equal_panels(lo + 1e-12 * delta, hi - 1e-12 * delta, 24);
    let mut norm = 0.0f64;
    for k in 0..=r {
        let term = panels::integrate_panels(
            &|x: f64| {
                let t = (x - lo) / delta;
                if t <= 0.0 || t >= 1.0 {
                    return 0.0;
                }
                // phi-jet in x: coefficient j of the t-jet picks up delta^{-j}
                let mut phi_x = bump_jet(t, k);
                let mut scale = 1.0;
                for j in 0..=k {
                    phi_x.c[j] *= scale;
                    scale /= delta;
                }
                // w^{-1} jet in x: exp(a x^lambda - b); the cell sits at
                // positive x so the power jet is smooth.
                let winv = Jet::power(x, lambda, k)
                    .scale(w1.a())
                    .add(&Jet::constant(-w1.b(), k))
                    .exp();
                let h = phi_x.mul(&winv);
                h.derivative(k).abs() * w1.log_factor(x).exp()
            },
            &segs,
            40,
        );
        norm += term;
    }
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::NonConvergence(format!(
            "fooling bump norm computation produced {norm}"
        )));
    }
    // Safety factor on the numerically computed bound.
    let norm_bound = norm * (1.0 + 1e-8);
    let b0 = bump_constants(0)[0];
    let certified_value = b0 * delta / norm_bound;
    Ok(FoolingBump {
        delta,
        interval: (lo, hi),
        norm_bound,
        certified_value,
        r,
        weight: w1,
    })
}
