//! Three-term recurrence coefficients for orthonormal polynomials of
//! Freud-type and Markov–Sonin weights, and Gaussian quadrature rules via
//! the symmetric tridiagonal (Jacobi matrix) eigenproblem.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::panels;
use crate::weights::{mrs_number, FreudWeight, MarkovSoninWeight, Weight};

/// Recurrence coefficients in orthonormal form:
/// `x p_k = sqrt(beta_{k+1}) p_{k+1} + alpha_k p_k + sqrt(beta_k) p_{k-1}`,
/// with `beta_0 = int w` (the total mass).
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub weight_id: String,
}

impl Recurrence {
    /// Number of quadrature degrees supported (a degree-m rule needs
    /// `alpha[0..m]` and `beta[0..m]`).
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0)
    }
}

/// A univariate Gaussian rule: strictly increasing nodes with positive
/// Cotes numbers, plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub m: usize,
    pub weight_id: String,
}

impl GaussRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn largest_node(&self) -> f64 {
        *self.nodes.last().expect("empty rule")
    }

    /// Apply the rule to an integrand, pairwise-summed. Nodes whose Cotes
    /// number is exactly zero (possible through underflow of the weight
    /// factor far out in the tail) are skipped without evaluating f:
    /// their term is identically zero.
    pub fn integrate(&self, f: &dyn Fn(f64) -> f64) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (&x, &w) in self.nodes.iter().zip(self.weights.iter()) {
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
}

/// Closed-form recurrence for the Gaussian weight `exp(-a x^2 + b)`:
/// `alpha_k = 0`, `beta_0 = sqrt(pi/a) e^b`, `beta_k = k/(2a)`.
pub fn recurrence_gaussian(a: f64, b: f64, m: usize) -> Result<Recurrence> {
    if !(a > 0.0) {
        return Err(Error::Precondition(format!("a must be > 0, got {a}")));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    let mut beta = Vec::with_capacity(m);
    beta.push((std::f64::consts::PI / a).sqrt() * b.exp());
    for k in 1..m {
        beta.push(k as f64 / (2.0 * a));
    }
    Ok(Recurrence {
        alpha: vec![0.0; m],
        beta,
        weight_id: format!("freud:lambda=2,a={a},b={b},d=1"),
    })
}

/// Generalized-Hermite recurrence for the Markov–Sonin weight
/// `|x|^beta exp(-a x^2 + b)`: `alpha_k = 0` and
/// `beta_k = (k + beta [k odd]) / (2a)` with
/// `beta_0 = Gamma((beta+1)/2) a^{-(beta+1)/2} e^b`.
pub fn recurrence_sonin(beta: f64, a: f64, b: f64, m: usize) -> Result<Recurrence> {
    if !(beta > 0.0) {
        return Err(Error::Precondition(format!("beta must be > 0, got {beta}")));
    }
    if !(a > 0.0) {
        return Err(Error::Precondition(format!("a must be > 0, got {a}")));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    let mut bs = Vec::with_capacity(m);
    bs.push(gamma((beta + 1.0) / 2.0) * a.powf(-(beta + 1.0) / 2.0) * b.exp());
    for k in 1..m {
        let extra = if k % 2 == 1 { beta } else { 0.0 };
        bs.push((k as f64 + extra) / (2.0 * a));
    }
    Ok(Recurrence {
        alpha: vec![0.0; m],
        beta: bs,
        weight_id: format!("sonin:beta={beta},a={a},b={b},d=1"),
    })
}

/// Settings for the discretized Stieltjes procedure.
#[derive(Debug, Clone)]
pub struct StieltjesConfig {
    /// Gauss–Legendre degree per panel in the first pass.
    pub base_degree: usize,
    /// Refinements double the sub-rule degree.
    pub max_refine: usize,
    /// Relative stabilization target on every beta coefficient.
    pub tol: f64,
}

impl Default for StieltjesConfig {
    fn default() -> Self {
        StieltjesConfig {
            base_degree: 60,
            max_refine: 6,
            tol: 1e-12,
        }
    }
}

/// Recurrence coefficients for a general Freud weight
/// `exp(-a |x|^lambda + b)` by a discretized Stieltjes procedure on a
/// mirrored panel decomposition of R, refined until the coefficients
/// stabilize.
pub fn recurrence_freud(
    lambda: f64,
    a: f64,
    b: f64,
    m: usize,
    cfg: &StieltjesConfig,
) -> Result<Recurrence> {
    let w = FreudWeight::new(lambda, a, b, 1)?;
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    // Panel scale: the turning point of the actual weight for polynomials
    // of degree up to 2m (the products p_k p_l the pass integrates), i.e.
    // the MRS number of exp(-|t|^lambda) rescaled by a^{-1/lambda}.
    let scale = mrs_number(&w, (2 * m).max(2)) * a.powf(-1.0 / lambda);
    let fractions = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.5];
    let mut edges: Vec<f64> = fractions.iter().map(|f| f * scale).collect();
    let neg: Vec<f64> = edges.iter().skip(1).map(|e| -e).rev().collect();
    let mut all_edges = neg;
    all_edges.extend_from_slice(&edges);
    edges = all_edges;
    let panel_list: Vec<(f64, f64)> = edges.windows(2).map(|p| (p[0], p[1])).collect();

    let mut prev: Option<Vec<f64>> = None;
    let mut degree = cfg.base_degree;
    for _ in 0..=cfg.max_refine {
        let (xs, ws) = panels::gauss_legendre_cached(degree);
        let mut t = Vec::with_capacity(panel_list.len() * degree);
        let mut omega = Vec::with_capacity(panel_list.len() * degree);
        for &(lo, hi) in &panel_list {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, wq) in xs.iter().zip(ws.iter()) {
                let ti = mid + half * x;
                t.push(ti);
                omega.push(wq * half * w.log_factor(ti).exp());
            }
        }
        let beta = stieltjes_pass(&t, &omega, m)?;
        if let Some(prev_beta) = &prev {
            let stable = beta
                .iter()
                .zip(prev_beta.iter())
                .all(|(x, y)| (x - y).abs() <= cfg.tol * x.abs().max(y.abs()));
            if stable {
                return Ok(Recurrence {
                    alpha: vec![0.0; m],
                    beta,
                    weight_id: format!("freud:lambda={lambda},a={a},b={b},d=1"),
                });
            }
        }
        prev = Some(beta);
        degree *= 2;
    }
    Err(Error::NonConvergence(format!(
        "stieltjes coefficients for lambda={lambda}, a={a} did not stabilize; \
         last iterate beta[..4] = {:?}",
        prev.map(|b| b.into_iter().take(4).collect::<Vec<_>>())
    )))
}

/// One Stieltjes pass over a fixed discrete measure {(t_i, omega_i)}.
/// Works with orthonormalized polynomial values, so no scaling blowup:
/// `x p_k = sqrt(beta_{k+1}) p_{k+1} + sqrt(beta_k) p_{k-1}` gives
/// `beta_{k+1} = || x p_k - sqrt(beta_k) p_{k-1} ||^2` under the discrete
/// measure (the p_{-1} term vanishes on the first step).
fn stieltjes_pass(t: &[f64], omega: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = t.len();
    let beta0: f64 = panels::pairwise_sum(omega);
    if !(beta0 > 0.0) {
        return Err(Error::NonConvergence("discretized measure has no mass".into()));
    }
    let mut beta = Vec::with_capacity(m);
    beta.push(beta0);
    let mut p_prev = vec![0.0f64; n];
    let mut p = vec![1.0 / beta0.sqrt(); n];
    for _k in 1..m {
        // alpha_k = 0 for even weights; enforced rather than accumulated.
        let mut q = vec![0.0f64; n];
        let sb = if beta.len() == 1 { 0.0 } else { (*beta.last().unwrap()).sqrt() };
        for i in 0..n {
            q[i] = t[i] * p[i] - sb * p_prev[i];
        }
        let norm2: f64 = panels::pairwise_sum(
            &q.iter().zip(omega.iter()).map(|(qi, wi)| wi * qi * qi).collect::<Vec<_>>(),
        );
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::NonConvergence(format!(
                "stieltjes lost orthogonality at step {} (norm^2 = {norm2})",
                beta.len()
            )));
        }
        beta.push(norm2);
        let inv = 1.0 / norm2.sqrt();
        for i in 0..n {
            let next = q[i] * inv;
            p_prev[i] = p[i];
            p[i] = next;
        }
    }
    Ok(beta)
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector, by the implicit-shift QL
/// algorithm. `d` is the diagonal, `e[i]` the (i, i+1) entry.
fn tridiag_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    // e is used with one slot of slack
    debug_assert_eq!(e.len(), n);
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence(format!(
                    "tridiagonal QL: eigenvalue {l} of {n} did not converge; \
                     residual off-diagonal {:.3e} against diagonal scale {:.3e}",
                    e[l].abs(),
                    d[l].abs().max(d[l + 1].abs())
                )));
            }
            // plain sqrt instead of hypot throughout this routine: the
            // entries are sqrt(beta_k) <= O(sqrt(m)), far from overflow,
            // and hypot's robustness costs 5-10x in the hot loop
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[mm] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..mm).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    Ok(())
}

/// Number of eigenvalues of the Jacobi matrix of degree m that are <= x,
/// by the standard Sturm-sequence recurrence. O(m), no factorization.
pub fn sturm_count_leq(rec: &Recurrence, m: usize, x: f64) -> usize {
    let mut count = 0usize;
    let mut q = rec.alpha[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for k in 1..m {
        let e2 = rec.beta[k];
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = rec.alpha[k] - x - e2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of the degree-m Jacobi matrix to relative accuracy
/// ~1e-12, by Sturm bisection inside the Gershgorin bound.
pub fn largest_node_estimate(rec: &Recurrence, m: usize) -> f64 {
    let mut bound = 0.0f64;
    for k in 0..m {
        let left = if k > 0 { rec.beta[k].sqrt() } else { 0.0 };
        let right = if k + 1 < m { rec.beta[k + 1].sqrt() } else { 0.0 };
        bound = bound.max(rec.alpha[k].abs() + left + right);
    }
    let mut lo = -bound;
    let mut hi = bound;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sturm_count_leq(rec, m, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Estimated kept-node count of the theta-truncation of a degree-m rule,
/// via Sturm counts only (no eigensolve). Exact up to the +/-1 ambiguity
/// of nodes sitting on the cut, which callers resolve with a true
/// truncation at the end of a search.
pub fn truncated_size_estimate(rec: &Recurrence, m: usize, cut: f64) -> usize {
    // kept = #nodes in [-t, t] where t is the first positive node >= cut
    let above = m - sturm_count_leq(rec, m, cut);
    // nodes strictly above the cut on one side; symmetric rule keeps the
    // mirrored block plus the first crossing pair
    let one_side_dropped = above.saturating_sub(1);
    m - 2 * one_side_dropped
}

/// Build the degree-m Gaussian rule from a recurrence: nodes are the
/// eigenvalues of the m-by-m Jacobi matrix, weights are
/// `beta_0 (first eigenvector component)^2`.
pub fn gauss_rule(rec: &Recurrence, m: usize) -> Result<GaussRule1D> {
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    if rec.len() < m {
        return Err(Error::Precondition(format!(
            "recurrence holds {} coefficients, degree {m} requested",
            rec.len()
        )));
    }
    let mut d: Vec<f64> = rec.alpha[..m].to_vec();
    let mut e = vec![0.0f64; m];
    for k in 1..m {
        e[k - 1] = rec.beta[k].sqrt();
    }
    let mut z = vec![0.0f64; m];
    z[0] = 1.0;
    tridiag_ql(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let mut nodes: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut weights: Vec<f64> = order.iter().map(|&i| rec.beta[0] * z[i] * z[i]).collect();

    if rec.is_symmetric() {
        // Fold to exact +/- symmetry; eigensolve is symmetric only to
        // roundoff and downstream index-pairing wants it exact.
        let half = m / 2;
        for k in 0..half {
            let j = m - 1 - k;
            let v = 0.5 * (nodes[j] - nodes[k]);
            nodes[j] = v;
            nodes[k] = -v;
            let wv = 0.5 * (weights[j] + weights[k]);
            weights[j] = wv;
            weights[k] = wv;
        }
        if m % 2 == 1 {
            nodes[half] = 0.0;
        }
    }
    Ok(GaussRule1D {
        nodes,
        weights,
        m,
        weight_id: rec.weight_id.clone(),
    })
}

type RuleCache = RwLock<HashMap<(String, usize), Arc<GaussRule1D>>>;

fn rule_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Recurrence for an arbitrary supported weight.
pub fn recurrence_for_weight(w: &Weight, m: usize) -> Result<Recurrence> {
    match w.univariate() {
        Weight::Freud(FreudWeight { lambda, a, b, .. }) => {
            if lambda == 2.0 {
                recurrence_gaussian(a, b, m)
            } else {
                recurrence_freud(lambda, a, b, m, &StieltjesConfig::default())
            }
        }
        Weight::MarkovSonin(MarkovSoninWeight { beta, a, b, .. }) => {
            recurrence_sonin(beta, a, b, m)
        }
    }
}

/// Cached Gaussian rule per (weight, m). Readers proceed concurrently; a
/// writer fills a missing entry once.
///
/// ```
/// use freudquad::orthopoly::gauss_rule_for_weight;
/// use freudquad::weights::parse_weight_spec;
///
/// // integrate x^2 against exp(-x^2): sqrt(pi)/2
/// let w = parse_weight_spec("freud:lambda=2,a=1,b=0,d=1").unwrap();
/// let rule = gauss_rule_for_weight(&w, 10).unwrap();
/// let got = rule.integrate(&|x| x * x).unwrap();
/// assert!((got - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
/// ```
pub fn gauss_rule_for_weight(w: &Weight, m: usize) -> Result<Arc<GaussRule1D>> {
    let key = (crate::weights::weight_spec_string(&w.univariate()), m);
    if let Some(rule) = rule_cache().read().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rec = recurrence_for_weight(w, m)?;
    let rule = Arc::new(gauss_rule(&rec, m)?);
    rule_cache()
        .write()
        .unwrap()
        .entry(key)
        .or_insert_with(|| rule.clone());
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn hermite_rule(m: usize) -> GaussRule1D {
        let rec = recurrence_gaussian(1.0, 0.0, m).unwrap();
        gauss_rule(&rec, m).unwrap()
    }

    // Analytic moments of exp(-x^2): int x^{2j} e^{-x^2} = Gamma(j + 1/2).
    fn hermite_moment(j: usize) -> f64 {
        gamma(j as f64 + 0.5)
    }

    #[test]
    fn gaussian_recurrence_closed_form() {
        let rec = recurrence_gaussian(1.0, 0.0, 4).unwrap();
        assert_relative_eq!(rec.beta[0], std::f64::consts::PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(rec.beta[1], 0.5, max_relative = 1e-15);
        assert_relative_eq!(rec.beta[2], 1.0, max_relative = 1e-15);
        let rec = recurrence_gaussian(0.5, 0.0, 5).unwrap();
        for k in 1..5 {
            assert_relative_eq!(rec.beta[k], k as f64, max_relative = 1e-15);
        }
    }

    #[test]
    fn hermite_m2_nodes_and_weights() {
        let rule = hermite_rule(2);
        let x = 0.5f64.sqrt();
        assert_abs_diff_eq!(rule.nodes[0], -x, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.nodes[1], x, epsilon = 1e-14);
        let w = std::f64::consts::PI.sqrt() / 2.0;
        assert_relative_eq!(rule.weights[0], w, max_relative = 1e-13);
        assert_relative_eq!(rule.weights[1], w, max_relative = 1e-13);
    }

    #[test]
    fn weights_sum_to_mass() {
        for m in [1, 2, 3, 5, 8, 17, 40] {
            let rule = hermite_rule(m);
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn hermite_m5_fourth_moment() {
        let rule = hermite_rule(5);
        let got = rule.integrate(&|x| x.powi(4)).unwrap();
        assert_relative_eq!(got, 0.75 * std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn polynomial_exactness_moderate_degrees() {
        // Odd moments vanish by exact +/- pairing of the summands, but the
        // generic summation order leaves roundoff at the scale of the
        // absolute moment int |x|^j w = Gamma((j+1)/2), so that is the
        // conditioning scale to measure against.
        for m in [2usize, 5, 9, 16, 24] {
            let rule = hermite_rule(m);
            for j in 0..=(2 * m - 1) {
                let got = rule.integrate(&|x| x.powi(j as i32)).unwrap();
                let want = if j % 2 == 1 { 0.0 } else { hermite_moment(j / 2) };
                let scale = gamma((j as f64 + 1.0) / 2.0).max(1.0);
                assert!(
                    (got - want).abs() <= 1e-11 * scale,
                    "m={m} degree={j}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn nodes_strictly_increasing_weights_positive() {
        for m in [3usize, 10, 33, 64] {
            let rule = hermite_rule(m);
            for k in 1..m {
                assert!(rule.nodes[k] > rule.nodes[k - 1]);
            }
            assert!(rule.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn interlacing() {
        for m in [2usize, 5, 11, 20] {
            let a = hermite_rule(m);
            let b = hermite_rule(m + 1);
            for k in 0..m {
                assert!(
                    b.nodes[k] < a.nodes[k] && a.nodes[k] < b.nodes[k + 1],
                    "interlacing failed at m={m}, k={k}"
                );
            }
        }
    }

    #[test]
    fn stieltjes_matches_gaussian_closed_form() {
        let rec = recurrence_freud(2.0, 1.0, 0.0, 21, &StieltjesConfig::default()).unwrap();
        let reference = recurrence_gaussian(1.0, 0.0, 21).unwrap();
        for k in 0..21 {
            assert_relative_eq!(rec.beta[k], reference.beta[k], max_relative = 1e-10);
        }
    }

    #[test]
    fn stieltjes_lambda4_mass() {
        let rec = recurrence_freud(4.0, 1.0, 0.0, 12, &StieltjesConfig::default()).unwrap();
        assert_relative_eq!(rec.beta[0], 2.0 * gamma(1.25), max_relative = 1e-12);
        assert!(rec.is_symmetric());
    }

    #[test]
    fn lambda4_rule_integrates_moments() {
        // Moments of exp(-x^4): int x^{2j} e^{-x^4} dx = Gamma((2j+1)/4)/2 * 2
        let rec = recurrence_freud(4.0, 1.0, 0.0, 16, &StieltjesConfig::default()).unwrap();
        let rule = gauss_rule(&rec, 16).unwrap();
        for j in 0..8usize {
            let got = rule.integrate(&|x| x.powi(2 * j as i32)).unwrap();
            let want = 0.5 * gamma((2.0 * j as f64 + 1.0) / 4.0);
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn sonin_closed_forms() {
        let rec = recurrence_sonin(1.0, 1.0, 0.0, 6).unwrap();
        assert_relative_eq!(rec.beta[0], 1.0, max_relative = 1e-13);
        // beta -> 0 limit reproduces the Gaussian recurrence
        let near = recurrence_sonin(1e-8, 1.0, 0.0, 12).unwrap();
        let gauss = recurrence_gaussian(1.0, 0.0, 12).unwrap();
        for k in 1..12 {
            assert_relative_eq!(near.beta[k], gauss.beta[k], max_relative = 1e-6);
        }
        assert!((near.beta[0] - gauss.beta[0]).abs() < 1e-6);
    }

    #[test]
    fn sonin_rule_integrates_sonin_moments() {
        // int x^{2j} |x| e^{-x^2} dx = Gamma(j + 1) = j!
        let rec = recurrence_sonin(1.0, 1.0, 0.0, 10).unwrap();
        let rule = gauss_rule(&rec, 10).unwrap();
        let mut fact = 1.0;
        for j in 0..6usize {
            if j > 0 {
                fact *= j as f64;
            }
            let got = rule.integrate(&|x| x.powi(2 * j as i32)).unwrap();
            assert_relative_eq!(got, fact, max_relative = 1e-11);
        }
    }

    #[test]
    fn spacing_law_slope() {
        // Gaps inside the bulk scale like m^{1/lambda - 1}; regression of
        // log median-gap against log m should have slope near -1/2 for
        // lambda = 2.
        let ms = [16usize, 32, 64, 128, 256];
        let mut pts = Vec::new();
        for &m in &ms {
            let rule = hermite_rule(m);
            let lo = m / 4;
            let hi = 3 * m / 4;
            let mut gaps: Vec<f64> = (lo + 1..hi)
                .map(|k| rule.nodes[k] - rule.nodes[k - 1])
                .collect();
            gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = gaps[gaps.len() / 2];
            pts.push(((m as f64).ln(), med.ln()));
        }
        let n = pts.len() as f64;
        let mx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        assert!(
            (slope - (-0.5)).abs() < 0.1,
            "gap-scaling slope {slope}, expected -0.5 +/- 0.1"
        );
    }

    #[test]
    fn cache_returns_same_rule() {
        let w = Weight::Freud(FreudWeight::new(2.0, 1.0, 0.0, 1).unwrap());
        let r1 = gauss_rule_for_weight(&w, 14).unwrap();
        let r2 = gauss_rule_for_weight(&w, 14).unwrap();
        assert!(Arc::ptr_eq(&r1, &r2));
    }

    #[test]
    fn rejects_short_recurrence() {
        let rec = recurrence_gaussian(1.0, 0.0, 3).unwrap();
        assert!(gauss_rule(&rec, 5).is_err());
    }
}
