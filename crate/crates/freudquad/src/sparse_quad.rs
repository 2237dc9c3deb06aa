//! Smolyak difference-operator quadratures on step hyperbolic crosses in
//! the function domain R^d, assembled from a dyadic ladder of univariate
//! rules.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::orthopoly::gauss_rule_for_weight;
use crate::panels;
use crate::quad1d::{truncate, ThresholdMode};
use crate::weights::Weight;

/// A d-tuple of nonnegative levels with the usual norms and partial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub components: Vec<usize>,
}

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        MultiIndex { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn l1(&self) -> usize {
        self.components.iter().sum()
    }

    pub fn linf(&self) -> usize {
        self.components.iter().copied().max().unwrap_or(0)
    }

    /// Componentwise partial order.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.components
            .iter()
            .zip(other.components.iter())
            .all(|(a, b)| a <= b)
    }
}

/// Enumerate all k in N_0^d with |k|_1 <= bound, in lexicographic order.
pub fn simplex_indices(d: usize, bound: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0usize; d];
    fn rec(axis: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if axis + 1 == current.len() {
            for v in 0..=remaining {
                current[axis] = v;
                out.push(MultiIndex::new(current.clone()));
            }
            current[axis] = 0;
            return;
        }
        for v in 0..=remaining {
            current[axis] = v;
            rec(axis + 1, remaining - v, current, out);
        }
        current[axis] = 0;
    }
    rec(0, bound, &mut current, &mut out);
    out
}

/// One rung of the ladder: a univariate rule with at most 2^level nodes.
#[derive(Debug, Clone)]
pub struct LadderRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Degree of the underlying Gaussian rule (provenance).
    pub base_degree: usize,
}

impl LadderRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A sequence of univariate rules Q_{2^k}, k = 0..=k_max, sharing one
/// weight, with an asserted univariate convergence exponent `alpha`.
#[derive(Debug, Clone)]
pub struct DyadicLadder {
    pub rules: Vec<Arc<LadderRule>>,
    pub alpha: f64,
    pub weight: Weight,
}

impl DyadicLadder {
    pub fn k_max(&self) -> usize {
        self.rules.len() - 1
    }

    pub fn rule(&self, k: usize) -> &LadderRule {
        &self.rules[k]
    }

    /// Ladder of truncated Gaussian rules: level k holds the TG rule with
    /// the largest base degree m_k such that its kept-node count stays
    /// within 2^k. Level 0 falls back to the one-node Gaussian rule
    /// (the natural Q_1 of the difference scheme).
    pub fn truncated_gaussian(
        w: &Weight,
        theta: f64,
        mode: ThresholdMode,
        k_max: usize,
        alpha: f64,
    ) -> Result<DyadicLadder> {
        let w1 = w.univariate();
        let mut rules = Vec::with_capacity(k_max + 1);
        let one = gauss_rule_for_weight(&w1, 1)?;
        rules.push(Arc::new(LadderRule {
            nodes: one.nodes.clone(),
            weights: one.weights.clone(),
            base_degree: 1,
        }));
        for k in 1..=k_max {
            let budget = 1usize << k;
            let best = crate::bench::tg_degree_for_budget(&w1, theta, mode, budget)?;
            let rule = gauss_rule_for_weight(&w1, best)?;
            let tg = truncate(&rule, &w1, theta, mode)?;
            debug_assert!(tg.len() <= budget);
            rules.push(Arc::new(LadderRule {
                nodes: tg.kept_nodes.clone(),
                weights: tg.kept_weights.clone(),
                base_degree: best,
            }));
        }
        Ok(DyadicLadder {
            rules,
            alpha,
            weight: w1,
        })
    }

    /// Ladder of full Gaussian rules with exactly 2^k nodes per level.
    /// Mass-exact at every level.
    pub fn full_gaussian(w: &Weight, k_max: usize, alpha: f64) -> Result<DyadicLadder> {
        let w1 = w.univariate();
        let mut rules = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let m = 1usize << k;
            let rule = gauss_rule_for_weight(&w1, m)?;
            rules.push(Arc::new(LadderRule {
                nodes: rule.nodes.clone(),
                weights: rule.weights.clone(),
                base_degree: m,
            }));
        }
        Ok(DyadicLadder {
            rules,
            alpha,
            weight: w1,
        })
    }
}

/// Apply the tensorized difference operator
/// `Delta_k = prod_i (Q_{2^{k_i}} - Q_{2^{k_i - 1}})` (with the factor
/// `Q_1` on axes where k_i = 0) to f. The expansion runs over subsets of
/// the axes with positive level; degenerate duplicate terms at level 0
/// would otherwise cancel the whole operator.
pub fn delta_apply(
    ladder: &DyadicLadder,
    k: &MultiIndex,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    if k.linf() > ladder.k_max() {
        return Err(Error::Precondition(format!(
            "level {:?} exceeds ladder depth {}",
            k.components,
            ladder.k_max()
        )));
    }
    let d = k.dim();
    let positive: Vec<usize> = (0..d).filter(|&i| k.components[i] > 0).collect();
    let mut total = 0.0f64;
    for mask in 0..(1usize << positive.len()) {
        let mut levels = k.components.clone();
        let mut sign = 1.0f64;
        for (bit, &axis) in positive.iter().enumerate() {
            if mask & (1 << bit) == 0 {
                levels[axis] -= 1;
                sign = -sign;
            }
        }
        total += sign * tensor_apply(ladder, &levels, f)?;
    }
    Ok(total)
}

fn tensor_apply(
    ladder: &DyadicLadder,
    levels: &[usize],
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    let d = levels.len();
    let rules: Vec<&LadderRule> = levels.iter().map(|&l| ladder.rule(l)).collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0f64; d];
    let mut terms = Vec::new();
    'outer: loop {
        let mut wq = 1.0f64;
        for (axis, &i) in idx.iter().enumerate() {
            x[axis] = rules[axis].nodes[i];
            wq *= rules[axis].weights[i];
        }
        if wq != 0.0 {
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::EvalFailure {
                    node: x.clone(),
                    detail: format!("integrand returned {v}"),
                });
            }
            terms.push(wq * v);
        }
        for axis in 0..d {
            idx[axis] += 1;
            if idx[axis] < rules[axis].len() {
                continue 'outer;
            }
            idx[axis] = 0;
            if axis == d - 1 {
                break 'outer;
            }
        }
    }
    Ok(panels::pairwise_sum(&terms))
}

/// A merged Smolyak quadrature `Q_xi = sum_{|k|_1 <= xi} Delta_k` on the
/// step hyperbolic cross of nodes.
#[derive(Debug, Clone)]
pub struct HyperCrossRule {
    pub xi: f64,
    pub dim: usize,
    /// Inventory count of all (k, e, s) triples of the signed expansion,
    /// e ranging over all subsets of axes as in the G(xi) bookkeeping.
    pub raw_count: u64,
    /// Deduplicated nodes with accumulated weights, sorted by coordinates;
    /// entries whose weights cancelled to exactly zero are dropped.
    pub nodes: Vec<(Vec<f64>, f64)>,
}

impl HyperCrossRule {
    pub fn merged_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn weight_sum(&self) -> f64 {
        panels::pairwise_sum(&self.nodes.iter().map(|(_, w)| *w).collect::<Vec<_>>())
    }
}

/// Inventory count of the full signed expansion: for every |k|_1 <= xi and
/// every subset e of {1..d}, the tensor rule over levels k(e) contributes
/// its node count (`k(e)_i = k_i` on e, `max(k_i - 1, 0)` off e).
pub fn raw_triple_count(sizes: &[usize], xi: f64, d: usize) -> u64 {
    let bound = xi.floor().max(0.0) as usize;
    let mut total = 0u64;
    for k in simplex_indices(d, bound) {
        if k.l1() as f64 > xi {
            continue;
        }
        for mask in 0..(1usize << d) {
            let mut prod = 1u64;
            for axis in 0..d {
                let level = if mask & (1 << axis) != 0 {
                    k.components[axis]
                } else {
                    k.components[axis].saturating_sub(1)
                };
                prod *= sizes[level] as u64;
            }
            total += prod;
        }
    }
    total
}

/// Default cap on the raw triple inventory.
pub const DEFAULT_RAW_CAP: u64 = 100_000_000;

/// Build the merged hyperbolic-cross rule at level xi (real; the index
/// test `|k|_1 <= xi` runs over integers).
pub fn build_hypercross(ladder: &DyadicLadder, xi: f64, d: usize) -> Result<HyperCrossRule> {
    build_hypercross_capped(ladder, xi, d, DEFAULT_RAW_CAP)
}

pub fn build_hypercross_capped(
    ladder: &DyadicLadder,
    xi: f64,
    d: usize,
    raw_cap: u64,
) -> Result<HyperCrossRule> {
    if xi < 0.0 {
        return Err(Error::Precondition(format!("xi must be >= 0, got {xi}")));
    }
    let bound = xi.floor() as usize;
    if bound > ladder.k_max() {
        return Err(Error::Precondition(format!(
            "floor(xi) = {bound} exceeds ladder depth {}",
            ladder.k_max()
        )));
    }
    let sizes: Vec<usize> = ladder.rules.iter().map(|r| r.len()).collect();
    let raw_count = raw_triple_count(&sizes, xi, d);
    if raw_count > raw_cap {
        return Err(Error::ResourceLimit(format!(
            "hypercross at xi = {xi}, d = {d} has {raw_count} raw triples (cap {raw_cap})"
        )));
    }

    // Accumulate signed tensor weights per geometric node. Keys are the
    // raw bit patterns of the coordinates: only bitwise-identical reals
    // merge, which the ladder construction guarantees exactly for the
    // duplicates produced by the difference expansion.
    let mut acc: HashMap<Vec<u64>, (Vec<f64>, f64)> = HashMap::new();
    for k in simplex_indices(d, bound) {
        if k.l1() as f64 > xi {
            continue;
        }
        let positive: Vec<usize> = (0..d).filter(|&i| k.components[i] > 0).collect();
        for mask in 0..(1usize << positive.len()) {
            let mut levels = k.components.clone();
            let mut sign = 1.0f64;
            for (bit, &axis) in positive.iter().enumerate() {
                if mask & (1 << bit) == 0 {
                    levels[axis] -= 1;
                    sign = -sign;
                }
            }
            let rules: Vec<&LadderRule> = levels.iter().map(|&l| ladder.rule(l)).collect();
            let mut idx = vec![0usize; d];
            'tensor: loop {
                let mut wq = sign;
                let mut key = Vec::with_capacity(d);
                let mut coords = Vec::with_capacity(d);
                for (axis, &i) in idx.iter().enumerate() {
                    let x = rules[axis].nodes[i];
                    coords.push(x);
                    key.push(x.to_bits());
                    wq *= rules[axis].weights[i];
                }
                let entry = acc.entry(key).or_insert((coords, 0.0));
                entry.1 += wq;
                for axis in 0..d {
                    idx[axis] += 1;
                    if idx[axis] < rules[axis].len() {
                        continue 'tensor;
                    }
                    idx[axis] = 0;
                    if axis == d - 1 {
                        break 'tensor;
                    }
                }
            }
        }
    }
    let mut nodes: Vec<(Vec<f64>, f64)> = acc
        .into_values()
        .filter(|(_, w)| *w != 0.0)
        .collect();
    nodes.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(HyperCrossRule {
        xi,
        dim: d,
        raw_count,
        nodes,
    })
}

/// Apply a merged hypercross rule, in the fixed sorted node order with
/// pairwise reduction.
pub fn integrate_hypercross(rule: &HyperCrossRule, f: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.nodes.len());
    for (x, w) in &rule.nodes {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::EvalFailure {
                node: x.clone(),
                detail: format!("integrand returned {v}"),
            });
        }
        terms.push(w * v);
    }
    Ok(panels::pairwise_sum(&terms))
}

/// One row of an error profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub xi: f64,
    pub raw_count: u64,
    pub merged_count: usize,
    pub abs_error: f64,
}

/// Error of Q_xi against a reference integral over a monotone xi grid.
pub fn error_profile(
    ladder: &DyadicLadder,
    f: &dyn Fn(&[f64]) -> f64,
    d: usize,
    reference: f64,
    xi_values: &[f64],
) -> Result<Vec<ProfileRow>> {
    let mut rows = Vec::with_capacity(xi_values.len());
    for &xi in xi_values {
        let rule = build_hypercross(ladder, xi, d)?;
        let got = integrate_hypercross(&rule, f)?;
        rows.push(ProfileRow {
            xi,
            raw_count: rule.raw_count,
            merged_count: rule.merged_count(),
            abs_error: (got - reference).abs(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::FreudWeight;
    use approx::assert_relative_eq;

    fn hermite() -> Weight {
        Weight::Freud(FreudWeight::new(2.0, 1.0, 0.0, 1).unwrap())
    }

    #[test]
    fn multi_index_norms_and_order() {
        let a = MultiIndex::new(vec![1, 2, 0]);
        let b = MultiIndex::new(vec![2, 2, 1]);
        assert_eq!(a.l1(), 3);
        assert_eq!(a.linf(), 2);
        assert!(a.le(&b));
        assert!(!b.le(&a));
    }

    #[test]
    fn ladder_sizes_within_budget() {
        let w = hermite();
        let ladder =
            DyadicLadder::truncated_gaussian(&w, 0.5, ThresholdMode::LargestZero, 7, 0.5).unwrap();
        for (k, rule) in ladder.rules.iter().enumerate() {
            assert!(rule.len() <= 1 << k, "level {k}: {} nodes", rule.len());
            assert!(!rule.is_empty());
        }
        // sizes grow proportionally to the budget
        assert!(ladder.rule(7).len() >= 64);
    }

    #[test]
    fn delta_level_zero_is_q1() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 3, 1.0).unwrap();
        let got = delta_apply(&ladder, &MultiIndex::new(vec![0]), &|x| x[0] + 2.0).unwrap();
        // Q_1 has the single node 0 with weight sqrt(pi)
        assert_relative_eq!(got, 2.0 * std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn delta_00_is_q1_tensor_mass() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 2, 1.0).unwrap();
        let got = delta_apply(&ladder, &MultiIndex::new(vec![0, 0]), &|_| 1.0).unwrap();
        assert_relative_eq!(got, std::f64::consts::PI, max_relative = 1e-13);
    }

    #[test]
    fn delta_11_constant_cancels_for_mass_exact_ladder() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 2, 1.0).unwrap();
        let got = delta_apply(&ladder, &MultiIndex::new(vec![1, 1]), &|_| 1.0).unwrap();
        assert!(got.abs() < 1e-13, "got {got}");
    }

    #[test]
    fn delta_matches_bruteforce_expansion() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 3, 1.0).unwrap();
        let f = |x: &[f64]| (x[0] - 0.3 * x[1]).cos();
        let k = MultiIndex::new(vec![2, 1]);
        let direct = delta_apply(&ladder, &k, &f).unwrap();
        // brute force: (Q4 - Q2) tensor (Q2 - Q1)
        let q = |ka: usize, kb: usize| tensor_apply(&ladder, &[ka, kb], &f).unwrap();
        let want = q(2, 1) - q(1, 1) - q(2, 0) + q(1, 0);
        assert_relative_eq!(direct, want, max_relative = 1e-12);
    }

    #[test]
    fn delta_commutes_under_axis_permutation() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 3, 1.0).unwrap();
        let f = |x: &[f64]| (x[0] + 0.5 * x[1] * x[1] - 0.2 * x[2]).tanh();
        let fp = |x: &[f64]| f(&[x[2], x[0], x[1]]);
        let k = MultiIndex::new(vec![1, 2, 0]);
        let kp = MultiIndex::new(vec![2, 0, 1]);
        let a = delta_apply(&ladder, &k, &f).unwrap();
        let b = delta_apply(&ladder, &kp, &fp).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-13, max_relative = 1e-11);
    }

    #[test]
    fn raw_count_examples() {
        // d=1, xi=2, ladder sizes (1,2,4): (1+1)+(2+1)+(4+2) = 11
        assert_eq!(raw_triple_count(&[1, 2, 4], 2.0, 1), 11);
        // d=2, xi=1: 4 + 6 + 6 = 16
        assert_eq!(raw_triple_count(&[1, 2], 1.0, 2), 16);
    }

    #[test]
    fn telescoping_d1() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 5, 1.0).unwrap();
        let xi = 4.3;
        let cross = build_hypercross(&ladder, xi, 1).unwrap();
        let top = ladder.rule(4);
        assert_eq!(cross.merged_count(), top.len());
        for (node, w_acc) in &cross.nodes {
            let pos = top.nodes.iter().position(|&x| x == node[0]).unwrap();
            assert_relative_eq!(*w_acc, top.weights[pos], max_relative = 1e-13);
        }
        let f = |x: &[f64]| (x[0] * 0.7).cos();
        let a = integrate_hypercross(&cross, &f).unwrap();
        let b = tensor_apply(&ladder, &[4], &f).unwrap();
        assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
    }

    #[test]
    fn hypercross_mass_and_odd_symmetry() {
        let w = Weight::Freud(FreudWeight::standard_gaussian(1));
        let ladder = DyadicLadder::full_gaussian(&w, 5, 1.0).unwrap();
        let cross = build_hypercross(&ladder, 5.0, 2).unwrap();
        let mass = integrate_hypercross(&cross, &|_| 1.0).unwrap();
        assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
        let odd = integrate_hypercross(&cross, &|x| x[0] * x[1]).unwrap();
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn hypercross_x2y2_gaussian() {
        // weight exp(-x^2-y^2): int x^2 y^2 w = (sqrt(pi)/2)^2 = pi/4
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 8, 1.0).unwrap();
        let cross = build_hypercross(&ladder, 8.0, 2).unwrap();
        let got = integrate_hypercross(&cross, &|x| x[0] * x[0] * x[1] * x[1]).unwrap();
        assert!(
            (got - std::f64::consts::PI / 4.0).abs() <= 1e-6,
            "got {got}"
        );
    }

    #[test]
    fn cardinality_ratio_band() {
        // sizes exactly 2^k; ratio raw/(2^xi xi^{d-1}) stays in a narrow band
        let sizes: Vec<usize> = (0..=14).map(|k| 1usize << k).collect();
        for d in 1..=3usize {
            let mut ratios = Vec::new();
            for xi in 4..=14usize {
                let raw = raw_triple_count(&sizes, xi as f64, d) as f64;
                let denom = 2f64.powi(xi as i32) * (xi as f64).powi(d as i32 - 1);
                ratios.push(raw / denom);
            }
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
            assert!(hi / lo <= 8.0, "d={d}: band [{lo}, {hi}]");
        }
    }

    #[test]
    fn memory_guard_trips() {
        let w = hermite();
        let ladder = DyadicLadder::full_gaussian(&w, 10, 1.0).unwrap();
        let err = build_hypercross_capped(&ladder, 10.0, 3, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn delta_decay_and_absolute_convergence() {
        // per-axis difference decay on a rate-saturating member, and the
        // Cauchy property of the level sums
        use crate::corpus_oracle::corpus_member;
        let w = Weight::Freud(FreudWeight::standard_gaussian(1));
        let ladder =
            DyadicLadder::truncated_gaussian(&w, 0.2, crate::quad1d::ThresholdMode::LargestZero, 9, 0.5)
                .unwrap();
        let member = corpus_member("outward:r=1,d=1").unwrap();
        let f = |x: &[f64]| member.factor(x[0]);
        let mut logs = Vec::new();
        for k in 3..=9usize {
            let d = delta_apply(&ladder, &MultiIndex::new(vec![k]), &f).unwrap();
            logs.push((k as f64, d.abs().max(1e-300).log2()));
        }
        let n = logs.len() as f64;
        let mx: f64 = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my: f64 = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let slope: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        // asserted ladder rate alpha = 0.5: per-level log2-slope <= -alpha + 0.2
        assert!(slope <= -0.5 + 0.2, "delta decay slope {slope}");
        // absolute convergence: tail sums of |Delta_k| shrink
        let tail = |from: usize| -> f64 {
            (from..=9)
                .map(|k| {
                    delta_apply(&ladder, &MultiIndex::new(vec![k]), &f)
                        .unwrap()
                        .abs()
                })
                .sum()
        };
        assert!(tail(7) < tail(4));
        assert!(tail(4) < tail(1));
    }

    #[test]
    fn profile_constant_is_exact() {
        let w = Weight::Freud(FreudWeight::standard_gaussian(1));
        let ladder = DyadicLadder::full_gaussian(&w, 6, 1.0).unwrap();
        let rows = error_profile(&ladder, &|_| 1.0, 2, 1.0, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        for row in rows {
            assert!(row.abs_error <= 1e-12);
            assert!(row.raw_count > 0 && row.merged_count > 0);
        }
    }
}
