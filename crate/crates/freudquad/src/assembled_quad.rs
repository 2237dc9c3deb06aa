//! The assembled quadrature over R^d: a cube rule is shifted to the
//! integer lattice, each shifted copy funded from an exponentially
//! decaying node-budget schedule, and the weight (and optionally a smooth
//! unit partition) folded into the quadrature weights.

use std::sync::OnceLock;

use crate::cube_rules::{CubeRule, RuleContract};
use crate::error::{Error, Result};
use crate::panels;
use crate::quad1d::bump;
use crate::weights::{FreudWeight, Weight};

/// How the normalizer rho is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// The closed-form shell-sum normalizer, clamped to feasibility.
    ShellBound,
    /// The largest scaling that keeps `sum floor(n_k) <= n`.
    Tight,
}

/// Exponential node-budget schedule over integer shifts.
#[derive(Debug, Clone)]
pub struct BudgetSchedule {
    pub n: usize,
    pub xi_n: f64,
    pub delta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub a: f64,
    pub rho: f64,
    pub dim: usize,
    pub mode: RhoMode,
    /// Funded shifts (|k| < xi_n, floor(n_k) >= 1) with their budgets,
    /// in lexicographic shift order.
    pub budgets: Vec<(Vec<i64>, usize)>,
}

impl BudgetSchedule {
    pub fn total_funded(&self) -> usize {
        self.budgets.iter().map(|(_, b)| b).sum()
    }

    /// Unfloored budget for a shift (0 outside the cutoff).
    pub fn raw_budget(&self, k: &[f64]) -> f64 {
        let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm >= self.xi_n {
            0.0
        } else {
            self.rho * self.n as f64 * (-(self.a * self.delta / self.alpha) * norm.powf(self.lambda)).exp()
        }
    }
}

/// Default decay parameter: `delta = a (1 - 1/p) / 2` with p = 2. The
/// halving keeps the tail-feasibility inequalities satisfiable with a
/// modest constant at every shell.
pub fn default_delta(w: &FreudWeight, p: f64) -> f64 {
    w.a * (1.0 - 1.0 / p) / 2.0
}

fn enumerate_shifts(xi: f64, d: usize) -> Vec<Vec<i64>> {
    let reach = xi.ceil() as i64;
    let mut out = Vec::new();
    let mut k = vec![-reach; d];
    'outer: loop {
        let norm: f64 = k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
        if norm < xi {
            out.push(k.clone());
        }
        for axis in (0..d).rev() {
            k[axis] += 1;
            if k[axis] <= reach {
                continue 'outer;
            }
            k[axis] = -reach;
        }
        break;
    }
    out.sort();
    out
}

/// Build the schedule: `xi_n = (delta^{-1} lambda alpha log n)^{1/lambda}`
/// and `n_k = rho n exp(-(a delta / alpha)|k|^lambda)` inside the cutoff.
/// The shell-bound normalizer is clamped so that `sum floor(n_k) <= n` always
/// holds; `Tight` mode instead rescales rho up to the largest feasible
/// value.
pub fn schedule(
    n: usize,
    alpha: f64,
    w: &FreudWeight,
    delta: f64,
    mode: RhoMode,
) -> Result<BudgetSchedule> {
    if n < 2 {
        return Err(Error::Precondition("budget n must be >= 2".into()));
    }
    if !(alpha > 0.0) || !(delta > 0.0) {
        return Err(Error::Precondition(format!(
            "alpha and delta must be positive (alpha={alpha}, delta={delta})"
        )));
    }
    let d = w.dim;
    let lambda = w.lambda;
    let a = w.a;
    let xi_n = (lambda * alpha * (n as f64).ln() / delta).powf(1.0 / lambda);
    let c = a * delta / alpha;

    // degenerate schedule: only the origin cube is funded
    if xi_n < 1.0 {
        return Ok(BudgetSchedule {
            n,
            xi_n,
            delta,
            alpha,
            lambda,
            a,
            rho: 1.0,
            dim: d,
            mode,
            budgets: vec![(vec![0; d], n)],
        });
    }

    let shifts = enumerate_shifts(xi_n, d);
    let shell_weight: Vec<f64> = shifts
        .iter()
        .map(|k| {
            let norm: f64 = k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
            (-c * norm.powf(lambda)).exp()
        })
        .collect();
    let shell_sum: f64 = panels::pairwise_sum(&shell_weight);

    // closed-form normalizer: rho^{-1} = 2 (2 pi)^{(d-1)/2} / d!!
    //   * sum_{s>=0} s^d e^{-c s^lambda}
    let dfact: f64 = {
        let mut acc = 1.0f64;
        let mut v = d as i64;
        while v > 1 {
            acc *= v as f64;
            v -= 2;
        }
        acc
    };
    let mut series = 0.0f64;
    for s in 0..10_000usize {
        let term = (s as f64).powi(d as i32) * (-c * (s as f64).powf(lambda)).exp();
        series += term;
        if s > 2 && term < 1e-18 {
            break;
        }
    }
    let rho_shell_inv =
        2.0 * (2.0 * std::f64::consts::PI).powf((d as f64 - 1.0) / 2.0) / dfact * series;
    let rho_feasible = 1.0 / shell_sum;
    let rho = match mode {
        RhoMode::ShellBound => (1.0 / rho_shell_inv).min(rho_feasible),
        RhoMode::Tight => {
            // binary search the largest scale with sum floor(n_k) <= n
            let feasible = |rho: f64| -> bool {
                let mut total = 0usize;
                for sw in &shell_weight {
                    total += (rho * n as f64 * sw) as usize;
                    if total > n {
                        return false;
                    }
                }
                true
            };
            let mut lo = rho_feasible;
            let mut hi = rho_feasible * (shifts.len() as f64 + 2.0);
            if !feasible(lo) {
                return Err(Error::Precondition(
                    "internal: continuous-feasible rho violated the floor budget".into(),
                ));
            }
            while feasible(hi) {
                hi *= 2.0;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };

    let mut budgets = Vec::new();
    for (k, sw) in shifts.iter().zip(shell_weight.iter()) {
        let funded = (rho * n as f64 * sw) as usize;
        if funded >= 1 {
            budgets.push((k.clone(), funded));
        }
    }
    if budgets.is_empty() {
        // flooring defunded every cube (tiny n with a wide cutoff); keep
        // the quadrature usable by funding the origin with a single node
        budgets.push((vec![0; d], 1));
    }
    let sched = BudgetSchedule {
        n,
        xi_n,
        delta,
        alpha,
        lambda,
        a,
        rho,
        dim: d,
        mode,
        budgets,
    };
    debug_assert!(sched.total_funded() <= n);
    if sched.total_funded() > n {
        return Err(Error::Precondition(format!(
            "schedule overspent: {} of {n}",
            sched.total_funded()
        )));
    }
    Ok(sched)
}

/// A family of cube rules indexed by node budget.
pub trait CubeRuleFamily {
    /// The best rule of the family with at most `budget` nodes, or None
    /// when the family has no member that small.
    fn rule_within(&self, budget: usize) -> Result<Option<CubeRule>>;
    fn dim(&self) -> usize;
    fn describe(&self) -> String;
}

/// Fibonacci lattice rules (d = 2), optionally periodized to the general
/// contract.
pub struct FibonacciFamily {
    pub periodization: Option<crate::cube_rules::PeriodizationMap>,
}

impl CubeRuleFamily for FibonacciFamily {
    fn rule_within(&self, budget: usize) -> Result<Option<CubeRule>> {
        if budget == 0 {
            return Ok(None);
        }
        let mut m = 1usize;
        while crate::cube_rules::fibonacci_number(m + 1) as usize <= budget {
            m += 1;
        }
        let rule = crate::cube_rules::fibonacci_rule(m)?;
        match &self.periodization {
            Some(map) => Ok(Some(crate::cube_rules::periodize(map, &rule)?)),
            None => Ok(Some(rule)),
        }
    }

    fn dim(&self) -> usize {
        2
    }

    fn describe(&self) -> String {
        match &self.periodization {
            Some(map) => format!("fibonacci+psi{}", map.k),
            None => "fibonacci".into(),
        }
    }
}

/// Smolyak B-spline cube rules for smoothness r (any d), degrading to the
/// one-node midpoint rule below the smallest sparse grid so that fringe
/// cubes with tiny budgets stay integrable.
pub struct SmolyakBsplineFamily {
    pub r: usize,
    pub dim: usize,
    pub periodization: Option<crate::cube_rules::PeriodizationMap>,
}

impl CubeRuleFamily for SmolyakBsplineFamily {
    fn rule_within(&self, budget: usize) -> Result<Option<CubeRule>> {
        if budget == 0 {
            return Ok(None);
        }
        let rule = match crate::cube_rules::smolyak_bspline_cube_rule(budget, self.r, self.dim) {
            Ok(rule) => rule,
            Err(Error::Precondition(_)) => CubeRule {
                nodes: vec![vec![0.0; self.dim]],
                weights: vec![1.0],
                dim: self.dim,
                contract: RuleContract::Periodic,
                rate: None,
            },
            Err(e) => return Err(e),
        };
        match &self.periodization {
            Some(map) => Ok(Some(crate::cube_rules::periodize(map, &rule)?)),
            None => Ok(Some(rule)),
        }
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn describe(&self) -> String {
        format!("smolyak-bspline(r={})", self.r)
    }
}

/// The assembled rule: per-cube sub-rules shifted to their integer
/// offsets, weights multiplied by the weight function (and the unit
/// partition in the theta-dilated variant).
#[derive(Debug, Clone)]
pub struct AssembledRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// (shift, node count) per funded cube, in schedule order.
    pub per_cube: Vec<(Vec<i64>, usize)>,
    /// All nodes lie within this Euclidean ball.
    pub ball_radius: f64,
    pub dim: usize,
}

impl AssembledRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_node_norm(&self) -> f64 {
        self.nodes
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Assemble per-cube rules on the unit-shifted cubes: node `x_j + k`,
/// weight `lambda_j w(x_j + k)`.
pub fn assemble(
    sched: &BudgetSchedule,
    family: &dyn CubeRuleFamily,
    w: &Weight,
) -> Result<AssembledRule> {
    if family.dim() != sched.dim || w.dim() != sched.dim {
        return Err(Error::Precondition("dimension mismatch in assemble".into()));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut per_cube = Vec::new();
    for (k, budget) in &sched.budgets {
        let rule = family.rule_within(*budget)?.ok_or_else(|| {
            Error::Precondition(format!(
                "family {} cannot produce a rule within budget {budget} for cube {k:?}",
                family.describe()
            ))
        })?;
        if rule.len() > *budget {
            return Err(Error::Precondition(format!(
                "family {} overspent cube {k:?}: {} > {budget}",
                family.describe(),
                rule.len()
            )));
        }
        per_cube.push((k.clone(), rule.len()));
        for (x, &lam) in rule.nodes.iter().zip(rule.weights.iter()) {
            let shifted: Vec<f64> = x
                .iter()
                .zip(k.iter())
                .map(|(&xi, &ki)| xi + ki as f64)
                .collect();
            let wval = w.evaluate(&shifted);
            nodes.push(shifted);
            weights.push(lam * wval);
        }
    }
    Ok(AssembledRule {
        nodes,
        weights,
        per_cube,
        ball_radius: (sched.dim as f64).sqrt() / 2.0 + sched.xi_n,
        dim: sched.dim,
    })
}

/// Smooth 1-D partition bell: plateau 1 on `|t| <= 1 - theta/2`, smooth
/// ramp to 0 at `|t| = theta/2`, built from the normalized antiderivative
/// of the standard bump.
fn partition_hat(theta: f64, t: f64) -> f64 {
    let half = theta / 2.0;
    let edge = theta - 1.0;
    let up = |u: f64| -> f64 {
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            bump_antiderivative(u)
        }
    };
    up((half + t) / edge) * up((half - t) / edge)
}

/// Normalized antiderivative S(u) = int_0^u phi / int_0^1 phi of the
/// standard bump, cached on a fine grid with linear interpolation between
/// samples (the grid is dense enough for partition-of-unity checks at
/// 1e-12, far below the 1e-10 contract).
fn bump_antiderivative(u: f64) -> f64 {
    const GRID: usize = 4096;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut cumulative = vec![0.0f64; GRID + 1];
        let (xs, ws) = panels::gauss_legendre_cached(24);
        let h = 1.0 / GRID as f64;
        for i in 0..GRID {
            let lo = i as f64 * h;
            let mid = lo + 0.5 * h;
            let half = 0.5 * h;
            let mut acc = 0.0;
            for (x, w) in xs.iter().zip(ws.iter()) {
                acc += w * bump(mid + half * x);
            }
            cumulative[i + 1] = cumulative[i] + acc * half;
        }
        let total = cumulative[GRID];
        for v in &mut cumulative {
            *v /= total;
        }
        cumulative
    });
    let scaled = u * GRID as f64;
    let i = (scaled.floor() as usize).min(GRID - 1);
    let frac = scaled - i as f64;
    table[i] * (1.0 - frac) + table[i + 1] * frac
}

/// The tensor unit partition: `phi_k(x) = prod_i hat(x_i - k_i)`,
/// normalized pointwise per axis so the family sums to one exactly.
pub fn unit_partition(theta: f64, k: &[i64], x: &[f64]) -> f64 {
    assert!(theta > 1.0 && theta < 2.0, "theta must lie in (1, 2)");
    let mut value = 1.0f64;
    for (&xi, &ki) in x.iter().zip(k.iter()) {
        let t = xi - ki as f64;
        let raw = partition_hat(theta, t);
        if raw == 0.0 {
            return 0.0;
        }
        // neighbors overlapping xi
        let mut denom = 0.0;
        let lo = (xi - theta / 2.0).ceil() as i64;
        let hi = (xi + theta / 2.0).floor() as i64;
        for j in lo..=hi {
            denom += partition_hat(theta, xi - j as f64);
        }
        value *= raw / denom;
    }
    value
}

/// Assemble theta-dilated per-cube rules on overlapping cubes with the
/// unit partition folded into the weights: node `theta x_j + k`, weight
/// `theta^d lambda_j w(node) phi_k(node)`.
pub fn assemble_partitioned(
    sched: &BudgetSchedule,
    family: &dyn CubeRuleFamily,
    w: &Weight,
    theta: f64,
) -> Result<AssembledRule> {
    if !(theta > 1.0 && theta < 2.0) {
        return Err(Error::Precondition(format!("theta must lie in (1, 2), got {theta}")));
    }
    if family.dim() != sched.dim || w.dim() != sched.dim {
        return Err(Error::Precondition("dimension mismatch in assemble".into()));
    }
    let d = sched.dim;
    let jacobian = theta.powi(d as i32);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut per_cube = Vec::new();
    for (k, budget) in &sched.budgets {
        let rule = family.rule_within(*budget)?.ok_or_else(|| {
            Error::Precondition(format!(
                "family {} cannot produce a rule within budget {budget} for cube {k:?}",
                family.describe()
            ))
        })?;
        per_cube.push((k.clone(), rule.len()));
        for (x, &lam) in rule.nodes.iter().zip(rule.weights.iter()) {
            let shifted: Vec<f64> = x
                .iter()
                .zip(k.iter())
                .map(|(&xi, &ki)| theta * xi + ki as f64)
                .collect();
            let wval = w.evaluate(&shifted) * unit_partition(theta, k, &shifted);
            nodes.push(shifted);
            weights.push(lam * jacobian * wval);
        }
    }
    Ok(AssembledRule {
        nodes,
        weights,
        per_cube,
        ball_radius: theta * (d as f64).sqrt() / 2.0 + sched.xi_n,
        dim: d,
    })
}

/// Apply the assembled rule in its deterministic cube-then-node order.
pub fn integrate_assembled(rule: &AssembledRule, f: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.len());
    for (x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        if w == 0.0 {
            continue;
        }
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

/// Deterministic low-discrepancy probe points in the ball of the given
/// radius (Kronecker golden-ratio sequence; the partition checks are
/// specified at "random" points but the whole artifact is RNG-free).
pub fn probe_points(count: usize, radius: f64, d: usize) -> Vec<Vec<f64>> {
    static ALPHAS: [f64; 3] = [
        0.618_033_988_749_894_9,
        0.754_877_666_246_692_9,
        0.819_172_513_396_164_4,
    ];
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        i += 1;
        let p: Vec<f64> = (0..d)
            .map(|axis| (2.0 * ((i as f64 * ALPHAS[axis]).fract()) - 1.0) * radius)
            .collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube_rules::PeriodizationMap;

    fn gauss(d: usize) -> FreudWeight {
        FreudWeight::standard_gaussian(d)
    }

    #[test]
    fn schedule_budget_feasible_and_decaying() {
        for d in 1..=2usize {
            let w = gauss(d);
            let delta = default_delta(&w, 2.0);
            for mode in [RhoMode::ShellBound, RhoMode::Tight] {
                for n in [16usize, 128, 1024, 8192] {
                    let s = schedule(n, 2.0, &w, delta, mode).unwrap();
                    assert!(s.total_funded() <= n, "overspent at n={n} d={d}");
                    // budgets non-increasing in |k|
                    let mut by_norm: Vec<(f64, usize)> = s
                        .budgets
                        .iter()
                        .map(|(k, b)| {
                            (k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt(), *b)
                        })
                        .collect();
                    by_norm.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                    for pair in by_norm.windows(2) {
                        if pair[0].0 < pair[1].0 {
                            assert!(pair[0].1 >= pair[1].1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn schedule_log_linear_decay_exact() {
        let w = gauss(2);
        let delta = default_delta(&w, 2.0);
        let s = schedule(4096, 2.0, &w, delta, RhoMode::ShellBound).unwrap();
        let slope = -w.a * delta / 2.0;
        let n0 = s.raw_budget(&[0.0, 0.0]);
        for (k, _) in &s.budgets {
            let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            let norm2: f64 = kf.iter().map(|v| v * v).sum();
            let raw = s.raw_budget(&kf);
            let predicted = n0 * (slope * norm2.sqrt().powf(2.0)).exp();
            assert!(
                ((raw / n0).ln() - slope * norm2).abs() <= 1e-9,
                "k={k:?}: {} vs {}",
                raw,
                predicted
            );
        }
    }

    #[test]
    fn schedule_cutoff_and_degenerate() {
        let w = gauss(1);
        let delta = default_delta(&w, 2.0);
        let s = schedule(4096, 1.0, &w, delta, RhoMode::ShellBound).unwrap();
        assert!(s.raw_budget(&[s.xi_n + 0.5]) == 0.0);
        // tiny n: flooring would defund everything; the origin keeps one node
        let tiny = schedule(2, 1.0, &w, delta, RhoMode::ShellBound).unwrap();
        assert_eq!(tiny.budgets, vec![(vec![0], 1)]);
        // a genuinely degenerate cutoff (xi < 1) funds only the origin
        let degenerate = schedule(2, 1e-3, &w, 10.0, RhoMode::ShellBound).unwrap();
        assert!(degenerate.xi_n < 1.0);
        assert_eq!(degenerate.budgets, vec![(vec![0], 2)]);
    }

    #[test]
    fn tight_mode_spends_more() {
        let w = gauss(2);
        let delta = default_delta(&w, 2.0);
        let shell = schedule(2048, 2.0, &w, delta, RhoMode::ShellBound).unwrap();
        let tight = schedule(2048, 2.0, &w, delta, RhoMode::Tight).unwrap();
        assert!(tight.total_funded() >= shell.total_funded());
        assert!(tight.total_funded() <= 2048);
        assert!(tight.total_funded() > 2048 / 2, "tight mode should nearly exhaust the budget");
    }

    #[test]
    fn assemble_single_cube_is_base_rule_times_weight() {
        let w = gauss(2);
        let delta = default_delta(&w, 2.0);
        let sched = schedule(2, 2.0, &w, delta, RhoMode::ShellBound).unwrap();
        let family = FibonacciFamily { periodization: None };
        let rule = assemble(&sched, &family, &Weight::Freud(w)).unwrap();
        assert_eq!(rule.per_cube.len(), 1);
        assert!(rule.len() <= 2);
        // nodes inside the central cube
        assert!(rule.max_node_norm() <= (2f64).sqrt() / 2.0 + sched.xi_n);
    }

    #[test]
    fn assembled_mass_converges_to_one() {
        let w = gauss(2);
        let delta = default_delta(&w, 2.0);
        let family = FibonacciFamily {
            periodization: Some(PeriodizationMap::new(3)),
        };
        let mut errs = Vec::new();
        for n in [512usize, 4096, 32768] {
            let sched = schedule(n, 2.0, &w, delta, RhoMode::Tight).unwrap();
            let rule = assemble(&sched, &family, &Weight::Freud(w)).unwrap();
            assert!(rule.len() <= n);
            assert!(rule.max_node_norm() <= rule.ball_radius + 1e-12);
            let got = integrate_assembled(&rule, &|_| 1.0).unwrap();
            errs.push((got - 1.0).abs());
        }
        assert!(errs[2] < errs[0], "no convergence: {errs:?}");
        assert!(errs[2] < 1e-4, "mass error too large: {errs:?}");
    }

    #[test]
    fn assembled_odd_integrand_vanishes() {
        let w = gauss(2);
        let delta = default_delta(&w, 2.0);
        let sched = schedule(1024, 2.0, &w, delta, RhoMode::Tight).unwrap();
        let family = FibonacciFamily { periodization: None };
        let rule = assemble(&sched, &family, &Weight::Freud(w)).unwrap();
        let got = integrate_assembled(&rule, &|x| x[0] * x[1] * (x[0] * x[1]).signum() * 0.0 + x[0]).unwrap();
        // schedule and Fibonacci nodes are not symmetric point-by-point,
        // but the weight-damped sum of an odd function stays small
        assert!(got.abs() < 0.05, "odd integrand left {got}");
    }

    #[test]
    fn partition_sums_to_one_in_ball() {
        for d in 1..=2usize {
            for &theta in &[1.3f64, 1.7] {
                for p in probe_points(500, 5.0, d) {
                    let lo: Vec<i64> = p.iter().map(|v| v.floor() as i64 - 1).collect();
                    let mut total = 0.0;
                    let mut k = lo.clone();
                    'sum: loop {
                        let phi = unit_partition(theta, &k, &p);
                        assert!((0.0..=1.0 + 1e-12).contains(&phi));
                        total += phi;
                        for axis in 0..d {
                            k[axis] += 1;
                            if k[axis] <= lo[axis] + 3 {
                                continue 'sum;
                            }
                            k[axis] = lo[axis];
                        }
                        break;
                    }
                    assert!(
                        (total - 1.0).abs() <= 1e-10,
                        "d={d} theta={theta} at {p:?}: sum {total}"
                    );
                }
            }
        }
    }

    #[test]
    fn partition_support_containment() {
        let theta = 1.5f64;
        // phi_k vanishes outside the open theta-cube at k
        for t in [-0.76, 0.76, 1.2] {
            assert_eq!(partition_hat(theta, t), 0.0, "t={t}");
        }
        assert!(partition_hat(theta, 0.74) > 0.0);
        assert_eq!(unit_partition(theta, &[2, 0], &[2.8, 0.0]), 0.0);
    }

    #[test]
    fn assemble_partitioned_mass() {
        let w = gauss(2);
        let delta = default_delta(&w, 2.0);
        let family = FibonacciFamily {
            periodization: Some(PeriodizationMap::new(3)),
        };
        let mut errs = Vec::new();
        for n in [1024usize, 8192, 65536] {
            let sched = schedule(n, 2.0, &w, delta, RhoMode::Tight).unwrap();
            let rule = assemble_partitioned(&sched, &family, &Weight::Freud(w), 1.8).unwrap();
            assert!(rule.max_node_norm() <= rule.ball_radius + 1e-12);
            assert!(rule.len() <= n);
            errs.push((integrate_assembled(&rule, &|_| 1.0).unwrap() - 1.0).abs());
        }
        assert!(errs[2] < errs[0] / 10.0, "no convergence: {errs:?}");
        assert!(errs[2] < 1e-3, "partitioned mass errors {errs:?}");
    }

    #[test]
    fn probe_points_deterministic() {
        let a = probe_points(100, 5.0, 2);
        let b = probe_points(100, 5.0, 2);
        assert_eq!(a, b);
    }
}
