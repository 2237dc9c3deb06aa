//! Base quadratures on the unit cube `[-1/2, 1/2]^d` and the smooth
//! periodization transform: the building blocks the assembled quadrature
//! places on integer-shifted cubes.

use crate::bspline_recover::{builtin_scheme, quadrature_weights, QuasiInterpScheme};
use crate::error::{Error, Result};
use crate::panels;

/// Which function class the rule's convergence contract covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleContract {
    /// 1-periodic Sobolev functions.
    Periodic,
    /// Functions supported strictly inside the cube.
    ZeroBoundary,
    /// The full Sobolev space on the cube.
    General,
}

/// An immutable cube rule with provenance and an asserted convergence
/// rate `error <= C m^-alpha (log m)^beta` on its contract class.
#[derive(Debug, Clone)]
pub struct CubeRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub dim: usize,
    pub contract: RuleContract,
    pub rate: Option<(f64, f64)>,
}

impl CubeRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn with_rate(mut self, alpha: f64, beta: f64) -> Self {
        self.rate = Some((alpha, beta));
        self
    }

    pub fn apply(&self, f: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.len());
        for (x, &w) in self.nodes.iter().zip(self.weights.iter()) {
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

    pub fn weight_sum(&self) -> f64 {
        panels::pairwise_sum(&self.weights)
    }
}

/// Fibonacci numbers b_0 = b_1 = 1, b_m = b_{m-1} + b_{m-2}.
pub fn fibonacci_number(m: usize) -> u64 {
    let mut a = 1u64;
    let mut b = 1u64;
    for _ in 0..m {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// The Fibonacci lattice rule on `[-1/2, 1/2]^2`: `b_m` equal-weight
/// nodes `({i/b_m} - 1/2, {i b_{m-1}/b_m} - 1/2)`. The fractional parts
/// are computed in integer arithmetic before conversion, so the
/// coordinates are exact rationals rounded once.
///
/// ```
/// use freudquad::cube_rules::fibonacci_rule;
///
/// let rule = fibonacci_rule(7).unwrap();
/// assert_eq!(rule.len(), 21);
/// let mass = rule.apply(&|_| 1.0).unwrap();
/// assert!((mass - 1.0).abs() < 1e-15);
/// ```
pub fn fibonacci_rule(m: usize) -> Result<CubeRule> {
    if m == 0 {
        return Err(Error::Precondition("fibonacci index m must be >= 1".into()));
    }
    let bm = fibonacci_number(m);
    if bm > (1u64 << 52) {
        return Err(Error::Precondition(format!(
            "fibonacci index m = {m} overflows exact f64 rationals"
        )));
    }
    let bm1 = fibonacci_number(m - 1);
    let mut nodes = Vec::with_capacity(bm as usize);
    let weights = vec![1.0 / bm as f64; bm as usize];
    for i in 1..=bm {
        let x_num = i % bm;
        let y_num = (i as u128 * bm1 as u128 % bm as u128) as u64;
        nodes.push(vec![
            x_num as f64 / bm as f64 - 0.5,
            y_num as f64 / bm as f64 - 0.5,
        ]);
    }
    Ok(CubeRule {
        nodes,
        weights,
        dim: 2,
        contract: RuleContract::Periodic,
        rate: None,
    })
}

/// The smooth change of variable `psi_k(t) = C_k int_0^t u^k (1-u)^k du`
/// on [0, 1]: monotone, endpoint-flat to order k.
#[derive(Debug, Clone)]
pub struct PeriodizationMap {
    pub k: usize,
    pub c_k: f64,
    /// psi as a polynomial: coefficients of t^{k+1}, .., t^{2k+1}.
    poly: Vec<f64>,
}

impl PeriodizationMap {
    pub fn new(k: usize) -> Self {
        // C_k = 1/B(k+1, k+1) = (2k+1)! / (k!)^2
        let mut c_k = 1.0f64;
        for i in 1..=(2 * k + 1) {
            c_k *= i as f64;
        }
        let mut kf = 1.0f64;
        for i in 1..=k {
            kf *= i as f64;
        }
        c_k /= kf * kf;
        // int_0^t u^k (1-u)^k du = sum_j C(k,j) (-1)^j t^{k+j+1}/(k+j+1)
        let mut poly = Vec::with_capacity(k + 1);
        let mut binom = 1.0f64;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            poly.push(sign * binom / (k + j + 1) as f64);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        PeriodizationMap { k, c_k, poly }
    }

    /// psi_k(t), clamped to 0 below 0 and 1 above 1.
    pub fn psi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let mut acc = 0.0;
        for (j, &c) in self.poly.iter().enumerate().rev() {
            let _ = j;
            acc = acc * t + c;
        }
        // factored t^{k+1}
        self.c_k * acc * t.powi(self.k as i32 + 1)
    }

    /// psi_k'(t) = C_k t^k (1-t)^k on [0, 1], zero outside.
    pub fn dpsi(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        self.c_k * (t * (1.0 - t)).powi(self.k as i32)
    }

    /// j-th derivative of psi at t, exact through the polynomial
    /// coefficients (j >= 1).
    pub fn dpsi_order(&self, j: usize, t: f64) -> f64 {
        assert!(j >= 1);
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        // psi(t) = C_k sum_i poly[i] t^{k+1+i}
        let mut acc = 0.0;
        for (i, &c) in self.poly.iter().enumerate() {
            let p = self.k + 1 + i;
            if p < j {
                continue;
            }
            let mut fall = 1.0f64;
            for q in 0..j {
                fall *= (p - q) as f64;
            }
            acc += c * fall * t.powi((p - j) as i32);
        }
        self.c_k * acc
    }
}

/// Transform a rule for functions supported inside the cube (or periodic
/// on it) into a rule for the full Sobolev class: nodes move through
/// `psi_k` componentwise, weights pick up the Jacobian `prod psi_k'`.
/// Affine bookkeeping maps between the `[-1/2, 1/2]` and `[0, 1]`
/// conventions.
pub fn periodize(map: &PeriodizationMap, rule: &CubeRule) -> Result<CubeRule> {
    if rule.contract == RuleContract::General {
        return Err(Error::Precondition(
            "periodize expects a zero-boundary or periodic contract rule".into(),
        ));
    }
    let mut nodes = Vec::with_capacity(rule.len());
    let mut weights = Vec::with_capacity(rule.len());
    for (x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let mut y = Vec::with_capacity(x.len());
        let mut jac = 1.0f64;
        for &xi in x {
            let t = xi + 0.5;
            y.push(map.psi(t) - 0.5);
            jac *= map.dpsi(t);
        }
        nodes.push(y);
        weights.push(w * jac);
    }
    Ok(CubeRule {
        nodes,
        weights,
        dim: rule.dim,
        contract: RuleContract::General,
        rate: rule.rate,
    })
}

/// Spline order used by the Smolyak cube rule for smoothness r.
fn scheme_for_smoothness(r: usize) -> Result<QuasiInterpScheme> {
    match r {
        1 => builtin_scheme("linear"),
        2 | 3 => builtin_scheme("cubic"),
        _ => Err(Error::Precondition(format!(
            "no built-in quasi-interpolation scheme of order > {r} (supported r: 1..=3)"
        ))),
    }
}

/// Node count of the Smolyak B-spline rule at sparse-grid level xi.
pub fn smolyak_bspline_node_count(xi: usize, r: usize, d: usize) -> Result<usize> {
    let scheme = scheme_for_smoothness(r)?;
    Ok(crate::bspline_recover::sample_points(xi, d, scheme.ell).len())
}

/// The Smolyak B-spline quadrature on the cube: integrate the sparse-grid
/// recovery operator `R_xi`, with `xi_m` the maximal level whose sample
/// grid stays within the node budget m. The weights are the exact basis
/// integrals `2^{-|k|_1} / ell^d` accumulated through the coefficient
/// functionals. Periodic contract; compose with [`periodize`] for the
/// general class.
pub fn smolyak_bspline_cube_rule(m: usize, r: usize, d: usize) -> Result<CubeRule> {
    let scheme = scheme_for_smoothness(r)?;
    let mut xi: Option<usize> = None;
    for cand in 0..=24usize {
        let count = crate::bspline_recover::sample_points(cand, d, scheme.ell).len();
        if count <= m {
            xi = Some(cand);
        } else {
            break;
        }
    }
    let xi = xi.ok_or_else(|| {
        Error::Precondition(format!(
            "budget m = {m} below the smallest level-0 grid ({} points)",
            crate::bspline_recover::sample_points(0, d, scheme.ell).len()
        ))
    })?;
    let torus_weights = quadrature_weights(&scheme, xi, d)?;
    let mut nodes = Vec::with_capacity(torus_weights.len());
    let mut weights = Vec::with_capacity(torus_weights.len());
    for (p, w) in torus_weights {
        nodes.push(p.iter().map(|&u| u - 0.5).collect());
        weights.push(w);
    }
    Ok(CubeRule {
        nodes,
        weights,
        dim: d,
        contract: RuleContract::Periodic,
        rate: Some((r as f64, (d as f64 - 1.0) * (r as f64 + 0.5))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fibonacci_numbers() {
        let want = [1u64, 1, 2, 3, 5, 8, 13, 21, 34, 55];
        for (m, &b) in want.iter().enumerate() {
            assert_eq!(fibonacci_number(m), b);
        }
    }

    #[test]
    fn fibonacci_rule_m4_mass() {
        let rule = fibonacci_rule(4).unwrap();
        assert_eq!(rule.len(), 5);
        assert_relative_eq!(rule.apply(&|_| 1.0).unwrap(), 1.0, max_relative = 1e-15);
        for x in &rule.nodes {
            assert!(x.iter().all(|&c| (-0.5..0.5).contains(&c)));
        }
    }

    #[test]
    fn fibonacci_rule_m2_exact_nodes() {
        let rule = fibonacci_rule(2).unwrap();
        assert_eq!(rule.nodes, vec![vec![0.0, 0.0], vec![-0.5, -0.5]]);
    }

    #[test]
    fn fibonacci_m5_kills_first_harmonic() {
        let rule = fibonacci_rule(5).unwrap();
        let got = rule
            .apply(&|x| (2.0 * std::f64::consts::PI * x[0]).cos())
            .unwrap();
        assert!(got.abs() < 1e-14, "got {got}");
    }

    #[test]
    fn fibonacci_dual_lattice_exactness() {
        // exp(2 pi i (a x + b y)) integrates to zero unless
        // a + b b_{m-1} = 0 (mod b_m); check all small frequencies for
        // b_m <= 55 (phases from the -1/2 shift do not change magnitude).
        for m in 2..=9usize {
            let bm = fibonacci_number(m);
            let bm1 = fibonacci_number(m - 1);
            let rule = fibonacci_rule(m).unwrap();
            for a in -4i64..=4 {
                for b in -4i64..=4 {
                    let mut re = 0.0f64;
                    let mut im = 0.0f64;
                    for (x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                        let phase =
                            2.0 * std::f64::consts::PI * (a as f64 * x[0] + b as f64 * x[1]);
                        re += w * phase.cos();
                        im += w * phase.sin();
                    }
                    let mag = (re * re + im * im).sqrt();
                    let in_dual = (a + b * bm1 as i64).rem_euclid(bm as i64) == 0;
                    if in_dual {
                        assert!(mag > 0.99, "m={m} ({a},{b}): magnitude {mag}");
                    } else {
                        assert!(mag < 1e-12, "m={m} ({a},{b}): magnitude {mag}");
                    }
                }
            }
        }
    }

    #[test]
    fn psi1_closed_form() {
        let map = PeriodizationMap::new(1);
        assert_relative_eq!(map.c_k, 6.0, max_relative = 1e-15);
        for &t in &[0.1f64, 0.3, 0.5, 0.9] {
            assert_relative_eq!(map.psi(t), 3.0 * t * t - 2.0 * t * t * t, max_relative = 1e-14);
        }
    }

    #[test]
    fn psi_midpoint_fixed_for_all_k() {
        for k in 1..=6 {
            let map = PeriodizationMap::new(k);
            assert_relative_eq!(map.psi(0.5), 0.5, max_relative = 1e-13);
            assert!(map.psi(0.2) < 0.2); // mass pushed toward the center
        }
    }

    #[test]
    fn psi_endpoint_flatness() {
        for k in 1..=5usize {
            let map = PeriodizationMap::new(k);
            for j in 1..=k {
                assert!(map.dpsi_order(j, 0.0).abs() < 1e-10, "k={k} d^{j} at 0");
                assert!(map.dpsi_order(j, 1.0).abs() < 1e-10, "k={k} d^{j} at 1");
            }
            // but the (k+1)-st does not vanish
            assert!(map.dpsi_order(k + 1, 0.0).abs() > 1.0);
        }
    }

    #[test]
    fn dpsi_integrates_to_one() {
        let map = PeriodizationMap::new(3);
        let segs = panels::equal_panels(0.0, 1.0, 8);
        let got = panels::integrate_panels(&|t| map.dpsi(t), &segs, 30);
        assert_relative_eq!(got, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn periodize_identity_and_mass() {
        let map = PeriodizationMap::new(3);
        let base = fibonacci_rule(10).unwrap();
        let transformed = periodize(&map, &base).unwrap();
        assert_eq!(transformed.contract, RuleContract::General);
        // exact identity: transformed mass = base rule applied to prod psi'
        let via_base = base
            .apply(&|x| x.iter().map(|&xi| map.dpsi(xi + 0.5)).product::<f64>())
            .unwrap();
        assert_relative_eq!(transformed.weight_sum(), via_base, max_relative = 1e-13);
        // and it converges to 1 = (int psi')^2 at lattice accuracy
        assert!((transformed.weight_sum() - 1.0).abs() < 1e-4);
        let fine = periodize(&map, &fibonacci_rule(24).unwrap()).unwrap();
        assert!((fine.weight_sum() - 1.0).abs() < 1e-8);
        for x in &transformed.nodes {
            assert!(x.iter().all(|&c| (-0.5..=0.5).contains(&c)));
        }
    }

    #[test]
    fn periodize_rejects_general_contract() {
        let map = PeriodizationMap::new(2);
        let base = fibonacci_rule(5).unwrap();
        let general = periodize(&map, &base).unwrap();
        assert!(periodize(&map, &general).is_err());
    }

    #[test]
    fn smolyak_cube_rule_mass_exact() {
        for (m, r, d) in [(16usize, 2usize, 1usize), (40, 2, 2), (16, 1, 2)] {
            let rule = smolyak_bspline_cube_rule(m, r, d).unwrap();
            assert!(rule.len() <= m);
            assert_relative_eq!(rule.weight_sum(), 1.0, max_relative = 1e-12);
            assert_relative_eq!(rule.apply(&|_| 1.0).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn smolyak_cube_rule_d1_converges_on_smooth_periodic() {
        let f = |x: &[f64]| (2.0 * std::f64::consts::PI * (x[0] + 0.5)).cos().exp();
        let truth = 1.266_065_877_752_008_4; // I_0(1), the mean of exp(cos)
        let mut errs = Vec::new();
        for m in [8usize, 16, 32, 64, 128, 256] {
            let rule = smolyak_bspline_cube_rule(m, 2, 1).unwrap();
            errs.push((rule.apply(&f).unwrap() - truth).abs());
        }
        assert!(
            errs.last().unwrap() < &1e-6,
            "smolyak cube rule did not converge: {errs:?}"
        );
        assert!(errs.first().unwrap() > &(errs.last().unwrap() * 100.0));
    }

    #[test]
    fn smolyak_cube_rule_d2_decays_on_periodic_member() {
        use crate::corpus_oracle::corpus_member;
        let member = corpus_member("fourier:r=2,d=2").unwrap();
        let f = |x: &[f64]| member.eval(&[x[0] + 0.5, x[1] + 0.5]);
        let mut pts = Vec::new();
        for m in [64usize, 256, 1024, 4096, 16384] {
            let rule = smolyak_bspline_cube_rule(m, 2, 2).unwrap();
            let err = (rule.apply(&f).unwrap() - 1.0).abs();
            pts.push((rule.len() as f64, err.max(1e-18)));
        }
        // least-squares slope vs nodes used: near -r up to logarithmic
        // drag, well inside [1.0, 3.5]
        let n = pts.len() as f64;
        let mx: f64 = pts.iter().map(|p| p.0.ln()).sum::<f64>() / n;
        let my: f64 = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
        let slope: f64 = pts.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0.ln() - mx).powi(2)).sum::<f64>();
        assert!(
            (-3.5..=-1.0).contains(&slope),
            "smolyak cube d=2 slope {slope}: errors {pts:?}"
        );
        assert!(pts.last().unwrap().1 < pts[0].1 / 50.0);
    }

    #[test]
    fn smolyak_cube_rule_budget_too_small() {
        assert!(smolyak_bspline_cube_rule(3, 2, 2).is_err());
    }

    #[test]
    fn smolyak_rejects_unsupported_r() {
        assert!(smolyak_bspline_cube_rule(64, 9, 1).is_err());
    }
}
