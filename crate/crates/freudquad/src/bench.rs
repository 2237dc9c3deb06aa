//! Convergence tables, rate regression and deterministic emission: the
//! machinery behind the benchmark CLI.

use std::time::Instant;

use crate::assembled_quad::{
    assemble, assemble_partitioned, integrate_assembled, schedule, CubeRuleFamily,
    FibonacciFamily, RhoMode, SmolyakBsplineFamily,
};
use crate::bspline_recover::{builtin_scheme, sample_points, smolyak_recover};
use crate::corpus_oracle::CorpusFn;
use crate::cube_rules::{
    fibonacci_number, fibonacci_rule, smolyak_bspline_cube_rule, PeriodizationMap,
};
use crate::error::{Error, Result};
use crate::orthopoly::gauss_rule_for_weight;
use crate::quad1d::{integrate_tg, truncate, ThresholdMode};
use crate::sparse_quad::{build_hypercross, integrate_hypercross, DyadicLadder};
use crate::weights::Weight;

/// A numeric table with named columns. Wall-clock per row is tracked
/// separately and never serialized, keeping emission bit-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub seconds: Vec<f64>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Table {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            seconds: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// CSV with shortest round-trip float formatting (bit-stable given
    /// identical inputs).
    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .headers
                    .iter()
                    .zip(r.iter())
                    .map(|(h, v)| {
                        let jv = if v.is_finite() {
                            serde_json::json!(v)
                        } else {
                            serde_json::Value::Null
                        };
                        (h.clone(), jv)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("json encode") + "\n"
    }

    /// Two-column log2 pairs (budget, error) ready for external plotting.
    pub fn to_plotdata(&self) -> String {
        let err_col = self
            .headers
            .iter()
            .position(|h| h.ends_with("error"))
            .unwrap_or(self.headers.len() - 1);
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "{} {}\n",
                format_float(row[0].log2()),
                format_float(row[err_col].log2())
            ));
        }
        out
    }
}

fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// Parse a CSV table produced by [`Table::to_csv`] (used by `fit` on
/// previously emitted tables). Tolerant only of the exact shape it
/// writes: a header line and uniform numeric rows.
pub fn parse_convergence_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let headers: Vec<String> = header_line.split(',').map(|s| s.trim().to_string()).collect();
    if headers.is_empty() || headers.iter().any(|h| h.is_empty()) {
        return Err(Error::Parse("malformed CSV header".into()));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != headers.len() {
            return Err(Error::Parse(format!(
                "row {} has {} cells, header has {}",
                lineno + 2,
                cells.len(),
                headers.len()
            )));
        }
        let mut row = Vec::with_capacity(cells.len());
        for c in cells {
            let c = c.trim();
            let v = match c {
                "NaN" => f64::NAN,
                "inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                _ => c
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad numeric cell `{c}`")))?,
            };
            row.push(v);
        }
        rows.push(row);
    }
    let seconds = vec![0.0; rows.len()];
    Ok(Table { headers, rows, seconds })
}

/// Least-squares fit of `error ~ C n^-alpha (log n)^beta` with beta held
/// fixed from theory.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub alpha: f64,
    pub ln_c: f64,
    pub beta_fixed: f64,
    pub alpha_stderr: f64,
    pub residual: f64,
    pub rows_used: usize,
    pub rows_dropped: usize,
}

pub fn fit_rate(budgets: &[f64], errors: &[f64], beta_fixed: f64) -> Result<RateFit> {
    if budgets.len() != errors.len() {
        return Err(Error::Precondition("budget/error length mismatch".into()));
    }
    let mut pts = Vec::new();
    let mut dropped = 0usize;
    for (&n, &e) in budgets.iter().zip(errors.iter()) {
        if !(e > 0.0) || !e.is_finite() || !(n > 1.0) {
            dropped += 1;
            continue;
        }
        let x = n.ln();
        let y = e.ln() - beta_fixed * x.ln();
        pts.push((x, y));
    }
    if pts.len() < 5 {
        return Err(Error::Precondition(format!(
            "rate fit needs at least 5 usable rows, got {} ({dropped} dropped)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let stderr = if pts.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(RateFit {
        alpha: -slope,
        ln_c: intercept,
        beta_fixed,
        alpha_stderr: stderr,
        residual: ss_res.sqrt(),
        rows_used: pts.len(),
        rows_dropped: dropped,
    })
}

/// Base cube rule selection for the assembled quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssembledBase {
    Fibonacci,
    SmolyakBspline,
}

/// Convergence-study methods, each mapping to one library operation.
#[derive(Debug, Clone)]
pub enum Method {
    /// Truncated Gaussian rule on R: budget n picks the largest base
    /// degree whose kept-node count stays within n.
    Tg { theta: f64, mode: ThresholdMode },
    /// The full Gaussian rule with all n nodes.
    GaussFull,
    /// Smolyak difference quadrature on the step hyperbolic cross;
    /// budgets are integer levels xi.
    Hypercross { theta: f64, alpha: f64 },
    /// Assembled shifted-cube quadrature over R^d.
    Assembled {
        base: AssembledBase,
        r: usize,
        rho: RhoMode,
        psi_order: usize,
        /// dilation factor for the partitioned variant, None for the
        /// plain unit-cube assembly
        theta_dilation: Option<f64>,
    },
    /// Fibonacci lattice rule on the unit cube (d = 2, periodic members).
    Fibonacci,
    /// Smolyak B-spline rule on the unit cube (periodic members).
    SmolyakBspline { r: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Tg { .. } => "tg",
            Method::GaussFull => "gauss-full",
            Method::Hypercross { .. } => "hypercross",
            Method::Assembled { .. } => "assembled",
            Method::Fibonacci => "fibonacci",
            Method::SmolyakBspline { .. } => "smolyak-bspline",
        }
    }
}

/// Largest base degree m whose truncated rule stays within `budget`
/// kept nodes. Results are cached, and searches for larger budgets seed
/// their bracket from smaller cached ones (the kept count grows
/// essentially proportionally with m).
pub fn tg_degree_for_budget(
    w: &Weight,
    theta: f64,
    mode: ThresholdMode,
    budget: usize,
) -> Result<usize> {
    use std::collections::BTreeMap;
    use std::sync::{Mutex, OnceLock};
    type Cache = Mutex<HashMap<(String, u64, u8), BTreeMap<usize, usize>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    use std::collections::HashMap;

    if budget < 2 {
        return Err(Error::Precondition("tg budget must be >= 2".into()));
    }
    let key = (
        crate::weights::weight_spec_string(&w.univariate()),
        theta.to_bits(),
        match mode {
            ThresholdMode::Mrs => 0u8,
            ThresholdMode::LargestZero => 1u8,
        },
    );
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut seed = None;
    {
        let guard = cache.lock().unwrap();
        if let Some(per_budget) = guard.get(&key) {
            if let Some(hit) = per_budget.get(&budget) {
                return Ok(*hit);
            }
            seed = per_budget.range(..=budget).next_back().map(|(_, &m)| m);
        }
    }
    let size_of = |m: usize| -> Result<usize> {
        let rule = gauss_rule_for_weight(&w.univariate(), m)?;
        Ok(truncate(&rule, &w.univariate(), theta, mode)?.len())
    };
    // Bracket with O(m) Sturm-count estimates; full eigensolves happen
    // only for the final verification walk.
    let w1 = w.univariate();
    let mut rec_len = (seed.unwrap_or(budget).max(budget) * 2).max(16);
    let mut rec = crate::orthopoly::recurrence_for_weight(&w1, rec_len)?;
    let estimate = |m: usize,
                        rec: &mut crate::orthopoly::Recurrence,
                        rec_len: &mut usize|
     -> Result<usize> {
        if m > *rec_len {
            *rec_len = m * 2;
            *rec = crate::orthopoly::recurrence_for_weight(&w1, *rec_len)?;
        }
        let cut = match mode {
            ThresholdMode::LargestZero => {
                theta * crate::orthopoly::largest_node_estimate(rec, m)
            }
            ThresholdMode::Mrs => match w1 {
                Weight::Freud(fw) => theta * crate::weights::mrs_number(&fw, m),
                Weight::MarkovSonin(_) => theta * (m as f64).sqrt(),
            },
        };
        Ok(crate::orthopoly::truncated_size_estimate(rec, m, cut))
    };
    let mut lo = seed.unwrap_or(budget).max(budget);
    if estimate(lo, &mut rec, &mut rec_len)? > budget {
        lo = budget.max(2);
    }
    let mut hi = lo * 2;
    while estimate(hi, &mut rec, &mut rec_len)? <= budget {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if estimate(mid, &mut rec, &mut rec_len)? <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // resolve the estimate's cut-boundary ambiguity against the true
    // truncation
    let mut best = lo;
    while size_of(best)? > budget {
        best -= 1;
    }
    loop {
        match size_of(best + 1) {
            Ok(size) if size <= budget => best += 1,
            _ => break,
        }
    }
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_default()
        .insert(budget, best);
    Ok(best)
}

/// Run a convergence study: deterministic rows, one per budget, errors
/// measured against the member's certified reference. Integration
/// failures (an integrand overflowing at an outer node) record a NaN
/// error rather than aborting the study.
pub fn run_convergence(
    method: &Method,
    member: &CorpusFn,
    w: &Weight,
    budgets: &[usize],
) -> Result<Table> {
    match method {
        Method::Tg { theta, mode } => {
            let (reference, _) = member.reference_weighted(w)?;
            require_dim(member, w, 1)?;
            let mut table = Table::new(&["n", "nodes_used", "abs_error"]);
            for &n in budgets {
                let t0 = Instant::now();
                let m = tg_degree_for_budget(w, *theta, *mode, n)?;
                let rule = gauss_rule_for_weight(&w.univariate(), m)?;
                let tg = truncate(&rule, &w.univariate(), *theta, *mode)?;
                let err = match integrate_tg(&tg, &|t| member.factor(t)) {
                    Ok(v) => (v - reference).abs(),
                    Err(Error::EvalFailure { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                };
                table.rows.push(vec![n as f64, tg.len() as f64, err]);
                table.seconds.push(t0.elapsed().as_secs_f64());
            }
            Ok(table)
        }
        Method::GaussFull => {
            let (reference, _) = member.reference_weighted(w)?;
            require_dim(member, w, 1)?;
            let mut table = Table::new(&["n", "nodes_used", "abs_error"]);
            for &n in budgets {
                let t0 = Instant::now();
                let rule = gauss_rule_for_weight(&w.univariate(), n)?;
                let err = match rule.integrate(&|t| member.factor(t)) {
                    Ok(v) => (v - reference).abs(),
                    Err(Error::EvalFailure { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                };
                table.rows.push(vec![n as f64, rule.len() as f64, err]);
                table.seconds.push(t0.elapsed().as_secs_f64());
            }
            Ok(table)
        }
        Method::Hypercross { theta, alpha } => {
            let (reference, _) = member.reference_weighted(w)?;
            let d = member.dim;
            let k_max = budgets.iter().copied().max().unwrap_or(0);
            let ladder = DyadicLadder::truncated_gaussian(
                w,
                *theta,
                ThresholdMode::LargestZero,
                k_max,
                *alpha,
            )?;
            let mut table =
                Table::new(&["xi", "raw_count", "merged_count", "abs_error"]);
            for &xi in budgets {
                let t0 = Instant::now();
                let cross = build_hypercross(&ladder, xi as f64, d)?;
                let err = match integrate_hypercross(&cross, &|x| member.eval(x)) {
                    Ok(v) => (v - reference).abs(),
                    Err(Error::EvalFailure { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                };
                table.rows.push(vec![
                    xi as f64,
                    cross.raw_count as f64,
                    cross.merged_count() as f64,
                    err,
                ]);
                table.seconds.push(t0.elapsed().as_secs_f64());
            }
            Ok(table)
        }
        Method::Assembled { base, r, rho, psi_order, theta_dilation } => {
            let (reference, _) = member.reference_weighted(w)?;
            let fw = match w.univariate() {
                Weight::Freud(fw) => fw.with_dim(w.dim()),
                _ => {
                    return Err(Error::Precondition(
                        "assembled quadrature requires a Freud-type weight".into(),
                    ))
                }
            };
            let family: Box<dyn CubeRuleFamily> = match base {
                AssembledBase::Fibonacci => {
                    if w.dim() != 2 {
                        return Err(Error::Precondition(
                            "fibonacci base requires d = 2".into(),
                        ));
                    }
                    Box::new(FibonacciFamily {
                        periodization: Some(PeriodizationMap::new(*psi_order)),
                    })
                }
                AssembledBase::SmolyakBspline => Box::new(SmolyakBsplineFamily {
                    r: *r,
                    dim: w.dim(),
                    periodization: Some(PeriodizationMap::new(*psi_order)),
                }),
            };
            let delta = crate::assembled_quad::default_delta(&fw, 2.0);
            let mut table = Table::new(&["n", "n_used", "xi_n", "abs_error"]);
            for &n in budgets {
                let t0 = Instant::now();
                let sched = schedule(n, *r as f64, &fw, delta, *rho)?;
                let rule = match theta_dilation {
                    Some(theta) => {
                        assemble_partitioned(&sched, family.as_ref(), w, *theta)?
                    }
                    None => assemble(&sched, family.as_ref(), w)?,
                };
                let err = match integrate_assembled(&rule, &|x| member.eval(x)) {
                    Ok(v) => (v - reference).abs(),
                    Err(Error::EvalFailure { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                };
                table
                    .rows
                    .push(vec![n as f64, rule.len() as f64, sched.xi_n, err]);
                table.seconds.push(t0.elapsed().as_secs_f64());
            }
            Ok(table)
        }
        Method::Fibonacci => {
            let reference = member.reference_cube().ok_or_else(|| {
                Error::Precondition(format!(
                    "member {} has no unit-cube reference; pick a periodic member",
                    member.id
                ))
            })?;
            if member.dim != 2 {
                return Err(Error::Precondition("fibonacci rule is d = 2".into()));
            }
            let mut table = Table::new(&["n", "nodes_used", "abs_error"]);
            for &n in budgets {
                let t0 = Instant::now();
                let mut m = 1usize;
                while fibonacci_number(m + 1) as usize <= n {
                    m += 1;
                }
                let rule = fibonacci_rule(m)?;
                let v = rule.apply(&|x| member.eval(&shift_half(x)))?;
                table
                    .rows
                    .push(vec![n as f64, rule.len() as f64, (v - reference).abs()]);
                table.seconds.push(t0.elapsed().as_secs_f64());
            }
            Ok(table)
        }
        Method::SmolyakBspline { r } => {
            let reference = member.reference_cube().ok_or_else(|| {
                Error::Precondition(format!(
                    "member {} has no unit-cube reference; pick a periodic member",
                    member.id
                ))
            })?;
            let mut table = Table::new(&["n", "nodes_used", "abs_error"]);
            for &n in budgets {
                let t0 = Instant::now();
                let rule = smolyak_bspline_cube_rule(n, *r, member.dim)?;
                let v = rule.apply(&|x| member.eval(&shift_half(x)))?;
                table
                    .rows
                    .push(vec![n as f64, rule.len() as f64, (v - reference).abs()]);
                table.seconds.push(t0.elapsed().as_secs_f64());
            }
            Ok(table)
        }
    }
}

fn shift_half(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v + 0.5).collect()
}

fn require_dim(member: &CorpusFn, w: &Weight, d: usize) -> Result<()> {
    if member.dim != d || w.dim() != d {
        return Err(Error::Precondition(format!(
            "method needs d = {d}, got member d = {} and weight d = {}",
            member.dim,
            w.dim()
        )));
    }
    Ok(())
}

/// Sampling-recovery study: for each level m, rebuild R_m from member
/// samples and measure L2/Linf errors on a dense probe grid (offset from
/// the sample lattices).
pub fn run_recovery(
    scheme_name: &str,
    member: &CorpusFn,
    levels: &[usize],
    probe: usize,
) -> Result<Table> {
    if !member.periodic {
        return Err(Error::Precondition(format!(
            "member {} is not periodic; recovery runs on torus members",
            member.id
        )));
    }
    let scheme = builtin_scheme(scheme_name)?;
    let d = member.dim;
    if d > 2 {
        return Err(Error::Precondition("recovery study supports d <= 2".into()));
    }
    let mut table = Table::new(&["m", "grid_size", "l2_error", "linf_error"]);
    for &m in levels {
        let t0 = Instant::now();
        let rec = smolyak_recover(&scheme, m, d, &|x| member.eval(x))?;
        let grid_size = sample_points(m, d, scheme.ell).len();
        let offset = 0.5 / probe as f64 + 1.0 / (3.0 * probe as f64);
        let mut sum2 = 0.0f64;
        let mut worst = 0.0f64;
        let mut count = 0usize;
        if d == 1 {
            for i in 0..probe {
                let x = [i as f64 / probe as f64 + offset];
                let diff = (rec.eval(&x) - member.eval(&x)).abs();
                sum2 += diff * diff;
                worst = worst.max(diff);
                count += 1;
            }
        } else {
            for i in 0..probe {
                for j in 0..probe {
                    let x = [
                        i as f64 / probe as f64 + offset,
                        j as f64 / probe as f64 + offset,
                    ];
                    let diff = (rec.eval(&x) - member.eval(&x)).abs();
                    sum2 += diff * diff;
                    worst = worst.max(diff);
                    count += 1;
                }
            }
        }
        let l2 = (sum2 / count as f64).sqrt();
        table
            .rows
            .push(vec![m as f64, grid_size as f64, l2, worst]);
        table.seconds.push(t0.elapsed().as_secs_f64());
    }
    Ok(table)
}
