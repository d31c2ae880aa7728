//! Success-probability analysis and query planning for randomized Grover runs.
//!
//! A run whose iteration count is drawn uniformly from `{0, .., k-1}` succeeds
//! with probability
//!
//! ```text
//! p(k, theta) = 1/2 * (1 - sin(2k*theta) / (2k * sin(theta)))
//! ```
//!
//! obtained by summing `sin^2(theta/2 + n*theta)` over the draw. The worst
//! case over the unknown marked count `t` is a minimization of `p` over the
//! integer range of `t`; as `k` grows the attainable minima approach two
//! constants fixed by the stationary points of `sin(x)/x` (the roots of
//! `tan x = x`): about `0.4358` when the marked fraction stays at or below
//! one half and about `0.3914` when `t` may approach `N`.
//!
//! The planner turns a dimension and a failure budget `eps` into a concrete
//! three-part procedure: sweep hypotheses `t = 1..t0` with near-optimal (or
//! exact) iteration counts, run `2*t0` randomized runs, and finish with a few
//! classical checks that cover marked fractions above one half. Query-count
//! predictions for both the single-part and three-part procedures come from
//! the same constants.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exact::{exact_schedule, ExactSchedule};
use crate::subspace::{rotation_angles, SearchInstance};

/// Ranges of integer `t` at or below this size are scanned exhaustively;
/// larger ranges use a grid over the rotation angle with golden-section
/// refinement of each bracketed minimum.
const EXACT_SCAN_LIMIT: u64 = 1 << 16;

/// Grid density for oscillation scans: samples per period of `sin(2k*theta)`.
const SAMPLES_PER_PERIOD: f64 = 16.0;

/// Slack subtracted before `ceil` so values that are integers up to rounding
/// noise do not get bumped to the next integer.
const CEIL_SLACK: f64 = 1e-9;

/// Iteration count drawn uniformly from `{0, .., k-1}` before a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomRunLaw {
    k: u64,
}

impl RandomRunLaw {
    pub fn new(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroRunCount);
        }
        Ok(Self { k })
    }

    /// Exclusive upper end of the draw.
    pub fn k(&self) -> u64 {
        self.k
    }
}

/// Success probability of one run with the iteration count drawn from `law`,
/// for an instance with rotation angle `theta` (clamped into `[0, pi]`).
///
/// The removable singularities of the closed form are handled explicitly:
/// `theta = 0` gives 0 (nothing is marked) and `theta = pi` gives 1 (every
/// element is marked), matching the direct sum term by term.
pub fn avg_success(law: RandomRunLaw, theta: f64) -> f64 {
    let theta = theta.clamp(0.0, PI);
    if theta == 0.0 {
        return 0.0;
    }
    if theta == PI {
        return 1.0;
    }
    let k = law.k() as f64;
    let p = 0.5 * (1.0 - (2.0 * k * theta).sin() / (2.0 * k * theta.sin()));
    p.clamp(0.0, 1.0)
}

/// Limits of the attainable worst-case success probability as the draw range
/// grows, together with the stationary points of `sin(x)/x` they come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    /// First positive root of `tan x = x`, in `(pi, 3pi/2)`.
    pub x_edge: f64,
    /// Second positive root of `tan x = x`, in `(2pi, 5pi/2)`.
    pub x_inner: f64,
    /// Worst-case success floor when the marked fraction is at most one
    /// half: `(1 - sin(x_inner)/x_inner) / 2`, about `0.4358`.
    pub p1: f64,
    /// Worst-case success floor over all marked fractions, attained near
    /// `theta = pi`: `(1 + sin(x_edge)/x_edge) / 2`, about `0.3914`.
    pub p2: f64,
}

/// Bisection root of `x*cos(x) - sin(x)` (sign-definite form of `tan x - x`
/// without the tangent poles) on a bracketing interval.
fn tan_fixpoint(mut lo: f64, mut hi: f64) -> f64 {
    let g = |x: f64| x * x.cos() - x.sin();
    let mut g_lo = g(lo);
    debug_assert!(g_lo * g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let g_mid = g(mid);
        if (g_lo < 0.0) == (g_mid < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Computes [`AsymptoticConstants`] once and returns the cached value.
pub fn asymptotic_minima() -> AsymptoticConstants {
    static CACHE: OnceLock<AsymptoticConstants> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let x_edge = tan_fixpoint(PI, 1.5 * PI);
        let x_inner = tan_fixpoint(2.0 * PI, 2.5 * PI);
        AsymptoticConstants {
            x_edge,
            x_inner,
            p1: 0.5 * (1.0 - x_inner.sin() / x_inner),
            p2: 0.5 * (1.0 + x_edge.sin() / x_edge),
        }
    })
}

/// One local minimum found while scanning `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMinimum {
    pub t: u64,
    pub theta: f64,
    pub p: f64,
}

/// Result of a worst-case scan over the marked count.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseReport {
    /// Minimum success probability over the scanned range.
    pub p_min: f64,
    /// Smallest `t` attaining the minimum.
    pub t_at_min: u64,
    /// Local minima in increasing `t`, always including the global one. For
    /// exhaustively scanned ranges this is exact; for gridded ranges it lists
    /// the refined minima the grid resolves.
    pub local_minima: Vec<LocalMinimum>,
}

fn theta_of(n: u64, t: u64) -> f64 {
    rotation_angles(SearchInstance::new(n, t).expect("scan range was validated")).theta()
}

/// `p` at an integer marked count.
fn p_of(law: RandomRunLaw, n: u64, t: u64) -> f64 {
    avg_success(law, theta_of(n, t))
}

/// Golden-section minimization of `f` on `[a, b]`, assuming a bracketed
/// minimum. Returns the midpoint of the final interval and its value.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-13 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn validate_scan_range(n: u64, t_lo: u64, t_hi: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySearchSpace);
    }
    if t_lo == 0 || t_lo > t_hi || t_hi > n {
        return Err(Error::EmptyRange { lo: t_lo, hi: t_hi });
    }
    Ok(())
}

/// Worst case of [`avg_success`] over integer `t` in `[t_lo, n]`.
pub fn worst_case_p(law: RandomRunLaw, t_lo: u64, n: u64) -> Result<WorstCaseReport> {
    worst_case_p_in_range(law, t_lo, n, n)
}

/// Worst case of [`avg_success`] over integer `t` in `[t_lo, t_hi]` for a
/// search space of `n` elements.
///
/// Ranges up to 2^16 wide are scanned exhaustively, which makes the minimum
/// exact. Wider ranges are sampled on an angle grid dense enough to resolve
/// the `sin(2k*theta)` oscillation; every bracketed minimum is refined by
/// golden-section search, rounded to the neighboring integers, and polished
/// by integer descent. Ties prefer the smallest `t`.
pub fn worst_case_p_in_range(
    law: RandomRunLaw,
    t_lo: u64,
    t_hi: u64,
    n: u64,
) -> Result<WorstCaseReport> {
    validate_scan_range(n, t_lo, t_hi)?;
    let span = t_hi - t_lo + 1;
    let minima = if span <= EXACT_SCAN_LIMIT {
        exact_scan(law, t_lo, t_hi, n)
    } else {
        grid_scan(law, t_lo, t_hi, n)
    };
    let best = minima
        .iter()
        .copied()
        .reduce(|best, m| if m.p < best.p { m } else { best })
        .expect("scan ranges are nonempty");
    Ok(WorstCaseReport {
        p_min: best.p,
        t_at_min: best.t,
        local_minima: minima,
    })
}

fn exact_scan(law: RandomRunLaw, t_lo: u64, t_hi: u64, n: u64) -> Vec<LocalMinimum> {
    let ps: Vec<f64> = (t_lo..=t_hi).map(|t| p_of(law, n, t)).collect();
    let last = ps.len() - 1;
    let mut minima = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        let falls_into = i == 0 || p < ps[i - 1];
        let rises_out = i == last || p <= ps[i + 1];
        if falls_into && rises_out {
            let t = t_lo + i as u64;
            minima.push(LocalMinimum {
                t,
                theta: theta_of(n, t),
                p,
            });
        }
    }
    minima
}

fn grid_scan(law: RandomRunLaw, t_lo: u64, t_hi: u64, n: u64) -> Vec<LocalMinimum> {
    let theta_lo = theta_of(n, t_lo);
    let theta_hi = theta_of(n, t_hi);
    let period = PI / law.k() as f64;
    let step = (period / SAMPLES_PER_PERIOD).min((theta_hi - theta_lo) / 256.0);
    let cells = ((theta_hi - theta_lo) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=cells)
        .map(|i| theta_lo + (theta_hi - theta_lo) * i as f64 / cells as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&theta| avg_success(law, theta)).collect();

    // Real-valued t for a given angle, used only to localize candidates.
    let t_at = |theta: f64| n as f64 * 0.5 * (1.0 - theta.cos());

    let mut candidates = std::collections::BTreeSet::new();
    candidates.insert(t_lo);
    candidates.insert(t_hi);
    for i in 1..cells {
        if values[i] <= values[i - 1] && values[i] <= values[i + 1] {
            let (theta_star, _) = golden_min(|x| avg_success(law, x), grid[i - 1], grid[i + 1]);
            let t_star = t_at(theta_star);
            for t in [t_star.floor() as u64, t_star.ceil() as u64] {
                candidates.insert(t.clamp(t_lo, t_hi));
            }
        }
    }

    // Polish each candidate by integer descent, then keep the local minima.
    let mut polished = std::collections::BTreeMap::new();
    for &start in &candidates {
        let mut t = start;
        let mut p = p_of(law, n, t);
        loop {
            let down = (t > t_lo).then(|| p_of(law, n, t - 1));
            let up = (t < t_hi).then(|| p_of(law, n, t + 1));
            if let Some(pd) = down.filter(|&pd| pd < p) {
                t -= 1;
                p = pd;
            } else if let Some(pu) = up.filter(|&pu| pu < p) {
                t += 1;
                p = pu;
            } else {
                break;
            }
        }
        polished.insert(t, p);
    }
    polished
        .into_iter()
        .map(|(t, p)| LocalMinimum {
            t,
            theta: theta_of(n, t),
            p,
        })
        .collect()
}

/// Continuous minimum of [`avg_success`] over `theta` in `[theta_lo,
/// theta_hi]` (both clamped into `[0, pi]`). Returns `(theta_at_min, p_min)`.
pub fn min_avg_success_over_theta(law: RandomRunLaw, theta_lo: f64, theta_hi: f64) -> (f64, f64) {
    let lo = theta_lo.clamp(0.0, PI);
    let hi = theta_hi.clamp(lo, PI);
    if lo == hi {
        return (lo, avg_success(law, lo));
    }
    let period = PI / law.k() as f64;
    let step = (period / SAMPLES_PER_PERIOD).min((hi - lo) / 256.0);
    let cells = ((hi - lo) / step).ceil() as usize;
    let f = |theta: f64| avg_success(law, theta);
    let grid: Vec<f64> = (0..=cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&theta| f(theta)).collect();
    let mut best = (grid[0], values[0]);
    for i in 1..cells {
        if values[i] <= values[i - 1] && values[i] <= values[i + 1] {
            let refined = golden_min(f, grid[i - 1], grid[i + 1]);
            if refined.1 < best.1 {
                best = refined;
            }
        }
    }
    if values[cells] < best.1 {
        best = (grid[cells], values[cells]);
    }
    best
}

/// Per-hypothesis schedules for the sweep over small marked counts.
#[derive(Debug, Clone, PartialEq)]
pub enum Part1Schedules {
    /// Iteration counts for hypotheses `t = 1..=t0`, each maximizing the
    /// success probability under the standard phases.
    Standard(Vec<u64>),
    /// Exact schedules for hypotheses `t = 1..=t0`, used when the failure
    /// budget is tight enough that near-certain runs pay off.
    Exact(Vec<ExactSchedule>),
}

/// Concrete three-part search procedure for one `(n, eps)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmPlan {
    pub n_total: u64,
    pub eps: f64,
    /// Largest marked count covered by the hypothesis sweep.
    pub t0: u64,
    pub part1_schedules: Part1Schedules,
    pub use_exact: bool,
    /// Randomized runs after the sweep; always `2 * t0`.
    pub part2_runs: u64,
    /// Iteration draw bound of the randomized runs: `ceil(pi/4 * sqrt(n/t0))`.
    pub part2_k: u64,
    /// Classical uniform checks covering marked fractions above one half;
    /// zero when that coverage is disabled.
    pub part3_checks: u64,
    /// Worst-case per-run success floor the run count was sized against.
    pub p_used: f64,
}

/// Knobs for [`plan_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Keep the classical tail that covers marked fractions above one half.
    /// Disabling it sizes the randomized part against the lower floor `p2`.
    pub include_part3: bool,
    /// Failure budgets strictly below this switch the hypothesis sweep to
    /// exact schedules; `None` means `1/n`.
    pub exact_threshold: Option<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            include_part3: true,
            exact_threshold: None,
        }
    }
}

fn validate_budget(n: u64, eps: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySearchSpace);
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidTolerance { eps });
    }
    Ok(())
}

/// Iteration count for one hypothesis-`t` run under standard phases:
/// `round((pi/2 - theta0)/theta)`, the count whose final angle is closest to
/// `pi/2` and therefore maximizes the success probability.
pub fn part1_iterations(n: u64, t: u64) -> Result<u64> {
    let instance = SearchInstance::new(n, t)?;
    if t == 0 {
        return Err(Error::NoMarkedElements);
    }
    let angles = rotation_angles(instance);
    Ok(((FRAC_PI_2 - angles.theta0()) / angles.theta()).round() as u64)
}

/// Builds the plan with default knobs (classical tail kept or dropped via
/// `include_part3`, exact-schedule threshold `1/n`).
pub fn plan(n: u64, eps: f64, include_part3: bool) -> Result<AlgorithmPlan> {
    plan_with(
        n,
        eps,
        &PlannerConfig {
            include_part3,
            exact_threshold: None,
        },
    )
}

/// Builds the plan: `t0 = clamp(ceil(ln(eps) / (2 ln(1 - p))), 1, n)` with
/// `p` the applicable success floor, so `2 t0` randomized runs drive the
/// miss probability below `eps`; the classical tail adds
/// `ceil(ln(eps)/ln(1/2))` uniform checks.
pub fn plan_with(n: u64, eps: f64, config: &PlannerConfig) -> Result<AlgorithmPlan> {
    validate_budget(n, eps)?;
    let constants = asymptotic_minima();
    let p_used = if config.include_part3 {
        constants.p1
    } else {
        constants.p2
    };

    let ratio = eps.ln() / (2.0 * (1.0 - p_used).ln());
    let t0 = (((ratio - CEIL_SLACK).ceil().max(1.0)) as u64).min(n);

    let threshold = config.exact_threshold.unwrap_or(1.0 / n as f64);
    let use_exact = eps < threshold;
    let part1_schedules = if use_exact {
        Part1Schedules::Exact(
            (1..=t0)
                .map(|t| exact_schedule(SearchInstance::new(n, t)?))
                .collect::<Result<_>>()?,
        )
    } else {
        Part1Schedules::Standard(
            (1..=t0)
                .map(|t| part1_iterations(n, t))
                .collect::<Result<_>>()?,
        )
    };

    let part2_k = (FRAC_PI_4 * (n as f64 / t0 as f64).sqrt()).ceil() as u64;
    let part3_checks = if config.include_part3 {
        (eps.ln() / 0.5f64.ln() - CEIL_SLACK).ceil().max(0.0) as u64
    } else {
        0
    };

    Ok(AlgorithmPlan {
        n_total: n,
        eps,
        t0,
        part1_schedules,
        use_exact,
        part2_runs: 2 * t0,
        part2_k,
        part3_checks,
        p_used,
    })
}

/// Query counts predicted for the single-part and three-part procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryEstimate {
    /// Expected queries of repeated randomized runs sized against the global
    /// floor: `(pi/4) sqrt(n) * ln(eps) / ln(1 - p2)`.
    pub simple_queries: f64,
    /// Expected queries of the three-part procedure:
    /// `pi sqrt(n) * sqrt(ln(eps) / (2 ln(1 - p1)))`.
    pub improved_queries: f64,
    /// Coefficient in the failure law `eps = exp(-c T^2)` implied by
    /// inverting the improved count: `2 ln(1/(1 - p1)) / (pi^2 n)`.
    pub c_coefficient: f64,
}

/// Predicted query counts for a search space of `n` elements and failure
/// budget `eps`.
pub fn predicted_queries(n: u64, eps: f64) -> Result<QueryEstimate> {
    validate_budget(n, eps)?;
    let constants = asymptotic_minima();
    let sqrt_n = (n as f64).sqrt();
    let ln_eps = eps.ln();
    let simple_queries = FRAC_PI_4 * sqrt_n * ln_eps / (1.0 - constants.p2).ln();
    let improved_queries = PI * sqrt_n * (ln_eps / (2.0 * (1.0 - constants.p1).ln())).sqrt();
    let c_coefficient = 2.0 * (1.0 / (1.0 - constants.p1)).ln() / (PI * PI * n as f64);
    Ok(QueryEstimate {
        simple_queries,
        improved_queries,
        c_coefficient,
    })
}

/// Exact and approximate cost of the hypothesis sweep over `t = 1..=t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Part1Cost {
    /// Sum of the per-hypothesis iteration counts.
    pub iteration_sum: f64,
    /// Iterations plus one verification query per hypothesis run.
    pub query_sum: f64,
    /// Closed-form approximation of the iteration sum: `(pi/2) sqrt(n t0)`.
    pub analytic: f64,
    /// Relative gap between `iteration_sum` and `analytic`.
    pub iteration_gap: f64,
    /// Relative gap between `query_sum` and `analytic`.
    pub query_gap: f64,
}

/// Sums the sweep cost exactly and compares it with `(pi/2) sqrt(n t0)`.
/// Runs in `O(t0)`.
pub fn part1_cost(n: u64, t0: u64) -> Result<Part1Cost> {
    validate_scan_range(n, 1, t0)?;
    let mut iteration_sum = 0.0;
    for t in 1..=t0 {
        iteration_sum += part1_iterations(n, t)? as f64;
    }
    let query_sum = iteration_sum + t0 as f64;
    let analytic = FRAC_PI_2 * (n as f64 * t0 as f64).sqrt();
    Ok(Part1Cost {
        iteration_sum,
        query_sum,
        analytic,
        iteration_gap: (iteration_sum - analytic).abs() / analytic,
        query_gap: (query_sum - analytic).abs() / analytic,
    })
}

/// Samples `(theta, p)` on an even grid strictly inside `(0, pi)`:
/// `theta_i = pi (i+1)/(n_samples+1)`.
pub fn curve_p_vs_theta(law: RandomRunLaw, n_samples: usize) -> Vec<(f64, f64)> {
    (0..n_samples)
        .map(|i| {
            let theta = PI * (i + 1) as f64 / (n_samples + 1) as f64;
            (theta, avg_success(law, theta))
        })
        .collect()
}

/// Closed-form success probability after `n = 0..=n_max` standard iterations
/// on the instance `(n_total, t)`.
pub fn curve_success_vs_iterations(n_total: u64, t: u64, n_max: u64) -> Result<Vec<(u64, f64)>> {
    let instance = SearchInstance::new(n_total, t)?;
    Ok((0..=n_max)
        .map(|n| (n, crate::subspace::success_probability(instance, n)))
        .collect())
}
