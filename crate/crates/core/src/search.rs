//! Executable search procedures against a query-counting black-box oracle.
//!
//! The oracle hides a marked set and charges every query: one per classical
//! or verification check, `n` per simulated `n`-iteration Grover run, and the
//! schedule's total for an exact run. Grover runs use a sampling shortcut
//! instead of dense statevectors: the closed-form success probability decides
//! marked vs unmarked, then a uniform element of that class is drawn. After
//! any number of iterations all amplitudes within a class are equal, so the
//! shortcut is distribution-identical to measuring the full state while
//! scaling to large dimensions.
//!
//! Every procedure has one-sided error: a positive answer is returned only
//! after a counted verification query confirmed the candidate, so the only
//! possible mistake is wrongly reporting that nothing is marked.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{self, AlgorithmPlan, Part1Schedules, PlannerConfig};
use crate::error::{Error, Result};
use crate::exact::{simulate_against, ExactSchedule};
use crate::statevector::MarkedSet;
use crate::subspace::{self, SearchInstance};

/// Hidden search instance plus a query counter.
///
/// Algorithms may read the dimension and the counter; the marked set itself
/// is reserved for harnesses that need ground truth to score outcomes.
#[derive(Debug, Clone)]
pub struct BlackBoxOracle {
    n_total: u64,
    marked: MarkedSet,
    queries: u64,
}

impl BlackBoxOracle {
    pub fn new(n_total: u64, marked: MarkedSet) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::EmptySearchSpace);
        }
        if let Some(&max) = marked.indices().last() {
            if max >= n_total {
                return Err(Error::IndexOutOfRange {
                    index: max,
                    dim: n_total,
                });
            }
        }
        Ok(Self {
            n_total,
            marked,
            queries: 0,
        })
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    /// Total queries charged so far. Never decreases.
    pub fn queries_used(&self) -> u64 {
        self.queries
    }

    /// Ground-truth marked set, for scoring harnesses only; search procedures
    /// must not consult it.
    pub fn hidden_marked(&self) -> &MarkedSet {
        &self.marked
    }

    fn instance(&self) -> SearchInstance {
        SearchInstance::new(self.n_total, self.marked.len()).expect("hidden instance is valid")
    }

    /// Classical membership query. Charges one query.
    pub fn check(&mut self, index: u64) -> Result<bool> {
        if index >= self.n_total {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.n_total,
            });
        }
        self.queries += 1;
        Ok(self.marked.contains(index))
    }

    /// Runs `iterations` standard Grover iterations from the uniform state
    /// and measures. Charges `iterations` queries; the returned candidate is
    /// not verified.
    pub fn run_grover(&mut self, iterations: u64, rng: &mut impl Rng) -> u64 {
        self.queries += iterations;
        let p = subspace::success_probability(self.instance(), iterations);
        self.sample_class(p, rng)
    }

    /// Runs an exact schedule built for some hypothesis marked count against
    /// the hidden instance and measures. Charges the schedule's total query
    /// count; the candidate is not verified. The schedule must have been
    /// built for this oracle's dimension.
    pub fn run_schedule(&mut self, schedule: &ExactSchedule, rng: &mut impl Rng) -> Result<u64> {
        if schedule.instance().n_total() != self.n_total {
            return Err(Error::ScheduleMismatch {
                expected_total: schedule.instance().n_total(),
                expected_marked: schedule.instance().n_marked(),
                got_total: self.n_total,
                got_marked: self.marked.len(),
            });
        }
        self.queries += schedule.total_queries();
        let p = simulate_against(schedule, self.instance()).success_probability();
        Ok(self.sample_class(p, rng))
    }

    /// Decides marked vs unmarked with probability `p`, then draws a uniform
    /// element of that class.
    fn sample_class(&self, p: f64, rng: &mut impl Rng) -> u64 {
        let t = self.marked.len();
        if t > 0 && rng.gen::<f64>() < p {
            self.marked.indices()[rng.gen_range(0..t as usize)]
        } else {
            self.sample_unmarked(rng)
        }
    }

    /// Uniform unmarked element via rank binary search over the sorted
    /// marked indices: the `j`-th unmarked element is `j + i` where `i`
    /// counts marked elements at most `j + i`.
    fn sample_unmarked(&self, rng: &mut impl Rng) -> u64 {
        let unmarked = self.n_total - self.marked.len();
        debug_assert!(
            unmarked > 0,
            "sampled the unmarked class of a fully marked space"
        );
        let j = rng.gen_range(0..unmarked);
        let indices = self.marked.indices();
        let mut lo = 0usize;
        let mut hi = indices.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if indices[mid] - mid as u64 <= j {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        j + lo as u64
    }
}

/// What a search procedure concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// A verified marked element.
    Found(u64),
    /// No marked element was confirmed within the budget. This is the only
    /// outcome that can be wrong.
    NoneFound,
}

/// Kind of one traced run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    /// Batch of uniform classical checks; `parameter` is the batch size
    /// actually performed.
    Classical,
    /// One randomized Grover run; `parameter` is the iteration count.
    Grover,
    /// One exact-schedule run; `parameter` is the hypothesis marked count.
    Exact,
}

/// One accounted step of a search procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub kind: RunKind,
    pub parameter: u64,
    /// Measured or classically drawn candidate, when one was produced.
    pub candidate: Option<u64>,
    /// Whether a verification query confirmed the candidate.
    pub verified: bool,
    /// Queries charged by this step.
    pub cost: u64,
}

/// Outcome, total cost, and per-run trace of one procedure execution.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub outcome: Outcome,
    /// Sum of the trace costs; equals the oracle counter delta.
    pub queries_used: u64,
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    fn from_trace(outcome: Outcome, trace: Vec<TraceEntry>) -> Self {
        let queries_used = trace.iter().map(|entry| entry.cost).sum();
        Self {
            outcome,
            queries_used,
            trace,
        }
    }
}

/// Up to `m` uniform classical checks (with replacement), stopping at the
/// first marked hit. One trace entry describes the whole batch.
fn classical_batch(
    oracle: &mut BlackBoxOracle,
    m: u64,
    rng: &mut impl Rng,
) -> Result<(TraceEntry, Option<u64>)> {
    let mut performed = 0;
    let mut hit = None;
    while performed < m {
        let index = rng.gen_range(0..oracle.n_total());
        performed += 1;
        if oracle.check(index)? {
            hit = Some(index);
            break;
        }
    }
    let entry = TraceEntry {
        kind: RunKind::Classical,
        parameter: performed,
        candidate: hit,
        verified: hit.is_some(),
        cost: performed,
    };
    Ok((entry, hit))
}

fn grover_step(
    oracle: &mut BlackBoxOracle,
    iterations: u64,
    rng: &mut impl Rng,
) -> Result<(TraceEntry, Option<u64>)> {
    let candidate = oracle.run_grover(iterations, rng);
    let verified = oracle.check(candidate)?;
    let entry = TraceEntry {
        kind: RunKind::Grover,
        parameter: iterations,
        candidate: Some(candidate),
        verified,
        cost: iterations + 1,
    };
    Ok((entry, verified.then_some(candidate)))
}

fn exact_step(
    oracle: &mut BlackBoxOracle,
    schedule: &ExactSchedule,
    rng: &mut impl Rng,
) -> Result<(TraceEntry, Option<u64>)> {
    let candidate = oracle.run_schedule(schedule, rng)?;
    let verified = oracle.check(candidate)?;
    let entry = TraceEntry {
        kind: RunKind::Exact,
        parameter: schedule.instance().n_marked(),
        candidate: Some(candidate),
        verified,
        cost: schedule.total_queries() + 1,
    };
    Ok((entry, verified.then_some(candidate)))
}

/// Pure classical sampling: `m` uniform checks with replacement, stopping at
/// the first marked hit.
pub fn classical_check(
    oracle: &mut BlackBoxOracle,
    m: u64,
    rng: &mut impl Rng,
) -> Result<SearchResult> {
    let (entry, hit) = classical_batch(oracle, m, rng)?;
    let outcome = match hit {
        Some(index) => Outcome::Found(index),
        None => Outcome::NoneFound,
    };
    Ok(SearchResult::from_trace(outcome, vec![entry]))
}

/// One Grover run plus its verification query: `iterations + 1` charged
/// queries. Returns the measured candidate and whether it verified.
pub fn grover_measure_run(
    oracle: &mut BlackBoxOracle,
    iterations: u64,
    rng: &mut impl Rng,
) -> Result<(u64, bool)> {
    let (entry, _) = grover_step(oracle, iterations, rng)?;
    Ok((
        entry.candidate.expect("grover runs always measure"),
        entry.verified,
    ))
}

/// Number of repetitions that drives the miss probability of runs with
/// per-run floor `p` below `eps`.
fn rounds_for(eps: f64, p_floor: f64) -> u64 {
    (eps.ln() / (1.0 - p_floor).ln() - 1e-9).ceil().max(1.0) as u64
}

/// Repeated randomized runs with the iteration count drawn from
/// `{0, .., ceil(pi/4 sqrt(N)) - 1}`, sized against the any-fraction floor:
/// `ceil(ln(eps)/ln(1 - p2))` rounds.
pub fn simple_search(
    oracle: &mut BlackBoxOracle,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<SearchResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidTolerance { eps });
    }
    let draw_bound = (std::f64::consts::FRAC_PI_4 * (oracle.n_total() as f64).sqrt()).ceil() as u64;
    let draw_bound = draw_bound.max(1);
    let rounds = rounds_for(eps, analysis::asymptotic_minima().p2);
    let mut trace = Vec::new();
    for _ in 0..rounds {
        let iterations = rng.gen_range(0..draw_bound);
        let (entry, hit) = grover_step(oracle, iterations, rng)?;
        trace.push(entry);
        if let Some(index) = hit {
            return Ok(SearchResult::from_trace(Outcome::Found(index), trace));
        }
    }
    Ok(SearchResult::from_trace(Outcome::NoneFound, trace))
}

/// Three-part search with a plan built here: hypothesis sweep over small
/// marked counts, `2 t0` randomized runs, classical tail.
pub fn improved_search(
    oracle: &mut BlackBoxOracle,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<SearchResult> {
    let plan = analysis::plan(oracle.n_total(), eps, true)?;
    improved_search_with_plan(oracle, &plan, rng)
}

/// Three-part search following a prebuilt plan. The plan must target the
/// oracle's dimension.
pub fn improved_search_with_plan(
    oracle: &mut BlackBoxOracle,
    plan: &AlgorithmPlan,
    rng: &mut impl Rng,
) -> Result<SearchResult> {
    if plan.n_total != oracle.n_total() {
        return Err(Error::ScheduleMismatch {
            expected_total: plan.n_total,
            expected_marked: 0,
            got_total: oracle.n_total(),
            got_marked: 0,
        });
    }
    let mut trace = Vec::new();

    // Part 1: sweep hypotheses t = 1..=t0. A run that fails verification
    // just means "the marked count is not this t" and the sweep continues.
    match &plan.part1_schedules {
        Part1Schedules::Standard(counts) => {
            for &iterations in counts {
                let (entry, hit) = grover_step(oracle, iterations, rng)?;
                trace.push(entry);
                if let Some(index) = hit {
                    return Ok(SearchResult::from_trace(Outcome::Found(index), trace));
                }
            }
        }
        Part1Schedules::Exact(schedules) => {
            for schedule in schedules {
                let (entry, hit) = exact_step(oracle, schedule, rng)?;
                trace.push(entry);
                if let Some(index) = hit {
                    return Ok(SearchResult::from_trace(Outcome::Found(index), trace));
                }
            }
        }
    }

    // Part 2: randomized runs covering t0 < t <= N/2.
    for _ in 0..plan.part2_runs {
        let iterations = rng.gen_range(0..plan.part2_k);
        let (entry, hit) = grover_step(oracle, iterations, rng)?;
        trace.push(entry);
        if let Some(index) = hit {
            return Ok(SearchResult::from_trace(Outcome::Found(index), trace));
        }
    }

    // Part 3: classical checks covering t > N/2.
    if plan.part3_checks > 0 {
        let (entry, hit) = classical_batch(oracle, plan.part3_checks, rng)?;
        trace.push(entry);
        if let Some(index) = hit {
            return Ok(SearchResult::from_trace(Outcome::Found(index), trace));
        }
    }
    Ok(SearchResult::from_trace(Outcome::NoneFound, trace))
}

/// Procedure selector for the Monte Carlo driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Uniform classical checks, `ceil(ln(eps)/ln(1 - 1/N))` of them.
    Classical,
    Simple,
    Improved,
}

/// Aggregated statistics of repeated independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub algorithm: Algorithm,
    pub n_total: u64,
    pub n_marked: u64,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    /// Trials that wrongly reported nothing marked (only possible error).
    pub failures: u64,
    /// Found outcomes whose element was not actually marked. Must be zero;
    /// tracked to make the one-sidedness check explicit.
    pub false_positives: u64,
    pub failure_rate: f64,
    /// Mean charged queries per trial, verifications included.
    pub mean_queries: f64,
    /// Mean queries spent inside Grover circuits only, excluding
    /// verification and classical checks.
    pub mean_iteration_queries: f64,
    pub max_queries: u64,
}

fn iteration_queries(result: &SearchResult) -> u64 {
    result
        .trace
        .iter()
        .map(|entry| match entry.kind {
            RunKind::Classical => 0,
            RunKind::Grover | RunKind::Exact => entry.cost - 1,
        })
        .sum()
}

/// Runs `trials` independent executions of one procedure on the instance
/// `(n, t)` with the marked set `{0, .., t-1}` and aggregates the outcome
/// statistics. Deterministic: trial `i` uses an RNG stream derived from
/// `(seed, i)`, and aggregation is exact integer arithmetic, so results are
/// independent of execution order.
pub fn monte_carlo(
    algorithm: Algorithm,
    n: u64,
    t: u64,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<McSummary> {
    monte_carlo_with(
        algorithm,
        n,
        t,
        eps,
        trials,
        seed,
        &PlannerConfig::default(),
    )
}

/// [`monte_carlo`] with planner knobs for the improved procedure.
pub fn monte_carlo_with(
    algorithm: Algorithm,
    n: u64,
    t: u64,
    eps: f64,
    trials: u64,
    seed: u64,
    config: &PlannerConfig,
) -> Result<McSummary> {
    if trials == 0 {
        return Err(Error::ZeroRunCount);
    }
    SearchInstance::new(n, t)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidTolerance { eps });
    }
    let marked = MarkedSet::first(t);
    let plan = match algorithm {
        Algorithm::Improved => Some(analysis::plan_with(n, eps, config)?),
        _ => None,
    };
    // Classical baseline: enough uniform checks to push the miss rate below
    // eps even for a single marked element.
    let classical_budget = if n == 1 {
        1
    } else {
        (eps.ln() / (1.0 - 1.0 / n as f64).ln() - 1e-9)
            .ceil()
            .max(1.0) as u64
    };

    struct Acc {
        failures: u64,
        false_positives: u64,
        queries: u64,
        iteration_queries: u64,
        max_queries: u64,
    }
    let zero = || Acc {
        failures: 0,
        false_positives: 0,
        queries: 0,
        iteration_queries: 0,
        max_queries: 0,
    };

    let acc = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let mut oracle =
                BlackBoxOracle::new(n, marked.clone()).expect("instance was validated");
            let result = match algorithm {
                Algorithm::Classical => classical_check(&mut oracle, classical_budget, &mut rng),
                Algorithm::Simple => simple_search(&mut oracle, eps, &mut rng),
                Algorithm::Improved => improved_search_with_plan(
                    &mut oracle,
                    plan.as_ref()
                        .expect("plan built for the improved procedure"),
                    &mut rng,
                ),
            }
            .expect("validated inputs cannot fail mid-trial");
            let mut acc = zero();
            acc.queries = result.queries_used;
            acc.iteration_queries = iteration_queries(&result);
            acc.max_queries = result.queries_used;
            match result.outcome {
                Outcome::Found(index) => {
                    if !oracle.hidden_marked().contains(index) {
                        acc.false_positives = 1;
                    }
                }
                Outcome::NoneFound => {
                    if t >= 1 {
                        acc.failures = 1;
                    }
                }
            }
            acc
        })
        .reduce(zero, |a, b| Acc {
            failures: a.failures + b.failures,
            false_positives: a.false_positives + b.false_positives,
            queries: a.queries + b.queries,
            iteration_queries: a.iteration_queries + b.iteration_queries,
            max_queries: a.max_queries.max(b.max_queries),
        });

    Ok(McSummary {
        algorithm,
        n_total: n,
        n_marked: t,
        eps,
        trials,
        seed,
        failures: acc.failures,
        false_positives: acc.false_positives,
        failure_rate: acc.failures as f64 / trials as f64,
        mean_queries: acc.queries as f64 / trials as f64,
        mean_iteration_queries: acc.iteration_queries as f64 / trials as f64,
        max_queries: acc.max_queries,
    })
}
