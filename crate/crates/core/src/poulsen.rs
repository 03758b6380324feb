//! Iterative densification of a target polytope inside an ℓ¹ polar: each
//! step adds one new exposed point `ωₙ`, a small push of a scheduled convex
//! combination `ϖₙ` toward a fresh coordinate direction.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faces::{certificate_against, ExposureCertificate};
use crate::geometry::{
    closed_convex_hull, in_hull, irredundant_vertices, ClosedSet, PointSet, PolarSpec, Polyhedron,
};
use crate::hypermetrics::{hausdorff_full, MetricConfig};
use crate::numerics::{l1_norm, pair, Rational, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Plain,
    /// Target and output in the nonnegative cone.
    Positive,
    /// Target and output are finitely supported probability vectors.
    #[serde(rename = "state")]
    StateSpace,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "positive" => Ok(Variant::Positive),
            "state" | "state_space" => Ok(Variant::StateSpace),
            other => Err(Error::BadParameter(format!("unknown variant {other:?}"))),
        }
    }
}

/// `λₙ = min{1, 2^{−(n+1)} ε}`.
pub fn lambda_schedule(n: usize, epsilon: &Rational) -> Rational {
    Rational::min_of(Rational::one(), Rational::pow2(-(n as i64 + 1)) * epsilon)
}

/// `cₙ`, the ℓ¹ size of `σₙ`. Step 1 uses the full radius (the unit for the
/// state space, whose points have norm 1); later steps stay below
/// `min{R, 1, λ₁/2, …, λₙ₋₁/2}`.
pub fn c_schedule(n: usize, epsilon: &Rational, radius: &Rational, variant: Variant) -> Rational {
    if n == 1 {
        return match variant {
            Variant::StateSpace => Rational::one(),
            _ => radius.clone(),
        };
    }
    let half_last = lambda_schedule(n - 1, epsilon) / Rational::from_int(2);
    Rational::min_of(Rational::min_of(radius.clone(), Rational::one()), half_last)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoulsenStep {
    pub n: usize,
    pub fresh_coordinate: usize,
    pub c: Rational,
    pub sigma: SparseVec,
    pub functional: SparseVec,
    pub lambda: Rational,
    /// The scheduler entry `(m, k)` that produced `ϖₙ`.
    pub scheduled: (usize, usize),
    pub varpi: SparseVec,
    pub omega: SparseVec,
    /// `Aₙ` exposing `ωₙ` against the final generator set.
    pub certificate: ExposureCertificate,
}

/// Serializable scheduler state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerState {
    pub queue: Vec<(usize, usize)>,
    /// Position of the next pair in the diagonal enumeration of `(m, k)`.
    pub next_pair: usize,
    pub served: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoulsenTrace {
    pub epsilon: Rational,
    pub radius: Rational,
    pub variant: Variant,
    pub seed: u64,
    /// Extreme points of the target: the step-0 net.
    pub base_vertices: Vec<SparseVec>,
    pub steps: Vec<PoulsenStep>,
    pub schedule_state: SchedulerState,
}

impl PoulsenTrace {
    /// Generators of `Uₙ`: the base vertices followed by `ω₁, …, ωₙ`.
    pub fn stage_generators(&self, n: usize) -> Vec<SparseVec> {
        self.base_vertices
            .iter()
            .cloned()
            .chain(self.steps.iter().take(n).map(|s| s.omega.clone()))
            .collect()
    }

    pub fn stage_polytope(&self, n: usize) -> Polyhedron {
        Polyhedron::polytope(self.stage_generators(n)).expect("base vertices are nonempty")
    }
}

/// `(m, k)` at position `i` of the diagonal enumeration
/// `(0,1), (0,2), (1,1), (0,3), (1,2), (2,1), …`.
fn diagonal_pair(i: usize) -> (usize, usize) {
    let mut diag = 0;
    let mut start = 0;
    while start + diag < i {
        start += diag + 1;
        diag += 1;
    }
    let m = i - start;
    (m, diag - m + 1)
}

/// Next composition of `q` into `parts.len()` nonnegative parts in
/// lexicographically decreasing order; `false` when exhausted.
fn next_composition(parts: &mut [u64]) -> bool {
    let n = parts.len();
    if n < 2 {
        return false;
    }
    // rightmost position (excluding last) with a positive value
    let Some(i) = (0..n - 1).rev().find(|&i| parts[i] > 0) else {
        return false;
    };
    parts[i] -= 1;
    let rest: u64 = parts[i + 1..].iter().sum::<u64>() + 1;
    for p in &mut parts[i + 1..] {
        *p = 0;
    }
    parts[i + 1] = rest;
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lazy enumeration `ϱ_{m,1}, ϱ_{m,2}, …` of one stage: the generators
/// themselves, then for `q = 2, 3, …` the combinations `Σ (pᵢ/q) gᵢ` over
/// compositions `p` of `q` with `gcd(p) = 1`. Dense in the stage polytope
/// and repetition-free.
#[derive(Clone, Debug)]
struct StageEnumeration {
    generators: Vec<SparseVec>,
    produced: Vec<SparseVec>,
    q: u64,
    parts: Vec<u64>,
}

impl StageEnumeration {
    fn new(generators: Vec<SparseVec>) -> Self {
        let produced = generators.clone();
        StageEnumeration {
            parts: Vec::new(),
            q: 1,
            generators,
            produced,
        }
    }

    fn get(&mut self, k: usize) -> SparseVec {
        if self.generators.len() == 1 {
            return self.generators[0].clone();
        }
        while self.produced.len() < k {
            self.advance();
        }
        self.produced[k - 1].clone()
    }

    fn advance(&mut self) {
        loop {
            if self.parts.is_empty() || !next_composition(&mut self.parts) {
                self.q += 1;
                self.parts = vec![0; self.generators.len()];
                self.parts[0] = self.q;
                // `(q, 0, …, 0)` has gcd q > 1; fall through to the next one
                continue;
            }
            if self.parts.iter().fold(0, |g, &p| gcd(g, p)) != 1 {
                continue;
            }
            let q = Rational::from_int(self.q as i64);
            let weights: Vec<Rational> = self
                .parts
                .iter()
                .map(|&p| Rational::from_int(p as i64) / &q)
                .collect();
            self.produced
                .push(SparseVec::combination(weights.iter().zip(&self.generators)));
            return;
        }
    }
}

/// Fair round-robin over the families `ϱ_{m,k}`: every pair, once admitted,
/// is served again after each full pass of the queue, and every pair with
/// an existing stage is eventually admitted.
#[derive(Clone, Debug)]
pub struct Scheduler {
    state: SchedulerState,
    stages: Vec<StageEnumeration>,
}

impl Scheduler {
    pub fn new(base_vertices: Vec<SparseVec>) -> Self {
        Scheduler {
            state: SchedulerState {
                queue: vec![(0, 1)],
                next_pair: 1,
                served: 0,
            },
            stages: vec![StageEnumeration::new(base_vertices)],
        }
    }

    /// Registers stage `m + 1` with the given generators.
    pub fn push_stage(&mut self, generators: Vec<SparseVec>) {
        self.stages.push(StageEnumeration::new(generators));
    }

    pub fn current_stage(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn state(&self) -> &SchedulerState {
        &self.state
    }

    /// Serves the front of the queue, re-enqueues it, and admits the next
    /// diagonal pair when its stage exists.
    pub fn serve(&mut self) -> ((usize, usize), SparseVec) {
        let mut queue: VecDeque<(usize, usize)> = self.state.queue.drain(..).collect();
        let (m, k) = queue.pop_front().expect("scheduler queue is never empty");
        let point = self.stages[m].get(k);
        queue.push_back((m, k));
        let candidate = diagonal_pair(self.state.next_pair);
        if candidate.0 <= self.current_stage() {
            queue.push_back(candidate);
            self.state.next_pair += 1;
        }
        self.state.queue = queue.into_iter().collect();
        self.state.served += 1;
        ((m, k), point)
    }
}

fn check_target(u: &Polyhedron, polar: &PolarSpec, variant: Variant) -> Result<Vec<SparseVec>> {
    u.ensure_bounded()?;
    let base = irredundant_vertices(u).into_points();
    for (index, v) in base.iter().enumerate() {
        let norm = l1_norm(v);
        if norm > *polar.radius() {
            return Err(Error::TargetOutsidePolar {
                index,
                norm: Box::new(norm),
                radius: Box::new(polar.radius().clone()),
            });
        }
        if variant != Variant::Plain && !v.is_nonnegative() {
            return Err(Error::VariantPreconditionViolated(format!(
                "vertex #{index} has a negative coordinate"
            )));
        }
        if variant == Variant::StateSpace && v.coordinate_sum() != Rational::one() {
            return Err(Error::VariantPreconditionViolated(format!(
                "vertex #{index} has coordinate sum {}, not 1",
                v.coordinate_sum()
            )));
        }
    }
    Ok(base)
}

/// Builds `U_N` from `U` in `steps` steps. Returns the irredundant hull and
/// the full trace.
pub fn construct(
    u: &Polyhedron,
    polar: &PolarSpec,
    epsilon: &Rational,
    steps: usize,
    variant: Variant,
    seed: u64,
) -> Result<(Polyhedron, PoulsenTrace)> {
    if !epsilon.is_positive() {
        return Err(Error::BadParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let base = check_target(u, polar, variant)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scheduler = Scheduler::new(base.clone());
    let mut generators = base.clone();
    let mut next_free = u.max_index().map_or(0, |k| k + 1);
    let mut raw_steps = Vec::with_capacity(steps);

    for n in 1..=steps {
        let k = next_free + rng.gen_range(0..=1usize);
        next_free = k + 1;
        let lambda = lambda_schedule(n, epsilon);
        let c = c_schedule(n, epsilon, polar.radius(), variant);
        let sigma = SparseVec::scaled_basis(k, c.clone());
        let functional = SparseVec::scaled_basis(k, c.recip());
        let (scheduled, varpi) = scheduler.serve();
        let keep = match variant {
            Variant::StateSpace => Rational::one() - &lambda * &c,
            _ => Rational::one() - &lambda,
        };
        let omega = varpi.scale(&keep).axpy(&lambda, &sigma);
        generators.push(omega.clone());
        scheduler.push_stage(generators.clone());
        raw_steps.push((n, k, c, sigma, functional, lambda, scheduled, varpi, omega));
    }

    let steps: Vec<PoulsenStep> = raw_steps
        .into_iter()
        .map(
            |(n, k, c, sigma, functional, lambda, scheduled, varpi, omega)| {
                let top = pair(&functional, &omega);
                let margin = generators
                    .iter()
                    .filter(|w| **w != omega)
                    .map(|w| &top - &pair(&functional, w))
                    .min()
                    .unwrap_or_else(Rational::one);
                let certificate = ExposureCertificate {
                    vertex: omega.clone(),
                    functional: functional.clone(),
                    margin,
                };
                PoulsenStep {
                    n,
                    fresh_coordinate: k,
                    c,
                    sigma,
                    functional,
                    lambda,
                    scheduled,
                    varpi,
                    omega,
                    certificate,
                }
            },
        )
        .collect();

    let result = closed_convex_hull(&ClosedSet::Points(PointSet::new(generators)?));
    let trace = PoulsenTrace {
        epsilon: epsilon.clone(),
        radius: polar.radius().clone(),
        variant,
        seed,
        base_vertices: base,
        steps,
        schedule_state: scheduler.state().clone(),
    };
    Ok((result, trace))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub hausdorff: Option<Rational>,
    pub bound: Rational,
    pub sharpened_bound: Rational,
    /// Fresh LP margin per designated `ωₙ`, `None` when not a vertex.
    pub exposure_margins: Vec<Option<Rational>>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, failures: Vec<String>, ok_detail: String) -> Check {
    Check {
        name: name.into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            ok_detail
        } else {
            failures.join("; ")
        },
    }
}

/// Re-checks a construction from its inputs, output and trace alone.
pub fn verify_trace(
    u: &Polyhedron,
    polar: &PolarSpec,
    result: &Polyhedron,
    trace: &PoulsenTrace,
) -> VerificationReport {
    let eps = &trace.epsilon;
    let bound = eps * Rational::from_int(2);
    let cfg = MetricConfig::polar(polar.clone());
    let mut checks = Vec::new();

    // (a) distance ledger
    let hausdorff = hausdorff_full(u, result, &cfg);
    let (dist_failures, sharp_failures, hausdorff) = match hausdorff {
        Ok(d) => {
            let f = if d <= bound {
                vec![]
            } else {
                vec![format!("distance {d} exceeds 2ε = {bound}")]
            };
            let g = if d <= *eps {
                vec![]
            } else {
                vec![format!("distance {d} exceeds ε = {eps}")]
            };
            (f, g, Some(d))
        }
        Err(e) => (
            vec![format!("distance undefined: {e}")],
            vec![format!("distance undefined: {e}")],
            None,
        ),
    };
    let shown = hausdorff
        .as_ref()
        .map_or("undefined".to_string(), |d| d.to_string());
    checks.push(check(
        "hausdorff_bound",
        dist_failures,
        format!("{shown} <= {bound}"),
    ));
    checks.push(check(
        "hausdorff_sharpened",
        sharp_failures,
        format!("{shown} <= {eps}"),
    ));

    // (b) exposure of designated points, by fresh LP against the result
    let verts = result.vertices();
    let exposure_margins: Vec<Option<Rational>> = trace
        .steps
        .par_iter()
        .map(|s| {
            if !verts.contains(&s.omega) {
                return None;
            }
            let others: Vec<SparseVec> = verts.iter().filter(|w| **w != s.omega).cloned().collect();
            let cert = certificate_against(&s.omega, &others);
            cert.margin.is_positive().then_some(cert.margin)
        })
        .collect();
    let failures = exposure_margins
        .iter()
        .zip(&trace.steps)
        .filter(|(m, _)| m.is_none())
        .map(|(_, s)| format!("ω_{} is not an exposed vertex of the result", s.n))
        .collect();
    checks.push(check(
        "exposure",
        failures,
        format!("{} designated points exposed", trace.steps.len()),
    ));

    let mut failures = Vec::new();
    for (j, sj) in trace.steps.iter().enumerate() {
        if pair(&sj.functional, &sj.omega) != sj.lambda {
            failures.push(format!("A_{0}(ω_{0}) ≠ λ_{0}", sj.n));
        }
        if !sj
            .certificate
            .is_valid_for(&trace.stage_generators(trace.steps.len()))
        {
            failures.push(format!(
                "recorded certificate for ω_{} does not re-check",
                sj.n
            ));
        }
        for sn in &trace.steps[j + 1..] {
            if pair(&sj.functional, &sn.omega) >= sj.lambda {
                failures.push(format!("A_{}(ω_{}) ≥ λ_{}", sj.n, sn.n, sj.n));
            }
        }
    }
    checks.push(check(
        "designated_margins",
        failures,
        "A_j(ω_n) < λ_j for all j < n".into(),
    ));

    // (c) schedules and step consistency
    let mut failures = Vec::new();
    let mut used = u.max_index();
    let mut stage = trace.base_vertices.clone();
    for s in &trace.steps {
        let n = s.n;
        let expected = lambda_schedule(n, eps);
        if s.lambda != expected {
            failures.push(format!(
                "λ_{n} = {} but the schedule gives {expected}",
                s.lambda
            ));
        }
        if n == 1 {
            if s.c > trace.radius || !s.c.is_positive() {
                failures.push(format!("c_1 = {} outside (0, {}]", s.c, trace.radius));
            }
        } else {
            let cap = trace.steps[..n - 1]
                .iter()
                .map(|p| lambda_schedule(p.n, eps) / Rational::from_int(2))
                .fold(Rational::one(), Rational::min_of);
            if s.c > cap || !s.c.is_positive() {
                failures.push(format!("c_{n} = {} outside (0, {cap}]", s.c));
            }
        }
        if used.is_some_and(|m| s.fresh_coordinate <= m) {
            failures.push(format!("k_{n} = {} is not fresh", s.fresh_coordinate));
        }
        used = Some(s.fresh_coordinate);
        if s.sigma != SparseVec::scaled_basis(s.fresh_coordinate, s.c.clone())
            || s.functional != SparseVec::scaled_basis(s.fresh_coordinate, s.c.recip())
        {
            failures.push(format!(
                "σ_{n} or A_{n} is not the scaled fresh basis vector"
            ));
        }
        if stage.iter().any(|g| !pair(&s.functional, g).is_zero()) {
            failures.push(format!("A_{n} does not vanish on earlier generators"));
        }
        if !in_hull(&s.varpi, &stage, &[]) {
            failures.push(format!("ϖ_{n} is not in U_{}", n - 1));
        }
        let keep = match trace.variant {
            Variant::StateSpace => Rational::one() - &s.lambda * &s.c,
            _ => Rational::one() - &s.lambda,
        };
        if s.omega != s.varpi.scale(&keep).axpy(&s.lambda, &s.sigma) {
            failures.push(format!("ω_{n} does not follow the combination rule"));
        }
        stage.push(s.omega.clone());
    }
    checks.push(check(
        "schedule",
        failures,
        format!("{} steps match the λ and c schedules", trace.steps.len()),
    ));

    // (d) polar containment
    let failures = verts
        .iter()
        .chain(trace.steps.iter().map(|s| &s.omega))
        .filter(|v| l1_norm(v) > *polar.radius())
        .map(|v| format!("l1 norm {} exceeds radius {}", l1_norm(v), polar.radius()))
        .collect();
    checks.push(check(
        "polar",
        failures,
        format!("all vertices within radius {}", polar.radius()),
    ));

    // (e) variant constraints
    let failures = match trace.variant {
        Variant::Plain => Vec::new(),
        Variant::Positive | Variant::StateSpace => verts
            .iter()
            .enumerate()
            .filter_map(|(i, v)| {
                if !v.is_nonnegative() {
                    Some(format!("vertex #{i} has a negative coordinate"))
                } else if trace.variant == Variant::StateSpace
                    && v.coordinate_sum() != Rational::one()
                {
                    Some(format!("vertex #{i} sums to {}", v.coordinate_sum()))
                } else {
                    None
                }
            })
            .collect(),
    };
    checks.push(check(
        "variant",
        failures,
        format!("{:?} constraints hold", trace.variant),
    ));

    VerificationReport {
        hausdorff,
        bound,
        sharpened_bound: eps.clone(),
        exposure_margins,
        checks,
    }
}

/// `σ = σ₊ − σ₋` with disjointly supported nonnegative parts.
pub fn jordan_decompose(sigma: &SparseVec) -> (SparseVec, SparseVec) {
    let pos = SparseVec::from_entries(
        sigma
            .iter()
            .filter(|(_, v)| v.is_positive())
            .map(|(&k, v)| (k, v.clone())),
    );
    let neg = SparseVec::from_entries(
        sigma
            .iter()
            .filter(|(_, v)| v.is_negative())
            .map(|(&k, v)| (k, -v)),
    );
    (pos, neg)
}
