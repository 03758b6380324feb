//! The weak*-Hausdorff pseudometrics `d_H^(A)`, the weighted metric `d` on
//! a normalizing compact set, the Hausdorff metric it induces on bounded
//! polytopes, and the separation / immeasurability / cylinder-boundedness
//! witnesses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    in_cone, in_hull, max_margin_functional, polar_contains, scalar_image, ClosedSet, PolarSpec,
    Polyhedron, ScalarSet,
};
use crate::numerics::{
    lp_solve, pair, sup_norm, union_support, ExtRational, LpOutcome, LpProblem, Rational, Relation,
    Sense, SparseVec,
};

/// Enumeration `(A_n)_{n≥1}` of the test functionals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum TestFunctionals {
    /// `A_n = e_{n−1}`: total in the predual, and on norm-bounded sets it
    /// generates the weak* topology.
    #[default]
    CoordinateBasis,
    /// A finite prefix `A_1, …, A_N` of any enumeration; the omitted tail
    /// contributes less than `2^{1−N}` to `d` between points of the
    /// normalizing set.
    Explicit(Vec<SparseVec>),
}

/// The compact set `K` whose extent normalizes each term of `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizingSet {
    Polar(PolarSpec),
    Body(Polyhedron),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricConfig {
    pub functionals: TestFunctionals,
    pub normalizing: NormalizingSet,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig::polar(PolarSpec::unit())
    }
}

impl MetricConfig {
    pub fn polar(polar: PolarSpec) -> Self {
        MetricConfig {
            functionals: TestFunctionals::CoordinateBasis,
            normalizing: NormalizingSet::Polar(polar),
        }
    }

    pub fn body(body: Polyhedron) -> Result<Self> {
        body.ensure_bounded()?;
        Ok(MetricConfig {
            functionals: TestFunctionals::CoordinateBasis,
            normalizing: NormalizingSet::Body(body),
        })
    }

    /// `max_{σ∈K} |σ(A)|`.
    pub fn normalizer(&self, a: &SparseVec) -> Rational {
        match &self.normalizing {
            NormalizingSet::Polar(p) => p.radius() * &sup_norm(a),
            NormalizingSet::Body(b) => b
                .vertices()
                .iter()
                .map(|v| pair(a, v).abs())
                .max()
                .unwrap_or_else(Rational::zero),
        }
    }

    /// `2^{−n} / (1 + normalizer(A_n))`, with `n` counted from 1.
    pub fn weight(&self, n: usize, a: &SparseVec) -> Rational {
        Rational::pow2(-(n as i64)) / (Rational::one() + self.normalizer(a))
    }

    /// The index `n ≥ 1` and functional `A_n` for coordinate `k` under the
    /// basis enumeration.
    pub fn basis_term(&self, k: usize) -> (usize, SparseVec) {
        (k + 1, SparseVec::basis(k))
    }

    /// The weighted functionals that can see a difference supported on
    /// `coords`; every other term of `d` vanishes there.
    pub fn active_terms(&self, coords: &[usize]) -> Vec<(SparseVec, Rational)> {
        match &self.functionals {
            TestFunctionals::CoordinateBasis => coords
                .iter()
                .map(|&k| {
                    let (n, a) = self.basis_term(k);
                    let w = self.weight(n, &a);
                    (a, w)
                })
                .collect(),
            TestFunctionals::Explicit(list) => list
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), self.weight(i + 1, a)))
                .collect(),
        }
    }

    pub fn contains(&self, sigma: &SparseVec) -> bool {
        match &self.normalizing {
            NormalizingSet::Polar(p) => polar_contains(sigma, p),
            NormalizingSet::Body(b) => in_hull(sigma, b.vertices(), b.rays()),
        }
    }

    fn check(&self, sigma: &SparseVec) -> Result<()> {
        if self.contains(sigma) {
            Ok(())
        } else {
            Err(Error::NotInNormalizingSet)
        }
    }
}

/// `d(σ, τ)` without the normalizing-set precondition.
pub(crate) fn weighted_distance(
    sigma: &SparseVec,
    tau: &SparseVec,
    cfg: &MetricConfig,
) -> Rational {
    let diff = sigma.sub(tau);
    let coords: Vec<usize> = diff.support().collect();
    cfg.active_terms(&coords)
        .iter()
        .map(|(a, w)| w * &pair(a, &diff).abs())
        .sum()
}

/// `d(σ, τ) = Σ_n 2^{−n} |(σ−τ)(A_n)| / (1 + max_K |σ(A_n)|)`.
pub fn metric_d(sigma: &SparseVec, tau: &SparseVec, cfg: &MetricConfig) -> Result<Rational> {
    cfg.check(sigma)?;
    cfg.check(tau)?;
    Ok(weighted_distance(sigma, tau, cfg))
}

/// `min_{τ∈Q} d(σ, τ)` by LP, for bounded `Q`.
pub fn distance_to_body(sigma: &SparseVec, q: &Polyhedron, cfg: &MetricConfig) -> Result<Rational> {
    q.ensure_bounded()?;
    Ok(distance_to_points(sigma, q.vertices(), cfg))
}

pub(crate) fn distance_to_points(
    sigma: &SparseVec,
    vertices: &[SparseVec],
    cfg: &MetricConfig,
) -> Rational {
    if vertices.contains(sigma) {
        return Rational::zero();
    }
    if vertices.len() == 1 {
        return weighted_distance(sigma, &vertices[0], cfg);
    }
    let coords = union_support(vertices.iter().chain(std::iter::once(sigma)));
    let m = vertices.len();
    let mut constant = Rational::zero();
    let mut lp = LpProblem::new(SparseVec::zero());
    let mut objective = Vec::new();
    for j in 0..m {
        lp.set_nonneg(j);
    }
    let mut next_var = m;
    for (a, w) in cfg.active_terms(&coords) {
        let vals: Vec<Rational> = vertices.iter().map(|v| pair(&a, v)).collect();
        let target = pair(&a, sigma);
        if vals.iter().all(Rational::is_zero) {
            constant += &(&w * &target.abs());
            continue;
        }
        // t ≥ |target − Σ α_j vals_j|
        let t = next_var;
        next_var += 1;
        lp.set_nonneg(t);
        objective.push((t, w));
        let mut up: Vec<(usize, Rational)> = vals.iter().cloned().enumerate().collect();
        up.push((t, Rational::one()));
        lp.add_row(SparseVec::from_entries(up), Relation::Ge, target.clone());
        let mut down: Vec<(usize, Rational)> = vals.iter().map(|x| -x).enumerate().collect();
        down.push((t, Rational::one()));
        lp.add_row(SparseVec::from_entries(down), Relation::Ge, -target);
    }
    lp.add_row(
        SparseVec::from_entries((0..m).map(|j| (j, Rational::one()))),
        Relation::Eq,
        Rational::one(),
    );
    lp.objective = SparseVec::from_entries(objective);
    match lp_solve(&lp, Sense::Minimize) {
        LpOutcome::Optimal { value, .. } => constant + value,
        other => unreachable!("distance LP is feasible and bounded below, got {other:?}"),
    }
}

/// One-sided excess `max_{σ∈P} min_{τ∈Q} d(σ, τ)`, attained at a vertex of
/// `P` since `σ ↦ dist(σ, Q)` is convex.
pub fn excess(p: &Polyhedron, q: &Polyhedron, cfg: &MetricConfig) -> Result<Rational> {
    p.ensure_bounded()?;
    q.ensure_bounded()?;
    Ok(p.vertices()
        .par_iter()
        .map(|v| distance_to_points(v, q.vertices(), cfg))
        .reduce(Rational::zero, Rational::max_of))
}

/// The Hausdorff metric `𝔡_H` induced by `d` on bounded polytopes inside the
/// normalizing set.
pub fn hausdorff_full(p: &Polyhedron, q: &Polyhedron, cfg: &MetricConfig) -> Result<Rational> {
    p.ensure_bounded()?;
    q.ensure_bounded()?;
    for v in p.vertices().iter().chain(q.vertices()) {
        cfg.check(v)?;
    }
    Ok(Rational::max_of(excess(p, q, cfg)?, excess(q, p, cfg)?))
}

fn dist_to_scalar_set(x: &Rational, y: &ScalarSet) -> Rational {
    match y {
        ScalarSet::FinitePoints(ys) => ys
            .iter()
            .map(|v| (x - v).abs())
            .min()
            .expect("scalar images are nonempty"),
        ScalarSet::Interval { lower, upper } => {
            let xe = ExtRational::Finite(x.clone());
            if xe < *lower {
                lower.finite().expect("finite lower end") - x
            } else if xe > *upper {
                x - upper.finite().expect("finite upper end")
            } else {
                Rational::zero()
            }
        }
    }
}

fn scalar_excess(x: &ScalarSet, y: &ScalarSet) -> ExtRational {
    match x {
        ScalarSet::FinitePoints(xs) => ExtRational::Finite(
            xs.iter()
                .map(|p| dist_to_scalar_set(p, y))
                .max()
                .expect("scalar images are nonempty"),
        ),
        ScalarSet::Interval { lower, upper } => {
            let (y_lo, y_hi) = match y {
                ScalarSet::FinitePoints(ys) => (
                    ExtRational::Finite(ys[0].clone()),
                    ExtRational::Finite(ys[ys.len() - 1].clone()),
                ),
                ScalarSet::Interval { lower, upper } => (lower.clone(), upper.clone()),
            };
            if (*upper == ExtRational::PosInf && y_hi != ExtRational::PosInf)
                || (*lower == ExtRational::NegInf && y_lo != ExtRational::NegInf)
            {
                return ExtRational::PosInf;
            }
            let mut candidates: Vec<Rational> = [lower, upper]
                .iter()
                .filter_map(|e| e.finite().cloned())
                .collect();
            if let ScalarSet::FinitePoints(ys) = y {
                // Distance to a finite set peaks at gap midpoints.
                for w in ys.windows(2) {
                    let mid = (&w[0] + &w[1]) / Rational::from_int(2);
                    let me = ExtRational::Finite(mid.clone());
                    if *lower <= me && me <= *upper {
                        candidates.push(mid);
                    }
                }
            }
            ExtRational::Finite(
                candidates
                    .iter()
                    .map(|c| dist_to_scalar_set(c, y))
                    .max()
                    .unwrap_or_else(Rational::zero),
            )
        }
    }
}

/// Hausdorff distance between two closed subsets of ℝ.
pub fn scalar_hausdorff(x: &ScalarSet, y: &ScalarSet) -> ExtRational {
    std::cmp::max(scalar_excess(x, y), scalar_excess(y, x))
}

/// `d_H^(A)(F, G)`: the Hausdorff distance between the images of `F` and `G`
/// under `σ ↦ σ(A)`. `+∞` when one image is unbounded on a side where the
/// other is bounded.
pub fn pseudometric_dh(f: &ClosedSet, g: &ClosedSet, a: &SparseVec) -> ExtRational {
    scalar_hausdorff(&scalar_image(f, a), &scalar_image(g, a))
}

/// A direction `A` with `d_H^(A)(P, Q) > 0` when `co P ≠ co Q`, or `None`
/// when the hulls coincide. The first vertex of `P` (in listed order)
/// outside `co Q` is used, then the first vertex of `Q` outside `co P`.
pub fn separating_direction(p: &Polyhedron, q: &Polyhedron) -> Result<Option<SparseVec>> {
    p.ensure_bounded()?;
    q.ensure_bounded()?;
    for (from, other) in [(p, q), (q, p)] {
        if let Some(v) = from
            .vertices()
            .iter()
            .find(|v| !in_hull(v, other.vertices(), &[]))
        {
            // min over `other` of ⟨A, ·⟩ exceeds ⟨A, v⟩ by the margin.
            let (a, margin) = max_margin_functional(v, other.vertices());
            debug_assert!(margin.is_positive());
            return Ok(Some(a.neg()));
        }
    }
    Ok(None)
}

/// A direction along which the two polyhedra are at infinite pseudodistance,
/// i.e. a functional that is unbounded above on one and bounded above on the
/// other. Exists iff the recession cones differ.
pub fn immeasurable_witness(p: &Polyhedron, q: &Polyhedron) -> Option<SparseVec> {
    for (from, other) in [(p, q), (q, p)] {
        for r in from.rays() {
            if !in_cone(r, other.rays()) {
                return Some(cone_separator(r, other.rays()));
            }
        }
    }
    None
}

/// `A` with `⟨A, r⟩ > 0` and `⟨A, s⟩ ≤ 0` on every `s ∈ cone`, for `r` outside
/// the cone.
fn cone_separator(r: &SparseVec, cone: &[SparseVec]) -> SparseVec {
    let coords = union_support(cone.iter().chain(std::iter::once(r)));
    let delta = coords.len();
    let restrict = |v: &SparseVec| -> Vec<(usize, Rational)> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &k)| (i, v.get(k)))
            .collect()
    };
    let mut lp = LpProblem::new(SparseVec::basis(delta));
    let mut row: Vec<(usize, Rational)> = restrict(r).into_iter().map(|(i, x)| (i, -x)).collect();
    row.push((delta, Rational::one()));
    lp.add_row(SparseVec::from_entries(row), Relation::Le, Rational::zero());
    for s in cone {
        lp.add_row(
            SparseVec::from_entries(restrict(s)),
            Relation::Le,
            Rational::zero(),
        );
    }
    for i in 0..delta {
        lp.add_row(SparseVec::basis(i), Relation::Le, Rational::one());
        lp.add_row(
            SparseVec::scaled_basis(i, -Rational::one()),
            Relation::Le,
            Rational::one(),
        );
    }
    match lp_solve(&lp, Sense::Maximize) {
        LpOutcome::Optimal { value, point } => {
            debug_assert!(value.is_positive());
            SparseVec::from_entries(coords.iter().enumerate().map(|(i, &k)| (k, point.get(i))))
        }
        other => unreachable!("cone separation LP is bounded, got {other:?}"),
    }
}

/// Generators `(A_j)` of a cylinder `𝒱 = {σ : |σ(A_j)| < 1 ∀j}`; empty means
/// the whole dual space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub generators: Vec<SparseVec>,
}

/// `P ⊆ λ𝒱` for some `λ`: every recession ray is invisible to every
/// generator.
pub fn cylinder_bounded(p: &Polyhedron, v: &CylinderSpec) -> bool {
    p.rays()
        .iter()
        .all(|r| v.generators.iter().all(|a| pair(a, r).is_zero()))
}

/// Boolean combinations of cylinder-boundedness atoms; each evaluates to a
/// clopen subset of the hyperspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClopenExpr {
    Bounded(CylinderSpec),
    Not(Box<ClopenExpr>),
    And(Vec<ClopenExpr>),
    Or(Vec<ClopenExpr>),
}

impl ClopenExpr {
    pub fn bounded_in(generators: Vec<SparseVec>) -> Self {
        ClopenExpr::Bounded(CylinderSpec { generators })
    }

    pub fn negate(e: ClopenExpr) -> Self {
        ClopenExpr::Not(Box::new(e))
    }
}

pub fn clopen_eval(expr: &ClopenExpr, p: &Polyhedron) -> bool {
    match expr {
        ClopenExpr::Bounded(v) => cylinder_bounded(p, v),
        ClopenExpr::Not(e) => !clopen_eval(e, p),
        ClopenExpr::And(es) => es.iter().all(|e| clopen_eval(e, p)),
        ClopenExpr::Or(es) => es.iter().any(|e| clopen_eval(e, p)),
    }
}
