use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    closed_convex_hull, hull_of_points, in_hull, ClosedSet, PointSet, Polyhedron,
};
use crate::hypermetrics::{distance_to_points, hausdorff_full, metric_d, MetricConfig};
use crate::numerics::{l1_norm, Rational, SparseVec};

/// A finite prefix `F_0, F_1, …` of a set sequence with the reporting
/// conventions used to approximate its lower and upper limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePrefix {
    sets: Vec<Polyhedron>,
    tolerance: Rational,
    stabilization_index: usize,
    ls_fraction: Rational,
}

impl SequencePrefix {
    /// `tolerance ≥ 0`; zero asks for exact membership.
    pub fn new(
        sets: Vec<Polyhedron>,
        tolerance: Rational,
        stabilization_index: usize,
    ) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::EmptySet);
        }
        if tolerance.is_negative() {
            return Err(Error::BadParameter(format!(
                "tolerance must be nonnegative, got {tolerance}"
            )));
        }
        Ok(SequencePrefix {
            sets,
            tolerance,
            stabilization_index,
            ls_fraction: Rational::new(1, 2),
        })
    }

    /// Fraction of tail indices that must come within tolerance for the
    /// upper-limit flag; `1/2` by default, must lie in `(0, 1]`.
    pub fn with_ls_fraction(mut self, fraction: Rational) -> Result<Self> {
        if !fraction.is_positive() || fraction > Rational::one() {
            return Err(Error::BadParameter(format!(
                "Ls fraction must lie in (0, 1], got {fraction}"
            )));
        }
        self.ls_fraction = fraction;
        Ok(self)
    }

    pub fn sets(&self) -> &[Polyhedron] {
        &self.sets
    }

    pub fn tolerance(&self) -> &Rational {
        &self.tolerance
    }

    pub fn stabilization_index(&self) -> usize {
        self.stabilization_index
    }

    pub fn ls_fraction(&self) -> &Rational {
        &self.ls_fraction
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub candidate: SparseVec,
    /// `dist_d(σ, F_n)` for every index of the prefix.
    pub distances: Vec<Rational>,
    pub in_li: bool,
    pub in_ls: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitReport {
    /// The decision rules, stated in full.
    pub rule: String,
    pub tolerance: Rational,
    pub stabilization_index: usize,
    pub ls_fraction: Rational,
    pub rows: Vec<CandidateRow>,
}

/// Finite-prefix proxies for `σ ∈ Li F_n` and `σ ∈ Ls F_n`.
///
/// Li: every tail distance (index `≥ stabilization_index`) is within
/// tolerance. Ls: at least `ls_fraction` of the tail distances are. An
/// empty tail flags nothing. Li implies Ls by construction.
pub fn li_ls_diagnostic(
    seq: &SequencePrefix,
    candidates: &PointSet,
    cfg: &MetricConfig,
) -> Result<LimitReport> {
    for f in &seq.sets {
        f.ensure_bounded()?;
        if !f.vertices().iter().all(|v| cfg.contains(v)) {
            return Err(Error::NotInNormalizingSet);
        }
    }
    if !candidates.points().iter().all(|c| cfg.contains(c)) {
        return Err(Error::NotInNormalizingSet);
    }
    let rows = candidates
        .points()
        .par_iter()
        .map(|c| {
            let distances: Vec<Rational> = seq
                .sets
                .iter()
                .map(|f| distance_to_points(c, f.vertices(), cfg))
                .collect();
            let tail = distances.get(seq.stabilization_index..).unwrap_or(&[]);
            let close = tail.iter().filter(|d| **d <= seq.tolerance).count();
            let in_li = !tail.is_empty() && close == tail.len();
            let in_ls = !tail.is_empty()
                && Rational::from_int(close as i64)
                    >= &seq.ls_fraction * Rational::from_int(tail.len() as i64);
            CandidateRow {
                candidate: c.clone(),
                distances,
                in_li,
                in_ls,
            }
        })
        .collect();
    Ok(LimitReport {
        rule: format!(
            "in_li: dist <= tolerance at every index >= {s}; in_ls: dist <= tolerance at >= {f} of the indices >= {s}",
            s = seq.stabilization_index,
            f = seq.ls_fraction
        ),
        tolerance: seq.tolerance.clone(),
        stabilization_index: seq.stabilization_index,
        ls_fraction: seq.ls_fraction.clone(),
        rows,
    })
}

/// The limit `K = co(∪ F_n)` of an increasing prefix and the table
/// `𝔡_H(F_n, K)`.
pub fn monotone_limit(
    seq: &SequencePrefix,
    cfg: &MetricConfig,
) -> Result<(Polyhedron, Vec<Rational>)> {
    for f in &seq.sets {
        f.ensure_bounded()?;
    }
    for (n, w) in seq.sets.windows(2).enumerate() {
        if !w[0]
            .vertices()
            .iter()
            .all(|v| in_hull(v, w[1].vertices(), &[]))
        {
            return Err(Error::NotNested(n));
        }
    }
    let union: Vec<SparseVec> = seq
        .sets
        .iter()
        .flat_map(|f| f.vertices().iter().cloned())
        .collect();
    let k = closed_convex_hull(&ClosedSet::Points(PointSet::new(union)?));
    let table = seq
        .sets
        .iter()
        .map(|f| hausdorff_full(f, &k, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok((k, table))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub m: usize,
    /// The points `2^m e_m*` for `m = 1..=M`, together with the origin.
    pub points: Vec<SparseVec>,
    /// `(m, d(2^m e_m*, 0))` under the metric normalized by `co K_M`.
    pub distances: Vec<(usize, Rational)>,
    /// `max ‖σ‖₁` over `co K_M`.
    pub max_l1_norm: Rational,
}

/// The weak*-null sequence `σ_m = 2^m e_m*` whose hulls blow up in norm.
pub fn counterexample_demo(m: usize) -> Result<CounterexampleReport> {
    if m == 0 {
        return Err(Error::BadParameter("M must be at least 1".into()));
    }
    let sigmas: Vec<SparseVec> = (1..=m)
        .map(|j| SparseVec::scaled_basis(j, Rational::pow2(j as i64)))
        .collect();
    let mut points = sigmas.clone();
    points.push(SparseVec::zero());
    let body = hull_of_points(points.clone())?;
    let cfg = MetricConfig::body(body.clone())?;
    let distances = sigmas
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((i + 1, metric_d(s, &SparseVec::zero(), &cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    // a convex function peaks at a vertex
    let max_l1_norm = body
        .vertices()
        .iter()
        .map(l1_norm)
        .max()
        .expect("hull is nonempty");
    Ok(CounterexampleReport {
        m,
        points,
        distances,
        max_l1_norm,
    })
}
