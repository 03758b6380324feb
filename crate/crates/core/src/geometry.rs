//! V-representation polyhedra over the sparse dual model.
//!
//! Every geometric query (membership, redundancy, separation) is answered by
//! an exact LP on the generators; no H-representation is ever built.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    l1_norm, lp_solve, pair, union_support, ExtRational, LpProblem, Rational, Relation, Sense,
    SparseVec,
};

/// A finite nonempty set of dual points, duplicates removed (first
/// occurrence order kept).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<SparseVec>,
}

impl PointSet {
    pub fn new(points: Vec<SparseVec>) -> Result<Self> {
        let points = dedup(points);
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(PointSet { points })
    }

    pub fn singleton(p: SparseVec) -> Self {
        PointSet { points: vec![p] }
    }

    pub fn points(&self) -> &[SparseVec] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &SparseVec) -> bool {
        self.points.contains(p)
    }

    pub fn into_points(self) -> Vec<SparseVec> {
        self.points
    }
}

/// A convex weak*-closed set as `conv(vertices) + cone(rays)`.
///
/// `irredundant` is only ever set by [`closed_convex_hull`]; hand-built
/// polyhedra may list interior points as vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    vertices: Vec<SparseVec>,
    rays: Vec<SparseVec>,
    irredundant: bool,
}

impl Polyhedron {
    pub fn new(vertices: Vec<SparseVec>, rays: Vec<SparseVec>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptySet);
        }
        if rays.iter().any(SparseVec::is_zero) {
            return Err(Error::BadParameter("recession rays must be nonzero".into()));
        }
        Ok(Polyhedron {
            vertices: dedup(vertices),
            rays: dedup(rays),
            irredundant: false,
        })
    }

    pub fn polytope(vertices: Vec<SparseVec>) -> Result<Self> {
        Self::new(vertices, Vec::new())
    }

    pub fn point(p: SparseVec) -> Self {
        Polyhedron {
            vertices: vec![p],
            rays: Vec::new(),
            irredundant: true,
        }
    }

    pub fn vertices(&self) -> &[SparseVec] {
        &self.vertices
    }

    pub fn rays(&self) -> &[SparseVec] {
        &self.rays
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn is_irredundant(&self) -> bool {
        self.irredundant
    }

    pub fn ensure_bounded(&self) -> Result<()> {
        if self.is_bounded() {
            Ok(())
        } else {
            Err(Error::UnboundedInput)
        }
    }

    /// Largest coordinate index used by any generator.
    pub fn max_index(&self) -> Option<usize> {
        self.vertices
            .iter()
            .chain(&self.rays)
            .filter_map(SparseVec::max_index)
            .max()
    }
}

impl From<&PointSet> for Polyhedron {
    fn from(ps: &PointSet) -> Self {
        Polyhedron {
            vertices: ps.points.clone(),
            rays: Vec::new(),
            irredundant: ps.len() == 1,
        }
    }
}

/// Either kind of hyperset element the toolkit operates on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedSet {
    Points(PointSet),
    Polyhedron(Polyhedron),
}

impl ClosedSet {
    pub fn generators(&self) -> &[SparseVec] {
        match self {
            ClosedSet::Points(p) => p.points(),
            ClosedSet::Polyhedron(p) => p.vertices(),
        }
    }

    pub fn rays(&self) -> &[SparseVec] {
        match self {
            ClosedSet::Points(_) => &[],
            ClosedSet::Polyhedron(p) => p.rays(),
        }
    }
}

impl From<PointSet> for ClosedSet {
    fn from(p: PointSet) -> Self {
        ClosedSet::Points(p)
    }
}

impl From<Polyhedron> for ClosedSet {
    fn from(p: Polyhedron) -> Self {
        ClosedSet::Polyhedron(p)
    }
}

/// The closed ℓ¹ ball of the given radius: the absolute polar of the open
/// sup-norm ball of radius `1/radius` in the finitely supported sequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarSpec {
    radius: Rational,
}

impl PolarSpec {
    pub fn new(radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::BadParameter(format!(
                "polar radius must be positive, got {radius}"
            )));
        }
        Ok(PolarSpec { radius })
    }

    pub fn unit() -> Self {
        PolarSpec {
            radius: Rational::one(),
        }
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }
}

/// Image of a set under `σ ↦ ⟨A, σ⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarSet {
    /// Nonempty, strictly increasing.
    FinitePoints(Vec<Rational>),
    Interval {
        lower: ExtRational,
        upper: ExtRational,
    },
}

fn dedup(items: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut seen = std::collections::HashSet::new();
    items
        .into_iter()
        .filter(|v| seen.insert(v.clone()))
        .collect()
}

/// Is `sigma ∈ conv(vertices) + cone(rays)`? Empty `vertices` means the
/// empty set.
pub(crate) fn in_hull(sigma: &SparseVec, vertices: &[SparseVec], rays: &[SparseVec]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    if vertices.contains(sigma) {
        return true;
    }
    let coords = union_support(vertices.iter().chain(rays).chain(std::iter::once(sigma)));
    let gen_coords = union_support(vertices.iter().chain(rays));
    if sigma
        .support()
        .any(|k| gen_coords.binary_search(&k).is_err())
    {
        return false;
    }
    let nv = vertices.len();
    let mut lp = LpProblem::new(SparseVec::zero());
    for j in 0..nv + rays.len() {
        lp.set_nonneg(j);
    }
    for &k in &coords {
        let row = SparseVec::from_entries(
            vertices
                .iter()
                .chain(rays)
                .enumerate()
                .map(|(j, g)| (j, g.get(k))),
        );
        lp.add_row(row, Relation::Eq, sigma.get(k));
    }
    lp.add_row(
        SparseVec::from_entries((0..nv).map(|j| (j, Rational::one()))),
        Relation::Eq,
        Rational::one(),
    );
    !lp_solve(&lp, Sense::Minimize).is_infeasible()
}

/// Is `r ∈ cone(rays)`?
pub(crate) fn in_cone(r: &SparseVec, rays: &[SparseVec]) -> bool {
    if r.is_zero() {
        return true;
    }
    if rays.is_empty() {
        return false;
    }
    let coords = union_support(rays.iter().chain(std::iter::once(r)));
    let mut lp = LpProblem::new(SparseVec::zero());
    for j in 0..rays.len() {
        lp.set_nonneg(j);
    }
    for &k in &coords {
        let row = SparseVec::from_entries(rays.iter().enumerate().map(|(j, g)| (j, g.get(k))));
        lp.add_row(row, Relation::Eq, r.get(k));
    }
    !lp_solve(&lp, Sense::Minimize).is_infeasible()
}

/// Maximizes `δ` subject to `⟨A, target⟩ − ⟨A, w⟩ ≥ δ` for every `w` in
/// `others`, with `A` confined to the box `[−1, 1]` on the coordinates where
/// the differences live. Returns `(A, δ)`; `others` must be nonempty.
pub(crate) fn max_margin_functional(
    target: &SparseVec,
    others: &[SparseVec],
) -> (SparseVec, Rational) {
    assert!(
        !others.is_empty(),
        "margin LP needs at least one competitor"
    );
    let diffs: Vec<SparseVec> = others.iter().map(|w| target.sub(w)).collect();
    let coords = union_support(&diffs);
    let delta = coords.len();
    let mut lp = LpProblem::new(SparseVec::basis(delta));
    // All rows are `≤` with nonnegative right-hand sides: the origin is a
    // feasible basis and no phase 1 is needed.
    for d in &diffs {
        let mut row: Vec<(usize, Rational)> = coords
            .iter()
            .enumerate()
            .map(|(i, &k)| (i, -d.get(k)))
            .collect();
        row.push((delta, Rational::one()));
        lp.add_row(SparseVec::from_entries(row), Relation::Le, Rational::zero());
    }
    for i in 0..coords.len() {
        lp.add_row(SparseVec::basis(i), Relation::Le, Rational::one());
        lp.add_row(
            SparseVec::scaled_basis(i, -Rational::one()),
            Relation::Le,
            Rational::one(),
        );
    }
    match lp_solve(&lp, Sense::Maximize) {
        crate::numerics::LpOutcome::Optimal { value, point } => {
            let a =
                SparseVec::from_entries(coords.iter().enumerate().map(|(i, &k)| (k, point.get(i))));
            (a, value)
        }
        other => unreachable!("margin LP is feasible and bounded, got {other:?}"),
    }
}

fn reduce_rays(rays: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut kept = dedup(rays);
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<SparseVec> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if in_cone(&kept[i], &others) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

fn reduce_vertices(vertices: Vec<SparseVec>, rays: &[SparseVec]) -> Vec<SparseVec> {
    let vertices = dedup(vertices);
    if rays.is_empty() {
        // Distinct points: extreme iff outside the hull of all the others.
        let keep: Vec<bool> = (0..vertices.len())
            .into_par_iter()
            .map(|i| {
                let others: Vec<SparseVec> = vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, v)| v.clone())
                    .collect();
                !in_hull(&vertices[i], &others, rays)
            })
            .collect();
        return vertices
            .into_iter()
            .zip(keep)
            .filter_map(|(v, k)| k.then_some(v))
            .collect();
    }
    // With rays, redundancy is relative to what is kept, so go in order.
    let mut kept = vertices;
    let mut i = 0;
    while i < kept.len() && kept.len() > 1 {
        let others: Vec<SparseVec> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if in_hull(&kept[i], &others, rays) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// `co(F)` as an irredundant V-representation.
pub fn closed_convex_hull(set: &ClosedSet) -> Polyhedron {
    let rays = reduce_rays(set.rays().to_vec());
    let vertices = reduce_vertices(set.generators().to_vec(), &rays);
    Polyhedron {
        vertices,
        rays,
        irredundant: true,
    }
}

pub fn hull_of_points(points: Vec<SparseVec>) -> Result<Polyhedron> {
    Ok(closed_convex_hull(&ClosedSet::Points(PointSet::new(
        points,
    )?)))
}

/// The extreme points of `P`, in generator order.
pub fn irredundant_vertices(p: &Polyhedron) -> PointSet {
    if p.irredundant {
        return PointSet {
            points: p.vertices.clone(),
        };
    }
    let rays = reduce_rays(p.rays.clone());
    PointSet {
        points: reduce_vertices(p.vertices.clone(), &rays),
    }
}

pub fn membership(sigma: &SparseVec, p: &Polyhedron) -> bool {
    in_hull(sigma, &p.vertices, &p.rays)
}

/// `h_P(A) = sup_{σ∈P} ⟨A, σ⟩`.
pub fn support_value(p: &Polyhedron, a: &SparseVec) -> ExtRational {
    if p.rays.iter().any(|r| pair(a, r).is_positive()) {
        return ExtRational::PosInf;
    }
    let best = p
        .vertices
        .iter()
        .map(|v| pair(a, v))
        .max()
        .expect("polyhedra are nonempty");
    ExtRational::Finite(best)
}

pub fn scalar_image(set: &ClosedSet, a: &SparseVec) -> ScalarSet {
    match set {
        ClosedSet::Points(ps) => {
            let mut vals: Vec<Rational> = ps.points().iter().map(|p| pair(a, p)).collect();
            vals.sort();
            vals.dedup();
            ScalarSet::FinitePoints(vals)
        }
        ClosedSet::Polyhedron(p) => ScalarSet::Interval {
            lower: support_value(p, &a.neg()).neg(),
            upper: support_value(p, a),
        },
    }
}

pub fn recession_rays(p: &Polyhedron) -> Vec<SparseVec> {
    if p.irredundant {
        return p.rays.clone();
    }
    reduce_rays(p.rays.clone())
}

/// `f(λ) = (1−λ)P + λQ` (Minkowski combination) for bounded `P`, `Q`.
pub fn path_combine(lambda: &Rational, p: &Polyhedron, q: &Polyhedron) -> Result<Polyhedron> {
    if lambda.is_negative() || *lambda > Rational::one() {
        return Err(Error::BadParameter(format!(
            "path parameter must lie in [0, 1], got {lambda}"
        )));
    }
    p.ensure_bounded()?;
    q.ensure_bounded()?;
    let mu = Rational::one() - lambda;
    let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for s in &p.vertices {
        for t in &q.vertices {
            pts.push(s.scale(&mu).axpy(lambda, t));
        }
    }
    hull_of_points(pts)
}

pub fn polar_contains(sigma: &SparseVec, polar: &PolarSpec) -> bool {
    l1_norm(sigma) <= polar.radius
}
