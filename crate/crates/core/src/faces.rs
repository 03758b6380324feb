use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    irredundant_vertices, max_margin_functional, ClosedSet, PointSet, Polyhedron,
};
use crate::hypermetrics::{pseudometric_dh, weighted_distance, MetricConfig};
use crate::numerics::{pair, ExtRational, Rational, SparseVec};

/// A functional attaining its unique maximum over a vertex set at `vertex`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExposureCertificate {
    pub vertex: SparseVec,
    pub functional: SparseVec,
    /// `min_w ⟨A, vertex⟩ − ⟨A, w⟩` over the other vertices; `1` for a
    /// singleton.
    pub margin: Rational,
}

impl ExposureCertificate {
    /// Recomputes the margin against `vertices` by direct pairing. `None`
    /// when `vertex` is not listed or the margin is not positive.
    pub fn verify(&self, vertices: &[SparseVec]) -> Option<Rational> {
        if !vertices.contains(&self.vertex) {
            return None;
        }
        let top = pair(&self.functional, &self.vertex);
        let margin = vertices
            .iter()
            .filter(|w| **w != self.vertex)
            .map(|w| &top - &pair(&self.functional, w))
            .min()
            .unwrap_or_else(Rational::one);
        margin.is_positive().then_some(margin)
    }

    /// Checks that the recorded margin is reproduced exactly.
    pub fn is_valid_for(&self, vertices: &[SparseVec]) -> bool {
        self.verify(vertices).as_ref() == Some(&self.margin)
    }
}

pub(crate) fn certificate_against(vertex: &SparseVec, others: &[SparseVec]) -> ExposureCertificate {
    if others.is_empty() {
        return ExposureCertificate {
            vertex: vertex.clone(),
            functional: SparseVec::zero(),
            margin: Rational::one(),
        };
    }
    let (functional, _) = max_margin_functional(vertex, others);
    let top = pair(&functional, vertex);
    let margin = others
        .iter()
        .map(|w| &top - &pair(&functional, w))
        .min()
        .expect("others is nonempty");
    ExposureCertificate {
        vertex: vertex.clone(),
        functional,
        margin,
    }
}

/// Margin-maximizing exposing functional for a vertex of a polytope, with
/// `A` confined to `[−1, 1]` per coordinate.
pub fn exposure_certificate(p: &Polyhedron, v: &SparseVec) -> Result<ExposureCertificate> {
    p.ensure_bounded()?;
    let verts = irredundant_vertices(p).into_points();
    if !verts.contains(v) {
        return Err(Error::NotAVertex);
    }
    let others: Vec<SparseVec> = verts.into_iter().filter(|w| w != v).collect();
    let cert = certificate_against(v, &others);
    if !cert.margin.is_positive() {
        return Err(Error::NotAVertex);
    }
    Ok(cert)
}

/// One certificate per extreme point, in vertex order.
pub fn exposed_all(p: &Polyhedron) -> Result<Vec<ExposureCertificate>> {
    p.ensure_bounded()?;
    let verts = irredundant_vertices(p).into_points();
    Ok(verts
        .par_iter()
        .map(|v| {
            let others: Vec<SparseVec> = verts.iter().filter(|w| *w != v).cloned().collect();
            certificate_against(v, &others)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationEstimate {
    /// Exact `min_v d(σ, v)` at the best sampled `σ`.
    pub lower: Rational,
    /// `max_{v,w} d(v, w)` over extreme points.
    pub upper: Rational,
    pub argmax: SparseVec,
    pub samples: usize,
}

impl DeviationEstimate {
    /// `P ∈ ℱ_m` is certified once the sampled lower bound reaches `1/m`.
    pub fn certifies_m(&self, m: u64) -> bool {
        m > 0 && self.lower >= Rational::new(1, m as i64)
    }

    /// Smallest `m` certified by the lower bound, if any.
    pub fn smallest_certified_m(&self) -> Option<u64> {
        if !self.lower.is_positive() {
            return None;
        }
        let inv = self.lower.recip();
        let q = inv.numer() / inv.denom();
        let q = if inv.is_integer() { q } else { q + 1 };
        u64::try_from(q).ok()
    }
}

/// Deterministic sample stream: the barycenter, then random convex
/// combinations with small integer weights. Prefixes agree across budgets.
fn deviation_samples(verts: &[SparseVec], budget: usize, seed: u64) -> Vec<SparseVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = verts.len();
    let mut out = Vec::with_capacity(budget);
    if budget == 0 {
        return out;
    }
    let bary = Rational::new(1, n as i64);
    out.push(SparseVec::combination(verts.iter().map(|v| (&bary, v))));
    while out.len() < budget {
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let coeffs: Vec<Rational> = weights.iter().map(|&w| Rational::new(w, total)).collect();
        out.push(SparseVec::combination(coeffs.iter().zip(verts)));
    }
    out
}

/// Sandwich estimate of `sup_{σ∈P} min_{v∈ℰ(P)} d(σ, v)`.
pub fn extreme_deviation(
    p: &Polyhedron,
    cfg: &MetricConfig,
    budget: usize,
    seed: u64,
) -> Result<DeviationEstimate> {
    p.ensure_bounded()?;
    let verts = irredundant_vertices(p).into_points();
    if !verts.iter().all(|v| cfg.contains(v)) {
        return Err(Error::NotInNormalizingSet);
    }
    let nearest = |s: &SparseVec| {
        verts
            .iter()
            .map(|v| weighted_distance(s, v, cfg))
            .min()
            .expect("polytopes are nonempty")
    };
    let samples = deviation_samples(&verts, budget, seed);
    let scored: Vec<Rational> = samples.par_iter().map(nearest).collect();
    let (lower, argmax) = scored
        .iter()
        .zip(&samples)
        // first maximal sample wins, so the answer is order-stable
        .fold(
            (Rational::zero(), verts[0].clone()),
            |(best, arg), (d, s)| {
                if *d > best {
                    (d.clone(), s.clone())
                } else {
                    (best, arg)
                }
            },
        );
    let upper = verts
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            verts[i + 1..]
                .iter()
                .map(|w| weighted_distance(v, w, cfg))
                .max()
                .unwrap_or_else(Rational::zero)
        })
        .reduce(Rational::zero, Rational::max_of);
    Ok(DeviationEstimate {
        lower,
        upper,
        argmax,
        samples: samples.len(),
    })
}

/// Rational point `((1−t²)/(1+t²), 2t/(1+t²))` on the unit circle.
fn circle_point(t: &Rational) -> (Rational, Rational) {
    let t2 = t * t;
    let den = Rational::one() + &t2;
    (
        (Rational::one() - &t2) / &den,
        (t * Rational::from_int(2)) / den,
    )
}

fn planar(x: Rational, y: Rational) -> SparseVec {
    SparseVec::from_entries([(0, x), (1, y)])
}

/// Polytope on `n` rational points of the stadium `co(D(−1,0) ∪ D(1,0))` in
/// coordinates `{0, 1}`: `n/2` points on each outer half circle, including
/// the four tangency points `(±1, ±1)`.
pub fn stadium_family(n: usize) -> Result<Polyhedron> {
    if n < 8 || n % 2 == 1 {
        return Err(Error::BadParameter(format!(
            "stadium needs an even point count of at least 8, got {n}"
        )));
    }
    let per_side = n / 2;
    let step = Rational::new(2, per_side as i64 - 1);
    let mut pts = Vec::with_capacity(n);
    for i in 0..per_side {
        // t ∈ [−1, 1] sweeps the half circle between the tangency points.
        let t = Rational::from_int(-1) + &step * Rational::from_int(i as i64);
        let (c, s) = circle_point(&t);
        pts.push(planar(Rational::one() + &c, s.clone()));
        pts.push(planar(-Rational::one() - c, s));
    }
    Polyhedron::polytope(pts)
}

/// Rational approximation of `tan(θ/2)` with denominator `2^bits`.
fn rational_tan_half(theta: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let num = ((theta / 2.0).tan() * scale).round() as i64;
    Rational::new(num, 1i64 << bits)
}

/// The regular `2^k`-gon with one vertex at `(1, 0)`, every vertex exactly on
/// the unit circle.
pub fn regular_polygon(k: u32) -> Result<Polyhedron> {
    if !(2..=16).contains(&k) {
        return Err(Error::BadParameter(format!(
            "polygon exponent must be in 2..=16, got {k}"
        )));
    }
    let n = 1usize << k;
    let per_octant = n / 8;
    // angles 2πj/n for j in [0, n/8], then their mirror images in the
    // diagonal; the diagonal point itself and the image of (1, 0) are skipped
    let octant: Vec<(Rational, Rational)> = (0..=per_octant)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            circle_point(&rational_tan_half(theta, 24))
        })
        .collect();
    let mut quadrant = octant.clone();
    for (c, s) in octant[1..per_octant.max(1)].iter().rev() {
        quadrant.push((s.clone(), c.clone()));
    }
    let mut pts = Vec::with_capacity(4 * quadrant.len());
    for (c, s) in &quadrant {
        pts.push(planar(c.clone(), s.clone()));
        pts.push(planar(-s.clone(), c.clone()));
        pts.push(planar(-c.clone(), -s.clone()));
        pts.push(planar(s.clone(), -c.clone()));
    }
    let p = Polyhedron::polytope(pts)?;
    debug_assert_eq!(p.vertices().len(), n);
    Ok(p)
}

/// A random unit direction in coordinates `{0, 1}`; `A` and `−A` induce the
/// same pseudometric, so half circle parameters suffice.
pub fn random_planar_direction(rng: &mut impl Rng) -> SparseVec {
    let t = Rational::new(rng.gen_range(-1000..=1000), 1000);
    let (c, s) = circle_point(&t);
    planar(c, s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyRow {
    pub k: u32,
    pub vertices: usize,
    /// `max_A d_H^(A)(P_k, ℰ(P_k))` over the sampled directions.
    pub max_distance: Rational,
    pub best_direction: SparseVec,
    /// `max_distance(k−1) / max_distance(k)`; absent on the first row.
    pub ratio: Option<Rational>,
}

/// Distance between each regular `2^k`-gon and its own vertex set, maximized
/// over `directions` seeded random directions, for `k` in `ks`.
pub fn polygon_degeneracy_sweep(
    ks: std::ops::RangeInclusive<u32>,
    directions: usize,
    seed: u64,
) -> Result<Vec<DegeneracyRow>> {
    let mut rows: Vec<DegeneracyRow> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in ks {
        let poly = regular_polygon(k)?;
        let hull: ClosedSet = poly.clone().into();
        let verts: ClosedSet = PointSet::new(poly.vertices().to_vec())?.into();
        let dirs: Vec<SparseVec> = (0..directions)
            .map(|_| random_planar_direction(&mut rng))
            .collect();
        let mut best = (Rational::zero(), SparseVec::zero());
        for a in dirs {
            let d = match pseudometric_dh(&hull, &verts, &a) {
                ExtRational::Finite(d) => d,
                other => unreachable!("bounded sets have finite pseudodistance, got {other}"),
            };
            if d > best.0 {
                best = (d, a);
            }
        }
        let ratio = rows
            .last()
            .filter(|_| best.0.is_positive())
            .map(|prev| &prev.max_distance / &best.0);
        rows.push(DegeneracyRow {
            k,
            vertices: poly.vertices().len(),
            max_distance: best.0,
            best_direction: best.1,
            ratio,
        });
    }
    Ok(rows)
}
