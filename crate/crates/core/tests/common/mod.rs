#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wstar_core::geometry::Polyhedron;
use wstar_core::numerics::{l1_norm, Rational, SparseVec};
use wstar_core::poulsen::Variant;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi), rng.gen_range(1..=8))
}

/// A vector supported in coordinates `0..dims` with 1 to 3 entries.
pub fn sparse(rng: &mut impl Rng, dims: usize, lo: i64, hi: i64) -> SparseVec {
    let nnz = rng.gen_range(1..=3);
    SparseVec::from_entries((0..nnz).map(|_| (rng.gen_range(0..dims), rational(rng, lo, hi))))
}

/// Rescales into the unit ℓ¹ ball when outside it.
fn into_unit_ball(v: SparseVec) -> SparseVec {
    let n = l1_norm(&v);
    if n > Rational::one() {
        v.scale(&n.recip())
    } else {
        v
    }
}

/// A target polytope for the construction: coordinates in `{0, …, 7}`, at
/// most 12 vertices, inside the unit polar, and meeting the variant's
/// sign and normalization requirements.
pub fn target(rng: &mut impl Rng, variant: Variant) -> Polyhedron {
    let count = rng.gen_range(1..=12);
    let pts = (0..count)
        .map(|_| match variant {
            Variant::Plain => into_unit_ball(sparse(rng, 8, -8, 8)),
            Variant::Positive => into_unit_ball(sparse(rng, 8, 0, 8)),
            Variant::StateSpace => {
                let v = sparse(rng, 8, 0, 8);
                if v.is_zero() {
                    SparseVec::basis(rng.gen_range(0..8))
                } else {
                    v.scale(&v.coordinate_sum().recip())
                }
            }
        })
        .collect();
    Polyhedron::polytope(pts).unwrap()
}

/// Up to `max` points in coordinates `0..dims`, entries in `[−2, 2]`.
pub fn point_list(rng: &mut impl Rng, dims: usize, max: usize) -> Vec<SparseVec> {
    let count = rng.gen_range(1..=max);
    (0..count)
        .map(|_| sparse(rng, dims, -16, 16).scale(&q(1, 8)))
        .collect()
}

/// A pair of polytopes; roughly a third of the pairs have equal hulls by
/// construction (the second adds interior points and reorders).
pub fn polytope_pair(rng: &mut impl Rng, dims: usize) -> (Polyhedron, Polyhedron) {
    let a = point_list(rng, dims, 6);
    let b = if rng.gen_range(0..3) == 0 {
        let mut b = a.clone();
        for _ in 0..rng.gen_range(0..3) {
            let w: Vec<Rational> = (0..a.len())
                .map(|_| Rational::from_int(rng.gen_range(0..4)))
                .collect();
            let total: Rational = w.iter().sum();
            if total.is_positive() {
                let w: Vec<Rational> = w.iter().map(|x| x / &total).collect();
                b.push(SparseVec::combination(w.iter().zip(&a)));
            }
        }
        b.reverse();
        b
    } else {
        point_list(rng, dims, 6)
    };
    (
        Polyhedron::polytope(a).unwrap(),
        Polyhedron::polytope(b).unwrap(),
    )
}

pub fn unit_ball_pair(rng: &mut impl Rng, dims: usize) -> (Polyhedron, Polyhedron) {
    let (p, q) = polytope_pair(rng, dims);
    let shrink = |p: Polyhedron| {
        Polyhedron::polytope(p.vertices().iter().cloned().map(into_unit_ball).collect()).unwrap()
    };
    (shrink(p), shrink(q))
}

/// An integer direction with entries in `[−4, 4]` on `0..dims`.
pub fn direction(rng: &mut impl Rng, dims: usize) -> SparseVec {
    SparseVec::from_entries((0..dims).map(|k| (k, Rational::from_int(rng.gen_range(-4..=4)))))
}
