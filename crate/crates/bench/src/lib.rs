//! Deterministic fixtures for the criterion benchmarks in `benches/`.

use wstar_core::geometry::Polyhedron;
use wstar_core::numerics::{Rational, SparseVec};

/// `count` points in coordinates `0..dims`, spread by a fixed linear
/// congruence, scaled into the unit ℓ¹ ball.
pub fn scattered_points(count: usize, dims: usize) -> Vec<SparseVec> {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as i64
    };
    (0..count)
        .map(|_| {
            let v =
                SparseVec::from_entries((0..dims).map(|k| (k, Rational::new(next() % 17 - 8, 8))));
            let norm = wstar_core::numerics::l1_norm(&v);
            if norm > Rational::one() {
                v.scale(&norm.recip())
            } else {
                v
            }
        })
        .collect()
}

pub fn scattered_polytope(count: usize, dims: usize) -> Polyhedron {
    Polyhedron::polytope(scattered_points(count, dims)).expect("count is positive")
}
