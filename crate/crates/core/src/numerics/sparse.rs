use std::collections::btree_map;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// Finitely supported map from coordinate index to a nonzero rational.
///
/// Serves both roles of the dual pair: as a primal test functional `A`
/// (normed by [`sup_norm`]) and as a dual point `σ` (normed by [`l1_norm`]).
/// The empty vector is zero in both roles.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SparseVec {
    entries: BTreeMap<usize, Rational>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec::default()
    }

    /// The basis vector `e_k`.
    pub fn basis(k: usize) -> Self {
        Self::scaled_basis(k, Rational::one())
    }

    pub fn scaled_basis(k: usize, c: Rational) -> Self {
        Self::from_entries([(k, c)])
    }

    /// Zero values are dropped; repeated indices are summed.
    pub fn from_entries<I: IntoIterator<Item = (usize, Rational)>>(entries: I) -> Self {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (k, v) in entries {
            *map.entry(k).or_insert_with(Rational::zero) += v;
        }
        map.retain(|_, v| !v.is_zero());
        SparseVec { entries: map }
    }

    /// Dense helper: `values[k]` becomes coordinate `k`.
    pub fn from_dense(values: &[Rational]) -> Self {
        Self::from_entries(values.iter().cloned().enumerate())
    }

    pub fn get(&self, k: usize) -> Rational {
        self.entries.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get_ref(&self, k: usize) -> Option<&Rational> {
        self.entries.get(&k)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, usize, Rational> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self.entries.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> Self {
        self.axpy(&-Rational::one(), other)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: &Rational, other: &SparseVec) -> Self {
        let mut entries = self.entries.clone();
        for (&k, v) in &other.entries {
            let slot = entries.entry(k).or_insert_with(Rational::zero);
            *slot += &(alpha * v);
            if slot.is_zero() {
                entries.remove(&k);
            }
        }
        SparseVec { entries }
    }

    /// `Σ weights[i] · points[i]`.
    pub fn combination<'a, I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (&'a Rational, &'a SparseVec)>,
    {
        terms
            .into_iter()
            .fold(SparseVec::zero(), |acc, (w, p)| acc.axpy(w, p))
    }

    pub fn coordinate_sum(&self) -> Rational {
        self.entries.values().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.values().all(|v| v.is_positive())
    }
}

/// Union of the supports of a collection of vectors, sorted.
pub fn union_support<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> Vec<usize> {
    let mut set = BTreeSet::new();
    for v in vs {
        set.extend(v.support());
    }
    set.into_iter().collect()
}

/// The dual pairing `⟨A, σ⟩ = Σ_k A_k σ_k` over the intersection of supports.
pub fn pair(a: &SparseVec, sigma: &SparseVec) -> Rational {
    let (small, large) = if a.nnz() <= sigma.nnz() {
        (a, sigma)
    } else {
        (sigma, a)
    };
    let mut acc = Rational::zero();
    for (k, v) in small.iter() {
        if let Some(w) = large.get_ref(*k) {
            acc += &(v * w);
        }
    }
    acc
}

pub fn l1_norm(sigma: &SparseVec) -> Rational {
    sigma.iter().map(|(_, v)| v.abs()).sum()
}

pub fn sup_norm(a: &SparseVec) -> Rational {
    a.iter()
        .map(|(_, v)| v.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl Serialize for SparseVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.entries.iter())
    }
}

impl<'de> Deserialize<'de> for SparseVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<(usize, Rational)> = Vec::deserialize(deserializer)?;
        let mut entries = BTreeMap::new();
        for (k, v) in raw {
            if v.is_zero() {
                continue;
            }
            if entries.insert(k, v).is_some() {
                return Err(D::Error::custom(format!("duplicate coordinate index {k}")));
            }
        }
        Ok(SparseVec { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::super::strategies::{arb_rational, arb_sparse};
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(
            pair(&SparseVec::basis(3), &SparseVec::scaled_basis(3, q(5, 2))),
            q(5, 2)
        );
        let sigma = SparseVec::from_entries([(0, q(1, 2)), (1, q(-1, 4))]);
        assert_eq!(pair(&SparseVec::zero(), &sigma), Rational::zero());
        let a = SparseVec::from_entries([(0, q(1, 1)), (1, q(2, 1))]);
        assert_eq!(pair(&a, &sigma), Rational::zero());
    }

    #[test]
    fn norm_examples() {
        let s = SparseVec::from_entries([(0, q(3, 1)), (1, q(-2, 1))]);
        assert_eq!(l1_norm(&s), q(5, 1));
        let a = SparseVec::from_entries([(0, q(1, 1)), (1, q(2, 1))]);
        assert_eq!(sup_norm(&a), q(2, 1));
        assert_eq!(l1_norm(&SparseVec::zero()), Rational::zero());
        assert_eq!(sup_norm(&SparseVec::zero()), Rational::zero());
    }

    #[test]
    fn zeros_are_not_stored() {
        let v = SparseVec::from_entries([(2, q(1, 1)), (2, q(-1, 1)), (4, q(0, 1))]);
        assert!(v.is_zero());
        let w = SparseVec::basis(1).sub(&SparseVec::basis(1));
        assert_eq!(w.nnz(), 0);
    }

    #[test]
    fn serialized_form() {
        let v = SparseVec::from_entries([(5, q(-3, 4)), (0, q(5, 1))]);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[[0,"5/1"],[5,"-3/4"]]"#
        );
        assert!(serde_json::from_str::<SparseVec>(r#"[[0,"1/1"],[0,"2/1"]]"#).is_err());
    }

    proptest! {
        #[test]
        fn pairing_is_bilinear(a in arb_sparse(), s in arb_sparse(), t in arb_sparse(),
                               alpha in arb_rational(), beta in arb_rational()) {
            let lhs = pair(&a, &s.scale(&alpha).add(&t.scale(&beta)));
            let rhs = &alpha * pair(&a, &s) + &beta * pair(&a, &t);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn holder_inequality(a in arb_sparse(), s in arb_sparse()) {
            prop_assert!(pair(&a, &s).abs() <= sup_norm(&a) * l1_norm(&s));
        }

        #[test]
        fn serialization_round_trip(v in arb_sparse()) {
            let text = serde_json::to_string(&v).unwrap();
            let back: SparseVec = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }
}
