//! JSON documents for sets and metric configurations. Rationals are
//! `"num/den"` strings and vectors are `[[index, "num/den"], …]`, so every
//! document round-trips byte for byte.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ClosedSet, PointSet, PolarSpec, Polyhedron};
use crate::hypermetrics::{MetricConfig, NormalizingSet, TestFunctionals};
use crate::numerics::{Rational, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    /// A finite point set, not convexified.
    Points,
    /// `conv(points) + cone(rays)`.
    Polyhedron,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDocument {
    pub kind: SetKind,
    pub points: Vec<SparseVec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rays: Vec<SparseVec>,
}

impl SetDocument {
    pub fn to_closed_set(&self) -> Result<ClosedSet> {
        match self.kind {
            SetKind::Points => {
                if !self.rays.is_empty() {
                    return Err(Error::Document("a point set cannot carry rays".into()));
                }
                Ok(ClosedSet::Points(PointSet::new(self.points.clone())?))
            }
            SetKind::Polyhedron => Ok(ClosedSet::Polyhedron(self.to_polyhedron()?)),
        }
    }

    /// Either kind read as the convex set it generates.
    pub fn to_polyhedron(&self) -> Result<Polyhedron> {
        Polyhedron::new(self.points.clone(), self.rays.clone())
    }

    pub fn to_point_set(&self) -> Result<PointSet> {
        if !self.rays.is_empty() {
            return Err(Error::Document("expected a finite point set".into()));
        }
        PointSet::new(self.points.clone())
    }
}

impl From<&Polyhedron> for SetDocument {
    fn from(p: &Polyhedron) -> Self {
        SetDocument {
            kind: SetKind::Polyhedron,
            points: p.vertices().to_vec(),
            rays: p.rays().to_vec(),
        }
    }
}

impl From<&PointSet> for SetDocument {
    fn from(p: &PointSet) -> Self {
        SetDocument {
            kind: SetKind::Points,
            points: p.points().to_vec(),
            rays: Vec::new(),
        }
    }
}

impl From<&ClosedSet> for SetDocument {
    fn from(s: &ClosedSet) -> Self {
        match s {
            ClosedSet::Points(p) => p.into(),
            ClosedSet::Polyhedron(p) => p.into(),
        }
    }
}

/// On-disk form of a [`MetricConfig`]. Omitted fields take the defaults:
/// coordinate functionals and the unit polar.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfigDocument {
    /// Explicit test functionals `A_1, A_2, …`; absent means `A_n = e_{n−1}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<SparseVec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_radius: Option<Rational>,
    /// A bounded body used as the normalizing set instead of a polar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<SetDocument>,
}

impl MetricConfigDocument {
    pub fn to_config(&self) -> Result<MetricConfig> {
        let normalizing = match (&self.polar_radius, &self.body) {
            (Some(_), Some(_)) => {
                return Err(Error::Document(
                    "give either polar_radius or body, not both".into(),
                ))
            }
            (_, Some(body)) => {
                let b = body.to_polyhedron()?;
                b.ensure_bounded()?;
                NormalizingSet::Body(b)
            }
            (Some(r), None) => NormalizingSet::Polar(PolarSpec::new(r.clone())?),
            (None, None) => NormalizingSet::Polar(PolarSpec::unit()),
        };
        let functionals = match &self.functionals {
            None => TestFunctionals::CoordinateBasis,
            Some(list) => TestFunctionals::Explicit(list.clone()),
        };
        Ok(MetricConfig {
            functionals,
            normalizing,
        })
    }
}

impl From<&MetricConfig> for MetricConfigDocument {
    fn from(cfg: &MetricConfig) -> Self {
        let functionals = match &cfg.functionals {
            TestFunctionals::CoordinateBasis => None,
            TestFunctionals::Explicit(list) => Some(list.clone()),
        };
        let (polar_radius, body) = match &cfg.normalizing {
            NormalizingSet::Polar(p) => (Some(p.radius().clone()), None),
            NormalizingSet::Body(b) => (None, Some(b.into())),
        };
        MetricConfigDocument {
            functionals,
            polar_radius,
            body,
        }
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::strategies::arb_sparse;
    use proptest::prelude::*;

    #[test]
    fn set_document_format() {
        let text = r#"{"kind":"polyhedron","points":[[[0,"1/2"]],[]],"rays":[[[1,"1/1"]]]}"#;
        let doc: SetDocument = from_json(text).unwrap();
        let p = doc.to_polyhedron().unwrap();
        assert_eq!(p.rays(), &[SparseVec::basis(1)]);
        assert_eq!(serde_json::to_string(&doc).unwrap(), text);
        assert!(from_json::<SetDocument>(r#"{"kind":"points","points":[],"extra":1}"#).is_err());
        let empty: SetDocument = from_json(r#"{"kind":"points","points":[]}"#).unwrap();
        assert_eq!(empty.to_closed_set(), Err(Error::EmptySet));
    }

    #[test]
    fn metric_config_document() {
        let cfg = from_json::<MetricConfigDocument>("{}")
            .unwrap()
            .to_config()
            .unwrap();
        assert_eq!(cfg, MetricConfig::default());
        let cfg = from_json::<MetricConfigDocument>(r#"{"polar_radius":"3/2"}"#)
            .unwrap()
            .to_config()
            .unwrap();
        assert_eq!(cfg.normalizer(&SparseVec::basis(4)), Rational::new(3, 2));
        let both = r#"{"polar_radius":"1/1","body":{"kind":"points","points":[[]]}}"#;
        assert!(from_json::<MetricConfigDocument>(both)
            .unwrap()
            .to_config()
            .is_err());
        let doc = MetricConfigDocument::from(&cfg);
        assert_eq!(doc.to_config().unwrap(), cfg);
    }

    proptest! {
        #[test]
        fn set_round_trip(points in proptest::collection::vec(arb_sparse(), 1..5),
                          rays in proptest::collection::vec(arb_sparse(), 0..3)) {
            let rays: Vec<SparseVec> = rays.into_iter().filter(|r| !r.is_zero()).collect();
            let p = Polyhedron::new(points, rays).unwrap();
            let doc = SetDocument::from(&p);
            let text = to_json(&doc);
            let back: SetDocument = from_json(&text).unwrap();
            prop_assert_eq!(back.to_polyhedron().unwrap(), p);
            prop_assert_eq!(to_json(&back), text);
        }
    }
}
