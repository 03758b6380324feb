use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("empty set: hypersets are nonempty by definition")]
    EmptySet,
    #[error("input has recession rays but a bounded set is required")]
    UnboundedInput,
    #[error("point lies outside the normalizing set of the metric")]
    NotInNormalizingSet,
    #[error("point is not an extreme point of the polytope")]
    NotAVertex,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(
        "target vertex #{index} has l1 norm {norm}, outside the polar ball of radius {radius}"
    )]
    TargetOutsidePolar {
        index: usize,
        norm: Box<Rational>,
        radius: Box<Rational>,
    },
    #[error("variant precondition violated: {0}")]
    VariantPreconditionViolated(String),
    #[error("sequence is not nested: a vertex of set #{0} is missing from set #{next}", next = .0 + 1)]
    NotNested(usize),
    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
