//! Finite presented categories, functors and natural transformations with
//! law checking, plus pullbacks and pushouts of finite sets.
//!
//! Categories are given by generators: named objects, a multigraph of
//! weighted morphisms, implicit identities, and composition as path
//! concatenation. A category is either free on its graph or thin, which
//! decides when two parallel composites count as equal. Law checks
//! quantify over generators and composable generator pairs and never look
//! at weights.

mod category;
mod finset;
mod functor;
mod natural;

use std::fmt;

use thiserror::Error;

pub use category::{
    CompositionMode, FiniteCategory, Morphism, MorphismId, Object, ObjectId, Path, Payload,
};
pub use finset::{finset_pullback, finset_pushout, FinSet, FinSetMap, Pullback, Pushout, Side};
pub use functor::{check_functor_laws, Functor};
pub use natural::{check_naturality, NaturalTransformation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatError {
    #[error("object `{0}` already exists")]
    DuplicateName(String),
    #[error("no object named `{0}`")]
    NotFound(String),
    #[error("morphism endpoint {0} does not exist")]
    DanglingEndpoint(ObjectId),
    #[error("unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("unknown morphism {0}")]
    UnknownMorphism(MorphismId),
    #[error("object `{0}` carries no amount payload")]
    PayloadMismatch(String),
    #[error("cannot compose: path ends at {left_dst} but next starts at {right_src}")]
    NotComposable {
        left_dst: ObjectId,
        right_src: ObjectId,
    },
    #[error("maps do not share a codomain")]
    CodomainMismatch,
    #[error("maps do not share a domain")]
    DomainMismatch,
    #[error("invalid finite-set map: {0}")]
    InvalidMap(String),
}

/// One failed law instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    UnmappedObject(ObjectId),
    UnmappedMorphism(MorphismId),
    /// The image of a generator is not a well-formed path in the target.
    InvalidImage(MorphismId),
    EndpointMismatch(MorphismId),
    IdentityNotPreserved(ObjectId),
    CompositionNotPreserved {
        first: MorphismId,
        second: MorphismId,
    },
    MismatchedFunctors,
    ComponentMissing(ObjectId),
    InvalidComponent(ObjectId),
    ComponentEndpoint(ObjectId),
    NaturalityFailure(MorphismId),
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnmappedObject(o) => write!(f, "object {o} has no image"),
            Self::UnmappedMorphism(m) => write!(f, "morphism {m} has no image"),
            Self::InvalidImage(m) => write!(f, "image of {m} is not a path in the target"),
            Self::EndpointMismatch(m) => write!(f, "image of {m} has incoherent endpoints"),
            Self::IdentityNotPreserved(o) => write!(f, "identity on {o} not sent to an identity"),
            Self::CompositionNotPreserved { first, second } => {
                write!(f, "composite {second}∘{first} not preserved")
            }
            Self::MismatchedFunctors => f.write_str("functors have different source or target"),
            Self::ComponentMissing(o) => write!(f, "no component at {o}"),
            Self::InvalidComponent(o) => write!(f, "component at {o} is not a path in the target"),
            Self::ComponentEndpoint(o) => write!(f, "component at {o} is not F({o}) → G({o})"),
            Self::NaturalityFailure(m) => write!(f, "naturality square for {m} does not commute"),
        }
    }
}

/// Outcome of a law check: how many instances were examined and which failed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checks: usize,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: LawReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
    }
}
