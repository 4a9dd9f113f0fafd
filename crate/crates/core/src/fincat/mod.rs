//! Finite categories, functors between them, natural transformations and
//! brute-force (co)limit search.

mod category;
mod cone;
mod filtered;
mod functor;

pub use category::{
    validate_category, validate_category_with, CategoryData, FinCategory, Limits, MorId, Morphism,
    ObjId, ValidationReport, Violation, CORPUS_LIMITS,
};
pub use cone::{
    cones_at, factorizations, shapes, universal_cocone_search, universal_cone_search, Cone,
};
pub use filtered::{is_cofiltered, CofilteredFailure, Cofilteredness};
pub use functor::{
    enumerate_nat_transfs, is_fully_faithful, validate_functor, FinFunctor, FullyFaithful,
    HomMapFailure, NatTransf,
};
