//! Presheaves with finite values, the Yoneda embedding, categories of
//! elements and pointwise (co)limits.

mod core;
mod density;
mod elements;
mod enumerate;
mod limits;
mod search;
mod yoneda;

pub use self::core::{NaturalityFailure, Presheaf, PresheafMorphism};
pub use density::{density_check, IsoWitness};
pub use elements::{category_of_elements, ElementsCategory};
pub use enumerate::{count_presheaves, enumerate_presheaves, for_each_presheaf};
pub use limits::{
    presheaf_colimit, presheaf_limit, verify_colimit, verify_limit, PresheafColimit,
    PresheafDiagram, PresheafLimit, LIMIT_ELEMENT_CAP,
};
pub use search::{
    count_morphisms, dedupe_isomorphic, enumerate_morphisms, find_iso, is_isomorphic,
};
pub(crate) use yoneda::yoneda_morphism_between;
pub use yoneda::{yoneda_backward, yoneda_embed, yoneda_forward, yoneda_morphism};
