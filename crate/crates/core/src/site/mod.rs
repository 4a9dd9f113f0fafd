//! Sites on finite categories: sieve topologies, sheaves, sheafification and
//! strict epimorphic families.

mod continuity;
mod plus;
mod sheaf;
mod sieve;
mod strict;
mod topology;

pub use continuity::{is_continuous, Continuity, ContinuityFailure};
pub use plus::{
    epsilon, epsilon_functor, plus_construction, plus_map, sheafify, sheafify_map, EpsilonFunctor,
    PlusConstruction, SheafificationResult,
};
pub use sheaf::{
    compatible_families, is_sheaf, is_sheaf_coverform, SheafFailure, SheafVerdict, FAMILY_CAP,
};
pub use sieve::{
    all_sieves, generated_sieve, is_sieve, maximal_sieve, pullback_sieve, Sieve,
    MAX_SITE_MORPHISMS, SIEVE_CAP,
};
pub use strict::{
    canonical_pretopology, canonical_site, is_strict_epi_family, is_subcanonical,
    is_universal_strict_epi, HomSets, StrictEpi, StrictEpiFailure, Subcanonicity,
    UniversalStrictEpi, FAMILY_SCAN_CAP,
};
pub use topology::{generate_topology, Cover, Site, TopologyExport};
