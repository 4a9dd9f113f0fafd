//! Cocontinuous extension along Yoneda, its right adjoint and flatness.

mod adjoint;
mod extension;
mod flat;
mod geometric;

pub use adjoint::{
    adjunction_phi, hom_composite, phi_backward, phi_forward, phi_natural_in_presheaf,
    phi_natural_in_target, right_adjoint_hp, right_adjoint_map, AdjunctionBijection, RightAdjoint,
    Variance,
};
pub use extension::{
    check_functoriality, eta_iso, tilde_extend, tilde_extend_map, EtaIso, ExtendedObject,
    ExtensionResult, ExtensionSummary,
};
pub use flat::{
    flat_test_presheaves, has_finite_limits, is_flat_bounded, is_flat_bounded_with,
    is_flat_copresheaf, is_flat_setvalued, is_left_exact, left_exactness_failure, ExactnessFailure,
    FlatVerdict, LimitKind,
};
pub use geometric::{build_ell, direct_image_failure, DirectImageFailure, GeometricMorphismData};
