//! Concrete ontological models, each built together with the fragment it
//! models.

mod bell;
mod beltrametti_bugajski;
mod kochen_specker;
mod ppm;
mod spekkens;

pub use bell::{abcl_model, bell_model, qubit_zx_fragment, random_basis_fragment, AbclModel};
pub use beltrametti_bugajski::{beltrametti_bugajski, maximally_mixed_decompositions, Decomposition};
pub use kochen_specker::{
    ks_born_quadrature, ks_density, ks_response, ks_restricted_quadrature, BlochVector, KsQubitModel, Quadrature,
    QuadratureResult,
};
pub use ppm::{ppm_fragment, ppm_natural_model, ppm_phi, ppm_phi_vector, ppm_psi_vector, PPM_PSI};
pub use spekkens::{spekkens_fragment, spekkens_toy_bit, spekkens_with_null_state, SPEKKENS_LABELS};
