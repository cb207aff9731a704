//! Ontological models of prepare-and-measure fragments.
//!
//! A model is an ontic space, a set `Delta_rho` of probability measures per
//! state and a set `Xi_M` of response functions per measurement. Finite
//! spaces are handled by label enumeration. Interval-augmented spaces
//! (`labels x [0, 1]`) carry piecewise-constant densities and interval
//! indicator responses, and every integral over them is an exact sum of
//! density times length.

mod compose;
mod ks;
mod measure;
mod model;
mod response;
mod space;
mod verify;

pub use compose::{
    check_bell_local_conditioning, condition_bell_local_model, direct_product_model, mix_models, product_fragment,
    split_tuple_label, wpip_composite,
};
pub use ks::{cosupport, discretize, ks_analysis, CellOrigin, KsAnalysis};
pub use measure::{direct_sum, exclusive_mass, measure_distance, measure_overlap, EpistemicState, Piece, Region, StructuredMeasure};
pub use model::{predicted_prob, predicted_prob_on, ModelParts, OntologicalModel};
pub use response::{FiniteResponse, Interval, ResponseFunction, StructuredResponse};
pub use space::OnticSpace;
pub use verify::{
    classify, detect_preparation_contextuality, is_maximally_psi_epistemic, ontologically_distinct, verify_preclusions,
    verify_reproduces, Classification, SupportMethod,
};
