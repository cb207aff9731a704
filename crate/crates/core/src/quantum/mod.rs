//! Complex linear algebra and the quantum probability layer.
//!
//! Composite systems use the row-major Kronecker convention: the basis vector
//! `|j> (x) |k>` of `C^dA (x) C^dB` has index `j * dB + k`. Transposes are
//! taken in the computational basis, the same basis that defines the
//! maximally entangled state.

mod fragment;
mod matrix;
mod ops;
mod povm;
pub mod random;
mod vector;

pub use fragment::PMFragment;
pub use matrix::ComplexMatrix;
pub use ops::{
    born_rule, conditional_state, maximally_entangled, partial_trace, phase_align, pure_overlap, tensor_product,
    validate_povm, Subsystem, Tensor, BORN_CLAMP,
};
pub use povm::{Outcome, Povm};
pub use vector::{qubit, UnitVector};
