//! Exact construction and verification of the BRST differential on the bar
//! resolution of a finite-dimensional Z₂-graded associative algebra.

pub mod algebra;
pub mod recursion;
pub mod bar;
pub mod closed_forms;
pub mod hamiltonian;
pub mod components;
pub mod oracle;
pub mod probe;
pub mod report;
pub mod run;
pub mod verify;
pub mod scalar;
pub mod tensor;

pub use algebra::{Basis, Element, GradedAlgebra};
pub use scalar::Q;
pub use tensor::{Idx, MultiMap, TensorVector};
