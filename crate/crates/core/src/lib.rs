//! Exact computation with loxodromic automorphisms of the 2-torus and the
//! affine plane: normalized places and Weil heights over Q and F_q(t),
//! pseudo-monomial torus maps and their eigenvaluations, Hénon words,
//! Frobenius-linear maps in characteristic p, exact orbit engines, and
//! orbit-intersection search with arithmetic-progression decomposition.

pub mod budget;
pub mod error;
pub mod field;
pub mod util;

pub use budget::Budget;
pub use error::{EngineError, FieldError};
