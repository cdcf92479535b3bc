//! Exact computations on the Picard lattice of the Hilbert square of Cayley's
//! K3 surface and on its automorphism group ⟨ι₀, ι₁, ι₂⟩ ≅ Z2 * Z2 * Z2.

pub mod quad_field;
pub mod json_int;
pub mod lattice;
pub mod isometry;
pub mod words;
pub mod hyperbolic;
pub mod render;
pub mod verify;
