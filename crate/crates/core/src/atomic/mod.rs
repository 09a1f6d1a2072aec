//! Atomic data, angular momentum algebra and microwave coupling.

pub mod angmom;
pub mod atom;
pub mod microwave;

pub use angmom::{cg_coefficient, cg_exact, hyperfine_element, HalfInt, SpinOp};
pub use atom::AtomSpec;
pub use microwave::{dbm_to_rabi, far_field_b, mw_rabi_frequencies, MatrixElement, MwCoupling, MwFieldLab, GAMMA_E};

/// `⟨F2 m2| op |F1 m1⟩` for the ground manifold of `atom`.
pub fn hyperfine_matrix_element(f1: HalfInt, m1: HalfInt, f2: HalfInt, m2: HalfInt, op: SpinOp, atom: &AtomSpec) -> crate::Result<f64> {
    hyperfine_element(atom.nuclear_spin, atom.electron_spin, f1, m1, f2, m2, op)
}
