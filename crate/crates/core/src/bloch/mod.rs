//! Three-level Δ system: Hamiltonian, Lindblad superoperator and steady state.
//!
//! Basis order is `(|a⟩, |b⟩, |c⟩)` with `|a⟩` the excited state, `|b⟩` the
//! lower and `|c⟩` the upper ground hyperfine level. Density matrices are
//! vectorized by stacking columns, so element `(i, j)` sits at `i + 3j`.

mod evolve;
mod hamiltonian;
mod liouvillian;
mod rhs;
mod state;
mod steady;

pub use evolve::time_evolve;
pub use hamiltonian::build_hamiltonian;
pub use liouvillian::{build_liouvillian, lindblad_operators, Liouvillian};
pub use rhs::bloch_rhs;
pub use state::{DecayRates, DensityMatrix, FieldConfig};
pub use steady::steady_state;

/// Level indices.
pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;

use crate::scalar::Real;

/// Steady state of the model at longitudinal velocity `v`.
pub fn steady_state_at<T: Real>(fields: &FieldConfig<T>, decays: &DecayRates<T>, v: T) -> crate::Result<DensityMatrix<T>> {
    let h = build_hamiltonian(fields, v);
    steady_state(&build_liouvillian(&h, decays))
}
