//! Sweeps and lineshape analysis.

mod export;
mod metrics;
mod presets;
mod shift;
mod sweep;

pub use export::*;
pub use metrics::*;
pub use presets::*;
pub use shift::*;
pub use sweep::*;
