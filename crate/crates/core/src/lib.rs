#![no_std]
//! Finite-time quantum Otto engines with scale-invariant working media.
//!
//! * [`ermakov`]: scaling-factor dynamics, nonadiabatic factor Q*, mean energies
//! * [`sta`]: friction-free stroke design (polynomial ansatz, local CD frequency)
//! * [`media`]: canonical thermodynamics of the oscillator and Calogero-Sutherland gas
//! * [`otto`]: four-stroke cycle energetics, bounds and many-particle ratios
//! * [`cd`]: counterdiabatic driving, work statistics and cost metrics for
//!   finite-dimensional Hamiltonians
//!
//! The crate only needs `alloc`; all functions are pure.

// Parameter guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod blend;
// Float methods for f64 in no_std builds. rustc reports the import as unused when
// dev-dependencies pull std into the graph, hence the allow.
#[allow(unused_imports)]
mod prelude {
    pub(crate) use num_traits::Float;
}
pub mod cd;
pub mod ermakov;
pub mod media;
pub mod otto;
pub mod sta;

pub use blend::smoothstep5;
