//! Image-method quantum field numerics for a massless scalar field beside one
//! Dirichlet plate (half-space) and between two plates (slab).
//!
//! The crate is `no_std` with `alloc`. Everything here is pure computation:
//! kernels, smeared pairings, propagators, point-split observables and a small
//! functional algebra. File formats and the command line live in `casimir-cli`.
//!
//! Conventions: signature (−,+,+,+), c = ħ = 1, commutator
//! ω₂(f,g) − ω₂(g,f) = i·E(f,g) with E = advanced − retarded.

#![cfg_attr(not(test), no_std)]
// Quadrature constants are quoted to full published precision; `!(x > 0.0)` rejects NaN.
#![allow(
    clippy::excessive_precision,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

extern crate alloc;

pub mod algebra;
pub mod boundary;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod math;
pub mod observables;

pub use error::{Error, Result};
pub use num_complex::Complex64;
