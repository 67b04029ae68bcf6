//! Finite-precision MUSIC direction-of-arrival estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`fpemu`] emulates reduced-precision binary floating-point formats on
//!   top of `f64` (operate-then-round, ties to even).
//! - [`kernels`] builds uniform, mixed-precision and adaptive-precision inner
//!   products on top of the emulator, together with weighted cost accounting
//!   and the a-posteriori rounding-error certificate of the adaptive scheme.
//! - [`linalg`] holds small dense Householder QR, Jacobi SVD/eigensolvers and
//!   the randomized SVD whose two sketch products run under a precision scheme.
//! - [`doa`] implements the uniform linear array model, the unitary transform
//!   and the MUSIC, U-MUSIC and RU-MUSIC estimators.
//! - [`bench`] is the Monte-Carlo harness behind the `fpmusic` CLI.

pub mod bench;
pub mod doa;
pub mod error;
pub mod fpemu;
pub mod kernels;
pub mod linalg;

pub use error::{Error, Result};
pub use fpemu::{builtin_formats, ExponentRange, PrecisionFormat};
pub use kernels::{ApConfig, CostLedger, GroupAssignment, MpConfig, Scheme};
