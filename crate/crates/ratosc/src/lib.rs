//! Exact and variational spectra of the rational anharmonic oscillator
//!
//! ```text
//! H = -d^2/dx^2 + x^2 + lambda x^2 / (1 + g x^2),      g > 0
//! ```
//!
//! For special couplings the model is conditionally solvable: when `lambda`
//! is a root of a sector's quantization polynomial, one eigenfunction is a
//! polynomial times a Gaussian and its energy is known in closed form. This
//! crate computes those states and everything needed to trust them:
//!
//! - [`exact_states`]: the exact couplings, energies, polynomial factors,
//!   and node counts of a sector, via the three-term recurrence and its
//!   termination condition ([`recurrence`]).
//! - [`rr_spectrum`]: a Rayleigh-Ritz variational solver in a nonorthogonal
//!   Gaussian basis tailored to the rational term ([`ritz`]). It reproduces
//!   exact states to near machine precision and bounds everything else from
//!   above.
//! - [`grid_spectrum`]: an independent finite-difference oracle with Sturm
//!   bisection ([`grid`]), used to cross-check both of the above.
//! - [`figures`]: lambda scans, deterministic CSV emission, and the
//!   cross-module validation suite ([`run_validation`]).
//!
//! # Quick start
//!
//! The flagship closed-form point: in the even sector with one polynomial
//! node parameter (`n = 1`) at `g = 1`, the coupling `lambda = -6` carries
//! a nodeless exact ground state with energy `-1`:
//!
//! ```
//! use ratosc::{exact_states, Parity};
//!
//! let states = exact_states(1, Parity::Even, 1.0)?;
//! let ground = &states[0];
//! assert_eq!(ground.nu(), 0);
//! assert!((ground.lambda() + 6.0).abs() < 1e-12);
//! assert!((ground.energy() + 1.0).abs() < 1e-12);
//!
//! // The variational solver lands on the same energy.
//! let rr = ratosc::rr_spectrum(ground.lambda(), 1.0, Parity::Even, 22, 1)?;
//! assert!((rr[0] - ground.energy()).abs() < 1e-9);
//! # Ok::<(), ratosc::Error>(())
//! ```
//!
//! The book under `book/` walks through the theory and the numerics; its
//! code blocks compile against this crate as doc-tests.

mod dd;
pub mod error;
pub mod figures;
pub mod grid;
pub mod model;
mod poly;
pub mod recurrence;
pub mod ritz;
pub mod spectrum;

pub use error::{Error, Result};
pub use figures::{run_validation, ScanConfig, ValidationReport};
pub use grid::{grid_spectrum, GridSpec};
pub use model::{reduce_to_dimensionless, ModelParams, Parity, PhysicalParams, Reduction};
pub use ritz::{rr_spectrum, RRBasisSpec, DEFAULT_BASIS_SIZE};
pub use spectrum::{exact_states, ExactState};

// Compile the book's code blocks as doc-tests so the guide cannot drift
// from the library.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/model.md")]
pub mod book_model {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/exact-states.md")]
pub mod book_exact_states {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/variational.md")]
pub mod book_variational {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/grid.md")]
pub mod book_grid {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/scans.md")]
pub mod book_scans {}
