//! Temporal dynamics of stimulated emission.
//!
//! A two-level atom in a one-dimensional cavity is coupled to a window of
//! field modes (multimode Jaynes-Cummings model) and evolved exactly in the
//! one- and two-excitation subspaces. The semiclassical counterpart solves the
//! optical Bloch equations, and the `nuclear` module applies them to Mössbauer
//! nuclei driven by x-ray pulse pairs.
//!
//! The guide in `book/` walks through each layer; its examples run as doctests.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod model;
pub mod nuclear;
pub mod observables;
pub mod semiclassical;
pub mod series;

pub use error::{Error, Result};

// One module per chapter so a failing snippet points at its file.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cavity.md")]
    mod cavity {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/bloch.md")]
    mod bloch {}
    #[doc = include_str!("../../../book/src/nuclear.md")]
    mod nuclear {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/plotting.md")]
    mod plotting {}
}
