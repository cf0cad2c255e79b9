//! Exact-arithmetic machinery for Bush-type generalized Hadamard matrices
//! over the additive group of a finite field, the translation association
//! schemes they induce, and the spectral / strongly-regular-graph analysis
//! of those schemes.
//!
//! Everything is computed over `Z[w]` (`w` a primitive `p`-th root of unity)
//! or over small finite fields; no floating point is used anywhere in the
//! library, so every verdict returned by a verifier is an exact statement.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `gh-scheme-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitmat;
pub mod cyclotomic;
pub mod field;
pub mod gh;
pub mod scheme;
pub mod spectral;
pub mod srg;

pub use bitmat::BitMatrix;
pub use cyclotomic::CycInt;
pub use field::{FieldCtx, FieldElement, LinearMap};
pub use gh::{GroupMatrix, LatinSquare};
pub use scheme::{IntersectionTensor, SchemeInstance};
pub use spectral::{KloostermanTable, SpectralData};
pub use srg::{SrgParams, SwapCertificate};
