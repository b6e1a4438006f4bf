//! Numerical laboratory for Weyl pseudodifferential operators.

pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod oracle;
pub mod phase;
pub mod quadrature;
pub mod symbol;
pub mod toeplitz;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::Verdict;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/symbols.md")]
    struct Symbols;
    #[doc = include_str!("../../../book/src/quantization.md")]
    struct Quantization;
    #[doc = include_str!("../../../book/src/phase-calculus.md")]
    struct PhaseCalculus;
    #[doc = include_str!("../../../book/src/toeplitz.md")]
    struct Toeplitz;
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    struct Diagnostics;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
