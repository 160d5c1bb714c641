//! Verification of first-order Hamiltonian operators of hydrodynamic type.
//!
//! The crate works on top of the exact kernel in `pencil_forge_symcore`:
//!
//! * [`diffgeo`]: Levi-Civita connection, curvature, Killing and cyclic
//!   conditions for contravariant metrics,
//! * [`operators`]: local and nonlocal operators and their validity checks,
//!   Liouville potentials,
//! * [`pencil`]: compatibility of metric pencils and of operator pairs,
//! * [`hierarchy`]: flows, Magri recursion, recursion operators,
//! * [`catalog`]: the built-in cases and the verification runner.
//!
//! ```
//! use pencil_forge::catalog::{lookup, verify_case};
//!
//! let report = verify_case(&lookup("g6").unwrap());
//! assert!(report.valid);
//! ```

pub mod catalog;
pub mod diffgeo;
mod error;
pub mod hierarchy;
mod numeric;
pub mod operators;
pub mod pencil;
pub mod report;

pub use error::{Error, Result};
pub use pencil_forge_symcore as symcore;

/// Chapters of the guide in `book/`, compiled so their examples run as
/// doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/pencils.md")]
    mod pencils {}
    #[doc = include_str!("../../../book/src/hierarchies.md")]
    mod hierarchies {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
