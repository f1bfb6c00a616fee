//! Runs the code listings of the guide in `book/src` as doctests. One module
//! per chapter, so a failing listing points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/discretization.md")]
pub mod discretization {}
#[doc = include_str!("../../../book/src/time_stepping.md")]
pub mod time_stepping {}
#[doc = include_str!("../../../book/src/adaptive.md")]
pub mod adaptive {}
#[doc = include_str!("../../../book/src/convergence.md")]
pub mod convergence {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
