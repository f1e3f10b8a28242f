//! Compiles the guide's code listings as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/data.md")]
mod data {}
#[doc = include_str!("../../../book/src/cropping.md")]
mod cropping {}
#[doc = include_str!("../../../book/src/nss-features.md")]
mod nss_features {}
#[doc = include_str!("../../../book/src/fusion.md")]
mod fusion {}
#[doc = include_str!("../../../book/src/svr.md")]
mod svr {}
#[doc = include_str!("../../../book/src/selection.md")]
mod selection {}
#[doc = include_str!("../../../book/src/evaluation.md")]
mod evaluation {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
