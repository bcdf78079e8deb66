//! Exact computer algebra for dg operads and modular operads over the rationals.

pub mod qlinalg;
pub mod chain;
pub mod sigma;
pub mod trees;
pub mod operad;
pub mod minimal;
pub mod weight;
pub mod fixtures;
pub mod cubical;
pub mod document;
pub mod cli;
