//! Exact normal forms, quotients and matrix representations for oriented
//! Brauer categories and their affine, graded and cyclotomic variants.

pub mod scalars;
pub mod diagrams;
pub mod reps;
pub mod rewrite;
pub mod quotients;
pub mod verify;
pub mod expr;
pub mod json;
pub mod api;
