//! Conical densities of hierarchical measures.
//!
//! `conelab` represents probability measures as lazily generated weight trees
//! (k-adic cubes, or similarity-generated balls and rectangles) and answers
//! region queries with certified lower/upper bounds. On top of that it builds
//! cone predicates, finite covering nets of the sphere and of the Grassmannian,
//! average homogeneity and doubling-scale statistics, conical density ratios
//! and profiles, the full chain of constants behind the conical density
//! theorems, and three explicit counterexample measures.
//!
//! Module map:
//!
//! - [`geometry`]: points, cones, subspaces, direction and subspace nets
//! - [`measure`]: measure trees, certified region queries, sampling
//! - [`constructions`]: Lebesgue, binomial, rotating-ball and strip/block measures
//! - [`homogeneity`]: ordered fans, average homogeneity, doubling statistics
//! - [`configurations`]: cone triples and the separation constant `t(α)`
//! - [`density`]: conical ratios, profiles, ball collections, constants chain
//! - [`cli`]: the batch experiment runner behind the `conelab` binary

// `!(x > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod configurations;
pub mod constructions;
pub mod density;
mod error;
pub mod geometry;
pub mod homogeneity;
pub mod measure;

pub use error::{Error, Result};
