//! Exact neighborhood statistics for bounded-degree graphs and Schreier
//! graphs of free groups, pseudo-subgroups and pseudo-IRS polytopes, the
//! encodings between graphs and Schreier graphs, and reductions driven by
//! claimed regularity bounds.
//!
//! All arithmetic is exact over arbitrary-precision rationals.

pub mod audit;
pub mod ball;
pub mod canon;
pub mod cli;
pub mod corpus;
pub mod encoding;
pub mod error;
pub mod free_group;
pub mod graph;
pub mod io;
pub mod local_test;
pub mod lp;
pub mod pirs;
pub mod rational;
pub mod reductions;
pub mod sample;
pub mod stats;
