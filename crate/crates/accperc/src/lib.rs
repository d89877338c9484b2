//! Accessibility percolation on spherically symmetric trees.
//!
//! A spherically symmetric tree (SST) is a rooted tree in which every vertex
//! at depth `i` has the same number of children `f(i)`. Each vertex carries an
//! independent fitness value, uniform on `[0, 1]`, and a root-to-vertex path is
//! accessible when the fitness values increase strictly along it. This crate
//! estimates and computes exactly the probability that accessible paths reach
//! a given depth, and provides the branching-process and record-sequence
//! machinery used to locate the phase transition of the linear growth family
//! `f(i) = ceil((i + 1) * alpha)` at `alpha = 1`.
//!
//! The crate is organised as a library with one thin command-line frontend.
//! Start with [`growth::GrowthFunction`] for tree shapes, [`sim`] for frontier
//! Monte Carlo, [`exact`] for quadrature and rational-arithmetic solvers,
//! [`branching`] for block embeddings and supercriticality checks,
//! [`records`] for the time-inhomogeneous record model, and [`env`] for
//! varying-environment fitness floors.

pub mod branching;
pub mod cli;
pub mod env;
pub mod error;
pub mod exact;
pub mod growth;
pub mod records;
pub mod report;
pub mod rng;
pub mod sim;
pub mod tree;

pub use error::{Error, Result};
