//! Executable checks for treelike order structures.
//!
//! The crate is organised around five areas:
//!
//! * [`betweenness`], [`axioms`], [`mapping`]: finite betweenness structures
//!   (pretrees), their axioms, intervals, medians, convex sets and monotone maps.
//! * [`shadow`]: shadow sets, the finite shadow topology, the median
//!   retraction onto an interval and the shadow-separation kernel.
//! * [`tameness`]: independence of function families, bounded-length tameness,
//!   Helly-type selection and monotone separators.
//! * [`ztree`]: rule-defined locally finite trees with eventually periodic ends,
//!   automorphism actions on them and dynamical diagnostics.
//! * [`entropy`]: star-open covers of subdivided tree complexes, exact minimum
//!   subcovers and sequence entropy tables.
//!
//! All arithmetic is exact (rationals or integers); nothing here depends on a
//! floating point tolerance except the reported `log N / n` trend values.

pub mod axioms;
pub mod betweenness;
pub mod entropy;
pub mod error;
pub mod mapping;
pub mod parse;
pub mod report;
pub mod shadow;
pub mod tameness;
pub mod treegen;
pub mod ztree;

pub use betweenness::{Backend, BetweennessStructure, Interval, IntervalTable, PointId};
pub use error::{Error, Result};

/// Exact rational numbers used for function values.
pub type Rational = num_rational::BigRational;
