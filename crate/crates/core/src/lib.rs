//! Exact toolkit for trilinear tensors from fast matrix multiplication:
//! constructions, monomial degenerations, independence searches and
//! certified bounds on the asymptotic independence number.

pub mod bounds;
pub mod catalog;
pub mod degeneration;
pub mod error;
pub mod group;
pub mod interval;
pub mod io;
pub mod lp;
pub mod reproduce;
pub mod search;
pub mod tensor;

pub use error::{Error, Result};
pub use group::Group;
pub use tensor::{Axis, AxisSubset, Partition, Rational, Tensor, Triple};
