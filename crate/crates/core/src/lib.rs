//! Exact derangement statistics for finite transitive permutation groups:
//! proportions of fixed-point-free elements, derangement widths, class
//! multiplication through character tables, and generation by conjugate
//! derangements.

pub mod actions;
pub mod alt_comb;
pub mod catalog;
pub mod chartab;
pub mod classes;
pub mod cyclotomic;
pub mod derangement;
pub mod error;
pub mod families;
pub mod field;
pub mod genpair;
pub mod group;
pub mod perm;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use group::PermGroup;
pub use perm::{CycleType, Permutation, Point};
pub use rational::ExactRational;
