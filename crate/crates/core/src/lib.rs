#![allow(clippy::needless_range_loop)]

//! Nets of finite-dimensional C*-algebras over finite posets.
//!
//! The crate covers fundamental groups of posets, nets and net bundles with
//! their holonomy, the C(X)-algebra generated by a net over a finite space
//! model, transition cocycles, Fredholm modules over nets with their indices,
//! and twisted sectors.

pub mod bundle_holonomy;
pub mod catalog;
pub mod error;
pub mod field_algebra;
pub mod fredholm;
pub mod linalg;
pub mod matrix_cstar;
pub mod net;
pub mod poset_topology;
pub mod report;
pub mod sectors;
pub mod space_model;

pub use error::{Error, Result};
