#![no_std]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod solver;
pub mod collar;
pub mod tube;
pub mod riemannian;

pub use error::{Error, Result};
