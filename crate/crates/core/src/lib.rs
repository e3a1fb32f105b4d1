//! Stochastic approximation `x_{k+1} = x_k − β_k (F(x_k) + η_k)` for
//! strongly monotone operators under heavy-tailed and long-range dependent
//! noise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod kv;
pub mod noise;
pub mod operators;
pub mod rng;
pub mod sa;
pub mod stats;
pub mod theory;
mod vecops;

pub use error::{Error, Result};
