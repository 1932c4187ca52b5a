//! Core library for the compliant-leg walking lab: three-phase spring-mass
//! gait dynamics, an event-driven RK4 simulator, synthetic dataset
//! generation, a small from-scratch feed-forward regressor, and numerical
//! parameter-identifiability diagnostics.
//!
//! The crate is `no_std`-compatible (allocation required): disable default
//! features and enable `libm` to build without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod math;

pub mod dataset;
pub mod dynamics;
pub mod identifiability;
pub mod mlp;
pub mod sim;

pub use dynamics::{GaitParams, Phase, ReducedParams, SimState};
pub use sim::{simulate, GaitFailure, InitialConditions, SimSettings, Trajectory};
