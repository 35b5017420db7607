// SPDX-License-Identifier: Apache-2.0

//! Dissipative Kerr soliton dynamics in a driven ring resonator, in mean
//! field and in the truncated Wigner approximation.

pub mod analysis;
pub mod config;
pub mod error;
pub mod field;
pub mod gp;
pub mod lattice;
pub mod noise;
pub mod observables;
pub mod persist;
pub mod runner;
pub mod twa;

pub use error::{Error, Result};
