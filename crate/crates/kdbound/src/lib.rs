// SPDX-License-Identifier: Apache-2.0

//! Experiments, file formats and command-line plumbing around
//! [`kdbound_core`].

pub mod cli;
pub mod error;
pub mod expectations;
pub mod experiments;
pub mod fixture;
pub mod format;

pub use error::{Error, Result};
