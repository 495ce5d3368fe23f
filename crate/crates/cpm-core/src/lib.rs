// SPDX-License-Identifier: Apache-2.0

//! PE-array framework shared by every memory type.
//!
//! A [`Controller`] owns the activation mask, the cycle ledger and the match
//! aggregation; a [`PeArray`] adds a homogeneous register file per element and
//! synchronous two-phase broadcasts.

mod array;
mod control;
mod error;
mod ledger;
mod topology;

pub use array::{Neighbors, Pe, PeArray, UpdatePolicy};
pub use control::{Axis, Controller, MatchReport};
pub use cpm_logic::BitVector;
pub use error::{CpmError, Result};
pub use ledger::CycleLedger;
pub use topology::{Direction, ElementAddress, Topology};
