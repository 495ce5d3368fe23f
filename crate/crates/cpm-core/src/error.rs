// SPDX-License-Identifier: Apache-2.0

use cpm_logic::LogicError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CpmError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("address {addr} out of bounds for {len} elements")]
    Address { addr: usize, len: usize },
    #[error("instruction error: {0}")]
    Instruction(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("allocation error: need {needed} cells, capacity {capacity}")]
    Allocation { needed: usize, capacity: usize },
    #[error("unknown object id {0}")]
    Lookup(usize),
    #[error("plan validation error: {0}")]
    Plan(String),
}

impl From<LogicError> for CpmError {
    fn from(e: LogicError) -> Self {
        CpmError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CpmError>;
