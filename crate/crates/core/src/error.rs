// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by topology construction, measurement, costing and search.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid topology spec: {0}")]
    InvalidSpec(String),

    #[error("graph too large: {what} = {value} exceeds cap {cap}")]
    SizeExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("router {to} is unreachable from router {from}")]
    Disconnected { from: u32, to: u32 },

    #[error("graph has no attached hosts")]
    NoHosts,

    #[error("uniform traffic needs at least two hosts")]
    SingleHost,

    #[error("closed form not applicable: {0}")]
    IllFormed(String),

    #[error("invalid cost parameters: {0}")]
    InvalidParams(String),

    #[error("no radix in the requested range yields a feasible design")]
    EmptyFeasibleSet,

    #[error("malformed graph document: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
