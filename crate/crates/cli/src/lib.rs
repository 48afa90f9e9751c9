//! Command-line front end and HTTP service for `fallrisk`.

pub mod output;
pub mod request;
pub mod service;

use fallrisk::Error;

/// Process exit status for a failed evaluation.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_)) => 2,
        _ => 1,
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/service.md")]
mod guide_service {}
