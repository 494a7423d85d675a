//! Command line, JSON formats and verification suite built on `stable-cluster-core`.

pub mod commands;
pub mod json;
pub mod verify;
