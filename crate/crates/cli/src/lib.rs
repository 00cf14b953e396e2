//! Command line and HTTP front end for `gesture-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod service;
