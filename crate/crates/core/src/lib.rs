#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod initial;
pub mod interior;
pub mod random;
pub mod singular;
pub mod spectral;
pub mod trajectory;
pub mod verify;
