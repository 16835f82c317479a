#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod cx;
pub mod dual;
pub mod error;
pub mod lorentz;
pub mod geometry;
pub mod weyl;
pub mod wave;
pub mod spin;
pub mod dynamics;
pub mod cli;
