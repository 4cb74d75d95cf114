#![allow(clippy::needless_range_loop)]

pub mod circuit;
pub mod encoding;
pub mod error;
pub mod fixtures;
pub mod gates;
pub mod gray;
pub mod hhl;
pub mod io;
pub mod noise;
pub mod qaoa;
pub mod qft;
pub mod qubo;
pub mod readout;
pub mod risk;
pub mod state;
pub mod swap_test;
