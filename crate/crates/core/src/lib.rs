//! Rate-region bounds for the Gray-Wyner network with side information at the
//! receivers, and a Monte Carlo simulator for its random-binning code.
//!
//! The crate is layered bottom-up: [`measures`] holds finite joint pmfs and
//! entropies, [`regions`] turns a fixed auxiliary channel into a small
//! halfspace system, [`search`] optimizes over channels, and [`codec`] runs the
//! block code. [`cli`] wires them to files and flags.

pub mod cli;
pub mod codec;
pub mod measures;
pub mod regions;
pub mod search;
pub mod sources;
