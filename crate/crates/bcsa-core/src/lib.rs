//! Core algorithms for broadcast coded slotted ALOHA (B-CSA) over a shared
//! frame, together with the analytics used to study it:
//!
//! - [`phy`]: timing parameters of the physical layer and the derived
//!   packet/slot/frame geometry.
//! - [`dist`]: degree distributions (repetition-count polynomials) and
//!   seeded sampling.
//! - [`graph`]: frame instances, the half-duplex receiver's view, and the
//!   successive-interference-cancellation peeling decoder plus a brute-force
//!   reference decoder.
//! - [`floor`]: induced degree distributions at a half-duplex receiver,
//!   an exhaustively generated catalog of small unresolvable collision
//!   patterns, analytical packet-loss-rate floor predictions, the asymptotic
//!   decoding threshold, and a grid-search distribution optimizer.
//! - [`sim`]: deterministic, chunked Monte-Carlo estimation of the packet
//!   loss rate, with residual-pattern harvesting.
//! - [`csma`]: an event-driven CSMA-CA broadcast baseline on the same
//!   physical layer.
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the default
//! `std` feature for std environments. All randomized routines take explicit
//! 64-bit seeds and are bit-reproducible across platforms and worker counts.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod csma;
pub mod dist;
pub mod floor;
pub mod graph;
mod math;
pub mod pattern;
pub mod phy;
pub mod sim;

pub use dist::DegreeDistribution;
pub use phy::PhyParams;
