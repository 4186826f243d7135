//! Frequent motif mining in an order-embedding space.
//!
//! The crate is `no_std` (with `alloc`) so the algorithmic pieces can be
//! embedded anywhere; file formats, the CLI and experiment drivers live in
//! the `motif-forge` companion crate.
//!
//! Layout:
//! - [`graph`], [`iso`], [`count`], [`wl`], [`sample`]: the combinatorial substrate.
//! - [`synth`]: random graph families, training pairs, planted benchmarks.
//! - [`tensor`]: dense matrices, a reverse-mode tape and Adam.
//! - [`encoder`]: the anchor-aware message-passing order-embedding network.
//! - [`miner`]: neighborhood index and greedy / beam / MCTS motif search.
//! - [`baselines`]: ESU, MFinder, Rand-ESU and the perfect count-vector embedding.
//! - [`metrics`]: hit rate, accuracy, AUPR and frequency summaries.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod count;
pub mod encoder;
mod error;
pub mod graph;
pub mod iso;
pub mod metrics;
pub mod miner;
pub mod rng;
pub mod sample;
pub mod synth;
pub mod tensor;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use wl::CanonicalKey;
