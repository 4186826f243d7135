//! Weisfeiler–Lehman colour refinement as an isomorphism-invariant digest.
//!
//! Initial colours encode the anchor flag and the degree. Each round replaces
//! a node's colour by a hash of its colour and the sorted multiset of its
//! neighbours' colours. The digest folds the sorted colour multiset of every
//! round, so isomorphic (anchored) graphs always agree. Distinct digests prove
//! non-isomorphism; equal digests must be confirmed with
//! [`crate::iso::exact_isomorphic`] where that matters.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::rng::mix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey {
    pub digest: u64,
    pub round_count: u32,
}

impl core::fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:016x}", self.digest)
    }
}

#[inline]
fn combine(h: u64, x: u64) -> u64 {
    mix64(h ^ x.wrapping_mul(0x9fb2_1c65_1e98_df25))
}

fn fold_sorted(seed: u64, colors: &mut [u64]) -> u64 {
    colors.sort_unstable();
    colors.iter().fold(seed, |h, &c| combine(h, c))
}

fn initial_colors(g: &Graph) -> Vec<u64> {
    let anchor = g.anchor();
    g.nodes()
        .map(|u| {
            let flag = u64::from(anchor == Some(u));
            combine(combine(0x0a11_c0de, flag), g.degree(u) as u64)
        })
        .collect()
}

/// Node colours after `rounds` refinement rounds.
pub fn refine_colors(g: &Graph, rounds: usize) -> Vec<u64> {
    let n = g.node_count();
    let mut colors = initial_colors(g);
    let mut scratch = Vec::new();
    let mut next = Vec::with_capacity(n);
    for _ in 0..rounds {
        next.clear();
        for u in 0..n {
            scratch.clear();
            scratch.extend(g.neighbors(u as u32).iter().map(|&v| colors[v as usize]));
            next.push(fold_sorted(colors[u], &mut scratch));
        }
        core::mem::swap(&mut colors, &mut next);
    }
    colors
}

/// Canonical key refined for `max(node_count, 3)` rounds.
pub fn canonical_key(g: &Graph) -> CanonicalKey {
    let n = g.node_count();
    let rounds = n.max(3);
    let anchor = g.anchor();
    let mut colors = initial_colors(g);
    let mut digest = combine(combine(0x5eed, n as u64), g.edge_count() as u64);
    digest = combine(digest, u64::from(anchor.is_some()));
    let mut sorted = colors.clone();
    digest = fold_sorted(digest, &mut sorted);
    let mut scratch = Vec::new();
    let mut next = Vec::with_capacity(n);
    for _ in 0..rounds {
        next.clear();
        for u in 0..n {
            scratch.clear();
            scratch.extend(g.neighbors(u as u32).iter().map(|&v| colors[v as usize]));
            next.push(fold_sorted(colors[u], &mut scratch));
        }
        core::mem::swap(&mut colors, &mut next);
        sorted.clear();
        sorted.extend_from_slice(&colors);
        digest = fold_sorted(digest, &mut sorted);
    }
    CanonicalKey {
        digest,
        round_count: rounds as u32,
    }
}
