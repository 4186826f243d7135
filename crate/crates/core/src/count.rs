//! Exact motif frequencies under both counting definitions.

use crate::graph::{Graph, NodeId};
use crate::iso::{automorphism_count, count_embeddings, AnchoredMatcher};
use crate::{Error, Result};

/// Default search-step budget for [`graph_level_frequency`].
pub const DEFAULT_EXPLORATION_LIMIT: u64 = 50_000_000;

/// Number of target nodes onto which the query anchor can be mapped by a
/// node-induced isomorphism. The target's own anchor is ignored.
pub fn anchored_frequency(query: &Graph, target: &Graph) -> Result<u64> {
    if !query.is_connected() {
        return Err(Error::Disconnected);
    }
    let matcher = AnchoredMatcher::new(query)?;
    Ok(target
        .nodes()
        .filter(|&u| matcher.find(target, u).is_some())
        .count() as u64)
}

/// Anchors `u` of `target` that admit an occurrence of `query`.
pub fn anchored_occurrences(query: &Graph, target: &Graph) -> Result<alloc::vec::Vec<NodeId>> {
    if !query.is_connected() {
        return Err(Error::Disconnected);
    }
    let matcher = AnchoredMatcher::new(query)?;
    Ok(target.nodes().filter(|&u| matcher.find(target, u).is_some()).collect())
}

/// Number of distinct node subsets of `target` that induce a copy of `query`.
///
/// Computed as (number of induced embeddings) / |Aut(query)|, with
/// interchangeable query leaves counted combinatorially, so highly symmetric
/// cases such as a star inside a large hub stay cheap. Aborts with
/// [`Error::BudgetExceeded`] after `limit` search steps.
pub fn graph_level_frequency_with_limit(query: &Graph, target: &Graph, limit: u64) -> Result<u128> {
    if !query.is_connected() {
        return Err(Error::Disconnected);
    }
    let q = query.clone().without_anchor();
    let embeddings = count_embeddings(&q, target, limit)?;
    let aut = automorphism_count(&q);
    debug_assert_eq!(embeddings % aut, 0);
    Ok(embeddings / aut)
}

pub fn graph_level_frequency(query: &Graph, target: &Graph) -> Result<u128> {
    graph_level_frequency_with_limit(query, target, DEFAULT_EXPLORATION_LIMIT)
}
