use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("graph must be connected")]
    Disconnected,
    #[error("graph must carry an anchor node")]
    MissingAnchor,
    #[error("exploration budget of {limit} search steps exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("size {size} exceeds the guard limit {limit}")]
    SizeGuard { size: usize, limit: usize },
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("non-finite gradient for parameter `{0}`")]
    NonFiniteGradient(String),
    #[error("non-finite loss at batch {batch} (batch seed {seed:#018x})")]
    NonFiniteLoss { batch: usize, seed: u64 },
    #[error("evaluation set needs both positive and negative examples")]
    SingleClass,
    #[error("no seed node lies in a component with at least {0} nodes")]
    NoUsableSeed(usize),
    #[error("could not draw a connected graph after {0} attempts")]
    RetriesExhausted(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
