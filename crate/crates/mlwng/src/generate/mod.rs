//! Network generators: the multi-local-world growth model and the three
//! density-matched baseline topologies.

mod baseline;
mod mlw;

pub use baseline::{
    attachment_count, edge_budget, gen_baseline, nearest_even_degree, BaselineKind,
    BaselineParams, DEFAULT_SW_REWIRE_PROB,
};
pub use mlw::{defaults as mlw_defaults, gen_mlw, MlwNetwork, MlwParams};

use rand::Rng;
use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("could not generate a connected graph after {attempts} attempts")]
    Disconnected { attempts: u32 },
}

/// Number of distinct regeneration attempts before giving up on
/// connectivity. Rejected graphs are discarded wholesale rather than
/// patched, so the degree statistics stay unbiased. Sparse inter-world
/// wiring (large rho, small m0) can need dozens of attempts; parameters
/// whose inter-edge budget cannot cover the local worlds at all fail the
/// full budget quickly and surface as a hard error.
pub const MAX_CONNECTIVITY_ATTEMPTS: u32 = 1000;

/// Degree-preferential attachment weight.
#[inline]
pub fn attachment_weight(degree: usize, alpha: f64) -> f64 {
    degree as f64 + alpha
}

/// Samples one node from `candidates` with probability proportional to
/// `degree + alpha`, skipping nodes listed in `exclude`.
///
/// Returns `None` when no candidate remains; callers treat that as an
/// unsatisfiable sub-step and skip it.
pub fn preferential_pick<R: Rng>(
    rng: &mut R,
    candidates: &[NodeId],
    degree_of: impl Fn(NodeId) -> usize,
    alpha: f64,
    exclude: &[NodeId],
) -> Option<NodeId> {
    let mut total = 0.0;
    for &v in candidates {
        if !exclude.contains(&v) {
            total += attachment_weight(degree_of(v), alpha);
        }
    }
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    let mut last = None;
    for &v in candidates {
        if exclude.contains(&v) {
            continue;
        }
        x -= attachment_weight(degree_of(v), alpha);
        last = Some(v);
        if x <= 0.0 {
            break;
        }
    }
    // rounding can leave x marginally positive after the last candidate;
    // the final candidate absorbs it
    last
}

/// How often each growth operation fired during one generation, plus how
/// many sub-steps were skipped as unsatisfiable. Exposed so tests can
/// check the dispatch frequencies against the configured probabilities.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounters {
    pub add_local_world: u64,
    pub add_node: u64,
    pub add_intra_edges: u64,
    pub delete_intra_edges: u64,
    pub add_inter_edges: u64,
    pub skipped_substeps: u64,
}

impl OpCounters {
    pub fn total_dispatches(&self) -> u64 {
        self.add_local_world
            + self.add_node
            + self.add_intra_edges
            + self.delete_intra_edges
            + self.add_inter_edges
    }
}
