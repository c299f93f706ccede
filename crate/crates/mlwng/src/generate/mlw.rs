//! Multi-local-world network growth.
//!
//! The graph starts as `n_lw` isolated cliques of `m0` nodes. Growth then
//! repeatedly draws `r` uniform in (0,1) and dispatches one of five
//! operations on the interval it falls in:
//!
//! * `[0, p1)` add a whole new local world (disabled by default),
//! * `[p1, p2)` add one node to a random local world, wired by
//!   degree-preferential attachment,
//! * `[p2, p3)` add edges inside a random local world,
//! * `[p3, p4)` delete edges inside a random local world, biased toward
//!   edges whose far endpoint has small degree,
//! * `[p4, 1)` add edges between two random local worlds.
//!
//! Growth stops once the graph holds `n` nodes. Self-loops, duplicate
//! edges and isolated nodes are never produced; a disconnected result is
//! discarded and regenerated from a derived seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    attachment_weight, preferential_pick, GenError, OpCounters, MAX_CONNECTIVITY_ATTEMPTS,
};
use crate::graph::{CommunityId, Graph, NodeId};
use crate::seed::derive_seed;

/// Default generator parameter values.
pub mod defaults {
    /// Dispatch probability bounds (p1, p2, p3, p4): new-local-world
    /// growth is off, node addition fires 28% of the time, intra-edge
    /// addition 11%, intra-edge deletion 4%, and inter-world wiring the
    /// remaining 57%.
    pub const PROBS: (f64, f64, f64, f64) = (0.0, 0.28, 0.39, 0.43);

    /// Edges wired per new node.
    pub const NODE_EDGES: usize = 2;
    /// Intra-world edges added per dispatch.
    pub const INTRA_ADDITIONS: usize = 2;
    /// Intra-world edge deletions per dispatch.
    pub const INTRA_DELETIONS: usize = 2;
    /// Inter-world edges added per dispatch. One edge per dispatch keeps
    /// the inter/intra balance that reproduces the reference structural
    /// tables; batching two per dispatch overshoots average degree and
    /// dilutes clustering well outside their bands.
    pub const INTER_ADDITIONS: usize = 1;

    /// Attachment offset keeping degree-0 nodes selectable.
    pub const ALPHA: f64 = 1.0;
}

/// Parameters of the multi-local-world generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlwParams {
    /// Final node count.
    pub n: usize,
    /// Number of initial local worlds.
    pub n_lw: usize,
    /// Nodes per initial local world.
    pub m0: usize,
    /// Fraction of the population pre-assigned to initial local worlds.
    pub rho: f64,
    /// Preferential-attachment offset.
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    /// Edges wired when a node is added.
    pub e1: usize,
    /// Edges added per intra-world addition dispatch.
    pub e2: usize,
    /// Edges removed per intra-world deletion dispatch.
    pub e3: usize,
    /// Edges added per inter-world dispatch.
    pub e4: usize,
}

impl MlwParams {
    /// Builds parameters from `(n, rho, m0)` with all defaults; the number
    /// of local worlds is `floor(rho * n / m0)`.
    pub fn from_rho(n: usize, rho: f64, m0: usize) -> Result<Self, GenError> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(GenError::InvalidParams(format!(
                "rho must lie strictly between 0 and 1, got {rho}"
            )));
        }
        if m0 == 0 {
            return Err(GenError::InvalidParams("m0 must be >= 3".into()));
        }
        // tiny epsilon so decimal rho values that round just below an
        // integer (e.g. 0.3 * 1000 / 10) still floor to it
        let n_lw = (rho * n as f64 / m0 as f64 + 1e-9).floor() as usize;
        let params = MlwParams {
            n,
            n_lw,
            m0,
            rho,
            alpha: defaults::ALPHA,
            p1: defaults::PROBS.0,
            p2: defaults::PROBS.1,
            p3: defaults::PROBS.2,
            p4: defaults::PROBS.3,
            e1: defaults::NODE_EDGES,
            e2: defaults::INTRA_ADDITIONS,
            e3: defaults::INTRA_DELETIONS,
            e4: defaults::INTER_ADDITIONS,
        };
        params.validate()?;
        Ok(params)
    }

    /// Initial edge count of one local world (a clique of `m0` nodes).
    pub fn initial_clique_edges(&self) -> usize {
        self.m0 * (self.m0 - 1) / 2
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let fail = |msg: String| Err(GenError::InvalidParams(msg));
        if self.m0 < 3 {
            return fail(format!("m0 must be >= 3, got {}", self.m0));
        }
        if self.n_lw < 3 {
            return fail(format!("n_lw must be >= 3, got {}", self.n_lw));
        }
        if self.n <= self.n_lw * self.m0 {
            return fail(format!(
                "n must exceed n_lw * m0 = {} so growth can occur, got n = {}",
                self.n_lw * self.m0,
                self.n
            ));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return fail(format!("rho must lie strictly between 0 and 1, got {}", self.rho));
        }
        if !(0.0 <= self.p1 && self.p1 <= self.p2 && self.p2 <= self.p3 && self.p3 <= self.p4 && self.p4 <= 1.0)
        {
            return fail(format!(
                "operation probabilities must satisfy 0 <= p1 <= p2 <= p3 <= p4 <= 1, got ({}, {}, {}, {})",
                self.p1, self.p2, self.p3, self.p4
            ));
        }
        if self.p2 <= self.p1 {
            return fail("p2 must exceed p1 so node additions can occur".into());
        }
        if self.e1 == 0 || self.e2 == 0 || self.e3 == 0 || self.e4 == 0 {
            return fail("edge batch sizes e1..e4 must all be >= 1".into());
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return fail(format!("alpha must be > 0, got {}", self.alpha));
        }
        Ok(())
    }
}

/// A generated multi-local-world network plus generation metadata.
#[derive(Debug, Clone)]
pub struct MlwNetwork {
    pub graph: Graph,
    pub counters: OpCounters,
    /// Connectivity regenerations that were needed (0 = first try).
    pub regen_attempts: u32,
}

/// Generates one multi-local-world network. Deterministic in
/// `(params, seed)`.
pub fn gen_mlw(params: &MlwParams, seed: u64) -> Result<MlwNetwork, GenError> {
    params.validate()?;
    for attempt in 0..MAX_CONNECTIVITY_ATTEMPTS {
        let mut builder = Builder::new(*params, derive_seed(seed, &[attempt as u64]));
        builder.grow();
        if builder.graph.is_connected() {
            let Builder {
                mut graph,
                community,
                counters,
                ..
            } = builder;
            graph.set_communities(community).expect("one label per node");
            return Ok(MlwNetwork {
                graph,
                counters,
                regen_attempts: attempt,
            });
        }
    }
    Err(GenError::Disconnected {
        attempts: MAX_CONNECTIVITY_ATTEMPTS,
    })
}

/// Weight with which an incident edge is chosen for deletion: uniform
/// share of the world, scaled down for far endpoints that already carry a
/// large share of the world's attachment weight.
fn deletion_weight(far_degree: usize, world_weight_sum: f64, world_size: usize, alpha: f64) -> f64 {
    (1.0 / (world_size as f64 - 1.0))
        * (1.0 - attachment_weight(far_degree, alpha) / world_weight_sum)
}

struct Builder {
    p: MlwParams,
    graph: Graph,
    community: Vec<CommunityId>,
    /// Member lists per local world, in insertion order.
    worlds: Vec<Vec<NodeId>>,
    /// Intra-world edge counts, for O(1) completeness checks.
    intra_edges: Vec<usize>,
    rng: ChaCha8Rng,
    counters: OpCounters,
}

/// Resample budget for duplicate-edge rejections within one sub-step.
const MAX_EDGE_ATTEMPTS: u32 = 100;

impl Builder {
    fn new(p: MlwParams, seed: u64) -> Self {
        let mut builder = Builder {
            p,
            graph: Graph::new(0),
            community: Vec::with_capacity(p.n),
            worlds: Vec::with_capacity(p.n_lw),
            intra_edges: Vec::with_capacity(p.n_lw),
            rng: ChaCha8Rng::seed_from_u64(seed),
            counters: OpCounters::default(),
        };
        for _ in 0..p.n_lw {
            builder.spawn_clique();
        }
        builder
    }

    /// Appends a fresh fully connected local world of `m0` nodes.
    fn spawn_clique(&mut self) {
        let world_id = self.worlds.len() as CommunityId;
        let mut members = Vec::with_capacity(self.p.m0);
        for _ in 0..self.p.m0 {
            let node = self.graph.push_node();
            self.community.push(world_id);
            members.push(node);
        }
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                self.graph
                    .add_edge(members[i], members[j])
                    .expect("fresh clique nodes");
            }
        }
        self.intra_edges.push(self.p.initial_clique_edges());
        self.worlds.push(members);
    }

    fn grow(&mut self) {
        while self.graph.node_count() < self.p.n {
            let r = self.rng.gen::<f64>();
            if r < self.p.p1 {
                self.op_add_local_world();
            } else if r < self.p.p2 {
                self.op_add_node();
            } else if r < self.p.p3 {
                self.op_add_intra_edges();
            } else if r < self.p.p4 {
                self.op_delete_intra_edges();
            } else {
                self.op_add_inter_edges();
            }
        }
    }

    fn op_add_local_world(&mut self) {
        self.counters.add_local_world += 1;
        // a whole clique would overshoot the target size; skip
        if self.graph.node_count() + self.p.m0 > self.p.n {
            self.counters.skipped_substeps += 1;
            return;
        }
        self.spawn_clique();
    }

    fn op_add_node(&mut self) {
        self.counters.add_node += 1;
        let world = self.rng.gen_range(0..self.worlds.len());
        let mut targets: Vec<NodeId> = Vec::with_capacity(self.p.e1);
        for _ in 0..self.p.e1 {
            match preferential_pick(
                &mut self.rng,
                &self.worlds[world],
                |v| self.graph.degree(v),
                self.p.alpha,
                &targets,
            ) {
                Some(t) => targets.push(t),
                None => self.counters.skipped_substeps += 1,
            }
        }
        let node = self.graph.push_node();
        self.community.push(world as CommunityId);
        for &t in &targets {
            self.graph.add_edge(node, t).expect("fresh node");
            self.intra_edges[world] += 1;
        }
        self.worlds[world].push(node);
    }

    fn op_add_intra_edges(&mut self) {
        self.counters.add_intra_edges += 1;
        let world = self.rng.gen_range(0..self.worlds.len());
        for _ in 0..self.p.e2 {
            self.add_one_intra_edge(world);
        }
    }

    fn add_one_intra_edge(&mut self, world: usize) {
        let members = &self.worlds[world];
        let size = members.len();
        if size < 2 || self.intra_edges[world] == size * (size - 1) / 2 {
            self.counters.skipped_substeps += 1;
            return;
        }
        for _ in 0..MAX_EDGE_ATTEMPTS {
            let members = &self.worlds[world];
            let u = members[self.rng.gen_range(0..members.len())];
            let Some(v) = preferential_pick(
                &mut self.rng,
                members,
                |x| self.graph.degree(x),
                self.p.alpha,
                &[u],
            ) else {
                break;
            };
            if self.graph.add_edge(u, v).is_ok() {
                self.intra_edges[world] += 1;
                return;
            }
        }
        self.counters.skipped_substeps += 1;
    }

    fn op_delete_intra_edges(&mut self) {
        self.counters.delete_intra_edges += 1;
        let world = self.rng.gen_range(0..self.worlds.len());
        for _ in 0..self.p.e3 {
            // a fresh node is drawn for every removal
            let members = &self.worlds[world];
            let node = members[self.rng.gen_range(0..members.len())];
            if !self.delete_one_intra_edge(world, node) {
                self.counters.skipped_substeps += 1;
            }
        }
    }

    /// Removes one intra-world edge incident to `node`, preferring edges
    /// whose far endpoint has small degree. Removals that would isolate
    /// either endpoint are never candidates; returns whether an edge was
    /// removed.
    fn delete_one_intra_edge(&mut self, world: usize, node: NodeId) -> bool {
        let members = &self.worlds[world];
        let size = members.len();
        if size < 2 || self.graph.degree(node) < 2 {
            return false;
        }
        let world_label = world as CommunityId;
        let candidates: Vec<NodeId> = self
            .graph
            .neighbors(node)
            .iter()
            .copied()
            .filter(|&v| self.community[v as usize] == world_label && self.graph.degree(v) >= 2)
            .collect();
        if candidates.is_empty() {
            return false;
        }
        let weight_sum: f64 = members
            .iter()
            .map(|&v| attachment_weight(self.graph.degree(v), self.p.alpha))
            .sum();
        let weights: Vec<f64> = candidates
            .iter()
            .map(|&v| deletion_weight(self.graph.degree(v), weight_sum, size, self.p.alpha))
            .collect();
        let total: f64 = weights.iter().sum();
        let mut x = self.rng.gen::<f64>() * total;
        let mut picked = *candidates.last().unwrap();
        for (&v, &w) in candidates.iter().zip(&weights) {
            x -= w;
            if x <= 0.0 {
                picked = v;
                break;
            }
        }
        self.graph.remove_edge(node, picked);
        self.intra_edges[world] -= 1;
        true
    }

    fn op_add_inter_edges(&mut self) {
        self.counters.add_inter_edges += 1;
        for _ in 0..self.p.e4 {
            self.add_one_inter_edge();
        }
    }

    fn add_one_inter_edge(&mut self) {
        if self.worlds.len() < 2 {
            self.counters.skipped_substeps += 1;
            return;
        }
        for _ in 0..MAX_EDGE_ATTEMPTS {
            let a = self.rng.gen_range(0..self.worlds.len());
            let mut b = self.rng.gen_range(0..self.worlds.len() - 1);
            if b >= a {
                b += 1;
            }
            let Some(u) = preferential_pick(
                &mut self.rng,
                &self.worlds[a],
                |v| self.graph.degree(v),
                self.p.alpha,
                &[],
            ) else {
                continue;
            };
            let Some(v) = preferential_pick(
                &mut self.rng,
                &self.worlds[b],
                |x| self.graph.degree(x),
                self.p.alpha,
                &[],
            ) else {
                continue;
            };
            if self.graph.add_edge(u, v).is_ok() {
                return;
            }
        }
        self.counters.skipped_substeps += 1;
    }
}
