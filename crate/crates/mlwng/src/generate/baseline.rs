//! Baseline topologies density-matched to a reference average degree:
//! uniform random graphs, rewired ring lattices, and preferential-
//! attachment growth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GenError, MAX_CONNECTIVITY_ATTEMPTS};
use crate::graph::{Graph, NodeId};
use crate::seed::derive_seed;

/// Rewiring probability bringing ring-lattice clustering (2/3) down into
/// the band the comparison experiments use.
pub const DEFAULT_SW_REWIRE_PROB: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    RandomGraph,
    SmallWorld,
    ScaleFree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineParams {
    pub kind: BaselineKind,
    pub n: usize,
    pub target_avg_degree: f64,
    /// Only used by the small-world generator.
    pub sw_rewire_prob: f64,
}

/// Random graph: exact edge budget `round(n * k / 2)`.
pub fn edge_budget(n: usize, target_avg_degree: f64) -> usize {
    (n as f64 * target_avg_degree / 2.0).round() as usize
}

/// Small world: nearest even ring-lattice degree.
pub fn nearest_even_degree(target_avg_degree: f64) -> usize {
    2 * (target_avg_degree / 2.0).round().max(1.0) as usize
}

/// Scale free: edges wired per new node, `round(k / 2)`.
pub fn attachment_count(target_avg_degree: f64) -> usize {
    (target_avg_degree / 2.0).round().max(1.0) as usize
}

impl BaselineParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let fail = |msg: String| Err(GenError::InvalidParams(msg));
        if self.n < 3 {
            return fail(format!("baseline graphs need n >= 3, got {}", self.n));
        }
        if !(self.target_avg_degree > 0.0 && self.target_avg_degree < (self.n - 1) as f64) {
            return fail(format!(
                "target average degree must lie in (0, n - 1), got {}",
                self.target_avg_degree
            ));
        }
        if !(0.0..=1.0).contains(&self.sw_rewire_prob) {
            return fail(format!(
                "rewiring probability must lie in [0, 1], got {}",
                self.sw_rewire_prob
            ));
        }
        if self.kind == BaselineKind::ScaleFree
            && attachment_count(self.target_avg_degree) + 1 > self.n
        {
            return fail("scale-free seed clique would exceed n".into());
        }
        Ok(())
    }
}

/// Generates one connected baseline graph, regenerating from derived
/// seeds until connected. Deterministic in `(params, seed)`.
pub fn gen_baseline(params: &BaselineParams, seed: u64) -> Result<Graph, GenError> {
    params.validate()?;
    for attempt in 0..MAX_CONNECTIVITY_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[attempt as u64]));
        let g = match params.kind {
            BaselineKind::RandomGraph => random_graph(params, &mut rng),
            BaselineKind::SmallWorld => small_world(params, &mut rng),
            BaselineKind::ScaleFree => scale_free(params, &mut rng),
        };
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GenError::Disconnected {
        attempts: MAX_CONNECTIVITY_ATTEMPTS,
    })
}

/// Uniform graph with an exact number of edges.
fn random_graph(params: &BaselineParams, rng: &mut ChaCha8Rng) -> Graph {
    let n = params.n;
    let m = edge_budget(n, params.target_avg_degree).min(n * (n - 1) / 2);
    let mut g = Graph::new(n);
    while g.edge_count() < m {
        let u = rng.gen_range(0..n) as NodeId;
        let v = rng.gen_range(0..n) as NodeId;
        let _ = g.add_edge(u, v);
    }
    g
}

/// Ring lattice over the nearest even degree, each clockwise edge rewired
/// with the configured probability.
fn small_world(params: &BaselineParams, rng: &mut ChaCha8Rng) -> Graph {
    let n = params.n;
    let k = nearest_even_degree(params.target_avg_degree).min(n - 1);
    let mut g = Graph::new(n);
    let mut ring = Vec::with_capacity(n * k / 2);
    for u in 0..n {
        for j in 1..=(k / 2) {
            let v = (u + j) % n;
            if g.add_edge(u as NodeId, v as NodeId).is_ok() {
                ring.push((u as NodeId, v as NodeId));
            }
        }
    }
    for (u, v) in ring {
        if rng.gen::<f64>() >= params.sw_rewire_prob {
            continue;
        }
        if g.degree(u) >= n - 1 {
            continue;
        }
        // keep the near end, move the far end somewhere fresh
        let w = loop {
            let w = rng.gen_range(0..n) as NodeId;
            if w != u && !g.has_edge(u, w) {
                break w;
            }
        };
        if g.remove_edge(u, v) {
            g.add_edge(u, w).expect("checked fresh pair");
        }
    }
    g
}

/// Growth with degree-preferential attachment: a seed clique of `m + 1`
/// nodes, then each new node wires `m` edges to distinct existing nodes
/// drawn from the edge-endpoint multiset.
fn scale_free(params: &BaselineParams, rng: &mut ChaCha8Rng) -> Graph {
    let n = params.n;
    let m = attachment_count(params.target_avg_degree);
    let seed_size = (m + 1).min(n);
    let mut g = Graph::new(seed_size);
    let mut endpoints: Vec<NodeId> = Vec::new();
    for u in 0..seed_size as NodeId {
        for v in (u + 1)..seed_size as NodeId {
            g.add_edge(u, v).expect("fresh clique");
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    while g.node_count() < n {
        let node = g.push_node();
        let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
        while chosen.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            g.add_edge(node, t).expect("fresh node");
            endpoints.push(node);
            endpoints.push(t);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgelist::edge_list_string;

    #[test]
    fn matching_arithmetic() {
        assert_eq!(edge_budget(1000, 9.41), 4705);
        assert_eq!(nearest_even_degree(9.41), 10);
        assert_eq!(attachment_count(9.41), 5);
        assert_eq!(nearest_even_degree(16.43), 16);
        assert_eq!(nearest_even_degree(22.91), 22);
        assert_eq!(nearest_even_degree(72.41), 72);
        assert_eq!(attachment_count(72.41), 36);
    }

    #[test]
    fn random_graph_has_exact_edge_budget() {
        let params = BaselineParams {
            kind: BaselineKind::RandomGraph,
            n: 500,
            target_avg_degree: 9.41,
            sw_rewire_prob: 0.0,
        };
        let g = gen_baseline(&params, 3).unwrap();
        assert_eq!(g.edge_count(), edge_budget(500, 9.41));
        assert!(g.is_connected());
        // sparse uniform graphs have clustering near k/n
        assert!(g.stats().avg_clustering < 0.08);
    }

    #[test]
    fn unrewired_ring_lattice_clustering() {
        let params = BaselineParams {
            kind: BaselineKind::SmallWorld,
            n: 1000,
            target_avg_degree: 10.0,
            sw_rewire_prob: 0.0,
        };
        let g = gen_baseline(&params, 1).unwrap();
        let stats = g.stats();
        assert_eq!(stats.avg_degree, 10.0);
        // ring lattice of even degree k: clustering = 3(k-2) / (4(k-1))
        assert!((stats.avg_clustering - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn rewiring_lowers_clustering() {
        let params = BaselineParams {
            kind: BaselineKind::SmallWorld,
            n: 1000,
            target_avg_degree: 10.0,
            sw_rewire_prob: 0.2,
        };
        let g = gen_baseline(&params, 1).unwrap();
        let cc = g.stats().avg_clustering;
        assert!(cc > 0.2 && cc < 0.5, "cc = {cc}");
        assert!((g.stats().avg_degree - 10.0).abs() < 1e-9);
    }

    #[test]
    fn scale_free_edge_count_is_exact() {
        let params = BaselineParams {
            kind: BaselineKind::ScaleFree,
            n: 1000,
            target_avg_degree: 9.41,
            sw_rewire_prob: 0.0,
        };
        let g = gen_baseline(&params, 5).unwrap();
        // seed clique of 6 nodes plus 5 edges per subsequent node
        assert_eq!(g.edge_count(), 15 + (1000 - 6) * 5);
        assert!((g.stats().avg_degree - 9.97).abs() < 1e-9);
    }

    #[test]
    fn scale_free_grows_hubs() {
        let params = BaselineParams {
            kind: BaselineKind::ScaleFree,
            n: 600,
            target_avg_degree: 6.0,
            sw_rewire_prob: 0.0,
        };
        let g = gen_baseline(&params, 2).unwrap();
        let max_degree = (0..g.node_count() as NodeId).map(|u| g.degree(u)).max().unwrap();
        assert!(max_degree > 30, "expected a hub, max degree {max_degree}");
    }

    #[test]
    fn baselines_are_deterministic() {
        for kind in [
            BaselineKind::RandomGraph,
            BaselineKind::SmallWorld,
            BaselineKind::ScaleFree,
        ] {
            let params = BaselineParams {
                kind,
                n: 200,
                target_avg_degree: 8.0,
                sw_rewire_prob: 0.2,
            };
            let a = gen_baseline(&params, 11).unwrap();
            let b = gen_baseline(&params, 11).unwrap();
            assert_eq!(edge_list_string(&a), edge_list_string(&b));
        }
    }

    #[test]
    fn validation_rejects_bad_degree() {
        let params = BaselineParams {
            kind: BaselineKind::RandomGraph,
            n: 10,
            target_avg_degree: 9.5,
            sw_rewire_prob: 0.0,
        };
        assert!(params.validate().is_err());
    }
}
