//! Undirected simple graph with the structural statistics reported by the
//! experiment tables: average degree, exact all-pairs average path length,
//! mean local clustering, and per-community inter/intra connection ratios.
//!
//! Graphs are mutated only while a generator builds them; afterwards they
//! are shared read-only across concurrent simulation runs.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

pub type NodeId = u32;
pub type CommunityId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph has no community labels")]
    NoCommunityLabels,
    #[error("community labels must cover every node (expected {expected}, got {got})")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("no community has an intra-community edge")]
    NoIntraEdges,
}

/// Rejection signal from [`Graph::add_edge`]; callers resample endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRejection {
    SelfLoop,
    Duplicate,
}

fn ordered(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_set: HashSet<(NodeId, NodeId)>,
    community: Option<Vec<CommunityId>>,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); node_count],
            edge_set: HashSet::new(),
            community: None,
        }
    }

    /// Fully connected graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                g.add_edge(u, v).expect("distinct fresh pair");
            }
        }
        g
    }

    /// Appends an isolated node and returns its id.
    pub fn push_node(&mut self) -> NodeId {
        self.adj.push(Vec::new());
        (self.adj.len() - 1) as NodeId
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_set.len()
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u as usize].len()
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_set.contains(&ordered(u, v))
    }

    /// Inserts the edge, or reports why the endpoints must be resampled.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), EdgeRejection> {
        if u == v {
            return Err(EdgeRejection::SelfLoop);
        }
        if !self.edge_set.insert(ordered(u, v)) {
            return Err(EdgeRejection::Duplicate);
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        Ok(())
    }

    /// Removes the edge if present; returns whether it existed.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if !self.edge_set.remove(&ordered(u, v)) {
            return false;
        }
        let pos = self.adj[u as usize].iter().position(|&x| x == v).unwrap();
        self.adj[u as usize].swap_remove(pos);
        let pos = self.adj[v as usize].iter().position(|&x| x == u).unwrap();
        self.adj[v as usize].swap_remove(pos);
        true
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges_sorted(&self) -> Vec<(NodeId, NodeId)> {
        let mut edges: Vec<(NodeId, NodeId)> = self.edge_set.iter().copied().collect();
        edges.sort_unstable();
        edges
    }

    /// Attaches ground-truth community labels, one per node.
    pub fn set_communities(&mut self, labels: Vec<CommunityId>) -> Result<(), GraphError> {
        if labels.len() != self.node_count() {
            return Err(GraphError::LabelCountMismatch {
                expected: self.node_count(),
                got: labels.len(),
            });
        }
        self.community = Some(labels);
        Ok(())
    }

    pub fn communities(&self) -> Option<&[CommunityId]> {
        self.community.as_deref()
    }

    /// True iff a traversal from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue: Vec<NodeId> = vec![0];
        seen[0] = true;
        let mut reached = 1;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    reached += 1;
                    queue.push(v);
                }
            }
        }
        reached == n
    }

    /// Structural statistics; `avg_path_length` is `None` when disconnected.
    pub fn stats(&self) -> GraphStats {
        let n = self.node_count();
        let avg_degree = 2.0 * self.edge_count() as f64 / n as f64;
        let connected = self.is_connected();
        let avg_path_length = if connected {
            Some(self.average_path_length())
        } else {
            None
        };
        GraphStats {
            avg_degree,
            avg_path_length,
            avg_clustering: self.average_clustering(),
            connected,
        }
    }

    /// Exact mean shortest-path hop count over all unordered node pairs,
    /// by breadth-first traversal from every node. Must only be called on
    /// a connected graph.
    fn average_path_length(&self) -> f64 {
        let n = self.node_count();
        let mut dist = vec![u32::MAX; n];
        let mut queue: Vec<NodeId> = Vec::with_capacity(n);
        let mut total: u64 = 0;
        for src in 0..n as NodeId {
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            queue.clear();
            queue.push(src);
            dist[src as usize] = 0;
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                let du = dist[u as usize];
                for &v in self.neighbors(u) {
                    if dist[v as usize] == u32::MAX {
                        dist[v as usize] = du + 1;
                        queue.push(v);
                    }
                }
            }
            total += dist.iter().map(|&d| d as u64).sum::<u64>();
        }
        // every unordered pair counted twice
        total as f64 / (n as f64 * (n as f64 - 1.0))
    }

    /// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
    fn average_clustering(&self) -> f64 {
        let n = self.node_count();
        let mut sum = 0.0;
        for u in 0..n as NodeId {
            let nbrs = self.neighbors(u);
            let d = nbrs.len();
            if d < 2 {
                continue;
            }
            let mut links = 0u64;
            for i in 0..d {
                for j in (i + 1)..d {
                    if self.has_edge(nbrs[i], nbrs[j]) {
                        links += 1;
                    }
                }
            }
            sum += 2.0 * links as f64 / (d as f64 * (d as f64 - 1.0));
        }
        sum / n as f64
    }

    /// Per-community inter/intra connection ratios.
    ///
    /// An edge is inter-community iff its endpoints carry different labels;
    /// it counts once for each of the two communities it touches. Each
    /// community's ratio is `(inter / intra) / size`. Communities without
    /// any intra edge are flagged and excluded from the mean.
    pub fn community_ratio(&self) -> Result<CommunityRatioReport, GraphError> {
        let labels = self.community.as_ref().ok_or(GraphError::NoCommunityLabels)?;
        let mut acc: BTreeMap<CommunityId, CommunityAcc> = BTreeMap::new();
        for (node, &c) in labels.iter().enumerate() {
            acc.entry(c).or_default().size += 1;
            let _ = node;
        }
        for u in 0..self.node_count() as NodeId {
            for &v in self.neighbors(u) {
                if v <= u {
                    continue;
                }
                let (cu, cv) = (labels[u as usize], labels[v as usize]);
                if cu == cv {
                    acc.get_mut(&cu).unwrap().intra += 1;
                } else {
                    acc.get_mut(&cu).unwrap().inter += 1;
                    acc.get_mut(&cv).unwrap().inter += 1;
                }
            }
        }
        let mut per_community = Vec::new();
        let mut excluded = Vec::new();
        for (&c, a) in &acc {
            if a.intra == 0 {
                excluded.push(c);
            } else {
                let ratio = (a.inter as f64 / a.intra as f64) / a.size as f64;
                per_community.push((c, ratio));
            }
        }
        if per_community.is_empty() {
            return Err(GraphError::NoIntraEdges);
        }
        let k = per_community.len() as f64;
        let mean_ratio = per_community.iter().map(|(_, r)| r).sum::<f64>() / k;
        let var = per_community
            .iter()
            .map(|(_, r)| (r - mean_ratio).powi(2))
            .sum::<f64>()
            / k;
        Ok(CommunityRatioReport {
            per_community,
            excluded,
            mean_ratio,
            std: var.sqrt(),
        })
    }
}

#[derive(Default)]
struct CommunityAcc {
    size: usize,
    intra: u64,
    inter: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub avg_degree: f64,
    pub avg_path_length: Option<f64>,
    pub avg_clustering: f64,
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityRatioReport {
    /// `(community, ratio)` for every community with at least one intra edge.
    pub per_community: Vec<(CommunityId, f64)>,
    /// Communities whose ratio is undefined (no intra edges).
    pub excluded: Vec<CommunityId>,
    pub mean_ratio: f64,
    pub std: f64,
}
