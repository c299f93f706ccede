//! Text edge-list format.
//!
//! ```text
//! N <node_count>
//! <u> <v>              one edge per line, 0-indexed, u < v, sorted
//! C <node> <community> optional label block, one line per node, sorted
//! ```
//!
//! The writer emits a fully sorted file so identical graphs serialize to
//! identical bytes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{CommunityId, Graph, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum EdgeListError {
    #[error("line 1 must be `N <node_count>`")]
    MissingHeader,
    #[error("line {line}: cannot parse `{content}`")]
    BadLine { line: usize, content: String },
    #[error("line {line}: node {node} out of range (node count {count})")]
    NodeOutOfRange { line: usize, node: u64, count: usize },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: NodeId },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: NodeId, v: NodeId },
    #[error("line {line}: duplicate label for node {node}")]
    DuplicateLabel { line: usize, node: NodeId },
    #[error("community block present but {missing} nodes have no label")]
    PartialLabels { missing: usize },
}

pub fn edge_list_string(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "N {}", g.node_count()).unwrap();
    for (u, v) in g.edges_sorted() {
        writeln!(out, "{u} {v}").unwrap();
    }
    if let Some(labels) = g.communities() {
        for (node, &c) in labels.iter().enumerate() {
            writeln!(out, "C {node} {c}").unwrap();
        }
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph, EdgeListError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(EdgeListError::MissingHeader)?;
    let node_count: usize = header
        .strip_prefix("N ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or(EdgeListError::MissingHeader)?;
    let mut g = Graph::new(node_count);
    let mut labels: Vec<Option<CommunityId>> = vec![None; node_count];
    let mut any_label = false;

    for (idx, raw) in lines {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let bad = || EdgeListError::BadLine {
            line,
            content: content.to_string(),
        };
        if let Some(rest) = content.strip_prefix("C ") {
            let mut it = rest.split_whitespace();
            let node: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let community: CommunityId =
                it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            if node >= node_count as u64 {
                return Err(EdgeListError::NodeOutOfRange {
                    line,
                    node,
                    count: node_count,
                });
            }
            let slot = &mut labels[node as usize];
            if slot.is_some() {
                return Err(EdgeListError::DuplicateLabel {
                    line,
                    node: node as NodeId,
                });
            }
            *slot = Some(community);
            any_label = true;
        } else {
            let mut it = content.split_whitespace();
            let u: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let v: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            for node in [u, v] {
                if node >= node_count as u64 {
                    return Err(EdgeListError::NodeOutOfRange {
                        line,
                        node,
                        count: node_count,
                    });
                }
            }
            let (u, v) = (u as NodeId, v as NodeId);
            g.add_edge(u, v).map_err(|rej| match rej {
                crate::graph::EdgeRejection::SelfLoop => EdgeListError::SelfLoop { line, node: u },
                crate::graph::EdgeRejection::Duplicate => {
                    EdgeListError::DuplicateEdge { line, u, v }
                }
            })?;
        }
    }

    if any_label {
        let missing = labels.iter().filter(|l| l.is_none()).count();
        if missing > 0 {
            return Err(EdgeListError::PartialLabels { missing });
        }
        g.set_communities(labels.into_iter().map(Option::unwrap).collect())
            .expect("length checked");
    }
    Ok(g)
}
