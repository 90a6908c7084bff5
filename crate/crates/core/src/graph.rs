// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Coupling graphs of physical qubits.
//!
//! A [`CouplingGraph`] keeps the platform's own qubit labels everywhere. Induced
//! subgraphs carry the labels of the platform they were cut from, so an allocation
//! onto a subarchitecture is already an allocation onto the full platform.
//!
//! Internally every graph also holds a dense index space `0..n` (labels in
//! ascending order) with adjacency lists and bit rows; the search routines in
//! [`crate::iso`], [`crate::enumerate`] and [`crate::mapper`] work on indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::BitSet;

/// Physical qubit label as printed in the platform file.
pub type Qubit = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed platform file: {0}")]
    Malformed(String),
    #[error("self-loop on qubit {0}")]
    SelfLoop(Qubit),
    #[error("edge ({u}, {v}) has an endpoint outside the declared qubit range 0..{qubits}")]
    EndpointOutOfRange { u: Qubit, v: Qubit, qubits: u32 },
    #[error("qubit {0} is not a vertex of the graph")]
    UnknownVertex(Qubit),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is empty")]
    Empty,
}

/// Sorted, duplicate-free set of physical qubit labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Qubit>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = Qubit>) -> Self {
        let mut v: Vec<Qubit> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn members(&self) -> &[Qubit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: Qubit) -> bool {
        self.0.binary_search(&q).is_ok()
    }
}

impl FromIterator<Qubit> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Qubit>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Undirected coupling graph `(P, C)` with stable qubit labels.
#[derive(Clone)]
pub struct CouplingGraph {
    name: String,
    labels: Vec<Qubit>,
    adj: Vec<Vec<usize>>,
    rows: Vec<BitSet>,
    edge_count: usize,
}

impl PartialEq for CouplingGraph {
    /// Structural equality: same labels and same edges. The name is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adj == other.adj
    }
}

impl Eq for CouplingGraph {}

impl fmt::Debug for CouplingGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CouplingGraph")
            .field("name", &self.name)
            .field("vertices", &self.labels)
            .field("edges", &self.edges())
            .finish()
    }
}

/// On-disk platform description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PlatformFile {
    pub name: String,
    pub qubits: u32,
    pub edges: Vec<[Qubit; 2]>,
    /// Explicit vertex labels. When absent the vertices are `0..qubits`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Qubit>>,
}

/// Parses the platform JSON format.
pub fn parse_platform(text: &str) -> Result<CouplingGraph, GraphError> {
    let file: PlatformFile =
        serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
    CouplingGraph::from_platform_file(&file)
}

impl CouplingGraph {
    /// Builds a graph from explicit vertices and edges. Duplicate vertices and
    /// edges (in either orientation) collapse.
    pub fn new(
        name: impl Into<String>,
        vertices: impl IntoIterator<Item = Qubit>,
        edges: impl IntoIterator<Item = (Qubit, Qubit)>,
    ) -> Result<Self, GraphError> {
        let labels: Vec<Qubit> = VertexSet::new(vertices).0;
        let mut adj = vec![Vec::new(); labels.len()];
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let iu = labels.binary_search(&u).map_err(|_| GraphError::UnknownVertex(u))?;
            let iv = labels.binary_search(&v).map_err(|_| GraphError::UnknownVertex(v))?;
            if seen.insert((iu.min(iv), iu.max(iv))) {
                adj[iu].push(iv);
                adj[iv].push(iu);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self::from_parts(name.into(), labels, adj))
    }

    /// Graph on vertices `0..qubits`.
    pub fn with_qubits(
        name: impl Into<String>,
        qubits: u32,
        edges: impl IntoIterator<Item = (Qubit, Qubit)>,
    ) -> Result<Self, GraphError> {
        let edges: Vec<(Qubit, Qubit)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if u >= qubits || v >= qubits {
                return Err(GraphError::EndpointOutOfRange { u, v, qubits });
            }
        }
        Self::new(name, 0..qubits, edges)
    }

    pub fn from_platform_file(file: &PlatformFile) -> Result<Self, GraphError> {
        let edges = file.edges.iter().map(|e| (e[0], e[1]));
        match &file.vertices {
            None => Self::with_qubits(file.name.clone(), file.qubits, edges),
            Some(vs) => {
                if vs.len() != file.qubits as usize {
                    return Err(GraphError::Malformed(format!(
                        "\"qubits\" is {} but {} vertices are listed",
                        file.qubits,
                        vs.len()
                    )));
                }
                Self::new(file.name.clone(), vs.iter().copied(), edges)
            }
        }
    }

    /// Platform file for this graph. Graphs whose labels are exactly `0..n`
    /// omit the explicit vertex list.
    pub fn to_platform_file(&self) -> PlatformFile {
        let contiguous = self.labels.iter().enumerate().all(|(i, &l)| l as usize == i);
        PlatformFile {
            name: self.name.clone(),
            qubits: self.labels.len() as u32,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            vertices: (!contiguous).then(|| self.labels.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_platform_file()).expect("platform serializes")
    }

    fn from_parts(name: String, labels: Vec<Qubit>, adj: Vec<Vec<usize>>) -> Self {
        let n = labels.len();
        let rows = adj
            .iter()
            .map(|list| {
                let mut row = BitSet::new(n);
                list.iter().for_each(|&j| row.insert(j));
                row
            })
            .collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        CouplingGraph {
            name,
            labels,
            adj,
            rows,
            edge_count,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Vertex labels in ascending order.
    pub fn vertices(&self) -> &[Qubit] {
        &self.labels
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet(self.labels.clone())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn average_degree(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.labels.len() as f64
        }
    }

    /// Edges as `(smaller, larger)` label pairs, sorted.
    pub fn edges(&self) -> Vec<(Qubit, Qubit)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, list) in self.adj.iter().enumerate() {
            for &j in list.iter().filter(|&&j| j > i) {
                out.push((self.labels[i], self.labels[j]));
            }
        }
        out
    }

    pub fn contains_vertex(&self, q: Qubit) -> bool {
        self.index_of(q).is_some()
    }

    pub fn has_edge(&self, u: Qubit, v: Qubit) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(i), Some(j)) => self.rows[i].contains(j),
            _ => false,
        }
    }

    pub fn neighbors(&self, q: Qubit) -> impl Iterator<Item = Qubit> + '_ {
        self.index_of(q)
            .into_iter()
            .flat_map(move |i| self.adj[i].iter().map(move |&j| self.labels[j]))
    }

    pub fn degree(&self, q: Qubit) -> Option<usize> {
        self.index_of(q).map(|i| self.adj[i].len())
    }

    /// Dense index of a label.
    pub fn index_of(&self, q: Qubit) -> Option<usize> {
        self.labels.binary_search(&q).ok()
    }

    /// Label of a dense index.
    pub fn label(&self, i: usize) -> Qubit {
        self.labels[i]
    }

    pub(crate) fn adjacency(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub(crate) fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    pub(crate) fn degree_at(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// SHA-256 over the canonical label/edge listing; used as a cache key.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.labels.len() as u64).to_le_bytes());
        for &l in &self.labels {
            h.update(l.to_le_bytes());
        }
        for (u, v) in self.edges() {
            h.update(u.to_le_bytes());
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// True iff every pair of vertices is joined by a path. Empty and
    /// single-vertex graphs are connected.
    pub fn is_connected(&self) -> bool {
        self.labels.is_empty() || self.reach_from(0).len() == self.labels.len()
    }

    fn reach_from(&self, start: usize) -> BitSet {
        let mut seen = BitSet::new(self.labels.len());
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &j in &self.adj[i] {
                if !seen.contains(j) {
                    seen.insert(j);
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Maximal connected vertex sets, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut assigned = BitSet::new(self.labels.len());
        let mut out = Vec::new();
        for start in 0..self.labels.len() {
            if assigned.contains(start) {
                continue;
            }
            let comp = self.reach_from(start);
            assigned.union_with(&comp);
            out.push(VertexSet(comp.iter().map(|i| self.labels[i]).collect()));
        }
        out
    }

    /// Subgraph induced by `s`, keeping the original labels and name.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<CouplingGraph, GraphError> {
        let idx: Vec<usize> = s
            .members()
            .iter()
            .map(|&q| self.index_of(q).ok_or(GraphError::UnknownVertex(q)))
            .collect::<Result<_, _>>()?;
        Ok(self.induced_by_indices(&idx))
    }

    /// Induced subgraph from ascending dense indices.
    pub(crate) fn induced_by_indices(&self, idx: &[usize]) -> CouplingGraph {
        let mut local = vec![usize::MAX; self.labels.len()];
        for (k, &i) in idx.iter().enumerate() {
            local[i] = k;
        }
        let adj = idx
            .iter()
            .map(|&i| {
                self.adj[i]
                    .iter()
                    .filter_map(|&j| (local[j] != usize::MAX).then_some(local[j]))
                    .collect()
            })
            .collect();
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        Self::from_parts(self.name.clone(), labels, adj)
    }

    /// BFS spanning tree rooted at the smallest label, children visited in
    /// ascending label order.
    pub fn spanning_tree(&self) -> Result<SpanningTree, GraphError> {
        if self.labels.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut parent = BTreeMap::new();
        let mut order = vec![self.labels[0]];
        let mut seen = BitSet::new(self.labels.len());
        seen.insert(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for &j in &self.adj[i] {
                if !seen.contains(j) {
                    seen.insert(j);
                    parent.insert(self.labels[j], self.labels[i]);
                    order.push(self.labels[j]);
                    queue.push_back(j);
                }
            }
        }
        if order.len() != self.labels.len() {
            return Err(GraphError::Disconnected);
        }
        Ok(SpanningTree {
            root: self.labels[0],
            parent,
            order,
        })
    }
}

/// Rooted spanning tree as a parent map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: Qubit,
    /// Parent of every non-root vertex.
    pub parent: BTreeMap<Qubit, Qubit>,
    /// Vertices in BFS discovery order.
    pub order: Vec<Qubit>,
}

impl SpanningTree {
    /// Tree edges as `(smaller, larger)` pairs, sorted.
    pub fn edges(&self) -> Vec<(Qubit, Qubit)> {
        let mut e: Vec<_> = self
            .parent
            .iter()
            .map(|(&c, &p)| (c.min(p), c.max(p)))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn children(&self, q: Qubit) -> Vec<Qubit> {
        let mut c: Vec<_> = self
            .parent
            .iter()
            .filter_map(|(&child, &p)| (p == q).then_some(child))
            .collect();
        c.sort_unstable();
        c
    }
}
