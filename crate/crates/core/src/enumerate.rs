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

//! Streaming enumeration of connected induced `k`-vertex subgraphs.
//!
//! Vertex-anchored expansion with exclusive neighbourhoods (ESU, Wernicke 2006):
//! every set is grown from its smallest vertex `v`, and a vertex enters the
//! extension set only when it is larger than `v` and not adjacent to anything
//! already chosen. Each connected set is therefore produced exactly once. The
//! search keeps at most `k` frames alive, so memory does not grow with the
//! number of subsets produced.

use num_bigint::BigUint;
use thiserror::Error;

use crate::bits::BitSet;
use crate::graph::{CouplingGraph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("subgraph size {k} out of range 1..={n}")]
    SizeOutOfRange { k: usize, n: usize },
    #[error("graph is not connected; enumerate each connected component separately")]
    Disconnected,
}

struct Frame {
    members: Vec<usize>,
    /// Chosen vertices plus all their neighbours.
    closed_nbhd: BitSet,
    extension: BitSet,
}

/// Iterator over the connected induced `k`-subgraphs of a graph, as vertex sets.
pub struct ConnectedSubgraphs<'g> {
    graph: &'g CouplingGraph,
    k: usize,
    next_anchor: usize,
    stack: Vec<Frame>,
}

/// Streams every `k`-subset of `g` whose induced subgraph is connected.
pub fn connected_subgraphs(
    g: &CouplingGraph,
    k: usize,
) -> Result<ConnectedSubgraphs<'_>, EnumerateError> {
    let n = g.vertex_count();
    if k == 0 || k > n {
        return Err(EnumerateError::SizeOutOfRange { k, n });
    }
    if !g.is_connected() {
        return Err(EnumerateError::Disconnected);
    }
    Ok(ConnectedSubgraphs {
        graph: g,
        k,
        next_anchor: 0,
        stack: Vec::with_capacity(k),
    })
}

impl ConnectedSubgraphs<'_> {
    pub fn k(&self) -> usize {
        self.k
    }

    fn emit(&self, members: &[usize], extra: usize) -> VertexSet {
        members
            .iter()
            .chain(std::iter::once(&extra))
            .map(|&i| self.graph.label(i))
            .collect()
    }
}

impl Iterator for ConnectedSubgraphs<'_> {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        let g = self.graph;
        let n = g.vertex_count();
        loop {
            let Some(top) = self.stack.last_mut() else {
                if self.next_anchor >= n {
                    return None;
                }
                let v = self.next_anchor;
                self.next_anchor += 1;
                if self.k == 1 {
                    return Some(VertexSet::new([g.label(v)]));
                }
                let mut closed_nbhd = g.row(v).clone();
                closed_nbhd.insert(v);
                let mut extension = g.row(v).clone();
                extension.clear_through(v);
                self.stack.push(Frame {
                    members: vec![v],
                    closed_nbhd,
                    extension,
                });
                continue;
            };

            let Some(w) = top.extension.pop_first() else {
                self.stack.pop();
                continue;
            };
            if top.members.len() + 1 == self.k {
                let top = self.stack.last().expect("frame present");
                return Some(self.emit(&top.members, w));
            }

            let anchor = top.members[0];
            let mut extension = g.row(w).clone();
            extension.difference_with(&top.closed_nbhd);
            extension.clear_through(anchor);
            extension.union_with(&top.extension);
            let mut closed_nbhd = top.closed_nbhd.clone();
            closed_nbhd.union_with(g.row(w));
            closed_nbhd.insert(w);
            let mut members = top.members.clone();
            members.push(w);
            self.stack.push(Frame {
                members,
                closed_nbhd,
                extension,
            });
        }
    }
}

/// `p choose k`, exact.
pub fn count_all_subsets(p: u64, k: u64) -> BigUint {
    if k > p {
        return BigUint::from(0u32);
    }
    let k = k.min(p - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= p - i;
        acc /= i + 1;
    }
    acc
}
