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

//! Graph hashing, isomorphism and subgraph isomorphism.
//!
//! Subgraph isomorphism here is *monomorphism*: an injective vertex map that
//! carries every pattern edge onto a host edge, while the host may have extra
//! edges among the image vertices.
//!
//! The Weisfeiler-Lehman hash uses SHA-256 throughout:
//!
//! * initial colour of a vertex: `SHA256("wl0" || degree as u64 LE)`
//! * refinement: `SHA256(own colour || neighbour colours sorted ascending)`
//! * graph hash: `SHA256(|V| as u64 LE || |E| as u64 LE || final colours sorted)`

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::bits::BitSet;
use crate::graph::{CouplingGraph, Qubit};

/// Default number of WL refinement rounds.
pub const DEFAULT_WL_ITERATIONS: usize = 3;

/// Weisfeiler-Lehman graph fingerprint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphHash([u8; 32]);

impl GraphHash {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for GraphHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for GraphHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphHash({})", &self.to_hex()[..16])
    }
}

type Colour = [u8; 32];

fn digest(parts: &[&[u8]]) -> Colour {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

pub fn wl_hash(g: &CouplingGraph, iterations: usize) -> GraphHash {
    let n = g.vertex_count();
    let mut colours: Vec<Colour> = (0..n)
        .map(|i| digest(&[b"wl0", &(g.degree_at(i) as u64).to_le_bytes()]))
        .collect();
    let mut scratch: Vec<Colour> = Vec::new();
    for _ in 0..iterations {
        let next: Vec<Colour> = (0..n)
            .map(|i| {
                scratch.clear();
                scratch.extend(g.adjacency(i).iter().map(|&j| colours[j]));
                scratch.sort_unstable();
                let mut h = Sha256::new();
                h.update(colours[i]);
                for c in &scratch {
                    h.update(c);
                }
                h.finalize().into()
            })
            .collect();
        colours = next;
    }
    colours.sort_unstable();
    let mut h = Sha256::new();
    h.update((n as u64).to_le_bytes());
    h.update((g.edge_count() as u64).to_le_bytes());
    for c in &colours {
        h.update(c);
    }
    GraphHash(h.finalize().into())
}

fn sorted_degrees(g: &CouplingGraph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.vertex_count()).map(|i| g.degree_at(i)).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d
}

/// Exact isomorphism test.
pub fn is_isomorphic(g1: &CouplingGraph, g2: &CouplingGraph) -> bool {
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return false;
    }
    if sorted_degrees(g1) != sorted_degrees(g2) {
        return false;
    }
    // A bijective monomorphism between graphs with equal edge counts is an isomorphism.
    monomorphism(g1, g2).is_some()
}

/// True iff `pattern` is isomorphic to a (not necessarily induced) subgraph of `host`.
pub fn subgraph_isomorphic(pattern: &CouplingGraph, host: &CouplingGraph) -> bool {
    monomorphism(pattern, host).is_some()
}

/// First monomorphism found in the deterministic search order, as a label map.
pub fn find_embedding(
    pattern: &CouplingGraph,
    host: &CouplingGraph,
) -> Option<BTreeMap<Qubit, Qubit>> {
    monomorphism(pattern, host).map(|m| {
        m.iter()
            .enumerate()
            .map(|(p, &h)| (pattern.label(p), host.label(h)))
            .collect()
    })
}

/// Dense-index monomorphism `pattern -> host`, if one exists.
pub(crate) fn monomorphism(pattern: &CouplingGraph, host: &CouplingGraph) -> Option<Vec<usize>> {
    let np = pattern.vertex_count();
    let nh = host.vertex_count();
    if np > nh || pattern.edge_count() > host.edge_count() {
        return None;
    }
    // The i-th largest pattern degree can only land on a host vertex of at least that degree.
    let dp = sorted_degrees(pattern);
    let dh = sorted_degrees(host);
    if dp.iter().zip(&dh).any(|(a, b)| a > b) {
        return None;
    }
    if np == 0 {
        return Some(Vec::new());
    }
    let mut m = Matcher::new(pattern, host);
    m.search(0).then_some(m.map)
}

struct Matcher<'a> {
    pattern: &'a CouplingGraph,
    host: &'a CouplingGraph,
    order: Vec<usize>,
    /// For each position in `order`, the earlier pattern vertices adjacent to it.
    back_edges: Vec<Vec<usize>>,
    map: Vec<usize>,
    used: BitSet,
}

impl<'a> Matcher<'a> {
    fn new(pattern: &'a CouplingGraph, host: &'a CouplingGraph) -> Self {
        let np = pattern.vertex_count();
        // Highest degree first, then always the vertex with most already-ordered
        // neighbours (ties: higher degree, lower index).
        let mut placed = vec![false; np];
        let mut links = vec![0usize; np];
        let mut order = Vec::with_capacity(np);
        while order.len() < np {
            let next = (0..np)
                .filter(|&v| !placed[v])
                .max_by(|&a, &b| {
                    (links[a], pattern.degree_at(a))
                        .cmp(&(links[b], pattern.degree_at(b)))
                        .then(b.cmp(&a))
                })
                .expect("unplaced vertex remains");
            placed[next] = true;
            order.push(next);
            for &u in pattern.adjacency(next) {
                links[u] += 1;
            }
        }
        let mut position = vec![0; np];
        for (t, &v) in order.iter().enumerate() {
            position[v] = t;
        }
        let back_edges = order
            .iter()
            .enumerate()
            .map(|(t, &v)| {
                pattern
                    .adjacency(v)
                    .iter()
                    .copied()
                    .filter(|&u| position[u] < t)
                    .collect()
            })
            .collect();
        Matcher {
            pattern,
            host,
            order,
            back_edges,
            map: vec![usize::MAX; np],
            used: BitSet::new(host.vertex_count()),
        }
    }

    fn search(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let p = self.order[depth];
        let need = self.pattern.degree_at(p);
        let candidates = match self.back_edges[depth].split_first() {
            Some((&first, rest)) => {
                let mut c = self.host.row(self.map[first]).clone();
                for &u in rest {
                    c.intersect_with(self.host.row(self.map[u]));
                }
                c.difference_with(&self.used);
                c
            }
            None => {
                let mut c = BitSet::new(self.host.vertex_count());
                (0..self.host.vertex_count())
                    .filter(|&h| !self.used.contains(h))
                    .for_each(|h| c.insert(h));
                c
            }
        };
        let pending_p = need - self.back_edges[depth].len();
        for h in candidates.iter() {
            if self.host.degree_at(h) < need {
                continue;
            }
            let free_h = self
                .host
                .adjacency(h)
                .iter()
                .filter(|&&x| !self.used.contains(x))
                .count();
            if free_h < pending_p {
                continue;
            }
            self.map[p] = h;
            self.used.insert(h);
            if self.search(depth + 1) {
                return true;
            }
            self.used.remove(h);
            self.map[p] = usize::MAX;
        }
        false
    }
}
