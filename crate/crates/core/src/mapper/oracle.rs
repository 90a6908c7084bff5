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

//! Exhaustive reference mapper for tiny instances.
//!
//! Tracks every complete allocation reachable with at most `max_swaps` SWAPs.
//! Before each CX the reachable set is closed under single SWAPs on any edge,
//! then cut down to the allocations on which that CX is feasible. This covers
//! every initial allocation and every placement of SWAPs between gates.

use std::collections::HashMap;

use thiserror::Error;

use crate::circuit::{Circuit, Space};
use crate::graph::CouplingGraph;

pub const MAX_VERTICES: usize = 6;
pub const MAX_GATES: usize = 8;
pub const MAX_SWAPS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance exceeds exhaustive limits ({vertices} vertices, {gates} gates, {swaps} swaps)")]
    TooLarge { vertices: usize, gates: usize, swaps: usize },
    #[error("circuit has {needed} qubits but the architecture only {available}")]
    TooManyQubits { needed: usize, available: usize },
    #[error("expected a logical circuit")]
    NotLogical,
}

/// Minimum SWAP count over all mappings using at most `max_swaps` SWAPs, or
/// `None` when there is none.
pub fn brute_force_optimal(c: &Circuit, g: &CouplingGraph, max_swaps: usize) -> Result<Option<usize>, OracleError> {
    let m = g.vertex_count();
    if m > MAX_VERTICES || c.len() > MAX_GATES || max_swaps > MAX_SWAPS {
        return Err(OracleError::TooLarge {
            vertices: m,
            gates: c.len(),
            swaps: max_swaps,
        });
    }
    if c.space != Space::Logical {
        return Err(OracleError::NotLogical);
    }
    let n = c.qubit_count as usize;
    if n > m {
        return Err(OracleError::TooManyQubits { needed: n, available: m });
    }

    let labels = g.vertices();
    let edges = g.edges();
    let mut reach: HashMap<Vec<u32>, usize> = injections(labels, n).into_iter().map(|a| (a, 0)).collect();

    for gate in &c.gates {
        let Some((x, y)) = gate.pair() else { continue };
        let mut layers: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_swaps + 1];
        for (a, &s) in &reach {
            layers[s].push(a.clone());
        }
        for s in 0..max_swaps {
            let current = std::mem::take(&mut layers[s]);
            for a in &current {
                if reach[a] != s {
                    continue;
                }
                for &(u, v) in &edges {
                    let b: Vec<u32> = a
                        .iter()
                        .map(|&p| match p {
                            p if p == u => v,
                            p if p == v => u,
                            p => p,
                        })
                        .collect();
                    if reach.get(&b).is_none_or(|&t| t > s + 1) {
                        reach.insert(b.clone(), s + 1);
                        layers[s + 1].push(b);
                    }
                }
            }
        }
        reach.retain(|a, _| g.has_edge(a[x as usize], a[y as usize]));
        if reach.is_empty() {
            return Ok(None);
        }
    }
    Ok(reach.values().copied().min())
}

fn injections(labels: &[u32], n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn extend(labels: &[u32], n: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for &p in labels {
            if !current.contains(&p) {
                current.push(p);
                extend(labels, n, current, out);
                current.pop();
            }
        }
    }
    extend(labels, n, &mut current, &mut out);
    out
}
