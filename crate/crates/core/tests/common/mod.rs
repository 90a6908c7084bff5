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

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use subarch::circuit::{Circuit, Gate};
use subarch::graph::CouplingGraph;

/// Random connected graph on `0..n`: a random tree plus each other pair with
/// probability `p`.
pub fn random_connected(rng: &mut impl Rng, n: u32, p: f64) -> CouplingGraph {
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..n as usize {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    CouplingGraph::with_qubits("random", n, edges).expect("well formed")
}

/// Random CX-only logical circuit.
pub fn random_cx_circuit(rng: &mut impl Rng, n: u32, gates: usize) -> Circuit {
    let gates = (0..gates)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Gate::cx(a, b)
        })
        .collect();
    Circuit::logical(n, gates).expect("operands in range")
}

/// All `k`-subsets of the vertices whose induced subgraph is connected, by
/// filtering every subset. Works on the raw edge list only.
pub fn naive_connected_sets(g: &CouplingGraph, k: usize) -> BTreeSet<Vec<u32>> {
    let labels = g.vertices().to_vec();
    let n = labels.len();
    let index = |q: u32| labels.iter().position(|&l| l == q).unwrap();
    let mut adj = vec![0u32; n];
    for (u, v) in g.edges() {
        adj[index(u)] |= 1 << index(v);
        adj[index(v)] |= 1 << index(u);
    }
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let start = mask.trailing_zeros();
        let mut seen = 1u32 << start;
        loop {
            let mut grown = seen;
            for (i, row) in adj.iter().enumerate() {
                if seen >> i & 1 == 1 {
                    grown |= row & mask;
                }
            }
            if grown == seen {
                break;
            }
            seen = grown;
        }
        if seen == mask {
            out.insert((0..n).filter(|i| mask >> i & 1 == 1).map(|i| labels[i]).collect());
        }
    }
    out
}

/// `g` with its labels permuted by `perm` and shifted by `offset`.
pub fn relabel(g: &CouplingGraph, perm: &[u32], offset: u32) -> CouplingGraph {
    let f = |q: u32| perm[q as usize] + offset;
    CouplingGraph::new(
        "relabelled",
        g.vertices().iter().map(|&v| f(v)),
        g.edges().into_iter().map(|(u, v)| (f(u), f(v))),
    )
    .expect("permutation keeps the graph well formed")
}
