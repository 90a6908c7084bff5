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

//! Independent checks for mapped circuits: feasibility on a coupling graph,
//! equivalence with the logical input, and re-targeting a result onto a larger
//! platform through a subgraph embedding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{unmap, Allocation, Circuit, Gate, Space};
use crate::graph::{CouplingGraph, Qubit};
use crate::iso::find_embedding;
use crate::mapper::MapResult;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceMode {
    /// Gate lists must match exactly.
    #[default]
    Strict,
    /// Adjacent gates on disjoint qubits may be exchanged.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub gate: Option<usize>,
    pub reason: String,
}

impl Violation {
    fn at(gate: usize, reason: impl Into<String>) -> Self {
        Violation {
            gate: Some(gate),
            reason: reason.into(),
        }
    }

    fn global(reason: impl Into<String>) -> Self {
        Violation {
            gate: None,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub feasible: bool,
    pub equivalent: bool,
    pub mode: EquivalenceMode,
    pub swap_count: usize,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.feasible && self.equivalent
    }
}

/// Every CX and SWAP of `mapped` that does not sit on an edge of `g`.
pub fn check_feasibility(mapped: &Circuit, g: &CouplingGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, gate) in mapped.gates.iter().enumerate() {
        match gate {
            Gate::Unary { qubit, .. } => {
                if !g.contains_vertex(*qubit) {
                    out.push(Violation::at(i, format!("qubit {qubit} is not on the platform")));
                }
            }
            _ => {
                let (a, b) = gate.pair().expect("binary gate");
                if !g.has_edge(a, b) {
                    out.push(Violation::at(i, format!("({a},{b}) is not a coupling edge")));
                }
            }
        }
    }
    out
}

/// Differences between `original` and the unmapped form of `mapped`.
pub fn check_equivalence(
    original: &Circuit,
    mapped: &Circuit,
    a: &Allocation,
    mode: EquivalenceMode,
) -> Vec<Violation> {
    if mapped.space != Space::Physical {
        return vec![Violation::global("mapped circuit is not physical")];
    }
    if a.len() != original.qubit_count as usize {
        return vec![Violation::global(format!(
            "allocation covers {} qubits, circuit has {}",
            a.len(),
            original.qubit_count
        ))];
    }
    let back = match unmap(mapped, a) {
        Ok(c) => c,
        Err(crate::circuit::CircuitError::Unallocated { index, qubit }) => {
            return vec![Violation::at(index, format!("gate on unallocated qubit {qubit}"))]
        }
        Err(e) => return vec![Violation::global(e.to_string())],
    };
    let (lhs, rhs) = match mode {
        EquivalenceMode::Strict => (original.gates.clone(), back.gates),
        EquivalenceMode::Relaxed => (normal_form(&original.gates), normal_form(&back.gates)),
    };
    if lhs.len() != rhs.len() {
        return vec![Violation::global(format!(
            "unmapped circuit has {} gates, original has {}",
            rhs.len(),
            lhs.len()
        ))];
    }
    match lhs.iter().zip(&rhs).position(|(x, y)| x != y) {
        Some(i) => vec![Violation::at(
            i,
            format!("expected {:?}, found {:?}", lhs[i], rhs[i]),
        )],
        None => Vec::new(),
    }
}

/// Canonical representative of the gate list up to exchanging adjacent gates
/// on disjoint qubits: repeatedly emit the smallest gate all of whose
/// predecessors on shared qubits are already emitted.
pub fn normal_form(gates: &[Gate]) -> Vec<Gate> {
    let mut last: BTreeMap<u32, usize> = BTreeMap::new();
    let mut succ = vec![Vec::new(); gates.len()];
    let mut indeg = vec![0usize; gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for q in g.qubits() {
            if let Some(j) = last.insert(q, i) {
                if !succ[j].contains(&i) {
                    succ[j].push(i);
                    indeg[i] += 1;
                }
            }
        }
    }
    let mut ready: std::collections::BTreeSet<(&Gate, usize)> = (0..gates.len())
        .filter(|&i| indeg[i] == 0)
        .map(|i| (&gates[i], i))
        .collect();
    let mut out = Vec::with_capacity(gates.len());
    while let Some((g, i)) = ready.pop_first() {
        out.push(g.clone());
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert((&gates[j], j));
            }
        }
    }
    out
}

/// Feasibility on `g` and equivalence with `original`.
pub fn verify(
    original: &Circuit,
    mapped: &Circuit,
    a: &Allocation,
    g: &CouplingGraph,
    mode: EquivalenceMode,
) -> Verdict {
    let infeasible = check_feasibility(mapped, g);
    let mismatch = check_equivalence(original, mapped, a, mode);
    Verdict {
        feasible: infeasible.is_empty(),
        equivalent: mismatch.is_empty(),
        mode,
        swap_count: mapped.swap_count(),
        violations: infeasible.into_iter().chain(mismatch).collect(),
    }
}

/// Checks a mapping result against its own architecture.
pub fn verify_result(original: &Circuit, r: &MapResult, mode: EquivalenceMode) -> Verdict {
    verify(original, &r.mapped, &r.initial, &r.subarch, mode)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("subarchitecture does not embed into {platform}")]
    NoEmbedding { platform: String },
}

/// Re-targets `r` onto `g` through a subgraph embedding of `r.subarch`. When
/// the subarchitecture already is a labelled subgraph of `g` the embedding is
/// the identity.
pub fn lift_to_platform(r: &MapResult, g: &CouplingGraph) -> Result<MapResult, LiftError> {
    let sub = &r.subarch;
    let in_place = sub.vertices().iter().all(|&v| g.contains_vertex(v))
        && sub.edges().into_iter().all(|(u, v)| g.has_edge(u, v));
    let h: BTreeMap<Qubit, Qubit> = if in_place {
        sub.vertices().iter().map(|&v| (v, v)).collect()
    } else {
        find_embedding(sub, g).ok_or_else(|| LiftError::NoEmbedding {
            platform: g.name().to_string(),
        })?
    };
    let width = g.vertices().last().map_or(0, |&l| l + 1);
    let mut mapped = Circuit::new(Space::Physical, width);
    mapped.gates = r.mapped.gates.iter().map(|gate| gate.relabel(|q| h[&q])).collect();
    let initial = r
        .initial
        .map_physical(|p| h[&p])
        .expect("embedding is injective");
    Ok(MapResult {
        mapped,
        initial,
        swaps: r.swaps,
        subarch: g.clone(),
    })
}
