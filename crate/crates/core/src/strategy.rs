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

//! Mapping over maximal subarchitectures with a growing number of ancillas.
//!
//! For `k = n, n+1, ...` every maximal `k`-subarchitecture is handed to a
//! [`Map`] engine under the current SWAP bound. Each success tightens the bound
//! to one below the achieved count, so successes are strictly improving and the
//! last one is the answer. A zero-SWAP success ends the run at once.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Space};
use crate::graph::{CouplingGraph, VertexSet};
use crate::mapper::{Map, MapError, MapResult};
use crate::maxsubarch::{max_subarchitectures_cached, MaxSubarchOptions, SubarchCache, SubarchError};

/// How many ancilla qubits the run may add beyond the circuit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ancillas {
    Count(usize),
    UntilFull,
}

impl fmt::Display for Ancillas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ancillas::Count(a) => write!(f, "{a}"),
            Ancillas::UntilFull => f.write_str("until-full"),
        }
    }
}

/// Order in which the members of one size are tried.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemberOrder {
    /// Descending edge count, ties in discovery order.
    #[default]
    DenseFirst,
    Insertion,
}

#[derive(Debug, Clone, Copy)]
pub struct StrategyConfig {
    pub max_ancillas: Ancillas,
    /// `None` is an unbounded start.
    pub initial_bound: Option<usize>,
    pub early_stop_on_zero: bool,
    pub order: MemberOrder,
    pub subarch: MaxSubarchOptions,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            max_ancillas: Ancillas::Count(2),
            initial_bound: None,
            early_stop_on_zero: true,
            order: MemberOrder::DenseFirst,
            subarch: MaxSubarchOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Subarch(#[from] SubarchError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    Success { swaps: usize },
    BoundFail { bound: usize },
    Timeout,
    /// Not attempted: an earlier zero-SWAP result leaves nothing to improve.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberReport {
    pub vertices: VertexSet,
    pub edges: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub k: usize,
    pub member_count: usize,
    pub members: Vec<MemberReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub platform: String,
    pub circuit_qubits: usize,
    /// Largest `k` the configuration allows.
    pub k_limit: usize,
    pub levels: Vec<LevelReport>,
    pub map_calls: usize,
    pub swaps: Option<usize>,
    pub ancillas_used: Option<usize>,
    pub winner: Option<VertexSet>,
    pub stopped_early: bool,
}

#[derive(Debug, Clone)]
pub struct StrategyRun {
    /// Best mapping found; `None` when no call succeeded.
    pub result: Option<MapResult>,
    pub report: StrategyReport,
}

fn last_k(n: usize, platform: usize, a: Ancillas) -> usize {
    match a {
        Ancillas::Count(a) => n.saturating_add(a).min(platform),
        Ancillas::UntilFull => platform,
    }
}

/// Maps `c` onto `g` through its maximal subarchitectures.
pub fn map_with_subarch(
    g: &CouplingGraph,
    c: &Circuit,
    cfg: &StrategyConfig,
    mapper: &dyn Map,
    cache: Option<&SubarchCache>,
) -> Result<StrategyRun, StrategyError> {
    if c.space != Space::Logical {
        return Err(MapError::NotLogical.into());
    }
    let n = c.qubit_count as usize;
    let p = g.vertex_count();
    if n > p {
        return Err(MapError::TooLarge {
            needed: n,
            available: p,
        }
        .into());
    }
    if !g.is_connected() {
        return Err(MapError::Disconnected.into());
    }
    let k_limit = last_k(n, p, cfg.max_ancillas);
    let mut report = StrategyReport {
        platform: g.name().to_string(),
        circuit_qubits: n,
        k_limit,
        levels: Vec::new(),
        map_calls: 0,
        swaps: None,
        ancillas_used: None,
        winner: None,
        stopped_early: false,
    };
    let mut best: Option<MapResult> = None;
    let mut bound = cfg.initial_bound;
    let mut exhausted = false;

    for k in n.max(1)..=k_limit {
        let set = max_subarchitectures_cached(g, k, &cfg.subarch, cache)?;
        let mut members: Vec<&CouplingGraph> = set.members.iter().collect();
        if cfg.order == MemberOrder::DenseFirst {
            members.sort_by_key(|m| std::cmp::Reverse(m.edge_count()));
        }
        let mut level = LevelReport {
            k,
            member_count: members.len(),
            members: Vec::with_capacity(members.len()),
        };
        for member in members {
            let outcome = if exhausted {
                Outcome::Skipped
            } else {
                report.map_calls += 1;
                match mapper.map(c, member, bound) {
                    Ok(r) => {
                        let swaps = r.swaps;
                        match swaps.checked_sub(1) {
                            Some(b) => bound = Some(b),
                            None => exhausted = true,
                        }
                        best = Some(r);
                        Outcome::Success { swaps }
                    }
                    Err(MapError::BoundExceeded { bound }) => Outcome::BoundFail { bound },
                    Err(MapError::Timeout) => Outcome::Timeout,
                    Err(e) => return Err(e.into()),
                }
            };
            level.members.push(MemberReport {
                vertices: member.vertex_set(),
                edges: member.edge_count(),
                outcome,
            });
            if exhausted && cfg.early_stop_on_zero {
                report.stopped_early = true;
                break;
            }
        }
        report.levels.push(level);
        if report.stopped_early {
            break;
        }
    }

    if let Some(r) = &best {
        report.swaps = Some(r.swaps);
        report.ancillas_used = Some(r.subarch.vertex_count() - n);
        report.winner = Some(r.subarch.vertex_set());
    }
    Ok(StrategyRun { result: best, report })
}

/// One member's contribution to the optimality argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStep {
    pub k: usize,
    pub vertices: VertexSet,
    /// Proven lower bound on the member's own optimum, if any.
    pub at_least: Option<usize>,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub swaps: Option<usize>,
    pub ancilla_limit: usize,
    /// False when some member timed out or the run did not cover every size.
    pub proven: bool,
    pub statement: String,
    pub chain: Vec<CertificateStep>,
}

/// States what the run proves about its result, with the per-member bounds
/// that support it.
pub fn optimality_certificate(run: &StrategyRun, g: &CouplingGraph, cfg: &StrategyConfig) -> Certificate {
    let report = &run.report;
    let n = report.circuit_qubits;
    let ancilla_limit = report.k_limit - n.min(report.k_limit);
    let mut chain = Vec::new();
    let mut timed_out = false;
    for level in &report.levels {
        for m in &level.members {
            let at_least = match m.outcome {
                Outcome::Success { swaps } => Some(swaps),
                Outcome::BoundFail { bound } => Some(bound + 1),
                Outcome::Timeout => {
                    timed_out = true;
                    None
                }
                Outcome::Skipped => None,
            };
            chain.push(CertificateStep {
                k: level.k,
                vertices: m.vertices.clone(),
                at_least,
                outcome: m.outcome.clone(),
            });
        }
    }
    let covered = report.stopped_early
        || report.levels.len() == report.k_limit + 1 - n.max(1).min(report.k_limit + 1);
    let proven = !timed_out && covered;
    let name = g.name();
    let statement = match (report.swaps, proven) {
        (Some(0), _) if report.stopped_early => {
            format!("0 SWAPs on {name}: no mapping can use fewer")
        }
        (Some(s), true) => format!(
            "{s} SWAPs is minimal among all mappings onto {name} using at most {ancilla_limit} ancilla qubits"
        ),
        (None, true) => format!(
            "no mapping onto {name} with at most {} SWAPs uses at most {ancilla_limit} ancilla qubits",
            cfg.initial_bound.map_or("any".to_string(), |b| b.to_string())
        ),
        (Some(s), false) => format!("{s} SWAPs found on {name}; minimality unproven because a search timed out"),
        (None, false) => format!("no mapping found on {name}; searches timed out"),
    };
    Certificate {
        swaps: report.swaps,
        ancilla_limit,
        proven,
        statement,
        chain,
    }
}
