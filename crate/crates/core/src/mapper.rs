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

//! SWAP-optimal layout synthesis under a SWAP bound.
//!
//! [`ExactMapper`] runs a best-first search whose cost is the number of
//! inserted SWAPs. A search state holds the position of every logical qubit
//! that has been placed so far and how far the circuit has been executed.
//! Logical qubits are placed only when their first CX is reached, so the
//! initial allocation is chosen by the search itself rather than enumerated.
//! Any gate that is executable in a state is executed at once at no cost.
//!
//! The lower bound used to order the search is the largest
//! `distance - 1` over the remaining CX gates whose operands are both placed.
//! One SWAP changes any such distance by at most one, so the bound is
//! consistent and the first goal popped is optimal.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::Deadline;
use crate::circuit::{Allocation, Circuit, Gate, Space};
use crate::graph::CouplingGraph;

pub mod oracle;

pub use oracle::brute_force_optimal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("circuit larger than architecture: {needed} qubits on {available}")]
    TooLarge { needed: usize, available: usize },
    #[error("architecture is not connected")]
    Disconnected,
    #[error("expected a logical circuit")]
    NotLogical,
    #[error("no mapping with at most {bound} swaps")]
    BoundExceeded { bound: usize },
    #[error("search limit reached before a result was proven")]
    Timeout,
}

/// Which gate orders a mapped circuit may realise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateOrder {
    /// Gates run in input order.
    #[default]
    Strict,
    /// Gates on disjoint qubits may be interleaved.
    Relaxed,
}

#[derive(Debug, Clone)]
pub struct MapResult {
    /// Physical circuit over the labels of `subarch`.
    pub mapped: Circuit,
    pub initial: Allocation,
    pub swaps: usize,
    pub subarch: CouplingGraph,
}

/// A layout synthesizer: maps `c` onto `g` with at most `bound` SWAPs, returning
/// the minimum SWAP count.
pub trait Map {
    fn map(&self, c: &Circuit, g: &CouplingGraph, bound: Option<usize>) -> Result<MapResult, MapError>;
}

/// Built-in exact search.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMapper {
    pub order: GateOrder,
    /// Upper limit on expanded states; exceeding it yields [`MapError::Timeout`].
    pub max_nodes: Option<usize>,
    pub deadline: Deadline,
}

impl Map for ExactMapper {
    fn map(&self, c: &Circuit, g: &CouplingGraph, bound: Option<usize>) -> Result<MapResult, MapError> {
        if c.space != Space::Logical {
            return Err(MapError::NotLogical);
        }
        let n = c.qubit_count as usize;
        if n > g.vertex_count() {
            return Err(MapError::TooLarge {
                needed: n,
                available: g.vertex_count(),
            });
        }
        if !g.is_connected() {
            return Err(MapError::Disconnected);
        }
        Search::new(c, g, self.order).run(bound, self.max_nodes, self.deadline)
    }
}

/// Optimal mapping of `c` onto `g` in strict gate order.
pub fn map_optimal(c: &Circuit, g: &CouplingGraph, bound: Option<usize>) -> Result<MapResult, MapError> {
    ExactMapper::default().map(c, g, bound)
}

const UNPLACED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
enum Op {
    One(usize),
    Two(usize, usize),
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Place(usize, usize),
    Swap(usize, usize),
    Exec(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    /// Strict: `[next gate]`. Relaxed: executed gate count per logical qubit.
    front: Vec<u32>,
    /// Physical index of each logical qubit, or `UNPLACED`.
    pos: Vec<u32>,
}

struct Node {
    state: State,
    parent: usize,
    cost: u32,
    events: Vec<Event>,
}

struct Search<'a> {
    circuit: &'a Circuit,
    graph: &'a CouplingGraph,
    order: GateOrder,
    ops: Vec<Op>,
    by_qubit: Vec<Vec<usize>>,
    /// Position of gate `i` in the gate list of each of its operands.
    rank: Vec<(u32, u32)>,
    dist: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn new(circuit: &'a Circuit, graph: &'a CouplingGraph, order: GateOrder) -> Self {
        let n = circuit.qubit_count as usize;
        let m = graph.vertex_count();
        let mut by_qubit = vec![Vec::new(); n];
        let mut ops = Vec::with_capacity(circuit.len());
        let mut rank = Vec::with_capacity(circuit.len());
        for (i, gate) in circuit.gates.iter().enumerate() {
            match gate.pair() {
                Some((a, b)) => {
                    let (a, b) = (a as usize, b as usize);
                    rank.push((by_qubit[a].len() as u32, by_qubit[b].len() as u32));
                    by_qubit[a].push(i);
                    by_qubit[b].push(i);
                    ops.push(Op::Two(a, b));
                }
                None => {
                    let q = gate.qubits()[0] as usize;
                    rank.push((by_qubit[q].len() as u32, 0));
                    by_qubit[q].push(i);
                    ops.push(Op::One(q));
                }
            }
        }
        let dist = (0..m).map(|s| bfs(graph, s)).collect();
        let mut edges = Vec::new();
        for u in 0..m {
            for &v in graph.adjacency(u) {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Search {
            circuit,
            graph,
            order,
            ops,
            by_qubit,
            rank,
            dist,
            edges,
        }
    }

    fn start(&self) -> State {
        let n = self.circuit.qubit_count as usize;
        let front = match self.order {
            GateOrder::Strict => vec![0],
            GateOrder::Relaxed => vec![0; n],
        };
        State {
            front,
            pos: vec![UNPLACED; n],
        }
    }

    fn is_done(&self, s: &State, i: usize) -> bool {
        match self.order {
            GateOrder::Strict => i < s.front[0] as usize,
            GateOrder::Relaxed => match self.ops[i] {
                Op::One(q) => self.rank[i].0 < s.front[q],
                Op::Two(a, _) => self.rank[i].0 < s.front[a],
            },
        }
    }

    /// Gates that are next in line for all of their operands.
    fn ready(&self, s: &State) -> Vec<usize> {
        match self.order {
            GateOrder::Strict => {
                let i = s.front[0] as usize;
                if i < self.ops.len() {
                    vec![i]
                } else {
                    Vec::new()
                }
            }
            GateOrder::Relaxed => {
                let mut out: Vec<usize> = (0..s.pos.len())
                    .filter_map(|q| self.by_qubit[q].get(s.front[q] as usize).copied())
                    .filter(|&i| match self.ops[i] {
                        Op::One(_) => true,
                        Op::Two(a, b) => {
                            s.front[a] == self.rank[i].0 && s.front[b] == self.rank[i].1
                        }
                    })
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }

    fn executable(&self, s: &State, i: usize) -> bool {
        match self.ops[i] {
            Op::One(_) => true,
            Op::Two(a, b) => {
                let (pa, pb) = (s.pos[a], s.pos[b]);
                pa != UNPLACED && pb != UNPLACED && self.dist[pa as usize][pb as usize] == 1
            }
        }
    }

    fn execute(&self, s: &mut State, i: usize) {
        match self.order {
            GateOrder::Strict => s.front[0] += 1,
            GateOrder::Relaxed => match self.ops[i] {
                Op::One(q) => s.front[q] += 1,
                Op::Two(a, b) => {
                    s.front[a] += 1;
                    s.front[b] += 1;
                }
            },
        }
    }

    /// Runs every executable gate; returns the executed gate indices.
    fn close(&self, s: &mut State, events: &mut Vec<Event>) {
        loop {
            let next = self.ready(s).into_iter().find(|&i| self.executable(s, i));
            let Some(i) = next else { return };
            self.execute(s, i);
            events.push(Event::Exec(i));
        }
    }

    fn is_goal(&self, s: &State) -> bool {
        match self.order {
            GateOrder::Strict => s.front[0] as usize == self.ops.len(),
            GateOrder::Relaxed => s
                .front
                .iter()
                .zip(&self.by_qubit)
                .all(|(&f, list)| f as usize == list.len()),
        }
    }

    fn lower_bound(&self, s: &State) -> u32 {
        let first = match self.order {
            GateOrder::Strict => s.front[0] as usize,
            GateOrder::Relaxed => 0,
        };
        let mut best = 0;
        for i in first..self.ops.len() {
            if let Op::Two(a, b) = self.ops[i] {
                let (pa, pb) = (s.pos[a], s.pos[b]);
                if pa == UNPLACED || pb == UNPLACED || self.is_done(s, i) {
                    continue;
                }
                best = best.max(self.dist[pa as usize][pb as usize].saturating_sub(1));
            }
        }
        best
    }

    fn occupancy(&self, s: &State) -> Vec<u32> {
        let mut occ = vec![UNPLACED; self.graph.vertex_count()];
        for (l, &p) in s.pos.iter().enumerate() {
            if p != UNPLACED {
                occ[p as usize] = l as u32;
            }
        }
        occ
    }

    /// Successor states with the event that leads to each and its cost.
    fn successors(&self, s: &State) -> Vec<(State, Vec<Event>, u32)> {
        let occ = self.occupancy(s);
        let free = |p: usize| occ[p] == UNPLACED;
        let mut out = Vec::new();
        for i in self.ready(s) {
            let Op::Two(a, b) = self.ops[i] else { continue };
            let (pa, pb) = (s.pos[a], s.pos[b]);
            match (pa == UNPLACED, pb == UNPLACED) {
                (false, false) => {}
                (false, true) | (true, false) => {
                    let (placed, other) = if pb == UNPLACED { (pa, b) } else { (pb, a) };
                    for &p in self.graph.adjacency(placed as usize) {
                        if free(p) {
                            let mut t = s.clone();
                            t.pos[other] = p as u32;
                            out.push((t, vec![Event::Place(other, p)], 0));
                        }
                    }
                }
                (true, true) => {
                    for &(u, v) in &self.edges {
                        if free(u) && free(v) {
                            for (x, y) in [(u, v), (v, u)] {
                                let mut t = s.clone();
                                t.pos[a] = x as u32;
                                t.pos[b] = y as u32;
                                out.push((t, vec![Event::Place(a, x), Event::Place(b, y)], 0));
                            }
                        }
                    }
                }
            }
        }
        for &(u, v) in &self.edges {
            if free(u) && free(v) {
                continue;
            }
            let mut t = s.clone();
            if occ[u] != UNPLACED {
                t.pos[occ[u] as usize] = v as u32;
            }
            if occ[v] != UNPLACED {
                t.pos[occ[v] as usize] = u as u32;
            }
            out.push((t, vec![Event::Swap(u, v)], 1));
        }
        out
    }

    fn run(&self, bound: Option<usize>, max_nodes: Option<usize>, deadline: Deadline) -> Result<MapResult, MapError> {
        let limit = bound.map_or(u32::MAX, |b| b.min(u32::MAX as usize - 1) as u32);
        let exceeded = || MapError::BoundExceeded {
            bound: bound.unwrap_or(usize::MAX),
        };

        let mut root = self.start();
        let mut events = Vec::new();
        self.close(&mut root, &mut events);
        let h0 = self.lower_bound(&root);
        if h0 > limit {
            return Err(exceeded());
        }
        let mut nodes = vec![Node {
            state: root.clone(),
            parent: usize::MAX,
            cost: 0,
            events,
        }];
        let mut best: HashMap<State, u32> = HashMap::from([(root, 0)]);
        let mut open = BinaryHeap::from([Reverse((h0, h0, 0usize))]);
        let mut expanded = 0usize;

        while let Some(Reverse((_, _, id))) = open.pop() {
            let (cost, state) = (nodes[id].cost, nodes[id].state.clone());
            if best.get(&state).is_some_and(|&c| c < cost) {
                continue;
            }
            if self.is_goal(&state) {
                return Ok(self.rebuild(&nodes, id));
            }
            expanded += 1;
            if max_nodes.is_some_and(|m| expanded > m) || (expanded.is_multiple_of(1024) && deadline.expired()) {
                return Err(MapError::Timeout);
            }
            for (mut next, mut events, step) in self.successors(&state) {
                self.close(&mut next, &mut events);
                let g = cost + step;
                if best.get(&next).is_some_and(|&c| c <= g) {
                    continue;
                }
                let h = self.lower_bound(&next);
                if g + h > limit {
                    continue;
                }
                best.insert(next.clone(), g);
                nodes.push(Node {
                    state: next,
                    parent: id,
                    cost: g,
                    events,
                });
                open.push(Reverse((g + h, h, nodes.len() - 1)));
            }
        }
        Err(exceeded())
    }

    fn rebuild(&self, nodes: &[Node], goal: usize) -> MapResult {
        let mut chain = Vec::new();
        let mut id = goal;
        while id != usize::MAX {
            chain.push(id);
            id = nodes[id].parent;
        }
        let events: Vec<Event> = chain
            .iter()
            .rev()
            .flat_map(|&id| nodes[id].events.iter().copied())
            .collect();

        let g = self.graph;
        let m = g.vertex_count();
        let n = self.circuit.qubit_count as usize;
        let mut origin: Vec<usize> = (0..m).collect();
        let mut initial = vec![usize::MAX; n];
        for e in &events {
            match *e {
                Event::Swap(u, v) => origin.swap(u, v),
                Event::Place(l, p) => initial[l] = origin[p],
                Event::Exec(i) => {
                    if let Op::Two(a, b) = self.ops[i] {
                        debug_assert!(initial[a] != usize::MAX && initial[b] != usize::MAX);
                    }
                }
            }
        }
        let mut taken = vec![false; m];
        for &p in initial.iter().filter(|&&p| p != usize::MAX) {
            taken[p] = true;
        }
        let mut spare = (0..m).filter(|&p| !taken[p]);
        for p in initial.iter_mut().filter(|p| **p == usize::MAX) {
            *p = spare.next().expect("enough physical qubits");
        }

        let width = g.vertices().last().map_or(0, |&l| l + 1);
        let mut mapped = Circuit::new(Space::Physical, width);
        let mut at: Vec<usize> = initial.clone();
        let mut occ = vec![usize::MAX; m];
        for (l, &p) in at.iter().enumerate() {
            occ[p] = l;
        }
        let mut swaps = 0;
        for e in &events {
            match *e {
                Event::Place(..) => {}
                Event::Swap(u, v) => {
                    let (lu, lv) = (occ[u], occ[v]);
                    occ.swap(u, v);
                    if lu != usize::MAX {
                        at[lu] = v;
                    }
                    if lv != usize::MAX {
                        at[lv] = u;
                    }
                    mapped.gates.push(Gate::Swap(g.label(u), g.label(v)));
                    swaps += 1;
                }
                Event::Exec(i) => {
                    let gate = self.circuit.gates[i].relabel(|l| g.label(at[l as usize]));
                    mapped.gates.push(gate);
                }
            }
        }
        let initial = Allocation::new(initial.into_iter().map(|p| g.label(p)).collect())
            .expect("distinct physical qubits");
        MapResult {
            mapped,
            initial,
            swaps,
            subarch: g.clone(),
        }
    }
}

fn bfs(g: &CouplingGraph, source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in g.adjacency(u) {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unmap;
    use crate::graph::VertexSet;
    use crate::platforms::{line, ring};

    fn ring4_circuit() -> Circuit {
        Circuit::logical(4, vec![Gate::cx(0, 1), Gate::cx(1, 2), Gate::cx(2, 3), Gate::cx(3, 0)]).unwrap()
    }

    fn check(c: &Circuit, r: &MapResult) {
        assert_eq!(r.swaps, r.mapped.swap_count());
        for gate in &r.mapped.gates {
            if let Some((a, b)) = gate.pair() {
                assert!(r.subarch.has_edge(a, b), "{gate:?} off the graph");
            }
        }
        assert_eq!(&unmap(&r.mapped, &r.initial).unwrap(), c);
    }

    #[test]
    fn ring_circuit_on_path_needs_two() {
        let c5 = ring(5, 1);
        let p4 = c5.induced_subgraph(&VertexSet::new([1, 2, 3, 4])).unwrap();
        let r = map_optimal(&ring4_circuit(), &p4, None).unwrap();
        assert_eq!(r.swaps, 2);
        check(&ring4_circuit(), &r);
    }

    #[test]
    fn ring_circuit_on_five_cycle_needs_one() {
        let r = map_optimal(&ring4_circuit(), &ring(5, 1), None).unwrap();
        assert_eq!(r.swaps, 1);
        check(&ring4_circuit(), &r);
        assert_eq!(
            map_optimal(&ring4_circuit(), &ring(5, 1), Some(0)).unwrap_err(),
            MapError::BoundExceeded { bound: 0 }
        );
        assert_eq!(map_optimal(&ring4_circuit(), &ring(5, 1), Some(1)).unwrap().swaps, 1);
    }

    #[test]
    fn embeddable_interaction_graph_needs_none() {
        let r = map_optimal(&ring4_circuit(), &ring(4, 10), Some(0)).unwrap();
        assert_eq!(r.swaps, 0);
        check(&ring4_circuit(), &r);
    }

    #[test]
    fn unary_and_idle_qubits_are_kept() {
        let c = Circuit::logical(
            4,
            vec![
                Gate::unary("h", 3),
                Gate::cx(0, 2),
                Gate::unary("x", 1),
                Gate::cx(2, 0),
                Gate::unary("t", 0),
            ],
        )
        .unwrap();
        let r = map_optimal(&c, &line(5, 0), None).unwrap();
        assert_eq!(r.swaps, 0);
        check(&c, &r);
        assert_eq!(r.initial.len(), 4);

        let empty = Circuit::logical(3, vec![]).unwrap();
        let r = map_optimal(&empty, &line(3, 7), Some(0)).unwrap();
        assert_eq!(r.initial.as_slice(), &[7, 8, 9]);
        assert!(r.mapped.is_empty());
    }

    #[test]
    fn triangle_on_path() {
        let c = Circuit::logical(3, vec![Gate::cx(0, 1), Gate::cx(1, 2), Gate::cx(0, 2)]).unwrap();
        let r = map_optimal(&c, &line(3, 0), None).unwrap();
        assert_eq!(r.swaps, 1);
        check(&c, &r);
    }

    #[test]
    fn precondition_errors() {
        assert_eq!(
            map_optimal(&ring4_circuit(), &line(3, 0), None).unwrap_err(),
            MapError::TooLarge { needed: 4, available: 3 }
        );
        let split = CouplingGraph::with_qubits("split", 4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(map_optimal(&ring4_circuit(), &split, None).unwrap_err(), MapError::Disconnected);
        let phys = Circuit::physical(2, vec![Gate::Swap(0, 1)]).unwrap();
        assert_eq!(map_optimal(&phys, &line(2, 0), None).unwrap_err(), MapError::NotLogical);
    }

    #[test]
    fn node_limit_reports_timeout() {
        let mapper = ExactMapper {
            max_nodes: Some(0),
            ..ExactMapper::default()
        };
        assert_eq!(mapper.map(&ring4_circuit(), &line(4, 0), None).unwrap_err(), MapError::Timeout);
    }

    #[test]
    fn relaxed_order_never_costs_more() {
        // cx(0,1) cx(2,3) cx(0,2) cx(1,3) on a path: interleaving is free to choose.
        let c = Circuit::logical(4, vec![Gate::cx(0, 1), Gate::cx(0, 2), Gate::cx(2, 3), Gate::cx(1, 3)]).unwrap();
        let g = line(4, 0);
        let strict = map_optimal(&c, &g, None).unwrap();
        let relaxed = ExactMapper {
            order: GateOrder::Relaxed,
            ..ExactMapper::default()
        }
        .map(&c, &g, None)
        .unwrap();
        assert!(relaxed.swaps <= strict.swaps);
        let back = unmap(&relaxed.mapped, &relaxed.initial).unwrap();
        let mut a = back.gates.clone();
        let mut b = c.gates.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
