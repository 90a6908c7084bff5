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

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subarch::circuit::{emit_qasm, parse_qasm, unmap, Allocation, Circuit, Gate, Space};
use subarch::enumerate::connected_subgraphs;
use subarch::graph::{parse_platform, CouplingGraph};
use subarch::iso::{find_embedding, is_isomorphic, subgraph_isomorphic, wl_hash};
use subarch::mapper::{brute_force_optimal, map_optimal, ExactMapper, GateOrder, Map};
use subarch::maxsubarch::{max_subarchitectures, MaxSubarchOptions};
use subarch::verify::{check_equivalence, lift_to_platform, verify_result, EquivalenceMode};

fn graph(seed: u64, max_n: u32) -> CouplingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(0.0..0.6);
    common::random_connected(&mut rng, n, p)
}

fn permutation(seed: u64, n: u32) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

fn instance(seed: u64) -> (CouplingGraph, Circuit) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(2..=6);
    let n = rng.gen_range(2..=p.min(4));
    let density = rng.gen_range(0.0..0.6);
    let g = common::random_connected(&mut rng, p, density);
    let gates = rng.gen_range(0..=8);
    (g, common::random_cx_circuit(&mut rng, n, gates))
}

fn mixed_circuit() -> impl Strategy<Value = Circuit> {
    (2u32..6).prop_flat_map(|n| {
        let gate = prop_oneof![
            (0..n, prop::option::of("[a-z]{1,3}")).prop_map(|(q, p)| Gate::Unary {
                name: "rz".into(),
                params: p,
                qubit: q,
            }),
            (0..n, 1..n).prop_map(move |(a, d)| Gate::cx(a, (a + d) % n)),
        ];
        prop::collection::vec(gate, 0..12).prop_map(move |gates| Circuit::logical(n, gates).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn platform_json_round_trips(seed in any::<u64>()) {
        let g = graph(seed, 10);
        prop_assert_eq!(parse_platform(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn induced_subgraphs_keep_labels(seed in any::<u64>(), pick in any::<u64>()) {
        let g = graph(seed, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let s: subarch::graph::VertexSet = g.vertices().iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let h = g.induced_subgraph(&s).unwrap();
        prop_assert_eq!(h.vertices(), s.members());
        for &u in s.members() {
            for &v in s.members() {
                prop_assert_eq!(h.has_edge(u, v), g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn spanning_tree_spans(seed in any::<u64>()) {
        let g = graph(seed, 10);
        let t = g.spanning_tree().unwrap();
        prop_assert_eq!(t.edges().len(), g.vertex_count() - 1);
        prop_assert!(t.edges().iter().all(|&(u, v)| g.has_edge(u, v)));
    }

    #[test]
    fn enumeration_matches_subset_filter(seed in any::<u64>()) {
        let g = graph(seed, 9);
        for k in 1..=g.vertex_count() {
            let got: Vec<Vec<u32>> = connected_subgraphs(&g, k).unwrap().map(|s| s.members().to_vec()).collect();
            let set: BTreeSet<Vec<u32>> = got.iter().cloned().collect();
            prop_assert_eq!(set.len(), got.len());
            prop_assert_eq!(set, common::naive_connected_sets(&g, k));
        }
    }

    #[test]
    fn hash_and_isomorphism_ignore_labels(seed in any::<u64>(), p in any::<u64>(), offset in 0u32..50) {
        let g = graph(seed, 10);
        let h = common::relabel(&g, &permutation(p, g.vertex_count() as u32), offset);
        prop_assert_eq!(wl_hash(&g, 3), wl_hash(&h, 3));
        prop_assert!(is_isomorphic(&g, &h));
        prop_assert!(subgraph_isomorphic(&g, &h));
    }

    #[test]
    fn embeddings_are_witnesses(a in any::<u64>(), b in any::<u64>()) {
        let pattern = graph(a, 5);
        let host = graph(b, 8);
        match find_embedding(&pattern, &host) {
            Some(h) => {
                let image: BTreeSet<u32> = h.values().copied().collect();
                prop_assert_eq!(image.len(), pattern.vertex_count());
                for (u, v) in pattern.edges() {
                    prop_assert!(host.has_edge(h[&u], h[&v]));
                }
            }
            None => prop_assert!(!subgraph_isomorphic(&pattern, &host)),
        }
    }

    #[test]
    fn maximal_sets_cover_and_exclude(seed in any::<u64>(), k in 2usize..6) {
        let g = graph(seed, 8);
        prop_assume!(k <= g.vertex_count());
        let set = max_subarchitectures(&g, k, &MaxSubarchOptions::default()).unwrap();
        let c = &set.counts;
        prop_assert!(c.max <= c.noniso && c.noniso <= c.connected);
        for (i, a) in set.members.iter().enumerate() {
            prop_assert!(a.is_connected());
            for (j, b) in set.members.iter().enumerate() {
                if i != j {
                    prop_assert!(!subgraph_isomorphic(a, b));
                }
            }
        }
        for s in connected_subgraphs(&g, k).unwrap() {
            let h = g.induced_subgraph(&s).unwrap();
            prop_assert!(set.members.iter().any(|m| subgraph_isomorphic(&h, m)));
        }
        let trusted = MaxSubarchOptions { trust_hash: true, ..MaxSubarchOptions::default() };
        let t = max_subarchitectures(&g, k, &trusted).unwrap();
        prop_assert!(t.counts.noniso <= c.noniso);
    }

    #[test]
    fn qasm_round_trips(c in mixed_circuit()) {
        prop_assert_eq!(parse_qasm(&emit_qasm(&c, None)).unwrap(), c);
    }

    #[test]
    fn swap_is_an_involution(n in 1u32..6, seed in any::<u64>(), i in 0u32..8, j in 0u32..8) {
        prop_assume!(i != j);
        let perm = permutation(seed, 8);
        let a = Allocation::new(perm[..n as usize].to_vec()).unwrap();
        let b = a.apply_swap(i, j).unwrap();
        prop_assert!(Allocation::new(b.as_slice().to_vec()).is_ok());
        prop_assert_eq!(b.apply_swap(i, j).unwrap(), a);
    }

    #[test]
    fn mapper_is_optimal_and_correct(seed in any::<u64>()) {
        let (g, c) = instance(seed);
        let r = map_optimal(&c, &g, None).unwrap();
        prop_assert!(verify_result(&c, &r, EquivalenceMode::Strict).passed());
        prop_assert_eq!(unmap(&r.mapped, &r.initial).unwrap(), c.clone());
        if let Some(best) = brute_force_optimal(&c, &g, 4).unwrap() {
            prop_assert_eq!(r.swaps, best);
        }
        for b in 0..=r.swaps + 1 {
            match map_optimal(&c, &g, Some(b)) {
                Ok(s) => { prop_assert!(b >= r.swaps); prop_assert_eq!(s.swaps, r.swaps); }
                Err(_) => prop_assert!(b < r.swaps),
            }
        }
    }

    #[test]
    fn unary_gates_survive_mapping(c in mixed_circuit(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.gen_range(c.qubit_count..=6);
        let g = common::random_connected(&mut rng, p, 0.2);
        let r = map_optimal(&c, &g, None).unwrap();
        prop_assert!(verify_result(&c, &r, EquivalenceMode::Strict).passed());
    }

    #[test]
    fn relaxed_mapping_is_relaxed_equivalent(seed in any::<u64>()) {
        let (g, c) = instance(seed);
        let strict = map_optimal(&c, &g, None).unwrap();
        let relaxed = ExactMapper { order: GateOrder::Relaxed, ..ExactMapper::default() }.map(&c, &g, None).unwrap();
        prop_assert!(relaxed.swaps <= strict.swaps);
        prop_assert!(verify_result(&c, &relaxed, EquivalenceMode::Relaxed).passed());
        prop_assert!(verify_result(&c, &strict, EquivalenceMode::Relaxed).passed());
    }

    #[test]
    fn subgraphs_never_map_cheaper(seed in any::<u64>(), drop in any::<u64>()) {
        let (g, c) = instance(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(drop);
        let tree: BTreeSet<(u32, u32)> = g.spanning_tree().unwrap().edges().into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        let kept = g.edges().into_iter().filter(|e| tree.contains(e) || rng.gen_bool(0.5));
        let sparse = CouplingGraph::new("sparse", g.vertices().iter().copied(), kept).unwrap();
        prop_assert!(subgraph_isomorphic(&sparse, &g));
        prop_assert!(map_optimal(&c, &sparse, None).unwrap().swaps >= map_optimal(&c, &g, None).unwrap().swaps);
    }

    #[test]
    fn lifting_through_a_relabelling(seed in any::<u64>(), p in any::<u64>()) {
        let (g, c) = instance(seed);
        let moved = common::relabel(&g, &permutation(p, g.vertex_count() as u32), 40);
        let r = map_optimal(&c, &moved, None).unwrap();
        let lifted = lift_to_platform(&r, &g).unwrap();
        prop_assert_eq!(lifted.swaps, r.swaps);
        prop_assert!(verify_result(&c, &lifted, EquivalenceMode::Strict).passed());
    }

    #[test]
    fn physical_copies_are_equivalent(c in mixed_circuit()) {
        let copy = parse_qasm(&emit_qasm(&c, None).replace("q[", "Q[")).unwrap();
        prop_assert_eq!(copy.space, Space::Physical);
        let id = Allocation::identity(c.qubit_count);
        prop_assert!(check_equivalence(&c, &copy, &id, EquivalenceMode::Strict).is_empty());
        prop_assert!(check_equivalence(&c, &copy, &id, EquivalenceMode::Relaxed).is_empty());
    }
}
