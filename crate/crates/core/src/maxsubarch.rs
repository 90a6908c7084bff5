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

//! Maximal connected `k`-subarchitectures of a platform.
//!
//! The pipeline has three stages that run interleaved over one stream of
//! candidates:
//!
//! 1. every connected induced `k`-subgraph is produced by [`connected_subgraphs`];
//! 2. candidates are bucketed by WL hash and kept only if no graph in their
//!    bucket is isomorphic to them;
//! 3. each surviving candidate is compared against the current maximal set:
//!    it is dropped when it embeds into a member, otherwise it evicts every
//!    member that embeds into it and joins the set.
//!
//! All candidates have `k` vertices, so `a` can embed into `b` only when `a` has
//! strictly fewer edges (equal edge counts would make them isomorphic). The
//! comparisons are filtered on that.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::Deadline;
use crate::enumerate::{connected_subgraphs, count_all_subsets, EnumerateError};
use crate::graph::{CouplingGraph, PlatformFile, VertexSet};
use crate::iso::{is_isomorphic, subgraph_isomorphic, wl_hash, GraphHash, DEFAULT_WL_ITERATIONS};

#[derive(Debug, Error)]
pub enum SubarchError {
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("time budget expired after {connected} connected subgraphs")]
    BudgetExpired { connected: u64 },
    #[error("cache I/O: {0}")]
    Cache(#[from] io::Error),
    #[error("cache entry is corrupt: {0}")]
    CorruptCache(String),
}

#[derive(Debug, Clone, Copy)]
pub struct MaxSubarchOptions {
    pub wl_iterations: usize,
    /// Treat equal hashes as isomorphic and skip the exact check.
    pub trust_hash: bool,
    pub deadline: Deadline,
}

impl Default for MaxSubarchOptions {
    fn default() -> Self {
        MaxSubarchOptions {
            wl_iterations: DEFAULT_WL_ITERATIONS,
            trust_hash: false,
            deadline: Deadline::none(),
        }
    }
}

/// Candidate counts after each stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    #[serde(with = "biguint_string")]
    pub all_subsets: BigUint,
    pub connected: u64,
    pub noniso: u64,
    pub max: u64,
}

impl StageCounts {
    pub fn as_tuple(&self) -> (String, u64, u64, u64) {
        (self.all_subsets.to_string(), self.connected, self.noniso, self.max)
    }
}

/// Seconds spent per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub connected: f64,
    pub noniso: f64,
    pub max: f64,
    pub total: f64,
}

/// Maximal, connected, pairwise non-subgraph-isomorphic `k`-subarchitectures.
#[derive(Debug, Clone)]
pub struct SubarchSet {
    pub platform: CouplingGraph,
    pub k: usize,
    /// Induced subgraphs of `platform`, in insertion order.
    pub members: Vec<CouplingGraph>,
    pub counts: StageCounts,
    pub times: StageTimes,
}

impl SubarchSet {
    pub fn member_vertex_sets(&self) -> Vec<VertexSet> {
        self.members.iter().map(CouplingGraph::vertex_set).collect()
    }
}

pub fn max_subarchitectures(
    g: &CouplingGraph,
    k: usize,
    opts: &MaxSubarchOptions,
) -> Result<SubarchSet, SubarchError> {
    let started = Instant::now();
    let mut stream = connected_subgraphs(g, k)?;
    let mut times = StageTimes::default();
    let mut connected = 0u64;
    let mut noniso = 0u64;
    let mut buckets: HashMap<GraphHash, Vec<CouplingGraph>> = HashMap::new();
    let mut members: Vec<CouplingGraph> = Vec::new();

    loop {
        let t0 = Instant::now();
        let next = stream.next();
        times.connected += t0.elapsed().as_secs_f64();
        let Some(set) = next else { break };
        connected += 1;
        if connected % 256 == 1 && opts.deadline.expired() {
            return Err(SubarchError::BudgetExpired { connected });
        }

        let t1 = Instant::now();
        let candidate = g.induced_subgraph(&set).expect("enumerated sets are vertices");
        let bucket = buckets.entry(wl_hash(&candidate, opts.wl_iterations)).or_default();
        let novel = if opts.trust_hash {
            bucket.is_empty()
        } else {
            !bucket.iter().any(|other| is_isomorphic(other, &candidate))
        };
        if novel {
            bucket.push(candidate.clone());
        }
        times.noniso += t1.elapsed().as_secs_f64();
        if !novel {
            continue;
        }
        noniso += 1;

        let t2 = Instant::now();
        insert_if_maximal(&mut members, candidate);
        times.max += t2.elapsed().as_secs_f64();
    }

    times.total = started.elapsed().as_secs_f64();
    let counts = StageCounts {
        all_subsets: count_all_subsets(g.vertex_count() as u64, k as u64),
        connected,
        noniso,
        max: members.len() as u64,
    };
    Ok(SubarchSet {
        platform: g.clone(),
        k,
        members,
        counts,
        times,
    })
}

fn insert_if_maximal(members: &mut Vec<CouplingGraph>, candidate: CouplingGraph) {
    let e = candidate.edge_count();
    let mut denser: Vec<&CouplingGraph> = members.iter().filter(|m| m.edge_count() > e).collect();
    denser.sort_by_key(|m| std::cmp::Reverse(m.edge_count()));
    if denser.into_iter().any(|m| subgraph_isomorphic(&candidate, m)) {
        return;
    }
    members.retain(|m| !(m.edge_count() < e && subgraph_isomorphic(m, &candidate)));
    members.push(candidate);
}

/// Runs [`max_subarchitectures`] through an optional on-disk cache.
pub fn max_subarchitectures_cached(
    g: &CouplingGraph,
    k: usize,
    opts: &MaxSubarchOptions,
    cache: Option<&SubarchCache>,
) -> Result<SubarchSet, SubarchError> {
    if let Some(cache) = cache {
        if let Some(hit) = cache.load(g, k, opts)? {
            return Ok(hit);
        }
    }
    let set = max_subarchitectures(g, k, opts)?;
    if let Some(cache) = cache {
        cache.store(&set, opts)?;
    }
    Ok(set)
}

/// Directory of precomputed subarchitecture sets keyed by platform digest and `k`.
#[derive(Debug, Clone)]
pub struct SubarchCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    platform_digest: String,
    platform: PlatformFile,
    k: usize,
    members: Vec<VertexSet>,
    counts: StageCounts,
    times: StageTimes,
}

impl SubarchCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SubarchCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, g: &CouplingGraph, k: usize, opts: &MaxSubarchOptions) -> PathBuf {
        let digest = g.digest();
        let mode = if opts.trust_hash {
            format!("-trust-wl{}", opts.wl_iterations)
        } else {
            String::new()
        };
        self.dir.join(format!("{}-k{k}{mode}.json", &digest[..16]))
    }

    pub fn load(
        &self,
        g: &CouplingGraph,
        k: usize,
        opts: &MaxSubarchOptions,
    ) -> Result<Option<SubarchSet>, SubarchError> {
        let path = self.path_for(g, k, opts);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let rec: CacheRecord = serde_json::from_str(&text)
            .map_err(|e| SubarchError::CorruptCache(format!("{}: {e}", path.display())))?;
        if rec.platform_digest != g.digest() || rec.k != k {
            return Ok(None);
        }
        let members = rec
            .members
            .iter()
            .map(|s| g.induced_subgraph(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SubarchError::CorruptCache(e.to_string()))?;
        Ok(Some(SubarchSet {
            platform: g.clone(),
            k,
            members,
            counts: rec.counts,
            times: rec.times,
        }))
    }

    pub fn store(&self, set: &SubarchSet, opts: &MaxSubarchOptions) -> Result<(), SubarchError> {
        fs::create_dir_all(&self.dir)?;
        let rec = CacheRecord {
            platform_digest: set.platform.digest(),
            platform: set.platform.to_platform_file(),
            k: set.k,
            members: set.member_vertex_sets(),
            counts: set.counts.clone(),
            times: set.times,
        };
        let path = self.path_for(&set.platform, set.k, opts);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&rec).expect("record serializes"))?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platforms::{guadalupe, line, ring, tokyo};

    fn counts(g: &CouplingGraph, k: usize) -> (String, u64, u64, u64) {
        max_subarchitectures(g, k, &MaxSubarchOptions::default())
            .unwrap()
            .counts
            .as_tuple()
    }

    #[test]
    fn five_cycle_k4() {
        let set = max_subarchitectures(&ring(5, 1), 4, &MaxSubarchOptions::default()).unwrap();
        assert_eq!(set.counts.as_tuple(), ("5".into(), 5, 1, 1));
        assert!(is_isomorphic(&set.members[0], &line(4, 0)));
    }

    #[test]
    fn full_size_is_the_platform() {
        let g = ring(6, 0);
        let set = max_subarchitectures(&g, 6, &MaxSubarchOptions::default()).unwrap();
        assert_eq!(set.counts.as_tuple(), ("1".into(), 1, 1, 1));
        assert_eq!(set.members, vec![g]);
    }

    #[test]
    fn guadalupe_k4_and_k8() {
        assert_eq!(counts(&guadalupe(), 4), ("1820".into(), 24, 2, 2));
        assert_eq!(counts(&guadalupe(), 8), ("12870".into(), 55, 5, 5));
    }

    #[test]
    fn tokyo_k4_has_one_maximal_member() {
        let set = max_subarchitectures(&tokyo(), 4, &MaxSubarchOptions::default()).unwrap();
        assert_eq!(set.counts.noniso, 6);
        assert_eq!(set.members.len(), 1);
        assert_eq!(set.members[0].edge_count(), 6);
    }

    #[test]
    fn members_keep_platform_labels() {
        let g = guadalupe();
        let set = max_subarchitectures(&g, 8, &MaxSubarchOptions::default()).unwrap();
        for m in &set.members {
            assert_eq!(&g.induced_subgraph(&m.vertex_set()).unwrap(), m);
        }
    }

    #[test]
    fn trust_hash_matches_on_small_platforms() {
        let g = guadalupe();
        let opts = MaxSubarchOptions {
            trust_hash: true,
            ..Default::default()
        };
        let a = max_subarchitectures(&g, 8, &opts).unwrap();
        assert_eq!(a.counts.as_tuple(), counts(&g, 8));
    }

    #[test]
    fn expired_budget_is_reported() {
        let opts = MaxSubarchOptions {
            deadline: Deadline::after(std::time::Duration::ZERO),
            ..Default::default()
        };
        let err = max_subarchitectures(&tokyo(), 8, &opts).unwrap_err();
        assert!(matches!(err, SubarchError::BudgetExpired { .. }));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SubarchCache::new(dir.path());
        let g = guadalupe();
        let opts = MaxSubarchOptions::default();
        assert!(cache.load(&g, 8, &opts).unwrap().is_none());
        let fresh = max_subarchitectures_cached(&g, 8, &opts, Some(&cache)).unwrap();
        let hit = cache.load(&g, 8, &opts).unwrap().expect("stored");
        assert_eq!(hit.members, fresh.members);
        assert_eq!(hit.counts, fresh.counts);
        // Another platform never reads this entry.
        assert!(cache.load(&tokyo(), 8, &opts).unwrap().is_none());
    }
}
