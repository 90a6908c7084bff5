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

//! Built-in platforms.

use crate::graph::{parse_platform, CouplingGraph};

const GUADALUPE: &str = include_str!("../data/guadalupe.json");
const TOKYO: &str = include_str!("../data/tokyo.json");

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["guadalupe", "tokyo"];

/// IBM Guadalupe, 16 qubits.
pub fn guadalupe() -> CouplingGraph {
    parse_platform(GUADALUPE).expect("bundled guadalupe.json is valid")
}

/// IBM Tokyo, 20 qubits.
pub fn tokyo() -> CouplingGraph {
    parse_platform(TOKYO).expect("bundled tokyo.json is valid")
}

pub fn builtin(name: &str) -> Option<CouplingGraph> {
    match name {
        "guadalupe" => Some(guadalupe()),
        "tokyo" => Some(tokyo()),
        _ => None,
    }
}

/// Raw JSON of a built-in platform.
pub fn builtin_json(name: &str) -> Option<&'static str> {
    match name {
        "guadalupe" => Some(GUADALUPE),
        "tokyo" => Some(TOKYO),
        _ => None,
    }
}

/// Ring on the labels `first..first+n`.
pub fn ring(n: u32, first: u32) -> CouplingGraph {
    let labels: Vec<u32> = (first..first + n).collect();
    let edges = (0..n as usize).map(|i| (labels[i], labels[(i + 1) % n as usize]));
    CouplingGraph::new(format!("ring{n}"), labels.clone(), edges).expect("ring is well formed")
}

/// Path on the labels `first..first+n`.
pub fn line(n: u32, first: u32) -> CouplingGraph {
    let edges = (first..first + n.saturating_sub(1)).map(|i| (i, i + 1));
    CouplingGraph::new(format!("line{n}"), first..first + n, edges).expect("line is well formed")
}
