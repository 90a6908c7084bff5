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

//! Maximal subarchitectures of quantum coupling graphs and exact qubit mapping
//! on top of them.

mod bits;

pub mod budget;
pub mod circuit;
pub mod enumerate;
pub mod graph;
pub mod iso;
pub mod mapper;
pub mod maxsubarch;
pub mod platforms;
pub mod strategy;
pub mod verify;

pub use budget::Deadline;
pub use circuit::{Allocation, Circuit, Gate, Space};
pub use graph::{CouplingGraph, GraphError, Qubit, VertexSet};
pub use mapper::{map_optimal, ExactMapper, GateOrder, Map, MapError, MapResult};
pub use maxsubarch::{max_subarchitectures, MaxSubarchOptions, SubarchCache, SubarchSet};
pub use strategy::{map_with_subarch, optimality_certificate, StrategyConfig};
pub use verify::{verify, EquivalenceMode, Verdict};
