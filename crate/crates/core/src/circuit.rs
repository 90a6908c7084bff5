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

//! Circuits over unary gates, CX and SWAP, and the OpenQASM 2.0 subset used to
//! read and write them.
//!
//! Logical circuits use the register name `q`, physical circuits use `Q`. A
//! mapped circuit may carry its initial layout as leading comment lines of the
//! form `// q[i] -> Q[j]`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// CX gates per SWAP when a SWAP is decomposed.
pub const CX_PER_SWAP: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("gate {index}: operand {qubit} out of range (circuit has {qubit_count} qubits)")]
    OperandOutOfRange { index: usize, qubit: u32, qubit_count: u32 },
    #[error("gate {index}: {kind} needs two distinct operands")]
    RepeatedOperand { index: usize, kind: &'static str },
    #[error("gate {index}: SWAP is not allowed in a logical circuit")]
    SwapInLogical { index: usize },
    #[error("gate {index}: gate on unallocated qubit {qubit}")]
    Unallocated { index: usize, qubit: u32 },
    #[error("allocation is not injective: physical qubit {0} used twice")]
    NotInjective(u32),
    #[error("swap needs two distinct physical qubits, got {0} twice")]
    DegenerateSwap(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Logical,
    Physical,
}

impl Space {
    fn register(self) -> &'static str {
        match self {
            Space::Logical => "q",
            Space::Physical => "Q",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    /// Single-qubit gate; parameters are kept verbatim.
    Unary {
        name: String,
        params: Option<String>,
        qubit: u32,
    },
    Cx {
        control: u32,
        target: u32,
    },
    Swap(u32, u32),
}

impl Gate {
    pub fn unary(name: impl Into<String>, qubit: u32) -> Gate {
        Gate::Unary {
            name: name.into(),
            params: None,
            qubit,
        }
    }

    pub fn cx(control: u32, target: u32) -> Gate {
        Gate::Cx { control, target }
    }

    pub fn qubits(&self) -> Vec<u32> {
        match *self {
            Gate::Unary { qubit, .. } => vec![qubit],
            Gate::Cx { control, target } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    /// Operand pair of a binary gate.
    pub fn pair(&self) -> Option<(u32, u32)> {
        match *self {
            Gate::Unary { .. } => None,
            Gate::Cx { control, target } => Some((control, target)),
            Gate::Swap(a, b) => Some((a, b)),
        }
    }

    pub fn is_swap(&self) -> bool {
        matches!(self, Gate::Swap(..))
    }

    /// Same gate with every operand passed through `f`.
    pub fn relabel(&self, mut f: impl FnMut(u32) -> u32) -> Gate {
        match self {
            Gate::Unary {
                name,
                params,
                qubit,
            } => Gate::Unary {
                name: name.clone(),
                params: params.clone(),
                qubit: f(*qubit),
            },
            Gate::Cx { control, target } => Gate::Cx {
                control: f(*control),
                target: f(*target),
            },
            Gate::Swap(a, b) => Gate::Swap(f(*a), f(*b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub space: Space,
    pub qubit_count: u32,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(space: Space, qubit_count: u32) -> Self {
        Circuit {
            space,
            qubit_count,
            gates: Vec::new(),
        }
    }

    pub fn logical(qubit_count: u32, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        Self::from_gates(Space::Logical, qubit_count, gates)
    }

    pub fn physical(qubit_count: u32, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        Self::from_gates(Space::Physical, qubit_count, gates)
    }

    pub fn from_gates(space: Space, qubit_count: u32, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(space, qubit_count);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let index = self.gates.len();
        for q in gate.qubits() {
            if q >= self.qubit_count {
                return Err(CircuitError::OperandOutOfRange {
                    index,
                    qubit: q,
                    qubit_count: self.qubit_count,
                });
            }
        }
        match gate {
            Gate::Cx { control, target } if control == target => {
                return Err(CircuitError::RepeatedOperand { index, kind: "cx" })
            }
            Gate::Swap(a, b) if a == b => {
                return Err(CircuitError::RepeatedOperand { index, kind: "swap" })
            }
            Gate::Swap(..) if self.space == Space::Logical => {
                return Err(CircuitError::SwapInLogical { index })
            }
            _ => {}
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn swap_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_swap()).count()
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Injective map from logical to physical qubits; index = logical qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation {
    forward: Vec<u32>,
}

impl Allocation {
    pub fn new(forward: Vec<u32>) -> Result<Self, CircuitError> {
        let mut seen = std::collections::HashSet::new();
        for &p in &forward {
            if !seen.insert(p) {
                return Err(CircuitError::NotInjective(p));
            }
        }
        Ok(Allocation { forward })
    }

    pub fn identity(n: u32) -> Self {
        Allocation {
            forward: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn physical(&self, logical: u32) -> Option<u32> {
        self.forward.get(logical as usize).copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.forward
    }

    /// The logical qubit on `physical`, or `None` for an unallocated qubit.
    pub fn logical_at(&self, physical: u32) -> Option<u32> {
        self.forward
            .iter()
            .position(|&p| p == physical)
            .map(|l| l as u32)
    }

    pub fn inverse(&self) -> HashMap<u32, u32> {
        self.forward
            .iter()
            .enumerate()
            .map(|(l, &p)| (p, l as u32))
            .collect()
    }

    /// `pi_ij . self`: the logical qubits on `i` and `j` trade places.
    pub fn apply_swap(&self, i: u32, j: u32) -> Result<Allocation, CircuitError> {
        if i == j {
            return Err(CircuitError::DegenerateSwap(i));
        }
        let forward = self
            .forward
            .iter()
            .map(|&p| match p {
                p if p == i => j,
                p if p == j => i,
                p => p,
            })
            .collect();
        Ok(Allocation { forward })
    }

    /// Composes with a physical relabelling `h`.
    pub fn map_physical(&self, mut h: impl FnMut(u32) -> u32) -> Result<Allocation, CircuitError> {
        Allocation::new(self.forward.iter().map(|&p| h(p)).collect())
    }
}

/// Strips SWAPs from a physical circuit and relabels the remaining gates back
/// to logical qubits, tracking the allocation through every SWAP.
pub fn unmap(c: &Circuit, a: &Allocation) -> Result<Circuit, CircuitError> {
    let mut inverse = a.inverse();
    let mut out = Circuit::new(Space::Logical, a.len() as u32);
    for (index, gate) in c.gates.iter().enumerate() {
        match *gate {
            Gate::Swap(i, j) => {
                let li = inverse.remove(&i);
                let lj = inverse.remove(&j);
                if let Some(l) = li {
                    inverse.insert(j, l);
                }
                if let Some(l) = lj {
                    inverse.insert(i, l);
                }
            }
            _ => {
                let mut missing = None;
                let relabelled = gate.relabel(|q| match inverse.get(&q) {
                    Some(&l) => l,
                    None => {
                        missing.get_or_insert(q);
                        0
                    }
                });
                if let Some(qubit) = missing {
                    return Err(CircuitError::Unallocated { index, qubit });
                }
                out.gates.push(relabelled);
            }
        }
    }
    Ok(out)
}

fn parse_err(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the OpenQASM 2.0 subset. The register name decides the space: `Q` is
/// physical, anything else logical.
pub fn parse_qasm(text: &str) -> Result<Circuit, CircuitError> {
    parse_qasm_with(text, None)
}

/// Reads the OpenQASM 2.0 subset into the given space regardless of register name.
pub fn parse_qasm_as(text: &str, space: Space) -> Result<Circuit, CircuitError> {
    parse_qasm_with(text, Some(space))
}

fn parse_qasm_with(text: &str, forced: Option<Space>) -> Result<Circuit, CircuitError> {
    let mut cleaned = String::with_capacity(text.len());
    for line in text.lines() {
        cleaned.push_str(line.split("//").next().unwrap_or(""));
        cleaned.push('\n');
    }

    let mut register: Option<(String, Circuit)> = None;
    let mut line = 1;
    for raw in cleaned.split(';') {
        let leading = &raw[..raw.len() - raw.trim_start().len()];
        let stmt_line = line + leading.matches('\n').count();
        line += raw.matches('\n').count();
        let stmt = raw.split_whitespace().collect::<Vec<_>>().join(" ");
        if stmt.is_empty() {
            continue;
        }
        let (head, rest) = stmt.split_once(' ').unwrap_or((stmt.as_str(), ""));
        match head {
            "OPENQASM" | "include" | "barrier" => continue,
            "qreg" => {
                if register.is_some() {
                    return Err(parse_err(stmt_line, "multi-register programs are unsupported"));
                }
                let (name, size) = parse_reg(rest).ok_or_else(|| parse_err(stmt_line, "malformed qreg"))?;
                let space = forced.unwrap_or(if name == "Q" { Space::Physical } else { Space::Logical });
                register = Some((name, Circuit::new(space, size)));
                continue;
            }
            _ => {}
        }

        let Some((reg_name, circuit)) = register.as_mut() else {
            return Err(parse_err(stmt_line, format!("statement before qreg: {stmt}")));
        };
        let (name, params, args) = split_application(&stmt)
            .ok_or_else(|| parse_err(stmt_line, format!("unknown statement: {stmt}")))?;
        let operands = args
            .split(',')
            .map(|a| parse_operand(a.trim(), reg_name))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| parse_err(stmt_line, format!("malformed operands: {args}")))?;
        let gate = match (name.as_str(), operands.as_slice()) {
            (_, ops) if ops.len() >= 3 => {
                return Err(parse_err(stmt_line, format!("{name}: arity >= 3 unsupported")))
            }
            ("cx" | "CX", &[c, t]) => Gate::cx(c, t),
            ("swap", &[a, b]) => Gate::Swap(a, b),
            (_, &[_, _]) => {
                return Err(parse_err(stmt_line, format!("unsupported two-qubit gate {name}")))
            }
            ("cx" | "CX" | "swap", _) => {
                return Err(parse_err(stmt_line, format!("{name} needs two operands")))
            }
            (_, &[q]) if is_gate_name(&name) => Gate::Unary {
                name,
                params,
                qubit: q,
            },
            _ => return Err(parse_err(stmt_line, format!("unknown statement: {stmt}"))),
        };
        circuit.push(gate).map_err(|e| parse_err(stmt_line, e.to_string()))?;
    }
    register
        .map(|(_, c)| c)
        .ok_or_else(|| parse_err(line, "missing qreg declaration"))
}

fn is_gate_name(name: &str) -> bool {
    !matches!(
        name,
        "creg" | "measure" | "reset" | "gate" | "opaque" | "if" | "qreg"
    ) && name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_reg(rest: &str) -> Option<(String, u32)> {
    let rest = rest.replace(' ', "");
    let (name, size) = rest.split_once('[')?;
    let size = size.strip_suffix(']')?.parse().ok()?;
    (!name.is_empty()).then(|| (name.to_string(), size))
}

fn parse_operand(arg: &str, reg: &str) -> Option<u32> {
    let arg = arg.replace(' ', "");
    let (name, idx) = arg.split_once('[')?;
    if name != reg {
        return None;
    }
    idx.strip_suffix(']')?.parse().ok()
}

/// Splits `name(params) args` or `name args`.
fn split_application(stmt: &str) -> Option<(String, Option<String>, String)> {
    if let Some(open) = stmt.find('(') {
        let close = stmt.rfind(')')?;
        let name = stmt[..open].trim();
        if name.contains(' ') || close < open {
            return None;
        }
        let params = stmt[open + 1..close].trim().to_string();
        let args = stmt[close + 1..].trim().to_string();
        (!args.is_empty()).then(|| (name.to_string(), Some(params), args))
    } else {
        let (name, args) = stmt.split_once(' ')?;
        Some((name.to_string(), None, args.trim().to_string()))
    }
}

/// Writes the circuit as OpenQASM 2.0. A layout, when given, is prepended as
/// `// q[i] -> Q[j]` lines.
pub fn emit_qasm(c: &Circuit, layout: Option<&Allocation>) -> String {
    let mut out = String::new();
    if let Some(a) = layout {
        for (l, &p) in a.as_slice().iter().enumerate() {
            let _ = writeln!(out, "// q[{l}] -> Q[{p}]");
        }
    }
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let reg = c.space.register();
    let _ = writeln!(out, "qreg {reg}[{}];", c.qubit_count);
    for g in &c.gates {
        match g {
            Gate::Unary {
                name,
                params,
                qubit,
            } => match params {
                Some(p) => {
                    let _ = writeln!(out, "{name}({p}) {reg}[{qubit}];");
                }
                None => {
                    let _ = writeln!(out, "{name} {reg}[{qubit}];");
                }
            },
            Gate::Cx { control, target } => {
                let _ = writeln!(out, "cx {reg}[{control}],{reg}[{target}];");
            }
            Gate::Swap(a, b) => {
                let _ = writeln!(out, "swap {reg}[{a}],{reg}[{b}];");
            }
        }
    }
    out
}

/// Reads a `// q[i] -> Q[j]` layout block. Returns `None` when there is none.
pub fn parse_layout_comments(text: &str) -> Result<Option<Allocation>, CircuitError> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let Some(body) = line.trim().strip_prefix("//") else {
            continue;
        };
        let Some((lhs, rhs)) = body.split_once("->") else {
            continue;
        };
        let (Some(l), Some(p)) = (parse_operand(lhs.trim(), "q"), parse_operand(rhs.trim(), "Q")) else {
            continue;
        };
        pairs.push((n + 1, l, p));
    }
    if pairs.is_empty() {
        return Ok(None);
    }
    let n = pairs.iter().map(|&(_, l, _)| l).max().expect("non-empty") as usize + 1;
    let mut forward = vec![None; n];
    for (line, l, p) in pairs {
        if forward[l as usize].replace(p).is_some() {
            return Err(parse_err(line, format!("q[{l}] mapped twice")));
        }
    }
    let forward = forward
        .into_iter()
        .enumerate()
        .map(|(l, p)| p.ok_or_else(|| parse_err(0, format!("layout misses q[{l}]"))))
        .collect::<Result<Vec<_>, _>>()?;
    Allocation::new(forward).map(Some)
}
