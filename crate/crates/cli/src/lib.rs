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

//! Command-line front end: subarchitecture counts, mapping, verification and a
//! table benchmark harness.
//!
//! Exit codes: 0 success, 1 mapping or verification failure, 2 usage error,
//! 3 budget expiry.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use subarch::budget::Deadline;
use subarch::circuit::{emit_qasm, parse_layout_comments, parse_qasm, Allocation, Circuit, Space, CX_PER_SWAP};
use subarch::enumerate::{connected_subgraphs, count_all_subsets};
use subarch::graph::{parse_platform, CouplingGraph};
use subarch::iso::DEFAULT_WL_ITERATIONS;
use subarch::mapper::{ExactMapper, GateOrder, Map, MapError, MapResult};
use subarch::maxsubarch::{max_subarchitectures_cached, MaxSubarchOptions, StageTimes, SubarchCache, SubarchError};
use subarch::platforms;
use subarch::strategy::{map_with_subarch, optimality_certificate, Ancillas, MemberOrder, StrategyConfig, StrategyError};
use subarch::verify::{verify, EquivalenceMode};

#[derive(Debug, Parser)]
#[command(name = "qls", version, about = "Maximal subarchitectures and SWAP-optimal qubit mapping")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Built-in platform name or path to a platform JSON file.
    #[arg(long, global = true)]
    pub platform: Option<String>,
    /// Directory for precomputed subarchitecture sets.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true)]
    pub budget: Option<f64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count (and optionally list) the subarchitectures of one size.
    Subarch(SubarchArgs),
    /// Map a logical circuit onto the platform.
    Map(MapArgs),
    /// Check a mapped circuit against its logical input.
    Verify(VerifyArgs),
    /// Run a manifest of (platform, k) rows and print a table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Connected,
    Max,
}

#[derive(Debug, Args)]
pub struct SubarchArgs {
    #[arg(long, short = 'k')]
    pub size: usize,
    /// Also print rows for sizes up to `size + ancillas`.
    #[arg(long, default_value_t = 0)]
    pub ancillas: usize,
    #[arg(long, value_enum, default_value_t = Stage::Max)]
    pub stage: Stage,
    /// Print every set, one per line.
    #[arg(long)]
    pub list: bool,
    /// Write every maximal member as a platform JSON file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long)]
    pub trust_hash: bool,
    #[arg(long, default_value_t = DEFAULT_WL_ITERATIONS)]
    pub wl_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Subarch,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    DenseFirst,
    Insertion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Relaxed,
}

impl From<ModeArg> for EquivalenceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => EquivalenceMode::Strict,
            ModeArg::Relaxed => EquivalenceMode::Relaxed,
        }
    }
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// SWAP bound; the initial bound of the subarchitecture strategy.
    #[arg(long, alias = "initial-bound")]
    pub bound: Option<usize>,
    /// Map onto the whole platform, skipping subarchitectures.
    #[arg(long)]
    pub full_architecture: bool,
    #[arg(long, value_enum, default_value_t = StrategyKind::Subarch)]
    pub strategy: StrategyKind,
    /// An ancilla count or `until-full`.
    #[arg(long, default_value = "2", value_parser = parse_ancillas)]
    pub ancillas: Ancillas,
    #[arg(long, value_enum, default_value_t = OrderArg::DenseFirst)]
    pub order: OrderArg,
    /// Allow gates on disjoint qubits to be reordered.
    #[arg(long)]
    pub relaxed: bool,
    /// Keep trying members after a zero-SWAP result.
    #[arg(long)]
    pub no_early_stop: bool,
    /// Write the mapped QASM here instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Write the strategy run report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn parse_ancillas(s: &str) -> Result<Ancillas, String> {
    if s == "until-full" {
        return Ok(Ancillas::UntilFull);
    }
    s.parse()
        .map(Ancillas::Count)
        .map_err(|_| format!("expected a count or `until-full`, got `{s}`"))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub mapped: PathBuf,
    /// `auto` reads the layout comments of the mapped file; otherwise a file
    /// with layout comments or a JSON array of physical qubits.
    #[arg(long, default_value = "auto")]
    pub layout: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON array of `{"platform": ..., "k": ...}` rows.
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SubarchError> for CliError {
    fn from(e: SubarchError) -> Self {
        match e {
            SubarchError::BudgetExpired { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::BoundExceeded { .. } => CliError::Failure(e.to_string()),
            MapError::Timeout => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Subarch(e) => e.into(),
            StrategyError::Map(e) => e.into(),
        }
    }
}

/// Resolves a built-in name or reads a platform file.
pub fn load_platform(name_or_path: &str) -> Result<CouplingGraph, CliError> {
    if let Some(g) = platforms::builtin(name_or_path) {
        return Ok(g);
    }
    let text = fs::read_to_string(name_or_path).map_err(|e| {
        CliError::Usage(format!(
            "platform `{name_or_path}` is neither built in ({}) nor a readable file: {e}",
            platforms::BUILTIN_NAMES.join(", ")
        ))
    })?;
    parse_platform(&text).map_err(|e| CliError::Usage(format!("{name_or_path}: {e}")))
}

fn platform(global: &Global) -> Result<CouplingGraph, CliError> {
    let name_or_path = global
        .platform
        .as_deref()
        .ok_or_else(|| CliError::Usage("--platform is required".into()))?;
    load_platform(name_or_path)
}

fn read_circuit(path: &Path) -> Result<(String, Circuit), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let c = parse_qasm(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((text, c))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub platform: String,
    pub qubits: usize,
    pub k: usize,
    /// `ok`, `TO` or `error`.
    pub status: String,
    pub all_subsets: Option<String>,
    pub connected: Option<u64>,
    pub noniso: Option<u64>,
    pub max: Option<u64>,
    pub stage_seconds: Option<StageTimes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEnvironment {
    pub timestamp: u64,
    pub budget: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub environment: BenchEnvironment,
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<12} {:>4} {:>4} {:>22} {:>10} {:>8} {:>6} {:>10}\n",
            "platform", "|P|", "k", "all", "connected", "noniso", "max", "seconds"
        );
        for r in &self.rows {
            let cell = |v: Option<u64>| v.map_or(r.status.clone(), |v| v.to_string());
            out.push_str(&format!(
                "{:<12} {:>4} {:>4} {:>22} {:>10} {:>8} {:>6} {:>10}\n",
                r.platform,
                r.qubits,
                r.k,
                r.all_subsets.clone().unwrap_or_else(|| r.status.clone()),
                cell(r.connected),
                cell(r.noniso),
                cell(r.max),
                r.stage_seconds.map_or(r.status.clone(), |t| format!("{:.3}", t.total)),
            ));
        }
        out
    }
}

fn subarch_row(
    g: &CouplingGraph,
    k: usize,
    opts: &MaxSubarchOptions,
    cache: Option<&SubarchCache>,
) -> (BenchRow, Option<subarch::maxsubarch::SubarchSet>) {
    let mut row = BenchRow {
        platform: g.name().to_string(),
        qubits: g.vertex_count(),
        k,
        status: "ok".into(),
        all_subsets: Some(count_all_subsets(g.vertex_count() as u64, k as u64).to_string()),
        connected: None,
        noniso: None,
        max: None,
        stage_seconds: None,
        error: None,
    };
    match max_subarchitectures_cached(g, k, opts, cache) {
        Ok(set) => {
            row.connected = Some(set.counts.connected);
            row.noniso = Some(set.counts.noniso);
            row.max = Some(set.counts.max);
            row.stage_seconds = Some(set.times);
            (row, Some(set))
        }
        Err(SubarchError::BudgetExpired { .. }) => {
            row.status = "TO".into();
            (row, None)
        }
        Err(e) => {
            row.status = "error".into();
            row.error = Some(e.to_string());
            (row, None)
        }
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or(Duration::ZERO)
        .as_secs()
}

pub fn cmd_subarch(global: &Global, args: &SubarchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = platform(global)?;
    let n = g.vertex_count();
    if args.size == 0 || args.size > n {
        return Err(CliError::Usage(format!("--size must be in 1..={n}")));
    }
    let deadline = Deadline::from_seconds(global.budget);

    if args.stage == Stage::Connected {
        let mut count = 0u64;
        for s in connected_subgraphs(&g, args.size).map_err(|e| CliError::Usage(e.to_string()))? {
            count += 1;
            if args.list {
                writeln!(out, "{s}")?;
            }
            if count.is_multiple_of(1024) && deadline.expired() {
                writeln!(out, "connected: TO after {count}")?;
                return Err(CliError::Budget("budget expired".into()));
            }
        }
        if global.json {
            writeln!(out, "{}", to_json(&serde_json::json!({ "k": args.size, "connected": count })))?;
        } else {
            writeln!(out, "connected: {count}")?;
        }
        return Ok(());
    }

    let opts = MaxSubarchOptions {
        wl_iterations: args.wl_iterations,
        trust_hash: args.trust_hash,
        deadline,
    };
    let cache = global.cache.as_ref().map(SubarchCache::new);
    let last = args.size.saturating_add(args.ancillas).min(n);
    let mut rows = Vec::new();
    let mut expired = false;
    for k in args.size..=last {
        let (row, set) = subarch_row(&g, k, &opts, cache.as_ref());
        if let Some(e) = &row.error {
            return Err(CliError::Usage(e.clone()));
        }
        expired |= row.status == "TO";
        if let Some(set) = set {
            if args.list && !global.json {
                for m in &set.members {
                    writeln!(out, "{} edges={}", m.vertex_set(), m.edge_count())?;
                }
            }
            if let Some(dir) = &args.emit {
                fs::create_dir_all(dir)?;
                for (i, m) in set.members.iter().enumerate() {
                    let name = format!("{}-k{k}-{i}", g.name());
                    let member = m.clone().with_name(name.clone());
                    fs::write(dir.join(format!("{name}.json")), member.to_json())?;
                }
            }
        }
        rows.push(row);
        if expired {
            break;
        }
    }
    let report = BenchReport {
        rows,
        environment: BenchEnvironment {
            timestamp: timestamp(),
            budget: global.budget,
        },
    };
    if global.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        write!(out, "{}", report.table())?;
    }
    if expired {
        return Err(CliError::Budget("budget expired".into()));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct MapSummary<'a> {
    swaps: usize,
    cx_equivalent: usize,
    qubits_used: usize,
    ancillas_used: usize,
    subarch_vertices: Vec<u32>,
    initial_layout: &'a [u32],
    #[serde(skip_serializing_if = "Option::is_none")]
    map_calls: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qasm: Option<String>,
}

pub fn cmd_map(global: &Global, args: &MapArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = platform(global)?;
    let (_, c) = read_circuit(&args.circuit)?;
    if c.space != Space::Logical {
        return Err(CliError::Usage("input circuit must use a logical register".into()));
    }
    let deadline = Deadline::from_seconds(global.budget);
    let mapper = ExactMapper {
        order: if args.relaxed { GateOrder::Relaxed } else { GateOrder::Strict },
        max_nodes: None,
        deadline,
    };

    let full = args.full_architecture || args.strategy == StrategyKind::Full;
    let (result, map_calls, certificate): (MapResult, Option<usize>, Option<String>) = if full {
        (mapper.map(&c, &g, args.bound)?, None, None)
    } else {
        let cfg = StrategyConfig {
            max_ancillas: args.ancillas,
            initial_bound: args.bound,
            early_stop_on_zero: !args.no_early_stop,
            order: match args.order {
                OrderArg::DenseFirst => MemberOrder::DenseFirst,
                OrderArg::Insertion => MemberOrder::Insertion,
            },
            subarch: MaxSubarchOptions {
                deadline,
                ..MaxSubarchOptions::default()
            },
        };
        let cache = global.cache.as_ref().map(SubarchCache::new);
        let run = map_with_subarch(&g, &c, &cfg, &mapper, cache.as_ref())?;
        if let Some(path) = &args.report {
            fs::write(path, to_json(&run.report))?;
        }
        let cert = optimality_certificate(&run, &g, &cfg);
        let calls = run.report.map_calls;
        match run.result {
            Some(r) => (r, Some(calls), Some(cert.statement)),
            None if !cert.proven => return Err(CliError::Budget(cert.statement)),
            None => return Err(CliError::Failure(cert.statement)),
        }
    };

    let qasm = emit_qasm(&result.mapped, Some(&result.initial));
    if let Some(path) = &args.output {
        fs::write(path, &qasm)?;
    }
    let summary = MapSummary {
        swaps: result.swaps,
        cx_equivalent: CX_PER_SWAP * result.swaps,
        qubits_used: result.subarch.vertex_count(),
        ancillas_used: result.subarch.vertex_count() - c.qubit_count as usize,
        subarch_vertices: result.subarch.vertices().to_vec(),
        initial_layout: result.initial.as_slice(),
        map_calls,
        certificate,
        qasm: (global.json && args.output.is_none()).then(|| qasm.clone()),
    };
    if global.json {
        writeln!(out, "{}", to_json(&summary))?;
    } else {
        if args.output.is_none() {
            write!(out, "{qasm}")?;
        }
        writeln!(out, "swaps: {} ({} CX equivalent)", summary.swaps, summary.cx_equivalent)?;
        writeln!(out, "qubits used: {} ({} ancillas)", summary.qubits_used, summary.ancillas_used)?;
        if let Some(s) = &summary.certificate {
            writeln!(out, "{s}")?;
        }
    }
    Ok(())
}

fn read_layout(source: &str, mapped_text: &str) -> Result<Allocation, CliError> {
    let text = if source == "auto" {
        mapped_text.to_string()
    } else {
        fs::read_to_string(source).map_err(|e| CliError::Usage(format!("{source}: {e}")))?
    };
    if let Ok(forward) = serde_json::from_str::<Vec<u32>>(&text) {
        return Allocation::new(forward).map_err(|e| CliError::Usage(e.to_string()));
    }
    parse_layout_comments(&text)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .ok_or_else(|| CliError::Usage("no `// q[i] -> Q[j]` layout found".into()))
}

pub fn cmd_verify(global: &Global, args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = platform(global)?;
    let (_, original) = read_circuit(&args.circuit)?;
    let mapped_text = fs::read_to_string(&args.mapped)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.mapped.display())))?;
    let mapped = subarch::circuit::parse_qasm_as(&mapped_text, Space::Physical)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.mapped.display())))?;
    let layout = read_layout(&args.layout, &mapped_text)?;
    let verdict = verify(&original, &mapped, &layout, &g, args.mode.into());
    if global.json {
        writeln!(out, "{}", to_json(&verdict))?;
    } else {
        writeln!(
            out,
            "feasible: {}\nequivalent: {} ({:?})\nswaps: {}",
            verdict.feasible, verdict.equivalent, verdict.mode, verdict.swap_count
        )?;
        for v in &verdict.violations {
            match v.gate {
                Some(i) => writeln!(out, "gate {i}: {}", v.reason)?,
                None => writeln!(out, "{}", v.reason)?,
            }
        }
    }
    if verdict.passed() {
        Ok(())
    } else {
        Err(CliError::Failure("verification failed".into()))
    }
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    platform: String,
    k: usize,
}

pub fn cmd_bench(global: &Global, args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.manifest.display())))?;
    let manifest: Vec<ManifestRow> =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.manifest.display())))?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let opts = MaxSubarchOptions {
        deadline: Deadline::from_seconds(global.budget),
        ..MaxSubarchOptions::default()
    };
    let cache = global.cache.as_ref().map(SubarchCache::new);
    let mut rows = Vec::new();
    for entry in &manifest {
        let resolved = if platforms::builtin(&entry.platform).is_some() || Path::new(&entry.platform).is_absolute() {
            entry.platform.clone()
        } else {
            base.join(&entry.platform).to_string_lossy().into_owned()
        };
        let row = match load_platform(&resolved) {
            Ok(g) if entry.k == 0 || entry.k > g.vertex_count() => BenchRow {
                platform: g.name().to_string(),
                qubits: g.vertex_count(),
                k: entry.k,
                status: "error".into(),
                all_subsets: None,
                connected: None,
                noniso: None,
                max: None,
                stage_seconds: None,
                error: Some(format!("k must be in 1..={}", g.vertex_count())),
            },
            Ok(g) => subarch_row(&g, entry.k, &opts, cache.as_ref()).0,
            Err(e) => BenchRow {
                platform: entry.platform.clone(),
                qubits: 0,
                k: entry.k,
                status: "error".into(),
                all_subsets: None,
                connected: None,
                noniso: None,
                max: None,
                stage_seconds: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    let report = BenchReport {
        rows,
        environment: BenchEnvironment {
            timestamp: timestamp(),
            budget: global.budget,
        },
    };
    if global.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        write!(out, "{}", report.table())?;
        for r in report.rows.iter().filter(|r| r.error.is_some()) {
            writeln!(out, "{} k={}: {}", r.platform, r.k, r.error.as_deref().unwrap_or_default())?;
        }
    }
    if report.rows.iter().any(|r| r.status == "error") {
        Err(CliError::Failure("some rows failed".into()))
    } else if report.rows.iter().any(|r| r.status == "TO") {
        Err(CliError::Budget("budget expired".into()))
    } else {
        Ok(())
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Subarch(a) => cmd_subarch(&cli.global, a, out),
        Command::Map(a) => cmd_map(&cli.global, a, out),
        Command::Verify(a) => cmd_verify(&cli.global, a, out),
        Command::Bench(a) => cmd_bench(&cli.global, a, out),
    }
}
