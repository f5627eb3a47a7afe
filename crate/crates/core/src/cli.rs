//! Command-line interface: `keygen`, `compile`, `run`, `bench` and `inspect`.
//!
//! Exit codes: 0 success, 1 protocol error or expectation mismatch, 2 usage
//! error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use thiserror::Error;

use crate::bench;
use crate::clc::{compile_contract, KeyBindings};
use crate::crypto::{keygen, keygen_from_seed, KeyPair, PublicKey, SecretKey};
use crate::ledger::{Ledger, LedgerSnapshot, Transaction};
use crate::orchestrator::{check_expectations, execute_on, Scenario, SessionReport};
use crate::proofsys::{self, Srs};

#[derive(Debug, Parser)]
#[command(name = "zkagree", version, about = "Confidential contract commitment, evaluation and settlement")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Directory for reports and generated files (created if missing).
    #[arg(long, global = true, default_value = "zkagree-out")]
    pub out_dir: PathBuf,
    /// Ledger snapshot to load before and save after `run`.
    #[arg(long, global = true)]
    pub ledger: Option<PathBuf>,
    /// Srs file; created with default parameters if missing.
    #[arg(long, global = true)]
    pub srs: Option<PathBuf>,
    /// Fixes all randomness.
    #[arg(long, global = true, env = "ZKAGREE_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an Ed25519 keypair as JSON {pk_hex, sk_hex}.
    Keygen {
        /// Output file; defaults to <out-dir>/keypair.json.
        out: Option<PathBuf>,
    },
    /// Compile a contract template into its canonical document.
    Compile {
        /// Template file (TOML)
        template: PathBuf,
        /// Bind a party key: ROLE=PK_HEX or ROLE=KEYPAIR_FILE. Unbound roles
        /// get seeded keys when --seed is set.
        #[arg(long = "key", value_name = "ROLE=KEY")]
        keys: Vec<String>,
        /// Print only the contract digest.
        #[arg(long)]
        digest_only: bool,
        /// Output file; defaults to <out-dir>/<contract>.contract.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario end to end and check its expectations.
    Run {
        /// Scenario file (JSON)
        scenario: PathBuf,
        /// Report file; defaults to <out-dir>/<scenario>.report.json.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Relation sizes and prove/verify timings.
    Bench {
        #[arg(long, default_value_t = bench::DEFAULT_ITERATIONS)]
        iterations: usize,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Pretty-print a session report, tx log, ledger snapshot or keypair.
    Inspect {
        /// JSON or line-delimited JSON file written by this tool
        file: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub pk_hex: String,
    pub sk_hex: String,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match run(&cli) {
        Ok(stdout) => Invocation { code: 0, stdout, stderr: String::new() },
        Err(Failure { error, stdout }) => Invocation { code: error.exit_code(), stdout, stderr: format!("error: {error}\n") },
    }
}

/// An error plus whatever was produced before it.
#[derive(Debug)]
pub struct Failure {
    pub error: CliError,
    pub stdout: String,
}

impl From<CliError> for Failure {
    fn from(error: CliError) -> Self {
        Self { error, stdout: String::new() }
    }
}

pub fn run(cli: &Cli) -> Result<String, Failure> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Keygen { out } => cmd_keygen(cfg, out.as_deref()).map_err(Into::into),
        Command::Compile { template, keys, digest_only, out } => {
            cmd_compile(cfg, template, keys, *digest_only, out.as_deref()).map_err(Into::into)
        }
        Command::Run { scenario, report } => cmd_run(cfg, scenario, report.as_deref()),
        Command::Bench { iterations, json } => cmd_bench(cfg, *iterations, *json).map_err(Into::into),
        Command::Inspect { file } => cmd_inspect(file).map_err(Into::into),
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(io(path))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io(path))?;
    }
    std::fs::write(path, contents).map_err(io(path))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn load_srs(cfg: &Config) -> Result<Srs, CliError> {
    let Some(path) = &cfg.srs else { return Ok(proofsys::default_srs()) };
    if path.exists() {
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
    } else {
        let srs = proofsys::default_srs();
        write(path, &pretty(&srs))?;
        Ok(srs)
    }
}

pub fn cmd_keygen(cfg: &Config, out: Option<&Path>) -> Result<String, CliError> {
    let kp = match cfg.seed {
        Some(seed) => keygen_from_seed(seed),
        None => keygen().map_err(|e| CliError::Failed(e.to_string()))?,
    };
    let file = KeyFile { pk_hex: kp.pk.to_hex(), sk_hex: kp.sk.to_hex() };
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_dir.join("keypair.json"));
    write(&path, &pretty(&file))?;
    Ok(format!("wrote {}\npk {}\n", path.display(), file.pk_hex))
}

fn read_keypair(path: &Path) -> Result<KeyPair, CliError> {
    let file: KeyFile = serde_json::from_str(&read(path)?).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    let sk = SecretKey::from_hex(&file.sk_hex).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    let kp = KeyPair::from_secret(sk);
    if kp.pk.to_hex() != file.pk_hex.trim_start_matches("0x") {
        return Err(CliError::Failed(format!("{}: public key does not match secret key", path.display())));
    }
    Ok(kp)
}

fn parse_binding(binding: &str) -> Result<(String, PublicKey), CliError> {
    let (role, key) = binding.split_once('=').ok_or_else(|| CliError::Usage(format!("--key expects ROLE=KEY, got `{binding}`")))?;
    let pk = match PublicKey::from_hex(key) {
        Ok(pk) => pk,
        Err(_) => read_keypair(Path::new(key))?.pk,
    };
    Ok((role.to_string(), pk))
}

pub fn cmd_compile(cfg: &Config, template: &Path, keys: &[String], digest_only: bool, out: Option<&Path>) -> Result<String, CliError> {
    let source = read(template)?;
    let located = |e: &dyn std::fmt::Display| CliError::Failed(format!("{}: {e}", template.display()));
    let mut bindings: KeyBindings = keys.iter().map(|k| parse_binding(k)).collect::<Result<_, _>>()?;
    if let Some(seed) = cfg.seed {
        let table: toml::Table = toml::from_str(&source).map_err(|e| located(&e.message()))?;
        let roles = table.get("parties").and_then(toml::Value::as_table);
        for (i, (role, party)) in roles.into_iter().flatten().enumerate() {
            let has_pk = party.get("pk").is_some();
            if !has_pk && !bindings.contains_key(role) {
                bindings.insert(role.clone(), keygen_from_seed(seed.wrapping_add(i as u64)).pk);
            }
        }
    }
    let compiled = compile_contract(&source, &bindings).map_err(|e| located(&e))?;
    let doc = &compiled.document;
    let digest = doc.digest().to_hex();
    if digest_only {
        return Ok(format!("{digest}\n"));
    }
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_dir.join(format!("{}.contract.json", doc.name)));
    let json: Json = serde_json::from_slice(&doc.canonical()).expect("canonical form is JSON");
    write(&path, &pretty(&json))?;
    Ok(format!(
        "contract  {}\ndigest    {digest}\nvalue_v   {}\nlifecycle {}\nwrote     {}\n",
        doc.name,
        doc.value_v,
        compiled.state.lifecycle,
        path.display()
    ))
}

pub fn cmd_run(cfg: &Config, scenario_path: &Path, report_path: Option<&Path>) -> Result<String, Failure> {
    let mut scenario = Scenario::load(scenario_path).map_err(|e| CliError::Failed(e.to_string()))?;
    if let Some(seed) = cfg.seed {
        scenario.seed = seed;
    }
    let srs = load_srs(cfg)?;
    let mut ledger = match &cfg.ledger {
        Some(p) if p.exists() => Ledger::from_json(&read(p)?).map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))?,
        _ => Ledger::new(srs),
    };
    let run = execute_on(&scenario, &mut ledger).map_err(|e| CliError::Failed(e.to_string()))?;
    let report = &run.report;
    let path = report_path.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_dir.join(format!("{}.report.json", scenario.name)));
    write(&path, &pretty(report))?;
    if let Some(p) = &cfg.ledger {
        write(p, &ledger.to_json())?;
    }
    let stdout = format!(
        "scenario  {}\noutcome   {}\nlifecycle {}\nescrow    {}\n{}report    {}\n",
        report.name,
        report.outcome,
        report.lifecycle.lifecycle,
        report.escrow_pool,
        report.balances.iter().map(|(r, b)| format!("balance   {r} = {b}\n")).collect::<String>(),
        path.display()
    );
    match check_expectations(&scenario, report) {
        Ok(()) => Ok(stdout),
        Err(e) => Err(Failure { error: CliError::Failed(e.to_string()), stdout }),
    }
}

pub fn cmd_bench(cfg: &Config, iterations: usize, json: bool) -> Result<String, CliError> {
    let report = bench::run(&load_srs(cfg)?, iterations);
    Ok(if json { pretty(&report) } else { report.table() })
}

fn inspect_report(r: &SessionReport) -> String {
    let mut out = format!(
        "session {}\n  outcome   {}\n  lifecycle {}/{:?}\n  settled   {}\n  escrow    {}\n",
        r.name, r.outcome, r.lifecycle.lifecycle, r.lifecycle.phase, r.settled, r.escrow_pool
    );
    for (role, bal) in &r.balances {
        out.push_str(&format!("  balance   {role} = {bal}\n"));
    }
    out.push_str("  trace     ");
    out.push_str(&r.lifecycle_trace.iter().map(|s| format!("{}/{:?}", s.lifecycle, s.phase)).collect::<Vec<_>>().join(" -> "));
    out.push_str("\ntranscript\n");
    for e in &r.transcript {
        out.push_str(&format!("  [{}]\n", e.label));
        let body = serde_json::to_string_pretty(&e.data).expect("json");
        for line in body.lines() {
            out.push_str(&format!("    {line}\n"));
        }
    }
    out
}

fn inspect_tx(tx: &Transaction) -> String {
    let body = serde_json::to_value(&tx.payload).expect("json");
    let fields = body
        .as_object()
        .map(|m| m.iter().filter(|(k, _)| *k != "kind").map(|(k, v)| format!("{k}={}", v.as_str().map_or(v.to_string(), str::to_string))).collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    format!("#{:<4} {:<8} {fields}\n", tx.height, tx.kind())
}

pub fn cmd_inspect(file: &Path) -> Result<String, CliError> {
    let text = read(file)?;
    let bad = |what: &str| CliError::Failed(format!("{}: {what}", file.display()));
    if let Ok(json) = serde_json::from_str::<Json>(&text) {
        if json.get("transcript").is_some() {
            let r: SessionReport = serde_json::from_value(json).map_err(|e| bad(&e.to_string()))?;
            return Ok(inspect_report(&r));
        }
        if json.get("leaves").is_some() {
            let snap: LedgerSnapshot = serde_json::from_value(json).map_err(|e| bad(&e.to_string()))?;
            let ledger = Ledger::restore(&snap).map_err(|e| bad(&e.to_string()))?;
            let mut out = format!(
                "ledger schema_version {}\n  height {}\n  leaves {}\n  root {}\n  nullifiers {}\n  escrow {}\n  deposits {}\n  state_hash {}\n",
                snap.schema_version,
                ledger.height(),
                snap.leaves.len(),
                ledger.root(),
                snap.nullifiers.len(),
                ledger.escrow_pool(),
                ledger.total_deposits(),
                ledger.state_hash()
            );
            for tx in ledger.tx_log() {
                out.push_str(&inspect_tx(tx));
            }
            return Ok(out);
        }
        if let Ok(kf) = serde_json::from_value::<KeyFile>(json) {
            return Ok(format!("keypair\n  pk {}\n", kf.pk_hex));
        }
        return Err(bad("unrecognized JSON document"));
    }
    let mut out = String::new();
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let tx: Transaction = serde_json::from_str(line).map_err(|e| bad(&format!("line {}: {e}", i + 1)))?;
        out.push_str(&inspect_tx(&tx));
    }
    Ok(out)
}
