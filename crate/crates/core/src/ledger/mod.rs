//! Simulated settlement chain: commitment tree, recent roots, nullifiers,
//! pooled escrow and proof-gated payouts.

pub mod merkle;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::clc::amount::serde_u128;
use crate::crypto::{FieldElement, PublicKey};
use crate::proofsys::{self, EvalStatement, ProofBundle, Srs};

pub use merkle::{root_from_path, zero_digests, InclusionProof, MerkleError, MerkleTree, CAPACITY};

pub const SCHEMA_VERSION: u32 = 1;

/// Number of historical roots accepted at settlement.
pub const RECENT_ROOTS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("amount must be positive")]
    InvalidAmount,
    #[error("insufficient funds: balance {balance}, needed {needed}")]
    InsufficientFunds { balance: u128, needed: u128 },
    #[error("commitment tree is full")]
    TreeFull,
    #[error("no leaf at index {0}")]
    UnknownLeaf(u64),
    #[error("nullifier already spent")]
    NullifierSpent,
    #[error("root is not among the recent roots")]
    StaleRoot,
    #[error("proof rejected")]
    InvalidProof,
    #[error("escrow pool holds {pool}, settlement needs {needed}")]
    InsufficientEscrow { pool: u128, needed: u128 },
    #[error("balance overflow")]
    Overflow,
    #[error("snapshot error: {0}")]
    Snapshot(String),
}

impl From<MerkleError> for LedgerError {
    fn from(e: MerkleError) -> Self {
        match e {
            MerkleError::TreeFull => LedgerError::TreeFull,
            MerkleError::UnknownLeaf(i) => LedgerError::UnknownLeaf(i),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TxPayload {
    Deposit {
        account: PublicKey,
        #[serde(with = "serde_u128")]
        amount: u128,
    },
    Commit {
        clc_comm: FieldElement,
        #[serde(with = "serde_u128")]
        v: u128,
        depositor: PublicKey,
        leaf_index: u64,
        root: FieldElement,
    },
    Settle {
        statement: EvalStatement,
        payee_ratio: PublicKey,
        payee_complement: PublicKey,
        #[serde(with = "serde_u128")]
        ratio_amount: u128,
        #[serde(with = "serde_u128")]
        complement_amount: u128,
        /// SHA-256 of the serialized proof bundle.
        proof_digest: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub height: u64,
    /// `Transaction::digest` of the previous record, zeros for the first.
    pub prev_digest: String,
    #[serde(flatten)]
    pub payload: TxPayload,
}

pub const GENESIS_DIGEST: &str = "0000000000000000000000000000000000000000000000000000000000000000";

impl Transaction {
    /// SHA-256 of the record's JSON, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_string(self).expect("transaction serializes").as_bytes()))
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            TxPayload::Deposit { .. } => "DEPOSIT",
            TxPayload::Commit { .. } => "COMMIT",
            TxPayload::Settle { .. } => "SETTLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscrowLock {
    #[serde(with = "serde_u128")]
    pub v: u128,
    pub depositor: PublicKey,
}

/// Serialized form of a `Ledger`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub schema_version: u32,
    pub srs: Srs,
    pub leaves: Vec<FieldElement>,
    pub recent_roots: Vec<FieldElement>,
    pub nullifiers: Vec<FieldElement>,
    pub escrow_locks: BTreeMap<u64, EscrowLock>,
    #[serde(with = "serde_u128")]
    pub escrow_pool: u128,
    pub balances: BTreeMap<String, String>,
    #[serde(with = "serde_u128")]
    pub total_deposits: u128,
    pub height: u64,
    pub tx_log: Vec<Transaction>,
}

#[derive(Clone, Debug)]
pub struct Ledger {
    srs: Srs,
    tree: MerkleTree,
    recent_roots: VecDeque<FieldElement>,
    nullifiers: BTreeSet<FieldElement>,
    escrow_locks: BTreeMap<u64, EscrowLock>,
    escrow_pool: u128,
    balances: BTreeMap<PublicKey, u128>,
    total_deposits: u128,
    height: u64,
    tx_log: Vec<Transaction>,
}

impl Ledger {
    pub fn new(srs: Srs) -> Self {
        Self {
            srs,
            tree: MerkleTree::new(),
            recent_roots: VecDeque::with_capacity(RECENT_ROOTS),
            nullifiers: BTreeSet::new(),
            escrow_locks: BTreeMap::new(),
            escrow_pool: 0,
            balances: BTreeMap::new(),
            total_deposits: 0,
            height: 0,
            tx_log: Vec::new(),
        }
    }

    pub fn srs(&self) -> &Srs {
        &self.srs
    }

    pub fn balance(&self, account: &PublicKey) -> u128 {
        self.balances.get(account).copied().unwrap_or(0)
    }

    pub fn balances(&self) -> &BTreeMap<PublicKey, u128> {
        &self.balances
    }

    pub fn escrow_pool(&self) -> u128 {
        self.escrow_pool
    }

    pub fn escrow_locks(&self) -> &BTreeMap<u64, EscrowLock> {
        &self.escrow_locks
    }

    pub fn total_deposits(&self) -> u128 {
        self.total_deposits
    }

    pub fn root(&self) -> FieldElement {
        self.tree.root()
    }

    pub fn tree(&self) -> &MerkleTree {
        &self.tree
    }

    pub fn recent_roots(&self) -> impl Iterator<Item = &FieldElement> {
        self.recent_roots.iter()
    }

    pub fn is_recent_root(&self, root: &FieldElement) -> bool {
        self.recent_roots.contains(root)
    }

    pub fn is_spent(&self, h: &FieldElement) -> bool {
        self.nullifiers.contains(h)
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn tx_log(&self) -> &[Transaction] {
        &self.tx_log
    }

    /// Σ balances + escrow pool == Σ deposits.
    pub fn is_conserved(&self) -> bool {
        let held = self.balances.values().try_fold(self.escrow_pool, |acc, b| acc.checked_add(*b));
        held == Some(self.total_deposits)
    }

    fn append(&mut self, payload: TxPayload) -> Transaction {
        self.height += 1;
        let prev_digest = self.tx_log.last().map_or_else(|| GENESIS_DIGEST.to_string(), Transaction::digest);
        let tx = Transaction { height: self.height, prev_digest, payload };
        self.tx_log.push(tx.clone());
        tx
    }

    /// Credits external funds to `account`.
    pub fn deposit(&mut self, account: &PublicKey, amount: u128) -> Result<Transaction, LedgerError> {
        if amount == 0 {
            return Err(LedgerError::InvalidAmount);
        }
        let total = self.total_deposits.checked_add(amount).ok_or(LedgerError::Overflow)?;
        let bal = self.balance(account).checked_add(amount).ok_or(LedgerError::Overflow)?;
        self.total_deposits = total;
        self.balances.insert(*account, bal);
        Ok(self.append(TxPayload::Deposit { account: *account, amount }))
    }

    /// Locks `v` from `depositor` and appends `clc_comm` to the tree.
    pub fn submit_commitment(&mut self, clc_comm: FieldElement, v: u128, depositor: &PublicKey) -> Result<Transaction, LedgerError> {
        if v == 0 {
            return Err(LedgerError::InvalidAmount);
        }
        let balance = self.balance(depositor);
        if balance < v {
            return Err(LedgerError::InsufficientFunds { balance, needed: v });
        }
        let pool = self.escrow_pool.checked_add(v).ok_or(LedgerError::Overflow)?;
        let (leaf_index, root) = self.tree.insert(clc_comm)?;
        self.balances.insert(*depositor, balance - v);
        self.escrow_pool = pool;
        self.escrow_locks.insert(leaf_index, EscrowLock { v, depositor: *depositor });
        if self.recent_roots.len() == RECENT_ROOTS {
            self.recent_roots.pop_front();
        }
        self.recent_roots.push_back(root);
        Ok(self.append(TxPayload::Commit { clc_comm, v, depositor: *depositor, leaf_index, root }))
    }

    pub fn inclusion_proof(&self, leaf_index: u64) -> Result<InclusionProof, LedgerError> {
        Ok(self.tree.inclusion_proof(leaf_index)?)
    }

    /// Checks a settlement without applying it.
    pub fn check_settlement(&self, proof: &ProofBundle, statement: &EvalStatement) -> Result<(), LedgerError> {
        if self.nullifiers.contains(&statement.h) {
            return Err(LedgerError::NullifierSpent);
        }
        if !self.is_recent_root(&statement.rt) {
            return Err(LedgerError::StaleRoot);
        }
        if !proofsys::verify_eval(&self.srs, statement, proof) {
            return Err(LedgerError::InvalidProof);
        }
        if self.escrow_pool < statement.v {
            return Err(LedgerError::InsufficientEscrow { pool: self.escrow_pool, needed: statement.v });
        }
        Ok(())
    }

    /// Pays `rat_numerator` to `payee_ratio` and the rest of `v` to
    /// `payee_complement`. On error nothing changes.
    pub fn settle(
        &mut self,
        proof: &ProofBundle,
        statement: &EvalStatement,
        payee_ratio: &PublicKey,
        payee_complement: &PublicKey,
    ) -> Result<Transaction, LedgerError> {
        self.check_settlement(proof, statement)?;
        let ratio_amount = statement.rat_numerator;
        let complement_amount = statement.v - ratio_amount;
        let ratio_bal = self.balance(payee_ratio).checked_add(ratio_amount).ok_or(LedgerError::Overflow)?;
        let mut complement_bal = self.balance(payee_complement);
        if payee_complement == payee_ratio {
            complement_bal = ratio_bal;
        }
        let complement_bal = complement_bal.checked_add(complement_amount).ok_or(LedgerError::Overflow)?;

        self.nullifiers.insert(statement.h);
        self.escrow_pool -= statement.v;
        self.balances.insert(*payee_ratio, ratio_bal);
        self.balances.insert(*payee_complement, complement_bal);
        Ok(self.append(TxPayload::Settle {
            statement: *statement,
            payee_ratio: *payee_ratio,
            payee_complement: *payee_complement,
            ratio_amount,
            complement_amount,
            proof_digest: hex::encode(Sha256::digest(proof.to_bytes())),
        }))
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            schema_version: SCHEMA_VERSION,
            srs: self.srs.clone(),
            leaves: self.tree.leaves().to_vec(),
            recent_roots: self.recent_roots.iter().copied().collect(),
            nullifiers: self.nullifiers.iter().copied().collect(),
            escrow_locks: self.escrow_locks.clone(),
            escrow_pool: self.escrow_pool,
            balances: self.balances.iter().map(|(k, v)| (k.to_hex(), v.to_string())).collect(),
            total_deposits: self.total_deposits,
            height: self.height,
            tx_log: self.tx_log.clone(),
        }
    }

    pub fn restore(snapshot: &LedgerSnapshot) -> Result<Self, LedgerError> {
        if snapshot.schema_version != SCHEMA_VERSION {
            return Err(LedgerError::Snapshot(format!("unsupported schema_version {}", snapshot.schema_version)));
        }
        if snapshot.recent_roots.len() > RECENT_ROOTS {
            return Err(LedgerError::Snapshot("too many recent roots".into()));
        }
        let tree = MerkleTree::from_leaves(&snapshot.leaves)?;
        if snapshot.recent_roots.last().is_some_and(|r| *r != tree.root()) {
            return Err(LedgerError::Snapshot("latest recent root does not match the tree".into()));
        }
        let mut balances = BTreeMap::new();
        for (k, v) in &snapshot.balances {
            let pk = PublicKey::from_hex(k).map_err(|e| LedgerError::Snapshot(e.to_string()))?;
            let v: u128 = v.parse().map_err(|_| LedgerError::Snapshot(format!("bad balance {v:?}")))?;
            balances.insert(pk, v);
        }
        verify_tx_chain(&snapshot.tx_log).map_err(|i| LedgerError::Snapshot(format!("tx_log broken at record {i}")))?;
        let ledger = Self {
            srs: snapshot.srs.clone(),
            tree,
            recent_roots: snapshot.recent_roots.iter().copied().collect(),
            nullifiers: snapshot.nullifiers.iter().copied().collect(),
            escrow_locks: snapshot.escrow_locks.clone(),
            escrow_pool: snapshot.escrow_pool,
            balances,
            total_deposits: snapshot.total_deposits,
            height: snapshot.height,
            tx_log: snapshot.tx_log.clone(),
        };
        if !ledger.is_conserved() {
            return Err(LedgerError::Snapshot("snapshot violates conservation".into()));
        }
        Ok(ledger)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.snapshot()).expect("snapshot serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, LedgerError> {
        let snap: LedgerSnapshot = serde_json::from_str(s).map_err(|e| LedgerError::Snapshot(e.to_string()))?;
        Self::restore(&snap)
    }

    /// SHA-256 of the JSON snapshot, hex encoded.
    pub fn state_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// One JSON record per line, each tagged with `schema_version`.
    pub fn tx_log_ldjson(&self) -> String {
        let mut out = String::new();
        for tx in &self.tx_log {
            let mut value = serde_json::to_value(tx).expect("transaction serializes");
            value["schema_version"] = SCHEMA_VERSION.into();
            out.push_str(&value.to_string());
            out.push('\n');
        }
        out
    }
}

/// Index of the first record whose height or `prev_digest` breaks the chain.
pub fn verify_tx_chain(log: &[Transaction]) -> Result<(), usize> {
    let mut prev = GENESIS_DIGEST.to_string();
    let mut height = 0;
    for (i, tx) in log.iter().enumerate() {
        if tx.prev_digest != prev || tx.height <= height {
            return Err(i);
        }
        prev = tx.digest();
        height = tx.height;
    }
    Ok(())
}

/// Shared ledger applying operations in a single total order.
#[derive(Clone, Debug)]
pub struct LedgerHandle(Arc<Mutex<Ledger>>);

impl LedgerHandle {
    pub fn new(ledger: Ledger) -> Self {
        Self(Arc::new(Mutex::new(ledger)))
    }

    /// Runs `f` with exclusive access; other callers wait.
    pub fn with<R>(&self, f: impl FnOnce(&mut Ledger) -> R) -> R {
        let mut guard = self.0.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        self.with(|l| l.snapshot())
    }
}
