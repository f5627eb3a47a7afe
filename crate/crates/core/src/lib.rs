//! Confidential computable legal contracts settled through a simulated
//! ledger: contracts are signed, committed to a Merkle tree, evaluated inside
//! a simulated enclave and paid out from escrow once a proof tying the
//! outcome to the registered commitment verifies.

pub mod bench;
pub mod clc;
pub mod cli;
pub mod crypto;
pub mod enclave;
pub mod fixtures;
pub mod ledger;
pub mod orchestrator;
pub mod proofsys;
