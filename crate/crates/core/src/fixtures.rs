//! Bundled contract templates and helpers for the rental deposit walkthrough.

use crate::clc::{compile_contract, ContractDocument, ExternalInputs, KeyBindings, Value};
use crate::clc::logic::message_digest;
use crate::crypto::{keygen_from_seed, sign, KeyPair, SecretKey};

pub const RENTAL_TEMPLATE: &str = include_str!("../fixtures/rental.toml");
pub const PAYMENT_UPON_DELIVERY_TEMPLATE: &str = include_str!("../fixtures/payment_upon_delivery.toml");

/// One ETH in base units.
pub const ETH: u128 = 1_000_000_000_000_000_000;

/// Keys for the four roles of the rental template.
#[derive(Clone, Debug)]
pub struct RentalParties {
    pub tenant: KeyPair,
    pub landlord: KeyPair,
    pub arbitrator: KeyPair,
    pub evaluator: KeyPair,
}

impl RentalParties {
    /// Roles get seeds `base`, `base + 1`, `base + 2`, `base + 3`.
    pub fn from_seed(base: u64) -> Self {
        Self {
            tenant: keygen_from_seed(base),
            landlord: keygen_from_seed(base + 1),
            arbitrator: keygen_from_seed(base + 2),
            evaluator: keygen_from_seed(base + 3),
        }
    }

    pub fn bindings(&self) -> KeyBindings {
        [
            ("tenant", &self.tenant),
            ("landlord", &self.landlord),
            ("arbitrator", &self.arbitrator),
            ("evaluator", &self.evaluator),
        ]
        .into_iter()
        .map(|(role, kp)| (role.to_string(), kp.pk))
        .collect()
    }
}

/// The rental template compiled with `parties`' keys.
pub fn rental_contract(parties: &RentalParties) -> ContractDocument {
    compile_contract(RENTAL_TEMPLATE, &parties.bindings()).expect("bundled rental template compiles").document
}

/// Tenant approves the inspection.
pub fn approve_inputs(report_hash: [u8; 32]) -> ExternalInputs {
    ExternalInputs::new()
        .with("inspectionReportHash", Value::Bytes(report_hash.to_vec()))
        .with("tenantDecision", decision("APPROVE"))
}

/// Signature by `signer` over an arbitration decision, as `verify_sig` in the
/// rental logic expects it.
pub fn arbitration_signature(signer: &SecretKey, report_hash: [u8; 32], tenant_share: u128, landlord_share: u128) -> Vec<u8> {
    let items = [
        Value::Bytes(report_hash.to_vec()),
        Value::Int(tenant_share as i128),
        Value::Int(landlord_share as i128),
    ];
    let digest = message_digest(&items).expect("non-negative shares encode");
    sign(signer, &digest).as_bytes().to_vec()
}

/// Tenant disputes; `signer` signs the arbitrated split.
pub fn dispute_inputs(signer: &SecretKey, report_hash: [u8; 32], tenant_share: u128, landlord_share: u128) -> ExternalInputs {
    ExternalInputs::new()
        .with("inspectionReportHash", Value::Bytes(report_hash.to_vec()))
        .with("tenantDecision", decision("DISPUTE"))
        .with("arbDecisionSig", Value::Bytes(arbitration_signature(signer, report_hash, tenant_share, landlord_share)))
        .with("arbTenantShare", Value::Int(tenant_share as i128))
        .with("arbLandlordShare", Value::Int(landlord_share as i128))
}

fn decision(variant: &str) -> Value {
    Value::Variant { enum_name: "Decision".into(), variant: variant.into() }
}
