use serde::{Deserialize, Serialize};

use super::document::{to_canonical_bytes, ContractDocument};
use super::ClcError;
use crate::crypto::{digest_document, sign, verify, Digest, SecretKey, Signature};

/// A contract together with the buyer's and seller's signatures over its digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedContract {
    pub doc: ContractDocument,
    pub sigma_buy: Signature,
    pub sigma_sel: Signature,
}

/// Both parties sign `c = digest(canonical(doc))`. The two halves are
/// independent; see [`sign_half`] for signing by separate actors.
pub fn sign_contract(sk_buy: &SecretKey, sk_sel: &SecretKey, doc: ContractDocument) -> SignedContract {
    let c = doc.digest();
    SignedContract { sigma_buy: sign(sk_buy, &c), sigma_sel: sign(sk_sel, &c), doc }
}

/// One party's signature over the document digest.
pub fn sign_half(sk: &SecretKey, doc: &ContractDocument) -> Signature {
    sign(sk, &doc.digest())
}

impl SignedContract {
    pub fn from_parts(doc: ContractDocument, sigma_buy: Signature, sigma_sel: Signature) -> Self {
        Self { doc, sigma_buy, sigma_sel }
    }

    /// Contract digest `c`.
    pub fn contract_digest(&self) -> Digest {
        self.doc.digest()
    }

    /// Both signatures must verify under the document's buyer and seller keys.
    pub fn verify_signatures(&self) -> Result<(), ClcError> {
        let c = self.contract_digest();
        if !verify(&self.doc.buyer_pk()?, &c, &self.sigma_buy) {
            return Err(ClcError::BadSignature(self.doc.signers.buyer.clone()));
        }
        if !verify(&self.doc.seller_pk()?, &c, &self.sigma_sel) {
            return Err(ClcError::BadSignature(self.doc.signers.seller.clone()));
        }
        Ok(())
    }

    pub fn canonical(&self) -> Vec<u8> {
        to_canonical_bytes(self)
    }

    /// Program digest `pd` of the canonical signed contract.
    pub fn program_digest(&self) -> Digest {
        digest_document(&self.canonical())
    }
}
