//! Field hash, document digests, and the golden-vector file format.
//!
//! ```text
//! cargo run --example hash_and_digest
//! ```

use zkagree::clc::canonical;
use zkagree::crypto::golden::standard_vectors;
use zkagree::crypto::{digest_document, hash_fields, FieldElement};
use zkagree::fixtures::{rental_contract, RentalParties};

fn main() {
    let zero = hash_fields(&[FieldElement::ZERO]).unwrap();
    println!("hash_fields([0])   = {zero}");
    let pair = hash_fields(&[FieldElement::from_u64(1), FieldElement::from_u64(2)]).unwrap();
    println!("hash_fields([1,2]) = {pair}");

    let doc = rental_contract(&RentalParties::from_seed(1));
    let bytes = canonical(&doc);
    println!("rental canonical form: {} bytes", bytes.len());
    println!("rental contract digest c = {}", digest_document(&bytes));

    let vectors = standard_vectors();
    for v in &vectors {
        v.check().expect("vector recomputes");
    }
    println!("{}", serde_json::to_string_pretty(&vectors).unwrap());
}
