//! Party keys, contract signatures, and what a tampered document looks like.
//!
//! ```text
//! cargo run --example keygen_and_sign
//! ```

use zkagree::clc::{sign_contract, SignedContract};
use zkagree::crypto::{keygen_from_seed, sign, verify};
use zkagree::fixtures::{rental_contract, RentalParties};

fn main() {
    let kp = keygen_from_seed(42);
    println!("pk = {}", kp.pk.to_hex());

    let doc = rental_contract(&RentalParties::from_seed(100));
    let c = doc.digest();
    let sig = sign(&kp.sk, &c);
    println!("signature over c verifies: {}", verify(&kp.pk, &c, &sig));

    let parties = RentalParties::from_seed(100);
    let signed = sign_contract(&parties.tenant.sk, &parties.landlord.sk, doc.clone());
    println!("buyer and seller signatures: {:?}", signed.verify_signatures());
    println!("program digest pd = {}", signed.program_digest());

    let mut tampered = doc;
    tampered.value_v += 1;
    let forged = SignedContract::from_parts(tampered, signed.sigma_buy, signed.sigma_sel);
    println!("after raising the escrow value by 1 wei: {:?}", forged.verify_signatures());
}
