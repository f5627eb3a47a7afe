//! Compiling the bundled templates and evaluating their logic directly.
//!
//! ```text
//! cargo run --example compile_template
//! ```

use zkagree::clc::{compile_contract, evaluate_checked, ExternalInputs, KeyBindings, Value};
use zkagree::crypto::keygen_from_seed;
use zkagree::fixtures::{approve_inputs, dispute_inputs, RentalParties, ETH, PAYMENT_UPON_DELIVERY_TEMPLATE, RENTAL_TEMPLATE};

fn main() {
    let parties = RentalParties::from_seed(1);
    let rental = compile_contract(RENTAL_TEMPLATE, &parties.bindings()).unwrap();
    let doc = &rental.document;
    println!("{}: v = {} wei, state {:?}", doc.name, doc.value_v, rental.state);
    println!("inputs: {:?}", doc.data_schema.keys().collect::<Vec<_>>());

    let report = [7u8; 32];
    println!("approve  -> {}", evaluate_checked(doc, &approve_inputs(report)).unwrap());
    let split = dispute_inputs(&parties.arbitrator.sk, report, 3 * ETH / 2, ETH / 2);
    println!("dispute  -> {}", evaluate_checked(doc, &split).unwrap());
    let forged = dispute_inputs(&parties.tenant.sk, report, 2 * ETH, 0);
    println!("forged   -> {}", evaluate_checked(doc, &forged).unwrap());

    let keys: KeyBindings = ["buyer", "seller", "evaluator"]
        .iter()
        .enumerate()
        .map(|(i, role)| (role.to_string(), keygen_from_seed(10 + i as u64).pk))
        .collect();
    let payment = compile_contract(PAYMENT_UPON_DELIVERY_TEMPLATE, &keys).unwrap().document;
    println!("{}: v = {} cents", payment.name, payment.value_v);
    for status in ["ACCEPTED", "REFUSED"] {
        let inputs = ExternalInputs::new()
            .with("deliveryStatus", Value::Variant { enum_name: "Delivery".into(), variant: status.into() });
        println!("{status:<9}-> {}", evaluate_checked(&payment, &inputs).unwrap());
    }

    let broken = RENTAL_TEMPLATE.replace("ratio(input.arbTenantShare)", "ratio(input.arbTenantShare == 1)");
    match compile_contract(&broken, &parties.bindings()) {
        Ok(_) => println!("unexpectedly compiled"),
        Err(e) => println!("ill-typed logic: {e}"),
    }
}
