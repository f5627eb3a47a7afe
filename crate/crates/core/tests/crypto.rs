use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zkagree::clc::canonical;
use zkagree::crypto::golden::{standard_vectors, GoldenVector};
use zkagree::crypto::{digest_document, hash_fields, keygen_from_seed, sign, verify, Digest, FieldElement};
use zkagree::fixtures::{rental_contract, RentalParties};

/// Straight-line reference for `digest_document`: zero-pad to a multiple of
/// 31 bytes, read each chunk as a little-endian integer, fold with
/// `hash_fields([acc, chunk])`.
fn digest_oracle(doc: &[u8]) -> FieldElement {
    let mut padded = doc.to_vec();
    if padded.is_empty() {
        padded.push(0);
    }
    while padded.len() % 31 != 0 {
        padded.push(0);
    }
    let chunks: Vec<FieldElement> = padded
        .chunks(31)
        .map(|c| {
            let mut be = [0u8; 32];
            for (i, b) in c.iter().enumerate() {
                be[31 - i] = *b;
            }
            FieldElement::from_be_bytes_canonical(&be).unwrap()
        })
        .collect();
    let mut acc = hash_fields(&chunks[..1]).unwrap();
    for c in &chunks[1..] {
        acc = hash_fields(&[acc, *c]).unwrap();
    }
    acc
}

fn random_fe(rng: &mut ChaCha8Rng) -> FieldElement {
    FieldElement::from_be_bytes_mod_order(&rng.gen::<[u8; 32]>())
}

#[test]
fn golden_vector_file_is_current() {
    let frozen: Vec<GoldenVector> = serde_json::from_str(include_str!("data/golden_vectors.json")).unwrap();
    for v in &frozen {
        v.check().unwrap();
    }
    assert_eq!(frozen, standard_vectors());
}

#[test]
fn hash_of_zero_golden() {
    assert_eq!(
        hash_fields(&[FieldElement::ZERO]).unwrap().to_hex(),
        "0x2a09a9fd93c590c26b91effbb2499f07e8f7aa12e2b4940a3aed2411cb65e11c"
    );
    assert_eq!(hash_fields(&[FieldElement::ZERO]), hash_fields(&[FieldElement::ZERO]));
}

#[test]
fn argument_order_matters_and_no_collisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut outputs = HashSet::new();
    for _ in 0..1000 {
        let (a, b) = (random_fe(&mut rng), random_fe(&mut rng));
        let ab = hash_fields(&[a, b]).unwrap();
        let ba = hash_fields(&[b, a]).unwrap();
        assert_ne!(ab, ba);
        assert!(outputs.insert(ab));
        assert!(outputs.insert(ba));
    }
}

#[test]
fn digest_matches_chunk_and_fold_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for len in [0usize, 1, 30, 31, 32, 61, 62, 63, 500] {
        let doc: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        assert_eq!(digest_document(&doc).element(), digest_oracle(&doc), "len {len}");
    }
    let rental = canonical(&rental_contract(&RentalParties::from_seed(1)));
    let expected = digest_oracle(&rental);
    assert_eq!(digest_document(&rental).element(), expected);
    assert_eq!(expected.to_hex(), "0x02be64277b430056d1e036974867eeb445df3f7d38b3a1a9d65efba839c0d4cd");
}

#[test]
fn digest_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let len = rng.gen_range(0..200);
        let doc: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        assert_eq!(digest_document(&doc), digest_document(&doc.clone()));
    }
}

#[test]
fn single_byte_flips_change_the_digest() {
    let base = canonical(&rental_contract(&RentalParties::from_seed(1)));
    let original = digest_document(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut seen = HashSet::from([original]);
    for _ in 0..200 {
        let mut doc = base.clone();
        let i = rng.gen_range(0..doc.len());
        doc[i] ^= rng.gen_range(1..=255u8);
        assert!(seen.insert(digest_document(&doc)), "flip at {i} collided");
    }
}

#[test]
fn signatures_do_not_transfer_between_keys() {
    let a = keygen_from_seed(10);
    let b = keygen_from_seed(11);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let msg = Digest(random_fe(&mut rng));
        let sig = sign(&a.sk, &msg);
        assert!(!verify(&b.pk, &msg, &sig));
    }
}
