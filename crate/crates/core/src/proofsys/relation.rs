//! The two protocol relations, executed over an instrumented gadget context.

use serde::{Deserialize, Serialize};

use crate::crypto::{hash_fields, poseidon, FieldElement};

/// Depth of the commitment tree; Merkle witnesses carry this many siblings.
pub const TREE_DEPTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationId {
    Commitment,
    Evaluation,
}

impl RelationId {
    pub fn tag(self) -> u8 {
        match self {
            RelationId::Commitment => 1,
            RelationId::Evaluation => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(RelationId::Commitment),
            2 => Some(RelationId::Evaluation),
            _ => None,
        }
    }

    pub fn statement_len(self) -> usize {
        match self {
            RelationId::Commitment => 2,
            RelationId::Evaluation => 5,
        }
    }

    pub fn witness_len(self) -> usize {
        match self {
            RelationId::Commitment => 2,
            // k, pd, siblings, direction bits
            RelationId::Evaluation => 2 + 2 * TREE_DEPTH,
        }
    }
}

/// Structural cost of one relation execution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMetrics {
    pub hash_invocations: u64,
    /// Equality, selection, boolean and range checks outside the hash.
    pub gadget_ops: u64,
    /// `gadget_ops` plus the field operations inside every permutation.
    pub field_ops: u64,
}

impl RelationMetrics {
    /// Size measure compared against `Srs::max_relation_size`.
    pub fn size(&self) -> u64 {
        self.hash_invocations + self.gadget_ops
    }
}

/// Which check of the relation failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unsatisfied(pub &'static str);

#[derive(Default)]
pub(crate) struct Gadgets {
    pub metrics: RelationMetrics,
}

impl Gadgets {
    fn hash(&mut self, inputs: &[FieldElement]) -> FieldElement {
        self.metrics.hash_invocations += 1;
        self.metrics.field_ops += poseidon::params(inputs.len() + 1).op_count();
        hash_fields(inputs).expect("relation hashes use fixed small arity")
    }

    fn op(&mut self) {
        self.metrics.gadget_ops += 1;
        self.metrics.field_ops += 1;
    }

    fn assert_eq(&mut self, a: FieldElement, b: FieldElement, what: &'static str) -> Result<(), Unsatisfied> {
        self.op();
        if a == b {
            Ok(())
        } else {
            Err(Unsatisfied(what))
        }
    }

    fn assert_bit(&mut self, b: FieldElement) -> Result<bool, Unsatisfied> {
        // b * (b - 1) == 0
        self.op();
        if b == FieldElement::ZERO {
            Ok(false)
        } else if b == FieldElement::ONE {
            Ok(true)
        } else {
            Err(Unsatisfied("direction bit is not boolean"))
        }
    }

    fn select(&mut self, bit: bool, a: FieldElement, b: FieldElement) -> (FieldElement, FieldElement) {
        self.op();
        self.op();
        if bit {
            (b, a)
        } else {
            (a, b)
        }
    }

    fn range_128(&mut self, x: FieldElement) -> Result<u128, Unsatisfied> {
        self.op();
        x.to_u128().ok_or(Unsatisfied("value exceeds 128 bits"))
    }

    fn assert_le(&mut self, a: u128, b: u128, what: &'static str) -> Result<(), Unsatisfied> {
        self.op();
        if a <= b {
            Ok(())
        } else {
            Err(Unsatisfied(what))
        }
    }
}

/// `h = H(k)`, `clc_comm = H(k, pd)`.
///
/// Statement `[h, clc_comm]`, witness `[k, pd]`.
pub(crate) fn commitment(g: &mut Gadgets, statement: &[FieldElement], witness: &[FieldElement]) -> Result<(), Unsatisfied> {
    let [h, clc_comm] = statement else { return Err(Unsatisfied("statement arity")) };
    let [k, pd] = witness else { return Err(Unsatisfied("witness arity")) };
    let h_calc = g.hash(&[*k]);
    g.assert_eq(h_calc, *h, "nullifier hash mismatch")?;
    let comm_calc = g.hash(&[*k, *pd]);
    g.assert_eq(comm_calc, *clc_comm, "commitment mismatch")
}

/// `h = H(k)`, Merkle path from `H(k, pd)` reaches `rt`, `0 <= rat <= v`.
///
/// Statement `[rt, h, parties_digest, rat_numerator, v]`, witness
/// `[k, pd, siblings.., dirs..]`. `parties_digest` is bound through the
/// proof transcript, not constrained here.
pub(crate) fn evaluation(g: &mut Gadgets, statement: &[FieldElement], witness: &[FieldElement]) -> Result<(), Unsatisfied> {
    let [rt, h, _parties_digest, rat, v] = statement else { return Err(Unsatisfied("statement arity")) };
    if witness.len() != RelationId::Evaluation.witness_len() {
        return Err(Unsatisfied("witness arity"));
    }
    let (k, pd) = (witness[0], witness[1]);
    let siblings = &witness[2..2 + TREE_DEPTH];
    let dirs = &witness[2 + TREE_DEPTH..];

    let h_calc = g.hash(&[k]);
    g.assert_eq(h_calc, *h, "nullifier hash mismatch")?;
    let mut node = g.hash(&[k, pd]);
    for (sibling, dir) in siblings.iter().zip(dirs) {
        let is_right = g.assert_bit(*dir)?;
        let (left, right) = g.select(is_right, node, *sibling);
        node = g.hash(&[left, right]);
    }
    g.assert_eq(node, *rt, "merkle root mismatch")?;
    let rat = g.range_128(*rat)?;
    let v = g.range_128(*v)?;
    g.assert_le(rat, v, "ratio numerator exceeds value")
}

pub(crate) fn check(relation: RelationId, statement: &[FieldElement], witness: &[FieldElement]) -> (Result<(), Unsatisfied>, RelationMetrics) {
    let mut g = Gadgets::default();
    let res = match relation {
        RelationId::Commitment => commitment(&mut g, statement, witness),
        RelationId::Evaluation => evaluation(&mut g, statement, witness),
    };
    (res, g.metrics)
}
