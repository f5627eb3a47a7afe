use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{hash_pair, FieldElement};
use crate::proofsys::TREE_DEPTH;

pub const CAPACITY: u64 = 1 << TREE_DEPTH;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MerkleError {
    #[error("tree is full ({CAPACITY} leaves)")]
    TreeFull,
    #[error("no leaf at index {0}")]
    UnknownLeaf(u64),
}

/// Siblings bottom-up; `dirs[i]` is set when the running node is the right child.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionProof {
    pub leaf_index: u64,
    pub leaf: FieldElement,
    pub siblings: [FieldElement; TREE_DEPTH],
    pub dirs: [bool; TREE_DEPTH],
    pub root: FieldElement,
}

impl InclusionProof {
    pub fn computed_root(&self) -> FieldElement {
        root_from_path(self.leaf, &self.siblings, &self.dirs)
    }
}

pub fn root_from_path(leaf: FieldElement, siblings: &[FieldElement; TREE_DEPTH], dirs: &[bool; TREE_DEPTH]) -> FieldElement {
    siblings.iter().zip(dirs).fold(leaf, |node, (sib, &right)| {
        if right {
            hash_pair(*sib, node)
        } else {
            hash_pair(node, *sib)
        }
    })
}

/// Digest of an all-zero subtree at every height, `zeros[0]` being the empty leaf.
pub fn zero_digests() -> [FieldElement; TREE_DEPTH + 1] {
    let mut zeros = [FieldElement::ZERO; TREE_DEPTH + 1];
    for level in 1..=TREE_DEPTH {
        zeros[level] = hash_pair(zeros[level - 1], zeros[level - 1]);
    }
    zeros
}

/// Append-only fixed-depth tree keeping every non-empty node.
#[derive(Clone, Debug)]
pub struct MerkleTree {
    levels: Vec<Vec<FieldElement>>,
    zeros: [FieldElement; TREE_DEPTH + 1],
}

impl Default for MerkleTree {
    fn default() -> Self {
        Self::new()
    }
}

impl PartialEq for MerkleTree {
    fn eq(&self, other: &Self) -> bool {
        self.levels[0] == other.levels[0]
    }
}

impl MerkleTree {
    pub fn new() -> Self {
        Self {
            levels: vec![Vec::new(); TREE_DEPTH + 1],
            zeros: zero_digests(),
        }
    }

    pub fn from_leaves(leaves: &[FieldElement]) -> Result<Self, MerkleError> {
        let mut tree = Self::new();
        for leaf in leaves {
            tree.insert(*leaf)?;
        }
        Ok(tree)
    }

    pub fn next_index(&self) -> u64 {
        self.levels[0].len() as u64
    }

    pub fn leaves(&self) -> &[FieldElement] {
        &self.levels[0]
    }

    pub fn root(&self) -> FieldElement {
        self.levels[TREE_DEPTH].first().copied().unwrap_or(self.zeros[TREE_DEPTH])
    }

    fn node(&self, level: usize, index: usize) -> FieldElement {
        self.levels[level].get(index).copied().unwrap_or(self.zeros[level])
    }

    /// Appends a leaf, returning its index and the new root.
    pub fn insert(&mut self, leaf: FieldElement) -> Result<(u64, FieldElement), MerkleError> {
        let index = self.next_index();
        if index >= CAPACITY {
            return Err(MerkleError::TreeFull);
        }
        self.levels[0].push(leaf);
        let mut idx = index as usize;
        for level in 0..TREE_DEPTH {
            let left = self.node(level, idx & !1);
            let right = self.node(level, idx | 1);
            let parent = hash_pair(left, right);
            idx >>= 1;
            let up = &mut self.levels[level + 1];
            if idx < up.len() {
                up[idx] = parent;
            } else {
                up.push(parent);
            }
        }
        Ok((index, self.root()))
    }

    pub fn inclusion_proof(&self, leaf_index: u64) -> Result<InclusionProof, MerkleError> {
        if leaf_index >= self.next_index() {
            return Err(MerkleError::UnknownLeaf(leaf_index));
        }
        let mut siblings = [FieldElement::ZERO; TREE_DEPTH];
        let mut dirs = [false; TREE_DEPTH];
        let mut idx = leaf_index as usize;
        for level in 0..TREE_DEPTH {
            siblings[level] = self.node(level, idx ^ 1);
            dirs[level] = idx & 1 == 1;
            idx >>= 1;
        }
        Ok(InclusionProof {
            leaf_index,
            leaf: self.levels[0][leaf_index as usize],
            siblings,
            dirs,
            root: self.root(),
        })
    }
}
