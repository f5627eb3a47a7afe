//! Poseidon permutation over the BN254 scalar field.
//!
//! Parameters follow the circom instantiation: S-box `x^5`, eight full
//! rounds, the partial-round table below, and round constants plus a Cauchy
//! MDS matrix drawn from the Grain LFSR seeded with `(field, sbox, n, t, R_F,
//! R_P)`. Widths 2..=17 are supported, i.e. 1 to 16 inputs.

use std::sync::LazyLock;

use super::field::FieldElement;

pub const FULL_ROUNDS: usize = 8;
pub const MIN_WIDTH: usize = 2;
pub const MAX_WIDTH: usize = 17;

/// Partial rounds indexed by `width - 2`.
pub const PARTIAL_ROUNDS: [usize; 16] = [56, 57, 56, 60, 60, 63, 64, 63, 60, 66, 60, 65, 70, 60, 64, 68];

const FIELD_BITS: usize = 254;

/// Round constants (row-major, `width` per round) and MDS matrix for one width.
pub struct PoseidonParams {
    pub width: usize,
    pub partial_rounds: usize,
    pub round_constants: Vec<FieldElement>,
    pub mds: Vec<Vec<FieldElement>>,
}

impl PoseidonParams {
    pub fn rounds(&self) -> usize {
        FULL_ROUNDS + self.partial_rounds
    }

    fn generate(width: usize) -> Self {
        let partial_rounds = PARTIAL_ROUNDS[width - MIN_WIDTH];
        let mut grain = Grain::new(width, FULL_ROUNDS, partial_rounds);
        let count = (FULL_ROUNDS + partial_rounds) * width;
        let round_constants = (0..count).map(|_| grain.next_field_rejecting()).collect();
        let mds = grain.cauchy_mds(width);
        Self { width, partial_rounds, round_constants, mds }
    }

    /// Field multiplications and additions performed by one permutation.
    pub fn op_count(&self) -> u64 {
        let t = self.width as u64;
        let full = FULL_ROUNDS as u64;
        let partial = self.partial_rounds as u64;
        // x^5 costs three multiplications
        let sbox_muls = 3 * (full * t + partial);
        let constant_adds = (full + partial) * t;
        let mix = (full + partial) * (t * t + t * (t - 1));
        sbox_muls + constant_adds + mix
    }
}

static PARAMS: LazyLock<Vec<PoseidonParams>> =
    LazyLock::new(|| (MIN_WIDTH..=MAX_WIDTH).map(PoseidonParams::generate).collect());

/// Parameters for `width` (`2..=17`).
pub fn params(width: usize) -> &'static PoseidonParams {
    assert!((MIN_WIDTH..=MAX_WIDTH).contains(&width), "unsupported poseidon width {width}");
    &PARAMS[width - MIN_WIDTH]
}

/// Full permutation of `state`, in place.
pub fn permute(state: &mut [FieldElement]) {
    let p = params(state.len());
    let t = p.width;
    let half_full = FULL_ROUNDS / 2;
    let mut scratch = vec![FieldElement::ZERO; t];
    for round in 0..p.rounds() {
        for (i, s) in state.iter_mut().enumerate() {
            *s += p.round_constants[round * t + i];
        }
        let full = round < half_full || round >= half_full + p.partial_rounds;
        if full {
            for s in state.iter_mut() {
                *s = s.pow5();
            }
        } else {
            state[0] = state[0].pow5();
        }
        for (i, out) in scratch.iter_mut().enumerate() {
            let row = &p.mds[i];
            let mut acc = FieldElement::ZERO;
            for (m, s) in row.iter().zip(state.iter()) {
                acc += *m * *s;
            }
            *out = acc;
        }
        state.copy_from_slice(&scratch);
    }
}

/// Circom-style Poseidon: state `[0, inputs...]`, output is the first lane.
pub fn hash(inputs: &[FieldElement]) -> FieldElement {
    let mut state = Vec::with_capacity(inputs.len() + 1);
    state.push(FieldElement::ZERO);
    state.extend_from_slice(inputs);
    permute(&mut state);
    state[0]
}

/// Grain LFSR used by the Poseidon reference parameter generator.
struct Grain {
    bits: std::collections::VecDeque<bool>,
}

impl Grain {
    fn new(width: usize, full_rounds: usize, partial_rounds: usize) -> Self {
        let mut bits = std::collections::VecDeque::with_capacity(80);
        let mut push = |value: u64, len: usize| {
            for i in (0..len).rev() {
                bits.push_back((value >> i) & 1 == 1);
            }
        };
        // prime field, x^alpha S-box
        push(1, 2);
        push(0, 4);
        push(FIELD_BITS as u64, 12);
        push(width as u64, 12);
        push(full_rounds as u64, 10);
        push(partial_rounds as u64, 10);
        push((1 << 30) - 1, 30);
        let mut grain = Self { bits };
        for _ in 0..160 {
            grain.clock();
        }
        grain
    }

    fn clock(&mut self) -> bool {
        let b = &self.bits;
        let new_bit = b[62] ^ b[51] ^ b[38] ^ b[23] ^ b[13] ^ b[0];
        self.bits.pop_front();
        self.bits.push_back(new_bit);
        new_bit
    }

    /// Self-shrinking output: a pair `(a, b)` emits `b` only when `a` is set.
    fn next_bit(&mut self) -> bool {
        loop {
            let control = self.clock();
            let value = self.clock();
            if control {
                return value;
            }
        }
    }

    fn next_bytes(&mut self) -> [u8; 32] {
        // 254 bits big-endian, left-padded into 32 bytes
        let mut out = [0u8; 32];
        let offset = 256 - FIELD_BITS;
        for i in 0..FIELD_BITS {
            if self.next_bit() {
                let pos = offset + i;
                out[pos / 8] |= 0x80 >> (pos % 8);
            }
        }
        out
    }

    fn next_field_rejecting(&mut self) -> FieldElement {
        loop {
            let bytes = self.next_bytes();
            if let Ok(fe) = FieldElement::from_be_bytes_canonical(&bytes) {
                return fe;
            }
        }
    }

    fn next_field_reducing(&mut self) -> FieldElement {
        FieldElement::from_be_bytes_mod_order(&self.next_bytes())
    }

    fn cauchy_mds(&mut self, width: usize) -> Vec<Vec<FieldElement>> {
        loop {
            let mut draw: Vec<FieldElement> = (0..2 * width).map(|_| self.next_field_reducing()).collect();
            while has_duplicates(&draw) {
                draw = (0..2 * width).map(|_| self.next_field_reducing()).collect();
            }
            let (xs, ys) = draw.split_at(width);
            let matrix: Option<Vec<Vec<FieldElement>>> = xs
                .iter()
                .map(|x| ys.iter().map(|y| (*x + *y).inverse()).collect())
                .collect();
            if let Some(m) = matrix {
                return m;
            }
        }
    }
}

fn has_duplicates(values: &[FieldElement]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}
