//! Scalar field of the BN254 curve.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ark_bn254::Fr;
use ark_ff::{BigInteger, Field, PrimeField, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CryptoError;

/// Decimal form of the field modulus.
pub const MODULUS_DECIMAL: &str =
    "21888242871839275222246405745257275088548364400416034343698204186575808495617";

/// An element of the BN254 scalar field. Always reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElement(pub(crate) Fr);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(ark_ff::MontFp!("0"));
    pub const ONE: FieldElement = FieldElement(ark_ff::MontFp!("1"));

    pub fn from_u64(v: u64) -> Self {
        Self(Fr::from(v))
    }

    pub fn from_u128(v: u128) -> Self {
        Self(Fr::from(v))
    }

    /// Interprets `bytes` as a big-endian integer and reduces it mod p.
    pub fn from_be_bytes_mod_order(bytes: &[u8]) -> Self {
        Self(Fr::from_be_bytes_mod_order(bytes))
    }

    /// Interprets `bytes` as a little-endian integer and reduces it mod p.
    pub fn from_le_bytes_mod_order(bytes: &[u8]) -> Self {
        Self(Fr::from_le_bytes_mod_order(bytes))
    }

    /// Strict decoding of a 32-byte big-endian encoding; values >= p are rejected.
    pub fn from_be_bytes_canonical(bytes: &[u8; 32]) -> Result<Self, CryptoError> {
        let candidate = Fr::from_be_bytes_mod_order(bytes);
        if Self(candidate).to_be_bytes() == *bytes {
            Ok(Self(candidate))
        } else {
            Err(CryptoError::NonCanonicalField)
        }
    }

    pub fn to_be_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        let be = self.0.into_bigint().to_bytes_be();
        out[32 - be.len()..].copy_from_slice(&be);
        out
    }

    pub fn to_hex(&self) -> String {
        format!("0x{}", hex::encode(self.to_be_bytes()))
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        let digits = s.strip_prefix("0x").unwrap_or(s);
        if digits.is_empty() || digits.len() > 64 {
            return Err(CryptoError::BadHex(s.to_string()));
        }
        let padded = format!("{digits:0>64}");
        let raw = hex::decode(&padded).map_err(|_| CryptoError::BadHex(s.to_string()))?;
        let mut buf = [0u8; 32];
        buf.copy_from_slice(&raw);
        Self::from_be_bytes_canonical(&buf)
    }

    /// Returns the value as a `u128` when it fits.
    pub fn to_u128(&self) -> Option<u128> {
        let bytes = self.to_be_bytes();
        if bytes[..16].iter().any(|b| *b != 0) {
            return None;
        }
        let mut low = [0u8; 16];
        low.copy_from_slice(&bytes[16..]);
        Some(u128::from_be_bytes(low))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn square(&self) -> Self {
        Self(self.0.square())
    }

    pub fn pow5(&self) -> Self {
        let sq = self.0.square();
        Self(sq.square() * self.0)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.inverse().map(Self)
    }
}

impl std::ops::Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl std::ops::Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl std::ops::Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.into_bigint().cmp(&other.0.into_bigint())
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for FieldElement {
    fn from(v: u64) -> Self {
        Self::from_u64(v)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.to_hex())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for FieldElement {
    type Err = CryptoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_hex(s)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::from_hex(&s).map_err(serde::de::Error::custom)
    }
}
