use std::fmt;

use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CryptoError, Digest};

/// Ed25519 verifying key (32 bytes).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PublicKey([u8; 32]);

/// Ed25519 secret seed (32 bytes).
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey([u8; 32]);

/// Ed25519 signature (64 bytes).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature([u8; 64]);

#[derive(Clone, Debug)]
pub struct KeyPair {
    pub pk: PublicKey,
    pub sk: SecretKey,
}

impl PublicKey {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        decode_fixed(s).map(Self)
    }
}

impl SecretKey {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        decode_fixed(s).map(Self).map_err(|_| CryptoError::MalformedKey)
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey(SigningKey::from_bytes(&self.0).verifying_key().to_bytes())
    }
}

impl Signature {
    pub fn from_bytes(bytes: [u8; 64]) -> Self {
        Self(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        <[u8; 64]>::try_from(bytes).ok().map(Self)
    }

    pub fn as_bytes(&self) -> &[u8; 64] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        decode_fixed(s).map(Self)
    }
}

impl KeyPair {
    pub fn from_secret(sk: SecretKey) -> Self {
        Self { pk: sk.public_key(), sk }
    }
}

fn decode_fixed<const N: usize>(s: &str) -> Result<[u8; N], CryptoError> {
    let raw = hex::decode(s.strip_prefix("0x").unwrap_or(s)).map_err(|_| CryptoError::BadHex(s.to_string()))?;
    <[u8; N]>::try_from(raw.as_slice()).map_err(|_| CryptoError::BadHex(s.to_string()))
}

/// Fresh keypair from the operating system's entropy source.
pub fn keygen() -> Result<KeyPair, CryptoError> {
    let mut seed = [0u8; 32];
    rand::rngs::OsRng
        .try_fill_bytes(&mut seed)
        .map_err(|e| CryptoError::EntropyFailure(e.to_string()))?;
    Ok(KeyPair::from_secret(SecretKey(seed)))
}

pub fn keygen_from_rng<R: RngCore + CryptoRng>(rng: &mut R) -> KeyPair {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    KeyPair::from_secret(SecretKey(seed))
}

/// Deterministic keypair for a numeric seed.
pub fn keygen_from_seed(seed: u64) -> KeyPair {
    keygen_from_rng(&mut ChaCha20Rng::seed_from_u64(seed))
}

/// Signs the 32-byte big-endian encoding of `msg`.
pub fn sign(sk: &SecretKey, msg: &Digest) -> Signature {
    let key = SigningKey::from_bytes(&sk.0);
    Signature(key.sign(&msg.to_bytes()).to_bytes())
}

/// Malformed keys or signatures verify as `false`.
pub fn verify(pk: &PublicKey, msg: &Digest, sig: &Signature) -> bool {
    let Ok(key) = VerifyingKey::from_bytes(&pk.0) else {
        return false;
    };
    let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
    key.verify_strict(&msg.to_bytes(), &sig).is_ok()
}

macro_rules! hex_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                <$ty>::from_hex(&s).map_err(serde::de::Error::custom)
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($ty), self.to_hex())
            }
        }
    };
}

hex_serde!(PublicKey);
hex_serde!(Signature);

impl Serialize for SecretKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for SecretKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        SecretKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}
