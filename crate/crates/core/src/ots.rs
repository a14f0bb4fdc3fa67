// SPDX-License-Identifier: Apache-2.0

//! One-time signatures binding a ciphertext to a fresh verification key.
//!
//! Ed25519 with strict verification, which rejects non-canonical and
//! malleable signatures.

use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use rand_core::{CryptoRng, RngCore};

use crate::error::{Error, Result};

pub const VERIFYING_KEY_BYTES: usize = 32;
pub const SIGNATURE_BYTES: usize = 64;

/// Signing half. Not `Clone`; dropped right after use.
pub struct OneTimeSigner(SigningKey);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerificationKey([u8; VERIFYING_KEY_BYTES]);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature([u8; SIGNATURE_BYTES]);

pub fn keypair<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> (OneTimeSigner, VerificationKey) {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let sk = SigningKey::from_bytes(&seed);
    let vk = VerificationKey(sk.verifying_key().to_bytes());
    (OneTimeSigner(sk), vk)
}

impl OneTimeSigner {
    /// Consumes the key: it signs exactly one message.
    pub fn sign(self, msg: &[u8]) -> Signature {
        Signature(self.0.sign(msg).to_bytes())
    }
}

impl VerificationKey {
    pub fn from_bytes(bytes: [u8; VERIFYING_KEY_BYTES]) -> Self {
        VerificationKey(bytes)
    }

    pub fn to_bytes(&self) -> [u8; VERIFYING_KEY_BYTES] {
        self.0
    }

    /// Errors on an undecodable key; returns `false` on a bad signature.
    pub fn verify(&self, msg: &[u8], sig: &Signature) -> Result<bool> {
        let vk = VerifyingKey::from_bytes(&self.0)
            .map_err(|_| Error::malformed("verification key is not a valid point"))?;
        let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
        Ok(vk.verify_strict(msg, &sig).is_ok())
    }
}

impl Signature {
    pub fn from_bytes(bytes: [u8; SIGNATURE_BYTES]) -> Self {
        Signature(bytes)
    }

    pub fn to_bytes(&self) -> [u8; SIGNATURE_BYTES] {
        self.0
    }
}

/// Long-lived signing key, used by the authority to bind key metadata.
pub(crate) struct LongTermSigner(SigningKey);

impl LongTermSigner {
    pub fn generate<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        LongTermSigner(SigningKey::from_bytes(&seed))
    }

    pub fn from_seed(seed: [u8; 32]) -> Self {
        LongTermSigner(SigningKey::from_bytes(&seed))
    }

    pub fn seed(&self) -> [u8; 32] {
        self.0.to_bytes()
    }

    pub fn verification_key(&self) -> VerificationKey {
        VerificationKey(self.0.verifying_key().to_bytes())
    }

    pub fn sign(&self, msg: &[u8]) -> Signature {
        Signature(self.0.sign(msg).to_bytes())
    }
}
