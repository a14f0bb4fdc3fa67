// SPDX-License-Identifier: Apache-2.0

//! Symmetric payload protection keyed by the encapsulated target element.

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use hkdf::Hkdf;
use rand_core::{CryptoRng, RngCore};
use sha2::Sha256;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::pairing::TargetElement;

pub const ALG_CHACHA20_POLY1305: u8 = 1;
pub const NONCE_BYTES: usize = 12;
pub const TAG_BYTES: usize = 16;
pub const DEFAULT_MAX_PAYLOAD: usize = 64 * 1024 * 1024;

const KDF_SALT: &[u8] = b"fogphr/v1/kem-salt";
const KDF_INFO: &[u8] = b"fogphr/v1/envelope-key";

/// 256-bit symmetric key.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricKey([u8; 32]);

impl SymmetricKey {
    pub fn from_bytes(b: [u8; 32]) -> Self {
        SymmetricKey(b)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl std::fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SymmetricKey(..)")
    }
}

/// HKDF-SHA256 over the canonical encoding of `k`.
pub fn derive_key(k: &TargetElement) -> SymmetricKey {
    let hk = Hkdf::<Sha256>::new(Some(KDF_SALT), &k.to_bytes());
    let mut out = [0u8; 32];
    hk.expand(KDF_INFO, &mut out)
        .expect("32 bytes is a valid HKDF-SHA256 output length");
    SymmetricKey(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopePayload {
    pub algorithm: u8,
    pub nonce: Vec<u8>,
    pub ciphertext: Vec<u8>,
}

#[derive(Clone, Copy, Debug)]
pub struct EnvelopeConfig {
    pub max_payload: usize,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            max_payload: DEFAULT_MAX_PAYLOAD,
        }
    }
}

pub fn seal<R: RngCore + CryptoRng + ?Sized>(
    key: &SymmetricKey,
    plaintext: &[u8],
    cfg: &EnvelopeConfig,
    rng: &mut R,
) -> Result<EnvelopePayload> {
    if plaintext.len() > cfg.max_payload {
        return Err(Error::PayloadTooLarge {
            size: plaintext.len(),
            limit: cfg.max_payload,
        });
    }
    let mut nonce = [0u8; NONCE_BYTES];
    rng.fill_bytes(&mut nonce);
    let cipher = ChaCha20Poly1305::new(Key::from_slice(&key.0));
    let ciphertext = cipher
        .encrypt(Nonce::from_slice(&nonce), plaintext)
        .map_err(|_| Error::malformed("payload sealing failed"))?;
    Ok(EnvelopePayload {
        algorithm: ALG_CHACHA20_POLY1305,
        nonce: nonce.to_vec(),
        ciphertext,
    })
}

pub fn open(key: &SymmetricKey, env: &EnvelopePayload) -> Result<Vec<u8>> {
    if env.algorithm != ALG_CHACHA20_POLY1305 {
        return Err(Error::malformed(format!(
            "unknown envelope algorithm {}",
            env.algorithm
        )));
    }
    if env.nonce.len() != NONCE_BYTES || env.ciphertext.len() < TAG_BYTES {
        return Err(Error::malformed(
            "envelope nonce or ciphertext has the wrong size",
        ));
    }
    let cipher = ChaCha20Poly1305::new(Key::from_slice(&key.0));
    cipher
        .decrypt(Nonce::from_slice(&env.nonce), env.ciphertext.as_slice())
        .map_err(|_| Error::EnvelopeAuthFailed)
}

impl EnvelopePayload {
    /// Layout: algorithm id (length-prefixed single byte), nonce, ciphertext
    /// with tag, each with a `u32` length prefix.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode_into(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let env = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(env)
    }

    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.bytes(&[self.algorithm]);
        w.bytes(&self.nonce);
        w.bytes(&self.ciphertext);
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        let alg = r.bytes()?;
        if alg.len() != 1 {
            return Err(Error::malformed("algorithm id must be one byte"));
        }
        let nonce = r.bytes()?.to_vec();
        let ciphertext = r.bytes()?.to_vec();
        Ok(EnvelopePayload {
            algorithm: alg[0],
            nonce,
            ciphertext,
        })
    }

    pub fn encoded_len(&self) -> usize {
        4 + 1 + 4 + self.nonce.len() + 4 + self.ciphertext.len()
    }
}
