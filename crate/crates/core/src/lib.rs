// SPDX-License-Identifier: Apache-2.0

//! Ciphertext-policy attribute-based encryption for personal health records
//! exchanged through fog nodes.
//!
//! * [`pairing`]: BLS12-381 group backend.
//! * [`policy`]: threshold access trees, secret sharing, Lagrange weights.
//! * [`cpabe`]: setup, key generation, encryption and decryption.
//! * [`envelope`]: symmetric sealing of the payload under the encapsulated key.
//! * [`actors`]: in-process authority, record store, fog node, owner and user.
//! * [`bench`]: attribute-count sweep harness.

pub mod actors;
pub mod bench;
pub mod codec;
pub mod cpabe;
pub mod envelope;
pub mod error;
pub mod ots;
pub mod pairing;
pub mod policy;
pub mod size;
pub mod timeval;

pub use error::{Error, Result};
