// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::policy::PolicyError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group element: {0}")]
    InvalidElement(&'static str),
    #[error("division by zero in Z_p")]
    DivisionByZero,
    #[error("unsupported security level: {0} bits")]
    UnsupportedSecurityLevel(u32),

    #[error("policy error: {0}")]
    Policy(#[from] PolicyError),
    #[error("duplicate index in Lagrange set")]
    DuplicateIndex,
    #[error("index is not a member of the Lagrange set")]
    IndexNotInSet,
    #[error("zero is not a valid Lagrange index")]
    ZeroIndex,

    #[error("attribute set is empty")]
    EmptyAttributes,
    #[error("duplicate attribute: {0}")]
    DuplicateAttribute(String),
    #[error("invalid attribute {0:?}")]
    InvalidAttribute(String),
    #[error("invalid validity set: {0}")]
    InvalidValidity(String),

    #[error("ciphertext signature is invalid")]
    SignatureInvalid,
    #[error("attribute key is not valid on {0}")]
    KeyExpired(chrono::NaiveDate),
    #[error("key attributes do not satisfy the access policy")]
    PolicyUnsatisfied,
    #[error("envelope authentication failed")]
    EnvelopeAuthFailed,
    #[error("attribute key was not issued under these public parameters")]
    KeyBindingInvalid,

    #[error("payload of {size} bytes exceeds the {limit}-byte cap")]
    PayloadTooLarge { size: usize, limit: usize },
    #[error("malformed encoding: {0}")]
    Malformed(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("record {0} not found")]
    RecordNotFound(String),
    #[error("request rejected: {0}")]
    Unauthorized(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}
