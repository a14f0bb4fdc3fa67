// SPDX-License-Identifier: Apache-2.0

//! C ABI over `fogphr`.
//!
//! Objects are opaque heap handles released with the matching `*_free`.
//! Every call returns a [`FogphrStatus`]; on failure the message is
//! available from [`fogphr_last_error_message`] on the same thread.
//! Byte buffers handed out by the library are released with
//! [`fogphr_bytes_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fogphr::cpabe::{self, AttributeKey, MasterKey, PublicParams, SealedRecord};
use fogphr::policy::{parse_policy, AttributeSet};
use fogphr::timeval::{parse_date, ValiditySet};
use fogphr::Error;
use rand::rngs::OsRng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FogphrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Malformed = 3,
    SignatureInvalid = 4,
    KeyExpired = 5,
    PolicyUnsatisfied = 6,
    EnvelopeAuthFailed = 7,
    KeyBindingInvalid = 8,
    PayloadTooLarge = 9,
    Internal = 10,
    Panic = 11,
}

impl From<&Error> for FogphrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::SignatureInvalid => FogphrStatus::SignatureInvalid,
            Error::KeyExpired(_) => FogphrStatus::KeyExpired,
            Error::PolicyUnsatisfied => FogphrStatus::PolicyUnsatisfied,
            Error::EnvelopeAuthFailed => FogphrStatus::EnvelopeAuthFailed,
            Error::KeyBindingInvalid => FogphrStatus::KeyBindingInvalid,
            Error::PayloadTooLarge { .. } => FogphrStatus::PayloadTooLarge,
            Error::Malformed(_) | Error::UnsupportedVersion(_) | Error::InvalidElement(_) => {
                FogphrStatus::Malformed
            }
            Error::Policy(_)
            | Error::EmptyAttributes
            | Error::DuplicateAttribute(_)
            | Error::InvalidAttribute(_)
            | Error::InvalidValidity(_)
            | Error::UnsupportedSecurityLevel(_) => FogphrStatus::InvalidArgument,
            _ => FogphrStatus::Internal,
        }
    }
}

pub struct FogphrPublicParams(PublicParams);
pub struct FogphrMasterKey(MasterKey);
pub struct FogphrAttributeKey(AttributeKey);
pub struct FogphrRecord(SealedRecord);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

struct Fail(FogphrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(FogphrStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FogphrStatus::NullArgument, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FogphrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            FogphrStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside fogphr");
            FogphrStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            FogphrStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn emit_bytes(out_ptr: *mut *mut u8, out_len: *mut usize, data: Vec<u8>) {
    let boxed = data.into_boxed_slice();
    *out_len = boxed.len();
    *out_ptr = Box::into_raw(boxed) as *mut u8;
}

/// Message for the last failed call on this thread. Empty after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fogphr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a buffer returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fogphr_bytes_free(ptr: *mut u8, len: usize) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(ptr, len)));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_setup(
    security_bits: u32,
    out_pk: *mut *mut FogphrPublicParams,
    out_mk: *mut *mut FogphrMasterKey,
) -> FogphrStatus {
    guard(|| {
        if out_pk.is_null() || out_mk.is_null() {
            return Err(null("output pointer"));
        }
        let (pk, mk) = cpabe::setup(security_bits, &mut OsRng)?;
        emit(out_pk, FogphrPublicParams(pk));
        emit(out_mk, FogphrMasterKey(mk));
        Ok(())
    })
}

/// `attributes`: comma-separated names. `validity`: days or ranges such as
/// `2020-06-20..2020-06-22,2020-07-01`.
#[no_mangle]
pub unsafe extern "C" fn fogphr_keygen(
    pk: *const FogphrPublicParams,
    mk: *const FogphrMasterKey,
    attributes: *const c_char,
    validity: *const c_char,
    out_key: *mut *mut FogphrAttributeKey,
) -> FogphrStatus {
    guard(|| {
        let pk = borrow(pk, "pk")?;
        let mk = borrow(mk, "mk")?;
        let attrs = AttributeSet::parse_list(text(attributes, "attributes")?)?;
        let validity: ValiditySet = text(validity, "validity")?.parse()?;
        if out_key.is_null() {
            return Err(null("out_key"));
        }
        let key = cpabe::keygen(&pk.0, &mk.0, &attrs, validity, &mut OsRng)?;
        emit(out_key, FogphrAttributeKey(key));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_encrypt(
    pk: *const FogphrPublicParams,
    policy: *const c_char,
    payload: *const u8,
    payload_len: usize,
    out_record: *mut *mut FogphrRecord,
) -> FogphrStatus {
    guard(|| {
        let pk = borrow(pk, "pk")?;
        let tree = parse_policy(text(policy, "policy")?).map_err(Error::from)?;
        let payload = bytes(payload, payload_len, "payload")?;
        if out_record.is_null() {
            return Err(null("out_record"));
        }
        let rec = cpabe::encrypt(&pk.0, &tree, payload, &mut OsRng)?;
        emit(out_record, FogphrRecord(rec));
        Ok(())
    })
}

/// `now` is a `YYYY-MM-DD` date. The plaintext is returned in a buffer to
/// be released with [`fogphr_bytes_free`].
#[no_mangle]
pub unsafe extern "C" fn fogphr_decrypt(
    pk: *const FogphrPublicParams,
    key: *const FogphrAttributeKey,
    record: *const FogphrRecord,
    now: *const c_char,
    out_ptr: *mut *mut u8,
    out_len: *mut usize,
) -> FogphrStatus {
    guard(|| {
        let pk = borrow(pk, "pk")?;
        let key = borrow(key, "key")?;
        let record = borrow(record, "record")?;
        let now = parse_date(text(now, "now")?)?;
        if out_ptr.is_null() || out_len.is_null() {
            return Err(null("output pointer"));
        }
        let plain = cpabe::decrypt(&pk.0, &key.0, &record.0, now)?;
        emit_bytes(out_ptr, out_len, plain);
        Ok(())
    })
}

trait Codec: Sized {
    fn encode(&self) -> Vec<u8>;
    fn decode(data: &[u8]) -> fogphr::Result<Self>;
}

macro_rules! impl_codec {
    ($($t:ty),*) => {$(
        impl Codec for $t {
            fn encode(&self) -> Vec<u8> {
                self.to_bytes()
            }
            fn decode(data: &[u8]) -> fogphr::Result<Self> {
                <$t>::from_bytes(data)
            }
        }
    )*};
}

impl_codec!(PublicParams, MasterKey, AttributeKey, SealedRecord);

unsafe fn serialize<T: Codec>(
    obj: Option<&T>,
    out_ptr: *mut *mut u8,
    out_len: *mut usize,
) -> FogphrStatus {
    guard(|| {
        let obj = obj.ok_or_else(|| null("object"))?;
        if out_ptr.is_null() || out_len.is_null() {
            return Err(null("output pointer"));
        }
        emit_bytes(out_ptr, out_len, obj.encode());
        Ok(())
    })
}

unsafe fn deserialize<T: Codec, H>(
    data: *const u8,
    len: usize,
    out: *mut *mut H,
    wrap: fn(T) -> H,
) -> FogphrStatus {
    guard(|| {
        let data = bytes(data, len, "data")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        emit(out, wrap(T::decode(data)?));
        Ok(())
    })
}

unsafe fn free<H>(obj: *mut H) {
    if !obj.is_null() {
        drop(Box::from_raw(obj));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_public_params_serialize(
    obj: *const FogphrPublicParams,
    out_ptr: *mut *mut u8,
    out_len: *mut usize,
) -> FogphrStatus {
    serialize(obj.as_ref().map(|h| &h.0), out_ptr, out_len)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_public_params_deserialize(
    data: *const u8,
    len: usize,
    out: *mut *mut FogphrPublicParams,
) -> FogphrStatus {
    deserialize(data, len, out, FogphrPublicParams)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_public_params_free(obj: *mut FogphrPublicParams) {
    free(obj)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_master_key_serialize(
    obj: *const FogphrMasterKey,
    out_ptr: *mut *mut u8,
    out_len: *mut usize,
) -> FogphrStatus {
    serialize(obj.as_ref().map(|h| &h.0), out_ptr, out_len)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_master_key_deserialize(
    data: *const u8,
    len: usize,
    out: *mut *mut FogphrMasterKey,
) -> FogphrStatus {
    deserialize(data, len, out, FogphrMasterKey)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_master_key_free(obj: *mut FogphrMasterKey) {
    free(obj)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_attribute_key_serialize(
    obj: *const FogphrAttributeKey,
    out_ptr: *mut *mut u8,
    out_len: *mut usize,
) -> FogphrStatus {
    serialize(obj.as_ref().map(|h| &h.0), out_ptr, out_len)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_attribute_key_deserialize(
    data: *const u8,
    len: usize,
    out: *mut *mut FogphrAttributeKey,
) -> FogphrStatus {
    deserialize(data, len, out, FogphrAttributeKey)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_attribute_key_free(obj: *mut FogphrAttributeKey) {
    free(obj)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_record_serialize(
    obj: *const FogphrRecord,
    out_ptr: *mut *mut u8,
    out_len: *mut usize,
) -> FogphrStatus {
    serialize(obj.as_ref().map(|h| &h.0), out_ptr, out_len)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_record_deserialize(
    data: *const u8,
    len: usize,
    out: *mut *mut FogphrRecord,
) -> FogphrStatus {
    deserialize(data, len, out, FogphrRecord)
}

#[no_mangle]
pub unsafe extern "C" fn fogphr_record_free(obj: *mut FogphrRecord) {
    free(obj)
}
