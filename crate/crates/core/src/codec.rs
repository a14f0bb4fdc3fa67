// SPDX-License-Identifier: Apache-2.0

//! Canonical binary encoding shared by every serialized object.
//!
//! Objects start with a format version byte and a kind byte. Integers are
//! big-endian, variable-length fields carry a `u32` length prefix, group
//! elements use their fixed-width compressed form.

use crate::error::{Error, Result};
use crate::pairing::{
    G1Element, G2Element, Scalar, TargetElement, G1_BYTES, G2_BYTES, GT_BYTES, SCALAR_BYTES,
};

pub const FORMAT_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    PublicParams = 0x01,
    MasterKey = 0x02,
    AttributeKey = 0x03,
    SealedRecord = 0x04,
    AccessTree = 0x05,
}

impl Kind {
    fn from_u8(v: u8) -> Option<Kind> {
        Some(match v {
            0x01 => Kind::PublicParams,
            0x02 => Kind::MasterKey,
            0x03 => Kind::AttributeKey,
            0x04 => Kind::SealedRecord,
            0x05 => Kind::AccessTree,
            _ => return None,
        })
    }
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Writer::default()
    }

    pub fn with_header(kind: Kind) -> Self {
        let mut w = Writer::new();
        w.u8(FORMAT_VERSION);
        w.u8(kind as u8);
        w
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn len(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("field longer than u32::MAX"));
    }

    pub fn raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn bytes(&mut self, bytes: &[u8]) {
        self.len(bytes.len());
        self.raw(bytes);
    }

    pub fn str(&mut self, s: &str) {
        self.bytes(s.as_bytes());
    }

    pub fn scalar(&mut self, s: &Scalar) {
        self.raw(&s.to_bytes());
    }

    pub fn g1(&mut self, p: &G1Element) {
        self.raw(&p.to_bytes());
    }

    pub fn g2(&mut self, p: &G2Element) {
        self.raw(&p.to_bytes());
    }

    pub fn gt(&mut self, t: &TargetElement) {
        self.raw(&t.to_bytes());
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    /// Consumes and checks the version and kind bytes.
    pub fn with_header(buf: &'a [u8], kind: Kind) -> Result<Self> {
        let mut r = Reader::new(buf);
        let version = r.u8()?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let got = r.u8()?;
        match Kind::from_u8(got) {
            Some(k) if k == kind => Ok(r),
            _ => Err(Error::malformed(format!(
                "expected object kind {:?}, found tag {got:#04x}",
                kind
            ))),
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::malformed(format!(
                "truncated input: need {n} bytes at offset {}, have {}",
                self.pos,
                self.remaining()
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N)?);
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    pub fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_be_bytes(self.array()?))
    }

    pub fn length_prefix(&mut self) -> Result<usize> {
        let n = self.u32()? as usize;
        if n > self.remaining() {
            return Err(Error::malformed(format!(
                "length prefix {n} exceeds remaining {} bytes",
                self.remaining()
            )));
        }
        Ok(n)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.length_prefix()?;
        self.take(n)
    }

    pub fn string(&mut self) -> Result<String> {
        let raw = self.bytes()?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::malformed("string is not UTF-8"))
    }

    pub fn scalar(&mut self) -> Result<Scalar> {
        Scalar::from_bytes(&self.array::<SCALAR_BYTES>()?)
    }

    pub fn g1(&mut self) -> Result<G1Element> {
        G1Element::from_bytes(&self.array::<G1_BYTES>()?)
    }

    pub fn g2(&mut self) -> Result<G2Element> {
        G2Element::from_bytes(&self.array::<G2_BYTES>()?)
    }

    pub fn gt(&mut self) -> Result<TargetElement> {
        TargetElement::from_bytes(&self.array::<GT_BYTES>()?)
    }

    pub fn fixed<const N: usize>(&mut self) -> Result<[u8; N]> {
        self.array()
    }

    pub fn finish(self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::malformed(format!(
                "{} trailing bytes",
                self.remaining()
            )));
        }
        Ok(())
    }
}
