// SPDX-License-Identifier: Apache-2.0

//! Bilinear group backend.
//!
//! The scheme is written against a symmetric-style interface
//! `e(g, g)`, but the backend is BLS12-381, which is a type-3 (asymmetric)
//! pairing `e: G1 x G2 -> GT`. Every scheme element is placed in one of the
//! two source groups so that each pairing evaluated during decryption takes
//! exactly one argument from each side:
//!
//! | element                         | group |
//! |---------------------------------|-------|
//! | `h1`, `h2`, `C1`, `C_y`, `C_vk` | G1    |
//! | `D'_j`                          | G1    |
//! | `D`, `E`, `D_j`                 | G2    |
//! | `H(.)`, `C'_y`, `C'_vk`         | G2    |
//! | `e(g1, g2)^alpha`, `K`          | GT    |
//!
//! With this placement `e(g1, g1)` from the symmetric presentation reads as
//! `e(g1, g2)` throughout.

use std::cell::Cell;
use std::fmt;
use std::io::Cursor;

use blstrs::{Bls12, Compress, G1Affine, G1Projective, G2Affine, G2Prepared, G2Projective, Gt};
use ff::Field;
use group::{Curve, Group};
use pairing_lib::{MillerLoopResult, MultiMillerLoop};
use rand_core::{CryptoRng, RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Identifier of the only supported curve.
pub const CURVE_ID: &str = "BLS12-381";

/// Domain-separation tag used for every hash-to-group call.
pub const HASH_DST: &[u8] = b"FOGPHR-V01-CS01-with-BLS12381G2_XMD:SHA-256_SSWU_RO_";

pub const SCALAR_BYTES: usize = 32;
pub const G1_BYTES: usize = 48;
pub const G2_BYTES: usize = 96;
pub const GT_BYTES: usize = 288;

/// Big-endian encoding of the group order `p`.
pub const ORDER_BE: [u8; 32] = [
    0x73, 0xed, 0xa7, 0x53, 0x29, 0x9d, 0x7d, 0x48, 0x33, 0x39, 0xd8, 0x08, 0x09, 0xa1, 0xd8, 0x05,
    0x53, 0xbd, 0xa4, 0x02, 0xff, 0xfe, 0x5b, 0xfe, 0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x01,
];

thread_local! {
    static PAIRINGS: Cell<u64> = const { Cell::new(0) };
}

/// Number of pairings evaluated on the current thread since it started.
pub fn pairing_count() -> u64 {
    PAIRINGS.with(Cell::get)
}

/// Element of the scalar field `Z_p`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Scalar(pub(crate) blstrs::Scalar);

impl Scalar {
    pub const ZERO: Scalar = Scalar(blstrs::Scalar::ZERO);
    pub const ONE: Scalar = Scalar(blstrs::Scalar::ONE);

    /// Uniform sample by rejection: one 32-byte draw per attempt with the top
    /// bit cleared, accepted when below `p`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Scalar {
        loop {
            let mut buf = [0u8; 32];
            rng.fill_bytes(&mut buf);
            buf[0] &= 0x7f;
            if let Some(s) = Option::from(blstrs::Scalar::from_bytes_be(&buf)) {
                return Scalar(s);
            }
        }
    }

    pub fn from_u64(v: u64) -> Scalar {
        Scalar(blstrs::Scalar::from(v))
    }

    pub fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar(self.0 + other.0)
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        Scalar(self.0 - other.0)
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar(self.0 * other.0)
    }

    pub fn neg(&self) -> Scalar {
        Scalar(-self.0)
    }

    pub fn inv(&self) -> Result<Scalar> {
        Option::from(self.0.invert())
            .map(Scalar)
            .ok_or(Error::DivisionByZero)
    }

    pub fn to_bytes(&self) -> [u8; SCALAR_BYTES] {
        self.0.to_bytes_be()
    }

    /// Rejects non-canonical encodings (values `>= p`).
    pub fn from_bytes(bytes: &[u8; SCALAR_BYTES]) -> Result<Scalar> {
        Option::from(blstrs::Scalar::from_bytes_be(bytes))
            .map(Scalar)
            .ok_or(Error::InvalidElement("scalar not below the group order"))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

macro_rules! source_group {
    ($name:ident, $proj:ty, $affine:ty, $len:expr) => {
        #[derive(Clone, Copy, PartialEq, Eq)]
        pub struct $name(pub(crate) $proj);

        impl $name {
            pub fn generator() -> Self {
                $name(<$proj>::generator())
            }

            pub fn identity() -> Self {
                $name(<$proj>::identity())
            }

            pub fn is_identity(&self) -> bool {
                bool::from(self.0.is_identity())
            }

            pub fn exp(&self, k: &Scalar) -> Self {
                $name(self.0 * k.0)
            }

            pub fn mul(&self, other: &Self) -> Self {
                $name(self.0 + other.0)
            }

            pub fn inverse(&self) -> Self {
                $name(-self.0)
            }

            pub fn to_bytes(&self) -> [u8; $len] {
                self.0.to_affine().to_compressed()
            }

            /// Decodes a compressed point, checking curve and subgroup membership.
            pub fn from_bytes(bytes: &[u8; $len]) -> Result<Self> {
                Option::<$affine>::from(<$affine>::from_compressed(bytes))
                    .map(|p| $name(p.into()))
                    .ok_or(Error::InvalidElement(concat!(
                        stringify!($name),
                        " point fails curve or subgroup check"
                    )))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), hex::encode(self.to_bytes()))
            }
        }
    };
}

source_group!(G1Element, G1Projective, G1Affine, G1_BYTES);
source_group!(G2Element, G2Projective, G2Affine, G2_BYTES);

/// Element of the target group, written multiplicatively.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct TargetElement(pub(crate) Gt);

impl TargetElement {
    pub fn identity() -> Self {
        TargetElement(Gt::identity())
    }

    /// `e(g1, g2)`.
    pub fn generator() -> Self {
        TargetElement(Gt::generator())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    pub fn mul(&self, other: &Self) -> Self {
        TargetElement(self.0 + other.0)
    }

    pub fn div(&self, other: &Self) -> Self {
        TargetElement(self.0 - other.0)
    }

    pub fn exp(&self, k: &Scalar) -> Self {
        TargetElement(self.0 * k.0)
    }

    /// Torus-compressed, 288 bytes. The identity has no torus image and is
    /// written as all zeros, which is never a valid compressed element.
    pub fn to_bytes(&self) -> [u8; GT_BYTES] {
        let mut out = [0u8; GT_BYTES];
        if !self.is_identity() {
            let mut buf = Vec::with_capacity(GT_BYTES);
            self.0
                .write_compressed(&mut buf)
                .expect("writing to a Vec cannot fail");
            out.copy_from_slice(&buf);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; GT_BYTES]) -> Result<Self> {
        if bytes.iter().all(|&b| b == 0) {
            return Ok(Self::identity());
        }
        Gt::read_compressed(Cursor::new(&bytes[..]))
            .map(TargetElement)
            .map_err(|_| Error::InvalidElement("target element fails subgroup check"))
    }
}

impl fmt::Debug for TargetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.to_bytes();
        write!(f, "TargetElement({}..)", hex::encode(&bytes[..16]))
    }
}

/// `e(a, b)`. Counted in [`pairing_count`].
pub fn pair(a: &G1Element, b: &G2Element) -> TargetElement {
    PAIRINGS.with(|c| c.set(c.get() + 1));
    TargetElement(blstrs::pairing(&a.0.to_affine(), &b.0.to_affine()))
}

/// `prod e(a_i, b_i)` with one shared final exponentiation. Counts one
/// pairing per term.
pub fn pair_product(terms: &[(G1Element, G2Element)]) -> TargetElement {
    PAIRINGS.with(|c| c.set(c.get() + terms.len() as u64));
    let g1: Vec<G1Affine> = terms.iter().map(|(a, _)| a.0.to_affine()).collect();
    let g2: Vec<G2Prepared> = terms
        .iter()
        .map(|(_, b)| G2Prepared::from(b.0.to_affine()))
        .collect();
    let refs: Vec<(&G1Affine, &G2Prepared)> = g1.iter().zip(&g2).collect();
    TargetElement(Bls12::multi_miller_loop(&refs).final_exponentiation())
}

/// Hash an arbitrary label into G2 (hash-to-curve, SSWU random oracle).
pub fn hash_to_group(label: &[u8]) -> G2Element {
    G2Element(G2Projective::hash_to_curve(label, HASH_DST, &[]))
}

pub fn random_scalar<R: RngCore + ?Sized>(rng: &mut R) -> Scalar {
    Scalar::random(rng)
}

/// Random scalar that is never zero.
pub fn random_nonzero_scalar<R: RngCore + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = Scalar::random(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Static description of the bilinear group in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub curve_id: &'static str,
    pub order: [u8; 32],
    pub g1: G1Element,
    pub g2: G2Element,
}

impl GroupDescriptor {
    pub fn bls12_381() -> Self {
        GroupDescriptor {
            curve_id: CURVE_ID,
            order: ORDER_BE,
            g1: G1Element::generator(),
            g2: G2Element::generator(),
        }
    }

    /// Accepts the security level in bits; BLS12-381 covers up to 128.
    pub fn for_security_level(bits: u32) -> Result<Self> {
        if bits == 0 || bits > 128 {
            return Err(Error::UnsupportedSecurityLevel(bits));
        }
        Ok(Self::bls12_381())
    }
}

/// ChaCha20 generator seeded from a fixed value.
///
/// Output is fully predictable from the seed. For tests and reproducible
/// benchmarks only; never use it to generate real keys.
pub struct InsecureSeededRng(rand_chacha::ChaCha20Rng);

impl InsecureSeededRng {
    pub fn new(seed: u64) -> Self {
        InsecureSeededRng(rand_chacha::ChaCha20Rng::seed_from_u64(seed))
    }
}

impl RngCore for InsecureSeededRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand_core::Error> {
        self.0.try_fill_bytes(dest)
    }
}

// Marker only: lets the seeded generator satisfy the scheme's `CryptoRng`
// bounds in tests. The stream is not secret.
impl CryptoRng for InsecureSeededRng {}
