// SPDX-License-Identifier: Apache-2.0

//! Ciphertext-policy ABE with signature-bound ciphertexts and time-limited
//! keys.
//!
//! Encryption shares the secret `s` through an implicit 2-of-2 gate whose
//! children are the policy root (index 1) and a verification-key node
//! (index 2). The verification key belongs to a one-time signature over the
//! whole record, so a ciphertext cannot be altered and re-signed without
//! also changing the key its vk node was built for.
//!
//! Group placement follows [`crate::pairing`]: ciphertext elements built from
//! `g1`/`h1`/`h2` live in G1, key elements and hashes live in G2.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use rand_core::{CryptoRng, RngCore};

use crate::codec::{Kind, Reader, Writer};
use crate::envelope::{self, EnvelopeConfig, EnvelopePayload};
use crate::error::{Error, Result};
use crate::ots::{
    self, LongTermSigner, Signature, VerificationKey, SIGNATURE_BYTES, VERIFYING_KEY_BYTES,
};
use crate::pairing::{
    hash_to_group, pair, pair_product, random_nonzero_scalar, random_scalar, G1Element, G2Element,
    GroupDescriptor, Scalar, TargetElement, CURVE_ID, HASH_DST, ORDER_BE,
};
use crate::policy::{
    lagrange_coeff_u64, satisfies, share_secret, AccessTree, Assignment, Attribute, AttributeSet,
    Polynomial,
};
use crate::timeval::ValiditySet;

const KEY_BINDING_DOMAIN: &[u8] = b"fogphr/v1/key-binding";

pub(crate) fn hash_attribute(a: &Attribute) -> G2Element {
    let mut label = b"attr:".to_vec();
    label.extend_from_slice(a.as_str().as_bytes());
    hash_to_group(&label)
}

pub(crate) fn hash_verification_key(vk: &VerificationKey) -> G2Element {
    let mut label = b"vk:".to_vec();
    label.extend_from_slice(&vk.to_bytes());
    hash_to_group(&label)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicParams {
    pub descriptor: GroupDescriptor,
    /// `g1^beta1`
    pub h1: G1Element,
    /// `g1^beta2`
    pub h2: G1Element,
    /// `e(g1, g2)^alpha`
    pub egg_alpha: TargetElement,
    /// Verifies the authority's binding signature on issued keys.
    pub authority_vk: VerificationKey,
}

/// Authority secret. Deliberately neither `Clone` nor part of any actor
/// message type.
pub struct MasterKey {
    pub(crate) beta1: Scalar,
    pub(crate) beta2: Scalar,
    /// `g2^alpha`
    pub(crate) g_alpha: G2Element,
    pub(crate) authority: LongTermSigner,
}

impl fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MasterKey(..)")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttributeComponent {
    /// `D_j = g2^r * H(j)^{r_j}`
    pub d: G2Element,
    /// `D'_j = g1^{r_j}`
    pub d_prime: G1Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeKey {
    pub key_id: [u8; 16],
    /// `g2^{(alpha + r) / beta1}`
    pub d: G2Element,
    /// `g2^{r / beta2}`
    pub e: G2Element,
    pub components: BTreeMap<Attribute, AttributeComponent>,
    pub validity: ValiditySet,
    /// Authority signature over every other field.
    pub binding: Signature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeafComponent {
    /// `g1^{q_y(0)}`
    pub c: G1Element,
    /// `H(att(y))^{q_y(0)}`
    pub c_prime: G2Element,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecordMeta {
    pub owner: String,
    /// Seconds since the Unix epoch.
    pub created_at: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SealedRecord {
    pub tree: AccessTree,
    /// `h1^s`
    pub c1: G1Element,
    /// One per tree leaf, depth-first order.
    pub leaves: Vec<LeafComponent>,
    /// `h2^{q_vk(0)}`
    pub c_vk: G1Element,
    /// `H(vk)^{q_vk(0)}`
    pub c_vk_prime: G2Element,
    pub vk: VerificationKey,
    pub sigma: Signature,
    pub envelope: EnvelopePayload,
    pub meta: RecordMeta,
}

/// Secret randomness retained by the traced entry points. Exposes key
/// material; meant for tests and audits.
#[derive(Clone, Debug)]
pub struct SetupTrace {
    pub alpha: Scalar,
    pub beta1: Scalar,
    pub beta2: Scalar,
    /// Number of times `beta2` was redrawn to differ from `beta1` and zero.
    pub beta2_resamples: u32,
}

#[derive(Clone, Debug)]
pub struct KeyTrace {
    pub r: Scalar,
    pub r_attr: BTreeMap<Attribute, Scalar>,
}

#[derive(Clone, Debug)]
pub struct EncryptTrace {
    pub s: Scalar,
    /// Share of the policy root, `q(1)` of the implicit top gate.
    pub root_share: Scalar,
    /// Share of the verification-key node, `q(2)`.
    pub vk_share: Scalar,
    pub leaf_shares: Vec<Scalar>,
    pub k: TargetElement,
}

#[derive(Clone, Debug)]
pub struct DecryptTrace {
    pub f_vk: TargetElement,
    pub f_root: TargetElement,
    /// `e(g1, g2)^{r s}`
    pub a: TargetElement,
    pub k_prime: TargetElement,
    pub payload: Vec<u8>,
}

pub fn setup<R: RngCore + CryptoRng + ?Sized>(
    security_bits: u32,
    rng: &mut R,
) -> Result<(PublicParams, MasterKey)> {
    setup_traced(security_bits, rng).map(|(pk, mk, _)| (pk, mk))
}

pub fn setup_traced<R: RngCore + CryptoRng + ?Sized>(
    security_bits: u32,
    rng: &mut R,
) -> Result<(PublicParams, MasterKey, SetupTrace)> {
    let descriptor = GroupDescriptor::for_security_level(security_bits)?;
    let alpha = random_nonzero_scalar(rng);
    let beta1 = random_nonzero_scalar(rng);
    let mut beta2 = random_scalar(rng);
    let mut beta2_resamples = 0;
    while beta2.is_zero() || beta2 == beta1 {
        beta2 = random_scalar(rng);
        beta2_resamples += 1;
    }
    let authority = LongTermSigner::generate(rng);

    let pk = PublicParams {
        descriptor,
        h1: descriptor.g1.exp(&beta1),
        h2: descriptor.g1.exp(&beta2),
        egg_alpha: pair(&descriptor.g1, &descriptor.g2).exp(&alpha),
        authority_vk: authority.verification_key(),
    };
    let mk = MasterKey {
        beta1,
        beta2,
        g_alpha: descriptor.g2.exp(&alpha),
        authority,
    };
    let trace = SetupTrace {
        alpha,
        beta1,
        beta2,
        beta2_resamples,
    };
    Ok((pk, mk, trace))
}

pub fn keygen<R: RngCore + CryptoRng + ?Sized>(
    pk: &PublicParams,
    mk: &MasterKey,
    attrs: &AttributeSet,
    validity: ValiditySet,
    rng: &mut R,
) -> Result<AttributeKey> {
    keygen_traced(pk, mk, attrs, validity, rng).map(|(k, _)| k)
}

pub fn keygen_traced<R: RngCore + CryptoRng + ?Sized>(
    pk: &PublicParams,
    mk: &MasterKey,
    attrs: &AttributeSet,
    validity: ValiditySet,
    rng: &mut R,
) -> Result<(AttributeKey, KeyTrace)> {
    if attrs.is_empty() {
        return Err(Error::EmptyAttributes);
    }
    let g1 = pk.descriptor.g1;
    let g2 = pk.descriptor.g2;
    let mut key_id = [0u8; 16];
    rng.fill_bytes(&mut key_id);

    let r = random_scalar(rng);
    let g2_r = g2.exp(&r);
    let d = mk.g_alpha.mul(&g2_r).exp(&mk.beta1.inv()?);
    let e = g2.exp(&r.mul(&mk.beta2.inv()?));

    let mut components = BTreeMap::new();
    let mut r_attr = BTreeMap::new();
    for a in attrs.iter() {
        let rj = random_scalar(rng);
        components.insert(
            a.clone(),
            AttributeComponent {
                d: g2_r.mul(&hash_attribute(a).exp(&rj)),
                d_prime: g1.exp(&rj),
            },
        );
        r_attr.insert(a.clone(), rj);
    }

    let mut key = AttributeKey {
        key_id,
        d,
        e,
        components,
        validity,
        binding: Signature::from_bytes([0; SIGNATURE_BYTES]),
    };
    key.binding = mk.authority.sign(&key.binding_message());
    Ok((key, KeyTrace { r, r_attr }))
}

pub fn encrypt<R: RngCore + CryptoRng + ?Sized>(
    pk: &PublicParams,
    tree: &AccessTree,
    payload: &[u8],
    rng: &mut R,
) -> Result<SealedRecord> {
    encrypt_with(
        pk,
        tree,
        payload,
        RecordMeta::default(),
        &EnvelopeConfig::default(),
        rng,
    )
    .map(|(rec, _)| rec)
}

/// Encrypts `payload` under `tree`, returning the record and the retained
/// encryption randomness.
pub fn encrypt_with<R: RngCore + CryptoRng + ?Sized>(
    pk: &PublicParams,
    tree: &AccessTree,
    payload: &[u8],
    meta: RecordMeta,
    cfg: &EnvelopeConfig,
    rng: &mut R,
) -> Result<(SealedRecord, EncryptTrace)> {
    let g1 = pk.descriptor.g1;
    let (signer, vk) = ots::keypair(rng);

    let s = random_scalar(rng);
    let top = Polynomial::random(s, 1, rng);
    let root_share = top.eval(&Scalar::from_u64(1));
    let vk_share = top.eval(&Scalar::from_u64(2));

    let shares = share_secret(tree, root_share, rng);
    let leaf_shares = shares.leaf_shares();
    let leaves = tree
        .leaves()
        .into_iter()
        .zip(&leaf_shares)
        .map(|(a, q)| LeafComponent {
            c: g1.exp(q),
            c_prime: hash_attribute(a).exp(q),
        })
        .collect();

    let k = pk.egg_alpha.exp(&s);
    let envelope = envelope::seal(&envelope::derive_key(&k), payload, cfg, rng)?;

    let mut rec = SealedRecord {
        tree: tree.clone(),
        c1: pk.h1.exp(&s),
        leaves,
        c_vk: pk.h2.exp(&vk_share),
        c_vk_prime: hash_verification_key(&vk).exp(&vk_share),
        vk,
        sigma: Signature::from_bytes([0; SIGNATURE_BYTES]),
        envelope,
        meta,
    };
    rec.sigma = signer.sign(&rec.signed_bytes());

    let trace = EncryptTrace {
        s,
        root_share,
        vk_share,
        leaf_shares,
        k,
    };
    Ok((rec, trace))
}

/// Recovers `e(g1, g2)^{r q_x(0)}` for the sub-tree chosen by `node`, or
/// `None` when a used leaf is not covered by the key.
pub fn decrypt_node(
    rec: &SealedRecord,
    sk: &AttributeKey,
    node: &Assignment,
) -> Option<TargetElement> {
    match node {
        Assignment::Leaf { leaf, attribute } => {
            let tree_attr = *rec.tree.leaves().get(*leaf)?;
            if tree_attr != attribute {
                return None;
            }
            let kc = sk.components.get(attribute)?;
            let ct = rec.leaves.get(*leaf)?;
            Some(pair(&ct.c, &kc.d).div(&pair(&kc.d_prime, &ct.c_prime)))
        }
        Assignment::Gate { chosen } => {
            let indices: Vec<u64> = chosen.iter().map(|(i, _)| *i).collect();
            let mut acc = TargetElement::identity();
            for (i, child) in chosen {
                let f = decrypt_node(rec, sk, child)?;
                let delta = lagrange_coeff_u64(*i, &indices).ok()?;
                acc = acc.mul(&f.exp(&delta));
            }
            Some(acc)
        }
    }
}

/// Decrypts a record. Checks run in a fixed order: ciphertext signature,
/// key binding and validity date, policy, then the pairing computation and
/// the envelope. Nothing is paired before the first three pass.
///
/// All Lagrange weights are folded into G1 exponents so the whole key
/// recovery is one multi-pairing. [`decrypt_traced`] computes the same
/// value step by step.
pub fn decrypt(
    pk: &PublicParams,
    sk: &AttributeKey,
    rec: &SealedRecord,
    now: NaiveDate,
) -> Result<Vec<u8>> {
    let assignment = precheck(pk, sk, rec, now)?;
    let k_prime = combined_k_prime(pk, sk, rec, &assignment)?;
    envelope::open(&envelope::derive_key(&k_prime), &rec.envelope)
}

pub fn decrypt_traced(
    pk: &PublicParams,
    sk: &AttributeKey,
    rec: &SealedRecord,
    now: NaiveDate,
) -> Result<DecryptTrace> {
    let assignment = precheck(pk, sk, rec, now)?;

    let vk_hash_e = hash_verification_key(&rec.vk).mul(&sk.e);
    let f_vk = pair(&rec.c_vk, &vk_hash_e).div(&pair(&pk.h2, &rec.c_vk_prime));
    let f_root = decrypt_node(rec, sk, &assignment).ok_or(Error::PolicyUnsatisfied)?;

    let a = f_root
        .exp(&lagrange_coeff_u64(1, &[1, 2])?)
        .mul(&f_vk.exp(&lagrange_coeff_u64(2, &[1, 2])?));
    let k_prime = pair(&rec.c1, &sk.d).div(&a);
    let payload = envelope::open(&envelope::derive_key(&k_prime), &rec.envelope)?;
    Ok(DecryptTrace {
        f_vk,
        f_root,
        a,
        k_prime,
        payload,
    })
}

fn precheck(
    pk: &PublicParams,
    sk: &AttributeKey,
    rec: &SealedRecord,
    now: NaiveDate,
) -> Result<Assignment> {
    rec.verify_signature()?;
    check_key(pk, sk, now)?;
    satisfies(&rec.tree, &sk.attributes()).ok_or(Error::PolicyUnsatisfied)
}

/// Product of Lagrange weights from the root down to each used leaf.
fn leaf_weights(node: &Assignment, weight: Scalar, out: &mut Vec<(usize, Scalar)>) -> Result<()> {
    match node {
        Assignment::Leaf { leaf, .. } => out.push((*leaf, weight)),
        Assignment::Gate { chosen } => {
            let indices: Vec<u64> = chosen.iter().map(|(i, _)| *i).collect();
            for (i, child) in chosen {
                let delta = lagrange_coeff_u64(*i, &indices)?;
                leaf_weights(child, weight.mul(&delta), out)?;
            }
        }
    }
    Ok(())
}

/// `K' = e(C1, D) / (F_root^{d1} F_vk^{d2})` as a single pairing product.
pub(crate) fn combined_k_prime(
    pk: &PublicParams,
    sk: &AttributeKey,
    rec: &SealedRecord,
    assignment: &Assignment,
) -> Result<TargetElement> {
    let d1 = lagrange_coeff_u64(1, &[1, 2])?;
    let d2 = lagrange_coeff_u64(2, &[1, 2])?;
    let mut weights = Vec::new();
    leaf_weights(assignment, d1.neg(), &mut weights)?;

    let tree_leaves = rec.tree.leaves();
    let mut terms = Vec::with_capacity(2 * weights.len() + 3);
    terms.push((rec.c1, sk.d));
    for (leaf, w) in weights {
        let attr = *tree_leaves.get(leaf).ok_or(Error::PolicyUnsatisfied)?;
        let kc = sk.components.get(attr).ok_or(Error::PolicyUnsatisfied)?;
        let ct = rec.leaves.get(leaf).ok_or(Error::PolicyUnsatisfied)?;
        terms.push((ct.c.exp(&w), kc.d));
        terms.push((kc.d_prime.exp(&w.neg()), ct.c_prime));
    }
    let u = d2.neg();
    terms.push((rec.c_vk.exp(&u), hash_verification_key(&rec.vk).mul(&sk.e)));
    terms.push((pk.h2.exp(&u.neg()), rec.c_vk_prime));
    Ok(pair_product(&terms))
}

/// Verifies the record signature on raw bytes before parsing anything
/// inside them, then decrypts.
pub fn decrypt_bytes(
    pk: &PublicParams,
    sk: &AttributeKey,
    record_bytes: &[u8],
    now: NaiveDate,
) -> Result<Vec<u8>> {
    SealedRecord::verify_bytes(record_bytes)?;
    let rec = SealedRecord::from_bytes(record_bytes)?;
    decrypt(pk, sk, &rec, now)
}

/// Key binding and validity window.
pub fn check_key(pk: &PublicParams, sk: &AttributeKey, now: NaiveDate) -> Result<()> {
    let bound = pk
        .authority_vk
        .verify(&sk.binding_message(), &sk.binding)
        .unwrap_or(false);
    if !bound {
        return Err(Error::KeyBindingInvalid);
    }
    if !sk.validity.contains(now) {
        return Err(Error::KeyExpired(now));
    }
    Ok(())
}

impl PublicParams {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(Kind::PublicParams);
        w.str(self.descriptor.curve_id);
        w.raw(&self.descriptor.order);
        w.g1(&self.descriptor.g1);
        w.g2(&self.descriptor.g2);
        w.g1(&self.h1);
        w.g1(&self.h2);
        w.gt(&self.egg_alpha);
        w.bytes(HASH_DST);
        w.raw(&self.authority_vk.to_bytes());
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::with_header(bytes, Kind::PublicParams)?;
        let descriptor = GroupDescriptor::bls12_381();
        if r.string()? != CURVE_ID {
            return Err(Error::malformed("unsupported curve"));
        }
        if r.fixed::<32>()? != ORDER_BE || r.g1()? != descriptor.g1 || r.g2()? != descriptor.g2 {
            return Err(Error::malformed(
                "group descriptor does not match the curve",
            ));
        }
        let h1 = r.g1()?;
        let h2 = r.g1()?;
        let egg_alpha = r.gt()?;
        if r.bytes()? != HASH_DST {
            return Err(Error::malformed("unknown hash-to-group tag"));
        }
        let authority_vk = VerificationKey::from_bytes(r.fixed()?);
        r.finish()?;
        if h1.is_identity() || h2.is_identity() || h1 == h2 || egg_alpha.is_identity() {
            return Err(Error::malformed("degenerate public parameters"));
        }
        Ok(PublicParams {
            descriptor,
            h1,
            h2,
            egg_alpha,
            authority_vk,
        })
    }
}

impl MasterKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(Kind::MasterKey);
        w.scalar(&self.beta1);
        w.scalar(&self.beta2);
        w.g2(&self.g_alpha);
        w.raw(&self.authority.seed());
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::with_header(bytes, Kind::MasterKey)?;
        let beta1 = r.scalar()?;
        let beta2 = r.scalar()?;
        let g_alpha = r.g2()?;
        let authority = LongTermSigner::from_seed(r.fixed()?);
        r.finish()?;
        if beta1.is_zero() || beta2.is_zero() || beta1 == beta2 {
            return Err(Error::malformed("master key exponents violate invariants"));
        }
        Ok(MasterKey {
            beta1,
            beta2,
            g_alpha,
            authority,
        })
    }
}

impl AttributeKey {
    pub fn attributes(&self) -> AttributeSet {
        self.components.keys().cloned().collect()
    }

    /// Number of source-group elements: `D`, `E` and a pair per attribute.
    pub fn source_element_count(&self) -> usize {
        2 + 2 * self.components.len()
    }

    fn encode_body(&self, w: &mut Writer) {
        w.raw(&self.key_id);
        w.g2(&self.d);
        w.g2(&self.e);
        self.validity.encode_into(w);
        w.len(self.components.len());
        for (a, c) in &self.components {
            w.str(a.as_str());
            w.g2(&c.d);
            w.g1(&c.d_prime);
        }
    }

    fn binding_message(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(KEY_BINDING_DOMAIN);
        self.encode_body(&mut w);
        w.finish()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(Kind::AttributeKey);
        self.encode_body(&mut w);
        w.raw(&self.binding.to_bytes());
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::with_header(bytes, Kind::AttributeKey)?;
        let key_id = r.fixed()?;
        let d = r.g2()?;
        let e = r.g2()?;
        let validity = ValiditySet::decode_from(&mut r)?;
        let n = r.u32()? as usize;
        if n == 0 {
            return Err(Error::EmptyAttributes);
        }
        let mut components = BTreeMap::new();
        for _ in 0..n {
            let name = r.string()?;
            let attr = Attribute::new(&name)?;
            if attr.as_str() != name {
                return Err(Error::malformed("key attribute is not normalized"));
            }
            let c = AttributeComponent {
                d: r.g2()?,
                d_prime: r.g1()?,
            };
            if components.insert(attr, c).is_some() {
                return Err(Error::DuplicateAttribute(name));
            }
        }
        let binding = Signature::from_bytes(r.fixed()?);
        r.finish()?;
        Ok(AttributeKey {
            key_id,
            d,
            e,
            components,
            validity,
            binding,
        })
    }
}

impl SealedRecord {
    /// Serialized layout:
    ///
    /// ```text
    /// version | kind | envelope | meta | tree | C1 | leaf pairs | C_vk | C'_vk | vk | sigma
    /// ```
    ///
    /// `vk` and `sigma` sit at fixed offsets from the end, so the signature
    /// is checked over every preceding byte before anything else is parsed.
    pub fn signed_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(Kind::SealedRecord);
        let mut env = Writer::new();
        self.envelope.encode_into(&mut env);
        w.bytes(&env.finish());
        let mut meta = Writer::new();
        meta.str(&self.meta.owner);
        meta.i64(self.meta.created_at);
        w.bytes(&meta.finish());
        self.tree.encode_into(&mut w);
        w.g1(&self.c1);
        w.len(self.leaves.len());
        for l in &self.leaves {
            w.g1(&l.c);
            w.g2(&l.c_prime);
        }
        w.g1(&self.c_vk);
        w.g2(&self.c_vk_prime);
        w.raw(&self.vk.to_bytes());
        w.finish()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.signed_bytes();
        out.extend_from_slice(&self.sigma.to_bytes());
        out
    }

    /// Signature check over raw serialized bytes. Any failure, including an
    /// undecodable verification key, is [`Error::SignatureInvalid`].
    pub fn verify_bytes(bytes: &[u8]) -> Result<()> {
        let tail = VERIFYING_KEY_BYTES + SIGNATURE_BYTES;
        if bytes.len() < 2 + tail {
            return Err(Error::malformed(
                "record shorter than its signature trailer",
            ));
        }
        let (signed, sig) = bytes.split_at(bytes.len() - SIGNATURE_BYTES);
        let vk = VerificationKey::from_bytes(
            signed[signed.len() - VERIFYING_KEY_BYTES..]
                .try_into()
                .unwrap(),
        );
        let sig = Signature::from_bytes(sig.try_into().unwrap());
        match vk.verify(signed, &sig) {
            Ok(true) => Ok(()),
            _ => Err(Error::SignatureInvalid),
        }
    }

    pub fn verify_signature(&self) -> Result<()> {
        match self.vk.verify(&self.signed_bytes(), &self.sigma) {
            Ok(true) => Ok(()),
            _ => Err(Error::SignatureInvalid),
        }
    }

    /// Parses without verifying the signature.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::with_header(bytes, Kind::SealedRecord)?;
        let envelope = EnvelopePayload::from_bytes(r.bytes()?)?;
        let mut m = Reader::new(r.bytes()?);
        let meta = RecordMeta {
            owner: m.string()?,
            created_at: m.i64()?,
        };
        m.finish()?;
        let tree = AccessTree::decode_from(&mut r)?;
        let c1 = r.g1()?;
        let n = r.u32()? as usize;
        if n != tree.leaf_count() {
            return Err(Error::malformed(
                "leaf pair count does not match the policy",
            ));
        }
        let mut leaves = Vec::with_capacity(n);
        for _ in 0..n {
            leaves.push(LeafComponent {
                c: r.g1()?,
                c_prime: r.g2()?,
            });
        }
        let c_vk = r.g1()?;
        let c_vk_prime = r.g2()?;
        let vk = VerificationKey::from_bytes(r.fixed()?);
        let sigma = Signature::from_bytes(r.fixed()?);
        r.finish()?;
        Ok(SealedRecord {
            tree,
            c1,
            leaves,
            c_vk,
            c_vk_prime,
            vk,
            sigma,
            envelope,
            meta,
        })
    }

    /// `C1`, the leaf pairs and the vk pair.
    pub fn source_element_count(&self) -> usize {
        1 + 2 * self.leaves.len() + 2
    }
}
