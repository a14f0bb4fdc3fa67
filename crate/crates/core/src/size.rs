// SPDX-License-Identifier: Apache-2.0

//! Element-count and byte-size breakdown of keys and records.

use serde::Serialize;

use crate::cpabe::{AttributeKey, MasterKey, PublicParams, SealedRecord};
use crate::envelope::NONCE_BYTES;
use crate::ots::{SIGNATURE_BYTES, VERIFYING_KEY_BYTES};
use crate::pairing::{CURVE_ID, G1_BYTES, G2_BYTES, GT_BYTES, HASH_DST, SCALAR_BYTES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    G1,
    G2,
    Target,
    Scalar,
    Aux,
}

impl ElementKind {
    fn width(self) -> usize {
        match self {
            ElementKind::G1 => G1_BYTES,
            ElementKind::G2 => G2_BYTES,
            ElementKind::Target => GT_BYTES,
            ElementKind::Scalar => SCALAR_BYTES,
            ElementKind::Aux => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub name: String,
    pub kind: ElementKind,
    pub count: usize,
    pub bytes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeReport {
    pub object: &'static str,
    pub components: Vec<Component>,
    pub g1_elements: usize,
    pub g2_elements: usize,
    pub target_elements: usize,
    pub scalars: usize,
    pub aux_bytes: usize,
    /// Sum over components. Framing bytes of the serialized form excluded.
    pub total_bytes: usize,
    pub note: Option<String>,
}

impl SizeReport {
    fn new(object: &'static str) -> Self {
        SizeReport {
            object,
            components: Vec::new(),
            g1_elements: 0,
            g2_elements: 0,
            target_elements: 0,
            scalars: 0,
            aux_bytes: 0,
            total_bytes: 0,
            note: None,
        }
    }

    fn add(&mut self, name: impl Into<String>, kind: ElementKind, count: usize) {
        let bytes = count * kind.width();
        match kind {
            ElementKind::G1 => self.g1_elements += count,
            ElementKind::G2 => self.g2_elements += count,
            ElementKind::Target => self.target_elements += count,
            ElementKind::Scalar => self.scalars += count,
            ElementKind::Aux => self.aux_bytes += count,
        }
        self.total_bytes += bytes;
        self.components.push(Component {
            name: name.into(),
            kind,
            count,
            bytes,
        });
    }

    /// Elements of either source group.
    pub fn source_elements(&self) -> usize {
        self.g1_elements + self.g2_elements
    }
}

pub enum Sizable<'a> {
    Public(&'a PublicParams),
    Master(&'a MasterKey),
    Key(&'a AttributeKey),
    Record(&'a SealedRecord),
}

const PK_NOTE: &str = "a flat count of 11 equal-width elements plus the hash \
    function does not describe a concrete encoding: the group descriptions, \
    the order p and the hash are fixed by the curve choice, and on an \
    asymmetric curve G1, G2 and target elements have different widths \
    (48, 96 and 288 bytes here)";

pub fn size_report(obj: Sizable<'_>) -> SizeReport {
    match obj {
        Sizable::Public(_) => {
            let mut r = SizeReport::new("public_params");
            r.add("curve_id", ElementKind::Aux, CURVE_ID.len());
            r.add("p", ElementKind::Scalar, 1);
            r.add("g1", ElementKind::G1, 1);
            r.add("g2", ElementKind::G2, 1);
            r.add("h1", ElementKind::G1, 1);
            r.add("h2", ElementKind::G1, 1);
            r.add("egg_alpha", ElementKind::Target, 1);
            r.add("hash_tag", ElementKind::Aux, HASH_DST.len());
            r.add("authority_vk", ElementKind::Aux, VERIFYING_KEY_BYTES);
            r.note = Some(format!(
                "reference total for public and master key together is 11|G_1| + H; \
                 measured here: {} source, {} target, {} scalar elements in PK; {}",
                r.source_elements(),
                r.target_elements,
                r.scalars,
                PK_NOTE
            ));
            r
        }
        Sizable::Master(_) => {
            let mut r = SizeReport::new("master_key");
            r.add("beta1", ElementKind::Scalar, 1);
            r.add("beta2", ElementKind::Scalar, 1);
            r.add("g_alpha", ElementKind::G2, 1);
            r.add("authority_seed", ElementKind::Aux, 32);
            r
        }
        Sizable::Key(k) => {
            let n = k.components.len();
            let mut r = SizeReport::new("attribute_key");
            r.add("D", ElementKind::G2, 1);
            r.add("E", ElementKind::G2, 1);
            r.add("D_j", ElementKind::G2, n);
            r.add("D'_j", ElementKind::G1, n);
            let names: usize = k.components.keys().map(|a| a.as_str().len()).sum();
            r.add("attribute_names", ElementKind::Aux, names);
            r.add(
                "validity",
                ElementKind::Aux,
                4 + 16 * k.validity.ranges().len(),
            );
            r.add("key_id", ElementKind::Aux, 16);
            r.add("binding_signature", ElementKind::Aux, SIGNATURE_BYTES);
            r.note = Some(format!("(2 + 2|S|) source elements with |S| = {n}"));
            r
        }
        Sizable::Record(rec) => {
            let l = rec.leaves.len();
            let mut r = SizeReport::new("sealed_record");
            r.add("tree", ElementKind::Aux, rec.tree.to_bytes().len() - 2);
            r.add("C1", ElementKind::G1, 1);
            r.add("C_y", ElementKind::G1, l);
            r.add("C'_y", ElementKind::G2, l);
            r.add("C_vk", ElementKind::G1, 1);
            r.add("C'_vk", ElementKind::G2, 1);
            r.add("vk", ElementKind::Aux, VERIFYING_KEY_BYTES);
            r.add("sigma", ElementKind::Aux, SIGNATURE_BYTES);
            r.add("nonce", ElementKind::Aux, NONCE_BYTES);
            r.add(
                "payload_ciphertext",
                ElementKind::Aux,
                rec.envelope.ciphertext.len(),
            );
            r.note = Some(format!("1 + 2L + 2 source elements with L = {l} leaves"));
            r
        }
    }
}
