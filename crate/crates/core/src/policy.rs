// SPDX-License-Identifier: Apache-2.0

//! Monotone threshold access trees.
//!
//! A tree is made of threshold gates (`k` of `n` children) and attribute
//! leaves. Policy text follows this grammar, with `and` binding tighter than
//! `or`:
//!
//! ```text
//! expr    := or
//! or      := and { "or" and }
//! and     := primary { "and" primary }
//! primary := attr | "(" expr ")" | k "of" "(" expr { "," expr } ")"
//! ```
//!
//! An unparenthesized chain `a and b and c` becomes a single 3-of-3 gate;
//! `a and (b and c)` keeps its nesting. Child indices are 1-based positions
//! among siblings, so no share is ever evaluated at zero.

use std::collections::BTreeSet;
use std::fmt;

use rand_core::RngCore;
use thiserror::Error;

use crate::codec::{Kind, Reader, Writer};
use crate::error::{Error, Result};
use crate::pairing::{random_scalar, Scalar};

const MAX_DEPTH: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("threshold {k} out of range 1..={n} at byte {pos}")]
    ThresholdOutOfRange { pos: usize, k: usize, n: usize },
    #[error("empty policy")]
    Empty,
    #[error("policy nesting deeper than {MAX_DEPTH}")]
    TooDeep,
}

/// Normalized attribute name.
///
/// Normalization strips every whitespace character, so `"doctorlevel A"`
/// and `"doctorlevelA"` name the same attribute. Comparison is
/// case-sensitive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attribute(String);

impl Attribute {
    pub fn new(raw: &str) -> Result<Attribute> {
        let name: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let valid_char = |c: char| c.is_ascii_alphanumeric() || "_-.:@/#".contains(c);
        if name.is_empty() || !name.chars().all(valid_char) || is_keyword(&name) {
            return Err(Error::InvalidAttribute(raw.to_string()));
        }
        Ok(Attribute(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_keyword(word: &str) -> bool {
    ["and", "or", "of"]
        .iter()
        .any(|k| word.eq_ignore_ascii_case(k))
}

/// Duplicate-free set of normalized attributes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttributeSet(BTreeSet<Attribute>);

impl AttributeSet {
    /// Builds a set, rejecting names that collide after normalization.
    pub fn from_names<I, S>(names: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for name in names {
            let attr = Attribute::new(name.as_ref())?;
            if !set.insert(attr.clone()) {
                return Err(Error::DuplicateAttribute(attr.0));
            }
        }
        Ok(AttributeSet(set))
    }

    /// Parses a comma-separated list.
    pub fn parse_list(text: &str) -> Result<AttributeSet> {
        if text.trim().is_empty() {
            return Ok(AttributeSet::default());
        }
        AttributeSet::from_names(text.split(','))
    }

    pub fn contains(&self, attr: &Attribute) -> bool {
        self.0.contains(attr)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Attribute> {
        self.0.iter()
    }
}

impl FromIterator<Attribute> for AttributeSet {
    fn from_iter<T: IntoIterator<Item = Attribute>>(iter: T) -> Self {
        AttributeSet(iter.into_iter().collect())
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(Attribute::as_str).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(Attribute),
    Gate {
        threshold: usize,
        children: Vec<Node>,
    },
}

impl Node {
    pub fn leaf(name: &str) -> Result<Node> {
        Ok(Node::Leaf(Attribute::new(name)?))
    }

    pub fn and(children: Vec<Node>) -> Node {
        Node::Gate {
            threshold: children.len(),
            children,
        }
    }

    pub fn or(children: Vec<Node>) -> Node {
        Node::Gate {
            threshold: 1,
            children,
        }
    }

    pub fn threshold(k: usize, children: Vec<Node>) -> Node {
        Node::Gate {
            threshold: k,
            children,
        }
    }

    fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Gate { children, .. } => children.iter().map(Node::leaf_count).sum(),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Gate { children, .. } => 1 + children.iter().map(Node::node_count).sum::<usize>(),
        }
    }

    fn validate(&self, depth: usize) -> std::result::Result<(), PolicyError> {
        if depth > MAX_DEPTH {
            return Err(PolicyError::TooDeep);
        }
        if let Node::Gate {
            threshold,
            children,
        } = self
        {
            if children.is_empty() {
                return Err(PolicyError::Empty);
            }
            if *threshold == 0 || *threshold > children.len() {
                return Err(PolicyError::ThresholdOutOfRange {
                    pos: 0,
                    k: *threshold,
                    n: children.len(),
                });
            }
            for c in children {
                c.validate(depth + 1)?;
            }
        }
        Ok(())
    }
}

/// Validated access tree. Leaves are numbered in depth-first order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessTree {
    root: Node,
}

impl AccessTree {
    pub fn new(root: Node) -> Result<AccessTree> {
        root.validate(0)?;
        Ok(AccessTree { root })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// Leaf attributes in depth-first order (may repeat).
    pub fn leaves(&self) -> Vec<&Attribute> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<&'a Attribute>) {
            match n {
                Node::Leaf(a) => out.push(a),
                Node::Gate { children, .. } => children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(Kind::AccessTree);
        self.encode_into(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<AccessTree> {
        let mut r = Reader::with_header(bytes, Kind::AccessTree)?;
        let tree = AccessTree::decode_from(&mut r)?;
        r.finish()?;
        Ok(tree)
    }

    /// Depth-first, each node framed by a `u32` length.
    pub(crate) fn encode_into(&self, w: &mut Writer) {
        fn node_bytes(n: &Node) -> Vec<u8> {
            let mut w = Writer::new();
            match n {
                Node::Leaf(a) => {
                    w.u8(0);
                    w.str(a.as_str());
                }
                Node::Gate {
                    threshold,
                    children,
                } => {
                    w.u8(1);
                    w.u32(*threshold as u32);
                    w.u32(children.len() as u32);
                    for c in children {
                        w.bytes(&node_bytes(c));
                    }
                }
            }
            w.finish()
        }
        w.bytes(&node_bytes(&self.root));
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<AccessTree> {
        fn node(bytes: &[u8], depth: usize) -> Result<Node> {
            if depth > MAX_DEPTH {
                return Err(PolicyError::TooDeep.into());
            }
            let mut r = Reader::new(bytes);
            let n = match r.u8()? {
                0 => {
                    let name = r.string()?;
                    let attr = Attribute::new(&name)?;
                    if attr.as_str() != name {
                        return Err(Error::malformed("leaf attribute is not normalized"));
                    }
                    Node::Leaf(attr)
                }
                1 => {
                    let threshold = r.u32()? as usize;
                    let count = r.u32()? as usize;
                    if count > r.remaining() / 4 {
                        return Err(Error::malformed("gate child count exceeds input"));
                    }
                    let mut children = Vec::with_capacity(count);
                    for _ in 0..count {
                        children.push(node(r.bytes()?, depth + 1)?);
                    }
                    Node::Gate {
                        threshold,
                        children,
                    }
                }
                t => return Err(Error::malformed(format!("unknown node tag {t}"))),
            };
            r.finish()?;
            Ok(n)
        }
        let root = node(r.bytes()?, 0)?;
        AccessTree::new(root)
    }
}

impl fmt::Display for AccessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Leaf(a) => write!(f, "{a}"),
                Node::Gate { .. } => {
                    f.write_str("(")?;
                    node(n, f)?;
                    f.write_str(")")
                }
            }
        }
        fn node(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Leaf(a) => write!(f, "{a}"),
                Node::Gate {
                    threshold,
                    children,
                } => {
                    let num = children.len();
                    let sep = if num >= 2 && *threshold == num {
                        Some(" and ")
                    } else if num >= 2 && *threshold == 1 {
                        Some(" or ")
                    } else {
                        None
                    };
                    match sep {
                        Some(sep) => {
                            for (i, c) in children.iter().enumerate() {
                                if i > 0 {
                                    f.write_str(sep)?;
                                }
                                child(c, f)?;
                            }
                            Ok(())
                        }
                        None => {
                            write!(f, "{threshold} of (")?;
                            for (i, c) in children.iter().enumerate() {
                                if i > 0 {
                                    f.write_str(", ")?;
                                }
                                node(c, f)?;
                            }
                            f.write_str(")")
                        }
                    }
                }
            }
        }
        node(&self.root, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Word(String),
}

fn tokenize(text: &str) -> std::result::Result<Vec<(usize, Tok)>, PolicyError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push((pos, Tok::LParen));
            }
            ')' => {
                chars.next();
                out.push((pos, Tok::RParen));
            }
            ',' => {
                chars.next();
                out.push((pos, Tok::Comma));
            }
            c if c.is_ascii_alphanumeric() || "_-.:@/#".contains(c) => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || "_-.:@/#".contains(c) {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, Tok::Word(word)));
            }
            other => {
                return Err(PolicyError::Syntax {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> std::result::Result<T, PolicyError> {
        Err(PolicyError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> std::result::Result<(), PolicyError> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> std::result::Result<Node, PolicyError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(PolicyError::TooDeep);
        }
        let mut parts = vec![self.and_chain()?];
        while self.keyword("or") {
            self.idx += 1;
            parts.push(self.and_chain()?);
        }
        self.depth -= 1;
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Node::or(parts)
        })
    }

    fn and_chain(&mut self) -> std::result::Result<Node, PolicyError> {
        let mut parts = vec![self.primary()?];
        while self.keyword("and") {
            self.idx += 1;
            parts.push(self.primary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Node::and(parts)
        })
    }

    fn primary(&mut self) -> std::result::Result<Node, PolicyError> {
        let start = self.pos();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Word(w)) => {
                let is_threshold = w.chars().all(|c| c.is_ascii_digit())
                    && matches!(self.toks.get(self.idx + 1), Some((_, Tok::Word(n))) if n.eq_ignore_ascii_case("of"));
                if is_threshold {
                    self.idx += 2;
                    self.expect(Tok::LParen, "'(' after 'of'")?;
                    let mut children = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.idx += 1;
                        children.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "')' closing threshold list")?;
                    let n = children.len();
                    let k = w.parse::<usize>().unwrap_or(usize::MAX);
                    if k == 0 || k > n {
                        return Err(PolicyError::ThresholdOutOfRange { pos: start, k, n });
                    }
                    return Ok(Node::threshold(k, children));
                }
                if is_keyword(&w) {
                    return self.err(format!("unexpected keyword {w:?}"));
                }
                self.idx += 1;
                Attribute::new(&w)
                    .map(Node::Leaf)
                    .map_err(|_| PolicyError::Syntax {
                        pos: start,
                        msg: format!("invalid attribute {w:?}"),
                    })
            }
            Some(Tok::RParen) => self.err("unexpected ')'"),
            Some(Tok::Comma) => self.err("unexpected ','"),
            None => self.err("unexpected end of policy"),
        }
    }
}

/// Parses policy text into an access tree.
pub fn parse_policy(text: &str) -> std::result::Result<AccessTree, PolicyError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(PolicyError::Empty);
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        depth: 0,
    };
    let root = p.expr()?;
    if p.idx != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(AccessTree { root })
}

impl std::str::FromStr for AccessTree {
    type Err = PolicyError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse_policy(s)
    }
}

/// Chosen sub-tree that proves an attribute set satisfies a policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assignment {
    /// `leaf` is the depth-first leaf number.
    Leaf { leaf: usize, attribute: Attribute },
    /// Exactly `threshold` children, as `(1-based index, assignment)` in
    /// ascending index order.
    Gate { chosen: Vec<(u64, Assignment)> },
}

impl Assignment {
    pub fn leaf_count(&self) -> usize {
        match self {
            Assignment::Leaf { .. } => 1,
            Assignment::Gate { chosen } => chosen.iter().map(|(_, a)| a.leaf_count()).sum(),
        }
    }

    /// Depth-first leaf numbers used by this assignment.
    pub fn used_leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn walk(a: &Assignment, out: &mut Vec<usize>) {
            match a {
                Assignment::Leaf { leaf, .. } => out.push(*leaf),
                Assignment::Gate { chosen } => chosen.iter().for_each(|(_, c)| walk(c, out)),
            }
        }
        walk(self, &mut out);
        out
    }
}

/// Finds a satisfying assignment using the fewest leaves; ties go to the
/// leftmost children. `None` when `attrs` does not satisfy the tree.
pub fn satisfies(tree: &AccessTree, attrs: &AttributeSet) -> Option<Assignment> {
    fn walk(n: &Node, attrs: &AttributeSet, next_leaf: &mut usize) -> Option<Assignment> {
        match n {
            Node::Leaf(a) => {
                let leaf = *next_leaf;
                *next_leaf += 1;
                attrs.contains(a).then(|| Assignment::Leaf {
                    leaf,
                    attribute: a.clone(),
                })
            }
            Node::Gate {
                threshold,
                children,
            } => {
                // Every child is visited so leaf numbering stays aligned.
                let mut ok: Vec<(u64, Assignment)> = children
                    .iter()
                    .enumerate()
                    .filter_map(|(i, c)| walk(c, attrs, next_leaf).map(|a| (i as u64 + 1, a)))
                    .collect();
                if ok.len() < *threshold {
                    return None;
                }
                ok.sort_by_key(|(_, a)| a.leaf_count());
                ok.truncate(*threshold);
                ok.sort_by_key(|(i, _)| *i);
                Some(Assignment::Gate { chosen: ok })
            }
        }
    }
    walk(&tree.root, attrs, &mut 0)
}

/// Polynomial over `Z_p`, coefficients in ascending degree.
#[derive(Clone, Debug)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    /// Random polynomial of the given degree with `q(0) = constant`.
    pub fn random<R: RngCore + ?Sized>(constant: Scalar, degree: usize, rng: &mut R) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        coeffs.push(constant);
        coeffs.extend((0..degree).map(|_| random_scalar(rng)));
        Polynomial { coeffs }
    }

    pub fn from_coefficients(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty());
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::ZERO, |acc, c| acc.mul(x).add(c))
    }
}

/// Per-node shares `q_x(0)`, indexed by depth-first (pre-order) node number.
#[derive(Clone, Debug)]
pub struct ShareMap {
    shares: Vec<Scalar>,
    leaf_nodes: Vec<usize>,
}

impl ShareMap {
    pub fn node_share(&self, node: usize) -> Scalar {
        self.shares[node]
    }

    pub fn root_share(&self) -> Scalar {
        self.shares[0]
    }

    /// Leaf shares in depth-first leaf order.
    pub fn leaf_shares(&self) -> Vec<Scalar> {
        self.leaf_nodes.iter().map(|&n| self.shares[n]).collect()
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }
}

/// Shares `secret` down the tree: each gate gets a random polynomial of
/// degree `k - 1` whose constant term is the gate's own share, and child `i`
/// receives `q(i)`.
pub fn share_secret<R: RngCore + ?Sized>(
    tree: &AccessTree,
    secret: Scalar,
    rng: &mut R,
) -> ShareMap {
    fn walk<R: RngCore + ?Sized>(
        n: &Node,
        share: Scalar,
        rng: &mut R,
        shares: &mut Vec<Scalar>,
        leaf_nodes: &mut Vec<usize>,
    ) {
        let id = shares.len();
        shares.push(share);
        match n {
            Node::Leaf(_) => leaf_nodes.push(id),
            Node::Gate {
                threshold,
                children,
            } => {
                let q = Polynomial::random(share, threshold - 1, rng);
                for (i, c) in children.iter().enumerate() {
                    let child_share = q.eval(&Scalar::from_u64(i as u64 + 1));
                    walk(c, child_share, rng, shares, leaf_nodes);
                }
            }
        }
    }
    let mut shares = Vec::with_capacity(tree.node_count());
    let mut leaf_nodes = Vec::with_capacity(tree.leaf_count());
    walk(&tree.root, secret, rng, &mut shares, &mut leaf_nodes);
    ShareMap { shares, leaf_nodes }
}

/// Lagrange basis coefficient at zero:
/// `prod_{j in set, j != i} (0 - j) / (i - j)`.
pub fn lagrange_coeff(i: &Scalar, set: &[Scalar]) -> Result<Scalar> {
    for (a, x) in set.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::ZeroIndex);
        }
        if set[a + 1..].contains(x) {
            return Err(Error::DuplicateIndex);
        }
    }
    if !set.contains(i) {
        return Err(Error::IndexNotInSet);
    }
    let mut num = Scalar::ONE;
    let mut den = Scalar::ONE;
    for j in set.iter().filter(|j| *j != i) {
        num = num.mul(&j.neg());
        den = den.mul(&i.sub(j));
    }
    Ok(num.mul(&den.inv()?))
}

/// [`lagrange_coeff`] over small integer indices.
pub fn lagrange_coeff_u64(i: u64, set: &[u64]) -> Result<Scalar> {
    let set: Vec<Scalar> = set.iter().map(|&j| Scalar::from_u64(j)).collect();
    lagrange_coeff(&Scalar::from_u64(i), &set)
}
