// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion in order, prints one
//! `[PASS]`/`[FAIL]` line each and exits non-zero if any failed.
//!
//! Set `CI` in the environment to relax the decrypt latency budget.

use std::cell::Cell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use chrono::{Days, NaiveDate};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;

use fogphr::actors::{user_fetch_decrypt, DirStore, FogNode, Owner, RecordStore, UserSession};
use fogphr::bench::{phase_fit, run_bench, BenchConfig, PolicyShape};
use fogphr::cpabe::{
    self, decrypt, decrypt_bytes, decrypt_traced, encrypt, encrypt_with, keygen, keygen_traced,
    setup, setup_traced, AttributeKey, MasterKey, PublicParams, RecordMeta,
};
use fogphr::envelope::EnvelopeConfig;
use fogphr::pairing::{pair, pairing_count, InsecureSeededRng, Scalar};
use fogphr::policy::{
    lagrange_coeff, lagrange_coeff_u64, satisfies, AccessTree, Assignment, Attribute, AttributeSet,
    Node, Polynomial,
};
use fogphr::size::{size_report, Sizable};
use fogphr::timeval::ValiditySet;
use fogphr::Error;

type Outcome = Result<String, String>;

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn window() -> ValiditySet {
    "2020-06-20..2020-06-22".parse().unwrap()
}

fn mid_window() -> NaiveDate {
    day(2020, 6, 21)
}

fn universe(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("u{i}")).collect()
}

/// Boolean evaluation straight from the gate definition.
fn oracle_eval(node: &Node, held: &AttributeSet) -> bool {
    match node {
        Node::Leaf(a) => held.contains(a),
        Node::Gate {
            threshold,
            children,
        } => children.iter().filter(|c| oracle_eval(c, held)).count() >= *threshold,
    }
}

fn random_tree<R: Rng>(rng: &mut R, names: &[String], max_leaves: usize, depth: usize) -> Node {
    if max_leaves < 2 || depth == 0 || rng.gen_bool(0.3) {
        return Node::leaf(names.choose(rng).unwrap()).unwrap();
    }
    let width = rng.gen_range(2..=max_leaves.min(4));
    let mut budget = max_leaves - width;
    let children: Vec<Node> = (0..width)
        .map(|_| {
            let extra = rng.gen_range(0..=budget);
            budget -= extra;
            random_tree(rng, names, 1 + extra, depth - 1)
        })
        .collect();
    let k = rng.gen_range(1..=children.len());
    Node::threshold(k, children)
}

/// A random minimal set of attributes that satisfies `node`.
fn random_witness<R: Rng>(rng: &mut R, node: &Node, out: &mut Vec<Attribute>) {
    match node {
        Node::Leaf(a) => out.push(a.clone()),
        Node::Gate {
            threshold,
            children,
        } => {
            for c in children.choose_multiple(rng, *threshold) {
                random_witness(rng, c, out);
            }
        }
    }
}

fn satisfying_set<R: Rng>(
    rng: &mut R,
    node: &Node,
    names: &[String],
    extras: usize,
) -> AttributeSet {
    let mut attrs = Vec::new();
    random_witness(rng, node, &mut attrs);
    for _ in 0..extras {
        attrs.push(Attribute::new(names.choose(rng).unwrap()).unwrap());
    }
    attrs.sort();
    attrs.dedup();
    attrs.into_iter().collect()
}

// ---------------------------------------------------------------- 1

fn arb_node(names: Vec<String>) -> impl Strategy<Value = Node> {
    let leaf = prop::sample::select(names).prop_map(|a| Node::leaf(&a).unwrap());
    leaf.prop_recursive(4, 12, 4, |inner| {
        prop::collection::vec(inner, 2..=4).prop_flat_map(|children| {
            let n = children.len();
            (1..=n).prop_map(move |k| Node::threshold(k, children.clone()))
        })
    })
}

fn round_trip_completeness() -> Outcome {
    const CASES: u32 = 500;
    let started = Instant::now();
    let mut rng = InsecureSeededRng::new(101);
    let (pk, mk) = setup(128, &mut rng).unwrap();
    let names = universe(16);
    let trees = arb_node(names.clone())
        .prop_map(|n| AccessTree::new(n).unwrap())
        .prop_filter("at most 12 leaves", |t| t.leaf_count() <= 12);
    let strategy = (
        trees,
        any::<u64>(),
        prop::collection::vec(any::<u8>(), 0..2048),
        0u64..3,
    );
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        max_global_rejects: 100_000,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let passed = Cell::new(0u32);
    let max_leaves = Cell::new(0usize);
    runner
        .run(&strategy, |(tree, seed, payload, offset)| {
            let mut case_rng = InsecureSeededRng::new(seed);
            let attrs = satisfying_set(&mut case_rng, tree.root(), &names, 2);
            let key = keygen(&pk, &mk, &attrs, window(), &mut case_rng).unwrap();
            let rec = encrypt(&pk, &tree, &payload, &mut case_rng).unwrap();
            let now = day(2020, 6, 20)
                .checked_add_days(Days::new(offset))
                .unwrap();
            let got = decrypt_bytes(&pk, &key, &rec.to_bytes(), now)
                .map_err(|e| TestCaseError::fail(format!("`{tree}` with {attrs}: {e}")))?;
            prop_assert_eq!(got, payload);
            passed.set(passed.get() + 1);
            max_leaves.set(max_leaves.get().max(tree.leaf_count()));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{}/{CASES} cases recovered byte-exactly (largest tree {} leaves) in {:.1}s",
        passed.get(),
        max_leaves.get(),
        started.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 2

#[derive(Clone)]
enum Shape {
    Leaf,
    Gate(usize, Vec<Shape>),
}

/// Every ordered tree shape with `n` leaves, gates of fan-in >= 2 and every
/// threshold 1..=fan-in.
fn shapes(n: usize) -> Vec<Shape> {
    if n == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for parts in compositions(n) {
        if parts.len() < 2 {
            continue;
        }
        let mut seqs: Vec<Vec<Shape>> = vec![Vec::new()];
        for &p in &parts {
            let subs = shapes(p);
            seqs = seqs
                .into_iter()
                .flat_map(|prefix| {
                    subs.iter().map(move |s| {
                        let mut v = prefix.clone();
                        v.push(s.clone());
                        v
                    })
                })
                .collect();
        }
        for children in seqs {
            for k in 1..=children.len() {
                out.push(Shape::Gate(k, children.clone()));
            }
        }
    }
    out
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn label(shape: &Shape, labels: &[usize], attrs: &[Attribute], next: &mut usize) -> Node {
    match shape {
        Shape::Leaf => {
            *next += 1;
            Node::Leaf(attrs[labels[*next - 1]].clone())
        }
        Shape::Gate(k, children) => Node::threshold(
            *k,
            children
                .iter()
                .map(|c| label(c, labels, attrs, next))
                .collect(),
        ),
    }
}

/// Checks that `a` is a genuine proof: every used leaf is held and matches
/// the tree, and every gate picks exactly `k` distinct children.
fn valid_witness(node: &Node, a: &Assignment, held: &AttributeSet, first_leaf: &mut usize) -> bool {
    match (node, a) {
        (Node::Leaf(attr), Assignment::Leaf { leaf, attribute }) => {
            let ok = *leaf == *first_leaf && attribute == attr && held.contains(attr);
            *first_leaf += 1;
            ok
        }
        (
            Node::Gate {
                threshold,
                children,
            },
            Assignment::Gate { chosen },
        ) => {
            if chosen.len() != *threshold || chosen.windows(2).any(|w| w[0].0 >= w[1].0) {
                return false;
            }
            let mut picks = chosen.iter().peekable();
            for (i, child) in children.iter().enumerate() {
                let mut base = *first_leaf;
                match picks.peek() {
                    Some((idx, sub)) if *idx == i as u64 + 1 => {
                        if !valid_witness(child, sub, held, &mut base) {
                            return false;
                        }
                        picks.next();
                    }
                    _ => {}
                }
                *first_leaf += leaf_count(child);
            }
            picks.next().is_none()
        }
        _ => false,
    }
}

fn leaf_count(node: &Node) -> usize {
    match node {
        Node::Leaf(_) => 1,
        Node::Gate { children, .. } => children.iter().map(leaf_count).sum(),
    }
}

fn subsets(attrs: &[Attribute]) -> Vec<AttributeSet> {
    (0..1usize << attrs.len())
        .map(|mask| {
            attrs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

fn soundness_oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let names = universe(5);
    let attrs: Vec<Attribute> = names.iter().map(|n| Attribute::new(n).unwrap()).collect();
    let sets = subsets(&attrs);
    let all_shapes: Vec<(usize, Vec<Shape>)> = (1..=5).map(|n| (n, shapes(n))).collect();

    // Decision layer: every labelled tree, every subset.
    let mut trees = 0u64;
    let mut checks = 0u64;
    let mut mismatches = Vec::new();
    for (n, shape_list) in &all_shapes {
        let combos = 5usize.pow(*n as u32);
        for shape in shape_list {
            for code in 0..combos {
                let labels: Vec<usize> = (0..*n).map(|i| code / 5usize.pow(i as u32) % 5).collect();
                let node = label(shape, &labels, &attrs, &mut 0);
                let tree = AccessTree::new(node).unwrap();
                trees += 1;
                for held in &sets {
                    checks += 1;
                    let want = oracle_eval(tree.root(), held);
                    let got = satisfies(&tree, held);
                    let ok = match &got {
                        None => !want,
                        Some(a) => want && valid_witness(tree.root(), a, held, &mut 0),
                    };
                    if !ok && mismatches.len() < 5 {
                        mismatches.push(format!("`{tree}` with {{{held}}}"));
                    }
                }
            }
        }
    }
    if !mismatches.is_empty() {
        return Err(format!(
            "policy decision mismatches: {}",
            mismatches.join("; ")
        ));
    }

    // Cryptographic layer: full encrypt/decrypt for every shape and
    // threshold with distinct leaves, plus a fixed stride through the
    // labellings that repeat attributes.
    let mut rng = InsecureSeededRng::new(202);
    let (pk, mk) = setup(128, &mut rng).unwrap();
    let keys: Vec<Option<AttributeKey>> = sets
        .iter()
        .map(|s| (!s.is_empty()).then(|| keygen(&pk, &mk, s, window(), &mut rng).unwrap()))
        .collect();
    let mut crypto_trees: Vec<AccessTree> = Vec::new();
    let mut repeated_seen = 0usize;
    for (n, shape_list) in &all_shapes {
        let identity: Vec<usize> = (0..*n).collect();
        for shape in shape_list {
            crypto_trees.push(AccessTree::new(label(shape, &identity, &attrs, &mut 0)).unwrap());
            for code in 0..5usize.pow(*n as u32) {
                let labels: Vec<usize> = (0..*n).map(|i| code / 5usize.pow(i as u32) % 5).collect();
                let mut sorted = labels.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() == labels.len() {
                    continue;
                }
                repeated_seen += 1;
                if repeated_seen.is_multiple_of(4001) {
                    crypto_trees
                        .push(AccessTree::new(label(shape, &labels, &attrs, &mut 0)).unwrap());
                }
            }
        }
    }
    let mut decrypts = 0u64;
    for tree in &crypto_trees {
        let rec = encrypt(&pk, tree, b"soundness", &mut rng).unwrap();
        for (held, key) in sets.iter().zip(&keys) {
            let want = oracle_eval(tree.root(), held);
            let Some(key) = key else {
                if want {
                    mismatches.push(format!("`{tree}` satisfied by the empty set"));
                }
                continue;
            };
            decrypts += 1;
            match (want, decrypt(&pk, key, &rec, mid_window())) {
                (true, Ok(p)) if p == b"soundness" => {}
                (false, Err(Error::PolicyUnsatisfied)) => {}
                (_, other) => mismatches.push(format!(
                    "`{tree}` with {{{held}}}: expected {}, got {:?}",
                    if want {
                        "success"
                    } else {
                        "policy-unsatisfied"
                    },
                    other.map(|_| "plaintext")
                )),
            }
        }
    }
    if !mismatches.is_empty() {
        return Err(format!("decrypt mismatches: {}", mismatches.join("; ")));
    }
    Ok(format!(
        "{trees} labelled trees x 32 subsets = {checks} decisions agree with brute force; \
         {} trees / {decrypts} full decryptions agree; 0 mismatches in {:.0}s",
        crypto_trees.len(),
        started.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 3

fn pairing_identities() -> Outcome {
    const INSTANCES: usize = 100;
    let mut rng = InsecureSeededRng::new(303);
    let names = universe(8);
    let mut checked = 0;
    for setup_round in 0..10 {
        let (pk, mk, st) = setup_traced(128, &mut rng).unwrap();
        let egg = pair(&pk.descriptor.g1, &pk.descriptor.g2);
        for _ in 0..INSTANCES / 10 {
            let node = random_tree(&mut rng, &names, 6, 3);
            let tree = AccessTree::new(node).unwrap();
            let attrs = satisfying_set(&mut rng, tree.root(), &names, 1);
            let (key, kt) = keygen_traced(&pk, &mk, &attrs, window(), &mut rng).unwrap();
            let (rec, et) = encrypt_with(
                &pk,
                &tree,
                b"identity",
                RecordMeta::default(),
                &EnvelopeConfig::default(),
                &mut rng,
            )
            .unwrap();
            let dt = decrypt_traced(&pk, &key, &rec, mid_window()).map_err(|e| e.to_string())?;
            if dt.f_vk != egg.exp(&kt.r.mul(&et.vk_share)) {
                return Err(format!(
                    "F_vk identity failed (setup {setup_round}, `{tree}`)"
                ));
            }
            if dt.f_root != egg.exp(&kt.r.mul(&et.root_share)) {
                return Err(format!("policy-root identity failed (`{tree}`)"));
            }
            if dt.k_prime != egg.exp(&st.alpha.mul(&et.s)) || dt.k_prime != et.k {
                return Err(format!(
                    "K' identity failed (setup {setup_round}, `{tree}`)"
                ));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked}/{INSTANCES} instances: F_vk = e(g1,g2)^(r q_vk(0)) and K' = e(g1,g2)^(alpha s)"
    ))
}

// ---------------------------------------------------------------- 4

fn naive_eval(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = Scalar::ZERO;
    let mut power = Scalar::ONE;
    for c in coeffs {
        acc = acc.add(&c.mul(&power));
        power = power.mul(x);
    }
    acc
}

fn lagrange_reconstruction() -> Outcome {
    const INSTANCES: usize = 1000;
    let mut rng = InsecureSeededRng::new(404);
    for i in 0..INSTANCES {
        let degree = rng.gen_range(0..=4usize);
        let coeffs: Vec<Scalar> = (0..=degree).map(|_| Scalar::random(&mut rng)).collect();
        let poly = Polynomial::from_coefficients(coeffs.clone());
        let recovered = if i % 2 == 0 {
            let mut idx: Vec<u64> = (1..=12).collect();
            idx.shuffle(&mut rng);
            idx.truncate(degree + 1);
            let mut acc = Scalar::ZERO;
            for &j in &idx {
                let x = Scalar::from_u64(j);
                if poly.eval(&x) != naive_eval(&coeffs, &x) {
                    return Err(format!("evaluation mismatch at instance {i}"));
                }
                let delta = lagrange_coeff_u64(j, &idx).map_err(|e| e.to_string())?;
                acc = acc.add(&delta.mul(&naive_eval(&coeffs, &x)));
            }
            acc
        } else {
            let xs: Vec<Scalar> = (0..=degree).map(|_| Scalar::random(&mut rng)).collect();
            let mut acc = Scalar::ZERO;
            for x in &xs {
                let delta = lagrange_coeff(x, &xs).map_err(|e| e.to_string())?;
                acc = acc.add(&delta.mul(&naive_eval(&coeffs, x)));
            }
            acc
        };
        if recovered != coeffs[0] {
            return Err(format!(
                "instance {i} (degree {degree}) did not reconstruct q(0)"
            ));
        }
    }
    Ok(format!(
        "{INSTANCES}/{INSTANCES} reconstructions equal q(0)"
    ))
}

// ---------------------------------------------------------------- 5

fn key_size_law() -> Outcome {
    let mut rng = InsecureSeededRng::new(505);
    let (pk, mk) = setup(128, &mut rng).unwrap();
    for n in 1..=40usize {
        let attrs = AttributeSet::from_names(universe(n)).unwrap();
        let key = keygen(&pk, &mk, &attrs, window(), &mut rng).unwrap();
        let report = size_report(Sizable::Key(&key));
        let counted = 2 + 2 * key.components.len();
        if key.components.len() != n
            || report.source_elements() != 2 + 2 * n
            || key.source_element_count() != 2 + 2 * n
            || counted != 2 + 2 * n
            || report.target_elements != 0
        {
            return Err(format!(
                "|S| = {n}: report {} elements, key {}",
                report.source_elements(),
                key.source_element_count()
            ));
        }
        let reparsed = AttributeKey::from_bytes(&key.to_bytes()).unwrap();
        if reparsed.source_element_count() != 2 + 2 * n {
            return Err(format!(
                "|S| = {n}: reparsed key has the wrong element count"
            ));
        }
    }
    Ok("2 + 2|S| source-group elements for every |S| in 1..=40".into())
}

// ---------------------------------------------------------------- 6

fn tamper_detection() -> Outcome {
    let mut rng = InsecureSeededRng::new(606);
    let (pk, mk) = setup(128, &mut rng).unwrap();
    let names = universe(8);
    let (mut sig, mut env) = (0, 0);
    for r in 0..20 {
        let tree = AccessTree::new(random_tree(&mut rng, &names, 6, 3)).unwrap();
        let attrs = satisfying_set(&mut rng, tree.root(), &names, 1);
        let key = keygen(&pk, &mk, &attrs, window(), &mut rng).unwrap();
        let len = rng.gen_range(0..512);
        let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let bytes = encrypt(&pk, &tree, &payload, &mut rng).unwrap().to_bytes();
        if decrypt_bytes(&pk, &key, &bytes, mid_window()).map_err(|e| e.to_string())? != payload {
            return Err(format!("record {r} does not decrypt before mutation"));
        }
        for _ in 0..10 {
            let mut m = bytes.clone();
            let pos = rng.gen_range(0..m.len());
            m[pos] ^= rng.gen_range(1..=255u8);
            match decrypt_bytes(&pk, &key, &m, mid_window()) {
                Err(Error::SignatureInvalid) => sig += 1,
                Err(Error::EnvelopeAuthFailed) => env += 1,
                Ok(_) => return Err(format!("mutation at byte {pos} of record {r} decrypted")),
                Err(e) => return Err(format!("mutation at byte {pos} of record {r}: {e}")),
            }
        }
    }
    Ok(format!(
        "200/200 mutations rejected ({sig} signature-invalid, {env} envelope-auth-failed)"
    ))
}

// ---------------------------------------------------------------- 7

fn time_validity() -> Outcome {
    let mut rng = InsecureSeededRng::new(707);
    let (pk, mk) = setup(128, &mut rng).unwrap();
    let tree = AccessTree::new(Node::and(vec![
        Node::leaf("radiography").unwrap(),
        Node::leaf("doctorlevelA").unwrap(),
        Node::leaf("location").unwrap(),
    ]))
    .unwrap();
    let attrs = AttributeSet::from_names(["radiography", "doctorlevelA", "location"]).unwrap();
    let validity =
        ValiditySet::from_days([day(2020, 6, 20), day(2020, 6, 21), day(2020, 6, 22)]).unwrap();
    let key = keygen(&pk, &mk, &attrs, validity, &mut rng).unwrap();
    let rec = encrypt(&pk, &tree, b"x-ray", &mut rng).unwrap();

    if decrypt(&pk, &key, &rec, day(2020, 6, 21)).map_err(|e| e.to_string())? != b"x-ray" {
        return Err("wrong plaintext on 2020-06-21".into());
    }
    let before = pairing_count();
    let expired = decrypt(&pk, &key, &rec, day(2020, 6, 23));
    let used = pairing_count() - before;
    match expired {
        Err(Error::KeyExpired(d)) if d == day(2020, 6, 23) && used == 0 => {
            Ok("decrypts on 2020-06-21; key-expired on 2020-06-23 after 0 pairings".into())
        }
        other => Err(format!(
            "2020-06-23 gave {:?} after {used} pairings",
            other.map(|_| ())
        )),
    }
}

// ---------------------------------------------------------------- 8

fn bench_trend() -> Outcome {
    let ci = std::env::var_os("CI").is_some();
    let budget_ms = if ci { 400.0 } else { 100.0 };
    let cfg = BenchConfig {
        counts: (5..=40).step_by(5).collect(),
        reps: 9,
        shape: PolicyShape::AndChain,
        ..BenchConfig::default()
    };
    let rows = run_bench(&cfg).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut failed = false;
    for phase in ["keygen", "encrypt", "decrypt"] {
        let fit = phase_fit(&rows, phase).ok_or_else(|| format!("no fit for {phase}"))?;
        failed |= fit.r_squared < 0.95;
        parts.push(format!("{phase} R^2={:.4}", fit.r_squared));
    }
    let dec25 = rows
        .iter()
        .find(|r| r.phase == "decrypt" && r.attrs == 25)
        .ok_or("no decrypt row at 25 attributes")?
        .median_us
        / 1000.0;
    failed |= dec25 >= budget_ms;
    parts.push(format!(
        "decrypt@25 = {dec25:.1} ms (budget {budget_ms:.0} ms)"
    ));
    let text = parts.join(", ");
    if failed {
        Err(text)
    } else {
        Ok(text)
    }
}

// ---------------------------------------------------------------- 9

fn fog_equivalence() -> Outcome {
    const RECORDS: usize = 50;
    let mut rng = InsecureSeededRng::new(909);
    let (pk, mk): (PublicParams, MasterKey) = cpabe::setup(128, &mut rng).unwrap();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = DirStore::open(dir.path()).map_err(|e| e.to_string())?;
    let names = universe(10);
    let owner = Owner::new("patient");
    for i in 0..RECORDS {
        let tree = AccessTree::new(random_tree(&mut rng, &names, 8, 3)).unwrap();
        let user_key = keygen(
            &pk,
            &mk,
            &satisfying_set(&mut rng, tree.root(), &names, 2),
            window(),
            &mut rng,
        )
        .unwrap();
        let fog_key = keygen(
            &pk,
            &mk,
            &satisfying_set(&mut rng, tree.root(), &names, 2),
            window(),
            &mut rng,
        )
        .unwrap();
        let len = rng.gen_range(0..4096);
        let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let id = owner
            .publish(&store, &pk, &tree.to_string(), &payload, &mut rng)
            .map_err(|e| e.to_string())?;

        let direct = user_fetch_decrypt(&store, &pk, &id, &user_key, mid_window())
            .map_err(|e| e.to_string())?;
        let mut fog = FogNode::new(format!("fog-{i}"), fog_key);
        let session = UserSession::open(&mut rng);
        let delivery = fog
            .delegate_decrypt(&pk, &store, &session.request(id), mid_window())
            .map_err(|e| e.to_string())?;
        let delegated = session.accept(delivery).map_err(|e| e.to_string())?;
        if direct != delegated || direct != payload {
            return Err(format!(
                "record {i} (`{tree}`): fog output differs from direct output"
            ));
        }
    }
    let stored = store.ids().map_err(|e| e.to_string())?.len();
    Ok(format!(
        "{RECORDS}/{RECORDS} records byte-identical via fog and direct paths ({stored} in store)"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("round-trip completeness", round_trip_completeness),
        (
            "soundness vs brute-force oracle",
            soundness_oracle_equivalence,
        ),
        ("F_vk and K' pairing identities", pairing_identities),
        ("Lagrange reconstruction", lagrange_reconstruction),
        ("key size law 2 + 2|S|", key_size_law),
        ("tamper detection", tamper_detection),
        ("time validity", time_validity),
        ("benchmark linearity and latency", bench_trend),
        ("fog-path equivalence", fog_equivalence),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = (i + 1).to_string();
        let selected = filter.iter().any(|f| match f.parse::<usize>() {
            Ok(n) => n == i + 1,
            Err(_) => name.contains(f.as_str()),
        });
        if !filter.is_empty() && !selected {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {number}. {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {number}. {name}: {detail}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
