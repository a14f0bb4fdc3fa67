// SPDX-License-Identifier: Apache-2.0

//! In-process model of the health-record deployment: attribute authority,
//! record store, fog node, record owner and record user.
//!
//! Actors talk through [`Message`] values. The authority channel to the
//! store is assumed trusted; there is no network transport.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Mutex, RwLock};
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand_core::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cpabe::{
    self, AttributeKey, KeyTrace, MasterKey, PublicParams, RecordMeta, SealedRecord,
};
use crate::envelope::EnvelopeConfig;
use crate::error::{Error, Result};
use crate::policy::{parse_policy, AttributeSet};
use crate::timeval::ValiditySet;

/// SHA-256 of the serialized record.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordId([u8; 32]);

impl RecordId {
    pub fn of(bytes: &[u8]) -> RecordId {
        RecordId(Sha256::digest(bytes).into())
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RecordId({self})")
    }
}

impl FromStr for RecordId {
    type Err = Error;

    fn from_str(s: &str) -> Result<RecordId> {
        let raw = hex::decode(s.trim()).map_err(|_| Error::malformed("record id is not hex"))?;
        let arr: [u8; 32] = raw
            .try_into()
            .map_err(|_| Error::malformed("record id must be 32 bytes"))?;
        Ok(RecordId(arr))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SessionId(pub [u8; 16]);

impl SessionId {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        SessionId(id)
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

/// Every value that crosses an actor boundary. The master key is not
/// `Clone`, so no variant can hold one while this enum stays `Clone`.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Message {
    PublicParams(PublicParams),
    IssueRequest(IssueRequest),
    KeyIssued(AttributeKey),
    Publish(SealedRecord),
    Published(RecordId),
    Fetch(RecordId),
    Record(SealedRecord),
    Delegate(DelegationRequest),
    Delivered(SessionDelivery),
}

#[derive(Clone, Debug)]
pub struct IssueRequest {
    pub requester: String,
    /// Simulation flag standing in for out-of-band authorization.
    pub authorized: bool,
    pub attrs: AttributeSet,
    pub validity: ValiditySet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuedEntry {
    pub requester: String,
    pub attrs: Vec<String>,
    pub validity: String,
}

/// Attribute authority: holds the master key and the issuance registry.
pub struct Authority {
    pk: PublicParams,
    mk: MasterKey,
    registry: BTreeMap<String, IssuedEntry>,
}

impl Authority {
    pub fn setup<R: RngCore + CryptoRng + ?Sized>(security_bits: u32, rng: &mut R) -> Result<Self> {
        let (pk, mk) = cpabe::setup(security_bits, rng)?;
        Ok(Authority::from_keys(pk, mk))
    }

    pub fn from_keys(pk: PublicParams, mk: MasterKey) -> Self {
        Authority {
            pk,
            mk,
            registry: BTreeMap::new(),
        }
    }

    pub fn public_params(&self) -> &PublicParams {
        &self.pk
    }

    pub fn announce(&self) -> Message {
        Message::PublicParams(self.pk.clone())
    }

    pub fn registry(&self) -> &BTreeMap<String, IssuedEntry> {
        &self.registry
    }

    pub fn issue<R: RngCore + CryptoRng + ?Sized>(
        &mut self,
        req: &IssueRequest,
        rng: &mut R,
    ) -> Result<AttributeKey> {
        self.issue_traced(req, rng).map(|(k, _)| k)
    }

    pub fn issue_traced<R: RngCore + CryptoRng + ?Sized>(
        &mut self,
        req: &IssueRequest,
        rng: &mut R,
    ) -> Result<(AttributeKey, KeyTrace)> {
        if !req.authorized {
            return Err(Error::Unauthorized(format!(
                "{} is not authorized to receive keys",
                req.requester
            )));
        }
        let (key, trace) =
            cpabe::keygen_traced(&self.pk, &self.mk, &req.attrs, req.validity.clone(), rng)?;
        self.registry.insert(
            hex::encode(key.key_id),
            IssuedEntry {
                requester: req.requester.clone(),
                attrs: req.attrs.iter().map(|a| a.to_string()).collect(),
                validity: req.validity.to_string(),
            },
        );
        Ok((key, trace))
    }

    pub fn handle<R: RngCore + CryptoRng + ?Sized>(
        &mut self,
        msg: Message,
        rng: &mut R,
    ) -> Result<Message> {
        match msg {
            Message::IssueRequest(req) => self.issue(&req, rng).map(Message::KeyIssued),
            other => Err(Error::Unauthorized(format!(
                "authority does not handle {}",
                message_name(&other)
            ))),
        }
    }

    /// Writes `pk.bin`, `mk.bin` and `registry.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("pk.bin"), self.pk.to_bytes())?;
        fs::write(dir.join("mk.bin"), self.mk.to_bytes())?;
        let json = serde_json::to_vec_pretty(&self.registry)
            .map_err(|e| Error::malformed(e.to_string()))?;
        fs::write(dir.join("registry.json"), json)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let pk = PublicParams::from_bytes(&fs::read(dir.join("pk.bin"))?)?;
        let mk = MasterKey::from_bytes(&fs::read(dir.join("mk.bin"))?)?;
        let registry = match fs::read(dir.join("registry.json")) {
            Ok(raw) => serde_json::from_slice(&raw).map_err(|e| Error::malformed(e.to_string()))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Authority { pk, mk, registry })
    }
}

fn message_name(m: &Message) -> &'static str {
    match m {
        Message::PublicParams(_) => "PublicParams",
        Message::IssueRequest(_) => "IssueRequest",
        Message::KeyIssued(_) => "KeyIssued",
        Message::Publish(_) => "Publish",
        Message::Published(_) => "Published",
        Message::Fetch(_) => "Fetch",
        Message::Record(_) => "Record",
        Message::Delegate(_) => "Delegate",
        Message::Delivered(_) => "Delivered",
    }
}

/// Content-addressed ciphertext store. Only well-formed sealed records are
/// accepted, so plaintext never lands in it.
pub trait RecordStore: Send + Sync {
    fn put(&self, record_bytes: &[u8]) -> Result<RecordId>;
    fn get(&self, id: &RecordId) -> Result<Vec<u8>>;
    fn ids(&self) -> Result<Vec<RecordId>>;

    fn put_record(&self, rec: &SealedRecord) -> Result<RecordId> {
        self.put(&rec.to_bytes())
    }

    fn get_record(&self, id: &RecordId) -> Result<SealedRecord> {
        SealedRecord::from_bytes(&self.get(id)?)
    }
}

fn admit(record_bytes: &[u8]) -> Result<RecordId> {
    SealedRecord::verify_bytes(record_bytes)?;
    SealedRecord::from_bytes(record_bytes)?;
    Ok(RecordId::of(record_bytes))
}

#[derive(Default)]
pub struct MemoryStore {
    records: RwLock<BTreeMap<RecordId, Vec<u8>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        MemoryStore::default()
    }
}

impl RecordStore for MemoryStore {
    fn put(&self, record_bytes: &[u8]) -> Result<RecordId> {
        let id = admit(record_bytes)?;
        self.records
            .write()
            .expect("store lock poisoned")
            .entry(id)
            .or_insert_with(|| record_bytes.to_vec());
        Ok(id)
    }

    fn get(&self, id: &RecordId) -> Result<Vec<u8>> {
        self.records
            .read()
            .expect("store lock poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::RecordNotFound(id.to_string()))
    }

    fn ids(&self) -> Result<Vec<RecordId>> {
        Ok(self
            .records
            .read()
            .expect("store lock poisoned")
            .keys()
            .copied()
            .collect())
    }
}

/// One file per record at `<root>/<record-id-hex>`. `<root>/index` lists ids
/// as a cache; the directory listing is authoritative.
pub struct DirStore {
    root: PathBuf,
    index_lock: Mutex<()>,
}

const INDEX_FILE: &str = "index";

impl DirStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(DirStore {
            root,
            index_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_of(&self, id: &RecordId) -> PathBuf {
        self.root.join(id.to_string())
    }

    /// Rewrites the index from the directory contents.
    pub fn rebuild_index(&self) -> Result<Vec<RecordId>> {
        let _guard = self.index_lock.lock().expect("index lock poisoned");
        let ids = self.scan()?;
        let mut body = String::new();
        for id in &ids {
            body.push_str(&id.to_string());
            body.push('\n');
        }
        let tmp = self.root.join(format!(".{INDEX_FILE}.tmp"));
        fs::write(&tmp, body)?;
        fs::rename(tmp, self.root.join(INDEX_FILE))?;
        Ok(ids)
    }

    /// Ids listed in the index file, which may be stale.
    pub fn cached_ids(&self) -> Result<Vec<RecordId>> {
        match fs::read_to_string(self.root.join(INDEX_FILE)) {
            Ok(s) => s
                .lines()
                .filter(|l| !l.is_empty())
                .map(str::parse)
                .collect(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn scan(&self) -> Result<Vec<RecordId>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let name = entry?.file_name();
            if let Some(id) = name.to_str().and_then(|n| n.parse::<RecordId>().ok()) {
                ids.push(id);
            }
        }
        ids.sort();
        Ok(ids)
    }
}

impl RecordStore for DirStore {
    fn put(&self, record_bytes: &[u8]) -> Result<RecordId> {
        let id = admit(record_bytes)?;
        let path = self.path_of(&id);
        if !path.exists() {
            // Same id means same bytes, so racing writers are harmless; the
            // rename makes each write atomic.
            let mut nonce = [0u8; 8];
            rand::RngCore::fill_bytes(&mut rand::thread_rng(), &mut nonce);
            let tmp = self.root.join(format!(".{id}.{}.tmp", hex::encode(nonce)));
            let mut f = fs::File::create(&tmp)?;
            f.write_all(record_bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &path)?;
            let _guard = self.index_lock.lock().expect("index lock poisoned");
            let mut idx = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(self.root.join(INDEX_FILE))?;
            writeln!(idx, "{id}")?;
        }
        Ok(id)
    }

    fn get(&self, id: &RecordId) -> Result<Vec<u8>> {
        let bytes = match fs::read(self.path_of(id)) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::RecordNotFound(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        if RecordId::of(&bytes) != *id {
            return Err(Error::malformed(format!(
                "stored record {id} does not hash to its id"
            )));
        }
        Ok(bytes)
    }

    fn ids(&self) -> Result<Vec<RecordId>> {
        self.scan()
    }
}

/// Record owner (patient).
pub struct Owner {
    pub name: String,
}

impl Owner {
    pub fn new(name: impl Into<String>) -> Self {
        Owner { name: name.into() }
    }

    /// Parses the policy, encrypts and stores. Returns the record id.
    pub fn publish<R: RngCore + CryptoRng + ?Sized>(
        &self,
        store: &dyn RecordStore,
        pk: &PublicParams,
        policy: &str,
        payload: &[u8],
        rng: &mut R,
    ) -> Result<RecordId> {
        let tree = parse_policy(policy)?;
        let meta = RecordMeta {
            owner: self.name.clone(),
            created_at: chrono::Utc::now().timestamp(),
        };
        let (rec, _) =
            cpabe::encrypt_with(pk, &tree, payload, meta, &EnvelopeConfig::default(), rng)?;
        store.put_record(&rec)
    }
}

/// Direct path: the user fetches and decrypts with their own key.
pub fn user_fetch_decrypt(
    store: &dyn RecordStore,
    pk: &PublicParams,
    id: &RecordId,
    sk: &AttributeKey,
    now: NaiveDate,
) -> Result<Vec<u8>> {
    let bytes = store.get(id)?;
    cpabe::decrypt_bytes(pk, sk, &bytes, now)
}

/// A user's live session; delegated plaintext is only accepted by the
/// session that asked for it.
#[derive(Debug)]
pub struct UserSession {
    id: SessionId,
}

impl UserSession {
    pub fn open<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        UserSession {
            id: SessionId::random(rng),
        }
    }

    pub fn id(&self) -> SessionId {
        self.id
    }

    pub fn request(&self, record: RecordId) -> DelegationRequest {
        DelegationRequest {
            session: self.id,
            record,
        }
    }

    pub fn accept(&self, delivery: SessionDelivery) -> Result<Vec<u8>> {
        if delivery.session != self.id {
            return Err(Error::Unauthorized(format!(
                "delivery for session {} offered to session {}",
                delivery.session, self.id
            )));
        }
        Ok(delivery.payload)
    }
}

#[derive(Clone, Debug)]
pub struct DelegationRequest {
    pub session: SessionId,
    pub record: RecordId,
}

#[derive(Clone, Debug)]
pub struct SessionDelivery {
    pub session: SessionId,
    pub record: RecordId,
    pub payload: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct DelegationLog {
    pub session: SessionId,
    pub record: RecordId,
    pub elapsed: Duration,
    /// `None` on success, otherwise the error text.
    pub failure: Option<String>,
}

/// Fog node holding its own attribute key and decrypting for nearby users.
pub struct FogNode {
    pub name: String,
    key: AttributeKey,
    log: Vec<DelegationLog>,
}

impl FogNode {
    pub fn new(name: impl Into<String>, key: AttributeKey) -> Self {
        FogNode {
            name: name.into(),
            key,
            log: Vec::new(),
        }
    }

    pub fn attributes(&self) -> AttributeSet {
        self.key.attributes()
    }

    pub fn work_log(&self) -> &[DelegationLog] {
        &self.log
    }

    /// Decrypts on behalf of `req.session`. Every attempt is logged with its
    /// wall time.
    pub fn delegate_decrypt(
        &mut self,
        pk: &PublicParams,
        store: &dyn RecordStore,
        req: &DelegationRequest,
        now: NaiveDate,
    ) -> Result<SessionDelivery> {
        let start = Instant::now();
        let result = cpabe::check_key(pk, &self.key, now)
            .and_then(|_| user_fetch_decrypt(store, pk, &req.record, &self.key, now));
        self.log.push(DelegationLog {
            session: req.session,
            record: req.record,
            elapsed: start.elapsed(),
            failure: result.as_ref().err().map(|e| e.to_string()),
        });
        result.map(|payload| SessionDelivery {
            session: req.session,
            record: req.record,
            payload,
        })
    }

    /// `session,record,elapsed_us,outcome`
    pub fn write_log_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "session,record,elapsed_us,outcome")?;
        for l in &self.log {
            let outcome = l.failure.as_deref().unwrap_or("ok").replace(',', ";");
            writeln!(
                out,
                "{},{},{},{}",
                l.session,
                l.record,
                l.elapsed.as_micros(),
                outcome
            )?;
        }
        Ok(())
    }
}

/// Free-function form of [`FogNode::delegate_decrypt`].
pub fn fog_delegate_decrypt(
    fog: &mut FogNode,
    pk: &PublicParams,
    store: &dyn RecordStore,
    req: &DelegationRequest,
    now: NaiveDate,
) -> Result<SessionDelivery> {
    fog.delegate_decrypt(pk, store, req, now)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::InsecureSeededRng;

    fn day(s: &str) -> NaiveDate {
        crate::timeval::parse_date(s).unwrap()
    }

    fn request(names: &[&str]) -> IssueRequest {
        IssueRequest {
            requester: "tester".into(),
            authorized: true,
            attrs: AttributeSet::from_names(names).unwrap(),
            validity: "2020-06-20..2020-06-22".parse().unwrap(),
        }
    }

    fn assert_clone_send<T: Clone + Send + Sync>() {}

    #[test]
    fn messages_cannot_carry_master_key() {
        assert_clone_send::<Message>();
    }

    #[test]
    fn issue_updates_registry_and_rejects_bad_requests() {
        let mut rng = InsecureSeededRng::new(1);
        let mut aa = Authority::setup(128, &mut rng).unwrap();
        let req = request(&["radiography", "doctorlevelA", "location"]);
        let (k1, t1) = aa.issue_traced(&req, &mut rng).unwrap();
        let (k2, t2) = aa.issue_traced(&req, &mut rng).unwrap();
        assert_ne!(k1.key_id, k2.key_id);
        assert_ne!(t1.r, t2.r);
        assert_eq!(aa.registry().len(), 2);

        let mut empty = request(&["x"]);
        empty.attrs = AttributeSet::default();
        assert!(matches!(
            aa.issue(&empty, &mut rng),
            Err(Error::EmptyAttributes)
        ));
        let mut denied = request(&["x"]);
        denied.authorized = false;
        assert!(matches!(
            aa.issue(&denied, &mut rng),
            Err(Error::Unauthorized(_))
        ));
        assert_eq!(aa.registry().len(), 2);
    }

    #[test]
    fn authority_handles_issue_messages_only() {
        let mut rng = InsecureSeededRng::new(2);
        let mut aa = Authority::setup(128, &mut rng).unwrap();
        let reply = aa
            .handle(Message::IssueRequest(request(&["a"])), &mut rng)
            .unwrap();
        assert!(matches!(reply, Message::KeyIssued(_)));
        let id = RecordId::of(b"x");
        assert!(aa.handle(Message::Fetch(id), &mut rng).is_err());
    }

    #[test]
    fn authority_state_persists() {
        let mut rng = InsecureSeededRng::new(3);
        let dir = tempfile::tempdir().unwrap();
        let mut aa = Authority::setup(128, &mut rng).unwrap();
        aa.issue(&request(&["a"]), &mut rng).unwrap();
        aa.save(dir.path()).unwrap();
        let back = Authority::load(dir.path()).unwrap();
        assert_eq!(back.public_params(), aa.public_params());
        assert_eq!(back.registry(), aa.registry());
    }

    #[test]
    fn publish_fetch_is_byte_identical() {
        let mut rng = InsecureSeededRng::new(4);
        let aa = Authority::setup(128, &mut rng).unwrap();
        let store = MemoryStore::new();
        let owner = Owner::new("patient-1");
        let id = owner
            .publish(&store, aa.public_params(), "doctor", b"ecg", &mut rng)
            .unwrap();
        let bytes = store.get(&id).unwrap();
        assert_eq!(RecordId::of(&bytes), id);
        let rec = store.get_record(&id).unwrap();
        assert_eq!(rec.to_bytes(), bytes);
        assert_eq!(rec.meta.owner, "patient-1");
        let id2 = owner
            .publish(&store, aa.public_params(), "doctor", b"ecg", &mut rng)
            .unwrap();
        assert_ne!(id, id2);
    }

    #[test]
    fn store_rejects_non_records() {
        let store = MemoryStore::new();
        assert!(store.put(b"plain text medical data").is_err());
        assert!(store.ids().unwrap().is_empty());
    }

    #[test]
    fn dir_store_layout_and_index() {
        let mut rng = InsecureSeededRng::new(5);
        let aa = Authority::setup(128, &mut rng).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let store = DirStore::open(dir.path()).unwrap();
        let owner = Owner::new("p");
        let a = owner
            .publish(&store, aa.public_params(), "x", b"1", &mut rng)
            .unwrap();
        let b = owner
            .publish(&store, aa.public_params(), "y", b"2", &mut rng)
            .unwrap();
        assert!(dir.path().join(a.to_string()).is_file());
        let mut want = vec![a, b];
        want.sort();
        assert_eq!(store.ids().unwrap(), want);
        assert_eq!(store.cached_ids().unwrap().len(), 2);

        fs::remove_file(dir.path().join(INDEX_FILE)).unwrap();
        assert_eq!(store.rebuild_index().unwrap(), want);
        let mut cached = store.cached_ids().unwrap();
        cached.sort();
        assert_eq!(cached, want);

        // Re-putting the same bytes is idempotent.
        let bytes = store.get(&a).unwrap();
        assert_eq!(store.put(&bytes).unwrap(), a);
        assert_eq!(store.ids().unwrap().len(), 2);

        // Corrupted file no longer matches its id.
        let mut bad = bytes.clone();
        bad[10] ^= 1;
        fs::write(dir.path().join(a.to_string()), bad).unwrap();
        assert!(matches!(store.get(&a), Err(Error::Malformed(_))));
        assert!(matches!(
            store.get(&RecordId::of(b"missing")),
            Err(Error::RecordNotFound(_))
        ));
    }

    #[test]
    fn direct_and_fog_paths() {
        let mut rng = InsecureSeededRng::new(6);
        let mut aa = Authority::setup(128, &mut rng).unwrap();
        let pk = aa.public_params().clone();
        let store = MemoryStore::new();
        let policy = "radiography and doctorlevelA and location";
        let id = Owner::new("p")
            .publish(&store, &pk, policy, b"ct-scan", &mut rng)
            .unwrap();

        let doctor = aa
            .issue(
                &request(&["radiography", "doctorlevelA", "location"]),
                &mut rng,
            )
            .unwrap();
        let nurse = aa
            .issue(&request(&["pediatry", "nurselevelB", "location"]), &mut rng)
            .unwrap();
        let now = day("2020-06-21");
        assert_eq!(
            user_fetch_decrypt(&store, &pk, &id, &doctor, now).unwrap(),
            b"ct-scan"
        );
        assert!(matches!(
            user_fetch_decrypt(&store, &pk, &id, &nurse, now),
            Err(Error::PolicyUnsatisfied)
        ));
        assert!(matches!(
            user_fetch_decrypt(&store, &pk, &id, &doctor, day("2020-06-23")),
            Err(Error::KeyExpired(_))
        ));

        let mut fog_i = FogNode::new("fog-i", doctor.clone());
        let mut fog_j = FogNode::new("fog-j", nurse);
        let session = UserSession::open(&mut rng);
        let other = UserSession::open(&mut rng);
        let req = session.request(id);

        let delivery = fog_delegate_decrypt(&mut fog_i, &pk, &store, &req, now).unwrap();
        assert!(other.accept(delivery.clone()).is_err());
        assert_eq!(session.accept(delivery).unwrap(), b"ct-scan");
        assert!(matches!(
            fog_j.delegate_decrypt(&pk, &store, &req, now),
            Err(Error::PolicyUnsatisfied)
        ));
        assert!(matches!(
            fog_i.delegate_decrypt(&pk, &store, &req, day("2021-01-01")),
            Err(Error::KeyExpired(_))
        ));

        assert_eq!(fog_i.work_log().len(), 2);
        assert!(fog_i.work_log()[0].failure.is_none());
        assert!(fog_i.work_log()[0].elapsed > Duration::ZERO);
        let mut csv = Vec::new();
        fog_i.write_log_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("session,record,elapsed_us,outcome\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
