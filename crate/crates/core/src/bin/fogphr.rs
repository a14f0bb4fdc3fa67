// SPDX-License-Identifier: Apache-2.0

//! `fogphr` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 cryptographic failure,
//! 3 policy not satisfied, 4 key expired.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use rand::rngs::OsRng;
use serde_json::{json, Value};

use fogphr::actors::{
    user_fetch_decrypt, Authority, DirStore, FogNode, IssueRequest, Owner, RecordId, UserSession,
};
use fogphr::bench::{self, BenchConfig, PolicyShape};
use fogphr::cpabe::{self, AttributeKey, PublicParams, RecordMeta, SealedRecord};
use fogphr::envelope::EnvelopeConfig;
use fogphr::policy::{parse_policy, AttributeSet};
use fogphr::size::{size_report, Sizable};
use fogphr::timeval::{parse_date, ValiditySet};
use fogphr::Error;

#[derive(Parser)]
#[command(
    name = "fogphr",
    version,
    about = "Attribute-based encryption for health records"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Create an authority directory holding pk.bin, mk.bin and registry.json.
    Setup {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 128)]
        security: u32,
    },
    /// Issue an attribute key from an authority directory.
    Keygen {
        #[arg(long)]
        authority: PathBuf,
        /// Comma-separated attribute names.
        #[arg(long)]
        attrs: String,
        /// Days or ranges, e.g. `2020-06-20..2020-06-22,2020-07-01`.
        #[arg(long)]
        validity: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "cli")]
        requester: String,
    },
    /// Encrypt a file under a policy.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        owner: String,
    },
    /// Decrypt a sealed record.
    Decrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Evaluation date, defaults to today.
        #[arg(long)]
        now: Option<String>,
    },
    /// Encrypt a file and put it in a directory store.
    Publish {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "")]
        owner: String,
    },
    /// Fetch a record from a store and decrypt it with your own key.
    Fetch {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        now: Option<String>,
    },
    /// Have a fog node decrypt a stored record for a user session.
    Delegate {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        id: String,
        /// The fog node's attribute key.
        #[arg(long)]
        fog_key: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        now: Option<String>,
        /// Append the fog work log as CSV.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Element and byte breakdown of keys and records.
    Sizes {
        #[arg(long)]
        pk: Option<PathBuf>,
        #[arg(long)]
        mk: Option<PathBuf>,
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
        /// With no files given, report on freshly generated objects with
        /// this many attributes.
        #[arg(long, default_value_t = 10)]
        attrs: usize,
    },
    /// Time every phase across a sweep of attribute counts.
    Bench {
        /// Comma-separated attribute counts.
        #[arg(long, default_value = "5,10,15,20,25,30,35,40")]
        counts: String,
        /// Timed repetitions per point, at least 3.
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// and-chain, or-chain or balanced.
        #[arg(long, default_value = "and-chain")]
        shape: PolicyShape,
        /// Spread attribute counts across threads.
        #[arg(long)]
        parallel: bool,
        /// Also write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Decrypt latency budget at 25 attributes, reported alongside
        /// the table.
        #[arg(long, default_value_t = 100.0)]
        budget_ms: f64,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) => match e {
                Error::PolicyUnsatisfied => 3,
                Error::KeyExpired(_) => 4,
                Error::Io(_)
                | Error::Policy(_)
                | Error::EmptyAttributes
                | Error::DuplicateAttribute(_)
                | Error::InvalidAttribute(_)
                | Error::InvalidValidity(_)
                | Error::UnsupportedSecurityLevel(_)
                | Error::RecordNotFound(_)
                | Error::InvalidConfig(_)
                | Error::PayloadTooLarge { .. } => 1,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type CliResult = Result<(String, Value), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_pk(path: &Path) -> Result<PublicParams, Failure> {
    Ok(PublicParams::from_bytes(&read(path)?)?)
}

fn load_key(path: &Path) -> Result<AttributeKey, Failure> {
    Ok(AttributeKey::from_bytes(&read(path)?)?)
}

fn today_or(now: Option<&str>) -> Result<NaiveDate, Failure> {
    match now {
        Some(s) => Ok(parse_date(s)?),
        None => Ok(chrono::Local::now().date_naive()),
    }
}

fn record_id(s: &str) -> Result<RecordId, Failure> {
    s.parse()
        .map_err(|_| Failure::Usage(format!("bad record id {s:?}")))
}

fn run(cmd: Cmd) -> CliResult {
    let mut rng = OsRng;
    match cmd {
        Cmd::Setup { out, security } => {
            let aa = Authority::setup(security, &mut rng)?;
            aa.save(&out)?;
            Ok((
                format!("authority written to {}", out.display()),
                json!({ "authority": out, "security_bits": security }),
            ))
        }
        Cmd::Keygen {
            authority,
            attrs,
            validity,
            out,
            requester,
        } => {
            let mut aa = Authority::load(&authority)?;
            let req = IssueRequest {
                requester,
                authorized: true,
                attrs: AttributeSet::parse_list(&attrs)?,
                validity: validity.parse::<ValiditySet>()?,
            };
            let key = aa.issue(&req, &mut rng)?;
            aa.save(&authority)?;
            write(&out, &key.to_bytes())?;
            let id = hex::encode(key.key_id);
            Ok((
                format!(
                    "key {id} for {} written to {}",
                    key.attributes(),
                    out.display()
                ),
                json!({
                    "key_id": id,
                    "attributes": key.attributes().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "validity": key.validity.to_string(),
                    "out": out,
                }),
            ))
        }
        Cmd::Encrypt {
            pk,
            policy,
            input,
            out,
            owner,
        } => {
            let pk = load_pk(&pk)?;
            let tree = parse_policy(&policy).map_err(Error::from)?;
            let payload = read(&input)?;
            let meta = RecordMeta {
                owner,
                created_at: chrono::Utc::now().timestamp(),
            };
            let (rec, _) = cpabe::encrypt_with(
                &pk,
                &tree,
                &payload,
                meta,
                &EnvelopeConfig::default(),
                &mut rng,
            )?;
            let bytes = rec.to_bytes();
            write(&out, &bytes)?;
            Ok((
                format!("{} bytes sealed under `{}`", payload.len(), rec.tree),
                json!({ "policy": rec.tree.to_string(), "record_bytes": bytes.len(), "out": out }),
            ))
        }
        Cmd::Decrypt {
            pk,
            key,
            input,
            out,
            now,
        } => {
            let pk = load_pk(&pk)?;
            let key = load_key(&key)?;
            let now = today_or(now.as_deref())?;
            let plain = cpabe::decrypt_bytes(&pk, &key, &read(&input)?, now)?;
            write(&out, &plain)?;
            Ok((
                format!("{} bytes recovered", plain.len()),
                json!({ "bytes": plain.len(), "out": out }),
            ))
        }
        Cmd::Publish {
            pk,
            store,
            policy,
            input,
            owner,
        } => {
            let pk = load_pk(&pk)?;
            let store = DirStore::open(store)?;
            let id = Owner::new(owner).publish(&store, &pk, &policy, &read(&input)?, &mut rng)?;
            Ok((id.to_string(), json!({ "id": id.to_string() })))
        }
        Cmd::Fetch {
            pk,
            store,
            id,
            key,
            out,
            now,
        } => {
            let pk = load_pk(&pk)?;
            let key = load_key(&key)?;
            let store = DirStore::open(store)?;
            let id = record_id(&id)?;
            let plain = user_fetch_decrypt(&store, &pk, &id, &key, today_or(now.as_deref())?)?;
            write(&out, &plain)?;
            Ok((
                format!("{} bytes recovered from {id}", plain.len()),
                json!({ "id": id.to_string(), "bytes": plain.len(), "out": out }),
            ))
        }
        Cmd::Delegate {
            pk,
            store,
            id,
            fog_key,
            out,
            now,
            log,
        } => {
            let pk = load_pk(&pk)?;
            let store = DirStore::open(store)?;
            let id = record_id(&id)?;
            let mut fog = FogNode::new("fog", load_key(&fog_key)?);
            let session = UserSession::open(&mut rng);
            let result =
                fog.delegate_decrypt(&pk, &store, &session.request(id), today_or(now.as_deref())?);
            if let Some(path) = log {
                let mut buf = Vec::new();
                fog.write_log_csv(&mut buf)?;
                write(&path, &buf)?;
            }
            let plain = session.accept(result?)?;
            write(&out, &plain)?;
            let elapsed = fog.work_log()[0].elapsed.as_micros();
            Ok((
                format!(
                    "{} bytes delivered to session {} in {elapsed} us",
                    plain.len(),
                    session.id()
                ),
                json!({
                    "id": id.to_string(),
                    "session": session.id().to_string(),
                    "bytes": plain.len(),
                    "elapsed_us": elapsed as u64,
                    "out": out,
                }),
            ))
        }
        Cmd::Sizes {
            pk,
            mk,
            key,
            record,
            attrs,
        } => {
            let mut reports = Vec::new();
            if pk.is_none() && mk.is_none() && key.is_none() && record.is_none() {
                if attrs == 0 {
                    return Err(Failure::Usage("--attrs must be at least 1".into()));
                }
                let (p, m) = cpabe::setup(128, &mut rng)?;
                let set = bench::attribute_universe(attrs);
                let today = chrono::Local::now().date_naive();
                let k = cpabe::keygen(&p, &m, &set, ValiditySet::from_days([today])?, &mut rng)?;
                let tree = bench::policy_for(PolicyShape::AndChain, attrs)?;
                let r = cpabe::encrypt(&p, &tree, b"", &mut rng)?;
                reports.push(size_report(Sizable::Public(&p)));
                reports.push(size_report(Sizable::Master(&m)));
                reports.push(size_report(Sizable::Key(&k)));
                reports.push(size_report(Sizable::Record(&r)));
            } else {
                if let Some(p) = pk {
                    reports.push(size_report(Sizable::Public(&load_pk(&p)?)));
                }
                if let Some(m) = mk {
                    let m = fogphr::cpabe::MasterKey::from_bytes(&read(&m)?)?;
                    reports.push(size_report(Sizable::Master(&m)));
                }
                if let Some(k) = key {
                    reports.push(size_report(Sizable::Key(&load_key(&k)?)));
                }
                if let Some(r) = record {
                    let r = SealedRecord::from_bytes(&read(&r)?)?;
                    reports.push(size_report(Sizable::Record(&r)));
                }
            }
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "{}: {} G1, {} G2, {} GT, {} scalars, {} aux bytes, {} bytes\n",
                    r.object,
                    r.g1_elements,
                    r.g2_elements,
                    r.target_elements,
                    r.scalars,
                    r.aux_bytes,
                    r.total_bytes
                ));
                for c in &r.components {
                    text.push_str(&format!(
                        "  {:<20} {:>4} x {:?} = {} bytes\n",
                        c.name, c.count, c.kind, c.bytes
                    ));
                }
                if let Some(n) = &r.note {
                    text.push_str(&format!("  note: {n}\n"));
                }
            }
            let value =
                serde_json::to_value(&reports).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok((text.trim_end().to_string(), value))
        }
        Cmd::Bench {
            counts,
            reps,
            seed,
            shape,
            parallel,
            out,
            budget_ms,
        } => {
            let counts = counts
                .split(',')
                .map(|c| c.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("bad --counts: {e}")))?;
            if counts.contains(&0) || counts.is_empty() {
                return Err(Failure::Usage("attribute counts must be positive".into()));
            }
            let cfg = BenchConfig {
                counts,
                reps,
                seed,
                shape,
                parallel,
                output: out,
                decrypt_budget_ms: budget_ms,
                ..BenchConfig::default()
            };
            let rows = bench::run_bench(&cfg)?;
            let mut csv = Vec::new();
            bench::write_csv(&rows, &mut csv)?;
            let fits: Vec<Value> = ["setup", "keygen", "encrypt", "decrypt"]
                .iter()
                .filter_map(|p| bench::phase_fit(&rows, p).map(|f| json!({ "phase": p, "fit": f })))
                .collect();
            let budget = bench::decrypt_budget(&rows, cfg.decrypt_budget_ms);
            let mut text = String::from_utf8_lossy(&csv).trim_end().to_string();
            if let Some(b) = &budget {
                text.push_str(&format!(
                    "\n# decrypt@{}: {:.1} ms (budget {:.1} ms, {})",
                    b.attrs,
                    b.median_ms,
                    b.budget_ms,
                    if b.within { "within" } else { "over" }
                ));
            }
            Ok((
                text,
                json!({ "rows": rows, "fits": fits, "decrypt_budget": budget }),
            ))
        }
    }
}

// Ignores a closed stdout, e.g. when piped into `head`.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli.cmd) {
        Ok((text, value)) => {
            if json {
                emit(&json!({ "ok": true, "result": value }).to_string());
            } else {
                emit(&text);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let code = f.code();
            if json {
                emit(&json!({ "ok": false, "error": f.message(), "exit_code": code }).to_string());
            } else {
                eprintln!("fogphr: {}", f.message());
            }
            ExitCode::from(code)
        }
    }
}
