// SPDX-License-Identifier: Apache-2.0

//! Attribute-count sweep over setup, keygen, encrypt and decrypt.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::cpabe::{self, AttributeKey, MasterKey, PublicParams, SealedRecord};
use crate::error::{Error, Result};
use crate::pairing::InsecureSeededRng;
use crate::policy::{AccessTree, AttributeSet, Node};
use crate::timeval::ValiditySet;

pub const CSV_HEADER: &str = "phase,attrs,median_us,mean_us,stddev_us,elements";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyShape {
    /// `a1 and a2 and ... and an`
    AndChain,
    /// `a1 or a2 or ... or an`
    OrChain,
    /// Leaves grouped into 2-of-3 gates, level by level.
    Balanced,
}

impl std::str::FromStr for PolicyShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "and" | "and-chain" => Ok(PolicyShape::AndChain),
            "or" | "or-chain" => Ok(PolicyShape::OrChain),
            "balanced" => Ok(PolicyShape::Balanced),
            other => Err(format!(
                "unknown policy shape {other:?} (and-chain, or-chain, balanced)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub counts: Vec<usize>,
    /// Timed repetitions per point, after one discarded warm-up.
    pub reps: usize,
    pub seed: u64,
    pub shape: PolicyShape,
    pub payload_bytes: usize,
    /// Measure the attribute counts concurrently. Faster, noisier.
    pub parallel: bool,
    pub output: Option<PathBuf>,
    /// Decrypt latency budget at [`BUDGET_ATTRS`] attributes.
    pub decrypt_budget_ms: f64,
}

pub const MIN_REPS: usize = 3;
pub const BUDGET_ATTRS: usize = 25;

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            counts: (5..=40).step_by(5).collect(),
            reps: 5,
            seed: 1,
            shape: PolicyShape::AndChain,
            payload_bytes: 1024,
            parallel: false,
            output: None,
            decrypt_budget_ms: 100.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub phase: &'static str,
    pub attrs: usize,
    pub median_us: f64,
    pub mean_us: f64,
    pub stddev_us: f64,
    /// Source-group elements in the phase's output object.
    pub elements: usize,
}

pub fn policy_for(shape: PolicyShape, n: usize) -> Result<AccessTree> {
    let leaves = (0..n)
        .map(|i| Node::leaf(&attr_name(i)))
        .collect::<Result<Vec<_>>>()?;
    let root = match shape {
        PolicyShape::AndChain if n == 1 => leaves.into_iter().next().unwrap(),
        PolicyShape::OrChain if n == 1 => leaves.into_iter().next().unwrap(),
        PolicyShape::AndChain => Node::and(leaves),
        PolicyShape::OrChain => Node::or(leaves),
        PolicyShape::Balanced => {
            let mut level = leaves;
            while level.len() > 1 {
                let mut next = Vec::with_capacity(level.len() / 3 + 1);
                let mut it = level.into_iter().peekable();
                while it.peek().is_some() {
                    let group: Vec<Node> = it.by_ref().take(3).collect();
                    next.push(match group.len() {
                        1 => group.into_iter().next().unwrap(),
                        k => Node::threshold(2.min(k), group),
                    });
                }
                level = next;
            }
            level.pop().expect("at least one attribute")
        }
    };
    AccessTree::new(root)
}

pub fn attr_name(i: usize) -> String {
    format!("attr{i:03}")
}

pub fn attribute_universe(n: usize) -> AttributeSet {
    AttributeSet::from_names((0..n).map(attr_name)).expect("generated names are valid")
}

fn bench_day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 6, 21).unwrap()
}

struct Stats {
    median: f64,
    mean: f64,
    stddev: f64,
}

fn stats(samples: &mut [f64]) -> Stats {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let median = if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    };
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Stats {
        median,
        mean,
        stddev: var.sqrt(),
    }
}

fn row(phase: &'static str, attrs: usize, s: Stats, elements: usize) -> BenchRow {
    BenchRow {
        phase,
        attrs,
        median_us: s.median,
        mean_us: s.mean,
        stddev_us: s.stddev,
        elements,
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.counts.is_empty() || self.counts.contains(&0) {
            return Err(Error::InvalidConfig(
                "attribute counts must be at least 1".into(),
            ));
        }
        if self.reps < MIN_REPS {
            return Err(Error::InvalidConfig(format!(
                "at least {MIN_REPS} repetitions are required, got {}",
                self.reps
            )));
        }
        Ok(())
    }
}

const PHASES: [&str; 4] = ["setup", "keygen", "encrypt", "decrypt"];

struct Point {
    n: usize,
    rng: InsecureSeededRng,
    attrs: AttributeSet,
    tree: AccessTree,
    payload: Vec<u8>,
    validity: ValiditySet,
    pk: PublicParams,
    mk: MasterKey,
    key: AttributeKey,
    rec: SealedRecord,
    samples: [Vec<f64>; 4],
}

impl Point {
    fn new(cfg: &BenchConfig, n: usize) -> Result<Point> {
        let mut rng =
            InsecureSeededRng::new(cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let attrs = attribute_universe(n);
        let tree = policy_for(cfg.shape, n)?;
        let payload = vec![0x5a; cfg.payload_bytes];
        let validity = ValiditySet::from_days([bench_day()])?;
        let (pk, mk) = cpabe::setup(128, &mut rng)?;
        let key = cpabe::keygen(&pk, &mk, &attrs, validity.clone(), &mut rng)?;
        let rec = cpabe::encrypt(&pk, &tree, &payload, &mut rng)?;
        Ok(Point {
            n,
            rng,
            attrs,
            tree,
            payload,
            validity,
            pk,
            mk,
            key,
            rec,
            samples: Default::default(),
        })
    }

    /// Times each phase once; samples are kept only when `record` is set.
    fn round(&mut self, record: bool) -> Result<()> {
        let lap = |i: usize, start: Instant, samples: &mut [Vec<f64>; 4]| {
            if record {
                samples[i].push(start.elapsed().as_secs_f64() * 1e6);
            }
        };
        let t = Instant::now();
        cpabe::setup(128, &mut self.rng)?;
        lap(0, t, &mut self.samples);

        let t = Instant::now();
        self.key = cpabe::keygen(
            &self.pk,
            &self.mk,
            &self.attrs,
            self.validity.clone(),
            &mut self.rng,
        )?;
        lap(1, t, &mut self.samples);

        let t = Instant::now();
        self.rec = cpabe::encrypt(&self.pk, &self.tree, &self.payload, &mut self.rng)?;
        lap(2, t, &mut self.samples);

        let t = Instant::now();
        cpabe::decrypt(&self.pk, &self.key, &self.rec, bench_day())?;
        lap(3, t, &mut self.samples);
        Ok(())
    }

    fn rows(mut self) -> Vec<BenchRow> {
        let elements = [
            4,
            self.key.source_element_count(),
            self.rec.source_element_count(),
            self.rec.source_element_count(),
        ];
        PHASES
            .iter()
            .zip(self.samples.iter_mut())
            .zip(elements)
            .map(|((phase, samples), e)| row(phase, self.n, stats(samples), e))
            .collect()
    }
}

fn bench_point(cfg: &BenchConfig, n: usize) -> Result<Vec<BenchRow>> {
    let mut point = Point::new(cfg, n)?;
    point.round(false)?;
    for _ in 0..cfg.reps {
        point.round(true)?;
    }
    Ok(point.rows())
}

// Every round visits every count, alternating direction, so slow periods on
// a shared machine land on all counts instead of a few.
fn interleaved(cfg: &BenchConfig) -> Result<Vec<Vec<BenchRow>>> {
    let mut points = cfg
        .counts
        .iter()
        .map(|&n| Point::new(cfg, n))
        .collect::<Result<Vec<_>>>()?;
    for round in 0..=cfg.reps {
        let record = round > 0;
        if round % 2 == 0 {
            for p in points.iter_mut() {
                p.round(record)?;
            }
        } else {
            for p in points.iter_mut().rev() {
                p.round(record)?;
            }
        }
    }
    Ok(points.into_iter().map(Point::rows).collect())
}

/// Runs the sweep. Rows are grouped by attribute count in `cfg.counts`
/// order; a CSV is written to `cfg.output` when set.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let per_point: Vec<Vec<BenchRow>> = if cfg.parallel {
        cfg.counts
            .par_iter()
            .map(|&n| bench_point(cfg, n))
            .collect::<Result<_>>()?
    } else {
        interleaved(cfg)?
    };
    let rows: Vec<BenchRow> = per_point.into_iter().flatten().collect();
    if let Some(path) = &cfg.output {
        write_csv(&rows, std::fs::File::create(path)?)?;
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.1},{:.1},{:.1},{}",
            r.phase, r.attrs, r.median_us, r.mean_us, r.stddev_us, r.elements
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares. `None` with fewer than two distinct x values.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BudgetCheck {
    pub attrs: usize,
    pub median_ms: f64,
    pub budget_ms: f64,
    pub within: bool,
}

/// Decrypt median at [`BUDGET_ATTRS`] attributes against the budget, or
/// `None` when that count was not measured.
pub fn decrypt_budget(rows: &[BenchRow], budget_ms: f64) -> Option<BudgetCheck> {
    let row = rows
        .iter()
        .find(|r| r.phase == "decrypt" && r.attrs == BUDGET_ATTRS)?;
    let median_ms = row.median_us / 1000.0;
    Some(BudgetCheck {
        attrs: BUDGET_ATTRS,
        median_ms,
        budget_ms,
        within: median_ms < budget_ms,
    })
}

/// Fit of median time against attribute count for one phase.
pub fn phase_fit(rows: &[BenchRow], phase: &str) -> Option<LinearFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.phase == phase)
        .map(|r| (r.attrs as f64, r.median_us))
        .collect();
    linear_fit(&pts)
}
