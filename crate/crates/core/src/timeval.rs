// SPDX-License-Identifier: Apache-2.0

//! Key validity windows at calendar-day granularity.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// Inclusive day range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DayRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DayRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<DayRange> {
        if end < start {
            return Err(Error::InvalidValidity(format!("{end} precedes {start}")));
        }
        Ok(DayRange { start, end })
    }

    pub fn day(d: NaiveDate) -> DayRange {
        DayRange { start: d, end: d }
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

/// Minimum cover of the days a key may be used on: sorted, pairwise disjoint
/// and non-adjacent ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValiditySet {
    ranges: Vec<DayRange>,
}

impl ValiditySet {
    /// Merges overlapping and adjacent ranges into the minimum cover.
    pub fn from_ranges(mut ranges: Vec<DayRange>) -> Result<ValiditySet> {
        if ranges.is_empty() {
            return Err(Error::InvalidValidity("no validity period given".into()));
        }
        ranges.sort();
        let mut merged: Vec<DayRange> = Vec::with_capacity(ranges.len());
        for r in ranges {
            match merged.last_mut() {
                Some(last) if last.end.succ_opt().is_none_or(|n| r.start <= n) => {
                    last.end = last.end.max(r.end);
                }
                _ => merged.push(r),
            }
        }
        Ok(ValiditySet { ranges: merged })
    }

    pub fn from_days<I: IntoIterator<Item = NaiveDate>>(days: I) -> Result<ValiditySet> {
        ValiditySet::from_ranges(days.into_iter().map(DayRange::day).collect())
    }

    pub fn ranges(&self) -> &[DayRange] {
        &self.ranges
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        // ranges are sorted; binary search on start
        let idx = self.ranges.partition_point(|r| r.start <= d);
        idx > 0 && self.ranges[idx - 1].contains(d)
    }

    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.len(self.ranges.len());
        for r in &self.ranges {
            w.i64(day_number(r.start));
            w.i64(day_number(r.end));
        }
    }

    /// Rejects anything that is not already a minimum cover.
    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<ValiditySet> {
        let n = r.u32()? as usize;
        if n == 0 || n > r.remaining() / 16 {
            return Err(Error::malformed("bad validity range count"));
        }
        let mut ranges = Vec::with_capacity(n);
        for _ in 0..n {
            let start = from_day_number(r.i64()?)?;
            let end = from_day_number(r.i64()?)?;
            ranges.push(DayRange::new(start, end)?);
        }
        let set = ValiditySet::from_ranges(ranges.clone())?;
        if set.ranges != ranges {
            return Err(Error::malformed("validity ranges are not a minimum cover"));
        }
        Ok(set)
    }
}

fn day_number(d: NaiveDate) -> i64 {
    i64::from(d.num_days_from_ce())
}

fn from_day_number(n: i64) -> Result<NaiveDate> {
    i32::try_from(n)
        .ok()
        .and_then(NaiveDate::from_num_days_from_ce_opt)
        .ok_or_else(|| Error::malformed("date out of range"))
}

pub fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| Error::InvalidValidity(format!("bad date {s:?}: {e}")))
}

/// `2020-06-20..2020-06-22,2020-07-01`
impl FromStr for ValiditySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<ValiditySet> {
        let mut ranges = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let range = match part.split_once("..") {
                Some((a, b)) => DayRange::new(parse_date(a)?, parse_date(b)?)?,
                None => DayRange::day(parse_date(part)?),
            };
            ranges.push(range);
        }
        ValiditySet::from_ranges(ranges)
    }
}

impl fmt::Display for ValiditySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.ranges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if r.start == r.end {
                write!(f, "{}", r.start)?;
            } else {
                write!(f, "{}..{}", r.start, r.end)?;
            }
        }
        Ok(())
    }
}
