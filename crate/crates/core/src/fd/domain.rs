//! Finite integer domains stored as sorted lists of disjoint inclusive intervals.

use std::fmt;

/// A finite set of integers.
///
/// Intervals are inclusive, ascending, and separated by at least one missing
/// value, so two domains holding the same values always compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Domain {
    intervals: Vec<(i64, i64)>,
}

impl Domain {
    pub fn empty() -> Self {
        Domain { intervals: Vec::new() }
    }

    /// `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        if lo > hi {
            Domain::empty()
        } else {
            Domain { intervals: vec![(lo, hi)] }
        }
    }

    pub fn singleton(v: i64) -> Self {
        Domain::range(v, v)
    }

    /// Builds a domain from arbitrary (possibly overlapping, unsorted) intervals.
    pub fn from_intervals(iter: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut raw: Vec<(i64, i64)> = iter.into_iter().filter(|(l, h)| l <= h).collect();
        raw.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        Domain { intervals: out }
    }

    pub fn from_values(iter: impl IntoIterator<Item = i64>) -> Self {
        Domain::from_intervals(iter.into_iter().map(|v| (v, v)))
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of values, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        self.intervals.iter().map(|&(l, h)| (h as i128 - l as i128 + 1) as u128).sum::<u128>().min(u64::MAX as u128)
            as u64
    }

    pub fn min(&self) -> Option<i64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn max(&self) -> Option<i64> {
        self.intervals.last().map(|i| i.1)
    }

    pub fn is_fixed(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].0 == self.intervals[0].1
    }

    pub fn value(&self) -> Option<i64> {
        if self.is_fixed() {
            Some(self.intervals[0].0)
        } else {
            None
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        // binary search on interval lower bounds
        let idx = self.intervals.partition_point(|&(lo, _)| lo <= v);
        idx > 0 && self.intervals[idx - 1].1 >= v
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.intervals.iter().flat_map(|&(l, h)| l..=h)
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Domain { intervals: out }
    }

    pub fn is_disjoint(&self, other: &Domain) -> bool {
        self.intersect(other).is_empty()
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.intersect(other) == *self
    }

    pub fn remove(&self, v: i64) -> Domain {
        if !self.contains(v) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for &(lo, hi) in &self.intervals {
            if v < lo || v > hi {
                out.push((lo, hi));
                continue;
            }
            if lo < v {
                out.push((lo, v - 1));
            }
            if v < hi {
                out.push((v + 1, hi));
            }
        }
        Domain { intervals: out }
    }

    /// Removes every value in `lo..=hi`.
    pub fn remove_range(&self, lo: i64, hi: i64) -> Domain {
        if lo > hi {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for &(a, b) in &self.intervals {
            if b < lo || a > hi {
                out.push((a, b));
                continue;
            }
            if a < lo {
                out.push((a, lo - 1));
            }
            if b > hi {
                out.push((hi + 1, b));
            }
        }
        Domain { intervals: out }
    }

    pub fn restrict_min(&self, lo: i64) -> Domain {
        match self.min() {
            Some(m) if m < lo => self.remove_range(m, lo - 1),
            _ => self.clone(),
        }
    }

    pub fn restrict_max(&self, hi: i64) -> Domain {
        match self.max() {
            Some(m) if m > hi => self.remove_range(hi + 1, m),
            _ => self.clone(),
        }
    }

    /// Maps every value through `v -> sign * v + offset`.
    ///
    /// Returns `None` if any shifted bound overflows.
    pub fn affine(&self, sign: i64, offset: i64) -> Option<Domain> {
        debug_assert!(sign == 1 || sign == -1);
        let mut out = Vec::with_capacity(self.intervals.len());
        for &(lo, hi) in &self.intervals {
            let a = lo.checked_mul(sign)?.checked_add(offset)?;
            let b = hi.checked_mul(sign)?.checked_add(offset)?;
            out.push((a.min(b), a.max(b)));
        }
        if sign < 0 {
            out.reverse();
        }
        Some(Domain { intervals: out })
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (k, &(lo, hi)) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, "\\/")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        Ok(())
    }
}
