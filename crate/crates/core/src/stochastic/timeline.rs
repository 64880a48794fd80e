use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous piecewise-constant schedule over `[0, horizon)`.
///
/// Segment `k` covers `[starts[k], starts[k+1])`; the first segment always
/// starts at slot 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timeline<T> {
    starts: Vec<u64>,
    values: Vec<T>,
    horizon: u64,
}

impl<T> Timeline<T> {
    pub fn constant(value: T, horizon: u64) -> Self {
        Self {
            starts: vec![0],
            values: vec![value],
            horizon,
        }
    }

    pub fn new(segments: Vec<(u64, T)>, horizon: u64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::config("timeline needs at least one segment"));
        }
        if segments[0].0 != 0 {
            return Err(Error::config("first timeline segment must start at slot 0"));
        }
        if segments.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::config("timeline breakpoints must be strictly ascending"));
        }
        if segments.last().unwrap().0 >= horizon {
            return Err(Error::config("timeline breakpoint beyond horizon"));
        }
        let (starts, values) = segments.into_iter().unzip();
        Ok(Self {
            starts,
            values,
            horizon,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn segment_index(&self, t: u64) -> Result<usize> {
        if t >= self.horizon {
            return Err(Error::Range {
                slot: t,
                horizon: self.horizon,
            });
        }
        Ok(self.starts.partition_point(|&s| s <= t) - 1)
    }

    pub fn value(&self, t: u64) -> Result<&T> {
        self.segment_index(t).map(|k| &self.values[k])
    }

    /// `(start, end_exclusive, value)` for every segment.
    pub fn segments(&self) -> impl Iterator<Item = (u64, u64, &T)> + '_ {
        self.values.iter().enumerate().map(move |(k, v)| {
            let end = self.starts.get(k + 1).copied().unwrap_or(self.horizon);
            (self.starts[k], end, v)
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<Timeline<U>> {
        Ok(Timeline {
            starts: self.starts.clone(),
            values: self.values.iter().map(&mut f).collect::<Result<_>>()?,
            horizon: self.horizon,
        })
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Timeline<U> {
        Timeline {
            starts: self.starts.clone(),
            values: self.values.iter().map(f).collect(),
            horizon: self.horizon,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_segment() {
        let tl = Timeline::constant(7, 100);
        assert_eq!(*tl.value(0).unwrap(), 7);
        assert_eq!(*tl.value(99).unwrap(), 7);
        assert!(matches!(tl.value(100), Err(Error::Range { .. })));
    }

    #[test]
    fn switch_at_breakpoint() {
        let tl = Timeline::new(vec![(0, "pre"), (150_000, "post")], 300_000).unwrap();
        assert_eq!(*tl.value(149_999).unwrap(), "pre");
        assert_eq!(*tl.value(150_000).unwrap(), "post");
    }

    #[test]
    fn middle_segment() {
        let tl = Timeline::new(vec![(0, 'a'), (10, 'b'), (20, 'c')], 30).unwrap();
        assert_eq!(*tl.value(15).unwrap(), 'b');
        assert_eq!(*tl.value(9).unwrap(), 'a');
        assert_eq!(*tl.value(20).unwrap(), 'c');
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(Timeline::new(vec![(1, 0)], 10).is_err());
        assert!(Timeline::new(vec![(0, 0), (5, 1), (5, 2)], 10).is_err());
        assert!(Timeline::new(vec![(0, 0), (10, 1)], 10).is_err());
        assert!(Timeline::<u8>::new(vec![], 10).is_err());
    }

    proptest! {
        #[test]
        fn lookup_is_piecewise_constant(mut cuts in proptest::collection::btree_set(1u64..999, 0..8), t in 0u64..1000) {
            cuts.insert(0);
            let segments: Vec<(u64, usize)> = cuts.iter().enumerate().map(|(k, &s)| (s, k)).collect();
            let tl = Timeline::new(segments.clone(), 1000).unwrap();
            let expected = segments.iter().rev().find(|(s, _)| *s <= t).unwrap().1;
            prop_assert_eq!(*tl.value(t).unwrap(), expected);
        }
    }
}
