//! Data-parallel helpers.
//!
//! Every parallel entry point in the crate takes an [`Exec`] and routes its
//! inner loop through these helpers. Results are always returned in input
//! order, so the choice of executor never changes output. Without the
//! `parallel` feature both variants run sequentially.

use serde::{Deserialize, Serialize};
use std::ops::Range;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Ordered filter-map over a range, chunked so that huge ranges do not
    /// allocate one slot per index.
    pub fn filter_map_range<R, F>(self, range: Range<u64>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> Option<R> + Sync + Send,
    {
        const CHUNK: u64 = 4096;
        let start = range.start;
        let len = range.end.saturating_sub(range.start);
        let chunks = len.div_ceil(CHUNK) as usize;
        let per_chunk = |c: usize| -> Vec<R> {
            let lo = start + c as u64 * CHUNK;
            let hi = (lo + CHUNK).min(range.end);
            (lo..hi).filter_map(&f).collect()
        };
        self.map_range(0..chunks, per_chunk)
            .into_iter()
            .flatten()
            .collect()
    }
}
