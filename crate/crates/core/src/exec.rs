//! Batch execution strategy.
//!
//! Batch workloads (grid sweeps, selection enumeration, random batteries)
//! are embarrassingly parallel: every item is an independent exact LP or
//! sign test. With the `parallel` feature they run on rayon's pool; without
//! it, [`Exec::Parallel`] quietly degrades to the sequential loop so callers
//! never need their own `cfg` switches.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread over threads.
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
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// `Ok(true)` iff `f` holds for every index; the first error wins in
    /// sequential mode, some error wins in parallel mode.
    pub fn try_all_range<E, F>(self, n: usize, f: F) -> Result<bool, E>
    where
        E: Send,
        F: Fn(usize) -> Result<bool, E> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n)
                .into_par_iter()
                .map(f)
                .try_fold(|| true, |acc, r| r.map(|b| acc && b))
                .try_reduce(|| true, |a, b| Ok(a && b));
        }
        for i in 0..n {
            if !f(i)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First index (lowest) for which `f` yields `Some`, so results do not
    /// depend on scheduling.
    pub fn try_find_first<T, E, F>(self, n: usize, f: F) -> Result<Option<(usize, T)>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<Option<T>, E> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            let found: Vec<Result<Option<T>, E>> = (0..n).into_par_iter().map(f).collect();
            for (i, r) in found.into_iter().enumerate() {
                if let Some(t) = r? {
                    return Ok(Some((i, t)));
                }
            }
            return Ok(None);
        }
        for i in 0..n {
            if let Some(t) = f(i)? {
                return Ok(Some((i, t)));
            }
        }
        Ok(None)
    }
}
