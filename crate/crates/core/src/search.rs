//! Budgeted, deterministic parallel search over ordered branches.
//!
//! Each branch reports the nodes it visited. Outcomes are merged in
//! branch order and the budget is charged against the running prefix
//! sum, so the answer does not depend on how many workers ran.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

/// Node budget and worker count for exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: u64,
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: crate::DEFAULT_BUDGET, jobs: 1 }
    }
}

impl SearchConfig {
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

pub(crate) enum BranchEnd<R> {
    Found(R),
    Exhausted,
    Stopped,
}

/// Shared view a branch uses to charge nodes and to learn that its
/// result can no longer matter.
pub(crate) struct Meter<'a> {
    index: usize,
    counts: &'a [AtomicU64],
    winner: &'a AtomicUsize,
    budget: u64,
    local: u64,
    flushed: u64,
}

impl Meter<'_> {
    /// Charges one node; returns `false` once the branch should stop.
    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local - self.flushed >= 1024 {
            return self.flush();
        }
        self.local <= self.budget
    }

    fn flush(&mut self) -> bool {
        self.counts[self.index].store(self.local, Ordering::Relaxed);
        self.flushed = self.local;
        if self.winner.load(Ordering::Relaxed) < self.index {
            return false;
        }
        let prefix: u64 = self.counts[..=self.index].iter().map(|c| c.load(Ordering::Relaxed)).sum();
        prefix <= self.budget
    }

}

#[allow(dead_code)]
pub(crate) enum Merged<R> {
    Found(R, u64),
    Exhausted(u64),
    Limit(u64),
}

/// Runs `branch(i, meter)` for each `i < n` and returns the first found
/// result in branch order, charging nodes of all earlier branches.
pub(crate) fn first_in_order<R, F>(n: usize, cfg: SearchConfig, branch: F) -> Merged<R>
where
    R: Send,
    F: Fn(usize, &mut Meter) -> BranchEnd<R> + Sync,
{
    let counts: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    let winner = AtomicUsize::new(usize::MAX);
    let run = |i: usize| {
        let mut m = Meter { index: i, counts: &counts, winner: &winner, budget: cfg.budget, local: 0, flushed: 0 };
        if winner.load(Ordering::Relaxed) < i {
            return (BranchEnd::Stopped, 0);
        }
        let end = branch(i, &mut m);
        counts[i].store(m.local, Ordering::Relaxed);
        if matches!(end, BranchEnd::Found(_)) {
            winner.fetch_min(i, Ordering::Relaxed);
        }
        (end, m.local)
    };
    let results: Vec<(BranchEnd<R>, u64)> = if cfg.jobs <= 1 || n <= 1 {
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let r = run(i);
            let stop = !matches!(r.0, BranchEnd::Exhausted);
            v.push(r);
            if stop {
                break;
            }
        }
        v
    } else {
        pool(cfg.jobs).install(|| (0..n).into_par_iter().map(run).collect())
    };
    let mut total = 0u64;
    for (end, nodes) in results {
        total += nodes;
        if total > cfg.budget {
            return Merged::Limit(total);
        }
        match end {
            BranchEnd::Found(r) => return Merged::Found(r, total),
            BranchEnd::Exhausted => {}
            BranchEnd::Stopped => return Merged::Limit(total.max(cfg.budget + 1)),
        }
    }
    Merged::Exhausted(total)
}

/// Runs every branch to completion and concatenates results in branch
/// order.
pub(crate) fn collect_in_order<R, F>(n: usize, cfg: SearchConfig, branch: F) -> Result<Vec<R>, u64>
where
    R: Send,
    F: Fn(usize, &mut Meter) -> Option<Vec<R>> + Sync,
{
    let counts: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    let winner = AtomicUsize::new(usize::MAX);
    let run = |i: usize| {
        let mut m = Meter { index: i, counts: &counts, winner: &winner, budget: cfg.budget, local: 0, flushed: 0 };
        let r = branch(i, &mut m);
        counts[i].store(m.local, Ordering::Relaxed);
        (r, m.local)
    };
    let results: Vec<(Option<Vec<R>>, u64)> = if cfg.jobs <= 1 || n <= 1 {
        (0..n).map(run).collect()
    } else {
        pool(cfg.jobs).install(|| (0..n).into_par_iter().map(run).collect())
    };
    let mut total = 0u64;
    let mut out = Vec::new();
    for (r, nodes) in results {
        total += nodes;
        match r {
            Some(v) if total <= cfg.budget => out.extend(v),
            _ => return Err(total.max(cfg.budget + 1)),
        }
    }
    Ok(out)
}

pub(crate) fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}
