//! Parallel drivers. Work is split into independent jobs whose results are
//! collected in job order, so the output does not depend on thread count.

use hslab_core::certifier::{certify_case, inequality_case, CaseName, CertReport};
use hslab_core::variational::{
    smoke_chunk, smoke_finish, two_point_chunk, two_point_finish, McEstimate, McMoments, McQuotientSpec,
    SmokeInequality, SmokeReport, TestFunction,
};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{AppError, AppResult};

pub const THREADS_VAR: &str = "HSLAB_THREADS";

/// Worker cap from `HSLAB_THREADS`; `None` means one per logical core.
pub fn thread_cap() -> AppResult<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(AppError::Config(format!("{THREADS_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

pub fn pool(threads: Option<usize>) -> AppResult<ThreadPool> {
    let mut b = ThreadPoolBuilder::new();
    if let Some(k) = threads {
        b = b.num_threads(k);
    }
    Ok(b.build()?)
}

fn merged<const K: usize>(
    chunks: u64,
    job: impl Fn(u64) -> hslab_core::Result<McMoments<K>> + Sync + Send,
) -> hslab_core::Result<McMoments<K>> {
    let parts: Vec<McMoments<K>> = (0..chunks).into_par_iter().map(job).collect::<Result<_, _>>()?;
    let mut acc = McMoments::default();
    for part in &parts {
        acc.merge(part);
    }
    Ok(acc)
}

pub fn mc_two_point(p: f64, spec: &McQuotientSpec) -> hslab_core::Result<McEstimate> {
    let acc = merged(spec.chunks(), |c| two_point_chunk(p, spec, c))?;
    two_point_finish(p, spec, &acc)
}

pub fn smoke(name: SmokeInequality, f: &TestFunction, p: f64, spec: &McQuotientSpec) -> hslab_core::Result<SmokeReport> {
    let acc = merged(spec.chunks(), |c| smoke_chunk(name, f, p, spec, c))?;
    smoke_finish(name, p, spec, &acc)
}

/// Certify the named cases concurrently; reports come back sorted by id.
pub fn certify_many(names: &[CaseName]) -> Vec<(CaseName, hslab_core::Result<CertReport>)> {
    let mut out: Vec<_> = names
        .par_iter()
        .map(|&name| (name, inequality_case(name).and_then(|c| certify_case(&c))))
        .collect();
    out.sort_by_key(|(name, _)| name.id());
    out
}
