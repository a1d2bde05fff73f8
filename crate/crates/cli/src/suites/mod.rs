//! Verification suites. Each suite fills a [`SuiteRecord`]; a failed
//! precondition ends that suite with an error entry instead of aborting the
//! run.

pub mod algebra;
pub mod geometry;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::SuiteRecord;

type SuiteFn = fn(&RunConfig, &mut SuiteRecord) -> instanton_core::Result<()>;

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "calabi" => geometry::calabi,
        "semiflat" => geometry::semiflat,
        "rotation" => geometry::rotation,
        "slag" => geometry::slag,
        "monodromy" => geometry::monodromy_suite,
        "lattice" => algebra::lattice,
        "torelli" => algebra::torelli,
        _ => return None,
    })
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> SuiteRecord {
    let Some(f) = suite_fn(name) else {
        return SuiteRecord::failed(SuiteRecord::default(), format!("unknown suite {name:?}"));
    };
    let mut rec = SuiteRecord::default();
    match f(cfg, &mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => SuiteRecord::failed(rec, e.to_string()),
    }
}

/// Runs the named suites concurrently; the map orders them by name.
pub fn run_suites(names: &[&str], cfg: &RunConfig) -> BTreeMap<String, SuiteRecord> {
    names.par_iter().map(|n| (n.to_string(), run_suite(n, cfg))).collect::<Vec<_>>().into_iter().collect()
}
