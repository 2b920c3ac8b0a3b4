//! Timing protocol and benchmark reports.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::workload::QueryWorkload;
use crate::{Index, SymbolIndex};

/// Version tag in the first CSV column; bump when columns change.
pub const CSV_SCHEMA: &str = "wfsel-bench-v1";
pub const CSV_HEADER: &str = "schema,structure,backend,block,superblock,hyperblock,nav,input_bytes,index_bytes,\
space_pct,kind,queries,reps,median_us,checksum";
pub const DEFAULT_REPS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Timing {
    /// Mean microseconds per query of each measured repetition.
    pub per_rep_us: Vec<f64>,
    pub checksum: u64,
}

impl Timing {
    pub fn median_us(&self) -> f64 {
        median(&self.per_rep_us)
    }

    pub fn reps(&self) -> usize {
        self.per_rep_us.len()
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// One warm-up pass, then `reps` timed passes over the whole workload.
pub fn time_workload<I: SymbolIndex + ?Sized>(index: &I, workload: &QueryWorkload, reps: usize) -> Result<Timing> {
    if reps == 0 || workload.is_empty() {
        return Err(Error::param("timing needs at least one repetition and one query"));
    }
    let checksum = workload.run(index)?;
    let mut per_rep_us = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let sum = std::hint::black_box(workload.run(index)?);
        let elapsed = start.elapsed();
        assert_eq!(sum, checksum, "answers changed between repetitions");
        per_rep_us.push(elapsed.as_secs_f64() * 1e6 / workload.len() as f64);
    }
    Ok(Timing { per_rep_us, checksum })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub structure: String,
    pub backend: String,
    pub block: usize,
    pub superblock: usize,
    pub hyperblock: usize,
    pub nav: Option<bool>,
    pub input_bytes: usize,
    pub index_bytes: usize,
    pub kind: String,
    pub queries: usize,
    pub timing: Timing,
}

impl BenchReport {
    pub fn new(index: &Index, input_bytes: usize, workload: &QueryWorkload, timing: Timing) -> Self {
        let (block, superblock, hyperblock, nav) = match index {
            Index::Forest(f) => {
                let p = f.params();
                (p.block, p.superblock, p.hyperblock, Some(p.nav))
            }
            Index::Tree(_) => (0, 0, 0, None),
        };
        BenchReport {
            structure: index.structure().name().to_string(),
            backend: index.backend().to_string(),
            block,
            superblock,
            hyperblock,
            nav,
            input_bytes,
            index_bytes: index.size_in_bytes(),
            kind: workload.kind.to_string(),
            queries: workload.len(),
            timing,
        }
    }

    pub fn space_pct(&self) -> f64 {
        100.0 * self.index_bytes as f64 / self.input_bytes as f64
    }

    pub fn csv_row(&self) -> String {
        let nav = match self.nav {
            Some(true) => "on",
            Some(false) => "off",
            None => "-",
        };
        format!(
            "{CSV_SCHEMA},{},{},{},{},{},{nav},{},{},{:.3},{},{},{},{:.4},{:016x}",
            self.structure,
            self.backend,
            self.block,
            self.superblock,
            self.hyperblock,
            self.input_bytes,
            self.index_bytes,
            self.space_pct(),
            self.kind,
            self.queries,
            self.timing.reps(),
            self.timing.median_us(),
            self.timing.checksum,
        )
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} ({})", self.structure, self.backend);
        if let Some(nav) = self.nav {
            let nav = if nav { "on" } else { "off" };
            let _ = write!(s, " b={} b_s={} b_h={} nav={nav}", self.block, self.superblock, self.hyperblock);
        }
        let _ = write!(
            s,
            ": {} bytes ({:.2}% of input), {} {} queries, median {:.3} us/query over {} reps, checksum {:016x}",
            self.index_bytes,
            self.space_pct(),
            self.queries,
            self.kind,
            self.timing.median_us(),
            self.timing.reps(),
            self.timing.checksum
        );
        s
    }
}
