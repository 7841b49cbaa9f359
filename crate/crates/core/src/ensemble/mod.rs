//! Replica ensembles over model parameter grids.
//!
//! Replicas are the unit of parallel work. Each replica is a pure function
//! of its seed triple, results are collected in replica order and reduced
//! sequentially, so a results table is bit-identical for any worker count.

mod collapse;
mod stats;

pub use collapse::{collapse_check, CollapseReport, CurveKey, PairDeviation};
pub use stats::SampleMoments;

use std::io::{Read, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::index::{ln_multiplicative_index, IndexError, IndexKind, IsolatedPolicy, LnIndex, LogIndexValue};
use crate::models::{generate, ModelError, ModelKind, ModelSpec, SeedTriple};

/// Replica budget used when none is given: `R(n) = ceil(10^5 / n)`.
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error("replica {seed:?}: {source}")]
    Model {
        seed: SeedTriple,
        #[source]
        source: ModelError,
    },
    #[error("replica {seed:?}: {source}")]
    Index {
        seed: SeedTriple,
        #[source]
        source: IndexError,
    },
    #[error("index `{index}` not present in table {table}")]
    IndexNotPresent { index: String, table: usize },
    #[error("collapse needs at least two curves, found {0}")]
    TooFewCurves(usize),
    #[error("insufficient overlap in <k>: {0}")]
    InsufficientOverlap(String),
    #[error("results CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Parallel executor for replica work.
pub struct Runner {
    pool: Option<rayon::ThreadPool>,
}

impl Runner {
    /// `workers <= 1` runs on the calling thread.
    pub fn new(workers: usize) -> Result<Self, EnsembleError> {
        let pool = if workers <= 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| EnsembleError::Pool(e.to_string()))?,
            )
        };
        Ok(Self { pool })
    }

    pub fn sequential() -> Self {
        Self { pool: None }
    }

    /// Maps `f` over `range`, returning results in range order.
    pub fn map_ordered<T, F>(&self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match &self.pool {
            None => range.map(f).collect(),
            Some(pool) => pool.install(|| range.into_par_iter().map(f).collect()),
        }
    }
}

/// Replica count rule `R(n) = max(1, ceil(B/n))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicaBudget(pub u64);

impl ReplicaBudget {
    pub fn replicas_for(self, n: usize) -> u64 {
        if n == 0 {
            return self.0.max(1);
        }
        self.0.div_ceil(n as u64).max(1)
    }
}

impl Default for ReplicaBudget {
    fn default() -> Self {
        ReplicaBudget(DEFAULT_BUDGET)
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    /// Model points, all of one model kind.
    pub grid: Vec<ModelSpec>,
    pub indices: Vec<IndexKind>,
    pub budget: ReplicaBudget,
    pub master_seed: u64,
    pub policy: IsolatedPolicy,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        let first = self
            .grid
            .first()
            .ok_or_else(|| EnsembleError::InvalidSpec("empty model grid".into()))?;
        if self.grid.iter().any(|s| s.kind() != first.kind()) {
            return Err(EnsembleError::InvalidSpec("grid mixes model kinds".into()));
        }
        for s in &self.grid {
            s.validate()
                .map_err(|e| EnsembleError::InvalidSpec(format!("{s}: {e}")))?;
        }
        if self.indices.is_empty() {
            return Err(EnsembleError::InvalidSpec("no indices requested".into()));
        }
        if self.budget.0 == 0 {
            return Err(EnsembleError::InvalidSpec("replica budget must be positive".into()));
        }
        Ok(())
    }
}

/// Aggregate of one index over one model point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub point: ModelSpec,
    pub index: String,
    pub policy: IsolatedPolicy,
    pub replicas: u64,
    /// LogZero replicas, or replicas that lost at least one vertex to exclusion.
    pub degenerate: u64,
    /// Isolated vertices skipped over all replicas.
    pub excluded_vertices: u64,
    /// Mean of `ln X_Π` over non-degenerate replicas (NaN if there are none).
    pub mean_ln: f64,
    pub sem: f64,
    pub mean_k_empirical: f64,
    pub mean_k_sem: f64,
    pub mean_k_theoretical: f64,
    pub master_seed: u64,
}

impl EnsembleStats {
    pub fn mean_ln_over_n(&self) -> f64 {
        self.mean_ln / self.point.vertex_count() as f64
    }
}

/// Per-replica measurements, one entry per requested index.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome {
    pub mean_degree: f64,
    pub values: Vec<LnIndex>,
}

fn evaluate_replica(
    spec: &ModelSpec,
    seed: SeedTriple,
    indices: &[IndexKind],
    policy: IsolatedPolicy,
) -> Result<ReplicaOutcome, EnsembleError> {
    let g: Graph = generate(spec, seed).map_err(|source| EnsembleError::Model { seed, source })?;
    let values = indices
        .iter()
        .map(|k| ln_multiplicative_index(&g, k, policy).map_err(|source| EnsembleError::Index { seed, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReplicaOutcome {
        mean_degree: g.mean_degree(),
        values,
    })
}

/// Generates and measures replicas `range` of one point, in replica order.
pub fn run_replicas(
    spec: &ModelSpec,
    point_id: u64,
    indices: &[IndexKind],
    range: Range<u64>,
    master_seed: u64,
    policy: IsolatedPolicy,
    runner: &Runner,
) -> Result<Vec<ReplicaOutcome>, EnsembleError> {
    runner
        .map_ordered(range, |i| {
            evaluate_replica(spec, SeedTriple::new(master_seed, point_id, i), indices, policy)
        })
        .into_iter()
        .collect()
}

/// Ordered reduction of replica outcomes into per-index statistics.
pub fn aggregate(
    spec: &ModelSpec,
    indices: &[IndexKind],
    outcomes: &[ReplicaOutcome],
    master_seed: u64,
    policy: IsolatedPolicy,
) -> Vec<EnsembleStats> {
    let degrees: Vec<f64> = outcomes.iter().map(|o| o.mean_degree).collect();
    let k_moments = SampleMoments::from_slice(&degrees);
    indices
        .iter()
        .enumerate()
        .map(|(j, kind)| {
            let mut finite = Vec::with_capacity(outcomes.len());
            let mut degenerate = 0;
            let mut excluded = 0;
            for o in outcomes {
                let v = o.values[j];
                excluded += v.excluded_vertices as u64;
                match v.value {
                    LogIndexValue::Finite(x) => {
                        finite.push(x);
                        if v.excluded_vertices > 0 {
                            degenerate += 1;
                        }
                    }
                    LogIndexValue::LogZero => degenerate += 1,
                }
            }
            let m = SampleMoments::from_slice(&finite);
            EnsembleStats {
                point: *spec,
                index: kind.name().to_string(),
                policy,
                replicas: outcomes.len() as u64,
                degenerate,
                excluded_vertices: excluded,
                mean_ln: m.mean(),
                sem: m.sem(),
                mean_k_empirical: k_moments.mean(),
                mean_k_sem: k_moments.sem(),
                mean_k_theoretical: spec.mean_degree().network,
                master_seed,
            }
        })
        .collect()
}

/// Runs `replicas` replicas of one point; one graph serves every index.
pub fn run_point(
    spec: &ModelSpec,
    point_id: u64,
    indices: &[IndexKind],
    replicas: u64,
    master_seed: u64,
    policy: IsolatedPolicy,
    runner: &Runner,
) -> Result<Vec<EnsembleStats>, EnsembleError> {
    let outcomes = run_replicas(spec, point_id, indices, 0..replicas, master_seed, policy, runner)?;
    Ok(aggregate(spec, indices, &outcomes, master_seed, policy))
}

/// Runs every grid point (point id = grid position) and returns one row per
/// `(point, index)` in grid order.
pub fn sweep(spec: &EnsembleSpec, runner: &Runner) -> Result<ResultsTable, EnsembleError> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.grid.len() * spec.indices.len());
    for (point_id, point) in spec.grid.iter().enumerate() {
        let replicas = spec.budget.replicas_for(point.vertex_count());
        let stats = run_point(
            point,
            point_id as u64,
            &spec.indices,
            replicas,
            spec.master_seed,
            spec.policy,
            runner,
        )?;
        rows.extend(stats.iter().map(ResultRow::from));
    }
    Ok(ResultsTable { rows })
}

/// One line of the results CSV. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub param_name: String,
    pub param_value: f64,
    pub index: String,
    pub policy: String,
    pub replicas: u64,
    pub degenerate: u64,
    pub mean_k_theory: f64,
    pub mean_k_empirical: f64,
    pub mean_ln: f64,
    pub sem: f64,
    pub mean_ln_over_n: f64,
    pub master_seed: u64,
}

impl From<&EnsembleStats> for ResultRow {
    fn from(s: &EnsembleStats) -> Self {
        let (param_name, param_value) = s.point.parameter();
        let sizes = s.point.set_sizes();
        ResultRow {
            model: s.point.kind().name().to_string(),
            n: s.point.vertex_count(),
            n1: sizes.map(|x| x.0),
            n2: sizes.map(|x| x.1),
            param_name: param_name.to_string(),
            param_value,
            index: s.index.clone(),
            policy: s.policy.name().to_string(),
            replicas: s.replicas,
            degenerate: s.degenerate,
            mean_k_theory: s.mean_k_theoretical,
            mean_k_empirical: s.mean_k_empirical,
            mean_ln: s.mean_ln,
            sem: s.sem,
            mean_ln_over_n: s.mean_ln_over_n(),
            master_seed: s.master_seed,
        }
    }
}

impl ResultRow {
    pub fn model_kind(&self) -> Option<ModelKind> {
        self.model.parse().ok()
    }
}

pub const RESULTS_HEADER: &str = "model,n,n1,n2,param_name,param_value,index,policy,replicas,degenerate,\
mean_k_theory,mean_k_empirical,mean_ln,sem,mean_ln_over_n,master_seed";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), EnsembleError> {
        let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(writer);
        if self.rows.is_empty() {
            w.write_record(RESULTS_HEADER.split(','))?;
        }
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, EnsembleError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
        if header != RESULTS_HEADER {
            return Err(EnsembleError::InvalidSpec(format!("unexpected results header {header:?}")));
        }
        let rows = r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?;
        Ok(Self { rows })
    }

    /// Rows of one index, in table order.
    pub fn rows_for<'a>(&'a self, index: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.index == index)
    }

    pub fn append(&mut self, other: ResultsTable) {
        self.rows.extend(other.rows);
    }
}
