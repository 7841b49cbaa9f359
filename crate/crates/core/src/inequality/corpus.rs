//! Batch verification over a corpus of random and regular graphs.

use std::io::Write;

use super::{Factors, InequalityCheck, InequalityError};
use crate::ensemble::Runner;
use crate::graph::Graph;
use crate::index::{DegreeFunction, EdgeFunction, IndexKind};
use crate::models::{generate, ModelKind, ModelSpec, SeedTriple};

pub const REPORT_HEADER: &str = "inequality,model,n,param,function,lhs,rhs,slack,holds,hypothesis_ok";

const PARAMETER_STEPS: usize = 10;

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub sizes: Vec<usize>,
    /// Graphs per (model, size), spread evenly over the parameter grid.
    pub graphs_per_model: usize,
    pub master_seed: u64,
    /// Adds complete graphs and cycles of every size.
    pub include_regular: bool,
    /// Adds the mixed-sign Petrović instance.
    pub include_counterexample: bool,
}

impl CorpusSpec {
    pub fn new(master_seed: u64) -> Self {
        Self {
            sizes: vec![8, 16, 32],
            graphs_per_model: 100,
            master_seed,
            include_regular: true,
            include_counterexample: false,
        }
    }

    /// Parameter grid of one model: `p = i/10` for ER and BR, `r = i·√2/10` for RG.
    pub fn parameter_grid(kind: ModelKind) -> Vec<f64> {
        (1..=PARAMETER_STEPS)
            .map(|i| {
                let t = i as f64 / PARAMETER_STEPS as f64;
                match kind {
                    ModelKind::Rg => t * std::f64::consts::SQRT_2,
                    ModelKind::Er | ModelKind::Br => t,
                }
            })
            .collect()
    }

    pub fn build(&self) -> Result<Vec<CorpusGraph>, InequalityError> {
        let mut out = Vec::new();
        let models = [ModelKind::Er, ModelKind::Rg, ModelKind::Br];
        for (mi, &kind) in models.iter().enumerate() {
            let grid = Self::parameter_grid(kind);
            for (si, &n) in self.sizes.iter().enumerate() {
                for g in 0..self.graphs_per_model {
                    let step = g * grid.len() / self.graphs_per_model.max(1);
                    let param = grid[step];
                    let spec = match kind {
                        ModelKind::Er => ModelSpec::er(n, param)?,
                        ModelKind::Rg => ModelSpec::rg(n, param)?,
                        ModelKind::Br => ModelSpec::br(n / 2, n - n / 2, param)?,
                    };
                    let point = ((mi * self.sizes.len() + si) * PARAMETER_STEPS + step) as u64;
                    let graph = generate(&spec, SeedTriple::new(self.master_seed, point, g as u64))?;
                    out.push(CorpusGraph {
                        model: kind.name().to_string(),
                        param: format!("{param:?}"),
                        graph,
                        only: None,
                    });
                }
            }
        }
        if self.include_regular {
            for &n in &self.sizes {
                for (model, graph) in [("complete", Graph::complete(n)), ("cycle", Graph::cycle(n))] {
                    out.push(CorpusGraph {
                        model: model.into(),
                        param: String::new(),
                        graph,
                        only: None,
                    });
                }
            }
        }
        if self.include_counterexample {
            let (graph, f) = petrovic_counterexample();
            out.push(CorpusGraph {
                model: "path".into(),
                param: String::new(),
                graph,
                only: Some(f),
            });
        }
        Ok(out)
    }
}

#[derive(Clone)]
pub struct CorpusGraph {
    pub model: String,
    pub param: String,
    pub graph: Graph,
    /// Check only this function instead of the shared list.
    pub only: Option<DegreeFunction>,
}

/// `F(a, b) = e^3` when `a ≠ b`, else `e^{-3}`.
pub fn mixed_sign_function() -> DegreeFunction {
    DegreeFunction::Edge(EdgeFunction::new("mixed_sign", |a, b| if a == b { (-3f64).exp() } else { 3f64.exp() }))
}

/// P4 under [`mixed_sign_function`]: factors `e^3, e^{-3}, e^3`, so
/// `X_Σ ≈ 40.2` exceeds `X_Π + m − 1 = e^3 + 2 ≈ 22.1`.
pub fn petrovic_counterexample() -> (Graph, DegreeFunction) {
    (Graph::path(4), mixed_sign_function())
}

#[derive(Debug, Clone)]
pub struct InequalityRecord {
    pub model: String,
    pub n: usize,
    pub param: String,
    pub check: InequalityCheck,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub records: Vec<InequalityRecord>,
}

impl VerificationReport {
    /// Every check whose hypotheses hold also satisfies its conclusion.
    pub fn all_hold(&self) -> bool {
        self.records.iter().all(|r| !r.check.is_violation())
    }

    pub fn violations(&self) -> impl Iterator<Item = &InequalityRecord> {
        self.records.iter().filter(|r| r.check.is_violation())
    }

    pub fn flagged(&self) -> impl Iterator<Item = &InequalityRecord> {
        self.records.iter().filter(|r| !r.check.hypothesis_ok)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(REPORT_HEADER.split(','))?;
        for r in &self.records {
            let c = &r.check;
            w.write_record([
                c.kind.name().to_string(),
                r.model.clone(),
                r.n.to_string(),
                r.param.clone(),
                c.function.clone(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.slack.to_string(),
                c.holds.to_string(),
                c.hypothesis_ok.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Runs all six checks for every (graph, function) pair, in corpus order.
pub fn verify_corpus(
    corpus: &[CorpusGraph],
    functions: &[DegreeFunction],
    runner: &Runner,
) -> Result<VerificationReport, InequalityError> {
    let per_graph = runner.map_ordered(0..corpus.len() as u64, |i| {
        let entry = &corpus[i as usize];
        let fs = match &entry.only {
            Some(f) => std::slice::from_ref(f),
            None => functions,
        };
        let mut records = Vec::new();
        for f in fs {
            for check in Factors::from_graph(&entry.graph, f)?.all_checks() {
                records.push(InequalityRecord {
                    model: entry.model.clone(),
                    n: entry.graph.vertex_count(),
                    param: entry.param.clone(),
                    check,
                });
            }
        }
        Ok::<_, InequalityError>(records)
    });
    let mut report = VerificationReport::default();
    for records in per_graph {
        report.records.extend(records?);
    }
    Ok(report)
}

/// Degree functions of the nine built-in multiplicative indices.
pub fn builtin_functions() -> Vec<DegreeFunction> {
    IndexKind::builtins().iter().map(IndexKind::function).collect()
}
