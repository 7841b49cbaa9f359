//! The `mti` command-line front end.
//!
//! Every command writes deterministic CSV. Randomness comes only from
//! `--seed`, and output bytes do not depend on `--workers`.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::dense_limit::{predict, predict_bipartite_per_set, MeanDegrees};
use crate::ensemble::{collapse_check, sweep, EnsembleSpec, ReplicaBudget, ResultsTable, Runner, DEFAULT_BUDGET};
use crate::graph::Graph;
use crate::index::{
    additive_index, ln_multiplicative_index, AdditiveKind, DegreeFunction, EdgeFunction, IndexKind, IsolatedPolicy,
    LogIndexValue, VertexFunction,
};
use crate::inequality::{builtin_functions, verify_corpus, CorpusSpec};
use crate::models::{generate, ModelKind, ModelSpec, SeedTriple};

#[derive(Debug, Parser)]
#[command(name = "mti", version, about = "Multiplicative topological indices on random graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write edge-list files for model replicas.
    Generate(GenerateArgs),
    /// Evaluate indices on edge-list files.
    Index(IndexArgs),
    /// Ensemble averages over a parameter grid.
    Sweep(SweepArgs),
    /// Compare `<ln X>/n` curves from several sweep tables.
    Collapse(CollapseArgs),
    /// Dense-limit prediction of `<ln X>/n`.
    Predict(PredictArgs),
    /// Check the sum-versus-product inequalities on a graph corpus.
    Verify(VerifyArgs),
}

/// Model and parameter grid shared by `generate` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub model: ModelKind,
    /// Vertex counts (ER, RG).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Set sizes (BR); paired position by position with `--n2`.
    #[arg(long, value_delimiter = ',')]
    pub n1: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n2: Vec<usize>,
    /// Edge probabilities (ER, BR).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r", "k"])]
    pub p: Vec<f64>,
    /// Connection radii (RG).
    #[arg(long, value_delimiter = ',', conflicts_with = "k")]
    pub r: Vec<f64>,
    /// Target mean degrees; the model parameter is solved for each size.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<f64>,
}

impl GridArgs {
    fn sizes(&self) -> Result<Vec<(usize, usize)>> {
        match self.model {
            ModelKind::Er | ModelKind::Rg => {
                ensure!(!self.n.is_empty(), "--n is required for {}", self.model);
                ensure!(self.n1.is_empty() && self.n2.is_empty(), "--n1/--n2 apply to br only");
                Ok(self.n.iter().map(|&n| (n, 0)).collect())
            }
            ModelKind::Br => {
                ensure!(self.n.is_empty(), "br takes --n1 and --n2 instead of --n");
                ensure!(!self.n1.is_empty() && !self.n2.is_empty(), "--n1 and --n2 are required for br");
                let len = self.n1.len().max(self.n2.len());
                let pick = |v: &[usize], i: usize| if v.len() == 1 { Some(v[0]) } else { v.get(i).copied() };
                (0..len)
                    .map(|i| match (pick(&self.n1, i), pick(&self.n2, i)) {
                        (Some(a), Some(b)) => Ok((a, b)),
                        _ => bail!("--n1 and --n2 lists must have equal length or length 1"),
                    })
                    .collect()
            }
        }
    }

    /// Grid in size-major order.
    pub fn grid(&self) -> Result<Vec<ModelSpec>> {
        let sizes = self.sizes()?;
        let mut grid = Vec::new();
        if !self.k.is_empty() {
            for &size in &sizes {
                for &k in &self.k {
                    grid.push(ModelSpec::with_mean_degree(self.model, size, k)?);
                }
            }
            return Ok(grid);
        }
        let params = match self.model {
            ModelKind::Er | ModelKind::Br => {
                ensure!(self.r.is_empty(), "--r applies to rg only");
                &self.p
            }
            ModelKind::Rg => {
                ensure!(self.p.is_empty(), "--p applies to er and br only");
                &self.r
            }
        };
        ensure!(!params.is_empty(), "give the model parameter list or --k");
        for &(a, b) in &sizes {
            for &x in params {
                grid.push(match self.model {
                    ModelKind::Er => ModelSpec::er(a, x)?,
                    ModelKind::Rg => ModelSpec::rg(a, x)?,
                    ModelKind::Br => ModelSpec::br(a, b, x)?,
                });
            }
        }
        Ok(grid)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1)]
    pub replicas: u64,
    #[arg(long)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Edge-list files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Multiplicative (nk, pi1, ...) or additive (m1, m2, ...) index names.
    #[arg(long, value_delimiter = ',', default_value = "nk,pi1,pi2,pi1s,rpi,hpi,chipi,idpi,gapi")]
    pub index: Vec<String>,
    #[arg(long, default_value_t = IsolatedPolicy::Exclude)]
    pub policy: IsolatedPolicy,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "nk,pi1,pi2,pi1s,rpi,hpi,chipi,idpi")]
    pub index: Vec<IndexKind>,
    /// Replica budget B; each point runs ceil(B/n) replicas.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = IsolatedPolicy::Exclude)]
    pub policy: IsolatedPolicy,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    /// Sweep result tables.
    #[arg(required = true)]
    pub tables: Vec<PathBuf>,
    #[arg(long)]
    pub index: String,
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    /// Also accept deviations within this many pooled standard errors.
    #[arg(long, default_value_t = 0.0)]
    pub sem_factor: f64,
    /// Report CSV path; the summary always goes to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: ModelKind,
    #[arg(long, value_delimiter = ',', default_value = "nk,pi1,pi2,pi1s,rpi,hpi,chipi,idpi")]
    pub index: Vec<IndexKind>,
    /// Mean degrees; for br this sets `<d1> = <d2> = k`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["d1", "d2"])]
    pub k: Vec<f64>,
    /// Set mean degrees (br), paired with `--d2`.
    #[arg(long, value_delimiter = ',', requires = "d2")]
    pub d1: Vec<f64>,
    #[arg(long, value_delimiter = ',', requires = "d1")]
    pub d2: Vec<f64>,
    /// Report `ln X/n1` and `ln X/n2` for br instead of `ln X/(n1+n2)`.
    #[arg(long)]
    pub per_set: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    pub n: Vec<usize>,
    /// Random graphs per model and size.
    #[arg(long, default_value_t = 100)]
    pub graphs: usize,
    /// Skip the complete graphs and cycles.
    #[arg(long)]
    pub no_regular: bool,
    /// Add the mixed-sign Petrovic instance.
    #[arg(long)]
    pub counterexample: bool,
    /// Skip the built-in degree functions.
    #[arg(long)]
    pub no_builtin: bool,
    /// `NAME=C,ALPHA` for `F(d) = C d^ALPHA`; repeatable.
    #[arg(long, value_parser = parse_custom_vertex)]
    pub custom_vertex: Vec<CustomFunction>,
    /// `NAME=C,ALPHA,BETA` for `F(a,b) = C (ab)^ALPHA (a+b)^BETA`; repeatable.
    #[arg(long, value_parser = parse_custom_edge)]
    pub custom_edge: Vec<CustomFunction>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct CustomFunction(pub DegreeFunction);

fn parse_custom(s: &str, arity: usize) -> Result<(String, Vec<f64>), String> {
    let (name, params) = s.split_once('=').ok_or("expected NAME=PARAMS")?;
    if name.is_empty() {
        return Err("empty function name".into());
    }
    let params: Vec<f64> = params
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if params.len() != arity {
        return Err(format!("expected {arity} comma-separated numbers, got {}", params.len()));
    }
    Ok((name.to_string(), params))
}

fn parse_custom_vertex(s: &str) -> Result<CustomFunction, String> {
    let (name, p) = parse_custom(s, 2)?;
    let (c, alpha) = (p[0], p[1]);
    Ok(CustomFunction(DegreeFunction::Vertex(VertexFunction::new(name, move |d| {
        c * (d as f64).powf(alpha)
    }))))
}

fn parse_custom_edge(s: &str) -> Result<CustomFunction, String> {
    let (name, p) = parse_custom(s, 3)?;
    let (c, alpha, beta) = (p[0], p[1], p[2]);
    Ok(CustomFunction(DegreeFunction::Edge(EdgeFunction::new(name, move |a, b| {
        let (a, b) = (a as f64, b as f64);
        c * (a * b).powf(alpha) * (a + b).powf(beta)
    }))))
}

/// Whether a checking command's checks passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
}

/// Runs one command. Data goes to `--out` or `stdout`; summaries to `stderr`.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a, stdout),
        Command::Index(a) => cmd_index(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Collapse(a) => cmd_collapse(a, stdout, stderr),
        Command::Predict(a) => cmd_predict(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    }
}

fn with_output<T>(out: Option<&Path>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<T>) -> Result<T> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            let value = f(&mut w)?;
            w.flush()?;
            Ok(value)
        }
        None => f(stdout),
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v:?}")
}

fn cmd_generate(a: GenerateArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let grid = a.grid.grid()?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (point, spec) in grid.iter().enumerate() {
        let (pname, pvalue) = spec.parameter();
        for replica in 0..a.replicas {
            let seed = SeedTriple::new(a.seed, point as u64, replica);
            let g = generate(spec, seed)?;
            let size = match spec.set_sizes() {
                Some((n1, n2)) => format!("n1-{n1}_n2-{n2}"),
                None => format!("n-{}", spec.vertex_count()),
            };
            let name = format!(
                "{}_{size}_{pname}-{pvalue:?}_seed-{}-{}-{}.edges",
                spec.kind(),
                seed.master_seed,
                seed.point_id,
                seed.replica_index
            );
            let path = a.out.join(name);
            let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
            g.write_edge_list(&mut w)?;
            w.flush()?;
            writeln!(stdout, "{}", path.display())?;
        }
    }
    Ok(Outcome::Success)
}

enum Requested {
    Product(IndexKind),
    Sum(AdditiveKind),
}

fn parse_requested(name: &str) -> Result<Requested> {
    if let Ok(k) = name.parse::<IndexKind>() {
        return Ok(Requested::Product(k));
    }
    if let Ok(k) = name.parse::<AdditiveKind>() {
        return Ok(Requested::Sum(k));
    }
    bail!("unknown index {name:?}")
}

fn cmd_index(a: IndexArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let requested: Vec<(String, Requested)> = a
        .index
        .iter()
        .map(|n| Ok((n.clone(), parse_requested(n)?)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for path in &a.files {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let g = Graph::read_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
        for (name, req) in &requested {
            let (quantity, value, excluded) = match req {
                Requested::Product(k) => {
                    let v = ln_multiplicative_index(&g, k, a.policy)?;
                    let value = match v.value {
                        LogIndexValue::Finite(x) => fmt_value(x),
                        LogIndexValue::LogZero => "logzero".to_string(),
                    };
                    ("ln_product", value, v.excluded_vertices)
                }
                Requested::Sum(k) => {
                    let excluded = match a.policy {
                        IsolatedPolicy::Exclude if !matches!(k.function(), DegreeFunction::Edge(_)) => g.isolated_count(),
                        _ => 0,
                    };
                    ("sum", fmt_value(additive_index(&g, k, a.policy)?), excluded)
                }
            };
            rows.push([
                path.display().to_string(),
                g.vertex_count().to_string(),
                g.edge_count().to_string(),
                name.clone(),
                quantity.to_string(),
                value,
                a.policy.name().to_string(),
                excluded.to_string(),
            ]);
        }
    }
    with_output(a.out.as_deref(), stdout, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["file", "n", "m", "index", "quantity", "value", "policy", "excluded_vertices"])?;
        for r in rows {
            csv.write_record(r)?;
        }
        csv.flush()?;
        Ok(())
    })?;
    Ok(Outcome::Success)
}

fn cmd_sweep(a: SweepArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let grid = a.grid.grid()?;
    let max_n = grid.iter().map(ModelSpec::vertex_count).max().unwrap_or(0);
    ensure!(a.budget >= max_n as u64, "--budget {} is below the largest n = {max_n}", a.budget);
    let spec = EnsembleSpec {
        grid,
        indices: a.index,
        budget: ReplicaBudget(a.budget),
        master_seed: a.seed,
        policy: a.policy,
    };
    let runner = Runner::new(a.workers)?;
    let table = sweep(&spec, &runner)?;
    with_output(a.out.as_deref(), stdout, |w| Ok(table.write_csv(w)?))?;
    Ok(Outcome::Success)
}

fn cmd_collapse(a: CollapseArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome> {
    let tables = a
        .tables
        .iter()
        .map(|p| {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            ResultsTable::read_csv(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = collapse_check(&tables, &a.index)?;
    with_output(a.out.as_deref(), stdout, |w| Ok(w.write_all(report.to_csv().as_bytes())?))?;
    stderr.write_all(report.summary(a.tolerance, a.sem_factor).as_bytes())?;
    Ok(if report.passes(a.tolerance, a.sem_factor) {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}

fn cmd_predict(a: PredictArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let degrees: Vec<(f64, f64)> = if !a.k.is_empty() {
        a.k.iter().map(|&k| (k, k)).collect()
    } else {
        ensure!(a.model == ModelKind::Br, "--d1/--d2 apply to br only");
        ensure!(a.d1.len() == a.d2.len(), "--d1 and --d2 lists must have equal length");
        a.d1.iter().copied().zip(a.d2.iter().copied()).collect()
    };
    ensure!(!degrees.is_empty(), "give --k or --d1/--d2");
    ensure!(!a.per_set || a.model == ModelKind::Br, "--per-set applies to br only");
    let mut rows = Vec::new();
    for &(d1, d2) in &degrees {
        for idx in &a.index {
            let md = match a.model {
                ModelKind::Br => MeanDegrees::Bipartite { d1, d2 },
                _ => MeanDegrees::Single(d1),
            };
            let values = if a.per_set {
                let (s1, s2) = predict_bipartite_per_set(idx, d1, d2)?;
                vec![fmt_value(s1), fmt_value(s2)]
            } else {
                vec![fmt_value(predict(a.model, idx, md)?.value)]
            };
            let mut row = vec![a.model.to_string(), idx.name().to_string()];
            match a.model {
                ModelKind::Br => row.extend([fmt_value(d1), fmt_value(d2)]),
                _ => row.push(fmt_value(d1)),
            }
            row.extend(values);
            rows.push(row);
        }
    }
    let header: &[&str] = match (a.model, a.per_set) {
        (ModelKind::Br, true) => &["model", "index", "d1", "d2", "value_per_n1", "value_per_n2"],
        (ModelKind::Br, false) => &["model", "index", "d1", "d2", "value"],
        _ => &["model", "index", "k", "value"],
    };
    with_output(a.out.as_deref(), stdout, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header)?;
        for r in rows {
            csv.write_record(r)?;
        }
        csv.flush()?;
        Ok(())
    })?;
    Ok(Outcome::Success)
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome> {
    let mut functions = if a.no_builtin { Vec::new() } else { builtin_functions() };
    functions.extend(a.custom_vertex.into_iter().chain(a.custom_edge).map(|c| c.0));
    ensure!(!functions.is_empty(), "no degree functions to check");
    let corpus = CorpusSpec {
        sizes: a.n,
        graphs_per_model: a.graphs,
        master_seed: a.seed,
        include_regular: !a.no_regular,
        include_counterexample: a.counterexample,
    }
    .build()?;
    let report = verify_corpus(&corpus, &functions, &Runner::new(a.workers)?)?;
    with_output(a.out.as_deref(), stdout, |w| Ok(report.write_csv(w)?))?;
    let violations: Vec<_> = report.violations().collect();
    writeln!(
        stderr,
        "{} checks on {} graphs x {} functions: {} flagged (hypothesis not met), {} violations",
        report.records.len(),
        corpus.len(),
        functions.len(),
        report.flagged().count(),
        violations.len()
    )?;
    for r in report.flagged().filter(|r| !r.check.holds) {
        writeln!(
            stderr,
            "flagged: {} on {} n={} function {}: {}",
            r.check.kind,
            r.model,
            r.n,
            r.check.function,
            r.check.diagnostic.as_deref().unwrap_or("")
        )?;
    }
    for r in &violations {
        writeln!(
            stderr,
            "VIOLATION: {} on {} n={} param {} function {}: slack {}",
            r.check.kind, r.model, r.n, r.param, r.check.function, r.check.slack
        )?;
    }
    Ok(if violations.is_empty() {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}

/// Parses `std::env::args`, runs, and maps the result to an exit code:
/// 0 success, 1 failed checks, 2 usage or runtime error.
pub fn main_with_args<I, T>(args: I) -> std::process::ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return std::process::ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    match run(cli, &mut out, &mut err) {
        Ok(Outcome::Success) => std::process::ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => std::process::ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {e:#}");
            std::process::ExitCode::from(2)
        }
    }
}
