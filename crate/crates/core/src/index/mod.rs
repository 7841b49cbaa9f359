//! Degree-based topological indices.
//!
//! A vertex index is built from a function `F_V(d)` of vertex degree and an
//! edge index from a symmetric `F_E(d_u, d_v)`. The additive form sums the
//! factors; the multiplicative form multiplies them. Multiplicative indices
//! are only ever evaluated as `ln X = Σ ln F` because the raw products leave
//! `f64` range on graphs of a few hundred vertices.

mod oracle;

pub use oracle::exact_ln_oracle;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("function `{function}` produced invalid factor {value} at degrees {degrees}")]
    InvalidFactor {
        function: String,
        degrees: DegreeArgs,
        value: f64,
    },
    #[error("exact oracle does not support index `{0}`")]
    OracleUnsupported(String),
    #[error("exact oracle is limited to graphs with at most 64 vertices (got {0})")]
    OracleTooLarge(usize),
    #[error("unknown index name {0:?}")]
    UnknownIndex(String),
    #[error("index `{0}` has no additive counterpart")]
    NotAdditive(String),
}

/// Arguments at which a degree function was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeArgs {
    Vertex(u32),
    Edge(u32, u32),
}

impl fmt::Display for DegreeArgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeArgs::Vertex(d) => write!(f, "({d})"),
            DegreeArgs::Edge(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

/// `F_V`: positive function of a vertex degree `d >= 1`.
#[derive(Clone)]
pub struct VertexFunction {
    name: String,
    rule: Arc<dyn Fn(u32) -> f64 + Send + Sync>,
}

impl VertexFunction {
    pub fn new(name: impl Into<String>, rule: impl Fn(u32) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, d: u32) -> f64 {
        (self.rule)(d)
    }
}

impl fmt::Debug for VertexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexFunction({})", self.name)
    }
}

/// `F_E`: positive symmetric function of the endpoint degrees of an edge.
#[derive(Clone)]
pub struct EdgeFunction {
    name: String,
    rule: Arc<dyn Fn(u32, u32) -> f64 + Send + Sync>,
}

impl EdgeFunction {
    pub fn new(name: impl Into<String>, rule: impl Fn(u32, u32) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, a: u32, b: u32) -> f64 {
        (self.rule)(a, b)
    }
}

impl fmt::Debug for EdgeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeFunction({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub enum DegreeFunction {
    Vertex(VertexFunction),
    Edge(EdgeFunction),
}

impl DegreeFunction {
    pub fn name(&self) -> &str {
        match self {
            DegreeFunction::Vertex(f) => f.name(),
            DegreeFunction::Edge(f) => f.name(),
        }
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, DegreeFunction::Vertex(_))
    }
}

/// How vertex-based indices treat degree-zero vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum IsolatedPolicy {
    /// Skip isolated vertices and report how many were skipped.
    #[default]
    Exclude,
    /// A zero factor makes the whole product zero.
    LogZero,
}

impl IsolatedPolicy {
    pub fn name(self) -> &'static str {
        match self {
            IsolatedPolicy::Exclude => "exclude",
            IsolatedPolicy::LogZero => "logzero",
        }
    }
}

impl fmt::Display for IsolatedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IsolatedPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exclude" => Ok(IsolatedPolicy::Exclude),
            "logzero" => Ok(IsolatedPolicy::LogZero),
            other => Err(format!("unknown isolated-vertex policy {other:?} (expected exclude or logzero)")),
        }
    }
}

/// Multiplicative index selector.
#[derive(Debug, Clone)]
pub enum IndexKind {
    /// Narumi–Katayama, `Π d_u`.
    Nk,
    /// `Π d_u²`.
    Pi1,
    /// `Π d_u d_v` over edges.
    Pi2,
    /// `Π (d_u + d_v)` over edges.
    Pi1Star,
    /// Multiplicative Randić, `Π (d_u d_v)^{-1/2}`.
    RPi,
    /// Multiplicative harmonic, `Π 2/(d_u + d_v)`.
    HPi,
    /// Multiplicative sum-connectivity, `Π (d_u + d_v)^{-1/2}`.
    ChiPi,
    /// Multiplicative inverse degree, `Π (1/d_u² + 1/d_v²)`.
    IdPi,
    /// Multiplicative geometric-arithmetic, `Π 2√(d_u d_v)/(d_u + d_v)`.
    GaPi,
    Custom(DegreeFunction),
}

impl IndexKind {
    /// The eight indices with closed-form dense-limit predictions.
    pub fn studied() -> [IndexKind; 8] {
        use IndexKind::*;
        [Nk, Pi1, Pi2, Pi1Star, RPi, HPi, ChiPi, IdPi]
    }

    /// Every built-in index, including `GaPi`.
    pub fn builtins() -> [IndexKind; 9] {
        use IndexKind::*;
        [Nk, Pi1, Pi2, Pi1Star, RPi, HPi, ChiPi, IdPi, GaPi]
    }

    pub fn name(&self) -> &str {
        match self {
            IndexKind::Nk => "nk",
            IndexKind::Pi1 => "pi1",
            IndexKind::Pi2 => "pi2",
            IndexKind::Pi1Star => "pi1s",
            IndexKind::RPi => "rpi",
            IndexKind::HPi => "hpi",
            IndexKind::ChiPi => "chipi",
            IndexKind::IdPi => "idpi",
            IndexKind::GaPi => "gapi",
            IndexKind::Custom(f) => f.name(),
        }
    }

    pub fn is_vertex_based(&self) -> bool {
        match self {
            IndexKind::Nk | IndexKind::Pi1 => true,
            IndexKind::Custom(f) => f.is_vertex(),
            _ => false,
        }
    }

    /// The degree function whose product defines this index.
    pub fn function(&self) -> DegreeFunction {
        let v = |name: &str, f: fn(u32) -> f64| DegreeFunction::Vertex(VertexFunction::new(name, f));
        let e = |name: &str, f: fn(u32, u32) -> f64| DegreeFunction::Edge(EdgeFunction::new(name, f));
        match self {
            IndexKind::Nk => v("nk", |d| d as f64),
            IndexKind::Pi1 => v("pi1", |d| (d as f64).powi(2)),
            IndexKind::Pi2 => e("pi2", |a, b| a as f64 * b as f64),
            IndexKind::Pi1Star => e("pi1s", |a, b| a as f64 + b as f64),
            IndexKind::RPi => e("rpi", |a, b| 1.0 / (a as f64 * b as f64).sqrt()),
            IndexKind::HPi => e("hpi", |a, b| 2.0 / (a as f64 + b as f64)),
            IndexKind::ChiPi => e("chipi", |a, b| 1.0 / (a as f64 + b as f64).sqrt()),
            IndexKind::IdPi => e("idpi", |a, b| {
                let (a, b) = (a as f64, b as f64);
                1.0 / (a * a) + 1.0 / (b * b)
            }),
            IndexKind::GaPi => e("gapi", |a, b| {
                let (a, b) = (a as f64, b as f64);
                2.0 * (a * b).sqrt() / (a + b)
            }),
            IndexKind::Custom(f) => f.clone(),
        }
    }
}

impl PartialEq for IndexKind {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name() && self.is_vertex_based() == other.is_vertex_based()
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        IndexKind::builtins()
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| IndexError::UnknownIndex(s.to_string()))
    }
}

/// Additive index selector.
#[derive(Debug, Clone)]
pub enum AdditiveKind {
    /// First Zagreb, `Σ d_u²`.
    M1,
    /// Second Zagreb, `Σ d_u d_v` over edges.
    M2,
    /// Randić, `Σ (d_u d_v)^{-1/2}`.
    R,
    /// Harmonic, `Σ 2/(d_u + d_v)`.
    H,
    /// Sum-connectivity, `Σ (d_u + d_v)^{-1/2}`.
    Chi,
    /// Inverse degree, `Σ 1/d_u`.
    Id,
    Custom(DegreeFunction),
}

impl AdditiveKind {
    pub fn builtins() -> [AdditiveKind; 6] {
        use AdditiveKind::*;
        [M1, M2, R, H, Chi, Id]
    }

    pub fn name(&self) -> &str {
        match self {
            AdditiveKind::M1 => "m1",
            AdditiveKind::M2 => "m2",
            AdditiveKind::R => "r",
            AdditiveKind::H => "h",
            AdditiveKind::Chi => "chi",
            AdditiveKind::Id => "id",
            AdditiveKind::Custom(f) => f.name(),
        }
    }

    pub fn function(&self) -> DegreeFunction {
        let v = |name: &str, f: fn(u32) -> f64| DegreeFunction::Vertex(VertexFunction::new(name, f));
        let e = |name: &str, f: fn(u32, u32) -> f64| DegreeFunction::Edge(EdgeFunction::new(name, f));
        match self {
            AdditiveKind::M1 => v("m1", |d| (d as f64).powi(2)),
            AdditiveKind::M2 => e("m2", |a, b| a as f64 * b as f64),
            AdditiveKind::R => e("r", |a, b| 1.0 / (a as f64 * b as f64).sqrt()),
            AdditiveKind::H => e("h", |a, b| 2.0 / (a as f64 + b as f64)),
            AdditiveKind::Chi => e("chi", |a, b| 1.0 / (a as f64 + b as f64).sqrt()),
            AdditiveKind::Id => v("id", |d| 1.0 / d as f64),
            AdditiveKind::Custom(f) => f.clone(),
        }
    }
}

impl FromStr for AdditiveKind {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        AdditiveKind::builtins()
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| IndexError::UnknownIndex(s.to_string()))
    }
}

/// `ln X_Π`, or the marker for a zero product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogIndexValue {
    Finite(f64),
    LogZero,
}

impl LogIndexValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            LogIndexValue::Finite(x) => Some(x),
            LogIndexValue::LogZero => None,
        }
    }

    /// `ln X` with the zero product mapped to `-inf`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::NEG_INFINITY)
    }
}

/// Result of evaluating a multiplicative index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnIndex {
    pub value: LogIndexValue,
    /// Isolated vertices skipped under [`IsolatedPolicy::Exclude`].
    pub excluded_vertices: usize,
}

pub(crate) fn checked_factor(name: &str, args: DegreeArgs, value: f64) -> Result<f64, IndexError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(IndexError::InvalidFactor {
            function: name.to_string(),
            degrees: args,
            value,
        })
    }
}

/// Factors of a degree function over a graph, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    pub values: Vec<f64>,
    pub excluded_vertices: usize,
    /// An isolated vertex was met under [`IsolatedPolicy::LogZero`].
    pub zero_factor: bool,
}

/// Evaluates `f` at every vertex (or edge) of `g`.
pub fn factor_values(g: &Graph, f: &DegreeFunction, policy: IsolatedPolicy) -> Result<FactorSet, IndexError> {
    let mut out = FactorSet {
        values: Vec::new(),
        excluded_vertices: 0,
        zero_factor: false,
    };
    match f {
        DegreeFunction::Vertex(fv) => {
            out.values.reserve(g.vertex_count());
            for &d in g.degrees() {
                if d == 0 {
                    match policy {
                        IsolatedPolicy::Exclude => out.excluded_vertices += 1,
                        IsolatedPolicy::LogZero => out.zero_factor = true,
                    }
                    continue;
                }
                out.values.push(checked_factor(fv.name(), DegreeArgs::Vertex(d), fv.eval(d))?);
            }
        }
        DegreeFunction::Edge(fe) => {
            out.values.reserve(g.edge_count());
            for (a, b) in g.edge_degrees() {
                out.values.push(checked_factor(fe.name(), DegreeArgs::Edge(a, b), fe.eval(a, b))?);
            }
        }
    }
    Ok(out)
}

/// `ln X_Π(G)` by Neumaier-compensated summation in canonical order.
///
/// The error stays at a few ulps per term independent of graph size.
pub fn ln_multiplicative_index(g: &Graph, kind: &IndexKind, policy: IsolatedPolicy) -> Result<LnIndex, IndexError> {
    accumulate_ln(g, &kind.function(), policy, |acc, x| {
        let t = acc.0 + x;
        if acc.0.abs() >= x.abs() {
            acc.1 += (acc.0 - t) + x;
        } else {
            acc.1 += (x - t) + acc.0;
        }
        acc.0 = t;
    })
}

/// Same as [`ln_multiplicative_index`] with plain sequential summation.
pub fn ln_multiplicative_index_plain(g: &Graph, kind: &IndexKind, policy: IsolatedPolicy) -> Result<LnIndex, IndexError> {
    accumulate_ln(g, &kind.function(), policy, |acc, x| acc.0 += x)
}

fn accumulate_ln(
    g: &Graph,
    f: &DegreeFunction,
    policy: IsolatedPolicy,
    mut add: impl FnMut(&mut (f64, f64), f64),
) -> Result<LnIndex, IndexError> {
    let mut acc = (0.0f64, 0.0f64);
    let mut excluded = 0;
    match f {
        DegreeFunction::Vertex(fv) => {
            let mut zero = false;
            for &d in g.degrees() {
                if d == 0 {
                    match policy {
                        IsolatedPolicy::Exclude => excluded += 1,
                        IsolatedPolicy::LogZero => zero = true,
                    }
                    continue;
                }
                let x = checked_factor(fv.name(), DegreeArgs::Vertex(d), fv.eval(d))?;
                add(&mut acc, x.ln());
            }
            if zero {
                return Ok(LnIndex {
                    value: LogIndexValue::LogZero,
                    excluded_vertices: 0,
                });
            }
        }
        DegreeFunction::Edge(fe) => {
            for (a, b) in g.edge_degrees() {
                let x = checked_factor(fe.name(), DegreeArgs::Edge(a, b), fe.eval(a, b))?;
                add(&mut acc, x.ln());
            }
        }
    }
    Ok(LnIndex {
        value: LogIndexValue::Finite(acc.0 + acc.1),
        excluded_vertices: excluded,
    })
}

/// `X_Σ(G)`, summed in canonical order.
///
/// A vertex-based index under [`IsolatedPolicy::LogZero`] evaluates isolated
/// vertices as `F(0)`, which is `+inf` for the inverse degree index.
pub fn additive_index(g: &Graph, kind: &AdditiveKind, policy: IsolatedPolicy) -> Result<f64, IndexError> {
    match kind.function() {
        DegreeFunction::Vertex(fv) => {
            let mut sum = 0.0;
            for &d in g.degrees() {
                if d == 0 {
                    if policy == IsolatedPolicy::LogZero {
                        sum += fv.eval(0);
                    }
                    continue;
                }
                sum += checked_factor(fv.name(), DegreeArgs::Vertex(d), fv.eval(d))?;
            }
            Ok(sum)
        }
        DegreeFunction::Edge(fe) => g.edge_degrees().try_fold(0.0, |sum, (a, b)| {
            Ok(sum + checked_factor(fe.name(), DegreeArgs::Edge(a, b), fe.eval(a, b))?)
        }),
    }
}
