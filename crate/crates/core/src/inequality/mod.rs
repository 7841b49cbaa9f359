//! Sum-versus-product inequalities for degree functions on graphs.
//!
//! Every check reduces a graph and a degree function to its multiset of
//! positive factors `F`, then compares the additive index `X_Σ = ΣF` with the
//! multiplicative one `X_Π = ΠF` in 192-bit arithmetic. `X_Π` is only ever
//! formed as `exp(Σ ln F)`, which cannot overflow at that exponent range.
//!
//! Vertex functions skip isolated vertices, so `n` below is the number of
//! non-isolated vertices. Edge functions use `m`.

mod corpus;
mod ext;

pub use corpus::{
    builtin_functions, mixed_sign_function, petrovic_counterexample, verify_corpus, CorpusGraph, CorpusSpec, InequalityRecord,
    VerificationReport, REPORT_HEADER,
};
pub use ext::{ExtFloat, PRECISION};

use std::fmt;

use thiserror::Error;

use crate::graph::Graph;
use crate::index::{factor_values, DegreeFunction, IndexError, IsolatedPolicy};

/// Relative tolerance of every comparison.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

// Slack allowed when testing that a log-domain window contains ln F.
const WINDOW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum InequalityError {
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("factor {value} is not a positive finite number")]
    InvalidFactor { value: f64 },
    #[error("window bounds must satisfy a <= b (got a = {a}, b = {b})")]
    InvalidWindow { a: f64, b: f64 },
    #[error("corpus graph: {0}")]
    Model(#[from] crate::models::ModelError),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityKind {
    Jensen,
    JensenConverse,
    KoberLower,
    KoberUpper,
    PetrovicSum,
    ExpLinear,
}

impl InequalityKind {
    pub fn all() -> [InequalityKind; 6] {
        use InequalityKind::*;
        [Jensen, JensenConverse, KoberLower, KoberUpper, PetrovicSum, ExpLinear]
    }

    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::Jensen => "jensen",
            InequalityKind::JensenConverse => "jensen_converse",
            InequalityKind::KoberLower => "kober_lower",
            InequalityKind::KoberUpper => "kober_upper",
            InequalityKind::PetrovicSum => "petrovic_sum",
            InequalityKind::ExpLinear => "exp_linear",
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
}

/// Outcome of one inequality `lhs <= rhs`.
#[derive(Debug, Clone)]
pub struct InequalityCheck {
    pub kind: InequalityKind,
    /// `None` for checks on a bare factor list.
    pub graph: Option<GraphSummary>,
    pub function: String,
    /// Number of factors entering the check (`n` or `m`).
    pub factors: u64,
    pub lhs: ExtFloat,
    pub rhs: ExtFloat,
    /// `rhs − lhs`.
    pub slack: ExtFloat,
    /// `slack >= −1e-9 · max(1, |lhs|, |rhs|)`.
    pub holds: bool,
    /// The check's hypotheses are met, so `holds` is asserted.
    pub hypothesis_ok: bool,
    pub diagnostic: Option<String>,
}

impl InequalityCheck {
    fn new(kind: InequalityKind, factors: &Factors, lhs: ExtFloat, rhs: ExtFloat, hypothesis: Result<(), String>) -> Self {
        let slack = rhs.sub(&lhs);
        let holds = slack >= tolerance(&lhs, &rhs).neg();
        let (hypothesis_ok, diagnostic) = match hypothesis {
            Ok(()) => (true, None),
            Err(msg) => (false, Some(msg)),
        };
        Self {
            kind,
            graph: factors.graph,
            function: factors.function.clone(),
            factors: factors.count,
            lhs,
            rhs,
            slack,
            holds,
            hypothesis_ok,
            diagnostic,
        }
    }

    /// `|slack| <= 1e-9 · max(1, |lhs|, |rhs|)`.
    pub fn is_equality(&self) -> bool {
        self.slack.abs() <= tolerance(&self.lhs, &self.rhs)
    }

    /// A check whose hypotheses hold but whose conclusion fails.
    pub fn is_violation(&self) -> bool {
        self.hypothesis_ok && !self.holds
    }
}

fn tolerance(lhs: &ExtFloat, rhs: &ExtFloat) -> ExtFloat {
    ExtFloat::one()
        .max(&lhs.abs())
        .max(&rhs.abs())
        .mul(&ExtFloat::from_f64(RELATIVE_TOLERANCE))
}

/// Log-domain envelope `a <= ln F <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsWindow {
    pub a: f64,
    pub b: f64,
}

impl BoundsWindow {
    pub fn new(a: f64, b: f64) -> Result<Self, InequalityError> {
        if a <= b {
            Ok(Self { a, b })
        } else {
            Err(InequalityError::InvalidWindow { a, b })
        }
    }

    /// Tightest window over realized factors; `[0, 0]` when there are none.
    pub fn realized(factors: &Factors) -> Self {
        match &factors.ln_range {
            Some((lo, hi)) => Self {
                a: lo.to_f64(),
                b: hi.to_f64(),
            },
            None => Self { a: 0.0, b: 0.0 },
        }
    }
}

/// Sufficient statistics of a positive factor multiset.
#[derive(Debug, Clone)]
pub struct Factors {
    function: String,
    graph: Option<GraphSummary>,
    count: u64,
    sum: ExtFloat,
    sum_sq: ExtFloat,
    ln_prod: ExtFloat,
    ln_range: Option<(ExtFloat, ExtFloat)>,
    all_ge_one: bool,
    all_le_one: bool,
}

impl Factors {
    /// Factors of `f` on `g`; isolated vertices are skipped.
    pub fn from_graph(g: &Graph, f: &DegreeFunction) -> Result<Self, InequalityError> {
        let set = factor_values(g, f, IsolatedPolicy::Exclude)?;
        let mut out = Self::from_values(f.name(), &set.values)?;
        out.graph = Some(GraphSummary {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
        });
        Ok(out)
    }

    pub fn from_values(function: &str, values: &[f64]) -> Result<Self, InequalityError> {
        if let Some(&value) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(InequalityError::InvalidFactor { value });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut sum = ExtFloat::zero();
        let mut sum_sq = ExtFloat::zero();
        let mut ln_prod = ExtFloat::zero();
        let mut ln_range: Option<(ExtFloat, ExtFloat)> = None;
        for run in sorted.chunk_by(|a, b| a == b) {
            let x = ExtFloat::from_f64(run[0]);
            let c = ExtFloat::from_u64(run.len() as u64);
            let ln_x = x.ln();
            sum = sum.add(&x.mul(&c));
            sum_sq = sum_sq.add(&x.mul(&x).mul(&c));
            ln_prod = ln_prod.add(&ln_x.mul(&c));
            ln_range = Some(match ln_range {
                None => (ln_x.clone(), ln_x),
                Some((lo, _)) => (lo, ln_x),
            });
        }
        Ok(Self {
            function: function.to_string(),
            graph: None,
            count: values.len() as u64,
            sum,
            sum_sq,
            ln_prod,
            ln_range,
            all_ge_one: values.iter().all(|&v| v >= 1.0),
            all_le_one: values.iter().all(|&v| v <= 1.0),
        })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `X_Σ`.
    pub fn sum(&self) -> &ExtFloat {
        &self.sum
    }

    /// `ln X_Π`.
    pub fn ln_product(&self) -> &ExtFloat {
        &self.ln_prod
    }

    fn n(&self) -> ExtFloat {
        ExtFloat::from_u64(self.count)
    }

    fn nonempty(&self) -> Result<(), String> {
        if self.count == 0 {
            Err("no factors: the mean is undefined, check is vacuous".into())
        } else {
            Ok(())
        }
    }

    // X_Π^{k/n}, taken as 0 without factors so vacuous checks read 0 <= 0.
    fn geometric_power(&self, k: u64) -> ExtFloat {
        if self.count == 0 {
            return ExtFloat::zero();
        }
        self.ln_prod.mul(&ExtFloat::from_u64(k)).div(&self.n()).exp()
    }

    fn mean(&self) -> ExtFloat {
        if self.count == 0 {
            ExtFloat::zero()
        } else {
            self.sum.div(&self.n())
        }
    }

    /// `X_Π^{1/n} <= X_Σ / n`.
    pub fn jensen(&self) -> InequalityCheck {
        InequalityCheck::new(
            InequalityKind::Jensen,
            self,
            self.geometric_power(1),
            self.mean(),
            self.nonempty(),
        )
    }

    /// `X_Σ / n <= e^a + e^b − e^{a+b} / X_Π^{1/n}` for `a <= ln F <= b`.
    pub fn jensen_converse(&self, window: BoundsWindow) -> InequalityCheck {
        let a = ExtFloat::from_f64(window.a);
        let b = ExtFloat::from_f64(window.b);
        let hypothesis = self.nonempty().and_then(|()| self.window_contains(&a, &b));
        self.converse_with(a, b, hypothesis)
    }

    /// [`Self::jensen_converse`] with the exact realized window.
    pub fn jensen_converse_realized(&self) -> InequalityCheck {
        let (a, b) = self.ln_range.clone().unwrap_or((ExtFloat::zero(), ExtFloat::zero()));
        self.converse_with(a, b, self.nonempty())
    }

    fn converse_with(&self, a: ExtFloat, b: ExtFloat, hypothesis: Result<(), String>) -> InequalityCheck {
        let mean_ln = if self.count == 0 {
            ExtFloat::zero()
        } else {
            self.ln_prod.div(&self.n())
        };
        let rhs = a.exp().add(&b.exp()).sub(&a.add(&b).sub(&mean_ln).exp());
        InequalityCheck::new(InequalityKind::JensenConverse, self, self.mean(), rhs, hypothesis)
    }

    fn window_contains(&self, a: &ExtFloat, b: &ExtFloat) -> Result<(), String> {
        let Some((lo, hi)) = &self.ln_range else {
            return Ok(());
        };
        let slack = |x: &ExtFloat| ExtFloat::one().max(&x.abs()).mul(&ExtFloat::from_f64(WINDOW_TOLERANCE));
        if a > b {
            return Err(format!("window [{a}, {b}] is empty"));
        }
        if lo.add(&slack(lo)) < *a || hi.sub(&slack(hi)) > *b {
            return Err(format!("window [{a}, {b}] does not contain realized ln F range [{lo}, {hi}]"));
        }
        Ok(())
    }

    /// `X_{Σ,F²} + n(n−1) X_Π^{2/n} <= X_Σ²` and
    /// `X_Σ² <= (n−1) X_{Σ,F²} + n X_Π^{2/n}`.
    pub fn kober(&self) -> (InequalityCheck, InequalityCheck) {
        let n = self.n();
        let n_minus_1 = n.sub(&ExtFloat::one());
        let g2 = self.geometric_power(2);
        let square = self.sum.mul(&self.sum);
        let lower = InequalityCheck::new(
            InequalityKind::KoberLower,
            self,
            self.sum_sq.add(&n.mul(&n_minus_1).mul(&g2)),
            square.clone(),
            self.nonempty(),
        );
        let upper = InequalityCheck::new(
            InequalityKind::KoberUpper,
            self,
            square,
            n_minus_1.mul(&self.sum_sq).add(&n.mul(&g2)),
            self.nonempty(),
        );
        (lower, upper)
    }

    /// `X_Σ <= X_Π + n − 1`, asserted only when all `ln F` share a sign.
    pub fn petrovic_sum(&self) -> InequalityCheck {
        let rhs = self.ln_prod.exp().add(&self.n()).sub(&ExtFloat::one());
        let hypothesis = if self.all_ge_one || self.all_le_one {
            Ok(())
        } else {
            Err("ln F takes both signs; the Petrovic bound needs F >= 1 throughout or F <= 1 throughout".into())
        };
        InequalityCheck::new(InequalityKind::PetrovicSum, self, self.sum.clone(), rhs, hypothesis)
    }

    /// `ln X_Π + 1 <= X_Π`.
    pub fn exp_linear(&self) -> InequalityCheck {
        InequalityCheck::new(
            InequalityKind::ExpLinear,
            self,
            self.ln_prod.add(&ExtFloat::one()),
            self.ln_prod.exp(),
            Ok(()),
        )
    }

    /// All six checks, the converse on the realized window.
    pub fn all_checks(&self) -> Vec<InequalityCheck> {
        let (lower, upper) = self.kober();
        vec![
            self.jensen(),
            self.jensen_converse_realized(),
            lower,
            upper,
            self.petrovic_sum(),
            self.exp_linear(),
        ]
    }
}

pub fn check_jensen(g: &Graph, f: &DegreeFunction) -> Result<InequalityCheck, InequalityError> {
    Ok(Factors::from_graph(g, f)?.jensen())
}

pub fn check_jensen_converse(g: &Graph, f: &DegreeFunction, window: BoundsWindow) -> Result<InequalityCheck, InequalityError> {
    Ok(Factors::from_graph(g, f)?.jensen_converse(window))
}

pub fn check_kober(g: &Graph, f: &DegreeFunction) -> Result<(InequalityCheck, InequalityCheck), InequalityError> {
    Ok(Factors::from_graph(g, f)?.kober())
}

pub fn check_petrovic_sum(g: &Graph, f: &DegreeFunction) -> Result<InequalityCheck, InequalityError> {
    Ok(Factors::from_graph(g, f)?.petrovic_sum())
}

pub fn check_exp_linear(g: &Graph, f: &DegreeFunction) -> Result<InequalityCheck, InequalityError> {
    Ok(Factors::from_graph(g, f)?.exp_linear())
}
