//! Seeded generators for Erdős–Rényi, random geometric and bipartite random
//! graphs, plus their closed-form expected degrees.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("connection probability p = {0} is outside [0, 1]")]
    Probability(f64),
    #[error("connection radius r = {0} is outside [0, sqrt(2)]")]
    Radius(f64),
    #[error("{0} must be a positive vertex count")]
    Size(&'static str),
    #[error("target mean degree {k} is not reachable for {model} with n = {n}")]
    UnreachableMeanDegree { model: ModelKind, n: usize, k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Er,
    Rg,
    Br,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Er => "er",
            ModelKind::Rg => "rg",
            ModelKind::Br => "br",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(ModelKind::Er),
            "rg" => Ok(ModelKind::Rg),
            "br" => Ok(ModelKind::Br),
            other => Err(format!("unknown model {other:?} (expected er, rg or br)")),
        }
    }
}

/// One point of a random-graph model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Er { n: usize, p: f64 },
    Rg { n: usize, r: f64 },
    Br { n1: usize, n2: usize, p: f64 },
}

impl ModelSpec {
    pub fn er(n: usize, p: f64) -> Result<Self, ModelError> {
        let spec = ModelSpec::Er { n, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rg(n: usize, r: f64) -> Result<Self, ModelError> {
        let spec = ModelSpec::Rg { n, r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn br(n1: usize, n2: usize, p: f64) -> Result<Self, ModelError> {
        let spec = ModelSpec::Br { n1, n2, p };
        spec.validate()?;
        Ok(spec)
    }

    /// Parameters chosen so the theoretical mean degree equals `k`.
    ///
    /// ER uses `p = k/(n-1)`, RG inverts `g(r) = k/(n-1)` numerically and BR
    /// uses `p = k (n1+n2) / (2 n1 n2)`.
    pub fn with_mean_degree(kind: ModelKind, sizes: (usize, usize), k: f64) -> Result<Self, ModelError> {
        let unreachable = |n| ModelError::UnreachableMeanDegree { model: kind, n, k };
        match kind {
            ModelKind::Er | ModelKind::Rg => {
                let n = sizes.0;
                if n < 2 || k.is_nan() || k < 0.0 {
                    return Err(unreachable(n));
                }
                let q = k / (n - 1) as f64;
                if q > 1.0 {
                    return Err(unreachable(n));
                }
                if kind == ModelKind::Er {
                    Self::er(n, q)
                } else {
                    Self::rg(n, radius_for_connection_probability(q)?)
                }
            }
            ModelKind::Br => {
                let (n1, n2) = sizes;
                if n1 == 0 || n2 == 0 || k.is_nan() || k < 0.0 {
                    return Err(unreachable(n1 + n2));
                }
                let p = k * (n1 + n2) as f64 / (2.0 * n1 as f64 * n2 as f64);
                if p > 1.0 {
                    return Err(unreachable(n1 + n2));
                }
                Self::br(n1, n2, p)
            }
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check_p = |p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(ModelError::Probability(p))
            }
        };
        match *self {
            ModelSpec::Er { n, p } => {
                if n == 0 {
                    return Err(ModelError::Size("n"));
                }
                check_p(p)
            }
            ModelSpec::Rg { n, r } => {
                if n == 0 {
                    return Err(ModelError::Size("n"));
                }
                if !(0.0..=SQRT_2).contains(&r) {
                    return Err(ModelError::Radius(r));
                }
                Ok(())
            }
            ModelSpec::Br { n1, n2, p } => {
                if n1 == 0 {
                    return Err(ModelError::Size("n1"));
                }
                if n2 == 0 {
                    return Err(ModelError::Size("n2"));
                }
                check_p(p)
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Er { .. } => ModelKind::Er,
            ModelSpec::Rg { .. } => ModelKind::Rg,
            ModelSpec::Br { .. } => ModelKind::Br,
        }
    }

    /// Total vertex count (`n1 + n2` for BR).
    pub fn vertex_count(&self) -> usize {
        match *self {
            ModelSpec::Er { n, .. } | ModelSpec::Rg { n, .. } => n,
            ModelSpec::Br { n1, n2, .. } => n1 + n2,
        }
    }

    /// `("p", p)` or `("r", r)`.
    pub fn parameter(&self) -> (&'static str, f64) {
        match *self {
            ModelSpec::Er { p, .. } | ModelSpec::Br { p, .. } => ("p", p),
            ModelSpec::Rg { r, .. } => ("r", r),
        }
    }

    pub fn set_sizes(&self) -> Option<(usize, usize)> {
        match *self {
            ModelSpec::Br { n1, n2, .. } => Some((n1, n2)),
            _ => None,
        }
    }

    /// Expected degrees: `(n-1)p`, `(n-1)g(r)`, or `n2 p` / `n1 p` per set.
    pub fn mean_degree(&self) -> MeanDegree {
        match *self {
            ModelSpec::Er { n, p } => MeanDegree::single((n as f64 - 1.0) * p),
            ModelSpec::Rg { n, r } => MeanDegree::single((n as f64 - 1.0) * connection_probability(r)),
            ModelSpec::Br { n1, n2, p } => {
                let (a, b) = (n1 as f64, n2 as f64);
                MeanDegree {
                    network: 2.0 * a * b * p / (a + b),
                    per_set: Some((b * p, a * p)),
                }
            }
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelSpec::Er { n, p } => write!(f, "ER(n={n}, p={p})"),
            ModelSpec::Rg { n, r } => write!(f, "RG(n={n}, r={r})"),
            ModelSpec::Br { n1, n2, p } => write!(f, "BR(n1={n1}, n2={n2}, p={p})"),
        }
    }
}

/// Expected degree of a model point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanDegree {
    /// Network-level `<k>`; for BR this is `2 n1 n2 p / (n1 + n2)`.
    pub network: f64,
    /// `(<d1>, <d2>)` for bipartite models.
    pub per_set: Option<(f64, f64)>,
}

impl MeanDegree {
    fn single(k: f64) -> Self {
        Self {
            network: k,
            per_set: None,
        }
    }
}

/// Identifies the random stream of one replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTriple {
    pub master_seed: u64,
    pub point_id: u64,
    pub replica_index: u64,
}

impl SeedTriple {
    pub fn new(master_seed: u64, point_id: u64, replica_index: u64) -> Self {
        Self {
            master_seed,
            point_id,
            replica_index,
        }
    }

    /// 64-bit stream key: the triple chained through splitmix64 finalizers.
    pub fn stream_key(&self) -> u64 {
        let mut h = splitmix64(self.master_seed);
        h = splitmix64(h ^ self.point_id.wrapping_mul(0xD1B5_4A32_D192_ED03));
        splitmix64(h ^ self.replica_index.wrapping_mul(0xAEF1_7502_108E_F2D9))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream_key())
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws one graph. Identical `(spec, seed)` always yields the same graph.
pub fn generate(spec: &ModelSpec, seed: SeedTriple) -> Result<Graph, ModelError> {
    spec.validate()?;
    let mut rng = seed.rng();
    Ok(match *spec {
        ModelSpec::Er { n, p } => erdos_renyi(n, p, &mut rng),
        ModelSpec::Rg { n, r } => random_geometric(n, r, &mut rng),
        ModelSpec::Br { n1, n2, p } => bipartite(n1, n2, p, &mut rng),
    })
}

// One uniform draw per candidate pair, in canonical pair order.
fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let n32 = n as Vertex;
    let mut edges = Vec::with_capacity((p * (n * n.saturating_sub(1)) as f64 / 2.0) as usize);
    for u in 0..n32 {
        for v in u + 1..n32 {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_sorted_unchecked(n, edges)
}

fn random_geometric<R: Rng>(n: usize, r: f64, rng: &mut R) -> Graph {
    // All positions are drawn before any distance test.
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let r2 = r * r;
    let mut edges = Vec::new();
    for (u, &(xu, yu)) in points.iter().enumerate() {
        for (v, &(xv, yv)) in points.iter().enumerate().skip(u + 1) {
            let (dx, dy) = (xu - xv, yu - yv);
            if dx * dx + dy * dy <= r2 {
                edges.push((u as Vertex, v as Vertex));
            }
        }
    }
    Graph::from_sorted_unchecked(n, edges)
}

// Set 1 is 0..n1, set 2 is n1..n1+n2.
fn bipartite<R: Rng>(n1: usize, n2: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n1 as Vertex {
        for v in n1 as Vertex..(n1 + n2) as Vertex {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_sorted_unchecked(n1 + n2, edges)
}

/// Probability that two uniform points of the unit square lie within
/// distance `r`, for `0 <= r <= sqrt(2)`.
pub fn g_of_r(r: f64) -> Result<f64, ModelError> {
    if !(0.0..=SQRT_2).contains(&r) {
        return Err(ModelError::Radius(r));
    }
    Ok(connection_probability(r))
}

fn connection_probability(r: f64) -> f64 {
    if r <= 1.0 {
        g_short_range(r)
    } else {
        g_long_range(r)
    }
}

/// Branch of `g` valid for `0 <= r <= 1`.
pub fn g_short_range(r: f64) -> f64 {
    r * r * (PI - 8.0 / 3.0 * r + 0.5 * r * r)
}

/// Branch of `g` valid for `1 <= r <= sqrt(2)`.
pub fn g_long_range(r: f64) -> f64 {
    let r2 = r * r;
    let inv = (1.0 / r).min(1.0);
    1.0 / 3.0 - 2.0 * r2 * (1.0 - inv.asin() + inv.acos())
        + 4.0 / 3.0 * (2.0 * r2 + 1.0) * (r2 - 1.0).max(0.0).sqrt()
        - 0.5 * r2 * r2
}

/// Inverse of `g` by bisection.
pub fn radius_for_connection_probability(q: f64) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(ModelError::Probability(q));
    }
    if q == 1.0 {
        return Ok(SQRT_2);
    }
    let (mut lo, mut hi) = (0.0f64, SQRT_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if connection_probability(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
