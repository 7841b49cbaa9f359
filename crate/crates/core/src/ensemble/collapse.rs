//! Scaling-collapse comparison of `<ln X_Π>/n` curves against `<k>`.
//!
//! Rows of one index are grouped into curves by model and size. Every curve
//! is linearly interpolated onto the union of the curves' `<k>` values inside
//! the common `<k>` range, and curves are compared pairwise at those points.

use std::fmt::Write as _;

use super::{EnsembleError, ResultRow, ResultsTable};
use crate::dense_limit::{predict, MeanDegrees, DENSE_REGIME_MEAN_DEGREE};
use crate::index::IndexKind;

const MIN_POINTS_IN_OVERLAP: usize = 5;

/// Identity of one curve: input table, model and sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveKey {
    pub table: usize,
    pub model: String,
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
}

impl CurveKey {
    fn of(table: usize, row: &ResultRow) -> Self {
        Self {
            table,
            model: row.model.clone(),
            n: row.n,
            n1: row.n1,
            n2: row.n2,
        }
    }

    pub fn label(&self) -> String {
        match (self.n1, self.n2) {
            (Some(a), Some(b)) => format!("t{}:{}_n1={a}_n2={b}", self.table, self.model),
            _ => format!("t{}:{}_n={}", self.table, self.model, self.n),
        }
    }
}

#[derive(Debug, Clone)]
struct Curve {
    key: CurveKey,
    /// `(<k>, mean_ln/n, sem/n)`, sorted by `<k>`.
    points: Vec<(f64, f64, f64)>,
}

impl Curve {
    fn interpolate(&self, k: f64) -> (f64, f64) {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.0 < k);
        if i < pts.len() && pts[i].0 == k {
            return (pts[i].1, pts[i].2);
        }
        let (lo, hi) = if i == 0 {
            (pts[0], pts[1.min(pts.len() - 1)])
        } else if i == pts.len() {
            (pts[pts.len().saturating_sub(2)], pts[pts.len() - 1])
        } else {
            (pts[i - 1], pts[i])
        };
        if hi.0 == lo.0 {
            return (lo.1, lo.2);
        }
        let t = (k - lo.0) / (hi.0 - lo.0);
        (lo.1 + t * (hi.1 - lo.1), lo.2 + t * (hi.2 - lo.2))
    }

    fn dense_prediction(&self, index: &IndexKind, k: f64) -> Option<f64> {
        let model = self.key.model.parse().ok()?;
        let degrees = match (self.key.n1, self.key.n2) {
            (Some(n1), Some(n2)) => {
                let total = (n1 + n2) as f64;
                MeanDegrees::Bipartite {
                    d1: k * total / (2.0 * n1 as f64),
                    d2: k * total / (2.0 * n2 as f64),
                }
            }
            _ => MeanDegrees::Single(k),
        };
        predict(model, index, degrees).ok().map(|p| p.value)
    }
}

/// Deviation between two curves at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDeviation {
    pub k: f64,
    pub a: CurveKey,
    pub b: CurveKey,
    pub deviation: f64,
    /// `sqrt(sem_a² + sem_b²)` of the normalized curves.
    pub pooled_sem: f64,
}

#[derive(Debug, Clone)]
pub struct CollapseReport {
    pub index: String,
    /// Shared `<k>` grid.
    pub grid: Vec<f64>,
    pub curves: Vec<CurveKey>,
    /// `values[c][i]`: curve `c` interpolated at `grid[i]`.
    pub values: Vec<Vec<f64>>,
    pub sems: Vec<Vec<f64>>,
    pub pairs: Vec<PairDeviation>,
    /// Largest pairwise deviation and where it occurs.
    pub max_deviation: f64,
    pub max_location: Option<PairDeviation>,
    /// Max |curve − dense-limit prediction| over grid points with `<k> >= 10`,
    /// `None` when the index has no prediction or the grid stays below 10.
    pub dense_limit_deviation: Option<f64>,
}

impl CollapseReport {
    /// Every pair point satisfies `deviation <= max(tolerance, sem_factor · pooled_sem)`.
    pub fn passes(&self, tolerance: f64, sem_factor: f64) -> bool {
        self.pairs
            .iter()
            .all(|p| p.deviation <= tolerance.max(sem_factor * p.pooled_sem))
    }

    /// Largest `deviation / max(tolerance, sem_factor · pooled_sem)` over pair points.
    pub fn worst_ratio(&self, tolerance: f64, sem_factor: f64) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.deviation / tolerance.max(sem_factor * p.pooled_sem))
            .fold(0.0, f64::max)
    }

    /// One row per grid point: `k`, each curve, max pairwise deviation, its pooled sem.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k");
        for c in &self.curves {
            let _ = write!(out, ",{}", c.label());
        }
        out.push_str(",max_deviation,pooled_sem\n");
        for (i, k) in self.grid.iter().enumerate() {
            let _ = write!(out, "{k:?}");
            for v in &self.values {
                let _ = write!(out, ",{:?}", v[i]);
            }
            let worst = self
                .pairs
                .iter()
                .filter(|p| p.k == *k)
                .max_by(|a, b| a.deviation.total_cmp(&b.deviation));
            match worst {
                Some(p) => {
                    let _ = writeln!(out, ",{:?},{:?}", p.deviation, p.pooled_sem);
                }
                None => out.push_str(",,\n"),
            }
        }
        out
    }

    pub fn summary(&self, tolerance: f64, sem_factor: f64) -> String {
        let mut s = format!(
            "index {}: {} curves over {} grid points in <k> [{:.4}, {:.4}]\n",
            self.index,
            self.curves.len(),
            self.grid.len(),
            self.grid.first().copied().unwrap_or(f64::NAN),
            self.grid.last().copied().unwrap_or(f64::NAN),
        );
        if let Some(loc) = &self.max_location {
            let _ = writeln!(
                s,
                "max deviation {:.6} at <k> = {:.4} between {} and {} (pooled sem {:.6})",
                self.max_deviation,
                loc.k,
                loc.a.label(),
                loc.b.label(),
                loc.pooled_sem
            );
        }
        match self.dense_limit_deviation {
            Some(d) => {
                let _ = writeln!(s, "max deviation from dense limit for <k> >= 10: {d:.6}");
            }
            None => s.push_str("dense-limit comparison: not available\n"),
        }
        let verdict = if self.passes(tolerance, sem_factor) { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{verdict} at tolerance {tolerance} (sem factor {sem_factor}, worst ratio {:.4})",
            self.worst_ratio(tolerance, sem_factor)
        );
        s
    }
}

/// Compares the `index` curves of every model/size found in `tables`.
pub fn collapse_check(tables: &[ResultsTable], index: &str) -> Result<CollapseReport, EnsembleError> {
    let mut curves: Vec<Curve> = Vec::new();
    for (t, table) in tables.iter().enumerate() {
        let mut found = false;
        for row in table.rows_for(index) {
            found = true;
            let key = CurveKey::of(t, row);
            let y = row.mean_ln_over_n;
            if !y.is_finite() || !row.mean_k_theory.is_finite() {
                continue;
            }
            let sem = row.sem / row.n as f64;
            let point = (row.mean_k_theory, y, sem);
            match curves.iter_mut().find(|c| c.key == key) {
                Some(c) => c.points.push(point),
                None => curves.push(Curve {
                    key,
                    points: vec![point],
                }),
            }
        }
        if !found {
            return Err(EnsembleError::IndexNotPresent {
                index: index.to_string(),
                table: t,
            });
        }
    }
    if curves.len() < 2 {
        return Err(EnsembleError::TooFewCurves(curves.len()));
    }
    for c in &mut curves {
        c.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let lo = curves.iter().map(|c| c.points[0].0).fold(f64::NEG_INFINITY, f64::max);
    let hi = curves
        .iter()
        .map(|c| c.points[c.points.len() - 1].0)
        .fold(f64::INFINITY, f64::min);
    let eps = 1e-9 * hi.abs().max(1.0);
    if !(lo <= hi) {
        return Err(EnsembleError::InsufficientOverlap(format!(
            "curve ranges do not intersect (lower {lo}, upper {hi})"
        )));
    }
    for c in &curves {
        let inside = c.points.iter().filter(|p| p.0 >= lo - eps && p.0 <= hi + eps).count();
        if inside < MIN_POINTS_IN_OVERLAP {
            return Err(EnsembleError::InsufficientOverlap(format!(
                "{} has {inside} points in <k> [{lo}, {hi}], need {MIN_POINTS_IN_OVERLAP}",
                c.key.label()
            )));
        }
    }

    let mut grid: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .filter(|&k| k >= lo - eps && k <= hi + eps)
        .map(|k| k.clamp(lo, hi))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));

    let (values, sems): (Vec<Vec<f64>>, Vec<Vec<f64>>) = curves
        .iter()
        .map(|c| grid.iter().map(|&k| c.interpolate(k)).unzip())
        .unzip();

    let mut pairs = Vec::new();
    for a in 0..curves.len() {
        for b in a + 1..curves.len() {
            for (i, &k) in grid.iter().enumerate() {
                pairs.push(PairDeviation {
                    k,
                    a: curves[a].key.clone(),
                    b: curves[b].key.clone(),
                    deviation: (values[a][i] - values[b][i]).abs(),
                    pooled_sem: sems[a][i].hypot(sems[b][i]),
                });
            }
        }
    }
    let max_location = pairs
        .iter()
        .max_by(|x, y| x.deviation.total_cmp(&y.deviation))
        .cloned();

    let kind: Option<IndexKind> = index.parse().ok();
    let dense_limit_deviation = kind.and_then(|kind| {
        let mut worst: Option<f64> = None;
        for (c, curve) in curves.iter().enumerate() {
            for (i, &k) in grid.iter().enumerate() {
                if k < DENSE_REGIME_MEAN_DEGREE {
                    continue;
                }
                if let Some(pred) = curve.dense_prediction(&kind, k) {
                    let d = (values[c][i] - pred).abs();
                    worst = Some(worst.map_or(d, |w: f64| w.max(d)));
                }
            }
        }
        worst
    });

    Ok(CollapseReport {
        index: index.to_string(),
        grid,
        curves: curves.into_iter().map(|c| c.key).collect(),
        values,
        sems,
        max_deviation: max_location.as_ref().map_or(0.0, |p| p.deviation),
        max_location,
        pairs,
        dense_limit_deviation,
    })
}
