//! Simple undirected graphs with a cached degree sequence.
//!
//! Edges are stored canonically (`u < v`) and sorted lexicographically, so
//! every pass over [`Graph::edges`] visits them in the same order. All
//! floating-point accumulations downstream rely on that order for
//! bit-identical results under a fixed seed.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

/// Vertex identifier.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge ({u}, {v}) references a vertex outside [0, {n})")]
    OutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: Vertex, v: Vertex },
    #[error("vertex count {0} exceeds the supported maximum")]
    TooManyVertices(usize),
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge list header declares {declared} edges but {found} were read")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("edge list I/O: {0}")]
    Io(String),
}

/// Immutable simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    degrees: Vec<u32>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list.
    ///
    /// Pairs are canonicalized to `u < v` before the duplicate check, so
    /// `(0, 1)` and `(1, 0)` collide.
    pub fn new(n: usize, edge_list: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        if n > Vertex::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            edges.push(if u < v { (u, v) } else { (v, u) });
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            let (u, v) = w[0];
            return Err(GraphError::DuplicateEdge { u, v });
        }
        Ok(Self::from_sorted_unchecked(n, edges))
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            degrees: vec![0; n],
        }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let n32 = n as Vertex;
        let edges = (0..n32)
            .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
            .collect();
        Self::from_sorted_unchecked(n, edges)
    }

    /// Path `P_n` on vertices `0..n`.
    pub fn path(n: usize) -> Self {
        let edges = (1..n as Vertex).map(|v| (v - 1, v)).collect();
        Self::from_sorted_unchecked(n, edges)
    }

    /// Cycle `C_n`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least three vertices");
        let mut edges: Vec<_> = (1..n as Vertex).map(|v| (v - 1, v)).collect();
        edges.push((0, n as Vertex - 1));
        edges.sort_unstable();
        Self::from_sorted_unchecked(n, edges)
    }

    /// Trusted constructor for generators that emit edges in canonical order.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u < v && (v as usize) < n));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut degrees = vec![0u32; n];
        for &(u, v) in &edges {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        Self { n, edges, degrees }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges in ascending lexicographic order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.degrees[v as usize]
    }

    /// Degree pairs `(d_u, d_v)` of every edge, in canonical edge order.
    pub fn edge_degrees(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges
            .iter()
            .map(|&(u, v)| (self.degrees[u as usize], self.degrees[v as usize]))
    }

    pub fn isolated_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 0).count()
    }

    /// Empirical mean degree `2m/n`, zero for the null graph.
    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    pub fn degree_summary(&self) -> DegreeSummary {
        DegreeSummary {
            min_degree: self.degrees.iter().copied().min().unwrap_or(0),
            max_degree: self.degrees.iter().copied().max().unwrap_or(0),
            mean_degree_empirical: self.mean_degree(),
            isolated_count: self.isolated_count(),
        }
    }

    /// Reads the `n m` / `u v` edge-list format.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(|e| GraphError::Io(e.to_string())))
            .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()));

        let (line_no, header) = lines.next().transpose()?.ok_or(GraphError::Parse {
            line: 1,
            message: "missing `n m` header".into(),
        })?;
        let [n, m] = parse_pair::<usize>(&header, line_no)?;

        let mut edges = Vec::with_capacity(m);
        for item in lines {
            let (line_no, line) = item?;
            let [u, v] = parse_pair::<Vertex>(&line, line_no)?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(GraphError::EdgeCountMismatch {
                declared: m,
                found: edges.len(),
            });
        }
        Self::new(n, &edges)
    }

    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_edge_list_string().as_bytes())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 10);
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn parse_pair<T: std::str::FromStr>(line: &str, line_no: usize) -> Result<[T; 2], GraphError> {
    let mut it = line.split_ascii_whitespace();
    let mut next = || -> Result<T, GraphError> {
        let tok = it.next().ok_or_else(|| GraphError::Parse {
            line: line_no,
            message: format!("expected two integers, got {line:?}"),
        })?;
        tok.parse().map_err(|_| GraphError::Parse {
            line: line_no,
            message: format!("invalid integer {tok:?}"),
        })
    };
    let pair = [next()?, next()?];
    if it.next().is_some() {
        return Err(GraphError::Parse {
            line: line_no,
            message: format!("trailing tokens in {line:?}"),
        });
    }
    Ok(pair)
}

/// Degree statistics of a single graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeSummary {
    pub min_degree: u32,
    pub max_degree: u32,
    /// `2m/n`, zero when `n = 0`.
    pub mean_degree_empirical: f64,
    pub isolated_count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_p3_degrees() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), &[1, 2, 1]);
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
    }

    #[test]
    fn rejects_duplicate_after_canonicalization() {
        assert_eq!(
            Graph::new(4, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { u: 0, v: 1 })
        );
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            Graph::new(3, &[(0, 3)]),
            Err(GraphError::OutOfRange { u: 0, v: 3, n: 3 })
        ));
    }

    #[test]
    fn summaries() {
        let p3 = Graph::path(3).degree_summary();
        assert_eq!((p3.min_degree, p3.max_degree, p3.isolated_count), (1, 2, 0));
        assert!((p3.mean_degree_empirical - 4.0 / 3.0).abs() < 1e-15);

        let empty = Graph::empty(5).degree_summary();
        assert_eq!(
            empty,
            DegreeSummary {
                min_degree: 0,
                max_degree: 0,
                mean_degree_empirical: 0.0,
                isolated_count: 5
            }
        );

        let k4 = Graph::complete(4).degree_summary();
        assert_eq!((k4.min_degree, k4.max_degree, k4.isolated_count), (3, 3, 0));
        assert_eq!(k4.mean_degree_empirical, 3.0);

        assert_eq!(Graph::empty(0).degree_summary().mean_degree_empirical, 0.0);
    }

    #[test]
    fn cycle_is_two_regular() {
        let c5 = Graph::cycle(5);
        assert_eq!(c5.edge_count(), 5);
        assert!(c5.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(5, &[(3, 1), (0, 4), (2, 1)]).unwrap();
        let text = g.to_edge_list_string();
        assert_eq!(text, "5 3\n0 4\n1 2\n1 3\n");
        assert_eq!(Graph::read_edge_list(text.as_bytes()).unwrap(), g);
    }

    #[test]
    fn reader_rejects_inconsistent_edge_count() {
        let err = Graph::read_edge_list("3 2\n0 1\n".as_bytes()).unwrap_err();
        assert_eq!(err, GraphError::EdgeCountMismatch { declared: 2, found: 1 });
        let err = Graph::read_edge_list("3 1\n0 1\n1 2\n".as_bytes()).unwrap_err();
        assert_eq!(err, GraphError::EdgeCountMismatch { declared: 1, found: 2 });
    }

    #[test]
    fn reader_rejects_garbage() {
        assert!(matches!(
            Graph::read_edge_list("3 1\n0 x\n".as_bytes()),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Graph::read_edge_list("".as_bytes()),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Graph::read_edge_list("2 1\n1 1\n".as_bytes()),
            Err(GraphError::SelfLoop(1))
        ));
    }

    fn arb_edge_list() -> impl Strategy<Value = (usize, Vec<(Vertex, Vertex)>)> {
        (1usize..40).prop_flat_map(|n| {
            let pairs = prop::collection::vec((0..n as Vertex, 0..n as Vertex), 0..120);
            (Just(n), pairs)
        })
    }

    proptest! {
        #[test]
        fn handshake_and_degree_cache((n, raw) in arb_edge_list()) {
            let mut seen = std::collections::BTreeSet::new();
            let cleaned: Vec<_> = raw
                .into_iter()
                .filter(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
                .collect();
            let g = Graph::new(n, &cleaned).unwrap();
            let total: u64 = g.degrees().iter().map(|&d| d as u64).sum();
            prop_assert_eq!(total, 2 * g.edge_count() as u64);

            let mut recount = vec![0u32; n];
            for &(u, v) in g.edges() {
                prop_assert!(u < v);
                recount[u as usize] += 1;
                recount[v as usize] += 1;
            }
            prop_assert_eq!(recount.as_slice(), g.degrees());
            prop_assert!(g.edges().windows(2).all(|w| w[0] < w[1]));

            let s = g.degree_summary();
            prop_assert!(s.min_degree as f64 <= s.mean_degree_empirical + 1e-12);
            prop_assert!(s.mean_degree_empirical <= s.max_degree as f64 + 1e-12);
            prop_assert!(s.isolated_count <= n);
        }
    }
}
