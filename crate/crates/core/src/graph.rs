//! Weighted undirected graphs, the edge-list text format, and the incidence
//! and Laplacian matrices built from them.
//!
//! Edges are stored canonically as `(u, v)` with `u < v`, sorted by `(u, v)`,
//! with parallel edges merged by summing their weights. The signed incidence
//! row of edge `(u, v)` is `-1` at `u` and `+1` at `v`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// Index of an edge in a [`WeightedGraph`]'s edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// An immutable weighted undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples, canonicalizing orientation and
    /// merging parallel edges. Self-loops, nonpositive or non-finite weights and
    /// out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        let mut raw = Vec::new();
        for (idx, (u, v, w)) in edges.into_iter().enumerate() {
            let line = idx + 1;
            check_edge(line, n, u, v, w)?;
            raw.push(Edge {
                u: u.min(v),
                v: u.max(v),
                w,
            });
        }
        Ok(Self {
            n,
            edges: merge_parallel(raw),
        })
    }

    /// Parses the edge-list text format.
    ///
    /// An optional `# n=<int> m=<int>` header fixes the vertex count; without
    /// it `n` is one more than the largest vertex id. Any other text after `#`
    /// is a comment. `m` in the header is informational since parallel lines
    /// are merged.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header_n: Option<usize> = None;
        let mut raw = Vec::new();
        let mut max_id: Option<usize> = None;

        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let (body, comment) = match line.find('#') {
                Some(pos) => (&line[..pos], Some(&line[pos + 1..])),
                None => (line, None),
            };
            if let Some(comment) = comment {
                if raw.is_empty() && header_n.is_none() {
                    header_n = parse_header(comment, lineno)?;
                }
            }
            let mut fields = body.split_whitespace();
            let Some(first) = fields.next() else {
                continue;
            };
            let u = parse_vertex(first, lineno)?;
            let v = parse_vertex(
                fields.next().ok_or_else(|| parse_err(lineno, "expected `u v w`"))?,
                lineno,
            )?;
            let wtok = fields.next().ok_or_else(|| parse_err(lineno, "missing weight"))?;
            if fields.next().is_some() {
                return Err(parse_err(lineno, "trailing fields"));
            }
            let w = f64::from_str(wtok)
                .map_err(|_| parse_err(lineno, &format!("bad weight `{wtok}`")))?;
            if !w.is_finite() {
                return Err(parse_err(lineno, &format!("non-finite weight `{wtok}`")));
            }
            if w <= 0.0 {
                return Err(Error::NonPositiveWeight { line: lineno, weight: w });
            }
            if u == v {
                return Err(Error::SelfLoop { line: lineno, vertex: u });
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            raw.push((lineno, u, v, w));
        }

        let n = match (header_n, max_id) {
            (Some(n), _) => n,
            (None, Some(m)) => m
                .checked_add(1)
                .ok_or(Error::VertexOutOfRange { vertex: m, n: m })?,
            (None, None) => return Err(parse_err(0, "empty graph without a header")),
        };
        if n == 0 {
            return Err(parse_err(0, "header declares n=0"));
        }
        let mut edges = Vec::with_capacity(raw.len());
        for (line, u, v, w) in raw {
            check_edge(line, n, u, v, w)?;
            edges.push(Edge {
                u: u.min(v),
                v: u.max(v),
                w,
            });
        }
        Ok(Self {
            n,
            edges: merge_parallel(edges),
        })
    }

    /// Serializes to the edge-list format: header, then edges sorted by
    /// `(u, v)` with weights at 17 significant digits.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(32 * (self.edges.len() + 1));
        let _ = writeln!(out, "# n={} m={}", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {:.16e}", e.u, e.v, e.w);
        }
        out
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id.0]
    }

    /// Looks up the edge joining `u` and `v` in either orientation.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(EdgeId)
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    /// `w_max / w_min`, or `None` for an edgeless graph.
    pub fn weight_ratio(&self) -> Option<f64> {
        Some(self.max_weight()? / self.min_weight()?)
    }

    /// Unweighted degree of every vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Returns a copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        Ok(Self {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| Edge { w: e.w * factor, ..*e })
                .collect(),
        })
    }

    /// `xᵀLx = Σ w_uv (x_u - x_v)²`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let d = x[e.u] - x[e.v];
                e.w * d * d
            })
            .sum()
    }

    /// Breadth-first reachability from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.n
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// `L = D - A` in CSR form.
    pub fn laplacian(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(4 * self.edges.len());
        for e in &self.edges {
            triplets.push((e.u, e.u, e.w));
            triplets.push((e.v, e.v, e.w));
            triplets.push((e.u, e.v, -e.w));
            triplets.push((e.v, e.u, -e.w));
        }
        CsrMatrix::from_triplets(self.n, self.n, triplets)
    }

    /// Signed `m × n` edge-vertex incidence matrix.
    pub fn incidence(&self) -> CsrMatrix {
        let triplets = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| [(i, e.u, -1.0), (i, e.v, 1.0)]);
        CsrMatrix::from_triplets(self.edges.len(), self.n, triplets)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.w).collect()
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }
}

impl FromStr for WeightedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn parse_vertex(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|e| {
        use std::num::IntErrorKind;
        match e.kind() {
            IntErrorKind::PosOverflow => parse_err(line, &format!("vertex id `{tok}` overflows")),
            _ => parse_err(line, &format!("bad vertex id `{tok}`")),
        }
    })
}

fn parse_header(comment: &str, line: usize) -> Result<Option<usize>> {
    let mut n = None;
    for tok in comment.split_whitespace() {
        if let Some(val) = tok.strip_prefix("n=") {
            n = Some(
                val.parse::<usize>()
                    .map_err(|_| parse_err(line, &format!("bad header value `{tok}`")))?,
            );
        } else if let Some(val) = tok.strip_prefix("m=") {
            val.parse::<usize>()
                .map_err(|_| parse_err(line, &format!("bad header value `{tok}`")))?;
        }
    }
    Ok(n)
}

fn check_edge(line: usize, n: usize, u: usize, v: usize, w: f64) -> Result<()> {
    if u >= n {
        return Err(Error::VertexOutOfRange { vertex: u, n });
    }
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    if u == v {
        return Err(Error::SelfLoop { line, vertex: u });
    }
    if !w.is_finite() {
        return Err(parse_err(line, &format!("non-finite weight {w}")));
    }
    if w <= 0.0 {
        return Err(Error::NonPositiveWeight { line, weight: w });
    }
    Ok(())
}

fn merge_parallel(mut edges: Vec<Edge>) -> Vec<Edge> {
    // stable sort keeps the summation order of parallel copies reproducible
    edges.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
    let mut merged: Vec<Edge> = Vec::with_capacity(edges.len());
    for e in edges {
        match merged.last_mut() {
            Some(last) if last.u == e.u && last.v == e.v => last.w += e.w,
            _ => merged.push(e),
        }
    }
    merged
}
