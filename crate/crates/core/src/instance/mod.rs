//! Problem data: `min a'z + c'x + (1/2) x'Qx  s.t.  x_i (1 - z_i) = 0, z binary`.
//!
//! `Q` is kept as upper-triangle coordinate triplets with zero-based indices.
//! The JSON file format uses one-based indices (see [`io`]).

mod generate;
pub mod io;

pub use generate::{
    gen_lattice2d, gen_signal1d, gen_tridiagonal, lattice2d_instance, signal1d_instance,
};

use crate::error::{Error, Result};

/// Absolute slack admitted when checking `D_ii >= 0`.
pub const DD_TOLERANCE: f64 = 1e-9;

/// One stored entry `Q_ij` with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

/// Generator metadata: observations and the big-M bound derived from them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Meta {
    pub y: Option<Vec<f64>>,
    pub big_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub q: Vec<Entry>,
    /// Constant added to reported objective values (e.g. `sum y_t^2`).
    pub offset: f64,
    pub meta: Meta,
}

/// Sign of a pairwise term `w (x_i + sign * x_j)^2`, equal to `sign(Q_ij)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `w (x_i + sign * x_j)^2` with `i < j` and `w = |Q_ij| > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub w: f64,
    pub sign: Sign,
}

impl PairTerm {
    /// `x_i + sign * x_j`.
    pub fn combine(&self, x: &[f64]) -> f64 {
        x[self.i] + self.sign.as_f64() * x[self.j]
    }
}

/// Diagonally dominant split:
/// `x'Qx = sum D_ii x_i^2 + sum w (x_i + sign x_j)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DdForm {
    pub d: Vec<f64>,
    pub terms: Vec<PairTerm>,
}

impl DdForm {
    /// `(1/2) x'Qx` evaluated through the split.
    pub fn half_quad_form(&self, x: &[f64]) -> f64 {
        let diag: f64 = self.d.iter().zip(x).map(|(d, xi)| d * xi * xi).sum();
        let pairs: f64 = self.terms.iter().map(|t| t.w * t.combine(x).powi(2)).sum();
        0.5 * (diag + pairs)
    }
}

/// Undirected graph with an edge wherever `Q_ij != 0`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGraph {
    pub n: usize,
    /// `(i, j, |Q_ij|)` with `i < j`, sorted lexicographically.
    pub edges: Vec<(usize, usize, f64)>,
}

impl SupportGraph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize, f64)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_by_key(|e| (e.0, e.1));
        SupportGraph { n, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j, _) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (k, &(i, j, _)) in self.edges.iter().enumerate() {
            adj[i].push((j, k));
            adj[j].push((i, k));
        }
        adj
    }

    /// Two-coloring, if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let adj = self.adjacency();
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for root in 0..self.n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                let cu = color[u].unwrap();
                for &(v, _) in &adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            stack.push(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap()).collect())
    }
}

impl Instance {
    /// Builds an instance, checking vector lengths and index ranges. Storage
    /// shape (triangle, duplicates) and dominance are checked by [`validate`].
    pub fn new(a: Vec<f64>, c: Vec<f64>, q: Vec<Entry>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidParameter("instance must have n >= 1".into()));
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch(format!("a has {n} entries, c has {}", c.len())));
        }
        if let Some(e) = q.iter().find(|e| e.i >= n || e.j >= n) {
            return Err(Error::DimensionMismatch(format!("entry ({}, {}) outside n = {n}", e.i, e.j)));
        }
        Ok(Instance {
            n,
            a,
            c,
            q,
            offset: 0.0,
            meta: Meta::default(),
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in self.q.iter().filter(|e| e.i == e.j) {
            d[e.i] += e.v;
        }
        d
    }

    /// Off-diagonal entries with nonzero value.
    pub fn off_diagonal(&self) -> impl Iterator<Item = &Entry> {
        self.q.iter().filter(|e| e.i != e.j && e.v != 0.0)
    }

    pub fn support_graph(&self) -> SupportGraph {
        SupportGraph::new(self.n, self.off_diagonal().map(|e| (e.i, e.j, e.v.abs())).collect())
    }

    /// `(1/2) x'Qx`.
    pub fn half_quad_form(&self, x: &[f64]) -> f64 {
        self.q
            .iter()
            .map(|e| {
                if e.i == e.j {
                    0.5 * e.v * x[e.i] * x[e.i]
                } else {
                    e.v * x[e.i] * x[e.j]
                }
            })
            .sum()
    }

    /// `a'z + c'x + (1/2) x'Qx`, without the offset. Does not check
    /// complementarity.
    pub fn objective(&self, x: &[f64], z: &[bool]) -> f64 {
        let az: f64 = self.a.iter().zip(z).filter(|(_, &zi)| zi).map(|(a, _)| a).sum();
        let cx: f64 = self.c.iter().zip(x).map(|(c, x)| c * x).sum();
        az + cx + self.half_quad_form(x)
    }

    /// Dense row-major copy of the full symmetric `Q`.
    pub fn dense_q(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for e in &self.q {
            m[e.i * n + e.j] += e.v;
            if e.i != e.j {
                m[e.j * n + e.i] += e.v;
            }
        }
        m
    }

    /// Checks storage and diagonal dominance and returns the split.
    pub fn validate(&self) -> Result<DdForm> {
        let mut seen = std::collections::HashSet::with_capacity(self.q.len());
        for e in &self.q {
            if e.i > e.j || !seen.insert((e.i, e.j)) {
                return Err(Error::NotSymmetricStorage { i: e.i, j: e.j });
            }
        }
        let mut d = self.diagonal();
        let mut terms = Vec::new();
        for e in self.off_diagonal() {
            let w = e.v.abs();
            d[e.i] -= w;
            d[e.j] -= w;
            terms.push(PairTerm {
                i: e.i,
                j: e.j,
                w,
                sign: Sign::of(e.v),
            });
        }
        if let Some((index, &residual)) = d.iter().enumerate().find(|(_, &r)| r < -DD_TOLERANCE) {
            return Err(Error::NotDiagonallyDominant { index, residual });
        }
        terms.sort_by_key(|t| (t.i, t.j));
        Ok(DdForm { d, terms })
    }

    /// Reindexes variables so that new variable `k` is old variable `pi[k]`.
    pub fn permute(&self, pi: &[usize]) -> Result<Instance> {
        let pos = inverse_permutation(pi, self.n)?;
        let q = self
            .q
            .iter()
            .map(|e| {
                let (u, v) = (pos[e.i], pos[e.j]);
                Entry {
                    i: u.min(v),
                    j: u.max(v),
                    v: e.v,
                }
            })
            .collect();
        let meta = Meta {
            y: self.meta.y.as_ref().map(|y| pi.iter().map(|&k| y[k]).collect()),
            big_m: self.meta.big_m,
        };
        Ok(Instance {
            n: self.n,
            a: pi.iter().map(|&k| self.a[k]).collect(),
            c: pi.iter().map(|&k| self.c[k]).collect(),
            q,
            offset: self.offset,
            meta,
        })
    }

    /// `M = max y - min y` from the generator observations.
    pub fn big_m(&self) -> Result<f64> {
        match &self.meta.y {
            Some(y) if !y.is_empty() => Ok(big_m_of(y)),
            _ => Err(Error::NoObservations),
        }
    }
}

pub fn big_m_of(y: &[f64]) -> f64 {
    let max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// Returns `pos` with `pos[pi[k]] = k`, rejecting anything that is not a
/// bijection on `0..n`.
pub fn inverse_permutation(pi: &[usize], n: usize) -> Result<Vec<usize>> {
    if pi.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for n = {n}", pi.len())));
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in pi.iter().enumerate() {
        if v >= n {
            return Err(Error::InvalidPermutation(format!("index {v} out of range")));
        }
        if pos[v] != usize::MAX {
            return Err(Error::InvalidPermutation(format!("index {v} repeated")));
        }
        pos[v] = k;
    }
    Ok(pos)
}
