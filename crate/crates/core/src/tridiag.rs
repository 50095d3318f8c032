//! Exact solver for the tridiagonal problem
//!
//! ```text
//! min  a'z + c'x + (1/2) x'Qx   s.t.  x_i (1 - z_i) = 0,  z binary
//! ```
//!
//! with `Q` tridiagonal and positive definite. The problem is a shortest path
//! on the DAG with nodes `0..=m+1`: arc `(i, j)`, `j > i`, sets `z = 1` on
//! variables `i+1..j-1` (1-based) and zero on the endpoints. Its length is
//! the optimal value of that block, which the forward elimination below
//! produces in O(1) per arc.

use crate::error::{Error, Result};

/// Pivots at or below this value are treated as loss of definiteness.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Path-structured instance. `off[k]` couples variables `k` and `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagProblem {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpSolution {
    pub objective: f64,
    pub z: Vec<bool>,
    pub x: Vec<f64>,
    /// Zero-based variables visited by the shortest path, i.e. `z_i = 0`.
    pub visited: Vec<usize>,
}

impl TridiagProblem {
    pub fn new(a: Vec<f64>, c: Vec<f64>, diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty tridiagonal problem".into()));
        }
        if a.len() != m || c.len() != m || off.len() + 1 != m {
            return Err(Error::DimensionMismatch(format!(
                "a: {}, c: {}, diag: {m}, off: {} (expected m - 1)",
                a.len(),
                c.len(),
                off.len()
            )));
        }
        Ok(TridiagProblem { a, c, diag, off })
    }

    /// Reads an instance whose off-diagonals all join `i` and `i + 1`.
    pub fn from_instance(inst: &crate::Instance) -> Result<Self> {
        let mut off = vec![0.0; inst.n - 1];
        for e in inst.off_diagonal() {
            if e.j != e.i + 1 {
                return Err(Error::NotPathForest);
            }
            off[e.i] += e.v;
        }
        TridiagProblem::new(inst.a.clone(), inst.c.clone(), inst.diagonal(), off)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `a'z + c'x + (1/2) x'Qx` without checking complementarity.
    pub fn objective(&self, x: &[f64], z: &[bool]) -> f64 {
        let mut v = 0.0;
        for t in 0..self.len() {
            if z[t] {
                v += self.a[t];
            }
            v += self.c[t] * x[t] + 0.5 * self.diag[t] * x[t] * x[t];
            if t + 1 < self.len() {
                v += self.off[t] * x[t] * x[t + 1];
            }
        }
        v
    }

    /// Forward elimination over the whole matrix; fails on a non-positive pivot.
    pub fn check_positive_definite(&self) -> Result<()> {
        let mut q = self.diag[0];
        if q <= PIVOT_TOLERANCE {
            return Err(Error::NotPositiveDefinite { index: 0, pivot: q });
        }
        for t in 1..self.len() {
            q = self.diag[t] - self.off[t - 1] * self.off[t - 1] / q;
            if q <= PIVOT_TOLERANCE {
                return Err(Error::NotPositiveDefinite { index: t, pivot: q });
            }
        }
        Ok(())
    }
}

/// Weights `w_ij` of the arcs leaving node `i`, for `j = i+2..=m+1`.
///
/// The arc `(i, i+1)` has weight 0 and is not produced. Yields an error and
/// stops if a pivot is not positive.
pub struct ArcWeights<'a> {
    p: &'a TridiagProblem,
    i: usize,
    j: usize,
    cbar: f64,
    qbar: f64,
    wbar: f64,
    failed: bool,
}

pub fn arc_weight_row(p: &TridiagProblem, i: usize) -> ArcWeights<'_> {
    assert!(i < p.len(), "arc row {i} out of range for m = {}", p.len());
    ArcWeights {
        p,
        i,
        j: i + 2,
        cbar: 0.0,
        qbar: 0.0,
        wbar: 0.0,
        failed: false,
    }
}

impl Iterator for ArcWeights<'_> {
    type Item = Result<(usize, f64)>;

    fn next(&mut self) -> Option<Self::Item> {
        let p = self.p;
        if self.failed || self.j > p.len() + 1 {
            return None;
        }
        // Variable entering the block (0-based).
        let t = self.j - 2;
        if t == self.i {
            self.cbar = p.c[t];
            self.qbar = p.diag[t];
        } else {
            let l = p.off[t - 1];
            self.cbar = p.c[t] - l * self.cbar / self.qbar;
            self.qbar = p.diag[t] - l * l / self.qbar;
        }
        if self.qbar <= PIVOT_TOLERANCE {
            self.failed = true;
            return Some(Err(Error::NotPositiveDefinite {
                index: t,
                pivot: self.qbar,
            }));
        }
        self.wbar += p.a[t] - self.cbar * self.cbar / (2.0 * self.qbar);
        let j = self.j;
        self.j += 1;
        Some(Ok((j, self.wbar)))
    }
}

/// Shortest-path labels `l_0..=l_{m+1}` and predecessors.
///
/// Arcs are relaxed in topological order with strict improvement, so ties go
/// to the smaller predecessor.
pub fn shortest_path_labels(p: &TridiagProblem) -> Result<(Vec<f64>, Vec<usize>)> {
    let m = p.len();
    let mut label = vec![f64::INFINITY; m + 2];
    let mut pred = vec![usize::MAX; m + 2];
    label[0] = 0.0;
    for i in 0..=m {
        if label[i] < label[i + 1] {
            label[i + 1] = label[i];
            pred[i + 1] = i;
        }
        if i == m {
            break;
        }
        for arc in arc_weight_row(p, i) {
            let (j, w) = arc?;
            let cand = label[i] + w;
            if cand < label[j] {
                label[j] = cand;
                pred[j] = i;
            }
        }
    }
    Ok((label, pred))
}

/// Solves the problem to global optimality in O(m^2) time and O(m) memory.
pub fn solve(p: &TridiagProblem) -> Result<SpSolution> {
    let m = p.len();
    let (label, pred) = shortest_path_labels(p)?;
    let mut nodes = vec![m + 1];
    let mut v = m + 1;
    while v != 0 {
        v = pred[v];
        nodes.push(v);
    }
    nodes.reverse();

    let mut z = vec![false; m];
    let mut x = vec![0.0; m];
    for w in nodes.windows(2) {
        let (u, v) = (w[0], w[1]);
        // Variables u..v-1 (1-based u+1..v-1) form a nonzero block.
        if v > u + 1 {
            let block = solve_block(p, u, v - 1)?;
            x[u..v - 1].copy_from_slice(&block);
            z[u..v - 1].iter_mut().for_each(|zi| *zi = true);
        }
    }
    let visited = nodes[1..nodes.len() - 1].iter().map(|v| v - 1).collect();
    Ok(SpSolution {
        objective: label[m + 1],
        z,
        x,
        visited,
    })
}

/// `x` for a fixed support: zero where `z` is off, and the stationary point of
/// each maximal block of ones. Returns `x` and the objective at `(x, z)`.
pub fn solve_fixed_z(p: &TridiagProblem, z: &[bool]) -> Result<(Vec<f64>, f64)> {
    let m = p.len();
    if z.len() != m {
        return Err(Error::DimensionMismatch(format!("z has {} entries, m = {m}", z.len())));
    }
    let mut x = vec![0.0; m];
    let mut t = 0;
    while t < m {
        if !z[t] {
            t += 1;
            continue;
        }
        let start = t;
        while t < m && z[t] {
            t += 1;
        }
        let block = solve_block(p, start, t)?;
        x[start..t].copy_from_slice(&block);
    }
    let value = p.objective(&x, z);
    Ok((x, value))
}

/// Solves `Q[s..e] x = -c[s..e]`.
fn solve_block(p: &TridiagProblem, s: usize, e: usize) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = p.c[s..e].iter().map(|v| -v).collect();
    let off = if e > s + 1 { &p.off[s..e - 1] } else { &[][..] };
    thomas_solve(&p.diag[s..e], off, &rhs).map_err(|err| match err {
        Error::NotPositiveDefinite { index, pivot } => Error::NotPositiveDefinite {
            index: index + s,
            pivot,
        },
        other => other,
    })
}

/// Solves the symmetric tridiagonal system with diagonal `diag` and
/// off-diagonal `off` by forward elimination and back substitution.
pub fn thomas_solve(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n || off.len() + 1 != n.max(1) {
        return Err(Error::DimensionMismatch(format!(
            "diag: {n}, off: {}, rhs: {}",
            off.len(),
            rhs.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut q = vec![0.0; n];
    let mut y = vec![0.0; n];
    q[0] = diag[0];
    y[0] = rhs[0];
    if q[0] <= PIVOT_TOLERANCE {
        return Err(Error::NotPositiveDefinite { index: 0, pivot: q[0] });
    }
    for k in 1..n {
        let f = off[k - 1] / q[k - 1];
        q[k] = diag[k] - f * off[k - 1];
        y[k] = rhs[k] - f * y[k - 1];
        if q[k] <= PIVOT_TOLERANCE {
            return Err(Error::NotPositiveDefinite { index: k, pivot: q[k] });
        }
    }
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / q[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = (y[k] - off[k] * x[k + 1]) / q[k];
    }
    Ok(x)
}
