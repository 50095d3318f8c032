//! Seeded instance families. Every generator is a pure function of its
//! parameters and seed; the draw order is part of the contract and is listed
//! on each function so that other implementations can reproduce the bytes.

use super::{big_m_of, Entry, Instance, Meta};
use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Random tridiagonal instance.
///
/// Draw order: `c_i ~ U[-10, 3)` for all `i`, then `a_i ~ U[0, 1)`, then
/// `Q_{i,i+1} ~ U[-2, 2)`, then `u_i ~ U[0, 4)` with
/// `Q_ii = |Q_{i-1,i}| + |Q_{i,i+1}| + u_i`.
pub fn gen_tridiagonal(n: usize, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let mut rng = CounterRng::new(seed);
    let c: Vec<f64> = (0..n).map(|_| rng.uniform(-10.0, 3.0)).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 1.0)).collect();
    let off: Vec<f64> = (0..n - 1).map(|_| rng.uniform(-2.0, 2.0)).collect();
    let mut q = Vec::with_capacity(2 * n);
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = off.get(i).map_or(0.0, |v| v.abs());
        q.push(Entry {
            i,
            j: i,
            v: left + right + rng.uniform(0.0, 4.0),
        });
        if i + 1 < n {
            q.push(Entry { i, j: i + 1, v: off[i] });
        }
    }
    Instance::new(a, c, q)
}

/// `mu * sum z + sum (x_t - y_t)^2 + sum (x_{t+1} - x_t)^2` for given
/// observations. The constant `sum y_t^2` becomes the offset.
pub fn signal1d_instance(y: &[f64], mu: f64) -> Result<Instance> {
    let n = y.len();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one observation".into()));
    }
    let mut q = Vec::with_capacity(2 * n);
    for t in 0..n {
        let neighbors = (t > 0) as usize + (t + 1 < n) as usize;
        q.push(Entry {
            i: t,
            j: t,
            v: 2.0 + 2.0 * neighbors as f64,
        });
        if t + 1 < n {
            q.push(Entry { i: t, j: t + 1, v: -2.0 });
        }
    }
    let c = y.iter().map(|v| -2.0 * v).collect();
    let offset = y.iter().map(|v| v * v).sum();
    Ok(Instance::new(vec![mu; n], c, q)?.with_offset(offset).with_meta(Meta {
        y: Some(y.to_vec()),
        big_m: Some(big_m_of(y)),
    }))
}

/// Sparse, smoothly changing signal observed with Gaussian noise.
///
/// Ground truth: `k = max(1, n / 100)` bumps of length
/// `L = max(1, round(0.1 n / k))`, one per block of `n / k` samples. For each
/// bump, in order: start offset `below(block - L + 1)` (0 if the block is
/// shorter than `L`), amplitude `U[1, 3)`, and a sign draw (`U[0,1) < 0.5`
/// means negative). The bump value at offset `s` is
/// `A sin(pi (s + 1) / (L + 1))`. Then `y_t = truth_t + sigma * N(0, 1)`.
pub fn gen_signal1d(n: usize, sigma: f64, mu: f64, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidParameter("signal length must be >= 2".into()));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter("sigma must be >= 0".into()));
    }
    let mut rng = CounterRng::new(seed);
    let bumps = (n / 100).max(1);
    let len = ((0.1 * n as f64 / bumps as f64).round() as usize).max(1);
    let block = n / bumps;
    let mut truth = vec![0.0; n];
    for b in 0..bumps {
        let start = b * block + if block >= len { rng.below(block - len + 1) } else { 0 };
        let mut amp = rng.uniform(1.0, 3.0);
        if rng.next_f64() < 0.5 {
            amp = -amp;
        }
        for s in 0..len {
            if let Some(t) = truth.get_mut(start + s) {
                *t = amp * (std::f64::consts::PI * (s + 1) as f64 / (len + 1) as f64).sin();
            }
        }
    }
    let y: Vec<f64> = truth.iter().map(|t| t + rng.normal(0.0, sigma)).collect();
    signal1d_instance(&y, mu)
}

/// Sparse MAP estimation on a `rows x cols` grid:
/// `mu * sum z + sum_i (y_i - x_i)^2 + sum_{edges} (x_i - x_j)^2`
/// (unit noise weights and unit distances). Node `(r, c)` is variable
/// `r * cols + c`.
pub fn lattice2d_instance(rows: usize, cols: usize, y: &[f64], mu: f64) -> Result<Instance> {
    let n = rows * cols;
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("{} observations for a {rows}x{cols} grid", y.len())));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let mut q = Vec::with_capacity(3 * n);
    for r in 0..rows {
        for col in 0..cols {
            let i = r * cols + col;
            let deg = (r > 0) as usize + (r + 1 < rows) as usize + (col > 0) as usize + (col + 1 < cols) as usize;
            q.push(Entry {
                i,
                j: i,
                v: 2.0 + 2.0 * deg as f64,
            });
            if col + 1 < cols {
                q.push(Entry { i, j: i + 1, v: -2.0 });
            }
            if r + 1 < rows {
                q.push(Entry { i, j: i + cols, v: -2.0 });
            }
        }
    }
    let c = y.iter().map(|v| -2.0 * v).collect();
    let offset = y.iter().map(|v| v * v).sum();
    Ok(Instance::new(vec![mu; n], c, q)?.with_offset(offset).with_meta(Meta {
        y: Some(y.to_vec()),
        big_m: Some(big_m_of(y)),
    }))
}

/// Grid instance with rectangular active patches.
///
/// Ground truth: `p = max(1, round(0.1 rows cols / 9))` square patches of side
/// `min(3, rows, cols)`. For each patch, in order: top row
/// `below(rows - side + 1)`, left column `below(cols - side + 1)`, amplitude
/// `U[1, 2)`; later patches overwrite earlier ones. Then, in variable order,
/// `y_i = truth_i + sigma * N(0, 1)`.
pub fn gen_lattice2d(rows: usize, cols: usize, sigma: f64, mu: f64, seed: u64) -> Result<Instance> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParameter("grid needs rows, cols >= 2".into()));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter("sigma must be >= 0".into()));
    }
    let mut rng = CounterRng::new(seed);
    let patches = ((0.1 * (rows * cols) as f64 / 9.0).round() as usize).max(1);
    let side = 3.min(rows).min(cols);
    let mut truth = vec![0.0; rows * cols];
    for _ in 0..patches {
        let r0 = rng.below(rows - side + 1);
        let c0 = rng.below(cols - side + 1);
        let amp = rng.uniform(1.0, 2.0);
        for r in r0..r0 + side {
            for col in c0..c0 + side {
                truth[r * cols + col] = amp;
            }
        }
    }
    let y: Vec<f64> = truth.iter().map(|t| t + rng.normal(0.0, sigma)).collect();
    lattice2d_instance(rows, cols, &y, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_path_in_order(inst: &Instance) -> bool {
        inst.support_graph().edges.iter().all(|&(i, j, _)| j == i + 1)
    }

    #[test]
    fn tridiagonal_is_valid_path() {
        let inst = gen_tridiagonal(10, 1).unwrap();
        inst.validate().unwrap();
        assert!(is_path_in_order(&inst));
        assert_eq!(inst.support_graph().edges.len(), 9);
    }

    #[test]
    fn tridiagonal_single_variable() {
        let inst = gen_tridiagonal(1, 7).unwrap();
        assert_eq!(inst.q.len(), 1);
        assert!((0.0..4.0).contains(&inst.q[0].v));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_tridiagonal(30, 5).unwrap(), gen_tridiagonal(30, 5).unwrap());
        assert_ne!(gen_tridiagonal(30, 5).unwrap(), gen_tridiagonal(30, 6).unwrap());
        assert_eq!(gen_signal1d(200, 0.5, 0.02, 2).unwrap(), gen_signal1d(200, 0.5, 0.02, 2).unwrap());
        assert_eq!(gen_lattice2d(5, 6, 0.3, 0.1, 8).unwrap(), gen_lattice2d(5, 6, 0.3, 0.1, 8).unwrap());
    }

    #[test]
    fn signal_residuals_are_two() {
        let inst = gen_signal1d(40, 0.1, 0.01, 3).unwrap();
        let dd = inst.validate().unwrap();
        for d in dd.d {
            assert!((d - 2.0).abs() < 1e-12);
        }
        assert!(is_path_in_order(&inst));
        let y = inst.meta.y.as_ref().unwrap();
        assert!((inst.offset - y.iter().map(|v| v * v).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn signal_truth_density() {
        let inst = gen_signal1d(1000, 0.0, 0.01, 11).unwrap();
        let nz = inst.meta.y.as_ref().unwrap().iter().filter(|v| **v != 0.0).count();
        assert_eq!(nz, 100);
    }

    #[test]
    fn lattice_structure() {
        let inst = gen_lattice2d(2, 2, 0.3, 0.1, 1).unwrap();
        assert_eq!(inst.n, 4);
        let g = inst.support_graph();
        assert_eq!(g.edges.len(), 4);
        assert!(g.bipartition().is_some());
        let big = gen_lattice2d(10, 10, 0.3, 0.1, 1).unwrap();
        assert_eq!(big.support_graph().edges.len(), 180);
        let dd = big.validate().unwrap();
        assert!(dd.d.iter().all(|&d| (d - 2.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_tridiagonal(0, 1).is_err());
        assert!(gen_signal1d(1, 0.1, 0.1, 1).is_err());
        assert!(gen_signal1d(5, -0.1, 0.1, 1).is_err());
        assert!(gen_lattice2d(1, 5, 0.1, 0.1, 1).is_err());
    }
}
