//! Exhaustive solver for small instances: every support is solved in closed
//! form and the best one is kept.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tridiag::PIVOT_TOLERANCE;

/// Largest `n` accepted by [`enumerate`].
pub const MAX_VARIABLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub x: Vec<f64>,
    pub z: Vec<bool>,
    pub supports_enumerated: u64,
}

/// Cholesky solve of `A x = b` for a dense row-major SPD matrix.
fn cholesky_solve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let k = b.len();
    let mut l = vec![0.0; k * k];
    for r in 0..k {
        for col in 0..=r {
            let mut s = a[r * k + col];
            for t in 0..col {
                s -= l[r * k + t] * l[col * k + t];
            }
            if r == col {
                if s <= PIVOT_TOLERANCE {
                    return Err(Error::SingularSupport);
                }
                l[r * k + r] = s.sqrt();
            } else {
                l[r * k + col] = s / l[col * k + col];
            }
        }
    }
    let mut y = vec![0.0; k];
    for r in 0..k {
        let s: f64 = (0..r).map(|t| l[r * k + t] * y[t]).sum();
        y[r] = (b[r] - s) / l[r * k + r];
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|t| l[t * k + r] * x[t]).sum();
        x[r] = (y[r] - s) / l[r * k + r];
    }
    Ok(x)
}

fn solve_support(inst: &Instance, dense: &[f64], z: &[bool]) -> Result<(Vec<f64>, f64)> {
    let n = inst.n;
    let support: Vec<usize> = (0..n).filter(|&i| z[i]).collect();
    let k = support.len();
    let mut qs = vec![0.0; k * k];
    for (r, &i) in support.iter().enumerate() {
        for (col, &j) in support.iter().enumerate() {
            qs[r * k + col] = dense[i * n + j];
        }
    }
    let rhs: Vec<f64> = support.iter().map(|&i| -inst.c[i]).collect();
    let xs = cholesky_solve(&qs, &rhs)?;
    let mut x = vec![0.0; n];
    let mut value = 0.0;
    for (r, &i) in support.iter().enumerate() {
        x[i] = xs[r];
        value += inst.a[i] + inst.c[i] * xs[r];
        let qx: f64 = (0..k).map(|col| qs[r * k + col] * xs[col]).sum();
        value += 0.5 * xs[r] * qx;
    }
    Ok((x, value))
}

/// Minimizer of the objective with the support fixed to `z`.
pub fn fixed_z_qp(inst: &Instance, z: &[bool]) -> Result<(Vec<f64>, f64)> {
    if z.len() != inst.n {
        return Err(Error::DimensionMismatch(format!("z has {} entries, n = {}", z.len(), inst.n)));
    }
    solve_support(inst, &inst.dense_q(), z)
}

fn mask_to_z(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Orders by value, then by `z` lexicographically with `false < true`.
fn better(u: (f64, u64), v: (f64, u64)) -> bool {
    match u.0.total_cmp(&v.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            let diff = u.1 ^ v.1;
            diff != 0 && u.1 & (diff & diff.wrapping_neg()) == 0
        }
    }
}

/// Global minimum over all `2^n` supports.
pub fn enumerate(inst: &Instance) -> Result<OracleResult> {
    let n = inst.n;
    if n > MAX_VARIABLES {
        return Err(Error::TooLarge { size: n, limit: MAX_VARIABLES });
    }
    let dense = inst.dense_q();
    let total = 1u64 << n;
    let best = (0..total)
        .into_par_iter()
        .map(|mask| match solve_support(inst, &dense, &mask_to_z(mask, n)) {
            Ok((_, v)) => (v, mask),
            Err(_) => {
                log::debug!("support {mask:#b} is singular, skipped");
                (f64::INFINITY, mask)
            }
        })
        .reduce(|| (f64::INFINITY, u64::MAX), |u, v| if better(u, v) { u } else { v });
    let z = mask_to_z(best.1, n);
    let (x, value) = solve_support(inst, &dense, &z)?;
    Ok(OracleResult {
        value,
        x,
        z,
        supports_enumerated: total,
    })
}
