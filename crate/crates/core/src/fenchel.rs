//! Conjugate of the two-variable perspective term
//!
//! ```text
//! f(x, z) = (x1 + sign x2)^2 / min(1, z1 + z2),   z in [0, 1]^2
//! f*(alpha, beta) = sup  alpha (x1 + sign x2) - beta1 z1 - beta2 z2 - f(x, z)
//!                 = max(0, alpha^2/4 - min beta) - min(max beta, 0)
//! ```
//!
//! The value depends on `x` only through `s = x1 + sign x2`, so neither the
//! conjugate nor its subgradient depends on the sign.

use crate::instance::Sign;

/// Multiplier on `s` used in place of an unbounded one when `z = 0, s != 0`.
pub const ASYMPTOTIC_RHO: f64 = 1e6;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DualTriple {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl DualTriple {
    pub fn new(alpha: f64, beta1: f64, beta2: f64) -> Self {
        DualTriple { alpha, beta1, beta2 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta1, self.beta2]
    }
}

pub fn f_star(d: &DualTriple) -> f64 {
    let lo = d.beta1.min(d.beta2);
    let hi = d.beta1.max(d.beta2);
    (d.alpha * d.alpha / 4.0 - lo).max(0.0) - hi.min(0.0)
}

/// A subgradient of `f*` in `(alpha, beta1, beta2)`. Ties `beta1 == beta2`
/// take the `(alpha/2, -1, 0)` branch.
pub fn f_star_subgradient(d: &DualTriple) -> [f64; 3] {
    let q = d.alpha * d.alpha / 4.0;
    let (b1, b2) = (d.beta1, d.beta2);
    if b1 > q && b2 > q {
        [0.0, 0.0, 0.0]
    } else if b1 <= q && b2 >= 0.0 && b2 >= b1 {
        [d.alpha / 2.0, -1.0, 0.0]
    } else if b2 <= q && b1 >= 0.0 && b1 > b2 {
        [d.alpha / 2.0, 0.0, -1.0]
    } else {
        // Both negative: every other combination is excluded above.
        [d.alpha / 2.0, -1.0, -1.0]
    }
}

/// `s^2 / min(1, z1 + z2)` with `0/0 = 0` and `s^2/0 = +inf`.
pub fn perspective(s: f64, z1: f64, z2: f64) -> f64 {
    let den = (z1 + z2).min(1.0);
    if den <= 0.0 {
        if s == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        s * s / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightDuals {
    pub duals: DualTriple,
    /// The exact maximizer is unbounded; `duals` uses [`ASYMPTOTIC_RHO`].
    pub asymptotic: bool,
}

/// Duals attaining `f(x, z) = alpha s - beta1 z1 - beta2 z2 - f*(alpha, beta)`.
pub fn tight_duals(x1: f64, x2: f64, z1: f64, z2: f64, sign: Sign) -> TightDuals {
    let s = x1 + sign.as_f64() * x2;
    let zsum = z1 + z2;
    let (duals, asymptotic) = if zsum <= 0.0 {
        if s == 0.0 {
            (DualTriple::default(), false)
        } else {
            let alpha = ASYMPTOTIC_RHO * s;
            let beta = alpha * alpha / 4.0;
            (DualTriple::new(alpha, beta, beta), true)
        }
    } else if zsum < 1.0 {
        let alpha = 2.0 * s / zsum;
        let beta = alpha * alpha / 4.0;
        (DualTriple::new(alpha, beta, beta), false)
    } else {
        (DualTriple::new(2.0 * s, 0.0, 0.0), false)
    };
    TightDuals { duals, asymptotic }
}

/// Search grid for [`f_star_bruteforce`]: `s` on `[-s_max, s_max]` with step
/// `s_step`, each `z_i` on `{0, z_step, 2 z_step, ..., 1}`.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub s_max: f64,
    pub s_step: f64,
    pub z_step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            s_max: 20.0,
            s_step: 0.01,
            z_step: 0.25,
        }
    }
}

/// Grid maximum of the defining supremum; a lower bound on [`f_star`].
pub fn f_star_bruteforce(d: &DualTriple, grid: &Grid) -> f64 {
    let ns = (2.0 * grid.s_max / grid.s_step).round() as i64;
    let nz = (1.0 / grid.z_step).round() as i64;
    let mut best = f64::NEG_INFINITY;
    for a in 0..=nz {
        let z1 = a as f64 * grid.z_step;
        for b in 0..=nz {
            let z2 = b as f64 * grid.z_step;
            let fixed = -d.beta1 * z1 - d.beta2 * z2;
            for k in 0..=ns {
                let s = -grid.s_max + k as f64 * grid.s_step;
                let v = d.alpha * s + fixed - perspective(s, z1, z2);
                if v > best {
                    best = v;
                }
            }
        }
    }
    best
}
