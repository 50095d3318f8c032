//! Convex quadratic minimization with indicator variables,
//!
//! ```text
//! min  a'z + c'x + (1/2) x'Qx   s.t.  x_i (1 - z_i) = 0,  z in {0,1}^n,
//! ```
//!
//! for sparse `Q`.
//!
//! * [`tridiag`] solves the problem exactly when the support graph of `Q` is
//!   a path, as a shortest path with O(n^2) time and O(n) memory.
//! * [`decomp`] handles diagonally dominant `Q` on any support graph: it
//!   keeps a path-shaped part exact, relaxes the remaining pairwise terms
//!   through their Fenchel conjugates ([`fenchel`]) and maximizes the
//!   resulting dual bound by subgradient ascent, reporting a certified gap.
//! * [`cover`] picks which terms to keep, via degree-constrained subgraphs.
//! * [`oracle`] enumerates every support and is used for verification.
//!
//! ```
//! use indiqp::{instance::gen_tridiagonal, oracle, tridiag};
//!
//! let inst = gen_tridiagonal(12, 7).unwrap();
//! let p = tridiag::TridiagProblem::from_instance(&inst).unwrap();
//! let sol = tridiag::solve(&p).unwrap();
//! let exact = oracle::enumerate(&inst).unwrap();
//! assert!((sol.objective - exact.value).abs() < 1e-8);
//! ```

pub mod cover;
pub mod decomp;
pub mod error;
pub mod fenchel;
pub mod instance;
pub mod oracle;
pub mod rng;
pub mod tridiag;

pub use error::{Error, Result};
pub use instance::Instance;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/quickstart.md")]
    mod quickstart {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/path-solver.md")]
    mod path_solver {}
    #[doc = include_str!("../../../book/src/conjugate.md")]
    mod conjugate {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/covers.md")]
    mod covers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
