//! Dual decomposition for diagonally dominant instances.
//!
//! Under a variable ordering, the pairwise terms joining consecutive
//! positions are kept and solved exactly segment by segment with
//! [`tridiag::solve`]. Every other term `(1/2) w (x_i + sign x_j)^2` is
//! replaced by the affine minorant
//!
//! ```text
//! (1/2) w [alpha (x_i + sign x_j) - beta_i z_i - beta_j z_j - f*(alpha, beta)]
//! ```
//!
//! which makes the inner problem separable across segments. Its optimal
//! value `h(alpha, beta)` is a lower bound for every choice of duals; the
//! inner solution doubles as a feasible point, giving an upper bound.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::cover;
use crate::error::{Error, Result};
use crate::fenchel::{f_star, f_star_subgradient, DualTriple};
use crate::instance::{inverse_permutation, DdForm, Instance, PairTerm};
use crate::tridiag::{self, SpSolution, TridiagProblem, PIVOT_TOLERANCE};

/// Floor on the gap denominator.
pub const GAP_DENOMINATOR_FLOOR: f64 = 1e-8;

/// Positions `start..end` of the ordering, with the tridiagonal matrix of the
/// retained part restricted to them.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    /// Position `k` holds variable `ordering[k]`.
    pub ordering: Vec<usize>,
    pub position: Vec<usize>,
    pub retained: Vec<PairTerm>,
    pub relaxed: Vec<PairTerm>,
    pub segments: Vec<Segment>,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

/// Splits the terms of `dd` into retained and relaxed ones and builds the
/// segment matrices. `retained` lists variable pairs (either orientation)
/// that must be adjacent in `ordering`.
pub fn build_relaxation(
    inst: &Instance,
    dd: &DdForm,
    ordering: &[usize],
    retained: &[(usize, usize)],
) -> Result<Relaxation> {
    let n = inst.n;
    let position = inverse_permutation(ordering, n)?;
    let keep: std::collections::HashSet<(usize, usize)> =
        retained.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    let mut kept = Vec::new();
    let mut relaxed = Vec::new();
    for t in &dd.terms {
        if keep.contains(&(t.i, t.j)) {
            if position[t.i].abs_diff(position[t.j]) != 1 {
                return Err(Error::NotConsecutive { i: t.i, j: t.j });
            }
            kept.push(*t);
        } else {
            relaxed.push(*t);
        }
    }
    if kept.len() != keep.len() {
        let missing = keep
            .iter()
            .find(|&&(i, j)| !kept.iter().any(|t| t.i == i && t.j == j))
            .unwrap();
        return Err(Error::InvalidParameter(format!(
            "retained pair {missing:?} is not a term of the instance"
        )));
    }

    let mut diag: Vec<f64> = ordering.iter().map(|&v| dd.d[v]).collect();
    // off[k] couples positions k and k + 1; `None` means a segment boundary.
    let mut off: Vec<Option<f64>> = vec![None; n.saturating_sub(1)];
    for t in &kept {
        let (p, q) = (position[t.i], position[t.j]);
        diag[p] += t.w;
        diag[q] += t.w;
        off[p.min(q)] = Some(t.sign.as_f64() * t.w);
    }

    let mut segments = Vec::new();
    let mut start = 0;
    for k in 0..n {
        if k + 1 == n || off[k].is_none() {
            let seg = Segment {
                start,
                end: k + 1,
                diag: diag[start..=k].to_vec(),
                off: off[start..k].iter().map(|v| v.unwrap()).collect(),
            };
            check_segment(&seg)?;
            segments.push(seg);
            start = k + 1;
        }
    }
    Ok(Relaxation {
        ordering: ordering.to_vec(),
        position,
        retained: kept,
        relaxed,
        segments,
        a: inst.a.clone(),
        c: inst.c.clone(),
        d: dd.d.clone(),
    })
}

fn check_segment(seg: &Segment) -> Result<()> {
    let fail = Error::SegmentNotPd {
        start: seg.start,
        end: seg.end,
    };
    let mut q = seg.diag[0];
    if q <= PIVOT_TOLERANCE {
        return Err(fail);
    }
    for k in 1..seg.diag.len() {
        q = seg.diag[k] - seg.off[k - 1] * seg.off[k - 1] / q;
        if q <= PIVOT_TOLERANCE {
            return Err(fail);
        }
    }
    Ok(())
}

impl Relaxation {
    /// `(1/2) x'Qx` restricted to the diagonal residuals and retained terms,
    /// evaluated from the segment matrices (`x` in variable order).
    pub fn segment_quad_form(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for seg in &self.segments {
            for k in seg.start..seg.end {
                let xk = x[self.ordering[k]];
                v += 0.5 * seg.diag[k - seg.start] * xk * xk;
                if k + 1 < seg.end {
                    v += seg.off[k - seg.start] * xk * x[self.ordering[k + 1]];
                }
            }
        }
        v
    }

    /// The same quantity from the split: `(1/2)(sum D x^2 + sum_retained w (..)^2)`.
    pub fn retained_quad_form(&self, x: &[f64]) -> f64 {
        let diag: f64 = self.d.iter().zip(x).map(|(d, x)| d * x * x).sum();
        let pairs: f64 = self.retained.iter().map(|t| t.w * t.combine(x).powi(2)).sum();
        0.5 * (diag + pairs)
    }

    fn segment_problem(&self, seg: &Segment, a: &[f64], c: &[f64]) -> TridiagProblem {
        let vars = &self.ordering[seg.start..seg.end];
        TridiagProblem {
            a: vars.iter().map(|&v| a[v]).collect(),
            c: vars.iter().map(|&v| c[v]).collect(),
            diag: seg.diag.clone(),
            off: seg.off.clone(),
        }
    }
}

/// Linear coefficients of the inner problem, in variable order.
pub fn assemble_psi(r: &Relaxation, duals: &[DualTriple]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(duals.len(), r.relaxed.len(), "one dual triple per relaxed term");
    let mut a = r.a.clone();
    let mut c = r.c.clone();
    for (t, d) in r.relaxed.iter().zip(duals) {
        let hw = 0.5 * t.w;
        a[t.i] -= hw * d.beta1;
        a[t.j] -= hw * d.beta2;
        c[t.i] += hw * d.alpha;
        c[t.j] += hw * t.sign.as_f64() * d.alpha;
    }
    (a, c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub h: f64,
    pub x: Vec<f64>,
    pub z: Vec<bool>,
}

/// Dual function value and the inner minimizer. Segments are solved in
/// parallel when `parallel` is set; results are combined in segment order.
pub fn h_eval(r: &Relaxation, duals: &[DualTriple], parallel: bool) -> Result<InnerSolution> {
    let (a, c) = assemble_psi(r, duals);
    let solve_seg = |seg: &Segment| -> Result<SpSolution> {
        tridiag::solve(&r.segment_problem(seg, &a, &c)).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } => Error::SegmentNotPd {
                start: seg.start,
                end: seg.end,
            },
            other => other,
        })
    };
    let sols: Vec<SpSolution> = if parallel {
        r.segments.par_iter().map(solve_seg).collect::<Result<_>>()?
    } else {
        r.segments.iter().map(solve_seg).collect::<Result<_>>()?
    };
    let n = r.a.len();
    let mut x = vec![0.0; n];
    let mut z = vec![false; n];
    let mut h = 0.0;
    for (seg, sol) in r.segments.iter().zip(&sols) {
        h += sol.objective;
        for k in seg.start..seg.end {
            x[r.ordering[k]] = sol.x[k - seg.start];
            z[r.ordering[k]] = sol.z[k - seg.start];
        }
    }
    for (t, d) in r.relaxed.iter().zip(duals) {
        h -= 0.5 * t.w * f_star(d);
    }
    Ok(InnerSolution { h, x, z })
}

/// Supergradient of `h` at `duals`, three entries per relaxed term
/// (`alpha`, `beta_i`, `beta_j`), each scaled by `w / 2`.
pub fn subgradient(r: &Relaxation, duals: &[DualTriple], x: &[f64], z: &[bool]) -> Vec<f64> {
    let mut rho = Vec::with_capacity(3 * r.relaxed.len());
    for (t, d) in r.relaxed.iter().zip(duals) {
        let xi = f_star_subgradient(d);
        let hw = 0.5 * t.w;
        let zi = z[t.i] as u8 as f64;
        let zj = z[t.j] as u8 as f64;
        rho.push(hw * (-xi[0] + t.combine(x)));
        rho.push(hw * (-xi[1] - zi));
        rho.push(hw * (-xi[2] - zj));
    }
    rho
}

/// Objective at a feasible point.
pub fn upper_bound(inst: &Instance, x: &[f64], z: &[bool]) -> Result<f64> {
    if let Some(index) = (0..inst.n).find(|&i| !z[i] && x[i] != 0.0) {
        return Err(Error::InfeasiblePair { index });
    }
    Ok(inst.objective(x, z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `ratio^-(k-1)` along the normalized supergradient.
    Geometric { ratio: f64 },
    /// `1/k` along the raw supergradient.
    Harmonic,
}

impl StepSchedule {
    pub fn step(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::Geometric { ratio } => ratio.powi(-(k as i32 - 1)),
            StepSchedule::Harmonic => 1.0 / k as f64,
        }
    }

    fn normalized(&self) -> bool {
        matches!(self, StepSchedule::Geometric { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompConfig {
    pub schedule: StepSchedule,
    /// Relative gap at which to stop.
    pub eps: f64,
    pub max_iter: usize,
    pub parallel: bool,
    /// Bound on `|x|` checked (not imposed) on every inner solution.
    pub big_m: Option<f64>,
}

impl Default for DecompConfig {
    fn default() -> Self {
        DecompConfig {
            schedule: StepSchedule::Geometric { ratio: 1.01 },
            eps: 1e-4,
            max_iter: 1000,
            parallel: false,
            big_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub duals: Vec<DualTriple>,
    /// Iterations completed.
    pub k: usize,
    pub best_lower: f64,
    pub best_upper: f64,
    pub best_x: Vec<f64>,
    pub best_z: Vec<bool>,
}

impl DualState {
    pub fn new(r: &Relaxation) -> Self {
        let n = r.a.len();
        DualState {
            duals: vec![DualTriple::default(); r.relaxed.len()],
            k: 0,
            best_lower: f64::NEG_INFINITY,
            best_upper: f64::INFINITY,
            best_x: vec![0.0; n],
            best_z: vec![false; n],
        }
    }

    pub fn gap(&self) -> f64 {
        relative_gap(self.best_lower, self.best_upper)
    }
}

pub fn relative_gap(lower: f64, upper: f64) -> f64 {
    (upper - lower) / upper.abs().max(GAP_DENOMINATOR_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// `h` at this iteration's duals.
    pub h: f64,
    /// Objective at this iteration's inner solution.
    pub incumbent: f64,
    /// Best bounds so far.
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    /// Step taken after this iteration (0 if none was taken).
    pub step: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GapClosed,
    /// Zero supergradient: the duals are optimal.
    Stationary,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompResult {
    pub state: DualState,
    pub termination: Termination,
    pub log: Vec<IterationRecord>,
}

impl DecompResult {
    pub fn lower(&self) -> f64 {
        self.state.best_lower
    }

    pub fn upper(&self) -> f64 {
        self.state.best_upper
    }

    pub fn gap(&self) -> f64 {
        self.state.gap()
    }

    pub fn iterations(&self) -> usize {
        self.state.k
    }
}

/// Subgradient ascent on `h` starting from zero duals.
pub fn run(inst: &Instance, r: &Relaxation, config: &DecompConfig) -> Result<DecompResult> {
    if !(config.eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be > 0".into()));
    }
    if config.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
    }
    if let StepSchedule::Geometric { ratio } = config.schedule {
        if !(ratio > 0.0) {
            return Err(Error::InvalidParameter("step ratio must be > 0".into()));
        }
    }
    let started = Instant::now();
    let mut state = DualState::new(r);
    let mut log = Vec::new();
    let mut warned = false;
    let termination = loop {
        state.k += 1;
        let k = state.k;
        let inner = h_eval(r, &state.duals, config.parallel)?;
        if let (Some(m), false) = (config.big_m, warned) {
            if let Some(i) = (0..inner.x.len()).find(|&i| inner.x[i].abs() > m + 1e-9) {
                log::warn!("inner solution leaves the box |x| <= {m} at variable {i} (x = {})", inner.x[i]);
                warned = true;
            }
        }
        let ub = upper_bound(inst, &inner.x, &inner.z)?;
        if inner.h > state.best_lower {
            state.best_lower = inner.h;
        }
        if ub < state.best_upper {
            state.best_upper = ub;
            state.best_x = inner.x.clone();
            state.best_z = inner.z.clone();
        }
        let gap = state.gap();
        let rho = subgradient(r, &state.duals, &inner.x, &inner.z);
        let norm = rho.iter().map(|v| v * v).sum::<f64>().sqrt();
        let stop = if gap <= config.eps {
            Some(Termination::GapClosed)
        } else if norm == 0.0 {
            Some(Termination::Stationary)
        } else if k >= config.max_iter {
            Some(Termination::IterationLimit)
        } else {
            None
        };
        let step = if stop.is_some() { 0.0 } else { config.schedule.step(k) };
        log.push(IterationRecord {
            k,
            h: inner.h,
            incumbent: ub,
            lower: state.best_lower,
            upper: state.best_upper,
            gap,
            step,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        log::debug!("iteration {k}: h = {}, upper = {ub}, gap = {gap:e}", inner.h);
        if let Some(t) = stop {
            break t;
        }
        let scale = if config.schedule.normalized() { step / norm } else { step };
        for (d, g) in state.duals.iter_mut().zip(rho.chunks_exact(3)) {
            d.alpha += scale * g[0];
            d.beta1 += scale * g[1];
            d.beta2 += scale * g[2];
        }
    };
    Ok(DecompResult {
        state,
        termination,
        log,
    })
}

/// Writes `k,lower,upper,gap,step,elapsed_ms` with the best bounds so far.
pub fn write_log_csv<W: Write>(log: &[IterationRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "k,lower,upper,gap,step,elapsed_ms")?;
    for rec in log {
        writeln!(
            w,
            "{},{},{},{},{},{:.3}",
            rec.k, rec.lower, rec.upper, rec.gap, rec.step, rec.elapsed_ms
        )?;
    }
    Ok(())
}

/// Validates the instance, chooses the retained terms with
/// [`cover::path_cover`] and runs the ascent.
pub fn solve(inst: &Instance, config: &DecompConfig) -> Result<(Relaxation, DecompResult)> {
    let dd = inst.validate()?;
    let g = inst.support_graph();
    let ord = cover::make_ordering(&cover::path_cover(&g), &g)?;
    let r = build_relaxation(inst, &dd, &ord.pi, &ord.retained)?;
    let res = run(inst, &r, config)?;
    Ok((r, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::star4;
    use crate::instance::{gen_lattice2d, gen_tridiagonal, Entry};
    use crate::oracle;
    use crate::rng::CounterRng;

    fn star_relaxation() -> (Instance, Relaxation) {
        let inst = star4();
        let dd = inst.validate().unwrap();
        let r = build_relaxation(&inst, &dd, &[0, 1, 2, 3], &[(0, 1), (1, 2)]).unwrap();
        (inst, r)
    }

    fn random_duals(rng: &mut CounterRng, m: usize) -> Vec<DualTriple> {
        (0..m)
            .map(|_| DualTriple::new(rng.uniform(-4.0, 4.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)))
            .collect()
    }

    fn lattice_relaxation(seed: u64) -> (Instance, Relaxation) {
        let inst = gen_lattice2d(3, 4, 0.3, 0.1, seed).unwrap();
        let dd = inst.validate().unwrap();
        let g = inst.support_graph();
        let ord = cover::make_ordering(&cover::path_cover(&g), &g).unwrap();
        let r = build_relaxation(&inst, &dd, &ord.pi, &ord.retained).unwrap();
        (inst, r)
    }

    #[test]
    fn star_segments() {
        let (_, r) = star_relaxation();
        assert_eq!(r.segments.len(), 2);
        let diag: Vec<f64> = r.segments.iter().flat_map(|s| s.diag.clone()).collect();
        for (d, e) in diag.iter().zip([3.0, 5.2, 3.0, 1.2]) {
            assert!((d - e).abs() < 1e-12);
        }
        assert_eq!(r.segments[0].off, vec![-1.5, -1.0]);
        assert_eq!(r.relaxed.len(), 1);
        assert_eq!((r.relaxed[0].i, r.relaxed[0].j), (1, 3));
    }

    #[test]
    fn separable_instance_has_singleton_segments() {
        let inst = Instance::new(vec![1.0; 3], vec![-1.0; 3], (0..3).map(|i| Entry { i, j: i, v: 2.0 }).collect()).unwrap();
        let dd = inst.validate().unwrap();
        let r = build_relaxation(&inst, &dd, &[0, 1, 2], &[]).unwrap();
        assert_eq!(r.segments.len(), 3);
        let res = run(&inst, &r, &DecompConfig::default()).unwrap();
        assert_eq!(res.iterations(), 1);
        assert_eq!(res.gap(), 0.0);
    }

    #[test]
    fn retained_must_be_consecutive() {
        let inst = star4();
        let dd = inst.validate().unwrap();
        let err = build_relaxation(&inst, &dd, &[0, 1, 2, 3], &[(1, 3)]).unwrap_err();
        assert!(matches!(err, Error::NotConsecutive { i: 1, j: 3 }));
        assert!(build_relaxation(&inst, &dd, &[0, 1, 2, 3], &[(2, 3)]).is_err());
    }

    #[test]
    fn segment_not_positive_definite() {
        let inst = Instance::new(
            vec![0.0; 2],
            vec![0.0; 2],
            vec![Entry { i: 0, j: 0, v: 1.0 }, Entry { i: 1, j: 1, v: 1.0 }, Entry { i: 0, j: 1, v: 1.0 }],
        )
        .unwrap();
        let dd = inst.validate().unwrap();
        let err = build_relaxation(&inst, &dd, &[0, 1], &[(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::SegmentNotPd { start: 0, end: 2 }));
    }

    #[test]
    fn template_reconstructs_retained_form() {
        let mut rng = CounterRng::new(4);
        for seed in 0..10 {
            let (_, r) = lattice_relaxation(seed);
            for _ in 0..50 {
                let x: Vec<f64> = (0..r.a.len()).map(|_| rng.uniform(-3.0, 3.0)).collect();
                let u = r.segment_quad_form(&x);
                assert!((u - r.retained_quad_form(&x)).abs() <= 1e-9 * (1.0 + u.abs()));
            }
        }
    }

    #[test]
    fn psi_coefficients() {
        let (_, r) = star_relaxation();
        let (a, c) = assemble_psi(&r, &[DualTriple::default()]);
        assert_eq!((a, c), (r.a.clone(), r.c.clone()));
        let (a, c) = assemble_psi(&r, &[DualTriple::new(-1.0, 0.25, 0.0)]);
        assert!((c[1] - -2.9).abs() < 1e-12);
        assert!((c[3] - -7.4).abs() < 1e-12);
        assert!((a[1] - 1.9).abs() < 1e-12);
        assert_eq!(a[3], 2.0);
        let (a, _) = assemble_psi(&r, &[DualTriple::new(0.0, 0.5, 0.5)]);
        assert_eq!(a[1], a[3]);
    }

    #[test]
    fn first_iteration_drops_relaxed_terms() {
        let (inst, r) = star_relaxation();
        let inner = h_eval(&r, &[DualTriple::default()], false).unwrap();
        assert!((inner.h - -24.8767).abs() < 1e-3);
        assert_eq!(inner.z, vec![false, false, true, true]);
        assert!((inner.x[3] - 6.5).abs() < 1e-9);
        let rho = subgradient(&r, &[DualTriple::default()], &inner.x, &inner.z);
        for (g, e) in rho.iter().zip([-2.6, 0.4, -0.4]) {
            assert!((g - e).abs() < 1e-12, "{rho:?}");
        }
        let ub = upper_bound(&inst, &inner.x, &inner.z).unwrap();
        assert!(ub >= oracle::enumerate(&inst).unwrap().value);
    }

    #[test]
    fn upper_bound_checks_support() {
        let inst = star4();
        assert_eq!(upper_bound(&inst, &[0.0; 4], &[false; 4]).unwrap(), 0.0);
        assert!(matches!(
            upper_bound(&inst, &[0.0, 1.0, 0.0, 0.0], &[false; 4]),
            Err(Error::InfeasiblePair { index: 1 })
        ));
        let best = oracle::enumerate(&inst).unwrap();
        assert!((upper_bound(&inst, &best.x, &best.z).unwrap() - best.value).abs() < 1e-12);
    }

    #[test]
    fn star_trajectory() {
        let (inst, r) = star_relaxation();
        let res = run(&inst, &r, &DecompConfig::default()).unwrap();
        assert_eq!(res.termination, Termination::GapClosed);
        assert!(res.iterations() <= 12, "{}", res.iterations());
        assert!((res.upper() - -14.7367).abs() < 1e-3);
    }

    #[test]
    fn lower_bounds_are_valid() {
        let mut rng = CounterRng::new(12);
        for seed in 0..8 {
            let (inst, r) = lattice_relaxation(seed);
            let opt = oracle::enumerate(&inst).unwrap().value;
            for _ in 0..20 {
                let duals = random_duals(&mut rng, r.relaxed.len());
                let inner = h_eval(&r, &duals, false).unwrap();
                assert!(inner.h <= opt + 1e-8, "{} > {opt}", inner.h);
                assert!(upper_bound(&inst, &inner.x, &inner.z).unwrap() >= opt - 1e-8);
            }
        }
    }

    #[test]
    fn supergradient_and_concavity() {
        let mut rng = CounterRng::new(13);
        for seed in 0..6 {
            let (_, r) = lattice_relaxation(seed);
            let m = r.relaxed.len();
            for _ in 0..20 {
                let p = random_duals(&mut rng, m);
                let q = random_duals(&mut rng, m);
                let hp = h_eval(&r, &p, false).unwrap().h;
                let iq = h_eval(&r, &q, false).unwrap();
                let rho = subgradient(&r, &q, &iq.x, &iq.z);
                let lin: f64 = p
                    .iter()
                    .zip(&q)
                    .zip(rho.chunks_exact(3))
                    .map(|((p, q), g)| g[0] * (p.alpha - q.alpha) + g[1] * (p.beta1 - q.beta1) + g[2] * (p.beta2 - q.beta2))
                    .sum();
                assert!(hp <= iq.h + lin + 1e-8 * (1.0 + hp.abs()));
                let mid: Vec<DualTriple> = p
                    .iter()
                    .zip(&q)
                    .map(|(p, q)| DualTriple::new((p.alpha + q.alpha) / 2.0, (p.beta1 + q.beta1) / 2.0, (p.beta2 + q.beta2) / 2.0))
                    .collect();
                let hm = h_eval(&r, &mid, false).unwrap().h;
                assert!(hm >= (hp + iq.h) / 2.0 - 1e-9 * (1.0 + hm.abs()));
            }
        }
    }

    #[test]
    fn bounds_are_monotone_and_sandwich_the_optimum() {
        for seed in 0..5 {
            let (inst, r) = lattice_relaxation(seed);
            let opt = oracle::enumerate(&inst).unwrap().value;
            let config = DecompConfig {
                schedule: StepSchedule::Harmonic,
                eps: 1e-3,
                max_iter: 100,
                ..DecompConfig::default()
            };
            let res = run(&inst, &r, &config).unwrap();
            for w in res.log.windows(2) {
                assert!(w[1].lower >= w[0].lower && w[1].upper <= w[0].upper);
            }
            assert!(res.lower() <= opt + 1e-8 && opt <= res.upper() + 1e-8);
        }
    }

    #[test]
    fn path_instance_needs_no_relaxation() {
        let inst = gen_tridiagonal(25, 3).unwrap();
        let (r, res) = solve(&inst, &DecompConfig::default()).unwrap();
        assert!(r.relaxed.is_empty());
        let p = TridiagProblem::from_instance(&inst).unwrap();
        let exact = tridiag::solve(&p).unwrap();
        assert_eq!(res.lower(), exact.objective);
        assert!((res.upper() - exact.objective).abs() <= 1e-9 * (1.0 + exact.objective.abs()));
    }

    #[test]
    fn parallel_matches_sequential() {
        let (inst, r) = lattice_relaxation(2);
        let config = DecompConfig {
            schedule: StepSchedule::Harmonic,
            max_iter: 30,
            ..DecompConfig::default()
        };
        let a = run(&inst, &r, &config).unwrap();
        let b = run(&inst, &r, &DecompConfig { parallel: true, ..config }).unwrap();
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn csv_log_format() {
        let (inst, r) = star_relaxation();
        let res = run(&inst, &r, &DecompConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_log_csv(&res.log, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,lower,upper,gap,step,elapsed_ms");
        assert_eq!(lines.len(), res.log.len() + 1);
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn rejects_bad_config() {
        let (inst, r) = star_relaxation();
        let bad = DecompConfig { eps: 0.0, ..DecompConfig::default() };
        assert!(run(&inst, &r, &bad).is_err());
        let bad = DecompConfig { max_iter: 0, ..DecompConfig::default() };
        assert!(run(&inst, &r, &bad).is_err());
    }
}
