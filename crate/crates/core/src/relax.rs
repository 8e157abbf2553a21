//! The relaxed functional `F(u, Omega)` by constrained convex minimization.
//!
//! The infimum over locally Lipschitz sequences converging to `u` in `L1_loc`
//! is discretized as a family of linear programs: minimize
//! `sum_cells f(|dv|/h) mu(cell)` over piecewise-linear `v` on a grid, subject
//! to an `L1(mu)` ball `||v - u|| <= eps` around the target, with `(n, eps)`
//! driven jointly by a schedule. `f` piecewise linear makes each program an
//! exact LP through epigraph variables and support lines.
//!
//! Conventions baked into the discretization:
//! - grids always refine the weight partition and the target's partition, so
//!   every cell measure is an exact rational and no quadrature error enters;
//! - the `L1` ball is enforced per connected component of the evaluation set
//!   (approximation in `L1_loc` is local), which makes the discrete
//!   functional exactly additive over disjoint open sets;
//! - `v` is pinned to the one-sided target values at component endpoints;
//!   this removes the spurious boundary-trimming freedom of the finite-`eps`
//!   ball and does not change the `eps -> 0` limit;
//! - the `L1` constraint uses per-cell trapezoid majorants of
//!   `int |v - u| dmu` (exact would need cell splits at sign changes), an
//!   overestimate, so feasible competitors are genuinely inside the ball.

use crate::bvfunc::{self, BvRepresentation, GridFunction};
use crate::integrand::Integrand;
use crate::rational::{self, Rat};
use crate::solver::{Cmp, LpProblem, SolverError};
use crate::space::{OpenSet, WeightedIntervalSpace};
use num_traits::Zero;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelaxError {
    #[error("eps must be nonnegative, got {0}")]
    NegativeEps(f64),
    #[error("grid resolution must be at least 2, got {0}")]
    BadResolution(usize),
    #[error("target does not span the evaluation set")]
    TargetSpan,
    #[error("empty gluing region")]
    EmptyGluingRegion,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Bv(#[from] bvfunc::BvError),
}

/// Relaxation target: a grid function or a BV representation (the latter
/// contributes one-sided values at its jump points).
#[derive(Clone, Debug)]
pub struct RelaxTarget {
    bv: BvRepresentation,
}

impl RelaxTarget {
    pub fn from_grid(u: GridFunction) -> Self {
        Self {
            bv: BvRepresentation::from_grid(u),
        }
    }

    pub fn from_bv(u: BvRepresentation) -> Self {
        Self { bv: u }
    }

    pub fn bv(&self) -> &BvRepresentation {
        &self.bv
    }

    fn partition_nodes(&self) -> impl Iterator<Item = &Rat> {
        self.bv
            .ac_part
            .nodes()
            .iter()
            .chain(self.bv.jumps.iter().map(|(x, _)| x))
    }
}

impl From<GridFunction> for RelaxTarget {
    fn from(u: GridFunction) -> Self {
        Self::from_grid(u)
    }
}

impl From<BvRepresentation> for RelaxTarget {
    fn from(u: BvRepresentation) -> Self {
        Self::from_bv(u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Failed,
}

/// Result of one `(n, eps)` relaxation cell.
#[derive(Clone, Debug)]
pub struct RelaxationResult {
    pub value: f64,
    /// Optimal competitor per connected component of the evaluation set.
    pub minimizers: Vec<GridFunction>,
    pub n: usize,
    pub eps: f64,
    pub solver_tol: f64,
    /// `int f(a) dmu + f_infty ||Du||^s(Omega)` of the target: the certified
    /// lower bound for the relaxation value in the `eps -> 0` limit.
    pub lower_certificate: f64,
    pub status: SolveStatus,
}

impl RelaxationResult {
    /// The minimizer when the evaluation set is one interval.
    pub fn minimizer(&self) -> &GridFunction {
        assert_eq!(self.minimizers.len(), 1, "evaluation set is disconnected");
        &self.minimizers[0]
    }
}

/// Grid of one component with per-cell measures and widths precomputed in a
/// single sweep (each base cell lies inside one weight piece, so the cell
/// measure is weight times width, exactly).
pub(crate) struct ComponentGrid {
    pub nodes: Vec<Rat>,
    pub mu: Vec<f64>,
    pub h: Vec<f64>,
}

/// Epigraph LP over a fixed grid: `min sum f(|dv|/h) mu_c` plus optional
/// absolute-value terms. Shared by the relaxation, the penalized Dirichlet
/// problem and the extended-domain problem.
pub(crate) struct GridLp {
    pub nodes: Vec<Rat>,
    pub mu: Vec<f64>,
    lp: LpProblem,
    vvars: Vec<usize>,
    ball_terms: Vec<(usize, f64)>,
}

impl GridLp {
    pub fn new(f: &Integrand, grid: ComponentGrid) -> Self {
        let ComponentGrid { nodes, mu, h } = grid;
        let ncells = nodes.len() - 1;
        let lines = f.support_lines();
        let mut lp = LpProblem::new();
        let vvars: Vec<usize> = (0..nodes.len())
            .map(|_| lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY))
            .collect();
        for c in 0..ncells {
            // epigraph variable with cost mu_c; f(t) >= f(0) gives the bound
            let t = lp.add_var(mu[c], f.f0(), f64::INFINITY);
            for (d, e) in &lines {
                if *d == 0.0 {
                    continue;
                }
                let coeff = d / h[c];
                lp.add_row(
                    vec![(t, 1.0), (vvars[c + 1], -coeff), (vvars[c], coeff)],
                    Cmp::Ge,
                    *e,
                );
                lp.add_row(
                    vec![(t, 1.0), (vvars[c + 1], coeff), (vvars[c], -coeff)],
                    Cmp::Ge,
                    *e,
                );
            }
        }
        Self {
            nodes,
            mu,
            lp,
            vvars,
            ball_terms: Vec::new(),
        }
    }

    pub fn pin_node(&mut self, idx: usize, value: f64) {
        self.lp.pin_var(self.vvars[idx], value);
    }

    /// Adds `weight * |v_i - center|` to the running L1-ball sum.
    pub fn ball_deviation(&mut self, idx: usize, center: f64, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        let d = self.abs_var(idx, center);
        self.ball_terms.push((d, weight));
    }

    /// Closes the ball constraint `sum weight_i |v_i - center_i| <= eps`.
    pub fn seal_ball(&mut self, eps: f64) {
        if !self.ball_terms.is_empty() {
            let terms = std::mem::take(&mut self.ball_terms);
            self.lp.add_row(terms, Cmp::Le, eps);
        }
    }

    /// Adds `coeff * |v_i - center|` to the objective (boundary penalties).
    pub fn penalize_abs(&mut self, idx: usize, center: f64, coeff: f64) {
        let d = self.abs_var(idx, center);
        self.lp.set_objective(d, coeff);
    }

    fn abs_var(&mut self, idx: usize, center: f64) -> usize {
        let d = self.lp.add_var(0.0, 0.0, f64::INFINITY);
        self.lp
            .add_row(vec![(d, 1.0), (self.vvars[idx], -1.0)], Cmp::Ge, -center);
        self.lp
            .add_row(vec![(d, 1.0), (self.vvars[idx], 1.0)], Cmp::Ge, center);
        d
    }

    pub fn solve(&self) -> Result<(f64, GridFunction), RelaxError> {
        let out = self.lp.solve()?;
        let values: Vec<f64> = self.vvars.iter().map(|v| out.values[*v]).collect();
        Ok((
            out.objective,
            GridFunction::new(self.nodes.clone(), values)?,
        ))
    }
}

/// Grid for one component: component endpoints, weight cuts and target nodes
/// inside, subdivided until cell widths reach the global mesh size
/// `(b - a) / n`. The mesh size depends only on the space and `n`, never on
/// the evaluation set, so disjoint unions decompose into identical
/// per-component programs (exact additivity).
pub(crate) fn component_grid(
    space: &WeightedIntervalSpace,
    extra_nodes: &mut dyn Iterator<Item = &Rat>,
    lo: &Rat,
    hi: &Rat,
    n: usize,
) -> ComponentGrid {
    let mut base: Vec<Rat> = vec![lo.clone(), hi.clone()];
    for x in space.cuts() {
        if x > lo && x < hi {
            base.push(x.clone());
        }
    }
    for x in extra_nodes {
        if x > lo && x < hi {
            base.push(x.clone());
        }
    }
    base.sort();
    base.dedup();
    let target_width =
        (space.hi().clone() - space.lo().clone()) / rational::rat_int(n as i64);
    let mut nodes = Vec::with_capacity(base.len() * 2);
    let mut mu = Vec::with_capacity(base.len() * 2);
    let mut h = Vec::with_capacity(base.len() * 2);
    for w in base.windows(2) {
        nodes.push(w[0].clone());
        let len = w[1].clone() - w[0].clone();
        let mid = (w[0].clone() + w[1].clone()) / rational::rat_int(2);
        let weight = rational::to_f64(&space.weight_at(&mid));
        let parts_big = (len.clone() / target_width.clone()).ceil().to_integer();
        let parts: i64 = i64::try_from(&parts_big).unwrap_or(1).max(1);
        let part_h = rational::to_f64(&len) / parts as f64;
        for j in 1..parts {
            nodes.push(w[0].clone() + len.clone() * rational::rat(j, parts));
        }
        for _ in 0..parts {
            h.push(part_h);
            mu.push(weight * part_h);
        }
    }
    nodes.push(base.last().unwrap().clone());
    ComponentGrid { nodes, mu, h }
}

fn solve_component(
    f: &Integrand,
    target: &RelaxTarget,
    grid: ComponentGrid,
    eps: f64,
) -> Result<(f64, GridFunction), RelaxError> {
    let last = grid.nodes.len() - 1;
    let mut lp = GridLp::new(f, grid);
    lp.pin_node(0, target.bv.eval_right(&lp.nodes[0]));
    lp.pin_node(last, target.bv.eval_left(&lp.nodes[last]));
    for i in 0..=last {
        let ul = target.bv.eval_left(&lp.nodes[i]);
        let ur = target.bv.eval_right(&lp.nodes[i]);
        let w_left = if i > 0 { 0.5 * lp.mu[i - 1] } else { 0.0 };
        let w_right = if i < last { 0.5 * lp.mu[i] } else { 0.0 };
        if ul == ur {
            lp.ball_deviation(i, ur, w_left + w_right);
        } else {
            lp.ball_deviation(i, ul, w_left);
            lp.ball_deviation(i, ur, w_right);
        }
    }
    lp.seal_ball(eps);
    lp.solve()
}

/// Relaxation value at one `(n, eps)` cell. The optimization runs
/// independently on every connected component of `omega` with the same ball
/// radius; the component values add.
pub fn relax_value(
    f: &Integrand,
    target: &RelaxTarget,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
    n: usize,
    eps: f64,
) -> Result<RelaxationResult, RelaxError> {
    if eps < 0.0 {
        return Err(RelaxError::NegativeEps(eps));
    }
    if n < 2 {
        return Err(RelaxError::BadResolution(n));
    }
    let (tlo, thi) = target.bv.ac_part.span();
    if omega
        .intervals()
        .iter()
        .any(|(lo, hi)| lo < tlo || hi > thi)
    {
        return Err(RelaxError::TargetSpan);
    }

    let mut value = 0.0;
    let mut minimizers = Vec::new();
    for (lo, hi) in omega.intervals() {
        let grid = component_grid(space, &mut target.partition_nodes(), lo, hi, n);
        let (v, m) = solve_component(f, target, grid, eps)?;
        value += v;
        minimizers.push(m);
    }
    let nu = target.bv.variation_measure(space);
    let lower = f.measure_functional(&nu, space, omega);
    Ok(RelaxationResult {
        value,
        minimizers,
        n,
        eps,
        solver_tol: crate::SOLVER_TOL,
        lower_certificate: lower,
        status: SolveStatus::Optimal,
    })
}

/// Geometric `(n_k, eps_k)` schedule; `eps` decreasing, `n` nondecreasing.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub cells: Vec<(usize, f64)>,
}

impl Schedule {
    /// Default coupling `eps_k = 2^-k`, `n_k = 4^(k+2)`, `k = 0..=k_max`.
    pub fn default_coupled(k_max: u32) -> Self {
        let cells = (0..=k_max)
            .map(|k| (4usize.pow(k + 2), 0.5f64.powi(k as i32)))
            .collect();
        Self { cells }
    }

    pub fn fixed_n(n: usize, eps: &[f64]) -> Self {
        Self {
            cells: eps.iter().map(|e| (n, *e)).collect(),
        }
    }

    pub fn validate(&self) -> bool {
        !self.cells.is_empty()
            && self.cells.windows(2).all(|w| w[0].0 <= w[1].0)
            && self.cells.windows(2).all(|w| w[0].1 >= w[1].1)
    }

    pub fn tail(&self) -> (usize, f64) {
        *self.cells.last().expect("nonempty schedule")
    }
}

/// One row of a schedule run.
#[derive(Clone, Debug)]
pub struct ScheduleCell {
    pub n: usize,
    pub eps: f64,
    pub value: f64,
    pub lower: f64,
    pub status: SolveStatus,
    pub millis: u128,
}

/// Schedule run with extrapolation and monotonicity diagnostics.
#[derive(Clone, Debug)]
pub struct ExtrapolationReport {
    pub cells: Vec<ScheduleCell>,
    pub last_value: f64,
    /// Aitken limit estimate from the tail; falls back to the last value
    /// when the differences do not contract.
    pub extrapolated: f64,
    /// Values nondecreasing as eps decreases at fixed (coarsest) n.
    pub eps_monotone_fixed_n: bool,
    pub tail_minimizers: Vec<GridFunction>,
}

/// Runs the schedule and extrapolates the tail by fitting
/// `value ~ v_inf + c eps^p` (Aitken delta-squared on the last three points).
/// Solver failures are recorded per cell and the schedule continues.
pub fn relax_extrapolate(
    f: &Integrand,
    target: &RelaxTarget,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
    schedule: &Schedule,
) -> Result<ExtrapolationReport, RelaxError> {
    let mut cells = Vec::new();
    let mut tail_minimizers = Vec::new();
    for (n, eps) in &schedule.cells {
        let t0 = Instant::now();
        match relax_value(f, target, space, omega, *n, *eps) {
            Ok(res) => {
                cells.push(ScheduleCell {
                    n: *n,
                    eps: *eps,
                    value: res.value,
                    lower: res.lower_certificate,
                    status: res.status,
                    millis: t0.elapsed().as_millis(),
                });
                tail_minimizers = res.minimizers;
            }
            Err(RelaxError::Solver(_)) => {
                cells.push(ScheduleCell {
                    n: *n,
                    eps: *eps,
                    value: f64::NAN,
                    lower: f64::NAN,
                    status: SolveStatus::Failed,
                    millis: t0.elapsed().as_millis(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let good: Vec<f64> = cells
        .iter()
        .filter(|c| c.status == SolveStatus::Optimal)
        .map(|c| c.value)
        .collect();
    let last_value = *good.last().expect("schedule produced no values");
    let extrapolated = aitken(&good).unwrap_or(last_value);

    let n_fixed = schedule.cells.first().map(|c| c.0).unwrap_or(16);
    let mut prev: Option<f64> = None;
    let mut monotone = true;
    for (_, eps) in &schedule.cells {
        let v = relax_value(f, target, space, omega, n_fixed, *eps)?.value;
        if let Some(p) = prev {
            if v < p - 1e-7 {
                monotone = false;
            }
        }
        prev = Some(v);
    }

    Ok(ExtrapolationReport {
        cells,
        last_value,
        extrapolated,
        eps_monotone_fixed_n: monotone,
        tail_minimizers,
    })
}

fn aitken(values: &[f64]) -> Option<f64> {
    if values.len() < 3 {
        return None;
    }
    let k = values.len();
    let (v0, v1, v2) = (values[k - 3], values[k - 2], values[k - 1]);
    let d1 = v1 - v0;
    let d2 = v2 - v1;
    let denom = d2 - d1;
    if denom.abs() < 1e-14 {
        return None;
    }
    let ratio = d2 / d1;
    if !(0.0..1.0).contains(&ratio) {
        return None;
    }
    Some(v2 - d2 * d2 / denom)
}

/// Measure-property diagnostics for one pair of open sets at a fixed cell.
#[derive(Clone, Debug)]
pub struct MeasurePairReport {
    pub value_a: f64,
    pub value_b: f64,
    pub value_union: f64,
    pub disjoint: bool,
    /// `F(A) + F(B) - F(A u B)`; nonnegative within tolerance.
    pub subadditivity_slack: f64,
    /// `|F(A u B) - F(A) - F(B)|` for disjoint pairs.
    pub additivity_gap: Option<f64>,
}

pub fn measure_property_report(
    f: &Integrand,
    target: &RelaxTarget,
    space: &WeightedIntervalSpace,
    pairs: &[(OpenSet, OpenSet)],
    n: usize,
    eps: f64,
) -> Result<Vec<MeasurePairReport>, RelaxError> {
    let mut out = Vec::new();
    for (a, b) in pairs {
        let union = a.union(b);
        let va = relax_value(f, target, space, a, n, eps)?.value;
        let vb = relax_value(f, target, space, b, n, eps)?.value;
        let vu = relax_value(f, target, space, &union, n, eps)?.value;
        let disjoint = a.intersect(b).is_empty();
        out.push(MeasurePairReport {
            value_a: va,
            value_b: vb,
            value_union: vu,
            disjoint,
            subadditivity_slack: va + vb - vu,
            additivity_gap: disjoint.then(|| (vu - va - vb).abs()),
        });
    }
    Ok(out)
}

/// Inner-regularity diagnostics along a nested exhaustion.
#[derive(Clone, Debug)]
pub struct ExhaustionReport {
    pub values: Vec<f64>,
    pub value_full: f64,
    /// Worst decrease along the (nominally nondecreasing) sequence.
    pub monotone_within: f64,
    pub final_gap: f64,
}

pub fn exhaustion_report(
    f: &Integrand,
    target: &RelaxTarget,
    space: &WeightedIntervalSpace,
    nested: &[OpenSet],
    full: &OpenSet,
    n: usize,
    eps: f64,
) -> Result<ExhaustionReport, RelaxError> {
    let mut values = Vec::new();
    for b in nested {
        values.push(relax_value(f, target, space, b, n, eps)?.value);
    }
    let value_full = relax_value(f, target, space, full, n, eps)?.value;
    let mut worst_drop = 0.0f64;
    for w in values.windows(2) {
        worst_drop = worst_drop.max(w[0] - w[1]);
    }
    Ok(ExhaustionReport {
        final_gap: (value_full - values.last().unwrap()).abs(),
        values,
        value_full,
        monotone_within: worst_drop,
    })
}

/// The four open sets of the gluing construction: `U'` compactly inside `U`,
/// `V'` inside `V`.
#[derive(Clone, Debug)]
pub struct GlueSets {
    pub u_outer: OpenSet,
    pub u_inner: OpenSet,
    pub v_outer: OpenSet,
    pub v_inner: OpenSet,
}

/// Certificate of the gluing construction.
#[derive(Clone, Debug)]
pub struct GlueCertificate {
    pub energy_w: f64,
    pub energy_u: f64,
    pub energy_v: f64,
    pub cross_term: f64,
    /// `3M/eta`, the constant multiplying the cross term.
    pub constant: f64,
    /// `(M/k) int_H (1 + g_u + g_v) dmu`, achieved by averaging over annuli.
    pub epsilon: f64,
    pub chosen_index: usize,
    /// `rhs - lhs` of the inequality; nonnegative when it holds.
    pub slack: f64,
}

/// Builds the `k` annuli `H_i` and cutoffs `phi_i` from the distance to
/// `U'`, forms `w_i = phi_i u + (1 - phi_i) v`, picks the best index and
/// verifies
///
/// ```text
/// E(w, U' u V') <= E(u, U) + E(v, V) + (3M/eta) int_H |u - v| dmu + eps_k
/// ```
///
/// with `eps_k = (M/k) int_H (1 + g_u + g_v) dmu`. Sampling `w_i` onto the
/// refined grid only lowers its energy (Jensen cellwise), so the certificate
/// remains valid for the returned grid function.
pub fn glue_lipschitz(
    u: &GridFunction,
    v: &GridFunction,
    sets: &GlueSets,
    f: &Integrand,
    space: &WeightedIntervalSpace,
    k: usize,
) -> Result<(GridFunction, GlueCertificate), RelaxError> {
    assert!(k >= 1);
    let eta = distance_to_complement(&sets.u_inner, &sets.u_outer);
    assert!(eta > Rat::zero(), "U' must be compactly inside U");
    let third = eta.clone() / rational::rat_int(3);
    let two_thirds = eta.clone() * rational::rat(2, 3);
    let h_region = annulus(&sets.u_inner, &third, &two_thirds)
        .intersect(&sets.u_outer)
        .intersect(&sets.v_inner);
    if h_region.is_empty() {
        return Err(RelaxError::EmptyGluingRegion);
    }

    let eval_set = sets.u_inner.union(&sets.v_inner);
    let energy_u = bvfunc::energy(f, u, space, &sets.u_outer)?;
    let energy_v = bvfunc::energy(f, v, space, &sets.v_outer)?;

    let m_big = f.growth_upper();
    let mut best: Option<(f64, usize, GridFunction)> = None;
    for i in 1..=k {
        let r_in = eta.clone() * rational::rat((k + i - 1) as i64, (3 * k) as i64);
        let r_out = eta.clone() * rational::rat((k + i) as i64, (3 * k) as i64);
        let w_i = blend(u, v, &sets.u_inner, &r_in, &r_out, space, &eval_set);
        let e_w = bvfunc::energy(f, &w_i, space, &eval_set)?;
        if best.as_ref().map(|b| e_w < b.0).unwrap_or(true) {
            best = Some((e_w, i, w_i));
        }
    }
    let (energy_w, chosen_index, w) = best.unwrap();

    let cross_term: f64 = h_region
        .intervals()
        .iter()
        .map(|(lo, hi)| bvfunc::l1_distance_mu(u, v, space, lo, hi))
        .sum();
    let gradient_mass: f64 = h_region
        .intervals()
        .iter()
        .map(|(lo, hi)| {
            rational::to_f64(&space.mu_interval(lo, hi))
                + u.integral_gradient_mu(space, lo, hi)
                + v.integral_gradient_mu(space, lo, hi)
        })
        .sum();
    let constant = 3.0 * m_big / rational::to_f64(&eta);
    let epsilon = m_big / k as f64 * gradient_mass;
    let rhs = energy_u + energy_v + constant * cross_term + epsilon;
    Ok((
        w,
        GlueCertificate {
            energy_w,
            energy_u,
            energy_v,
            cross_term,
            constant,
            epsilon,
            chosen_index,
            slack: rhs - energy_w,
        },
    ))
}

fn distance_to_complement(inner: &OpenSet, outer: &OpenSet) -> Rat {
    let mut best: Option<Rat> = None;
    for (lo, hi) in inner.intervals() {
        let host = outer
            .intervals()
            .iter()
            .find(|(olo, ohi)| olo <= lo && hi <= ohi)
            .expect("inner set not inside outer set");
        for d in [lo.clone() - host.0.clone(), host.1.clone() - hi.clone()] {
            best = Some(match best {
                None => d,
                Some(b) => rational::min_rat(b, d),
            });
        }
    }
    best.expect("empty inner set")
}

/// `{x : r_in < dist(x, inner) < r_out}`.
fn annulus(inner: &OpenSet, r_in: &Rat, r_out: &Rat) -> OpenSet {
    let mut candidates = OpenSet::empty();
    for (lo, hi) in inner.intervals() {
        let left = OpenSet::interval(lo.clone() - r_out.clone(), lo.clone() - r_in.clone());
        let right = OpenSet::interval(hi.clone() + r_in.clone(), hi.clone() + r_out.clone());
        candidates = candidates.union(&left).union(&right);
    }
    let near: Vec<(Rat, Rat)> = inner
        .intervals()
        .iter()
        .map(|(lo, hi)| (lo.clone() - r_in.clone(), hi.clone() + r_in.clone()))
        .collect();
    candidates.minus_closed(&near)
}

/// `w = phi u + (1 - phi) v` sampled on a grid refining both competitors,
/// the weight partition and the cutoff kinks.
fn blend(
    u: &GridFunction,
    v: &GridFunction,
    inner: &OpenSet,
    r_in: &Rat,
    r_out: &Rat,
    space: &WeightedIntervalSpace,
    eval_set: &OpenSet,
) -> GridFunction {
    let ivs = eval_set.intervals();
    let (lo, hi) = (ivs[0].0.clone(), ivs.last().unwrap().1.clone());
    let mut nodes: Vec<Rat> = vec![lo.clone(), hi.clone()];
    {
        let mut push = |x: Rat| {
            if x > lo && x < hi {
                nodes.push(x);
            }
        };
        for x in u.nodes().iter().chain(v.nodes()).chain(space.cuts()) {
            push(x.clone());
        }
        for (ilo, ihi) in inner.intervals() {
            for r in [r_in, r_out] {
                push(ilo.clone() - r.clone());
                push(ihi.clone() + r.clone());
            }
            push(ilo.clone());
            push(ihi.clone());
        }
        for w in inner.intervals().windows(2) {
            // nearest-component switchover
            push((w[0].1.clone() + w[1].0.clone()) / rational::rat_int(2));
        }
        for (slo, shi) in eval_set.intervals() {
            push(slo.clone());
            push(shi.clone());
        }
    }
    nodes.sort();
    nodes.dedup();
    let values: Vec<f64> = nodes
        .iter()
        .map(|x| {
            let d = dist_to_set(inner, x);
            let phi = if d <= *r_in {
                1.0
            } else if d >= *r_out {
                0.0
            } else {
                rational::to_f64(&(r_out.clone() - d))
                    / rational::to_f64(&(r_out.clone() - r_in.clone()))
            };
            phi * u.eval(x) + (1.0 - phi) * v.eval(x)
        })
        .collect();
    GridFunction::new(nodes, values).expect("blend grid")
}

fn dist_to_set(set: &OpenSet, x: &Rat) -> Rat {
    let mut best: Option<Rat> = None;
    for (lo, hi) in set.intervals() {
        let d = if x < lo {
            lo.clone() - x.clone()
        } else if x > hi {
            x.clone() - hi.clone()
        } else {
            Rat::zero()
        };
        best = Some(match best {
            None => d,
            Some(b) => rational::min_rat(b, d),
        });
    }
    best.expect("empty set")
}

/// Integral-representation sandwich for one target.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub lower: f64,
    pub value: f64,
    /// Smallest `C >= 1` with `value <= int f(C a) dmu + f_infty ||Du||^s`,
    /// by bisection; `None` when no finite `C` closes the gap (possible only
    /// when the density vanishes on the relevant set).
    pub c_empirical: Option<f64>,
    pub lower_ok: bool,
}

pub fn sandwich_check(
    f: &Integrand,
    u: &BvRepresentation,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
    schedule: &Schedule,
    tol: f64,
) -> Result<SandwichReport, RelaxError> {
    let target = RelaxTarget::from_bv(u.clone());
    let report = relax_extrapolate(f, &target, space, omega, schedule)?;
    let value = report.extrapolated;
    let nu = u.variation_measure(space);
    let mu_omega = rational::to_f64(&space.mu_of(omega).unwrap());
    let covered: f64 = nu
        .density_pieces()
        .map(|(lo, hi, _)| {
            rational::to_f64(&space.mu_of(&omega.intersect_interval(lo, hi)).unwrap())
        })
        .sum();
    let upper_at = |c: f64| -> f64 {
        let mut total = 0.0;
        for (lo, hi, a) in nu.density_pieces() {
            let cell = omega.intersect_interval(lo, hi);
            total += f.eval(c * a) * rational::to_f64(&space.mu_of(&cell).unwrap());
        }
        total += f.f0() * (mu_omega - covered).max(0.0);
        total + f.f_infty() * nu.singular_mass(omega)
    };
    let c_empirical = if upper_at(1.0) + tol >= value {
        Some(1.0)
    } else {
        let mut hi = 2.0;
        let mut found = None;
        for _ in 0..60 {
            if upper_at(hi) >= value {
                found = Some(hi);
                break;
            }
            hi *= 2.0;
        }
        found.map(|hi0| {
            let (mut lo, mut hi) = (1.0, hi0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if upper_at(mid) >= value {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        })
    };
    Ok(SandwichReport {
        lower: f.measure_functional(&nu, space, omega),
        value,
        c_empirical,
        lower_ok: f.measure_functional(&nu, space, omega) <= value + tol,
    })
}

/// Weak-star behavior of the near-optimal tail competitor on subsets.
#[derive(Clone, Debug)]
pub struct WeakStarReport {
    /// Per open subset `U`: `(F(u,U), int_U f(g_v) dmu, integral - F)`;
    /// the slack must be `>= -tol` (lower semicontinuity on open sets).
    pub open_checks: Vec<(f64, f64, f64)>,
    /// Per closed core `F`: `(int_F f(g_v) dmu, F(u, open approx), F - integral)`.
    pub closed_checks: Vec<(f64, f64, f64)>,
}

pub fn weakstar_check(
    f: &Integrand,
    target: &RelaxTarget,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
    opens: &[OpenSet],
    closed_cores: &[OpenSet],
    schedule: &Schedule,
) -> Result<WeakStarReport, RelaxError> {
    let (n, eps) = schedule.tail();
    let tail = relax_value(f, target, space, omega, n, eps)?;
    let energy_on = |set: &OpenSet| -> f64 {
        tail.minimizers
            .iter()
            .map(|v| {
                let (lo, hi) = v.span();
                bvfunc::energy(f, v, space, &set.intersect_interval(lo, hi)).unwrap_or(0.0)
            })
            .sum()
    };
    let mut open_checks = Vec::new();
    for u_set in opens {
        let fu = relax_value(f, target, space, u_set, n, eps)?.value;
        let integral = energy_on(u_set);
        open_checks.push((fu, integral, integral - fu));
    }
    let mut closed_checks = Vec::new();
    for core in closed_cores {
        let margin = omega.length() / rational::rat_int(n as i64);
        let mut enlarged = OpenSet::empty();
        for (lo, hi) in core.intervals() {
            enlarged = enlarged.union(&OpenSet::interval(
                lo.clone() - margin.clone(),
                hi.clone() + margin.clone(),
            ));
        }
        let enlarged = enlarged.intersect(omega);
        let fu = relax_value(f, target, space, &enlarged, n, eps)?.value;
        let integral = energy_on(core);
        closed_checks.push((integral, fu, fu - integral));
    }
    Ok(WeakStarReport {
        open_checks,
        closed_checks,
    })
}
