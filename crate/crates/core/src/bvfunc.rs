//! Grid functions, upper gradients, energies, perimeters of level sets, the
//! coarea identity, and the variation-measure decomposition
//! `d||Du|| = a dmu + atoms`.
//!
//! Grid functions are piecewise linear on a rational partition; they are the
//! discretization of locally Lipschitz competitors and of BV targets. Jump
//! parts are carried separately in [`BvRepresentation`]; atoms at weight
//! discontinuities are priced by the min-side rule of
//! [`WeightedIntervalSpace::jump_cost_density`].

use crate::integrand::Integrand;
use crate::rational::{self, Rat};
use crate::space::{OpenSet, WeightedIntervalSpace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BvError {
    #[error("grid function needs >= 2 nodes and matching value count")]
    BadGrid,
    #[error("grid nodes must be strictly increasing (degenerate cell)")]
    DegenerateCell,
    #[error("jump locations must be distinct interior points with nonzero heights")]
    BadJumps,
    #[error("evaluation set outside the partition span")]
    OutsideSpan,
}

/// Piecewise-linear function on a rational partition.
#[derive(Clone, Debug)]
pub struct GridFunction {
    nodes: Vec<Rat>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(nodes: Vec<Rat>, values: Vec<f64>) -> Result<Self, BvError> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(BvError::BadGrid);
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BvError::DegenerateCell);
        }
        Ok(Self { nodes, values })
    }

    /// Samples `f` at the given nodes.
    pub fn sample(nodes: Vec<Rat>, f: impl Fn(&Rat) -> f64) -> Result<Self, BvError> {
        let values = nodes.iter().map(&f).collect();
        Self::new(nodes, values)
    }

    /// Linear function `x` on `[lo, hi]` with the given endpoint values.
    pub fn linear(lo: Rat, hi: Rat, v_lo: f64, v_hi: f64) -> Self {
        Self::new(vec![lo, hi], vec![v_lo, v_hi]).unwrap()
    }

    pub fn nodes(&self) -> &[Rat] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn span(&self) -> (&Rat, &Rat) {
        (self.nodes.first().unwrap(), self.nodes.last().unwrap())
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Piecewise-linear evaluation; clamps to the span endpoints outside.
    pub fn eval(&self, x: &Rat) -> f64 {
        if *x <= self.nodes[0] {
            return self.values[0];
        }
        if *x >= *self.nodes.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let i = match self.nodes.binary_search(x) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = rational::to_f64(&(self.nodes[i + 1].clone() - self.nodes[i].clone()));
        let t = rational::to_f64(&(x.clone() - self.nodes[i].clone())) / h;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Per-cell slope magnitudes: the minimal 1-weak upper gradient of a
    /// piecewise-linear function in one dimension is `|u'|`.
    pub fn upper_gradient(&self) -> Vec<(Rat, Rat, f64)> {
        (0..self.cell_count())
            .map(|i| {
                let h = rational::to_f64(&(self.nodes[i + 1].clone() - self.nodes[i].clone()));
                (
                    self.nodes[i].clone(),
                    self.nodes[i + 1].clone(),
                    (self.values[i + 1] - self.values[i]).abs() / h,
                )
            })
            .collect()
    }

    /// `int_(lo,hi) u dmu`, exact per weight piece (`u` linear on each cell).
    pub fn integral_mu(&self, space: &WeightedIntervalSpace, lo: &Rat, hi: &Rat) -> f64 {
        let mut total = 0.0;
        self.for_each_linear_piece(space, lo, hi, |s, e, us, ue, w| {
            let len = rational::to_f64(&(e.clone() - s.clone()));
            total += 0.5 * (us + ue) * len * w;
        });
        total
    }

    /// `int_(lo,hi) |u - c| dmu`, splitting cells at the sign change so the
    /// integral of the absolute value is exact.
    pub fn integral_abs_dev_mu(
        &self,
        space: &WeightedIntervalSpace,
        lo: &Rat,
        hi: &Rat,
        c: f64,
    ) -> f64 {
        let mut total = 0.0;
        self.for_each_linear_piece(space, lo, hi, |s, e, us, ue, w| {
            let len = rational::to_f64(&(e.clone() - s.clone()));
            total += abs_linear_integral(us - c, ue - c, len) * w;
        });
        total
    }

    /// `int_(lo,hi) g_u dmu`.
    pub fn integral_gradient_mu(&self, space: &WeightedIntervalSpace, lo: &Rat, hi: &Rat) -> f64 {
        let mut total = 0.0;
        for (s, e, g) in self.upper_gradient() {
            let cs = rational::max_rat(s, lo.clone());
            let ce = rational::min_rat(e, hi.clone());
            if cs < ce {
                total += g * rational::to_f64(&space.mu_interval(&cs, &ce));
            }
        }
        total
    }

    /// Walks the common refinement of the grid, the weight partition and
    /// `(lo, hi)`, yielding `(s, e, u(s), u(e), w)` per linear piece.
    fn for_each_linear_piece(
        &self,
        space: &WeightedIntervalSpace,
        lo: &Rat,
        hi: &Rat,
        mut visit: impl FnMut(&Rat, &Rat, f64, f64, f64),
    ) {
        let mut cuts: Vec<Rat> = Vec::new();
        cuts.push(rational::max_rat(lo.clone(), self.nodes[0].clone()));
        let end = rational::min_rat(hi.clone(), self.nodes.last().unwrap().clone());
        for x in self.nodes.iter().chain(space.cuts()) {
            if *x > cuts[0] && *x < end {
                cuts.push(x.clone());
            }
        }
        cuts.push(end);
        cuts.sort();
        cuts.dedup();
        if cuts.len() < 2 {
            return;
        }
        for w in cuts.windows(2) {
            let mid = (w[0].clone() + w[1].clone()) / rational::rat_int(2);
            let weight = rational::to_f64(&space.weight_at(&mid));
            visit(&w[0], &w[1], self.eval(&w[0]), self.eval(&w[1]), weight);
        }
    }
}

/// Exact `int |u - v| dmu` over `(lo, hi)` for two grid functions.
pub fn l1_distance_mu(
    u: &GridFunction,
    v: &GridFunction,
    space: &WeightedIntervalSpace,
    lo: &Rat,
    hi: &Rat,
) -> f64 {
    let mut cuts: Vec<Rat> = u
        .nodes()
        .iter()
        .chain(v.nodes())
        .chain(space.cuts())
        .filter(|x| **x > *lo && **x < *hi)
        .cloned()
        .collect();
    cuts.push(lo.clone());
    cuts.push(hi.clone());
    cuts.sort();
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = (w[0].clone() + w[1].clone()) / rational::rat_int(2);
        let weight = rational::to_f64(&space.weight_at(&mid));
        let len = rational::to_f64(&(w[1].clone() - w[0].clone()));
        let ds = u.eval(&w[0]) - v.eval(&w[0]);
        let de = u.eval(&w[1]) - v.eval(&w[1]);
        total += abs_linear_integral(ds, de, len) * weight;
    }
    total
}

/// `int_0^len |linear interpolation between a and b| dx`, exact.
fn abs_linear_integral(a: f64, b: f64, len: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * (a.abs() + b.abs()) * len
    } else {
        // root splits the cell; both triangles integrate exactly
        let root = a / (a - b);
        0.5 * len * (a.abs() * root + b.abs() * (1.0 - root))
    }
}

/// BV function as an absolutely continuous grid part plus interior jumps.
#[derive(Clone, Debug)]
pub struct BvRepresentation {
    pub ac_part: GridFunction,
    /// `(location, signed height)`, distinct interior locations.
    pub jumps: Vec<(Rat, f64)>,
    /// Label for generator-based parts (the Cantor module plugs in here).
    pub label: Option<String>,
}

impl BvRepresentation {
    pub fn new(ac_part: GridFunction, mut jumps: Vec<(Rat, f64)>) -> Result<Self, BvError> {
        jumps.sort_by(|p, q| p.0.cmp(&q.0));
        let (lo, hi) = ac_part.span();
        for j in &jumps {
            if j.1 == 0.0 || j.0 <= *lo || j.0 >= *hi {
                return Err(BvError::BadJumps);
            }
        }
        if jumps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(BvError::BadJumps);
        }
        Ok(Self {
            ac_part,
            jumps,
            label: None,
        })
    }

    pub fn from_grid(ac_part: GridFunction) -> Self {
        Self {
            ac_part,
            jumps: vec![],
            label: None,
        }
    }

    /// One-sided value `u(x-)` (left limit).
    pub fn eval_left(&self, x: &Rat) -> f64 {
        let below: f64 = self
            .jumps
            .iter()
            .filter(|(loc, _)| loc < x)
            .map(|(_, h)| *h)
            .sum();
        self.ac_part.eval(x) + below
    }

    /// One-sided value `u(x+)` (right limit).
    pub fn eval_right(&self, x: &Rat) -> f64 {
        let upto: f64 = self
            .jumps
            .iter()
            .filter(|(loc, _)| loc <= x)
            .map(|(_, h)| *h)
            .sum();
        self.ac_part.eval(x) + upto
    }

    /// Lower and upper approximate limits `(u^, u^v)` at `x`.
    pub fn approx_limits(&self, x: &Rat) -> (f64, f64) {
        let l = self.eval_left(x);
        let r = self.eval_right(x);
        (l.min(r), l.max(r))
    }

    /// `int_(lo,hi) |u - c| dmu` including the jump offsets.
    pub fn integral_abs_dev_mu(
        &self,
        space: &WeightedIntervalSpace,
        lo: &Rat,
        hi: &Rat,
        c: f64,
    ) -> f64 {
        // integrate between consecutive jump locations; u is ac + constant there
        let mut cuts: Vec<Rat> = vec![lo.clone(), hi.clone()];
        for (loc, _) in &self.jumps {
            if loc > lo && loc < hi {
                cuts.push(loc.clone());
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let mid = (w[0].clone() + w[1].clone()) / rational::rat_int(2);
            let offset = self.eval_right(&w[0]) - self.ac_part.eval(&w[0]);
            let _ = mid;
            total += self
                .ac_part
                .integral_abs_dev_mu(space, &w[0], &w[1], c - offset);
        }
        total
    }

    /// The decomposition `d||Du|| = a dmu + atoms`: the density is the ac
    /// slope magnitude per cell (`d||Du_ac|| = |u'| w dL = |u'| dmu`), atoms
    /// sit at the jump locations with the min-side cost
    /// `|height| * rho(location)`. Atoms are singular with respect to `mu`.
    pub fn variation_measure(&self, space: &WeightedIntervalSpace) -> VariationMeasure {
        let density = self.ac_part.upper_gradient();
        let atoms = self
            .jumps
            .iter()
            .map(|(loc, h)| {
                (
                    loc.clone(),
                    h.abs() * rational::to_f64(&space.jump_cost_density(loc)),
                )
            })
            .collect();
        VariationMeasure::new(density, atoms)
    }
}

/// Measure `dnu = a dmu + atoms`, with `a >= 0` piecewise constant.
#[derive(Clone, Debug)]
pub struct VariationMeasure {
    /// `(lo, hi, a)` with `a` the density with respect to `mu`.
    density: Vec<(Rat, Rat, f64)>,
    /// `(location, mass)`, masses positive.
    atoms: Vec<(Rat, f64)>,
}

impl VariationMeasure {
    pub fn new(density: Vec<(Rat, Rat, f64)>, atoms: Vec<(Rat, f64)>) -> Self {
        debug_assert!(density.iter().all(|(_, _, a)| *a >= 0.0));
        debug_assert!(atoms.iter().all(|(_, m)| *m > 0.0));
        Self { density, atoms }
    }

    pub fn zero() -> Self {
        Self {
            density: vec![],
            atoms: vec![],
        }
    }

    pub fn density_pieces(&self) -> impl Iterator<Item = (&Rat, &Rat, &f64)> {
        self.density.iter().map(|(lo, hi, a)| (lo, hi, a))
    }

    pub fn atoms(&self) -> &[(Rat, f64)] {
        &self.atoms
    }

    /// Absolutely continuous mass on `omega`.
    pub fn ac_mass(&self, space: &WeightedIntervalSpace, omega: &OpenSet) -> f64 {
        self.density
            .iter()
            .map(|(lo, hi, a)| {
                a * rational::to_f64(&space.mu_of(&omega.intersect_interval(lo, hi)).unwrap())
            })
            .sum()
    }

    /// Singular (atomic) mass on `omega`.
    pub fn singular_mass(&self, omega: &OpenSet) -> f64 {
        self.atoms
            .iter()
            .filter(|(x, _)| omega.contains(x))
            .map(|(_, m)| *m)
            .sum()
    }

    pub fn total_mass(&self, space: &WeightedIntervalSpace, omega: &OpenSet) -> f64 {
        self.ac_mass(space, omega) + self.singular_mass(omega)
    }

    /// Density value at a point (0 off the support).
    pub fn density_at(&self, x: &Rat) -> f64 {
        for (lo, hi, a) in &self.density {
            if lo <= x && x < hi {
                return *a;
            }
        }
        0.0
    }
}

/// `int_{Omega} f(g_u) dmu` for a piecewise-linear competitor, exact given
/// the rational cell measures.
pub fn energy(
    f: &Integrand,
    u: &GridFunction,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
) -> Result<f64, BvError> {
    let (lo, hi) = u.span();
    if omega
        .intervals()
        .iter()
        .any(|(s, e)| s < lo || e > hi)
    {
        return Err(BvError::OutsideSpan);
    }
    let mut total = 0.0;
    for (s, e, g) in u.upper_gradient() {
        let cell = omega.intersect_interval(&s, &e);
        let mass = space.mu_of(&cell).expect("cell in domain");
        total += f.eval(g) * rational::to_f64(&mass);
    }
    Ok(total)
}

/// Perimeter `P(E, Omega)`: sum of the jump cost density over the boundary
/// points of the level set that lie in `Omega`.
pub fn perimeter(levelset: &OpenSet, space: &WeightedIntervalSpace, omega: &OpenSet) -> f64 {
    levelset
        .boundary()
        .into_iter()
        .filter(|x| omega.contains(x))
        .map(|x| rational::to_f64(&space.jump_cost_density(&x)))
        .sum()
}

/// Both sides of the coarea identity
/// `||Du||(Omega) = int P({u > t}, Omega) dt`.
///
/// The left side is `int_Omega g_u dmu`. The right side is an independent
/// exact integral in `t`: between consecutive breakpoints (node values,
/// values at weight joints, values at the boundary of `Omega`) the perimeter
/// of the superlevel set is constant and is evaluated at the midpoint by
/// locating the crossings cell by cell. Superlevel sets use the strict
/// convention `{u > t}`.
pub fn coarea_both_sides(
    u: &GridFunction,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
) -> (f64, f64) {
    let lhs = omega
        .intervals()
        .iter()
        .map(|(lo, hi)| u.integral_gradient_mu(space, lo, hi))
        .sum();

    // t-breakpoints: wherever a crossing can change cell, cross a weight
    // joint, or enter/leave Omega.
    let mut breaks: Vec<f64> = u.values().to_vec();
    let (ulo, uhi) = u.span();
    for x in space.cuts() {
        if x >= ulo && x <= uhi {
            breaks.push(u.eval(x));
        }
    }
    for x in omega.boundary() {
        if x >= *ulo && x <= *uhi {
            breaks.push(u.eval(&x));
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut rhs = 0.0;
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= 0.0 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        rhs += superlevel_perimeter(u, space, omega, tm) * (t1 - t0);
    }
    (lhs, rhs)
}

/// `P({u > t}, Omega)` at a generic level `t` (no node value equal to `t`).
fn superlevel_perimeter(
    u: &GridFunction,
    space: &WeightedIntervalSpace,
    omega: &OpenSet,
    t: f64,
) -> f64 {
    let nodes = u.nodes();
    let values = u.values();
    let mut total = 0.0;
    for i in 0..u.cell_count() {
        let (a, b) = (values[i], values[i + 1]);
        if (a - t) * (b - t) < 0.0 {
            // one crossing inside this cell
            let frac = (t - a) / (b - a);
            let x0 = rational::to_f64(&nodes[i]);
            let x1 = rational::to_f64(&nodes[i + 1]);
            let x = x0 + frac * (x1 - x0);
            if omega_contains_f64(omega, x) {
                total += rho_at_f64(space, x);
            }
        }
    }
    total
}

fn omega_contains_f64(omega: &OpenSet, x: f64) -> bool {
    omega
        .intervals()
        .iter()
        .any(|(lo, hi)| rational::to_f64(lo) < x && x < rational::to_f64(hi))
}

/// Jump cost at a floating-point position: at generic (non-joint) points this
/// is the local weight value.
fn rho_at_f64(space: &WeightedIntervalSpace, x: f64) -> f64 {
    let cuts = space.cuts();
    let mut piece = 0;
    for (i, c) in cuts.iter().enumerate().skip(1) {
        if x < rational::to_f64(c) {
            piece = i - 1;
            break;
        }
        piece = i.min(cuts.len() - 2);
    }
    let (lo, hi, w) = space
        .pieces()
        .nth(piece)
        .map(|(lo, hi, w)| (lo.clone(), hi.clone(), w.clone()))
        .unwrap();
    let _ = (lo, hi);
    rational::to_f64(&w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use approx::assert_abs_diff_eq;

    fn unit_space() -> WeightedIntervalSpace {
        WeightedIntervalSpace::unit(rat_int(0), rat_int(1))
    }

    fn identity(n: usize) -> GridFunction {
        let nodes: Vec<Rat> = (0..=n).map(|i| rat(i as i64, n as i64)).collect();
        let values: Vec<f64> = nodes.iter().map(rational::to_f64).collect();
        GridFunction::new(nodes, values).unwrap()
    }

    #[test]
    fn upper_gradient_of_identity_is_one() {
        let u = identity(8);
        for (_, _, g) in u.upper_gradient() {
            assert_abs_diff_eq!(g, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn upper_gradient_of_constant_is_zero() {
        let u = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![3.0, 3.0]).unwrap();
        assert_abs_diff_eq!(u.upper_gradient()[0].2, 0.0);
    }

    #[test]
    fn degenerate_cell_rejected() {
        assert!(GridFunction::new(vec![rat_int(0), rat_int(0)], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn energy_identity_tv() {
        let sp = unit_space();
        let f = Integrand::total_variation();
        let u = identity(16);
        let omega = sp.interior();
        assert_abs_diff_eq!(energy(&f, &u, &sp, &omega).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_constant_gives_f0_mass() {
        let sp = unit_space();
        let f = Integrand::new(0.7, vec![], vec![1.0]).unwrap();
        let u = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![2.0, 2.0]).unwrap();
        let omega = sp.interior();
        assert_abs_diff_eq!(energy(&f, &u, &sp, &omega).unwrap(), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn energy_outside_span_rejected() {
        let sp = WeightedIntervalSpace::unit(rat_int(-1), rat_int(2));
        let f = Integrand::total_variation();
        let u = identity(4);
        let omega = OpenSet::interval(rat_int(-1), rat_int(1));
        assert!(energy(&f, &u, &sp, &omega).is_err());
    }

    #[test]
    fn perimeter_examples() {
        let sp = unit_space();
        let omega = sp.interior();
        let e = OpenSet::interval(rat_int(0), rat(1, 2));
        // only the crossing at 1/2 is interior to Omega
        assert_abs_diff_eq!(perimeter(&e, &sp, &omega), 1.0);
        assert_abs_diff_eq!(perimeter(&OpenSet::empty(), &sp, &omega), 0.0);
        let e2 = OpenSet::interval(rat(1, 4), rat(3, 4));
        assert_abs_diff_eq!(perimeter(&e2, &sp, &omega), 2.0);
    }

    #[test]
    fn perimeter_complement_symmetric() {
        let sp = unit_space();
        let omega = sp.interior();
        let e = OpenSet::new(vec![(rat(1, 8), rat(1, 4)), (rat(1, 2), rat(5, 8))]).unwrap();
        let c = e.complement_within(&rat_int(0), &rat_int(1));
        assert_abs_diff_eq!(perimeter(&e, &sp, &omega), perimeter(&c, &sp, &omega));
    }

    #[test]
    fn coarea_identity_linear() {
        let sp = unit_space();
        let omega = sp.interior();
        let (lhs, rhs) = coarea_both_sides(&identity(8), &sp, &omega);
        assert_abs_diff_eq!(lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rhs, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coarea_identity_constant() {
        let sp = unit_space();
        let omega = sp.interior();
        let u = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![1.0, 1.0]).unwrap();
        let (lhs, rhs) = coarea_both_sides(&u, &sp, &omega);
        assert_abs_diff_eq!(lhs, 0.0);
        assert_abs_diff_eq!(rhs, 0.0);
    }

    #[test]
    fn coarea_identity_weighted_oscillation() {
        let sp = WeightedIntervalSpace::new(vec![
            (rat_int(0), rat(1, 2), rat_int(1)),
            (rat(1, 2), rat_int(1), rat_int(3)),
        ])
        .unwrap();
        let omega = sp.interior();
        let nodes: Vec<Rat> = vec![rat_int(0), rat(1, 4), rat(1, 2), rat(3, 4), rat_int(1)];
        let u = GridFunction::new(nodes, vec![0.0, 1.25, 0.5, 2.0, -0.25]).unwrap();
        let (lhs, rhs) = coarea_both_sides(&u, &sp, &omega);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
    }

    #[test]
    fn variation_measure_of_jump() {
        let sp = unit_space();
        let ac = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![0.0, 0.0]).unwrap();
        let u = BvRepresentation::new(ac, vec![(rat(1, 2), 1.0)]).unwrap();
        let nu = u.variation_measure(&sp);
        assert_eq!(nu.atoms().len(), 1);
        assert_abs_diff_eq!(nu.atoms()[0].1, 1.0);
        assert_abs_diff_eq!(nu.total_mass(&sp, &sp.interior()), 1.0);
    }

    #[test]
    fn variation_measure_identity() {
        let sp = unit_space();
        let u = BvRepresentation::from_grid(identity(4));
        let nu = u.variation_measure(&sp);
        assert!(nu.atoms().is_empty());
        assert_abs_diff_eq!(nu.total_mass(&sp, &sp.interior()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn variation_measure_homogeneous_and_shift_invariant() {
        let sp = unit_space();
        let nodes: Vec<Rat> = vec![rat_int(0), rat(1, 3), rat_int(1)];
        let base = GridFunction::new(nodes.clone(), vec![0.0, 2.0, 1.0]).unwrap();
        let scaled = GridFunction::new(nodes.clone(), vec![0.0, 6.0, 3.0]).unwrap();
        let shifted = GridFunction::new(nodes, vec![5.0, 7.0, 6.0]).unwrap();
        let omega = sp.interior();
        let m0 = BvRepresentation::from_grid(base).variation_measure(&sp);
        let m1 = BvRepresentation::from_grid(scaled).variation_measure(&sp);
        let m2 = BvRepresentation::from_grid(shifted).variation_measure(&sp);
        assert_abs_diff_eq!(
            3.0 * m0.total_mass(&sp, &omega),
            m1.total_mass(&sp, &omega),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            m0.total_mass(&sp, &omega),
            m2.total_mass(&sp, &omega),
            epsilon = 1e-12
        );
    }

    #[test]
    fn l1_distance_simple() {
        let sp = unit_space();
        let u = identity(4);
        let v = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![0.0, 0.0]).unwrap();
        let d = l1_distance_mu(&u, &v, &sp, &rat_int(0), &rat_int(1));
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn l1_distance_sign_change_exact() {
        let sp = unit_space();
        let u = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![-1.0, 1.0]).unwrap();
        let v = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![0.0, 0.0]).unwrap();
        let d = l1_distance_mu(&u, &v, &sp, &rat_int(0), &rat_int(1));
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn bv_side_values() {
        let sp = unit_space();
        let _ = sp;
        let ac = GridFunction::new(vec![rat_int(0), rat_int(1)], vec![0.0, 1.0]).unwrap();
        let u = BvRepresentation::new(ac, vec![(rat(1, 2), 2.0)]).unwrap();
        assert_abs_diff_eq!(u.eval_left(&rat(1, 2)), 0.5);
        assert_abs_diff_eq!(u.eval_right(&rat(1, 2)), 2.5);
        let (lo, hi) = u.approx_limits(&rat(1, 2));
        assert_abs_diff_eq!(lo, 0.5);
        assert_abs_diff_eq!(hi, 2.5);
    }
}
