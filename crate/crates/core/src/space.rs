//! The weighted interval metric measure space `(X, d, mu)`.
//!
//! `X = [a, b]` with the Euclidean distance and `dmu = w dL`, where `w` is
//! piecewise constant with exact rational piece endpoints and values in
//! `[w_min, w_max]`, `w_min > 0`. The measure is doubling and the space
//! supports a (1,1)-Poincare inequality with dilation `lambda = 1`; analytic
//! bounds for both constants are derived from the weight range and checked
//! empirically by [`WeightedIntervalSpace::doubling_check`].

use crate::rational::{self, Rat, RatStr};
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("weight pieces must partition [a,b]: {0}")]
    BadPartition(String),
    #[error("weight values must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("set endpoints outside the space domain")]
    OutsideDomain,
    #[error("open set intervals must be nonempty, disjoint and sorted")]
    BadOpenSet,
}

/// One weight piece: `w = value` on `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightPiece {
    pub lo: RatStr,
    pub hi: RatStr,
    pub w: RatStr,
}

/// Compact weighted interval `([a,b], |.|, w dL)`.
#[derive(Clone, Debug)]
pub struct WeightedIntervalSpace {
    a: Rat,
    b: Rat,
    /// Sorted piece boundaries `a = x_0 < x_1 < ... < x_n = b`.
    cuts: Vec<Rat>,
    /// Weight value on `(x_i, x_{i+1})`.
    weights: Vec<Rat>,
    w_min: Rat,
    w_max: Rat,
}

impl WeightedIntervalSpace {
    /// Builds the space from `(lo, hi, w)` pieces; the pieces must tile
    /// `[a, b]` without gaps or overlaps.
    pub fn new(pieces: Vec<(Rat, Rat, Rat)>) -> Result<Self, SpaceError> {
        if pieces.is_empty() {
            return Err(SpaceError::BadPartition("no pieces".into()));
        }
        let mut pieces = pieces;
        pieces.sort_by(|p, q| p.0.cmp(&q.0));
        let mut cuts = vec![pieces[0].0.clone()];
        let mut weights = Vec::with_capacity(pieces.len());
        for (lo, hi, w) in &pieces {
            if lo >= hi {
                return Err(SpaceError::BadPartition(format!(
                    "empty piece [{}, {}]",
                    rational::format_rat(lo),
                    rational::format_rat(hi)
                )));
            }
            if *lo != *cuts.last().unwrap() {
                return Err(SpaceError::BadPartition(format!(
                    "gap or overlap at {}",
                    rational::format_rat(lo)
                )));
            }
            if *w <= Rat::zero() {
                return Err(SpaceError::NonPositiveWeight(rational::format_rat(w)));
            }
            cuts.push(hi.clone());
            weights.push(w.clone());
        }
        let w_min = weights.iter().cloned().reduce(rational::min_rat).unwrap();
        let w_max = weights.iter().cloned().reduce(rational::max_rat).unwrap();
        Ok(Self {
            a: cuts[0].clone(),
            b: cuts.last().unwrap().clone(),
            cuts,
            weights,
            w_min,
            w_max,
        })
    }

    /// Unweighted space on `[a, b]`.
    pub fn unit(a: Rat, b: Rat) -> Self {
        Self::new(vec![(a, b, rational::rat_int(1))]).unwrap()
    }

    pub fn lo(&self) -> &Rat {
        &self.a
    }

    pub fn hi(&self) -> &Rat {
        &self.b
    }

    pub fn w_min(&self) -> &Rat {
        &self.w_min
    }

    pub fn w_max(&self) -> &Rat {
        &self.w_max
    }

    /// Piece boundaries including both domain endpoints.
    pub fn cuts(&self) -> &[Rat] {
        &self.cuts
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&Rat, &Rat, &Rat)> {
        (0..self.weights.len()).map(move |i| (&self.cuts[i], &self.cuts[i + 1], &self.weights[i]))
    }

    /// Whole domain as an open set.
    pub fn interior(&self) -> OpenSet {
        OpenSet::new(vec![(self.a.clone(), self.b.clone())]).unwrap()
    }

    /// Weight value on the open piece containing `x`; at a piece boundary the
    /// one-sided values differ, see [`Self::weight_left`]/[`Self::weight_right`].
    pub fn weight_at(&self, x: &Rat) -> Rat {
        debug_assert!(*x >= self.a && *x <= self.b);
        // Right-continuous convention at cuts, left value at b.
        match self.cuts.binary_search(x) {
            Ok(i) => {
                if i < self.weights.len() {
                    self.weights[i].clone()
                } else {
                    self.weights[i - 1].clone()
                }
            }
            Err(i) => self.weights[i - 1].clone(),
        }
    }

    /// One-sided weight limit from the left; at `x = a` this is the
    /// right-hand value (so that point content is single-sided there).
    pub fn weight_left(&self, x: &Rat) -> Rat {
        if *x <= self.a {
            return self.weight_right(x);
        }
        match self.cuts.binary_search(x) {
            Ok(i) => self.weights[i - 1].clone(),
            Err(i) => self.weights[i - 1].clone(),
        }
    }

    /// One-sided weight limit from the right; at `x = b` the left value.
    pub fn weight_right(&self, x: &Rat) -> Rat {
        if *x >= self.b {
            return self.weight_left(x);
        }
        match self.cuts.binary_search(x) {
            Ok(i) => self.weights[i].clone(),
            Err(i) => self.weights[i - 1].clone(),
        }
    }

    /// Exact measure of an interval `(lo, hi)` intersected with the domain.
    pub fn mu_interval(&self, lo: &Rat, hi: &Rat) -> Rat {
        let lo = rational::max_rat(lo.clone(), self.a.clone());
        let hi = rational::min_rat(hi.clone(), self.b.clone());
        if lo >= hi {
            return Rat::zero();
        }
        let mut total = Rat::zero();
        for (plo, phi, w) in self.pieces() {
            let s = rational::max_rat(lo.clone(), plo.clone());
            let e = rational::min_rat(hi.clone(), phi.clone());
            if s < e {
                total += w.clone() * (e - s);
            }
        }
        total
    }

    /// Exact measure of an open set.
    pub fn mu_of(&self, set: &OpenSet) -> Result<Rat, SpaceError> {
        if set
            .intervals()
            .iter()
            .any(|(lo, hi)| *lo < self.a || *hi > self.b)
        {
            return Err(SpaceError::OutsideDomain);
        }
        Ok(set
            .intervals()
            .iter()
            .map(|(lo, hi)| self.mu_interval(lo, hi))
            .fold(Rat::zero(), |acc, m| acc + m))
    }

    /// Measure of the ball `B(x, r)` (intersected with the domain).
    pub fn mu_ball(&self, x: &Rat, r: &Rat) -> Rat {
        self.mu_interval(&(x.clone() - r.clone()), &(x.clone() + r.clone()))
    }

    /// Codimension-1 point content `H({x}) = liminf_{r->0} mu(B(x,r))/r`.
    ///
    /// For piecewise-constant `w` the liminf is the sum of the one-sided
    /// weight limits (a single one-sided value at the domain endpoints), and
    /// a singleton is optimally covered by one ball, so this equals `H({x})`.
    pub fn point_hausdorff(&self, x: &Rat) -> Rat {
        if *x <= self.a || *x >= self.b {
            // half-ball only
            if *x <= self.a {
                self.weight_right(&self.a)
            } else {
                self.weight_left(&self.b)
            }
        } else {
            self.weight_left(x) + self.weight_right(x)
        }
    }

    /// Relaxed cost per unit jump height at an interior point `x`:
    /// `rho(x) = min(w_left, w_right)`. Lipschitz approximations smear the
    /// transition into the cheaper side, which is what the relaxation oracle
    /// converges to (acceptance A3).
    pub fn jump_cost_density(&self, x: &Rat) -> Rat {
        rational::min_rat(self.weight_left(x), self.weight_right(x))
    }

    /// Analytic doubling bound: `mu(2B) <= 4 (w_max/w_min) mu(B)` for every
    /// ball, the extra factor 2 covering balls clipped by the domain.
    pub fn doubling_bound(&self) -> Rat {
        rational::rat_int(4) * self.w_max.clone() / self.w_min.clone()
    }

    /// Analytic Poincare bound with dilation `lambda = 1`:
    /// `c_P <= 2 w_max / w_min`.
    pub fn poincare_bound(&self) -> Rat {
        rational::rat_int(2) * self.w_max.clone() / self.w_min.clone()
    }

    /// Witness constant for the dimension bound
    /// `mu(B(y,r))/mu(B(x,R)) >= C (r/R)^Q` with `Q = 1`.
    pub fn dimension_witness(&self) -> (Rat, u32) {
        (self.w_min.clone() / (rational::rat_int(2) * self.w_max.clone()), 1)
    }

    /// Empirical doubling and Poincare constants over random samples, checked
    /// against the analytic bounds. Sampling is deterministic in the seed.
    pub fn doubling_check(&self, samples: usize, seed: u64) -> DoublingReport {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let len = self.b.clone() - self.a.clone();
        let denom = 1 << 20;
        let mut c_d_emp = Rat::zero();
        for _ in 0..samples {
            let xi: i64 = rng.gen_range(0..=denom);
            let ri: i64 = rng.gen_range(1..=denom);
            let x = self.a.clone() + len.clone() * rational::rat(xi, denom);
            // radii up to half the domain length
            let r = len.clone() * rational::rat(ri, 2 * denom);
            let small = self.mu_ball(&x, &r);
            if small.is_zero() {
                continue;
            }
            let big = self.mu_ball(&x, &(r.clone() * rational::rat_int(2)));
            let ratio = big / small;
            c_d_emp = rational::max_rat(c_d_emp, ratio);
        }

        // Poincare with lambda = 1 over random piecewise-linear test functions:
        // ratio of mean oscillation on B to r * mean of the upper gradient.
        let mut c_p_emp = 0.0f64;
        for _ in 0..samples.min(2000) {
            let nodes = rng.gen_range(2..6);
            let mut xs: Vec<Rat> = (0..=nodes)
                .map(|i| self.a.clone() + len.clone() * rational::rat(i, nodes))
                .collect();
            xs.dedup();
            let vals: Vec<f64> = (0..xs.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = crate::bvfunc::GridFunction::new(xs, vals).unwrap();
            let xi: i64 = rng.gen_range(0..=denom);
            let ri: i64 = rng.gen_range(1..=denom);
            let x = self.a.clone() + len.clone() * rational::rat(xi, denom);
            let r = len.clone() * rational::rat(ri, 2 * denom);
            if let Some(ratio) = poincare_ratio(self, &u, &x, &r) {
                c_p_emp = c_p_emp.max(ratio);
            }
        }

        DoublingReport {
            c_d_empirical: c_d_emp.clone(),
            c_d_bound: self.doubling_bound(),
            c_p_empirical: c_p_emp,
            c_p_bound: rational::to_f64(&self.poincare_bound()),
            doubling_ok: c_d_emp <= self.doubling_bound(),
            poincare_ok: c_p_emp <= rational::to_f64(&self.poincare_bound()) + 1e-9,
        }
    }
}

/// Empirical-vs-analytic constants for one space.
#[derive(Clone, Debug)]
pub struct DoublingReport {
    pub c_d_empirical: Rat,
    pub c_d_bound: Rat,
    pub c_p_empirical: f64,
    pub c_p_bound: f64,
    pub doubling_ok: bool,
    pub poincare_ok: bool,
}

/// `(mean oscillation of u on B) / (r * mean of g_u on B)`, or `None` when the
/// gradient mass on the ball vanishes.
fn poincare_ratio(
    space: &WeightedIntervalSpace,
    u: &crate::bvfunc::GridFunction,
    x: &Rat,
    r: &Rat,
) -> Option<f64> {
    let lo = rational::max_rat(x.clone() - r.clone(), space.lo().clone());
    let hi = rational::min_rat(x.clone() + r.clone(), space.hi().clone());
    if lo >= hi {
        return None;
    }
    let mu_ball = space.mu_interval(&lo, &hi);
    if mu_ball.is_zero() {
        return None;
    }
    let mu_ball_f = rational::to_f64(&mu_ball);
    let mean = u.integral_mu(space, &lo, &hi) / mu_ball_f;
    let osc = u.integral_abs_dev_mu(space, &lo, &hi, mean) / mu_ball_f;
    let grad_mean = u.integral_gradient_mu(space, &lo, &hi) / mu_ball_f;
    if grad_mean <= 1e-14 {
        return None;
    }
    Some(osc / (rational::to_f64(r) * grad_mean))
}

/// Finite union of disjoint open subintervals, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSet {
    intervals: Vec<(Rat, Rat)>,
}

impl OpenSet {
    pub fn new(mut intervals: Vec<(Rat, Rat)>) -> Result<Self, SpaceError> {
        intervals.sort_by(|p, q| p.0.cmp(&q.0));
        for iv in &intervals {
            if iv.0 >= iv.1 {
                return Err(SpaceError::BadOpenSet);
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(SpaceError::BadOpenSet);
            }
        }
        Ok(Self { intervals })
    }

    pub fn interval(lo: Rat, hi: Rat) -> Self {
        Self::new(vec![(lo, hi)]).unwrap()
    }

    pub fn empty() -> Self {
        Self { intervals: vec![] }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[(Rat, Rat)] {
        &self.intervals
    }

    /// Union, merging touching components (open sets `(0,1),(1,2)` stay
    /// separate components since the point `1` is missing).
    pub fn union(&self, other: &OpenSet) -> OpenSet {
        let mut ivs: Vec<(Rat, Rat)> = self
            .intervals
            .iter()
            .chain(other.intervals.iter())
            .cloned()
            .collect();
        ivs.sort_by(|p, q| p.0.cmp(&q.0));
        let mut out: Vec<(Rat, Rat)> = Vec::new();
        for (lo, hi) in ivs {
            match out.last_mut() {
                // strict overlap merges; touching endpoints do not
                Some(last) if lo < last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        OpenSet { intervals: out }
    }

    /// Intersection of two open sets.
    pub fn intersect(&self, other: &OpenSet) -> OpenSet {
        let mut out = Vec::new();
        for (lo, hi) in other.intervals() {
            out.extend(self.intersect_interval(lo, hi).intervals.into_iter());
        }
        out.sort_by(|p, q| p.0.cmp(&q.0));
        OpenSet { intervals: out }
    }

    /// Removes the closed intervals `[lo, hi]` from the set.
    pub fn minus_closed(&self, closed: &[(Rat, Rat)]) -> OpenSet {
        let mut current = self.intervals.clone();
        for (clo, chi) in closed {
            let mut next = Vec::new();
            for (lo, hi) in current {
                if *chi <= lo || *clo >= hi {
                    next.push((lo, hi));
                    continue;
                }
                if *clo > lo {
                    next.push((lo.clone(), clo.clone()));
                }
                if *chi < hi {
                    next.push((chi.clone(), hi.clone()));
                }
            }
            current = next;
        }
        OpenSet { intervals: current }
    }

    /// Intersection with an interval.
    pub fn intersect_interval(&self, lo: &Rat, hi: &Rat) -> OpenSet {
        let mut out = Vec::new();
        for (s, e) in &self.intervals {
            let s2 = rational::max_rat(s.clone(), lo.clone());
            let e2 = rational::min_rat(e.clone(), hi.clone());
            if s2 < e2 {
                out.push((s2, e2));
            }
        }
        OpenSet { intervals: out }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.intervals.iter().any(|(lo, hi)| lo < x && x < hi)
    }

    /// Whether `self` is a subset of `other` (componentwise inclusion).
    pub fn subset_of(&self, other: &OpenSet) -> bool {
        self.intervals.iter().all(|(lo, hi)| {
            other
                .intervals
                .iter()
                .any(|(olo, ohi)| olo <= lo && hi <= ohi)
        })
    }

    /// Boundary points (all interval endpoints; components are disjoint).
    pub fn boundary(&self) -> Vec<Rat> {
        let mut pts = Vec::new();
        for (lo, hi) in &self.intervals {
            pts.push(lo.clone());
            pts.push(hi.clone());
        }
        pts.sort();
        pts.dedup();
        pts
    }

    /// Total length (unweighted).
    pub fn length(&self) -> Rat {
        self.intervals
            .iter()
            .map(|(lo, hi)| hi.clone() - lo.clone())
            .fold(Rat::zero(), |acc, l| acc + l)
    }

    /// Complement within `[lo, hi]`, returned as an open set (the closed
    /// complement's interior).
    pub fn complement_within(&self, lo: &Rat, hi: &Rat) -> OpenSet {
        let mut out = Vec::new();
        let mut cursor = lo.clone();
        for (s, e) in &self.intervals {
            if *s > cursor && *s > *lo {
                let end = rational::min_rat(s.clone(), hi.clone());
                if cursor < end {
                    out.push((cursor.clone(), end));
                }
            }
            cursor = rational::max_rat(cursor, e.clone());
        }
        if cursor < *hi {
            out.push((cursor, hi.clone()));
        }
        OpenSet { intervals: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn halves() -> WeightedIntervalSpace {
        // w = 1 on (0, 1/2), 2 on (1/2, 1)
        WeightedIntervalSpace::new(vec![
            (rat_int(0), rat(1, 2), rat_int(1)),
            (rat(1, 2), rat_int(1), rat_int(2)),
        ])
        .unwrap()
    }

    #[test]
    fn mu_of_piecewise_sum() {
        let sp = halves();
        // set (1/4, 3/4) -> 1/4 + 1/2 = 3/4
        let m = sp.mu_interval(&rat(1, 4), &rat(3, 4));
        assert_eq!(m, rat(3, 4));
    }

    #[test]
    fn mu_of_unit_space() {
        let sp = WeightedIntervalSpace::unit(rat_int(0), rat_int(1));
        let s = OpenSet::interval(rat_int(0), rat_int(1));
        assert_eq!(sp.mu_of(&s).unwrap(), rat_int(1));
    }

    #[test]
    fn mu_rejects_outside_domain() {
        let sp = halves();
        let s = OpenSet::interval(rat_int(-1), rat(1, 2));
        assert!(sp.mu_of(&s).is_err());
    }

    #[test]
    fn mu_finitely_additive() {
        let sp = halves();
        let a = OpenSet::interval(rat_int(0), rat(1, 3));
        let b = OpenSet::interval(rat(1, 3), rat(7, 8));
        let u = a.union(&b);
        assert_eq!(
            sp.mu_of(&a).unwrap() + sp.mu_of(&b).unwrap(),
            sp.mu_of(&u).unwrap()
        );
    }

    #[test]
    fn point_content_values() {
        let sp = halves();
        // interior point with w = 1 both sides
        assert_eq!(sp.point_hausdorff(&rat(1, 4)), rat_int(2));
        // weight jump 1|2 at 1/2
        assert_eq!(sp.point_hausdorff(&rat(1, 2)), rat_int(3));
        // domain endpoint: half-ball only
        assert_eq!(sp.point_hausdorff(&rat_int(0)), rat_int(1));
        assert_eq!(sp.point_hausdorff(&rat_int(1)), rat_int(2));
    }

    #[test]
    fn jump_cost_min_side() {
        let sp = halves();
        assert_eq!(sp.jump_cost_density(&rat(1, 4)), rat_int(1));
        assert_eq!(sp.jump_cost_density(&rat(1, 2)), rat_int(1));
        assert_eq!(sp.jump_cost_density(&rat(3, 4)), rat_int(2));
    }

    #[test]
    fn jump_cost_below_point_content() {
        let sp = halves();
        for p in [rat(1, 8), rat(1, 2), rat(2, 3)] {
            let rho = sp.jump_cost_density(&p);
            let h = sp.point_hausdorff(&p);
            assert!(rho < h);
            let theta = rational::to_f64(&rho) / rational::to_f64(&h);
            assert!(theta > 0.0 && theta < 1.0);
        }
    }

    #[test]
    fn doubling_check_within_bounds() {
        let sp = halves();
        let rep = sp.doubling_check(500, 7);
        assert!(rep.doubling_ok, "c_d {:?}", rep.c_d_empirical);
        assert!(rep.poincare_ok, "c_p {}", rep.c_p_empirical);
    }

    #[test]
    fn doubling_unweighted_at_most_two_interior() {
        let sp = WeightedIntervalSpace::unit(rat_int(0), rat_int(1));
        let rep = sp.doubling_check(500, 3);
        // boundary-clipped balls can reach ratios up to 4; bound holds
        assert!(rep.c_d_empirical <= rat_int(4));
    }

    #[test]
    fn open_set_invariants() {
        assert!(OpenSet::new(vec![(rat_int(1), rat_int(1))]).is_err());
        assert!(OpenSet::new(vec![
            (rat_int(0), rat(2, 3)),
            (rat(1, 3), rat_int(1))
        ])
        .is_err());
        let s = OpenSet::new(vec![(rat(2, 3), rat_int(1)), (rat_int(0), rat(1, 3))]).unwrap();
        assert_eq!(s.intervals()[0].0, rat_int(0));
        assert_eq!(s.boundary().len(), 4);
    }

    #[test]
    fn complement_within_domain() {
        let s = OpenSet::new(vec![(rat(1, 4), rat(1, 2))]).unwrap();
        let c = s.complement_within(&rat_int(0), &rat_int(1));
        assert_eq!(
            c.intervals(),
            &[
                (rat_int(0), rat(1, 4)),
                (rat(1, 2), rat_int(1))
            ]
        );
    }
}
