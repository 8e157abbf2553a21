//! Convex, nondecreasing integrands of linear growth.
//!
//! Only piecewise-linear convex integrands are representable; this makes the
//! relaxation solver an exact linear program and the lower-bound oracle exact.
//! A general convex `f` is admitted through [`Integrand::from_samples`], a
//! chord approximation on a caller-specified breakpoint grid with reported
//! maximum chord error.
//!
//! The growth constants satisfy `m t <= f(t) <= M (1 + t)` for all `t >= 0`,
//! the recession slope is `f_inf = sup_{t>0} (f(t) - f(0))/t`, and for a
//! convex nondecreasing piecewise-linear function the Lipschitz constant `L`
//! equals `f_inf` (the last slope).

use crate::bvfunc::VariationMeasure;
use crate::rational;
use crate::space::{OpenSet, WeightedIntervalSpace};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrandError {
    #[error("breakpoints must be strictly increasing and nonnegative")]
    BadBreakpoints,
    #[error("need exactly one more slope than breakpoints")]
    SlopeCount,
    #[error("slopes must be nondecreasing (convexity) and nonnegative")]
    NotConvex,
    #[error("f(0) must be nonnegative")]
    NegativeAtZero,
    #[error("lower growth constant m = {0} is not positive; f fails m t <= f(t)")]
    DegenerateGrowth(f64),
    #[error("eval at negative argument {0}")]
    NegativeArgument(f64),
}

/// JSON schema `{f0, breakpoints[], slopes[]}` used by the CLI config.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegrandSpec {
    pub f0: f64,
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// Piecewise-linear convex nondecreasing integrand.
#[derive(Clone, Debug)]
pub struct Integrand {
    f0: f64,
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    /// Values f(b_k) at the breakpoints, precomputed.
    knot_values: Vec<f64>,
    m: f64,
    m_big: f64,
    f_infty: f64,
}

impl Integrand {
    /// Validates and derives the growth constants.
    ///
    /// `m` is the largest constant with `m t <= f(t)`: the infimum of
    /// `f(t)/t`, attained at a breakpoint or in the `t -> 0+` / `t -> inf`
    /// limits. `M` is the supremum of `f(t)/(1+t)`, attained at `t = 0`, a
    /// breakpoint, or in the limit (the ratio is monotone on each piece).
    pub fn new(f0: f64, breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self, IntegrandError> {
        if f0 < 0.0 {
            return Err(IntegrandError::NegativeAtZero);
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1])
            || breakpoints.first().is_some_and(|b| *b <= 0.0)
        {
            return Err(IntegrandError::BadBreakpoints);
        }
        if slopes.len() != breakpoints.len() + 1 {
            return Err(IntegrandError::SlopeCount);
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) || slopes.first().is_some_and(|s| *s < 0.0) {
            return Err(IntegrandError::NotConvex);
        }
        let mut knot_values = Vec::with_capacity(breakpoints.len());
        let mut val = f0;
        let mut prev = 0.0;
        for (k, b) in breakpoints.iter().enumerate() {
            val += slopes[k] * (b - prev);
            prev = *b;
            knot_values.push(val);
        }
        let f_infty = *slopes.last().unwrap();

        let mut m = if f0 == 0.0 { slopes[0] } else { f64::INFINITY };
        m = m.min(f_infty);
        for (b, v) in breakpoints.iter().zip(&knot_values) {
            m = m.min(v / b);
        }
        if m <= 0.0 {
            return Err(IntegrandError::DegenerateGrowth(m));
        }
        let mut m_big = f0.max(f_infty);
        for (b, v) in breakpoints.iter().zip(&knot_values) {
            m_big = m_big.max(v / (1.0 + b));
        }

        Ok(Self {
            f0,
            breakpoints,
            slopes,
            knot_values,
            m,
            m_big,
            f_infty,
        })
    }

    pub fn from_spec(spec: &IntegrandSpec) -> Result<Self, IntegrandError> {
        Self::new(spec.f0, spec.breakpoints.clone(), spec.slopes.clone())
    }

    pub fn to_spec(&self) -> IntegrandSpec {
        IntegrandSpec {
            f0: self.f0,
            breakpoints: self.breakpoints.clone(),
            slopes: self.slopes.clone(),
        }
    }

    /// `f(t) = t`.
    pub fn total_variation() -> Self {
        Self::new(0.0, vec![], vec![1.0]).unwrap()
    }

    /// The two-slope example integrand: `t` on `[0,1]`, `2t - 1` beyond.
    pub fn two_slope_example() -> Self {
        Self::new(0.0, vec![1.0], vec![1.0, 2.0]).unwrap()
    }

    /// Chord approximation of a general convex `f` on a breakpoint grid.
    /// Returns the integrand together with the maximum chord error, sampled
    /// midpoints against the chord (exact for convex `f` up to sampling).
    pub fn from_samples(
        f: impl Fn(f64) -> f64,
        grid: &[f64],
    ) -> Result<(Self, f64), IntegrandError> {
        if grid.len() < 2 || grid[0] != 0.0 {
            return Err(IntegrandError::BadBreakpoints);
        }
        let f0 = f(0.0);
        let mut slopes = Vec::new();
        let mut max_err = 0.0f64;
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            slopes.push((f(b) - f(a)) / (b - a));
            let mid = 0.5 * (a + b);
            let chord = f(a) + slopes.last().unwrap() * (mid - a);
            max_err = max_err.max(chord - f(mid));
        }
        let breakpoints = grid[1..grid.len() - 1].to_vec();
        Ok((Self::new(f0, breakpoints, slopes)?, max_err))
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn growth_lower(&self) -> f64 {
        self.m
    }

    pub fn growth_upper(&self) -> f64 {
        self.m_big
    }

    pub fn lipschitz(&self) -> f64 {
        self.f_infty
    }

    pub fn f_infty(&self) -> f64 {
        self.f_infty
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Piecewise-linear evaluation; `t >= 0`.
    pub fn eval(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "integrand evaluated at negative {t}");
        let mut val = self.f0;
        let mut prev = 0.0;
        for (k, b) in self.breakpoints.iter().enumerate() {
            if t <= *b {
                return val + self.slopes[k] * (t - prev);
            }
            val = self.knot_values[k];
            prev = *b;
        }
        val + self.slopes[self.breakpoints.len()] * (t - prev)
    }

    /// Checked evaluation, rejecting negative arguments as an error value.
    pub fn try_eval(&self, t: f64) -> Result<f64, IntegrandError> {
        if t < 0.0 {
            return Err(IntegrandError::NegativeArgument(t));
        }
        Ok(self.eval(t))
    }

    /// Support lines `(d_j, e_j)` with `f(t) = sup_j (d_j t + e_j)` on
    /// `t >= 0` and `sup_j d_j = f_infty`.
    pub fn support_lines(&self) -> Vec<(f64, f64)> {
        let mut lines = vec![(self.slopes[0], self.f0)];
        for (k, b) in self.breakpoints.iter().enumerate() {
            let d = self.slopes[k + 1];
            let e = self.knot_values[k] - d * b;
            lines.push((d, e));
        }
        lines
    }

    /// The functional on measures from the lower bound: for
    /// `dnu = a dmu + nu^s`,
    ///
    /// ```text
    /// nu  |->  int_Omega f(a) dmu  +  f_infty * nu^s(Omega).
    /// ```
    ///
    /// This is the certified lower-bound oracle for relaxation values.
    pub fn measure_functional(
        &self,
        nu: &VariationMeasure,
        space: &WeightedIntervalSpace,
        omega: &OpenSet,
    ) -> f64 {
        let mut total = 0.0;
        for (lo, hi, a) in nu.density_pieces() {
            let cell = omega.intersect_interval(lo, hi);
            let mass = space.mu_of(&cell).expect("density cell in domain");
            total += self.eval(*a) * rational::to_f64(&mass);
        }
        // Regions of Omega not covered by the density support carry a = 0.
        let covered: f64 = nu
            .density_pieces()
            .map(|(lo, hi, _)| {
                rational::to_f64(&space.mu_of(&omega.intersect_interval(lo, hi)).unwrap())
            })
            .sum();
        let mu_omega = rational::to_f64(&space.mu_of(omega).expect("omega in domain"));
        total += self.f0 * (mu_omega - covered).max(0.0);
        for (x, mass) in nu.atoms() {
            if omega.contains(x) {
                total += self.f_infty * mass;
            }
        }
        total
    }

    /// Same functional on a raw list of `(density value, exact mu mass)`
    /// regions plus singular mass; used where the measure is known in closed
    /// form rather than on a grid (the Cantor example).
    pub fn measure_functional_regions(&self, regions: &[(f64, f64)], singular_mass: f64) -> f64 {
        regions.iter().map(|(a, mass)| self.eval(*a) * mass).sum::<f64>()
            + self.f_infty * singular_mass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn paper_example_integrand() {
        let f = Integrand::two_slope_example();
        assert_abs_diff_eq!(f.eval(1.0), 1.0);
        assert_abs_diff_eq!(f.eval(2.0), 3.0);
        assert_abs_diff_eq!(f.f_infty(), 2.0);
        assert_abs_diff_eq!(f.growth_lower(), 1.0);
        assert_abs_diff_eq!(f.growth_upper(), 2.0);
        assert_eq!(f.support_lines(), vec![(1.0, 0.0), (2.0, -1.0)]);
    }

    #[test]
    fn identity_integrand() {
        let f = Integrand::total_variation();
        assert_abs_diff_eq!(f.eval(0.0), 0.0);
        assert_abs_diff_eq!(f.f_infty(), 1.0);
        assert_eq!(f.support_lines(), vec![(1.0, 0.0)]);
    }

    #[test]
    fn affine_integrand() {
        let f = Integrand::new(1.0, vec![], vec![1.0]).unwrap();
        assert_abs_diff_eq!(f.growth_lower(), 1.0);
        assert_abs_diff_eq!(f.growth_upper(), 1.0);
        assert_abs_diff_eq!(f.eval(0.0), 1.0);
    }

    #[test]
    fn rejects_nonconvex_and_degenerate() {
        assert!(Integrand::new(0.0, vec![1.0], vec![2.0, 1.0]).is_err());
        assert!(Integrand::new(0.0, vec![], vec![0.0]).is_err());
        assert!(Integrand::new(1.0, vec![], vec![0.0]).is_err());
        assert!(Integrand::new(0.0, vec![2.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(Integrand::new(-1.0, vec![], vec![1.0]).is_err());
    }

    #[test]
    fn eval_rejects_negative() {
        let f = Integrand::total_variation();
        assert!(f.try_eval(-0.5).is_err());
    }

    #[test]
    fn support_lines_match_eval_on_grid() {
        let f = Integrand::new(0.0, vec![1.0, 2.0], vec![0.5, 1.0, 2.0]).unwrap();
        let lines = f.support_lines();
        assert_eq!(lines.len(), 3);
        for i in 0..=400 {
            let t = i as f64 * 0.01;
            let sup = lines
                .iter()
                .map(|(d, e)| d * t + e)
                .fold(f64::NEG_INFINITY, f64::max);
            assert_abs_diff_eq!(sup, f.eval(t), epsilon = 1e-12);
        }
        // frozen from evaluating both representations at t = 1.5
        assert_abs_diff_eq!(f.eval(1.5), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn estimate_f_le_f0_plus_t_finfty() {
        let f = Integrand::new(0.5, vec![0.5, 3.0], vec![0.25, 1.0, 1.5]).unwrap();
        for i in 0..200 {
            let t = i as f64 * 0.1;
            assert!(f.eval(t) <= f.f0() + t * f.f_infty() + 1e-12);
            assert!(f.growth_lower() * t <= f.eval(t) + 1e-12);
            assert!(f.eval(t) <= f.growth_upper() * (1.0 + t) + 1e-12);
        }
    }

    #[test]
    fn recession_consistency() {
        let f = Integrand::new(0.7, vec![1.0, 4.0], vec![0.5, 1.5, 3.0]).unwrap();
        let t = 1e6;
        let bound = (f.f0() + f.f_infty() * 4.0) / t;
        assert!((f.eval(t) / t - f.f_infty()).abs() <= bound);
    }

    #[test]
    fn chord_approximation_reports_error() {
        let (f, err) = Integrand::from_samples(|t| (1.0 + t * t).sqrt(), &[0.0, 0.5, 1.0, 2.0, 4.0])
            .unwrap();
        assert!(err > 0.0 && err < 0.1);
        assert!(f.eval(1.0) >= (2.0f64).sqrt());
    }
}
