//! Thin LP interface used by the relaxation engine.
//!
//! Problems are assembled as sparse rows and handed to one backend behind
//! [`LpProblem::solve`]. The default backend is the Clarabel interior-point
//! solver, which handles the schedule-tail programs (~10^5 variables) in
//! seconds; the minilp simplex is kept as an independent cross-check backend
//! for small instances.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("infeasible linear program")]
    Infeasible,
    #[error("unbounded linear program")]
    Unbounded,
    #[error("solver failure: {0}")]
    Backend(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Clarabel,
    Minilp,
}

/// Sparse LP: minimize `c . x` subject to bounds and linear rows.
#[derive(Clone, Debug, Default)]
pub struct LpProblem {
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<(usize, f64)>, Cmp, f64)>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, obj: f64, lo: f64, hi: f64) -> usize {
        self.objective.push(obj);
        self.bounds.push((lo, hi));
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push((terms, cmp, rhs));
    }

    /// Fixes a variable to a value (equal bounds).
    pub fn pin_var(&mut self, var: usize, value: f64) {
        self.bounds[var] = (value, value);
    }

    /// Overwrites a variable's objective coefficient.
    pub fn set_objective(&mut self, var: usize, obj: f64) {
        self.objective[var] = obj;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpOutcome, SolverError> {
        self.solve_with(Backend::Clarabel)
    }

    pub fn solve_with(&self, backend: Backend) -> Result<LpOutcome, SolverError> {
        match backend {
            Backend::Clarabel => self.solve_clarabel(),
            Backend::Minilp => self.solve_minilp(),
        }
    }

    /// Conic translation: equalities into the zero cone, inequalities and
    /// finite bounds into the nonnegative cone.
    fn solve_clarabel(&self) -> Result<LpOutcome, SolverError> {
        use clarabel::algebra::CscMatrix;
        use clarabel::solver::{
            DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus,
            SupportedConeT::{NonnegativeConeT, ZeroConeT},
        };

        let nvars = self.num_vars();
        // (row coefficients, rhs) in "a . x <= rhs" / "a . x == rhs" form
        let mut eq_rows: Vec<(&[(usize, f64)], f64, f64)> = Vec::new();
        let mut ineq_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
        for (terms, cmp, rhs) in &self.rows {
            match cmp {
                Cmp::Eq => eq_rows.push((terms, *rhs, 1.0)),
                Cmp::Le => ineq_rows.push((terms.clone(), *rhs)),
                Cmp::Ge => ineq_rows.push((
                    terms.iter().map(|(i, a)| (*i, -a)).collect(),
                    -rhs,
                )),
            }
        }
        let mut pin_rows: Vec<(usize, f64)> = Vec::new();
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if lo == hi {
                pin_rows.push((i, *lo));
            } else {
                if lo.is_finite() {
                    ineq_rows.push((vec![(i, -1.0)], -lo));
                }
                if hi.is_finite() {
                    ineq_rows.push((vec![(i, 1.0)], *hi));
                }
            }
        }

        let n_eq = eq_rows.len() + pin_rows.len();
        let n_ineq = ineq_rows.len();
        let total = n_eq + n_ineq;
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut b = Vec::with_capacity(total);
        let mut r = 0usize;
        for (terms, rhs, scale) in &eq_rows {
            for (c, v) in terms.iter() {
                triplets.push((r, *c, v * scale));
            }
            b.push(*rhs);
            r += 1;
        }
        for (i, val) in &pin_rows {
            triplets.push((r, *i, 1.0));
            b.push(*val);
            r += 1;
        }
        for (terms, rhs) in &ineq_rows {
            for (c, v) in terms.iter() {
                triplets.push((r, *c, *v));
            }
            b.push(*rhs);
            r += 1;
        }

        triplets.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
        let mut colptr = vec![0usize; nvars + 1];
        for &(_, c, _) in &triplets {
            colptr[c + 1] += 1;
        }
        for c in 0..nvars {
            colptr[c + 1] += colptr[c];
        }
        let rowval: Vec<usize> = triplets.iter().map(|t| t.0).collect();
        let nzval: Vec<f64> = triplets.iter().map(|t| t.2).collect();
        let a = CscMatrix::new(total, nvars, colptr, rowval, nzval);
        let p = CscMatrix::zeros((nvars, nvars));
        let cones = [ZeroConeT(n_eq), NonnegativeConeT(n_ineq)];
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .tol_gap_abs(1e-10)
            .tol_gap_rel(1e-10)
            .tol_feas(1e-10)
            .build()
            .map_err(|e| SolverError::Backend(format!("{e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &self.objective, &a, &b, &cones, settings);
        solver.solve();
        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => Ok(LpOutcome {
                objective: solver.solution.obj_val,
                values: solver.solution.x.clone(),
            }),
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                Err(SolverError::Infeasible)
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                Err(SolverError::Unbounded)
            }
            s => Err(SolverError::Backend(format!("{s:?}"))),
        }
    }

    fn solve_minilp(&self) -> Result<LpOutcome, SolverError> {
        let mut problem = minilp::Problem::new(minilp::OptimizationDirection::Minimize);
        let vars: Vec<minilp::Variable> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(c, (lo, hi))| problem.add_var(*c, (*lo, *hi)))
            .collect();
        for (terms, cmp, rhs) in &self.rows {
            let expr: Vec<(minilp::Variable, f64)> =
                terms.iter().map(|(i, a)| (vars[*i], *a)).collect();
            let op = match cmp {
                Cmp::Le => minilp::ComparisonOp::Le,
                Cmp::Ge => minilp::ComparisonOp::Ge,
                Cmp::Eq => minilp::ComparisonOp::Eq,
            };
            problem.add_constraint(&expr, op, *rhs);
        }
        match problem.solve() {
            Ok(sol) => Ok(LpOutcome {
                objective: sol.objective(),
                values: vars.iter().map(|v| sol[*v]).collect(),
            }),
            Err(minilp::Error::Infeasible) => Err(SolverError::Infeasible),
            Err(minilp::Error::Unbounded) => Err(SolverError::Unbounded),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub objective: f64,
    pub values: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn tiny_lp_both_backends() {
        // min x + 2y s.t. x + y >= 1, 0 <= x,y <= 1
        let mut lp = LpProblem::new();
        let x = lp.add_var(1.0, 0.0, 1.0);
        let y = lp.add_var(2.0, 0.0, 1.0);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Cmp::Ge, 1.0);
        for backend in [Backend::Clarabel, Backend::Minilp] {
            let out = lp.solve_with(backend).unwrap();
            assert_abs_diff_eq!(out.objective, 1.0, epsilon = 1e-7);
            assert_abs_diff_eq!(out.values[x], 1.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn pinned_variable_respected() {
        let mut lp = LpProblem::new();
        let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.pin_var(x, 2.5);
        let out = lp.solve().unwrap();
        assert_abs_diff_eq!(out.values[x], 2.5, epsilon = 1e-8);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LpProblem::new();
        let x = lp.add_var(1.0, 0.0, 1.0);
        lp.add_row(vec![(x, 1.0)], Cmp::Ge, 2.0);
        assert!(matches!(
            lp.solve_with(Backend::Clarabel),
            Err(SolverError::Infeasible)
        ));
        assert!(matches!(
            lp.solve_with(Backend::Minilp),
            Err(SolverError::Infeasible)
        ));
    }

    /// The two backends agree on random bounded LPs (the cross-route check
    /// for the conic translation).
    #[test]
    fn backends_agree_on_random_lps() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let nv = rng.gen_range(2..6);
            let mut lp = LpProblem::new();
            for _ in 0..nv {
                let lo = rng.gen_range(-2.0..0.0);
                let hi = rng.gen_range(0.1..2.0);
                lp.add_var(rng.gen_range(-1.0..1.0), lo, hi);
            }
            for _ in 0..rng.gen_range(1..5) {
                let terms: Vec<(usize, f64)> = (0..nv)
                    .map(|i| (i, rng.gen_range(-1.0..1.0)))
                    .collect();
                let cmp = if rng.gen_bool(0.5) { Cmp::Le } else { Cmp::Ge };
                // keep the origin feasible so the LP is solvable
                let rhs = if cmp == Cmp::Le {
                    rng.gen_range(0.0..1.0)
                } else {
                    rng.gen_range(-1.0..0.0)
                };
                lp.add_row(terms, cmp, rhs);
            }
            let a = lp.solve_with(Backend::Clarabel).unwrap();
            let b = lp.solve_with(Backend::Minilp).unwrap();
            assert_abs_diff_eq!(a.objective, b.objective, epsilon = 1e-6);
        }
    }
}
