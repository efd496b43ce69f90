//! Exact feasibility of `{u >= 0, A u >= b, C u = d}` over the rationals.
//!
//! Phase-one simplex on a dense tableau with Bland's rule. Infeasible
//! systems come back with Farkas multipliers read off the final phase-one
//! basis; feasible ones with a basic point. Both are re-checked by
//! substitution before they leave [`solve`].

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::rational::{denominator_lcm, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("row has {got} coefficients, system has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entry {index} is zero or negative where strict positivity is required")]
    NotStrictlyPositive { index: usize },
    #[error("entry {index} is negative")]
    Negative { index: usize },
    #[error("solver produced evidence that failed re-verification")]
    VerificationFailed,
}

/// One linear row `coeffs . u  (>= | =)  rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilitySystem {
    nvars: usize,
    /// Rows read `coeffs . u >= rhs`.
    pub ineq: Vec<Constraint>,
    /// Rows read `coeffs . u = rhs`.
    pub eq: Vec<Constraint>,
    /// All variables constrained to be nonnegative; otherwise free.
    pub nonneg: bool,
}

/// Farkas multipliers: `y_ineq >= 0`, `y^T [A; C] <= 0` on nonnegative
/// columns (`= 0` on free ones) and `y_ineq . b + y_eq . d = 1`. Any feasible
/// `u` would give `0 >= y^T [A; C] u >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualRay {
    pub ineq: Vec<Rational>,
    pub eq: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeasibilityOutcome {
    Feasible(Vec<Rational>),
    Infeasible(DualRay),
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible(_))
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityOutcome::Feasible(p) => Some(p),
            FeasibilityOutcome::Infeasible(_) => None,
        }
    }
}

fn to_rats(row: &[i64]) -> Vec<Rational> {
    row.iter().map(|&v| rat(v)).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, t| s + t)
}

impl FeasibilitySystem {
    pub fn new(nvars: usize) -> Self {
        FeasibilitySystem {
            nvars,
            ineq: Vec::new(),
            eq: Vec::new(),
            nonneg: true,
        }
    }

    pub fn free(nvars: usize) -> Self {
        FeasibilitySystem {
            nonneg: false,
            ..FeasibilitySystem::new(nvars)
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn check(&self, len: usize) -> Result<(), FeasibilityError> {
        if len != self.nvars {
            return Err(FeasibilityError::DimensionMismatch {
                expected: self.nvars,
                got: len,
            });
        }
        Ok(())
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<(), FeasibilityError> {
        self.check(coeffs.len())?;
        self.ineq.push(Constraint { coeffs, rhs });
        Ok(())
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<(), FeasibilityError> {
        self.add_ge(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<(), FeasibilityError> {
        self.check(coeffs.len())?;
        self.eq.push(Constraint { coeffs, rhs });
        Ok(())
    }

    pub fn add_ge_int(&mut self, coeffs: &[i64], rhs: i64) -> Result<(), FeasibilityError> {
        self.add_ge(to_rats(coeffs), rat(rhs))
    }

    pub fn add_le_int(&mut self, coeffs: &[i64], rhs: i64) -> Result<(), FeasibilityError> {
        self.add_le(to_rats(coeffs), rat(rhs))
    }

    pub fn add_eq_int(&mut self, coeffs: &[i64], rhs: i64) -> Result<(), FeasibilityError> {
        self.add_eq(to_rats(coeffs), rat(rhs))
    }

    /// `u_index >= value`.
    pub fn add_lower_bound(&mut self, index: usize, value: Rational) -> Result<(), FeasibilityError> {
        let mut row = vec![Rational::zero(); self.nvars];
        row[index] = Rational::one();
        self.add_ge(row, value)
    }

    /// Exact check that `point` satisfies every constraint.
    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        if point.len() != self.nvars {
            return false;
        }
        if self.nonneg && point.iter().any(Signed::is_negative) {
            return false;
        }
        self.ineq.iter().all(|c| dot(&c.coeffs, point) >= c.rhs)
            && self.eq.iter().all(|c| dot(&c.coeffs, point) == c.rhs)
    }

    /// Exact check that `ray` certifies infeasibility.
    pub fn refuted_by(&self, ray: &DualRay) -> bool {
        if ray.ineq.len() != self.ineq.len() || ray.eq.len() != self.eq.len() {
            return false;
        }
        if ray.ineq.iter().any(Signed::is_negative) {
            return false;
        }
        for k in 0..self.nvars {
            let combo = self
                .ineq
                .iter()
                .zip(&ray.ineq)
                .chain(self.eq.iter().zip(&ray.eq))
                .map(|(c, y)| &c.coeffs[k] * y)
                .fold(Rational::zero(), |s, t| s + t);
            let ok = if self.nonneg {
                !combo.is_positive()
            } else {
                combo.is_zero()
            };
            if !ok {
                return false;
            }
        }
        let rhs = self
            .ineq
            .iter()
            .zip(&ray.ineq)
            .chain(self.eq.iter().zip(&ray.eq))
            .map(|(c, y)| &c.rhs * y)
            .fold(Rational::zero(), |s, t| s + t);
        rhs.is_positive()
    }
}

struct Tableau {
    /// Row `i` holds the coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs followed by minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index entering column with negative reduced
    /// cost, ratio ties broken by lowest basic index.
    fn run(&mut self) {
        loop {
            let entering = (0..self.ncols).find(|&j| self.obj[j].is_negative());
            let Some(c) = entering else { return };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                // phase one is bounded below by zero, so this cannot happen
                None => return,
            }
        }
    }
}

/// Decides feasibility exactly. The returned point or ray has already been
/// re-verified against `sys`.
pub fn solve(sys: &FeasibilitySystem) -> Result<FeasibilityOutcome, FeasibilityError> {
    for c in sys.ineq.iter().chain(&sys.eq) {
        sys.check(c.coeffs.len())?;
    }
    let n = sys.nvars;
    let nstruct = if sys.nonneg { n } else { 2 * n };
    let n_ineq = sys.ineq.len();
    let m = n_ineq + sys.eq.len();
    let n_art = m;
    let ncols = nstruct + n_ineq + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for (i, c) in sys.ineq.iter().chain(&sys.eq).enumerate() {
        let mut row = vec![Rational::zero(); ncols + 1];
        for (k, a) in c.coeffs.iter().enumerate() {
            row[k] = a.clone();
            if !sys.nonneg {
                row[n + k] = -a.clone();
            }
        }
        if i < n_ineq {
            row[nstruct + i] = -Rational::one();
        }
        row[nstruct + n_ineq + i] = Rational::one();
        row[ncols] = c.rhs.clone();
        let sign = if c.rhs.is_negative() { -1 } else { 1 };
        if sign < 0 {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            // keep the artificial column as +e_i
            row[nstruct + n_ineq + i] = Rational::one();
        }
        signs.push(sign);
        rows.push(row);
    }

    // basic artificials have zero reduced cost
    let mut obj = vec![Rational::zero(); ncols + 1];
    for row in &rows {
        for (j, v) in row.iter().enumerate() {
            if j < nstruct + n_ineq || j == ncols {
                obj[j] -= v;
            }
        }
    }

    let mut t = Tableau {
        rows,
        obj,
        basis: (nstruct + n_ineq..ncols).collect(),
        ncols,
    };
    t.run();

    let phase_one_value = -t.obj[ncols].clone();
    let outcome = if phase_one_value.is_zero() {
        let mut x = vec![Rational::zero(); ncols];
        for (i, &b) in t.basis.iter().enumerate() {
            x[b] = t.rows[i][ncols].clone();
        }
        let point: Vec<Rational> = if sys.nonneg {
            x[..n].to_vec()
        } else {
            (0..n).map(|k| &x[k] - &x[n + k]).collect()
        };
        FeasibilityOutcome::Feasible(point)
    } else {
        // reduced cost of artificial i is 1 - pi_i
        let mut y: Vec<Rational> = (0..m)
            .map(|i| {
                let pi = Rational::one() - &t.obj[nstruct + n_ineq + i];
                if signs[i] < 0 {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        let rhs = sys
            .ineq
            .iter()
            .chain(&sys.eq)
            .zip(&y)
            .map(|(c, yi)| &c.rhs * yi)
            .fold(Rational::zero(), |s, v| s + v);
        if rhs.is_positive() {
            for v in y.iter_mut() {
                *v /= &rhs;
            }
        }
        let eq = y.split_off(n_ineq);
        FeasibilityOutcome::Infeasible(DualRay { ineq: y, eq })
    };

    let verified = match &outcome {
        FeasibilityOutcome::Feasible(p) => sys.satisfied_by(p),
        FeasibilityOutcome::Infeasible(ray) => sys.refuted_by(ray),
    };
    if !verified {
        return Err(FeasibilityError::VerificationFailed);
    }
    Ok(outcome)
}

/// Scales a nonnegative rational point by the LCM of its denominators.
/// Entries listed in `strict` must be strictly positive.
pub fn integerize(point: &[Rational], strict: &[usize]) -> Result<Vec<BigInt>, FeasibilityError> {
    if let Some(index) = point.iter().position(Signed::is_negative) {
        return Err(FeasibilityError::Negative { index });
    }
    if let Some(&index) = strict.iter().find(|&&i| !point[i].is_positive()) {
        return Err(FeasibilityError::NotStrictlyPositive { index });
    }
    let lambda = Rational::from_integer(denominator_lcm(point));
    Ok(point.iter().map(|q| (q * &lambda).to_integer()).collect())
}

/// Finds `w >= 0` integral with `nu w >= 0` and `(nu w)_species >= 1`, or
/// `None` when no such firing bundle exists.
pub fn alternative_witness(nu: &IntMatrix, species: usize) -> Option<Vec<BigInt>> {
    let mut sys = FeasibilitySystem::new(nu.ncols());
    for i in 0..nu.nrows() {
        let rhs = i64::from(i == species);
        sys.add_ge_int(nu.row(i), rhs).expect("row length equals ncols");
    }
    match solve(&sys).expect("well-formed system") {
        FeasibilityOutcome::Feasible(p) => Some(integerize(&p, &[]).expect("solver point is nonnegative")),
        FeasibilityOutcome::Infeasible(_) => None,
    }
}
