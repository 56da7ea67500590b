//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for desk-scale oracles (a few hundred columns at most). The problem
//! is rewritten into standard form `min cᵀz, Gz = h, z >= 0, h >= 0` with one
//! identity column per row (slack or artificial), which is also how row duals
//! are read back from the final reduced costs.

use thiserror::Error;

/// Reduced-cost optimality tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Smallest pivot magnitude accepted in the ratio test.
pub const PIVOT_TOL: f64 = 1e-11;
const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("numeric breakdown: best pivot candidate {pivot:e} is below {PIVOT_TOL:e}")]
    Conditioning { pivot: f64 },
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Per-variable bounds. `None` means unbounded on that side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarBound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl VarBound {
    pub const NONNEGATIVE: VarBound = VarBound {
        lower: Some(0.0),
        upper: None,
    };
    pub const FREE: VarBound = VarBound {
        lower: None,
        upper: None,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// All variables nonnegative, no constraints yet.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBound::NONNEGATIVE; n],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn bound(&mut self, var: usize, bound: VarBound) -> &mut Self {
        self.bounds[var] = bound;
        self
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        solve(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point (empty unless optimal).
    pub x: Vec<f64>,
    /// Objective value in the caller's sense (NaN unless optimal).
    pub value: f64,
    /// Sensitivity `d value / d rhs_i` of every caller constraint.
    pub duals: Vec<f64>,
    /// `hᵀy` of the standard-form dual, plus the objective offset from
    /// variable shifts, in the caller's sense.
    pub dual_value: f64,
    /// Smallest reduced cost over enterable columns at termination.
    pub min_reduced_cost: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn non_optimal(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            x: Vec::new(),
            value: f64::NAN,
            duals: Vec::new(),
            dual_value: f64::NAN,
            min_reduced_cost: f64::NAN,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// How an original variable maps onto standard-form columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = shift + z[col]`
    Shifted { col: usize, shift: f64 },
    /// `x = shift - z[col]`
    Mirrored { col: usize, shift: f64 },
    /// `x = z[pos] - z[neg]`
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    /// Rows over structural columns, already sign-normalized to `rhs >= 0`.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    relations: Vec<Relation>,
    /// Sign applied to each row during normalization.
    row_sign: Vec<f64>,
    cost: Vec<f64>,
    offset: f64,
    maps: Vec<VarMap>,
    n_caller_rows: usize,
}

fn standardize(lp: &LinearProgram) -> Result<StandardForm, LpError> {
    let n = lp.objective.len();
    if lp.bounds.len() != n {
        return Err(LpError::Malformed(format!(
            "{} bounds for {n} variables",
            lp.bounds.len()
        )));
    }
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(LpError::Malformed(format!(
                "constraint with {} coefficients for {n} variables",
                c.coeffs.len()
            )));
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
            return Err(LpError::Malformed("non-finite constraint data".into()));
        }
    }
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(LpError::Malformed("non-finite objective".into()));
    }
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for b in &lp.bounds {
        match (b.lower, b.upper) {
            (Some(l), u) => {
                if let Some(u) = u {
                    if u < l {
                        return Err(LpError::Malformed("variable upper bound below lower".into()));
                    }
                    extra_rows.push((ncols, u - l));
                }
                maps.push(VarMap::Shifted { col: ncols, shift: l });
                ncols += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap::Mirrored { col: ncols, shift: u });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    let mut offset = 0.0;
    for (j, m) in maps.iter().enumerate() {
        let c = sign * lp.objective[j];
        match *m {
            VarMap::Shifted { col, shift } => {
                cost[col] += c;
                offset += c * shift;
            }
            VarMap::Mirrored { col, shift } => {
                cost[col] -= c;
                offset += c * shift;
            }
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut relations = Vec::new();
    for c in &lp.constraints {
        let mut row = vec![0.0; ncols];
        let mut r = c.rhs;
        for (j, m) in maps.iter().enumerate() {
            let a = c.coeffs[j];
            if a == 0.0 {
                continue;
            }
            match *m {
                VarMap::Shifted { col, shift } => {
                    row[col] += a;
                    r -= a * shift;
                }
                VarMap::Mirrored { col, shift } => {
                    row[col] -= a;
                    r -= a * shift;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push(row);
        rhs.push(r);
        relations.push(c.relation);
    }
    for (col, width) in extra_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        rows.push(row);
        rhs.push(width);
        relations.push(Relation::Le);
    }

    let mut row_sign = vec![1.0; rows.len()];
    for i in 0..rows.len() {
        if rhs[i] < 0.0 {
            row_sign[i] = -1.0;
            rhs[i] = -rhs[i];
            for a in &mut rows[i] {
                *a = -*a;
            }
            relations[i] = match relations[i] {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    Ok(StandardForm {
        rows,
        rhs,
        relations,
        row_sign,
        cost,
        offset,
        maps,
        n_caller_rows: lp.constraints.len(),
    })
}

struct Tableau {
    m: usize,
    n: usize,
    /// `m` rows of `n + 1` entries; the last entry is the basic value.
    a: Vec<f64>,
    /// Reduced costs followed by the negated objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    barred: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.n)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.n + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        let pivot_row: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.a[i * w + j] -= f * pivot_row[j];
                }
                self.a[i * w + c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..w {
                self.obj[j] -= f * pivot_row[j];
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.n + 1;
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.obj[j] -= cb * self.a[i * w + j];
                }
            }
        }
    }

    /// Bland's rule: lowest-index improving column, then the lowest-index
    /// basic variable among tied ratios.
    fn run(&mut self) -> Result<PivotOutcome, LpError> {
        loop {
            let entering = (0..self.n).find(|&j| !self.barred[j] && self.obj[j] < -OPTIMALITY_TOL);
            let Some(c) = entering else {
                return Ok(PivotOutcome::Optimal);
            };
            if self.iterations >= self.max_iterations {
                return Err(LpError::IterationLimit(self.max_iterations));
            }
            let mut leave: Option<(usize, f64)> = None;
            let mut tiny = 0.0f64;
            for i in 0..self.m {
                let aic = self.at(i, c);
                if aic > PIVOT_TOL {
                    let ratio = self.rhs(i) / aic;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            let tol = 1e-12 * lr.abs().max(1.0);
                            ratio < lr - tol
                                || (ratio <= lr + tol && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                } else if aic > 1e-14 {
                    tiny = tiny.max(aic);
                }
            }
            match leave {
                Some((r, _)) => {
                    self.pivot(r, c);
                    self.iterations += 1;
                }
                None if tiny > 0.0 => return Err(LpError::Conditioning { pivot: tiny }),
                None => return Ok(PivotOutcome::Unbounded),
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let sf = standardize(lp)?;
    let m = sf.rows.len();
    let n_struct = sf.cost.len();

    // Column layout: structural | one slack or surplus per inequality |
    // one artificial per row that lacks a +slack identity column.
    let mut n = n_struct;
    let mut slack_col = vec![None; m];
    for (i, rel) in sf.relations.iter().enumerate() {
        if *rel != Relation::Eq {
            slack_col[i] = Some(n);
            n += 1;
        }
    }
    let n_before_art = n;
    let mut art_col = vec![None; m];
    for (i, rel) in sf.relations.iter().enumerate() {
        if *rel != Relation::Le {
            art_col[i] = Some(n);
            n += 1;
        }
    }

    let w = n + 1;
    let mut a = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut identity_col = vec![0; m];
    for i in 0..m {
        a[i * w..i * w + n_struct].copy_from_slice(&sf.rows[i]);
        a[i * w + n] = sf.rhs[i];
        if let Some(s) = slack_col[i] {
            a[i * w + s] = if sf.relations[i] == Relation::Le { 1.0 } else { -1.0 };
        }
        match (sf.relations[i], art_col[i]) {
            (Relation::Le, _) => {
                basis[i] = slack_col[i].unwrap();
            }
            (_, Some(c)) => {
                a[i * w + c] = 1.0;
                basis[i] = c;
            }
            _ => unreachable!(),
        }
        identity_col[i] = basis[i];
    }

    let mut t = Tableau {
        m,
        n,
        a,
        obj: Vec::new(),
        basis,
        barred: vec![false; n],
        iterations: 0,
        max_iterations: 50_000 + 200 * (m + n),
    };

    let is_art = |j: usize| j >= n_before_art;
    if n > n_before_art {
        let mut phase1 = vec![0.0; n];
        for c in &mut phase1[n_before_art..] {
            *c = 1.0;
        }
        t.set_objective(&phase1);
        t.run()?;
        let infeasibility = -t.obj[n];
        let scale = sf.rhs.iter().fold(1.0f64, |s, b| s.max(b.abs()));
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, t.iterations));
        }
        // Drive zero-valued artificials out of the basis where possible;
        // rows where that fails are redundant and keep their artificial at 0.
        for r in 0..m {
            if is_art(t.basis[r]) {
                if let Some(c) = (0..n_before_art).find(|&j| t.at(r, j).abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
        for j in n_before_art..n {
            t.barred[j] = true;
        }
    }

    let mut phase2 = sf.cost.clone();
    phase2.resize(n, 0.0);
    t.set_objective(&phase2);
    if let PivotOutcome::Unbounded = t.run()? {
        return Ok(LpSolution::non_optimal(LpStatus::Unbounded, t.iterations));
    }

    let mut z = vec![0.0; n];
    for i in 0..m {
        z[t.basis[i]] = t.rhs(i);
    }
    let x: Vec<f64> = sf
        .maps
        .iter()
        .map(|mp| match *mp {
            VarMap::Shifted { col, shift } => shift + z[col],
            VarMap::Mirrored { col, shift } => shift - z[col],
            VarMap::Split { pos, neg } => z[pos] - z[neg],
        })
        .collect();

    let sense_sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    // y_i = c_id - r_id for the identity column of row i (c_id = 0 here).
    let y_std: Vec<f64> = (0..m).map(|i| -t.obj[identity_col[i]]).collect();
    let std_value = -t.obj[n] + sf.offset;
    let dual_std: f64 = y_std.iter().zip(&sf.rhs).map(|(y, h)| y * h).sum::<f64>() + sf.offset;
    let duals = (0..sf.n_caller_rows)
        .map(|i| sense_sign * sf.row_sign[i] * y_std[i])
        .collect();
    let min_reduced_cost = (0..n)
        .filter(|&j| !t.barred[j])
        .map(|j| t.obj[j])
        .fold(f64::INFINITY, f64::min);

    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value: sense_sign * std_value,
        duals,
        dual_value: sense_sign * dual_std,
        min_reduced_cost,
        iterations: t.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximize_on_simplex() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Le, 1.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.dual_value - s.value).abs() < 1e-9);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_bounds() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0]);
        lp.bound(0, VarBound::FREE);
        lp.constrain(vec![1.0], Relation::Ge, 2.0);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bounded_and_free_variables() {
        // min -x + y, x in [1, 3], y free, y >= x - 5 and y >= -x
        let mut lp = LinearProgram::new(Sense::Minimize, vec![-1.0, 1.0]);
        lp.bound(0, VarBound { lower: Some(1.0), upper: Some(3.0) });
        lp.bound(1, VarBound::FREE);
        lp.constrain(vec![-1.0, 1.0], Relation::Ge, -5.0);
        lp.constrain(vec![1.0, 1.0], Relation::Ge, 0.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        // x = 3, y = max(-2, -3) = -2 -> value -5
        assert!((s.value + 5.0).abs() < 1e-12, "{s:?}");
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.dual_value - s.value).abs() < 1e-9);
    }

    #[test]
    fn upper_bound_only() {
        // max x with x <= 2 as a bound, no lower bound
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.bound(0, VarBound { lower: None, upper: Some(2.0) });
        let s = lp.solve().unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn equality_rows_and_duals() {
        // min 2a + 3b s.t. a + b = 1, a <= 0.4
        let mut lp = LinearProgram::new(Sense::Minimize, vec![2.0, 3.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.constrain(vec![1.0, 0.0], Relation::Le, 0.4);
        let s = lp.solve().unwrap();
        assert!((s.value - 2.6).abs() < 1e-12);
        // d value / d rhs: +3 for the equality, -1 for the cap
        assert!((s.duals[0] - 3.0).abs() < 1e-12, "{:?}", s.duals);
        assert!((s.duals[1] + 1.0).abs() < 1e-12, "{:?}", s.duals);
        assert!(s.min_reduced_cost >= -OPTIMALITY_TOL);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.constrain(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = lp.solve().unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![-0.75, 150.0, -0.02, 6.0]);
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.constrain(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.constrain(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 0.05).abs() < 1e-12, "{}", s.value);
    }

    #[test]
    fn malformed_input() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(LpError::Malformed(_))));
    }
}
