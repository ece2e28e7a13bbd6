//! Dense two-phase tableau simplex for `min c·x` subject to linear rows and
//! `x >= 0`. Lexicographic ratio tests prevent cycling.

use super::LfpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn le(coefficients: Vec<f64>, rhs: f64) -> Self {
        Self {
            coefficients,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn ge(coefficients: Vec<f64>, rhs: f64) -> Self {
        Self {
            coefficients,
            relation: Relation::Ge,
            rhs,
        }
    }

    pub fn eq(coefficients: Vec<f64>, rhs: f64) -> Self {
        Self {
            coefficients,
            relation: Relation::Eq,
            rhs,
        }
    }
}

/// `min objective·x` subject to `constraints`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-8;
const MAX_PIVOTS: usize = 50_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    art_start: usize,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in &mut self.rows[r] {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][col];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rows[i][col] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
            }
        }
        self.basis[r] = col;
    }

    /// Row index chosen by the lexicographic minimum ratio rule.
    fn leaving_row(&self, col: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][col];
            if a <= PIVOT_EPS {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) if self.lex_less(i, b, col) => Some(i),
                keep => keep,
            };
        }
        best
    }

    fn lex_less(&self, i: usize, j: usize, col: usize) -> bool {
        let (ai, aj) = (self.rows[i][col], self.rows[j][col]);
        let key = |r: usize, a: f64, k: usize| -> f64 {
            if k == 0 {
                self.rhs[r] / a
            } else {
                self.rows[r][self.art_start + k - 1] / a
            }
        };
        let m = self.rows.len();
        for k in 0..=m {
            let (x, y) = (key(i, ai, k), key(j, aj, k));
            let scale = x.abs().max(y.abs()).max(1.0);
            if x < y - 1e-12 * scale {
                return true;
            }
            if x > y + 1e-12 * scale {
                return false;
            }
        }
        false
    }

    /// Runs simplex iterations for `cost` over columns `< allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool, LfpError> {
        for _ in 0..MAX_PIVOTS {
            let mut entering = None;
            let mut most_negative = -COST_EPS;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    d -= cost[b] * self.rows[i][j];
                }
                if d < most_negative {
                    most_negative = d;
                    entering = Some(j);
                }
            }
            let Some(col) = entering else {
                return Ok(true);
            };
            let Some(r) = self.leaving_row(col) else {
                return Ok(false);
            };
            self.pivot(r, col);
        }
        Err(LfpError::IterationLimit(MAX_PIVOTS))
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis.iter().enumerate().map(|(i, &b)| cost[b] * self.rhs[i]).sum()
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LfpError> {
    let n = lp.objective.len();
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(LfpError::NonFinite("objective"));
    }
    for row in &lp.constraints {
        if row.coefficients.len() != n {
            return Err(LfpError::Dimension {
                expected: n,
                got: row.coefficients.len(),
            });
        }
        if !row.rhs.is_finite() || row.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(LfpError::NonFinite("constraint"));
        }
    }
    let m = lp.constraints.len();
    if m == 0 {
        return Ok(if lp.objective.iter().any(|&c| c < 0.0) {
            LpOutcome::Unbounded
        } else {
            LpOutcome::Optimal {
                x: vec![0.0; n],
                value: 0.0,
            }
        });
    }

    let slacks = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let art_start = n + slacks;
    let width = art_start + m;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut slack = n;
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![0.0; width];
        row[..n].copy_from_slice(&c.coefficients);
        match c.relation {
            Relation::Le => {
                row[slack] = 1.0;
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -1.0;
                slack += 1;
            }
            Relation::Eq => {}
        }
        let mut b = c.rhs;
        if b < 0.0 {
            for v in &mut row {
                *v = -*v;
            }
            b = -b;
        }
        row[art_start + i] = 1.0;
        rows.push(row);
        rhs.push(b);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (art_start..width).collect(),
        art_start,
        width,
    };

    let mut phase1 = vec![0.0; width];
    for c in &mut phase1[art_start..] {
        *c = 1.0;
    }
    t.optimize(&phase1, width)?;
    let scale = t.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    if t.objective(&phase1) > FEAS_EPS * scale {
        return Ok(LpOutcome::Infeasible);
    }
    // drive zero-level artificials out of the basis where possible
    for r in 0..m {
        if t.basis[r] >= art_start {
            if let Some(col) = (0..art_start).find(|&j| t.rows[r][j].abs() > 1e-9) {
                t.pivot(r, col);
            }
        }
    }

    let mut phase2 = vec![0.0; t.width];
    phase2[..n].copy_from_slice(&lp.objective);
    if !t.optimize(&phase2, art_start)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> (Vec<f64>, f64) {
        match o {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn small_maximization() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3
        let lp = LinearProgram {
            objective: vec![-3.0, -2.0],
            constraints: vec![
                LinearConstraint::le(vec![1.0, 1.0], 4.0),
                LinearConstraint::le(vec![1.0, 3.0], 6.0),
                LinearConstraint::le(vec![1.0, 0.0], 3.0),
            ],
        };
        let (x, v) = optimal(solve_lp(&lp).unwrap());
        assert!((v + 11.0).abs() < 1e-12);
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y s.t. x + y = 3, x >= 1, y >= 0.5
        let lp = LinearProgram {
            objective: vec![1.0, 2.0],
            constraints: vec![
                LinearConstraint::eq(vec![1.0, 1.0], 3.0),
                LinearConstraint::ge(vec![1.0, 0.0], 1.0),
                LinearConstraint::ge(vec![0.0, 1.0], 0.5),
            ],
        };
        let (x, v) = optimal(solve_lp(&lp).unwrap());
        assert!((v - 3.5).abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn detects_infeasible() {
        let lp = LinearProgram {
            objective: vec![1.0],
            constraints: vec![
                LinearConstraint::le(vec![1.0], 1.0),
                LinearConstraint::ge(vec![1.0], 2.0),
            ],
        };
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let lp = LinearProgram {
            objective: vec![-1.0, 0.0],
            constraints: vec![LinearConstraint::le(vec![-1.0, 1.0], 1.0)],
        };
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic Beale cycling example
        let lp = LinearProgram {
            objective: vec![-0.75, 150.0, -0.02, 6.0],
            constraints: vec![
                LinearConstraint::le(vec![0.25, -60.0, -0.04, 9.0], 0.0),
                LinearConstraint::le(vec![0.5, -90.0, -0.02, 3.0], 0.0),
                LinearConstraint::le(vec![0.0, 0.0, 1.0, 0.0], 1.0),
            ],
        };
        let (_, v) = optimal(solve_lp(&lp).unwrap());
        assert!((v + 0.05).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram {
            objective: vec![1.0, 1.0],
            constraints: vec![
                LinearConstraint::eq(vec![1.0, 1.0], 2.0),
                LinearConstraint::eq(vec![2.0, 2.0], 4.0),
            ],
        };
        let (_, v) = optimal(solve_lp(&lp).unwrap());
        assert!((v - 2.0).abs() < 1e-12);
    }
}
