//! Linear fractional programs: the box-constrained greedy rule, a corner
//! enumeration oracle, Charnes–Cooper and Dinkelbach solvers, and the
//! optimal stationary randomized policy of a task model.

pub mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{TaskAction, TaskModel};
use simplex::{solve_lp, LinearConstraint, LinearProgram, LpOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LfpError {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("non-finite {0} coefficients")]
    NonFinite(&'static str),
    #[error("row has {got} coefficients, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("problem is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("no convergence within {0} iterations")]
    IterationLimit(usize),
    #[error("{m} variables exceed the enumeration limit {max}")]
    TooLarge { m: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub status: LfpStatus,
}

impl LfpSolution {
    fn infeasible() -> Self {
        Self {
            x: Vec::new(),
            value: f64::NAN,
            status: LfpStatus::Infeasible,
        }
    }
}

/// `min (φ_0 + Σ φ_i x_i) / (b_0 + Σ b_i x_i)` over `x ∈ [0,1]^M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxLfpInstance {
    /// `φ_0..φ_M`.
    pub phi: Vec<f64>,
    /// `b_0..b_M`.
    pub b: Vec<f64>,
}

impl BoxLfpInstance {
    pub fn new(phi: Vec<f64>, b: Vec<f64>) -> Result<Self, LfpError> {
        let inst = Self { phi, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.phi.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<(), LfpError> {
        if self.phi.is_empty() || self.phi.len() != self.b.len() {
            return Err(LfpError::Instance(format!(
                "phi and b must both have M+1 >= 1 entries (got {} and {})",
                self.phi.len(),
                self.b.len()
            )));
        }
        if self.phi.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(LfpError::NonFinite("box instance"));
        }
        if self.b[0] <= 0.0 {
            return Err(LfpError::Instance(format!("b_0 must be positive, got {}", self.b[0])));
        }
        if self.b[1..].iter().any(|&v| v < 0.0) {
            return Err(LfpError::Instance("b_i must be non-negative".into()));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let num = self.phi[0] + self.phi[1..].iter().zip(x).map(|(p, x)| p * x).sum::<f64>();
        let den = self.b[0] + self.b[1..].iter().zip(x).map(|(b, x)| b * x).sum::<f64>();
        num / den
    }
}

/// Greedy rank-order rule. Zero-denominator variables are set by the sign of
/// `φ_i`; the rest are switched on in increasing `φ_j / b_j` order while the
/// ratio strictly decreases.
pub fn solve_box_lfp(inst: &BoxLfpInstance) -> Result<LfpSolution, LfpError> {
    inst.validate()?;
    let m = inst.dim();
    let mut x = vec![0.0; m];
    let mut num = inst.phi[0];
    let mut den = inst.b[0];
    let mut ranked = Vec::new();
    for (i, xi) in x.iter_mut().enumerate() {
        let (p, b) = (inst.phi[i + 1], inst.b[i + 1]);
        if b == 0.0 {
            if p < 0.0 {
                *xi = 1.0;
                num += p;
            }
        } else {
            ranked.push(i);
        }
    }
    ranked.sort_by(|&i, &j| {
        let ri = inst.phi[i + 1] / inst.b[i + 1];
        let rj = inst.phi[j + 1] / inst.b[j + 1];
        ri.total_cmp(&rj).then(i.cmp(&j))
    });
    for j in ranked {
        let next = (num + inst.phi[j + 1]) / (den + inst.b[j + 1]);
        if next < num / den {
            x[j] = 1.0;
            num += inst.phi[j + 1];
            den += inst.b[j + 1];
        } else {
            break;
        }
    }
    let value = inst.evaluate(&x);
    Ok(LfpSolution {
        x,
        value,
        status: LfpStatus::Optimal,
    })
}

/// Exhaustive minimum over all `2^M` corners; the first strict minimum in
/// binary counting order wins ties.
pub fn brute_force_box_lfp(inst: &BoxLfpInstance, max_m: usize) -> Result<LfpSolution, LfpError> {
    inst.validate()?;
    let m = inst.dim();
    if m > max_m || m >= 63 {
        return Err(LfpError::TooLarge { m, max: max_m });
    }
    let mut best_x = vec![0.0; m];
    let mut best = inst.evaluate(&best_x);
    let mut x = vec![0.0; m];
    for mask in 1u64..(1u64 << m) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if mask >> i & 1 == 1 { 1.0 } else { 0.0 };
        }
        let v = inst.evaluate(&x);
        if v < best {
            best = v;
            best_x.copy_from_slice(&x);
        }
    }
    Ok(LfpSolution {
        x: best_x,
        value: best,
        status: LfpStatus::Optimal,
    })
}

/// `min (a_0 + a·x) / (b_0 + b·x)` subject to `C x <= d` and `0 <= x <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedLfpInstance {
    /// `a_0..a_M`.
    pub a: Vec<f64>,
    /// `b_0..b_M`.
    pub b: Vec<f64>,
    /// Rows `c_l1..c_lM`.
    #[serde(default)]
    pub constraints: Vec<Vec<f64>>,
    /// Right-hand sides `d_l`.
    #[serde(default)]
    pub bounds: Vec<f64>,
}

impl ConstrainedLfpInstance {
    pub fn dim(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), LfpError> {
        if self.a.is_empty() || self.a.len() != self.b.len() {
            return Err(LfpError::Instance(format!(
                "a and b must both have M+1 >= 1 entries (got {} and {})",
                self.a.len(),
                self.b.len()
            )));
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(LfpError::NonFinite("objective"));
        }
        if self.b[0] <= 0.0 || self.b[1..].iter().any(|&v| v < 0.0) {
            return Err(LfpError::Instance("need b_0 > 0 and b_i >= 0".into()));
        }
        if self.constraints.len() != self.bounds.len() {
            return Err(LfpError::Instance(format!(
                "{} constraint rows but {} bounds",
                self.constraints.len(),
                self.bounds.len()
            )));
        }
        let m = self.dim();
        for row in &self.constraints {
            if row.len() != m {
                return Err(LfpError::Dimension {
                    expected: m,
                    got: row.len(),
                });
            }
        }
        if self
            .constraints
            .iter()
            .flatten()
            .chain(&self.bounds)
            .any(|v| !v.is_finite())
        {
            return Err(LfpError::NonFinite("constraint"));
        }
        Ok(())
    }

    pub fn numerator(&self, x: &[f64]) -> f64 {
        self.a[0] + self.a[1..].iter().zip(x).map(|(a, x)| a * x).sum::<f64>()
    }

    pub fn denominator(&self, x: &[f64]) -> f64 {
        self.b[0] + self.b[1..].iter().zip(x).map(|(b, x)| b * x).sum::<f64>()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.numerator(x) / self.denominator(x)
    }

    /// `C x - d` per constraint.
    pub fn violations(&self, x: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .zip(&self.bounds)
            .map(|(row, d)| row.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() - d)
            .collect()
    }

    /// The box-LFP seen by one frame of the online rule for queue values `q`:
    /// `φ_0 = V a_0 - Σ Q_l d_l`, `φ_i = V a_i + Σ Q_l c_li`.
    pub fn frame_box(&self, v: f64, q: &[f64]) -> BoxLfpInstance {
        let mut phi: Vec<f64> = self.a.iter().map(|a| v * a).collect();
        for (l, row) in self.constraints.iter().enumerate() {
            phi[0] -= q[l] * self.bounds[l];
            for (i, c) in row.iter().enumerate() {
                phi[i + 1] += q[l] * c;
            }
        }
        BoxLfpInstance { phi, b: self.b.clone() }
    }
}

/// Solves via the Charnes–Cooper change of variables `t = 1/(b_0 + b·x)`,
/// `y = t x`, which gives a linear program in `(y, t)`.
pub fn charnes_cooper_solve(inst: &ConstrainedLfpInstance) -> Result<LfpSolution, LfpError> {
    inst.validate()?;
    let m = inst.dim();
    let t = m;
    let width = m + 1;
    let mut objective = vec![0.0; width];
    objective[..m].copy_from_slice(&inst.a[1..]);
    objective[t] = inst.a[0];

    let mut rows = Vec::with_capacity(1 + inst.num_constraints() + m);
    let mut norm = vec![0.0; width];
    norm[..m].copy_from_slice(&inst.b[1..]);
    norm[t] = inst.b[0];
    rows.push(LinearConstraint::eq(norm, 1.0));
    for (row, &d) in inst.constraints.iter().zip(&inst.bounds) {
        let mut r = vec![0.0; width];
        r[..m].copy_from_slice(row);
        r[t] = -d;
        rows.push(LinearConstraint::le(r, 0.0));
    }
    for i in 0..m {
        let mut r = vec![0.0; width];
        r[i] = 1.0;
        r[t] = -1.0;
        rows.push(LinearConstraint::le(r, 0.0));
    }
    let lp = LinearProgram {
        objective,
        constraints: rows,
    };
    match solve_lp(&lp)? {
        LpOutcome::Infeasible => Ok(LfpSolution::infeasible()),
        LpOutcome::Unbounded => Err(LfpError::Unbounded),
        LpOutcome::Optimal { x: yt, .. } => {
            let tv = yt[t];
            if tv <= 0.0 {
                return Err(LfpError::Instance("degenerate scaling variable".into()));
            }
            let x: Vec<f64> = yt[..m].iter().map(|y| (y / tv).clamp(0.0, 1.0)).collect();
            let value = inst.evaluate(&x);
            Ok(LfpSolution {
                x,
                value,
                status: LfpStatus::Optimal,
            })
        }
    }
}

fn box_lp(inst: &ConstrainedLfpInstance, objective: Vec<f64>) -> LinearProgram {
    let m = inst.dim();
    let mut constraints: Vec<LinearConstraint> = inst
        .constraints
        .iter()
        .zip(&inst.bounds)
        .map(|(row, &d)| LinearConstraint::le(row.clone(), d))
        .collect();
    for i in 0..m {
        let mut r = vec![0.0; m];
        r[i] = 1.0;
        constraints.push(LinearConstraint::le(r, 1.0));
    }
    LinearProgram { objective, constraints }
}

const DINKELBACH_MAX_ITER: usize = 100;

/// Parametric method: repeatedly minimizes `num(x) - h den(x)` and resets `h`
/// to the ratio at the minimizer until the minimum is within `tol` of zero.
pub fn dinkelbach_solve(inst: &ConstrainedLfpInstance, tol: f64) -> Result<LfpSolution, LfpError> {
    inst.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(LfpError::Instance(format!("tolerance must be positive, got {tol}")));
    }
    let start = box_lp(inst, inst.a[1..].to_vec());
    let mut x = match solve_lp(&start)? {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Infeasible => return Err(LfpError::Infeasible),
        LpOutcome::Unbounded => return Err(LfpError::Unbounded),
    };
    let mut h = inst.evaluate(&x);
    for _ in 0..DINKELBACH_MAX_ITER {
        let objective = inst.a[1..].iter().zip(&inst.b[1..]).map(|(a, b)| a - h * b).collect();
        let next = match solve_lp(&box_lp(inst, objective))? {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Infeasible => return Err(LfpError::Infeasible),
            LpOutcome::Unbounded => return Err(LfpError::Unbounded),
        };
        let f = inst.numerator(&next) - h * inst.denominator(&next);
        if f >= -tol {
            if inst.evaluate(&next) < h {
                x = next;
                h = inst.evaluate(&x);
            }
            return Ok(LfpSolution {
                x,
                value: h,
                status: LfpStatus::Optimal,
            });
        }
        x = next;
        h = inst.evaluate(&x);
    }
    Err(LfpError::IterationLimit(DINKELBACH_MAX_ITER))
}

/// Optimal stationary randomized policy of a task model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryPolicy {
    pub power_opt: f64,
    /// `probabilities[c-1][m-1] = p*(c, m)`.
    pub probabilities: Vec<Vec<f64>>,
    pub idle: f64,
}

/// Encodes the stationary-policy problem over `x = (p(1,1), ..., p(N,|M|), x_I)`
/// with `I = I_max x_I`. The denominator is `D_min + Σ p (D̂ - D_min) + I_max x_I`,
/// which equals the expected frame length once `Σ p = 1`.
pub fn encode_task_lfp(model: &TaskModel, rates: &[f64]) -> Result<ConstrainedLfpInstance, LfpError> {
    let n = model.num_classes();
    let modes = model.num_modes();
    if rates.len() != n {
        return Err(LfpError::Dimension {
            expected: n,
            got: rates.len(),
        });
    }
    let vars = n * modes + 1;
    let idle_var = vars - 1;
    let d_min = model.duration_min();
    let i_max = model.idle_max();

    let mut a = vec![0.0; vars + 1];
    let mut b = vec![0.0; vars + 1];
    b[0] = d_min;
    for c in 1..=n {
        for m in 1..=modes {
            let j = (c - 1) * modes + (m - 1);
            a[j + 1] = model.mean_energy(c, m);
            b[j + 1] = model.mean_duration(c, m) - d_min;
        }
    }
    a[idle_var + 1] = model.idle_power() * i_max;
    b[idle_var + 1] = i_max;

    let mut constraints = Vec::with_capacity(n + 2);
    let mut bounds = Vec::with_capacity(n + 2);
    for (k, &lambda) in rates.iter().enumerate() {
        let class = k + 1;
        let mut row = vec![0.0; vars];
        for c in 1..=n {
            for m in 1..=modes {
                let j = (c - 1) * modes + (m - 1);
                let served = if c == class { 1.0 } else { 0.0 };
                row[j] = lambda * (model.mean_duration(c, m) - d_min) - served;
            }
        }
        row[idle_var] = lambda * i_max;
        constraints.push(row);
        bounds.push(-lambda * d_min);
    }
    let mut sum = vec![1.0; vars];
    sum[idle_var] = 0.0;
    constraints.push(sum.clone());
    bounds.push(1.0);
    constraints.push(sum.iter().map(|v| -v).collect());
    bounds.push(-1.0);
    Ok(ConstrainedLfpInstance {
        a,
        b,
        constraints,
        bounds,
    })
}

fn decode_policy(model: &TaskModel, sol: &LfpSolution) -> StationaryPolicy {
    let modes = model.num_modes();
    let probabilities = (0..model.num_classes())
        .map(|c| sol.x[c * modes..(c + 1) * modes].to_vec())
        .collect();
    StationaryPolicy {
        power_opt: sol.value,
        probabilities,
        idle: model.idle_max() * sol.x[sol.x.len() - 1],
    }
}

/// Minimum time-average power over stationary randomized policies meeting
/// every rate constraint `λ_n T̄ <= 1̄_n`, via Charnes–Cooper.
pub fn stationary_policy_optimum(model: &TaskModel, rates: &[f64]) -> Result<StationaryPolicy, LfpError> {
    let inst = encode_task_lfp(model, rates)?;
    let sol = charnes_cooper_solve(&inst)?;
    if sol.status == LfpStatus::Infeasible {
        return Err(LfpError::Infeasible);
    }
    Ok(decode_policy(model, &sol))
}

/// Same optimum computed by Dinkelbach iteration.
pub fn stationary_policy_dinkelbach(model: &TaskModel, rates: &[f64], tol: f64) -> Result<StationaryPolicy, LfpError> {
    let inst = encode_task_lfp(model, rates)?;
    let sol = dinkelbach_solve(&inst, tol)?;
    Ok(decode_policy(model, &sol))
}

/// Best policy that repeats one `(c, m, I)` every frame with `I ∈ [0, I_max]`,
/// or `None` when no such policy meets the rate constraints.
pub fn best_deterministic_policy(model: &TaskModel, rates: &[f64]) -> Option<(TaskAction, f64)> {
    let mut best: Option<(TaskAction, f64)> = None;
    for c in 1..=model.num_classes() {
        if rates.iter().enumerate().any(|(k, &l)| k + 1 != c && l > 0.0) {
            continue;
        }
        let lambda = rates[c - 1];
        for m in 1..=model.num_modes() {
            let d = model.mean_duration(c, m);
            let e = model.mean_energy(c, m);
            let idle_cap = if lambda > 0.0 {
                (1.0 / lambda - d).min(model.idle_max())
            } else {
                model.idle_max()
            };
            if idle_cap < 0.0 {
                continue;
            }
            // ratio (e + p I)/(d + I) is monotone in I
            let idle = if e > model.idle_power() * d { idle_cap } else { 0.0 };
            let value = (e + model.idle_power() * idle) / (d + idle);
            if best.is_none_or(|(_, v)| value < v) {
                best = Some((TaskAction::new(c, m, idle), value));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_task_model, NoiseTable, TaskSpec};
    use proptest::prelude::*;

    fn one_class(rate: f64) -> TaskModel {
        build_task_model(&TaskSpec {
            mean_energy: vec![vec![1.0, 3.0]],
            mean_duration: vec![vec![7.0, 4.0]],
            idle_max: 10.0,
            duration_min: None,
            rates: vec![rate],
            modes: vec![],
            noise: NoiseTable::default(),
            null_class: None,
            idle_power: 0.0,
        })
        .unwrap()
    }

    #[test]
    fn box_examples() {
        let s = solve_box_lfp(&BoxLfpInstance::new(vec![3.0], vec![2.0]).unwrap()).unwrap();
        assert!(s.x.is_empty());
        assert_eq!(s.value, 1.5);

        let inst = BoxLfpInstance::new(vec![1.0, -1.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
        let s = solve_box_lfp(&inst).unwrap();
        assert_eq!(s.x, vec![1.0, 0.0]);
        assert_eq!(s.value, 0.0);

        let inst = BoxLfpInstance::new(vec![4.0, 1.0], vec![1.0, 1.0]).unwrap();
        let s = solve_box_lfp(&inst).unwrap();
        assert_eq!(s.x, vec![1.0]);
        assert_eq!(s.value, 2.5);
    }

    #[test]
    fn brute_force_tie_and_limit() {
        let inst = BoxLfpInstance::new(vec![2.0, 0.0], vec![1.0, 0.0]).unwrap();
        let s = brute_force_box_lfp(&inst, 16).unwrap();
        assert_eq!(s.x, vec![0.0]);
        let big = BoxLfpInstance::new(vec![0.0; 18], vec![1.0; 18]).unwrap();
        assert!(matches!(brute_force_box_lfp(&big, 16), Err(LfpError::TooLarge { .. })));
    }

    #[test]
    fn rejects_bad_denominator() {
        assert!(BoxLfpInstance::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxLfpInstance::new(vec![1.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn unconstrained_one_class_optimum() {
        let p = stationary_policy_optimum(&one_class(0.0), &[0.0]).unwrap();
        assert!((p.power_opt - 1.0 / 17.0).abs() < 1e-12);
        assert_eq!(p.idle, 10.0);
        assert!((p.probabilities[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constrained_one_class_optimum() {
        let model = one_class(0.2);
        let p = stationary_policy_optimum(&model, &[0.2]).unwrap();
        assert!((p.power_opt - 7.0 / 15.0).abs() < 1e-9);
        assert!((p.probabilities[0][0] - 1.0 / 3.0).abs() < 1e-9);
        assert!((p.probabilities[0][1] - 2.0 / 3.0).abs() < 1e-9);
        assert!(p.idle.abs() < 1e-9);
        let d = stationary_policy_dinkelbach(&model, &[0.2], 1e-12).unwrap();
        assert!((d.power_opt - p.power_opt).abs() < 1e-7);
    }

    #[test]
    fn infeasible_rates_reported() {
        let model = one_class(0.3);
        assert_eq!(stationary_policy_optimum(&model, &[0.3]), Err(LfpError::Infeasible));
        assert_eq!(
            stationary_policy_dinkelbach(&model, &[0.3], 1e-12),
            Err(LfpError::Infeasible)
        );
    }

    #[test]
    fn deterministic_policy_worse_than_randomized() {
        let (action, value) = best_deterministic_policy(&one_class(0.2), &[0.2]).unwrap();
        assert_eq!((action.class, action.mode), (1, 2));
        assert!((action.idle - 1.0).abs() < 1e-12);
        assert!((value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn single_feasible_point() {
        // x_1 = 0.5 forced by two rows
        let inst = ConstrainedLfpInstance {
            a: vec![1.0, 2.0],
            b: vec![1.0, 1.0],
            constraints: vec![vec![1.0], vec![-1.0]],
            bounds: vec![0.5, -0.5],
        };
        let cc = charnes_cooper_solve(&inst).unwrap();
        let dk = dinkelbach_solve(&inst, 1e-12).unwrap();
        assert!((cc.value - 4.0 / 3.0).abs() < 1e-12);
        assert!((dk.value - 4.0 / 3.0).abs() < 1e-12);
    }

    fn box_instance() -> impl Strategy<Value = BoxLfpInstance> {
        (0usize..=8).prop_flat_map(|m| {
            (
                prop::collection::vec(-10.0f64..10.0, m + 1),
                0.1f64..10.0,
                prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..10.0], m),
            )
                .prop_map(|(phi, b0, rest)| {
                    let mut b = vec![b0];
                    b.extend(rest);
                    BoxLfpInstance { phi, b }
                })
        })
    }

    proptest! {
        #[test]
        fn greedy_matches_brute_force(inst in box_instance()) {
            let g = solve_box_lfp(&inst).unwrap();
            let bf = brute_force_box_lfp(&inst, 16).unwrap();
            prop_assert!((g.value - bf.value).abs() <= 1e-9);
            prop_assert!((g.value - inst.evaluate(&g.x)).abs() <= 1e-12);
            for j in 0..inst.dim() {
                let b = inst.b[j + 1];
                if b > 0.0 {
                    let r = inst.phi[j + 1] / b;
                    if g.x[j] == 1.0 {
                        prop_assert!(r < g.value + 1e-9);
                    } else {
                        prop_assert!(r >= g.value - 1e-9);
                    }
                }
            }
        }
    }
}
