//! Damped Newton solver for the truncated/regularized problems and the
//! double limit k -> infinity then n -> infinity, with the energy,
//! uniqueness and equiintegrability diagnostics.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::data::{
    build_truncated_data, s_delta_k, s_delta_k_deriv, t_k, validate_hypotheses, ProblemSpec,
    Tolerances, TruncatedData,
};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operators::DiscreteMixedOperator;

/// Diagnostics of one truncated solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub n_level: u32,
    pub k_level: f64,
    pub newton_iterations: usize,
    pub final_residual_maxnorm: f64,
    pub clamp_count: usize,
    pub picard_fallbacks: usize,
    /// rho_h(u)^2 = bilinear form of u against itself.
    pub energy_rho_sq: f64,
    /// Discrete ||g(u) u||_{L^1}.
    pub absorption_mass: f64,
    pub apriori_constant: f64,
    pub apriori_satisfied: bool,
    pub min_value: f64,
    pub max_value: f64,
}

/// Diagnostics of the regularization-limit drive.
#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub n_levels: Vec<u32>,
    pub per_level: Vec<SolveReport>,
    pub successive_sup_diffs: Vec<f64>,
    /// max over grid and levels of (u_{n_j} - u_{n_{j+1}})^+.
    pub monotonicity_violation: f64,
    pub converged: bool,
    pub final_k: f64,
}

// ---------------------------------------------------------------------------
// Newton on the truncated system
// ---------------------------------------------------------------------------

struct ResidualEval<'a> {
    a: &'a DMatrix<f64>,
    data: &'a TruncatedData,
    m: f64,
}

impl ResidualEval<'_> {
    /// F(U) = A U + m (g_k(U) - h_reg(U) f_n).
    fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut r = self.a * u;
        for i in 0..u.len() {
            r[i] += self.m
                * (self.data.absorption.eval(u[i])
                    - self.data.singular.eval(u[i]) * self.data.f_n.values[i]);
        }
        r
    }

    /// Jacobian diagonal addition m (g_k'(U) - h_reg'(U) f_n) >= 0.
    fn jac_diag(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(u.len(), |i, _| {
            self.m
                * (self.data.absorption.deriv(u[i])
                    - self.data.singular.deriv(u[i]) * self.data.f_n.values[i])
        })
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Solves the truncated problem at levels (n, k) by damped Newton with a
/// nonnegativity clamp, falling back to Picard after repeated line-search
/// failures.
pub fn solve_truncated(
    op: &DiscreteMixedOperator,
    data: &TruncatedData,
    tol: &Tolerances,
    start: Option<&GridFunction>,
) -> Result<(GridFunction, SolveReport)> {
    let nn = op.node_count();
    let a = op.dense_system();
    let ev = ResidualEval {
        a: &a,
        data,
        m: op.lumped_mass,
    };

    let mut u = match start {
        Some(g) if g.values.len() == nn => {
            DVector::from_iterator(nn, g.values.iter().map(|&v| v.max(0.0)))
        }
        Some(_) => return Err(Error::GridMismatch),
        None => DVector::zeros(nn),
    };

    let mut clamp_count = 0usize;
    let mut picard_fallbacks = 0usize;
    let mut failed_searches = 0usize;
    let mut a_chol: Option<Cholesky<f64, nalgebra::Dyn>> = None;

    let mut r = ev.residual(&u);
    let mut iterations = 0usize;
    while max_abs(&r) > tol.newton_tol {
        if iterations >= tol.max_newton {
            return Err(Error::NonConvergence {
                iterations,
                residual: max_abs(&r),
            });
        }
        iterations += 1;

        if failed_searches >= 3 {
            // Picard: freeze the nonlinearity arguments, solve the linear
            // part A U = m (h_reg(U) f_n - g_k(U)).
            picard_fallbacks += 1;
            let chol = match &a_chol {
                Some(c) => c,
                None => {
                    a_chol = Some(Cholesky::new(a.clone()).ok_or_else(|| {
                        Error::MonotonicityViolation(
                            "stiffness matrix not positive definite".into(),
                        )
                    })?);
                    a_chol.as_ref().unwrap()
                }
            };
            let rhs = DVector::from_fn(nn, |i, _| {
                ev.m
                    * (data.singular.eval(u[i]) * data.f_n.values[i]
                        - data.absorption.eval(u[i]))
            });
            u = chol.solve(&rhs);
            for x in u.iter_mut() {
                if *x < 0.0 {
                    *x = 0.0;
                    clamp_count += 1;
                }
            }
            failed_searches = 0;
            r = ev.residual(&u);
            continue;
        }

        let mut jac = a.clone();
        let d = ev.jac_diag(&u);
        for i in 0..nn {
            jac[(i, i)] += d[i];
        }
        let chol = Cholesky::new(jac).ok_or_else(|| {
            Error::MonotonicityViolation(
                "Newton Jacobian not positive definite (non-monotone data?)".into(),
            )
        })?;
        let step = chol.solve(&(-&r));

        // Armijo backtracking on the Euclidean residual norm.
        let f0 = r.norm();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let mut trial = &u + alpha * &step;
            let mut clamps = 0usize;
            for x in trial.iter_mut() {
                if *x < 0.0 {
                    *x = 0.0;
                    clamps += 1;
                }
            }
            let rt = ev.residual(&trial);
            if rt.norm() <= (1.0 - 1e-4 * alpha) * f0 {
                u = trial;
                r = rt;
                clamp_count += clamps;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            failed_searches += 1;
        }
    }

    let values: Vec<f64> = u.iter().cloned().collect();
    let sol = GridFunction::from_values(op.grid.clone(), values)?;
    let report = SolveReport {
        n_level: data.n_level,
        k_level: data.absorption.k_level,
        newton_iterations: iterations,
        final_residual_maxnorm: max_abs(&r),
        clamp_count,
        picard_fallbacks,
        energy_rho_sq: 0.0,
        absorption_mass: 0.0,
        apriori_constant: 0.0,
        apriori_satisfied: false,
        min_value: sol.min(),
        max_value: sol.max(),
    };
    Ok((sol, report))
}

// ---------------------------------------------------------------------------
// Energy diagnostics (a-priori bound)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct EnergyDiagnostics {
    pub rho_sq: f64,
    pub absorption_mass: f64,
    pub apriori_constant: f64,
    pub satisfied: bool,
}

/// Evaluates rho_h(U)^2 + ||g(U)U||_1 against the explicit constant 3C
/// built from the envelope parameters (Young terms with eps = nu/2 enter
/// when theta < 1).
pub fn energy_diagnostics(
    op: &DiscreteMixedOperator,
    u: &GridFunction,
    spec: &ProblemSpec,
) -> Result<EnergyDiagnostics> {
    let nl = &spec.nonlinearity;
    let m_cell = op.lumped_mass;
    let rho_sq = crate::operators::bilinear_form(op, u, u)?;
    let absorption_mass: f64 = u
        .values
        .iter()
        .map(|&v| nl.g_eval(v) * v.max(0.0) * m_cell)
        .sum();

    let f = spec.f.sample(&op.grid)?;
    let f_l1: f64 = f.values.iter().map(|&v| v * m_cell).sum();
    let theta = nl.theta();
    // max of h(s) s over [s_low, s_up], sampled (exact for the model
    // power, where the max sits at s_up).
    let mut hs_max = 0.0f64;
    for i in 0..=400 {
        let s = nl.s_low + (nl.s_up - nl.s_low) * i as f64 / 400.0;
        hs_max = hs_max.max(nl.h_eval(s) * s);
    }
    let base = (nl.c_low * nl.s_low.powf(1.0 - nl.gamma)
        + hs_max
        + nl.c_up * nl.s_up.powf(1.0 - theta))
        * f_l1;

    let apriori_constant = if theta >= 1.0 {
        base
    } else {
        let m = spec.m;
        let eps = nl.nu / 2.0;
        let m_conj = m / (m - 1.0);
        let c_eps = nl.c_up.powf(m) / m * (m_conj * eps).powf(-(m - 1.0));
        let f_lm: f64 = f
            .values
            .iter()
            .map(|&v| v.powf(m) * m_cell)
            .sum::<f64>()
            .powf(1.0 / m);
        let mut c = base + c_eps * f_lm.powf(m);
        // extra volume term of the Young step when q exceeds the threshold
        let bracket = (nl.q + 1.0) * (m - 1.0) - (1.0 - theta) * m;
        if bracket > 0.0 {
            c += eps * bracket / ((nl.q + 1.0) * (m - 1.0)) * spec.domain.volume();
        }
        c
    };
    Ok(EnergyDiagnostics {
        rho_sq,
        absorption_mass,
        apriori_constant,
        satisfied: rho_sq + absorption_mass <= 3.0 * apriori_constant + 1e-12,
    })
}

// ---------------------------------------------------------------------------
// Limit drive
// ---------------------------------------------------------------------------

pub fn solve_limit(
    op: &DiscreteMixedOperator,
    spec: &ProblemSpec,
) -> Result<(GridFunction, LimitReport)> {
    solve_limit_from(op, spec, None)
}

/// Drives the schedule of regularization levels n with an adaptive
/// truncation level k (doubled until the truncation is inactive) and
/// warm starts; asserts monotonicity of the levels in model mode.
pub fn solve_limit_from(
    op: &DiscreteMixedOperator,
    spec: &ProblemSpec,
    start: Option<&GridFunction>,
) -> Result<(GridFunction, LimitReport)> {
    let hyp = validate_hypotheses(spec);
    if !hyp.ok() {
        let failing: Vec<&str> = hyp
            .checks
            .iter()
            .filter(|c| c.status == crate::data::CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        return Err(Error::HypothesisViolation(format!(
            "failing checks: {}",
            failing.join(", ")
        )));
    }

    let mut k = spec.schedule.k_start;
    let mut prev: Option<GridFunction> = start.cloned();
    let is_model = spec.nonlinearity.is_model();
    let mut report = LimitReport {
        n_levels: Vec::new(),
        per_level: Vec::new(),
        successive_sup_diffs: Vec::new(),
        monotonicity_violation: 0.0,
        converged: false,
        final_k: k,
    };
    let mut current: Option<GridFunction> = None;
    let mut level_iter = spec.schedule.n_levels.iter().peekable();
    let mut compared_once = false;
    while let Some(&n) = level_iter.next() {
        // inner k loop: double until max g(U) < k/2 (truncation inactive)
        let (u, mut rep) = loop {
            let data = build_truncated_data(spec, &op.grid, n, k)?;
            let (u, rep) = solve_truncated(op, &data, &spec.tolerances, prev.as_ref())?;
            let gmax = u
                .values
                .iter()
                .map(|&v| spec.nonlinearity.g_eval(v))
                .fold(0.0f64, f64::max);
            if gmax < k / 2.0 {
                break (u, rep);
            }
            k *= 2.0;
            if k > 1e30 {
                return Err(Error::SchemeFidelity(
                    "truncation level diverged (absorption unbounded)".into(),
                ));
            }
        };
        let energy = energy_diagnostics(op, &u, spec)?;
        rep.energy_rho_sq = energy.rho_sq;
        rep.absorption_mass = energy.absorption_mass;
        rep.apriori_constant = energy.apriori_constant;
        rep.apriori_satisfied = energy.satisfied;
        if rep.min_value < -1e-12 {
            return Err(Error::SchemeFidelity(format!(
                "negative solution value {}",
                rep.min_value
            )));
        }

        if let Some(p) = &prev {
            // warm starts come from the previous level, so this measures
            // the shift regularization is monotone in model mode
            if compared_once || start.is_none() {
                let viol = p
                    .values
                    .iter()
                    .zip(&u.values)
                    .map(|(&a, &b)| (a - b).max(0.0))
                    .fold(0.0f64, f64::max);
                report.monotonicity_violation = report.monotonicity_violation.max(viol);
                if is_model && viol > 1e-6 {
                    return Err(Error::SchemeFidelity(format!(
                        "monotonicity violated by {viol} between levels"
                    )));
                }
                report.successive_sup_diffs.push(u.sup_diff(p));
            }
        }
        compared_once = true;
        report.n_levels.push(n);
        report.per_level.push(rep);
        let done = report
            .successive_sup_diffs
            .last()
            .map(|&d| d <= spec.tolerances.level_tol)
            .unwrap_or(false);
        prev = Some(u.clone());
        current = Some(u);
        if done {
            report.converged = true;
            break;
        }
    }
    report.final_k = k;
    let u = current.ok_or(Error::EmptyInput)?;
    Ok((u, report))
}

// ---------------------------------------------------------------------------
// Uniqueness probe
// ---------------------------------------------------------------------------

/// Runs the limit drive from each start and returns the max pairwise
/// sup-norm gap; also checks the discrete monotonicity identity
/// sum (g(U1) - g(U2)) T_k(U1 - U2) >= 0 used by the uniqueness proof.
pub fn uniqueness_probe(
    op: &DiscreteMixedOperator,
    spec: &ProblemSpec,
    starts: &[GridFunction],
) -> Result<f64> {
    if starts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut solutions = Vec::with_capacity(starts.len());
    for s in starts {
        let (u, _) = solve_limit_from(op, spec, Some(s))?;
        solutions.push(u);
    }
    let mut max_gap = 0.0f64;
    for i in 0..solutions.len() {
        for j in (i + 1)..solutions.len() {
            max_gap = max_gap.max(solutions[i].sup_diff(&solutions[j]));
            for &k in &[0.1, 1.0, 10.0] {
                let ident: f64 = solutions[i]
                    .values
                    .iter()
                    .zip(&solutions[j].values)
                    .map(|(&a, &b)| {
                        (spec.nonlinearity.g_eval(a) - spec.nonlinearity.g_eval(b))
                            * t_k(k, a - b)
                            * op.lumped_mass
                    })
                    .sum();
                if ident < -1e-10 {
                    return Err(Error::MonotonicityViolation(format!(
                        "uniqueness identity negative: {ident} at k = {k}"
                    )));
                }
            }
        }
    }
    Ok(max_gap)
}

// ---------------------------------------------------------------------------
// Equiintegrability check
// ---------------------------------------------------------------------------

/// Q1 element stiffness on a square cell (h-independent), local corner
/// order (0,0), (1,0), (0,1), (1,1).
const Q1_K: [[f64; 4]; 4] = [
    [2.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0, -1.0 / 3.0],
    [-1.0 / 6.0, 2.0 / 3.0, -1.0 / 3.0, -1.0 / 6.0],
    [-1.0 / 6.0, -1.0 / 3.0, 2.0 / 3.0, -1.0 / 6.0],
    [-1.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0, 2.0 / 3.0],
];

/// Discrete margin RHS - LHS of the tail-energy inequality
/// int |grad u|^2 S'_{eta,k}(u) + int g(u) S_{eta,k}(u)
///   <= (sup_{s >= k} h(s)) int f_n S_{eta,k}(u),
/// with the cutoff derivative frozen at cell averages and the (sign-good)
/// nonlocal term dropped. Nonnegative margins confirm the estimate.
pub fn equiintegrability_check(
    op: &DiscreteMixedOperator,
    u: &GridFunction,
    spec: &ProblemSpec,
    eta: f64,
    k: f64,
) -> Result<f64> {
    if !(eta > 0.0 && k > 0.0) {
        return Err(Error::DegenerateInput("need eta, k > 0".into()));
    }
    let grid = &op.grid;
    let h = grid.spacing;
    let nsub = grid.subdivisions as i64;
    let nodal = |gi: i64, gj: i64| -> f64 {
        if gi < 1 || gi > nsub - 1 || gj < 1 || gj > nsub - 1 {
            0.0
        } else {
            let per = (nsub - 1) as usize;
            u.values[((gi - 1) as usize) * per + (gj - 1) as usize]
        }
    };
    let mut grad_term = 0.0;
    match grid.dimension() {
        1 => {
            for e in 0..nsub {
                let vl = if e == 0 { 0.0 } else { u.values[(e - 1) as usize] };
                let vr = if e == nsub - 1 {
                    0.0
                } else {
                    u.values[e as usize]
                };
                let energy = (vr - vl) * (vr - vl) / h;
                grad_term += energy * s_delta_k_deriv(eta, k, 0.5 * (vl + vr));
            }
        }
        2 => {
            for ex in 0..nsub {
                for ey in 0..nsub {
                    let corners = [
                        nodal(ex, ey),
                        nodal(ex + 1, ey),
                        nodal(ex, ey + 1),
                        nodal(ex + 1, ey + 1),
                    ];
                    let mut energy = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            energy += corners[a] * Q1_K[a][b] * corners[b];
                        }
                    }
                    let avg = corners.iter().sum::<f64>() / 4.0;
                    grad_term += energy * s_delta_k_deriv(eta, k, avg);
                }
            }
        }
        d => return Err(Error::UnsupportedDomain(format!("dimension {d}"))),
    }

    let m_cell = op.lumped_mass;
    let n_last = *spec.schedule.n_levels.last().unwrap_or(&1024) as f64;
    let f = spec.f.sample(grid)?;
    let mut g_term = 0.0;
    let mut rhs = 0.0;
    let h_sup = spec.nonlinearity.h_eval(k); // h nonincreasing: sup over [k, inf)
    for (i, &v) in u.values.iter().enumerate() {
        let cutoff = s_delta_k(eta, k, v);
        g_term += spec.nonlinearity.g_eval(v) * cutoff * m_cell;
        rhs += h_sup * f.values[i].min(n_last) * cutoff * m_cell;
    }
    Ok(rhs - grad_term - g_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{NonlinearitySpec, Schedule, SourceSpec};
    use crate::grid::{build_grid, Domain};
    use approx::assert_relative_eq;

    fn model_spec(domain: Domain, s: f64, gamma: f64, q: f64, f: SourceSpec) -> ProblemSpec {
        ProblemSpec {
            domain,
            s,
            nonlinearity: NonlinearitySpec::model(gamma, q),
            f,
            m: 2.0,
            schedule: Schedule {
                n_levels: vec![1, 2, 4, 8, 16, 32, 64, 128],
                k_start: 10.0,
            },
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn zero_source_is_trivial() {
        let spec = model_spec(Domain::interval(-1.0, 1.0), 0.5, 0.5, 2.0, SourceSpec::Zero);
        let grid = build_grid(&spec.domain, 16).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, spec.s).unwrap();
        let data = build_truncated_data(&spec, &grid, 4, 10.0).unwrap();
        let (u, rep) = solve_truncated(&op, &data, &spec.tolerances, None).unwrap();
        assert_eq!(u.max(), 0.0);
        assert!(rep.newton_iterations <= 1);
    }

    #[test]
    fn local_linear_matches_closed_form() {
        // gamma = 0 (h = 1), g disabled, no nonlocal part: -u'' = 1 on
        // (-1,1), u = (1 - x^2)/2; the lumped FD solution is nodally exact.
        let spec = model_spec(
            Domain::interval(-1.0, 1.0),
            0.5,
            0.0,
            1.0,
            SourceSpec::Constant { value: 1.0 },
        );
        let grid = build_grid(&spec.domain, 64).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, spec.s)
            .unwrap()
            .with_zero_fractional();
        let mut data = build_truncated_data(&spec, &grid, 1024, 1e9).unwrap();
        data.absorption.disabled = true;
        let (u, _) = solve_truncated(&op, &data, &spec.tolerances, None).unwrap();
        for (node, &v) in grid.interior_nodes.iter().zip(&u.values) {
            let exact = (1.0 - node[0] * node[0]) / 2.0;
            assert!((v - exact).abs() < 1e-10, "x={} v={v} exact={exact}", node[0]);
        }
    }

    #[test]
    fn degenerate_linear_scaling() {
        // gamma = 0, g disabled: solve(2f) = 2 solve(f) including the
        // nonlocal part.
        let mk = |val: f64| {
            model_spec(
                Domain::interval(-1.0, 1.0),
                0.5,
                0.0,
                1.0,
                SourceSpec::Constant { value: val },
            )
        };
        let grid = build_grid(&Domain::interval(-1.0, 1.0), 32).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, 0.5).unwrap();
        let solve = |spec: &ProblemSpec| {
            let mut data = build_truncated_data(spec, &grid, 1 << 20, 1e9).unwrap();
            data.absorption.disabled = true;
            solve_truncated(&op, &data, &spec.tolerances, None).unwrap().0
        };
        let u1 = solve(&mk(1.0));
        let u2 = solve(&mk(2.0));
        for (a, b) in u1.values.iter().zip(&u2.values) {
            assert_relative_eq!(2.0 * a, *b, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn model_limit_run() {
        let spec = model_spec(
            Domain::interval(-1.0, 1.0),
            0.25,
            0.5,
            2.0,
            SourceSpec::Polynomial {
                coeffs: vec![1.0, 0.0, 1.0],
            },
        );
        let grid = build_grid(&spec.domain, 32).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, spec.s).unwrap();
        let (u, rep) = solve_limit(&op, &spec).unwrap();
        // the 1/n regularization shift converges like O(1/n): the level
        // gaps must shrink well below the final shift scale
        let diffs = &rep.successive_sup_diffs;
        assert!(*diffs.last().unwrap() < 1e-2, "{diffs:?}");
        assert!(diffs.last().unwrap() < diffs.first().unwrap());
        assert!(rep.monotonicity_violation <= 1e-8);
        assert!(u.min() > 0.0, "interior positivity, min = {}", u.min());
        let last = rep.per_level.last().unwrap();
        assert!(last.apriori_satisfied);
        assert!(last.final_residual_maxnorm <= 1e-10);
        // truncation inactive at the final level
        let gmax = u
            .values
            .iter()
            .map(|&v| spec.nonlinearity.g_eval(v))
            .fold(0.0f64, f64::max);
        assert!(rep.final_k > gmax);

        // residual identity against random test vectors
        let a = op.dense_system();
        let data = build_truncated_data(&spec, &grid, *rep.n_levels.last().unwrap(), rep.final_k)
            .unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let phi: Vec<f64> = (0..grid.node_count())
                .map(|_| rng.gen::<f64>() - 0.5)
                .collect();
            let au = &a * DVector::from_column_slice(&u.values);
            let total: f64 = (0..grid.node_count())
                .map(|i| {
                    phi[i]
                        * (au[i]
                            + op.lumped_mass
                                * (data.absorption.eval(u.values[i])
                                    - data.singular.eval(u.values[i]) * data.f_n.values[i]))
                })
                .sum();
            assert!(total.abs() < 1e-8, "weak residual {total}");
        }

        // equiintegrability margins
        let kmax = u.max();
        let margin = equiintegrability_check(&op, &u, &spec, kmax / 8.0, kmax / 2.0).unwrap();
        assert!(margin >= -1e-10, "margin {margin}");
        let margin0 = equiintegrability_check(&op, &u, &spec, 1.0, kmax * 1.1).unwrap();
        assert_relative_eq!(margin0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_constant_scales_with_f() {
        // theta = gamma = 1: case i, C linear in ||f||_1
        let mk = |val: f64| {
            model_spec(
                Domain::interval(-1.0, 1.0),
                0.5,
                1.0,
                1.0,
                SourceSpec::Constant { value: val },
            )
        };
        let grid = build_grid(&Domain::interval(-1.0, 1.0), 16).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, 0.5).unwrap();
        let u = GridFunction::zeros(grid.clone());
        let d1 = energy_diagnostics(&op, &u, &mk(1.0)).unwrap();
        let d2 = energy_diagnostics(&op, &u, &mk(2.0)).unwrap();
        assert_relative_eq!(2.0 * d1.apriori_constant, d2.apriori_constant, epsilon = 1e-12);
        assert!(d1.satisfied); // zero function trivially satisfies
        // model gamma = theta = 1: C = (1 + 1 + 1) ||f||_1
        let f_l1 = 1.0 * grid.cell_measure * grid.node_count() as f64;
        assert_relative_eq!(d1.apriori_constant, 3.0 * f_l1, epsilon = 1e-12);
    }

    #[test]
    fn uniqueness_probe_trivial_and_model() {
        let spec = model_spec(
            Domain::interval(-1.0, 1.0),
            0.25,
            0.5,
            2.0,
            SourceSpec::Constant { value: 1.0 },
        );
        let grid = build_grid(&spec.domain, 16).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, spec.s).unwrap();
        let z = GridFunction::zeros(grid.clone());
        let one = GridFunction::constant(grid.clone(), 1.0);
        let gap = uniqueness_probe(&op, &spec, &[z, one]).unwrap();
        assert!(gap <= 1e-7, "gap {gap}");
    }

    #[test]
    fn hypothesis_failure_blocks_solve() {
        // theta = 0.5 with m = 1 violates (H)_f
        let mut spec = model_spec(
            Domain::interval(-1.0, 1.0),
            0.25,
            0.5,
            2.0,
            SourceSpec::Constant { value: 1.0 },
        );
        spec.m = 1.0;
        let grid = build_grid(&spec.domain, 8).unwrap();
        let op = DiscreteMixedOperator::assemble(&grid, spec.s).unwrap();
        assert!(matches!(
            solve_limit(&op, &spec),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
