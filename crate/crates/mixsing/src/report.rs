//! Experiment orchestration: config ingestion, the
//! solve -> rearrange -> compare -> bound-check pipeline, report and
//! manifest emission, and the built-in self-test battery.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    classify_regime, validate_hypotheses, HypothesisReport, NonlinearitySpec, ProblemSpec,
    RegimeReport, Schedule, SourceSpec, SummabilityCase, Tolerances,
};
use crate::error::{Error, Result};
use crate::grid::{build_grid, Domain, GridFunction};
use crate::operators::DiscreteMixedOperator;
use crate::rearrange::{grid_rearrangement, profile_lp_norm};
use crate::solver::{
    equiintegrability_check, solve_limit, uniqueness_probe, LimitReport,
};
use crate::talenti::{
    comparison_profile, levelset_inequality_check, orlicz_sup, summability_bounds,
    talenti_margin, BoundReport, ComparisonReport,
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCfg {
    pub n: usize,
    pub domain: Domain,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checks {
    #[serde(default = "default_true")]
    pub talenti: bool,
    #[serde(default = "default_true")]
    pub bounds: bool,
    #[serde(default = "default_true")]
    pub uniqueness: bool,
    #[serde(default = "default_true")]
    pub equiintegrability: bool,
    #[serde(default = "default_true")]
    pub energy: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            talenti: true,
            bounds: true,
            uniqueness: true,
            equiintegrability: true,
            energy: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemCfg {
    pub s: f64,
    pub nonlinearity: NonlinearitySpec,
    pub f: SourceSpec,
    pub m: f64,
    #[serde(default)]
    pub schedule: Schedule,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemCfg,
    pub grid: GridCfg,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.domain.validate()?;
        if !(self.problem.s > 0.0 && self.problem.s < 1.0) {
            return Err(Error::InvalidOrder(self.problem.s));
        }
        if !(self.tolerances.newton_tol > 0.0 && self.tolerances.level_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn problem_spec(&self) -> ProblemSpec {
        ProblemSpec {
            domain: self.grid.domain.clone(),
            s: self.problem.s,
            nonlinearity: self.problem.nonlinearity.clone(),
            f: self.problem.f.clone(),
            m: self.problem.m,
            schedule: self.problem.schedule.clone(),
            tolerances: self.tolerances.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Reports / manifest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundOutcome {
    Checked { report: BoundReport },
    Skipped { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub hypotheses: HypothesisReport,
    pub limit: LimitReport,
    pub solution_sup: f64,
    pub solution_min: f64,
    pub regime: Option<RegimeReport>,
    pub talenti: Option<ComparisonReport>,
    pub levelset_margin: Option<f64>,
    pub bounds: Option<BoundOutcome>,
    pub uniqueness_gap: Option<f64>,
    pub equiintegrability_margin: Option<f64>,
    pub overall_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub phase_times_ms: Vec<(String, u128)>,
    pub files: Vec<FileEntry>,
    pub overall_pass: bool,
}

/// Prefixes the failing phase on message-carrying errors; structural
/// errors that drive exit codes pass through untouched.
fn tag_phase(phase: &str, e: Error) -> Error {
    match e {
        Error::NonConvergence { .. }
        | Error::HypothesisViolation(_)
        | Error::OutOfCase(_)
        | Error::OutsideTheory(_) => e,
        other => Error::Config(format!("phase {phase}: {other}")),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// Runs the full pipeline per the config's check flags and writes
/// solution.csv, profile.csv, comparison.csv, report.json, manifest.json
/// into the output directory.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<(RunManifest, ExperimentReport)> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let spec = config.problem_spec();
    let mut phases: Vec<(String, u128)> = Vec::new();
    let mut phase = |name: &str, t: Instant| {
        phases.push((name.to_string(), t.elapsed().as_millis()));
    };

    // hypotheses gate: no solve is attempted on a failing spec
    let t = Instant::now();
    let hypotheses = validate_hypotheses(&spec);
    phase("hypotheses", t);
    if !hypotheses.ok() {
        let failing: Vec<&str> = hypotheses
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

    let t = Instant::now();
    let grid = build_grid(&config.grid.domain, config.grid.n).map_err(|e| tag_phase("grid", e))?;
    let op = DiscreteMixedOperator::assemble(&grid, spec.s).map_err(|e| tag_phase("assemble", e))?;
    phase("assemble", t);

    let t = Instant::now();
    let (u, limit) = solve_limit(&op, &spec).map_err(|e| tag_phase("solve", e))?;
    phase("solve", t);

    let t = Instant::now();
    let u_star = grid_rearrangement(&u).map_err(|e| tag_phase("rearrange", e))?;
    let f_grid = spec.f.sample(&grid).map_err(|e| tag_phase("rearrange", e))?;
    let f_star = grid_rearrangement(&f_grid).map_err(|e| tag_phase("rearrange", e))?;
    phase("rearrange", t);

    let n_dim = grid.dimension();
    let volume = grid.domain.volume();
    let gamma = spec.nonlinearity.gamma;
    let mut overall = limit.per_level.last().map(|r| r.final_residual_maxnorm <= spec.tolerances.newton_tol * 10.0).unwrap_or(false);
    if config.checks.energy {
        overall &= limit.per_level.iter().all(|r| r.apriori_satisfied);
    }

    let (talenti, levelset_margin) = if config.checks.talenti {
        let t = Instant::now();
        let v_star = comparison_profile(&f_star, n_dim, volume).map_err(|e| tag_phase("talenti", e))?;
        let bound_sup = ((gamma + 1.0) * v_star.sup()).powf(1.0 / (gamma + 1.0));
        let tol = 0.05 * bound_sup + 2.0 * grid.spacing;
        let rep = talenti_margin(&u_star, &v_star, gamma, tol).map_err(|e| tag_phase("talenti", e))?;
        let ls = levelset_inequality_check(&u_star, &f_star, gamma, n_dim);
        overall &= rep.pass;
        phase("talenti", t);
        (Some(rep), Some(ls))
    } else {
        (None, None)
    };

    let regime = classify_regime(gamma, spec.m, n_dim, spec.nonlinearity.q).ok();
    let bounds = if config.checks.bounds {
        let t = Instant::now();
        let f_norm = profile_lp_norm(&f_star, spec.m)?;
        let outcome = if f_norm <= 0.0 {
            BoundOutcome::Skipped {
                reason: "zero source: every bound is trivial".into(),
            }
        } else {
            match summability_bounds(n_dim, spec.m, gamma, volume, f_norm) {
                Ok(rep) => {
                    let lhs = match rep.case {
                        SummabilityCase::Bounded => {
                            profile_lp_norm(&u_star, f64::INFINITY)?
                        }
                        SummabilityCase::SubcriticalLp => {
                            profile_lp_norm(&u_star, rep.p.unwrap())?
                        }
                        SummabilityCase::Orlicz => {
                            orlicz_sup(&u_star, n_dim, gamma, volume)?.sup
                        }
                    };
                    let rep = rep.with_lhs(lhs);
                    overall &= rep.pass.unwrap_or(false);
                    BoundOutcome::Checked { report: rep }
                }
                Err(Error::OutOfCase(reason)) => BoundOutcome::Skipped { reason },
                Err(e) => return Err(tag_phase("bounds", e)),
            }
        };
        phase("bounds", t);
        Some(outcome)
    } else {
        None
    };

    let uniqueness_gap = if config.checks.uniqueness {
        let t = Instant::now();
        let starts = [
            GridFunction::zeros(grid.clone()),
            GridFunction::constant(grid.clone(), 1.0),
        ];
        let gap = uniqueness_probe(&op, &spec, &starts).map_err(|e| tag_phase("uniqueness", e))?;
        overall &= gap <= 1e-8;
        phase("uniqueness", t);
        Some(gap)
    } else {
        None
    };

    let equi = if config.checks.equiintegrability {
        let t = Instant::now();
        let sup = u.max();
        let margin = if sup > 0.0 {
            equiintegrability_check(&op, &u, &spec, sup / 8.0, sup / 2.0)
                .map_err(|e| tag_phase("equiintegrability", e))?
        } else {
            0.0
        };
        overall &= margin >= -1e-10;
        phase("equiintegrability", t);
        Some(margin)
    } else {
        None
    };

    let report = ExperimentReport {
        hypotheses,
        solution_sup: u.max(),
        solution_min: u.min(),
        limit,
        regime,
        talenti,
        levelset_margin,
        bounds,
        uniqueness_gap,
        equiintegrability_margin: equi,
        overall_pass: overall,
    };

    // file emission with checksums
    let t = Instant::now();
    let mut files = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<()> {
        fs::write(out_dir.join(name), &bytes)?;
        files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    };
    let mut buf = Vec::new();
    u.write_csv(&mut buf)?;
    emit("solution.csv", buf)?;
    let mut buf = Vec::new();
    u_star.write_csv(&mut buf)?;
    emit("profile.csv", buf)?;
    if let Some(cmp) = &report.talenti {
        let mut buf = Vec::new();
        cmp.write_csv(&mut buf)?;
        emit("comparison.csv", buf)?;
    }
    emit("report.json", serde_json::to_vec_pretty(&report)?)?;
    phase("emit", t);

    let manifest = RunManifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        phase_times_ms: phases,
        files,
        overall_pass: overall,
    };
    let bytes = serde_json::to_vec_pretty(&manifest)?;
    fs::write(out_dir.join("manifest.json"), bytes)?;
    Ok((manifest, report))
}

// ---------------------------------------------------------------------------
// Self-test battery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SelftestSummary {
    pub passed: usize,
    pub failed: Vec<String>,
}

impl SelftestSummary {
    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Small-size invariant battery across all modules. `inject_asymmetry`
/// is a fault-injection hook that flips the sign of one nonlocal matrix
/// entry; the symmetry suite must then fail.
pub fn selftest(inject_asymmetry: bool) -> SelftestSummary {
    let mut passed = 0usize;
    let mut failed: Vec<String> = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if ok {
            passed += 1;
        } else {
            failed.push(name.to_string());
        }
    };

    // operator symmetry (1D and 2D) with the fault hook
    let sym = (|| -> Result<bool> {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 16)?;
        let mut op = DiscreteMixedOperator::assemble(&g, 0.5)?;
        if inject_asymmetry {
            op.a_frac[(0, 1)] = -op.a_frac[(0, 1)];
        }
        let n = op.node_count();
        let mut ok = op.a_loc.is_symmetric();
        for i in 0..n {
            for j in (i + 1)..n {
                ok &= (op.a_frac[(i, j)] - op.a_frac[(j, i)]).abs() <= 1e-13;
            }
        }
        Ok(ok)
    })();
    check("operator symmetry 1d", sym.unwrap_or(false));

    let sym2 = (|| -> Result<bool> {
        let g = build_grid(&Domain::rectangle(0.0, 1.0, 0.0, 1.0), 8)?;
        let op = DiscreteMixedOperator::assemble(&g, 0.5)?;
        let n = op.node_count();
        let mut ok = true;
        for i in 0..n {
            for j in (i + 1)..n {
                ok &= (op.a_frac[(i, j)] - op.a_frac[(j, i)]).abs() <= 1e-13;
            }
        }
        Ok(ok)
    })();
    check("operator symmetry 2d", sym2.unwrap_or(false));

    // tail weight closed form at the center of (-1,1)
    let kappa = crate::operators::tail_weight_1d(-1.0, 1.0, 0.5, 0.0);
    check("tail weight closed form", (kappa - 2.0).abs() < 1e-10);

    // rearrangement identities on deterministic data
    let cells = [(0.4, 0.3), (2.0, 0.2), (1.1, 0.5)];
    let rp = crate::rearrange::decreasing_rearrangement(&cells, 1.0);
    let norms_ok = rp
        .as_ref()
        .map(|p| {
            let direct: f64 = cells.iter().map(|&(v, m)| v * v * m).sum::<f64>().sqrt();
            (profile_lp_norm(p, 2.0).unwrap() - direct).abs() < 1e-13
        })
        .unwrap_or(false);
    check("rearrangement norm preservation", norms_ok);
    let hl = crate::rearrange::hardy_littlewood_gap(&cells, &cells, 1.0)
        .map(|g| g.abs() < 1e-12)
        .unwrap_or(false);
    check("hardy-littlewood equality case", hl);

    // comparison-profile oracle
    let f1 = crate::rearrange::RearrangedProfile::new(vec![0.0, 2.0], vec![1.0], 2.0).unwrap();
    let v = comparison_profile(&f1, 1, 2.0);
    let v_ok = v
        .map(|v| (v.sup() - 0.5).abs() < 1e-12 && (v.eval(1.0) - 0.375).abs() < 1e-12)
        .unwrap_or(false);
    check("radial comparison oracle", v_ok);

    // explicit constants
    let bliss_ok = crate::talenti::bliss_constant(5, 2.0)
        .map(|c| c.is_finite() && c > 0.0)
        .unwrap_or(false);
    check("bliss constant evaluates", bliss_ok);
    let case2 = summability_bounds(1, 2.0, 1.0, 2.0, 1.0)
        .map(|r| (r.rhs_value - 1.27790).abs() < 1e-4)
        .unwrap_or(false);
    check("case-ii constant oracle", case2);
    let regime_ok = classify_regime(0.5, 2.0, 5, 0.0)
        .map(|r| {
            r.q_threshold == 0.0
                && (r.m_threshold - 10.0 / 6.5).abs() < 1e-12
                && r.p_exponent == Some(15.0)
        })
        .unwrap_or(false);
    check("regime classifier oracle", regime_ok);

    // a small end-to-end solve with monotone levels
    let solve_ok = (|| -> Result<bool> {
        let spec = ProblemSpec {
            domain: Domain::interval(-1.0, 1.0),
            s: 0.25,
            nonlinearity: NonlinearitySpec::model(0.5, 2.0),
            f: SourceSpec::Constant { value: 1.0 },
            m: 2.0,
            schedule: Schedule {
                n_levels: vec![1, 2, 4, 8, 16],
                k_start: 10.0,
            },
            tolerances: Tolerances::default(),
        };
        let grid = build_grid(&spec.domain, 24)?;
        let op = DiscreteMixedOperator::assemble(&grid, spec.s)?;
        let (u, rep) = solve_limit(&op, &spec)?;
        Ok(u.min() > 0.0
            && rep.monotonicity_violation <= 1e-8
            && rep.per_level.iter().all(|r| r.apriori_satisfied))
    })();
    check("model scheme fidelity", solve_ok.unwrap_or(false));

    SelftestSummary { passed, failed }
}

// ---------------------------------------------------------------------------
// Parameter sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub solution_sup: f64,
    pub min_margin: Option<f64>,
    pub overall_pass: bool,
}

/// Applies a named scalar parameter to a copy of the config.
pub fn apply_sweep_param(config: &ExperimentConfig, param: &str, value: f64) -> Result<ExperimentConfig> {
    let mut c = config.clone();
    match param {
        "s" => c.problem.s = value,
        "gamma" => c.problem.nonlinearity.gamma = value,
        "q" => c.problem.nonlinearity.q = value,
        "m" => c.problem.m = value,
        "n" | "N" => {
            if value < 2.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!("grid N must be an integer >= 2, got {value}")));
            }
            c.grid.n = value as usize;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown sweep parameter {other:?} (use s, gamma, q, m, N)"
            )))
        }
    }
    Ok(c)
}

/// Runs the experiment once per parameter value; outputs land in
/// sweep_<param>_<value>/ under the base output directory.
pub fn run_sweep(
    config: &ExperimentConfig,
    param: &str,
    values: &[f64],
    out_dir: &Path,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rows = Vec::new();
    for &v in values {
        let c = apply_sweep_param(config, param, v)?;
        let sub = out_dir.join(format!("sweep_{param}_{v}"));
        let (_, rep) = run_experiment(&c, &sub)?;
        rows.push(SweepRow {
            value: v,
            solution_sup: rep.solution_sup,
            min_margin: rep.talenti.as_ref().map(|t| t.min_margin),
            overall_pass: rep.overall_pass,
        });
    }
    let mut csv = String::from("# mixsing sweep v1\n# value,solution_sup,min_margin,pass\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.value,
            r.solution_sup,
            r.min_margin.map(|m| m.to_string()).unwrap_or_default(),
            r.overall_pass
        ));
    }
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("sweep.csv"), csv)?;
    Ok(rows)
}

/// Maps crate errors onto the documented process exit codes:
/// 0 pass, 1 check failure, 2 invalid input, 3 solver nonconvergence.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => 3,
        Error::MonotonicityViolation(_) | Error::SchemeFidelity(_) => 1,
        _ => 2,
    }
}
