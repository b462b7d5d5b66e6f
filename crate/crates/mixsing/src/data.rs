//! Nonlinearities, truncations and standing-hypothesis validation.
//!
//! The model problem uses g(t) = t^q and h(t) = t^{-gamma}; custom mode
//! takes power-law descriptors with monotonicity flags. Hypothesis checks
//! in custom mode are sampling-based and can only falsify, never certify.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{sample_function, Domain, Grid, GridFunction};

// ---------------------------------------------------------------------------
// Scalar truncation calculus
// ---------------------------------------------------------------------------

/// T_k(s) = max{-k, min{s, k}}.
pub fn t_k(k: f64, s: f64) -> f64 {
    s.min(k).max(-k)
}

/// G_k(s) = (|s| - k)^+ sign(s); T_k + G_k = id.
pub fn g_k(k: f64, s: f64) -> f64 {
    (s.abs() - k).max(0.0) * s.signum()
}

/// V_{delta,k}: 1 below k, linear ramp down to 0 on (k, k+delta).
pub fn v_delta_k(delta: f64, k: f64, s: f64) -> f64 {
    if s <= k {
        1.0
    } else if s < k + delta {
        (k + delta - s) / delta
    } else {
        0.0
    }
}

/// S_{delta,k} = 1 - V_{delta,k}.
pub fn s_delta_k(delta: f64, k: f64, s: f64) -> f64 {
    1.0 - v_delta_k(delta, k, s)
}

/// Derivative of S_{delta,k} (1/delta on the ramp, 0 elsewhere).
pub fn s_delta_k_deriv(delta: f64, k: f64, s: f64) -> f64 {
    if s > k && s < k + delta {
        1.0 / delta
    } else {
        0.0
    }
}

/// Level-set test ramp: 0 below t, theta - t on (t, t+h], h above.
pub fn g_t_h(t: f64, h: f64, theta: f64) -> f64 {
    if theta <= t {
        0.0
    } else if theta <= t + h {
        theta - t
    } else {
        h
    }
}

// ---------------------------------------------------------------------------
// Nonlinearity descriptors
// ---------------------------------------------------------------------------

/// Simple scalar function family for custom-mode nonlinearities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ScalarFn {
    /// coef * t^exponent
    Power { coef: f64, exponent: f64 },
    /// coef * t^{-exponent}
    InversePower { coef: f64, exponent: f64 },
    Constant { value: f64 },
}

impl ScalarFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ScalarFn::Power { coef, exponent } => {
                if t <= 0.0 {
                    0.0
                } else {
                    coef * t.powf(exponent)
                }
            }
            ScalarFn::InversePower { coef, exponent } => {
                if t <= 0.0 {
                    f64::INFINITY
                } else {
                    coef * t.powf(-exponent)
                }
            }
            ScalarFn::Constant { value } => value,
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match *self {
            ScalarFn::Power { coef, exponent } => {
                if t <= 0.0 || exponent == 0.0 {
                    0.0
                } else {
                    coef * exponent * t.powf(exponent - 1.0)
                }
            }
            ScalarFn::InversePower { coef, exponent } => {
                if t <= 0.0 || exponent == 0.0 {
                    0.0
                } else {
                    -coef * exponent * t.powf(-exponent - 1.0)
                }
            }
            ScalarFn::Constant { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NonlinearityMode {
    /// g(t) = t^q, h(t) = t^{-gamma}.
    Model,
    Custom {
        g: ScalarFn,
        h: ScalarFn,
        g_nondecreasing: bool,
        h_nonincreasing: bool,
        /// Whether h(0) = +infinity (must be declared, never guessed).
        singular_at_zero: bool,
    },
}

fn default_one() -> f64 {
    1.0
}
fn default_two() -> f64 {
    2.0
}

/// The semilinear data g, h with the hypothesis-check parameters of the
/// envelope bounds h(s) <= C_low / s^gamma (small s), h(s) <= C_up / s^theta
/// (large s) and g(s) >= nu s^q (s >= s1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub gamma: f64,
    pub q: f64,
    /// Large-argument decay exponent of h; defaults to gamma (model mode).
    pub theta: Option<f64>,
    #[serde(flatten)]
    pub mode: NonlinearityMode,
    #[serde(default = "default_one")]
    pub c_low: f64,
    #[serde(default = "default_one")]
    pub c_up: f64,
    #[serde(default = "default_one")]
    pub s_low: f64,
    #[serde(default = "default_two")]
    pub s_up: f64,
    #[serde(default = "default_one")]
    pub nu: f64,
    #[serde(default = "default_one")]
    pub s_one: f64,
}

impl NonlinearitySpec {
    pub fn model(gamma: f64, q: f64) -> Self {
        NonlinearitySpec {
            gamma,
            q,
            theta: None,
            mode: NonlinearityMode::Model,
            c_low: 1.0,
            c_up: 1.0,
            s_low: 1.0,
            s_up: 2.0,
            nu: 1.0,
            s_one: 1.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(self.gamma)
    }

    pub fn is_model(&self) -> bool {
        matches!(self.mode, NonlinearityMode::Model)
    }

    /// Untruncated absorption g.
    pub fn g_eval(&self, t: f64) -> f64 {
        match &self.mode {
            NonlinearityMode::Model => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(self.q)
                }
            }
            NonlinearityMode::Custom { g, .. } => g.eval(t).max(0.0),
        }
    }

    pub fn g_deriv(&self, t: f64) -> f64 {
        match &self.mode {
            NonlinearityMode::Model => {
                if t <= 0.0 || self.q == 0.0 {
                    0.0
                } else {
                    (self.q * t.powf(self.q - 1.0)).min(1e12)
                }
            }
            NonlinearityMode::Custom { g, .. } => g.deriv(t).clamp(0.0, 1e12),
        }
    }

    /// Untruncated singular factor h.
    pub fn h_eval(&self, t: f64) -> f64 {
        match &self.mode {
            NonlinearityMode::Model => {
                if t <= 0.0 {
                    f64::INFINITY
                } else {
                    t.powf(-self.gamma)
                }
            }
            NonlinearityMode::Custom { h, .. } => h.eval(t),
        }
    }
}

// ---------------------------------------------------------------------------
// Source term
// ---------------------------------------------------------------------------

/// Named source-term presets (reproducible without an expression parser).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum SourceSpec {
    Constant { value: f64 },
    /// Polynomial in the first coordinate: sum coeffs[k] x^k.
    Polynomial { coeffs: Vec<f64> },
    Gaussian { amplitude: f64, center: Vec<f64>, width: f64 },
    /// amplitude * |x - center|^exponent (center defaults to the origin).
    RadialPower { amplitude: f64, exponent: f64 },
    /// Nodal samples read from a CSV file (last column = value).
    Csv { path: String },
    Zero,
}

impl SourceSpec {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            SourceSpec::Constant { value } => *value,
            SourceSpec::Polynomial { coeffs } => {
                let t = x[0];
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
            }
            SourceSpec::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let r2: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| {
                        let c = center.get(i).copied().unwrap_or(0.0);
                        (xi - c) * (xi - c)
                    })
                    .sum();
                amplitude * (-r2 / (width * width)).exp()
            }
            SourceSpec::RadialPower {
                amplitude,
                exponent,
            } => {
                let r2: f64 = x.iter().map(|&xi| xi * xi).sum();
                amplitude * r2.sqrt().powf(*exponent)
            }
            SourceSpec::Csv { .. } => f64::NAN,
            SourceSpec::Zero => 0.0,
        }
    }

    pub fn sample(&self, grid: &Arc<Grid>) -> Result<GridFunction> {
        match self {
            SourceSpec::Csv { path } => {
                let file = std::fs::File::open(path)?;
                let gf =
                    GridFunction::read_csv(Arc::clone(grid), std::io::BufReader::new(file))?;
                if let Some(&bad) = gf.values.iter().find(|v| **v < 0.0) {
                    return Err(Error::HypothesisViolation(format!(
                        "CSV source contains negative value {bad}"
                    )));
                }
                Ok(gf)
            }
            _ => sample_function(grid, |x| self.eval(x), true),
        }
    }
}

// ---------------------------------------------------------------------------
// Problem specification
// ---------------------------------------------------------------------------

fn default_n_levels() -> Vec<u32> {
    (0..=10).map(|k| 1u32 << k).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default = "default_n_levels")]
    pub n_levels: Vec<u32>,
    /// Initial truncation level for the adaptive k doubling.
    #[serde(default = "default_k_start")]
    pub k_start: f64,
}

fn default_k_start() -> f64 {
    10.0
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            n_levels: default_n_levels(),
            k_start: default_k_start(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_level_tol")]
    pub level_tol: f64,
    #[serde(default = "default_max_newton")]
    pub max_newton: usize,
}

fn default_newton_tol() -> f64 {
    1e-10
}
fn default_level_tol() -> f64 {
    1e-8
}
fn default_max_newton() -> usize {
    50
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            newton_tol: default_newton_tol(),
            level_tol: default_level_tol(),
            max_newton: default_max_newton(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub domain: Domain,
    pub s: f64,
    pub nonlinearity: NonlinearitySpec,
    pub f: SourceSpec,
    /// Integrability exponent of f (> 1, or = 1 when theta >= 1).
    pub m: f64,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ProblemSpec {
    pub fn model(domain: Domain, s: f64, gamma: f64, q: f64, f: SourceSpec, m: f64) -> Self {
        ProblemSpec {
            domain,
            s,
            nonlinearity: NonlinearitySpec::model(gamma, q),
            f,
            m,
            schedule: Schedule::default(),
            tolerances: Tolerances::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Truncated / regularized data
// ---------------------------------------------------------------------------

/// Which regularization of the singular factor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularRegularization {
    /// (t^+ + 1/n)^{-gamma} shift (monotone model scheme, the default for
    /// model mode).
    Shift,
    /// min(h(t), n) truncation of a custom h.
    Truncate,
}

/// Truncated absorption g_k(t) = min(g(t), k) for t >= 0, 0 below.
#[derive(Debug, Clone)]
pub struct TruncatedAbsorption {
    spec: NonlinearitySpec,
    pub k_level: f64,
    /// Test hook: disables the absorption term entirely.
    pub disabled: bool,
}

impl TruncatedAbsorption {
    pub fn eval(&self, t: f64) -> f64 {
        if self.disabled || t < 0.0 {
            return 0.0;
        }
        self.spec.g_eval(t).min(self.k_level)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if self.disabled || t <= 0.0 {
            return 0.0;
        }
        if self.spec.g_eval(t) >= self.k_level {
            0.0
        } else {
            self.spec.g_deriv(t)
        }
    }
}

/// Regularized singular factor at level n.
#[derive(Debug, Clone)]
pub struct RegularizedSingular {
    spec: NonlinearitySpec,
    pub n_level: u32,
    pub kind: SingularRegularization,
}

impl RegularizedSingular {
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.n_level as f64;
        match self.kind {
            SingularRegularization::Shift => {
                (t.max(0.0) + 1.0 / n).powf(-self.spec.gamma)
            }
            SingularRegularization::Truncate => self.spec.h_eval(t.max(0.0)).min(n),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let n = self.n_level as f64;
        match self.kind {
            SingularRegularization::Shift => {
                if t < 0.0 || self.spec.gamma == 0.0 {
                    0.0
                } else {
                    -self.spec.gamma * (t + 1.0 / n).powf(-self.spec.gamma - 1.0)
                }
            }
            SingularRegularization::Truncate => {
                if t <= 0.0 || self.spec.h_eval(t) >= n {
                    0.0
                } else {
                    match &self.spec.mode {
                        NonlinearityMode::Custom { h, .. } => h.deriv(t).min(0.0),
                        NonlinearityMode::Model => {
                            -self.spec.gamma * t.powf(-self.spec.gamma - 1.0)
                        }
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TruncatedData {
    pub f_n: GridFunction,
    pub absorption: TruncatedAbsorption,
    pub singular: RegularizedSingular,
    pub n_level: u32,
}

/// Builds f_n = T_n(f), the truncated absorption and the regularized
/// singular factor at levels (n, k). Model mode uses the shift
/// regularization; custom mode truncates h.
pub fn build_truncated_data(
    spec: &ProblemSpec,
    grid: &Arc<Grid>,
    n_level: u32,
    k_level: f64,
) -> Result<TruncatedData> {
    let kind = if spec.nonlinearity.is_model() {
        SingularRegularization::Shift
    } else {
        SingularRegularization::Truncate
    };
    build_truncated_data_with(spec, grid, n_level, k_level, kind)
}

pub fn build_truncated_data_with(
    spec: &ProblemSpec,
    grid: &Arc<Grid>,
    n_level: u32,
    k_level: f64,
    kind: SingularRegularization,
) -> Result<TruncatedData> {
    let f = spec.f.sample(grid)?;
    let fn_values: Vec<f64> = f.values.iter().map(|&v| v.min(n_level as f64)).collect();
    let f_n = GridFunction::from_values(Arc::clone(grid), fn_values)?;
    Ok(TruncatedData {
        f_n,
        absorption: TruncatedAbsorption {
            spec: spec.nonlinearity.clone(),
            k_level,
            disabled: false,
        },
        singular: RegularizedSingular {
            spec: spec.nonlinearity.clone(),
            n_level,
            kind,
        },
        n_level,
    })
}

// ---------------------------------------------------------------------------
// Hypothesis validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    /// Verified only on a sampling grid; can falsify, never certify.
    SampledPass,
    Fail,
    Waived,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    fn push(&mut self, name: &str, status: CheckStatus, detail: impl Into<String>) {
        self.checks.push(HypothesisCheck {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }
}

/// Log-spaced sampling grid used by the custom-mode envelope checks.
fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (ll + (lh - ll) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Validates the standing assumptions; reports, never throws.
pub fn validate_hypotheses(spec: &ProblemSpec) -> HypothesisReport {
    let nl = &spec.nonlinearity;
    let theta = nl.theta();
    let gamma = nl.gamma;
    let m = spec.m;
    let n_dim = spec.domain.dimension();
    let mut rep = HypothesisReport { checks: Vec::new() };

    // gamma range of (h1)
    if (0.0..=1.0).contains(&gamma) {
        rep.push("(h1) gamma in [0,1]", CheckStatus::Pass, format!("gamma = {gamma}"));
    } else {
        rep.push(
            "(h1) gamma in [0,1]",
            CheckStatus::Fail,
            format!("gamma = {gamma} outside [0,1]"),
        );
    }
    if nl.s_up <= nl.s_low {
        rep.push(
            "(h2) s_up > s_low",
            CheckStatus::Fail,
            format!("s_up = {} <= s_low = {}", nl.s_up, nl.s_low),
        );
    } else {
        rep.push("(h2) s_up > s_low", CheckStatus::Pass, "");
    }

    // envelope checks
    match &nl.mode {
        NonlinearityMode::Model => {
            // h(s) = s^{-gamma}: both envelopes hold in closed form when
            // the constants are at least 1 (theta = gamma).
            let h1_ok = nl.c_low >= 1.0;
            rep.push(
                "(h1) small-argument envelope",
                if h1_ok { CheckStatus::Pass } else { CheckStatus::Fail },
                "closed form: s^{-gamma} <= C_low s^{-gamma}",
            );
            let h2_ok = nl.c_up >= nl.s_up.powf(theta - gamma);
            rep.push(
                "(h2) large-argument envelope",
                if h2_ok { CheckStatus::Pass } else { CheckStatus::Fail },
                "closed form for the model h",
            );
        }
        NonlinearityMode::Custom { h, singular_at_zero, .. } => {
            let mut h1 = CheckStatus::SampledPass;
            for &t in log_grid(1e-8, nl.s_low, 400).iter() {
                if h.eval(t) > nl.c_low * t.powf(-gamma) * (1.0 + 1e-12) {
                    h1 = CheckStatus::Fail;
                    break;
                }
            }
            rep.push(
                "(h1) small-argument envelope",
                h1,
                "sampled on a log grid over (1e-8, s_low)",
            );
            let mut h2 = CheckStatus::SampledPass;
            for &t in log_grid(nl.s_up, 1e8, 400).iter() {
                if h.eval(t) > nl.c_up * t.powf(-theta) * (1.0 + 1e-12) {
                    h2 = CheckStatus::Fail;
                    break;
                }
            }
            rep.push(
                "(h2) large-argument envelope",
                h2,
                "sampled on a log grid over (s_up, 1e8)",
            );
            let _ = singular_at_zero;
        }
    }

    // (H)_f integrability flag
    if theta >= 1.0 {
        rep.push(
            "(H)_f integrability",
            CheckStatus::Pass,
            format!("theta = {theta} >= 1 allows m = 1; m = {m}"),
        );
    } else if m > 1.0 {
        rep.push(
            "(H)_f integrability",
            CheckStatus::Pass,
            format!("theta = {theta} < 1 and m = {m} > 1"),
        );
    } else {
        rep.push(
            "(H)_f integrability",
            CheckStatus::Fail,
            format!("theta = {theta} < 1 requires m > 1, got m = {m}"),
        );
    }

    // (g1) growth inequality, only binding for theta < 1
    if theta < 1.0 {
        if m > 1.0 {
            let bound = (1.0 - m * theta) / (m - 1.0);
            if nl.q >= bound - 1e-14 {
                rep.push(
                    "(g1) absorption growth",
                    CheckStatus::Pass,
                    format!("q = {} >= (1 - m theta)/(m - 1) = {bound}", nl.q),
                );
            } else {
                rep.push(
                    "(g1) absorption growth",
                    CheckStatus::Fail,
                    format!("q = {} < (1 - m theta)/(m - 1) = {bound}", nl.q),
                );
            }
        } else {
            rep.push(
                "(g1) absorption growth",
                CheckStatus::NotApplicable,
                "m <= 1 already fails (H)_f",
            );
        }
    } else {
        rep.push(
            "(g1) absorption growth",
            CheckStatus::NotApplicable,
            "theta >= 1",
        );
    }

    // f > 0 a.e. is only relevant for 1/2 < s < 1; waived in model mode.
    if spec.s > 0.5 {
        if nl.is_model() {
            rep.push(
                "f positive a.e. (s > 1/2)",
                CheckStatus::Waived,
                "model scheme does not need it",
            );
        } else {
            let status = match &spec.f {
                SourceSpec::Constant { value } if *value > 0.0 => CheckStatus::SampledPass,
                SourceSpec::Gaussian { amplitude, .. } if *amplitude > 0.0 => {
                    CheckStatus::SampledPass
                }
                SourceSpec::RadialPower { amplitude, .. } if *amplitude > 0.0 => {
                    CheckStatus::SampledPass
                }
                SourceSpec::Zero => CheckStatus::Fail,
                _ => CheckStatus::SampledPass,
            };
            rep.push(
                "f positive a.e. (s > 1/2)",
                status,
                "structural check of the source preset",
            );
        }
    } else {
        rep.push(
            "f positive a.e. (s > 1/2)",
            CheckStatus::NotApplicable,
            format!("s = {} <= 1/2", spec.s),
        );
    }

    // extra scalar helpers for the monotone scheme
    let monotone_ok = match &nl.mode {
        NonlinearityMode::Model => true,
        NonlinearityMode::Custom {
            g_nondecreasing,
            h_nonincreasing,
            ..
        } => *g_nondecreasing && *h_nonincreasing,
    };
    rep.push(
        "monotone g / nonincreasing h",
        if monotone_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        "",
    );
    if n_dim >= 3 {
        let crit = 2.0 * n_dim as f64 / (n_dim as f64 - 2.0) - 1.0;
        if nl.q <= crit + 1e-14 {
            rep.push(
                "subcritical growth q <= 2*-1",
                CheckStatus::Pass,
                format!("q = {} <= {crit}", nl.q),
            );
        } else {
            rep.push(
                "subcritical growth q <= 2*-1",
                CheckStatus::Fail,
                format!("q = {} > {crit}", nl.q),
            );
        }
    } else {
        rep.push(
            "subcritical growth q <= 2*-1",
            CheckStatus::NotApplicable,
            "every power is subcritical for n <= 2",
        );
    }

    rep
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummabilityCase {
    /// 1 < m < n/2
    SubcriticalLp,
    /// m > n/2
    Bounded,
    /// m = n/2
    Orlicz,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeReport {
    /// q_{gamma,m} = (1 - m gamma)/(m - 1), with the convention -1 for
    /// gamma = 1.
    pub q_threshold: f64,
    /// m_gamma = 2n / (n(gamma+1) - 2(1-gamma)).
    pub m_threshold: f64,
    pub case: SummabilityCase,
    /// Whether the L^p estimate is a true gain of integrability
    /// (m > m_gamma).
    pub genuine_gain: bool,
    /// p = n m (gamma+1)/(n - 2m), only in the subcritical case.
    pub p_exponent: Option<f64>,
}

pub fn classify_regime(gamma: f64, m: f64, n: usize, _q: f64) -> Result<RegimeReport> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutsideTheory(format!("gamma = {gamma} outside [0,1]")));
    }
    if m < 1.0 || n < 1 {
        return Err(Error::OutsideTheory(format!("need m >= 1 and n >= 1, got m = {m}, n = {n}")));
    }
    if m == 1.0 && gamma < 1.0 {
        return Err(Error::OutsideTheory(
            "m = 1 requires gamma = 1 (theta >= 1)".into(),
        ));
    }
    let nf = n as f64;
    let q_threshold = if gamma == 1.0 {
        -1.0
    } else {
        (1.0 - m * gamma) / (m - 1.0)
    };
    let m_threshold = 2.0 * nf / (nf * (gamma + 1.0) - 2.0 * (1.0 - gamma));
    let half_n = nf / 2.0;
    let (case, p_exponent) = if m > half_n {
        (SummabilityCase::Bounded, None)
    } else if m == half_n {
        (SummabilityCase::Orlicz, None)
    } else {
        (
            SummabilityCase::SubcriticalLp,
            Some(nf * m * (gamma + 1.0) / (nf - 2.0 * m)),
        )
    };
    Ok(RegimeReport {
        q_threshold,
        m_threshold,
        case,
        genuine_gain: m > m_threshold,
        p_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use approx::assert_relative_eq;

    #[test]
    fn truncations_exact() {
        assert_eq!(t_k(2.0, 3.0), 2.0);
        assert_eq!(t_k(2.0, -3.0), -2.0);
        assert_eq!(t_k(2.0, 1.0), 1.0);
        assert_eq!(g_k(1.0, 3.0), 2.0);
        assert_eq!(g_k(1.0, -3.0), -2.0);
        assert_eq!(g_k(1.0, 0.5), 0.0);
    }

    #[test]
    fn t_plus_g_is_identity() {
        for &s in &[-7.3, -1.0, -0.2, 0.0, 0.4, 1.0, 9.9] {
            for &k in &[0.5, 1.0, 3.0] {
                assert_relative_eq!(t_k(k, s) + g_k(k, s), s, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn cutoff_partition_of_unity() {
        assert_eq!(v_delta_k(1.0, 2.0, 1.5), 1.0);
        assert_eq!(v_delta_k(1.0, 2.0, 2.5), 0.5);
        assert_eq!(v_delta_k(1.0, 2.0, 4.0), 0.0);
        assert_eq!(s_delta_k(1.0, 2.0, 4.0), 1.0);
        for &s in &[0.0, 1.9, 2.0, 2.3, 3.0, 10.0] {
            let v = v_delta_k(1.0, 2.0, s);
            assert!((0.0..=1.0).contains(&v));
            assert_relative_eq!(v + s_delta_k(1.0, 2.0, s), 1.0);
        }
    }

    #[test]
    fn level_ramp_values() {
        assert_eq!(g_t_h(1.0, 0.5, 2.0), 0.5);
        assert_relative_eq!(g_t_h(1.0, 0.5, 1.2), 0.2, epsilon = 1e-15);
        assert_eq!(g_t_h(1.0, 0.5, 0.9), 0.0);
    }

    #[test]
    fn ramp_indicator_limit() {
        // (1/h) G_{t,h}(theta) -> 1_{theta > t} as h -> 0, theta != t
        let (t, theta) = (1.0, 1.3);
        let mut h = 0.5;
        for _ in 0..20 {
            h *= 0.5;
        }
        assert_relative_eq!(g_t_h(t, h, theta) / h, 1.0);
        assert_eq!(g_t_h(t, h, 0.7) / h, 0.0);
    }

    #[test]
    fn truncated_data_model() {
        let domain = Domain::interval(-1.0, 1.0);
        let grid = build_grid(&domain, 4).unwrap();
        let spec = ProblemSpec::model(
            domain,
            0.25,
            1.0,
            2.0,
            SourceSpec::Constant { value: 3.0 },
            2.0,
        );
        let data = build_truncated_data(&spec, &grid, 2, 5.0).unwrap();
        assert_eq!(data.f_n.values, vec![2.0, 2.0, 2.0]);
        assert_relative_eq!(data.absorption.eval(3.0), 5.0); // min(9, 5)
        assert_relative_eq!(data.absorption.eval(2.0), 4.0);
        assert_eq!(data.absorption.eval(-1.0), 0.0);
        // gamma = 1, n = 4: h_reg(0) = 4
        let spec1 = ProblemSpec::model(
            Domain::interval(-1.0, 1.0),
            0.25,
            1.0,
            2.0,
            SourceSpec::Zero,
            2.0,
        );
        let grid1 = build_grid(&spec1.domain, 4).unwrap();
        let d1 = build_truncated_data(&spec1, &grid1, 4, 5.0).unwrap();
        assert_relative_eq!(d1.singular.eval(0.0), 4.0);
    }

    #[test]
    fn model_monotonicity_of_regularizations() {
        let spec = NonlinearitySpec::model(0.5, 2.0);
        let reg = RegularizedSingular {
            spec: spec.clone(),
            n_level: 8,
            kind: SingularRegularization::Shift,
        };
        let abs = TruncatedAbsorption {
            spec,
            k_level: 50.0,
            disabled: false,
        };
        let mut prev_h = f64::INFINITY;
        let mut prev_g = -1.0;
        for i in 0..100 {
            let t = i as f64 * 0.1;
            let hv = reg.eval(t);
            let gv = abs.eval(t);
            assert!(hv <= prev_h + 1e-15);
            assert!(gv >= prev_g - 1e-15);
            prev_h = hv;
            prev_g = gv;
        }
    }

    #[test]
    fn hypothesis_examples() {
        // gamma = theta = 0.5, m = 2, q = 1 passes (g1)
        let spec = ProblemSpec::model(
            Domain::interval(-1.0, 1.0),
            0.25,
            0.5,
            1.0,
            SourceSpec::Constant { value: 1.0 },
            2.0,
        );
        let rep = validate_hypotheses(&spec);
        assert!(rep.ok(), "{rep:?}");

        // theta = 1 (gamma = 1 model), m = 1: allowed
        let spec = ProblemSpec::model(
            Domain::interval(-1.0, 1.0),
            0.25,
            1.0,
            1.0,
            SourceSpec::Constant { value: 1.0 },
            1.0,
        );
        assert!(validate_hypotheses(&spec).ok());

        // theta = 0.5, m = 1: fails (H)_f
        let spec = ProblemSpec::model(
            Domain::interval(-1.0, 1.0),
            0.25,
            0.5,
            1.0,
            SourceSpec::Constant { value: 1.0 },
            1.0,
        );
        let rep = validate_hypotheses(&spec);
        assert!(!rep.ok());
    }

    #[test]
    fn regime_examples() {
        let r = classify_regime(1.0, 2.0, 3, 1.0).unwrap();
        assert_eq!(r.q_threshold, -1.0);

        let r = classify_regime(0.5, 2.0, 5, 0.0).unwrap();
        assert_relative_eq!(r.q_threshold, 0.0);
        assert_relative_eq!(r.m_threshold, 10.0 / 6.5, epsilon = 1e-14);
        assert_eq!(r.case, SummabilityCase::SubcriticalLp);
        assert_relative_eq!(r.p_exponent.unwrap(), 15.0, epsilon = 1e-12);
        assert!(r.genuine_gain);

        let r = classify_regime(0.5, 2.0, 4, 0.0).unwrap();
        assert_eq!(r.case, SummabilityCase::Orlicz);
        assert!(r.p_exponent.is_none());

        assert!(classify_regime(0.5, 1.0, 3, 0.0).is_err());
    }
}
