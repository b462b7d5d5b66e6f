//! Radial comparison profile, pointwise comparison checks and the
//! explicit summability bounds with their Gamma-function constants.
//!
//! All profile integrals are evaluated with exact piecewise power-function
//! antiderivatives (log case at n = 2); the r^{2/n-1} behavior near 0 is
//! handled analytically, never by sampling.

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::data::SummabilityCase;
use crate::error::{Error, Result};
use crate::rearrange::{unit_ball_volume, RearrangedProfile};

/// 1 / (n^2 omega_n^{2/n}).
pub fn radial_prefactor(n: usize) -> f64 {
    let nf = n as f64;
    1.0 / (nf * nf * unit_ball_volume(n).powf(2.0 / nf))
}

/// Exact integral of r^{2/n - 2} F(r) over (tau, V), where
/// F(r) = int_0^r f*(sigma) d sigma is piecewise linear.
fn tail_integral(f_star: &RearrangedProfile, n: usize, tau: f64) -> f64 {
    let alpha = 2.0 / n as f64 - 2.0;
    let v = f_star.total_measure;
    let mut total = 0.0;
    let mut f_cum = 0.0;
    for (i, &c) in f_star.values.iter().enumerate() {
        let (s_lo, s_hi) = (f_star.breaks[i], f_star.breaks[i + 1]);
        let piece_len = s_hi - s_lo;
        let lo = s_lo.max(tau);
        let hi = s_hi.min(v);
        if hi > lo {
            // F(r) = a + c r on the piece, with a = F(s_lo) - c s_lo
            let a = f_cum - c * s_lo;
            let mut inc = 0.0;
            if a != 0.0 {
                inc += if n == 2 {
                    a * (hi.ln() - lo.ln())
                } else {
                    a * (hi.powf(alpha + 1.0) - lo.powf(alpha + 1.0)) / (alpha + 1.0)
                };
            }
            if c != 0.0 {
                inc += c * (hi.powf(alpha + 2.0) - lo.powf(alpha + 2.0)) / (alpha + 2.0);
            }
            total += inc;
        }
        f_cum += c * piece_len;
    }
    total
}

/// tau grid for resampling: all profile breakpoints plus a geometric
/// refinement near tau = 0 (ratio 1/2 down to 1e-8 V).
fn tau_grid(breaks: &[&[f64]], volume: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = breaks.iter().flat_map(|b| b.iter().cloned()).collect();
    let mut t = volume / 2.0;
    while t > 1e-8 * volume {
        grid.push(t);
        t /= 2.0;
    }
    grid.push(0.0);
    grid.push(volume);
    grid.retain(|&x| (0.0..=volume).contains(&x));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * volume);
    grid
}

/// v*(tau) of the symmetrized local comparison problem -Delta v = f_sharp,
/// as an exact-at-breakpoints staircase (left-endpoint values, hence a
/// pointwise upper staircase for the decreasing v*).
pub fn comparison_profile(
    f_star: &RearrangedProfile,
    n: usize,
    volume: f64,
) -> Result<RearrangedProfile> {
    if (f_star.total_measure - volume).abs() > 1e-9 * volume.max(1.0) {
        return Err(Error::MeasureMismatch(format!(
            "profile measure {} != volume {volume}",
            f_star.total_measure
        )));
    }
    if f_star.values.iter().any(|&c| c < 0.0) {
        return Err(Error::DegenerateInput("negative source profile".into()));
    }
    let k = radial_prefactor(n);
    let grid = tau_grid(&[&f_star.breaks], volume);
    let mut values: Vec<f64> = grid[..grid.len() - 1]
        .iter()
        .map(|&tau| k * tail_integral(f_star, n, tau))
        .collect();
    // kill roundoff wiggles: v* is exactly nonincreasing
    for i in 1..values.len() {
        if values[i] > values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    RearrangedProfile::new(grid, values, volume)
}

// ---------------------------------------------------------------------------
// Pointwise comparison
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub tau: Vec<f64>,
    pub u_star: Vec<f64>,
    pub bound: Vec<f64>,
    /// min over tau of U - u*, U = ((gamma+1) v*)^{1/(gamma+1)}.
    pub min_margin: f64,
    /// signed integral of U - u* over (0, |Omega|).
    pub integrated_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ComparisonReport {
    /// CSV rows (tau, u*, U_bound, margin) for plotting.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# mixsing comparison v1")?;
        writeln!(w, "# tau,u_star,bound,margin")?;
        for i in 0..self.tau.len() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                self.tau[i],
                self.u_star[i],
                self.bound[i],
                self.bound[i] - self.u_star[i]
            )?;
        }
        Ok(())
    }
}

/// Checks u*(tau) <= ((gamma+1) v*(tau))^{1/(gamma+1)} on the union of
/// breakpoints; pass iff min_margin >= -tol.
pub fn talenti_margin(
    u_star: &RearrangedProfile,
    v_star: &RearrangedProfile,
    gamma: f64,
    tol: f64,
) -> Result<ComparisonReport> {
    if (u_star.total_measure - v_star.total_measure).abs()
        > 1e-9 * v_star.total_measure.max(1.0)
    {
        return Err(Error::MeasureMismatch(
            "profiles have different total measure".into(),
        ));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutsideTheory(format!("gamma = {gamma}")));
    }
    let volume = v_star.total_measure;
    let grid = tau_grid(&[&u_star.breaks, &v_star.breaks], volume);
    let expo = 1.0 / (gamma + 1.0);
    let mut us = Vec::with_capacity(grid.len());
    let mut bs = Vec::with_capacity(grid.len());
    let mut min_margin = f64::INFINITY;
    let mut integrated = 0.0;
    for (i, &tau) in grid.iter().enumerate() {
        let uv = u_star.eval(tau);
        let bv = ((gamma + 1.0) * v_star.eval(tau)).powf(expo);
        us.push(uv);
        bs.push(bv);
        if i + 1 < grid.len() {
            min_margin = min_margin.min(bv - uv);
            integrated += (bv - uv) * (grid[i + 1] - tau);
        }
    }
    Ok(ComparisonReport {
        tau: grid,
        u_star: us,
        bound: bs,
        min_margin,
        integrated_margin: integrated,
        tolerance: tol,
        pass: min_margin >= -tol,
    })
}

/// Integrated level-set inequality: min over tau of
/// ((gamma+1)/(n^2 omega_n^{2/n})) int_tau^{|Omega|} r^{2/n-2} F(r) dr
///   - u*(tau)^{gamma+1}.
pub fn levelset_inequality_check(
    u_star: &RearrangedProfile,
    f_star: &RearrangedProfile,
    gamma: f64,
    n: usize,
) -> f64 {
    let volume = f_star.total_measure;
    let k = (gamma + 1.0) * radial_prefactor(n);
    let grid = tau_grid(&[&u_star.breaks, &f_star.breaks], volume);
    let mut min_margin = f64::INFINITY;
    for &tau in &grid {
        let rhs = k * tail_integral(f_star, n, tau);
        let lhs = u_star.eval(tau).powf(gamma + 1.0);
        min_margin = min_margin.min(rhs - lhs);
    }
    min_margin
}

// ---------------------------------------------------------------------------
// Explicit constants
// ---------------------------------------------------------------------------

/// Bliss constant
/// C = (n(m-1)/(n-2m))^{n(m-1)/(n-2m)}
///   * (Gamma(n/2) / (Gamma(n/2m) Gamma(n(m-1)/(2m)+1)))^{2m/(n-2m)}.
pub fn bliss_constant(n: usize, m: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 3 || m <= 1.0 || m >= nf / 2.0 {
        return Err(Error::OutOfCase(format!(
            "Bliss constant needs n >= 3 and 1 < m < n/2, got n = {n}, m = {m}"
        )));
    }
    let a = nf * (m - 1.0) / (nf - 2.0 * m);
    let g = gamma(nf / 2.0) / (gamma(nf / (2.0 * m)) * gamma(nf * (m - 1.0) / (2.0 * m) + 1.0));
    Ok(a.powf(a) * g.powf(2.0 * m / (nf - 2.0 * m)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsBreakdown {
    pub omega_n: f64,
    /// (gamma+1)/(n^2 omega_n^{2/n})
    pub prefactor: f64,
    pub bliss_constant: Option<f64>,
    /// Case-(ii) Hardy/Hoelder bracket m/(m-1) (n(m-1)/(2m-n))^{(m-1)/m}.
    pub hardy_factor: Option<f64>,
    pub gamma_evals: Vec<(String, f64)>,
    /// Case-(i) rhs in its commonly displayed form; the report's
    /// rhs_value uses the proof-chain exponents (the two disagree, see
    /// README); emitted for transparency.
    pub statement_rhs: Option<f64>,
    /// Case-(i) rhs multiplied by the Hardy factor (m/(m-1))^{1/(gamma+1)}
    /// missing from the proof's last step (the step identifies the L^m
    /// norm of the running average of f* with the L^m norm of f*, which
    /// in general costs exactly this factor); this corrected value is the
    /// one that provably dominates the profile calculus.
    pub hardy_corrected_rhs: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub case: SummabilityCase,
    pub p: Option<f64>,
    pub rhs_value: f64,
    pub lhs_value: Option<f64>,
    pub pass: Option<bool>,
    pub constants: ConstantsBreakdown,
}

impl BoundReport {
    /// Attaches the measured left-hand side and decides pass/fail.
    pub fn with_lhs(mut self, lhs: f64) -> Self {
        self.lhs_value = Some(lhs);
        self.pass = Some(lhs <= self.rhs_value);
        self
    }
}

/// Evaluates the explicit right-hand sides of the three summability
/// estimates for the model problem.
pub fn summability_bounds(
    n: usize,
    m: f64,
    gamma_exp: f64,
    volume: f64,
    f_norm_m: f64,
) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&gamma_exp) || !(f_norm_m > 0.0) || !(volume > 0.0) {
        return Err(Error::OutOfCase(format!(
            "need gamma in [0,1], volume > 0, f_norm > 0 (gamma = {gamma_exp})"
        )));
    }
    let nf = n as f64;
    let omega_n = unit_ball_volume(n);
    let pre = (gamma_exp + 1.0) * radial_prefactor(n);
    let expo = 1.0 / (gamma_exp + 1.0);

    if m > nf / 2.0 {
        // case (ii): L^infinity bound
        if m <= 1.0 {
            return Err(Error::OutOfCase(format!("case ii needs m > 1, got {m}")));
        }
        let hardy = m / (m - 1.0) * (nf * (m - 1.0) / (2.0 * m - nf)).powf((m - 1.0) / m);
        let rhs =
            (pre * hardy * volume.powf((2.0 * m - nf) / (nf * m)) * f_norm_m).powf(expo);
        return Ok(BoundReport {
            case: SummabilityCase::Bounded,
            p: None,
            rhs_value: rhs,
            lhs_value: None,
            pass: None,
            constants: ConstantsBreakdown {
                omega_n,
                prefactor: pre,
                bliss_constant: None,
                hardy_factor: Some(hardy),
                gamma_evals: vec![(format!("Gamma({}/2+1)", n), gamma(nf / 2.0 + 1.0))],
                statement_rhs: None,
                hardy_corrected_rhs: None,
            },
        });
    }
    if m == nf / 2.0 {
        // case (iii): Orlicz bound
        if n < 3 {
            return Err(Error::OutOfCase(format!(
                "case iii needs n >= 3, got n = {n}"
            )));
        }
        let m_half = nf / 2.0;
        let rhs = pre.powf(expo) * f_norm_m.powf(expo);
        return Ok(BoundReport {
            case: SummabilityCase::Orlicz,
            p: None,
            rhs_value: rhs,
            lhs_value: None,
            pass: None,
            constants: ConstantsBreakdown {
                omega_n,
                prefactor: pre,
                bliss_constant: None,
                hardy_factor: None,
                gamma_evals: vec![(format!("Gamma({}/2+1)", n), gamma(nf / 2.0 + 1.0))],
                statement_rhs: None,
                hardy_corrected_rhs: Some(
                    rhs * (m_half / (m_half - 1.0)).powf(expo),
                ),
            },
        });
    }
    // case (i): 1 < m < n/2
    if m <= 1.0 {
        return Err(Error::OutOfCase(format!("case i needs m > 1, got {m}")));
    }
    let c_bliss = bliss_constant(n, m)?;
    let p = nf * m * (gamma_exp + 1.0) / (nf - 2.0 * m);
    let rhs = pre.powf(expo) * c_bliss.powf(1.0 / p) * f_norm_m.powf(expo);
    // statement display (different exponents on the first two factors)
    let bracket = nf * (m - 1.0) / (nf - 2.0 * m);
    let g_ratio = gamma(nf / 2.0)
        / (gamma(nf / (2.0 * m)) * gamma((nf * m - nf + 2.0 * m) / (2.0 * m)));
    let statement = pre.powf(gamma_exp + 1.0)
        * bracket.powf((p - 1.0) / (p * (gamma_exp + 1.0)))
        * g_ratio.powf(2.0 / (nf * (gamma_exp + 1.0)))
        * f_norm_m.powf(expo);
    Ok(BoundReport {
        case: SummabilityCase::SubcriticalLp,
        p: Some(p),
        rhs_value: rhs,
        lhs_value: None,
        pass: None,
        constants: ConstantsBreakdown {
            omega_n,
            prefactor: pre,
            bliss_constant: Some(c_bliss),
            hardy_factor: None,
            gamma_evals: vec![
                (format!("Gamma({nf}/2)"), gamma(nf / 2.0)),
                (format!("Gamma({nf}/(2*{m}))"), gamma(nf / (2.0 * m))),
                (
                    format!("Gamma({nf}({m}-1)/(2*{m})+1)"),
                    gamma(nf * (m - 1.0) / (2.0 * m) + 1.0),
                ),
            ],
            statement_rhs: Some(statement),
            hardy_corrected_rhs: Some(rhs * (m / (m - 1.0)).powf(expo)),
        },
    })
}

// ---------------------------------------------------------------------------
// Orlicz supremum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct OrliczSup {
    pub sup: f64,
    /// Set when u* stays positive up to |Omega| so the true sup diverges;
    /// sup is then reported over s <= (1 - 1e-6)|Omega|.
    pub diverged: bool,
}

/// sup over plateau left endpoints of u*(s) / (log(|Omega|/s))^{(n-2)/(n(gamma+1))}.
pub fn orlicz_sup(
    u_star: &RearrangedProfile,
    n: usize,
    gamma_exp: f64,
    volume: f64,
) -> Result<OrliczSup> {
    if n < 3 {
        return Err(Error::OutOfCase(format!(
            "Orlicz exponent degenerates for n = {n} < 3"
        )));
    }
    let e = (n as f64 - 2.0) / (n as f64 * (gamma_exp + 1.0));
    let cap = (1.0 - 1e-6) * volume;
    let ratio = |s: f64| -> f64 {
        if s <= 0.0 {
            0.0 // log(V/s) -> infinity, u* bounded
        } else {
            u_star.eval(s) / (volume / s).ln().powf(e)
        }
    };
    let mut sup = 0.0f64;
    for &s in &u_star.breaks {
        if s < cap {
            sup = sup.max(ratio(s));
        }
    }
    let diverged = u_star.eval(cap) > 0.0;
    if diverged {
        sup = sup.max(ratio(cap));
    }
    Ok(OrliczSup { sup, diverged })
}
