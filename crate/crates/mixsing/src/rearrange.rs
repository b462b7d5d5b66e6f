//! Exact rearrangement calculus for piecewise-constant data.
//!
//! Grid functions are reinterpreted as cell functions (nodal value on a
//! cell of measure h^n, zero on the uncovered boundary strip), which makes
//! every identity here exact rather than quadrature-approximate.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Unit-ball volume omega_n = pi^{n/2} / Gamma(n/2 + 1).
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    std::f64::consts::PI.powf(half) / statrs::function::gamma::gamma(half + 1.0)
}

/// (value, measure) cell pairs of a grid function, padded with a zero cell
/// so the total measure is |Omega|.
pub fn grid_cells(u: &GridFunction) -> Vec<(f64, f64)> {
    let m = u.grid.cell_measure;
    let mut cells: Vec<(f64, f64)> = u.values.iter().map(|&v| (v, m)).collect();
    let covered = m * u.values.len() as f64;
    let rest = u.grid.domain.volume() - covered;
    if rest > 1e-15 {
        cells.push((0.0, rest));
    }
    cells
}

// ---------------------------------------------------------------------------
// Distribution function
// ---------------------------------------------------------------------------

/// Right-continuous nonincreasing step function mu(t) = |{ |u| > t }| on
/// t >= 0; `breaks[i]` is the left endpoint of the i-th plateau
/// (breaks[0] = 0) and mu = 0 for t >= max|u|.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.values[0];
        }
        match self
            .breaks
            .binary_search_by(|b| b.partial_cmp(&t).unwrap())
        {
            Ok(i) => self.values[i],
            Err(0) => self.values[0],
            Err(i) => self.values[i - 1],
        }
    }
}

/// mu_u from explicit (value, measure) pairs; values enter as |value|.
pub fn distribution_function(pairs: &[(f64, f64)]) -> Result<StepFunction> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &(v, m) in pairs {
        if !v.is_finite() || !(m > 0.0) {
            return Err(Error::DegenerateInput(format!(
                "bad (value, measure) pair ({v}, {m})"
            )));
        }
    }
    let mut sorted: Vec<(f64, f64)> = pairs.iter().map(|&(v, m)| (v.abs(), m)).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = sorted.iter().map(|&(_, m)| m).sum();
    // Sweep levels upward: mu drops by the measure at each distinct value.
    let mut breaks = vec![0.0];
    let mut values = vec![total];
    let mut remaining = total;
    let mut i = 0;
    while i < sorted.len() {
        let level = sorted[i].0;
        let mut drop = 0.0;
        while i < sorted.len() && sorted[i].0 == level {
            drop += sorted[i].1;
            i += 1;
        }
        remaining -= drop;
        if level > 0.0 {
            breaks.push(level);
            values.push(remaining.max(0.0));
        } else {
            // value 0 never exceeds any t >= 0
            values[0] = remaining.max(0.0);
        }
    }
    Ok(StepFunction { breaks, values })
}

pub fn grid_distribution_function(u: &GridFunction) -> Result<StepFunction> {
    distribution_function(&grid_cells(u))
}

// ---------------------------------------------------------------------------
// Decreasing rearrangement
// ---------------------------------------------------------------------------

/// Piecewise-constant nonincreasing profile on the measure axis
/// (0, total_measure); plateau i lives on (breaks[i], breaks[i+1]).
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedProfile {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
    pub total_measure: f64,
}

impl RearrangedProfile {
    /// Builds from plateau data, merging equal-value neighbors.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>, total_measure: f64) -> Result<Self> {
        if values.is_empty() || breaks.len() != values.len() + 1 {
            return Err(Error::DegenerateInput("malformed profile".into()));
        }
        let mut mb = vec![breaks[0]];
        let mut mv: Vec<f64> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            match mv.last() {
                Some(&last) if last == v => *mb.last_mut().unwrap() = breaks[i + 1],
                _ => {
                    mv.push(v);
                    mb.push(breaks[i + 1]);
                }
            }
        }
        Ok(RearrangedProfile {
            breaks: mb,
            values: mv,
            total_measure,
        })
    }

    /// Right-continuous evaluation; s <= 0 returns u*(0+), s beyond the
    /// covered range returns 0.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.breaks[0] {
            return self.values[0];
        }
        for i in 0..self.values.len() {
            if s < self.breaks[i + 1] {
                return self.values[i];
            }
        }
        0.0
    }

    pub fn sup(&self) -> f64 {
        self.values[0]
    }

    /// Applies a monotone nondecreasing map to the values.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> RearrangedProfile {
        RearrangedProfile::new(
            self.breaks.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
            self.total_measure,
        )
        .expect("shape preserved")
    }

    /// Exact integral of the profile over (0, total_measure).
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * (self.breaks[i + 1] - self.breaks[i]))
            .sum()
    }

    /// Serializes as CSV rows (left plateau endpoint, value).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# mixsing profile v1, volume={:.17e}", self.total_measure)?;
        for (i, &v) in self.values.iter().enumerate() {
            writeln!(w, "{:.17e},{v:.17e}", self.breaks[i])?;
        }
        writeln!(w, "{:.17e},0", self.breaks[self.values.len()])?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut volume = None;
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                if let Some(v) = rest.split("volume=").nth(1) {
                    volume = Some(v.trim().parse::<f64>().map_err(|e| {
                        Error::Config(format!("bad profile volume: {e}"))
                    })?);
                }
                continue;
            }
            let mut cols = t.split(',');
            let s: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Config("bad profile row".into()))?;
            let v: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Config("bad profile row".into()))?;
            breaks.push(s);
            values.push(v);
        }
        let volume = volume.ok_or_else(|| Error::Config("missing profile header".into()))?;
        if breaks.len() < 2 {
            return Err(Error::EmptyInput);
        }
        values.pop(); // last row is the closing breakpoint
        RearrangedProfile::new(breaks, values, volume)
    }
}

/// u* from explicit (value, measure) pairs on a space of measure
/// `total_measure` (pairs may undercover; the gap is a zero plateau).
pub fn decreasing_rearrangement(
    pairs: &[(f64, f64)],
    total_measure: f64,
) -> Result<RearrangedProfile> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let covered: f64 = pairs.iter().map(|&(_, m)| m).sum();
    if covered > total_measure * (1.0 + 1e-12) {
        return Err(Error::MeasureMismatch(format!(
            "cells cover {covered} > total measure {total_measure}"
        )));
    }
    let mut sorted: Vec<(f64, f64)> = pairs.iter().map(|&(v, m)| (v.abs(), m)).collect();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut breaks = vec![0.0];
    let mut values = Vec::new();
    let mut s = 0.0;
    for &(v, m) in &sorted {
        s += m;
        values.push(v);
        breaks.push(s);
    }
    if s < total_measure * (1.0 - 1e-12) {
        values.push(0.0);
        breaks.push(total_measure);
    } else {
        *breaks.last_mut().unwrap() = total_measure;
    }
    RearrangedProfile::new(breaks, values, total_measure)
}

pub fn grid_rearrangement(u: &GridFunction) -> Result<RearrangedProfile> {
    decreasing_rearrangement(&grid_cells(u), u.grid.domain.volume())
}

// ---------------------------------------------------------------------------
// Schwarz rearrangement
// ---------------------------------------------------------------------------

/// Radial sampler u_sharp(x) = u*(omega_n |x|^n) on the ball of volume
/// total_measure.
#[derive(Debug, Clone)]
pub struct SchwarzFn {
    pub profile: Arc<RearrangedProfile>,
    pub n: usize,
    pub omega_n: f64,
}

impl SchwarzFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|&c| c * c).sum();
        self.eval_radius(r2.sqrt())
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        self.profile.eval(self.omega_n * r.powi(self.n as i32))
    }

    /// Radius of the symmetrized ball Omega_sharp.
    pub fn ball_radius(&self) -> f64 {
        (self.profile.total_measure / self.omega_n).powf(1.0 / self.n as f64)
    }
}

pub fn schwarz_rearrangement(profile: RearrangedProfile, n: usize) -> SchwarzFn {
    SchwarzFn {
        omega_n: unit_ball_volume(n),
        profile: Arc::new(profile),
        n,
    }
}

// ---------------------------------------------------------------------------
// Hardy-Littlewood and L^p norms
// ---------------------------------------------------------------------------

/// Exact integral of the product of two staircase profiles over the
/// measure axis (union of breakpoints).
pub fn profile_product_integral(a: &RearrangedProfile, b: &RearrangedProfile) -> f64 {
    let mut cuts: Vec<f64> = a.breaks.iter().chain(b.breaks.iter()).cloned().collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        total += a.eval(mid) * b.eval(mid) * (w[1] - w[0]);
    }
    total
}

/// int u*v* - int |uv| over paired cells; >= 0 (Hardy-Littlewood).
/// The two inputs must share the cell measure structure.
pub fn hardy_littlewood_gap(
    u: &[(f64, f64)],
    v: &[(f64, f64)],
    total_measure: f64,
) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::MeasureMismatch(
            "cell counts differ between factors".into(),
        ));
    }
    let mut plain = 0.0;
    for (&(uv, um), &(vv, vm)) in u.iter().zip(v) {
        if (um - vm).abs() > 1e-12 * um.max(vm) {
            return Err(Error::MeasureMismatch(
                "cell measures differ between factors".into(),
            ));
        }
        plain += (uv * vv).abs() * um;
    }
    let us = decreasing_rearrangement(u, total_measure)?;
    let vs = decreasing_rearrangement(v, total_measure)?;
    Ok(profile_product_integral(&us, &vs) - plain)
}

/// ||u*||_{L^p(0,|Omega|)}, exact for staircases; p = infinity returns
/// u*(0+).
pub fn profile_lp_norm(profile: &RearrangedProfile, p: f64) -> Result<f64> {
    if p.is_infinite() {
        return Ok(profile.sup());
    }
    if p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let total: f64 = profile
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v.abs().powf(p) * (profile.breaks[i + 1] - profile.breaks[i]))
        .sum();
    Ok(total.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, sample_function, Domain};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    const PAIRS: [(f64, f64); 2] = [(3.0, 0.2), (1.0, 0.3)];

    #[test]
    fn distribution_counting_example() {
        let mu = distribution_function(&PAIRS).unwrap();
        assert_relative_eq!(mu.eval(0.0), 0.5);
        assert_relative_eq!(mu.eval(0.99), 0.5);
        assert_relative_eq!(mu.eval(1.0), 0.2);
        assert_relative_eq!(mu.eval(2.5), 0.2);
        assert_relative_eq!(mu.eval(3.0), 0.0);
        assert_relative_eq!(mu.eval(10.0), 0.0);
    }

    #[test]
    fn distribution_of_tent() {
        // u = 1 - |x| on (-1,1): |{u > 1/2}| = 1
        for n in [64usize, 256] {
            let g = build_grid(&Domain::interval(-1.0, 1.0), n).unwrap();
            let u = sample_function(&g, |x| 1.0 - x[0].abs(), true).unwrap();
            let mu = grid_distribution_function(&u).unwrap();
            assert!((mu.eval(0.5) - 1.0).abs() <= g.spacing + 1e-12);
        }
    }

    #[test]
    fn distribution_of_zero() {
        let mu = distribution_function(&[(0.0, 1.0), (0.0, 0.5)]).unwrap();
        assert_eq!(mu.eval(0.0), 0.0);
        assert_eq!(mu.eval(1.0), 0.0);
    }

    #[test]
    fn rearrangement_counting_example() {
        let p = decreasing_rearrangement(&PAIRS, 0.5).unwrap();
        assert_relative_eq!(p.eval(0.1), 3.0);
        assert_relative_eq!(p.eval(0.3), 1.0);
        assert_eq!(p.total_measure, 0.5);
    }

    #[test]
    fn rearrangement_of_constant() {
        let p = decreasing_rearrangement(&[(2.5, 1.0), (2.5, 0.7)], 1.7).unwrap();
        assert_eq!(p.values, vec![2.5]);
        assert_relative_eq!(p.eval(1.0), 2.5);
    }

    #[test]
    fn shift_property() {
        // (u+c)* = u* + c on cells of a common measure space
        let c = 1.7;
        let cells = [(0.4, 0.3), (2.0, 0.2), (1.1, 0.5)];
        let shifted: Vec<(f64, f64)> = cells.iter().map(|&(v, m)| (v + c, m)).collect();
        let p = decreasing_rearrangement(&cells, 1.0).unwrap();
        let ps = decreasing_rearrangement(&shifted, 1.0).unwrap();
        for &s in &[0.05, 0.25, 0.6, 0.9] {
            assert_relative_eq!(ps.eval(s), p.eval(s) + c, epsilon = 1e-14);
        }
    }

    #[test]
    fn equimeasurability_exact() {
        let cells = [(0.4, 0.3), (2.0, 0.2), (1.1, 0.5), (2.0, 0.1)];
        let mu = distribution_function(&cells).unwrap();
        let p = decreasing_rearrangement(&cells, 1.1).unwrap();
        // distribution of the profile (as cells) equals mu
        let profile_cells: Vec<(f64, f64)> = p
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, p.breaks[i + 1] - p.breaks[i]))
            .filter(|&(_, m)| m > 0.0)
            .collect();
        let mu2 = distribution_function(&profile_cells).unwrap();
        for &t in &[0.0, 0.3, 0.4, 1.0, 1.1, 1.9, 2.0, 3.0] {
            assert_relative_eq!(mu.eval(t), mu2.eval(t), epsilon = 1e-14);
        }
    }

    #[test]
    fn schwarz_tent() {
        // n=1, u*(s) = 1 - s/2 on (0,2) approximated by a fine staircase
        let k = 4000;
        let breaks: Vec<f64> = (0..=k).map(|i| 2.0 * i as f64 / k as f64).collect();
        let values: Vec<f64> = (0..k).map(|i| 1.0 - breaks[i] / 2.0).collect();
        let p = RearrangedProfile::new(breaks, values, 2.0).unwrap();
        let sharp = schwarz_rearrangement(p, 1);
        assert_relative_eq!(sharp.omega_n, 2.0, epsilon = 1e-14);
        for &x in &[0.0, 0.3, 0.7, 0.95] {
            assert!((sharp.eval(&[x]) - (1.0 - x)).abs() < 2.0 / k as f64 + 1e-12);
        }
        assert_relative_eq!(sharp.eval(&[0.0]), sharp.profile.sup());
    }

    #[test]
    fn schwarz_disc_indicator() {
        let p = RearrangedProfile::new(
            vec![0.0, std::f64::consts::PI],
            vec![1.0],
            std::f64::consts::PI,
        )
        .unwrap();
        let sharp = schwarz_rearrangement(p, 2);
        assert_relative_eq!(sharp.omega_n, std::f64::consts::PI, epsilon = 1e-14);
        assert_eq!(sharp.eval(&[0.5, 0.5]), 1.0); // |x| < 1
        assert_eq!(sharp.eval(&[1.2, 0.0]), 0.0);
        assert_relative_eq!(sharp.ball_radius(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0, epsilon = 1e-13);
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI, epsilon = 1e-13);
        assert_relative_eq!(
            unit_ball_volume(3),
            4.0 / 3.0 * std::f64::consts::PI,
            epsilon = 1e-13
        );
    }

    #[test]
    fn hardy_littlewood_cases() {
        // equality for v = u
        let cells = [(0.4, 0.3), (2.0, 0.2), (1.1, 0.5)];
        let gap = hardy_littlewood_gap(&cells, &cells, 1.0).unwrap();
        assert_relative_eq!(gap, 0.0, epsilon = 1e-13);

        // disjoint indicators on (-1,1)
        let u = [(1.0, 1.0), (0.0, 1.0)];
        let v = [(0.0, 1.0), (1.0, 1.0)];
        let gap = hardy_littlewood_gap(&u, &v, 2.0).unwrap();
        assert_relative_eq!(gap, 1.0, epsilon = 1e-13);

        // random 20-cell pairs
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u: Vec<(f64, f64)> = (0..20).map(|_| (rng.gen::<f64>() * 3.0, 0.1)).collect();
            let v: Vec<(f64, f64)> = (0..20).map(|_| (rng.gen::<f64>() * 3.0, 0.1)).collect();
            let gap = hardy_littlewood_gap(&u, &v, 2.0).unwrap();
            assert!(gap >= -1e-12, "gap {gap}");
        }
    }

    #[test]
    fn lp_norm_examples() {
        let p = decreasing_rearrangement(&PAIRS, 0.5).unwrap();
        assert_relative_eq!(profile_lp_norm(&p, 1.0).unwrap(), 0.9, epsilon = 1e-14);
        assert_relative_eq!(
            profile_lp_norm(&p, 2.0).unwrap(),
            2.1f64.sqrt(),
            epsilon = 1e-14
        );
        assert_relative_eq!(profile_lp_norm(&p, f64::INFINITY).unwrap(), 3.0);
        assert!(matches!(
            profile_lp_norm(&p, 0.5),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn norm_preservation_on_cells() {
        let cells = [(0.4, 0.3), (2.0, 0.2), (1.1, 0.5), (2.0, 0.1)];
        let prof = decreasing_rearrangement(&cells, 1.1).unwrap();
        for &p in &[1.0, 2.0, 5.0] {
            let direct: f64 = cells
                .iter()
                .map(|&(v, m)| v.abs().powf(p) * m)
                .sum::<f64>()
                .powf(1.0 / p);
            assert_relative_eq!(profile_lp_norm(&prof, p).unwrap(), direct, epsilon = 1e-13);
        }
        let sup = cells.iter().map(|&(v, _)| v).fold(0.0, f64::max);
        assert_relative_eq!(profile_lp_norm(&prof, f64::INFINITY).unwrap(), sup);
    }

    #[test]
    fn order_preservation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let u: Vec<(f64, f64)> = (0..15).map(|_| (rng.gen::<f64>(), 0.1)).collect();
            let v: Vec<(f64, f64)> = u
                .iter()
                .map(|&(x, m)| (x + rng.gen::<f64>(), m))
                .collect();
            let pu = decreasing_rearrangement(&u, 1.5).unwrap();
            let pv = decreasing_rearrangement(&v, 1.5).unwrap();
            for i in 0..40 {
                let s = 1.5 * (i as f64 + 0.5) / 40.0;
                assert!(pu.eval(s) <= pv.eval(s) + 1e-13);
            }
        }
    }

    #[test]
    fn contraction_property() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let u: Vec<(f64, f64)> = (0..15).map(|_| (rng.gen::<f64>() * 2.0, 0.1)).collect();
            let v: Vec<(f64, f64)> = (0..15).map(|_| (rng.gen::<f64>() * 2.0, 0.1)).collect();
            let pu = decreasing_rearrangement(&u, 1.5).unwrap();
            let pv = decreasing_rearrangement(&v, 1.5).unwrap();
            for &p in &[1.0, 2.0] {
                let cellwise: f64 = u
                    .iter()
                    .zip(&v)
                    .map(|(&(a, m), &(b, _))| (a - b).abs().powf(p) * m)
                    .sum::<f64>()
                    .powf(1.0 / p);
                // integrate |u* - v*|^p over merged breakpoints
                let mut cuts: Vec<f64> =
                    pu.breaks.iter().chain(pv.breaks.iter()).cloned().collect();
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.dedup();
                let star: f64 = cuts
                    .windows(2)
                    .map(|w| {
                        let mid = 0.5 * (w[0] + w[1]);
                        (pu.eval(mid) - pv.eval(mid)).abs().powf(p) * (w[1] - w[0])
                    })
                    .sum::<f64>()
                    .powf(1.0 / p);
                assert!(star <= cellwise + 1e-12, "p={p}: {star} > {cellwise}");
            }
        }
    }

    #[test]
    fn profile_csv_round_trip() {
        let p = decreasing_rearrangement(&PAIRS, 0.7).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = RearrangedProfile::read_csv(&buf[..]).unwrap();
        assert_eq!(back.total_measure, 0.7);
        for &s in &[0.05, 0.3, 0.6] {
            assert_relative_eq!(back.eval(s), p.eval(s));
        }
    }

    #[test]
    fn grid_padding_reaches_volume() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 8).unwrap();
        let u = sample_function(&g, |_| 1.0, true).unwrap();
        let p = grid_rearrangement(&u).unwrap();
        assert_relative_eq!(p.total_measure, 2.0);
        assert_relative_eq!(*p.breaks.last().unwrap(), 2.0);
        assert_relative_eq!(p.integral(), 7.0 * 0.25, epsilon = 1e-14);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(distribution_function(&[]), Err(Error::EmptyInput)));
        assert!(matches!(
            decreasing_rearrangement(&[], 1.0),
            Err(Error::EmptyInput)
        ));
    }
}
