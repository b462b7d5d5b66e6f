//! Bounded domains, uniform grids and nodal grid functions.
//!
//! Grid functions are nodal values on the interior nodes only; the
//! represented function is identically zero on the boundary and on the
//! whole exterior of the domain.

use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded domain, or a pure measure-space descriptor for
/// rearrangement-only workflows in arbitrary dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { ax: f64, bx: f64, ay: f64, by: f64 },
    MeasureOnly { n: usize, volume: f64 },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Self {
        Domain::Interval { a, b }
    }

    pub fn rectangle(ax: f64, bx: f64, ay: f64, by: f64) -> Self {
        Domain::Rectangle { ax, bx, ay, by }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
            Domain::MeasureOnly { n, .. } => *n,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { ax, bx, ay, by } => (bx - ax) * (by - ay),
            Domain::MeasureOnly { volume, .. } => *volume,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Interval { a, b } => {
                if !(b > a) {
                    return Err(Error::UnsupportedDomain(format!(
                        "interval ({a}, {b}) has nonpositive length"
                    )));
                }
            }
            Domain::Rectangle { ax, bx, ay, by } => {
                if !(bx > ax && by > ay) {
                    return Err(Error::UnsupportedDomain(
                        "rectangle has nonpositive side length".into(),
                    ));
                }
            }
            Domain::MeasureOnly { n, volume } => {
                if *n < 1 {
                    return Err(Error::UnsupportedDomain("MeasureOnly needs n >= 1".into()));
                }
                if !(*volume > 0.0) {
                    return Err(Error::UnsupportedDomain(
                        "MeasureOnly needs volume > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Uniform discretization of an interval or rectangle.
///
/// Interior nodes exclude the boundary (homogeneous exterior condition);
/// ordering is lexicographic in the coordinates and stable across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub domain: Domain,
    /// Subdivisions per axis.
    pub subdivisions: usize,
    /// Mesh spacing (same along every axis).
    pub spacing: f64,
    /// Interior node coordinates, lexicographic order.
    pub interior_nodes: Vec<Vec<f64>>,
    /// h^n, the measure attached to each interior node.
    pub cell_measure: f64,
}

impl Grid {
    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn node_count(&self) -> usize {
        self.interior_nodes.len()
    }

    /// Interior nodes per axis ((N-1) for both supported kinds).
    pub fn nodes_per_axis(&self) -> usize {
        self.subdivisions - 1
    }
}

/// Builds the uniform grid with `n_sub` subdivisions per axis.
pub fn build_grid(domain: &Domain, n_sub: usize) -> Result<Arc<Grid>> {
    domain.validate()?;
    if n_sub < 2 {
        return Err(Error::InvalidSubdivision(n_sub));
    }
    match domain {
        Domain::Interval { a, b } => {
            let h = (b - a) / n_sub as f64;
            let interior_nodes: Vec<Vec<f64>> =
                (1..n_sub).map(|i| vec![a + i as f64 * h]).collect();
            Ok(Arc::new(Grid {
                domain: domain.clone(),
                subdivisions: n_sub,
                spacing: h,
                interior_nodes,
                cell_measure: h,
            }))
        }
        Domain::Rectangle { ax, bx, ay, by } => {
            let hx = (bx - ax) / n_sub as f64;
            let hy = (by - ay) / n_sub as f64;
            if ((hx - hy) / hx).abs() > 1e-12 {
                return Err(Error::UnsupportedDomain(
                    "rectangle sides must produce equal spacing per axis (use a square or \
                     matching aspect ratio)"
                        .into(),
                ));
            }
            let h = hx;
            let mut interior_nodes = Vec::with_capacity((n_sub - 1) * (n_sub - 1));
            // Lexicographic: x major, y minor.
            for ix in 1..n_sub {
                for iy in 1..n_sub {
                    interior_nodes.push(vec![ax + ix as f64 * h, ay + iy as f64 * h]);
                }
            }
            Ok(Arc::new(Grid {
                domain: domain.clone(),
                subdivisions: n_sub,
                spacing: h,
                interior_nodes,
                cell_measure: h * h,
            }))
        }
        Domain::MeasureOnly { .. } => Err(Error::UnsupportedDomain(
            "MeasureOnly domains cannot be gridded".into(),
        )),
    }
}

/// Nodal values on the interior nodes of a grid; zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.node_count();
        GridFunction {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let n = grid.node_count();
        GridFunction {
            grid,
            values: vec![c; n],
        }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction { grid, values })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serializes to CSV: one row per node, coordinates then value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# mixsing gridfunction v1, n={}, N={}",
            self.grid.dimension(),
            self.grid.subdivisions
        )?;
        for (node, v) in self.grid.interior_nodes.iter().zip(&self.values) {
            let coords: Vec<String> = node.iter().map(|c| format!("{c:.17e}")).collect();
            writeln!(w, "{},{v:.17e}", coords.join(","))?;
        }
        Ok(())
    }

    /// Reads nodal values from CSV written by [`GridFunction::write_csv`]
    /// (or any CSV whose last column is the value, one row per node in
    /// grid order).
    pub fn read_csv<R: BufRead>(grid: Arc<Grid>, r: R) -> Result<Self> {
        let mut values = Vec::new();
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let last = t
                .rsplit(',')
                .next()
                .ok_or_else(|| Error::Config("empty CSV row".into()))?;
            let v: f64 = last
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("bad CSV value {last:?}: {e}")))?;
            values.push(v);
        }
        GridFunction::from_values(grid, values)
    }
}

/// Samples `f` at the interior nodes. With `nonnegative` set, a negative
/// sample is reported as a hypothesis violation (source data must satisfy
/// f >= 0).
pub fn sample_function<F>(grid: &Arc<Grid>, f: F, nonnegative: bool) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> f64,
{
    let mut values = Vec::with_capacity(grid.node_count());
    for (i, node) in grid.interior_nodes.iter().enumerate() {
        let v = f(node);
        if !v.is_finite() {
            return Err(Error::InvalidSample {
                index: i,
                coords: node.clone(),
                value: v,
            });
        }
        if nonnegative && v < 0.0 {
            return Err(Error::HypothesisViolation(format!(
                "source function negative at node {node:?}: f = {v}"
            )));
        }
        values.push(v);
    }
    Ok(GridFunction {
        grid: Arc::clone(grid),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_grid_basic() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 4).unwrap();
        assert_eq!(g.spacing, 0.5);
        assert_eq!(g.cell_measure, 0.5);
        let xs: Vec<f64> = g.interior_nodes.iter().map(|n| n[0]).collect();
        assert_eq!(xs, vec![-0.5, 0.0, 0.5]);
    }

    #[test]
    fn rectangle_grid_basic() {
        let g = build_grid(&Domain::rectangle(0.0, 1.0, 0.0, 1.0), 3).unwrap();
        assert_eq!(g.node_count(), 4);
        assert!((g.spacing - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.cell_measure - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn n_below_two_rejected() {
        let err = build_grid(&Domain::interval(0.0, 1.0), 1).unwrap_err();
        assert!(matches!(err, Error::InvalidSubdivision(1)));
    }

    #[test]
    fn measure_only_rejected() {
        let err = build_grid(&Domain::MeasureOnly { n: 3, volume: 1.0 }, 4).unwrap_err();
        assert!(matches!(err, Error::UnsupportedDomain(_)));
    }

    #[test]
    fn sample_constant_and_poly() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 4).unwrap();
        let one = sample_function(&g, |_| 1.0, true).unwrap();
        assert_eq!(one.values, vec![1.0, 1.0, 1.0]);
        let p = sample_function(&g, |x| 1.0 + x[0] * x[0], true).unwrap();
        assert_eq!(p.values, vec![1.25, 1.0, 1.25]);
    }

    #[test]
    fn negative_sample_flagged() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 4).unwrap();
        let err = sample_function(&g, |x| x[0], true).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation(_)));
    }

    #[test]
    fn refinement_nesting_interval() {
        let coarse = build_grid(&Domain::interval(-1.0, 1.0), 8).unwrap();
        let fine = build_grid(&Domain::interval(-1.0, 1.0), 16).unwrap();
        for (i, node) in coarse.interior_nodes.iter().enumerate() {
            let fi = 2 * (i + 1) - 1;
            assert!((fine.interior_nodes[fi][0] - node[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn cell_measures_below_volume() {
        for n in [4, 16, 64] {
            let g = build_grid(&Domain::interval(-1.0, 1.0), n).unwrap();
            let total = g.cell_measure * g.node_count() as f64;
            assert!(total <= g.domain.volume() + 1e-12);
            assert!(g.domain.volume() - total <= 2.0 * g.spacing + 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 8).unwrap();
        let u = sample_function(&g, |x| (1.0 - x[0] * x[0]).max(0.0), true).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(Arc::clone(&g), &buf[..]).unwrap();
        assert_eq!(u.values, back.values);
    }
}
