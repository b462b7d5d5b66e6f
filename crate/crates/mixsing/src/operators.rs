//! Discrete realization of the mixed bilinear form
//! B(u, v) = (grad u, grad v) + [u, v]_s with exterior Dirichlet data.
//!
//! The local part is the conforming P1/Q1 stiffness matrix. The nonlocal
//! part is assembled entrywise from the double integral over
//! Omega x Omega plus an exact exterior-tail term 2 int phi_i phi_j kappa,
//! kappa(x) = int_{R^n \ Omega} |x-y|^{-n-2s} dy, which is the exact
//! consequence of u = 0 outside Omega for the conforming space. The kernel
//! carries no normalization constant.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Domain, Grid, GridFunction};
use crate::quadrature::{gauss_on, graded_gauss};

/// Hard cap on dense nonlocal storage.
pub const DENSE_NODE_CAP: usize = 10_000;

/// Row-compressed symmetric sparse matrix (small stencils only).
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let row = &mut self.rows[i];
        if let Some(entry) = row.iter_mut().find(|(c, _)| *c == j) {
            entry.1 += v;
        } else {
            row.push((j, v));
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, v) in row {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if self.get(j, i) != v {
                    return false;
                }
            }
        }
        true
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|(_, v)| v).sum()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }
}

/// Conforming stiffness matrix of -Laplace with homogeneous Dirichlet data
/// (P1 hats in 1D, Q1 bilinears in 2D).
pub fn assemble_local(grid: &Grid) -> SparseMatrix {
    let nn = grid.node_count();
    let mut a = SparseMatrix::zeros(nn);
    match grid.dimension() {
        1 => {
            let h = grid.spacing;
            for i in 0..nn {
                a.add(i, i, 2.0 / h);
                if i + 1 < nn {
                    a.add(i, i + 1, -1.0 / h);
                    a.add(i + 1, i, -1.0 / h);
                }
            }
        }
        2 => {
            let nsub = grid.subdivisions;
            let per_axis = nsub - 1;
            // Q1 stiffness on a square cell is h-independent; local node
            // order (0,0),(1,0),(0,1),(1,1).
            const K: [[f64; 4]; 4] = [
                [2.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0, -1.0 / 3.0],
                [-1.0 / 6.0, 2.0 / 3.0, -1.0 / 3.0, -1.0 / 6.0],
                [-1.0 / 6.0, -1.0 / 3.0, 2.0 / 3.0, -1.0 / 6.0],
                [-1.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0, 2.0 / 3.0],
            ];
            const LOCAL: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
            let idx = |gx: usize, gy: usize| -> Option<usize> {
                if gx >= 1 && gx <= per_axis && gy >= 1 && gy <= per_axis {
                    Some((gx - 1) * per_axis + (gy - 1))
                } else {
                    None
                }
            };
            for ex in 0..nsub {
                for ey in 0..nsub {
                    for (la, &(ax, ay)) in LOCAL.iter().enumerate() {
                        let Some(i) = idx(ex + ax, ey + ay) else {
                            continue;
                        };
                        for (lb, &(bx, by)) in LOCAL.iter().enumerate() {
                            let Some(j) = idx(ex + bx, ey + by) else {
                                continue;
                            };
                            a.add(i, j, K[la][lb]);
                        }
                    }
                }
            }
        }
        d => panic!("unsupported dimension {d}"),
    }
    a
}

fn hat(t: f64) -> f64 {
    (1.0 - t.abs()).max(0.0)
}

// Grading depths for the singular quadratures.
const NEAR_LEVELS_1D: usize = 30;
const NEAR_LEVELS_2D: usize = 22;
const TAIL_LEVELS: usize = 24;

/// Local interaction matrix of the fractional difference form over the
/// cell pair (E0, Ed) in 1D, together with the involved lattice node ids.
fn frac_offset_1d(d: i64, h: f64, s: f64) -> (Vec<i64>, Vec<Vec<f64>>) {
    let mut nodes: Vec<i64> = vec![0, 1, d, d + 1];
    nodes.sort_unstable();
    nodes.dedup();
    let nb = nodes.len();
    let mut q = vec![vec![0.0; nb]; nb];

    if d == 0 {
        // Exact: basis differences are slope * (x - y) on a single cell.
        let i0 = 2.0 * h.powf(3.0 - 2.0 * s) * (1.0 / (2.0 - 2.0 * s) - 1.0 / (3.0 - 2.0 * s));
        let slope = |nu: i64| -> f64 {
            match nu {
                0 => -1.0 / h,
                1 => 1.0 / h,
                _ => 0.0,
            }
        };
        for (a, &nu) in nodes.iter().enumerate() {
            for (b, &mu) in nodes.iter().enumerate() {
                q[a][b] = slope(nu) * slope(mu) * i0;
            }
        }
        return (nodes, q);
    }

    let (x0, x1) = (0.0, h);
    let (y0, y1) = (d as f64 * h, (d + 1) as f64 * h);
    let (xpts, ypts) = match d.abs() {
        1 => {
            // Cells touch at a single point; grade both factors toward it.
            let toward_right = d > 0;
            (
                graded_gauss(x0, x1, toward_right, NEAR_LEVELS_1D, 4),
                graded_gauss(y0, y1, !toward_right, NEAR_LEVELS_1D, 4),
            )
        }
        2 => (gauss_on(x0, x1, 8), gauss_on(y0, y1, 8)),
        _ => (gauss_on(x0, x1, 1), gauss_on(y0, y1, 1)),
    };

    let exponent = -(1.0 + 2.0 * s);
    let mut dv = vec![0.0; nb];
    for &(x, wx) in &xpts {
        for &(y, wy) in &ypts {
            let kern = wx * wy * (x - y).abs().powf(exponent);
            for (a, &nu) in nodes.iter().enumerate() {
                dv[a] = hat(x / h - nu as f64) - hat(y / h - nu as f64);
            }
            for a in 0..nb {
                if dv[a] == 0.0 {
                    continue;
                }
                let da = kern * dv[a];
                for b in 0..nb {
                    q[a][b] += da * dv[b];
                }
            }
        }
    }
    (nodes, q)
}

/// z-axis quadrature for the relative-coordinate form in 2D; the range is
/// [(d-1)h, (d+1)h] with grading toward z = 0 when it lies in the closure.
fn z_axis_points(d: i64, h: f64) -> Vec<(f64, f64)> {
    match d {
        0 => {
            let mut pts = graded_gauss(-h, 0.0, true, NEAR_LEVELS_2D, 3);
            pts.extend(graded_gauss(0.0, h, false, NEAR_LEVELS_2D, 3));
            pts
        }
        1 => graded_gauss(0.0, 2.0 * h, false, NEAR_LEVELS_2D, 3),
        -1 => graded_gauss(-2.0 * h, 0.0, true, NEAR_LEVELS_2D, 3),
        _ => unreachable!("z-substitution only used for touching cells"),
    }
}

/// Local interaction matrix over the 2D cell pair (E0, Ed).
fn frac_offset_2d(dx: i64, dy: i64, h: f64, s: f64) -> (Vec<(i64, i64)>, Vec<Vec<f64>>) {
    let mut nodes: Vec<(i64, i64)> = Vec::with_capacity(8);
    for &(ax, ay) in &[(0i64, 0i64), (1, 0), (0, 1), (1, 1)] {
        for cand in [(ax, ay), (ax + dx, ay + dy)] {
            if !nodes.contains(&cand) {
                nodes.push(cand);
            }
        }
    }
    nodes.sort_unstable();
    let nb = nodes.len();
    let mut q = vec![vec![0.0; nb]; nb];
    let exponent = -(2.0 + 2.0 * s);
    let phi = |nu: (i64, i64), x: f64, y: f64| -> f64 {
        hat(x / h - nu.0 as f64) * hat(y / h - nu.1 as f64)
    };
    let cheb = dx.abs().max(dy.abs());
    let mut dv = vec![0.0; nb];

    if cheb <= 1 {
        // Relative coordinates y = x + z: the inner x-integral over the
        // cell overlap is a fixed biquadratic, so 2x2 Gauss is exact; the
        // outer z-integral is graded toward the kernel singularity.
        let zx = z_axis_points(dx, h);
        let zy = z_axis_points(dy, h);
        for &(z1, w1) in &zx {
            for &(z2, w2) in &zy {
                let lox = (dx as f64 * h - z1).max(0.0);
                let hix = ((dx + 1) as f64 * h - z1).min(h);
                if lox >= hix {
                    continue;
                }
                let loy = (dy as f64 * h - z2).max(0.0);
                let hiy = ((dy + 1) as f64 * h - z2).min(h);
                if loy >= hiy {
                    continue;
                }
                let kern = w1 * w2 * (z1 * z1 + z2 * z2).powf(0.5 * exponent);
                for &(px, wpx) in &gauss_on(lox, hix, 2) {
                    for &(py, wpy) in &gauss_on(loy, hiy, 2) {
                        let win = wpx * wpy * kern;
                        for (a, &nu) in nodes.iter().enumerate() {
                            dv[a] = phi(nu, px, py) - phi(nu, px + z1, py + z2);
                        }
                        for a in 0..nb {
                            if dv[a] == 0.0 {
                                continue;
                            }
                            let da = win * dv[a];
                            for b in 0..nb {
                                q[a][b] += da * dv[b];
                            }
                        }
                    }
                }
            }
        }
    } else {
        let xa = gauss_on(0.0, h, 3);
        let ya = gauss_on(dx as f64 * h, (dx + 1) as f64 * h, 3);
        let xb = gauss_on(0.0, h, 3);
        let yb = gauss_on(dy as f64 * h, (dy + 1) as f64 * h, 3);
        for &(x1, wx1) in &xa {
            for &(x2, wx2) in &xb {
                for &(y1, wy1) in &ya {
                    for &(y2, wy2) in &yb {
                        let r2 = (x1 - y1) * (x1 - y1) + (x2 - y2) * (x2 - y2);
                        let kern = wx1 * wx2 * wy1 * wy2 * r2.powf(0.5 * exponent);
                        for (a, &nu) in nodes.iter().enumerate() {
                            dv[a] = phi(nu, x1, x2) - phi(nu, y1, y2);
                        }
                        for a in 0..nb {
                            if dv[a] == 0.0 {
                                continue;
                            }
                            let da = kern * dv[a];
                            for b in 0..nb {
                                q[a][b] += da * dv[b];
                            }
                        }
                    }
                }
            }
        }
    }
    (nodes, q)
}

/// Exterior tail weight in 1D, closed form:
/// kappa(x) = (1/2s) [ (b-x)^{-2s} + (x-a)^{-2s} ].
pub fn tail_weight_1d(a: f64, b: f64, s: f64, x: f64) -> f64 {
    ((b - x).powf(-2.0 * s) + (x - a).powf(-2.0 * s)) / (2.0 * s)
}

/// Exterior tail weight in 2D by polar quadrature:
/// kappa(x) = (1/2s) int_0^{2pi} d(theta)^{-2s} dtheta, with d(theta) the
/// ray distance from x to the rectangle boundary.
pub fn tail_weight_2d(rect: (f64, f64, f64, f64), s: f64, x: f64, y: f64) -> f64 {
    let (ax, bx, ay, by) = rect;
    let ray = |theta: f64| -> f64 {
        let (c, sn) = (theta.cos(), theta.sin());
        let tx = if c > 0.0 {
            (bx - x) / c
        } else if c < 0.0 {
            (ax - x) / c
        } else {
            f64::INFINITY
        };
        let ty = if sn > 0.0 {
            (by - y) / sn
        } else if sn < 0.0 {
            (ay - y) / sn
        } else {
            f64::INFINITY
        };
        tx.min(ty)
    };
    // Split at the corner directions where the exit distance has kinks.
    let mut angles: Vec<f64> = [(bx, by), (ax, by), (ax, ay), (bx, ay)]
        .iter()
        .map(|&(cx, cy)| (cy - y).atan2(cx - x))
        .collect();
    angles.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut integral = 0.0;
    for i in 0..4 {
        let lo = angles[i];
        let hi = if i + 1 < 4 {
            angles[i + 1]
        } else {
            angles[0] + std::f64::consts::TAU
        };
        for (t, w) in gauss_on(lo, hi, 16) {
            integral += w * ray(t).powf(-2.0 * s);
        }
    }
    integral / (2.0 * s)
}

/// Per-axis quadrature for the tail integral over one cell, graded toward
/// any domain boundary the cell touches.
fn tail_cell_axis(lo: f64, hi: f64, first: bool, last: bool) -> Vec<(f64, f64)> {
    match (first, last) {
        (true, _) => graded_gauss(lo, hi, false, TAIL_LEVELS, 4),
        (_, true) => graded_gauss(lo, hi, true, TAIL_LEVELS, 4),
        _ => gauss_on(lo, hi, 4),
    }
}

/// Assembles the dense interior-interior nonlocal matrix (including the
/// exterior tail term) and the nodal tail weights.
pub fn assemble_fractional(grid: &Grid, s: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidOrder(s));
    }
    let nn = grid.node_count();
    if nn > DENSE_NODE_CAP {
        return Err(Error::DenseCapExceeded {
            nodes: nn,
            cap: DENSE_NODE_CAP,
        });
    }
    let h = grid.spacing;
    let nsub = grid.subdivisions as i64;
    let mut a = DMatrix::<f64>::zeros(nn, nn);

    match grid.dimension() {
        1 => {
            let (dom_a, dom_b) = match grid.domain {
                Domain::Interval { a, b } => (a, b),
                _ => unreachable!(),
            };
            let offsets: Vec<i64> = (-(nsub - 1)..=(nsub - 1)).collect();
            let local: HashMap<i64, (Vec<i64>, Vec<Vec<f64>>)> = offsets
                .par_iter()
                .map(|&d| (d, frac_offset_1d(d, h, s)))
                .collect();
            for e in 0..nsub {
                for f in 0..nsub {
                    let (nodes, q) = &local[&(f - e)];
                    for (la, &nu) in nodes.iter().enumerate() {
                        let gi = nu + e;
                        if gi < 1 || gi > nsub - 1 {
                            continue;
                        }
                        let i = (gi - 1) as usize;
                        for (lb, &mu) in nodes.iter().enumerate() {
                            let gj = mu + e;
                            if gj < 1 || gj > nsub - 1 {
                                continue;
                            }
                            a[(i, (gj - 1) as usize)] += q[la][lb];
                        }
                    }
                }
            }
            // Tail term 2 int phi_i phi_j kappa over each cell.
            for e in 0..nsub {
                let lo = dom_a + e as f64 * h;
                let hi = lo + h;
                let pts = tail_cell_axis(lo, hi, e == 0, e == nsub - 1);
                for &(x, w) in &pts {
                    let kap = tail_weight_1d(dom_a, dom_b, s, x);
                    for gi in [e, e + 1] {
                        if gi < 1 || gi > nsub - 1 {
                            continue;
                        }
                        let pi = hat((x - dom_a) / h - gi as f64);
                        for gj in [e, e + 1] {
                            if gj < 1 || gj > nsub - 1 {
                                continue;
                            }
                            let pj = hat((x - dom_a) / h - gj as f64);
                            a[((gi - 1) as usize, (gj - 1) as usize)] += 2.0 * w * kap * pi * pj;
                        }
                    }
                }
            }
            let tail: Vec<f64> = grid
                .interior_nodes
                .iter()
                .map(|p| tail_weight_1d(dom_a, dom_b, s, p[0]))
                .collect();
            symmetrize(&mut a);
            Ok((a, tail))
        }
        2 => {
            let rect = match grid.domain {
                Domain::Rectangle { ax, bx, ay, by } => (ax, bx, ay, by),
                _ => unreachable!(),
            };
            let per_axis = (nsub - 1) as usize;
            let mut offsets = Vec::new();
            for dx in -(nsub - 1)..=(nsub - 1) {
                for dy in -(nsub - 1)..=(nsub - 1) {
                    offsets.push((dx, dy));
                }
            }
            let local: HashMap<(i64, i64), (Vec<(i64, i64)>, Vec<Vec<f64>>)> = offsets
                .par_iter()
                .map(|&(dx, dy)| ((dx, dy), frac_offset_2d(dx, dy, h, s)))
                .collect();
            let idx = |gx: i64, gy: i64| -> Option<usize> {
                if gx >= 1 && gx <= nsub - 1 && gy >= 1 && gy <= nsub - 1 {
                    Some(((gx - 1) as usize) * per_axis + (gy - 1) as usize)
                } else {
                    None
                }
            };
            for ex in 0..nsub {
                for ey in 0..nsub {
                    for fx in 0..nsub {
                        for fy in 0..nsub {
                            let (nodes, q) = &local[&(fx - ex, fy - ey)];
                            for (la, &(nx, ny)) in nodes.iter().enumerate() {
                                let Some(i) = idx(nx + ex, ny + ey) else {
                                    continue;
                                };
                                for (lb, &(mx, my)) in nodes.iter().enumerate() {
                                    let Some(j) = idx(mx + ex, my + ey) else {
                                        continue;
                                    };
                                    a[(i, j)] += q[la][lb];
                                }
                            }
                        }
                    }
                }
            }
            // Tail term.
            let (ax0, _bx0, ay0, _by0) = rect;
            for ex in 0..nsub {
                for ey in 0..nsub {
                    let lox = ax0 + ex as f64 * h;
                    let loy = ay0 + ey as f64 * h;
                    let ptsx = tail_cell_axis(lox, lox + h, ex == 0, ex == nsub - 1);
                    let ptsy = tail_cell_axis(loy, loy + h, ey == 0, ey == nsub - 1);
                    let cell_nodes: Vec<(i64, i64)> = [(0, 0), (1, 0), (0, 1), (1, 1)]
                        .iter()
                        .map(|&(cx, cy): &(i64, i64)| (ex + cx, ey + cy))
                        .collect();
                    for &(x, wx) in &ptsx {
                        for &(y, wy) in &ptsy {
                            let kap = tail_weight_2d(rect, s, x, y);
                            let w = 2.0 * wx * wy * kap;
                            for &(gx, gy) in &cell_nodes {
                                let Some(i) = idx(gx, gy) else { continue };
                                let pi = hat((x - ax0) / h - gx as f64)
                                    * hat((y - ay0) / h - gy as f64);
                                for &(hx, hy) in &cell_nodes {
                                    let Some(j) = idx(hx, hy) else { continue };
                                    let pj = hat((x - ax0) / h - hx as f64)
                                        * hat((y - ay0) / h - hy as f64);
                                    a[(i, j)] += w * pi * pj;
                                }
                            }
                        }
                    }
                }
            }
            let tail: Vec<f64> = grid
                .interior_nodes
                .iter()
                .map(|p| tail_weight_2d(rect, s, p[0], p[1]))
                .collect();
            symmetrize(&mut a);
            Ok((a, tail))
        }
        d => Err(Error::UnsupportedDomain(format!("dimension {d}"))),
    }
}

/// Forces exact symmetry (kills quadrature-order roundoff asymmetry).
fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Sparse local stiffness + dense nonlocal matrix + tail diagnostics.
#[derive(Debug, Clone)]
pub struct DiscreteMixedOperator {
    pub grid: Arc<Grid>,
    pub s: f64,
    pub a_loc: SparseMatrix,
    pub a_frac: DMatrix<f64>,
    pub tail: Vec<f64>,
    pub lumped_mass: f64,
}

impl DiscreteMixedOperator {
    pub fn assemble(grid: &Arc<Grid>, s: f64) -> Result<Self> {
        let a_loc = assemble_local(grid);
        let (a_frac, tail) = assemble_fractional(grid, s)?;
        Ok(DiscreteMixedOperator {
            grid: Arc::clone(grid),
            s,
            a_loc,
            a_frac,
            tail,
            lumped_mass: grid.cell_measure,
        })
    }

    /// Test hook: zeroes the nonlocal part, leaving the pure local problem.
    pub fn with_zero_fractional(mut self) -> Self {
        self.a_frac.fill(0.0);
        self
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    /// (A_loc + A_frac) x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.a_loc.matvec(x);
        let xv = nalgebra::DVector::from_column_slice(x);
        let z = &self.a_frac * xv;
        for (yi, zi) in y.iter_mut().zip(z.iter()) {
            *yi += zi;
        }
        y
    }

    pub fn local_quadratic(&self, x: &[f64]) -> f64 {
        self.a_loc.quadratic_form(x)
    }

    pub fn fractional_quadratic(&self, x: &[f64]) -> f64 {
        let xv = nalgebra::DVector::from_column_slice(x);
        (&self.a_frac * &xv).dot(&xv)
    }

    /// Dense system matrix A_loc + A_frac.
    pub fn dense_system(&self) -> DMatrix<f64> {
        &self.a_loc.to_dense() + &self.a_frac
    }
}

/// u^T (A_loc + A_frac) v; bilinear_form(op, u, u) is the discrete rho(u)^2.
pub fn bilinear_form(op: &DiscreteMixedOperator, u: &GridFunction, v: &GridFunction) -> Result<f64> {
    if !Arc::ptr_eq(&u.grid, &op.grid) && u.grid.as_ref() != op.grid.as_ref() {
        return Err(Error::GridMismatch);
    }
    if u.values.len() != op.node_count() || v.values.len() != op.node_count() {
        return Err(Error::GridMismatch);
    }
    let av = op.apply(&v.values);
    Ok(u.values.iter().zip(&av).map(|(a, b)| a * b).sum())
}

/// Empirical lower bound for the embedding constant beta in
/// [u]_s^2 <= beta ||grad u||^2: max over samples of the seminorm ratio.
pub fn fit_embedding_constant(grid: &Arc<Grid>, s: f64, samples: &[GridFunction]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::DegenerateInput("no samples".into()));
    }
    let op = DiscreteMixedOperator::assemble(grid, s)?;
    let mut best = f64::NEG_INFINITY;
    for u in samples {
        let grad = op.local_quadratic(&u.values);
        if grad <= 0.0 {
            return Err(Error::DegenerateInput("all-zero sample".into()));
        }
        let frac = op.fractional_quadratic(&u.values);
        best = best.max(frac / grad);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, sample_function};
    use approx::assert_relative_eq;

    #[test]
    fn local_1d_tridiagonal() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 4).unwrap();
        let a = assemble_local(&g);
        assert_relative_eq!(a.get(0, 0), 4.0);
        assert_relative_eq!(a.get(0, 1), -2.0);
        assert_relative_eq!(a.get(1, 0), -2.0);
        assert_relative_eq!(a.get(1, 2), -2.0);
        assert_relative_eq!(a.get(0, 2), 0.0);
        // single hat of height 1: int |phi'|^2 = 2/h = 4
        let u = vec![0.0, 1.0, 0.0];
        assert_relative_eq!(a.quadratic_form(&u), 4.0);
    }

    #[test]
    fn local_2d_row_sums_nonnegative() {
        let g = build_grid(&Domain::rectangle(0.0, 1.0, 0.0, 1.0), 3).unwrap();
        let a = assemble_local(&g);
        assert!(a.is_symmetric());
        for i in 0..a.n {
            assert!(a.row_sum(i) >= -1e-14);
        }
    }

    #[test]
    fn tail_closed_form_1d() {
        // Omega = (-1,1), s = 0.5: kappa(0) = int_{|y|>1} |y|^{-2} dy = 2.
        assert_relative_eq!(tail_weight_1d(-1.0, 1.0, 0.5, 0.0), 2.0, epsilon = 1e-12);
        // general closed form at x = 0.5, s = 0.25
        let s = 0.25;
        let expect = (0.5f64.powf(-0.5) + 1.5f64.powf(-0.5)) / 0.5;
        assert_relative_eq!(tail_weight_1d(-1.0, 1.0, s, 0.5), expect, epsilon = 1e-12);
    }

    #[test]
    fn tail_2d_disc_sanity() {
        // For the unit square and its center, the ray distance is >= 0.5,
        // so kappa <= (1/2s) * 2pi * 0.5^{-2s}; and kappa > 0.
        let s = 0.5;
        let k = tail_weight_2d((0.0, 1.0, 0.0, 1.0), s, 0.5, 0.5);
        assert!(k > 0.0);
        assert!(k <= std::f64::consts::TAU * 0.5f64.powf(-1.0) / (2.0 * s) + 1e-9);
        // Compare against brute-force midpoint integration over the
        // exterior within a large box plus the analytic far-field tail.
        let brute = {
            let (mut acc, m, ext) = (0.0, 1200usize, 12.0);
            let hh = (2.0 * ext) / m as f64;
            for i in 0..m {
                for j in 0..m {
                    let x = -ext + (i as f64 + 0.5) * hh;
                    let y = -ext + (j as f64 + 0.5) * hh;
                    if x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0 {
                        continue;
                    }
                    let r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
                    acc += hh * hh * r2.powf(-(1.0 + s));
                }
            }
            // |y - x| > ext - 0.5 tail of the plane integral
            acc + std::f64::consts::TAU / (2.0 * s) * (ext - 0.5_f64).powf(-2.0 * s)
        };
        assert_relative_eq!(k, brute, max_relative = 2e-2);
    }

    #[test]
    fn fractional_symmetric_exact() {
        for s in [0.25, 0.5, 0.75] {
            let g = build_grid(&Domain::interval(-1.0, 1.0), 8).unwrap();
            let (a, tail) = assemble_fractional(&g, s).unwrap();
            assert_eq!(a, a.transpose());
            assert!(tail.iter().all(|&t| t > 0.0));
        }
        let g2 = build_grid(&Domain::rectangle(0.0, 1.0, 0.0, 1.0), 4).unwrap();
        let (a2, tail2) = assemble_fractional(&g2, 0.5).unwrap();
        assert_eq!(a2, a2.transpose());
        assert!(tail2.iter().all(|&t| t > 0.0));
    }

    #[test]
    fn fractional_invalid_order() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 4).unwrap();
        assert!(matches!(
            assemble_fractional(&g, 1.5),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn fractional_psd_and_offdiag_sign() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 16).unwrap();
        let (a, _) = assemble_fractional(&g, 0.4).unwrap();
        let n = a.nrows();
        // off-diagonal entries with disjoint supports (|i-j| >= 2) are <= 0
        for i in 0..n {
            for j in 0..n {
                if (i as i64 - j as i64).abs() >= 2 {
                    assert!(a[(i, j)] <= 1e-14, "a[{i}][{j}] = {}", a[(i, j)]);
                }
            }
        }
        // PSD on a few vectors
        for k in 1..4usize {
            let v: Vec<f64> = (0..n)
                .map(|i| ((i + 1) as f64 * k as f64 * 0.37).sin())
                .collect();
            let vv = nalgebra::DVector::from_column_slice(&v);
            assert!((&a * &vv).dot(&vv) >= 0.0);
        }
    }

    #[test]
    fn bilinear_form_symmetry_and_coercivity() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 16).unwrap();
        let op = DiscreteMixedOperator::assemble(&g, 0.3).unwrap();
        let u = sample_function(&g, |x| (std::f64::consts::PI * x[0]).sin().abs(), false).unwrap();
        let v = sample_function(&g, |x| 1.0 - x[0] * x[0], false).unwrap();
        let buv = bilinear_form(&op, &u, &v).unwrap();
        let bvu = bilinear_form(&op, &v, &u).unwrap();
        assert_relative_eq!(buv, bvu, epsilon = 1e-12);
        let buu = bilinear_form(&op, &u, &u).unwrap();
        assert!(buu >= op.local_quadratic(&u.values) - 1e-12);
        let zero = GridFunction::zeros(Arc::clone(&g));
        assert_eq!(bilinear_form(&op, &u, &zero).unwrap(), 0.0);
    }

    #[test]
    fn embedding_constant_monotone_in_samples() {
        let g = build_grid(&Domain::interval(-1.0, 1.0), 16).unwrap();
        let e1 = sample_function(&g, |x| (std::f64::consts::PI * (x[0] + 1.0) / 2.0).sin(), false)
            .unwrap();
        let e2 =
            sample_function(&g, |x| (std::f64::consts::PI * (x[0] + 1.0)).sin(), false).unwrap();
        let b1 = fit_embedding_constant(&g, 0.25, &[e1.clone()]).unwrap();
        let b2 = fit_embedding_constant(&g, 0.25, &[e1, e2]).unwrap();
        assert!(b1 > 0.0);
        assert!(b2 >= b1);
    }
}
