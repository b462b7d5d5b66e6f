//! Assembles the discrete mixed operator -Delta + (-Delta)^s on an
//! interval and a square, and inspects its structure: symmetry, the
//! exterior-tail weights enforcing the zero exterior condition, and the
//! local/nonlocal quadratic forms of a sample function.

use mixsing::operators::{fit_embedding_constant, tail_weight_1d};
use mixsing::{build_grid, sample_function, bilinear_form, DiscreteMixedOperator, Domain};

fn main() -> mixsing::Result<()> {
    // 1D: Omega = (-1, 1), 64 subdivisions.
    let grid = build_grid(&Domain::interval(-1.0, 1.0), 64)?;
    for s in [0.25, 0.5, 0.75] {
        let op = DiscreteMixedOperator::assemble(&grid, s)?;
        let asym = (&op.a_frac - op.a_frac.transpose()).abs().max();
        println!(
            "s = {s}: A_loc symmetric = {}, max |A_frac - A_frac^T| = {asym:.3e}",
            op.a_loc.is_symmetric()
        );
        // The tail weight kappa(x) integrates the kernel over the
        // exterior; at the center of (-1, 1) it equals 1/s exactly.
        println!(
            "  kappa(0) = {:.12} (closed form 1/s = {:.12})",
            tail_weight_1d(-1.0, 1.0, s, 0.0),
            1.0 / s
        );
        // Quadratic forms of the tent function u(x) = 1 - |x|.
        let u = sample_function(&grid, |x: &[f64]| 1.0 - x[0].abs(), true)?;
        println!(
            "  tent function: local form = {:.6}, fractional form = {:.6}, total = {:.6}",
            op.local_quadratic(&u.values),
            op.fractional_quadratic(&u.values),
            bilinear_form(&op, &u, &u)?
        );
    }

    // 2D: unit square, coarser because the nonlocal matrix is dense.
    let sq = build_grid(&Domain::rectangle(0.0, 1.0, 0.0, 1.0), 16)?;
    let op2 = DiscreteMixedOperator::assemble(&sq, 0.5)?;
    let bump = sample_function(&sq, |x: &[f64]| {
        (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).sin()
    }, true)?;
    println!(
        "2D square, s = 0.5: nodes = {}, fractional form of the sine bump = {:.6}",
        op2.node_count(),
        op2.fractional_quadratic(&bump.values)
    );

    // Empirical embedding constant ||u||_2 <= C [u]: fitted over samples.
    let samples = vec![bump];
    println!(
        "fitted embedding constant on the square: {:.6}",
        fit_embedding_constant(&sq, 0.5, &samples)?
    );
    Ok(())
}
