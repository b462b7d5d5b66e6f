//! Exact rearrangement calculus on piecewise-constant data: distribution
//! functions, the decreasing rearrangement, the Schwarz (radial)
//! rearrangement, norm preservation and the Hardy-Littlewood inequality.

use mixsing::rearrange::{
    decreasing_rearrangement, distribution_function, hardy_littlewood_gap, profile_lp_norm,
    schwarz_rearrangement, unit_ball_volume,
};

fn main() -> mixsing::Result<()> {
    // Cells are (value, measure) pairs; think "nodal value times cell
    // volume" for a grid function, zero-padded to the domain volume.
    let cells = vec![(3.0, 0.5), (1.0, 0.5), (4.0, 0.5), (2.0, 0.5)];
    let volume = 2.5; // leaves 0.5 of measure at value zero

    let mu = distribution_function(&cells)?;
    println!("distribution function mu(t) = |{{u > t}}|:");
    for t in [0.0, 1.5, 2.5, 3.5, 4.5] {
        println!("  mu({t}) = {}", mu.eval(t));
    }

    let star = decreasing_rearrangement(&cells, volume)?;
    println!("decreasing rearrangement u* (breaks / values):");
    println!("  breaks = {:?}", star.breaks);
    println!("  values = {:?}", star.values);

    // Norms are preserved exactly.
    for p in [1.0, 2.0, f64::INFINITY] {
        let direct: f64 = if p.is_infinite() {
            cells.iter().fold(0.0f64, |a, &(v, _)| a.max(v))
        } else {
            cells
                .iter()
                .map(|&(v, m)| v.powf(p) * m)
                .sum::<f64>()
                .powf(1.0 / p)
        };
        println!(
            "  L^{p} norm: cells = {direct:.12}, profile = {:.12}",
            profile_lp_norm(&star, p)?
        );
    }

    // Schwarz rearrangement: the radial decreasing representative on the
    // ball of the same volume.
    let ball = schwarz_rearrangement(star.clone(), 2);
    println!(
        "Schwarz rearrangement in n = 2: ball radius = {:.6} (omega_2 = {:.6})",
        ball.ball_radius(),
        unit_ball_volume(2)
    );
    println!("  u#(0) = {}, u#(r = 0.5) = {}", ball.eval_radius(0.0), ball.eval_radius(0.5));

    // Hardy-Littlewood: int u v <= int u* v*.
    let other = vec![(1.0, 0.5), (5.0, 0.5), (2.0, 0.5), (0.5, 0.5)];
    println!(
        "Hardy-Littlewood gap (int u*v* - int uv) = {:.6} >= 0",
        hardy_littlewood_gap(&cells, &other, volume)?
    );
    Ok(())
}
