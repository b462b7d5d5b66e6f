//! Full reproducible pipeline: an experiment config (the same JSON the
//! CLI consumes) is run through solve -> rearrange -> compare ->
//! bound-check; every artifact is written with a checksum into a run
//! manifest, and report.json is bit-identical across repeated runs.

use mixsing::data::{NonlinearitySpec, Schedule, SourceSpec, Tolerances};
use mixsing::report::{run_sweep, Checks, ExperimentConfig, GridCfg, ProblemCfg};
use mixsing::{run_experiment, Domain};

fn main() -> mixsing::Result<()> {
    let cfg = ExperimentConfig {
        problem: ProblemCfg {
            s: 0.25,
            nonlinearity: NonlinearitySpec::model(0.5, 2.0),
            f: SourceSpec::Polynomial { coeffs: vec![1.0, 0.0, 1.0] },
            m: 2.0,
            schedule: Schedule::default(),
        },
        grid: GridCfg {
            n: 64,
            domain: Domain::interval(-1.0, 1.0),
        },
        checks: Checks::default(),
        output: None,
        tolerances: Tolerances::default(),
    };

    // The config round-trips through the JSON the CLI accepts.
    let json = serde_json::to_string_pretty(&cfg)?;
    std::fs::write("experiment.json", &json)?;
    let cfg = ExperimentConfig::from_json(&json)?;

    let out = std::path::Path::new("pipeline_out");
    let (manifest, report) = run_experiment(&cfg, out)?;

    println!("overall pass = {}", report.overall_pass);
    println!("solution: sup = {:.6e}, min = {:.6e}", report.solution_sup, report.solution_min);
    if let Some(t) = &report.talenti {
        println!("comparison margin = {:.6e} (tol {:.3e})", t.min_margin, t.tolerance);
    }
    if let Some(gap) = report.uniqueness_gap {
        println!("uniqueness gap = {gap:.3e}");
    }
    if let Some(eq) = report.equiintegrability_margin {
        println!("equiintegrability margin = {eq:.3e}");
    }
    println!("emitted files:");
    for f in &manifest.files {
        println!("  {}  sha256:{}...", f.name, &f.sha256[..16]);
    }

    // Parameter sweep: re-run the experiment across fractional orders.
    let rows = run_sweep(&cfg, "s", &[0.25, 0.5, 0.75], out)?;
    println!("sweep over s:");
    for r in rows {
        println!(
            "  s = {:<5} sup u = {:.6e}  pass = {}",
            r.value, r.solution_sup, r.overall_pass
        );
    }
    Ok(())
}
