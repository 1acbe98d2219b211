//! Runs the tree search on its own and prints the selected path.

use scanplan::config::Config;
use scanplan::geometry::KindTolerances;
use scanplan::pipeline::prepare_from;
use scanplan::sampler::plan_viewpoints;
use scanplan::scenario::random_part;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let part = random_part(7, 30, &KindTolerances::default());
    let p = prepare_from(&cfg, part.mesh, &part.obstacles, part.mps)?;
    let far = cfg.sensor.far_width();
    for seed in 0..3 {
        let run = plan_viewpoints(&p.candidates, p.mps.len(), p.home.position, &cfg.sampler, far, seed)?;
        let g = &run.graph;
        let objective = g.objective(cfg.sampler.beta1, cfg.sampler.gamma1)?;
        println!(
            "seed {seed}: {} nodes after {} iterations ({} failed extensions), path {:?}, objective {objective:.4}",
            g.len(),
            run.iterations,
            run.extension_failures,
            g.selected_candidates()
        );
    }
    Ok(())
}
