//! Colors a part by achieved uncertainty and writes an ASCII PLY.

use scanplan::config::Config;
use scanplan::geometry::KindTolerances;
use scanplan::pipeline::{plan_with, prepare_from};
use scanplan::report::export_heatmap;
use scanplan::scenario::random_part;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let part = random_part(4, 30, &KindTolerances::default());
    let p = prepare_from(&cfg, part.mesh, &part.obstacles, part.mps)?;
    let outcome = plan_with(&p, &cfg, cfg.strategy)?;
    let u: Vec<Option<f64>> = outcome.achieved.iter().map(|a| a.map(|a| a.u_sen)).collect();
    let ply = export_heatmap(&p.mesh, &p.mps, &u, &cfg.report.bins);
    for line in ply.lines().filter(|l| l.starts_with("comment legend")) {
        println!("{line}");
    }
    let out = std::env::temp_dir().join("scanplan-heatmap.ply");
    std::fs::write(&out, ply)?;
    println!("wrote {}", out.display());
    Ok(())
}
