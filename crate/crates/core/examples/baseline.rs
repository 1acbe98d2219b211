//! Greedy max-coverage selection with and without the uncertainty gate.

use scanplan::baseline::greedy_target_sampling;
use scanplan::config::Config;
use scanplan::pipeline::prepare_from;
use scanplan::scenario::tight_tolerance_plate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let s = tight_tolerance_plate(240.0, 40.0, &[7, 28], 0.36);
    let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps)?;
    for gated in [false, true] {
        let picks = greedy_target_sampling(&p.candidates, &p.mps, &p.home.position, gated)?;
        println!("gated {gated}: {} viewpoints {:?}", picks.len(), picks);
    }
    Ok(())
}
