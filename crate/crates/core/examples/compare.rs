//! Side-by-side comparison of the tree search and the greedy baseline on
//! a plate with two tight holes.

use scanplan::config::{Config, Strategy};
use scanplan::pipeline::{compare_prepared, prepare_from};
use scanplan::scenario::tight_tolerance_plate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let s = tight_tolerance_plate(240.0, 40.0, &[7, 28], 0.36);
    let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps)?;
    let (_, table) = compare_prepared(&p, &cfg, &[Strategy::Rrt, Strategy::Baseline])?;
    print!("{table}");
    Ok(())
}
