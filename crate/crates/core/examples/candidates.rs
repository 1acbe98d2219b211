//! Candidate viewpoints per voxel and how many points each one may measure.

use scanplan::config::Config;
use scanplan::geometry::KindTolerances;
use scanplan::pipeline::prepare_from;
use scanplan::scenario::random_part;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let part = random_part(1, 30, &KindTolerances::default());
    let p = prepare_from(&cfg, part.mesh, &part.obstacles, part.mps)?;
    let c = &p.candidates;
    let sizes: Vec<usize> = c.visible.iter().map(|s| s.len()).collect();
    let useful = sizes.iter().filter(|&&n| n > 0).count();
    println!("{} candidates, {useful} measure at least one point", c.len());
    println!("largest determination set: {}", sizes.iter().max().unwrap_or(&0));
    for (i, mp) in p.mps.iter().enumerate().take(5) {
        let seen = c.visible.iter().filter(|s| s.contains(i)).count();
        println!(
            "{:<10} alpha_p {:>5.1}°, gated candidates {seen}",
            mp.id,
            p.budgets[i].max_angle.to_degrees()
        );
    }
    Ok(())
}
