//! Writes the synthetic scenarios (part.stl, points.csv, config.toml) to a
//! directory, default `data/`.

use scanplan::config::Config;
use scanplan::geometry::KindTolerances;
use scanplan::scenario::{flat_plate, random_part, tight_tolerance_plate};

fn main() -> scanplan::Result<()> {
    let root = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    let tol = KindTolerances::default();
    let base = Config::default();
    let scenarios = [
        ("flat-plate", flat_plate(240.0, 40.0, &tol)),
        ("tight-tolerance", tight_tolerance_plate(240.0, 40.0, &[7, 28], 0.36)),
        ("random-part", random_part(0, 30, &tol)),
    ];
    for (name, s) in scenarios {
        let path = s.write(std::path::Path::new(&root).join(name), &base)?;
        println!("{}", path.display());
    }
    Ok(())
}
