//! Full pipeline from files on disk: writes a scenario, plans it and
//! prints the metrics document.

use scanplan::config::Config;
use scanplan::geometry::KindTolerances;
use scanplan::pipeline::run_pipeline;
use scanplan::scenario::random_part;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("scanplan-example-plan");
    let path = random_part(2, 30, &KindTolerances::default()).write(&dir, &Config::default())?;
    let cfg = Config::load(&path, &["seed=5".into()])?;
    let a = run_pipeline(&cfg)?;
    print!("{}", a.metrics_text);
    println!("artifacts in {}", cfg.output.dir.display());
    Ok(())
}
