//! Orders viewpoints by annealing over collision-aware travel times.

use scanplan::sequencer::{anneal, AnnealConfig, TimeMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> scanplan::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = 12;
    let pts: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0))).collect();
    let d = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() / 100.0;
    let times: Vec<Vec<f64>> = pts.iter().map(|&a| pts.iter().map(|&b| d(a, b)).collect()).collect();
    let home: Vec<f64> = pts.iter().map(|&a| d(a, (250.0, -200.0))).collect();
    let tm = TimeMatrix::new(times, home, 5.0)?;

    let identity: Vec<usize> = (0..m).collect();
    println!("input order: {:.2} s", tm.tour_time(&identity));
    let (mut improvements, mut last) = (0, f64::INFINITY);
    let tour = anneal(&tm, &AnnealConfig::default(), 3, |_, best| {
        if best < last {
            improvements += 1;
            last = best;
        }
    });
    println!("annealed:    {:.2} s, best improved {improvements} times", tour.total);
    println!("order {:?}", tour.order);
    Ok(())
}
