//! Tolerance to sensor budget to admissible incident angle, per feature kind.

use scanplan::geometry::{KindTolerances, MpKind};
use scanplan::uncertainty::{UncertaintyBudget, UncertaintyParams, SensorUncertaintyCurve, DEFAULT_CURVE_DEG};

fn main() -> scanplan::Result<()> {
    let params = UncertaintyParams::default();
    let curve = SensorUncertaintyCurve::from_degrees(&DEFAULT_CURVE_DEG)?;
    let tol = KindTolerances::default();
    println!("{:<10} {:>8} {:>12} {:>10}", "kind", "±t (mm)", "U_sen max", "alpha_p");
    for kind in MpKind::ALL {
        let half = tol.half_width(kind);
        let b = UncertaintyBudget::derive(2.0 * half, &params, &curve)?;
        println!("{:<10} {:>8.2} {:>12.5} {:>9.1}°", kind.as_str(), half, b.sensor_max, b.max_angle.to_degrees());
    }
    // a tolerance this tight leaves almost no angular freedom
    let b = UncertaintyBudget::derive(0.72, &params, &curve)?;
    println!("±0.36 hole: U_sen max {:.5}, alpha_p {:.2}°", b.sensor_max, b.max_angle.to_degrees());
    match UncertaintyBudget::derive(0.5, &params, &curve) {
        Err(e) => println!("±0.25 hole: {e}"),
        Ok(b) => println!("±0.25 hole: alpha_p {:.2}°", b.max_angle.to_degrees()),
    }
    Ok(())
}
