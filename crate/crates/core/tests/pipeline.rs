mod common;

use scanplan::config::{Config, Strategy};
use scanplan::geometry::{KindTolerances, MpKind, Vec3};
use scanplan::pipeline::{compare_prepared, plan_with, prepare_from};
use scanplan::report::{export_heatmap, Metrics};
use scanplan::scenario::{flat_plate, random_part, tight_tolerance_plate};
use scanplan::uncertainty::complies;
use scanplan::visibility::incident_angle;

#[test]
fn flat_plate_is_fully_compliant_for_every_kind() {
    let cfg = Config::default();
    let s = flat_plate(240.0, 40.0, &KindTolerances::default());
    let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps).unwrap();
    for strategy in [Strategy::Rrt, Strategy::Baseline] {
        let o = plan_with(&p, &cfg, strategy).unwrap();
        let m = Metrics::compute(&o, &p.mps, &p.params, &cfg.report.bins);
        assert_eq!(m.compliant, m.n_mps, "{strategy:?}");
        for k in m.kinds.iter().filter(|k| k.count > 0) {
            assert_eq!(k.ratio(), Some(1.0));
        }
    }
}

#[test]
fn plans_survive_an_independent_recheck() {
    let cfg = Config::default();
    let vis_curve = cfg.uncertainty.curve().unwrap();
    for seed in 20..24 {
        let s = random_part(seed, 25, &KindTolerances::default());
        let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps).unwrap();
        let o = plan_with(&p, &cfg, Strategy::Rrt).unwrap();
        let oracle = cfg.robot.oracle();
        for vp in &o.viewpoints {
            assert!(!p.scene.collides(&cfg.sensor_body, vp));
            assert!(oracle.is_accessible(vp));
        }
        for (i, mp) in p.mps.iter().enumerate() {
            // best angle over every viewpoint that has the point in its frustum
            let best = o
                .viewpoints
                .iter()
                .filter(|vp| cfg.sensor.frustum_contains(vp, &mp.position))
                .map(|vp| incident_angle(vp, &mp.position, &mp.normal, cfg.uncertainty.incidence))
                .fold(f64::INFINITY, f64::min);
            let u = vis_curve.sensor_uncertainty_at(best).unwrap();
            assert!(complies(u, mp.tolerance, &p.params), "{} u {u}", mp.id);
            let reported = o.achieved[i].unwrap();
            assert!((reported.angle - best).abs() < 1e-12);
        }
    }
}

#[test]
fn tight_plate_separates_the_strategies() {
    let cfg = Config::default();
    let s = tight_tolerance_plate(240.0, 40.0, &[7, 28], 0.36);
    let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps).unwrap();
    let (rows, table) = compare_prepared(&p, &cfg, &[Strategy::Rrt, Strategy::Baseline]).unwrap();
    assert!(table.starts_with("# scanplan-compare v1\n"));
    let (rrt, base) = (&rows[0], &rows[1]);
    assert_eq!(rrt.compliance_ratio, 1.0);
    assert!(base.compliance_ratio < 1.0);
    assert!(rrt.viewpoints > base.viewpoints);
    assert!(rrt.total_time > base.total_time);
}

#[test]
fn identical_strategies_give_identical_rows() {
    let cfg = Config::default();
    let s = random_part(3, 20, &KindTolerances::default());
    let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps).unwrap();
    let (rows, _) = compare_prepared(&p, &cfg, &[Strategy::Rrt, Strategy::Rrt]).unwrap();
    assert_eq!(rows[0], rows[1]);
}

#[test]
fn empty_point_set_is_a_config_error() {
    let cfg = Config::default();
    let s = flat_plate(80.0, 40.0, &KindTolerances::default());
    let e = prepare_from(&cfg, s.mesh, &[], Vec::new()).err().unwrap();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn impossible_tolerance_is_reported_by_the_budget_stage() {
    let cfg = Config::default();
    let mut s = flat_plate(80.0, 40.0, &KindTolerances::default());
    s.mps[0].kind = MpKind::Hole;
    s.mps[0].tolerance = 0.4;
    let e = prepare_from(&cfg, s.mesh, &[], s.mps).err().unwrap();
    assert_eq!(e.stage, "budget");
    assert_eq!(e.exit_code(), 4);
}

#[test]
fn heatmap_colors_follow_the_achieved_values() {
    let s = flat_plate(80.0, 40.0, &KindTolerances::default());
    let bins = [0.04, 0.07, 0.10, 0.13, 0.16, 0.19];
    let colors = |u: &[Option<f64>]| {
        let ply = export_heatmap(&s.mesh, &s.mps, u, &bins);
        let body: Vec<String> = ply
            .lines()
            .skip_while(|l| *l != "end_header")
            .skip(1)
            .take(s.mesh.vertices().len())
            .map(|l| l.split_whitespace().skip(3).collect::<Vec<_>>().join(" "))
            .collect();
        let mut distinct = body.clone();
        distinct.sort();
        distinct.dedup();
        (ply, distinct)
    };
    let (ply, one) = colors(&[Some(0.04); 4]);
    assert_eq!(one.len(), 1);
    for label in ["[0.04,0.07)", "[0.07,0.1)", "[0.1,0.13)", "[0.13,0.16)", "[0.16,0.19]"] {
        assert!(ply.contains(&format!("comment legend {label} ")), "{label}");
    }
    let (_, two) = colors(&[Some(0.04), Some(0.19), Some(0.04), Some(0.19)]);
    assert_eq!(two.len(), 2);
}

#[test]
fn obstacle_between_viewpoints_still_yields_a_clear_plan() {
    let cfg = Config::default();
    let mut s = flat_plate(240.0, 40.0, &KindTolerances::default());
    // a post standing in the middle of the plate
    s.obstacles.push(common::box_mesh(Vec3::new(110.0, 110.0, 0.0), Vec3::new(130.0, 130.0, 260.0)));
    let p = prepare_from(&cfg, s.mesh, &s.obstacles, s.mps).unwrap();
    let o = plan_with(&p, &cfg, Strategy::Rrt).unwrap();
    for vp in &o.viewpoints {
        assert!(!p.scene.collides(&cfg.sensor_body, vp));
    }
    assert!(o.total_time.is_finite());
}
