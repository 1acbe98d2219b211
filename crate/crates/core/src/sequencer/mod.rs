//! Visiting order of the selected viewpoints: pairwise collision-free
//! travel times, then simulated annealing over open tours that start and
//! end at the home pose.

mod motion;

pub use motion::{DetourConfig, LocalPath, Motion, MotionSpeeds};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::visibility::Viewpoint;

/// Travel times between viewpoints and to and from home, seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMatrix {
    times: Vec<Vec<f64>>,
    /// Home leg per viewpoint; motion is symmetric so one value serves both
    /// directions.
    home: Vec<f64>,
    /// Scan time spent at every viewpoint.
    pub scan_time: f64,
}

impl TimeMatrix {
    /// Builds a matrix from pairwise times. The diagonal is forced to
    /// infinity; the input must be symmetric with finite positive entries.
    pub fn new(mut times: Vec<Vec<f64>>, home: Vec<f64>, scan_time: f64) -> Result<Self> {
        let m = home.len();
        if m == 0 || times.len() != m || times.iter().any(|r| r.len() != m) {
            return Err(PlanError::Config("time matrix must be square and match the home legs".into()));
        }
        for i in 0..m {
            times[i][i] = f64::INFINITY;
            for j in 0..i {
                let t = times[i][j];
                if t != times[j][i] || !t.is_finite() || t <= 0.0 {
                    return Err(PlanError::Config(format!("invalid travel time between {i} and {j}")));
                }
            }
        }
        if home.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(PlanError::Config("home legs must be finite and non-negative".into()));
        }
        Ok(TimeMatrix { times, home, scan_time })
    }

    pub fn len(&self) -> usize {
        self.home.len()
    }

    pub fn is_empty(&self) -> bool {
        self.home.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.times[i][j]
    }

    pub fn home(&self, i: usize) -> f64 {
        self.home[i]
    }

    /// Home to `order[0]`, through the order, back home, plus scan time at
    /// every stop.
    pub fn tour_time(&self, order: &[usize]) -> f64 {
        let legs: f64 = order.windows(2).map(|w| self.times[w[0]][w[1]]).sum();
        let ends = match (order.first(), order.last()) {
            (Some(&f), Some(&l)) => self.home[f] + self.home[l],
            _ => 0.0,
        };
        legs + ends + order.len() as f64 * self.scan_time
    }
}

/// Pose indices and per-leg times of every local path, kept for the plan
/// document.
#[derive(Debug, Clone)]
pub struct TravelTable {
    pub matrix: TimeMatrix,
    /// Paths between viewpoints `i < j`, indexed `[i][j - i - 1]`.
    pairs: Vec<Vec<LocalPath>>,
    home_paths: Vec<LocalPath>,
}

impl TravelTable {
    pub fn path(&self, i: usize, j: usize) -> &LocalPath {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        &self.pairs[a][b - a - 1]
    }

    pub fn home_path(&self, i: usize) -> &LocalPath {
        &self.home_paths[i]
    }
}

/// Times every pair of `viewpoints` and every home leg.
///
/// Each unordered pair is planned once, so the matrix is symmetric by
/// construction. Detours are seeded per pair for reproducibility.
pub fn build_time_matrix(
    viewpoints: &[Viewpoint],
    home: &Viewpoint,
    motion: &Motion<'_>,
    scan_time: f64,
    seed: u64,
) -> Result<TravelTable> {
    let m = viewpoints.len();
    if m == 0 {
        return Err(PlanError::Config("nothing to sequence".into()));
    }
    let pair_seed = |i: usize, j: usize| seed ^ ((i as u64) << 32 | j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let home_paths = viewpoints
        .par_iter()
        .enumerate()
        .map(|(i, vp)| motion.local_path(home, vp, pair_seed(m, i)))
        .collect::<Result<Vec<_>>>()?;
    let pairs = (0..m)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..m)
                .map(|j| motion.local_path(&viewpoints[i], &viewpoints[j], pair_seed(i, j)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut times = vec![vec![f64::INFINITY; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            // coincident poses would give zero; keep entries strictly positive
            let t = pairs[i][j - i - 1].time.max(f64::MIN_POSITIVE);
            times[i][j] = t;
            times[j][i] = t;
        }
    }
    let home_times = home_paths.iter().map(|p| p.time).collect();
    Ok(TravelTable {
        matrix: TimeMatrix::new(times, home_times, scan_time)?,
        pairs,
        home_paths,
    })
}

/// Simulated annealing schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    /// Geometric cooling factor per iteration.
    pub cooling: f64,
    /// Iterations per restart, per viewpoint.
    pub iterations_per_viewpoint: usize,
    pub restarts: usize,
    /// Random tours used to set the initial temperature.
    pub temperature_samples: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            cooling: 0.995,
            iterations_per_viewpoint: 200,
            restarts: 3,
            temperature_samples: 100,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(PlanError::Config("cooling must lie in (0, 1)".into()));
        }
        if self.restarts == 0 || self.iterations_per_viewpoint == 0 {
            return Err(PlanError::Config("annealing needs at least one restart and iteration".into()));
        }
        Ok(())
    }
}

/// A visiting order and its total time.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub total: f64,
}

/// Best tour found by annealing.
pub fn solve_tsp_sa(tm: &TimeMatrix, cfg: &AnnealConfig, seed: u64) -> Tour {
    anneal(tm, cfg, seed, |_, _| {})
}

/// Like [`solve_tsp_sa`], calling `observe(current, best_total)` after
/// every iteration.
pub fn anneal(tm: &TimeMatrix, cfg: &AnnealConfig, seed: u64, mut observe: impl FnMut(&[usize], f64)) -> Tour {
    let m = tm.len();
    let identity: Vec<usize> = (0..m).collect();
    if m <= 2 {
        // both orders of two stops cost the same
        let total = tm.tour_time(&identity);
        observe(&identity, total);
        return Tour { order: identity, total };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0 = initial_temperature(tm, cfg.temperature_samples, &mut rng);
    let mut best = Tour {
        total: tm.tour_time(&identity),
        order: identity,
    };
    for _ in 0..cfg.restarts {
        let mut cur = best.order.clone();
        cur.shuffle(&mut rng);
        let mut cur_total = tm.tour_time(&cur);
        if cur_total < best.total {
            best = Tour {
                order: cur.clone(),
                total: cur_total,
            };
        }
        let mut temp = t0;
        for _ in 0..cfg.iterations_per_viewpoint * m {
            let cand = propose(&cur, &mut rng);
            let cand_total = tm.tour_time(&cand);
            let delta = cand_total - cur_total;
            if delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < (-delta / temp).exp()) {
                cur = cand;
                cur_total = cand_total;
                if cur_total < best.total {
                    best = Tour {
                        order: cur.clone(),
                        total: cur_total,
                    };
                }
            }
            temp *= cfg.cooling;
            observe(&cur, best.total);
        }
    }
    best
}

fn initial_temperature(tm: &TimeMatrix, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut order: Vec<usize> = (0..tm.len()).collect();
    let totals: Vec<f64> = (0..samples.max(2))
        .map(|_| {
            order.shuffle(rng);
            tm.tour_time(&order)
        })
        .collect();
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    (totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (totals.len() - 1) as f64).sqrt()
}

/// Either reverses a segment (2-opt) or moves a short segment elsewhere
/// (or-opt). Always returns a permutation of `order`.
fn propose(order: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = order.len();
    let mut out = order.to_vec();
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..m - 1);
        let j = rng.gen_range(i + 1..m);
        out[i..=j].reverse();
    } else {
        let len = rng.gen_range(1..=3.min(m - 1));
        let start = rng.gen_range(0..=m - len);
        let seg: Vec<usize> = out.drain(start..start + len).collect();
        let at = rng.gen_range(0..=out.len());
        out.splice(at..at, seg);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{TriangleMesh, Vec3};
    use crate::visibility::{Scene, SensorBody};

    fn plate() -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(-100.0, -100.0, 0.0),
                Vec3::new(100.0, -100.0, 0.0),
                Vec3::new(100.0, 100.0, 0.0),
                Vec3::new(-100.0, 100.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    fn down(id: usize, x: f64) -> Viewpoint {
        Viewpoint::new(id, Vec3::new(x, 0.0, 250.0), -Vec3::z(), 0.0)
    }

    #[test]
    fn collinear_viewpoints() {
        let scene = Scene::new(&plate(), &[]);
        let body = SensorBody::default();
        let motion = Motion {
            scene: &scene,
            body: &body,
            speeds: MotionSpeeds::default(),
            detour: DetourConfig::default(),
        };
        let vps = [down(0, 0.0), down(1, 100.0), down(2, 200.0)];
        let home = Viewpoint::new(9, Vec3::new(0.0, 0.0, 550.0), -Vec3::z(), 0.0);
        let table = build_time_matrix(&vps, &home, &motion, 5.0, 0).unwrap();
        let tm = &table.matrix;
        assert!((tm.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((tm.get(1, 2) - 1.0).abs() < 1e-12);
        assert!((tm.get(0, 2) - 2.0).abs() < 1e-12);
        assert!((tm.home(0) - 3.0).abs() < 1e-12);
        for i in 0..3 {
            assert_eq!(tm.get(i, i), f64::INFINITY);
            for j in 0..3 {
                assert_eq!(tm.get(i, j), tm.get(j, i));
            }
        }
        assert_eq!(table.path(2, 0).waypoints.len(), 2);

        let single = build_time_matrix(&vps[..1], &home, &motion, 5.0, 0).unwrap();
        assert_eq!(single.matrix.len(), 1);
        assert_eq!(single.matrix.get(0, 0), f64::INFINITY);
        assert!(single.matrix.home(0).is_finite());
    }

    #[test]
    fn single_stop_tour() {
        let tm = TimeMatrix::new(vec![vec![0.0]], vec![2.5], 5.0).unwrap();
        let tour = solve_tsp_sa(&tm, &AnnealConfig::default(), 0);
        assert_eq!(tour.order, vec![0]);
        assert_eq!(tour.total, 2.5 + 2.5 + 5.0);
    }

    #[test]
    fn equal_times_give_hand_total() {
        let times = vec![vec![1.5; 3]; 3];
        let tm = TimeMatrix::new(times, vec![2.0; 3], 5.0).unwrap();
        let tour = solve_tsp_sa(&tm, &AnnealConfig::default(), 3);
        let mut sorted = tour.order.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
        assert!((tour.total - (2.0 + 1.5 + 1.5 + 2.0 + 15.0)).abs() < 1e-12);
    }

    #[test]
    fn matrix_rejects_asymmetry() {
        let t = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(TimeMatrix::new(t, vec![1.0, 1.0], 0.0).is_err());
        let z = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(TimeMatrix::new(z, vec![1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn every_iterate_is_a_permutation_and_best_never_rises() {
        let m = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut t = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..i {
                let v = rng.gen_range(1.0..10.0);
                t[i][j] = v;
                t[j][i] = v;
            }
        }
        let home: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..10.0)).collect();
        let tm = TimeMatrix::new(t, home, 1.0).unwrap();
        let mut last = f64::INFINITY;
        let mut steps = 0;
        let tour = anneal(&tm, &AnnealConfig::default(), 5, |order, best| {
            let mut seen = vec![false; m];
            for &i in order {
                assert!(!seen[i]);
                seen[i] = true;
            }
            assert_eq!(order.len(), m);
            assert!(best <= last);
            last = best;
            steps += 1;
        });
        assert_eq!(steps, 3 * 200 * m);
        assert!((tm.tour_time(&tour.order) - tour.total).abs() < 1e-9);
    }
}
