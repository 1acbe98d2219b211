//! Builders and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scanplan::candidates::CandidateSet;
use scanplan::geometry::{TriangleMesh, Vec3};
use scanplan::sequencer::TimeMatrix;
use scanplan::visibility::{Viewpoint, VisibleMp, VisibleSet};

/// Closed axis-aligned box with outward faces.
pub fn box_mesh(lo: Vec3, hi: Vec3) -> TriangleMesh {
    let v = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { lo.x } else { hi.x },
                if i & 2 == 0 { lo.y } else { hi.y },
                if i & 4 == 0 { lo.z } else { hi.z },
            )
        })
        .collect();
    let t = vec![
        [0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6],
        [0, 1, 4], [1, 5, 4], [2, 6, 3], [3, 6, 7],
        [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5],
    ];
    TriangleMesh::new(v, t).unwrap()
}

/// Twelve candidates on a 4×3 grid with `pitch` spacing, each seeing 4 to 8
/// of 20 points with random uncertainty; every point is seen at least once.
/// At 80 mm every candidate lies within the default neighbor radius of
/// every other one.
pub fn small_instance(seed: u64, pitch: f64) -> (CandidateSet, usize, Vec3) {
    let n_mps = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<(usize, f64)>> = (0..12)
        .map(|_| {
            let k = rng.gen_range(4..=8);
            let mut mps: Vec<usize> = rand::seq::index::sample(&mut rng, n_mps, k).into_vec();
            mps.sort();
            mps.into_iter().map(|m| (m, rng.gen_range(0.04..0.10))).collect()
        })
        .collect();
    for m in 0..n_mps {
        if !sets.iter().any(|s| s.iter().any(|e| e.0 == m)) {
            let c = rng.gen_range(0..12);
            sets[c].push((m, rng.gen_range(0.04..0.10)));
            sets[c].sort_by_key(|e| e.0);
        }
    }
    let vps = (0..12)
        .map(|i| Viewpoint::new(i, Vec3::new((i % 4) as f64 * pitch, (i / 4) as f64 * pitch, 300.0), -Vec3::z(), 0.0))
        .collect();
    let visible = sets
        .iter()
        .enumerate()
        .map(|(i, s)| VisibleSet {
            viewpoint: i,
            entries: s.iter().map(|&(mp, u_sen)| VisibleMp { mp, angle: 0.0, u_sen }).collect(),
        })
        .collect();
    (CandidateSet::from_parts(vps, visible), n_mps, Vec3::new(300.0, 200.0, 1200.0))
}

/// Minimum over every ordered covering sequence of
/// `beta1 * Σ mean(first-time u) + gamma1 * m`, by exhaustive search with
/// the covered set as memo key (the cost to go depends only on it).
pub fn optimal_objective(cs: &CandidateSet, n_mps: usize, beta1: f64, gamma1: f64) -> f64 {
    fn go(
        covered: u64,
        full: u64,
        sets: &[Vec<(usize, f64)>],
        beta1: f64,
        gamma1: f64,
        memo: &mut HashMap<u64, f64>,
    ) -> f64 {
        if covered == full {
            return 0.0;
        }
        if let Some(&v) = memo.get(&covered) {
            return v;
        }
        let mut best = f64::INFINITY;
        for s in sets {
            let fresh: Vec<f64> = s.iter().filter(|e| covered & (1 << e.0) == 0).map(|e| e.1).collect();
            if fresh.is_empty() {
                continue;
            }
            let mut next = covered;
            for e in s {
                next |= 1 << e.0;
            }
            let step = beta1 * fresh.iter().sum::<f64>() / fresh.len() as f64 + gamma1;
            best = best.min(step + go(next, full, sets, beta1, gamma1, memo));
        }
        memo.insert(covered, best);
        best
    }
    let sets: Vec<Vec<(usize, f64)>> = cs
        .visible
        .iter()
        .map(|s| s.entries.iter().map(|e| (e.mp, e.u_sen)).collect())
        .collect();
    go(0, (1u64 << n_mps) - 1, &sets, beta1, gamma1, &mut HashMap::new())
}

/// Random symmetric matrix with positive off-diagonal times.
pub fn random_time_matrix(m: usize, seed: u64) -> TimeMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = rng.gen_range(1.0..20.0);
            t[i][j] = v;
            t[j][i] = v;
        }
    }
    let home = (0..m).map(|_| rng.gen_range(1.0..20.0)).collect();
    TimeMatrix::new(t, home, 5.0).unwrap()
}

/// Shortest tour time by trying every permutation.
pub fn brute_force_tour(tm: &TimeMatrix) -> f64 {
    fn permute(order: &mut Vec<usize>, k: usize, tm: &TimeMatrix, best: &mut f64) {
        if k == order.len() {
            let m = order.len();
            let mut total = tm.home(order[0]) + tm.home(order[m - 1]) + 5.0 * m as f64;
            for w in order.windows(2) {
                total += tm.get(w[0], w[1]);
            }
            *best = best.min(total);
            return;
        }
        for i in k..order.len() {
            order.swap(k, i);
            permute(order, k + 1, tm, best);
            order.swap(k, i);
        }
    }
    let mut order: Vec<usize> = (0..tm.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut order, 0, tm, &mut best);
    best
}
