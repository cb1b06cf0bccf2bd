//! Seeded equivalence runs of the fast solvers against exhaustive enumeration.

use rand::Rng;
use serde::Serialize;

use crate::assignment::{brute_force_min_cost, solve_min_cost, CostMatrix};
use crate::error::Result;
use crate::model::KeypointSchema;
use crate::oks::VisibilityFilter;
use crate::ospa::{distance_matrix, ospa_pose};
use crate::ospa2::{ospa2_pose, track_distance_matrix};
use crate::synthetic;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub suite: &'static str,
    pub trials: usize,
    pub max_deviation: f64,
}

impl OracleReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_deviation < tolerance
    }
}

/// Brute-force OSPA value of a distance matrix.
fn brute_ospa(matrix: &CostMatrix) -> Result<f64> {
    let n = matrix.rows().max(matrix.cols());
    if n == 0 {
        return Ok(0.0);
    }
    let m = matrix.rows().min(matrix.cols());
    let best = brute_force_min_cost(matrix)?;
    Ok((best.total_cost + (n - m) as f64) / n as f64)
}

/// Random rectangular matrices up to `max_dim` per side.
pub fn assignment_suite(trials: usize, seed: u64, max_dim: usize) -> Result<OracleReport> {
    let mut rng = synthetic::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let rows = rng.gen_range(0..=max_dim);
        let cols = rng.gen_range(0..=max_dim);
        let matrix = synthetic::random_cost_matrix(&mut rng, rows, cols);
        let fast = solve_min_cost(&matrix).total_cost;
        let slow = brute_force_min_cost(&matrix)?.total_cost;
        worst = worst.max((fast - slow).abs());
    }
    Ok(OracleReport {
        suite: "assignment",
        trials,
        max_deviation: worst,
    })
}

/// Random pose-set pairs of up to six poses per side.
pub fn ospa_suite(trials: usize, seed: u64, schema: &KeypointSchema) -> Result<OracleReport> {
    let mut rng = synthetic::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (a, b) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        let gt = synthetic::random_pose_set(&mut rng, a);
        let pred = synthetic::random_pose_set(&mut rng, b);
        let fast = ospa_pose(&gt, &pred, schema)?.total;
        let slow = brute_ospa(&distance_matrix(&gt, &pred, schema, VisibilityFilter::All)?)?;
        worst = worst.max((fast - slow).abs());
    }
    Ok(OracleReport {
        suite: "ospa_pose",
        trials,
        max_deviation: worst,
    })
}

/// Random trajectory-set pairs of up to six tracks over ten frames.
pub fn ospa2_suite(trials: usize, seed: u64, schema: &KeypointSchema) -> Result<OracleReport> {
    let mut rng = synthetic::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let gt = synthetic::random_track_set(&mut rng, 6, 10);
        let pred = synthetic::random_track_set(&mut rng, 6, 10);
        let fast = ospa2_pose(&gt, &pred, schema)?.total();
        let slow = brute_ospa(&track_distance_matrix(
            &gt,
            &pred,
            schema,
            VisibilityFilter::All,
        )?)?;
        worst = worst.max((fast - slow).abs());
    }
    Ok(OracleReport {
        suite: "ospa2_pose",
        trials,
        max_deviation: worst,
    })
}
