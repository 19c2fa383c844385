//! Fixed experiments on the three counterexample measures, each ending in a
//! decay verdict.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::{
    binomial_measure, horizontal_cone_experiment, perpendicular_cone_profile, random_branch,
    six_interval_constant, BinomialSpec, ConeHitRecord, HorizontalConeRecord, Schedule,
    StripBlockSpec,
};
use crate::geometry::Point;
use crate::{Error, Result};

/// First level of the six-interval scan.
pub const SIX_INTERVAL_FIRST_LEVEL: usize = 8;
/// Opening used for the rotating-ball cone counts.
pub const ROTATING_ALPHA: f64 = 0.9;
/// Opening used for the strip/block horizontal cones.
pub const STRIP_ALPHA: f64 = 0.5;

fn guard(what: &str, needed: usize, limit: usize, hint: &str) -> Result<()> {
    if needed > limit {
        return Err(Error::DepthGuard {
            what: what.into(),
            needed: needed as f64,
            limit: limit as f64,
            hint: hint.into(),
        });
    }
    Ok(())
}

/// Best six-interval constants at `r = 2^{-j}` around one μ-sampled point of
/// the default binomial cascade.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SixIntervalReport {
    pub x: Vec<f64>,
    pub levels: Vec<usize>,
    pub constants: Vec<f64>,
    pub non_increasing: bool,
    /// The last constant is below half the first.
    pub halved: bool,
}

impl SixIntervalReport {
    pub fn verdict(&self) -> bool {
        self.non_increasing && self.halved
    }
}

/// Scans levels `8 … last_level`; candidate intervals come from 6 levels
/// below each scale.
pub fn six_interval_decay(last_level: usize, seed: u64) -> Result<SixIntervalReport> {
    guard(
        "six-interval scan",
        last_level,
        44,
        "dyadic radii below 2^-44 leave f64 resolution at depth 50",
    )?;
    if last_level <= SIX_INTERVAL_FIRST_LEVEL {
        return Err(Error::arg(format!(
            "last level must exceed {SIX_INTERVAL_FIRST_LEVEL}"
        )));
    }
    let tree = binomial_measure(BinomialSpec::default())?;
    let x: Point = tree
        .sample_points(1, last_level + 8, seed)
        .pop()
        .expect("one point");
    let levels: Vec<usize> = (SIX_INTERVAL_FIRST_LEVEL..=last_level).collect();
    let constants = levels
        .iter()
        .map(|&j| six_interval_constant(&tree, &x, 0.5f64.powi(j as i32), 6, 3.0, 6))
        .collect::<Result<Vec<_>>>()?;
    Ok(SixIntervalReport {
        x: x.as_slice().to_vec(),
        non_increasing: constants.windows(2).all(|w| w[1] <= w[0]),
        halved: constants[constants.len() - 1] < constants[0] / 2.0,
        levels,
        constants,
    })
}

/// Cone hit counts around the perpendicular of each row along one random
/// branch of the rotating-ball set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotatingReport {
    pub alpha: f64,
    /// `⌈10/α⌉ + 1`.
    pub hit_bound: usize,
    pub records: Vec<ConeHitRecord>,
    /// Smallest `n₀` with `hits ≤ hit_bound` for all `n ≥ n₀`.
    pub n0: usize,
    /// The last ratio bound is below half the first.
    pub halved: bool,
}

impl RotatingReport {
    /// `n₀ ≤ 8` and the ratio bound halves.
    pub fn verdict(&self) -> bool {
        self.n0 <= 8 && self.halved
    }
}

/// Follows a random branch of length `n_max + 6` and counts for
/// `n = 2 … n_max`.
pub fn rotating_cone_decay(n_max: usize, seed: u64) -> Result<RotatingReport> {
    guard("rotating-ball branch", n_max, 4096, "fans grow like 2n^2")?;
    if n_max < 3 {
        return Err(Error::arg("need n_max >= 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = random_branch(n_max + 6, &mut rng);
    let records = perpendicular_cone_profile(&path, ROTATING_ALPHA, 6)?;
    let hit_bound = (10.0 / ROTATING_ALPHA).ceil() as usize + 1;
    let n0 = records
        .iter()
        .rposition(|r| r.hits > hit_bound)
        .map_or(records[0].n, |i| records[i].n + 1);
    let halved = records[records.len() - 1].ratio_bound < records[0].ratio_bound / 2.0;
    Ok(RotatingReport {
        alpha: ROTATING_ALPHA,
        hit_bound,
        records,
        n0,
        halved,
    })
}

/// Horizontal-cone ratio bounds of the strip/block measure under the schedule
/// `I_j = j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripReport {
    pub alpha: f64,
    pub records: Vec<HorizontalConeRecord>,
    /// `max_hi ≤ 2/I_{level+1}` at every level.
    pub bounded: bool,
    /// `max_hi` strictly decreases from level to level.
    pub decreasing: bool,
}

impl StripReport {
    pub fn verdict(&self) -> bool {
        self.bounded && self.decreasing
    }
}

/// Levels `2 … last_level`, `samples` random balls each.
pub fn strip_cone_decay(last_level: usize, samples: usize, seed: u64) -> Result<StripReport> {
    guard(
        "strip/block levels",
        last_level,
        10,
        "node fans grow like 2I^3",
    )?;
    if last_level < 3 || samples == 0 {
        return Err(Error::arg("need last_level >= 3 and samples >= 1"));
    }
    let spec = StripBlockSpec {
        schedule: Schedule::Increasing,
    };
    let records: Vec<HorizontalConeRecord> = (2..=last_level)
        .map(|level| horizontal_cone_experiment(&spec, level, STRIP_ALPHA, samples, 3, seed))
        .collect::<Result<_>>()?;
    Ok(StripReport {
        alpha: STRIP_ALPHA,
        bounded: records.iter().all(|r| r.max_hi <= r.bound_next),
        decreasing: records.windows(2).all(|w| w[1].max_hi < w[0].max_hi),
        records,
    })
}
